use std::path::Path;

use anyhow::Context;
use mmc_core::bench::SweepRow;

pub fn write_rows(path: &Path, rows: &[SweepRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> anyhow::Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = r
        .deserialize()
        .collect::<Result<Vec<SweepRow>, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(rows)
}
