//! Text formats: sequence files and serialized models.
//!
//! A sequence file is plain text. Lines starting with `#` and blank lines
//! are ignored; the first remaining line is `states M`; every later line is
//! one sequence of space-separated 0-based state ids.
//!
//! Model files are JSON documents. Floats are written in shortest
//! round-trip form and parsed with correct rounding, so a saved model
//! reloads bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{FmcModel, HmcModel, MtdModel};
use crate::dataset::SequenceDataset;
use crate::error::{Error, Result};
use crate::family::FittedModel;
use crate::matrix::GenerationMatrix;
use crate::mmc::MmcModel;
use crate::sgo::Sgo;
use crate::space::StateSpace;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Renders `data` with optional leading comment lines.
pub fn format_sequences(data: &SequenceDataset, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "states {}", data.num_states());
    for seq in data.sequences() {
        let line: Vec<String> = seq.iter().map(|s| s.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_sequences(text: &str, order: usize) -> Result<SequenceDataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::Format("missing 'states M' header".into()))?;
    let states = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["states", m] => m
            .parse::<usize>()
            .map_err(|e| Error::Format(format!("line {lineno}: bad state count: {e}")))?,
        _ => {
            return Err(Error::Format(format!(
                "line {lineno}: expected 'states M', found '{header}'"
            )))
        }
    };
    let space = StateSpace::new(states)?;

    let mut sequences = Vec::new();
    for (lineno, line) in lines {
        let seq = line
            .split_whitespace()
            .map(|tok| {
                let s: usize = tok
                    .parse()
                    .map_err(|e| Error::Format(format!("line {lineno}: bad state id '{tok}': {e}")))?;
                space
                    .check(s)
                    .map_err(|e| Error::Format(format!("line {lineno}: {e}")))?;
                Ok(s)
            })
            .collect::<Result<Vec<usize>>>()?;
        sequences.push(seq);
    }
    SequenceDataset::new(space, order, sequences)
}

pub fn read_sequences(path: &Path, order: usize) -> Result<SequenceDataset> {
    parse_sequences(&std::fs::read_to_string(path)?, order)
}

/// SHA-256 of the canonical (comment-free) rendering of `data`.
pub fn data_digest(data: &SequenceDataset) -> String {
    let digest = Sha256::digest(format_sequences(data, &[]).as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HmcContext {
    /// Base-`M` context index, most recent lag least significant.
    pub context: u64,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum ModelParams {
    Mmc { sgo: Vec<usize>, rows: Vec<Vec<f64>> },
    Fmc { transition: Vec<Vec<f64>> },
    Hmc { alpha: f64, contexts: Vec<HmcContext> },
    Mtd { lambda: Vec<f64>, q: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub fitter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub data_digest: String,
    /// Unsmoothed training log-likelihood; absent when it is `-inf`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_log_likelihood: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub states: usize,
    pub order: usize,
    #[serde(flatten)]
    pub params: ModelParams,
    pub provenance: Provenance,
}

impl ModelFile {
    pub fn new(model: &FittedModel, order: usize, provenance: Provenance) -> Self {
        use crate::model::SequenceModel;
        let params = match model {
            FittedModel::Mmc(m) => ModelParams::Mmc {
                sgo: m.sgo().priority().to_vec(),
                rows: m.matrix().rows().to_vec(),
            },
            FittedModel::Fmc(m) => ModelParams::Fmc {
                transition: m.transition().rows().to_vec(),
            },
            FittedModel::Hmc(m) => ModelParams::Hmc {
                alpha: m.alpha(),
                contexts: m
                    .observed()
                    .into_iter()
                    .map(|(context, counts)| HmcContext {
                        context,
                        counts: counts.to_vec(),
                    })
                    .collect(),
            },
            FittedModel::Mtd(m) => ModelParams::Mtd {
                lambda: m.lambda().to_vec(),
                q: m.q().rows().to_vec(),
            },
        };
        Self {
            format_version: MODEL_FORMAT_VERSION,
            states: model.space().size(),
            order,
            params,
            provenance,
        }
    }

    pub fn to_model(&self) -> Result<FittedModel> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {}",
                self.format_version
            )));
        }
        let space = StateSpace::new(self.states)?;
        let check_states = |n: usize| {
            if n == self.states {
                Ok(())
            } else {
                Err(Error::Format(format!(
                    "parameters cover {n} states, header says {}",
                    self.states
                )))
            }
        };
        let model = match &self.params {
            ModelParams::Mmc { sgo, rows } => {
                check_states(rows.len())?;
                FittedModel::Mmc(MmcModel::new(
                    GenerationMatrix::new(rows.clone())?,
                    Sgo::new(sgo.clone())?,
                    self.order,
                )?)
            }
            ModelParams::Fmc { transition } => {
                check_states(transition.len())?;
                FittedModel::Fmc(FmcModel::new(GenerationMatrix::new(transition.clone())?))
            }
            ModelParams::Hmc { alpha, contexts } => FittedModel::Hmc(HmcModel::from_counts(
                space,
                self.order,
                *alpha,
                contexts.iter().map(|c| (c.context, c.counts.clone())),
            )?),
            ModelParams::Mtd { lambda, q } => {
                check_states(q.len())?;
                if lambda.len() != self.order {
                    return Err(Error::Format(format!(
                        "{} lag weights for order {}",
                        lambda.len(),
                        self.order
                    )));
                }
                FittedModel::Mtd(MtdModel::new(
                    lambda.clone(),
                    GenerationMatrix::new(q.clone())?,
                )?)
            }
        };
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_header() {
        let text = "# generated\n\nstates 3\n0 1 2 2\n# mid comment\n1 1\n";
        let data = parse_sequences(text, 1).unwrap();
        assert_eq!(data.sequences(), &[vec![0, 1, 2, 2], vec![1, 1]]);
        assert_eq!(data.num_states(), 3);
        assert_eq!(parse_sequences(&format_sequences(&data, &[]), 1).unwrap(), data);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_sequences("", 1).is_err());
        assert!(parse_sequences("0 1 2\n", 1).is_err());
        assert!(parse_sequences("states 2\n0 2\n", 1).is_err());
        assert!(parse_sequences("states 2\n0 x\n", 1).is_err());
        assert!(parse_sequences("states 0\n", 1).is_err());
    }

    #[test]
    fn digest_ignores_comments() {
        let a = parse_sequences("states 2\n0 1 1\n", 1).unwrap();
        let b = parse_sequences("# hi\nstates 2\n0 1 1\n", 1).unwrap();
        assert_eq!(data_digest(&a), data_digest(&b));
        assert!(data_digest(&a).starts_with("sha256:"));
    }
}
