use crate::space::StateSpace;

/// Square table of generation counts: row = generating state, column = generated state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    n: usize,
    cells: Vec<u64>,
}

impl CountTable {
    pub fn zeros(space: StateSpace) -> Self {
        let n = space.size();
        Self {
            n,
            cells: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "count table must be square");
        Self {
            n,
            cells: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> u64 {
        self.cells[from * self.n + to]
    }

    #[inline]
    pub fn add(&mut self, from: usize, to: usize, count: u64) {
        self.cells[from * self.n + to] += count;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.cells[r * self.n..(r + 1) * self.n]
    }

    pub fn row_total(&self, r: usize) -> u64 {
        self.row(r).iter().sum()
    }

    /// Largest cell of row `r`.
    pub fn row_peak(&self, r: usize) -> u64 {
        self.row(r).iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.cells.chunks(self.n).map(|c| c.to_vec()).collect()
    }
}

/// Compares `a_num / a_den` with `b_num / b_den` exactly; denominators must be nonzero.
#[inline]
pub(crate) fn cmp_fractions(a_num: u64, a_den: u64, b_num: u64, b_den: u64) -> std::cmp::Ordering {
    (a_num as u128 * b_den as u128).cmp(&(b_num as u128 * a_den as u128))
}
