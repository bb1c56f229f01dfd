//! GF(2) linear algebra for code construction: bit matrices, reduced row
//! echelon form, and systematic generators derived from parity checks.

use super::CodesError;

/// Dense bit matrix, one `u64` word per 64 columns.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let word = &mut self.data[r * self.words + c / 64];
        if value {
            *word |= 1 << (c % 64);
        } else {
            *word &= !(1 << (c % 64));
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    fn xor_row_into(&mut self, target: usize, source: usize) {
        for w in 0..self.words {
            let s = self.data[source * self.words + w];
            self.data[target * self.words + w] ^= s;
        }
    }

    /// Matrix-vector product over GF(2); `v` holds 0/1 bytes.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u8;
                for (c, &bit) in v.iter().enumerate() {
                    if bit == 1 && self.get(r, c) {
                        acc ^= 1;
                    }
                }
                acc
            })
            .collect()
    }
}

/// In-place reduced row echelon form; returns pivot columns in row order.
pub fn rref(m: &mut BitMatrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pivot_row = 0;
    for col in 0..m.cols() {
        if pivot_row == m.rows() {
            break;
        }
        let Some(r) = (pivot_row..m.rows()).find(|&r| m.get(r, col)) else {
            continue;
        };
        m.swap_rows(r, pivot_row);
        for other in 0..m.rows() {
            if other != pivot_row && m.get(other, col) {
                m.xor_row_into(other, pivot_row);
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    pivots
}

/// A systematic encoder derived from a parity-check matrix: the free
/// columns carry the information bits and every pivot column is the XOR of
/// a subset of them.
#[derive(Debug, Clone)]
pub struct SystematicForm {
    /// Per codeword position, the sorted info-bit indices XOR-ed into it.
    pub sets: Vec<Vec<usize>>,
    /// Codeword positions that carry information bits, ascending.
    pub free_cols: Vec<usize>,
    pub k: usize,
}

pub fn systematic_from_parity(h: &BitMatrix) -> Result<SystematicForm, CodesError> {
    let mut reduced = h.clone();
    let pivots = rref(&mut reduced);
    let n = h.cols();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();
    let k = free_cols.len();
    if k == 0 {
        return Err(CodesError::InvalidSpec(
            "parity-check matrix has full column rank; no information bits".into(),
        ));
    }
    let info_index: std::collections::BTreeMap<usize, usize> =
        free_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut sets = vec![Vec::new(); n];
    for (&col, &idx) in &info_index {
        sets[col] = vec![idx];
    }
    for (row, &p_col) in pivots.iter().enumerate() {
        let mut deps: Vec<usize> = free_cols
            .iter()
            .filter(|&&f| reduced.get(row, f))
            .map(|f| info_index[f])
            .collect();
        deps.sort_unstable();
        sets[p_col] = deps;
    }
    Ok(SystematicForm { sets, free_cols, k })
}

/// Parity-check matrix of the `[7,4]` Hamming code in the layout
/// `(d1, d2, d3, d4, p1, p2, p3)`.
pub fn hamming74_parity() -> BitMatrix {
    let rows = [
        [1, 1, 0, 1, 1, 0, 0],
        [1, 0, 1, 1, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
    ];
    let mut h = BitMatrix::zeros(3, 7);
    for (r, row) in rows.iter().enumerate() {
        for (c, &bit) in row.iter().enumerate() {
            h.set(r, c, bit == 1);
        }
    }
    h
}

/// Generator sets of the `[7,4]` Hamming code: data bits copy through and
/// each parity position XORs three of them.
pub fn hamming74_sets() -> Vec<Vec<usize>> {
    vec![
        vec![0],
        vec![1],
        vec![2],
        vec![3],
        vec![0, 1, 3],
        vec![0, 2, 3],
        vec![1, 2, 3],
    ]
}
