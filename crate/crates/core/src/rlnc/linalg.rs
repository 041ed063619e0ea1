//! Row reduction over a [`FieldSpec`].

use crate::algebra::{FieldSpec, Symbol};

/// Reduced row echelon form restricted to a prefix of the columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Pivot rows first, in pivot-column order, then the leftover rows.
    pub rows: Vec<Vec<Symbol>>,
    /// Pivot column of each of the first `pivots.len()` rows.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Rows with no pivot; all zero on the reduced columns.
    pub fn residual_rows(&self) -> &[Vec<Symbol>] {
        &self.rows[self.pivots.len()..]
    }
}

/// Gauss-Jordan elimination with pivots searched in columns `0..pivot_cols`.
///
/// Every pivot is normalised to 1 and cleared from all other rows, so the
/// remaining columns of pivot row i express the unknown at `pivots[i]`.
pub fn reduce(field: &FieldSpec, mut rows: Vec<Vec<Symbol>>, pivot_cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..pivot_cols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(next, found);
        let inv = field.inv(rows[next][col]).expect("pivot is nonzero");
        field.scale(&mut rows[next][col..], inv);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row[col] != 0 {
                let factor = field.neg(row[col]);
                field.axpy(&mut row[col..], factor, &pivot_row[col..]);
            }
        }
        pivots.push(col);
        next += 1;
    }
    Echelon { rows, pivots }
}

/// Rank of a matrix over `field`.
pub fn rank(field: &FieldSpec, rows: Vec<Vec<Symbol>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    reduce(field, rows, cols).rank()
}

/// Inverse of a square matrix, `None` when singular.
pub fn invert(field: &FieldSpec, matrix: &[Vec<Symbol>]) -> Option<Vec<Vec<Symbol>>> {
    let n = matrix.len();
    let augmented = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Symbol::from(i == j)));
            r
        })
        .collect();
    let ech = reduce(field, augmented, n);
    if ech.rank() < n {
        return None;
    }
    Some(ech.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}
