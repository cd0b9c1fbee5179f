use num_complex::Complex64;

use crate::numlinalg::{identity, real, CMatrix, DEFAULT_TOL};

/// Extended elementary row operation. Left-multiplying by its matrix applies it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryFactor {
    /// Add `factor` times row `source` to row `target`.
    RowAdd { target: usize, source: usize, factor: Complex64 },
    /// Multiply row `row` by `factor`, which may be zero.
    RowScale { row: usize, factor: Complex64 },
    RowSwap { a: usize, b: usize },
}

impl ElementaryFactor {
    pub fn to_matrix(&self, n: usize) -> CMatrix {
        let mut m = identity(n);
        match *self {
            ElementaryFactor::RowAdd { target, source, factor } => m[(target, source)] = factor,
            ElementaryFactor::RowScale { row, factor } => m[(row, row)] = factor,
            ElementaryFactor::RowSwap { a, b } => m.swap_rows(a, b),
        }
        m
    }

    pub fn is_zero_scale(&self) -> bool {
        matches!(self, ElementaryFactor::RowScale { factor, .. } if factor.norm() == 0.0)
    }

    fn apply(&self, m: &mut CMatrix) {
        match *self {
            ElementaryFactor::RowAdd { target, source, factor } => {
                let row = m.row(source) * factor;
                let mut t = m.row_mut(target);
                t += row;
            }
            ElementaryFactor::RowScale { row, factor } => {
                let mut r = m.row_mut(row);
                r *= factor;
            }
            ElementaryFactor::RowSwap { a, b } => m.swap_rows(a, b),
        }
    }

    fn inverse(&self) -> ElementaryFactor {
        match *self {
            ElementaryFactor::RowAdd { target, source, factor } => {
                ElementaryFactor::RowAdd { target, source, factor: -factor }
            }
            ElementaryFactor::RowScale { row, factor } => {
                ElementaryFactor::RowScale { row, factor: factor.inv() }
            }
            swap => swap,
        }
    }
}

/// Gauss–Jordan elimination with partial pivoting; returns the reduced
/// matrix, the applied operations in order, and the pivot columns.
fn gauss_jordan(m: &CMatrix) -> (CMatrix, Vec<ElementaryFactor>, Vec<usize>) {
    let n = m.nrows();
    let mut r = m.clone();
    let mut ops = Vec::new();
    let mut pivots = Vec::new();
    let threshold = DEFAULT_TOL * m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let (best, size) = (row..n)
            .map(|k| (k, r[(k, col)].norm()))
            .fold((row, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if size <= threshold || size == 0.0 {
            continue;
        }
        let mut record = |op: ElementaryFactor, r: &mut CMatrix| {
            op.apply(r);
            ops.push(op);
        };
        if best != row {
            record(ElementaryFactor::RowSwap { a: row, b: best }, &mut r);
        }
        let pivot = r[(row, col)];
        if pivot != real(1.0) {
            record(ElementaryFactor::RowScale { row, factor: pivot.inv() }, &mut r);
        }
        for k in 0..n {
            let value = r[(k, col)];
            if k != row && value.norm() != 0.0 {
                record(ElementaryFactor::RowAdd { target: k, source: row, factor: -value }, &mut r);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, ops, pivots)
}

/// Factor a square matrix into extended elementary matrices whose product,
/// taken left to right, equals `m`.
///
/// With `O_s ⋯ O_1 M = R` in reduced echelon form, the rows of `R` below the
/// rank are replaced by unit vectors on the non-pivot columns to give an
/// invertible `B`; then `M = O_1^{-1} ⋯ O_s^{-1} · Z · B`, where `Z` zero-scales
/// those completion rows and `B` is factored by a second elimination.
pub fn elementary_factorization(m: &CMatrix) -> Vec<ElementaryFactor> {
    let n = m.nrows();
    let (reduced, ops, pivots) = gauss_jordan(m);
    let rank = pivots.len();
    let mut completed = reduced;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    for (offset, &col) in free.iter().enumerate() {
        let mut row = completed.row_mut(rank + offset);
        row.fill(real(0.0));
        row[col] = real(1.0);
    }
    let (_, b_ops, _) = gauss_jordan(&completed);

    let mut factors: Vec<ElementaryFactor> = ops.iter().map(ElementaryFactor::inverse).collect();
    factors.extend((rank..n).map(|row| ElementaryFactor::RowScale { row, factor: real(0.0) }));
    factors.extend(b_ops.iter().map(ElementaryFactor::inverse));
    factors
}

/// Product of the factors' matrices, left to right.
pub fn factor_product(factors: &[ElementaryFactor], n: usize) -> CMatrix {
    let mut out = identity(n);
    for f in factors.iter().rev() {
        f.apply(&mut out);
    }
    out
}
