//! Dense Gaussian elimination over a [`Field`].

use rand::Rng;

use crate::gf::{Fe, Field};

/// Brings `rows` to reduced row-echelon form in place and returns the pivot
/// column of each nonzero row. Zero rows end up at the bottom.
pub fn rref(field: &Field, rows: &mut [Vec<Fe>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = field.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c];
            for j in 0..ncols {
                let t = field.mul(factor, rows[r][j]);
                rows[i][j] = field.sub(rows[i][j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: &Field, rows: &[Vec<Fe>]) -> usize {
    let mut work = rows.to_vec();
    rref(field, &mut work).len()
}

/// Product `a * b` of square matrices.
pub fn mat_mul<const N: usize>(field: &Field, a: &[[Fe; N]; N], b: &[[Fe; N]; N]) -> [[Fe; N]; N] {
    let mut out = [[Fe::ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut acc = Fe::ZERO;
            for k in 0..N {
                acc = field.add(acc, field.mul(a[i][k], b[k][j]));
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Uniformly random invertible 4x4 matrix, by rejection.
pub fn random_invertible<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> [[Fe; 4]; 4] {
    let q = field.order() as u32;
    loop {
        let m: [[Fe; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| field.element(rng.random_range(0..q)).expect("in range")));
        if rank(field, &m.map(|r| r.to_vec())) == 4 {
            return m;
        }
    }
}
