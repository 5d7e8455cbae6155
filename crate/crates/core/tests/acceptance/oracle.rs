//! Brute-force references that avoid the library's geometry tables and
//! enumeration engine. Only field arithmetic and the form container are shared.

use qcl_core::{Fe, Field, Form4};

/// Projective points of PG(3,q), first nonzero coordinate equal to 1.
pub fn projective_points(field: &Field) -> Vec<[Fe; 4]> {
    let els: Vec<Fe> = field.elements().collect();
    let mut out = Vec::new();
    for a in &els {
        for b in &els {
            for c in &els {
                for d in &els {
                    let v = [*a, *b, *c, *d];
                    if v.iter().find(|x| !x.is_zero()) == Some(&Fe::ONE) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// `f(x)` summed monomial by monomial in lexicographic order.
pub fn eval(field: &Field, f: &Form4, x: &[Fe; 4]) -> Fe {
    let mut acc = Fe::ZERO;
    let mut k = 0;
    for i in 0..4 {
        for j in i..4 {
            let t = field.mul(f.coeffs()[k], field.mul(x[i], x[j]));
            acc = field.add(acc, t);
            k += 1;
        }
    }
    acc
}

pub fn zero_count(field: &Field, f: &Form4) -> usize {
    projective_points(field).iter().filter(|x| eval(field, f, x).is_zero()).count()
}

/// Rank over GF(q) by plain elimination.
pub fn rank(field: &Field, rows: &[Vec<Fe>]) -> usize {
    let mut m: Vec<Vec<Fe>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, piv);
        let inv = field.inv(m[r][c]).unwrap();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let t = field.mul(m[i][c], inv);
                for j in 0..cols {
                    let s = field.mul(t, m[r][j]);
                    m[i][j] = field.sub(m[i][j], s);
                }
            }
        }
        r += 1;
    }
    r
}

/// Rank of the evaluation matrix of the ten quadratic monomials on `points`.
pub fn evaluation_rank(field: &Field, points: &[[Fe; 4]]) -> usize {
    let rows: Vec<Vec<Fe>> = (0..10)
        .map(|k| {
            let mut unit = [Fe::ZERO; 10];
            unit[k] = Fe::ONE;
            let mono = Form4::new(unit);
            points.iter().map(|x| eval(field, &mono, x)).collect()
        })
        .collect();
    rank(field, &rows)
}

/// Some `c` with `u^2 + u + c` irreducible.
pub fn irreducible_c(field: &Field) -> Fe {
    field
        .elements()
        .find(|&c| field.elements().all(|u| !field.add(field.add(field.mul(u, u), u), c).is_zero()))
        .unwrap()
}

pub fn form(field: &Field, terms: &[(Fe, usize, usize)]) -> Form4 {
    let t: Vec<(u32, usize, usize)> = terms.iter().map(|&(c, i, j)| (c.rep(), i, j)).collect();
    Form4::from_terms(field, &t).unwrap()
}

/// Number of lines through `p` meeting the zero set `xs` in exactly two
/// points, for a zero set containing no line.
pub fn bisecants_through(field: &Field, p: &[Fe; 4], xs: &[[Fe; 4]]) -> usize {
    let mut n = 0;
    for a in 0..xs.len() {
        for b in a + 1..xs.len() {
            if rank(field, &[p.to_vec(), xs[a].to_vec(), xs[b].to_vec()]) == 2 {
                n += 1;
            }
        }
    }
    n
}

/// Weight of every codeword, found by evaluating each of the q^10 forms on
/// `points`; each codeword appears q^(10-k) times.
pub fn form_weight_histogram(field: &Field, points: &[[Fe; 4]]) -> Vec<u64> {
    let q = field.order();
    let n = points.len();
    let monos: Vec<[Fe; 10]> = points
        .iter()
        .map(|x| {
            let mut m = [Fe::ZERO; 10];
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    m[k] = field.mul(x[i], x[j]);
                    k += 1;
                }
            }
            m
        })
        .collect();
    let mut hist = vec![0u64; n + 1];
    let els: Vec<Fe> = field.elements().collect();
    let mut digits = [0usize; 10];
    for _ in 0..q.pow(10) {
        let mut w = 0;
        for m in &monos {
            let mut acc = Fe::ZERO;
            for k in 0..10 {
                acc = field.add(acc, field.mul(els[digits[k]], m[k]));
            }
            if !acc.is_zero() {
                w += 1;
            }
        }
        hist[w] += 1;
        for d in digits.iter_mut() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    hist
}
