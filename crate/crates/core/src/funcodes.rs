//! The functional code C2(X): evaluations of all quadratic forms at the
//! points of a surface X, its weight distribution and weight hierarchy.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::engine::{self, ScanOptions, Tally, Visitor};
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg;
use crate::pg::Geometry;
use crate::quadric::{Form4, Quadric, QuadricClass};

#[derive(Clone, Debug)]
pub struct FunctionalCode {
    surface: Quadric,
    field: Field,
    /// Global indices of the points of X, in global order; these index the columns.
    points: Vec<u32>,
    monomial_rows: Vec<Vec<Fe>>,
    /// Reduced row-echelon generator matrix.
    gen: Vec<Vec<Fe>>,
    /// `forms[i]` evaluates to `gen[i]` on X.
    forms: Vec<Form4>,
    /// Basis of the forms vanishing on every point of X.
    kernel: Vec<Form4>,
}

/// Builds C2(X) for the surface `Z(f)`; cones and non-degenerate quadrics only.
pub fn build_code(geom: &Geometry, f: &Form4) -> Result<FunctionalCode> {
    let surface = Quadric::analyze(geom, *f)?;
    if !surface.class().is_surface() {
        return Err(Error::UnsupportedSurface(surface.class().name()));
    }
    let field = geom.field().clone();
    let points: Vec<u32> = surface.points().ones().map(|p| p as u32).collect();
    let n = points.len();
    let monomial_rows: Vec<Vec<Fe>> =
        (0..10).map(|j| points.iter().map(|&p| geom.monomials_at(p)[j]).collect()).collect();

    let mut aug: Vec<Vec<Fe>> = monomial_rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let mut r = row.clone();
            r.extend((0..10).map(|i| if i == j { Fe::ONE } else { Fe::ZERO }));
            r
        })
        .collect();
    let pivots = linalg::rref(&field, &mut aug);
    let k = pivots.iter().filter(|&&c| c < n).count();

    let tail = |row: &Vec<Fe>| Form4::new(row[n..].try_into().expect("ten trailing columns"));
    let gen = aug[..k].iter().map(|r| r[..n].to_vec()).collect();
    let forms = aug[..k].iter().map(tail).collect();
    let kernel = aug[k..].iter().map(tail).collect();

    Ok(FunctionalCode { surface, field, points, monomial_rows, gen, forms, kernel })
}

impl FunctionalCode {
    pub fn surface(&self) -> &Quadric {
        &self.surface
    }

    pub fn class(&self) -> QuadricClass {
        self.surface.class()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.gen.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn monomial_rows(&self) -> &[Vec<Fe>] {
        &self.monomial_rows
    }

    pub fn generator(&self) -> &[Vec<Fe>] {
        &self.gen
    }

    /// Forms whose evaluation vectors are the generator rows.
    pub fn row_forms(&self) -> &[Form4] {
        &self.forms
    }

    pub fn kernel(&self) -> &[Form4] {
        &self.kernel
    }

    /// Number of points of X where `g` does not vanish.
    pub fn weight_of(&self, geom: &Geometry, g: &Form4) -> usize {
        self.points.iter().filter(|&&p| !geom.eval(g, p).is_zero()).count()
    }

    pub fn in_kernel(&self, geom: &Geometry, g: &Form4) -> bool {
        self.weight_of(geom, g) == 0
    }

    /// The form `sum d_i forms[i]` behind a message index.
    pub fn message_form(&self, message: u64) -> Form4 {
        let digits = engine::message_digits(self.q(), self.k(), message);
        digits.iter().zip(&self.forms).fold(Form4::ZERO, |acc, (&d, f)| {
            acc.add(&self.field, &f.scale(&self.field, d))
        })
    }

    /// Codeword of a message index.
    pub fn encode(&self, message: u64) -> Vec<Fe> {
        let digits = engine::message_digits(self.q(), self.k(), message);
        let mut cw = vec![Fe::ZERO; self.n()];
        for (&d, row) in digits.iter().zip(&self.gen) {
            for (x, &r) in cw.iter_mut().zip(row) {
                *x = self.field.add(*x, self.field.mul(d, r));
            }
        }
        cw
    }

    /// All forms `g + kernel span`, i.e. every form with the same codeword as `g`.
    pub fn coset(&self, g: &Form4) -> Vec<Form4> {
        let mut out = vec![*g];
        for kf in &self.kernel {
            let mut next = Vec::with_capacity(out.len() * self.q());
            for base in &out {
                for c in self.field.elements() {
                    next.push(base.add(&self.field, &kf.scale(&self.field, c)));
                }
            }
            out = next;
        }
        out
    }

    /// Runs a visitor over every codeword.
    pub fn scan<V, F>(&self, opts: ScanOptions, make: F) -> Result<V>
    where
        V: Visitor,
        F: Fn() -> V + Sync,
    {
        engine::scan(&self.field, &self.gen, self.n(), opts, make)
    }

    pub fn weight_distribution(&self, opts: ScanOptions) -> Result<WeightDistribution> {
        let n = self.n();
        let tally = self.scan(opts, || Tally::new(n))?;
        Ok(WeightDistribution { n, k: self.k(), q: self.q(), counts: tally.0 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    /// `counts[w]` codewords of weight `w`, for `w` in `0..=n`.
    pub counts: Vec<u64>,
}

impl WeightDistribution {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, w: usize) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    /// Attained nonzero weights in ascending order.
    pub fn nonzero_weights(&self) -> Vec<usize> {
        (1..self.counts.len()).filter(|&w| self.counts[w] > 0).collect()
    }

    pub fn hierarchy(&self) -> Result<WeightHierarchy> {
        weight_hierarchy(self)
    }

    /// `weight,count` lines with a header, ascending, attained weights only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,count\n");
        for (w, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                out.push_str(&format!("{w},{c}\n"));
            }
        }
        out
    }

    pub fn as_map(&self) -> BTreeMap<usize, u64> {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(w, &c)| (w, c)).collect()
    }
}

impl Serialize for WeightDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            weight: usize,
            count: u64,
        }
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            k: usize,
            q: usize,
            total: u64,
            counts: Vec<Entry>,
        }
        let counts = self.as_map().into_iter().map(|(weight, count)| Entry { weight, count }).collect();
        Repr { n: self.n, k: self.k, q: self.q, total: self.total(), counts }.serialize(serializer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WeightHierarchy {
    pub w1: usize,
    pub w2: usize,
    pub w3: usize,
}

/// The three smallest nonzero weights present.
pub fn weight_hierarchy(dist: &WeightDistribution) -> Result<WeightHierarchy> {
    match dist.nonzero_weights()[..] {
        [w1, w2, w3, ..] => Ok(WeightHierarchy { w1, w2, w3 }),
        _ => Err(Error::ShortSpectrum),
    }
}

/// Closed-form code parameters claimed for each surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedParams {
    pub n: i64,
    pub k: i64,
    pub d: i64,
    pub w2: i64,
    pub w3: i64,
    /// False when the formulas fail to describe a valid hierarchy at this q
    /// (non-positive `d` or weights out of order).
    pub consistent: bool,
}

pub fn expected_params(class: QuadricClass, q: usize) -> Result<ExpectedParams> {
    if q < 3 {
        return Err(Error::FieldTooSmall(q as u64));
    }
    let q = q as i64;
    let (n, d, w2, w3) = match class {
        QuadricClass::Cone => (q * q + q + 1, q * (q - 3), q * (q - 2), (q - 1) * (q - 1)),
        QuadricClass::Hyperbolic => ((q + 1) * (q + 1), (q - 1) * (q - 1), q * (q - 1), q * q - q + 1),
        QuadricClass::Elliptic => (q * q + 1, q * q - 2 * q - 1, q * (q - 2), (q - 1) * (q - 1)),
        other => return Err(Error::UnsupportedSurface(other.name())),
    };
    let consistent = d > 0 && d < w2 && w2 < w3;
    Ok(ExpectedParams { n, k: 9, d, w2, w3, consistent })
}

/// Measured parameters of a code, side by side with the closed forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamComparison {
    pub class: QuadricClass,
    pub q: usize,
    pub n: usize,
    pub k: usize,
    pub hierarchy: Option<WeightHierarchy>,
    pub expected: ExpectedParams,
    pub matches: bool,
}

pub fn compare_params(code: &FunctionalCode, dist: &WeightDistribution) -> Result<ParamComparison> {
    let expected = expected_params(code.class(), code.q())?;
    let hierarchy = dist.hierarchy().ok();
    let matches = hierarchy.is_some_and(|h| {
        (code.n() as i64, code.k() as i64, h.w1 as i64, h.w2 as i64, h.w3 as i64)
            == (expected.n, expected.k, expected.d, expected.w2, expected.w3)
    });
    Ok(ParamComparison { class: code.class(), q: code.q(), n: code.n(), k: code.k(), hierarchy, expected, matches })
}
