//! Intersections of two quadrics and the intersection spectrum of a surface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::funcodes::{FunctionalCode, WeightDistribution};
use crate::pg::Geometry;
use crate::quadric::{Form4, Quadric, QuadricClass};

/// Exhaustive spectrum scans visit `q^10` forms; refused above this without override.
pub const SPECTRUM_LIMIT: u64 = 100_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    pub f: Form4,
    pub g: Form4,
    pub class_f: QuadricClass,
    pub class_g: QuadricClass,
    pub size: usize,
    /// Line indices, in line order.
    pub common_lines: Vec<u32>,
    pub shared_planes: Vec<u32>,
    /// Names of the bound cases the pair falls under.
    pub case_label: Vec<&'static str>,
}

/// Size of `Z(f) ∩ Z(g)` with its common lines and planes.
pub fn intersection_count(geom: &Geometry, f: &Form4, g: &Form4) -> Result<IntersectionReport> {
    let a = Quadric::analyze(geom, *f)?;
    let b = Quadric::analyze(geom, *g)?;
    let size = a.points().intersection_count(b.points());
    let common_lines = a.lines().intersection(b.lines()).map(|l| l as u32).collect();
    let shared_planes = a.planes().intersection(b.planes()).map(|h| h as u32).collect();
    let case_label = crate::bounds::case_labels(geom, &a, &b)?;
    Ok(IntersectionReport {
        f: *f,
        g: *g,
        class_f: a.class(),
        class_g: b.class(),
        size,
        common_lines,
        shared_planes,
        case_label,
    })
}

/// Lines lying on both quadrics. Two distinct quadrics without a common plane
/// share at most four lines; more is reported as an internal error.
pub fn common_lines(geom: &Geometry, f: &Form4, g: &Form4) -> Result<Vec<u32>> {
    let a = Quadric::analyze(geom, *f)?;
    let b = Quadric::analyze(geom, *g)?;
    if a.points() == b.points() && f.normalized(geom.field()) == g.normalized(geom.field()) {
        return Err(Error::SameQuadric);
    }
    if a.planes().intersection(b.planes()).next().is_some() {
        return Err(Error::SharedPlane);
    }
    let lines: Vec<u32> = a.lines().intersection(b.lines()).map(|l| l as u32).collect();
    if lines.len() > 4 {
        return Err(Error::Internal(format!("{} common lines without a common plane", lines.len())));
    }
    Ok(lines)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SpectrumMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// The intersection sizes a surface allows: the two top values and a
/// ceiling on everything else.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumPattern {
    pub top: usize,
    pub second: usize,
    pub rest_ceiling: usize,
}

pub fn spectrum_pattern(class: QuadricClass, q: usize) -> Result<SpectrumPattern> {
    let (top, second, rest_ceiling) = match class {
        QuadricClass::Cone => (4 * q + 1, 3 * q + 1, 3 * q),
        QuadricClass::Hyperbolic => (4 * q, 3 * q + 1, 3 * q),
        QuadricClass::Elliptic => (2 * (q + 1), 2 * q + 1, 2 * q),
        other => return Err(Error::UnsupportedSurface(other.name())),
    };
    Ok(SpectrumPattern { top, second, rest_ceiling })
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeWitness {
    pub size: usize,
    pub form: Form4,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumCertificate {
    pub class: QuadricClass,
    pub q: usize,
    pub n: usize,
    pub mode: SpectrumMode,
    pub forms_checked: u64,
    pub kernel_skipped: u64,
    /// Number of forms attaining each intersection size.
    pub attained: BTreeMap<usize, u64>,
    pub max1: Option<usize>,
    pub max2: Option<usize>,
    pub max3: Option<usize>,
    pub pattern: SpectrumPattern,
    /// First form (in scan order) attaining each size.
    pub witnesses: Vec<SizeWitness>,
    pub violations: Vec<SizeWitness>,
    /// Set when the top value cannot be attained outside the kernel.
    pub caveat: Option<String>,
    pub passed: bool,
}

impl SpectrumCertificate {
    pub fn attained_sizes(&self) -> Vec<usize> {
        self.attained.keys().copied().collect()
    }
}

/// Intersection sizes `|X ∩ Z(g)|` over forms `g` outside the kernel of C2(X).
pub fn spectrum(geom: &Geometry, code: &FunctionalCode, mode: SpectrumMode, force: bool) -> Result<SpectrumCertificate> {
    let q = geom.q();
    let n = code.n();
    let class = code.class();
    let pattern = spectrum_pattern(class, q)?;
    let field = geom.field();
    let monomials: Vec<[u8; 10]> = code.points().iter().map(|&p| geom.monomials_at(p).map(|m| m.rep() as u8)).collect();
    let (add, mul) = (field.add_table(), field.mul_table());
    let size_of = |f: &Form4| -> usize {
        let c = f.reps().map(|r| r as usize);
        monomials
            .iter()
            .filter(|m| {
                let mut acc = 0usize;
                for i in 0..10 {
                    acc = add[acc * q + mul[c[i] * q + m[i] as usize] as usize] as usize;
                }
                acc == 0
            })
            .count()
    };

    let mut attained: BTreeMap<usize, u64> = BTreeMap::new();
    let mut first: BTreeMap<usize, Form4> = BTreeMap::new();
    let mut checked = 0u64;
    let mut kernel = 0u64;
    let mut visit = |f: Form4| {
        let s = size_of(&f);
        if s == n {
            kernel += 1;
            return;
        }
        checked += 1;
        *attained.entry(s).or_insert(0) += 1;
        first.entry(s).or_insert(f);
    };
    match mode {
        SpectrumMode::Exhaustive => {
            let total = (q as u64).pow(10);
            if total > SPECTRUM_LIMIT && !force {
                return Err(Error::SizeGuard {
                    what: "forms",
                    count: total as u128,
                    limit: SPECTRUM_LIMIT as u128,
                });
            }
            for code_index in 1..total {
                visit(Form4::from_code(q, code_index));
            }
        }
        SpectrumMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total = (q as u64).pow(10);
            for _ in 0..count {
                visit(Form4::from_code(q, rng.random_range(1..total)));
            }
        }
    }

    let sizes: Vec<usize> = attained.keys().rev().copied().collect();
    let violations: Vec<SizeWitness> = sizes
        .iter()
        .filter(|&&s| s > pattern.top || (s != pattern.top && s != pattern.second && s > pattern.rest_ceiling))
        .map(|&s| SizeWitness { size: s, form: first[&s] })
        .collect();
    let caveat = (pattern.top >= n).then(|| {
        format!(
            "top value {} equals or exceeds n = {}: only kernel forms reach it, so it is excluded from the attainment check",
            pattern.top, n
        )
    });
    let must_attain: Vec<usize> = match (mode, &caveat) {
        (SpectrumMode::Exhaustive, None) => vec![pattern.top, pattern.second],
        (SpectrumMode::Exhaustive, Some(_)) => vec![pattern.second],
        _ => vec![],
    };
    let passed = violations.is_empty() && must_attain.iter().all(|s| attained.contains_key(s));
    Ok(SpectrumCertificate {
        class,
        q,
        n,
        mode,
        forms_checked: checked,
        kernel_skipped: kernel,
        max1: sizes.first().copied(),
        max2: sizes.get(1).copied(),
        max3: sizes.get(2).copied(),
        pattern,
        witnesses: first.into_iter().map(|(size, form)| SizeWitness { size, form }).collect(),
        violations,
        caveat,
        passed,
        attained,
    })
}

/// Intersection sizes implied by a weight distribution: `n - w` for every
/// attained nonzero weight `w`.
pub fn sizes_from_distribution(dist: &WeightDistribution) -> Vec<usize> {
    let mut v: Vec<usize> = dist.nonzero_weights().into_iter().map(|w| dist.n - w).collect();
    v.sort_unstable();
    v
}
