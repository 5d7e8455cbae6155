//! Certification of the intersection bounds for pairs of quadrics.
//!
//! Every nonzero form (one per scalar class) or a structured sample of forms
//! is summarised once as bit masks over points, lines and planes. Each pair
//! is then routed to the rules that apply to its pair of orbits, and every
//! rule keeps a histogram of observed values, its largest value with a
//! witness, and any violations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::engine::is_scalar_representative;
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::random_invertible;
use crate::pg::Geometry;
use crate::quadric::{canonical_form, Form4, LineClass, PlaneClass, Quadric, QuadricClass};

/// Exhaustive suites refuse catalogs larger than this without override.
pub const CATALOG_LIMIT: u64 = 40_000;

/// Violations kept per rule, smallest pair indices first.
const KEEP_VIOLATIONS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    PlaneSection,
    PlanePairSectionSum,
    PlanePairConfiguration,
    HyperbolicTangentPairBisecantAxis,
    HyperbolicTangentPairGeneratorAxis,
    HyperbolicMixedPairTangentAxis,
    HyperbolicMixedPairBisecantAxis,
    NonTangentPairTangentAxis,
    NonTangentPairBisecantAxis,
    NonTangentPairSkewAxis,
    EllipticTangentPair,
    EllipticMixedPair,
    ConeGeneratorPairsVertexAxis,
    ConeGeneratorPairsGeneratorAxis,
    ConeTangentAndGeneratorPair,
    ConePlanePairOther,
    LineSection,
    EllipticVsConeOrHyperbolic,
    ConeHyperbolicNoCommonLine,
    ConeHyperbolicCommonLine,
    ConeHyperbolicLineCount,
    ConePairNoCommonLine,
    ConePairOneCommonLine,
    ConePairTwoCommonLines,
    ConePairThreeCommonLines,
    ConePairFourCommonLines,
    HyperbolicPairAtMostOneLine,
    HyperbolicPairTwoLinesOneRegulus,
    HyperbolicPairTwoLinesBothReguli,
    HyperbolicPairThreeLines,
    HyperbolicPairFourLines,
    HyperbolicPairRegulusSplit,
    EllipticPair,
    EllipticPairIrreducible,
    EllipticPairConicAndLines,
    EllipticPairFourLines,
    EllipticPairSplitConics,
    EllipticPairConjugateConics,
    EllipticPairDoubleConic,
    Bezout,
    NondegenerateVsAny,
    ConeVsAny,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Bound {
    AtMost(usize),
    Exactly(usize),
    /// A yes/no structural claim; the recorded value is the intersection size.
    Structural,
}

impl Bound {
    fn holds(self, value: usize) -> bool {
        match self {
            Bound::AtMost(c) => value <= c,
            Bound::Exactly(c) => value == c,
            Bound::Structural => true,
        }
    }
}

impl Rule {
    pub const ALL: [Rule; 42] = [
        Rule::PlaneSection,
        Rule::PlanePairSectionSum,
        Rule::PlanePairConfiguration,
        Rule::HyperbolicTangentPairBisecantAxis,
        Rule::HyperbolicTangentPairGeneratorAxis,
        Rule::HyperbolicMixedPairTangentAxis,
        Rule::HyperbolicMixedPairBisecantAxis,
        Rule::NonTangentPairTangentAxis,
        Rule::NonTangentPairBisecantAxis,
        Rule::NonTangentPairSkewAxis,
        Rule::EllipticTangentPair,
        Rule::EllipticMixedPair,
        Rule::ConeGeneratorPairsVertexAxis,
        Rule::ConeGeneratorPairsGeneratorAxis,
        Rule::ConeTangentAndGeneratorPair,
        Rule::ConePlanePairOther,
        Rule::LineSection,
        Rule::EllipticVsConeOrHyperbolic,
        Rule::ConeHyperbolicNoCommonLine,
        Rule::ConeHyperbolicCommonLine,
        Rule::ConeHyperbolicLineCount,
        Rule::ConePairNoCommonLine,
        Rule::ConePairOneCommonLine,
        Rule::ConePairTwoCommonLines,
        Rule::ConePairThreeCommonLines,
        Rule::ConePairFourCommonLines,
        Rule::HyperbolicPairAtMostOneLine,
        Rule::HyperbolicPairTwoLinesOneRegulus,
        Rule::HyperbolicPairTwoLinesBothReguli,
        Rule::HyperbolicPairThreeLines,
        Rule::HyperbolicPairFourLines,
        Rule::HyperbolicPairRegulusSplit,
        Rule::EllipticPair,
        Rule::EllipticPairIrreducible,
        Rule::EllipticPairConicAndLines,
        Rule::EllipticPairFourLines,
        Rule::EllipticPairSplitConics,
        Rule::EllipticPairConjugateConics,
        Rule::EllipticPairDoubleConic,
        Rule::Bezout,
        Rule::NondegenerateVsAny,
        Rule::ConeVsAny,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::PlaneSection => "plane-section",
            Rule::PlanePairSectionSum => "plane-pair-section-sum",
            Rule::PlanePairConfiguration => "plane-pair-configuration",
            Rule::HyperbolicTangentPairBisecantAxis => "hyperbolic-tangent-pair-bisecant-axis",
            Rule::HyperbolicTangentPairGeneratorAxis => "hyperbolic-tangent-pair-generator-axis",
            Rule::HyperbolicMixedPairTangentAxis => "hyperbolic-mixed-pair-tangent-axis",
            Rule::HyperbolicMixedPairBisecantAxis => "hyperbolic-mixed-pair-bisecant-axis",
            Rule::NonTangentPairTangentAxis => "non-tangent-pair-tangent-axis",
            Rule::NonTangentPairBisecantAxis => "non-tangent-pair-bisecant-axis",
            Rule::NonTangentPairSkewAxis => "non-tangent-pair-skew-axis",
            Rule::EllipticTangentPair => "elliptic-tangent-pair",
            Rule::EllipticMixedPair => "elliptic-mixed-pair",
            Rule::ConeGeneratorPairsVertexAxis => "cone-generator-pairs-vertex-axis",
            Rule::ConeGeneratorPairsGeneratorAxis => "cone-generator-pairs-generator-axis",
            Rule::ConeTangentAndGeneratorPair => "cone-tangent-and-generator-pair",
            Rule::ConePlanePairOther => "cone-plane-pair-other",
            Rule::LineSection => "line-section",
            Rule::EllipticVsConeOrHyperbolic => "elliptic-vs-cone-or-hyperbolic",
            Rule::ConeHyperbolicNoCommonLine => "cone-hyperbolic-no-common-line",
            Rule::ConeHyperbolicCommonLine => "cone-hyperbolic-common-line",
            Rule::ConeHyperbolicLineCount => "cone-hyperbolic-line-count",
            Rule::ConePairNoCommonLine => "cone-pair-no-common-line",
            Rule::ConePairOneCommonLine => "cone-pair-one-common-line",
            Rule::ConePairTwoCommonLines => "cone-pair-two-common-lines",
            Rule::ConePairThreeCommonLines => "cone-pair-three-common-lines",
            Rule::ConePairFourCommonLines => "cone-pair-four-common-lines",
            Rule::HyperbolicPairAtMostOneLine => "hyperbolic-pair-at-most-one-line",
            Rule::HyperbolicPairTwoLinesOneRegulus => "hyperbolic-pair-two-lines-one-regulus",
            Rule::HyperbolicPairTwoLinesBothReguli => "hyperbolic-pair-two-lines-both-reguli",
            Rule::HyperbolicPairThreeLines => "hyperbolic-pair-three-lines",
            Rule::HyperbolicPairFourLines => "hyperbolic-pair-four-lines",
            Rule::HyperbolicPairRegulusSplit => "hyperbolic-pair-regulus-split",
            Rule::EllipticPair => "elliptic-pair",
            Rule::EllipticPairIrreducible => "elliptic-pair-irreducible",
            Rule::EllipticPairConicAndLines => "elliptic-pair-conic-and-lines",
            Rule::EllipticPairFourLines => "elliptic-pair-four-lines",
            Rule::EllipticPairSplitConics => "elliptic-pair-split-conics",
            Rule::EllipticPairConjugateConics => "elliptic-pair-conjugate-conics",
            Rule::EllipticPairDoubleConic => "elliptic-pair-double-conic",
            Rule::Bezout => "bezout-common-lines",
            Rule::NondegenerateVsAny => "nondegenerate-vs-any",
            Rule::ConeVsAny => "cone-vs-any",
        }
    }

    pub fn bound(self, q: usize) -> Bound {
        use Bound::*;
        match self {
            Rule::PlaneSection => AtMost(2 * q + 1),
            Rule::PlanePairSectionSum | Rule::PlanePairConfiguration => Structural,
            Rule::HyperbolicTangentPairBisecantAxis => Exactly(4 * q),
            Rule::HyperbolicTangentPairGeneratorAxis => Exactly(3 * q + 1),
            Rule::HyperbolicMixedPairTangentAxis => Exactly(3 * q + 1),
            Rule::HyperbolicMixedPairBisecantAxis => Exactly(3 * q),
            Rule::NonTangentPairTangentAxis => Exactly(2 * q + 1),
            Rule::NonTangentPairBisecantAxis => Exactly(2 * q),
            Rule::NonTangentPairSkewAxis => Exactly(2 * q + 2),
            Rule::EllipticTangentPair => Exactly(2),
            Rule::EllipticMixedPair => AtMost(q + 2),
            Rule::ConeGeneratorPairsVertexAxis => Exactly(4 * q + 1),
            Rule::ConeGeneratorPairsGeneratorAxis => Exactly(3 * q + 1),
            Rule::ConeTangentAndGeneratorPair => Exactly(3 * q + 1),
            Rule::ConePlanePairOther => AtMost(3 * q),
            Rule::LineSection => AtMost(q + 1),
            Rule::EllipticVsConeOrHyperbolic => AtMost(2 * q + 2),
            Rule::ConeHyperbolicNoCommonLine => AtMost(2 * q + 2),
            Rule::ConeHyperbolicCommonLine => AtMost(3 * q),
            Rule::ConeHyperbolicLineCount => Structural,
            Rule::ConePairNoCommonLine => AtMost(2 * q + 2),
            Rule::ConePairOneCommonLine => AtMost(2 * q + 1),
            Rule::ConePairTwoCommonLines => AtMost(3 * q),
            Rule::ConePairThreeCommonLines => AtMost(4 * q + 1),
            Rule::ConePairFourCommonLines => Exactly(4 * q + 1),
            Rule::HyperbolicPairAtMostOneLine => AtMost(2 * q + 2),
            Rule::HyperbolicPairTwoLinesOneRegulus => Exactly(2 * q + 2),
            Rule::HyperbolicPairTwoLinesBothReguli => AtMost(3 * q + 1),
            Rule::HyperbolicPairThreeLines => AtMost(4 * q),
            Rule::HyperbolicPairFourLines => Exactly(4 * q),
            Rule::HyperbolicPairRegulusSplit => Structural,
            Rule::EllipticPair => AtMost(2 * q + 2),
            Rule::EllipticPairIrreducible => AtMost(1 + q + floor_two_sqrt(q)),
            Rule::EllipticPairConicAndLines => AtMost(q + 3),
            Rule::EllipticPairFourLines => AtMost(4),
            Rule::EllipticPairSplitConics => AtMost(2 * q + 2),
            Rule::EllipticPairConjugateConics => AtMost(q + 1),
            Rule::EllipticPairDoubleConic => AtMost(q + 1),
            Rule::Bezout => AtMost(4),
            Rule::NondegenerateVsAny => AtMost(4 * q),
            Rule::ConeVsAny => AtMost(4 * q + 1),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// `floor(2 sqrt(q))`, computed in integers.
pub fn floor_two_sqrt(q: usize) -> usize {
    let mut r = 0;
    while (r + 1) * (r + 1) <= 4 * q {
        r += 1;
    }
    r
}

/// The projective pair bound `(2q^{n-1} - q^{n-2} + 2q^{(n+1)/2} - 3q^{(n-1)/2} + q^{(n-3)/2} - 1)/(q-1)`
/// for odd `n >= 3`, as an exact quotient. Returns `None` for other `n` or a
/// non-integral quotient.
pub fn pair_bound_formula(n: u32, q: u64) -> Option<u64> {
    if n < 3 || n % 2 == 0 {
        return None;
    }
    let num = 2 * q.pow(n - 1) + 2 * q.pow((n + 1) / 2) + q.pow((n - 3) / 2)
        - q.pow(n - 2)
        - 3 * q.pow((n - 1) / 2)
        - 1;
    (num % (q - 1) == 0).then(|| num / (q - 1))
}

/// Products and squares of linear forms, as quadratic forms.
pub fn product_form(field: &Field, a: &[Fe; 4], b: &[Fe; 4]) -> Form4 {
    let mut coeffs = [Fe::ZERO; 10];
    for (k, &(i, j)) in crate::quadric::MONOMIALS4.iter().enumerate() {
        coeffs[k] = if i == j {
            field.mul(a[i], b[i])
        } else {
            field.add(field.mul(a[i], b[j]), field.mul(a[j], b[i]))
        };
    }
    Form4::new(coeffs)
}

struct SurfaceTables {
    plane_class: Vec<PlaneClass>,
    plane_size: Vec<u16>,
    line_class: Vec<LineClass>,
    /// 0 or 1 for generators of a hyperbolic quadric, 2 otherwise.
    regulus: Vec<u8>,
}

/// Bit-mask summaries of a list of forms.
struct Catalog<'g> {
    geom: &'g Geometry,
    q: usize,
    wp: usize,
    wl: usize,
    wh: usize,
    forms: Vec<Form4>,
    class: Vec<QuadricClass>,
    points: Vec<u64>,
    lines: Vec<u64>,
    planes: Vec<u64>,
    plane_pair: Vec<Option<(u32, u32, u32)>>,
    /// Elliptic pairs involving a marked entry get their pencil case at every size.
    full_pencil: Vec<bool>,
    /// Filled on first use; only surfaces have tables.
    tables: Vec<OnceLock<SurfaceTables>>,
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn pack(out: &mut Vec<u64>, w: usize, ones: impl Iterator<Item = usize>) {
    let start = out.len();
    out.resize(start + w, 0);
    for i in ones {
        out[start + i / 64] |= 1 << (i % 64);
    }
}

#[inline]
fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
fn and_any(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

#[inline]
fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

impl<'g> Catalog<'g> {
    fn build(geom: &'g Geometry, forms: Vec<Form4>) -> Result<Catalog<'g>> {
        let q = geom.q();
        let (np, nl, nh) = (geom.points().len(), geom.lines().len(), geom.planes().len());
        let (wp, wl, wh) = (words(np), words(nl), words(nh));
        let mut cat = Catalog {
            geom,
            q,
            wp,
            wl,
            wh,
            class: Vec::with_capacity(forms.len()),
            points: Vec::with_capacity(forms.len() * wp),
            lines: Vec::with_capacity(forms.len() * wl),
            planes: Vec::with_capacity(forms.len() * wh),
            plane_pair: Vec::with_capacity(forms.len()),
            tables: Vec::with_capacity(forms.len()),
            full_pencil: vec![false; forms.len()],
            forms,
        };
        for f in &cat.forms {
            let quadric = Quadric::analyze(geom, *f)?;
            pack(&mut cat.points, wp, quadric.points().ones());
            pack(&mut cat.lines, wl, quadric.lines().ones());
            pack(&mut cat.planes, wh, quadric.planes().ones());
            cat.class.push(quadric.class());
            cat.plane_pair.push(quadric.plane_pair());
            cat.tables.push(OnceLock::new());
        }
        Ok(cat)
    }

    fn len(&self) -> usize {
        self.forms.len()
    }

    fn pts(&self, i: usize) -> &[u64] {
        &self.points[i * self.wp..(i + 1) * self.wp]
    }

    fn lns(&self, i: usize) -> &[u64] {
        &self.lines[i * self.wl..(i + 1) * self.wl]
    }

    fn pls(&self, i: usize) -> &[u64] {
        &self.planes[i * self.wh..(i + 1) * self.wh]
    }

    fn tables(&self, i: usize) -> &SurfaceTables {
        self.tables[i].get_or_init(|| {
            let quadric = Quadric::analyze(self.geom, self.forms[i]).expect("catalog forms are nonzero");
            surface_tables(self.geom, &quadric).expect("catalog entry is a surface")
        })
    }

    fn common_line_ids(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        let (la, lb) = (self.lns(a), self.lns(b));
        (0..self.wl).flat_map(move |w| {
            let mut bits = la[w] & lb[w];
            std::iter::from_fn(move || {
                (bits != 0).then(|| {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    w * 64 + t
                })
            })
        })
    }
}

fn surface_tables(geom: &Geometry, quadric: &Quadric) -> Result<SurfaceTables> {
    let nh = geom.planes().len() as u32;
    let nl = geom.lines().len() as u32;
    let mut plane_class = Vec::with_capacity(nh as usize);
    let mut plane_size = Vec::with_capacity(nh as usize);
    for h in 0..nh {
        plane_class.push(quadric.plane_class(geom, h)?);
        plane_size.push(geom.plane_mask(h).intersection_count(quadric.points()) as u16);
    }
    let mut line_class = Vec::with_capacity(nl as usize);
    let mut regulus = Vec::with_capacity(nl as usize);
    for l in 0..nl {
        line_class.push(quadric.line_class(geom, l)?);
        regulus.push(quadric.regulus_of(l).map_or(2, |r| r as u8));
    }
    Ok(SurfaceTables { plane_class, plane_size, line_class, regulus })
}

/// Per-rule accumulator.
#[derive(Clone, Debug)]
struct RuleStats {
    checked: u64,
    hist: Vec<u64>,
    best: Option<(usize, u32, u32)>,
    violations: Vec<(u32, u32, usize)>,
    violation_count: u64,
}

impl RuleStats {
    fn new(cap: usize) -> RuleStats {
        RuleStats { checked: 0, hist: vec![0; cap], best: None, violations: Vec::new(), violation_count: 0 }
    }

    fn merge(&mut self, other: RuleStats) {
        self.checked += other.checked;
        for (a, b) in self.hist.iter_mut().zip(other.hist) {
            *a += b;
        }
        self.best = match (self.best, other.best) {
            (Some(x), Some(y)) => Some(if (y.0, std::cmp::Reverse((y.1, y.2))) > (x.0, std::cmp::Reverse((x.1, x.2))) {
                y
            } else {
                x
            }),
            (x, y) => x.or(y),
        };
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self.violations.sort_unstable_by_key(|&(a, b, _)| (a, b));
        self.violations.truncate(KEEP_VIOLATIONS);
    }
}

struct Recorder {
    q: usize,
    stats: Vec<RuleStats>,
}

impl Recorder {
    fn new(q: usize, cap: usize) -> Recorder {
        Recorder { q, stats: Rule::ALL.iter().map(|_| RuleStats::new(cap)).collect() }
    }

    #[inline]
    fn record(&mut self, rule: Rule, value: usize, ok: bool, a: usize, b: usize) {
        let s = &mut self.stats[rule.index()];
        s.checked += 1;
        let slot = value.min(s.hist.len() - 1);
        s.hist[slot] += 1;
        let (a, b) = (a as u32, b as u32);
        match s.best {
            Some((v, x, y)) if v > value || (v == value && (x, y) <= (a, b)) => {}
            _ => s.best = Some((value, a, b)),
        }
        if !ok {
            s.violation_count += 1;
            let at = s.violations.partition_point(|&(x, y, _)| (x, y) < (a, b));
            if at < KEEP_VIOLATIONS {
                s.violations.insert(at, (a, b, value));
                s.violations.truncate(KEEP_VIOLATIONS);
            }
        }
    }

    #[inline]
    fn check(&mut self, rule: Rule, value: usize, a: usize, b: usize) {
        let ok = rule.bound(self.q).holds(value);
        self.record(rule, value, ok, a, b);
    }

    fn merge(&mut self, other: Recorder) {
        for (s, o) in self.stats.iter_mut().zip(other.stats) {
            s.merge(o);
        }
    }
}

/// Collects rule names instead of statistics; used to label a single pair.
trait Sink {
    fn check(&mut self, rule: Rule, value: usize, a: usize, b: usize);
    fn record(&mut self, rule: Rule, value: usize, ok: bool, a: usize, b: usize);
}

impl Sink for Recorder {
    #[inline]
    fn check(&mut self, rule: Rule, value: usize, a: usize, b: usize) {
        Recorder::check(self, rule, value, a, b)
    }
    #[inline]
    fn record(&mut self, rule: Rule, value: usize, ok: bool, a: usize, b: usize) {
        Recorder::record(self, rule, value, ok, a, b)
    }
}

struct Labels(Vec<Rule>);

impl Sink for Labels {
    fn check(&mut self, rule: Rule, _: usize, _: usize, _: usize) {
        if !self.0.contains(&rule) {
            self.0.push(rule);
        }
    }
    fn record(&mut self, rule: Rule, value: usize, _: bool, a: usize, b: usize) {
        self.check(rule, value, a, b)
    }
}

impl Catalog<'_> {
    /// Routes the unordered pair `(a, b)` to every applicable rule.
    fn check_pair<S: Sink>(&self, a: usize, b: usize, out: &mut S) -> Result<()> {
        use QuadricClass::*;
        let q = self.q;
        let size = and_count(self.pts(a), self.pts(b));
        let common = and_count(self.lns(a), self.lns(b));
        let shared_plane = and_any(self.pls(a), self.pls(b));

        if !shared_plane {
            out.check(Rule::Bezout, common, a, b);
        }
        for (x, y) in [(a, b), (b, a)] {
            match self.class[x] {
                Hyperbolic | Elliptic if !is_subset(self.pts(x), self.pts(y)) => {
                    out.check(Rule::NondegenerateVsAny, size, x, y)
                }
                Cone if !is_subset(self.pts(x), self.pts(y)) => out.check(Rule::ConeVsAny, size, x, y),
                _ => {}
            }
            if self.class[y] == PlanePair && self.class[x].is_surface() {
                self.plane_pair_rules(x, y, size, out);
            }
        }
        if self.class[a] == LineRank2 || self.class[b] == LineRank2 {
            out.check(Rule::LineSection, size, a, b);
        }

        let (ca, cb) = (self.class[a], self.class[b]);
        match (ca, cb) {
            (Elliptic, Cone | Hyperbolic) | (Cone | Hyperbolic, Elliptic) => {
                out.check(Rule::EllipticVsConeOrHyperbolic, size, a, b)
            }
            (Cone, Hyperbolic) | (Hyperbolic, Cone) => {
                let rule = if common == 0 { Rule::ConeHyperbolicNoCommonLine } else { Rule::ConeHyperbolicCommonLine };
                out.check(rule, size, a, b);
                out.record(Rule::ConeHyperbolicLineCount, size, common <= 2, a, b);
            }
            (Cone, Cone) => {
                let rule = match common {
                    0 => Rule::ConePairNoCommonLine,
                    1 => Rule::ConePairOneCommonLine,
                    2 => Rule::ConePairTwoCommonLines,
                    3 => Rule::ConePairThreeCommonLines,
                    _ => Rule::ConePairFourCommonLines,
                };
                out.check(rule, size, a, b);
            }
            (Hyperbolic, Hyperbolic) => {
                let t = self.tables(a);
                let mut per = [0usize; 3];
                for l in self.common_line_ids(a, b) {
                    per[t.regulus[l] as usize] += 1;
                }
                let split_ok = per[0] <= 2 && per[1] <= 2 && per[2] == 0 && (common != 4 || per == [2, 2, 0]);
                out.record(Rule::HyperbolicPairRegulusSplit, size, split_ok, a, b);
                let rule = match common {
                    0 | 1 => Rule::HyperbolicPairAtMostOneLine,
                    2 if per[0] == 2 || per[1] == 2 => Rule::HyperbolicPairTwoLinesOneRegulus,
                    2 => Rule::HyperbolicPairTwoLinesBothReguli,
                    3 => Rule::HyperbolicPairThreeLines,
                    _ => Rule::HyperbolicPairFourLines,
                };
                out.check(rule, size, a, b);
            }
            (Elliptic, Elliptic) => {
                out.check(Rule::EllipticPair, size, a, b);
                if size > q + 1 || self.full_pencil[a] || self.full_pencil[b] {
                    let rule = self.elliptic_pencil_case(a, b)?;
                    out.check(rule, size, a, b);
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn plane_pair_rules<S: Sink>(&self, x: usize, y: usize, size: usize, out: &mut S) {
        use PlaneClass::*;
        let q = self.q;
        let (h1, h2, l) = self.plane_pair[y].expect("plane pair has planes");
        let t = self.tables(x);
        let (p1, p2) = (t.plane_class[h1 as usize], t.plane_class[h2 as usize]);
        let lc = t.line_class[l as usize];
        let sum = t.plane_size[h1 as usize] as usize + t.plane_size[h2 as usize] as usize - lc.meet_count(q);
        out.record(Rule::PlanePairSectionSum, size, sum == size, x, y);

        let rule = match self.class[x] {
            QuadricClass::Hyperbolic => match ((p1, p2), lc) {
                ((Tangent, Tangent), LineClass::Bisecant) => Some(Rule::HyperbolicTangentPairBisecantAxis),
                ((Tangent, Tangent), LineClass::Generator) => Some(Rule::HyperbolicTangentPairGeneratorAxis),
                ((Tangent, NonTangent) | (NonTangent, Tangent), LineClass::SimpleTangent) => {
                    Some(Rule::HyperbolicMixedPairTangentAxis)
                }
                ((Tangent, NonTangent) | (NonTangent, Tangent), LineClass::Bisecant) => {
                    Some(Rule::HyperbolicMixedPairBisecantAxis)
                }
                ((NonTangent, NonTangent), lc) => non_tangent_rule(lc),
                _ => None,
            },
            QuadricClass::Elliptic => match ((p1, p2), lc) {
                ((Tangent, Tangent), LineClass::Skew) => Some(Rule::EllipticTangentPair),
                ((Tangent, NonTangent) | (NonTangent, Tangent), LineClass::SimpleTangent | LineClass::Skew) => {
                    Some(Rule::EllipticMixedPair)
                }
                ((NonTangent, NonTangent), lc) => non_tangent_rule(lc),
                _ => None,
            },
            _ => {
                let special_vertex_line = if q % 2 == 1 {
                    LineClass::ExternalVertexTangent
                } else {
                    LineClass::ThroughVertexOther
                };
                Some(match (p1, p2) {
                    (GeneratorPair, GeneratorPair) if lc.is_vertex_line() => Rule::ConeGeneratorPairsVertexAxis,
                    (GeneratorPair, GeneratorPair) if lc == LineClass::Generator => {
                        Rule::ConeGeneratorPairsGeneratorAxis
                    }
                    (Tangent, GeneratorPair) | (GeneratorPair, Tangent) if lc == special_vertex_line => {
                        Rule::ConeTangentAndGeneratorPair
                    }
                    _ => Rule::ConePlanePairOther,
                })
            }
        };
        out.record(Rule::PlanePairConfiguration, size, rule.is_some(), x, y);
        if let Some(rule) = rule {
            out.check(rule, size, x, y);
        }
    }

    /// Sub-case of an elliptic pair read off the degenerate members of the
    /// pencil `f + λ g`: every member meets the first quadric in the same set.
    fn elliptic_pencil_case(&self, a: usize, b: usize) -> Result<Rule> {
        let field = self.geom.field();
        let (f, g) = (self.forms[a], self.forms[b]);
        let mut found: Option<Rule> = None;
        for lambda in field.elements().skip(1) {
            let member = f.add(field, &g.scale(field, lambda));
            if member.is_zero() {
                continue;
            }
            let m = Quadric::analyze(self.geom, member)?;
            let rule = match m.class() {
                QuadricClass::RepeatedPlane => Rule::EllipticPairDoubleConic,
                QuadricClass::LineRank2 => Rule::EllipticPairConjugateConics,
                QuadricClass::PlanePair => {
                    let (h1, h2, _) = m.plane_pair().expect("plane pair");
                    let t = self.tables(a);
                    let tangent = [h1, h2]
                        .iter()
                        .filter(|&&h| t.plane_class[h as usize] == PlaneClass::Tangent)
                        .count();
                    match tangent {
                        0 => Rule::EllipticPairSplitConics,
                        1 => Rule::EllipticPairConicAndLines,
                        _ => Rule::EllipticPairFourLines,
                    }
                }
                _ => continue,
            };
            found = Some(match found {
                Some(prev) if prev.bound(self.q) <= rule.bound(self.q) => prev,
                _ => rule,
            });
        }
        Ok(found.unwrap_or(Rule::EllipticPairIrreducible))
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let v = |b: &Bound| match b {
            Bound::AtMost(c) | Bound::Exactly(c) => *c,
            Bound::Structural => usize::MAX,
        };
        v(self).partial_cmp(&v(other))
    }
}

fn non_tangent_rule(lc: LineClass) -> Option<Rule> {
    match lc {
        LineClass::SimpleTangent => Some(Rule::NonTangentPairTangentAxis),
        LineClass::Bisecant => Some(Rule::NonTangentPairBisecantAxis),
        LineClass::Skew => Some(Rule::NonTangentPairSkewAxis),
        _ => None,
    }
}

/// Names of the rules an intersecting pair falls under.
pub fn case_labels(geom: &Geometry, a: &Quadric, b: &Quadric) -> Result<Vec<&'static str>> {
    let cat = Catalog::build(geom, vec![*a.form(), *b.form()])?;
    let mut labels = Labels(Vec::new());
    cat.check_pair(0, 1, &mut labels)?;
    labels.0.sort();
    Ok(labels.0.into_iter().map(Rule::name).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteMode {
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub mode: SuiteMode,
    /// Size of the random families in sample mode.
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub force: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { mode: SuiteMode::Sample, samples: 2000, seed: 1, workers: 1, force: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub kind: &'static str,
    pub f: Form4,
    pub g: Form4,
    pub value: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub case: &'static str,
    pub q: usize,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub bound: Bound,
    pub ceiling: Option<usize>,
    pub checked: u64,
    /// Attained values with their multiplicities, ascending.
    pub attained: Vec<(usize, u64)>,
    pub witnesses: Vec<PairWitness>,
    pub violations: u64,
    pub passed: bool,
}

impl Certificate {
    pub fn attained_values(&self) -> Vec<usize> {
        self.attained.iter().map(|&(v, _)| v).collect()
    }

    pub fn max(&self) -> Option<usize> {
        self.attained.last().map(|&(v, _)| v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub q: usize,
    pub mode: SuiteMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub forms: usize,
    pub pairs: u64,
    pub certificates: Vec<Certificate>,
    pub numeric: Vec<NumericCheck>,
    pub violations: u64,
    pub passed: bool,
}

impl BoundReport {
    pub fn certificate(&self, rule: Rule) -> &Certificate {
        self.certificates.iter().find(|c| c.case == rule.name()).expect("every rule has a certificate")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericCheck {
    pub case: &'static str,
    pub detail: String,
    pub passed: bool,
}

/// Closed-form checks that need no enumeration.
pub fn numeric_checks(q: usize) -> Vec<NumericCheck> {
    let mut out = Vec::new();
    let ls = pair_bound_formula(3, q as u64);
    out.push(NumericCheck {
        case: "pair-bound-formula-n3",
        detail: format!("formula at n=3, q={q}: {ls:?}; 4q = {}", 4 * q),
        passed: ls == Some(4 * q as u64),
    });
    let dominance: Vec<(usize, bool)> = (3..=9)
        .map(|q| {
            let real = 1.0 + q as f64 + 2.0 * (q as f64).sqrt();
            (q, 2.0 * (q as f64 + 1.0) >= real && 2 * (q + 1) >= 1 + q + floor_two_sqrt(q))
        })
        .collect();
    out.push(NumericCheck {
        case: "elliptic-pair-dominance",
        detail: format!("2(q+1) >= 1+q+2sqrt(q) for q in 3..=9: {dominance:?}"),
        passed: dominance.iter().all(|&(_, ok)| ok),
    });
    out
}

/// Runs every bound rule over all pairs of a form catalog.
pub fn bound_suite(geom: &Geometry, opts: SuiteOptions) -> Result<BoundReport> {
    let q = geom.q();
    let sample = match opts.mode {
        SuiteMode::Exhaustive => {
            let total = (q as u64).pow(10);
            let classes = (total - 1) / (q as u64 - 1);
            if classes > CATALOG_LIMIT && !opts.force {
                return Err(Error::SizeGuard { what: "forms", count: classes as u128, limit: CATALOG_LIMIT as u128 });
            }
            let forms: Vec<Form4> =
                (1..total).filter(|&c| is_scalar_representative(q, c)).map(|c| Form4::from_code(q, c)).collect();
            let n = forms.len();
            Sample { forms, anchor: vec![true; n], pool: vec![true; n], extra: Vec::new() }
        }
        SuiteMode::Sample => structured_sample(geom, opts.samples, opts.seed)?,
    };
    let Sample { forms, anchor, pool, extra } = sample;
    let mut cat = Catalog::build(geom, forms)?;
    let ell = canonical_form(geom.field(), QuadricClass::Elliptic).normalized(geom.field());
    for i in 0..cat.len() {
        cat.full_pencil[i] = match opts.mode {
            SuiteMode::Exhaustive => cat.forms[i] == ell,
            SuiteMode::Sample => anchor[i],
        };
    }
    let cap = geom.points().len() + 2;
    let n = cat.len();
    let workers = opts.workers.max(1).min(n.max(1));
    let anchors: Vec<usize> = (0..n).filter(|&i| anchor[i]).collect();
    let members: Vec<usize> = (0..n).filter(|&i| anchor[i] || pool[i]).collect();

    let run = |w: usize| -> Result<(Recorder, u64)> {
        let mut rec = Recorder::new(q, cap);
        let mut pairs = 0u64;
        for a in (w..n).step_by(workers) {
            if cat.class[a].is_surface() && (anchor[a] || pool[a]) {
                let t = cat.tables(a);
                for h in 0..geom.planes().len() {
                    rec.check(Rule::PlaneSection, t.plane_size[h] as usize, a, h);
                }
            }
            if anchor[a] {
                for b in a + 1..n {
                    pairs += 1;
                    cat.check_pair(a, b, &mut rec)?;
                }
            } else {
                let partners = if pool[a] { &members } else { &anchors };
                let from = partners.partition_point(|&b| b <= a);
                for &b in &partners[from..] {
                    pairs += 1;
                    cat.check_pair(a, b, &mut rec)?;
                }
            }
        }
        for &(a, b) in extra.iter().skip(w).step_by(workers) {
            pairs += 1;
            cat.check_pair(a as usize, b as usize, &mut rec)?;
        }
        Ok((rec, pairs))
    };
    let parts: Vec<Result<(Recorder, u64)>> = if workers == 1 {
        vec![run(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || run(w))).collect();
            handles.into_iter().map(|h| h.join().expect("bound worker panicked")).collect()
        })
    };
    let mut rec = Recorder::new(q, cap);
    let mut pairs = 0;
    for part in parts {
        let (r, p) = part?;
        rec.merge(r);
        pairs += p;
    }

    let mode_name = match opts.mode {
        SuiteMode::Exhaustive => "exhaustive",
        SuiteMode::Sample => "sample",
    };
    let seed = (opts.mode == SuiteMode::Sample).then_some(opts.seed);
    let plane_form = |h: u32| {
        let d = *geom.plane(h).dual().coords();
        product_form(geom.field(), &d, &d)
    };
    let mut certificates = Vec::new();
    for rule in Rule::ALL {
        let s = &rec.stats[rule.index()];
        let witness = |kind: &'static str, a: u32, b: u32, value: usize| PairWitness {
            kind,
            f: cat.forms[a as usize],
            g: if rule == Rule::PlaneSection { plane_form(b) } else { cat.forms[b as usize] },
            value,
        };
        let mut witnesses: Vec<PairWitness> = s.best.iter().map(|&(v, a, b)| witness("max", a, b, v)).collect();
        witnesses.extend(s.violations.iter().map(|&(a, b, v)| witness("violation", a, b, v)));
        let bound = rule.bound(q);
        certificates.push(Certificate {
            case: rule.name(),
            q,
            mode: mode_name,
            seed,
            bound,
            ceiling: match bound {
                Bound::AtMost(c) | Bound::Exactly(c) => Some(c),
                Bound::Structural => None,
            },
            checked: s.checked,
            attained: s.hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, &c)| (v, c)).collect(),
            witnesses,
            violations: s.violation_count,
            passed: s.violation_count == 0,
        });
    }
    let numeric = numeric_checks(q);
    let violations = certificates.iter().map(|c| c.violations).sum::<u64>()
        + numeric.iter().filter(|c| !c.passed).count() as u64;
    Ok(BoundReport {
        q,
        mode: opts.mode,
        seed,
        forms: n,
        pairs,
        certificates,
        numeric,
        violations,
        passed: violations == 0,
    })
}

struct Sample {
    forms: Vec<Form4>,
    /// Checked against every other form.
    anchor: Vec<bool>,
    /// Checked against every other pool member.
    pool: Vec<bool>,
    /// Further pairs, smaller index first, none already covered above.
    extra: Vec<(u32, u32)>,
}

struct SampleBuilder<'g> {
    geom: &'g Geometry,
    index: HashMap<Form4, usize>,
    sample: Sample,
}

impl SampleBuilder<'_> {
    fn add(&mut self, f: Form4, anchor: bool, pool: bool) -> Option<usize> {
        if f.is_zero() {
            return None;
        }
        let f = f.normalized(self.geom.field());
        let i = *self.index.entry(f).or_insert_with(|| {
            self.sample.forms.push(f);
            self.sample.anchor.push(false);
            self.sample.pool.push(false);
            self.sample.forms.len() - 1
        });
        self.sample.anchor[i] |= anchor;
        self.sample.pool[i] |= pool;
        Some(i)
    }
}

fn random_form(field: &Field, rng: &mut ChaCha8Rng, zero: &[usize]) -> Form4 {
    let q = field.order() as u32;
    let mut reps = [0u32; 10];
    for (i, r) in reps.iter_mut().enumerate() {
        if !zero.contains(&i) {
            *r = rng.random_range(0..q);
        }
    }
    Form4::from_reps(field, reps).expect("reps in range")
}

/// Canonical surfaces and their images (anchors) plus a pool of cones with
/// fixed vertices, forms through fixed lines and pencils of the elliptic
/// quadric. All plane pairs and repeated planes meet the anchors only, and
/// `samples` random forms meet the anchors and a few random partners each.
fn structured_sample(geom: &Geometry, samples: usize, seed: u64) -> Result<Sample> {
    let field = geom.field();
    let q = geom.q();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = SampleBuilder {
        geom,
        index: HashMap::new(),
        sample: Sample { forms: Vec::new(), anchor: Vec::new(), pool: Vec::new(), extra: Vec::new() },
    };

    for class in [QuadricClass::Cone, QuadricClass::Hyperbolic, QuadricClass::Elliptic] {
        let f = canonical_form(field, class);
        b.add(f, true, true);
        for _ in 0..2 {
            b.add(f.compose(field, &random_invertible(field, &mut rng)), true, true);
        }
    }

    let duals: Vec<[Fe; 4]> = geom.planes().iter().map(|h| *h.dual().coords()).collect();
    for (i, d1) in duals.iter().enumerate() {
        b.add(product_form(field, d1, d1), false, false);
        for d2 in &duals[i + 1..] {
            b.add(product_form(field, d1, d2), false, false);
        }
    }

    // Cones with vertex (0:0:0:1) and (1:0:0:0): ternary forms in the other three variables.
    let ternary_slots: [[usize; 6]; 2] = [[0, 1, 2, 4, 5, 7], [4, 5, 6, 7, 8, 9]];
    for slots in ternary_slots {
        for code in 1..(q as u64).pow(6) {
            if !is_scalar_representative(q, code) {
                continue;
            }
            let mut reps = [0u32; 10];
            let mut c = code;
            for &s in &slots {
                reps[s] = (c % q as u64) as u32;
                c /= q as u64;
            }
            let f = Form4::from_reps(field, reps)?;
            if Quadric::analyze(geom, f)?.class() == QuadricClass::Cone {
                b.add(f, false, true);
            }
        }
    }

    let line_form = canonical_form(field, QuadricClass::LineRank2);
    for _ in 0..FAMILY {
        b.add(line_form.compose(field, &random_invertible(field, &mut rng)), false, true);
    }
    // Forms through the line {x0 = x2 = 0}, a generator of the canonical cone and hyperbolic quadric.
    for _ in 0..2 * FAMILY {
        b.add(random_form(field, &mut rng, &[4, 6, 9]), false, true);
    }
    // Forms through {x0 = x2 = 0} and {x1 = x3 = 0}.
    for code in 1..(q as u64).pow(4) {
        let mut reps = [0u32; 10];
        let mut c = code;
        for s in [1, 3, 5, 8] {
            reps[s] = (c % q as u64) as u32;
            c /= q as u64;
        }
        b.add(Form4::from_reps(field, reps)?, false, true);
    }
    // Pencil partners of the canonical elliptic quadric.
    let ell = canonical_form(field, QuadricClass::Elliptic);
    for i in 0..2 * FAMILY {
        let d1 = duals[rng.random_range(0..duals.len())];
        let d2 = duals[rng.random_range(0..duals.len())];
        let partner = match i % 3 {
            0 => product_form(field, &d1, &d2),
            1 => line_form.compose(field, &random_invertible(field, &mut rng)),
            _ => product_form(field, &d1, &d1),
        };
        let lambda = field.element(rng.random_range(1..q as u32))?;
        b.add(ell.add(field, &partner.scale(field, lambda)), false, true);
    }
    if let Some((f, g)) = cone_pair_with_four_lines(geom)? {
        b.add(f, true, true);
        b.add(g, true, true);
    }

    let random: Vec<usize> = (0..samples).filter_map(|_| b.add(random_form(field, &mut rng, &[]), false, false)).collect();
    let n = b.sample.forms.len();
    let mut extra = Vec::with_capacity(random.len() * PARTNERS);
    for &r in &random {
        for _ in 0..PARTNERS {
            let j = rng.random_range(0..n);
            extra.push((r.min(j) as u32, r.max(j) as u32));
        }
    }
    let s = &mut b.sample;
    let covered = |i: usize, j: usize| s.anchor[i] || s.anchor[j] || (s.pool[i] && s.pool[j]);
    extra.retain(|&(i, j)| i != j && !covered(i as usize, j as usize));
    extra.sort_unstable();
    extra.dedup();
    s.extra = extra;
    Ok(b.sample)
}

/// Size of the fixed-size sampled families.
const FAMILY: usize = 250;

/// Random partners per random form.
const PARTNERS: usize = 8;

/// A pair of cones sharing exactly four lines, searched among cones with the
/// vertex and first conic of the canonical cone. `None` when no such pair
/// exists over this field.
pub fn cone_pair_with_four_lines(geom: &Geometry) -> Result<Option<(Form4, Form4)>> {
    let field = geom.field();
    let q = geom.q();
    let x = Quadric::analyze(geom, canonical_form(field, QuadricClass::Cone))?;
    let slots = [0usize, 1, 2, 4, 5, 7];
    for code in 1..(q as u64).pow(6) {
        if !is_scalar_representative(q, code) {
            continue;
        }
        let mut reps = [0u32; 10];
        let mut c = code;
        for &s in &slots {
            reps[s] = (c % q as u64) as u32;
            c /= q as u64;
        }
        let g = Form4::from_reps(field, reps)?;
        if g.normalized(field) == x.form().normalized(field) {
            continue;
        }
        let y = Quadric::analyze(geom, g)?;
        if y.class() == QuadricClass::Cone && x.lines().intersection_count(y.lines()) == 4 {
            return Ok(Some((*x.form(), g)));
        }
    }
    Ok(None)
}
