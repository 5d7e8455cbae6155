//! Geometric types of the quadrics behind low-weight codewords.
//!
//! A codeword of C2(X) is a coset `g + ker`; every form in the coset is typed
//! against X, and the codeword matches a listed type when some form of its
//! coset has that type.

use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

use crate::engine::{is_scalar_representative, ScanOptions, Visitor};
use crate::error::{Error, Result};
use crate::funcodes::FunctionalCode;
use crate::pg::Geometry;
use crate::quadric::{Form4, LineClass, PlaneClass, Quadric, QuadricClass};

/// Unmatched witness forms kept per census.
const KEEP_UNMATCHED: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeometricType {
    TangentPlanePairBisecantAxis,
    TangentPlanePairGeneratorAxis,
    TangentNonTangentPairTangentAxis,
    NonTangentPairSkewAxis,
    GeneratorPairPlanesPointAxis,
    GeneratorPairPlanesGeneratorAxis,
    TangentAndGeneratorPairPlanesSpecialAxis,
    QuadricWith4CommonLines2PerRegulus,
    HyperbolicTwoGeneratorsBisecantRegulus,
    ConeAllBisecants,
    HyperbolicRegulusAllBisecants,
    ConeWith4CommonLines,
    Other(String),
}

impl GeometricType {
    pub fn label(&self) -> String {
        let s = match self {
            GeometricType::TangentPlanePairBisecantAxis => "TangentPlanePair_BisecantAxis",
            GeometricType::TangentPlanePairGeneratorAxis => "TangentPlanePair_GeneratorAxis",
            GeometricType::TangentNonTangentPairTangentAxis => "TangentNonTangentPair_TangentAxis",
            GeometricType::NonTangentPairSkewAxis => "NonTangentPair_SkewAxis",
            GeometricType::GeneratorPairPlanesPointAxis => "GeneratorPairPlanes_PointAxis",
            GeometricType::GeneratorPairPlanesGeneratorAxis => "GeneratorPairPlanes_GeneratorAxis",
            GeometricType::TangentAndGeneratorPairPlanesSpecialAxis => "TangentAndGeneratorPairPlanes_SpecialAxis",
            GeometricType::QuadricWith4CommonLines2PerRegulus => "QuadricWith4CommonLines_2per_regulus",
            GeometricType::HyperbolicTwoGeneratorsBisecantRegulus => "HyperbolicTwoGenerators_BisecantRegulus",
            GeometricType::ConeAllBisecants => "ConeAllBisecants",
            GeometricType::HyperbolicRegulusAllBisecants => "HyperbolicRegulusAllBisecants",
            GeometricType::ConeWith4CommonLines => "ConeWith4CommonLines",
            GeometricType::Other(d) => return format!("Other({d})"),
        };
        s.to_string()
    }

    pub fn is_other(&self) -> bool {
        matches!(self, GeometricType::Other(_))
    }
}

impl Serialize for GeometricType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    W1,
    W2,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::W1 => "w1",
            Tier::W2 => "w2",
        })
    }
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Tier, String> {
        match s {
            "w1" => Ok(Tier::W1),
            "w2" => Ok(Tier::W2),
            other => Err(format!("unknown tier {other:?} (expected w1 or w2)")),
        }
    }
}

/// Types a codeword tier is expected to consist of; `None` when the tier is
/// only described.
pub fn listed_types(class: QuadricClass, q: usize, tier: Tier) -> Option<Vec<GeometricType>> {
    use GeometricType::*;
    match (class, tier) {
        (QuadricClass::Hyperbolic, Tier::W1) => Some(vec![TangentPlanePairBisecantAxis, QuadricWith4CommonLines2PerRegulus]),
        (QuadricClass::Hyperbolic, Tier::W2) => Some(vec![
            TangentPlanePairGeneratorAxis,
            TangentNonTangentPairTangentAxis,
            HyperbolicTwoGeneratorsBisecantRegulus,
        ]),
        (QuadricClass::Elliptic, Tier::W1) => {
            Some(vec![NonTangentPairSkewAxis, ConeAllBisecants, HyperbolicRegulusAllBisecants])
        }
        // at q = 3 the cone code has other parameters, so its tiers are not the listed ones
        (QuadricClass::Cone, Tier::W1) if q >= 4 => Some(vec![GeneratorPairPlanesPointAxis, ConeWith4CommonLines]),
        (QuadricClass::Cone, Tier::W2) if q >= 4 => {
            Some(vec![GeneratorPairPlanesGeneratorAxis, TangentAndGeneratorPairPlanesSpecialAxis])
        }
        _ => None,
    }
}

/// Geometric type of the quadric `Z(g)` relative to the surface `x`.
pub fn word_type(geom: &Geometry, x: &Quadric, g: &Form4) -> Result<GeometricType> {
    use GeometricType::*;
    let q = geom.q();
    if g.is_zero() {
        return Err(Error::KernelForm);
    }
    let y = Quadric::analyze(geom, *g)?;
    if x.points().is_subset(y.points()) {
        return Err(Error::KernelForm);
    }
    let common: Vec<u32> = x.lines().intersection(y.lines()).map(|l| l as u32).collect();
    let t = match y.class() {
        QuadricClass::PlanePair => {
            let (h1, h2, l) = y.plane_pair().expect("plane pair");
            let (p1, p2) = (x.plane_class(geom, h1)?, x.plane_class(geom, h2)?);
            let lc = x.line_class(geom, l)?;
            let mut pcs = [p1, p2];
            pcs.sort();
            use PlaneClass::*;
            let special = if q % 2 == 1 { LineClass::ExternalVertexTangent } else { LineClass::ThroughVertexOther };
            match (x.class(), pcs, lc) {
                (QuadricClass::Cone, [GeneratorPair, GeneratorPair], lc) if lc.is_vertex_line() => {
                    GeneratorPairPlanesPointAxis
                }
                (QuadricClass::Cone, [GeneratorPair, GeneratorPair], LineClass::Generator) => {
                    GeneratorPairPlanesGeneratorAxis
                }
                (QuadricClass::Cone, [Tangent, GeneratorPair], lc) if lc == special => {
                    TangentAndGeneratorPairPlanesSpecialAxis
                }
                (QuadricClass::Cone, ..) => Other(format!("plane-pair {p1:?}/{p2:?} axis {lc:?}")),
                (_, [Tangent, Tangent], LineClass::Bisecant) => TangentPlanePairBisecantAxis,
                (_, [Tangent, Tangent], LineClass::Generator) => TangentPlanePairGeneratorAxis,
                (_, [Tangent, NonTangent], LineClass::SimpleTangent) => TangentNonTangentPairTangentAxis,
                (_, [NonTangent, NonTangent], LineClass::Skew) => NonTangentPairSkewAxis,
                _ => Other(format!("plane-pair {p1:?}/{p2:?} axis {lc:?}")),
            }
        }
        QuadricClass::Cone => {
            let v = y.vertex().expect("cone vertex");
            let mut bisecants = 0;
            for l in y.lines().ones() {
                if x.line_class(geom, l as u32)? == LineClass::Bisecant {
                    bisecants += 1;
                }
            }
            match x.class() {
                QuadricClass::Cone if common.len() == 4 => ConeWith4CommonLines,
                QuadricClass::Elliptic if !x.contains_point(v) && bisecants == q + 1 => ConeAllBisecants,
                _ => Other(format!(
                    "cone vertex-on-surface={} common-lines={} bisecant-lines={bisecants}",
                    x.contains_point(v),
                    common.len()
                )),
            }
        }
        QuadricClass::Hyperbolic => {
            let y_reguli = y.reguli().expect("hyperbolic reguli");
            let all_bisecant = |mask: &fixedbitset::FixedBitSet, skip: &[u32]| -> Result<bool> {
                for l in mask.ones() {
                    if !skip.contains(&(l as u32)) && x.line_class(geom, l as u32)? != LineClass::Bisecant {
                        return Ok(false);
                    }
                }
                Ok(true)
            };
            match x.class() {
                QuadricClass::Hyperbolic => {
                    let mut per = [0usize; 2];
                    for &l in &common {
                        if let Some(r) = x.regulus_of(l) {
                            per[r] += 1;
                        }
                    }
                    if common.len() == 4 && per == [2, 2] {
                        QuadricWith4CommonLines2PerRegulus
                    } else if common.len() == 2
                        && per == [1, 1]
                        && (all_bisecant(&y_reguli[0], &common)? || all_bisecant(&y_reguli[1], &common)?)
                    {
                        HyperbolicTwoGeneratorsBisecantRegulus
                    } else {
                        Other(format!("hyperbolic common-lines={} per-regulus={per:?}", common.len()))
                    }
                }
                QuadricClass::Elliptic if all_bisecant(&y_reguli[0], &[])? || all_bisecant(&y_reguli[1], &[])? => {
                    HyperbolicRegulusAllBisecants
                }
                _ => Other(format!("hyperbolic common-lines={}", common.len())),
            }
        }
        other => Other(format!("{} meeting in {}", other.name(), x.points().intersection_count(y.points()))),
    };
    Ok(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct WordCensus {
    pub surface: QuadricClass,
    pub q: usize,
    pub tier: Tier,
    pub tier_weight: usize,
    /// Codewords at the tier weight, up to scalars.
    pub total: u64,
    /// Each codeword counted once, under the first listed type its coset
    /// attains (or its first type in census-only mode).
    pub types: BTreeMap<String, u64>,
    /// Codewords whose coset contains at least one form of each type.
    pub presence: BTreeMap<String, u64>,
    pub unmatched_count: u64,
    /// Form tuples of unmatched codewords, first in scan order.
    pub unmatched: Vec<Form4>,
    pub census_only: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremCheck {
    pub census: WordCensus,
    pub listed: Vec<GeometricType>,
    pub missing: Vec<GeometricType>,
    pub passed: bool,
}

struct TierWords {
    weight: u32,
    q: usize,
    messages: Vec<u64>,
}

impl Visitor for TierWords {
    #[inline]
    fn visit(&mut self, message: u64, weight: u32) {
        if weight == self.weight && is_scalar_representative(self.q, message) {
            self.messages.push(message);
        }
    }

    fn merge(&mut self, next: Self) {
        self.messages.extend(next.messages);
    }
}

/// Message indices of the scalar-class representatives of weight `weight`.
pub fn tier_messages(code: &FunctionalCode, weight: usize, opts: ScanOptions) -> Result<Vec<u64>> {
    let q = code.q();
    let words = code.scan(opts, || TierWords { weight: weight as u32, q, messages: Vec::new() })?;
    Ok(words.messages)
}

pub fn tier_weight(code: &FunctionalCode, tier: Tier, opts: ScanOptions) -> Result<usize> {
    let h = code.weight_distribution(opts)?.hierarchy()?;
    Ok(match tier {
        Tier::W1 => h.w1,
        Tier::W2 => h.w2,
    })
}

/// Types every scalar class of codewords at a tier.
pub fn census(geom: &Geometry, code: &FunctionalCode, tier: Tier, opts: ScanOptions) -> Result<WordCensus> {
    let weight = tier_weight(code, tier, opts)?;
    census_at(geom, code, tier, weight, opts)
}

pub fn census_at(
    geom: &Geometry,
    code: &FunctionalCode,
    tier: Tier,
    weight: usize,
    opts: ScanOptions,
) -> Result<WordCensus> {
    let x = code.surface();
    let q = code.q();
    let listed = listed_types(x.class(), q, tier);
    let messages = tier_messages(code, weight, opts)?;
    if messages.is_empty() {
        return Err(Error::TierAbsent(weight));
    }
    let mut types: BTreeMap<String, u64> = BTreeMap::new();
    let mut presence: BTreeMap<String, u64> = BTreeMap::new();
    let mut unmatched = Vec::new();
    let mut unmatched_count = 0u64;
    for &m in &messages {
        let g0 = code.message_form(m);
        let mut signature: Vec<GeometricType> = Vec::new();
        for g in code.coset(&g0) {
            let w = code.weight_of(geom, &g);
            if w != weight {
                return Err(Error::Internal(format!("form of message {m} has weight {w}, tier weight {weight}")));
            }
            let t = word_type(geom, x, &g)?;
            if !signature.contains(&t) {
                signature.push(t);
            }
        }
        signature.sort();
        for t in &signature {
            *presence.entry(t.label()).or_insert(0) += 1;
        }
        let primary = match &listed {
            Some(list) => list.iter().find(|t| signature.contains(t)).cloned(),
            None => signature.first().cloned(),
        };
        match primary {
            Some(t) => *types.entry(t.label()).or_insert(0) += 1,
            None => {
                unmatched_count += 1;
                if unmatched.len() < KEEP_UNMATCHED {
                    unmatched.push(g0.normalized(code.field()));
                }
            }
        }
    }
    Ok(WordCensus {
        surface: x.class(),
        q,
        tier,
        tier_weight: weight,
        total: messages.len() as u64,
        types,
        presence,
        unmatched_count,
        unmatched,
        census_only: listed.is_none(),
    })
}

/// Census plus the verdict: every codeword matches a listed type and every
/// listed type occurs. Census-only tiers always pass.
pub fn theorem_check(geom: &Geometry, code: &FunctionalCode, tier: Tier, opts: ScanOptions) -> Result<TheoremCheck> {
    let census = census(geom, code, tier, opts)?;
    let listed = listed_types(census.surface, census.q, tier).unwrap_or_default();
    let missing: Vec<GeometricType> =
        listed.iter().filter(|t| !census.presence.contains_key(&t.label())).cloned().collect();
    let passed = census.census_only || (census.unmatched_count == 0 && missing.is_empty());
    Ok(TheoremCheck { census, listed, missing, passed })
}
