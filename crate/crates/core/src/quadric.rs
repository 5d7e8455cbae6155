//! Quadratic forms and the quadrics they cut out in PG(3,q) and PG(2,q).
//!
//! The orbit of a quadric is never read off a rank computation (rank is
//! awkward in characteristic 2). It is inferred from the number of points
//! together with collinearity / coplanarity of the zero set, which separates
//! the six orbits of PG(3,q) and the four of PG(2,q) for every q.
//!
//! Two routes are provided:
//! * free functions ([`classify4`], [`plane_class`], [`line_class`], ...) that
//!   work from point evaluations and form restriction, and
//! * [`Quadric`], a bit-mask summary used by the bulk scans.
//!
//! The tests check that both routes agree.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::pg::{restrict_form, Geometry, Point2, Point3};

/// Monomials `x_i x_j` of a quaternary form in coefficient order.
pub const MONOMIALS4: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Monomials `u_i u_j` of a ternary form in coefficient order.
pub const MONOMIALS3: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Coefficient slot of `x_i x_j` in a quaternary form.
pub fn monomial_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    MONOMIALS4.iter().position(|&m| m == (i, j)).expect("indices below 4")
}

/// A quaternary quadratic form, coefficients in [`MONOMIALS4`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub struct Form4 {
    coeffs: [Fe; 10],
}

impl Serialize for Form4 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.reps().serialize(serializer)
    }
}

impl Form4 {
    pub const ZERO: Form4 = Form4 { coeffs: [Fe::ZERO; 10] };

    pub fn new(coeffs: [Fe; 10]) -> Form4 {
        Form4 { coeffs }
    }

    pub fn from_reps(field: &Field, reps: [u32; 10]) -> Result<Form4> {
        let mut coeffs = [Fe::ZERO; 10];
        for (c, r) in coeffs.iter_mut().zip(reps) {
            *c = field.element(r)?;
        }
        Ok(Form4 { coeffs })
    }

    /// Builds a form from `(coefficient rep, i, j)` terms, combining like terms.
    pub fn from_terms(field: &Field, terms: &[(u32, usize, usize)]) -> Result<Form4> {
        let mut f = Form4::ZERO;
        for &(c, i, j) in terms {
            let k = monomial_index(i, j);
            f.coeffs[k] = field.add(f.coeffs[k], field.element(c)?);
        }
        Ok(f)
    }

    pub fn coeffs(&self) -> &[Fe; 10] {
        &self.coeffs
    }

    pub fn reps(&self) -> [u32; 10] {
        self.coeffs.map(Fe::rep)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `sum coeffs[ij] * x_i * x_j` at the W_i representative of `x`.
    pub fn evaluate(&self, field: &Field, x: &Point3) -> Fe {
        let c = x.coords();
        self.eval_vec(field, c)
    }

    pub fn eval_vec(&self, field: &Field, c: &[Fe; 4]) -> Fe {
        MONOMIALS4.iter().zip(&self.coeffs).fold(Fe::ZERO, |acc, (&(i, j), &k)| {
            field.add(acc, field.mul(k, field.mul(c[i], c[j])))
        })
    }

    pub fn scale(&self, field: &Field, lambda: Fe) -> Form4 {
        Form4 { coeffs: self.coeffs.map(|c| field.mul(c, lambda)) }
    }

    pub fn add(&self, field: &Field, other: &Form4) -> Form4 {
        Form4 { coeffs: std::array::from_fn(|i| field.add(self.coeffs[i], other.coeffs[i])) }
    }

    /// Scalar multiple whose first nonzero coefficient is 1.
    pub fn normalized(&self, field: &Field) -> Form4 {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            Some(&lead) => self.scale(field, field.inv(lead).expect("nonzero")),
            None => *self,
        }
    }

    /// Base-q integer code `sum rep_i * q^i`; a bijection onto `0..q^10`.
    pub fn code(&self, q: usize) -> u64 {
        self.coeffs.iter().rev().fold(0u64, |acc, c| acc * q as u64 + c.0 as u64)
    }

    pub fn from_code(q: usize, mut code: u64) -> Form4 {
        let mut coeffs = [Fe::ZERO; 10];
        for c in coeffs.iter_mut() {
            *c = Fe((code % q as u64) as u8);
            code /= q as u64;
        }
        Form4 { coeffs }
    }

    /// The form `y -> f(M y)`; the quadric of the result is the preimage of
    /// the quadric of `f` under `M`.
    pub fn compose(&self, field: &Field, m: &[[Fe; 4]; 4]) -> Form4 {
        let cols: [[Fe; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|i| m[i][a]));
        let coeffs = substitute(field, self, &cols);
        Form4 { coeffs: coeffs.try_into().expect("ten monomials") }
    }
}

/// Coefficients of `y -> f(sum_a y_a v_a)` in the lexicographic monomial order
/// on `K` variables. Uses `f(v_a)` for squares and the polar form
/// `f(v_a + v_b) - f(v_a) - f(v_b)` for cross terms, valid in every characteristic.
pub fn substitute<const K: usize>(field: &Field, f: &Form4, vs: &[[Fe; 4]; K]) -> Vec<Fe> {
    let mut out = Vec::with_capacity(K * (K + 1) / 2);
    for a in 0..K {
        for b in a..K {
            if a == b {
                out.push(f.eval_vec(field, &vs[a]));
            } else {
                let sum: [Fe; 4] = std::array::from_fn(|i| field.add(vs[a][i], vs[b][i]));
                let polar = field.sub(
                    field.sub(f.eval_vec(field, &sum), f.eval_vec(field, &vs[a])),
                    f.eval_vec(field, &vs[b]),
                );
                out.push(polar);
            }
        }
    }
    out
}

/// A ternary quadratic form, coefficients in [`MONOMIALS3`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form3 {
    coeffs: [Fe; 6],
}

impl Form3 {
    pub fn new(coeffs: [Fe; 6]) -> Form3 {
        Form3 { coeffs }
    }

    pub fn from_reps(field: &Field, reps: [u32; 6]) -> Result<Form3> {
        let mut coeffs = [Fe::ZERO; 6];
        for (c, r) in coeffs.iter_mut().zip(reps) {
            *c = field.element(r)?;
        }
        Ok(Form3 { coeffs })
    }

    pub fn coeffs(&self) -> [Fe; 6] {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn evaluate(&self, field: &Field, u: &Point2) -> Fe {
        let c = u.coords();
        MONOMIALS3.iter().zip(&self.coeffs).fold(Fe::ZERO, |acc, (&(i, j), &k)| {
            field.add(acc, field.mul(k, field.mul(c[i], c[j])))
        })
    }
}

/// The six orbits of quadrics in PG(3,q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuadricClass {
    RepeatedPlane,
    PlanePair,
    LineRank2,
    Cone,
    Hyperbolic,
    Elliptic,
}

impl QuadricClass {
    pub const ALL: [QuadricClass; 6] = [
        QuadricClass::RepeatedPlane,
        QuadricClass::PlanePair,
        QuadricClass::LineRank2,
        QuadricClass::Cone,
        QuadricClass::Hyperbolic,
        QuadricClass::Elliptic,
    ];

    /// Number of points of a quadric of this orbit over GF(q).
    pub fn point_count(self, q: usize) -> usize {
        match self {
            QuadricClass::RepeatedPlane | QuadricClass::Cone => q * q + q + 1,
            QuadricClass::PlanePair => 2 * q * q + q + 1,
            QuadricClass::LineRank2 => q + 1,
            QuadricClass::Hyperbolic => (q + 1) * (q + 1),
            QuadricClass::Elliptic => q * q + 1,
        }
    }

    /// Cones and non-degenerate quadrics: the surfaces that carry a code.
    pub fn is_surface(self) -> bool {
        matches!(self, QuadricClass::Cone | QuadricClass::Hyperbolic | QuadricClass::Elliptic)
    }

    pub fn name(self) -> &'static str {
        match self {
            QuadricClass::RepeatedPlane => "repeated-plane",
            QuadricClass::PlanePair => "plane-pair",
            QuadricClass::LineRank2 => "line",
            QuadricClass::Cone => "cone",
            QuadricClass::Hyperbolic => "hyperbolic",
            QuadricClass::Elliptic => "elliptic",
        }
    }
}

impl fmt::Display for QuadricClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// The orbits of ternary quadratic forms in PG(2,q), plus the zero form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConicClass {
    RepeatedLine,
    LinePair,
    SinglePoint,
    Conic,
    WholePlane,
}

impl ConicClass {
    pub fn point_count(self, q: usize) -> usize {
        match self {
            ConicClass::RepeatedLine | ConicClass::Conic => q + 1,
            ConicClass::LinePair => 2 * q + 1,
            ConicClass::SinglePoint => 1,
            ConicClass::WholePlane => q * q + q + 1,
        }
    }
}

/// Type of a plane with respect to a cone or non-degenerate quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PlaneClass {
    /// Degenerate section: two lines (hyperbolic), one point (elliptic) or a
    /// repeated generator (cone).
    Tangent,
    /// Conic section of a non-degenerate quadric.
    NonTangent,
    /// Cone only: the plane holds two generators.
    GeneratorPair,
    /// Cone only: the plane meets the cone in its vertex alone.
    VertexOnly,
    /// Cone only: conic section missing the vertex.
    ConicSection,
}

/// Type of a line with respect to a cone or non-degenerate quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LineClass {
    Generator,
    SimpleTangent,
    ExternalVertexTangent,
    InternalVertexTangent,
    NuclearLine,
    ThroughVertexOther,
    Bisecant,
    Skew,
}

impl LineClass {
    /// Number of points the line shares with the quadric.
    pub fn meet_count(self, q: usize) -> usize {
        match self {
            LineClass::Generator => q + 1,
            LineClass::Bisecant => 2,
            LineClass::Skew => 0,
            _ => 1,
        }
    }

    /// Line through the vertex of a cone meeting it only there.
    pub fn is_vertex_line(self) -> bool {
        matches!(
            self,
            LineClass::ExternalVertexTangent
                | LineClass::InternalVertexTangent
                | LineClass::NuclearLine
                | LineClass::ThroughVertexOther
        )
    }
}

/// q+1 pairwise skew generator lines (line indices of the geometry).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regulus {
    pub lines: Vec<u32>,
}

/// Smallest `c` (by rep) with `u^2 + u + c` irreducible over the field.
pub fn irreducible_constant(field: &Field) -> Fe {
    field
        .elements()
        .find(|&c| field.elements().all(|u| !field.add(field.add(field.mul(u, u), u), c).is_zero()))
        .expect("an irreducible monic quadratic of this shape exists over every finite field")
}

/// Fixed representative form of each orbit.
pub fn canonical_form(field: &Field, class: QuadricClass) -> Form4 {
    let c = irreducible_constant(field).rep();
    let terms: Vec<(u32, usize, usize)> = match class {
        QuadricClass::RepeatedPlane => vec![(1, 0, 0)],
        QuadricClass::PlanePair => vec![(1, 0, 1)],
        QuadricClass::LineRank2 => vec![(1, 0, 0), (1, 0, 1), (c, 1, 1)],
        QuadricClass::Cone => vec![(1, 0, 1), (1, 2, 2)],
        QuadricClass::Hyperbolic => vec![(1, 0, 1), (1, 2, 3)],
        QuadricClass::Elliptic => vec![(1, 2, 3), (1, 0, 0), (1, 0, 1), (c, 1, 1)],
    };
    Form4::from_terms(field, &terms).expect("valid reps")
}

/// Points of PG(3,q) where `f` vanishes, in global order.
pub fn zero_set(geom: &Geometry, f: &Form4) -> Result<Vec<Point3>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let field = geom.field();
    Ok(geom.points().iter().filter(|p| f.evaluate(field, p).is_zero()).copied().collect())
}

/// Points `p` of the quadric through which no line meets the quadric in
/// exactly two points (so every line through `p` is either contained in the
/// quadric or touches it only at `p`).
pub fn singular_points(geom: &Geometry, f: &Form4) -> Result<Vec<u32>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let zeros = geom.zero_mask(f);
    Ok(zeros
        .ones()
        .map(|p| p as u32)
        .filter(|&p| {
            geom.lines_through(p)
                .iter()
                .all(|&l| geom.line_mask(l).intersection_count(&zeros) != 2)
        })
        .collect())
}

/// Decision table shared by both classification routes.
fn class_from_counts(q: usize, n: usize, collinear: bool, coplanar: bool) -> Result<QuadricClass> {
    let class = if n == q + 1 && collinear {
        QuadricClass::LineRank2
    } else if n == 2 * q * q + q + 1 {
        QuadricClass::PlanePair
    } else if n == (q + 1) * (q + 1) {
        QuadricClass::Hyperbolic
    } else if n == q * q + 1 {
        QuadricClass::Elliptic
    } else if n == q * q + q + 1 {
        if coplanar {
            QuadricClass::RepeatedPlane
        } else {
            QuadricClass::Cone
        }
    } else {
        return Err(Error::Internal(format!("{n} points match no orbit of PG(3,{q})")));
    };
    Ok(class)
}

fn span_rank(field: &Field, pts: &[Point3]) -> usize {
    let rows: Vec<Vec<_>> = pts.iter().map(|p| p.coords().to_vec()).collect();
    crate::linalg::rank(field, &rows)
}

/// Orbit of the quadric `Z(f)` in PG(3,q).
pub fn classify4(geom: &Geometry, f: &Form4) -> Result<QuadricClass> {
    let zeros = zero_set(geom, f)?;
    let rank = span_rank(geom.field(), &zeros);
    class_from_counts(geom.q(), zeros.len(), rank <= 2, rank <= 3)
}

/// Orbit of the conic `Z(g)` in PG(2,q); the zero form maps to `WholePlane`.
pub fn classify3(field: &Field, g: &Form3) -> Result<ConicClass> {
    let q = field.order();
    let zeros: Vec<Point2> = crate::pg::enumerate_points::<3>(field)?
        .into_iter()
        .filter(|u| g.evaluate(field, u).is_zero())
        .collect();
    let n = zeros.len();
    let collinear = || {
        let rows: Vec<Vec<_>> = zeros.iter().map(|p| p.coords().to_vec()).collect();
        crate::linalg::rank(field, &rows) <= 2
    };
    let class = if n == q * q + q + 1 {
        ConicClass::WholePlane
    } else if n == 1 {
        ConicClass::SinglePoint
    } else if n == 2 * q + 1 {
        ConicClass::LinePair
    } else if n == q + 1 {
        if collinear() {
            ConicClass::RepeatedLine
        } else {
            ConicClass::Conic
        }
    } else {
        return Err(Error::Internal(format!("{n} points match no conic orbit of PG(2,{q})")));
    };
    Ok(class)
}

fn require_surface(class: QuadricClass) -> Result<()> {
    if class.is_surface() {
        Ok(())
    } else {
        Err(Error::UnsupportedSurface(class.name()))
    }
}

/// Plane type from the class of the restricted ternary form.
pub fn plane_class(geom: &Geometry, plane: u32, f: &Form4) -> Result<PlaneClass> {
    let class = classify4(geom, f)?;
    plane_class_with(geom, plane, f, class)
}

fn plane_class_with(geom: &Geometry, plane: u32, f: &Form4, class: QuadricClass) -> Result<PlaneClass> {
    require_surface(class)?;
    let field = geom.field();
    let basis = geom.plane(plane).basis().map(|i| *geom.point(i));
    let section = classify3(field, &restrict_form(field, f, &basis)?)?;
    let pc = match (class, section) {
        (QuadricClass::Hyperbolic, ConicClass::LinePair) => PlaneClass::Tangent,
        (QuadricClass::Elliptic, ConicClass::SinglePoint) => PlaneClass::Tangent,
        (QuadricClass::Hyperbolic | QuadricClass::Elliptic, ConicClass::Conic) => PlaneClass::NonTangent,
        (QuadricClass::Cone, ConicClass::RepeatedLine) => PlaneClass::Tangent,
        (QuadricClass::Cone, ConicClass::LinePair) => PlaneClass::GeneratorPair,
        (QuadricClass::Cone, ConicClass::SinglePoint) => PlaneClass::VertexOnly,
        (QuadricClass::Cone, ConicClass::Conic) => PlaneClass::ConicSection,
        (c, s) => return Err(Error::Internal(format!("{c} has a {s:?} plane section"))),
    };
    Ok(pc)
}

/// Line type by direct point counting; vertex lines of a cone are split by the
/// number of tangent planes through them.
pub fn line_class(geom: &Geometry, line: u32, f: &Form4) -> Result<LineClass> {
    let class = classify4(geom, f)?;
    require_surface(class)?;
    let field = geom.field();
    let q = geom.q();
    let meets: Vec<u32> = geom
        .line(line)
        .points()
        .iter()
        .copied()
        .filter(|&p| f.evaluate(field, geom.point(p)).is_zero())
        .collect();
    let lc = match meets.len() {
        0 => LineClass::Skew,
        2 => LineClass::Bisecant,
        n if n == q + 1 => LineClass::Generator,
        1 => {
            let singular = singular_points(geom, f)?;
            if class == QuadricClass::Cone && singular.contains(&meets[0]) {
                let mut tangent_planes = 0;
                for &h in geom.planes_through(line) {
                    if plane_class_with(geom, h, f, class)? == PlaneClass::Tangent {
                        tangent_planes += 1;
                    }
                }
                vertex_line_class(q, tangent_planes)
            } else {
                LineClass::SimpleTangent
            }
        }
        n => return Err(Error::Internal(format!("line meets a quadric in {n} points"))),
    };
    Ok(lc)
}

fn vertex_line_class(q: usize, tangent_planes: usize) -> LineClass {
    if q % 2 == 1 {
        if tangent_planes >= 1 {
            LineClass::ExternalVertexTangent
        } else {
            LineClass::InternalVertexTangent
        }
    } else if tangent_planes == q + 1 {
        LineClass::NuclearLine
    } else {
        LineClass::ThroughVertexOther
    }
}

/// The two reguli of a hyperbolic quadric, found by 2-colouring the
/// generators: the regulus holding the smallest generator comes first.
pub fn reguli(geom: &Geometry, f: &Form4) -> Result<[Regulus; 2]> {
    let quadric = Quadric::analyze(geom, *f)?;
    if quadric.class() != QuadricClass::Hyperbolic {
        return Err(Error::UnsupportedSurface(quadric.class().name()));
    }
    let [a, b] = quadric.reguli().expect("hyperbolic");
    let to_regulus = |m: &FixedBitSet| Regulus { lines: m.ones().map(|l| l as u32).collect() };
    Ok([to_regulus(a), to_regulus(b)])
}

/// Bit-mask summary of a quadric: its points, the lines and planes it
/// contains, and the structure specific to its orbit.
#[derive(Clone, Debug)]
pub struct Quadric {
    form: Form4,
    class: QuadricClass,
    points: FixedBitSet,
    lines: FixedBitSet,
    planes: FixedBitSet,
    vertex: Option<u32>,
    reguli: Option<[FixedBitSet; 2]>,
    /// `(H1, H2, axis)` for a plane pair.
    plane_pair: Option<(u32, u32, u32)>,
}

impl Quadric {
    pub fn analyze(geom: &Geometry, form: Form4) -> Result<Quadric> {
        if form.is_zero() {
            return Err(Error::ZeroForm);
        }
        let q = geom.q();
        let points = geom.zero_mask(&form);
        let mut lines = FixedBitSet::with_capacity(geom.lines().len());
        for l in 0..geom.lines().len() {
            if geom.line_mask(l as u32).is_subset(&points) {
                lines.insert(l);
            }
        }
        let mut planes = FixedBitSet::with_capacity(geom.planes().len());
        for h in 0..geom.planes().len() {
            if geom.plane_mask(h as u32).is_subset(&points) {
                planes.insert(h);
            }
        }
        let n = points.count_ones(..);
        let class = class_from_counts(q, n, lines.count_ones(..) == 1, planes.count_ones(..) >= 1)?;

        let mut quadric = Quadric {
            form,
            class,
            points,
            lines,
            planes,
            vertex: None,
            reguli: None,
            plane_pair: None,
        };
        match class {
            QuadricClass::Cone => {
                let mut gens = quadric.lines.ones();
                let (a, b) = (gens.next(), gens.next());
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(Error::Internal("cone with fewer than two generators".into()));
                };
                quadric.vertex = geom.meet(a as u32, b as u32);
                if quadric.vertex.is_none() || quadric.lines.count_ones(..) != q + 1 {
                    return Err(Error::Internal("cone generators are not concurrent".into()));
                }
            }
            QuadricClass::Hyperbolic => {
                quadric.reguli = Some(split_reguli(geom, &quadric.lines, q)?);
            }
            QuadricClass::PlanePair => {
                let mut hs = quadric.planes.ones();
                let (Some(h1), Some(h2), None) = (hs.next(), hs.next(), hs.next()) else {
                    return Err(Error::Internal("plane pair does not contain exactly two planes".into()));
                };
                let axis = geom.axis(h1 as u32, h2 as u32).expect("distinct planes meet in a line");
                quadric.plane_pair = Some((h1 as u32, h2 as u32, axis));
            }
            _ => {}
        }
        Ok(quadric)
    }

    pub fn form(&self) -> &Form4 {
        &self.form
    }

    pub fn class(&self) -> QuadricClass {
        self.class
    }

    pub fn points(&self) -> &FixedBitSet {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.count_ones(..)
    }

    /// Lines contained in the quadric, as a mask over line indices.
    pub fn lines(&self) -> &FixedBitSet {
        &self.lines
    }

    /// Planes contained in the quadric, as a mask over plane indices.
    pub fn planes(&self) -> &FixedBitSet {
        &self.planes
    }

    pub fn vertex(&self) -> Option<u32> {
        self.vertex
    }

    pub fn reguli(&self) -> Option<&[FixedBitSet; 2]> {
        self.reguli.as_ref()
    }

    /// Which regulus (0 or 1) a generator belongs to.
    pub fn regulus_of(&self, line: u32) -> Option<usize> {
        let r = self.reguli.as_ref()?;
        (0..2).find(|&i| r[i].contains(line as usize))
    }

    pub fn plane_pair(&self) -> Option<(u32, u32, u32)> {
        self.plane_pair
    }

    pub fn contains_point(&self, p: u32) -> bool {
        self.points.contains(p as usize)
    }

    pub fn meet_count(&self, geom: &Geometry, line: u32) -> usize {
        geom.line_mask(line).intersection_count(&self.points)
    }

    pub fn plane_class(&self, geom: &Geometry, plane: u32) -> Result<PlaneClass> {
        require_surface(self.class)?;
        let q = geom.q();
        let s = geom.plane_mask(plane).intersection_count(&self.points);
        let pc = match (self.class, s) {
            (QuadricClass::Hyperbolic, s) if s == 2 * q + 1 => PlaneClass::Tangent,
            (QuadricClass::Elliptic, 1) => PlaneClass::Tangent,
            (QuadricClass::Hyperbolic | QuadricClass::Elliptic, s) if s == q + 1 => PlaneClass::NonTangent,
            (QuadricClass::Cone, 1) => PlaneClass::VertexOnly,
            (QuadricClass::Cone, s) if s == 2 * q + 1 => PlaneClass::GeneratorPair,
            (QuadricClass::Cone, s) if s == q + 1 => {
                let v = self.vertex.expect("cone has a vertex");
                if geom.plane_mask(plane).contains(v as usize) {
                    PlaneClass::Tangent
                } else {
                    PlaneClass::ConicSection
                }
            }
            (c, s) => return Err(Error::Internal(format!("{c} meets a plane in {s} points"))),
        };
        Ok(pc)
    }

    pub fn line_class(&self, geom: &Geometry, line: u32) -> Result<LineClass> {
        require_surface(self.class)?;
        let q = geom.q();
        let lc = match self.meet_count(geom, line) {
            0 => LineClass::Skew,
            2 => LineClass::Bisecant,
            n if n == q + 1 => LineClass::Generator,
            1 => match self.vertex {
                Some(v) if geom.line(line).contains(v) => {
                    let mut t = 0;
                    for &h in geom.planes_through(line) {
                        if self.plane_class(geom, h)? == PlaneClass::Tangent {
                            t += 1;
                        }
                    }
                    vertex_line_class(q, t)
                }
                _ => LineClass::SimpleTangent,
            },
            n => return Err(Error::Internal(format!("line meets a quadric in {n} points"))),
        };
        Ok(lc)
    }

    /// Whether the form vanishes on every point of `other`.
    pub fn contains_all(&self, other: &FixedBitSet) -> bool {
        other.is_subset(&self.points)
    }
}

fn split_reguli(geom: &Geometry, gens: &FixedBitSet, q: usize) -> Result<[FixedBitSet; 2]> {
    let all: Vec<u32> = gens.ones().map(|l| l as u32).collect();
    if all.len() != 2 * (q + 1) {
        return Err(Error::Internal(format!("hyperbolic quadric with {} generators", all.len())));
    }
    let first = all[0];
    let mut r1 = FixedBitSet::with_capacity(gens.len());
    let mut r2 = FixedBitSet::with_capacity(gens.len());
    for &l in &all {
        if l == first || geom.meet(first, l).is_none() {
            r1.insert(l as usize);
        } else {
            r2.insert(l as usize);
        }
    }
    let skew = |a: u32, b: u32| geom.meet(a, b).is_none();
    let ok = r1.count_ones(..) == q + 1
        && r2.count_ones(..) == q + 1
        && r1.ones().all(|a| r1.ones().all(|b| a == b || skew(a as u32, b as u32)))
        && r2.ones().all(|a| r2.ones().all(|b| a == b || skew(a as u32, b as u32)))
        && r1.ones().all(|a| r2.ones().all(|b| !skew(a as u32, b as u32)));
    if !ok {
        return Err(Error::Internal("generator intersection graph is not complete bipartite".into()));
    }
    Ok([r1, r2])
}
