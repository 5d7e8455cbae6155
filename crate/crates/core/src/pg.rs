//! Points, lines and planes of PG(2,q) and PG(3,q).
//!
//! A projective point is stored as its W_i representative: with `i` the first
//! nonzero coordinate, `x_j = 0` for `j < i` and `x_i = 1`. The global point
//! order lists W_0 first, then W_1, W_2, W_3; inside a block the free
//! coordinates count up in base q with the leftmost one most significant.
//! This order is the column order of every generator matrix and every report.

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg;
use crate::quadric::{substitute, Form3, Form4, MONOMIALS4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint<const N: usize> {
    coords: [Fe; N],
}

/// Point of PG(3,q).
pub type Point3 = ProjPoint<4>;
/// Point of PG(2,q).
pub type Point2 = ProjPoint<3>;

impl<const N: usize> ProjPoint<N> {
    /// Canonical W_i representative of the projective class of `coords`.
    pub fn normalize(field: &Field, coords: [Fe; N]) -> Result<Self> {
        let lead = coords.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
        let inv = field.inv(coords[lead])?;
        Ok(Self { coords: coords.map(|c| field.mul(c, inv)) })
    }

    pub fn coords(&self) -> &[Fe; N] {
        &self.coords
    }

    /// Coordinates as base-p reps.
    pub fn reps(&self) -> [u32; N] {
        self.coords.map(Fe::rep)
    }

    /// The `i` of the block W_i holding this point.
    pub fn w_index(&self) -> usize {
        self.coords.iter().position(|c| !c.is_zero()).expect("normalized point is nonzero")
    }

    /// Position in the global point order.
    pub fn index(&self, q: usize) -> usize {
        let w = self.w_index();
        let mut idx = block_offset(N, q, w);
        let mut within = 0;
        for c in &self.coords[w + 1..] {
            within = within * q + c.0 as usize;
        }
        idx += within;
        idx
    }

    /// Inverse of [`ProjPoint::index`].
    pub fn from_index(q: usize, idx: usize) -> Option<Self> {
        let mut coords = [Fe::ZERO; N];
        for w in 0..N {
            let start = block_offset(N, q, w);
            let size = q.pow((N - 1 - w) as u32);
            if idx < start + size {
                let mut within = idx - start;
                coords[w] = Fe::ONE;
                for j in (w + 1..N).rev() {
                    coords[j] = Fe((within % q) as u8);
                    within /= q;
                }
                return Some(Self { coords });
            }
        }
        None
    }

    /// Inner product of the coordinate vectors.
    pub fn dot(&self, field: &Field, other: &Self) -> Fe {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(Fe::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
    }
}

impl<const N: usize> fmt::Display for ProjPoint<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{}", c.0)?;
        }
        write!(f, ")")
    }
}

impl<const N: usize> Serialize for ProjPoint<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn block_offset(n: usize, q: usize, w: usize) -> usize {
    (0..w).map(|j| q.pow((n - 1 - j) as u32)).sum()
}

/// Number of points of PG(dim, q).
pub fn point_count(dim: usize, q: usize) -> usize {
    (0..=dim).map(|e| q.pow(e as u32)).sum()
}

/// All points of PG(N-1, q) in global order. Only N = 3 and N = 4 are supported.
pub fn enumerate_points<const N: usize>(field: &Field) -> Result<Vec<ProjPoint<N>>> {
    if N != 3 && N != 4 {
        return Err(Error::UnsupportedDimension(N.wrapping_sub(1)));
    }
    let q = field.order();
    Ok((0..point_count(N - 1, q))
        .map(|i| ProjPoint::from_index(q, i).expect("index in range"))
        .collect())
}

/// A line of PG(3,q) as the sorted global indices of its q+1 points. The
/// canonical basis is the pair of smallest indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    points: Vec<u32>,
}

impl Line {
    pub fn basis(&self) -> [u32; 2] {
        [self.points[0], self.points[1]]
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn contains(&self, point: u32) -> bool {
        self.points.binary_search(&point).is_ok()
    }
}

/// The line spanned by two distinct points.
pub fn line_through(field: &Field, a: &Point3, b: &Point3) -> Result<Line> {
    if a == b {
        return Err(Error::EqualPoints);
    }
    let q = field.order();
    let mut points = Vec::with_capacity(q + 1);
    points.push(b.index(q) as u32);
    for t in field.elements() {
        let c: [Fe; 4] = std::array::from_fn(|i| field.add(a.coords[i], field.mul(t, b.coords[i])));
        points.push(Point3::normalize(field, c)?.index(q) as u32);
    }
    points.sort_unstable();
    Ok(Line { points })
}

/// A plane of PG(3,q): dual coordinates, three spanning points and the
/// sorted indices of its q^2+q+1 points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plane {
    dual: Point3,
    basis: [u32; 3],
    points: Vec<u32>,
}

impl Plane {
    /// Plane with the given dual coordinates (normalized like a point).
    pub fn from_dual(field: &Field, dual: Point3) -> Plane {
        let q = field.order();
        let points: Vec<u32> = (0..point_count(3, q))
            .filter(|&i| {
                let p = Point3::from_index(q, i).unwrap();
                p.dot(field, &dual).is_zero()
            })
            .map(|i| i as u32)
            .collect();
        let first = Point3::from_index(q, points[0] as usize).unwrap();
        let second = Point3::from_index(q, points[1] as usize).unwrap();
        let span = line_through(field, &first, &second).expect("distinct points");
        let third = *points.iter().find(|&&p| !span.contains(p)).expect("plane is not a line");
        Plane { dual, basis: [points[0], points[1], third], points }
    }

    pub fn dual(&self) -> &Point3 {
        &self.dual
    }

    pub fn basis(&self) -> [u32; 3] {
        self.basis
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn contains(&self, field: &Field, p: &Point3) -> bool {
        p.dot(field, &self.dual).is_zero()
    }
}

/// The ternary form `g(u) = f(u0*e0 + u1*e1 + u2*e2)` of `f` restricted to the
/// plane spanned by `basis`.
pub fn restrict_form(field: &Field, f: &Form4, basis: &[Point3; 3]) -> Result<Form3> {
    let rows: Vec<Vec<Fe>> = basis.iter().map(|p| p.coords.to_vec()).collect();
    if linalg::rank(field, &rows) < 3 {
        return Err(Error::DegenerateBasis);
    }
    let vs = [basis[0].coords, basis[1].coords, basis[2].coords];
    let coeffs = substitute(field, f, &vs);
    Ok(Form3::new(coeffs.try_into().expect("six ternary monomials")))
}

/// Process-wide cache of geometries keyed by field order.
pub fn shared_geometry(q: u32) -> Result<Arc<Geometry>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Geometry>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("cache lock").get(&q) {
        return Ok(Arc::clone(g));
    }
    let geom = Arc::new(Geometry::new(Field::with_order(q)?));
    let mut guard = cache.lock().expect("cache lock");
    Ok(Arc::clone(guard.entry(q).or_insert(geom)))
}

/// Incidence structure of PG(3,q), built once per field.
pub struct Geometry {
    field: Field,
    points: Vec<Point3>,
    lines: Vec<Line>,
    planes: Vec<Plane>,
    /// `line_of[a * P + b]` is the line through points a != b.
    line_of: Vec<u32>,
    lines_through_point: Vec<Vec<u32>>,
    planes_through_line: Vec<Vec<u32>>,
    line_masks: Vec<FixedBitSet>,
    plane_masks: Vec<FixedBitSet>,
    /// Values of the ten monomials at each point, in monomial order.
    monomials: Vec<[Fe; 10]>,
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Geometry")
            .field("q", &self.field.q())
            .field("points", &self.points.len())
            .field("lines", &self.lines.len())
            .field("planes", &self.planes.len())
            .finish()
    }
}

impl Geometry {
    pub fn new(field: Field) -> Geometry {
        let q = field.order();
        let points = enumerate_points::<4>(&field).expect("dimension 3 is supported");
        let np = points.len();

        let mut line_of = vec![u32::MAX; np * np];
        let mut lines = Vec::new();
        for a in 0..np {
            for b in a + 1..np {
                if line_of[a * np + b] != u32::MAX {
                    continue;
                }
                let line = line_through(&field, &points[a], &points[b]).expect("distinct points");
                let id = lines.len() as u32;
                for &x in line.points() {
                    for &y in line.points() {
                        if x != y {
                            line_of[x as usize * np + y as usize] = id;
                        }
                    }
                }
                lines.push(line);
            }
        }

        let planes: Vec<Plane> = points.iter().map(|d| Plane::from_dual(&field, *d)).collect();

        let mask_of = |pts: &[u32]| {
            let mut m = FixedBitSet::with_capacity(np);
            pts.iter().for_each(|&p| m.insert(p as usize));
            m
        };
        let line_masks: Vec<FixedBitSet> = lines.iter().map(|l| mask_of(l.points())).collect();
        let plane_masks: Vec<FixedBitSet> = planes.iter().map(|h| mask_of(h.points())).collect();

        let mut lines_through_point = vec![Vec::with_capacity(q * q + q + 1); np];
        for (id, l) in lines.iter().enumerate() {
            for &p in l.points() {
                lines_through_point[p as usize].push(id as u32);
            }
        }
        let mut planes_through_line = vec![Vec::with_capacity(q + 1); lines.len()];
        for (lid, l) in lines.iter().enumerate() {
            let [a, b] = l.basis();
            for (hid, h) in plane_masks.iter().enumerate() {
                if h.contains(a as usize) && h.contains(b as usize) {
                    planes_through_line[lid].push(hid as u32);
                }
            }
        }

        let monomials = points
            .iter()
            .map(|p| MONOMIALS4.map(|(i, j)| field.mul(p.coords[i], p.coords[j])))
            .collect();

        Geometry {
            field,
            points,
            lines,
            planes,
            line_of,
            lines_through_point,
            planes_through_line,
            line_masks,
            plane_masks,
            monomials,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn point(&self, idx: u32) -> &Point3 {
        &self.points[idx as usize]
    }

    pub fn point_index(&self, p: &Point3) -> u32 {
        p.index(self.q()) as u32
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, idx: u32) -> &Line {
        &self.lines[idx as usize]
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn plane(&self, idx: u32) -> &Plane {
        &self.planes[idx as usize]
    }

    /// Index of the line through two distinct points.
    pub fn line_index(&self, a: u32, b: u32) -> Option<u32> {
        let id = self.line_of[a as usize * self.points.len() + b as usize];
        (id != u32::MAX).then_some(id)
    }

    pub fn lines_through(&self, point: u32) -> &[u32] {
        &self.lines_through_point[point as usize]
    }

    pub fn planes_through(&self, line: u32) -> &[u32] {
        &self.planes_through_line[line as usize]
    }

    pub fn line_mask(&self, line: u32) -> &FixedBitSet {
        &self.line_masks[line as usize]
    }

    pub fn plane_mask(&self, plane: u32) -> &FixedBitSet {
        &self.plane_masks[plane as usize]
    }

    /// The line where two distinct planes meet.
    pub fn axis(&self, h1: u32, h2: u32) -> Option<u32> {
        let m1 = self.plane_mask(h1);
        let m2 = self.plane_mask(h2);
        let mut common = m1.intersection(m2);
        let a = common.next()?;
        let b = common.next()?;
        if m1 == m2 {
            return None;
        }
        self.line_index(a as u32, b as u32)
    }

    /// The common point of two lines, if they meet.
    pub fn meet(&self, l1: u32, l2: u32) -> Option<u32> {
        if l1 == l2 {
            return None;
        }
        self.line_mask(l1).intersection(self.line_mask(l2)).next().map(|p| p as u32)
    }

    /// Evaluation of `f` at the point with global index `idx`.
    #[inline]
    pub fn eval(&self, f: &Form4, idx: u32) -> Fe {
        let mono = &self.monomials[idx as usize];
        let field = &self.field;
        f.coeffs()
            .iter()
            .zip(mono)
            .fold(Fe::ZERO, |acc, (&c, &m)| field.add(acc, field.mul(c, m)))
    }

    /// Monomial values at a point.
    pub fn monomials_at(&self, idx: u32) -> &[Fe; 10] {
        &self.monomials[idx as usize]
    }

    /// Bit mask of the points where `f` vanishes.
    pub fn zero_mask(&self, f: &Form4) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.points.len());
        for i in 0..self.points.len() as u32 {
            if self.eval(f, i).is_zero() {
                m.insert(i as usize);
            }
        }
        m
    }

    pub fn mask_of(&self, points: impl IntoIterator<Item = u32>) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.points.len());
        points.into_iter().for_each(|p| m.insert(p as usize));
        m
    }
}
