//! Lattice polytopes: lattice-point enumeration, Ehrhart h*-polynomials,
//! normality, polytope degree, AM-GM witnesses and the sparse
//! positivity classification.

mod amgm;
mod classify;
mod ehrhart;
pub(crate) mod hull;
pub mod oracle;

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{saturated_basis, Rational, RationalMatrix};
use hull::{hull_facets, vertex_indices, Enumerator, Facet};

pub use amgm::{amgm_witness, diagonal_gram_obstruction, SparsePolynomial, SparseTerm};
pub use classify::{
    classify, real_density, sublattice_index, ClassificationReport, Density, Family, ModelMap, PosSos,
};
pub use ehrhart::{h_star, is_k_normal, is_normal, normalized_volume, polytope_degree, HStar, Normality};

/// Coordinates are bounded so that every sum and product formed during
/// enumeration fits comfortably in 128-bit intermediates.
pub const COORDINATE_LIMIT: i64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("a polytope needs at least one point")]
    Empty,
    #[error("point of length {found} in an ambient lattice of rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {0} exceeds the supported range")]
    CoordinateOverflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A point of the ambient lattice `Z^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn origin(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// Affine lattice chart `x = k*origin + basis * c` identifying the affine
/// lattice spanned by a polytope with `Z^dim`.
#[derive(Debug, Clone)]
struct Frame {
    origin: Vec<i64>,
    basis: Vec<Vec<i64>>,
    identity: bool,
    // rows of the ambient coordinates used to recover local coordinates
    pivot_rows: Vec<usize>,
    pivot_inverse: Vec<Vec<Rational>>,
}

impl Frame {
    fn build(points: &[Vec<i64>], rank: usize) -> Frame {
        let origin = points[0].clone();
        let diffs: Vec<Vec<BigInt>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(&origin).map(|(a, b)| BigInt::from(a - b)).collect())
            .filter(|d: &Vec<BigInt>| d.iter().any(|x| x.sign() != num_bigint::Sign::NoSign))
            .collect();
        let basis: Vec<Vec<i64>> = saturated_basis(&diffs, rank)
            .into_iter()
            .map(|v| v.iter().map(|x| x.to_i64().expect("basis fits in i64")).collect())
            .collect();
        let dim = basis.len();
        if dim == rank {
            return Frame {
                origin: vec![0; rank],
                basis: (0..rank)
                    .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
                    .collect(),
                identity: true,
                pivot_rows: (0..rank).collect(),
                pivot_inverse: Vec::new(),
            };
        }
        // choose `dim` ambient rows on which the basis is invertible
        let mut pivot_rows = Vec::new();
        if dim > 0 {
            let columns_as_rows: Vec<Vec<i64>> = (0..rank).map(|r| basis.iter().map(|b| b[r]).collect()).collect();
            let m = RationalMatrix::from_int_rows(&columns_as_rows).expect("nonempty");
            pivot_rows = m.transpose().rref().pivots;
        }
        let sub: Vec<Vec<Rational>> = pivot_rows
            .iter()
            .map(|&r| basis.iter().map(|b| Rational::from_integer(BigInt::from(b[r]))).collect())
            .collect();
        let pivot_inverse = invert(&sub);
        Frame {
            origin,
            basis,
            identity: false,
            pivot_rows,
            pivot_inverse,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn to_local(&self, x: &[i64]) -> Vec<i64> {
        if self.identity {
            return x.to_vec();
        }
        let rhs: Vec<Rational> = self
            .pivot_rows
            .iter()
            .map(|&r| Rational::from_integer(BigInt::from(x[r] - self.origin[r])))
            .collect();
        self.pivot_inverse
            .iter()
            .map(|row| {
                let v: Rational = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
                v.to_integer().to_i64().expect("local coordinate fits")
            })
            .collect()
    }

    fn to_ambient(&self, c: &[i64], k: i64) -> Vec<i64> {
        if self.identity {
            return c.to_vec();
        }
        let mut x: Vec<i64> = self.origin.iter().map(|o| o * k).collect();
        for (ci, b) in c.iter().zip(&self.basis) {
            for (xr, br) in x.iter_mut().zip(b) {
                *xr += ci * br;
            }
        }
        x
    }
}

fn invert(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let a = RationalMatrix::from_rows(m).expect("square");
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rational> = (0..n).map(|i| if i == j { Rational::from_integer(1.into()) } else { Rational::from_integer(0.into()) }).collect();
        cols.push(a.solve(&e).expect("invertible"));
    }
    (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
}

/// A lattice polytope given by its vertices in `Z^ambient_rank`.
///
/// Construction keeps only the extreme points of the input and fixes an
/// affine lattice chart of the affine span, so every invariant below is
/// computed for the polytope as a full-dimensional polytope in that chart.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PolytopeJson", into = "PolytopeJson")]
pub struct LatticePolytope {
    ambient_rank: usize,
    vertices: Vec<LatticePoint>,
    frame: FrameCell,
}

#[derive(Debug, Clone, Default)]
struct FrameCell(Option<Box<Local>>);

#[derive(Debug, Clone)]
struct Local {
    frame: Frame,
    vertices: Vec<Vec<i64>>,
    facets: Vec<Facet>,
    enumerator: OnceLock<Enumerator>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub ambient_rank: usize,
    pub vertices: Vec<Vec<i64>>,
}

impl TryFrom<PolytopeJson> for LatticePolytope {
    type Error = PolytopeError;
    fn try_from(value: PolytopeJson) -> Result<Self, Self::Error> {
        LatticePolytope::new(
            value.ambient_rank,
            value.vertices.into_iter().map(LatticePoint).collect(),
        )
    }
}

impl From<LatticePolytope> for PolytopeJson {
    fn from(q: LatticePolytope) -> Self {
        PolytopeJson {
            ambient_rank: q.ambient_rank,
            vertices: q.vertices.into_iter().map(|v| v.0).collect(),
        }
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

impl LatticePolytope {
    /// Convex hull of `points`; redundant (non-extreme) points are dropped.
    pub fn new(ambient_rank: usize, points: Vec<LatticePoint>) -> Result<Self, PolytopeError> {
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        for p in &points {
            if p.rank() != ambient_rank {
                return Err(PolytopeError::DimensionMismatch {
                    expected: ambient_rank,
                    found: p.rank(),
                });
            }
            if let Some(c) = p.0.iter().find(|c| c.abs() > COORDINATE_LIMIT) {
                return Err(PolytopeError::CoordinateOverflow(c.to_string()));
            }
        }
        let mut raw: Vec<Vec<i64>> = points.into_iter().map(|p| p.0).collect();
        raw.sort();
        raw.dedup();
        let frame = Frame::build(&raw, ambient_rank);
        let dim = frame.dim();
        let local_points: Vec<Vec<i64>> = raw.iter().map(|p| frame.to_local(p)).collect();
        let facets = hull_facets(&local_points, dim);
        let keep = vertex_indices(&local_points, &facets, dim);
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = keep
            .into_iter()
            .map(|i| (raw[i].clone(), local_points[i].clone()))
            .collect();
        pairs.sort();
        let vertices = pairs.iter().map(|(a, _)| LatticePoint(a.clone())).collect();
        let local_vertices = pairs.into_iter().map(|(_, l)| l).collect();
        Ok(Self {
            ambient_rank,
            vertices,
            frame: FrameCell(Some(Box::new(Local {
                frame,
                vertices: local_vertices,
                facets,
                enumerator: OnceLock::new(),
            }))),
        })
    }

    pub fn from_vertices(vertices: &[Vec<i64>]) -> Result<Self, PolytopeError> {
        let rank = vertices.first().map_or(0, Vec::len);
        Self::new(rank, vertices.iter().cloned().map(LatticePoint).collect())
    }

    /// Unimodular simplex `conv{0, e_1, ..., e_m}`.
    pub fn simplex(m: usize) -> Self {
        Self::dilated_simplex(m, 1)
    }

    /// `d * conv{0, e_1, ..., e_m}`.
    pub fn dilated_simplex(m: usize, d: i64) -> Self {
        let mut pts = vec![vec![0; m]];
        for i in 0..m {
            let mut v = vec![0; m];
            v[i] = d;
            pts.push(v);
        }
        Self::from_vertices_unchecked(m, pts)
    }

    /// The segment `[0, d]` in `Z^1`.
    pub fn segment(d: i64) -> Self {
        Self::from_vertices_unchecked(1, vec![vec![0], vec![d]])
    }

    /// Cartesian product of polytopes.
    pub fn product(factors: &[LatticePolytope]) -> Self {
        let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
        for q in factors {
            let mut next = Vec::new();
            for p in &pts {
                for v in &q.vertices {
                    let mut c = p.clone();
                    c.extend_from_slice(&v.0);
                    next.push(c);
                }
            }
            pts = next;
        }
        let rank = factors.iter().map(|q| q.ambient_rank).sum();
        Self::from_vertices_unchecked(rank, pts)
    }

    /// Cayley polytope of the segments `[0, d_0], ..., [0, d_{m-1}]`: the
    /// segments sit over the vertices `0, e_1, ..., e_{m-1}` of a unimodular
    /// simplex and point along the last coordinate.
    pub fn cayley_segments(lengths: &[i64]) -> Result<Self, PolytopeError> {
        let m = lengths.len();
        if m == 0 || lengths.iter().any(|&d| d < 0) || lengths.iter().all(|&d| d == 0) {
            return Err(PolytopeError::InvalidArgument(
                "Cayley segments need nonnegative lengths with at least one positive".into(),
            ));
        }
        let mut pts = Vec::new();
        for (i, &d) in lengths.iter().enumerate() {
            let mut base = vec![0; m];
            if i > 0 {
                base[i - 1] = 1;
            }
            pts.push(base.clone());
            base[m - 1] = d;
            pts.push(base);
        }
        Self::new(m, pts.into_iter().map(LatticePoint).collect())
    }

    /// `(m-2)`-fold pyramid over `conv{(0,0), (2,0), (0,2)}` with apexes `e_3, ..., e_m`.
    pub fn pyramid_over_twice_simplex(m: usize) -> Result<Self, PolytopeError> {
        if m < 2 {
            return Err(PolytopeError::InvalidArgument("pyramid needs dimension at least 2".into()));
        }
        let mut pts = vec![vec![0; m]];
        for i in 0..m {
            let mut v = vec![0; m];
            v[i] = if i < 2 { 2 } else { 1 };
            pts.push(v);
        }
        Ok(Self::from_vertices_unchecked(m, pts))
    }

    /// Simplex `conv{0, e_1, ..., e_{m-1}, w}` with
    /// `w = e_1 + ... + e_{(m-1)/2} + k (e_{(m+1)/2} + ... + e_{m-1}) + (k+1) e_m`,
    /// whose h*-polynomial is `1 + k t^{(m+1)/2}` for odd `m >= 3`.
    pub fn higashitani(m: usize, k: i64) -> Result<Self, PolytopeError> {
        if m < 3 || m % 2 == 0 || k < 0 {
            return Err(PolytopeError::InvalidArgument("needs odd m >= 3 and k >= 0".into()));
        }
        let mut pts = vec![vec![0; m]];
        for i in 0..m - 1 {
            let mut v = vec![0; m];
            v[i] = 1;
            pts.push(v);
        }
        let half = (m - 1) / 2;
        let mut w = vec![0; m];
        for (i, c) in w.iter_mut().enumerate() {
            *c = if i < half {
                1
            } else if i < m - 1 {
                k
            } else {
                k + 1
            };
        }
        pts.push(w);
        Ok(Self::from_vertices_unchecked(m, pts))
    }

    /// Reeve tetrahedron `conv{0, e_1, e_2, (1, 1, q)}`.
    pub fn reeve(q: i64) -> Result<Self, PolytopeError> {
        if q < 1 {
            return Err(PolytopeError::InvalidArgument("Reeve height must be positive".into()));
        }
        Ok(Self::from_vertices_unchecked(
            3,
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, q]],
        ))
    }

    fn from_vertices_unchecked(rank: usize, pts: Vec<Vec<i64>>) -> Self {
        Self::new(rank, pts.into_iter().map(LatticePoint).collect()).expect("valid construction")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    /// Dimension of the affine span.
    pub fn dim(&self) -> usize {
        self.local().frame.dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient_rank
    }

    /// `d * Q`.
    pub fn dilate(&self, d: i64) -> Result<Self, PolytopeError> {
        if d < 1 {
            return Err(PolytopeError::InvalidArgument("dilation factor must be positive".into()));
        }
        Self::new(self.ambient_rank, self.vertices.iter().map(|v| v.scale(d)).collect())
    }

    /// Lattice points of `k Q`, in lexicographic order.
    pub fn lattice_points(&self, k: u32) -> Vec<LatticePoint> {
        let local = self.local();
        let k = k as i64;
        local
            .enumerator()
            .points(k)
            .into_iter()
            .map(|c| LatticePoint(local.frame.to_ambient(&c, k)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// `|(kQ) ∩ M|`.
    pub fn count_lattice_points(&self, k: u32) -> u64 {
        self.local().enumerator().count(k as i64)
    }

    /// Number of lattice points in the relative interior of `kQ`.
    pub fn count_interior_points(&self, k: u32) -> u64 {
        self.local().enumerator().count_interior(k as i64)
    }

    /// Whether `x` lies in `kQ` (relative to the affine lattice span).
    pub fn contains(&self, x: &LatticePoint, k: u32) -> bool {
        let local = self.local();
        let k = k as i64;
        if x.rank() != self.ambient_rank {
            return false;
        }
        let c = match self.local_coordinates(x, k) {
            Some(c) => c,
            None => return false,
        };
        local.facets.iter().all(|f| f.contains_dilate(&c, k))
    }

    // local coordinates of a point of the affine span of kQ, if it lies there
    fn local_coordinates(&self, x: &LatticePoint, k: i64) -> Option<Vec<i64>> {
        let local = self.local();
        if local.frame.identity {
            return Some(x.0.clone());
        }
        let shifted: Vec<i64> = x
            .0
            .iter()
            .zip(&local.frame.origin)
            .map(|(a, o)| a - o * (k - 1))
            .collect();
        let c = local.frame.to_local(&shifted);
        (local.frame.to_ambient(&c, k) == x.0).then_some(c)
    }

    fn local(&self) -> &Local {
        self.frame.0.as_deref().expect("polytope constructed through LatticePolytope::new")
    }

    pub(crate) fn local_vertices(&self) -> &[Vec<i64>] {
        &self.local().vertices
    }

    pub(crate) fn local_facets(&self) -> &[Facet] {
        &self.local().facets
    }

    pub(crate) fn local_lattice_points(&self, k: u32) -> Vec<Vec<i64>> {
        self.local().enumerator().points(k as i64)
    }

    pub(crate) fn local_to_ambient(&self, c: &[i64], k: u32) -> LatticePoint {
        LatticePoint(self.local().frame.to_ambient(c, k as i64))
    }

    /// The facets of `Q` as polytopes in the ambient lattice.
    pub fn facets(&self) -> Vec<LatticePolytope> {
        let local = self.local();
        local
            .facets
            .iter()
            .map(|f| {
                let pts = local
                    .vertices
                    .iter()
                    .filter(|v| f.is_tight(v))
                    .map(|v| LatticePoint(local.frame.to_ambient(v, 1)))
                    .collect();
                Self::new(self.ambient_rank, pts).expect("facet of a valid polytope")
            })
            .collect()
    }

    /// The same polytope expressed in its own affine lattice chart, so that it is full-dimensional.
    pub fn to_full_dimensional(&self) -> LatticePolytope {
        if self.is_full_dimensional() {
            return self.clone();
        }
        Self::from_vertices_unchecked(self.dim(), self.local().vertices.clone())
    }

    pub(crate) fn frame_origin_and_basis(&self) -> (Vec<i64>, Vec<Vec<i64>>) {
        let f = &self.local().frame;
        (f.origin.clone(), f.basis.clone())
    }
}

impl Local {
    fn enumerator(&self) -> &Enumerator {
        self.enumerator
            .get_or_init(|| Enumerator::new(&self.vertices, self.frame.dim()))
    }
}
