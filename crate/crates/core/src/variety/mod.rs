//! Embedded-variety models: a basis of linear forms `R_1`, the quadrics
//! `I_2` vanishing on the variety, and the induced basis of `R_2`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;
use crate::numerics::{rank_of_vectors, rat, Rational, RationalMatrix};
use crate::polytope::{normalized_volume, LatticePoint, LatticePolytope, PolytopeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("inconsistent model: {0}")]
    InconsistentModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Label of a coordinate of `P^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coordinate {
    Exponent(Vec<i64>),
    Symbol(String),
}

/// Index of the monomial `x_i x_j` (`i <= j`) among the `C(k+1, 2)` quadratic
/// monomials in `k` variables, ordered lexicographically.
pub fn monomial_index(i: usize, j: usize, k: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * k - i * i.saturating_sub(1) / 2 + (j - i)
}

/// All `(i, j)` with `i <= j < k` in monomial order.
pub fn monomial_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in i..k {
            out.push((i, j));
        }
    }
    out
}

/// A quadric vanishing on the variety, as coefficients over the quadratic monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    /// `x_plus - x_minus` for two monomials with the same toric degree.
    Binomial { plus: usize, minus: usize },
    Linear(Vec<(usize, Rational)>),
}

impl Relation {
    pub fn coefficients(&self) -> Vec<(usize, Rational)> {
        match self {
            Relation::Binomial { plus, minus } => vec![(*plus, Rational::one()), (*minus, -Rational::one())],
            Relation::Linear(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone)]
enum R2Map {
    // R_2 basis = sorted pairwise sums; each monomial maps to one sum
    Toric { sums: Vec<LatticePoint>, monomial_to_sum: Vec<u32> },
    // R_2 basis = monomials outside the pivots of the row-reduced relations
    Quotient { basis: Vec<usize>, images: Vec<Vec<(usize, Rational)>>, rank: usize },
}

/// An embedded variety `X ⊆ P^n` of dimension `m`, described by its
/// coordinates and its quadratic relations.
#[derive(Debug, Clone)]
pub struct VarietyModel {
    name: String,
    n: usize,
    m: usize,
    r1_basis: Vec<Coordinate>,
    relations: Vec<Relation>,
    r2: R2Map,
    // a monomial representing each R_2 basis element
    representatives: Vec<(usize, usize)>,
    param: Parametrization,
    degree: Option<u64>,
}

/// How real points of the model are produced from free parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Parametrization {
    Toric(Vec<Vec<i64>>),
    Scroll(Vec<usize>),
    VeroneseCone(usize),
    Quadric(usize),
    Unknown,
}

/// An element of `R_2`, as coefficients over the model's canonical basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticForm {
    #[serde(with = "json::rational_vec")]
    pub coefficients: Vec<Rational>,
}

impl QuadraticForm {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        QuadraticForm { coefficients }
    }

    pub fn zero(len: usize) -> Self {
        QuadraticForm { coefficients: vec![Rational::zero(); len] }
    }

    /// Exact conversion of finite doubles; `None` on NaN or infinity.
    pub fn from_f64(values: &[f64]) -> Option<Self> {
        values
            .iter()
            .map(|&v| Rational::from_float(v))
            .collect::<Option<Vec<_>>>()
            .map(QuadraticForm::new)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coefficients.iter().map(crate::numerics::rat_to_f64).collect()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// JSON form. Each relation is a symmetric `(n+1) x (n+1)` matrix, flattened
/// row-major, whose quadratic form is the relation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub r1_basis: Vec<Coordinate>,
    #[serde(with = "json::rational_matrix")]
    pub i2_basis: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
}

impl Serialize for VarietyModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VarietyModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ModelJson::deserialize(d)?;
        VarietyModel::from_json(j).map_err(serde::de::Error::custom)
    }
}

impl VarietyModel {
    /// A model from explicit quadrics. Relations need not be independent;
    /// dependence is reported by [`epsilon`].
    pub fn from_relations(
        name: impl Into<String>,
        n: usize,
        m: usize,
        r1_basis: Vec<Coordinate>,
        relations: Vec<Vec<(usize, Rational)>>,
        degree: Option<u64>,
    ) -> Result<Self, VarietyError> {
        if r1_basis.len() != n + 1 {
            return Err(VarietyError::InconsistentModel(format!(
                "{} coordinates for P^{n}",
                r1_basis.len()
            )));
        }
        if m > n {
            return Err(VarietyError::InconsistentModel(format!("dimension {m} exceeds n = {n}")));
        }
        let k = n + 1;
        let total = k * (k + 1) / 2;
        for r in &relations {
            if let Some((idx, _)) = r.iter().find(|(idx, _)| *idx >= total) {
                return Err(VarietyError::InconsistentModel(format!("monomial index {idx} out of range")));
            }
        }
        let r2 = quotient_map(&relations, total);
        let pairs = monomial_pairs(k);
        let representatives = match &r2 {
            R2Map::Quotient { basis, .. } => basis.iter().map(|&b| pairs[b]).collect(),
            R2Map::Toric { .. } => unreachable!("explicit relations give a quotient basis"),
        };
        let exponents: Option<Vec<Vec<i64>>> = r1_basis
            .iter()
            .map(|c| match c {
                Coordinate::Exponent(e) => Some(e.clone()),
                Coordinate::Symbol(_) => None,
            })
            .collect();
        let param = exponents.map_or(Parametrization::Unknown, Parametrization::Toric);
        Ok(Self {
            name: name.into(),
            n,
            m,
            r1_basis,
            relations: relations.into_iter().map(Relation::Linear).collect(),
            r2,
            representatives,
            param,
            degree,
        })
    }

    pub fn from_json(j: ModelJson) -> Result<Self, VarietyError> {
        let k = j.n + 1;
        let mut relations = Vec::with_capacity(j.i2_basis.len());
        for (r, flat) in j.i2_basis.iter().enumerate() {
            if flat.len() != k * k {
                return Err(VarietyError::InconsistentModel(format!(
                    "relation {r} has {} entries, expected {}",
                    flat.len(),
                    k * k
                )));
            }
            let mut coeffs = Vec::new();
            for i in 0..k {
                for jj in i..k {
                    if flat[i * k + jj] != flat[jj * k + i] {
                        return Err(VarietyError::InconsistentModel(format!("relation {r} is not symmetric")));
                    }
                    let c = if i == jj {
                        flat[i * k + i].clone()
                    } else {
                        &flat[i * k + jj] * rat(2)
                    };
                    if !c.is_zero() {
                        coeffs.push((monomial_index(i, jj, k), c));
                    }
                }
            }
            relations.push(coeffs);
        }
        Self::from_relations(j.name, j.n, j.m, j.r1_basis, relations, j.degree)
    }

    pub fn to_json(&self) -> ModelJson {
        let k = self.n + 1;
        let pairs = monomial_pairs(k);
        let i2_basis = self
            .relations
            .iter()
            .map(|rel| {
                let mut flat = vec![Rational::zero(); k * k];
                for (idx, c) in rel.coefficients() {
                    let (i, j) = pairs[idx];
                    if i == j {
                        flat[i * k + i] = c;
                    } else {
                        let half = c / rat(2);
                        flat[i * k + j] = half.clone();
                        flat[j * k + i] = half;
                    }
                }
                flat
            })
            .collect();
        ModelJson {
            name: self.name.clone(),
            n: self.n,
            m: self.m,
            r1_basis: self.r1_basis.clone(),
            i2_basis,
            degree: self.degree,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn e(&self) -> usize {
        self.n - self.m
    }

    pub fn r1_basis(&self) -> &[Coordinate] {
        &self.r1_basis
    }

    pub fn r1_dim(&self) -> usize {
        self.n + 1
    }

    /// `C(n+2, 2)`, the number of quadratic monomials.
    pub fn sym2_dim(&self) -> usize {
        let k = self.n + 1;
        k * (k + 1) / 2
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn i2_len(&self) -> usize {
        self.relations.len()
    }

    pub fn dim_r2(&self) -> usize {
        match &self.r2 {
            R2Map::Toric { sums, .. } => sums.len(),
            R2Map::Quotient { basis, .. } => basis.len(),
        }
    }

    pub fn degree(&self) -> Option<u64> {
        self.degree
    }

    pub fn is_toric(&self) -> bool {
        matches!(self.r2, R2Map::Toric { .. })
    }

    /// Exponents labelling the `R_2` basis of a toric model.
    pub fn r2_exponents(&self) -> Option<&[LatticePoint]> {
        match &self.r2 {
            R2Map::Toric { sums, .. } => Some(sums),
            R2Map::Quotient { .. } => None,
        }
    }

    /// Monomial indices labelling the `R_2` basis of a non-toric model.
    pub fn r2_monomials(&self) -> Option<&[usize]> {
        match &self.r2 {
            R2Map::Toric { .. } => None,
            R2Map::Quotient { basis, .. } => Some(basis),
        }
    }

    /// Image of the monomial `x_i x_j` in the `R_2` basis.
    pub fn reduce_monomial(&self, idx: usize) -> Vec<(usize, Rational)> {
        match &self.r2 {
            R2Map::Toric { monomial_to_sum, .. } => vec![(monomial_to_sum[idx] as usize, Rational::one())],
            R2Map::Quotient { images, .. } => images[idx].clone(),
        }
    }

    /// A monomial `x_i x_j` whose class is the `r`-th basis element of `R_2`.
    pub fn r2_representative(&self, r: usize) -> (usize, usize) {
        self.representatives[r]
    }

    /// Values of the `R_2` basis at a point of the affine cone over `X`.
    pub fn r2_values(&self, p: &[f64]) -> Vec<f64> {
        self.representatives.iter().map(|&(i, j)| p[i] * p[j]).collect()
    }

    /// Value of the form with coefficients `f` at a point of the affine cone.
    pub fn eval_form(&self, f: &[f64], p: &[f64]) -> f64 {
        self.representatives
            .iter()
            .zip(f)
            .map(|(&(i, j), c)| c * p[i] * p[j])
            .sum()
    }

    /// Number of free real parameters of the built-in parametrization, if any.
    pub fn param_count(&self) -> Option<usize> {
        match &self.param {
            Parametrization::Toric(e) => Some(e.first().map_or(0, Vec::len)),
            Parametrization::Scroll(d) => Some(2 + d.len()),
            Parametrization::VeroneseCone(n) => Some(3 + n - 5),
            Parametrization::Quadric(n) => Some(*n),
            Parametrization::Unknown => None,
        }
    }

    /// The real point of `X` (as coordinates in `R^{n+1}`) with the given
    /// parameters; for toric models every parameter must be nonzero.
    pub fn point_from_params(&self, t: &[f64]) -> Option<Vec<f64>> {
        if Some(t.len()) != self.param_count() {
            return None;
        }
        let p = match &self.param {
            Parametrization::Toric(exps) => exps
                .iter()
                .map(|a| a.iter().zip(t).map(|(&ai, &z)| z.powi(ai as i32)).product())
                .collect(),
            Parametrization::Scroll(d) => {
                let (s, u) = (t[0], t[1]);
                let mut out = Vec::new();
                for (i, &di) in d.iter().enumerate() {
                    for c in 0..=di {
                        out.push(t[2 + i] * s.powi((di - c) as i32) * u.powi(c as i32));
                    }
                }
                out
            }
            Parametrization::VeroneseCone(_) => {
                let (a, b, c) = (t[0], t[1], t[2]);
                let mut out = vec![a * a, a * b, a * c, b * b, b * c, c * c];
                out.extend_from_slice(&t[3..]);
                out
            }
            Parametrization::Quadric(_) => {
                let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
                let mut out: Vec<f64> = t.iter().map(|x| x / norm).collect();
                out.push(1.0);
                out
            }
            Parametrization::Unknown => return None,
        };
        Some(p)
    }

    /// A random real point of `X` with unit Euclidean norm, from Gaussian parameters.
    pub fn random_real_point<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        use rand_distr::{Distribution, StandardNormal};
        let count = self.param_count()?;
        loop {
            let t: Vec<f64> = (0..count).map(|_| StandardNormal.sample(rng)).collect();
            let p = self.point_from_params(&t)?;
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm.is_finite() && norm > 1e-12 {
                return Some(p.into_iter().map(|x| x / norm).collect());
            }
        }
    }

    // exact rank of the relation matrix
    fn relation_rank(&self) -> usize {
        match &self.r2 {
            // fibre binomials each introduce a fresh monomial
            R2Map::Toric { .. } => self.relations.len(),
            R2Map::Quotient { rank, .. } => *rank,
        }
    }

    /// Exact rank of the relations; equal to `i2_len` for a well-formed model.
    pub fn i2_rank(&self) -> usize {
        self.relation_rank()
    }
}

fn quotient_map(relations: &[Vec<(usize, Rational)>], total: usize) -> R2Map {
    if relations.is_empty() {
        return R2Map::Quotient {
            basis: (0..total).collect(),
            images: (0..total).map(|i| vec![(i, Rational::one())]).collect(),
            rank: 0,
        };
    }
    let mut m = RationalMatrix::zeros(relations.len(), total).expect("nonempty");
    for (r, rel) in relations.iter().enumerate() {
        for (idx, c) in rel {
            let v = m.get(r, *idx) + c;
            m.set(r, *idx, v);
        }
    }
    let rref = m.rref();
    let rank = rref.pivots.len();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; total];
        for &p in &rref.pivots {
            v[p] = true;
        }
        v
    };
    let basis: Vec<usize> = (0..total).filter(|&i| !is_pivot[i]).collect();
    let position: HashMap<usize, usize> = basis.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut images: Vec<Vec<(usize, Rational)>> = (0..total)
        .map(|i| position.get(&i).map(|&p| vec![(p, Rational::one())]).unwrap_or_default())
        .collect();
    for (row, &p) in rref.pivots.iter().enumerate() {
        images[p] = basis
            .iter()
            .enumerate()
            .filter_map(|(b, &c)| {
                let v = rref.matrix.get(row, c);
                (!v.is_zero()).then(|| (b, -v.clone()))
            })
            .collect();
    }
    R2Map::Quotient { basis, images, rank }
}

/// The toric model of `Q`: coordinates `Q ∩ M`, `R_2` spanned by the pairwise
/// sums and `I_2` spanned by binomials between monomials of equal degree.
pub fn toric_model(q: &LatticePolytope) -> VarietyModel {
    let pts = q.lattice_points(1);
    let k = pts.len();
    let mut fibres: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut idx = 0;
    for i in 0..k {
        for j in i..k {
            let s: Vec<i64> = pts[i].0.iter().zip(&pts[j].0).map(|(a, b)| a + b).collect();
            fibres.entry(s).or_default().push(idx);
            idx += 1;
        }
    }
    let mut sums: Vec<(Vec<i64>, Vec<usize>)> = fibres.into_iter().collect();
    sums.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut monomial_to_sum = vec![0u32; idx];
    let mut relations = Vec::with_capacity(idx - sums.len());
    for (s, (_, monos)) in sums.iter().enumerate() {
        for &p in monos {
            monomial_to_sum[p] = s as u32;
        }
        for &p in &monos[1..] {
            relations.push(Relation::Binomial { plus: monos[0], minus: p });
        }
    }
    let two_normal = sums.len() as u64 == q.count_lattice_points(2);
    let degree = two_normal.then(|| {
        use num_traits::ToPrimitive;
        normalized_volume(q).to_u64().expect("degree fits in u64")
    });
    let vertices: Vec<String> = q.vertices().iter().map(|v| v.to_string()).collect();
    let pairs = monomial_pairs(k);
    let representatives = sums.iter().map(|(_, monos)| pairs[monos[0]]).collect();
    let exponents = pts.iter().map(|p| p.0.clone()).collect();
    VarietyModel {
        name: format!("toric[{}]", vertices.join(",")),
        n: k - 1,
        m: q.dim(),
        r1_basis: pts.into_iter().map(|p| Coordinate::Exponent(p.0)).collect(),
        relations,
        r2: R2Map::Toric {
            sums: sums.into_iter().map(|(s, _)| LatticePoint(s)).collect(),
            monomial_to_sum,
        },
        representatives,
        param: Parametrization::Toric(exponents),
        degree,
    }
}

/// `ν_d(P^n)`, the toric model of `d Δ_n`.
pub fn veronese_model(n: usize, d: usize) -> Result<VarietyModel, VarietyError> {
    if n < 1 || d < 1 {
        return Err(VarietyError::InvalidArgument("Veronese needs n >= 1 and d >= 1".into()));
    }
    let mut model = toric_model(&LatticePolytope::dilated_simplex(n, d as i64));
    model.name = format!("veronese({n},{d})");
    Ok(model)
}

/// Segre-Veronese embedding of `P^{n_1} x ... x P^{n_k}` by `O(d_1, ..., d_k)`.
pub fn segre_veronese_model(dims: &[usize], degrees: &[usize]) -> Result<VarietyModel, VarietyError> {
    if dims.len() != degrees.len() || dims.len() < 2 {
        return Err(VarietyError::InvalidArgument(
            "Segre-Veronese needs two or more factors and matching lengths".into(),
        ));
    }
    if dims.iter().chain(degrees).any(|&x| x < 1) {
        return Err(VarietyError::InvalidArgument("dimensions and degrees must be positive".into()));
    }
    let factors: Vec<LatticePolytope> = dims
        .iter()
        .zip(degrees)
        .map(|(&n, &d)| LatticePolytope::dilated_simplex(n, d as i64))
        .collect();
    let mut model = toric_model(&LatticePolytope::product(&factors));
    model.name = format!("segre_veronese({dims:?},{degrees:?})");
    Ok(model)
}

fn symbols(prefix: &str, count: usize) -> Vec<Coordinate> {
    (0..count).map(|i| Coordinate::Symbol(format!("{prefix}{i}"))).collect()
}

// keeps a maximal linearly independent subfamily, in order
fn independent_subset(candidates: Vec<Vec<(usize, Rational)>>, total: usize) -> Vec<Vec<(usize, Rational)>> {
    let mut kept: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut dense: Vec<Vec<Rational>> = Vec::new();
    for c in candidates {
        let mut row = vec![Rational::zero(); total];
        for (i, v) in &c {
            row[*i] += v;
        }
        dense.push(row);
        if rank_of_vectors(&dense) == dense.len() {
            kept.push(c);
        } else {
            dense.pop();
        }
    }
    kept
}

// x_a x_b - x_c x_d as monomial coefficients
fn minor(a: usize, b: usize, c: usize, d: usize, k: usize) -> Vec<(usize, Rational)> {
    let mut acc: HashMap<usize, Rational> = HashMap::new();
    *acc.entry(monomial_index(a, b, k)).or_insert_with(Rational::zero) += Rational::one();
    *acc.entry(monomial_index(c, d, k)).or_insert_with(Rational::zero) -= Rational::one();
    let mut v: Vec<(usize, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by_key(|(i, _)| *i);
    v
}

/// The cone over the Veronese surface in `P^n` (`n >= 5`): the 2x2 minors of
/// the symmetric matrix in `x_0, ..., x_5`, with `x_6, ..., x_n` free.
pub fn veronese_cone_model(n: usize) -> Result<VarietyModel, VarietyError> {
    if n < 5 {
        return Err(VarietyError::InvalidArgument("the Veronese cone needs n >= 5".into()));
    }
    let k = n + 1;
    let s = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
    let mut candidates = Vec::new();
    for (r1, r2) in [(0, 1), (0, 2), (1, 2)] {
        for (c1, c2) in [(0, 1), (0, 2), (1, 2)] {
            let rel = minor(s[r1][c1], s[r2][c2], s[r1][c2], s[r2][c1], k);
            if !rel.is_empty() {
                candidates.push(rel);
            }
        }
    }
    let relations = independent_subset(candidates, k * (k + 1) / 2);
    let name = if n == 5 { "veronese_surface".to_string() } else { format!("veronese_cone({n})") };
    let mut model = VarietyModel::from_relations(name, n, n - 3, symbols("x", k), relations, Some(4))?;
    model.param = Parametrization::VeroneseCone(n);
    Ok(model)
}

/// Rational normal scroll `S(d_0, ..., d_k)`: the 2x2 minors of the block
/// Hankel matrix with blocks `[[y_{i,0} .. y_{i,d_i-1}], [y_{i,1} .. y_{i,d_i}]]`.
pub fn scroll_model(d: &[usize]) -> Result<VarietyModel, VarietyError> {
    if d.is_empty() || d.windows(2).any(|w| w[0] > w[1]) || *d.last().expect("nonempty") == 0 {
        return Err(VarietyError::InvalidArgument(
            "scroll degrees must be sorted ascending with a positive last entry".into(),
        ));
    }
    let mut labels = Vec::new();
    let mut columns = Vec::new();
    let mut offset = 0;
    for (i, &di) in d.iter().enumerate() {
        for c in 0..=di {
            labels.push(Coordinate::Symbol(format!("y{i}_{c}")));
        }
        for c in 0..di {
            columns.push((offset + c, offset + c + 1));
        }
        offset += di + 1;
    }
    let k = offset;
    let mut candidates = Vec::new();
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            let (ta, ba) = columns[a];
            let (tb, bb) = columns[b];
            let rel = minor(ta, bb, tb, ba, k);
            if !rel.is_empty() {
                candidates.push(rel);
            }
        }
    }
    let relations = independent_subset(candidates, k * (k + 1) / 2);
    let degree: usize = d.iter().sum();
    let mut model = VarietyModel::from_relations(format!("scroll{d:?}"), k - 1, d.len(), labels, relations, Some(degree as u64))?;
    model.param = Parametrization::Scroll(d.to_vec());
    Ok(model)
}

/// The smooth quadric `x_0^2 + ... + x_{n-1}^2 - x_n^2 = 0` in `P^n`.
pub fn quadric_model(n: usize) -> Result<VarietyModel, VarietyError> {
    if n < 2 {
        return Err(VarietyError::InvalidArgument("a quadric hypersurface needs n >= 2".into()));
    }
    let k = n + 1;
    let mut rel: Vec<(usize, Rational)> = (0..n).map(|i| (monomial_index(i, i, k), Rational::one())).collect();
    rel.push((monomial_index(n, n, k), -Rational::one()));
    let mut model = VarietyModel::from_relations(format!("quadric({n})"), n, n - 1, symbols("x", k), vec![rel], Some(2))?;
    model.param = Parametrization::Quadric(n);
    Ok(model)
}

/// A hypersurface of degree `d >= 3` in `P^n`: no quadric vanishes on it, so
/// `R_2` is the full space of quadrics. No real points are parametrized.
pub fn hypersurface_model(n: usize, d: u64) -> Result<VarietyModel, VarietyError> {
    if n < 2 {
        return Err(VarietyError::InvalidArgument("a hypersurface model needs n >= 2".into()));
    }
    match d {
        0 | 1 => Err(VarietyError::InvalidArgument("a nondegenerate hypersurface has degree >= 2".into())),
        2 => quadric_model(n),
        _ => VarietyModel::from_relations(format!("hypersurface({n},{d})"), n, n - 1, symbols("x", n + 1), Vec::new(), Some(d)),
    }
}

/// `ε(X) = C(e+1, 2) - dim I_2`, cross-checked against
/// `dim R_2 - (m+1)(n+1) + C(m+1, 2)`.
pub fn epsilon(model: &VarietyModel) -> Result<usize, VarietyError> {
    let (n, m, e) = (model.n as i128, model.m as i128, model.e() as i128);
    let i2 = model.i2_len() as i128;
    let first = e * (e + 1) / 2 - i2;
    let second = model.dim_r2() as i128 - (m + 1) * (n + 1) + m * (m + 1) / 2;
    if model.i2_rank() != model.i2_len() {
        return Err(VarietyError::InconsistentModel(format!(
            "{} relations of rank {}",
            model.i2_len(),
            model.i2_rank()
        )));
    }
    if first != second {
        return Err(VarietyError::InconsistentModel(format!(
            "deficiency formulas disagree: {first} vs {second}"
        )));
    }
    if first < 0 {
        return Err(VarietyError::InconsistentModel(format!("negative deficiency {first}")));
    }
    Ok(first as usize)
}

/// `deg X = 1 + codim X`, equivalently `ε(X) = 0`.
pub fn is_minimal_degree(model: &VarietyModel) -> Result<bool, VarietyError> {
    Ok(epsilon(model)? == 0)
}

/// `dQ`, whose toric model carries the forms of degree `2d` on the model of `Q`.
pub fn veronese_reembedding(q: &LatticePolytope, d: usize) -> Result<LatticePolytope, VarietyError> {
    if d < 1 {
        return Err(VarietyError::InvalidArgument("re-embedding degree must be positive".into()));
    }
    Ok(q.dilate(d as i64)?)
}
