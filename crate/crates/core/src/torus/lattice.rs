//! The integer lattice side of the torus: multi-indices, symmetric frequency
//! boxes and tables indexed by rectangular lattice regions.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A multi-index `α = (α_1, …, α_n)` of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// The canonical unit multi-index `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// `|α| = Σ α_j`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// All `γ` with `γ ≤ α` componentwise, in row-major order.
    pub fn below(&self) -> Vec<MultiIndex> {
        let shape: Vec<usize> = self.0.iter().map(|&a| a + 1).collect();
        let count: usize = shape.iter().product();
        (0..count)
            .map(|i| MultiIndex(unravel(i, &shape)))
            .collect()
    }

    /// `Π_j C(α_j, γ_j)`.
    pub fn binomial(&self, gamma: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&gamma.0)
            .map(|(&a, &g)| binomial(a, g))
            .product()
    }

    /// Every multi-index of dimension `dim` with `|α| ≤ max_order`, ordered by
    /// total order and then lexicographically.
    pub fn up_to_order(dim: usize, max_order: usize) -> Vec<MultiIndex> {
        let shape = vec![max_order + 1; dim];
        let count: usize = shape.iter().product();
        let mut all: Vec<MultiIndex> = (0..count)
            .map(|i| MultiIndex(unravel(i, &shape)))
            .filter(|a| a.order() <= max_order)
            .collect();
        all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.0.cmp(&b.0)));
        all
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Row-major unravel of a flat index (axis 0 varies slowest).
pub(crate) fn unravel(mut idx: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for axis in (0..shape.len()).rev() {
        out[axis] = idx % shape[axis];
        idx /= shape[axis];
    }
    out
}

pub(crate) fn ravel(coords: &[usize], shape: &[usize]) -> usize {
    coords
        .iter()
        .zip(shape)
        .fold(0, |acc, (&c, &s)| acc * s + c)
}

/// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`.
pub fn japanese_bracket(xi: &[i64]) -> f64 {
    let sq: f64 = xi.iter().map(|&v| (v * v) as f64).sum();
    (1.0 + sq).sqrt()
}

/// The symmetric frequency box `{ξ ∈ Z^n : |ξ_j| ≤ N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    dim: usize,
    radius: usize,
}

impl LatticeBox {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("lattice dimension must be ≥ 1".into()));
        }
        if radius == 0 {
            return Err(Error::BoxTooSmall("radius must be ≥ 1".into()));
        }
        Ok(Self { dim, radius })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Points per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> Vec<i64> {
        vec![-(self.radius as i64); self.dim]
    }

    pub fn hi(&self) -> Vec<i64> {
        vec![self.radius as i64; self.dim]
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.len() == self.dim && xi.iter().all(|v| v.unsigned_abs() as usize <= self.radius)
    }

    pub fn point(&self, idx: usize) -> Vec<i64> {
        let n = self.radius as i64;
        unravel(idx, &vec![self.side(); self.dim])
            .into_iter()
            .map(|c| c as i64 - n)
            .collect()
    }

    pub fn index_of(&self, xi: &[i64]) -> Option<usize> {
        if !self.contains(xi) {
            return None;
        }
        let n = self.radius as i64;
        let coords: Vec<usize> = xi.iter().map(|&v| (v + n) as usize).collect();
        Some(ravel(&coords, &vec![self.side(); self.dim]))
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Complex values over a rectangular lattice region `lo ≤ ξ ≤ hi`.
///
/// Difference operators shrink the region instead of wrapping, so a table
/// always knows exactly which frequencies it is valid on.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeTable {
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: Vec<Complex64>,
}

impl LatticeTable {
    pub fn from_fn(lo: Vec<i64>, hi: Vec<i64>, mut f: impl FnMut(&[i64]) -> Complex64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::BoxTooSmall(format!("empty region {lo:?}..={hi:?}")));
        }
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let count: usize = shape.iter().product();
        let mut point = lo.clone();
        let values = (0..count)
            .map(|i| {
                for (axis, c) in unravel(i, &shape).into_iter().enumerate() {
                    point[axis] = lo[axis] + c as i64;
                }
                f(&point)
            })
            .collect();
        Ok(Self { lo, hi, values })
    }

    pub fn zeros(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        Self::from_fn(lo, hi, |_| Complex64::new(0.0, 0.0))
    }

    pub fn over_box(b: &LatticeBox, f: impl FnMut(&[i64]) -> Complex64) -> Self {
        Self::from_fn(b.lo(), b.hi(), f).expect("lattice boxes are non-empty")
    }

    pub fn from_values(lo: Vec<i64>, hi: Vec<i64>, values: Vec<Complex64>) -> Result<Self> {
        let t = Self::zeros(lo, hi)?;
        if t.values.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: t.values.len(),
                found: values.len(),
            });
        }
        Ok(Self { values, ..t })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as usize)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.len() == self.dim() && xi.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| l <= v && v <= h)
    }

    pub fn index_of(&self, xi: &[i64]) -> Option<usize> {
        if !self.contains(xi) {
            return None;
        }
        let coords: Vec<usize> = xi.iter().zip(&self.lo).map(|(v, l)| (v - l) as usize).collect();
        Some(ravel(&coords, &self.shape()))
    }

    pub fn get(&self, xi: &[i64]) -> Option<Complex64> {
        self.index_of(xi).map(|i| self.values[i])
    }

    pub fn point(&self, idx: usize) -> Vec<i64> {
        unravel(idx, &self.shape())
            .into_iter()
            .zip(&self.lo)
            .map(|(c, l)| l + c as i64)
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Largest pointwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise discrepancy against a table over the same region.
    pub fn max_abs_diff(&self, other: &LatticeTable) -> Result<f64> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::BoxTooSmall(format!(
                "region mismatch {:?}..={:?} vs {:?}..={:?}",
                self.lo, self.hi, other.lo, other.hi
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Restriction to a sub-region.
    pub fn restrict(&self, lo: &[i64], hi: &[i64]) -> Result<LatticeTable> {
        if !self.contains(lo) || !self.contains(hi) {
            return Err(Error::BoxTooSmall(format!(
                "{lo:?}..={hi:?} not inside {:?}..={:?}",
                self.lo, self.hi
            )));
        }
        LatticeTable::from_fn(lo.to_vec(), hi.to_vec(), |xi| self.get(xi).unwrap())
    }
}

/// Fourier coefficients `f̂(ξ)` over a symmetric lattice box.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    lattice: LatticeBox,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(lattice: LatticeBox, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: lattice.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { lattice, coeffs })
    }

    pub fn from_fn(lattice: LatticeBox, f: impl FnMut(&[i64]) -> Complex64) -> Self {
        let t = LatticeTable::over_box(&lattice, f);
        Self {
            lattice,
            coeffs: t.values,
        }
    }

    pub fn zeros(lattice: LatticeBox) -> Self {
        Self::from_fn(lattice, |_| Complex64::new(0.0, 0.0))
    }

    /// Point mass at `xi`.
    pub fn indicator(lattice: LatticeBox, xi: &[i64]) -> Result<Self> {
        if !lattice.contains(xi) {
            return Err(Error::BoxTooSmall(format!("{xi:?} outside radius {}", lattice.radius())));
        }
        Ok(Self::from_fn(lattice, |p| {
            if p == xi {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, xi: &[i64]) -> Option<Complex64> {
        self.lattice.index_of(xi).map(|i| self.coeffs[i])
    }

    pub fn to_table(&self) -> LatticeTable {
        LatticeTable {
            lo: self.lattice.lo(),
            hi: self.lattice.hi(),
            values: self.coeffs.clone(),
        }
    }

    pub fn from_table(table: &LatticeTable) -> Result<Self> {
        let radius = table.hi.first().copied().unwrap_or(0);
        let symmetric = radius > 0
            && table.lo.iter().all(|&l| l == -radius)
            && table.hi.iter().all(|&h| h == radius);
        if !symmetric {
            return Err(Error::BoxTooSmall("table region is not a symmetric box".into()));
        }
        Self::new(
            LatticeBox::new(table.dim(), radius as usize)?,
            table.values.clone(),
        )
    }

    /// `Σ_ξ |f̂(ξ)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
