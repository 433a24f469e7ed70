use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{
    alias_free_radius, japanese_bracket, multi_diff, DiffKind, GridDft, LatticeBox, LatticeTable, MultiIndex,
    SpectralDerivative, TorusGrid,
};

/// Declared Hörmander order `(m, ρ, δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolOrder {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
}

impl SymbolOrder {
    pub fn new(m: f64, rho: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("rho", rho), ("delta", delta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    name: if name == "rho" { "rho" } else { "delta" },
                    value: v,
                    range: "[0, 1]",
                });
            }
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { m, rho, delta })
    }

    /// `m − ρ|α| + δ|β|`.
    pub fn weight_exponent(&self, alpha: &MultiIndex, beta: &MultiIndex) -> f64 {
        self.m - self.rho * alpha.order() as f64 + self.delta * beta.order() as f64
    }
}

/// Dense table `a(x, ξ)` over a grid × lattice box, stored x-major.
///
/// The declared order is a claim; [`symbol_seminorm`] measures it.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    grid: TorusGrid,
    lattice: LatticeBox,
    values: Vec<Complex64>,
    order: SymbolOrder,
}

impl Symbol {
    pub fn new(grid: TorusGrid, lattice: LatticeBox, order: SymbolOrder, values: Vec<Complex64>) -> Result<Self> {
        if grid.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: lattice.dim(),
            });
        }
        if values.len() != grid.len() * lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * lattice.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            grid,
            lattice,
            values,
            order,
        })
    }

    pub fn from_fn(
        grid: TorusGrid,
        lattice: LatticeBox,
        order: SymbolOrder,
        mut f: impl FnMut(&[f64], &[i64]) -> Complex64,
    ) -> Result<Self> {
        let xis: Vec<Vec<i64>> = lattice.points().collect();
        let mut values = Vec::with_capacity(grid.len() * lattice.len());
        for i in 0..grid.len() {
            let x = grid.point(i);
            for xi in &xis {
                values.push(f(&x, xi));
            }
        }
        Self::new(grid, lattice, order, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn order(&self) -> SymbolOrder {
        self.order
    }

    pub fn with_order(mut self, order: SymbolOrder) -> Self {
        self.order = order;
        self
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x_idx: usize, xi_idx: usize) -> Complex64 {
        self.values[x_idx * self.lattice.len() + xi_idx]
    }

    /// The function `ξ ↦ a(x, ξ)` at one grid sample, as a lattice table.
    pub fn xi_slice(&self, x_idx: usize) -> LatticeTable {
        let l = self.lattice.len();
        LatticeTable::from_values(
            self.lattice.lo(),
            self.lattice.hi(),
            self.values[x_idx * l..(x_idx + 1) * l].to_vec(),
        )
        .unwrap()
    }

    /// The function `x ↦ a(x, ξ)` for box index `xi_idx`.
    pub fn x_slice(&self, xi_idx: usize) -> Vec<Complex64> {
        let l = self.lattice.len();
        (0..self.grid.len()).map(|x| self.values[x * l + xi_idx]).collect()
    }

    /// Maximum over grid samples of `|a(x, ξ)|` in the tail `|ξ|_∞ > radius`.
    pub fn tail_max_abs(&self, radius: usize) -> f64 {
        let l = self.lattice.len();
        let mut worst = 0.0f64;
        for (j, xi) in self.lattice.points().enumerate() {
            if xi.iter().any(|v| v.unsigned_abs() as usize > radius) {
                for x in 0..self.grid.len() {
                    worst = worst.max(self.values[x * l + j].norm());
                }
            }
        }
        worst
    }
}

/// All x-Fourier coefficients `â(η, ξ)` for `η` in the alias-free box, η-major.
#[derive(Clone, Debug)]
pub struct XSpectrum {
    eta_box: LatticeBox,
    lattice: LatticeBox,
    coeffs: Vec<Complex64>,
    /// Max-norm defect of reconstructing `a` from the alias-free coefficients.
    pub aliasing_residual: f64,
}

impl XSpectrum {
    pub fn eta_box(&self) -> &LatticeBox {
        &self.eta_box
    }

    /// `ξ ↦ â(η, ξ)` for one `η`.
    pub fn coeff_table(&self, eta: &[i64]) -> Option<LatticeTable> {
        let e = self.eta_box.index_of(eta)?;
        let l = self.lattice.len();
        Some(
            LatticeTable::from_values(self.lattice.lo(), self.lattice.hi(), self.coeffs[e * l..(e + 1) * l].to_vec())
                .unwrap(),
        )
    }

    pub fn etas(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.eta_box.points()
    }
}

/// Computes every alias-free x-coefficient of a symbol at once.
pub fn x_spectrum(a: &Symbol) -> Result<XSpectrum> {
    let grid = a.grid;
    let eta_box = LatticeBox::new(grid.dim(), alias_free_radius(grid.samples_per_axis()).max(1))?;
    let dft = GridDft::new(grid, eta_box)?;
    let l = a.lattice.len();
    let e_len = eta_box.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); e_len * l];
    let mut residual = 0.0f64;
    for j in 0..l {
        let slice = a.x_slice(j);
        let c = dft.forward_values(&slice);
        let back = dft.inverse_values(&c);
        for (u, v) in slice.iter().zip(&back) {
            residual = residual.max((u - v).norm());
        }
        for (e, v) in c.into_iter().enumerate() {
            coeffs[e * l + j] = v;
        }
    }
    Ok(XSpectrum {
        eta_box,
        lattice: a.lattice,
        coeffs,
        aliasing_residual: residual,
    })
}

/// `â(η, ξ) = M^{-n} Σ_x e^{−2πi x·η} a(x, ξ)` for a single alias-free `η`.
pub fn x_fourier_coeff(a: &Symbol, eta: &[i64]) -> Result<LatticeTable> {
    let grid = a.grid;
    if eta.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: eta.len(),
        });
    }
    let m = grid.samples_per_axis() as i64;
    if eta.iter().any(|&e| 2 * e.abs() >= m) {
        return Err(Error::AliasedFrequency(eta.to_vec()));
    }
    let chars: Vec<Complex64> = (0..grid.len())
        .map(|x| {
            let turns = grid
                .coords(x)
                .iter()
                .zip(eta)
                .map(|(&k, &e)| k as i64 * e)
                .sum::<i64>()
                .rem_euclid(m);
            Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * turns as f64 / m as f64)
        })
        .collect();
    let l = a.lattice.len();
    let scale = grid.cell_measure();
    let values = (0..l)
        .map(|j| {
            chars
                .iter()
                .enumerate()
                .map(|(x, c)| c * a.values[x * l + j])
                .sum::<Complex64>()
                * scale
        })
        .collect();
    LatticeTable::from_values(a.lattice.lo(), a.lattice.hi(), values)
}

/// Relative size below which x-modes of a symbol slice count as transform roundoff.
pub const X_MODE_NOISE: f64 = 1e-13;

/// `∂_x^β a` computed slice by slice in `ξ` by spectral differentiation.
///
/// Modes below [`X_MODE_NOISE`] of the largest mode in their slice are dropped,
/// so symbols independent of `x` have derivative exactly zero.
pub fn spectral_x_derivative(a: &Symbol, beta: &MultiIndex) -> Result<Symbol> {
    if beta.is_zero() {
        return Ok(a.clone());
    }
    let d = SpectralDerivative::new(a.grid, beta)?;
    let l = a.lattice.len();
    let mut values = vec![Complex64::new(0.0, 0.0); a.values.len()];
    for j in 0..l {
        for (x, v) in d.apply_values_filtered(&a.x_slice(j), X_MODE_NOISE).into_iter().enumerate() {
            values[x * l + j] = v;
        }
    }
    Symbol::new(a.grid, a.lattice, a.order, values)
}

/// Empirical `C_{α,β}`: the max over sampled `(x, ξ)` of
/// `|Δ_ξ^α ∂_x^β a(x,ξ)| ⟨ξ⟩^{−(m−ρ|α|+δ|β|)}`. A lower bound on the true constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub value: f64,
    pub argmax_x: Vec<f64>,
    pub argmax_xi: Vec<i64>,
}

pub fn symbol_seminorm(a: &Symbol, alpha: &MultiIndex, beta: &MultiIndex) -> Result<SeminormEstimate> {
    seminorm_with_exponent(a, alpha, beta, a.order.weight_exponent(alpha, beta))
}

/// As [`symbol_seminorm`] with the `δ|β|` gain removed from the weight, the
/// form of the hypothesis for the unweighted variable-exponent result.
pub fn symbol_seminorm_delta_free(a: &Symbol, alpha: &MultiIndex, beta: &MultiIndex) -> Result<SeminormEstimate> {
    seminorm_with_exponent(a, alpha, beta, a.order.m - a.order.rho * alpha.order() as f64)
}

fn seminorm_with_exponent(a: &Symbol, alpha: &MultiIndex, beta: &MultiIndex, exponent: f64) -> Result<SeminormEstimate> {
    if alpha.dim() != a.grid.dim() || beta.dim() != a.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.grid.dim(),
            found: alpha.dim().max(beta.dim()),
        });
    }
    let derived = spectral_x_derivative(a, beta)?;
    let mut best = SeminormEstimate {
        alpha: alpha.entries().to_vec(),
        beta: beta.entries().to_vec(),
        value: 0.0,
        argmax_x: a.grid.point(0),
        argmax_xi: vec![0; a.grid.dim()],
    };
    let mut weights: Option<Vec<f64>> = None;
    for x in 0..a.grid.len() {
        let d = multi_diff(&derived.xi_slice(x), alpha, DiffKind::Forward)?;
        let w = weights.get_or_insert_with(|| {
            d.points().map(|xi| japanese_bracket(&xi).powf(-exponent)).collect()
        });
        for (i, (v, wi)) in d.values().iter().zip(w.iter()).enumerate() {
            let val = v.norm() * wi;
            if val > best.value {
                best.value = val;
                best.argmax_x = a.grid.point(x);
                best.argmax_xi = d.point(i);
            }
        }
    }
    Ok(best)
}

/// `max_{η,ξ} |Δ_ξ^α â(η,ξ)| ⟨η⟩^r ⟨ξ⟩^{−(m−ρ|α|+rδ)}` over alias-free `η`.
pub fn coeff_decay_constant(a: &Symbol, alpha: &MultiIndex, r: u32) -> Result<f64> {
    if alpha.dim() != a.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.grid.dim(),
            found: alpha.dim(),
        });
    }
    let spectrum = x_spectrum(a)?;
    let o = a.order;
    let exponent = o.m - o.rho * alpha.order() as f64 + r as f64 * o.delta;
    let mut worst = 0.0f64;
    let mut weights: Option<Vec<f64>> = None;
    for eta in spectrum.etas() {
        let table = spectrum.coeff_table(&eta).unwrap();
        let d = multi_diff(&table, alpha, DiffKind::Forward)?;
        let w = weights.get_or_insert_with(|| d.points().map(|xi| japanese_bracket(&xi).powf(-exponent)).collect());
        let eta_w = japanese_bracket(&eta).powi(r as i32);
        for (v, wi) in d.values().iter().zip(w.iter()) {
            worst = worst.max(v.norm() * eta_w * wi);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn order(m: f64) -> SymbolOrder {
        SymbolOrder::new(m, 1.0, 0.0).unwrap()
    }

    fn bracket_symbol(grid: TorusGrid, lattice: LatticeBox, m: f64) -> Symbol {
        Symbol::from_fn(grid, lattice, order(m), |_, xi| Complex64::new(japanese_bracket(xi).powf(m), 0.0)).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(SymbolOrder::new(0.0, 1.5, 0.0).is_err());
        assert!(SymbolOrder::new(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn x_independent_coefficients() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let lattice = LatticeBox::new(1, 4).unwrap();
        let a = bracket_symbol(grid, lattice, -1.0);
        let zero = x_fourier_coeff(&a, &[0]).unwrap();
        assert!(zero.max_abs_diff(&a.xi_slice(0)).unwrap() < 1e-15);
        for eta in [-7i64, -1, 3, 7] {
            assert!(x_fourier_coeff(&a, &[eta]).unwrap().max_abs() < 1e-15);
        }
        assert_eq!(x_fourier_coeff(&a, &[8]), Err(Error::AliasedFrequency(vec![8])));
    }

    #[test]
    fn modulated_symbol_has_single_coefficient() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let lattice = LatticeBox::new(2, 2).unwrap();
        let g = |xi: &[i64]| Complex64::new(xi[0] as f64, 1.0 + xi[1] as f64);
        let a = Symbol::from_fn(grid, lattice, order(1.0), |x, xi| Complex64::from_polar(1.0, 2.0 * PI * x[0]) * g(xi)).unwrap();
        let one = x_fourier_coeff(&a, &[1, 0]).unwrap();
        let expected = LatticeTable::over_box(&lattice, g);
        assert!(one.max_abs_diff(&expected).unwrap() < 1e-14);
        assert!(x_fourier_coeff(&a, &[0, 0]).unwrap().max_abs() < 1e-14);
        assert!(x_fourier_coeff(&a, &[1, 1]).unwrap().max_abs() < 1e-14);
        let spec = x_spectrum(&a).unwrap();
        assert!(spec.coeff_table(&[1, 0]).unwrap().max_abs_diff(&expected).unwrap() < 1e-14);
        assert!(spec.aliasing_residual < 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let lattice = LatticeBox::new(1, 3).unwrap();
        let flat = bracket_symbol(grid, lattice, 2.0);
        let d = spectral_x_derivative(&flat, &MultiIndex::new(vec![1])).unwrap();
        assert!(d.values().iter().all(|v| v.norm() < 1e-12));
        let e = Symbol::from_fn(grid, lattice, order(0.0), |x, _| Complex64::from_polar(1.0, 2.0 * PI * x[0])).unwrap();
        let de = spectral_x_derivative(&e, &MultiIndex::new(vec![1])).unwrap();
        for (u, v) in de.values().iter().zip(e.values()) {
            assert!((u - v * Complex64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        }
    }

    #[test]
    fn seminorm_examples() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let lattice = LatticeBox::new(1, 10).unwrap();
        let zero = MultiIndex::new(vec![0]);
        let one = MultiIndex::new(vec![1]);
        let a = bracket_symbol(grid, lattice, -1.5);
        let s = symbol_seminorm(&a, &zero, &zero).unwrap();
        assert!((s.value - 1.0).abs() < 1e-14);
        let constant = Symbol::from_fn(grid, lattice, order(0.0), |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(symbol_seminorm(&constant, &zero, &one).unwrap().value < 1e-12);
        assert!(symbol_seminorm(&constant, &MultiIndex::new(vec![21]), &zero).is_err());
    }

    #[test]
    fn first_difference_seminorm_matches_enumeration() {
        let grid = TorusGrid::new(1, 4).unwrap();
        let lattice = LatticeBox::new(1, 12).unwrap();
        let m = -2.0;
        let a = bracket_symbol(grid, lattice, m);
        let s = symbol_seminorm(&a, &MultiIndex::new(vec![1]), &MultiIndex::new(vec![0])).unwrap();
        let br = |v: i64| (1.0 + (v * v) as f64).sqrt();
        let brute = (-12..12)
            .map(|xi| (br(xi + 1).powf(m) - br(xi).powf(m)).abs() * br(xi).powf(-m + 1.0))
            .fold(0.0, f64::max);
        assert!((s.value - brute).abs() < 1e-14);
    }

    #[test]
    fn decay_constant_examples() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let lattice = LatticeBox::new(1, 6).unwrap();
        let a = bracket_symbol(grid, lattice, -2.0);
        let alpha = MultiIndex::new(vec![1]);
        let c = coeff_decay_constant(&a, &alpha, 2).unwrap();
        let s = symbol_seminorm(&a, &alpha, &MultiIndex::new(vec![0])).unwrap().value;
        assert!((c - s).abs() < 1e-12 * s.max(1.0));
        let m = -1.0;
        let e = Symbol::from_fn(grid, lattice, order(m), |x, xi| {
            Complex64::from_polar(japanese_bracket(xi).powf(m), 2.0 * PI * x[0])
        })
        .unwrap();
        let c0 = coeff_decay_constant(&e, &MultiIndex::new(vec![0]), 0).unwrap();
        assert!((c0 - 1.0).abs() < 1e-13);
    }
}
