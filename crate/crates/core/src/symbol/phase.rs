//! Phase functions `φ(x, ξ)`.
//!
//! A phase is stored as the linear part `x·ξ` plus a remainder, so that the
//! oscillation `e^{2πiφ}` can be evaluated with the linear part reduced
//! exactly modulo 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{LatticeBox, MultiIndex, SpectralDerivative, TorusGrid};

/// Built-in degree-one (or, for `Square`, deliberately not) maps on the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiKind {
    /// `ψ ≡ 0`.
    Zero,
    /// Euclidean norm `|ξ|`.
    Norm,
    /// `Σ_j |ξ_j|`.
    L1,
    /// `max_j |ξ_j|`.
    Max,
    /// `|ξ|²`, not homogeneous of degree one.
    Square,
}

impl PsiKind {
    pub fn eval(self, xi: &[i64]) -> f64 {
        match self {
            PsiKind::Zero => 0.0,
            PsiKind::Norm => (xi.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt(),
            PsiKind::L1 => xi.iter().map(|v| v.abs() as f64).sum(),
            PsiKind::Max => xi.iter().map(|v| v.abs()).max().unwrap_or(0) as f64,
            PsiKind::Square => xi.iter().map(|&v| (v * v) as f64).sum(),
        }
    }
}

/// Real values `ψ(ξ)` over a lattice box. `ψ(0)` is always stored as 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiTable {
    lattice: LatticeBox,
    values: Vec<f64>,
}

impl PsiTable {
    pub fn from_fn(lattice: LatticeBox, mut f: impl FnMut(&[i64]) -> f64) -> Self {
        let values = lattice
            .points()
            .map(|xi| if xi.iter().all(|&v| v == 0) { 0.0 } else { f(&xi) })
            .collect();
        Self { lattice, values }
    }

    pub fn from_kind(lattice: LatticeBox, kind: PsiKind) -> Self {
        Self::from_fn(lattice, |xi| kind.eval(xi))
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, xi: &[i64]) -> Option<f64> {
        self.lattice.index_of(xi).map(|i| self.values[i])
    }
}

/// `max |ψ(tξ₀) − tψ(ξ₀)|` over lattice rays `tξ₀`, `t ≥ 2`, `ξ₀ ≠ 0`, inside the box.
pub fn homogeneity_residual(psi: &PsiTable) -> Result<f64> {
    let lattice = psi.lattice();
    let mut worst: Option<f64> = None;
    for base in lattice.points() {
        if base.iter().all(|&v| v == 0) {
            continue;
        }
        let base_value = psi.get(&base).unwrap();
        for t in 2i64.. {
            let ray: Vec<i64> = base.iter().map(|v| v * t).collect();
            let Some(value) = psi.get(&ray) else { break };
            let r = (value - t as f64 * base_value).abs();
            worst = Some(worst.map_or(r, |w| w.max(r)));
        }
    }
    worst.ok_or_else(|| Error::EmptyTestSet(format!("no lattice rays in radius {}", lattice.radius())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    Linear,
    LinearPlusPsi,
    General,
}

/// `φ(x, ξ) = x·ξ + r(x, ξ)` on a grid × box, where the remainder `r` is zero
/// (`Linear`), `ψ(ξ)` (`LinearPlusPsi`) or a tabulated 1-periodic function of
/// `x` (`General`).
#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    grid: TorusGrid,
    lattice: LatticeBox,
    kind: PhaseKind,
    psi: Option<PsiTable>,
    // x-major: remainder[x * |box| + ξ]
    remainder: Option<Vec<f64>>,
}

impl Phase {
    pub fn linear(grid: TorusGrid, lattice: LatticeBox) -> Result<Self> {
        check_dims(&grid, &lattice)?;
        Ok(Self {
            grid,
            lattice,
            kind: PhaseKind::Linear,
            psi: None,
            remainder: None,
        })
    }

    pub fn linear_plus_psi(grid: TorusGrid, psi: PsiTable) -> Result<Self> {
        let lattice = *psi.lattice();
        check_dims(&grid, &lattice)?;
        Ok(Self {
            grid,
            lattice,
            kind: PhaseKind::LinearPlusPsi,
            psi: Some(psi),
            remainder: None,
        })
    }

    /// General phase from its remainder `r(x, ξ) = φ(x, ξ) − x·ξ`, which must be
    /// 1-periodic in `x` for `e^{2πiφ(·,ξ)}` to be 1-periodic.
    pub fn general_from_remainder(
        grid: TorusGrid,
        lattice: LatticeBox,
        mut remainder: impl FnMut(&[f64], &[i64]) -> f64,
    ) -> Result<Self> {
        check_dims(&grid, &lattice)?;
        let xis: Vec<Vec<i64>> = lattice.points().collect();
        let mut values = Vec::with_capacity(grid.len() * lattice.len());
        for xi_x in 0..grid.len() {
            let x = grid.point(xi_x);
            for xi in &xis {
                values.push(remainder(&x, xi));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            grid,
            lattice,
            kind: PhaseKind::General,
            psi: None,
            remainder: Some(values),
        })
    }

    /// General phase from a full table `φ(x, ξ)` (x-major).
    pub fn general_from_table(grid: TorusGrid, lattice: LatticeBox, table: &[f64]) -> Result<Self> {
        if table.len() != grid.len() * lattice.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * lattice.len(),
                found: table.len(),
            });
        }
        let l = lattice.len();
        let mut x_idx = 0;
        let mut xi_idx = 0;
        let mut next = || {
            let v = (x_idx, xi_idx);
            xi_idx += 1;
            if xi_idx == l {
                xi_idx = 0;
                x_idx += 1;
            }
            v
        };
        Self::general_from_remainder(grid, lattice, |x, xi| {
            let (i, j) = next();
            table[i * l + j] - dot(x, xi)
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn kind(&self) -> PhaseKind {
        self.kind
    }

    pub fn psi(&self) -> Option<&PsiTable> {
        self.psi.as_ref()
    }

    /// The non-linear part `φ(x, ξ) − x·ξ` at grid index `x_idx`, box index `xi_idx`.
    pub fn remainder_at(&self, x_idx: usize, xi_idx: usize) -> f64 {
        match self.kind {
            PhaseKind::Linear => 0.0,
            PhaseKind::LinearPlusPsi => self.psi.as_ref().unwrap().values[xi_idx],
            PhaseKind::General => self.remainder.as_ref().unwrap()[x_idx * self.lattice.len() + xi_idx],
        }
    }

    /// `φ(x, ξ)` at grid sample `x_idx`.
    pub fn eval(&self, x_idx: usize, xi: &[i64]) -> Result<f64> {
        let xi_idx = self
            .lattice
            .index_of(xi)
            .ok_or_else(|| Error::BoxTooSmall(format!("{xi:?} outside the phase box")))?;
        Ok(dot(&self.grid.point(x_idx), xi) + self.remainder_at(x_idx, xi_idx))
    }

    /// `e^{2πiφ(x, ξ)}` with the linear part reduced exactly modulo 1.
    pub fn oscillation(&self, x_idx: usize, xi_idx: usize) -> Complex64 {
        let m = self.grid.samples_per_axis() as i64;
        let k = self.grid.coords(x_idx);
        let xi = self.lattice.point(xi_idx);
        let linear = k
            .iter()
            .zip(&xi)
            .map(|(&kj, &v)| kj as i64 * v)
            .sum::<i64>()
            .rem_euclid(m);
        let turns = linear as f64 / m as f64 + self.remainder_at(x_idx, xi_idx).rem_euclid(1.0);
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * turns)
    }

    /// `∂_{x_j} φ(x, ξ)` at every (x, ξ) pair, x-major. The linear part
    /// contributes `ξ_j`; a general remainder is differentiated spectrally.
    pub fn x_gradient(&self, axis: usize) -> Result<Vec<f64>> {
        if axis >= self.grid.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.grid.dim(),
            });
        }
        let l = self.lattice.len();
        let mut out: Vec<f64> = (0..self.grid.len())
            .flat_map(|_| self.lattice.points().map(move |xi| xi[axis] as f64))
            .collect();
        let remainder = self.remainder_derivative(&MultiIndex::unit(self.grid.dim(), axis))?;
        if let Some(r) = remainder {
            for (o, d) in out.iter_mut().zip(r) {
                *o += d;
            }
        }
        debug_assert_eq!(out.len(), self.grid.len() * l);
        Ok(out)
    }

    /// `∂_x^α` of the remainder, x-major; `None` when the remainder does not depend on `x`.
    fn remainder_derivative(&self, alpha: &MultiIndex) -> Result<Option<Vec<f64>>> {
        let Some(rem) = &self.remainder else {
            return Ok(None);
        };
        let l = self.lattice.len();
        let d = SpectralDerivative::new(self.grid, alpha)?;
        let mut out = vec![0.0; rem.len()];
        let mut slice = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for j in 0..l {
            for (x, s) in slice.iter_mut().enumerate() {
                *s = Complex64::new(rem[x * l + j], 0.0);
            }
            for (x, v) in d.apply_values(&slice).into_iter().enumerate() {
                out[x * l + j] = v.re;
            }
        }
        Ok(Some(out))
    }
}

/// `max_{x,ξ} |∂_x^α (φ(x,ξ) − x·ξ)|`, the bound on the non-linear part of the phase.
///
/// The linear part is excluded: `∂_{x_j}(x·ξ) = ξ_j` is unbounded in `ξ`.
pub fn phase_derivative_bound(phase: &Phase, alpha: &MultiIndex) -> Result<f64> {
    if alpha.dim() != phase.grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: phase.grid.dim(),
            found: alpha.dim(),
        });
    }
    let l = phase.lattice.len();
    if alpha.is_zero() {
        let mut worst = 0.0f64;
        for x in 0..phase.grid.len() {
            for j in 0..l {
                worst = worst.max(phase.remainder_at(x, j).abs());
            }
        }
        return Ok(worst);
    }
    Ok(match phase.remainder_derivative(alpha)? {
        None => 0.0,
        Some(d) => d.into_iter().map(f64::abs).fold(0.0, f64::max),
    })
}

pub(crate) fn dot(x: &[f64], xi: &[i64]) -> f64 {
    x.iter().zip(xi).map(|(a, &b)| a * b as f64).sum()
}

fn check_dims(grid: &TorusGrid, lattice: &LatticeBox) -> Result<()> {
    if grid.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: lattice.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(n: usize) -> (TorusGrid, LatticeBox) {
        (TorusGrid::new(n, 16).unwrap(), LatticeBox::new(n, 4).unwrap())
    }

    #[test]
    fn eval_kinds() {
        let (grid, lattice) = setup(2);
        let lin = Phase::linear(grid, lattice).unwrap();
        let x_idx = grid.index_of(&[4, 8]);
        assert!((lin.eval(x_idx, &[3, -2]).unwrap() - (0.75 - 1.0)).abs() < 1e-15);
        let psi = Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, PsiKind::Norm)).unwrap();
        let v = psi.eval(x_idx, &[3, -2]).unwrap();
        assert!((v - (-0.25 + 13f64.sqrt())).abs() < 1e-14);
        let table: Vec<f64> = (0..grid.len() * lattice.len()).map(|i| i as f64 * 0.5).collect();
        let gen = Phase::general_from_table(grid, lattice, &table).unwrap();
        let j = lattice.index_of(&[1, 1]).unwrap();
        assert!((gen.eval(x_idx, &[1, 1]).unwrap() - table[x_idx * lattice.len() + j]).abs() < 1e-12);
    }

    #[test]
    fn psi_at_origin_is_zero() {
        let (_, lattice) = setup(1);
        let t = PsiTable::from_fn(lattice, |_| 7.0);
        assert_eq!(t.get(&[0]), Some(0.0));
        assert_eq!(t.get(&[1]), Some(7.0));
    }

    #[test]
    fn homogeneity_examples() {
        let lattice = LatticeBox::new(2, 6).unwrap();
        for kind in [PsiKind::L1, PsiKind::Max] {
            assert_eq!(homogeneity_residual(&PsiTable::from_kind(lattice, kind)).unwrap(), 0.0);
        }
        assert!(homogeneity_residual(&PsiTable::from_kind(lattice, PsiKind::Norm)).unwrap() < 1e-12);
        let sq = homogeneity_residual(&PsiTable::from_kind(lattice, PsiKind::Square)).unwrap();
        // Brute force over rays.
        let mut expected = 0.0f64;
        for a in lattice.points().filter(|p| p.iter().any(|&v| v != 0)) {
            let s: f64 = a.iter().map(|&v| (v * v) as f64).sum();
            for t in 2..=6i64 {
                if a.iter().all(|&v| (v * t).abs() <= 6) {
                    expected = expected.max(((t * t - t) as f64) * s);
                }
            }
        }
        assert_eq!(sq, expected);
        assert!(homogeneity_residual(&PsiTable::from_kind(LatticeBox::new(1, 1).unwrap(), PsiKind::Norm)).is_err());
    }

    #[test]
    fn affine_phases_have_zero_derivative_bound() {
        let (grid, lattice) = setup(2);
        let psi = Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, PsiKind::Norm)).unwrap();
        assert_eq!(phase_derivative_bound(&psi, &MultiIndex::new(vec![1, 1])).unwrap(), 0.0);
        assert_eq!(phase_derivative_bound(&psi, &MultiIndex::new(vec![1, 0])).unwrap(), 0.0);
    }

    #[test]
    fn sinusoidal_remainder_bound() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let lattice = LatticeBox::new(1, 5).unwrap();
        let phase = Phase::general_from_remainder(grid, lattice, |x, xi| {
            (2.0 * PI * x[0]).sin() * (xi[0] as f64 / (1.0 + (xi[0] * xi[0]) as f64).sqrt())
        })
        .unwrap();
        let b = phase_derivative_bound(&phase, &MultiIndex::new(vec![1])).unwrap();
        assert!(b <= 2.0 * PI + 1e-12);
        let expected = 2.0 * PI * 5.0 / 26f64.sqrt();
        assert!((b - expected).abs() < 1e-10);
        let grad = phase.x_gradient(0).unwrap();
        let j = lattice.index_of(&[3]).unwrap();
        let x0 = grad[j];
        assert!((x0 - (3.0 + 2.0 * PI * 3.0 / 10f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn tabulated_phase_matches_finite_differences() {
        // Centered differences on a refined grid converge at O(M^-2).
        let lattice = LatticeBox::new(1, 3).unwrap();
        let r = |x: f64, xi: i64| (2.0 * PI * x).cos() * 0.3 * xi as f64 + (4.0 * PI * x).sin() * 0.1;
        let grid = TorusGrid::new(1, 64).unwrap();
        let phase = Phase::general_from_remainder(grid, lattice, |x, xi| r(x[0], xi[0])).unwrap();
        let bound = phase_derivative_bound(&phase, &MultiIndex::new(vec![1])).unwrap();
        let fine = 4096.0;
        let h = 1.0 / fine;
        let mut fd = 0.0f64;
        for k in 0..64 {
            let x = k as f64 / 64.0;
            for xi in -3..=3 {
                fd = fd.max(((r(x + h, xi) - r(x - h, xi)) / (2.0 * h)).abs());
            }
        }
        assert!((bound - fd).abs() / fd < 1e-5);
    }
}
