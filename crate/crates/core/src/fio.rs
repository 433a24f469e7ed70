//! Periodic Fourier integral operators `A f(x) = Σ_ξ e^{2πiφ(x,ξ)} a(x,ξ) f̂(ξ)`,
//! their kernels, and the multiplier factorization for `φ = x·ξ + ψ(ξ)`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symbol::{spectral_x_derivative, x_spectrum, Phase, PhaseKind, Symbol};
use crate::torus::{
    fourier_forward, periodic_norm, wrap_component, GridDft, GridFunction, LatticeBox, LatticeTable, MultiIndex,
    Record, RecordKind, SpectralFunction, TorusGrid,
};

/// Guard on `dist(x_j − y_j, Z)` for the termwise difference identity.
pub const SINGULAR_GUARD: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct FioOperator {
    phase: Phase,
    symbol: Symbol,
    // e^{2πiφ(x,ξ)} a(x,ξ), x-major
    amplitude: Vec<Complex64>,
}

impl FioOperator {
    pub fn new(phase: Phase, symbol: Symbol) -> Result<Self> {
        if phase.grid() != symbol.grid() {
            return Err(Error::GridMismatch(format!(
                "phase grid {:?} vs symbol grid {:?}",
                phase.grid(),
                symbol.grid()
            )));
        }
        if phase.lattice() != symbol.lattice() {
            return Err(Error::GridMismatch(format!(
                "phase box radius {} vs symbol box radius {}",
                phase.lattice().radius(),
                symbol.lattice().radius()
            )));
        }
        let l = symbol.lattice().len();
        let amplitude = (0..symbol.grid().len() * l)
            .into_par_iter()
            .map(|i| phase.oscillation(i / l, i % l) * symbol.values()[i])
            .collect();
        Ok(Self {
            phase,
            symbol,
            amplitude,
        })
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn grid(&self) -> &TorusGrid {
        self.symbol.grid()
    }

    pub fn lattice(&self) -> &LatticeBox {
        self.symbol.lattice()
    }

    /// `Af` on the grid. Requires `2N < M`.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check_input(f)?;
        let fh = fourier_forward(f, self.lattice())?;
        Ok(self.apply_spectrum(&fh))
    }

    /// `Σ_ξ e^{2πiφ(x,ξ)} a(x,ξ) F(ξ)` for given coefficients `F` on the operator's box.
    pub fn apply_spectrum(&self, fh: &SpectralFunction) -> GridFunction {
        let l = self.lattice().len();
        let c = fh.coeffs();
        let values = (0..self.grid().len())
            .into_par_iter()
            .map(|x| {
                self.amplitude[x * l..(x + 1) * l]
                    .iter()
                    .zip(c)
                    .map(|(a, v)| a * v)
                    .sum::<Complex64>()
            })
            .collect();
        GridFunction::new(*self.grid(), values).expect("finite inputs give finite output")
    }

    fn check_input(&self, f: &GridFunction) -> Result<()> {
        if f.grid() != self.grid() {
            return Err(Error::GridMismatch(format!(
                "function grid {:?} vs operator grid {:?}",
                f.grid(),
                self.grid()
            )));
        }
        Ok(())
    }

    /// Full truncated kernel `K(x, y) = Σ_ξ e^{2πi(φ(x,ξ) − y·ξ)} a(x,ξ)`.
    pub fn kernel(&self) -> Result<KernelTable> {
        self.kernel_from(|_, _, amp| amp)
    }

    /// `∂_{x_j} K`, differentiating `e^{2πiφ} a` exactly by the product rule.
    pub fn kernel_x_derivative(&self, axis: usize) -> Result<KernelTable> {
        let grad = self.phase.x_gradient(axis)?;
        let da = spectral_x_derivative(&self.symbol, &MultiIndex::unit(self.grid().dim(), axis))?;
        let l = self.lattice().len();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        self.kernel_from(|x, j, _| {
            let i = x * l + j;
            self.phase.oscillation(x, j) * (two_pi_i * grad[i] * self.symbol.values()[i] + da.values()[i])
        })
    }

    /// `∂_{y_j} K`, which brings down `−2πiξ_j`.
    pub fn kernel_y_derivative(&self, axis: usize) -> Result<KernelTable> {
        if axis >= self.grid().dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.grid().dim(),
            });
        }
        let xis: Vec<f64> = self.lattice().points().map(|xi| xi[axis] as f64).collect();
        self.kernel_from(|_, j, amp| amp * Complex64::new(0.0, -2.0 * PI * xis[j]))
    }

    // Builds Σ_ξ e^{−2πi y·ξ} B(x,ξ) row by row as an inverse transform of the reflected coefficients.
    fn kernel_from(&self, coeff: impl Fn(usize, usize, Complex64) -> Complex64 + Sync) -> Result<KernelTable> {
        let grid = *self.grid();
        let dft = GridDft::new(grid, *self.lattice())?;
        let l = self.lattice().len();
        let rows: Vec<Vec<Complex64>> = (0..grid.len())
            .into_par_iter()
            .map(|x| {
                let reflected: Vec<Complex64> = (0..l)
                    .map(|r| {
                        let j = l - 1 - r;
                        coeff(x, j, self.amplitude[x * l + j])
                    })
                    .collect();
                dft.inverse_values(&reflected)
            })
            .collect();
        KernelTable::new(grid, rows.concat())
    }

    /// `(sup_{|α|=1} sup ‖y‖^{n+1}|∂_x^α K|, sup_{|β|=1} sup ‖x‖^{n+1}|∂_y^β K|)`
    /// with `‖·‖` the periodic distance to the origin.
    pub fn kernel_derivative_sups(&self) -> Result<(f64, f64)> {
        let grid = *self.grid();
        let n = grid.dim();
        let weights: Vec<f64> = (0..grid.len())
            .map(|i| periodic_norm(&grid.point(i)).powi(n as i32 + 1))
            .collect();
        let mut sx = 0.0f64;
        let mut sy = 0.0f64;
        for axis in 0..n {
            let dx = self.kernel_x_derivative(axis)?;
            let dy = self.kernel_y_derivative(axis)?;
            for x in 0..grid.len() {
                for y in 0..grid.len() {
                    sx = sx.max(weights[y] * dx.get(x, y).norm());
                    sy = sy.max(weights[x] * dy.get(x, y).norm());
                }
            }
        }
        Ok((sx, sy))
    }

    /// Max-norm of `Af − Σ_η e^{2πix·η} â(η,D) e^{2πiψ(D)} f` with `η` over the
    /// alias-free x-spectrum of the symbol.
    pub fn multiplier_decomposition_residual(&self, f: &GridFunction) -> Result<f64> {
        if self.phase.kind() != PhaseKind::LinearPlusPsi && self.phase.kind() != PhaseKind::Linear {
            return Err(Error::InvalidParameter(
                "multiplier decomposition needs a phase of the form x·ξ + ψ(ξ)".into(),
            ));
        }
        self.check_input(f)?;
        let spectrum = x_spectrum(&self.symbol)?;
        let scale = self.symbol.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
        if spectrum.aliasing_residual > 1e-10 * scale {
            return Err(Error::AliasedSpectrum(spectrum.aliasing_residual));
        }
        let af = self.apply(f)?;
        let lattice = *self.lattice();
        let psi_phase: Vec<Complex64> = (0..lattice.len()).map(|j| self.phase.oscillation(0, j)).collect();
        let fh = fourier_forward(f, &lattice)?;
        let grid = *self.grid();
        let mut total = vec![Complex64::new(0.0, 0.0); grid.len()];
        for eta in spectrum.etas() {
            let coeff = spectrum.coeff_table(&eta).unwrap();
            if coeff.max_abs() == 0.0 {
                continue;
            }
            let multiplier = LatticeTable::from_values(
                lattice.lo(),
                lattice.hi(),
                coeff.values().iter().zip(&psi_phase).map(|(c, p)| c * p).collect(),
            )?;
            let term = apply_multiplier_spectrum(&multiplier, &fh, &grid)?;
            let m = grid.samples_per_axis() as i64;
            for (x, (t, v)) in total.iter_mut().zip(term.values()).enumerate() {
                let turns = grid
                    .coords(x)
                    .iter()
                    .zip(&eta)
                    .map(|(&k, &e)| k as i64 * e)
                    .sum::<i64>()
                    .rem_euclid(m);
                *t += Complex64::from_polar(1.0, 2.0 * PI * turns as f64 / m as f64) * v;
            }
        }
        Ok(af
            .values()
            .iter()
            .zip(&total)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Fourier multiplier `Σ_ξ e^{2πix·ξ} m(ξ) f̂(ξ)` with `m` given on a symmetric box.
pub fn apply_multiplier(multiplier: &LatticeTable, f: &GridFunction) -> Result<GridFunction> {
    let lattice = *SpectralFunction::from_table(multiplier)?.lattice();
    let fh = fourier_forward(f, &lattice)?;
    apply_multiplier_spectrum(multiplier, &fh, f.grid())
}

fn apply_multiplier_spectrum(
    multiplier: &LatticeTable,
    fh: &SpectralFunction,
    grid: &TorusGrid,
) -> Result<GridFunction> {
    if multiplier.len() != fh.coeffs().len() {
        return Err(Error::DimensionMismatch {
            expected: fh.coeffs().len(),
            found: multiplier.len(),
        });
    }
    let coeffs: Vec<Complex64> = multiplier.values().iter().zip(fh.coeffs()).map(|(m, c)| m * c).collect();
    let dft = GridDft::new(*grid, *fh.lattice())?;
    GridFunction::new(*grid, dft.inverse_values(&coeffs))
}

/// `K(x, y)` on grid × grid, x-major.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl KernelTable {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() * grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x_idx: usize, y_idx: usize) -> Complex64 {
        self.values[x_idx * self.grid.len() + y_idx]
    }

    /// `∫ K(x, y) f(y) dy` by grid quadrature.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid(), self.grid)));
        }
        let g = self.grid.len();
        let w = self.grid.cell_measure();
        let values = (0..g)
            .into_par_iter()
            .map(|x| {
                self.values[x * g..(x + 1) * g]
                    .iter()
                    .zip(f.values())
                    .map(|(k, v)| k * v)
                    .sum::<Complex64>()
                    * w
            })
            .collect();
        GridFunction::new(self.grid, values)
    }

    pub fn to_record(&self) -> Record {
        Record::new(RecordKind::Kernel, self.grid.dim(), vec![self.grid.samples_per_axis()], &self.values)
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        if r.kind != RecordKind::Kernel || r.sizes.len() != 1 {
            return Err(Error::Record(format!("expected a kernel record, found {:?}", r.kind)));
        }
        Self::new(TorusGrid::new(r.dim, r.sizes[0])?, r.complex_values())
    }
}

/// Termwise check of
/// `e^{2πi t·ξ} = (−1)^{|α|} Π_j (e^{2πi t_j} − 1)^{−α_j} Δ̄_ξ^α e^{2πi t·ξ}`, `t = x − y`,
/// where `Δ̄_j g(ξ) = g(ξ) − g(ξ + δ_j)`. Returns the residual scaled by `|a_val|`.
pub fn lr_identity_residual(x: &[f64], y: &[f64], xi: &[i64], a_val: Complex64, alpha: &MultiIndex) -> Result<f64> {
    let n = x.len();
    if y.len() != n || xi.len() != n || alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: [y.len(), xi.len(), alpha.dim()].into_iter().find(|&d| d != n).unwrap_or(n),
        });
    }
    let t: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    for &tj in &t {
        let d = wrap_component(tj).abs();
        if d < SINGULAR_GUARD {
            return Err(Error::GuardViolated {
                distance: d,
                guard: SINGULAR_GUARD,
            });
        }
    }
    let character = |v: &[i64]| -> Complex64 {
        let turns: f64 = t.iter().zip(v).map(|(a, &b)| a * b as f64).sum();
        Complex64::from_polar(1.0, 2.0 * PI * turns)
    };
    let lhs = character(xi);
    // Δ̄^α g(ξ) = Σ_{γ≤α} (−1)^{|γ|} C(α,γ) g(ξ+γ)
    let mut diff = Complex64::new(0.0, 0.0);
    for gamma in alpha.below() {
        let shifted: Vec<i64> = xi.iter().zip(gamma.entries()).map(|(&a, &g)| a + g as i64).collect();
        let sign = if gamma.order() % 2 == 0 { 1.0 } else { -1.0 };
        diff += character(&shifted) * (sign * alpha.binomial(&gamma));
    }
    let mut divisor = Complex64::new(1.0, 0.0);
    for (&tj, &aj) in t.iter().zip(alpha.entries()) {
        divisor *= (Complex64::from_polar(1.0, 2.0 * PI * tj) - 1.0).powu(aj as u32);
    }
    let sign = if alpha.order().is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = diff / divisor * sign;
    Ok((lhs - rhs).norm() * a_val.norm())
}

impl Symbol {
    pub fn to_record(&self) -> Record {
        Record::new(
            RecordKind::Symbol,
            self.grid().dim(),
            vec![self.grid().samples_per_axis(), self.lattice().radius()],
            self.values(),
        )
    }
}
