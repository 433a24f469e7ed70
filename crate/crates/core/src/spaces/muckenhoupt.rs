use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::TorusGrid;

use super::exponent::Exponent;
use super::maximal::{maximal, BallFamily};
use super::weight::{structured_weight, Weight, WeightFactor};
use crate::torus::GridFunction;

/// All dyadic subcubes of `[0,1)^n` of side `2^{−d}`, `d = 0..=depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CubeFamily {
    depth: usize,
}

impl CubeFamily {
    pub fn new(depth: usize) -> Self {
        Self { depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of cubes at level `d`.
    pub fn count(&self, dim: usize, d: usize) -> usize {
        1usize << (d * dim)
    }

    /// Index at level `d` of the cube containing grid sample `idx`.
    pub fn cube_of(&self, grid: &TorusGrid, idx: usize, d: usize) -> usize {
        let m = grid.samples_per_axis();
        grid.coords(idx)
            .iter()
            .fold(0usize, |acc, &k| (acc << d) | ((k << d) / m))
    }
}

/// Per-cube sums of `f` at level `d`, with sample counts.
fn cube_sums(grid: &TorusGrid, cubes: &CubeFamily, d: usize, f: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = cubes.count(grid.dim(), d);
    let mut sums = vec![0.0; n];
    let mut counts = vec![0usize; n];
    for (i, v) in f.iter().enumerate() {
        let c = cubes.cube_of(grid, i, d);
        sums[c] += v;
        counts[c] += 1;
    }
    (sums, counts)
}

/// `sup_Q (⨍_Q w)(⨍_Q w^{−1/(p0−1)})^{p0−1}` over the cube family.
pub fn muckenhoupt_constant(w: &Weight, p0: f64, cubes: &CubeFamily) -> Result<f64> {
    if !(p0 > 1.0 && p0.is_finite()) {
        return Err(Error::OutOfRange {
            name: "p0",
            value: p0,
            range: "(1, ∞)",
        });
    }
    let grid = w.grid();
    let dual: Vec<f64> = w.values().iter().map(|v| v.powf(-1.0 / (p0 - 1.0))).collect();
    let mut worst = 0.0f64;
    for d in 0..=cubes.depth() {
        let (ws, counts) = cube_sums(grid, cubes, d, w.values());
        let (vs, _) = cube_sums(grid, cubes, d, &dual);
        for (index, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(Error::EmptyCube { depth: d, index });
            }
            let n = c as f64;
            worst = worst.max((ws[index] / n) * (vs[index] / n).powf(p0 - 1.0));
        }
    }
    Ok(worst)
}

/// `[w]_{p0}` for a structured weight sampled at `M = 2^depth`, so that the
/// finest cubes hold one sample each.
pub fn structured_muckenhoupt_constant(
    dim: usize,
    beta: f64,
    factors: &[WeightFactor],
    p0: f64,
    depth: usize,
) -> Result<f64> {
    let grid = TorusGrid::new(dim, 1 << depth)?;
    let w = structured_weight(beta, factors, grid)?;
    muckenhoupt_constant(&w, p0, &CubeFamily::new(depth))
}

/// `max_x Mw(x)/w(x)`.
pub fn a1_constant(w: &Weight, balls: &BallFamily) -> Result<f64> {
    let wf = GridFunction::from_real(*w.grid(), w.values().to_vec())?;
    let mw = maximal(&wf, balls)?;
    Ok(mw
        .values()
        .iter()
        .zip(w.values())
        .map(|(m, w)| m.re / w)
        .fold(0.0, f64::max))
}

/// Both sides of the power-weight inequality `[w^δ]_q ≤ [w]_p^δ`, `q = δp + 1 − δ`,
/// plus `[w^δ]_p` for the alternative reading of the subscript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightPowerReport {
    pub p: f64,
    pub delta: f64,
    pub q: f64,
    pub power_weight_q: f64,
    pub power_weight_p: f64,
    pub base_to_delta: f64,
}

impl WeightPowerReport {
    /// `[w^δ]_q ≤ [w]_p^δ (1 + rtol)`.
    pub fn holds(&self, rtol: f64) -> bool {
        self.power_weight_q <= self.base_to_delta * (1.0 + rtol)
    }
}

pub fn weight_power_check(w: &Weight, p: f64, delta: f64, cubes: &CubeFamily) -> Result<WeightPowerReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, 1]",
        });
    }
    let q = delta * p + 1.0 - delta;
    let wd = w.power(delta);
    Ok(WeightPowerReport {
        p,
        delta,
        q,
        power_weight_q: muckenhoupt_constant(&wd, q, cubes)?,
        power_weight_p: muckenhoupt_constant(&wd, p, cubes)?,
        base_to_delta: muckenhoupt_constant(w, p, cubes)?.powf(delta),
    })
}

/// One strict inequality `lower < value < upper` with its slack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub slack: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn new(name: String, lower: f64, value: f64, upper: f64) -> Self {
        let slack = (value - lower).min(upper - value);
        Self {
            name,
            lower,
            value,
            upper,
            slack,
            pass: slack > 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub checks: Vec<InequalityCheck>,
    pub pass: bool,
}

/// `−n/p(x_k) < β_k < n/p'(x_k)` for each factor and
/// `−n/p_∞ < β + Σβ_k < n/p'_∞`.
pub fn admissible_weight_check(p: &Exponent, beta: f64, factors: &[WeightFactor]) -> Result<AdmissibilityReport> {
    let p_inf = p
        .p_infinity()
        .ok_or_else(|| Error::InvalidParameter("admissibility needs an exponent with a declared p_infinity".into()))?;
    let n = p.grid().dim() as f64;
    let dual = |q: f64| n * (1.0 - 1.0 / q);
    let mut checks = Vec::new();
    for (k, f) in factors.iter().enumerate() {
        let pk = p.at(&f.center);
        checks.push(InequalityCheck::new(format!("factor {k}"), -n / pk, f.exponent, dual(pk)));
    }
    let total = beta + factors.iter().map(|f| f.exponent).sum::<f64>();
    checks.push(InequalityCheck::new("total".into(), -n / p_inf, total, dual(p_inf)));
    let pass = checks.iter().all(|c| c.pass);
    Ok(AdmissibilityReport { checks, pass })
}
