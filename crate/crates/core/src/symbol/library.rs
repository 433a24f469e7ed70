//! Named symbol families used by configs and tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::table::{Symbol, SymbolOrder};
use crate::error::{Error, Result};
use crate::torus::{japanese_bracket, LatticeBox, TorusGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// `⟨ξ⟩^m`
    Bracket,
    /// `e^{2πi x_1} ⟨ξ⟩^m`
    ModulatedBracket,
    /// `scale · (1 + cos 2πx_1) ⟨ξ⟩^m`
    CosineBracket,
    /// `⟨ξ⟩^m Σ_{|η|_∞ ≤ degree} (c_η + d_η ξ_1/⟨ξ⟩) e^{2πi x·η}` with seeded
    /// coefficients damped by `1/(1+|η|²)`.
    RandomTrig,
    /// Constant 1.
    Identity,
    /// `1` at a single frequency, `0` elsewhere.
    Indicator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolParameters {
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub degree: usize,
    #[serde(default)]
    pub xi: Option<Vec<i64>>,
}

impl Default for SymbolParameters {
    fn default() -> Self {
        Self {
            scale: 1.0,
            degree: 0,
            xi: None,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn zero() -> f64 {
    0.0
}

/// Declarative description of a symbol; sampled with [`SymbolSpec::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    #[serde(default = "zero")]
    pub m: f64,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default = "zero")]
    pub delta: f64,
    #[serde(default)]
    pub parameters: SymbolParameters,
    #[serde(default)]
    pub seed: u64,
}

impl SymbolSpec {
    pub fn new(kind: SymbolKind, m: f64) -> Self {
        Self {
            kind,
            m,
            rho: 1.0,
            delta: 0.0,
            parameters: SymbolParameters::default(),
            seed: 0,
        }
    }

    pub fn order(&self) -> Result<SymbolOrder> {
        SymbolOrder::new(self.m, self.rho, self.delta)
    }

    pub fn build(&self, grid: TorusGrid, lattice: LatticeBox) -> Result<Symbol> {
        let order = self.order()?;
        let m = self.m;
        let scale = self.parameters.scale;
        match self.kind {
            SymbolKind::Bracket => Symbol::from_fn(grid, lattice, order, |_, xi| {
                Complex64::new(scale * japanese_bracket(xi).powf(m), 0.0)
            }),
            SymbolKind::ModulatedBracket => Symbol::from_fn(grid, lattice, order, |x, xi| {
                Complex64::from_polar(scale * japanese_bracket(xi).powf(m), 2.0 * PI * x[0])
            }),
            SymbolKind::CosineBracket => Symbol::from_fn(grid, lattice, order, |x, xi| {
                Complex64::new(scale * (1.0 + (2.0 * PI * x[0]).cos()) * japanese_bracket(xi).powf(m), 0.0)
            }),
            SymbolKind::Identity => Symbol::from_fn(grid, lattice, order, |_, _| Complex64::new(scale, 0.0)),
            SymbolKind::Indicator => {
                let target = self.parameters.xi.clone().unwrap_or_else(|| vec![0; grid.dim()]);
                if target.len() != grid.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: grid.dim(),
                        found: target.len(),
                    });
                }
                Symbol::from_fn(grid, lattice, order, |_, xi| {
                    Complex64::new(if xi == target.as_slice() { scale } else { 0.0 }, 0.0)
                })
            }
            SymbolKind::RandomTrig => {
                let terms = self.random_trig_terms(grid.dim());
                let limit = grid.samples_per_axis() as i64;
                if terms.iter().any(|(eta, _, _)| eta.iter().any(|&e| 2 * e.abs() >= limit)) {
                    return Err(Error::InvalidParameter(format!(
                        "random_trig degree {} aliases on {} samples per axis",
                        self.parameters.degree,
                        grid.samples_per_axis()
                    )));
                }
                Symbol::from_fn(grid, lattice, order, |x, xi| {
                    let br = japanese_bracket(xi);
                    let t = xi[0] as f64 / br;
                    let sum: Complex64 = terms
                        .iter()
                        .map(|(eta, c, d)| {
                            let phase: f64 = eta.iter().zip(x).map(|(&e, &xv)| e as f64 * xv).sum();
                            (c + d * t) * Complex64::from_polar(1.0, 2.0 * PI * phase)
                        })
                        .sum();
                    sum * scale * br.powf(m)
                })
            }
        }
    }

    fn random_trig_terms(&self, dim: usize) -> Vec<(Vec<i64>, Complex64, Complex64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let d = self.parameters.degree as i64;
        let side = (2 * d + 1) as usize;
        let mut terms = Vec::new();
        for idx in 0..side.pow(dim as u32) {
            let mut rem = idx;
            let mut eta = vec![0i64; dim];
            for j in (0..dim).rev() {
                eta[j] = (rem % side) as i64 - d;
                rem /= side;
            }
            let damp = 1.0 / (1.0 + eta.iter().map(|e| (e * e) as f64).sum::<f64>());
            let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * damp;
            let c = draw();
            let dcoef = draw();
            terms.push((eta, c, dcoef));
        }
        terms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::table::{symbol_seminorm, x_fourier_coeff};
    use crate::torus::MultiIndex;

    #[test]
    fn spec_parses_with_defaults() {
        let s: SymbolSpec = serde_json::from_str(r#"{"kind": "bracket", "m": -1.5}"#).unwrap();
        assert_eq!(s, SymbolSpec::new(SymbolKind::Bracket, -1.5));
        assert!(serde_json::from_str::<SymbolSpec>(r#"{"kind": "bracket", "q": 1}"#).is_err());
    }

    #[test]
    fn modulated_and_indicator() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let lattice = LatticeBox::new(1, 3).unwrap();
        let a = SymbolSpec::new(SymbolKind::ModulatedBracket, -1.0).build(grid, lattice).unwrap();
        assert!((x_fourier_coeff(&a, &[1]).unwrap().get(&[2]).unwrap().re - 5f64.sqrt().recip()).abs() < 1e-14);
        let mut ind = SymbolSpec::new(SymbolKind::Indicator, 0.0);
        ind.parameters.xi = Some(vec![2]);
        let t = ind.build(grid, lattice).unwrap();
        assert_eq!(t.at(3, lattice.index_of(&[2]).unwrap()), Complex64::new(1.0, 0.0));
        assert_eq!(t.at(3, lattice.index_of(&[1]).unwrap()), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn random_trig_is_seeded_and_bounded() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let lattice = LatticeBox::new(1, 20).unwrap();
        let mut spec = SymbolSpec::new(SymbolKind::RandomTrig, -1.0);
        spec.parameters.degree = 2;
        spec.seed = 7;
        let a = spec.build(grid, lattice).unwrap();
        let b = spec.build(grid, lattice).unwrap();
        assert_eq!(a, b);
        spec.seed = 8;
        assert_ne!(spec.build(grid, lattice).unwrap(), a);
        let zero = MultiIndex::new(vec![0]);
        let c = symbol_seminorm(&a, &zero, &zero).unwrap().value;
        assert!(c > 0.0 && c < 10.0);
        spec.parameters.degree = 8;
        assert!(spec.build(grid, lattice).is_err());
    }
}
