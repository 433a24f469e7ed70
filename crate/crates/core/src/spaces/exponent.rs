use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::torus::{periodic_distance, periodic_norm, TorusGrid};

/// Variable exponent `p(·)` sampled on a grid.
///
/// `p_infinity` is the value `p` takes outside a small ball about the origin,
/// when the exponent was built that way.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponent {
    grid: TorusGrid,
    values: Vec<f64>,
    p_infinity: Option<f64>,
}

impl Exponent {
    pub fn new(grid: TorusGrid, values: Vec<f64>, p_infinity: Option<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().chain(p_infinity.iter()).find(|v| !v.is_finite() || **v < 1.0) {
            return Err(Error::InvalidExponent(format!("exponent value {bad} is not a finite number ≥ 1")));
        }
        Ok(Self {
            grid,
            values,
            p_infinity,
        })
    }

    pub fn constant(grid: TorusGrid, p: f64) -> Result<Self> {
        Self::new(grid, vec![p; grid.len()], Some(p))
    }

    pub fn from_fn(grid: TorusGrid, p_infinity: Option<f64>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(grid, (0..grid.len()).map(|i| f(&grid.point(i))).collect(), p_infinity)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn p_infinity(&self) -> Option<f64> {
        self.p_infinity
    }

    pub fn p_minus(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn p_plus(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value at the grid sample nearest to `x`.
    pub fn at(&self, x: &[f64]) -> f64 {
        self.values[self.grid.nearest(x)]
    }

    /// Errors unless `1 < p_− ≤ p_+ < ∞`.
    pub fn check_admissible(&self) -> Result<()> {
        if self.p_minus() <= 1.0 {
            return Err(Error::InvalidExponent(format!("p_minus = {} must exceed 1", self.p_minus())));
        }
        Ok(())
    }

    /// `p(·)/s`. Values below 1 are allowed here so that `s` near `p_−` can
    /// still be reported; norm routines reject them.
    pub fn scaled(&self, s: f64) -> Exponent {
        Exponent {
            grid: self.grid,
            values: self.values.iter().map(|p| p / s).collect(),
            p_infinity: self.p_infinity.map(|p| p / s),
        }
    }

    /// `p'(x) = p(x)/(p(x) − 1)`.
    pub fn conjugate(&self) -> Result<Exponent> {
        if let Some(bad) = self.values.iter().find(|&&p| p <= 1.0) {
            return Err(Error::InvalidExponent(format!("no conjugate for p = {bad}")));
        }
        Ok(Exponent {
            grid: self.grid,
            values: self.values.iter().map(|p| p / (p - 1.0)).collect(),
            p_infinity: self.p_infinity.map(|p| p / (p - 1.0)),
        })
    }

    /// `max |p(x) − p(y)| · (−log d(x,y))` over grid pairs with `0 < d ≤ 1/2`.
    pub fn log_holder_constant(&self) -> f64 {
        let g = self.grid.len();
        let points: Vec<Vec<f64>> = (0..g).map(|i| self.grid.point(i)).collect();
        let mut worst = 0.0f64;
        for i in 0..g {
            for j in i + 1..g {
                let d = periodic_distance(&points[i], &points[j]);
                if d <= 0.0 || d > 0.5 {
                    continue;
                }
                worst = worst.max((self.values[i] - self.values[j]).abs() * -d.ln());
            }
        }
        worst
    }
}

/// `1/p + 1/p' = 1` pointwise.
pub fn conjugate_exponent(p: &Exponent) -> Result<Exponent> {
    p.conjugate()
}

pub fn log_holder_constant(p: &Exponent) -> f64 {
    p.log_holder_constant()
}

/// Declarative exponent description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    /// `p ≡ value`.
    Constant { value: f64 },
    /// `mean + amplitude · sin(2πx_1)`.
    Sinusoidal { mean: f64, amplitude: f64 },
    /// `low` on `x_1 < 1/2`, `high` on `x_1 ≥ 1/2`.
    Piecewise { low: f64, high: f64 },
    /// `p_infinity + amplitude · cos²(π|x|/(2·radius))` for `|x| < radius`, else `p_infinity`.
    Bump {
        p_infinity: f64,
        amplitude: f64,
        radius: f64,
    },
}

impl ExponentSpec {
    pub fn build(&self, grid: TorusGrid) -> Result<Exponent> {
        match *self {
            ExponentSpec::Constant { value } => Exponent::constant(grid, value),
            ExponentSpec::Sinusoidal { mean, amplitude } => {
                Exponent::from_fn(grid, None, |x| mean + amplitude * (2.0 * PI * x[0]).sin())
            }
            ExponentSpec::Piecewise { low, high } => {
                Exponent::from_fn(grid, None, |x| if x[0] < 0.5 { low } else { high })
            }
            ExponentSpec::Bump {
                p_infinity,
                amplitude,
                radius,
            } => {
                if !(radius > 0.0 && radius < 0.5) {
                    return Err(Error::OutOfRange {
                        name: "radius",
                        value: radius,
                        range: "(0, 1/2)",
                    });
                }
                Exponent::from_fn(grid, Some(p_infinity), |x| {
                    let d = periodic_norm(x);
                    if d < radius {
                        p_infinity + amplitude * (PI * d / (2.0 * radius)).cos().powi(2)
                    } else {
                        p_infinity
                    }
                })
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ExponentSpec::Constant { value } => format!("constant({value})"),
            ExponentSpec::Sinusoidal { mean, amplitude } => format!("sinusoidal({mean},{amplitude})"),
            ExponentSpec::Piecewise { low, high } => format!("piecewise({low},{high})"),
            ExponentSpec::Bump {
                p_infinity,
                amplitude,
                radius,
            } => format!("bump({p_infinity},{amplitude},{radius})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let two = Exponent::constant(grid, 2.0).unwrap().conjugate().unwrap();
        assert!(two.values().iter().all(|&v| v == 2.0));
        let four = Exponent::constant(grid, 4.0).unwrap().conjugate().unwrap();
        assert!(four.values().iter().all(|&v| (v - 4.0 / 3.0).abs() < 1e-15));
        assert_eq!(four.p_infinity(), Some(4.0 / 3.0));
        assert!(Exponent::constant(grid, 1.0).unwrap().conjugate().is_err());
        assert!(Exponent::constant(grid, 0.5).is_err());
    }

    #[test]
    fn spec_kinds() {
        let grid = TorusGrid::new(1, 64).unwrap();
        let s: ExponentSpec = serde_json::from_str(r#"{"kind":"sinusoidal","mean":2,"amplitude":0.25}"#).unwrap();
        let p = s.build(grid).unwrap();
        assert!((p.p_plus() - 2.25).abs() < 1e-12 && (p.p_minus() - 1.75).abs() < 1e-12);
        assert!(p.p_infinity().is_none());
        let bump = ExponentSpec::Bump {
            p_infinity: 2.0,
            amplitude: 0.5,
            radius: 0.25,
        }
        .build(grid)
        .unwrap();
        assert_eq!(bump.values()[0], 2.5);
        assert_eq!(bump.at(&[0.5]), 2.0);
        assert!(serde_json::from_str::<ExponentSpec>(r#"{"kind":"constant","value":2,"x":1}"#).is_err());
    }

    #[test]
    fn log_holder_examples() {
        let c = Exponent::constant(TorusGrid::new(1, 32).unwrap(), 3.0).unwrap();
        assert_eq!(c.log_holder_constant(), 0.0);
        let jump = ExponentSpec::Piecewise { low: 1.5, high: 3.0 };
        let a = jump.build(TorusGrid::new(1, 64).unwrap()).unwrap().log_holder_constant();
        let b = jump.build(TorusGrid::new(1, 128).unwrap()).unwrap().log_holder_constant();
        assert!(b > a + 1.0);
    }
}
