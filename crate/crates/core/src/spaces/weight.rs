use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::torus::{periodic_distance, periodic_norm, TorusGrid};

/// One factor `|x − center|^exponent` of a structured weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFactor {
    pub center: Vec<f64>,
    pub exponent: f64,
}

/// `w(x) = (1 + |x|)^beta Π_k |x − x_k|^{β_k}` with periodic distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightStructure {
    pub beta: f64,
    #[serde(default)]
    pub factors: Vec<WeightFactor>,
}

impl WeightStructure {
    /// The exact formula, with each distance clamped below at `floor`.
    pub fn eval(&self, x: &[f64], floor: f64) -> f64 {
        let mut w = (1.0 + periodic_norm(x)).powf(self.beta);
        for f in &self.factors {
            w *= periodic_distance(x, &f.center).max(floor).powf(f.exponent);
        }
        w
    }
}

/// Positive weight sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    grid: TorusGrid,
    values: Vec<f64>,
    structure: Option<WeightStructure>,
}

impl Weight {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::InvalidParameter(format!("weight sample {bad} is not finite and positive")));
        }
        Ok(Self {
            grid,
            values,
            structure: None,
        })
    }

    pub fn unit(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![1.0; grid.len()],
            structure: None,
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(grid, (0..grid.len()).map(|i| f(&grid.point(i))).collect())
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn structure(&self) -> Option<&WeightStructure> {
        self.structure.as_ref()
    }

    /// `w^δ`.
    pub fn power(&self, delta: f64) -> Weight {
        Weight {
            grid: self.grid,
            values: self.values.iter().map(|w| w.powf(delta)).collect(),
            structure: self.structure.as_ref().map(|s| WeightStructure {
                beta: s.beta * delta,
                factors: s
                    .factors
                    .iter()
                    .map(|f| WeightFactor {
                        center: f.center.clone(),
                        exponent: f.exponent * delta,
                    })
                    .collect(),
            }),
        }
    }
}

/// Samples a structured weight. Distances to a center are clamped at `1/(2M)`.
pub fn structured_weight(beta: f64, factors: &[WeightFactor], grid: TorusGrid) -> Result<Weight> {
    for f in factors {
        if f.center.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: f.center.len(),
            });
        }
        if f.center.iter().any(|c| !(0.0..1.0).contains(c)) {
            return Err(Error::InvalidParameter(format!("center {:?} outside [0,1)^n", f.center)));
        }
    }
    let structure = WeightStructure {
        beta,
        factors: factors.to_vec(),
    };
    let floor = 0.5 / grid.samples_per_axis() as f64;
    let mut w = Weight::from_fn(grid, |x| structure.eval(x, floor))?;
    w.structure = Some(structure);
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Unit,
    Structured {
        #[serde(default)]
        beta: f64,
        #[serde(default)]
        factors: Vec<WeightFactor>,
    },
    /// `mean + amplitude · cos(2πx_1)`.
    Cosine { mean: f64, amplitude: f64 },
}

impl WeightSpec {
    pub fn build(&self, grid: TorusGrid) -> Result<Weight> {
        match self {
            WeightSpec::Unit => Ok(Weight::unit(grid)),
            WeightSpec::Structured { beta, factors } => structured_weight(*beta, factors, grid),
            WeightSpec::Cosine { mean, amplitude } => {
                Weight::from_fn(grid, |x| mean + amplitude * (2.0 * PI * x[0]).cos())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::Unit => "unit".into(),
            WeightSpec::Structured { beta, factors } => {
                let parts: Vec<String> = factors
                    .iter()
                    .map(|f| format!("{:?}^{}", f.center, f.exponent))
                    .collect();
                format!("structured({beta};{})", parts.join(","))
            }
            WeightSpec::Cosine { mean, amplitude } => format!("cosine({mean},{amplitude})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_examples() {
        let grid = TorusGrid::new(1, 16).unwrap();
        assert!(structured_weight(0.0, &[], grid).unwrap().values().iter().all(|&v| v == 1.0));
        let zero = WeightFactor {
            center: vec![0.25],
            exponent: 0.0,
        };
        assert!(structured_weight(0.0, &[zero], grid).unwrap().values().iter().all(|&v| v == 1.0));
        let half = WeightFactor {
            center: vec![0.0],
            exponent: 0.5,
        };
        let w = structured_weight(0.0, std::slice::from_ref(&half), grid).unwrap();
        assert_eq!(w.values()[4], 0.5);
        assert_eq!(w.values()[0], (1.0f64 / 32.0).sqrt());
        let neg = WeightFactor {
            center: vec![0.0],
            exponent: -0.5,
        };
        assert!(structured_weight(0.0, &[neg], grid).unwrap().values()[0].is_finite());
        assert!(structured_weight(0.0, &[WeightFactor { center: vec![1.0], exponent: 1.0 }], grid).is_err());
    }

    #[test]
    fn spec_parses() {
        let s: WeightSpec = serde_json::from_str(
            r#"{"kind":"structured","beta":0.2,"factors":[{"center":[0.0],"exponent":0.2}]}"#,
        )
        .unwrap();
        let w = s.build(TorusGrid::new(1, 8).unwrap()).unwrap();
        assert_eq!(w.structure().unwrap().factors.len(), 1);
        let u: WeightSpec = serde_json::from_str(r#"{"kind":"unit"}"#).unwrap();
        assert_eq!(u, WeightSpec::Unit);
    }
}
