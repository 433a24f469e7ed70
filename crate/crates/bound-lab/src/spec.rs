use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use torus_fio::spaces::{Exponent, ExponentSpec, Weight, WeightSpec};
use torus_fio::symbol::{Phase, PsiKind, PsiTable, Symbol, SymbolSpec};
use torus_fio::torus::{japanese_bracket, LatticeBox, TorusGrid};

use crate::error::{LabError, LabResult};
use crate::family::FamilyKind;

/// Hypothesis sets the gate knows how to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// Constant exponent `p0` with a Muckenhoupt weight.
    WeightedConstant,
    /// Unweighted variable exponent, reached through extrapolation.
    VariableExponent,
    /// Variable exponent with a structured power weight.
    WeightedVariable,
}

impl GateKind {
    pub fn label(self) -> &'static str {
        match self {
            GateKind::WeightedConstant => "weighted_constant",
            GateKind::VariableExponent => "variable_exponent",
            GateKind::WeightedVariable => "weighted_variable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Gate,
    RatioSweep,
    MsharpDomination,
    MsharpControl,
    Weak11,
}

impl Check {
    pub fn label(self) -> &'static str {
        match self {
            Check::Gate => "gate",
            Check::RatioSweep => "ratio_sweep",
            Check::MsharpDomination => "msharp_domination",
            Check::MsharpControl => "msharp_control",
            Check::Weak11 => "weak11",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseSpec {
    Linear,
    LinearPlusPsi { psi: PsiKind },
    /// `x·ξ + amplitude · sin(2πx_1) · ξ_1/⟨ξ⟩`.
    General { amplitude: f64 },
}

impl PhaseSpec {
    pub fn build(&self, grid: TorusGrid, lattice: LatticeBox) -> LabResult<Phase> {
        Ok(match *self {
            PhaseSpec::Linear => Phase::linear(grid, lattice)?,
            PhaseSpec::LinearPlusPsi { psi } => Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, psi))?,
            PhaseSpec::General { amplitude } => Phase::general_from_remainder(grid, lattice, move |x, xi| {
                amplitude * (2.0 * PI * x[0]).sin() * xi[0] as f64 / japanese_bracket(xi)
            })?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            PhaseSpec::Linear => "linear".into(),
            PhaseSpec::LinearPlusPsi { psi } => format!("linear_plus_psi({psi:?})").to_lowercase(),
            PhaseSpec::General { amplitude } => format!("general({amplitude})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub phase: PhaseSpec,
    pub symbol: SymbolSpec,
    /// Lattice radii `N`, strictly increasing.
    pub truncations: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ExponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
}

/// The norm a sweep measures in.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpace {
    WeightedConstant { p0: f64, weight: Weight },
    Variable { p: Exponent },
    WeightedVariable { p: Exponent, weight: Weight },
}

impl NormSpace {
    pub fn norm(&self, f: &torus_fio::torus::GridFunction) -> LabResult<f64> {
        use torus_fio::spaces::{luxemburg_norm, weighted_constant_norm, weighted_variable_norm};
        Ok(match self {
            NormSpace::WeightedConstant { p0, weight } => weighted_constant_norm(f, *p0, weight)?,
            NormSpace::Variable { p } => luxemburg_norm(f, p)?,
            NormSpace::WeightedVariable { p, weight } => weighted_variable_norm(f, p, weight)?,
        })
    }
}

impl SpaceSpec {
    /// `p0` takes precedence; otherwise the exponent, weighted when a weight is given.
    pub fn build(&self, grid: TorusGrid) -> LabResult<NormSpace> {
        let weight = self.weight.as_ref().map(|w| w.build(grid)).transpose()?;
        if let Some(p0) = self.p0 {
            return Ok(NormSpace::WeightedConstant {
                p0,
                weight: weight.unwrap_or_else(|| Weight::unit(grid)),
            });
        }
        let p = self
            .exponent
            .as_ref()
            .ok_or_else(|| LabError::Spec("space needs `p0` or `exponent`".into()))?
            .build(grid)?;
        p.check_admissible()?;
        Ok(match weight {
            Some(weight) => NormSpace::WeightedVariable { p, weight },
            None => NormSpace::Variable { p },
        })
    }

    /// The variable exponent, or the constant `p0` when only that is given.
    pub fn exponent(&self, grid: TorusGrid) -> LabResult<Exponent> {
        match (&self.exponent, self.p0) {
            (Some(e), _) => Ok(e.build(grid)?),
            (None, Some(p0)) => Ok(Exponent::constant(grid, p0)?),
            (None, None) => Err(LabError::Spec("space needs `p0` or `exponent`".into())),
        }
    }

    pub fn weight(&self, grid: TorusGrid) -> LabResult<Weight> {
        Ok(match &self.weight {
            Some(w) => w.build(grid)?,
            None => Weight::unit(grid),
        })
    }

    pub fn p_label(&self) -> String {
        match (&self.exponent, self.p0) {
            (_, Some(p0)) => format!("constant({p0})"),
            (Some(e), None) => e.label(),
            (None, None) => "none".into(),
        }
    }

    pub fn w_label(&self) -> String {
        self.weight.as_ref().map_or_else(|| "unit".into(), |w| w.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_checks() -> Vec<Check> {
    vec![Check::Gate, Check::RatioSweep]
}
fn default_s() -> f64 {
    0.5
}
fn default_stability() -> f64 {
    0.1
}
fn default_refinement_threshold() -> f64 {
    0.2
}
fn default_ball_levels() -> usize {
    6
}

/// One experiment, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub dim: usize,
    /// Samples per axis `M`.
    pub resolution: usize,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub space: SpaceSpec,
    pub family: FamilySpec,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub gates: Vec<GateKind>,
    /// Margin in the order condition; defaults to `2δ + 0.1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_stability")]
    pub stability_threshold: f64,
    #[serde(default = "default_refinement_threshold")]
    pub refinement_threshold: f64,
    /// Grids for the refinement checks; defaults to `[M/2, M]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refinement_resolutions: Vec<usize>,
    /// Lattice radius for the refinement checks; defaults to the first truncation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_truncation: Option<usize>,
    #[serde(default = "default_ball_levels")]
    pub ball_levels: usize,
    /// Levels for the weak-type profile; defaults to `10^{-3 + k/4}`, `k = 0..=16`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Negative controls: the sweep passes when the ratios grow.
    #[serde(default)]
    pub expect_growing: bool,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> LabResult<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| LabError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(2.0 * self.operator.symbol.delta + 0.1)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.lambdas
            .clone()
            .unwrap_or_else(|| (0..=16).map(|k| 10f64.powf(-3.0 + k as f64 / 4.0)).collect())
    }

    pub fn refinement_resolutions(&self) -> Vec<usize> {
        if self.refinement_resolutions.is_empty() {
            vec![self.resolution / 2, self.resolution]
        } else {
            self.refinement_resolutions.clone()
        }
    }

    pub fn probe_truncation(&self) -> usize {
        self.probe_truncation.unwrap_or(self.operator.truncations[0])
    }

    pub fn grid(&self) -> LabResult<TorusGrid> {
        Ok(TorusGrid::new(self.dim, self.resolution)?)
    }

    pub fn lattice(&self, n: usize) -> LabResult<LatticeBox> {
        Ok(LatticeBox::new(self.dim, n)?)
    }

    pub fn build_symbol(&self, grid: TorusGrid, n: usize) -> LabResult<Symbol> {
        Ok(self.operator.symbol.build(grid, self.lattice(n)?)?)
    }

    pub fn build_phase(&self, grid: TorusGrid, n: usize) -> LabResult<Phase> {
        self.operator.phase.build(grid, self.lattice(n)?)
    }

    pub fn validate(&self) -> LabResult<()> {
        let bad = |msg: String| Err(LabError::Spec(msg));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        let t = &self.operator.truncations;
        if t.is_empty() {
            return bad("operator.truncations is empty".into());
        }
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("operator.truncations must be strictly increasing, got {t:?}"));
        }
        let n_max = *t.last().unwrap();
        if 2 * n_max >= self.resolution {
            return bad(format!(
                "truncation {n_max} is aliased on {} samples per axis (need 2N < M)",
                self.resolution
            ));
        }
        if self.family.count == 0 {
            return bad("family.count must be at least 1".into());
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s = {} must lie in (0, 1)", self.s));
        }
        if !(self.stability_threshold > 0.0 && self.refinement_threshold > 0.0) {
            return bad("thresholds must be positive".into());
        }
        if self.ball_levels == 0 {
            return bad("ball_levels must be at least 1".into());
        }
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() || eps < 0.0 {
                return bad(format!("epsilon = {eps} must be finite and non-negative"));
            }
        }
        if self.lambdas().iter().any(|l| !(*l > 0.0)) {
            return bad("lambdas must be positive".into());
        }
        self.operator
            .symbol
            .order()
            .map_err(|e| LabError::Spec(format!("operator.symbol: {e}")))?;
        let needs_norm = self.checks.iter().any(|c| *c != Check::Gate);
        let needs_space = needs_norm || !self.gates.is_empty();
        if needs_space && self.space.p0.is_none() && self.space.exponent.is_none() {
            return bad("space needs `p0` or `exponent`".into());
        }
        if let Some(p0) = self.space.p0 {
            if !(p0 > 1.0 && p0.is_finite()) {
                return bad(format!("space.p0 = {p0} must lie in (1, ∞)"));
            }
        }
        for gate in &self.gates {
            match gate {
                GateKind::WeightedConstant if self.space.p0.is_none() => {
                    return bad("gate weighted_constant needs space.p0".into());
                }
                GateKind::VariableExponent if self.space.exponent.is_none() => {
                    return bad("gate variable_exponent needs space.exponent".into());
                }
                GateKind::WeightedVariable => {
                    if self.space.exponent.is_none() {
                        return bad("gate weighted_variable needs space.exponent".into());
                    }
                    if !matches!(self.space.weight, Some(WeightSpec::Structured { .. })) {
                        return bad("gate weighted_variable needs a structured space.weight".into());
                    }
                }
                _ => {}
            }
        }
        let refine = self.refinement_resolutions();
        let uses_refinement = self
            .checks
            .iter()
            .any(|c| matches!(c, Check::MsharpDomination | Check::MsharpControl | Check::Weak11));
        if uses_refinement {
            let probe = self.probe_truncation();
            if refine.len() < 2 {
                return bad("refinement_resolutions needs at least two grids".into());
            }
            if let Some(&m) = refine.iter().find(|&&m| 2 * probe >= m) {
                return bad(format!("probe truncation {probe} is aliased on {m} samples per axis"));
            }
        }
        // Construction checks so that parameter errors surface as spec errors. The
        // gate alone must be able to report an inadmissible exponent as a violation.
        let as_spec = |e: LabError| match e {
            LabError::Numeric(e) => LabError::Spec(format!("space: {e}")),
            other => other,
        };
        let grid = TorusGrid::new(self.dim, self.resolution).map_err(|e| LabError::Spec(e.to_string()))?;
        if needs_norm {
            self.space.build(grid).map_err(as_spec)?;
        } else if needs_space {
            self.space.exponent(grid).map_err(as_spec)?;
            self.space.weight(grid).map_err(as_spec)?;
        }
        Ok(())
    }
}

/// A spec file holds one experiment, or `{"experiments": [...]}`.
pub fn load_specs(path: &Path) -> LabResult<Vec<ExperimentSpec>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::Spec(format!("cannot read {}: {e}", path.display())))?;
    parse_specs(&text)
}

pub fn parse_specs(text: &str) -> LabResult<Vec<ExperimentSpec>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| LabError::Spec(e.to_string()))?;
    let specs = if value.get("experiments").is_some() {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Suite {
            experiments: Vec<ExperimentSpec>,
        }
        serde_json::from_value::<Suite>(value)
            .map_err(|e| LabError::Spec(e.to_string()))?
            .experiments
    } else {
        vec![serde_json::from_value(value).map_err(|e| LabError::Spec(e.to_string()))?]
    };
    if specs.is_empty() {
        return Err(LabError::Spec("suite has no experiments".into()));
    }
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}
