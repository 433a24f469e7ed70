use serde::{Deserialize, Serialize};
use std::cell::OnceCell;

use torus_fio::fio::FioOperator;
use torus_fio::spaces::{
    admissible_weight_check, muckenhoupt_constant, structured_muckenhoupt_constant, CubeFamily, Exponent, WeightSpec,
};
use torus_fio::symbol::{
    homogeneity_residual, phase_derivative_bound, symbol_seminorm, symbol_seminorm_delta_free, PhaseKind, Symbol,
};
use torus_fio::torus::{MultiIndex, TorusGrid};

use crate::error::LabResult;
use crate::spec::{ExperimentSpec, GateKind};

/// Highest difference and derivative order checked in symbol seminorms.
pub const SEMINORM_ORDER: usize = 3;
/// Seminorms below this fraction of the largest one are treated as zero.
pub const SEMINORM_NOISE: f64 = 1e-10;
/// Tolerance on the degree-one homogeneity residual of `ψ`.
pub const HOMOGENEITY_TOL: f64 = 1e-9;
/// Finest dyadic depth used for Muckenhoupt constants of structured weights.
const MAX_CUBE_POINTS_LOG2: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not checkable numerically; taken on faith.
    Assumed,
    /// Reported for context, does not affect the verdict.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Positive when the hypothesis holds with room to spare.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Hypothesis {
    fn new(name: &str, status: Status) -> Self {
        Self {
            name: name.into(),
            status,
            value: None,
            bound: None,
            slack: None,
            note: String::new(),
        }
    }

    fn pass_if(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    /// `value ≤ bound` (or `<` when `strict`), slack `bound − value`.
    fn at_most(name: &str, value: f64, bound: f64, strict: bool) -> Self {
        let slack = bound - value;
        let ok = if strict { slack > 0.0 } else { slack >= 0.0 };
        Self::pass_if(name, ok).value(value).bound(bound).slack(slack)
    }

    /// `value > bound`, slack `value − bound`.
    fn above(name: &str, value: f64, bound: f64) -> Self {
        let slack = value - bound;
        Self::pass_if(name, slack > 0.0).value(value).bound(bound).slack(slack)
    }

    fn value(mut self, v: f64) -> Self {
        self.value = finite(v);
        self
    }

    fn bound(mut self, v: f64) -> Self {
        self.bound = finite(v);
        self
    }

    fn slack(mut self, v: f64) -> Self {
        self.slack = finite(v);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.note = n.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateVerdict {
    pub gate: GateKind,
    pub applies: bool,
    pub violated: Vec<String>,
    pub hypotheses: Vec<Hypothesis>,
}

impl GateVerdict {
    fn new(gate: GateKind, hypotheses: Vec<Hypothesis>) -> Self {
        let violated: Vec<String> = hypotheses
            .iter()
            .filter(|h| h.status == Status::Fail)
            .map(|h| h.name.clone())
            .collect();
        Self {
            gate,
            applies: violated.is_empty(),
            violated,
            hypotheses,
        }
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub verdicts: Vec<GateVerdict>,
}

impl GateReport {
    pub fn applies(&self) -> bool {
        self.verdicts.iter().all(|v| v.applies)
    }

    pub fn verdict(&self, gate: GateKind) -> Option<&GateVerdict> {
        self.verdicts.iter().find(|v| v.gate == gate)
    }
}

/// Relative change `|b − a| / |a|`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a == 0.0 {
        f64::INFINITY
    } else {
        ((b - a) / a).abs()
    }
}

// Quantities shared between gates, computed on first use.
struct Context<'a> {
    spec: &'a ExperimentSpec,
    grid: TorusGrid,
    seminorms: OnceCell<LabResult<(f64, f64)>>,
    seminorms_delta_free: OnceCell<LabResult<(f64, f64)>>,
    log_holder: OnceCell<LabResult<(f64, f64)>>,
}

impl<'a> Context<'a> {
    fn symbols(&self) -> LabResult<(Symbol, Symbol)> {
        let t = &self.spec.operator.truncations;
        Ok((
            self.spec.build_symbol(self.grid, t[0])?,
            self.spec.build_symbol(self.grid, *t.last().unwrap())?,
        ))
    }

    // Worst relative change of any seminorm between the first and last truncation, and its largest value.
    fn seminorm_change(&self, delta_free: bool) -> LabResult<(f64, f64)> {
        let (first, last) = self.symbols()?;
        let dim = self.spec.dim;
        let f = if delta_free { symbol_seminorm_delta_free } else { symbol_seminorm };
        let mut pairs = Vec::new();
        for alpha in MultiIndex::up_to_order(dim, SEMINORM_ORDER) {
            for beta in MultiIndex::up_to_order(dim, SEMINORM_ORDER) {
                pairs.push((f(&first, &alpha, &beta)?.value, f(&last, &alpha, &beta)?.value));
            }
        }
        let largest = pairs.iter().map(|p| p.0.max(p.1)).fold(0.0, f64::max);
        // Derivatives of x-independent symbols are pure roundoff.
        let floor = SEMINORM_NOISE * largest;
        let clip = |v: f64| if v < floor { 0.0 } else { v };
        let worst = pairs
            .iter()
            .map(|&(a, b)| relative_change(clip(a), clip(b)))
            .fold(0.0, f64::max);
        Ok((worst, largest))
    }

    fn seminorm_hypothesis(&self, delta_free: bool) -> Hypothesis {
        let cell = if delta_free { &self.seminorms_delta_free } else { &self.seminorms };
        let name = if delta_free { "seminorms_delta_free" } else { "seminorms" };
        match cell.get_or_init(|| self.seminorm_change(delta_free)) {
            Ok((change, largest)) => Hypothesis::at_most(name, *change, self.spec.stability_threshold, true).note(format!(
                "relative change between first and last truncation, orders up to {SEMINORM_ORDER}; largest seminorm {largest:.6e}"
            )),
            Err(e) => Hypothesis::new(name, Status::Fail).note(e.to_string()),
        }
    }

    fn exponent(&self, grid: TorusGrid) -> LabResult<Exponent> {
        self.spec.space.exponent(grid)
    }

    fn log_holder_hypothesis(&self) -> Hypothesis {
        let pair = self.log_holder.get_or_init(|| {
            let m = self.spec.resolution;
            let coarse = self.exponent(self.grid)?.log_holder_constant();
            let fine = self.exponent(TorusGrid::new(self.spec.dim, 2 * m)?)?.log_holder_constant();
            Ok((coarse, fine))
        });
        match pair {
            Ok((coarse, fine)) => {
                let change = if *coarse < 1e-12 && *fine < 1e-12 { 0.0 } else { relative_change(*coarse, *fine) };
                Hypothesis::at_most("log_holder", change, self.spec.stability_threshold, true).note(format!(
                    "constant {coarse:.6e} at M, {fine:.6e} at 2M; sufficient condition, stricter than required"
                ))
            }
            Err(e) => Hypothesis::new("log_holder", Status::Fail).note(e.to_string()),
        }
    }

    fn exponent_bounds(&self) -> Hypothesis {
        match self.exponent(self.grid) {
            Ok(p) => Hypothesis::above("exponent_bounds", p.p_minus(), 1.0)
                .note(format!("p_minus {}, p_plus {}", p.p_minus(), p.p_plus())),
            Err(e) => Hypothesis::new("exponent_bounds", Status::Fail).note(e.to_string()),
        }
    }

    fn phase_form(&self) -> Hypothesis {
        let n = self.spec.operator.truncations[0];
        let phase = match self.spec.build_phase(self.grid, n) {
            Ok(p) => p,
            Err(e) => return Hypothesis::new("phase_form", Status::Fail).note(e.to_string()),
        };
        match phase.kind() {
            PhaseKind::Linear => Hypothesis::new("phase_form", Status::Pass).value(0.0).note("linear phase"),
            PhaseKind::General => {
                Hypothesis::new("phase_form", Status::Fail).note("phase is not of the form x·ξ + ψ(ξ)")
            }
            PhaseKind::LinearPlusPsi => match homogeneity_residual(phase.psi().unwrap()) {
                Ok(r) => Hypothesis::at_most("phase_form", r, HOMOGENEITY_TOL, true)
                    .note("degree-one homogeneity residual of ψ"),
                Err(e) => Hypothesis::new("phase_form", Status::Fail).note(e.to_string()),
            },
        }
    }

    fn delta_below_rho(&self) -> Hypothesis {
        let s = &self.spec.operator.symbol;
        Hypothesis::above("delta_below_rho", s.rho, s.delta)
    }

    fn smoothness(&self) -> Hypothesis {
        Hypothesis::new("smoothness", Status::Assumed)
            .note(format!("smoothness beyond order {SEMINORM_ORDER} is not checked"))
    }

    fn order_bound(&self, p0: f64) -> f64 {
        let s = &self.spec.operator.symbol;
        (s.rho - 1.0) * (1.0 / p0 - 0.5).abs() - self.spec.epsilon()
    }
}

/// Largest admissible `r` in the iteration, `⌊ε/δ⌋ + 1`; unbounded for `δ = 0`.
pub fn max_iteration_order(epsilon: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        f64::INFINITY
    } else {
        (epsilon / delta).floor() + 1.0
    }
}

fn weighted_constant(ctx: &Context) -> LabResult<GateVerdict> {
    let spec = ctx.spec;
    let s = &spec.operator.symbol;
    let p0 = spec.space.p0.unwrap_or(f64::NAN);
    let eps = spec.epsilon();
    let n = spec.dim as f64;
    let r_max = max_iteration_order(eps, s.delta);
    let mut h = vec![
        Hypothesis::above("exponent_range", p0, 1.0),
        Hypothesis::at_most("order_condition", s.m, ctx.order_bound(p0), false)
            .note("m ≤ (ρ−1)|1/p0 − 1/2| − ε"),
        Hypothesis::above("epsilon_exceeds_delta", eps, s.delta),
        ctx.delta_below_rho(),
        ctx.seminorm_hypothesis(false),
        Hypothesis::above("iteration_order_range", r_max, 1.0)
            .note("needs an integer r with 1 < r ≤ ⌊ε/δ⌋ + 1"),
        Hypothesis::above("series_convergence", r_max, n)
            .note("needs an admissible r > n so that Σ⟨η⟩^{-r} converges"),
        ctx.phase_form(),
        muckenhoupt_hypothesis(ctx, p0)?,
        ctx.smoothness(),
    ];
    if r_max.is_infinite() {
        for x in h.iter_mut().filter(|x| x.name == "iteration_order_range" || x.name == "series_convergence") {
            x.note.push_str("; unbounded since δ = 0");
        }
    }
    Ok(GateVerdict::new(GateKind::WeightedConstant, h))
}

// [w]_{p0} at two dyadic depths; a finite, settled value is taken as membership.
fn muckenhoupt_hypothesis(ctx: &Context, p0: f64) -> LabResult<Hypothesis> {
    let spec = ctx.spec;
    let name = "weight_muckenhoupt";
    if !(p0 > 1.0) {
        return Ok(Hypothesis::new(name, Status::Fail).note("needs p0 > 1"));
    }
    let (coarse, fine, depth) = match &spec.space.weight {
        None | Some(WeightSpec::Unit) => return Ok(Hypothesis::new(name, Status::Pass).value(1.0).note("unit weight")),
        Some(WeightSpec::Structured { beta, factors }) => {
            let depth = (MAX_CUBE_POINTS_LOG2 / spec.dim).min(usize::BITS as usize - 1 - spec.resolution.leading_zeros() as usize);
            let depth = depth.max(3);
            let c = structured_muckenhoupt_constant(spec.dim, *beta, factors, p0, depth - 2)?;
            let f = structured_muckenhoupt_constant(spec.dim, *beta, factors, p0, depth)?;
            (c, f, depth)
        }
        Some(w) => {
            let w = w.build(ctx.grid)?;
            let depth = usize::BITS as usize - 1 - spec.resolution.leading_zeros() as usize;
            let depth = depth.max(3);
            let c = muckenhoupt_constant(&w, p0, &CubeFamily::new(depth - 2))?;
            let f = muckenhoupt_constant(&w, p0, &CubeFamily::new(depth))?;
            (c, f, depth)
        }
    };
    let change = relative_change(coarse, fine);
    Ok(Hypothesis::at_most(name, change, spec.stability_threshold, true)
        .note(format!("[w]_p0 = {coarse:.6e} at depth {}, {fine:.6e} at depth {depth}", depth - 2)))
}

fn variable_exponent(ctx: &Context) -> LabResult<GateVerdict> {
    let spec = ctx.spec;
    let s = &spec.operator.symbol;
    let mut h = vec![ctx.exponent_bounds(), ctx.seminorm_hypothesis(true), ctx.log_holder_hypothesis()];
    match ctx.exponent(ctx.grid) {
        Ok(p) => {
            let p0 = if p.p_minus() >= 2.0 { 2.0 } else { p.p_minus() };
            h.push(
                Hypothesis::at_most("inherited_order_condition", s.m, ctx.order_bound(p0), false)
                    .note(format!("m ≤ (ρ−1)|1/p0 − 1/2| − ε at the most favourable p0 = {p0} in (1, p_minus]")),
            );
        }
        Err(e) => h.push(Hypothesis::new("inherited_order_condition", Status::Fail).note(e.to_string())),
    }
    h.push(Hypothesis::above("epsilon_exceeds_delta", spec.epsilon(), s.delta));
    h.push(ctx.phase_form());
    if !matches!(spec.space.weight, None | Some(WeightSpec::Unit)) {
        h.push(Hypothesis::new("weight", Status::Info).note("unweighted result; the space weight is not used"));
    }
    h.push(ctx.smoothness());
    Ok(GateVerdict::new(GateKind::VariableExponent, h))
}

fn weighted_variable(ctx: &Context) -> LabResult<GateVerdict> {
    let spec = ctx.spec;
    let s = &spec.operator.symbol;
    let n = spec.dim as f64;
    let mut h = vec![
        Hypothesis::at_most("order_below_critical", s.m, -(n + 1.0), true).note("m < −(n+1)"),
        ctx.delta_below_rho(),
        ctx.seminorm_hypothesis(false),
        phase_derivative_hypothesis(ctx)?,
        ctx.exponent_bounds(),
        ctx.log_holder_hypothesis(),
    ];
    let p = ctx.exponent(ctx.grid)?;
    h.push(match p.p_infinity() {
        Some(v) => Hypothesis::above("p_infinity", v, 1.0).note("p is constant outside a ball"),
        None => Hypothesis::new("p_infinity", Status::Fail).note("exponent does not declare p_infinity"),
    });
    match (&spec.space.weight, p.p_infinity()) {
        (Some(WeightSpec::Structured { beta, factors }), Some(_)) => {
            let report = admissible_weight_check(&p, *beta, factors)?;
            for c in report.checks {
                h.push(
                    Hypothesis::pass_if(&format!("weight_admissibility {}", c.name), c.pass)
                        .value(c.value)
                        .bound(c.upper)
                        .slack(c.slack)
                        .note(format!("{} < {} < {}", c.lower, c.value, c.upper)),
                );
            }
        }
        (Some(WeightSpec::Structured { .. }), None) => {
            h.push(Hypothesis::new("weight_admissibility", Status::Fail).note("needs p_infinity"))
        }
        _ => h.push(Hypothesis::new("weight_admissibility", Status::Fail).note("weight is not structured")),
    }
    h.push(kernel_hypothesis(ctx)?);
    h.push(ctx.smoothness());
    Ok(GateVerdict::new(GateKind::WeightedVariable, h))
}

// Bounds on x-derivatives (orders 1..=2) of the non-linear part of the phase at the first and last truncation.
fn phase_derivative_hypothesis(ctx: &Context) -> LabResult<Hypothesis> {
    let t = &ctx.spec.operator.truncations;
    let bound_at = |n: usize| -> LabResult<f64> {
        let phase = ctx.spec.build_phase(ctx.grid, n)?;
        let mut worst = 0.0f64;
        for alpha in MultiIndex::up_to_order(ctx.spec.dim, 2) {
            if !alpha.is_zero() {
                worst = worst.max(phase_derivative_bound(&phase, &alpha)?);
            }
        }
        Ok(worst)
    };
    let first = bound_at(t[0])?;
    let last = bound_at(*t.last().unwrap())?;
    let change = if first < 1e-12 && last < 1e-12 { 0.0 } else { relative_change(first, last) };
    Ok(Hypothesis::at_most("phase_derivatives", change, ctx.spec.stability_threshold, true).note(format!(
        "sup of x-derivatives of φ − x·ξ: {first:.6e} at first truncation, {last:.6e} at last; the linear part is excluded"
    )))
}

fn kernel_hypothesis(ctx: &Context) -> LabResult<Hypothesis> {
    let t = &ctx.spec.operator.truncations;
    let sups = |n: usize| -> LabResult<(f64, f64)> {
        let op = FioOperator::new(ctx.spec.build_phase(ctx.grid, n)?, ctx.spec.build_symbol(ctx.grid, n)?)?;
        Ok(op.kernel_derivative_sups()?)
    };
    let (x0, y0) = sups(t[0])?;
    let (x1, y1) = sups(*t.last().unwrap())?;
    let change = relative_change(x0, x1).max(relative_change(y0, y1));
    Ok(Hypothesis::at_most("kernel_derivatives", change, ctx.spec.stability_threshold, true).note(format!(
        "weighted sups of ∂x K: {x0:.6e} → {x1:.6e}, of ∂y K: {y0:.6e} → {y1:.6e}"
    )))
}

/// Checks the hypotheses of every gate listed in the spec.
pub fn theorem_gate(spec: &ExperimentSpec) -> LabResult<GateReport> {
    let ctx = Context {
        spec,
        grid: spec.grid()?,
        seminorms: OnceCell::new(),
        seminorms_delta_free: OnceCell::new(),
        log_holder: OnceCell::new(),
    };
    let mut verdicts = Vec::new();
    for gate in &spec.gates {
        verdicts.push(match gate {
            GateKind::WeightedConstant => weighted_constant(&ctx)?,
            GateKind::VariableExponent => variable_exponent(&ctx)?,
            GateKind::WeightedVariable => weighted_variable(&ctx)?,
        });
    }
    let s = &spec.operator.symbol;
    Ok(GateReport {
        m: s.m,
        rho: s.rho,
        delta: s.delta,
        epsilon: spec.epsilon(),
        verdicts,
    })
}
