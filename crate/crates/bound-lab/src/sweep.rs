use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use torus_fio::fio::FioOperator;
use torus_fio::spaces::{m_sharp_s, maximal, sharp_maximal, weak11_profile, BallFamily};
use torus_fio::torus::{GridFunction, TorusGrid};

use crate::error::{LabError, LabResult};
use crate::family::gen_test_family;
use crate::gate::relative_change;
use crate::spec::{Check, ExperimentSpec};

/// Denominators below this are excluded from ratios.
pub const RATIO_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationStats {
    pub n: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    /// Family index attaining the maximum.
    pub argmax: usize,
    pub evaluated: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVerdict {
    BoundedStable,
    Growing,
}

impl SweepVerdict {
    pub fn label(self) -> &'static str {
        match self {
            SweepVerdict::BoundedStable => "bounded_stable",
            SweepVerdict::Growing => "growing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub resolution: usize,
    pub truncations: Vec<TruncationStats>,
    /// Relative change of the maximum ratio between the last two truncations.
    pub last_change: f64,
    /// `(max − min)/min` of the per-truncation maxima.
    pub spread: f64,
    /// `last/first − 1` of the per-truncation maxima.
    pub growth: f64,
    pub threshold: f64,
    pub verdict: SweepVerdict,
    pub excluded: Vec<usize>,
    pub warnings: Vec<String>,
}

// Ratios num(f)/den(f) over the family, None where the denominator is below the floor.
fn ratios(
    family: &[GridFunction],
    f: impl Fn(&GridFunction) -> LabResult<(f64, f64)> + Sync,
) -> LabResult<Vec<Option<f64>>> {
    family
        .par_iter()
        .map(|u| {
            let (num, den) = f(u)?;
            Ok((den >= RATIO_FLOOR).then(|| num / den))
        })
        .collect()
}

fn operator(spec: &ExperimentSpec, grid: TorusGrid, n: usize) -> LabResult<FioOperator> {
    Ok(FioOperator::new(spec.build_phase(grid, n)?, spec.build_symbol(grid, n)?)?)
}

fn family(spec: &ExperimentSpec, grid: TorusGrid, n: usize) -> LabResult<Vec<GridFunction>> {
    let f = &spec.family;
    gen_test_family(f.kind, f.count, f.seed, grid, spec.lattice(n)?)
}

/// `‖Af‖/‖f‖` over the family for every truncation, in the space of the spec.
pub fn boundedness_sweep(spec: &ExperimentSpec) -> LabResult<RatioReport> {
    let grid = spec.grid()?;
    let space = spec.space.build(grid)?;
    let mut truncations = Vec::new();
    let mut excluded = Vec::new();
    for &n in &spec.operator.truncations {
        let op = operator(spec, grid, n)?;
        let fam = family(spec, grid, n)?;
        let r = ratios(&fam, |f| Ok((space.norm(&op.apply(f)?)?, space.norm(f)?)))?;
        let mut stats = TruncationStats {
            n,
            max_ratio: 0.0,
            mean_ratio: 0.0,
            min_ratio: f64::INFINITY,
            argmax: 0,
            evaluated: 0,
        };
        for (i, v) in r.iter().enumerate() {
            match v {
                Some(v) => {
                    if *v > stats.max_ratio {
                        stats.max_ratio = *v;
                        stats.argmax = i;
                    }
                    stats.min_ratio = stats.min_ratio.min(*v);
                    stats.mean_ratio += v;
                    stats.evaluated += 1;
                }
                None => excluded.push(i),
            }
        }
        if stats.evaluated == 0 {
            return Err(LabError::Numeric(torus_fio::Error::ZeroFunction));
        }
        stats.mean_ratio /= stats.evaluated as f64;
        truncations.push(stats);
    }
    excluded.sort_unstable();
    excluded.dedup();
    let maxima: Vec<f64> = truncations.iter().map(|t| t.max_ratio).collect();
    let last_change = match maxima.len() {
        0 | 1 => 0.0,
        k => relative_change(maxima[k - 2], maxima[k - 1]),
    };
    let hi = maxima.iter().cloned().fold(0.0, f64::max);
    let lo = maxima.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut warnings = Vec::new();
    if !excluded.is_empty() {
        warnings.push(format!("{} family members excluded for norm below {RATIO_FLOOR:e}", excluded.len()));
    }
    Ok(RatioReport {
        resolution: spec.resolution,
        truncations,
        last_change,
        spread: (hi - lo) / lo,
        growth: maxima[maxima.len() - 1] / maxima[0] - 1.0,
        threshold: spec.stability_threshold,
        verdict: if last_change < spec.stability_threshold {
            SweepVerdict::BoundedStable
        } else {
            SweepVerdict::Growing
        },
        excluded,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionStat {
    pub resolution: usize,
    pub value: f64,
    pub argmax: usize,
    /// Sample points or family members left out for a vanishing denominator.
    pub excluded: usize,
}

/// A statistic tracked across grid refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub check: Check,
    pub truncation: usize,
    pub resolutions: Vec<ResolutionStat>,
    /// Largest relative change between consecutive resolutions.
    pub max_change: f64,
    pub threshold: f64,
    pub stable: bool,
    pub warnings: Vec<String>,
}

fn refinement(
    spec: &ExperimentSpec,
    check: Check,
    stat: impl Fn(&FioOperator, &[GridFunction], &BallFamily) -> LabResult<ResolutionStat>,
) -> LabResult<RefinementReport> {
    let n = spec.probe_truncation();
    let mut resolutions = Vec::new();
    for m in spec.refinement_resolutions() {
        let grid = TorusGrid::new(spec.dim, m)?;
        let op = operator(spec, grid, n)?;
        let fam = family(spec, grid, n)?;
        let balls = BallFamily::new(grid, spec.ball_levels)?;
        resolutions.push(stat(&op, &fam, &balls)?);
    }
    let max_change = resolutions
        .windows(2)
        .map(|w| relative_change(w[0].value, w[1].value))
        .fold(0.0, f64::max);
    let warnings = resolutions
        .iter()
        .filter(|r| r.excluded > 0)
        .map(|r| format!("{} excluded at M = {} (denominator below {RATIO_FLOOR:e})", r.excluded, r.resolution))
        .collect();
    Ok(RefinementReport {
        check,
        truncation: n,
        resolutions,
        max_change,
        threshold: spec.refinement_threshold,
        stable: max_change < spec.refinement_threshold,
        warnings,
    })
}

fn best(values: impl IntoIterator<Item = Option<f64>>) -> (f64, usize, usize) {
    let mut value = 0.0f64;
    let mut argmax = 0;
    let mut excluded = 0;
    for (i, v) in values.into_iter().enumerate() {
        match v {
            Some(v) if v > value => {
                value = v;
                argmax = i;
            }
            Some(_) => {}
            None => excluded += 1,
        }
    }
    (value, argmax, excluded)
}

/// `max_f max_x M^#_s(Af)(x) / Mf(x)` across refinement resolutions.
pub fn msharp_domination(spec: &ExperimentSpec) -> LabResult<RefinementReport> {
    refinement(spec, Check::MsharpDomination, |op, fam, balls| {
        let per: Vec<(f64, usize)> = fam
            .par_iter()
            .map(|f| -> LabResult<(f64, usize)> {
                let lhs = m_sharp_s(&op.apply(f)?, spec.s, balls)?;
                let rhs = maximal(f, balls)?;
                let mut worst = 0.0f64;
                let mut skipped = 0;
                for (a, b) in lhs.values().iter().zip(rhs.values()) {
                    if b.re < RATIO_FLOOR {
                        skipped += 1;
                    } else {
                        worst = worst.max(a.re / b.re);
                    }
                }
                Ok((worst, skipped))
            })
            .collect::<LabResult<_>>()?;
        let (value, argmax, _) = best(per.iter().map(|p| Some(p.0)));
        Ok(ResolutionStat {
            resolution: balls.grid().samples_per_axis(),
            value,
            argmax,
            excluded: per.iter().map(|p| p.1).sum(),
        })
    })
}

/// `max_f ‖Af‖ / ‖M^#(Af)‖` in the space of the spec, across refinement resolutions.
pub fn msharp_control_ratio(spec: &ExperimentSpec) -> LabResult<RefinementReport> {
    refinement(spec, Check::MsharpControl, |op, fam, balls| {
        let space = spec.space.build(*balls.grid())?;
        let r = ratios(fam, |f| {
            let g = op.apply(f)?;
            Ok((space.norm(&g)?, space.norm(&sharp_maximal(&g, balls)?)?))
        })?;
        let (value, argmax, excluded) = best(r);
        Ok(ResolutionStat {
            resolution: balls.grid().samples_per_axis(),
            value,
            argmax,
            excluded,
        })
    })
}

/// `max_f max_λ λ|{|Af| > λ}| / ‖f‖_1` across refinement resolutions.
pub fn weak11(spec: &ExperimentSpec) -> LabResult<RefinementReport> {
    let lambdas = spec.lambdas();
    refinement(spec, Check::Weak11, |op, fam, balls| {
        let r: Vec<Option<f64>> = fam
            .par_iter()
            .map(|f| -> LabResult<Option<f64>> {
                match weak11_profile(&op.apply(f)?, f, &lambdas) {
                    Ok(p) => Ok(Some(p.into_iter().fold(0.0, f64::max))),
                    Err(torus_fio::Error::ZeroFunction) => Ok(None),
                    Err(e) => Err(e.into()),
                }
            })
            .collect::<LabResult<_>>()?;
        let (value, argmax, excluded) = best(r);
        Ok(ResolutionStat {
            resolution: balls.grid().samples_per_axis(),
            value,
            argmax,
            excluded,
        })
    })
}
