use crate::error::{Error, Result};
use crate::torus::GridFunction;

use super::exponent::Exponent;
use super::weight::Weight;

const LUXEMBURG_RTOL: f64 = 1e-10;

fn check_grid(f: &GridFunction, p: &Exponent) -> Result<()> {
    if f.grid() != p.grid() {
        return Err(Error::GridMismatch(format!("function on {:?}, exponent on {:?}", f.grid(), p.grid())));
    }
    Ok(())
}

fn check_weight(f: &GridFunction, w: &Weight) -> Result<()> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch(format!("function on {:?}, weight on {:?}", f.grid(), w.grid())));
    }
    Ok(())
}

fn modular_abs(abs: &[f64], p: &[f64], lambda: f64) -> f64 {
    abs.iter().zip(p).map(|(a, e)| (a / lambda).powf(*e)).sum::<f64>() / abs.len() as f64
}

/// `∫ |f|^{p(x)} dx` by grid average.
pub fn modular(f: &GridFunction, p: &Exponent) -> Result<f64> {
    check_grid(f, p)?;
    Ok(modular_abs(&f.abs(), p.values(), 1.0))
}

/// Luxemburg norm of a non-negative sample vector.
pub fn luxemburg_norm_abs(abs: &[f64], p: &Exponent) -> Result<f64> {
    if abs.len() != p.values().len() {
        return Err(Error::DimensionMismatch {
            expected: p.values().len(),
            found: abs.len(),
        });
    }
    if abs.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite);
    }
    p.check_admissible()?;
    let top = abs.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let pv = p.values();
    // At `lo` the largest sample alone pushes the modular past 1; at `hi` every term is below 1/2.
    let mut lo = 0.5 * top * (abs.len() as f64).powf(-1.0 / p.p_minus());
    let mut hi = 2.0 * top;
    while hi / lo - 1.0 >= LUXEMBURG_RTOL {
        let mid = (lo * hi).sqrt();
        if modular_abs(abs, pv, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// `inf{λ > 0 : ∫ |f/λ|^{p(x)} ≤ 1}`.
pub fn luxemburg_norm(f: &GridFunction, p: &Exponent) -> Result<f64> {
    check_grid(f, p)?;
    luxemburg_norm_abs(&f.abs(), p)
}

/// `‖w f‖_{L^{p(·)}}`.
pub fn weighted_variable_norm(f: &GridFunction, p: &Exponent, w: &Weight) -> Result<f64> {
    check_grid(f, p)?;
    check_weight(f, w)?;
    let abs: Vec<f64> = f.values().iter().zip(w.values()).map(|(v, w)| v.norm() * w).collect();
    luxemburg_norm_abs(&abs, p)
}

/// `(∫ |f|^{p0} w dx)^{1/p0}`.
pub fn weighted_constant_norm(f: &GridFunction, p0: f64, w: &Weight) -> Result<f64> {
    check_weight(f, w)?;
    if !(p0 > 1.0 && p0.is_finite()) {
        return Err(Error::OutOfRange {
            name: "p0",
            value: p0,
            range: "(1, ∞)",
        });
    }
    let sum: f64 = f
        .values()
        .iter()
        .zip(w.values())
        .map(|(v, w)| v.norm().powf(p0) * w)
        .sum();
    Ok((sum / f.values().len() as f64).powf(1.0 / p0))
}

/// `| ‖f‖_{L^{p}_w} − ‖|f|^s‖_{L^{p/s}_{w^s}}^{1/s} |`, both sides by independent bisections.
pub fn scaling_identity_residual(f: &GridFunction, p: &Exponent, w: &Weight, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < p.p_minus()) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "(0, p_minus)",
        });
    }
    check_grid(f, p)?;
    check_weight(f, w)?;
    let lhs = weighted_variable_norm(f, p, w)?;
    let ws = w.power(s);
    let abs: Vec<f64> = f
        .values()
        .iter()
        .zip(ws.values())
        .map(|(v, w)| v.norm().powf(s) * w)
        .collect();
    let rhs = luxemburg_norm_abs(&abs, &p.scaled(s))?.powf(1.0 / s);
    Ok((lhs - rhs).abs())
}

/// `λ · |{|g| > λ}| / ‖u‖_1` for each `λ`.
pub fn weak11_profile(g: &GridFunction, u: &GridFunction, lambdas: &[f64]) -> Result<Vec<f64>> {
    if g.grid() != u.grid() {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", g.grid(), u.grid())));
    }
    let n = u.values().len() as f64;
    let l1 = u.values().iter().map(|v| v.norm()).sum::<f64>() / n;
    if l1 == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let abs = g.abs();
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let count = abs.iter().filter(|&&v| v > lambda).count() as f64;
            count / n * lambda / l1
        })
        .collect())
}
