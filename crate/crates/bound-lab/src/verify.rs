//! Exact-identity and calibration suites run by `bound-lab verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use torus_fio::fio::{lr_identity_residual, FioOperator};
use torus_fio::symbol::{Phase, PsiKind, PsiTable, Symbol, SymbolKind, SymbolSpec};
use torus_fio::torus::{
    diff_via_binomial_shifts, fourier_forward, fourier_inverse, multi_diff, summation_by_parts_residual, DiffKind,
    GridFunction, LatticeBox, LatticeTable, MultiIndex, SpectralFunction, TorusGrid,
};
use torus_fio::Error;

use crate::error::LabResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyEntry {
    fn new(name: &str, cases: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            cases,
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub entries: Vec<VerifyEntry>,
    pub pass: bool,
}

fn unit_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_alpha(rng: &mut ChaCha8Rng, dim: usize, max_order: usize) -> MultiIndex {
    let order = rng.random_range(0..=max_order);
    let mut a = vec![0; dim];
    for _ in 0..order {
        a[rng.random_range(0..dim)] += 1;
    }
    MultiIndex::new(a)
}

/// Summation by parts on random pairs supported away from the box boundary.
pub fn summation_by_parts_suite(rng: &mut ChaCha8Rng, cases: usize) -> LabResult<VerifyEntry> {
    let mut worst = 0.0f64;
    for k in 0..cases {
        let dim = 1 + k % 2;
        let r = 7i64;
        let alpha = random_alpha(rng, dim, 3);
        let inner = r - alpha.order() as i64;
        let mut support = || {
            LatticeTable::from_fn(vec![-r; dim], vec![r; dim], |xi| {
                if xi.iter().all(|v| v.abs() < inner) {
                    unit_complex(rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        };
        let phi = support()?;
        let psi = support()?;
        worst = worst.max(summation_by_parts_residual(&phi, &psi, &alpha)?);
    }
    Ok(VerifyEntry::new("summation_by_parts", cases, worst, 1e-12))
}

/// Composed forward differences against the binomial shift formula.
pub fn binomial_suite(rng: &mut ChaCha8Rng, cases: usize) -> LabResult<VerifyEntry> {
    let mut worst = 0.0f64;
    for k in 0..cases {
        let dim = 1 + k % 2;
        let r = if dim == 1 { 12 } else { 5 };
        let g = LatticeTable::from_fn(vec![-r; dim], vec![r; dim], |_| unit_complex(rng))?;
        let alpha = random_alpha(rng, dim, 3);
        let a = multi_diff(&g, &alpha, DiffKind::Forward)?;
        let b = diff_via_binomial_shifts(&g, &alpha)?;
        worst = worst.max(a.max_abs_diff(&b)?);
    }
    Ok(VerifyEntry::new("difference_binomial_expansion", cases, worst, 1e-12))
}

/// The termwise difference identity for the kernel exponential at admissible points.
pub fn lr_identity_suite(rng: &mut ChaCha8Rng, cases: usize) -> LabResult<VerifyEntry> {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < cases {
        let dim = 1 + done % 2;
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let xi: Vec<i64> = (0..dim).map(|_| rng.random_range(-20..=20)).collect();
        let alpha = random_alpha(rng, dim, 3);
        match lr_identity_residual(&x, &y, &xi, unit_complex(rng), &alpha) {
            Ok(r) => {
                worst = worst.max(r);
                done += 1;
            }
            Err(Error::GuardViolated { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(VerifyEntry::new("kernel_difference_identity", cases, worst, 1e-11))
}

/// The symbol library used for calibration, all of order `m`.
pub fn symbol_library(grid: TorusGrid, lattice: LatticeBox, m: f64) -> LabResult<Vec<Symbol>> {
    let mut out = Vec::new();
    for kind in [
        SymbolKind::Bracket,
        SymbolKind::ModulatedBracket,
        SymbolKind::CosineBracket,
        SymbolKind::Identity,
        SymbolKind::Indicator,
    ] {
        out.push(SymbolSpec::new(kind, m).build(grid, lattice)?);
    }
    let mut trig = SymbolSpec::new(SymbolKind::RandomTrig, m);
    trig.parameters.degree = 3;
    trig.seed = 1;
    out.push(trig.build(grid, lattice)?);
    Ok(out)
}

/// Transform and operator calibration on a 1D grid with `M` samples and box radius `N`.
pub fn calibration_suite(rng: &mut ChaCha8Rng, m: usize, n: usize) -> LabResult<Vec<VerifyEntry>> {
    let grid = TorusGrid::new(1, m)?;
    let lattice = LatticeBox::new(1, n)?;
    let s = SpectralFunction::from_fn(lattice, |_| unit_complex(rng));
    let f = fourier_inverse(&s, &grid)?;
    let back = fourier_forward(&f, &lattice)?;
    let round_trip = back
        .coeffs()
        .iter()
        .zip(s.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let l2 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64;
    let parseval = (l2 - s.energy()).abs() / l2;

    let phases = [
        Phase::linear(grid, lattice)?,
        Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, PsiKind::Norm))?,
    ];
    let mut harmonic = 0.0f64;
    let mut routes = 0.0f64;
    let mut decomposition = 0.0f64;
    let mut operators = 0;
    for phase in &phases {
        for a in symbol_library(grid, lattice, -1.0)? {
            let op = FioOperator::new(phase.clone(), a.clone())?;
            operators += 1;
            for xi0 in [-(n as i64), -7, 0, 3, n as i64] {
                let h = GridFunction::from_fn(grid, |x| Complex64::from_polar(1.0, 2.0 * PI * xi0 as f64 * x[0]));
                let ah = op.apply(&h)?;
                let j = lattice.index_of(&[xi0]).unwrap();
                for x in 0..m {
                    let expected = Complex64::from_polar(1.0, 2.0 * PI * phase.eval(x, &[xi0])?) * a.at(x, j);
                    harmonic = harmonic.max((ah.values()[x] - expected).norm());
                }
            }
            let spectral = op.apply(&f)?;
            let kernel = op.kernel()?.apply(&f)?;
            routes = routes.max(spectral.max_abs_diff(&kernel)? / spectral.max_abs().max(1e-300));
            decomposition = decomposition.max(op.multiplier_decomposition_residual(&f)?);
        }
    }
    Ok(vec![
        VerifyEntry::new("transform_round_trip", 1, round_trip, 1e-12),
        VerifyEntry::new("parseval", 1, parseval, 1e-12),
        VerifyEntry::new("apply_on_harmonics", operators * 5, harmonic, 1e-10),
        VerifyEntry::new("kernel_vs_spectral_route", operators, routes, 1e-10),
        VerifyEntry::new("multiplier_decomposition", operators, decomposition, 1e-10),
    ])
}

/// Every exact-identity suite, each drawing from its own seeded stream.
pub fn run_verify(seed: u64) -> LabResult<VerifyReport> {
    let rng = |stream: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    };
    let mut entries = vec![
        summation_by_parts_suite(&mut rng(0), 50)?,
        binomial_suite(&mut rng(1), 50)?,
        lr_identity_suite(&mut rng(2), 100)?,
    ];
    entries.extend(calibration_suite(&mut rng(3), 256, 64)?);
    let pass = entries.iter().all(|e| e.pass);
    Ok(VerifyReport { seed, entries, pass })
}
