use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use torus_fio::fio::*;
use torus_fio::symbol::*;
use torus_fio::torus::*;

fn library(grid: TorusGrid, lattice: LatticeBox) -> Vec<Symbol> {
    let mut out = Vec::new();
    for kind in [
        SymbolKind::Bracket,
        SymbolKind::ModulatedBracket,
        SymbolKind::CosineBracket,
        SymbolKind::Identity,
        SymbolKind::Indicator,
    ] {
        out.push(SymbolSpec::new(kind, -1.0).build(grid, lattice).unwrap());
    }
    let mut spec = SymbolSpec::new(SymbolKind::RandomTrig, -2.0);
    spec.parameters.degree = 2;
    spec.seed = 17;
    out.push(spec.build(grid, lattice).unwrap());
    out
}

fn phases(grid: TorusGrid, lattice: LatticeBox) -> Vec<Phase> {
    vec![
        Phase::linear(grid, lattice).unwrap(),
        Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, PsiKind::Norm)).unwrap(),
        Phase::general_from_remainder(grid, lattice, |x, xi| {
            0.3 * (2.0 * PI * x[0]).sin() * xi[0] as f64 / japanese_bracket(xi)
        })
        .unwrap(),
    ]
}

fn random_band_limited(rng: &mut ChaCha8Rng, grid: TorusGrid, lattice: LatticeBox) -> GridFunction {
    let s = SpectralFunction::from_fn(lattice, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    fourier_inverse(&s, &grid).unwrap()
}

#[test]
fn spectral_and_kernel_routes_agree_on_the_library() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (dim, m, n) in [(1, 48, 16), (2, 12, 4)] {
        let grid = TorusGrid::new(dim, m).unwrap();
        let lattice = LatticeBox::new(dim, n).unwrap();
        let f = random_band_limited(&mut rng, grid, lattice);
        for phase in phases(grid, lattice) {
            for a in library(grid, lattice) {
                let op = FioOperator::new(phase.clone(), a).unwrap();
                let spectral = op.apply(&f).unwrap();
                let kernel = op.kernel().unwrap().apply(&f).unwrap();
                let scale = spectral.max_abs().max(1e-300);
                assert!(spectral.max_abs_diff(&kernel).unwrap() < 1e-10 * scale.max(1.0));
            }
        }
    }
}

#[test]
fn harmonics_are_mapped_to_oscillating_symbol_values() {
    let grid = TorusGrid::new(1, 32).unwrap();
    let lattice = LatticeBox::new(1, 10).unwrap();
    for phase in phases(grid, lattice) {
        let a = library(grid, lattice).pop().unwrap();
        let op = FioOperator::new(phase.clone(), a.clone()).unwrap();
        for xi0 in [-10i64, -3, 0, 7] {
            let f = GridFunction::from_fn(grid, |x| Complex64::from_polar(1.0, 2.0 * PI * xi0 as f64 * x[0]));
            let af = op.apply(&f).unwrap();
            let j = lattice.index_of(&[xi0]).unwrap();
            for x in 0..grid.len() {
                let expected = Complex64::from_polar(1.0, 2.0 * PI * phase.eval(x, &[xi0]).unwrap()) * a.at(x, j);
                assert!((af.values()[x] - expected).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn multiplier_matches_direct_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = TorusGrid::new(1, 20).unwrap();
    let lattice = LatticeBox::new(1, 8).unwrap();
    let coeff = LatticeTable::over_box(&lattice, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let f = GridFunction::new(grid, (0..20).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect()).unwrap();
    let fast = apply_multiplier(&coeff, &f).unwrap();
    for xk in 0..20 {
        let x = xk as f64 / 20.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for xi in -8i64..=8 {
            let mut fh = Complex64::new(0.0, 0.0);
            for yk in 0..20 {
                fh += f.values()[yk] * Complex64::from_polar(1.0, -2.0 * PI * xi as f64 * yk as f64 / 20.0);
            }
            acc += Complex64::from_polar(1.0, 2.0 * PI * xi as f64 * x) * coeff.get(&[xi]).unwrap() * fh / 20.0;
        }
        assert!((fast.values()[xk] - acc).norm() < 1e-12);
    }
}

#[test]
fn multiplier_decomposition_on_random_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (dim, m, n) in [(1, 64, 20), (2, 12, 4)] {
        let grid = TorusGrid::new(dim, m).unwrap();
        let lattice = LatticeBox::new(dim, n).unwrap();
        let f = random_band_limited(&mut rng, grid, lattice);
        let mut spec = SymbolSpec::new(SymbolKind::RandomTrig, -1.0);
        spec.parameters.degree = 2;
        spec.seed = 99;
        let a = spec.build(grid, lattice).unwrap();
        let phase = Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, PsiKind::Norm)).unwrap();
        let op = FioOperator::new(phase, a).unwrap();
        assert!(op.multiplier_decomposition_residual(&f).unwrap() < 1e-10);
    }
}

#[test]
fn kernel_derivative_sups_settle_for_fast_decay() {
    let grid = TorusGrid::new(1, 128).unwrap();
    let sups = |n: usize| {
        let lattice = LatticeBox::new(1, n).unwrap();
        let a = SymbolSpec::new(SymbolKind::CosineBracket, -3.0).build(grid, lattice).unwrap();
        FioOperator::new(Phase::linear(grid, lattice).unwrap(), a).unwrap().kernel_derivative_sups().unwrap()
    };
    let (x1, y1) = sups(24);
    let (x2, y2) = sups(48);
    assert!(((x2 - x1) / x1).abs() < 0.1 && ((y2 - y1) / y1).abs() < 0.1, "{x1} {x2} {y1} {y2}");
}

#[test]
fn convolution_kernels_have_antisymmetric_derivatives() {
    let grid = TorusGrid::new(2, 10).unwrap();
    let lattice = LatticeBox::new(2, 4).unwrap();
    let a = SymbolSpec::new(SymbolKind::Bracket, -2.0).build(grid, lattice).unwrap();
    let op = FioOperator::new(Phase::linear(grid, lattice).unwrap(), a).unwrap();
    for axis in 0..2 {
        let dx = op.kernel_x_derivative(axis).unwrap();
        let dy = op.kernel_y_derivative(axis).unwrap();
        let scale = dx.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (u, v) in dx.values().iter().zip(dy.values()) {
            assert!((u + v).norm() < 1e-10 * scale);
        }
    }
}

#[test]
fn kernel_x_derivative_matches_spectral_differentiation_of_rows() {
    // For a general phase, differentiate each column x ↦ K(x, y) spectrally on a finer grid.
    let lattice = LatticeBox::new(1, 5).unwrap();
    let remainder = |x: &[f64], xi: &[i64]| 0.2 * (2.0 * PI * x[0]).cos() * xi[0] as f64 / japanese_bracket(xi);
    let coarse = TorusGrid::new(1, 16).unwrap();
    let fine = TorusGrid::new(1, 256).unwrap();
    let build = |grid: TorusGrid| {
        let a = SymbolSpec::new(SymbolKind::CosineBracket, -1.0).build(grid, lattice).unwrap();
        FioOperator::new(Phase::general_from_remainder(grid, lattice, remainder).unwrap(), a).unwrap()
    };
    let d = build(coarse).kernel_x_derivative(0).unwrap();
    let k_fine = build(fine).kernel().unwrap();
    for y in 0..16 {
        let column: Vec<Complex64> = (0..256).map(|x| k_fine.get(x, y * 16)).collect();
        let col = GridFunction::new(fine, column).unwrap();
        let dc = spectral_derivative(&col, &MultiIndex::new(vec![1])).unwrap();
        for x in 0..16 {
            let expected = dc.values()[x * 16];
            assert!((d.get(x, y) - expected).norm() < 1e-6 * expected.norm().max(1.0));
        }
    }
}

#[test]
fn termwise_identity_in_two_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 200 {
        let x = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let y = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let xi = [rng.random_range(-20i64..=20), rng.random_range(-20i64..=20)];
        let alpha = MultiIndex::new(vec![rng.random_range(0..=3), rng.random_range(0..=3)]);
        if alpha.order() > 3 {
            continue;
        }
        let a_val = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        match lr_identity_residual(&x, &y, &xi, a_val, &alpha) {
            Ok(r) => {
                assert!(r < 1e-11, "{r}");
                checked += 1;
            }
            Err(torus_fio::Error::GuardViolated { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn apply_is_linear(seed in any::<u64>(), c_re in -2.0f64..2.0, c_im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = TorusGrid::new(1, 24).unwrap();
        let lattice = LatticeBox::new(1, 8).unwrap();
        let f = random_band_limited(&mut rng, grid, lattice);
        let g = random_band_limited(&mut rng, grid, lattice);
        let c = Complex64::new(c_re, c_im);
        let a = SymbolSpec::new(SymbolKind::CosineBracket, -1.0).build(grid, lattice).unwrap();
        let op = FioOperator::new(Phase::linear_plus_psi(grid, PsiTable::from_kind(lattice, PsiKind::L1)).unwrap(), a).unwrap();
        let lhs = op.apply(&f.scale(c).add(&g).unwrap()).unwrap();
        let rhs = op.apply(&f).unwrap().scale(c).add(&op.apply(&g).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn identity_operator_is_a_projection(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = TorusGrid::new(1, 20).unwrap();
        let lattice = LatticeBox::new(1, 6).unwrap();
        let f = GridFunction::new(grid, (0..20).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect()).unwrap();
        let a = SymbolSpec::new(SymbolKind::Identity, 0.0).build(grid, lattice).unwrap();
        let op = FioOperator::new(Phase::linear(grid, lattice).unwrap(), a).unwrap();
        let once = op.apply(&f).unwrap();
        let twice = op.apply(&once).unwrap();
        prop_assert!(once.max_abs_diff(&twice).unwrap() < 1e-12);
    }
}
