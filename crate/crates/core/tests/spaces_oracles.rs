use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use torus_fio::spaces::*;
use torus_fio::torus::*;

fn random_real(rng: &mut ChaCha8Rng, grid: TorusGrid) -> GridFunction {
    GridFunction::from_real(grid, (0..grid.len()).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap()
}

fn power_weight(grid: TorusGrid, alpha: f64) -> Weight {
    structured_weight(
        0.0,
        &[WeightFactor {
            center: vec![0.0; grid.dim()],
            exponent: alpha,
        }],
        grid,
    )
    .unwrap()
}

// Exhaustive enumeration of all (center, radius) pairs with explicit periodic distances.
fn maximal_oracle(f: &GridFunction, levels: usize, sharp: bool) -> Vec<f64> {
    let grid = f.grid();
    let pts: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
    (0..grid.len())
        .map(|x| {
            let mut best = 0.0f64;
            for k in 1..=levels {
                let r = 0.5f64.powi(k as i32);
                let members: Vec<usize> = (0..grid.len()).filter(|&y| periodic_distance(&pts[x], &pts[y]) <= r).collect();
                let n = members.len() as f64;
                let value = if sharp {
                    let avg: Complex64 = members.iter().map(|&y| f.values()[y]).sum::<Complex64>() / n;
                    members.iter().map(|&y| (f.values()[y] - avg).norm()).sum::<f64>() / n
                } else {
                    members.iter().map(|&y| f.values()[y].norm()).sum::<f64>() / n
                };
                best = best.max(value);
            }
            best
        })
        .collect()
}

#[test]
fn maximal_operators_match_enumeration() {
    let grid = TorusGrid::new(1, 128).unwrap();
    let balls = BallFamily::new(grid, 6).unwrap();
    let indicator = GridFunction::from_fn(grid, |x| Complex64::new(if x[0] < 0.5 { 1.0 } else { 0.0 }, 0.0));
    let sawtooth = GridFunction::from_fn(grid, |x| Complex64::new(x[0], 0.0));
    for f in [&indicator, &sawtooth] {
        let m = maximal(f, &balls).unwrap();
        let s = sharp_maximal(f, &balls).unwrap();
        for (u, v) in m.values().iter().zip(maximal_oracle(f, 6, false)) {
            assert!((u.re - v).abs() < 1e-12);
        }
        for (u, v) in s.values().iter().zip(maximal_oracle(f, 6, true)) {
            assert!((u.re - v).abs() < 1e-12);
        }
    }
}

#[test]
fn maximal_dominates_smallest_ball_average_and_sharp_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = TorusGrid::new(2, 16).unwrap();
    let balls = BallFamily::new(grid, 4).unwrap();
    let f = random_real(&mut rng, grid);
    let m = maximal(&f, &balls).unwrap();
    let s = sharp_maximal(&f, &balls).unwrap();
    let abs = f.abs();
    for x in 0..grid.len() {
        let b = balls.ball(x, 4);
        let avg = b.iter().map(|&i| abs[i]).sum::<f64>() / b.len() as f64;
        assert!(m.values()[x].re >= avg);
        assert!(s.values()[x].re <= 2.0 * m.values()[x].re + 1e-12);
    }
}

#[test]
fn m_sharp_s_is_the_composition_and_approaches_s_one() {
    let grid = TorusGrid::new(1, 64).unwrap();
    let balls = BallFamily::new(grid, 5).unwrap();
    let f = GridFunction::from_fn(grid, |x| Complex64::new(2.0 + (2.0 * PI * x[0]).sin(), 0.0));
    let composed = {
        let p = GridFunction::from_real(grid, f.abs().iter().map(|a| a.powf(0.5)).collect()).unwrap();
        let s = sharp_maximal(&p, &balls).unwrap();
        GridFunction::from_real(grid, s.values().iter().map(|v| v.re.powf(2.0)).collect()).unwrap()
    };
    assert_eq!(m_sharp_s(&f, 0.5, &balls).unwrap(), composed);
    let near = m_sharp_s(&f, 0.999, &balls).unwrap();
    let plain = sharp_maximal(&GridFunction::from_real(grid, f.abs()).unwrap(), &balls).unwrap();
    for (a, b) in near.values().iter().zip(plain.values()) {
        assert!((a.re - b.re).abs() <= 0.01 * b.re);
    }
}

#[test]
fn constant_exponent_reduction_and_unit_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = TorusGrid::new(1, 96).unwrap();
    for p0 in [1.5, 2.0, 3.0] {
        let f = random_real(&mut rng, grid);
        let p = Exponent::constant(grid, p0).unwrap();
        let closed = (f.abs().iter().map(|a| a.powf(p0)).sum::<f64>() / 96.0).powf(1.0 / p0);
        let lux = luxemburg_norm(&f, &p).unwrap();
        assert!(((lux - closed) / closed).abs() < 1e-8);
    }
    let p = ExponentSpec::Sinusoidal { mean: 2.0, amplitude: 0.5 }.build(grid).unwrap();
    let f = random_real(&mut rng, grid);
    let n = luxemburg_norm(&f, &p).unwrap();
    let m = modular(&f.scale(Complex64::new(1.0 / n, 0.0)), &p).unwrap();
    assert!((m - 1.0).abs() < 1e-8);
}

#[test]
fn weighted_l2_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = TorusGrid::new(1, 80).unwrap();
    let w = structured_weight(
        0.3,
        &[WeightFactor {
            center: vec![0.25],
            exponent: 0.4,
        }],
        grid,
    )
    .unwrap();
    let f = random_real(&mut rng, grid);
    let quad = (f.values().iter().zip(w.values()).map(|(v, w)| v.norm_sqr() * w * w).sum::<f64>() / 80.0).sqrt();
    let two = Exponent::constant(grid, 2.0).unwrap();
    assert!(((weighted_variable_norm(&f, &two, &w).unwrap() - quad) / quad).abs() < 1e-8);
}

#[test]
fn scaling_identity_on_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = TorusGrid::new(1, 64).unwrap();
    let p = ExponentSpec::Sinusoidal { mean: 2.0, amplitude: 0.25 }.build(grid).unwrap();
    let w = structured_weight(
        0.2,
        &[WeightFactor {
            center: vec![0.0],
            exponent: 0.2,
        }],
        grid,
    )
    .unwrap();
    for s in [0.25, 0.5, 0.75] {
        for _ in 0..10 {
            let f = random_real(&mut rng, grid);
            assert!(scaling_identity_residual(&f, &p, &w, s).unwrap() < 1e-7);
        }
        let c = GridFunction::constant(grid, Complex64::new(1.7, 0.0));
        assert!(scaling_identity_residual(&c, &p, &w, s).unwrap() < 1e-8);
    }
}

#[test]
fn log_holder_sinusoid_is_refinement_stable() {
    let spec = ExponentSpec::Sinusoidal { mean: 2.0, amplitude: 0.25 };
    let a = spec.build(TorusGrid::new(1, 128).unwrap()).unwrap().log_holder_constant();
    let b = spec.build(TorusGrid::new(1, 256).unwrap()).unwrap().log_holder_constant();
    assert!(a > 0.0 && ((b - a) / a).abs() < 0.1, "{a} {b}");
}

#[test]
fn muckenhoupt_refinement_is_monotone_and_stable_for_admissible_powers() {
    let grid = TorusGrid::new(1, 512).unwrap();
    let w = power_weight(grid, 0.5);
    let mut prev = 0.0;
    for d in 0..=9 {
        let c = muckenhoupt_constant(&w, 2.0, &CubeFamily::new(d)).unwrap();
        assert!(c >= prev - 1e-12);
        prev = c;
    }
    let d6 = structured_muckenhoupt_constant(1, 0.0, &[WeightFactor { center: vec![0.0], exponent: 0.5 }], 2.0, 6).unwrap();
    let d8 = structured_muckenhoupt_constant(1, 0.0, &[WeightFactor { center: vec![0.0], exponent: 0.5 }], 2.0, 8).unwrap();
    assert!(d8 / d6 < 1.1);
}

#[test]
fn a1_constants_under_refinement() {
    let at = |m: usize, w: &dyn Fn(TorusGrid) -> Weight| {
        let grid = TorusGrid::new(1, m).unwrap();
        a1_constant(&w(grid), &BallFamily::new(grid, 6).unwrap()).unwrap()
    };
    let cosine = |g: TorusGrid| WeightSpec::Cosine { mean: 2.0, amplitude: 1.0 }.build(g).unwrap();
    let (c1, c2) = (at(128, &cosine), at(256, &cosine));
    assert!(c1 >= 1.0 && ((c2 - c1) / c1).abs() < 0.05);
    let singular = |g: TorusGrid| power_weight(g, -0.5);
    let (s1, s2, s3) = (at(128, &singular), at(256, &singular), at(512, &singular));
    assert!(s1.is_finite() && s2 / s1 < 1.5 && s3 / s2 < 1.5, "{s1} {s2} {s3}");
}

#[test]
fn power_weight_inequality_on_structured_suite() {
    let grid = TorusGrid::new(1, 256).unwrap();
    let cubes = CubeFamily::new(8);
    for alpha in [-0.5, 0.25, 0.5] {
        for delta in [0.25, 0.5, 0.75] {
            let r = weight_power_check(&power_weight(grid, alpha), 2.0, delta, &cubes).unwrap();
            assert!(r.holds(1e-3), "{r:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn luxemburg_is_a_norm(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = TorusGrid::new(1, 48).unwrap();
        let p = ExponentSpec::Sinusoidal { mean: 2.2, amplitude: 0.6 }.build(grid).unwrap();
        let f = random_real(&mut rng, grid);
        let g = random_real(&mut rng, grid);
        let nf = luxemburg_norm(&f, &p).unwrap();
        let ng = luxemburg_norm(&g, &p).unwrap();
        let scaled = luxemburg_norm(&f.scale(Complex64::new(c, 0.0)), &p).unwrap();
        prop_assert!((scaled - c.abs() * nf).abs() < 1e-8 * nf.max(1.0));
        prop_assert!(luxemburg_norm(&f.add(&g).unwrap(), &p).unwrap() <= nf + ng + 1e-8);
        prop_assert!(nf > 0.0);
    }

    #[test]
    fn maximal_is_sublinear(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = TorusGrid::new(1, 32).unwrap();
        let balls = BallFamily::new(grid, 4).unwrap();
        let f = random_real(&mut rng, grid);
        let g = random_real(&mut rng, grid);
        let mf = maximal(&f, &balls).unwrap();
        let mg = maximal(&g, &balls).unwrap();
        let msum = maximal(&f.add(&g).unwrap(), &balls).unwrap();
        let ssum = sharp_maximal(&f.add(&g).unwrap(), &balls).unwrap();
        let sf = sharp_maximal(&f, &balls).unwrap();
        let sg = sharp_maximal(&g, &balls).unwrap();
        for x in 0..32 {
            prop_assert!(msum.values()[x].re <= mf.values()[x].re + mg.values()[x].re + 1e-12);
            prop_assert!(ssum.values()[x].re <= sf.values()[x].re + sg.values()[x].re + 1e-12);
        }
        let mc = maximal(&f.scale(Complex64::new(c, 0.0)), &balls).unwrap();
        for (u, v) in mc.values().iter().zip(mf.values()) {
            prop_assert!((u.re - c.abs() * v.re).abs() <= 1e-14 * v.re.max(1.0));
        }
        let dyadic = (2.0f64).powi(c.round() as i32) * c.signum();
        let md = maximal(&f.scale(Complex64::new(dyadic, 0.0)), &balls).unwrap();
        for (u, v) in md.values().iter().zip(mf.values()) {
            prop_assert_eq!(u.re, dyadic.abs() * v.re);
        }
    }

    #[test]
    fn conjugate_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = TorusGrid::new(1, 32).unwrap();
        let p = Exponent::new(grid, (0..32).map(|_| rng.random_range(1.05..6.0)).collect(), None).unwrap();
        let q = conjugate_exponent(&p).unwrap();
        for (a, b) in p.values().iter().zip(q.values()) {
            prop_assert!((1.0 / a + 1.0 / b - 1.0).abs() < 1e-14);
        }
    }
}
