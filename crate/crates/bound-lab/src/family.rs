use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use torus_fio::torus::{fourier_inverse, japanese_bracket, periodic_distance, GridFunction, LatticeBox, SpectralFunction, TorusGrid};

use crate::error::LabResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Pure characters `e^{2πiξ·x}`, in box order.
    Harmonics,
    /// Complex Gaussian coefficients tapered by `⟨ξ⟩^{-(n+1)/2}`.
    RandomBandlimited,
    /// Smooth compactly supported bumps with random centers and widths.
    Bumps,
}

/// Lattice points of the box ordered by sup-norm shell, lexicographic within a shell.
///
/// The order of points with `|ξ|_∞ ≤ r` does not depend on the box radius,
/// which is what makes random families nested across truncations.
pub fn shell_order(lattice: &LatticeBox) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = lattice.points().collect();
    pts.sort_by_key(|xi| (xi.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0), xi.clone()));
    pts
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random band-limited spectrum for member `index`; a prefix of the same draw for smaller boxes.
pub fn random_spectrum(lattice: LatticeBox, seed: u64, index: usize) -> SpectralFunction {
    let mut rng = stream(seed, index);
    let taper = -((lattice.dim() + 1) as f64) / 2.0;
    let mut s = SpectralFunction::zeros(lattice);
    for xi in shell_order(&lattice) {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let k = lattice.index_of(&xi).unwrap();
        s.coeffs_mut()[k] = Complex64::new(re, im) * japanese_bracket(&xi).powf(taper);
    }
    s
}

fn bump(grid: TorusGrid, center: &[f64], width: f64) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        let r = periodic_distance(x, center) / width;
        if r < 1.0 {
            Complex64::new((1.0 - 1.0 / (1.0 - r * r)).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `count` deterministic test functions sampled on `grid`.
///
/// Random families depend only on `(seed, index)`, never on `M`, so the same
/// functions are sampled when the grid is refined.
pub fn gen_test_family(
    kind: FamilyKind,
    count: usize,
    seed: u64,
    grid: TorusGrid,
    lattice: LatticeBox,
) -> LabResult<Vec<GridFunction>> {
    match kind {
        FamilyKind::Harmonics => shell_order(&lattice)
            .into_iter()
            .take(count)
            .map(|xi| Ok(fourier_inverse(&SpectralFunction::indicator(lattice, &xi)?, &grid)?))
            .collect(),
        FamilyKind::RandomBandlimited => (0..count)
            .map(|i| Ok(fourier_inverse(&random_spectrum(lattice, seed, i), &grid)?))
            .collect(),
        FamilyKind::Bumps => Ok((0..count)
            .map(|i| {
                let mut rng = stream(seed, i);
                let center: Vec<f64> = (0..grid.dim()).map(|_| rng.random_range(0.0..1.0)).collect();
                let width = rng.random_range(0.05..0.3);
                bump(grid, &center, width)
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_are_nested() {
        let small = shell_order(&LatticeBox::new(2, 2).unwrap());
        let large = shell_order(&LatticeBox::new(2, 5).unwrap());
        assert_eq!(small[..], large[..small.len()]);
        assert_eq!(small[0], vec![0, 0]);
    }

    #[test]
    fn random_families_are_nested_and_deterministic() {
        let a = random_spectrum(LatticeBox::new(1, 4).unwrap(), 3, 7);
        let b = random_spectrum(LatticeBox::new(1, 9).unwrap(), 3, 7);
        for xi in -4i64..=4 {
            assert_eq!(a.get(&[xi]), b.get(&[xi]));
        }
        assert_eq!(a, random_spectrum(LatticeBox::new(1, 4).unwrap(), 3, 7));
        assert_ne!(a, random_spectrum(LatticeBox::new(1, 4).unwrap(), 3, 8));
    }

    #[test]
    fn harmonics_have_unit_modulus() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let fam = gen_test_family(FamilyKind::Harmonics, 100, 0, grid, LatticeBox::new(1, 3).unwrap()).unwrap();
        assert_eq!(fam.len(), 7);
        for f in &fam {
            assert!(f.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn bumps_are_supported_and_bounded() {
        let grid = TorusGrid::new(2, 32).unwrap();
        let fam = gen_test_family(FamilyKind::Bumps, 5, 9, grid, LatticeBox::new(2, 4).unwrap()).unwrap();
        for f in &fam {
            let max = f.max_abs();
            assert!(max > 0.0 && max <= 1.0);
            assert!(f.values().iter().any(|v| v.norm() == 0.0));
        }
    }
}
