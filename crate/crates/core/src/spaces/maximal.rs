use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::torus::{GridFunction, TorusGrid};

/// Periodic balls `B(x, 2^{−k})`, `k = 1..=levels`, centred at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct BallFamily {
    grid: TorusGrid,
    levels: usize,
    // per radius: grid-index offsets (one per axis, in 0..M) of the ball about the origin
    offsets: Vec<Vec<Vec<usize>>>,
}

impl BallFamily {
    pub fn new(grid: TorusGrid, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter("ball family needs at least one radius".into()));
        }
        let m = grid.samples_per_axis();
        let offsets = (1..=levels)
            .map(|k| {
                let r_cells = m as f64 / (1u64 << k) as f64;
                let limit = r_cells * r_cells;
                (0..grid.len())
                    .filter_map(|i| {
                        let c = grid.coords(i);
                        let d2: f64 = c
                            .iter()
                            .map(|&v| {
                                let w = v.min(m - v) as f64;
                                w * w
                            })
                            .sum();
                        (d2 <= limit).then_some(c)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { grid, levels, offsets })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn radii(&self) -> Vec<f64> {
        (1..=self.levels).map(|k| 1.0 / (1u64 << k) as f64).collect()
    }

    /// Grid indices of `B(center, 2^{−level})`, `level` in `1..=levels`.
    pub fn ball(&self, center: usize, level: usize) -> Vec<usize> {
        let m = self.grid.samples_per_axis();
        let c = self.grid.coords(center);
        self.offsets[level - 1]
            .iter()
            .map(|o| {
                let shifted: Vec<usize> = c.iter().zip(o).map(|(a, b)| (a + b) % m).collect();
                self.grid.index_of(&shifted)
            })
            .collect()
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid(), self.grid)));
        }
        Ok(())
    }

    fn per_point(&self, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
        (0..self.grid.len()).into_par_iter().map(f).collect()
    }
}

/// `Mf(x) = max_r ⨍_{B(x,r)} |f|`.
pub fn maximal(f: &GridFunction, balls: &BallFamily) -> Result<GridFunction> {
    balls.check(f)?;
    let abs = f.abs();
    let values = balls.per_point(|x| {
        (1..=balls.levels)
            .map(|k| {
                let b = balls.ball(x, k);
                b.iter().map(|&i| abs[i]).sum::<f64>() / b.len() as f64
            })
            .fold(0.0, f64::max)
    });
    GridFunction::from_real(*f.grid(), values)
}

/// `M^# f(x) = max_r ⨍_{B(x,r)} |f − f_B|` with `f_B` the plain ball average.
pub fn sharp_maximal(f: &GridFunction, balls: &BallFamily) -> Result<GridFunction> {
    balls.check(f)?;
    let v = f.values();
    let values = balls.per_point(|x| {
        (1..=balls.levels)
            .map(|k| {
                let b = balls.ball(x, k);
                let n = b.len() as f64;
                let avg = b.iter().map(|&i| v[i]).sum::<Complex64>() / n;
                b.iter().map(|&i| (v[i] - avg).norm()).sum::<f64>() / n
            })
            .fold(0.0, f64::max)
    });
    GridFunction::from_real(*f.grid(), values)
}

/// `M_s^# f = (M^#(|f|^s))^{1/s}`.
pub fn m_sharp_s(f: &GridFunction, s: f64, balls: &BallFamily) -> Result<GridFunction> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "(0, 1)",
        });
    }
    let powered = GridFunction::from_real(*f.grid(), f.abs().iter().map(|a| a.powf(s)).collect())?;
    let sharp = sharp_maximal(&powered, balls)?;
    GridFunction::from_real(*f.grid(), sharp.values().iter().map(|v| v.re.powf(1.0 / s)).collect())
}
