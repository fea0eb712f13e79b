//! The four-part decomposition of a grid function against a rectangular
//! block partition: block means (f11), the per-axis mean deviations
//! (f01, f10) and the doubly mean-zero residual (f00).
//!
//! Blocks are anchored at the grid origin; a support not divisible by
//! the block size is padded with zero cells to the next block boundary,
//! which changes nothing off the original support.

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Block side lengths, stored as whole cell counts per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tau {
    pub c1: usize,
    pub c2: usize,
}

impl Tau {
    pub fn from_cells(c1: usize, c2: usize) -> Result<Self> {
        if c1 == 0 || c2 == 0 {
            return Err(Error::InvalidArgument(
                "block size must be at least one cell per axis".into(),
            ));
        }
        Ok(Self { c1, c2 })
    }

    /// Block side lengths in physical units; must be whole multiples of
    /// the grid's cell sizes.
    pub fn from_lengths(tau1: f64, tau2: f64, f: &Grid2D) -> Result<Self> {
        let (h1, h2) = f.cells();
        let to_cells = |tau: f64, h: f64| -> Result<usize> {
            if !(tau > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "block length must be positive, got {tau}"
                )));
            }
            let c = tau / h;
            let r = c.round();
            if (c - r).abs() > 1e-9 * c.max(1.0) || r < 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "block length {tau} is not a whole multiple of the cell size {h}"
                )));
            }
            Ok(r as usize)
        };
        Self::from_cells(to_cells(tau1, h1)?, to_cells(tau2, h2)?)
    }

    pub fn lengths(&self, f: &Grid2D) -> (f64, f64) {
        let (h1, h2) = f.cells();
        (self.c1 as f64 * h1, self.c2 as f64 * h2)
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub f00: Grid2D,
    pub f01: Grid2D,
    pub f10: Grid2D,
    pub f11: Grid2D,
    pub tau: Tau,
    pub source_checksum: u64,
}

/// Maximum absolute violations of the structural mean-zero identities:
/// x1-integrals of f00 and f01 over every block strip vanish for every
/// x2 cell, and symmetrically for f00 and f10 in x2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroMeanReport {
    pub f00_x1: f64,
    pub f01_x1: f64,
    pub f00_x2: f64,
    pub f10_x2: f64,
}

impl ZeroMeanReport {
    pub fn max(&self) -> f64 {
        self.f00_x1.max(self.f01_x1).max(self.f00_x2).max(self.f10_x2)
    }
}

pub fn pad_to_blocks(f: &Grid2D, tau: Tau) -> Grid2D {
    let (n1, n2) = f.dims();
    let m1 = n1.div_ceil(tau.c1) * tau.c1;
    let m2 = n2.div_ceil(tau.c2) * tau.c2;
    if (m1, m2) == (n1, n2) {
        return f.clone();
    }
    let mut values = vec![0.0; m1 * m2];
    for i in 0..n1 {
        for j in 0..n2 {
            values[i * m2 + j] = f.value(i, j);
        }
    }
    Grid2D::new(f.origin(), f.cells(), m1, m2, values).expect("padded grid is valid")
}

pub fn decompose(f: &Grid2D, tau: Tau) -> Decomposition {
    let src = pad_to_blocks(f, tau);
    let (n1, n2) = src.dims();
    let (c1, c2) = (tau.c1, tau.c2);

    // row_avg[i][m]: mean over x2 within block column m at fixed x1 row i
    let blocks2 = n2 / c2;
    let blocks1 = n1 / c1;
    let mut row_avg = vec![0.0f64; n1 * blocks2];
    for i in 0..n1 {
        for m in 0..blocks2 {
            let s: f64 = (m * c2..(m + 1) * c2).map(|j| src.value(i, j)).sum();
            row_avg[i * blocks2 + m] = s / c2 as f64;
        }
    }
    // col_avg[k][j]: mean over x1 within block row k at fixed x2 column j
    let mut col_avg = vec![0.0f64; blocks1 * n2];
    for k in 0..blocks1 {
        for j in 0..n2 {
            let s: f64 = (k * c1..(k + 1) * c1).map(|i| src.value(i, j)).sum();
            col_avg[k * n2 + j] = s / c1 as f64;
        }
    }
    // block_avg[k][m]: mean over the whole block
    let mut block_avg = vec![0.0f64; blocks1 * blocks2];
    for k in 0..blocks1 {
        for m in 0..blocks2 {
            let s: f64 = (m * c2..(m + 1) * c2)
                .map(|j| col_avg[k * n2 + j])
                .sum();
            block_avg[k * blocks2 + m] = s / c2 as f64;
        }
    }

    let mut v00 = vec![0.0f64; n1 * n2];
    let mut v01 = vec![0.0f64; n1 * n2];
    let mut v10 = vec![0.0f64; n1 * n2];
    let mut v11 = vec![0.0f64; n1 * n2];
    for i in 0..n1 {
        let k = i / c1;
        for j in 0..n2 {
            let m = j / c2;
            let b = block_avg[k * blocks2 + m];
            let r = row_avg[i * blocks2 + m];
            let c = col_avg[k * n2 + j];
            let idx = i * n2 + j;
            v11[idx] = b;
            v01[idx] = r - b;
            v10[idx] = c - b;
            v00[idx] = src.value(i, j) - r - c + b;
        }
    }
    let mk = |values: Vec<f64>| {
        Grid2D::new(src.origin(), src.cells(), n1, n2, values).expect("component grid is valid")
    };
    Decomposition {
        f00: mk(v00),
        f01: mk(v01),
        f10: mk(v10),
        f11: mk(v11),
        tau,
        source_checksum: f.checksum(),
    }
}

pub fn check_zero_means(d: &Decomposition) -> ZeroMeanReport {
    let (n1, n2) = d.f00.dims();
    let (h1, h2) = d.f00.cells();
    let (c1, c2) = (d.tau.c1, d.tau.c2);
    let mut r = ZeroMeanReport { f00_x1: 0.0, f01_x1: 0.0, f00_x2: 0.0, f10_x2: 0.0 };
    for k in 0..n1 / c1 {
        for j in 0..n2 {
            let sum = |g: &Grid2D| -> f64 {
                (k * c1..(k + 1) * c1).map(|i| g.value(i, j) * h1).sum()
            };
            r.f00_x1 = r.f00_x1.max(sum(&d.f00).abs());
            r.f01_x1 = r.f01_x1.max(sum(&d.f01).abs());
        }
    }
    for m in 0..n2 / c2 {
        for i in 0..n1 {
            let sum = |g: &Grid2D| -> f64 {
                (m * c2..(m + 1) * c2).map(|j| g.value(i, j) * h2).sum()
            };
            r.f00_x2 = r.f00_x2.max(sum(&d.f00).abs());
            r.f10_x2 = r.f10_x2.max(sum(&d.f10).abs());
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_grid, GridFamily};

    fn demo() -> Grid2D {
        Grid2D::from_rows((0.0, 0.0), (1.0, 1.0), &[vec![1.0, 3.0], vec![5.0, 7.0]]).unwrap()
    }

    #[test]
    fn worked_two_by_two() {
        let d = decompose(&demo(), Tau::from_cells(2, 2).unwrap());
        assert_eq!(d.f11.values(), &[4.0; 4]);
        assert_eq!(d.f01.values(), &[-2.0, -2.0, 2.0, 2.0]);
        assert_eq!(d.f10.values(), &[-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(d.f00.values(), &[0.0; 4]);
        assert_eq!(check_zero_means(&d).max(), 0.0);
    }

    #[test]
    fn constant_grid() {
        let f = Grid2D::new((0.0, 0.0), (1.0, 1.0), 4, 6, vec![3.5; 24]).unwrap();
        let d = decompose(&f, Tau::from_cells(2, 3).unwrap());
        assert!(d.f11.values().iter().all(|&v| v == 3.5));
        assert!(d.f00.is_zero() && d.f01.is_zero() && d.f10.is_zero());
        let z = Grid2D::new((0.0, 0.0), (1.0, 1.0), 4, 6, vec![0.0; 24]).unwrap();
        let d = decompose(&z, Tau::from_cells(4, 2).unwrap());
        assert!(d.f00.is_zero() && d.f01.is_zero() && d.f10.is_zero() && d.f11.is_zero());
    }

    #[test]
    fn additive_family_has_zero_residual() {
        for seed in 0..5u64 {
            let f = random_grid(seed, 12, 8, (1.0, 1.0), GridFamily::Additive).unwrap();
            // tau must divide the dims: zero padding would truncate the
            // additive pattern inside boundary blocks.
            for (c1, c2) in [(1, 1), (2, 4), (3, 8), (6, 2), (12, 1)] {
                let d = decompose(&f, Tau::from_cells(c1, c2).unwrap());
                assert!(d.f00.max_abs() <= 1e-12, "seed {seed} tau ({c1},{c2})");
            }
        }
    }

    #[test]
    fn reconstruction_and_zero_means() {
        for seed in 0..8u64 {
            let f = random_grid(seed, 11, 7, (0.5, 2.0), GridFamily::Signed).unwrap();
            for (c1, c2) in [(1, 1), (2, 3), (4, 7), (11, 2)] {
                let d = decompose(&f, Tau::from_cells(c1, c2).unwrap());
                let sum = d
                    .f00
                    .add(&d.f01)
                    .unwrap()
                    .add(&d.f10)
                    .unwrap()
                    .add(&d.f11)
                    .unwrap();
                let padded = pad_to_blocks(&f, d.tau);
                let (n1, n2) = padded.dims();
                for i in 0..n1 {
                    for j in 0..n2 {
                        assert!(
                            (sum.value(i, j) - padded.value(i, j)).abs() <= 1e-12,
                            "seed {seed} tau ({c1},{c2}) cell ({i},{j})"
                        );
                    }
                }
                assert!(check_zero_means(&d).max() <= 1e-12);
            }
        }
    }

    #[test]
    fn idempotence_of_block_means() {
        let f = random_grid(9, 8, 12, (1.0, 1.0), GridFamily::Signed).unwrap();
        let tau = Tau::from_cells(4, 3).unwrap();
        let d = decompose(&f, tau);
        let d2 = decompose(&d.f11, tau);
        assert_eq!(d2.f11.values(), d.f11.values());
        assert!(d2.f00.max_abs() <= 1e-12);
        assert!(d2.f01.max_abs() <= 1e-12);
        assert!(d2.f10.max_abs() <= 1e-12);
    }

    #[test]
    fn linearity() {
        let f = random_grid(1, 6, 9, (1.0, 1.0), GridFamily::Signed).unwrap();
        let g = random_grid(2, 6, 9, (1.0, 1.0), GridFamily::Uniform).unwrap();
        let tau = Tau::from_cells(3, 3).unwrap();
        let combo = f.scaled(2.0).add(&g.scaled(-0.5)).unwrap();
        let dc = decompose(&combo, tau);
        let df = decompose(&f, tau);
        let dg = decompose(&g, tau);
        for (a, b, c) in [
            (&dc.f00, &df.f00, &dg.f00),
            (&dc.f01, &df.f01, &dg.f01),
            (&dc.f10, &df.f10, &dg.f10),
            (&dc.f11, &df.f11, &dg.f11),
        ] {
            let expect = b.scaled(2.0).add(&c.scaled(-0.5)).unwrap();
            for (x, y) in a.values().iter().zip(expect.values()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn tau_validation() {
        assert!(Tau::from_cells(0, 1).is_err());
        let f = demo();
        assert!(Tau::from_lengths(1.5, 1.0, &f).is_err());
        assert!(Tau::from_lengths(-1.0, 1.0, &f).is_err());
        assert_eq!(Tau::from_lengths(2.0, 1.0, &f).unwrap(), Tau { c1: 2, c2: 1 });
    }

    #[test]
    fn padding_extends_to_block_boundary() {
        let f = random_grid(4, 5, 5, (1.0, 1.0), GridFamily::Uniform).unwrap();
        let d = decompose(&f, Tau::from_cells(2, 3).unwrap());
        assert_eq!(d.f11.dims(), (6, 6));
        // padded cells reconstruct to zero
        let sum = d.f00.add(&d.f01).unwrap().add(&d.f10).unwrap().add(&d.f11).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i >= 5 || j >= 5 {
                    assert!(sum.value(i, j).abs() <= 1e-12);
                }
            }
        }
    }
}
