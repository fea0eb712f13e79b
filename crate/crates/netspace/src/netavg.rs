//! Net-averaging functions: the supremum of |mean of f over Q| over the
//! net of node-aligned rectangles with side lengths at least t.
//!
//! The net is discretized to rectangles whose endpoints lie on grid
//! nodes, at arbitrary positions including outside the support. A window
//! wider than it is deep into the support intersects the support in a
//! prefix, a suffix, or the full extent per axis, so windows reaching
//! outside are folded in as "partial" ranges with the full window length
//! in the denominator; windows entirely beyond the support extent are
//! covered by a closed-form tail model.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{build_sat, Grid1D, Grid2D};
use crate::util::cells_ceil;

/// Closed-form behaviour of the net average when a threshold exceeds the
/// support extent: the optimal window then has length exactly t on that
/// axis and its intersection with the support is anchored (prefix,
/// suffix or full), so the average is `g(other axis) / t`.
#[derive(Clone, Debug)]
pub struct TailModel {
    /// max |integral| over rectangles anchored per both axes.
    pub b_corner: f64,
    /// `g1[h-1]`: max anchored-in-x1 integrals divided by the x2 window,
    /// maximized over x2 windows of at least `h` cells. Used for
    /// `t1 >= L1, t2 < L2` as `f̄ = g1 / t1`.
    pub g1: Vec<f64>,
    /// Symmetric table for `t2 >= L2, t1 < L1`.
    pub g2: Vec<f64>,
}

/// Precomputed net averages of a 2D grid function.
#[derive(Clone, Debug)]
pub struct NetAverageTable {
    n1: usize,
    n2: usize,
    cells: (f64, f64),
    extents: (f64, f64),
    /// best[w-1][h-1]: max over node-aligned windows of exactly w x h
    /// cells (intersections clipped to the support) of |∫f| / |Q|.
    best: Vec<f64>,
    /// suffix[w-1][h-1] = max over w' >= w, h' >= h of best.
    suffix: Vec<f64>,
    tail: TailModel,
}

/// Achievable support intersections of a sliding window of `w` cells on
/// an axis with `n` support cells: full runs of exactly `w`, plus
/// prefixes and suffixes strictly shorter than `w` (the window then
/// overhangs the support on one side). Empty intersections contribute 0
/// and are omitted.
fn axis_ranges(n: usize, w: usize) -> Vec<(usize, usize)> {
    debug_assert!(w >= 1 && w <= n);
    let mut out = Vec::with_capacity(n - w + 1 + 2 * (w - 1));
    for l in 0..=(n - w) {
        out.push((l, l + w));
    }
    for r in 1..w.min(n + 1) {
        out.push((0, r));
    }
    for l in (n + 1 - w.min(n))..n {
        if l >= 1 {
            out.push((l, n));
        }
    }
    out
}

fn suffix_from_best(best: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    let mut suffix = best.to_vec();
    for w in (0..n1).rev() {
        for h in (0..n2).rev() {
            let mut s = suffix[w * n2 + h];
            if w + 1 < n1 {
                s = s.max(suffix[(w + 1) * n2 + h]);
            }
            if h + 1 < n2 {
                s = s.max(suffix[w * n2 + h + 1]);
            }
            suffix[w * n2 + h] = s;
        }
    }
    suffix
}

/// Enumerates every node-aligned rectangle through summed-area-table
/// lookups. The reduction is a max, so the parallel split over window
/// widths cannot change the result.
pub fn build_net_average_table(f: &Grid2D) -> NetAverageTable {
    let (n1, n2) = f.dims();
    let (h1, h2) = f.cells();
    let sat = build_sat(f);
    let ranges2: Vec<Vec<(usize, usize)>> = (1..=n2).map(|h| axis_ranges(n2, h)).collect();

    let rows: Vec<Vec<f64>> = (1..=n1)
        .into_par_iter()
        .map(|w| {
            let mut max_abs = vec![0.0f64; n2];
            let mut diff = vec![0.0f64; n2 + 1];
            for (l1, r1) in axis_ranges(n1, w) {
                for (j, d) in diff.iter_mut().enumerate() {
                    *d = sat.prefix(r1, j) - sat.prefix(l1, j);
                }
                for h in 1..=n2 {
                    let mut m = max_abs[h - 1];
                    for &(l2, r2) in &ranges2[h - 1] {
                        let v = (diff[r2] - diff[l2]).abs();
                        if v > m {
                            m = v;
                        }
                    }
                    max_abs[h - 1] = m;
                }
            }
            (1..=n2)
                .map(|h| max_abs[h - 1] / (w as f64 * h1 * h as f64 * h2))
                .collect()
        })
        .collect();

    let best: Vec<f64> = rows.into_iter().flatten().collect();
    let suffix = suffix_from_best(&best, n1, n2);
    let (ext1, ext2) = f.extents();
    let tail = TailModel {
        b_corner: suffix[(n1 - 1) * n2 + (n2 - 1)] * ext1 * ext2,
        g1: (0..n2).map(|h| suffix[(n1 - 1) * n2 + h] * ext1).collect(),
        g2: (0..n1).map(|w| suffix[w * n2 + (n2 - 1)] * ext2).collect(),
    };
    NetAverageTable {
        n1,
        n2,
        cells: (h1, h2),
        extents: (ext1, ext2),
        best,
        suffix,
        tail,
    }
}

impl NetAverageTable {
    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }
    pub fn cells(&self) -> (f64, f64) {
        self.cells
    }
    pub fn extents(&self) -> (f64, f64) {
        self.extents
    }
    pub fn tail(&self) -> &TailModel {
        &self.tail
    }
    pub fn best(&self, w: usize, h: usize) -> f64 {
        self.best[(w - 1) * self.n2 + (h - 1)]
    }
    pub fn suffix(&self, w: usize, h: usize) -> f64 {
        self.suffix[(w - 1) * self.n2 + (h - 1)]
    }

    /// The net-averaging function f̄(t1, t2; M). Thresholds inside the
    /// support snap up to the next node multiple; beyond the extent the
    /// tail model applies with the exact threshold.
    pub fn query(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1 > 0.0) || !(t2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "thresholds must be positive, got ({t1}, {t2})"
            )));
        }
        let w1 = cells_ceil(t1, self.cells.0);
        let w2 = cells_ceil(t2, self.cells.1);
        Ok(match (w1 <= self.n1, w2 <= self.n2) {
            (true, true) => self.suffix(w1, w2),
            (false, true) => self.tail.g1[w2 - 1] / t1,
            (true, false) => self.tail.g2[w1 - 1] / t2,
            (false, false) => self.tail.b_corner / (t1 * t2),
        })
    }
}

/// f̄(t1, t2; M) via a freshly built table.
pub fn net_average_query(tbl: &NetAverageTable, t1: f64, t2: f64) -> Result<f64> {
    tbl.query(t1, t2)
}

/// The Morrey-variant average: the same supremum with |f| inside the
/// integral. Never smaller than the signed net average.
pub fn morrey_average(f: &Grid2D, t1: f64, t2: f64) -> Result<f64> {
    build_net_average_table(&f.abs()).query(t1, t2)
}

/// Precomputed net averages of a 1D grid function.
#[derive(Clone, Debug)]
pub struct AverageTable1D {
    n: usize,
    cell: f64,
    extent: f64,
    suffix: Vec<f64>,
    /// max |integral| over anchored intervals; f̄(t) = tail_b / t for
    /// t beyond the support extent.
    tail_b: f64,
}

impl AverageTable1D {
    pub fn build(g: &Grid1D) -> Self {
        let n = g.len();
        let cell = g.cell();
        let prefix = g.prefix_integrals();
        let mut best = vec![0.0f64; n];
        for (w, b) in best.iter_mut().enumerate() {
            let mut m = 0.0f64;
            for (l, r) in axis_ranges(n, w + 1) {
                let v = (prefix[r] - prefix[l]).abs();
                if v > m {
                    m = v;
                }
            }
            *b = m / ((w + 1) as f64 * cell);
        }
        let mut suffix = best;
        for w in (0..n.saturating_sub(1)).rev() {
            suffix[w] = suffix[w].max(suffix[w + 1]);
        }
        let extent = g.extent();
        let tail_b = suffix[n - 1] * extent;
        Self {
            n,
            cell,
            extent,
            suffix,
            tail_b,
        }
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }
    pub fn cell(&self) -> f64 {
        self.cell
    }
    pub fn tail_b(&self) -> f64 {
        self.tail_b
    }

    pub fn query(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold must be positive, got {t}"
            )));
        }
        let w = cells_ceil(t, self.cell);
        Ok(if w <= self.n {
            self.suffix[w - 1]
        } else {
            self.tail_b / t
        })
    }
}

/// f̄(t, M) for a 1D grid function.
pub fn net_average_1d(g: &Grid1D, t: f64) -> Result<f64> {
    AverageTable1D::build(g).query(t)
}
