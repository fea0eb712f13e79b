/// Neumaier-compensated running sum.
///
/// Used everywhere an accumulation order is part of the determinism
/// contract: the result depends only on the sequence of `add` calls.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Smallest number of cells `w` with `w * cell >= t`, robust against the
/// floating-point noise that appears when `t` is meant to be an exact
/// node multiple. Always at least 1.
pub fn cells_ceil(t: f64, cell: f64) -> usize {
    let x = t / cell;
    let snapped = (x * (1.0 - 1e-9)).ceil();
    (snapped.max(1.0)) as usize
}

/// Nearest cell multiple to `t`, ties rounding toward the smaller count.
pub fn cells_nearest(t: f64, cell: f64) -> usize {
    let x = t / cell;
    let c = (x - 0.5).ceil();
    (c.max(1.0)) as usize
}

/// Exact value of the power integral `int_{t0}^{t1} t^{e-1} dt` with the
/// logarithm taken over when `e` vanishes. Requires `0 <= t0 <= t1`.
pub fn power_integral(t0: f64, t1: f64, e: f64) -> f64 {
    if e.abs() < 1e-14 {
        (t1 / t0).ln()
    } else {
        (t1.powf(e) - t0.powf(e)) / e
    }
}
