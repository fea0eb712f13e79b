//! Piecewise-constant grid functions with compact support, their
//! generators and the summed-area table used for O(1) rectangle
//! integrals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::util::CompensatedSum;

/// A compactly supported piecewise-constant function on the line.
///
/// Value `values[k]` holds on `[origin + k*cell, origin + (k+1)*cell)`,
/// zero outside `[origin, origin + n*cell]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    origin: f64,
    cell: f64,
    values: Vec<f64>,
}

impl Grid1D {
    pub fn new(origin: f64, cell: f64, values: Vec<f64>) -> Result<Self> {
        if !(cell > 0.0) || !cell.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cell width must be positive and finite, got {cell}"
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid needs at least one cell".into()));
        }
        if !origin.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid values must be finite".into()));
        }
        Ok(Self { origin, cell, values })
    }

    /// Indicator of `[0, a]` sampled on `n` cells.
    pub fn indicator(a: f64, n: usize) -> Result<Self> {
        if !(a > 0.0) || n == 0 {
            return Err(Error::InvalidArgument(
                "indicator needs a > 0 and n >= 1".into(),
            ));
        }
        Self::new(0.0, a / n as f64, vec![1.0; n])
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }
    pub fn cell(&self) -> f64 {
        self.cell
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    /// Support extent `n * cell`.
    pub fn extent(&self) -> f64 {
        self.cell * self.values.len() as f64
    }
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            origin: self.origin,
            cell: self.cell,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Cell integrals accumulated left to right, `n + 1` entries.
    pub fn prefix_integrals(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        let mut acc = CompensatedSum::new();
        out.push(0.0);
        for &v in &self.values {
            acc.add(v * self.cell);
            out.push(acc.value());
        }
        out
    }

    /// Same values on a grid with every cell split in two.
    pub fn refined(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len() * 2);
        for &v in &self.values {
            values.push(v);
            values.push(v);
        }
        Self {
            origin: self.origin,
            cell: self.cell / 2.0,
            values,
        }
    }

    /// Same values with every cell stretched by an integer factor.
    pub fn dilated(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("dilation factor must be >= 1".into()));
        }
        Ok(Self {
            origin: self.origin * factor as f64,
            cell: self.cell * factor as f64,
            values: self.values.clone(),
        })
    }
}

/// A compactly supported piecewise-constant function on the plane.
///
/// Values are stored row-major with the first index running along x1:
/// `value(i, j)` holds on cell `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    origin: (f64, f64),
    cells: (f64, f64),
    n1: usize,
    n2: usize,
    values: Vec<f64>,
}

impl Grid2D {
    pub fn new(
        origin: (f64, f64),
        cells: (f64, f64),
        n1: usize,
        n2: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(cells.0 > 0.0 && cells.1 > 0.0) || !cells.0.is_finite() || !cells.1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cell sizes must be positive and finite, got {cells:?}"
            )));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidArgument("grid needs n1, n2 >= 1".into()));
        }
        if values.len() != n1 * n2 {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                n1 * n2,
                values.len()
            )));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() || values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("grid values must be finite".into()));
        }
        Ok(Self { origin, cells, n1, n2, values })
    }

    pub fn from_rows(origin: (f64, f64), cells: (f64, f64), rows: &[Vec<f64>]) -> Result<Self> {
        let n1 = rows.len();
        let n2 = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n2) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        let values = rows.iter().flatten().copied().collect();
        Self::new(origin, cells, n1, n2, values)
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }
    pub fn cells(&self) -> (f64, f64) {
        self.cells
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }
    /// Support extents `(n1*h1, n2*h2)`.
    pub fn extents(&self) -> (f64, f64) {
        (self.cells.0 * self.n1 as f64, self.cells.1 * self.n2 as f64)
    }
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n2 + j]
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| alpha * v).collect(),
            ..self.clone()
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.abs()).collect(),
            ..self.clone()
        }
    }

    /// Pointwise sum of two grids sharing metadata.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.origin != other.origin || self.cells != other.cells || self.dims() != other.dims()
        {
            return Err(Error::InvalidArgument("grid metadata mismatch".into()));
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    /// Same values on a grid with every cell split in two per axis.
    pub fn refined(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len() * 4);
        for i in 0..self.n1 {
            for _ in 0..2 {
                for j in 0..self.n2 {
                    let v = self.value(i, j);
                    values.push(v);
                    values.push(v);
                }
            }
        }
        Self {
            origin: self.origin,
            cells: (self.cells.0 / 2.0, self.cells.1 / 2.0),
            n1: self.n1 * 2,
            n2: self.n2 * 2,
            values,
        }
    }

    /// Shift the origin by whole cells; the function is translated, the
    /// node lattice relative to the support is unchanged.
    pub fn translated(&self, k1: i64, k2: i64) -> Self {
        Self {
            origin: (
                self.origin.0 + k1 as f64 * self.cells.0,
                self.origin.1 + k2 as f64 * self.cells.1,
            ),
            ..self.clone()
        }
    }

    /// FNV-1a over the bit patterns of shape and values.
    pub fn checksum(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.n1 as u64);
        eat(self.n2 as u64);
        eat(self.cells.0.to_bits());
        eat(self.cells.1.to_bits());
        for v in &self.values {
            eat(v.to_bits());
        }
        h
    }
}

/// Indicator of `[0,a] x [0,b]` on an `n1 x n2` grid.
pub fn make_indicator_2d(a: f64, b: f64, n1: usize, n2: usize) -> Result<Grid2D> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "indicator sides must be positive, got ({a}, {b})"
        )));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("indicator needs n1, n2 >= 1".into()));
    }
    Grid2D::new(
        (0.0, 0.0),
        (a / n1 as f64, b / n2 as f64),
        n1,
        n2,
        vec![1.0; n1 * n2],
    )
}

/// Tensor product `f(x1, x2) = g(x1) * h(x2)`.
pub fn tensor(g: &Grid1D, h: &Grid1D) -> Grid2D {
    let mut values = Vec::with_capacity(g.len() * h.len());
    for &a in g.values() {
        for &b in h.values() {
            values.push(a * b);
        }
    }
    Grid2D::new(
        (g.origin(), h.origin()),
        (g.cell(), h.cell()),
        g.len(),
        h.len(),
        values,
    )
    .expect("tensor of valid grids is valid")
}

/// Generator families for randomized verification campaigns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFamily {
    /// Values uniform in [0, 1].
    Uniform,
    /// Values uniform in [-1, 1].
    Signed,
    /// Constant on random rectangular blocks, block values in [-1, 1].
    BlockConstant,
    /// `v_ij = alpha_i + beta_j`; the doubly mean-zero residual of the
    /// block decomposition vanishes identically for this family.
    Additive,
}

impl GridFamily {
    pub const ALL: [GridFamily; 4] = [
        GridFamily::Uniform,
        GridFamily::Signed,
        GridFamily::BlockConstant,
        GridFamily::Additive,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GridFamily::Uniform => "uniform",
            GridFamily::Signed => "signed",
            GridFamily::BlockConstant => "block-constant",
            GridFamily::Additive => "additive",
        }
    }
}

impl std::str::FromStr for GridFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GridFamily::Uniform),
            "signed" => Ok(GridFamily::Signed),
            "block-constant" => Ok(GridFamily::BlockConstant),
            "additive" => Ok(GridFamily::Additive),
            other => Err(Error::InvalidArgument(format!(
                "unknown grid family '{other}' (expected uniform, signed, block-constant or additive)"
            ))),
        }
    }
}

/// Deterministic random grid: identical `(seed, n1, n2, cells, family)`
/// always reproduces the same values bit for bit.
pub fn random_grid(
    seed: u64,
    n1: usize,
    n2: usize,
    cells: (f64, f64),
    family: GridFamily,
) -> Result<Grid2D> {
    if !(cells.0 > 0.0 && cells.1 > 0.0) {
        return Err(Error::InvalidArgument("cells must be positive".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("grid needs n1, n2 >= 1".into()));
    }
    // Fold the shape and family into the stream position so different
    // parameter sets with the same seed do not alias.
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (n1 as u64).wrapping_mul(0x9e3779b97f4a7c15)
            ^ (n2 as u64).wrapping_mul(0xc2b2ae3d27d4eb4f)
            ^ (family as u64).wrapping_mul(0x165667b19e3779f9),
    );
    let values = match family {
        GridFamily::Uniform => (0..n1 * n2).map(|_| rng.gen_range(0.0..=1.0)).collect(),
        GridFamily::Signed => (0..n1 * n2).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        GridFamily::BlockConstant => {
            let b1 = rng.gen_range(1..=(n1 / 2).max(1));
            let b2 = rng.gen_range(1..=(n2 / 2).max(1));
            let m1 = n1.div_ceil(b1);
            let m2 = n2.div_ceil(b2);
            let blocks: Vec<f64> = (0..m1 * m2).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let mut values = Vec::with_capacity(n1 * n2);
            for i in 0..n1 {
                for j in 0..n2 {
                    values.push(blocks[(i / b1) * m2 + j / b2]);
                }
            }
            values
        }
        GridFamily::Additive => {
            let alpha: Vec<f64> = (0..n1).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let beta: Vec<f64> = (0..n2).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let mut values = Vec::with_capacity(n1 * n2);
            for a in &alpha {
                for b in &beta {
                    values.push(a + b);
                }
            }
            values
        }
    };
    Grid2D::new((0.0, 0.0), cells, n1, n2, values)
}

/// 2D prefix sums of cell integrals: `sums[i][j]` is the integral of the
/// function over the first `i` columns and `j` rows of cells. Any
/// node-aligned rectangle integral is a 4-term inclusion-exclusion.
#[derive(Clone, Debug)]
pub struct SummedAreaTable {
    sums: Vec<f64>,
    n1: usize,
    n2: usize,
    origin: (f64, f64),
    cells: (f64, f64),
}

/// Single-pass build with compensated accumulation in fixed row-major
/// order, so the result does not depend on any parallel schedule.
pub fn build_sat(f: &Grid2D) -> SummedAreaTable {
    let (n1, n2) = f.dims();
    let area = f.cells().0 * f.cells().1;
    let mut sums = vec![0.0; (n1 + 1) * (n2 + 1)];
    let mut col_acc: Vec<CompensatedSum> = vec![CompensatedSum::new(); n2 + 1];
    for i in 0..n1 {
        let mut row = CompensatedSum::new();
        for j in 0..n2 {
            row.add(f.value(i, j) * area);
            col_acc[j + 1].add(row.value());
            sums[(i + 1) * (n2 + 1) + (j + 1)] = col_acc[j + 1].value();
        }
    }
    SummedAreaTable {
        sums,
        n1,
        n2,
        origin: f.origin(),
        cells: f.cells(),
    }
}

impl SummedAreaTable {
    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }
    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }
    pub fn cells(&self) -> (f64, f64) {
        self.cells
    }

    #[inline]
    pub fn prefix(&self, i: usize, j: usize) -> f64 {
        self.sums[i * (self.n2 + 1) + j]
    }

    /// Integral over the node-aligned rectangle of cell columns
    /// `[i1, i2)` and rows `[j1, j2)`.
    #[inline]
    pub fn rect_integral(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> f64 {
        debug_assert!(i1 <= i2 && i2 <= self.n1 && j1 <= j2 && j2 <= self.n2);
        self.prefix(i2, j2) - self.prefix(i1, j2) - self.prefix(i2, j1) + self.prefix(i1, j1)
    }

    /// Total integral of the function.
    pub fn total(&self) -> f64 {
        self.prefix(self.n1, self.n2)
    }
}
