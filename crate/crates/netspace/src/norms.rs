//! Net-space quasi-norms: Lorentz-type integrals of the net-averaging
//! function, `(∫ (t^{1/p} f̄(t))^q dt/t)^{1/q}`, nested per axis in 2D.
//!
//! The integral splits into three pieces. Below one cell the averaging
//! function is constant, so the head is closed form. Beyond
//! `t_max_factor * extent` the averaging function is exactly `C / t`,
//! so the tail is closed form too (convergent since p > 1). The body is
//! a trapezoid rule in log t over geometric nodes augmented with the
//! cell multiples where the piecewise-constant averaging function jumps.

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::netavg::{build_net_average_table, AverageTable1D, NetAverageTable};
use crate::util::CompensatedSum;

/// Secondary exponent, with `q = ∞` as a distinguished variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QIndex {
    Finite(f64),
    Inf,
}

impl QIndex {
    pub fn is_inf(&self) -> bool {
        matches!(self, QIndex::Inf)
    }
}

impl std::fmt::Display for QIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QIndex::Finite(q) => write!(f, "{q}"),
            QIndex::Inf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for QIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
            return Ok(QIndex::Inf);
        }
        s.parse::<f64>()
            .map(QIndex::Finite)
            .map_err(|_| Error::InvalidArgument(format!("cannot parse q index '{s}'")))
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::UnsupportedExponent(format!(
            "p must satisfy 1 < p < inf, got {p}"
        )));
    }
    Ok(())
}

fn check_q(q: QIndex) -> Result<()> {
    if let QIndex::Finite(q) = q {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::UnsupportedExponent(format!(
                "q must satisfy 1 <= q <= inf, got {q}"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents1D {
    pub p: f64,
    pub q: QIndex,
}

impl Exponents1D {
    pub fn new(p: f64, q: QIndex) -> Result<Self> {
        check_p(p)?;
        check_q(q)?;
        Ok(Self { p, q })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents2D {
    pub p: (f64, f64),
    pub q: (QIndex, QIndex),
}

impl Exponents2D {
    pub fn new(p: (f64, f64), q: (QIndex, QIndex)) -> Result<Self> {
        check_p(p.0)?;
        check_p(p.1)?;
        check_q(q.0)?;
        check_q(q.1)?;
        Ok(Self { p, q })
    }

    pub fn inner(&self) -> Exponents1D {
        Exponents1D { p: self.p.0, q: self.q.0 }
    }
    pub fn outer(&self) -> Exponents1D {
        Exponents1D { p: self.p.1, q: self.q.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub points_per_octave: usize,
    /// Body integration starts at this many cells.
    pub t_min_cells: f64,
    /// Body integration stops at this multiple of the support extent;
    /// from there the tail is closed form.
    pub t_max_factor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points_per_octave: 8,
            t_min_cells: 1.0,
            t_max_factor: 4.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_octave < 2 {
            return Err(Error::InvalidArgument(
                "points_per_octave must be at least 2".into(),
            ));
        }
        if !(self.t_min_cells > 0.0) || !(self.t_max_factor >= 1.0) {
            return Err(Error::InvalidArgument(
                "need t_min_cells > 0 and t_max_factor >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// The three pieces of a norm evaluation. For finite q, `head`, `body`
/// and `tail` are the pieces of the q-th power integral and
/// `value = (head + body + tail)^{1/q}`; for q = ∞ they are the sups of
/// the three ranges and `value` is their max.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBreakdown {
    pub head: f64,
    pub body: f64,
    pub tail: f64,
    pub value: f64,
}

impl NormBreakdown {
    fn zero() -> Self {
        Self { head: 0.0, body: 0.0, tail: 0.0, value: 0.0 }
    }
}

/// Quadrature nodes on [t_lo, t_hi]: geometric spacing at
/// `points_per_octave`, plus every cell multiple (the averaging function
/// jumps only there) and the two endpoints. Strictly increasing.
fn nodes(t_lo: f64, t_hi: f64, cell: f64, spec: &QuadratureSpec) -> Vec<f64> {
    let mut ts = vec![t_lo];
    let ratio = 2.0f64.powf(1.0 / spec.points_per_octave as f64);
    let mut t = t_lo;
    loop {
        t *= ratio;
        if t >= t_hi {
            break;
        }
        ts.push(t);
    }
    let mut k = (t_lo / cell).floor() as i64 + 1;
    loop {
        let b = k as f64 * cell;
        if b >= t_hi {
            break;
        }
        if b > t_lo {
            ts.push(b);
        }
        k += 1;
    }
    ts.push(t_hi);
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);
    ts
}

/// One-axis Lorentz engine over an arbitrary evaluator of f̄ along that
/// axis. `cell` and `extent` are the axis geometry; the evaluator must
/// be constant on (0, cell] and exactly `C / t` for t ≥ extent.
fn lorentz_axis(
    eval: &dyn Fn(f64) -> f64,
    cell: f64,
    extent: f64,
    e: Exponents1D,
    spec: &QuadratureSpec,
) -> NormBreakdown {
    let p = e.p;
    let t_lo = cell * spec.t_min_cells.min(1.0);
    let t_hi = spec.t_max_factor * extent;
    let f_lo = eval(t_lo);
    let f_hi = eval(t_hi);
    let tail_c = t_hi * f_hi;
    match e.q {
        QIndex::Inf => {
            // sup of t^{1/p} f̄(t): increasing in t on the head piece,
            // decreasing (exponent 1/p - 1 < 0) on the tail piece.
            let head = t_lo.powf(1.0 / p) * f_lo;
            let mut body = 0.0f64;
            for t in nodes(t_lo, t_hi, cell, spec) {
                body = body.max(t.powf(1.0 / p) * eval(t));
            }
            let tail = t_hi.powf(1.0 / p) * f_hi;
            NormBreakdown { head, body, tail, value: head.max(body).max(tail) }
        }
        QIndex::Finite(q) => {
            let a = q / p;
            // ∫_0^{t_lo} (t^{1/p} f_lo)^q dt/t = f_lo^q t_lo^{q/p} / (q/p)
            let head = f_lo.powf(q) * t_lo.powf(a) / a;
            let ts = nodes(t_lo, t_hi, cell, spec);
            let mut acc = CompensatedSum::new();
            let w = |t: f64| (t.powf(1.0 / p) * eval(t)).powf(q);
            let mut prev_t = ts[0];
            let mut prev_w = w(prev_t);
            for &t in &ts[1..] {
                let wt = w(t);
                acc.add(0.5 * (prev_w + wt) * (t / prev_t).ln());
                prev_t = t;
                prev_w = wt;
            }
            let body = acc.value();
            // beyond t_hi the integrand is C^q t^{q/p - q - 1}
            let b = a - q; // < 0 since p > 1
            let tail = if tail_c == 0.0 {
                0.0
            } else {
                tail_c.powf(q) * t_hi.powf(b) / (-b)
            };
            let total = head + body + tail;
            NormBreakdown { head, body, tail, value: total.powf(1.0 / q) }
        }
    }
}

/// ‖g‖_{N_{p,q}(M)} for a 1D grid function.
pub fn net_norm_1d(g: &Grid1D, e: Exponents1D, spec: &QuadratureSpec) -> Result<f64> {
    Ok(net_norm_1d_breakdown(g, e, spec)?.value)
}

pub fn net_norm_1d_breakdown(
    g: &Grid1D,
    e: Exponents1D,
    spec: &QuadratureSpec,
) -> Result<NormBreakdown> {
    check_p(e.p)?;
    check_q(e.q)?;
    spec.validate()?;
    if g.is_zero() {
        return Ok(NormBreakdown::zero());
    }
    let tbl = AverageTable1D::build(g);
    let eval = |t: f64| tbl.query(t).expect("positive threshold");
    Ok(lorentz_axis(&eval, g.cell(), g.extent(), e, spec))
}

/// ‖f‖_{N_{p̄,q̄}(M)} for a 2D grid function.
pub fn net_norm_2d(f: &Grid2D, e: Exponents2D, spec: &QuadratureSpec) -> Result<f64> {
    Ok(net_norm_2d_breakdown(f, e, spec)?.value)
}

pub fn net_norm_2d_breakdown(
    f: &Grid2D,
    e: Exponents2D,
    spec: &QuadratureSpec,
) -> Result<NormBreakdown> {
    Exponents2D::new(e.p, e.q)?;
    spec.validate()?;
    if f.is_zero() {
        return Ok(NormBreakdown::zero());
    }
    Ok(norm_breakdown_from_table(&build_net_average_table(f), e, spec))
}

/// Same value as `net_norm_2d` on the grid the table was built from;
/// lets norm sweeps over many exponents reuse one table.
pub fn norm_from_table(
    tbl: &NetAverageTable,
    e: Exponents2D,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Exponents2D::new(e.p, e.q)?;
    spec.validate()?;
    Ok(norm_breakdown_from_table(tbl, e, spec).value)
}

fn norm_breakdown_from_table(
    tbl: &NetAverageTable,
    e: Exponents2D,
    spec: &QuadratureSpec,
) -> NormBreakdown {
    let (h1, h2) = tbl.cells();
    let (l1, l2) = tbl.extents();
    // inner integral in t1 at fixed t2, then the outer integral treats
    // the inner value phi(t2) as the averaging function of the t2 axis:
    // phi is constant for t2 below one cell and exactly C / t2 beyond
    // the extent, so the same engine applies verbatim.
    let phi = |t2: f64| {
        let eval = |t1: f64| tbl.query(t1, t2).expect("positive thresholds");
        lorentz_axis(&eval, h1, l1, e.inner(), spec).value
    };
    lorentz_axis(&phi, h2, l2, e.outer(), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_indicator_2d, random_grid, tensor, GridFamily};

    fn q(x: f64) -> QIndex {
        QIndex::Finite(x)
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponents1D::new(1.0, q(1.0)).is_err());
        assert!(Exponents1D::new(0.5, QIndex::Inf).is_err());
        assert!(Exponents1D::new(2.0, q(0.5)).is_err());
        assert!(Exponents1D::new(f64::INFINITY, q(1.0)).is_err());
        assert!(Exponents1D::new(2.0, QIndex::Inf).is_ok());
        assert!(Exponents2D::new((2.0, 1.0), (q(1.0), q(1.0))).is_err());
        assert!("inf".parse::<QIndex>().unwrap().is_inf());
        assert_eq!("2.5".parse::<QIndex>().unwrap(), q(2.5));
        assert!("two".parse::<QIndex>().is_err());
    }

    #[test]
    fn indicator_1d_closed_forms() {
        let g = Grid1D::indicator(1.0, 256).unwrap();
        let spec = QuadratureSpec { points_per_octave: 16, ..Default::default() };
        let v = net_norm_1d(&g, Exponents1D::new(2.0, q(1.0)).unwrap(), &spec).unwrap();
        assert!((v - 4.0).abs() / 4.0 <= 0.02, "got {v}");
        let v = net_norm_1d(&g, Exponents1D::new(2.0, QIndex::Inf).unwrap(), &spec).unwrap();
        assert!((v - 1.0).abs() <= 0.01, "got {v}");
        // general p, q = 1: p^2/(p-1) * a^{1/p} for the indicator of [0,a]
        for p in [1.5, 2.0, 3.0] {
            let expect = p * p / (p - 1.0);
            let v = net_norm_1d(&g, Exponents1D::new(p, q(1.0)).unwrap(), &spec).unwrap();
            assert!((v - expect).abs() / expect <= 0.02, "p={p}: {v} vs {expect}");
        }
    }

    #[test]
    fn zero_grids_have_zero_norm() {
        let g = Grid1D::new(0.0, 1.0, vec![0.0; 8]).unwrap();
        let f = Grid2D::new((0.0, 0.0), (1.0, 1.0), 3, 3, vec![0.0; 9]).unwrap();
        let spec = QuadratureSpec::default();
        for qq in [q(1.0), q(2.0), QIndex::Inf] {
            assert_eq!(
                net_norm_1d(&g, Exponents1D::new(2.0, qq).unwrap(), &spec).unwrap(),
                0.0
            );
            assert_eq!(
                net_norm_2d(&f, Exponents2D::new((2.0, 3.0), (qq, qq)).unwrap(), &spec)
                    .unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn indicator_2d_closed_forms() {
        let f = make_indicator_2d(1.0, 1.0, 64, 64).unwrap();
        let spec = QuadratureSpec::default();
        let v = net_norm_2d(&f, Exponents2D::new((2.0, 2.0), (q(1.0), q(1.0))).unwrap(), &spec)
            .unwrap();
        assert!((v - 16.0).abs() / 16.0 <= 0.04, "got {v}");
        let v = net_norm_2d(
            &f,
            Exponents2D::new((2.0, 2.0), (QIndex::Inf, QIndex::Inf)).unwrap(),
            &spec,
        )
        .unwrap();
        assert!((v - 1.0).abs() <= 0.02, "got {v}");
    }

    #[test]
    fn table_entry_point_agrees() {
        let spec = QuadratureSpec::default();
        for seed in 0..5u64 {
            let f = random_grid(seed, 8, 6, (0.5, 1.0), GridFamily::Signed).unwrap();
            let tbl = build_net_average_table(&f);
            for p1 in [1.5, 3.0] {
                for qq in [q(1.0), q(2.5), QIndex::Inf] {
                    let e = Exponents2D::new((p1, 2.0), (qq, q(1.5))).unwrap();
                    let a = net_norm_2d(&f, e, &spec).unwrap();
                    let b = norm_from_table(&tbl, e, &spec).unwrap();
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn homogeneity() {
        let spec = QuadratureSpec::default();
        let f = random_grid(3, 10, 7, (1.0, 0.5), GridFamily::Signed).unwrap();
        for qq in [q(1.0), q(3.0), QIndex::Inf] {
            let e = Exponents2D::new((2.0, 1.5), (qq, qq)).unwrap();
            let a = net_norm_2d(&f.scaled(-2.5), e, &spec).unwrap();
            let b = 2.5 * net_norm_2d(&f, e, &spec).unwrap();
            assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn tensor_factorization() {
        let spec = QuadratureSpec::default();
        let g = Grid1D::new(0.0, 0.25, (0..32).map(|k| 1.0 + (k % 5) as f64).collect()).unwrap();
        let h = Grid1D::new(0.0, 0.5, (0..16).map(|k| ((k % 3) as f64) - 1.0).collect()).unwrap();
        let f = tensor(&g, &h);
        for (p1, p2, q1, q2) in [
            (2.0, 2.0, q(1.0), q(1.0)),
            (1.5, 3.0, q(2.0), QIndex::Inf),
            (4.0, 2.5, QIndex::Inf, q(1.0)),
        ] {
            let lhs = net_norm_2d(&f, Exponents2D::new((p1, p2), (q1, q2)).unwrap(), &spec)
                .unwrap();
            let rhs = net_norm_1d(&g, Exponents1D::new(p1, q1).unwrap(), &spec).unwrap()
                * net_norm_1d(&h, Exponents1D::new(p2, q2).unwrap(), &spec).unwrap();
            assert!((lhs - rhs).abs() / rhs <= 0.02, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn dilation_law() {
        let spec = QuadratureSpec::default();
        let g = Grid1D::new(0.0, 1.0, (0..64).map(|k| (k as f64 * 0.37).sin()).collect()).unwrap();
        for a in [2usize, 5] {
            let ga = g.dilated(a).unwrap();
            for (p, qq) in [(2.0, q(1.0)), (3.0, q(2.0)), (1.5, QIndex::Inf)] {
                let e = Exponents1D::new(p, qq).unwrap();
                let lhs = net_norm_1d(&ga, e, &spec).unwrap();
                let rhs = (a as f64).powf(1.0 / p) * net_norm_1d(&g, e, &spec).unwrap();
                assert!((lhs - rhs).abs() / rhs <= 0.01, "a={a}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn quadrature_stability() {
        let f = random_grid(11, 64, 64, (1.0, 1.0), GridFamily::Signed).unwrap();
        let tbl = build_net_average_table(&f);
        let base = QuadratureSpec::default();
        let fine = QuadratureSpec { points_per_octave: 16, ..base };
        let wide = QuadratureSpec { t_max_factor: 8.0, ..base };
        for e in [
            Exponents2D::new((2.0, 2.0), (q(1.0), q(1.0))).unwrap(),
            Exponents2D::new((1.5, 4.0), (q(2.0), QIndex::Inf)).unwrap(),
        ] {
            let v0 = norm_from_table(&tbl, e, &base).unwrap();
            for alt in [&fine, &wide] {
                let v1 = norm_from_table(&tbl, e, alt).unwrap();
                assert!((v1 - v0).abs() / v0 <= 0.01, "{v0} vs {v1}");
            }
        }
    }
}
