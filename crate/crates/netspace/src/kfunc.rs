//! Constructive upper bound for the two-parameter K-functional between
//! the four block-decomposition component spaces, the interpolation
//! functional F(K) built from it, and the forward-embedding ratio
//! F(K) / ‖f‖.
//!
//! The bound is a minimum over explicit splittings of f: the four-part
//! block decomposition at the block size driven by the substitution
//! τᵢ = tᵢ^{1/(1/pᵢ⁰ − 1/pᵢ¹)}, and the four trivial splittings that
//! place all of f in a single component space. Every candidate's cost
//! is `a + b·t₁ + c·t₂ + d·t₁t₂` with fixed nonnegative coefficients,
//! so the minimum is nondecreasing in each tᵢ, vanishes linearly as
//! tᵢ → 0 and is bounded as tᵢ → ∞ — which keeps F(K) convergent.

use rayon::prelude::*;

use crate::decomp::{decompose, Decomposition, Tau};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::netavg::build_net_average_table;
use crate::norms::{norm_from_table, Exponents2D, QIndex, QuadratureSpec};
use crate::util::{cells_nearest, CompensatedSum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpParams {
    pub p0: (f64, f64),
    pub p1: (f64, f64),
    pub theta: (f64, f64),
    pub q: (QIndex, QIndex),
}

impl InterpParams {
    pub fn new(
        p0: (f64, f64),
        p1: (f64, f64),
        theta: (f64, f64),
        q: (QIndex, QIndex),
    ) -> Result<Self> {
        for (a, b) in [(p0.0, p1.0), (p0.1, p1.1)] {
            if !(1.0 < a && a < b) || !b.is_finite() {
                return Err(Error::UnsupportedExponent(format!(
                    "need 1 < p0 < p1 < inf componentwise, got p0={a}, p1={b}"
                )));
            }
        }
        for th in [theta.0, theta.1] {
            if !(0.0 < th && th < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "theta components must lie in (0,1), got {th}"
                )));
            }
        }
        let params = Self { p0, p1, theta, q };
        // validates q and the derived p range
        params.derived_exponents()?;
        Ok(params)
    }

    fn delta(&self) -> (f64, f64) {
        (
            1.0 / self.p0.0 - 1.0 / self.p1.0,
            1.0 / self.p0.1 - 1.0 / self.p1.1,
        )
    }

    /// Exponent of the substitution τᵢ = tᵢ^{1/(1/pᵢ⁰ − 1/pᵢ¹)}.
    pub fn tau_exponent(&self) -> (f64, f64) {
        let d = self.delta();
        (1.0 / d.0, 1.0 / d.1)
    }

    /// The substitution itself, before snapping to cell multiples.
    pub fn tau_for(&self, t1: f64, t2: f64) -> (f64, f64) {
        let e = self.tau_exponent();
        (t1.powf(e.0), t2.powf(e.1))
    }

    /// 1/p̄ = (1−θ̄)/p̄₀ + θ̄/p̄₁ componentwise.
    pub fn derived_p(&self) -> (f64, f64) {
        let p = |p0: f64, p1: f64, th: f64| 1.0 / ((1.0 - th) / p0 + th / p1);
        (
            p(self.p0.0, self.p1.0, self.theta.0),
            p(self.p0.1, self.p1.1, self.theta.1),
        )
    }

    pub fn derived_exponents(&self) -> Result<Exponents2D> {
        Exponents2D::new(self.derived_p(), self.q)
    }

    /// Exponent pair of the component space holding f_{ε₁ε₂}; the
    /// second index q̄ = (1,1) throughout.
    fn component_space(&self, eps1: bool, eps2: bool) -> Exponents2D {
        let p1 = if eps1 { self.p1.0 } else { self.p0.0 };
        let p2 = if eps2 { self.p1.1 } else { self.p0.1 };
        Exponents2D {
            p: (p1, p2),
            q: (QIndex::Finite(1.0), QIndex::Finite(1.0)),
        }
    }
}

/// The four component norms of a decomposition in the exponent pairing
/// of the K estimate: f00 in (p₁⁰,p₂⁰), f10 in (p₁¹,p₂⁰), f01 in
/// (p₁⁰,p₂¹), f11 in (p₁¹,p₂¹), all with secondary exponents (1,1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentNorms {
    pub f00: f64,
    pub f10: f64,
    pub f01: f64,
    pub f11: f64,
}

impl ComponentNorms {
    pub fn max(&self) -> f64 {
        self.f00.max(self.f10).max(self.f01).max(self.f11)
    }

    pub fn k_sum(&self, t1: f64, t2: f64) -> f64 {
        self.f00 + t1 * self.f10 + t2 * self.f01 + t1 * t2 * self.f11
    }
}

pub fn component_norms(
    d: &Decomposition,
    params: &InterpParams,
    spec: &QuadratureSpec,
) -> Result<ComponentNorms> {
    let norm = |g: &Grid2D, e: Exponents2D| -> Result<f64> {
        if g.is_zero() {
            return Ok(0.0);
        }
        norm_from_table(&build_net_average_table(g), e, spec)
    };
    Ok(ComponentNorms {
        f00: norm(&d.f00, params.component_space(false, false))?,
        f10: norm(&d.f10, params.component_space(true, false))?,
        f01: norm(&d.f01, params.component_space(false, true))?,
        f11: norm(&d.f11, params.component_space(true, true))?,
    })
}

/// One admissible splitting's cost as a function of (t₁, t₂):
/// `base + t1·t1_coef + t2·t2_coef + t1·t2·t12_coef`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateCost {
    pub base: f64,
    pub t1_coef: f64,
    pub t2_coef: f64,
    pub t12_coef: f64,
}

impl CandidateCost {
    pub fn eval(&self, t1: f64, t2: f64) -> f64 {
        self.base + t1 * self.t1_coef + t2 * self.t2_coef + t1 * t2 * self.t12_coef
    }

    #[cfg(test)]
    fn scaled(&self, alpha: f64) -> Self {
        Self {
            base: alpha * self.base,
            t1_coef: alpha * self.t1_coef,
            t2_coef: alpha * self.t2_coef,
            t12_coef: alpha * self.t12_coef,
        }
    }
}

fn decomposition_candidate(
    f: &Grid2D,
    tau: Tau,
    params: &InterpParams,
    spec: &QuadratureSpec,
) -> Result<CandidateCost> {
    let n = component_norms(&decompose(f, tau), params, spec)?;
    Ok(CandidateCost {
        base: n.f00,
        t1_coef: n.f10,
        t2_coef: n.f01,
        t12_coef: n.f11,
    })
}

/// The four splittings placing all of f in one component space.
fn trivial_candidates(
    f: &Grid2D,
    params: &InterpParams,
    spec: &QuadratureSpec,
) -> Result<[CandidateCost; 4]> {
    let zero = CandidateCost { base: 0.0, t1_coef: 0.0, t2_coef: 0.0, t12_coef: 0.0 };
    if f.is_zero() {
        return Ok([zero; 4]);
    }
    let tbl = build_net_average_table(f);
    let norm = |eps1, eps2| norm_from_table(&tbl, params.component_space(eps1, eps2), spec);
    Ok([
        CandidateCost { base: norm(false, false)?, ..zero },
        CandidateCost { t1_coef: norm(true, false)?, ..zero },
        CandidateCost { t2_coef: norm(false, true)?, ..zero },
        CandidateCost { t12_coef: norm(true, true)?, ..zero },
    ])
}

fn snap_tau(f: &Grid2D, tau: (f64, f64)) -> Tau {
    let (h1, h2) = f.cells();
    let (n1, n2) = f.dims();
    Tau {
        c1: cells_nearest(tau.0, h1).min(n1),
        c2: cells_nearest(tau.1, h2).min(n2),
    }
}

/// Constructive K-functional upper bound at a single (t₁, t₂): the
/// minimum over the proof's decomposition at the snapped τ(t) and the
/// four trivial splittings.
pub fn k_upper(
    f: &Grid2D,
    t1: f64,
    t2: f64,
    params: &InterpParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "K-functional arguments must be positive, got ({t1}, {t2})"
        )));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let tau = snap_tau(f, params.tau_for(t1, t2));
    let mut best = decomposition_candidate(f, tau, params, spec)?.eval(t1, t2);
    for c in trivial_candidates(f, params, spec)? {
        best = best.min(c.eval(t1, t2));
    }
    Ok(best)
}

/// The K-functional upper bound as a curve: a fixed family of candidate
/// splittings (block decompositions at a geometric ladder of cell
/// counts plus the trivial splittings) evaluated over a dyadic lattice.
#[derive(Clone, Debug)]
pub struct KCurve {
    pub params: InterpParams,
    pub candidates: Vec<CandidateCost>,
    pub t1s: Vec<f64>,
    pub t2s: Vec<f64>,
    /// samples[i * t2s.len() + j] = K_upper(t1s[i], t2s[j])
    pub samples: Vec<f64>,
    /// initial integration window per axis, before widening
    pub t_range: ((f64, f64), (f64, f64)),
}

impl KCurve {
    pub fn eval(&self, t1: f64, t2: f64) -> f64 {
        self.candidates
            .iter()
            .map(|c| c.eval(t1, t2))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sample(&self, i: usize, j: usize) -> f64 {
        self.samples[i * self.t2s.len() + j]
    }

    /// Build a curve from explicit candidate costs; the lattice spans
    /// the given window at two points per octave.
    pub fn from_candidates(
        params: InterpParams,
        candidates: Vec<CandidateCost>,
        t_range: ((f64, f64), (f64, f64)),
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("no candidate splittings".into()));
        }
        let lattice = |(lo, hi): (f64, f64)| -> Result<Vec<f64>> {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidArgument(format!(
                    "bad lattice window [{lo}, {hi}]"
                )));
            }
            let mut ts = vec![lo];
            let mut t = lo;
            while t < hi {
                t *= std::f64::consts::SQRT_2;
                ts.push(t.min(hi));
            }
            Ok(ts)
        };
        let t1s = lattice(t_range.0)?;
        let t2s = lattice(t_range.1)?;
        let mut curve = Self {
            params,
            candidates,
            t1s,
            t2s,
            samples: Vec::new(),
            t_range,
        };
        curve.samples = curve
            .t1s
            .iter()
            .flat_map(|&t1| curve.t2s.iter().map(move |&t2| (t1, t2)))
            .map(|(t1, t2)| curve.eval(t1, t2))
            .collect();
        Ok(curve)
    }
}

/// Geometric ladder of block cell counts per axis: powers of 4 from one
/// cell up, capped by and including the full extent.
fn cell_ladder(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut c = 1usize;
    while c < n {
        out.push(c);
        c *= 4;
    }
    out.push(n);
    out
}

pub fn build_k_curve(f: &Grid2D, params: &InterpParams, spec: &QuadratureSpec) -> Result<KCurve> {
    if f.is_zero() {
        return Err(Error::InvalidArgument(
            "K-curve of the zero function is identically zero; nothing to sample".into(),
        ));
    }
    let (n1, n2) = f.dims();
    let (h1, h2) = f.cells();
    let (l1, l2) = f.extents();
    let taus: Vec<Tau> = cell_ladder(n1)
        .into_iter()
        .flat_map(|c1| cell_ladder(n2).into_iter().map(move |c2| Tau { c1, c2 }))
        .collect();
    let mut candidates: Vec<CandidateCost> = taus
        .par_iter()
        .map(|&tau| decomposition_candidate(f, tau, params, spec))
        .collect::<Result<_>>()?;
    candidates.extend(trivial_candidates(f, params, spec)?);
    // window in t chosen so that τ(t) sweeps one cell to the full extent
    let d = params.delta();
    let window = |h: f64, l: f64, delta: f64| -> (f64, f64) {
        let lo = h.powf(delta);
        let hi = l.powf(delta);
        (0.25 * lo.min(hi), 4.0 * lo.max(hi))
    };
    KCurve::from_candidates(
        *params,
        candidates,
        (window(h1, l1, d.0), window(h2, l2, d.1)),
    )
}

/// One axis of the F(K) integral: ∫ (t^{−θ} g(t))^q dt/t with g linear
/// below t_lo and constant above t_hi (the asymptotics of the candidate
/// minimum), trapezoid in log t between; q = ∞ as the sup.
fn f_axis(
    eval: &dyn Fn(f64) -> f64,
    theta: f64,
    q: QIndex,
    t_lo: f64,
    t_hi: f64,
    ppo: usize,
) -> f64 {
    let g_lo = eval(t_lo);
    let g_hi = eval(t_hi);
    match q {
        QIndex::Inf => {
            // head: t^{1−θ}·slope increasing; tail: t^{−θ}·const decreasing
            let mut best = (t_lo.powf(-theta) * g_lo).max(t_hi.powf(-theta) * g_hi);
            let ratio = 2.0f64.powf(1.0 / ppo as f64);
            let mut t = t_lo;
            while t < t_hi {
                best = best.max(t.powf(-theta) * eval(t));
                t *= ratio;
            }
            best
        }
        QIndex::Finite(q) => {
            let head = if g_lo == 0.0 {
                0.0
            } else {
                g_lo.powf(q) * t_lo.powf(-theta * q) / ((1.0 - theta) * q)
            };
            let tail = if g_hi == 0.0 {
                0.0
            } else {
                g_hi.powf(q) * t_hi.powf(-theta * q) / (theta * q)
            };
            let ratio = 2.0f64.powf(1.0 / ppo as f64);
            let w = |t: f64| (t.powf(-theta) * eval(t)).powf(q);
            let mut acc = CompensatedSum::new();
            let mut prev_t = t_lo;
            let mut prev_w = w(prev_t);
            while prev_t < t_hi {
                let t = (prev_t * ratio).min(t_hi);
                let wt = w(t);
                acc.add(0.5 * (prev_w + wt) * (t / prev_t).ln());
                prev_t = t;
                prev_w = wt;
            }
            (head + acc.value() + tail).powf(1.0 / q)
        }
    }
}

fn f_of_k(curve: &KCurve, spec: &QuadratureSpec, widen: f64) -> f64 {
    let ((lo1, hi1), (lo2, hi2)) = curve.t_range;
    let (w1, w2) = (lo1 / widen, lo2 / widen);
    let (v1, v2) = (hi1 * widen, hi2 * widen);
    let ppo = spec.points_per_octave;
    let inner = |t2: f64| {
        f_axis(
            &|t1| curve.eval(t1, t2),
            curve.params.theta.0,
            curve.params.q.0,
            w1,
            v1,
            ppo,
        )
    };
    f_axis(&inner, curve.params.theta.1, curve.params.q.1, w2, v2, ppo)
}

/// F(K) = nested (θ̄, q̄) Lorentz integral of the K curve, with the
/// integration window widened until the value stabilizes within 1%.
pub fn interpolation_functional(curve: &KCurve, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let mut widen = 1.0;
    let mut prev = f_of_k(curve, spec, widen);
    for _ in 0..24 {
        widen *= 4.0;
        let next = f_of_k(curve, spec, widen);
        if !next.is_finite() {
            break;
        }
        if (next - prev).abs() <= 0.01 * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Divergence(
        "F(K) did not stabilize under lattice widening".into(),
    ))
}

/// F(K_upper) / ‖f‖_{N_{p̄,q̄}} with p̄ derived from the parameters: the
/// observed forward-embedding constant for this f.
pub fn embedding_ratio(f: &Grid2D, params: &InterpParams, spec: &QuadratureSpec) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    let curve = build_k_curve(f, params, spec)?;
    let numerator = interpolation_functional(&curve, spec)?;
    let denominator = norm_from_table(
        &build_net_average_table(f),
        params.derived_exponents()?,
        spec,
    )?;
    if denominator == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(numerator / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_indicator_2d, random_grid, GridFamily};

    fn params() -> InterpParams {
        InterpParams::new(
            (2.0, 2.0),
            (4.0, 4.0),
            (0.5, 0.5),
            (QIndex::Finite(1.0), QIndex::Finite(1.0)),
        )
        .unwrap()
    }

    #[test]
    fn parameter_validation_and_derived_p() {
        assert!(InterpParams::new((2.0, 2.0), (2.0, 4.0), (0.5, 0.5), params().q).is_err());
        assert!(InterpParams::new((4.0, 2.0), (2.0, 4.0), (0.5, 0.5), params().q).is_err());
        assert!(InterpParams::new((2.0, 2.0), (4.0, 4.0), (0.0, 0.5), params().q).is_err());
        assert!(InterpParams::new((2.0, 2.0), (4.0, 4.0), (0.5, 1.0), params().q).is_err());
        let p = params().derived_p();
        // 1/p = (1/2)(1/2) + (1/2)(1/4) = 3/8
        assert!((p.0 - 8.0 / 3.0).abs() < 1e-12 && (p.1 - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tau_substitution() {
        // exponent 1/(1/2 - 1/4) = 4, so tau = t^4
        let tau = params().tau_for(0.5, 0.5);
        assert!((tau.0 - 0.0625).abs() < 1e-15 && (tau.1 - 0.0625).abs() < 1e-15);
        assert_eq!(params().tau_exponent(), (4.0, 4.0));
    }

    #[test]
    fn k_upper_basics() {
        let spec = QuadratureSpec::default();
        let z = Grid2D::new((0.0, 0.0), (1.0, 1.0), 4, 4, vec![0.0; 16]).unwrap();
        assert_eq!(k_upper(&z, 1.0, 1.0, &params(), &spec).unwrap(), 0.0);
        let f = random_grid(5, 8, 8, (1.0, 1.0), GridFamily::Signed).unwrap();
        assert!(k_upper(&f, 0.0, 1.0, &params(), &spec).is_err());
        // homogeneity
        let a = k_upper(&f.scaled(3.0), 0.7, 1.3, &params(), &spec).unwrap();
        let b = 3.0 * k_upper(&f, 0.7, 1.3, &params(), &spec).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
        // bounded by the trivial four-term sum at the snapped tau
        let tau = snap_tau(&f, params().tau_for(0.7, 1.3));
        let n = component_norms(&decompose(&f, tau), &params(), &spec).unwrap();
        let cap = (1.0 + 0.7 + 1.3 + 0.7 * 1.3) * n.max();
        assert!(k_upper(&f, 0.7, 1.3, &params(), &spec).unwrap() <= cap * (1.0 + 1e-12));
    }

    #[test]
    fn component_norms_collapse_on_block_constant() {
        let spec = QuadratureSpec::default();
        let f = make_indicator_2d(4.0, 4.0, 4, 4).unwrap();
        // tau = whole support: one block, f is constant on it
        let d = decompose(&f, Tau { c1: 4, c2: 4 });
        let n = component_norms(&d, &params(), &spec).unwrap();
        assert_eq!(n.f00, 0.0);
        assert_eq!(n.f01, 0.0);
        assert_eq!(n.f10, 0.0);
        assert!(n.f11 > 0.0);
    }

    #[test]
    fn curve_monotone_on_lattice() {
        let spec = QuadratureSpec::default();
        let f = random_grid(2, 16, 16, (1.0, 1.0), GridFamily::Signed).unwrap();
        let curve = build_k_curve(&f, &params(), &spec).unwrap();
        for i in 0..curve.t1s.len() {
            for j in 0..curve.t2s.len() {
                let v = curve.sample(i, j);
                assert!(v >= 0.0);
                if i + 1 < curve.t1s.len() {
                    assert!(curve.sample(i + 1, j) >= v - 1e-12 * v.abs());
                }
                if j + 1 < curve.t2s.len() {
                    assert!(curve.sample(i, j + 1) >= v - 1e-12 * v.abs());
                }
            }
        }
    }

    #[test]
    fn synthetic_f_of_k() {
        // candidates {1, t1, t2, t1·t2} minimize to min(1,t1)·min(1,t2);
        // with theta=(1/2,1/2), q=(inf,inf) the per-axis sup is 1 at t=1.
        let p = InterpParams::new(
            (2.0, 2.0),
            (4.0, 4.0),
            (0.5, 0.5),
            (QIndex::Inf, QIndex::Inf),
        )
        .unwrap();
        let one = |base, t1, t2, t12| CandidateCost {
            base,
            t1_coef: t1,
            t2_coef: t2,
            t12_coef: t12,
        };
        let curve = KCurve::from_candidates(
            p,
            vec![
                one(1.0, 0.0, 0.0, 0.0),
                one(0.0, 1.0, 0.0, 0.0),
                one(0.0, 0.0, 1.0, 0.0),
                one(0.0, 0.0, 0.0, 1.0),
            ],
            ((0.25, 4.0), (0.25, 4.0)),
        )
        .unwrap();
        let spec = QuadratureSpec::default();
        let v = interpolation_functional(&curve, &spec).unwrap();
        assert!((v - 1.0).abs() <= 0.01, "got {v}");
        // scaling
        let scaled = KCurve::from_candidates(
            p,
            curve.candidates.iter().map(|c| c.scaled(2.5)).collect(),
            curve.t_range,
        )
        .unwrap();
        let w = interpolation_functional(&scaled, &spec).unwrap();
        assert!((w - 2.5 * v).abs() <= 1e-9 * w, "{w} vs {v}");
    }

    #[test]
    fn embedding_ratio_smoke() {
        let spec = QuadratureSpec::default();
        let z = Grid2D::new((0.0, 0.0), (1.0, 1.0), 4, 4, vec![0.0; 16]).unwrap();
        assert!(matches!(
            embedding_ratio(&z, &params(), &spec),
            Err(Error::UndefinedRatio)
        ));
        let f = make_indicator_2d(1.0, 1.0, 8, 8).unwrap();
        let r = embedding_ratio(&f, &params(), &spec).unwrap();
        assert!(r.is_finite() && r > 0.0, "got {r}");
        // scale invariance of the ratio
        let r2 = embedding_ratio(&f.scaled(7.0), &params(), &spec).unwrap();
        assert!((r - r2).abs() <= 1e-9 * r, "{r} vs {r2}");
    }
}
