//! Net-space quasi-norms with closed-form cross-checks.
//!
//! The indicator of [0,1] has 1D norm p^2/(p-1) at q = 1, and the unit
//! square indicator factorizes: its (2,2),(1,1) norm is 4 * 4 = 16.

use netspace::{
    make_indicator_2d, net_norm_1d, net_norm_2d_breakdown, Exponents1D, Exponents2D, Grid1D,
    QIndex, QuadratureSpec,
};

fn main() -> netspace::Result<()> {
    let spec = QuadratureSpec::default();

    let g = Grid1D::indicator(1.0, 256)?;
    for p in [1.5, 2.0, 3.0] {
        let v = net_norm_1d(&g, Exponents1D::new(p, QIndex::Finite(1.0))?, &spec)?;
        println!("1D indicator, p={p}, q=1: {v:.4}  (exact {})", p * p / (p - 1.0));
    }
    let sup = net_norm_1d(&g, Exponents1D::new(2.0, QIndex::Inf)?, &spec)?;
    println!("1D indicator, p=2, q=inf: {sup:.4}  (exact 1)");

    let f = make_indicator_2d(1.0, 1.0, 64, 64)?;
    let b = net_norm_2d_breakdown(&f, Exponents2D::new((2.0, 2.0), (QIndex::Finite(1.0), QIndex::Finite(1.0)))?, &spec)?;
    println!("2D indicator, (2,2),(1,1): {:.4}  (exact 16)", b.value);
    println!("  head {:.4}  body {:.4}  tail {:.4}", b.head, b.body, b.tail);
    Ok(())
}
