//! Constructive K-functional bound, the interpolation functional F(K)
//! and the observed forward-embedding constant F(K) / ||f||.

use netspace::{
    build_k_curve, embedding_ratio, interpolation_functional, k_upper, random_grid, GridFamily,
    InterpParams, QIndex, QuadratureSpec,
};

fn main() -> netspace::Result<()> {
    let params = InterpParams::new(
        (2.0, 2.0),
        (4.0, 4.0),
        (0.5, 0.5),
        (QIndex::Finite(1.0), QIndex::Finite(1.0)),
    )?;
    println!("tau(t) exponent: {:?}", params.tau_exponent());
    println!("derived p: {:?}", params.derived_p());

    let spec = QuadratureSpec::default();
    let f = random_grid(3, 16, 16, (1.0, 1.0), GridFamily::Uniform)?;

    for t in [0.25, 0.5, 1.0, 2.0] {
        println!("K_upper({t}, {t}) = {:.5}", k_upper(&f, t, t, &params, &spec)?);
    }

    let curve = build_k_curve(&f, &params, &spec)?;
    let fk = interpolation_functional(&curve, &spec)?;
    println!("F(K) = {fk:.5} over a {}x{} lattice", curve.t1s.len(), curve.t2s.len());
    println!("embedding ratio = {:.5}", embedding_ratio(&f, &params, &spec)?);
    Ok(())
}
