//! Net-averaging function of a small grid: the supremum of |mean over Q|
//! over node-aligned rectangles with sides at least (t1, t2).

use netspace::{build_net_average_table, morrey_average, Grid2D};

fn main() -> netspace::Result<()> {
    // the 2x2 worked example: rows along x1
    let f = Grid2D::from_rows((0.0, 0.0), (1.0, 1.0), &[vec![1.0, 3.0], vec![5.0, 7.0]])?;
    let tbl = build_net_average_table(&f);
    for (t1, t2) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (4.0, 4.0)] {
        println!("fbar({t1}, {t2}) = {}", tbl.query(t1, t2)?);
    }

    // sign cancellation: the signed average sees cancellation, the
    // Morrey variant (|f| inside the integral) does not
    let g = Grid2D::from_rows((0.0, 0.0), (1.0, 1.0), &[vec![1.0, -1.0], vec![-1.0, 1.0]])?;
    let gt = build_net_average_table(&g);
    println!("checkerboard: signed {} vs morrey {}",
        gt.query(2.0, 2.0)?,
        morrey_average(&g, 2.0, 2.0)?);
    Ok(())
}
