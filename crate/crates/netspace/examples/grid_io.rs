//! Build a grid, write it to CSV, read it back bit-identically.

use netspace::{load_grid_csv, random_grid, save_grid_csv, GridFamily};

fn main() -> netspace::Result<()> {
    let f = random_grid(42, 6, 5, (0.5, 1.0), GridFamily::Signed)?;
    let path = std::env::temp_dir().join("netspace_example_grid.csv");
    save_grid_csv(&path, &f, &["demo grid from the grid_io example".into()])?;
    let g = load_grid_csv(&path)?;
    assert_eq!(f.checksum(), g.checksum());
    println!("round-tripped {}x{} grid through {}", f.dims().0, f.dims().1, path.display());
    println!("checksum {:#018x}", f.checksum());
    Ok(())
}
