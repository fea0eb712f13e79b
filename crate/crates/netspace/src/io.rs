//! CSV persistence for grid functions.
//!
//! Format: first line `# origin=<o1>,<o2> cells=<h1>,<h2> dims=<n1>,<n2>`,
//! then `n1` lines of `n2` comma-separated values (row i runs along x1).
//! Values are written in shortest round-trip decimal form, so a
//! save/load cycle is bit-identical. Additional `#` comment lines after
//! the header (e.g. provenance records) are tolerated on load.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

pub fn write_grid_csv<W: Write>(w: &mut W, grid: &Grid2D, comments: &[String]) -> Result<()> {
    let (o1, o2) = grid.origin();
    let (h1, h2) = grid.cells();
    let (n1, n2) = grid.dims();
    writeln!(w, "# origin={o1},{o2} cells={h1},{h2} dims={n1},{n2}")?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    for i in 0..n1 {
        let row: Vec<String> = (0..n2).map(|j| format!("{}", grid.value(i, j))).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn save_grid_csv<P: AsRef<Path>>(path: P, grid: &Grid2D, comments: &[String]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_grid_csv(&mut f, grid, comments)
}

fn parse_pair(line: usize, key: &str, text: &str) -> Result<(f64, f64)> {
    let mut it = text.splitn(2, ',');
    let err = |msg: String| Error::Parse { line, msg };
    let a = it
        .next()
        .ok_or_else(|| err(format!("missing {key}")))?
        .parse::<f64>()
        .map_err(|e| err(format!("bad {key}: {e}")))?;
    let b = it
        .next()
        .ok_or_else(|| err(format!("missing second {key} component")))?
        .parse::<f64>()
        .map_err(|e| err(format!("bad {key}: {e}")))?;
    Ok((a, b))
}

pub fn read_grid_csv<R: BufRead>(r: R) -> Result<Grid2D> {
    let mut lines = r.lines().enumerate();
    let (lineno, header) = loop {
        match lines.next() {
            Some((k, l)) => {
                let l = l?;
                if l.trim().is_empty() {
                    continue;
                }
                break (k + 1, l);
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty file".into(),
                })
            }
        }
    };
    let header = header.trim();
    if !header.starts_with('#') {
        return Err(Error::Parse {
            line: lineno,
            msg: "missing '# origin=... cells=... dims=...' header".into(),
        });
    }
    let mut origin = None;
    let mut cells = None;
    let mut dims = None;
    for tok in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = tok.strip_prefix("origin=") {
            origin = Some(parse_pair(lineno, "origin", v)?);
        } else if let Some(v) = tok.strip_prefix("cells=") {
            cells = Some(parse_pair(lineno, "cells", v)?);
        } else if let Some(v) = tok.strip_prefix("dims=") {
            let (a, b) = parse_pair(lineno, "dims", v)?;
            dims = Some((a as usize, b as usize));
        }
    }
    let (origin, cells, (n1, n2)) = match (origin, cells, dims) {
        (Some(o), Some(c), Some(d)) => (o, c, d),
        _ => {
            return Err(Error::Parse {
                line: lineno,
                msg: "header must contain origin=, cells= and dims=".into(),
            })
        }
    };
    let mut values = Vec::with_capacity(n1 * n2);
    let mut rows = 0usize;
    for (k, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: Vec<&str> = t.split(',').collect();
        if row.len() != n2 {
            return Err(Error::Parse {
                line: k + 1,
                msg: format!("expected {n2} values, got {}", row.len()),
            });
        }
        for cell in row {
            values.push(cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: k + 1,
                msg: format!("bad value '{cell}': {e}"),
            })?);
        }
        rows += 1;
    }
    if rows != n1 {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {n1} data rows, got {rows}"),
        });
    }
    Grid2D::new(origin, cells, n1, n2, values)
}

pub fn load_grid_csv<P: AsRef<Path>>(path: P) -> Result<Grid2D> {
    read_grid_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_grid, GridFamily};

    #[test]
    fn round_trip_is_bit_identical() {
        let g = random_grid(3, 7, 5, (0.1, 0.3), GridFamily::Signed).unwrap();
        let g = g.translated(-2, 4).scaled(1.0e-7);
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &g, &["provenance test".into()]).unwrap();
        let back = read_grid_csv(&buf[..]).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            read_grid_csv(&b""[..]),
            Err(Error::Parse { .. })
        ));
        let bad = b"# origin=0,0 cells=1,1 dims=2,2\n1,2\n3\n";
        match read_grid_csv(&bad[..]) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
