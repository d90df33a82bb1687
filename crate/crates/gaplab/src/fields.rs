//! CSV dumps of node fields.

use std::io::Write;
use std::path::Path;

use gaplab_core::grid::ScalarField;

use crate::error::{GaplabError, Result};

pub const CSV_HEADER: &str = "# gaplab v1";

/// Writes `# gaplab v1`, the column names, then one row per node in
/// row-major order; nodes outside the field's mask get `nan`.
pub fn write_csv<W: Write>(field: &ScalarField, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let grid = field.grid();
    let dim = grid.dim();
    let mut w = csv::Writer::from_writer(out);
    let header: &[&str] = if dim == 1 { &["x", "value"] } else { &["x", "y", "value"] };
    w.write_record(header)?;
    for n in 0..grid.len() {
        let p = grid.coord(n);
        let value = if field.is_valid(n) { field.get(n) } else { f64::NAN };
        let mut row: Vec<String> = p[..dim].iter().map(|c| c.to_string()).collect();
        row.push(if value.is_nan() { "nan".into() } else { value.to_string() });
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(field: &ScalarField, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| GaplabError::io(path, e))?;
    write_csv(field, std::io::BufWriter::new(file)).map_err(|e| GaplabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaplab_core::grid::{build_grid, Domain};

    #[test]
    fn layout_1d_and_2d() {
        let g = build_grid(Domain::interval(0.0, 1.0).unwrap(), &[3]).unwrap();
        let f = ScalarField::new(g, vec![1.0, 2.5, 3.0], vec![true, true, false]).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# gaplab v1\nx,value\n0,1\n0.5,2.5\n1,nan\n");

        let g = build_grid(Domain::rectangle((0.0, 1.0), (0.0, 2.0)).unwrap(), &[3, 3]).unwrap();
        let f = ScalarField::from_fn(g, |p| p[0] + 10.0 * p[1]);
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "x,y,value");
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[3], "0.5,0,0.5");
        assert_eq!(lines[5], "0,1,10");
    }
}
