//! Ordered point sets: the sample container every estimator consumes.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// An ordered sequence of points in `R^d`, stored row-major.
///
/// Time order is preserved because the samplers produce dependent sequences;
/// the entropy estimator itself is symmetric in the points. Coordinates must
/// be finite. Pairwise distinctness is *not* checked here — duplicates are
/// detected where they hurt, at nearest-neighbor query time.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    data: Vec<f64>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer.
    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Arity("dimension must be at least 1".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::Arity(format!(
                "flat buffer of length {} does not hold a whole number of {dim}-dimensional points",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!(
                "coordinate {} of point {} is not finite",
                pos % dim,
                pos / dim
            )));
        }
        Ok(Self { data, dim })
    }

    /// Builds a dataset from one row per point.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = match rows.first() {
            Some(r) => r.len(),
            None => return Err(Error::Arity("dataset must contain at least one point".into())),
        };
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Arity(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, dim)
    }

    pub fn n_points(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Writes the dataset as CSV: header `x0,...,x{d-1}`, one row per point.
    ///
    /// Values use the shortest decimal form that round-trips, so writing and
    /// re-reading reproduces the dataset bit for bit.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (0..self.dim).map(|j| format!("x{j}")).collect();
        writeln!(w, "{}", header.join(","))?;
        let mut line = String::new();
        for p in self.points() {
            line.clear();
            for (j, v) in p.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Reads a dataset from CSV produced by [`Dataset::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV input".into()))??;
        let cols: Vec<&str> = header.trim_end().split(',').collect();
        for (j, col) in cols.iter().enumerate() {
            if *col != format!("x{j}") {
                return Err(Error::Parse(format!(
                    "unexpected CSV header column {j}: got {col:?}, expected \"x{j}\""
                )));
            }
        }
        let dim = cols.len();
        let mut data = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != dim {
                return Err(Error::Parse(format!(
                    "row {row} has {} cells, expected {dim}",
                    cells.len()
                )));
            }
            for cell in cells {
                let v: f64 = cell.trim().parse().map_err(|_| {
                    Error::Parse(format!("row {row}: cannot parse {cell:?} as a number"))
                })?;
                data.push(v);
            }
        }
        Self::from_flat(data, dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_access() {
        let ds = Dataset::from_rows(&[vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(ds.n_points(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.point(1), &[2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(Dataset::from_rows(&[]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Dataset::from_flat(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(Dataset::from_flat(vec![1.0, f64::NAN], 2).is_err());
        assert!(Dataset::from_flat(vec![1.0, f64::INFINITY], 2).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = Dataset::from_rows(&[
            vec![0.1, -2.5e-11],
            vec![1.0 / 3.0, 7.25],
            vec![-0.0, 1e6],
        ])
        .unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1\n"));
        let back = Dataset::read_csv(&buf[..]).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(Dataset::read_csv(&b"y0\n1.0\n"[..]).is_err());
        assert!(Dataset::read_csv(&b"x0,x1\n1.0\n"[..]).is_err());
        assert!(Dataset::read_csv(&b"x0\nabc\n"[..]).is_err());
        assert!(Dataset::read_csv(&b""[..]).is_err());
    }
}
