use std::io::{Read, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// An `n × d` cloud stored row-major, tagged with the model and seed that made it.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<S: Scalar> {
    dim: usize,
    coords: Vec<S>,
    pub descriptor: String,
    pub seed: Option<u64>,
}

impl<S: Scalar> PointSet<S> {
    pub fn new(dim: usize, coords: Vec<S>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyInput("point set"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not fill rows of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("non-finite coordinate in row {}", pos / dim)));
        }
        Ok(Self { dim, coords, descriptor: String::new(), seed: None })
    }

    pub fn from_rows<R: AsRef<[S]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyInput("point set"))?;
        let mut coords = Vec::with_capacity(dim * rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.as_ref().len() != dim {
                return Err(invalid(format!("row {i} has length {} but dimension is {dim}", r.as_ref().len())));
            }
            coords.extend_from_slice(r.as_ref());
        }
        Self::new(dim, coords)
    }

    pub fn with_origin(mut self, descriptor: impl Into<String>, seed: u64) -> Self {
        self.descriptor = descriptor.into();
        self.seed = Some(seed);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, S> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    /// Reorders rows by `perm` (row `k` of the result is row `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(self.coords.len());
        for &p in perm {
            coords.extend_from_slice(self.row(p));
        }
        Self { dim: self.dim, coords, descriptor: self.descriptor.clone(), seed: self.seed }
    }

    /// Converts coordinates to another scalar type.
    pub fn cast<T: Scalar>(&self) -> PointSet<T> {
        PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|c| T::of(c.as_f64())).collect(),
            descriptor: self.descriptor.clone(),
            seed: self.seed,
        }
    }

    /// Writes the `x1,...,xd` CSV form with 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record((1..=self.dim).map(|k| format!("x{k}")))
            .map_err(csv_error)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|c| format!("{:.16e}", c.as_f64())))
                .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let dim = r.headers().map_err(csv_error)?.len();
        let mut coords = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            for field in rec.iter() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Parse(format!("row {}: '{field}' is not a number", line + 1))
                })?;
                coords.push(S::of(v));
            }
        }
        Self::new(dim, coords)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}
