//! Row-major multivariate time series and its CSV form.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `len` samples of dimension `dim`; row `t` is the sample at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    len: usize,
    dim: usize,
    data: Vec<f64>,
}

impl TimeSeries {
    pub fn from_rows(len: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if len == 0 || dim == 0 {
            return Err(Error::Dimension(format!(
                "time series needs at least one sample and one coordinate, got {len}x{dim}"
            )));
        }
        if data.len() != len * dim {
            return Err(Error::Dimension(format!(
                "expected {} values for a {len}x{dim} series, got {}",
                len * dim,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "entry ({}, {}) is {}",
                i / dim,
                i % dim,
                data[i]
            )));
        }
        Ok(TimeSeries { len, dim, data })
    }

    pub fn from_row_vecs(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_rows(rows.len(), dim, rows.concat())
    }

    pub fn zeros(len: usize, dim: usize) -> Self {
        TimeSeries {
            len,
            dim,
            data: vec![0.0; len * dim],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn row_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, t: usize, d: usize) -> f64 {
        self.data[t * self.dim + d]
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        self.rows().map(|r| r[d]).collect()
    }

    /// Rows `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> TimeSeries {
        TimeSeries {
            len: end - start,
            dim: self.dim,
            data: self.data[start * self.dim..end * self.dim].to_vec(),
        }
    }

    /// Columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> TimeSeries {
        let dim = end - start;
        let data = self.rows().flat_map(|r| r[start..end].iter().copied()).collect();
        TimeSeries {
            len: self.len,
            dim,
            data,
        }
    }

    /// Concatenates coordinates of equally long series.
    pub fn hstack(parts: &[TimeSeries]) -> Result<TimeSeries> {
        let len = parts.first().map_or(0, |p| p.len);
        if parts.iter().any(|p| p.len != len) {
            return Err(Error::Dimension("hstack of series with different lengths".into()));
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        let mut data = Vec::with_capacity(len * dim);
        for t in 0..len {
            for p in parts {
                data.extend_from_slice(p.row(t));
            }
        }
        TimeSeries::from_rows(len, dim, data)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for r in self.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b;
            }
        }
        let n = self.len as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    pub fn center(&mut self) {
        let m = self.mean();
        for r in self.data.chunks_exact_mut(self.dim) {
            for (a, b) in r.iter_mut().zip(&m) {
                *a -= b;
            }
        }
    }

    /// Sample covariance with denominator `len`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let m = self.mean();
        let d = self.dim;
        let mut c = DMatrix::zeros(d, d);
        for r in self.rows() {
            for i in 0..d {
                let ci = r[i] - m[i];
                for j in i..d {
                    c[(i, j)] += ci * (r[j] - m[j]);
                }
            }
        }
        let n = self.len as f64;
        for i in 0..d {
            for j in i..d {
                let v = c[(i, j)] / n;
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        c
    }

    /// `len x dim` matrix copy.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.len, self.dim, &self.data)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let (len, dim) = m.shape();
        let mut data = Vec::with_capacity(len * dim);
        for t in 0..len {
            data.extend(m.row(t).iter());
        }
        Self::from_rows(len, dim, data)
    }

    /// Applies `y_t = M x_t` to every row.
    pub fn transform(&self, m: &DMatrix<f64>) -> Result<TimeSeries> {
        if m.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "{}x{} matrix applied to {}-dimensional series",
                m.nrows(),
                m.ncols(),
                self.dim
            )));
        }
        let out_dim = m.nrows();
        let mut data = vec![0.0; self.len * out_dim];
        for (src, dst) in self.rows().zip(data.chunks_exact_mut(out_dim)) {
            for (i, d) in dst.iter_mut().enumerate() {
                *d = (0..self.dim).map(|j| m[(i, j)] * src[j]).sum();
            }
        }
        TimeSeries::from_rows(self.len, out_dim, data)
    }

    pub fn write_csv<W: Write>(&self, w: W, header: &[String]) -> Result<()> {
        if header.len() != self.dim {
            return Err(Error::Dimension("header length differs from dimension".into()));
        }
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(header)?;
        for r in self.rows() {
            wtr.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// CSV with header `prefix1, prefix2, ...`.
    pub fn save_csv(&self, path: impl AsRef<Path>, prefix: &str) -> Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("{prefix}{i}")).collect();
        self.write_csv(std::fs::File::create(path)?, &header)
    }

    /// Reads a headed CSV of numbers; returns the series and the header.
    pub fn read_csv<R: Read>(r: R) -> Result<(TimeSeries, Vec<String>)> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let mut data = Vec::new();
        let mut len = 0;
        for rec in rdr.records() {
            let rec = rec?;
            for field in rec.iter() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("row {}: not a number: {field:?}", len + 1)))?;
                data.push(v);
            }
            len += 1;
        }
        Ok((TimeSeries::from_rows(len, header.len(), data)?, header))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeries> {
        Ok(Self::read_csv(std::fs::File::open(path)?)?.0)
    }
}
