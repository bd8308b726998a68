//! Shift/rotation transforms and their plain-text persistence.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{RdeError, Result};
use crate::rng::RngStream;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(RdeError::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |(M^T M - I)_ij|`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| self.data[k * d + i] * self.data[k * d + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Random orthogonal matrix: the Q factor of a matrix of standard normal
/// draws, with column signs fixed so that R has a positive diagonal.
pub fn make_rotation(dim: usize, rng: &mut RngStream) -> Matrix {
    assert!(dim >= 1, "rotation needs at least one dimension");
    let mut draws = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        draws.push(rng.standard_normal());
    }
    let gaussian = DMatrix::from_row_slice(dim, dim, &draws);
    let qr = gaussian.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            data.push(q[(i, j)]);
        }
    }
    Matrix { dim, data }
}

/// `z = M (x - o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub shift: Vec<f64>,
    pub rotation: Matrix,
}

impl Transform {
    pub fn new(shift: Vec<f64>, rotation: Matrix) -> Result<Self> {
        if shift.len() != rotation.dim() {
            return Err(RdeError::DimensionMismatch {
                expected: rotation.dim(),
                actual: shift.len(),
            });
        }
        Ok(Self { shift, rotation })
    }

    pub fn shift_only(shift: Vec<f64>) -> Self {
        let dim = shift.len();
        Self {
            shift,
            rotation: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let centred: Vec<f64> = x.iter().zip(&self.shift).map(|(a, o)| a - o).collect();
        self.rotation.mul_vec(&centred)
    }

    /// Writes `shift.txt` (one row) and `rotation.txt` (one row per matrix
    /// row) into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("shift.txt"), format_rows(&self.shift, self.dim()))?;
        std::fs::write(
            dir.join("rotation.txt"),
            format_rows(self.rotation.as_slice(), self.dim()),
        )?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let shift = parse_rows(&std::fs::read_to_string(dir.join("shift.txt"))?)?;
        if shift.len() != 1 {
            return Err(RdeError::Parse("shift file must hold exactly one row".into()));
        }
        let shift = shift.into_iter().next().expect("one row");
        let rows = parse_rows(&std::fs::read_to_string(dir.join("rotation.txt"))?)?;
        if rows.len() != shift.len() {
            return Err(RdeError::Parse(format!(
                "rotation has {} rows, expected {}",
                rows.len(),
                shift.len()
            )));
        }
        let dim = shift.len();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Transform::new(shift, Matrix::from_row_major(dim, data)?)
    }
}

/// Whitespace-separated decimal text, `cols` values per line. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn format_rows(values: &[f64], cols: usize) -> String {
    let mut out = String::new();
    for row in values.chunks(cols.max(1)) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses whitespace-separated rows; blank lines are skipped and every row
/// must have the same length.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| RdeError::Parse(format!("line {}: bad number '{tok}'", n + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(RdeError::Parse(format!(
                    "line {}: expected {} values, found {}",
                    n + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
