//! Spatiotemporal persistence landscapes: `λ_k(x)` is the largest radius of
//! a square around `x` on which at least `k` features persist.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BifiltrationGrid, GridPoint};
use crate::zigzag::{barcode, landscape_from_barcode};

/// Integer landscape values, `values[k − 1][row][col]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub t_windows: usize,
    pub cols: usize,
    pub rows: usize,
    pub k_max: usize,
    pub hom_dim: usize,
    pub epsilons: Vec<f64>,
    pub values: Vec<Vec<Vec<u32>>>,
}

/// Pointwise mean of landscapes with the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanLandscape {
    pub t_windows: usize,
    pub cols: usize,
    pub rows: usize,
    pub k_max: usize,
    pub hom_dim: usize,
    pub epsilons: Vec<f64>,
    pub values: Vec<Vec<Vec<f64>>>,
}

/// A horizontal (zigzag) or vertical (one-parameter) line of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row(usize),
    Column(usize),
}

fn check_shape(values: &[Vec<Vec<impl Copy>>], k_max: usize, rows: usize, cols: usize) -> Result<()> {
    if values.len() != k_max || values.iter().any(|l| l.len() != rows || l.iter().any(|r| r.len() != cols)) {
        return Err(Error::ShapeMismatch(format!("values must be {k_max} × {rows} × {cols}")));
    }
    Ok(())
}

fn lipschitz<T: Copy + Into<f64>>(layer: &[Vec<T>]) -> bool {
    let rows = layer.len();
    let cols = layer.first().map_or(0, Vec::len);
    for r in 0..rows {
        for c in 0..cols {
            let v: f64 = layer[r][c].into();
            // king moves suffice: the max metric is a path metric on them
            for (dr, dc) in [(0, 1), (1, -1), (1, 0), (1, 1)] {
                let (r2, c2) = (r as isize + dr, c as isize + dc);
                if r2 < 0 || c2 < 0 || r2 as usize >= rows || c2 as usize >= cols {
                    continue;
                }
                let w: f64 = layer[r2 as usize][c2 as usize].into();
                if (v - w).abs() > 1.0 + 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

fn monotone_in_k<T: Copy + PartialOrd>(values: &[Vec<Vec<T>>]) -> bool {
    values.windows(2).all(|w| {
        w[0].iter().zip(&w[1]).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x >= y))
    })
}

impl Landscape {
    /// λ_k at `x`, for `k ≥ 1`; zero beyond `k_max`.
    pub fn value(&self, k: usize, x: GridPoint) -> u32 {
        if k == 0 || k > self.k_max {
            return 0;
        }
        self.values[k - 1][x.row][x.col]
    }

    pub fn validate(&self) -> Result<()> {
        if self.cols != 2 * self.t_windows - 1 || self.epsilons.len() != self.rows || self.k_max == 0 {
            return Err(Error::ShapeMismatch("inconsistent landscape header".into()));
        }
        check_shape(&self.values, self.k_max, self.rows, self.cols)
    }

    fn same_shape(&self, other: &Landscape) -> bool {
        (self.t_windows, self.cols, self.rows, self.k_max, self.hom_dim)
            == (other.t_windows, other.cols, other.rows, other.k_max, other.hom_dim)
    }

    /// Non-increasing in k and 1-Lipschitz in the max metric on (col, row).
    pub fn has_landscape_properties(&self) -> bool {
        monotone_in_k(&self.values) && self.values.iter().all(|l| lipschitz(l))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let l: Landscape = serde_json::from_str(s).map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        l.validate()?;
        Ok(l)
    }

    /// Entries as reals, for arithmetic shared with means.
    pub fn to_mean(&self) -> MeanLandscape {
        MeanLandscape {
            t_windows: self.t_windows,
            cols: self.cols,
            rows: self.rows,
            k_max: self.k_max,
            hom_dim: self.hom_dim,
            epsilons: self.epsilons.clone(),
            values: self.values.iter().map(|l| l.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect()).collect(),
        }
    }
}

impl MeanLandscape {
    pub fn validate(&self) -> Result<()> {
        if self.cols != 2 * self.t_windows - 1 || self.epsilons.len() != self.rows || self.k_max == 0 {
            return Err(Error::ShapeMismatch("inconsistent landscape header".into()));
        }
        check_shape(&self.values, self.k_max, self.rows, self.cols)
    }

    pub fn has_landscape_properties(&self) -> bool {
        self.values.iter().flatten().flatten().all(|&v| v >= 0.0)
            && monotone_in_k(&self.values)
            && self.values.iter().all(|l| lipschitz(l))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let l: MeanLandscape = serde_json::from_str(s).map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        l.validate()?;
        Ok(l)
    }

    /// (row, col) of the largest λ_k entry; ties go to the lowest row, then column.
    pub fn argmax(&self, k: usize) -> Option<(usize, usize)> {
        let layer = self.values.get(k.checked_sub(1)?)?;
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, row) in layer.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if best.is_none_or(|(b, _, _)| v > b) {
                    best = Some((v, r, c));
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }
}

/// λ_k for `k = 1..=k_max` at every grid point.
pub fn compute_landscape(g: &BifiltrationGrid, k_max: usize) -> Result<Landscape> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let (cols, rows) = (g.cols(), g.rows());
    let ranks: Vec<Vec<usize>> = (0..rows * cols)
        .into_par_iter()
        .map(|i| g.region_ranks(GridPoint::new(i % cols, i / cols)))
        .collect::<Result<_>>()?;
    let values = (1..=k_max)
        .map(|k| {
            (0..rows)
                .map(|r| {
                    (0..cols)
                        .map(|c| ranks[r * cols + c].iter().rposition(|&n| n >= k).unwrap_or(0) as u32)
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Landscape {
        t_windows: g.t_windows(),
        cols,
        rows,
        k_max,
        hom_dim: g.hom_dim(),
        epsilons: g.epsilons().to_vec(),
        values,
    })
}

/// The L^p distance over all (k, row, col); `p = f64::INFINITY` gives the max norm.
pub fn distance_p(a: &Landscape, b: &Landscape, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch("landscapes have different shapes".into()));
    }
    let diffs = a
        .values
        .iter()
        .flatten()
        .flatten()
        .zip(b.values.iter().flatten().flatten())
        .map(|(&x, &y)| (x as f64 - y as f64).abs());
    Ok(if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    })
}

/// Pointwise mean. Scales are averaged too, since automatically chosen
/// scales differ slightly between runs.
pub fn mean(ls: &[Landscape]) -> Result<MeanLandscape> {
    let first = ls.first().ok_or_else(|| Error::Empty("no landscapes to average".into()))?;
    if ls.iter().any(|l| !first.same_shape(l)) {
        return Err(Error::ShapeMismatch("landscapes have different shapes".into()));
    }
    let n = ls.len() as f64;
    let mut out = first.to_mean();
    for l in &ls[1..] {
        for (acc, e) in out.epsilons.iter_mut().zip(&l.epsilons) {
            *acc += e;
        }
        for (la, lb) in out.values.iter_mut().zip(&l.values) {
            for (ra, rb) in la.iter_mut().zip(lb) {
                for (a, &b) in ra.iter_mut().zip(rb) {
                    *a += b as f64;
                }
            }
        }
    }
    out.epsilons.iter_mut().for_each(|e| *e /= n);
    out.values.iter_mut().flatten().flatten().for_each(|v| *v /= n);
    Ok(out)
}

/// Landscape of the barcode of the module restricted to `line`, as
/// `values[k − 1][position along the line]`.
pub fn restriction_landscape(g: &BifiltrationGrid, line: Line, k_max: usize) -> Result<Vec<Vec<u32>>> {
    let m = match line {
        Line::Row(r) => g.row_module(r)?,
        Line::Column(c) => g.column_module(c)?,
    };
    let bc = barcode(&m)?;
    Ok((1..=k_max).map(|k| (0..m.len()).map(|x| landscape_from_barcode(&bc, k, x) as u32).collect()).collect())
}

/// Whether the landscape of `g` is dominated by every row and column restriction.
pub fn restriction_dominates(g: &BifiltrationGrid, l: &Landscape) -> Result<bool> {
    for r in 0..g.rows() {
        let line = restriction_landscape(g, Line::Row(r), l.k_max)?;
        for k in 1..=l.k_max {
            if (0..g.cols()).any(|c| l.value(k, GridPoint::new(c, r)) > line[k - 1][c]) {
                return Ok(false);
            }
        }
    }
    for c in 0..g.cols() {
        let line = restriction_landscape(g, Line::Column(c), l.k_max)?;
        for k in 1..=l.k_max {
            if (0..g.rows()).any(|r| l.value(k, GridPoint::new(c, r)) > line[k - 1][r]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
