//! The grid of homology groups over windows × scales.
//!
//! Columns alternate between windows (even) and unions of neighbouring
//! windows (odd); rows are scales in ascending order. Arrows run from a
//! window into each adjacent union within a row and from each row into the
//! next. The module is taken to be zero outside the grid.

use std::sync::Arc;

use rayon::prelude::*;

use crate::complex::{union_rips, vietoris_rips, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::f2linalg::BitMatrix;
use crate::homology::{induced_map, FilteredHomology};
use crate::signal::WindowedClouds;
use crate::zigzag::{Diagram, Direction, ZigzagModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub col: usize,
    pub row: usize,
}

impl GridPoint {
    pub fn new(col: usize, row: usize) -> Self {
        GridPoint { col, row }
    }
}

/// Closed ball of the max metric around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareRegion {
    pub center: GridPoint,
    pub radius: usize,
}

impl SquareRegion {
    pub fn new(center: GridPoint, radius: usize) -> Self {
        SquareRegion { center, radius }
    }

    pub fn contains(&self, x: GridPoint) -> bool {
        self.center.col.abs_diff(x.col) <= self.radius && self.center.row.abs_diff(x.row) <= self.radius
    }

    pub fn nodes(&self) -> Vec<GridPoint> {
        let (c, r, e) = (self.center.col, self.center.row, self.radius);
        let mut out = Vec::with_capacity((2 * e + 1) * (2 * e + 1));
        for row in r.saturating_sub(e)..=r + e {
            for col in c.saturating_sub(e)..=c + e {
                out.push(GridPoint::new(col, row));
            }
        }
        out
    }
}

/// The order on grid nodes: generated by "window into adjacent union, same
/// row" and "same column, next row".
pub fn poset_leq(a: GridPoint, b: GridPoint) -> bool {
    a.row <= b.row && (a.col == b.col || (a.col.is_multiple_of(2) && a.col.abs_diff(b.col) == 1))
}

/// Largest radius whose square around `center` stays inside a `cols × rows` grid.
pub fn radius_bound(cols: usize, rows: usize, center: GridPoint) -> usize {
    center.col.min(cols - 1 - center.col).min(center.row).min(rows - 1 - center.row)
}

fn check_region(cols: usize, rows: usize, r: &SquareRegion) -> Result<()> {
    let c = r.center;
    if c.col >= cols || c.row >= rows || r.radius > radius_bound(cols, rows, c) {
        return Err(Error::RegionOutOfRange { col: c.col, row: c.row, radius: r.radius });
    }
    Ok(())
}

fn fences_unchecked(r: &SquareRegion) -> (Vec<GridPoint>, Vec<GridPoint>) {
    let (c, row, e) = (r.center.col, r.center.row, r.radius);
    if e == 0 {
        return (vec![r.center], vec![r.center]);
    }
    let (lo, hi) = (c - e, c + e);
    let first_with = |parity: usize| if lo % 2 == parity { lo } else { lo + 1 };
    let last_with = |parity: usize| if hi % 2 == parity { hi } else { hi - 1 };
    let lower = (first_with(0)..=last_with(0)).map(|col| GridPoint::new(col, row - e)).collect();
    let upper = (first_with(1)..=last_with(1)).map(|col| GridPoint::new(col, row + e)).collect();
    (lower, upper)
}

/// Lower fence (bottom row, from the first to the last window column) and
/// upper fence (top row, from the first to the last union column).
pub fn fences(cols: usize, rows: usize, r: &SquareRegion) -> Result<(Vec<GridPoint>, Vec<GridPoint>)> {
    check_region(cols, rows, r)?;
    Ok(fences_unchecked(r))
}

/// A path through nested squares. `markers[e]` is the node range that runs
/// from the lower to the upper fence of the square of radius `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPath {
    pub nodes: Vec<GridPoint>,
    pub arrows: Vec<Direction>,
    pub markers: Vec<(usize, usize)>,
}

fn walk_row(out: &mut Vec<GridPoint>, row: usize, from: usize, to: usize) {
    let mut col = from;
    while col != to {
        col = if to > col { col + 1 } else { col - 1 };
        out.push(GridPoint::new(col, row));
    }
}

fn path_nodes(center: GridPoint, radius: usize, markers: &mut Vec<(usize, usize)>) -> Vec<GridPoint> {
    if radius == 0 {
        markers.push((0, 0));
        return vec![center];
    }
    let inner = path_nodes(center, radius - 1, markers);
    let (lower, upper) = fences_unchecked(&SquareRegion::new(center, radius));
    let mut nodes = lower;
    let last = *nodes.last().expect("fence is nonempty");
    walk_row(&mut nodes, last.row, last.col, inner[0].col);
    let shift = nodes.len();
    for m in markers.iter_mut() {
        m.0 += shift;
        m.1 += shift;
    }
    nodes.extend_from_slice(&inner);
    let last = *nodes.last().expect("nonempty");
    walk_row(&mut nodes, last.row, last.col, upper[0].col);
    nodes.extend_from_slice(&upper);
    markers.push((0, nodes.len() - 1));
    nodes
}

/// The boundary path around `center` up to `radius`.
pub fn boundary_path(cols: usize, rows: usize, center: GridPoint, radius: usize) -> Result<BoundaryPath> {
    check_region(cols, rows, &SquareRegion::new(center, radius))?;
    let mut markers = Vec::with_capacity(radius + 1);
    let nodes = path_nodes(center, radius, &mut markers);
    let arrows = nodes
        .windows(2)
        .map(|w| if poset_leq(w[0], w[1]) { Direction::Forward } else { Direction::Backward })
        .collect();
    Ok(BoundaryPath { nodes, arrows, markers })
}

/// A module over the `cols × rows` grid with all structure maps cached.
#[derive(Debug, Clone)]
pub struct BifiltrationGrid {
    cols: usize,
    rows: usize,
    hom_dim: usize,
    epsilons: Vec<f64>,
    /// [row][col]
    dims: Vec<Vec<usize>>,
    /// [row][e]: between columns e and e+1, from the even one to the odd one
    h_maps: Vec<Vec<BitMatrix>>,
    /// [row][col]: from row to row+1
    v_maps: Vec<Vec<BitMatrix>>,
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::Empty("no scales".into()));
    }
    if epsilons.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::InvalidParameter("scales must be finite and non-negative".into()));
    }
    if epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("scales must be strictly ascending".into()));
    }
    Ok(())
}

/// Homology of every window and union at every scale, with all induced maps.
pub fn build_grid(wc: &WindowedClouds, epsilons: &[f64], p: usize) -> Result<BifiltrationGrid> {
    check_epsilons(epsilons)?;
    let t = wc.len();
    let cols = 2 * t - 1;
    let rows = epsilons.len();
    let max_eps = epsilons[rows - 1];
    let windows = wc.windows();
    let mut offsets = Vec::with_capacity(t);
    let mut acc: usize = 0;
    for w in windows {
        offsets.push(VertexId::try_from(acc).map_err(|_| Error::InvalidParameter("too many points".into()))?);
        acc += w.len();
    }
    VertexId::try_from(acc).map_err(|_| Error::InvalidParameter("too many points".into()))?;

    // one complex per column at the largest scale; smaller scales are sublevel sets
    let built: Vec<(SimplicialComplex, Arc<FilteredHomology>)> = (0..cols)
        .into_par_iter()
        .map(|c| {
            let i = c / 2;
            let k = if c % 2 == 0 {
                vietoris_rips(&windows[i], max_eps, p + 1, offsets[i])?
            } else {
                union_rips(&windows[i], &windows[i + 1], max_eps, p + 1, offsets[i], offsets[i + 1])?
            };
            let h = Arc::new(FilteredHomology::new(&k, p));
            Ok((k, h))
        })
        .collect::<Result<_>>()?;

    let bases: Vec<Vec<_>> = built.iter().map(|(_, h)| epsilons.iter().map(|&e| h.basis_at(e)).collect()).collect();
    let dims = (0..rows).map(|j| (0..cols).map(|c| bases[c][j].betti()).collect()).collect();

    let v_maps: Vec<Vec<BitMatrix>> = (0..rows.saturating_sub(1))
        .into_par_iter()
        .map(|j| {
            (0..cols)
                .map(|c| {
                    let id: Vec<usize> = (0..built[c].0.count(p)).collect();
                    induced_map(&bases[c][j], &bases[c][j + 1], &id)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let inclusions: Vec<Vec<usize>> = (0..cols.saturating_sub(1))
        .map(|e| {
            let (w, u) = if e % 2 == 0 { (e, e + 1) } else { (e + 1, e) };
            built[w]
                .0
                .inclusion_indices(&built[u].0, p)
                .ok_or_else(|| Error::Invariant("window complex is not inside the union".into()))
        })
        .collect::<Result<_>>()?;
    let h_maps: Vec<Vec<BitMatrix>> = (0..rows)
        .into_par_iter()
        .map(|j| {
            (0..cols.saturating_sub(1))
                .map(|e| {
                    let (w, u) = if e % 2 == 0 { (e, e + 1) } else { (e + 1, e) };
                    induced_map(&bases[w][j], &bases[u][j], &inclusions[e])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(BifiltrationGrid { cols, rows, hom_dim: p, epsilons: epsilons.to_vec(), dims, h_maps, v_maps })
}

impl BifiltrationGrid {
    /// A grid module from explicit spaces and maps; shapes and commutation
    /// are checked. `cols` must be odd.
    pub fn from_parts(
        epsilons: Vec<f64>,
        hom_dim: usize,
        dims: Vec<Vec<usize>>,
        h_maps: Vec<Vec<BitMatrix>>,
        v_maps: Vec<Vec<BitMatrix>>,
    ) -> Result<Self> {
        check_epsilons(&epsilons)?;
        let rows = epsilons.len();
        if dims.len() != rows {
            return Err(Error::ShapeMismatch(format!("{} rows of spaces for {rows} scales", dims.len())));
        }
        let cols = dims[0].len();
        if cols.is_multiple_of(2) || dims.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("every row needs the same odd number of columns".into()));
        }
        if h_maps.len() != rows || h_maps.iter().any(|r| r.len() != cols - 1) {
            return Err(Error::ShapeMismatch("horizontal maps must be rows × (cols − 1)".into()));
        }
        if v_maps.len() != rows - 1 || v_maps.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("vertical maps must be (rows − 1) × cols".into()));
        }
        let g = BifiltrationGrid { cols, rows, hom_dim, epsilons, dims, h_maps, v_maps };
        for j in 0..rows {
            for e in 0..cols - 1 {
                let (w, u) = g.h_ends(e);
                if g.h_maps[j][e].shape() != (g.dims[j][u], g.dims[j][w]) {
                    return Err(Error::ShapeMismatch(format!("horizontal map at row {j}, edge {e}")));
                }
            }
            if j + 1 < rows {
                for c in 0..cols {
                    if g.v_maps[j][c].shape() != (g.dims[j + 1][c], g.dims[j][c]) {
                        return Err(Error::ShapeMismatch(format!("vertical map at row {j}, column {c}")));
                    }
                }
            }
        }
        if !g.commutes() {
            return Err(Error::InvalidParameter("grid maps do not commute".into()));
        }
        Ok(g)
    }

    /// The interval module supported on `support`: F2 on each supported
    /// node, identities between supported neighbours. The support must be
    /// convex for the result to be a module.
    pub fn interval_module(cols: usize, rows: usize, support: impl Fn(GridPoint) -> bool) -> Result<Self> {
        let dims: Vec<Vec<usize>> =
            (0..rows).map(|r| (0..cols).map(|c| usize::from(support(GridPoint::new(c, r)))).collect()).collect();
        let link = |a: usize, b: usize| BitMatrix::from_fn(b, a, |_, _| true);
        let h_maps = (0..rows)
            .map(|r| {
                (0..cols - 1)
                    .map(|e| {
                        let (w, u) = if e % 2 == 0 { (e, e + 1) } else { (e + 1, e) };
                        link(dims[r][w], dims[r][u])
                    })
                    .collect()
            })
            .collect();
        let v_maps = (0..rows - 1).map(|r| (0..cols).map(|c| link(dims[r][c], dims[r + 1][c])).collect()).collect();
        BifiltrationGrid::from_parts((0..rows).map(|r| r as f64).collect(), 0, dims, h_maps, v_maps)
    }

    /// Pointwise direct sum of two modules on the same grid.
    pub fn direct_sum(&self, other: &BifiltrationGrid) -> Result<Self> {
        if (self.cols, self.rows) != (other.cols, other.rows) {
            return Err(Error::ShapeMismatch("direct sum of grids of different shape".into()));
        }
        let diag = |a: &BitMatrix, b: &BitMatrix| {
            let mut m = BitMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
            m.put_block(0, 0, a);
            m.put_block(a.rows(), a.cols(), b);
            m
        };
        let sum_maps = |x: &Vec<Vec<BitMatrix>>, y: &Vec<Vec<BitMatrix>>| -> Vec<Vec<BitMatrix>> {
            x.iter().zip(y).map(|(rx, ry)| rx.iter().zip(ry).map(|(a, b)| diag(a, b)).collect()).collect()
        };
        let dims = self
            .dims
            .iter()
            .zip(&other.dims)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        BifiltrationGrid::from_parts(
            self.epsilons.clone(),
            self.hom_dim,
            dims,
            sum_maps(&self.h_maps, &other.h_maps),
            sum_maps(&self.v_maps, &other.v_maps),
        )
    }

    fn h_ends(&self, e: usize) -> (usize, usize) {
        if e.is_multiple_of(2) {
            (e, e + 1)
        } else {
            (e + 1, e)
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn t_windows(&self) -> usize {
        self.cols.div_ceil(2)
    }

    pub fn hom_dim(&self) -> usize {
        self.hom_dim
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn dim(&self, x: GridPoint) -> usize {
        self.dims[x.row][x.col]
    }

    /// Map at `row` between columns `e` and `e + 1`, from the window to the union.
    pub fn h_map(&self, row: usize, e: usize) -> &BitMatrix {
        &self.h_maps[row][e]
    }

    /// Map in column `col` from `row` to `row + 1`.
    pub fn v_map(&self, row: usize, col: usize) -> &BitMatrix {
        &self.v_maps[row][col]
    }

    pub fn contains(&self, x: GridPoint) -> bool {
        x.col < self.cols && x.row < self.rows
    }

    pub fn radius_bound(&self, center: GridPoint) -> usize {
        radius_bound(self.cols, self.rows, center)
    }

    /// Every unit square commutes.
    pub fn commutes(&self) -> bool {
        (0..self.rows.saturating_sub(1)).all(|j| {
            (0..self.cols - 1).all(|e| {
                let (w, u) = self.h_ends(e);
                self.v_maps[j][u].mul(&self.h_maps[j][e]) == self.h_maps[j + 1][e].mul(&self.v_maps[j][w])
            })
        })
    }

    /// The map `M(a ≤ b)`: horizontal step first, then up the target column.
    pub fn structure_map(&self, a: GridPoint, b: GridPoint) -> Result<BitMatrix> {
        if !self.contains(a) || !self.contains(b) || !poset_leq(a, b) {
            return Err(Error::InvalidParameter(format!("{a:?} is not below {b:?}")));
        }
        let mut m = if a.col == b.col {
            BitMatrix::identity(self.dim(a))
        } else {
            self.h_maps[a.row][a.col.min(b.col)].clone()
        };
        for j in a.row..b.row {
            m = self.v_maps[j][b.col].mul(&m);
        }
        Ok(m)
    }

    /// The zigzag module along a path of consecutive comparable nodes.
    pub fn path_module(&self, nodes: &[GridPoint]) -> Result<ZigzagModule> {
        let dims = nodes.iter().map(|&x| self.dim(x)).collect();
        let arrows = nodes
            .windows(2)
            .map(|w| {
                if poset_leq(w[0], w[1]) {
                    Ok((Direction::Forward, self.structure_map(w[0], w[1])?))
                } else {
                    Ok((Direction::Backward, self.structure_map(w[1], w[0])?))
                }
            })
            .collect::<Result<_>>()?;
        ZigzagModule::new(dims, arrows)
    }

    /// The zigzag module of one row.
    pub fn row_module(&self, row: usize) -> Result<ZigzagModule> {
        if row >= self.rows {
            return Err(Error::InvalidParameter(format!("row {row} outside {} rows", self.rows)));
        }
        self.path_module(&(0..self.cols).map(|c| GridPoint::new(c, row)).collect::<Vec<_>>())
    }

    /// The one-parameter module of one column.
    pub fn column_module(&self, col: usize) -> Result<ZigzagModule> {
        if col >= self.cols {
            return Err(Error::InvalidParameter(format!("column {col} outside {} columns", self.cols)));
        }
        self.path_module(&(0..self.rows).map(|r| GridPoint::new(col, r)).collect::<Vec<_>>())
    }

    /// Generalized ranks of the squares around `center` for every radius
    /// that keeps the square inside the grid, read off one boundary path.
    pub fn region_ranks(&self, center: GridPoint) -> Result<Vec<usize>> {
        let bound = self.radius_bound(center);
        let path = boundary_path(self.cols, self.rows, center, bound)?;
        let m = self.path_module(&path.nodes)?;
        let mut ranks = Vec::with_capacity(bound + 1);
        for &(s, e) in &path.markers {
            // ranks only shrink as squares grow
            if ranks.last() == Some(&0) {
                ranks.push(0);
                continue;
            }
            ranks.push(crate::zigzag::gen_rank_range(&m, s, e)?);
        }
        Ok(ranks)
    }

    /// Generalized rank of the square, from the limit and colimit over all
    /// of its nodes and every comparable pair.
    pub fn oracle_interval_rank(&self, r: &SquareRegion) -> Result<usize> {
        check_region(self.cols, self.rows, r)?;
        let nodes = r.nodes();
        let mut d = Diagram::new(nodes.iter().map(|&x| self.dim(x)).collect());
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if i != j && poset_leq(a, b) {
                    d.add_arrow(i, j, self.structure_map(a, b)?)?;
                }
            }
        }
        Ok(d.gen_rank())
    }
}
