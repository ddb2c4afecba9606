//! Simplicial complexes over global vertex ids and Vietoris-Rips constructions.
//!
//! Simplices of each dimension are kept as a flat, lexicographically sorted
//! array of ascending vertex tuples. Every simplex also carries a filtration
//! value: its diameter for Rips complexes, zero for complexes assembled by hand.

use crate::error::{Error, Result};
use crate::f2linalg::BitMatrix;
use crate::signal::{euclidean, PointCloud};

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    vertex_ids: Vec<VertexId>,
    /// `faces[p]` holds the p-simplices, `p + 1` ids each.
    faces: Vec<Vec<VertexId>>,
    values: Vec<Vec<f64>>,
}

impl SimplicialComplex {
    /// The face closure of the given simplices, all with filtration value 0.
    pub fn from_simplices<S: AsRef<[VertexId]>>(simplices: &[S]) -> Result<Self> {
        let mut by_dim: Vec<Vec<Vec<VertexId>>> = Vec::new();
        for s in simplices {
            let mut s = s.as_ref().to_vec();
            if s.is_empty() {
                return Err(Error::InvalidParameter("empty simplex".into()));
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("repeated vertex in simplex {s:?}")));
            }
            // all nonempty subsets
            let k = s.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<VertexId> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                let p = face.len() - 1;
                if by_dim.len() <= p {
                    by_dim.resize(p + 1, Vec::new());
                }
                by_dim[p].push(face);
            }
        }
        let mut faces = Vec::with_capacity(by_dim.len());
        let mut values = Vec::with_capacity(by_dim.len());
        for mut list in by_dim {
            list.sort();
            list.dedup();
            values.push(vec![0.0; list.len()]);
            faces.push(list.into_iter().flatten().collect());
        }
        let vertex_ids = faces.first().cloned().unwrap_or_default();
        Ok(SimplicialComplex { vertex_ids, faces, values })
    }

    /// Highest dimension with at least one simplex, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        (0..self.faces.len()).rev().find(|&p| !self.faces[p].is_empty())
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertex_ids
    }

    pub fn count(&self, p: usize) -> usize {
        self.faces.get(p).map_or(0, |f| f.len() / (p + 1))
    }

    pub fn simplex(&self, p: usize, i: usize) -> &[VertexId] {
        &self.faces[p][i * (p + 1)..(i + 1) * (p + 1)]
    }

    pub fn simplices(&self, p: usize) -> impl Iterator<Item = &[VertexId]> {
        self.faces.get(p).map(|f| f.as_slice()).unwrap_or(&[]).chunks_exact(p + 1)
    }

    /// Filtration value of the i-th p-simplex.
    pub fn value(&self, p: usize, i: usize) -> f64 {
        self.values[p][i]
    }

    pub fn values(&self, p: usize) -> &[f64] {
        self.values.get(p).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Position of `simplex` (ascending ids) among the p-simplices.
    pub fn index_of(&self, simplex: &[VertexId]) -> Option<usize> {
        let p = simplex.len().checked_sub(1)?;
        let faces = self.faces.get(p)?;
        let n = faces.len() / (p + 1);
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match faces[mid * (p + 1)..(mid + 1) * (p + 1)].cmp(simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Indices of the facets of the i-th p-simplex (p ≥ 1), in ascending order.
    pub fn facet_indices(&self, p: usize, i: usize) -> Vec<usize> {
        let s = self.simplex(p, i);
        let mut facet = Vec::with_capacity(p);
        let mut out: Vec<usize> = (0..=p)
            .map(|drop| {
                facet.clear();
                facet.extend(s.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &v)| v));
                self.index_of(&facet).expect("complex is face-closed")
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// For each p-simplex of `self`, its index in `other`; `None` if some
    /// simplex is missing from `other`.
    pub fn inclusion_indices(&self, other: &SimplicialComplex, p: usize) -> Option<Vec<usize>> {
        self.simplices(p).map(|s| other.index_of(s)).collect()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        (0..self.faces.len()).all(|p| self.inclusion_indices(other, p).is_some())
    }

    /// Every facet of every simplex is present, tuples strictly increase, and
    /// each dimension is sorted without duplicates.
    pub fn check_invariants(&self) -> bool {
        for p in 0..self.faces.len() {
            let list: Vec<&[VertexId]> = self.simplices(p).collect();
            if list.iter().any(|s| s.windows(2).any(|w| w[0] >= w[1])) {
                return false;
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            if p > 0 {
                for i in 0..list.len() {
                    let s = list[i];
                    for drop in 0..=p {
                        let f: Vec<VertexId> =
                            s.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &v)| v).collect();
                        if self.index_of(&f).is_none() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Boundary matrix over F2: rows are (p−1)-simplices, columns p-simplices.
pub fn boundary_matrix(k: &SimplicialComplex, p: usize) -> Result<BitMatrix> {
    if p == 0 {
        return Err(Error::InvalidParameter("boundary matrices start at p = 1".into()));
    }
    let mut m = BitMatrix::zeros(k.count(p - 1), k.count(p));
    for j in 0..k.count(p) {
        for i in k.facet_indices(p, j) {
            m.set(i, j, true);
        }
    }
    Ok(m)
}

/// Rips complex on points listed with ascending global ids.
fn rips_on(points: &[&[f64]], ids: &[VertexId], eps: f64, max_dim: usize) -> SimplicialComplex {
    let n = points.len();
    debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(points[i], points[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // higher neighbours of each vertex, ascending
    let up: Vec<Vec<usize>> =
        (0..n).map(|i| (i + 1..n).filter(|&j| dist[i * n + j] <= eps).collect()).collect();

    let mut faces: Vec<Vec<VertexId>> = vec![Vec::new(); max_dim + 1];
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); max_dim + 1];
    let mut stack: Vec<usize> = Vec::with_capacity(max_dim + 1);

    // depth-first clique expansion emits each dimension in lexicographic order
    fn expand(
        stack: &mut Vec<usize>,
        cands: &[usize],
        diam: f64,
        ctx: (&[Vec<usize>], &[f64], usize, &[VertexId], usize),
        faces: &mut [Vec<VertexId>],
        values: &mut [Vec<f64>],
    ) {
        let (up, dist, n, ids, max_dim) = ctx;
        let p = stack.len() - 1;
        faces[p].extend(stack.iter().map(|&v| ids[v]));
        values[p].push(diam);
        if p == max_dim {
            return;
        }
        for (ci, &v) in cands.iter().enumerate() {
            let mut d = diam;
            for &u in stack.iter() {
                d = d.max(dist[u * n + v]);
            }
            let next: Vec<usize> = cands[ci + 1..].iter().copied().filter(|w| up[v].binary_search(w).is_ok()).collect();
            stack.push(v);
            expand(stack, &next, d, ctx, faces, values);
            stack.pop();
        }
    }

    for v in 0..n {
        stack.push(v);
        expand(&mut stack, &up[v], 0.0, (&up, &dist, n, ids, max_dim), &mut faces, &mut values);
        stack.pop();
    }
    while faces.len() > 1 && faces.last().is_some_and(|f| f.is_empty()) {
        faces.pop();
        values.pop();
    }
    SimplicialComplex { vertex_ids: ids.to_vec(), faces, values }
}

/// Vietoris-Rips complex: a simplex on at most `max_dim + 1` points is
/// included iff all its pairwise distances are `≤ eps`. Vertices get ids
/// `id_offset..id_offset + |pc|`.
pub fn vietoris_rips(pc: &PointCloud, eps: f64, max_dim: usize, id_offset: VertexId) -> Result<SimplicialComplex> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be non-negative, got {eps}")));
    }
    let points: Vec<&[f64]> = pc.points().collect();
    let ids: Vec<VertexId> = (0..points.len() as VertexId).map(|i| id_offset + i).collect();
    Ok(rips_on(&points, &ids, eps, max_dim))
}

/// Rips complex of the concatenated cloud where the points of `a` and `b`
/// keep their own id ranges, so both single-cloud complexes are literal
/// subcomplexes.
pub fn union_rips(
    a: &PointCloud,
    b: &PointCloud,
    eps: f64,
    max_dim: usize,
    id_offset_a: VertexId,
    id_offset_b: VertexId,
) -> Result<SimplicialComplex> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be non-negative, got {eps}")));
    }
    if a.dim() != b.dim() && !a.is_empty() && !b.is_empty() {
        return Err(Error::DimensionMismatch("union of clouds of different dimension".into()));
    }
    let (na, nb) = (a.len() as VertexId, b.len() as VertexId);
    if na > 0 && nb > 0 && id_offset_a < id_offset_b + nb && id_offset_b < id_offset_a + na {
        return Err(Error::OverlappingIds);
    }
    let mut tagged: Vec<(VertexId, &[f64])> = a
        .points()
        .enumerate()
        .map(|(i, p)| (id_offset_a + i as VertexId, p))
        .chain(b.points().enumerate().map(|(i, p)| (id_offset_b + i as VertexId, p)))
        .collect();
    tagged.sort_by_key(|&(id, _)| id);
    let ids: Vec<VertexId> = tagged.iter().map(|t| t.0).collect();
    let points: Vec<&[f64]> = tagged.iter().map(|t| t.1).collect();
    Ok(rips_on(&points, &ids, eps, max_dim))
}
