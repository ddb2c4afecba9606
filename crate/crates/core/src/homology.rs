//! Homology over F2 with explicit cycle representatives and induced maps.
//!
//! A [`FilteredHomology`] reduces the boundary matrices of a complex once, in
//! the order given by the simplices' filtration values. Every sublevel set
//! `{σ : value(σ) ≤ t}` then has a homology basis read off directly:
//!
//! * each p-simplex `j` that does not reduce a boundary is *positive* and owns
//!   a cycle whose highest simplex (in filtration order) is `j`;
//! * a positive simplex is *killed* at the value of the (p+1)-simplex whose
//!   reduced boundary has `j` as its highest entry; that reduced boundary is
//!   itself a cycle with highest simplex `j`, so it doubles as representative
//!   before the kill;
//! * the homology basis at `t` is the set of positive simplices born by `t`
//!   and not yet killed.
//!
//! Because representatives and reduced boundaries have pairwise distinct
//! leading entries, the coordinates of any cycle follow from a single
//! top-down elimination (see [`HomologyBasis::coordinates`]).

use std::sync::Arc;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::f2linalg::{BitMatrix, BitVector};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    /// Reduces a (p−1)-boundary; never part of a cycle's leading term.
    Negative,
    /// Positive and killed at `death`; `column` holds the reduced boundary.
    Killed { death: f64, column: u32 },
    /// Positive and never killed inside the complex; `column` holds its cycle.
    Essential { column: u32 },
}

/// Boundary reduction of one complex in one homology degree.
#[derive(Debug)]
pub struct FilteredHomology {
    p: usize,
    /// filtration position -> simplex index
    order: Vec<u32>,
    /// simplex index -> filtration position
    position: Vec<u32>,
    birth: Vec<f64>,
    slots: Vec<Slot>,
    /// sparse columns in filtration positions, ascending
    columns: Vec<Vec<u32>>,
}

fn filtration_order(values: &[f64]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));
    order
}

/// Left-to-right column reduction with pivot lookup. Keeps every column's
/// reduced entries and, when tracking, the combination of original columns
/// that produced it.
struct Reducer {
    rows: usize,
    pivot_of_row: Vec<u32>,
    reduced: Vec<Vec<u32>>,
    combos: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

impl Reducer {
    fn new(rows: usize) -> Self {
        Reducer { rows, pivot_of_row: vec![NONE; rows], reduced: Vec::new(), combos: Vec::new() }
    }

    /// Reduces one column and stores it as column `self.reduced.len()`.
    fn push(&mut self, entries: &[usize], track: Option<(usize, usize)>) -> Option<usize> {
        let mut work = BitVector::zeros(self.rows);
        for &r in entries {
            work.flip(r);
        }
        let mut combo = track.map(|(len, me)| {
            let mut v = BitVector::zeros(len);
            v.flip(me);
            v
        });
        let low = loop {
            let Some(low) = work.highest_one() else { break None };
            let piv = self.pivot_of_row[low];
            if piv == NONE {
                break Some(low);
            }
            for &r in &self.reduced[piv as usize] {
                work.flip(r as usize);
            }
            if let Some(c) = combo.as_mut() {
                for &k in &self.combos[piv as usize] {
                    c.flip(k as usize);
                }
            }
        };
        let me = self.reduced.len() as u32;
        if let Some(low) = low {
            self.pivot_of_row[low] = me;
        }
        self.reduced.push(work.ones().map(|r| r as u32).collect());
        self.combos.push(combo.map(|c| c.ones().map(|k| k as u32).collect()).unwrap_or_default());
        low
    }
}

impl FilteredHomology {
    /// Reduces `∂_p` to find the cycles, then `∂_{p+1}` to pair them with
    /// their killers. The second pass stops once every cycle is paired.
    pub fn new(k: &SimplicialComplex, p: usize) -> Self {
        let n = k.count(p);
        let order = filtration_order(k.values(p));
        let mut position = vec![0u32; n];
        for (pos, &idx) in order.iter().enumerate() {
            position[idx as usize] = pos as u32;
        }
        let birth: Vec<f64> = order.iter().map(|&i| k.value(p, i as usize)).collect();

        // ∂_p: zero columns are positive, their combinations are cycles
        let mut cycles: Vec<Option<Vec<u32>>> = vec![None; n];
        if p == 0 {
            for (j, c) in cycles.iter_mut().enumerate() {
                *c = Some(vec![j as u32]);
            }
        } else {
            let mut red = Reducer::new(k.count(p - 1));
            for j in 0..n {
                let faces = k.facet_indices(p, order[j] as usize);
                if red.push(&faces, Some((n, j))).is_none() {
                    cycles[j] = Some(std::mem::take(&mut red.combos[j]));
                }
            }
        }
        let cycle_dim = cycles.iter().filter(|c| c.is_some()).count();

        // ∂_{p+1}: the reduced boundary with leading entry j kills j
        let mut slots = vec![Slot::Negative; n];
        let mut columns: Vec<Vec<u32>> = Vec::new();
        let cof_values = k.values(p + 1);
        let mut red = Reducer::new(n);
        let mut paired = 0;
        let mut facets: Vec<usize> = Vec::with_capacity(p + 2);
        for c in filtration_order(cof_values) {
            if paired == cycle_dim {
                break;
            }
            facets.clear();
            facets.extend(k.facet_indices(p + 1, c as usize).into_iter().map(|f| position[f] as usize));
            if let Some(low) = red.push(&facets, None) {
                slots[low] = Slot::Killed { death: cof_values[c as usize], column: columns.len() as u32 };
                columns.push(red.reduced.last().expect("just pushed").clone());
                paired += 1;
            }
        }
        for (j, c) in cycles.into_iter().enumerate() {
            if let (Some(c), Slot::Negative) = (c, slots[j]) {
                slots[j] = Slot::Essential { column: columns.len() as u32 };
                columns.push(c);
            }
        }

        FilteredHomology { p, order, position, birth, slots, columns }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn simplex_count(&self) -> usize {
        self.order.len()
    }

    /// The homology basis of the sublevel set at `threshold`.
    pub fn basis_at(self: &Arc<Self>, threshold: f64) -> HomologyBasis {
        let generators = (0..self.slots.len())
            .filter(|&j| self.birth[j] <= threshold)
            .filter(|&j| match self.slots[j] {
                Slot::Negative => false,
                Slot::Killed { death, .. } => death > threshold,
                Slot::Essential { .. } => true,
            })
            .map(|j| j as u32)
            .collect();
        HomologyBasis { homology: Arc::clone(self), threshold, generators }
    }

    /// Betti numbers at each threshold, without materializing bases.
    pub fn betti_at(&self, threshold: f64) -> usize {
        (0..self.slots.len())
            .filter(|&j| self.birth[j] <= threshold)
            .filter(|&j| match self.slots[j] {
                Slot::Negative => false,
                Slot::Killed { death, .. } => death > threshold,
                Slot::Essential { .. } => true,
            })
            .count()
    }

    fn column_of(&self, j: usize) -> &[u32] {
        match self.slots[j] {
            Slot::Killed { column, .. } | Slot::Essential { column } => &self.columns[column as usize],
            Slot::Negative => &[],
        }
    }
}

/// Coset representatives of `H_p` of one sublevel set of a complex.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    homology: Arc<FilteredHomology>,
    threshold: f64,
    /// filtration positions of the generating simplices, ascending
    generators: Vec<u32>,
}

impl HomologyBasis {
    pub fn degree(&self) -> usize {
        self.homology.p
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn betti(&self) -> usize {
        self.generators.len()
    }

    /// Number of p-simplices in the underlying complex (the chain-space dimension).
    pub fn chain_dim(&self) -> usize {
        self.homology.simplex_count()
    }

    fn to_simplices(&self, column: &[u32]) -> Vec<usize> {
        let mut out: Vec<usize> = column.iter().map(|&pos| self.homology.order[pos as usize] as usize).collect();
        out.sort_unstable();
        out
    }

    /// Cycle representatives as sorted lists of p-simplex indices.
    pub fn cycle_reps(&self) -> Vec<Vec<usize>> {
        self.generators.iter().map(|&g| self.to_simplices(self.homology.column_of(g as usize))).collect()
    }

    /// A basis of the boundaries `B_p` at this threshold, as simplex index lists.
    pub fn boundary_basis(&self) -> Vec<Vec<usize>> {
        let h = &self.homology;
        (0..h.slots.len())
            .filter_map(|j| match h.slots[j] {
                Slot::Killed { death, column } if death <= self.threshold => {
                    Some(self.to_simplices(&h.columns[column as usize]))
                }
                _ => None,
            })
            .collect()
    }

    /// Coordinates of the class of `chain` (p-simplex indices, repeated
    /// indices cancel) in this basis. Fails if the chain is not a cycle of
    /// this sublevel set.
    pub fn coordinates<I: IntoIterator<Item = usize>>(&self, chain: I) -> Result<BitVector> {
        let h = &self.homology;
        let mut work = BitVector::zeros(h.simplex_count());
        for s in chain {
            work.flip(h.position[s] as usize);
        }
        let mut coords = BitVector::zeros(self.betti());
        while let Some(j) = work.highest_one() {
            if h.birth[j] > self.threshold {
                return Err(Error::Invariant(format!("chain uses a simplex born after {}", self.threshold)));
            }
            match h.slots[j] {
                Slot::Negative => {
                    return Err(Error::Invariant("chain is not a cycle".into()));
                }
                Slot::Killed { death, .. } if death <= self.threshold => {}
                _ => {
                    let g = self
                        .generators
                        .binary_search(&(j as u32))
                        .map_err(|_| Error::Invariant("leading simplex is not a generator".into()))?;
                    coords.flip(g);
                }
            }
            for &r in h.column_of(j) {
                work.flip(r as usize);
            }
        }
        Ok(coords)
    }
}

/// The homology basis of the whole complex.
pub fn homology_basis(k: &SimplicialComplex, p: usize) -> HomologyBasis {
    Arc::new(FilteredHomology::new(k, p)).basis_at(f64::INFINITY)
}

/// Matrix of the map `H_p(src) → H_p(dst)` induced by a simplicial inclusion.
/// `inclusion[i]` is the index in `dst` of the i-th p-simplex of `src`.
pub fn induced_map(src: &HomologyBasis, dst: &HomologyBasis, inclusion: &[usize]) -> Result<BitMatrix> {
    if src.degree() != dst.degree() {
        return Err(Error::DimensionMismatch("homology degrees differ".into()));
    }
    if inclusion.len() != src.chain_dim() {
        return Err(Error::DimensionMismatch(format!(
            "inclusion covers {} simplices, source has {}",
            inclusion.len(),
            src.chain_dim()
        )));
    }
    let mut m = BitMatrix::zeros(dst.betti(), src.betti());
    for (j, rep) in src.cycle_reps().iter().enumerate() {
        let coords = dst.coordinates(rep.iter().map(|&s| inclusion[s]))?;
        for i in coords.ones() {
            m.set(i, j, true);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{boundary_matrix, vietoris_rips};
    use crate::f2linalg::{rank, solve};
    use crate::signal::PointCloud;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complex(simplices: &[&[u32]]) -> SimplicialComplex {
        SimplicialComplex::from_simplices(simplices).unwrap()
    }

    fn identity_inclusion(k: &SimplicialComplex, p: usize) -> Vec<usize> {
        (0..k.count(p)).collect()
    }

    // β_p from boundary ranks, independent of the reduction.
    fn betti_by_rank(k: &SimplicialComplex, p: usize) -> usize {
        let z = if p == 0 { k.count(0) } else { k.count(p) - rank(&boundary_matrix(k, p).unwrap()) };
        let b = if k.count(p + 1) == 0 { 0 } else { rank(&boundary_matrix(k, p + 1).unwrap()) };
        z - b
    }

    #[test]
    fn betti_examples() {
        let hollow = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(homology_basis(&hollow, 1).betti(), 1);
        let filled = complex(&[&[0, 1, 2]]);
        assert_eq!(homology_basis(&filled, 1).betti(), 0);
        let two = complex(&[&[0], &[5]]);
        assert_eq!(homology_basis(&two, 0).betti(), 2);
    }

    #[test]
    fn induced_map_examples() {
        let hollow = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
        let filled = complex(&[&[0, 1, 2]]);
        let h = homology_basis(&hollow, 1);
        assert_eq!(induced_map(&h, &h, &identity_inclusion(&hollow, 1)).unwrap(), BitMatrix::identity(1));
        let f = homology_basis(&filled, 1);
        let inc = hollow.inclusion_indices(&filled, 1).unwrap();
        let m = induced_map(&h, &f, &inc).unwrap();
        assert_eq!(m.shape(), (0, 1));

        // square with one diagonal and no triangles keeps the outer cycle alive
        let square = complex(&[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let diag = complex(&[&[0, 1], &[1, 2], &[2, 3], &[0, 3], &[0, 2]]);
        let hs = homology_basis(&square, 1);
        let hd = homology_basis(&diag, 1);
        assert_eq!(hd.betti(), 2);
        let m = induced_map(&hs, &hd, &square.inclusion_indices(&diag, 1).unwrap()).unwrap();
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn reps_are_cycles_and_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = rng.random_range(4..14);
            let pc = PointCloud::from_flat(2, (0..2 * n).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
            let k = vietoris_rips(&pc, rng.random_range(0.2..0.7), 3, 0).unwrap();
            for p in 0..=2 {
                let hb = homology_basis(&k, p);
                assert_eq!(hb.betti(), betti_by_rank(&k, p), "p = {p}");
                let reps = hb.cycle_reps();
                let bnd = hb.boundary_basis();
                let dim = k.count(p);
                let to_vec = |c: &Vec<usize>| BitVector::from_indices(dim, c);
                if p > 0 {
                    let d = boundary_matrix(&k, p).unwrap();
                    for r in &reps {
                        assert!(d.mul_vec(&to_vec(r)).is_zero());
                    }
                }
                // reps stay independent modulo boundaries
                let mut cols: Vec<BitVector> = bnd.iter().map(to_vec).collect();
                let rb = rank(&BitMatrix::from_columns(dim, &cols));
                assert_eq!(rb, bnd.len());
                cols.extend(reps.iter().map(to_vec));
                assert_eq!(rank(&BitMatrix::from_columns(dim, &cols)), rb + reps.len());
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let pc = PointCloud::from_flat(2, (0..24).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
            let k = vietoris_rips(&pc, 0.45, 2, 0).unwrap();
            let hb = homology_basis(&k, 1);
            let reps = hb.cycle_reps();
            let bnd = hb.boundary_basis();
            // a random cycle: random combination of reps plus random boundaries
            let dim = k.count(1);
            let mut chain = BitVector::zeros(dim);
            let mut expected = BitVector::zeros(hb.betti());
            for (i, r) in reps.iter().enumerate() {
                if rng.random_bool(0.5) {
                    chain.xor_assign(&BitVector::from_indices(dim, r));
                    expected.flip(i);
                }
            }
            for b in &bnd {
                if rng.random_bool(0.5) {
                    chain.xor_assign(&BitVector::from_indices(dim, b));
                }
            }
            let coords = hb.coordinates(chain.ones()).unwrap();
            assert_eq!(coords, expected);
            // independent check with a dense solve against [reps | boundaries]
            let mut cols: Vec<BitVector> = reps.iter().map(|r| BitVector::from_indices(dim, r)).collect();
            cols.extend(bnd.iter().map(|b| BitVector::from_indices(dim, b)));
            let x = solve(&BitMatrix::from_columns(dim, &cols), &chain).unwrap().unwrap();
            for i in 0..hb.betti() {
                assert_eq!(x.get(i), expected.get(i));
            }
        }
    }

    #[test]
    fn non_cycles_are_rejected() {
        let hollow = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
        let h = homology_basis(&hollow, 1);
        assert!(h.coordinates([0usize]).is_err());
    }

    #[test]
    fn functoriality_on_nested_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let n = rng.random_range(5..12);
            let pc = PointCloud::from_flat(2, (0..2 * n).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
            let e1 = rng.random_range(0.1..0.5);
            let e2 = e1 + rng.random_range(0.0..0.3);
            let e3 = e2 + rng.random_range(0.0..0.3);
            let ks: Vec<_> = [e1, e2, e3].iter().map(|&e| vietoris_rips(&pc, e, 2, 0).unwrap()).collect();
            for p in 0..=1 {
                let hs: Vec<_> = ks.iter().map(|k| homology_basis(k, p)).collect();
                let inc = |a: usize, b: usize| ks[a].inclusion_indices(&ks[b], p).unwrap();
                let kl = induced_map(&hs[0], &hs[1], &inc(0, 1)).unwrap();
                let lm = induced_map(&hs[1], &hs[2], &inc(1, 2)).unwrap();
                let km = induced_map(&hs[0], &hs[2], &inc(0, 2)).unwrap();
                assert_eq!(lm.mul(&kl), km);
            }
        }
    }

    #[test]
    fn sublevel_bases_match_direct_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let pc = PointCloud::from_flat(2, (0..30).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
            let big = vietoris_rips(&pc, 0.8, 2, 0).unwrap();
            let fh = Arc::new(FilteredHomology::new(&big, 1));
            for t in [0.1, 0.25, 0.4, 0.6, 0.8] {
                let small = vietoris_rips(&pc, t, 2, 0).unwrap();
                let direct = homology_basis(&small, 1);
                let sub = fh.basis_at(t);
                assert_eq!(sub.betti(), direct.betti());
                assert_eq!(fh.betti_at(t), direct.betti());
                // sublevel reps map isomorphically onto the direct basis
                let back: Vec<usize> = (0..big.count(1)).map(|i| small.index_of(big.simplex(1, i)).unwrap_or(usize::MAX)).collect();
                let m = induced_map(&sub, &direct, &back).unwrap();
                assert_eq!(rank(&m), direct.betti());
            }
        }
    }

    #[test]
    fn disjoint_union_adds_betti() {
        let a = complex(&[&[0, 1], &[1, 2], &[0, 2], &[3]]);
        let b = complex(&[&[10, 11], &[11, 12], &[12, 13], &[10, 13], &[10, 11, 12]]);
        let ab = complex(&[&[0, 1], &[1, 2], &[0, 2], &[3], &[10, 11], &[11, 12], &[12, 13], &[10, 13], &[10, 11, 12]]);
        for p in 0..=1 {
            assert_eq!(
                homology_basis(&ab, p).betti(),
                homology_basis(&a, p).betti() + homology_basis(&b, p).betti()
            );
        }
    }
}
