//! Zigzag modules over F2, limits and colimits of finite diagrams,
//! generalized ranks and interval barcodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2linalg::{kernel_basis, rank, solve, BitMatrix, BitVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// map from index i to index i+1
    Forward,
    /// map from index i+1 to index i
    Backward,
}

/// A finite diagram of F2 vector spaces: nodes with dimensions and arrows
/// carrying matrices. Only the arrows given are constrained, so pass either
/// the covering relations of a commuting diagram or all comparable pairs.
#[derive(Debug, Clone, Default)]
pub struct Diagram {
    dims: Vec<usize>,
    arrows: Vec<(usize, usize, BitMatrix)>,
}

/// Limit cone: a basis of the space of compatible sections and, per node,
/// the projection onto that node.
#[derive(Debug, Clone)]
pub struct Limit {
    pub dim: usize,
    pub projections: Vec<BitMatrix>,
}

/// Colimit cocone: the quotient of the direct sum by the arrow relations and,
/// per node, the induced map into it.
#[derive(Debug, Clone)]
pub struct Colimit {
    pub dim: usize,
    pub injections: Vec<BitMatrix>,
}

impl Diagram {
    pub fn new(dims: Vec<usize>) -> Self {
        Diagram { dims, arrows: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn add_arrow(&mut self, src: usize, dst: usize, m: BitMatrix) -> Result<()> {
        let n = self.dims.len();
        if src >= n || dst >= n {
            return Err(Error::InvalidParameter(format!("arrow {src} -> {dst} outside {n} nodes")));
        }
        if m.shape() != (self.dims[dst], self.dims[src]) {
            return Err(Error::DimensionMismatch(format!(
                "arrow {src} -> {dst} has shape {:?}, expected {:?}",
                m.shape(),
                (self.dims[dst], self.dims[src])
            )));
        }
        self.arrows.push((src, dst, m));
        Ok(())
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.dims.len() + 1);
        let mut acc = 0;
        off.push(0);
        for &d in &self.dims {
            acc += d;
            off.push(acc);
        }
        off
    }

    pub fn limit(&self) -> Limit {
        let off = self.offsets();
        let total = off[self.dims.len()];
        let rows: usize = self.arrows.iter().map(|(_, b, _)| self.dims[*b]).sum();
        // A·v_src + v_dst = 0 for every arrow
        let mut c = BitMatrix::zeros(rows, total);
        let mut r = 0;
        for (a, b, m) in &self.arrows {
            c.put_block(r, off[*a], m);
            for i in 0..self.dims[*b] {
                c.flip(r + i, off[*b] + i);
            }
            r += self.dims[*b];
        }
        let kernel = kernel_basis(&c);
        let k = BitMatrix::from_columns(total, &kernel);
        let projections = (0..self.dims.len()).map(|p| k.block(off[p], off[p + 1], 0, kernel.len())).collect();
        Limit { dim: kernel.len(), projections }
    }

    pub fn colimit(&self) -> Colimit {
        let off = self.offsets();
        let total = off[self.dims.len()];
        let mut relations = Vec::new();
        for (a, b, m) in &self.arrows {
            for j in 0..self.dims[*a] {
                let mut v = BitVector::zeros(total);
                v.flip(off[*a] + j);
                for i in m.column(j).ones() {
                    v.flip(off[*b] + i);
                }
                relations.push(v);
            }
        }
        // rows of q span the annihilator of the relations, so ker q = span(relations)
        let rel_t = BitMatrix::from_columns(total, &relations).transpose();
        let annihilator = kernel_basis(&rel_t);
        let q = BitMatrix::from_columns(total, &annihilator).transpose();
        let injections = (0..self.dims.len()).map(|p| q.block(0, annihilator.len(), off[p], off[p + 1])).collect();
        Colimit { dim: annihilator.len(), injections }
    }

    /// Rank of the canonical limit-to-colimit map, read at node 0. For a
    /// connected diagram every node gives the same value.
    pub fn gen_rank(&self) -> usize {
        if self.dims.is_empty() || self.dims[0] == 0 {
            return 0;
        }
        let lim = self.limit();
        if lim.dim == 0 {
            return 0;
        }
        let colim = self.colimit();
        rank(&colim.injections[0].mul(&lim.projections[0]))
    }
}

/// A zigzag module `M_0 - M_1 - ... - M_n` with one arrow between neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct ZigzagModule {
    dims: Vec<usize>,
    arrows: Vec<(Direction, BitMatrix)>,
}

impl ZigzagModule {
    pub fn new(dims: Vec<usize>, arrows: Vec<(Direction, BitMatrix)>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Empty("zigzag module needs at least one space".into()));
        }
        if arrows.len() + 1 != dims.len() {
            return Err(Error::DimensionMismatch(format!("{} spaces need {} arrows, got {}", dims.len(), dims.len() - 1, arrows.len())));
        }
        for (i, (dir, m)) in arrows.iter().enumerate() {
            let expected = match dir {
                Direction::Forward => (dims[i + 1], dims[i]),
                Direction::Backward => (dims[i], dims[i + 1]),
            };
            if m.shape() != expected {
                return Err(Error::DimensionMismatch(format!("arrow {i} has shape {:?}, expected {:?}", m.shape(), expected)));
            }
        }
        Ok(ZigzagModule { dims, arrows })
    }

    /// Number of spaces, `n + 1`.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arrows(&self) -> &[(Direction, BitMatrix)] {
        &self.arrows
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.arrows.iter().map(|(d, _)| *d).collect()
    }

    fn check_range(&self, s: usize, e: usize) -> Result<()> {
        if s > e || e >= self.dims.len() {
            return Err(Error::InvalidRange { start: s, end: e, len: self.dims.len() });
        }
        Ok(())
    }

    /// The restriction to indices `s..=e` as a diagram (node 0 is index s).
    pub fn restrict(&self, s: usize, e: usize) -> Result<Diagram> {
        self.check_range(s, e)?;
        let mut d = Diagram::new(self.dims[s..=e].to_vec());
        for i in s..e {
            let (dir, m) = &self.arrows[i];
            match dir {
                Direction::Forward => d.add_arrow(i - s, i + 1 - s, m.clone())?,
                Direction::Backward => d.add_arrow(i + 1 - s, i - s, m.clone())?,
            }
        }
        Ok(d)
    }
}

pub fn limit(m: &ZigzagModule, s: usize, e: usize) -> Result<Limit> {
    Ok(m.restrict(s, e)?.limit())
}

pub fn colimit(m: &ZigzagModule, s: usize, e: usize) -> Result<Colimit> {
    Ok(m.restrict(s, e)?.colimit())
}

/// Generalized rank of the restriction to `s..=e`.
pub fn gen_rank_range(m: &ZigzagModule, s: usize, e: usize) -> Result<usize> {
    Ok(m.restrict(s, e)?.gen_rank())
}

/// Multiset of closed integer intervals, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Barcode {
    bars: Vec<(usize, usize)>,
}

impl Barcode {
    pub fn new(mut bars: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(b, d)) = bars.iter().find(|(b, d)| b > d) {
            return Err(Error::InvalidParameter(format!("bar [{b}, {d}] is reversed")));
        }
        bars.sort_unstable();
        Ok(Barcode { bars })
    }

    pub fn bars(&self) -> &[(usize, usize)] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Number of bars containing every index of `s..=e`.
    pub fn count_containing(&self, s: usize, e: usize) -> usize {
        self.bars.iter().filter(|&&(b, d)| b <= s && e <= d).count()
    }
}

/// Barcode by inclusion–exclusion over generalized ranks of ranges.
pub fn barcode(m: &ZigzagModule) -> Result<Barcode> {
    let n = m.len();
    let mut rk = vec![vec![0usize; n]; n];
    for s in 0..n {
        for e in s..n {
            // ranks vanish beyond a zero range
            if e > s && rk[s][e - 1] == 0 {
                continue;
            }
            rk[s][e] = gen_rank_range(m, s, e)?;
        }
    }
    let at = |s: isize, e: usize| -> i64 {
        if s < 0 || e >= n {
            0
        } else {
            rk[s as usize][e] as i64
        }
    };
    let mut bars = Vec::new();
    for b in 0..n {
        for d in b..n {
            let (bi, di) = (b as isize, d);
            let mult = at(bi, di) - at(bi - 1, di) - at(bi, di + 1) + at(bi - 1, di + 1);
            if mult < 0 {
                return Err(Error::Invariant(format!("negative multiplicity {mult} for [{b}, {d}]")));
            }
            bars.extend(std::iter::repeat_n((b, d), mult as usize));
        }
    }
    Barcode::new(bars)
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> (BitMatrix, BitMatrix) {
    loop {
        let p = BitMatrix::from_fn(n, n, |_, _| rng.random_bool(0.5));
        if rank(&p) == n {
            let inv_cols: Vec<BitVector> = (0..n)
                .map(|j| solve(&p, &BitVector::unit(n, j)).expect("square").expect("invertible"))
                .collect();
            return (p, BitMatrix::from_columns(n, &inv_cols));
        }
    }
}

/// A module with the given barcode: a direct sum of interval modules, each
/// space conjugated by a seeded random invertible matrix.
pub fn synth_from_bars(bars: &Barcode, directions: &[Direction], seed: u64) -> Result<ZigzagModule> {
    let n = directions.len() + 1;
    if let Some(&(b, d)) = bars.bars().iter().find(|&&(_, d)| d >= n) {
        return Err(Error::InvalidRange { start: b, end: d, len: n });
    }
    // basis of M_i: the bars containing i, in barcode order
    let members: Vec<Vec<usize>> =
        (0..n).map(|i| (0..bars.len()).filter(|&j| bars.bars()[j].0 <= i && i <= bars.bars()[j].1).collect()).collect();
    let dims: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conj: Vec<(BitMatrix, BitMatrix)> = dims.iter().map(|&d| random_invertible(d, &mut rng)).collect();
    let arrows = directions
        .iter()
        .enumerate()
        .map(|(i, &dir)| {
            let (src, dst) = match dir {
                Direction::Forward => (i, i + 1),
                Direction::Backward => (i + 1, i),
            };
            let raw = BitMatrix::from_fn(dims[dst], dims[src], |r, c| members[dst][r] == members[src][c]);
            (dir, conj[dst].0.mul(&raw).mul(&conj[src].1))
        })
        .collect();
    ZigzagModule::new(dims, arrows)
}

/// The k-th largest tent value `max(min(x − b, d − x), 0)` over the bars.
pub fn landscape_from_barcode(bc: &Barcode, k: usize, x: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let mut tents: Vec<i64> = bc
        .bars()
        .iter()
        .map(|&(b, d)| (x as i64 - b as i64).min(d as i64 - x as i64).max(0))
        .collect();
    tents.sort_unstable_by(|a, b| b.cmp(a));
    tents.get(k - 1).copied().unwrap_or(0) as usize
}
