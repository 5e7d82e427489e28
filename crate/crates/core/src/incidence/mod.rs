//! Finite incidence structures and unitals.
//!
//! Points are `0..v`; blocks are strictly increasing point lists kept in
//! lexicographic order, so two structures with the same block set compare
//! equal and serialize identically.

mod io;
mod iso;
mod onan;

pub use io::{parse_unital_text, read_unital, unital_text, write_unital, ParseError, ReadError};
pub use iso::{isomorphism_search, IsoOutcome};
pub use onan::{
    is_onan_configuration, onan_search, onan_search_linear, OnanConfiguration, OnanOutcome,
};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error("block {block} contains point {point} outside 0..{v}")]
    PointOutOfRange { block: usize, point: u32, v: usize },
    #[error("block {block} repeats point {point}")]
    RepeatedPoint { block: usize, point: u32 },
    #[error("block {block} duplicates an earlier block")]
    DuplicateBlock { block: usize },
    #[error("points must be distinct")]
    SamePoint,
    #[error("point {0} out of range")]
    NoSuchPoint(u32),
    #[error("structure is not a linear space")]
    NotLinearSpace,
    #[error("line sizes are not constant")]
    NonConstantLineSize,
    #[error("needs more than one line of size greater than two")]
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    v: usize,
    blocks: Vec<Vec<u32>>,
    point_index: Vec<Vec<u32>>,
}

impl Incidence {
    /// Sorts every block and the block list; rejects out-of-range points,
    /// repeated points and repeated blocks. `DuplicateBlock` reports the
    /// position in the input order.
    pub fn new(v: usize, blocks: Vec<Vec<u32>>) -> Result<Self, IncidenceError> {
        let mut tagged = Vec::with_capacity(blocks.len());
        for (i, mut b) in blocks.into_iter().enumerate() {
            b.sort_unstable();
            for w in b.windows(2) {
                if w[0] == w[1] {
                    return Err(IncidenceError::RepeatedPoint {
                        block: i,
                        point: w[0],
                    });
                }
            }
            if let Some(&pt) = b.iter().find(|&&x| x as usize >= v) {
                return Err(IncidenceError::PointOutOfRange {
                    block: i,
                    point: pt,
                    v,
                });
            }
            tagged.push((b, i));
        }
        tagged.sort();
        for w in tagged.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(IncidenceError::DuplicateBlock {
                    block: w[1].1.max(w[0].1),
                });
            }
        }
        let blocks: Vec<Vec<u32>> = tagged.into_iter().map(|(b, _)| b).collect();
        let mut point_index = vec![Vec::new(); v];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                point_index[x as usize].push(i as u32);
            }
        }
        Ok(Incidence {
            v,
            blocks,
            point_index,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[u32] {
        &self.blocks[i]
    }

    /// Ids of the blocks through `x`, ascending.
    pub fn blocks_at(&self, x: usize) -> &[u32] {
        &self.point_index[x]
    }

    pub fn contains(&self, block: usize, x: u32) -> bool {
        self.blocks[block].binary_search(&x).is_ok()
    }

    pub fn block_id(&self, points: &[u32]) -> Option<usize> {
        self.blocks
            .binary_search_by(|b| b.as_slice().cmp(points))
            .ok()
    }

    /// Block size if all blocks have the same size.
    pub fn constant_block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    /// Number of blocks through each pair, row-major `v * v`.
    fn pair_counts(&self) -> Vec<u32> {
        let v = self.v;
        let mut counts = vec![0u32; v * v];
        for b in &self.blocks {
            for (i, &x) in b.iter().enumerate() {
                for &y in &b[i + 1..] {
                    counts[x as usize * v + y as usize] += 1;
                    counts[y as usize * v + x as usize] += 1;
                }
            }
        }
        counts
    }

    /// Any two distinct points lie on exactly one block.
    pub fn is_linear_space(&self) -> bool {
        let v = self.v;
        let counts = self.pair_counts();
        (0..v).all(|x| (0..v).all(|y| x == y || counts[x * v + y] == 1))
    }

    /// Image of the structure under a point relabeling.
    pub fn relabel(&self, map: &[u32]) -> Incidence {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&x| map[x as usize]).collect())
            .collect();
        Incidence::new(self.v, blocks).expect("relabeling by a bijection")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockSizeViolation {
    pub block: usize,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub x: u32,
    pub y: u32,
    pub joining_blocks: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    pub point: u32,
    pub degree: usize,
}

/// Outcome of checking the unital axioms; records the first violation of
/// each kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub q: usize,
    pub v: usize,
    pub b: usize,
    pub k: Option<usize>,
    pub point_count: Option<usize>,
    pub block_size: Option<BlockSizeViolation>,
    pub pair: Option<PairViolation>,
    pub point_degree: Option<DegreeViolation>,
}

pub fn validate_unital(inc: &Incidence, q: usize) -> ValidationReport {
    let v = inc.v;
    let point_count = (v != q * q * q + 1).then_some(v);
    let block_size = inc
        .blocks
        .iter()
        .enumerate()
        .find(|(_, b)| b.len() != q + 1)
        .map(|(i, b)| BlockSizeViolation {
            block: i,
            size: b.len(),
        });
    let counts = inc.pair_counts();
    let mut pair = None;
    'outer: for x in 0..v {
        for y in x + 1..v {
            let c = counts[x * v + y];
            if c != 1 {
                pair = Some(PairViolation {
                    x: x as u32,
                    y: y as u32,
                    joining_blocks: c,
                });
                break 'outer;
            }
        }
    }
    let point_degree = inc
        .point_index
        .iter()
        .enumerate()
        .find(|(_, bs)| bs.len() != q * q)
        .map(|(x, bs)| DegreeViolation {
            point: x as u32,
            degree: bs.len(),
        });
    ValidationReport {
        valid: point_count.is_none()
            && block_size.is_none()
            && pair.is_none()
            && point_degree.is_none(),
        q,
        v,
        b: inc.blocks.len(),
        k: inc.constant_block_size(),
        point_count,
        block_size,
        pair,
        point_degree,
    }
}

/// `q` with `q^3 + 1 = v`, if any.
pub fn order_from_point_count(v: usize) -> Option<usize> {
    (1..)
        .take_while(|q| q * q * q < v)
        .find(|q| q * q * q + 1 == v)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitalError {
    #[error("{0} points is not of the form q^3 + 1")]
    BadPointCount(usize),
    #[error("unital axioms fail")]
    Invalid(Box<ValidationReport>),
}

/// An incidence structure verified to be a 2-(q^3+1, q+1, 1) design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unital {
    inc: Incidence,
    q: usize,
    /// `joins[x * v + y]` is the block through `x != y`.
    joins: Vec<u32>,
}

impl Unital {
    pub fn new(inc: Incidence) -> Result<Self, UnitalError> {
        let q = order_from_point_count(inc.v).ok_or(UnitalError::BadPointCount(inc.v))?;
        Self::with_order(inc, q)
    }

    pub fn with_order(inc: Incidence, q: usize) -> Result<Self, UnitalError> {
        let report = validate_unital(&inc, q);
        if !report.valid {
            return Err(UnitalError::Invalid(Box::new(report)));
        }
        let v = inc.v;
        let mut joins = vec![u32::MAX; v * v];
        for (i, b) in inc.blocks.iter().enumerate() {
            for &x in b {
                for &y in b {
                    if x != y {
                        joins[x as usize * v + y as usize] = i as u32;
                    }
                }
            }
        }
        Ok(Unital { inc, q, joins })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn v(&self) -> usize {
        self.inc.v
    }

    pub fn incidence(&self) -> &Incidence {
        &self.inc
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.inc.blocks
    }

    pub fn block(&self, i: usize) -> &[u32] {
        &self.inc.blocks[i]
    }

    /// Block through two distinct points; unchecked fast path.
    #[inline]
    pub fn join(&self, x: u32, y: u32) -> u32 {
        self.joins[x as usize * self.inc.v + y as usize]
    }

    pub fn block_through(&self, x: u32, y: u32) -> Result<usize, IncidenceError> {
        let v = self.inc.v as u32;
        if x >= v {
            return Err(IncidenceError::NoSuchPoint(x));
        }
        if y >= v {
            return Err(IncidenceError::NoSuchPoint(y));
        }
        if x == y {
            return Err(IncidenceError::SamePoint);
        }
        Ok(self.join(x, y) as usize)
    }

    /// The `q^2` blocks through `c`.
    pub fn pencil(&self, c: u32) -> &[u32] {
        self.inc.blocks_at(c as usize)
    }

    pub(crate) fn joins(&self) -> &[u32] {
        &self.joins
    }

    pub fn into_incidence(self) -> Incidence {
        self.inc
    }
}

/// Traces of the blocks on a point subset, re-indexed over that subset.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub incidence: Incidence,
    /// Original index of each restricted point, ascending.
    pub points: Vec<u32>,
    /// For each trace (in canonical order) the first original block giving it.
    pub source_blocks: Vec<u32>,
    pub linear_space: bool,
}

/// Restricts to `subset` keeping traces with at least two points.
pub fn restrict_to(inc: &Incidence, subset: &[u32]) -> Restriction {
    let mut points = subset.to_vec();
    points.sort_unstable();
    points.dedup();
    let mut local = vec![u32::MAX; inc.v];
    for (j, &x) in points.iter().enumerate() {
        local[x as usize] = j as u32;
    }
    let mut traces: Vec<(Vec<u32>, u32)> = inc
        .blocks
        .iter()
        .enumerate()
        .filter_map(|(i, b)| {
            let t: Vec<u32> = b
                .iter()
                .filter_map(|&x| (local[x as usize] != u32::MAX).then_some(local[x as usize]))
                .collect();
            (t.len() >= 2).then_some((t, i as u32))
        })
        .collect();
    traces.sort();
    traces.dedup_by(|a, b| a.0 == b.0);
    let source_blocks = traces.iter().map(|t| t.1).collect();
    let incidence = Incidence::new(points.len(), traces.into_iter().map(|t| t.0).collect())
        .expect("deduplicated traces");
    let linear_space = incidence.is_linear_space();
    Restriction {
        incidence,
        points,
        source_blocks,
        linear_space,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmbeddingWitness {
    pub point: u32,
    pub block: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdealEmbedding {
    pub ideal: bool,
    pub witness: Option<EmbeddingWitness>,
}

/// Whether every block through a point of `subset` meets `subset` again.
pub fn ideal_embedding_check(inc: &Incidence, subset: &[u32]) -> IdealEmbedding {
    let mut member = vec![false; inc.v];
    for &x in subset {
        member[x as usize] = true;
    }
    let mut pts = subset.to_vec();
    pts.sort_unstable();
    pts.dedup();
    for &x in &pts {
        for &b in inc.blocks_at(x as usize) {
            let hits = inc.blocks[b as usize]
                .iter()
                .filter(|&&y| member[y as usize])
                .count();
            if hits < 2 {
                return IdealEmbedding {
                    ideal: false,
                    witness: Some(EmbeddingWitness { point: x, block: b }),
                };
            }
        }
    }
    IdealEmbedding {
        ideal: true,
        witness: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FisherReport {
    pub v: usize,
    pub k: usize,
    pub r: usize,
    pub r_at_least_k: bool,
    pub projective_plane: bool,
}

/// Lines per point of a linear space with constant line size, compared with
/// the line size.
pub fn fisher_check(inc: &Incidence) -> Result<FisherReport, IncidenceError> {
    let k = inc
        .constant_block_size()
        .ok_or(IncidenceError::NonConstantLineSize)?;
    if inc.blocks.len() < 2 || k <= 2 {
        return Err(IncidenceError::Degenerate);
    }
    if !inc.is_linear_space() {
        return Err(IncidenceError::NotLinearSpace);
    }
    let v = inc.v;
    let r = (v - 1) / (k - 1);
    Ok(FisherReport {
        v,
        k,
        r,
        r_at_least_k: r >= k,
        projective_plane: r == k && v == k * k - k + 1,
    })
}

/// AG(2,3): points `(a, b)` of `Z_3^2` as `3a + b`, lines `{y = mx + c}` and
/// `{x = c}`.
pub fn affine_plane_order3() -> Incidence {
    let pt = |a: u32, b: u32| 3 * (a % 3) + b % 3;
    let mut lines = Vec::new();
    for m in 0..3 {
        for c in 0..3 {
            lines.push((0..3).map(|x| pt(x, m * x + c)).collect());
        }
    }
    for c in 0..3 {
        lines.push((0..3).map(|y| pt(c, y)).collect());
    }
    Incidence::new(9, lines).expect("affine plane lines are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::hermitian_unital;

    fn fano() -> Incidence {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        Incidence::new(7, lines.iter().map(|l| l.to_vec()).collect()).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(
            Incidence::new(3, vec![vec![0, 3]]).unwrap_err(),
            IncidenceError::PointOutOfRange {
                block: 0,
                point: 3,
                v: 3
            }
        );
        assert_eq!(
            Incidence::new(3, vec![vec![1, 1]]).unwrap_err(),
            IncidenceError::RepeatedPoint { block: 0, point: 1 }
        );
        assert_eq!(
            Incidence::new(3, vec![vec![0, 1], vec![2, 0], vec![1, 0]]).unwrap_err(),
            IncidenceError::DuplicateBlock { block: 2 }
        );
    }

    #[test]
    fn canonical_order() {
        let a = Incidence::new(4, vec![vec![3, 1], vec![0, 2]]).unwrap();
        assert_eq!(a.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(a.blocks_at(3), &[1]);
        assert_eq!(a.block_id(&[1, 3]), Some(1));
    }

    #[test]
    fn order_from_v() {
        assert_eq!(order_from_point_count(9), Some(2));
        assert_eq!(order_from_point_count(513), Some(8));
        assert_eq!(order_from_point_count(10), None);
        assert_eq!(order_from_point_count(2), Some(1));
    }

    #[test]
    fn validation() {
        let h2 = hermitian_unital(2).unwrap();
        let r = validate_unital(h2.incidence(), 2);
        assert!(r.valid);
        assert_eq!((r.v, r.k), (9, Some(3)));

        let h3 = hermitian_unital(3).unwrap();
        let mut blocks = h3.blocks().to_vec();
        let gone = blocks.remove(10);
        let r = validate_unital(&Incidence::new(28, blocks).unwrap(), 3);
        assert!(!r.valid);
        let pair = r.pair.unwrap();
        assert_eq!(pair.joining_blocks, 0);
        assert!(gone.contains(&pair.x) && gone.contains(&pair.y));
        assert!(r.point_degree.is_some());
        assert!(r.block_size.is_none());
    }

    #[test]
    fn block_count_formula() {
        for q in [2usize, 3, 4] {
            let u = hermitian_unital(q as u32).unwrap();
            assert_eq!(u.blocks().len() * (q + 1), (q * q * q + 1) * q * q);
        }
    }

    #[test]
    fn joins_and_pencils() {
        let u = hermitian_unital(2).unwrap();
        for x in 0..9 {
            assert_eq!(u.pencil(x).len(), 4);
            for &b in u.pencil(x) {
                assert!(u.incidence().contains(b as usize, x));
            }
            for y in 0..9 {
                if x == y {
                    assert_eq!(u.block_through(x, y), Err(IncidenceError::SamePoint));
                    continue;
                }
                let b = u.block_through(x, y).unwrap();
                assert!(b < 12);
                assert_eq!(b, u.block_through(y, x).unwrap());
                assert!(u.block(b).contains(&x) && u.block(b).contains(&y));
            }
        }
        assert_eq!(hermitian_unital(3).unwrap().pencil(5).len(), 9);
    }

    #[test]
    fn restriction() {
        let u = hermitian_unital(2).unwrap();
        let all: Vec<u32> = (0..9).collect();
        let r = restrict_to(u.incidence(), &all);
        assert_eq!(&r.incidence, u.incidence());
        assert!(r.linear_space);

        let b = u.block(4).to_vec();
        let r = restrict_to(u.incidence(), &b);
        assert_eq!(r.incidence.blocks(), &[vec![0, 1, 2]]);
        assert_eq!(r.points, b);
    }

    #[test]
    fn ideal_embedding() {
        let u = hermitian_unital(2).unwrap();
        let all: Vec<u32> = (0..9).collect();
        assert!(ideal_embedding_check(u.incidence(), &all).ideal);
        let b = u.block(0).to_vec();
        let e = ideal_embedding_check(u.incidence(), &b);
        assert!(!e.ideal);
        let w = e.witness.unwrap();
        assert_eq!(w.point, b[0]);
        assert_ne!(w.block, 0);
    }

    #[test]
    fn fisher() {
        let h3 = hermitian_unital(3).unwrap();
        let r = fisher_check(h3.incidence()).unwrap();
        assert_eq!(
            (r.v, r.k, r.r, r.r_at_least_k, r.projective_plane),
            (28, 4, 9, true, false)
        );
        let r = fisher_check(&fano()).unwrap();
        assert_eq!((r.r, r.projective_plane), (3, true));
        let r = fisher_check(&affine_plane_order3()).unwrap();
        assert_eq!((r.v, r.k, r.r, r.projective_plane), (9, 3, 4, false));
        let ragged = Incidence::new(4, vec![vec![0, 1, 2], vec![0, 3]]).unwrap();
        assert_eq!(
            fisher_check(&ragged),
            Err(IncidenceError::NonConstantLineSize)
        );
    }

    #[test]
    fn unital_rejects_non_unital() {
        // AG(2,3) satisfies the axioms for order 2
        assert_eq!(Unital::new(affine_plane_order3()).unwrap().order(), 2);
        let line = Incidence::new(9, vec![(0..9).collect()]).unwrap();
        assert!(matches!(Unital::new(line), Err(UnitalError::Invalid(_))));
        assert_eq!(
            Unital::new(fano()).unwrap_err(),
            UnitalError::BadPointCount(7)
        );
    }
}
