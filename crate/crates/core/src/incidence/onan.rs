//! Search for O'Nan configurations: four blocks and six points, each point on
//! exactly two of the blocks and each block through exactly three of the
//! points. In a linear space these are the four blocks meeting pairwise in
//! six distinct points.

use super::{Incidence, IncidenceError, Unital};
use crate::bits::BitSet;
use rayon::prelude::*;
use serde::Serialize;
use std::borrow::Cow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OnanConfiguration {
    /// Ascending block ids `b1 < b2 < b3 < b4`.
    pub blocks: [u32; 4],
    /// Intersection points in the order `b1b2, b1b3, b1b4, b2b3, b2b4, b3b4`.
    pub points: [u32; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnanOutcome {
    Found(OnanConfiguration),
    /// Exhaustive search found nothing.
    Absent,
    /// The node budget ran out before a witness was found.
    BudgetExhausted {
        nodes: u64,
    },
}

struct Searcher<'a> {
    inc: &'a Incidence,
    joins: Cow<'a, [u32]>,
    bits: Vec<BitSet>,
}

impl Searcher<'_> {
    fn join(&self, x: u32, y: u32) -> u32 {
        self.joins[x as usize * self.inc.v() + y as usize]
    }

    fn meet(&self, a: u32, b: u32) -> Option<u32> {
        self.bits[a as usize].first_common(&self.bits[b as usize])
    }

    /// Blocks `> floor` through points of `base` other than `skip`, with the
    /// meeting point.
    fn meeting(&self, base: u32, floor: u32, skip: &[u32]) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .inc
            .block(base as usize)
            .iter()
            .filter(|x| !skip.contains(x))
            .flat_map(|&x| {
                self.inc
                    .blocks_at(x as usize)
                    .iter()
                    .filter(move |&&b| b > floor)
                    .map(move |&b| (b, x))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Lexicographically least configuration with first block `b1`.
    /// Returns `Err(())` when the shared budget is spent.
    fn search_from(
        &self,
        b1: u32,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<Option<OnanConfiguration>, ()> {
        let u = self.inc;
        for (b2, p12) in self.meeting(b1, b1, &[]) {
            for (b3, p13) in self.meeting(b1, b2, &[p12]) {
                *nodes += 1;
                if budget > 0 && *nodes > budget {
                    return Err(());
                }
                let Some(p23) = self.meet(b2, b3) else {
                    continue;
                };
                let mut best: Option<(u32, u32, u32, u32)> = None;
                for &x in u.block(b1 as usize) {
                    if x == p12 || x == p13 {
                        continue;
                    }
                    for &y in u.block(b2 as usize) {
                        if y == p12 || y == p23 {
                            continue;
                        }
                        let b4 = self.join(x, y);
                        if b4 <= b3 || best.is_some_and(|b| b.0 <= b4) {
                            continue;
                        }
                        if let Some(p34) = self.meet(b3, b4) {
                            best = Some((b4, x, y, p34));
                        }
                    }
                }
                if let Some((b4, p14, p24, p34)) = best {
                    return Ok(Some(OnanConfiguration {
                        blocks: [b1, b2, b3, b4],
                        points: [p12, p13, p14, p23, p24, p34],
                    }));
                }
            }
        }
        Ok(None)
    }
}

/// Finds the O'Nan configuration with lexicographically least block
/// quadruple. `budget` caps the number of block triples examined; 0 means
/// exhaustive. Exhaustive runs are parallel over the first block, and the
/// answer does not depend on the thread count.
pub fn onan_search(u: &Unital, budget: u64) -> OnanOutcome {
    search(u.incidence(), Cow::Borrowed(u.joins()), budget)
}

/// [`onan_search`] on an arbitrary linear space.
pub fn onan_search_linear(inc: &Incidence, budget: u64) -> Result<OnanOutcome, IncidenceError> {
    if !inc.is_linear_space() {
        return Err(IncidenceError::NotLinearSpace);
    }
    let v = inc.v();
    let mut joins = vec![u32::MAX; v * v];
    for (i, b) in inc.blocks().iter().enumerate() {
        for &x in b {
            for &y in b {
                joins[x as usize * v + y as usize] = i as u32;
            }
        }
    }
    Ok(search(inc, Cow::Owned(joins), budget))
}

fn search(inc: &Incidence, joins: Cow<'_, [u32]>, budget: u64) -> OnanOutcome {
    let nb = inc.blocks().len();
    let searcher = Searcher {
        inc,
        joins,
        bits: inc
            .blocks()
            .iter()
            .map(|b| BitSet::from_iter(inc.v(), b.iter().copied()))
            .collect(),
    };
    if budget == 0 {
        let found = (0..nb as u32).into_par_iter().find_map_first(|b1| {
            let mut nodes = 0;
            searcher.search_from(b1, &mut nodes, 0).ok().flatten()
        });
        return found.map_or(OnanOutcome::Absent, OnanOutcome::Found);
    }
    let mut nodes = 0;
    for b1 in 0..nb as u32 {
        match searcher.search_from(b1, &mut nodes, budget) {
            Ok(Some(c)) => return OnanOutcome::Found(c),
            Ok(None) => {}
            Err(()) => return OnanOutcome::BudgetExhausted { nodes: budget },
        }
    }
    OnanOutcome::Absent
}

/// Checks the defining incidences of a configuration directly.
pub fn is_onan_configuration(inc: &Incidence, c: &OnanConfiguration) -> bool {
    let mut pts = c.points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut blocks = c.blocks.to_vec();
    blocks.sort_unstable();
    blocks.dedup();
    if pts.len() != 6 || blocks.len() != 4 {
        return false;
    }
    let on = |b: u32, x: u32| inc.contains(b as usize, x);
    pts.iter()
        .all(|&x| blocks.iter().filter(|&&b| on(b, x)).count() == 2)
        && blocks
            .iter()
            .all(|&b| pts.iter().filter(|&&x| on(b, x)).count() == 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{Incidence, IncidenceError, Unital};
    use crate::plane::hermitian_unital;

    /// Brute force over all block quadruples.
    fn brute(u: &Unital) -> Option<[u32; 4]> {
        let nb = u.blocks().len() as u32;
        let inc = u.incidence();
        let meet = |a: u32, b: u32| {
            u.block(a as usize)
                .iter()
                .copied()
                .find(|&x| inc.contains(b as usize, x))
        };
        for a in 0..nb {
            for b in a + 1..nb {
                for c in b + 1..nb {
                    for d in c + 1..nb {
                        let q = [a, b, c, d];
                        let mut pts = Vec::new();
                        let mut ok = true;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                match meet(q[i], q[j]) {
                                    Some(x) => pts.push(x),
                                    None => ok = false,
                                }
                            }
                        }
                        pts.sort_unstable();
                        pts.dedup();
                        if ok && pts.len() == 6 {
                            return Some(q);
                        }
                    }
                }
            }
        }
        None
    }

    #[test]
    fn hermitian_has_none() {
        for q in [2, 3] {
            let u = hermitian_unital(q).unwrap();
            assert_eq!(brute(&u), None);
            assert_eq!(onan_search(&u, 0), OnanOutcome::Absent);
        }
    }

    #[test]
    fn affine_plane_of_order_three_has_none() {
        let ag = Unital::new(crate::incidence::affine_plane_order3()).unwrap();
        assert_eq!(brute(&ag), None);
        assert_eq!(onan_search(&ag, 0), OnanOutcome::Absent);
    }

    #[test]
    fn fano_quadrilateral() {
        // the four lines missing a point form a complete quadrilateral
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        let fano = Incidence::new(7, lines.iter().map(|l| l.to_vec()).collect()).unwrap();
        let c = match onan_search_linear(&fano, 0).unwrap() {
            OnanOutcome::Found(c) => c,
            other => panic!("expected witness, got {other:?}"),
        };
        assert!(is_onan_configuration(&fano, &c));
        assert_eq!(c.blocks, [0, 1, 3, 6]);
        assert_eq!(
            onan_search_linear(&fano, 100).unwrap(),
            OnanOutcome::Found(c)
        );
        assert_eq!(onan_search_linear(&fano, 1).unwrap(), OnanOutcome::Found(c));
        assert_eq!(
            onan_search(&hermitian_unital(3).unwrap(), 5),
            OnanOutcome::BudgetExhausted { nodes: 5 }
        );
        let not_linear = Incidence::new(3, vec![vec![0, 1]]).unwrap();
        assert_eq!(
            onan_search_linear(&not_linear, 0),
            Err(IncidenceError::NotLinearSpace)
        );
    }

    #[test]
    fn checker_rejects_concurrent_blocks() {
        let u = hermitian_unital(2).unwrap();
        let c = OnanConfiguration {
            blocks: [0, 1, 2, 3],
            points: [0, 1, 2, 3, 4, 5],
        };
        assert!(!is_onan_configuration(u.incidence(), &c));
    }
}
