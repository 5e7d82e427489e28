//! Exhaustive isomorphism search between incidence structures.
//!
//! Points are matched one at a time in most-constrained-first order. Each
//! point's candidate images are restricted by a fingerprint (its degree plus
//! the intersection-size profile of its blocks). When a mapped pair lies on
//! exactly one block, the remaining points of that block are confined to
//! the image block.

use super::Incidence;
use crate::bits::BitSet;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    /// `map[x]` is the image in the second structure of point `x` of the first.
    Found(Vec<u32>),
    /// Exhaustive search (or a parameter mismatch) proves non-isomorphism.
    NotIsomorphic,
    BudgetExhausted {
        nodes: u64,
    },
}

const NONE: u32 = u32::MAX;

struct Side<'a> {
    inc: &'a Incidence,
    /// Number of blocks through each pair.
    common: Vec<u32>,
    /// The block through a pair when it is unique.
    unique: Vec<u32>,
    bits: Vec<BitSet>,
}

impl<'a> Side<'a> {
    fn new(inc: &'a Incidence) -> Self {
        let v = inc.v();
        let mut common = vec![0u32; v * v];
        let mut unique = vec![NONE; v * v];
        for (i, b) in inc.blocks().iter().enumerate() {
            for &x in b {
                for &y in b {
                    if x != y {
                        let at = x as usize * v + y as usize;
                        common[at] += 1;
                        unique[at] = i as u32;
                    }
                }
            }
        }
        let bits = inc
            .blocks()
            .iter()
            .map(|b| BitSet::from_iter(v, b.iter().copied()))
            .collect();
        Side {
            inc,
            common,
            unique,
            bits,
        }
    }

    fn point_fingerprints(&self) -> Vec<Vec<Vec<u32>>> {
        let inc = self.inc;
        let block_fp: Vec<Vec<u32>> = (0..inc.blocks().len())
            .map(|i| {
                let mut hits: HashMap<u32, u32> = HashMap::new();
                for &x in inc.block(i) {
                    for &b in inc.blocks_at(x as usize) {
                        if b as usize != i {
                            *hits.entry(b).or_default() += 1;
                        }
                    }
                }
                let mut hist = vec![0u32; inc.block(i).len() + 1];
                let nonzero = hits.len() as u32;
                for &c in hits.values() {
                    hist[c as usize] += 1;
                }
                hist[0] = inc.blocks().len() as u32 - 1 - nonzero;
                hist.insert(0, inc.block(i).len() as u32);
                hist
            })
            .collect();
        (0..inc.v())
            .map(|x| {
                let mut fp: Vec<Vec<u32>> = inc
                    .blocks_at(x)
                    .iter()
                    .map(|&b| block_fp[b as usize].clone())
                    .collect();
                fp.sort();
                fp
            })
            .collect()
    }
}

#[derive(Clone)]
struct State {
    image: Vec<u32>,
    used: BitSet,
    domains: Vec<BitSet>,
    assigned: Vec<u32>,
}

struct Search<'a> {
    a: Side<'a>,
    b: Side<'a>,
    v: usize,
    nodes: u64,
    budget: u64,
}

enum Step {
    Found(Vec<u32>),
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    fn propagate(&self, st: &mut State, mut queue: Vec<(u32, u32)>) -> bool {
        let v = self.v;
        while let Some((x, y)) = queue.pop() {
            let cur = st.image[x as usize];
            if cur != NONE {
                if cur != y {
                    return false;
                }
                continue;
            }
            if !st.domains[x as usize].contains(y) || st.used.contains(y) {
                return false;
            }
            st.image[x as usize] = y;
            st.used.insert(y);
            for z in 0..v as u32 {
                if st.image[z as usize] == NONE {
                    let d = &mut st.domains[z as usize];
                    if d.contains(y) {
                        d.remove(y);
                        match d.len() {
                            0 => return false,
                            1 => queue.push((z, d.first().unwrap())),
                            _ => {}
                        }
                    }
                }
            }
            for &w in &st.assigned {
                let wy = st.image[w as usize];
                let ca = self.a.common[x as usize * v + w as usize];
                if ca != self.b.common[y as usize * v + wy as usize] {
                    return false;
                }
                if ca != 1 {
                    continue;
                }
                let ba = self.a.unique[x as usize * v + w as usize] as usize;
                let bb = self.b.unique[y as usize * v + wy as usize] as usize;
                if self.a.inc.block(ba).len() != self.b.inc.block(bb).len() {
                    return false;
                }
                for &z in self.a.inc.block(ba) {
                    let zi = st.image[z as usize];
                    if zi != NONE {
                        if !self.b.bits[bb].contains(zi) {
                            return false;
                        }
                        continue;
                    }
                    let d = &mut st.domains[z as usize];
                    let before = d.len();
                    d.intersect_with(&self.b.bits[bb]);
                    let after = d.len();
                    if after == 0 {
                        return false;
                    }
                    if after == 1 && before > 1 {
                        queue.push((z, d.first().unwrap()));
                    }
                }
            }
            st.assigned.push(x);
        }
        true
    }

    fn is_isomorphism(&self, map: &[u32]) -> bool {
        self.a.inc.blocks().iter().all(|blk| {
            let mut img: Vec<u32> = blk.iter().map(|&x| map[x as usize]).collect();
            img.sort_unstable();
            self.b.inc.block_id(&img).is_some()
        })
    }

    fn dfs(&mut self, st: State) -> Step {
        let next = (0..self.v)
            .filter(|&x| st.image[x] == NONE)
            .min_by_key(|&x| (st.domains[x].len(), x));
        let Some(x) = next else {
            return if self.is_isomorphism(&st.image) {
                Step::Found(st.image)
            } else {
                Step::Exhausted
            };
        };
        let candidates: Vec<u32> = st.domains[x].iter().collect();
        for y in candidates {
            self.nodes += 1;
            if self.budget > 0 && self.nodes > self.budget {
                return Step::OutOfBudget;
            }
            let mut child = st.clone();
            if !self.propagate(&mut child, vec![(x as u32, y)]) {
                continue;
            }
            match self.dfs(child) {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }
}

/// Searches for a point bijection `A → B` carrying blocks onto blocks.
/// `budget` caps the number of branch attempts; 0 means exhaustive.
pub fn isomorphism_search(a: &Incidence, b: &Incidence, budget: u64) -> IsoOutcome {
    if a.v() != b.v() || a.blocks().len() != b.blocks().len() {
        return IsoOutcome::NotIsomorphic;
    }
    let sizes = |inc: &Incidence| {
        let mut s: Vec<usize> = inc.blocks().iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    };
    if sizes(a) != sizes(b) {
        return IsoOutcome::NotIsomorphic;
    }
    let (sa, sb) = (Side::new(a), Side::new(b));
    let (fa, fb) = (sa.point_fingerprints(), sb.point_fingerprints());
    let mut sorted_a = fa.clone();
    let mut sorted_b = fb.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return IsoOutcome::NotIsomorphic;
    }
    let v = a.v();
    let mut classes: HashMap<&Vec<Vec<u32>>, BitSet> = HashMap::new();
    for (y, fp) in fb.iter().enumerate() {
        classes
            .entry(fp)
            .or_insert_with(|| BitSet::new(v))
            .insert(y as u32);
    }
    let domains = fa.iter().map(|fp| classes[fp].clone()).collect();
    let state = State {
        image: vec![NONE; v],
        used: BitSet::new(v),
        domains,
        assigned: Vec::new(),
    };
    let mut search = Search {
        a: sa,
        b: sb,
        v,
        nodes: 0,
        budget,
    };
    match search.dfs(state) {
        Step::Found(map) => IsoOutcome::Found(map),
        Step::Exhausted => IsoOutcome::NotIsomorphic,
        Step::OutOfBudget => IsoOutcome::BudgetExhausted { nodes: budget },
    }
}
