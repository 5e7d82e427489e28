//! Permutation groups on the points of a finite structure.

mod chain;
mod perm;
pub mod predicates;

pub use chain::StabChain;
pub use perm::Permutation;

use std::collections::VecDeque;
use std::sync::OnceLock;
use thiserror::Error;

/// Largest group whose elements may be listed explicitly.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("image array is not a bijection")]
    NotBijection,
    #[error("generator degrees differ ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("point set is not invariant under the group")]
    NotInvariant,
    #[error("group of order {0} is too large to enumerate")]
    TooLarge(u128),
    #[error("point {0} out of range")]
    NoSuchPoint(u32),
}

#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        PermGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            chain: self.chain.clone(),
        }
    }
}

impl PermGroup {
    /// The group generated by `gens` acting on `0..degree`. Identity
    /// generators are dropped.
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self, GroupError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::DegreeMismatch(degree, g.degree()));
        }
        Ok(PermGroup {
            degree,
            generators: gens.into_iter().filter(|g| !g.is_identity()).collect(),
            chain: OnceLock::new(),
        })
    }

    /// `group_generate`: the degree is taken from the first generator.
    pub fn generate(gens: Vec<Permutation>) -> Result<Self, GroupError> {
        let degree = gens.first().map_or(0, Permutation::degree);
        Self::new(degree, gens)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    /// Subgroup generated by a list of its elements, keeping only the
    /// elements not already generated by earlier ones.
    pub fn from_elements(degree: usize, elements: &[Permutation]) -> Self {
        let mut gens = Vec::new();
        let mut chain = StabChain::new(degree, &[], &[]);
        for g in elements {
            if !chain.contains(g) {
                gens.push(g.clone());
                chain = StabChain::new(degree, &[], &gens);
            }
        }
        let group = PermGroup {
            degree,
            generators: gens,
            chain: OnceLock::new(),
        };
        let _ = group.chain.set(chain);
        group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::new(self.degree, &[], &self.generators))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    pub fn elements(&self) -> Result<Vec<Permutation>, GroupError> {
        let order = self.order();
        if order > ENUMERATION_LIMIT {
            return Err(GroupError::TooLarge(order));
        }
        Ok(self.chain().elements())
    }

    /// Orbit of `x`, ascending.
    pub fn orbit(&self, x: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        seen[x as usize] = true;
        let mut queue = VecDeque::from([x]);
        let mut out = vec![x];
        while let Some(y) = queue.pop_front() {
            for g in &self.generators {
                let z = g.apply(y);
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    out.push(z);
                    queue.push_back(z);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All orbits on `0..degree`, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree as u32 {
            if !seen[x as usize] {
                let o = self.orbit(x);
                for &y in &o {
                    seen[y as usize] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn is_invariant(&self, set: &[u32]) -> bool {
        let mut member = vec![false; self.degree];
        for &x in set {
            member[x as usize] = true;
        }
        self.generators
            .iter()
            .all(|g| set.iter().all(|&x| member[g.apply(x) as usize]))
    }

    pub fn is_transitive_on(&self, set: &[u32]) -> Result<bool, GroupError> {
        if !self.is_invariant(set) {
            return Err(GroupError::NotInvariant);
        }
        let Some(&first) = set.first() else {
            return Ok(true);
        };
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        Ok(self.orbit(first) == s)
    }

    /// Transitive on `set` with the stabilizer of one point transitive on the rest.
    pub fn is_two_transitive_on(&self, set: &[u32]) -> Result<bool, GroupError> {
        if !self.is_transitive_on(set)? {
            return Ok(false);
        }
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() < 2 {
            return Ok(true);
        }
        let rest = s[1..].to_vec();
        self.pointwise_stabilizer(&s[..1]).is_transitive_on(&rest)
    }

    /// Subgroup fixing every point of `points`.
    pub fn pointwise_stabilizer(&self, points: &[u32]) -> PermGroup {
        let chain = StabChain::new(self.degree, points, &self.generators);
        PermGroup::new(self.degree, chain.stabilizer_generators(points.len())).expect("same degree")
    }

    /// Subgroup mapping `set` onto itself, by filtering the element list.
    pub fn setwise_stabilizer(&self, set: &[u32]) -> Result<PermGroup, GroupError> {
        let mut target = set.to_vec();
        target.sort_unstable();
        target.dedup();
        let keep: Vec<Permutation> = self
            .elements()?
            .into_iter()
            .filter(|g| g.apply_set(&target) == target)
            .collect();
        Ok(PermGroup::from_elements(self.degree, &keep))
    }

    /// Orbits on a family of point sets (for instance blocks), as index
    /// lists ordered by least member. `None` if the family is not invariant.
    pub fn orbits_on_sets(&self, sets: &[Vec<u32>]) -> Option<Vec<Vec<usize>>> {
        let mut sorted: Vec<(Vec<u32>, usize)> = sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut s = s.clone();
                s.sort_unstable();
                (s, i)
            })
            .collect();
        sorted.sort();
        let lookup = |s: &Vec<u32>| {
            sorted
                .binary_search_by(|(t, _)| t.cmp(s))
                .ok()
                .map(|k| sorted[k].1)
        };
        let mut seen = vec![false; sets.len()];
        let mut out = Vec::new();
        for start in 0..sets.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut k = 0;
            while k < orbit.len() {
                let s = &sets[orbit[k]];
                for g in &self.generators {
                    let j = lookup(&g.apply_set(s))?;
                    if !seen[j] {
                        seen[j] = true;
                        orbit.push(j);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        Some(out)
    }

    /// Orbit lengths of the two-point stabilizer `G_{x,y}`, ascending.
    pub fn two_point_stabilizer_orbits(&self, x: u32, y: u32) -> Result<Vec<usize>, GroupError> {
        for p in [x, y] {
            if p as usize >= self.degree {
                return Err(GroupError::NoSuchPoint(p));
            }
        }
        let mut lens: Vec<usize> = self
            .pointwise_stabilizer(&[x, y])
            .orbits()
            .iter()
            .map(Vec::len)
            .collect();
        lens.sort_unstable();
        Ok(lens)
    }

    /// The permutation group induced on an invariant subset, re-indexed by
    /// the ascending order of `set`.
    pub fn induced_on(&self, set: &[u32]) -> Result<PermGroup, GroupError> {
        if !self.is_invariant(set) {
            return Err(GroupError::NotInvariant);
        }
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        let mut local = vec![u32::MAX; self.degree];
        for (i, &x) in s.iter().enumerate() {
            local[x as usize] = i as u32;
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                Permutation::from_images_unchecked(
                    s.iter().map(|&x| local[g.apply(x) as usize]).collect(),
                )
            })
            .collect();
        PermGroup::new(s.len(), gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn closure(degree: usize, gens: &[Permutation]) -> HashSet<Permutation> {
        let mut seen: HashSet<Permutation> = HashSet::from([Permutation::identity(degree)]);
        let mut frontier = vec![Permutation::identity(degree)];
        while let Some(g) = frontier.pop() {
            for s in gens {
                let h = g.then(s);
                if seen.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
        seen
    }

    fn cyc(n: usize, cycles: &[&[u32]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn three_cycle() {
        let g = PermGroup::generate(vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(g.order(), 3);
    }

    #[test]
    fn degree_mismatch() {
        assert_eq!(
            PermGroup::generate(vec![cyc(3, &[&[0, 1]]), cyc(4, &[&[0, 1]])]).unwrap_err(),
            GroupError::DegreeMismatch(3, 4)
        );
    }

    #[test]
    fn orders_match_closure() {
        let cases: Vec<(usize, Vec<Permutation>)> = vec![
            (5, vec![cyc(5, &[&[0, 1, 2, 3, 4]]), cyc(5, &[&[0, 1]])]),
            (
                6,
                vec![
                    cyc(6, &[&[0, 1, 2]]),
                    cyc(6, &[&[3, 4, 5]]),
                    cyc(6, &[&[0, 3], &[1, 4], &[2, 5]]),
                ],
            ),
            (
                7,
                vec![
                    cyc(7, &[&[0, 1, 2, 3, 4, 5, 6]]),
                    cyc(7, &[&[1, 2, 4], &[3, 6, 5]]),
                ],
            ),
            (
                8,
                vec![
                    cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]),
                    cyc(8, &[&[1, 7], &[2, 6], &[3, 5]]),
                ],
            ),
            (
                4,
                vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
            ),
        ];
        for (n, gens) in cases {
            let g = PermGroup::new(n, gens.clone()).unwrap();
            let all = closure(n, &gens);
            assert_eq!(g.order(), all.len() as u128);
            let listed: HashSet<Permutation> = g.elements().unwrap().into_iter().collect();
            assert_eq!(listed, all);
            for h in &all {
                assert!(g.contains(h));
            }
        }
    }

    #[test]
    fn membership_rejects_outsiders() {
        let a4 = PermGroup::generate(vec![cyc(4, &[&[0, 1, 2]]), cyc(4, &[&[1, 2, 3]])]).unwrap();
        assert_eq!(a4.order(), 12);
        assert!(!a4.contains(&cyc(4, &[&[0, 1]])));
        assert!(a4.contains(&cyc(4, &[&[0, 1], &[2, 3]])));
    }

    #[test]
    fn transitivity() {
        let s4 = PermGroup::generate(vec![cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 1]])]).unwrap();
        let all = [0, 1, 2, 3];
        assert!(s4.is_transitive_on(&all).unwrap());
        assert!(s4.is_two_transitive_on(&all).unwrap());
        let c4 = PermGroup::generate(vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert!(c4.is_transitive_on(&all).unwrap());
        assert!(!c4.is_two_transitive_on(&all).unwrap());
        let trivial = PermGroup::trivial(4);
        assert!(!trivial.is_transitive_on(&all).unwrap());
        assert_eq!(c4.is_transitive_on(&[0, 1]), Err(GroupError::NotInvariant));
    }

    #[test]
    fn stabilizers() {
        let s5 =
            PermGroup::generate(vec![cyc(5, &[&[0, 1, 2, 3, 4]]), cyc(5, &[&[0, 1]])]).unwrap();
        assert_eq!(s5.pointwise_stabilizer(&[2]).order(), 24);
        assert_eq!(s5.pointwise_stabilizer(&[2, 4]).order(), 6);
        assert_eq!(s5.two_point_stabilizer_orbits(0, 1).unwrap(), vec![1, 1, 3]);
        assert_eq!(s5.setwise_stabilizer(&[0, 1]).unwrap().order(), 12);
        let id = PermGroup::trivial(5);
        assert_eq!(id.setwise_stabilizer(&[0, 1]).unwrap().order(), 1);
    }

    #[test]
    fn induced_action_and_set_orbits() {
        let g = PermGroup::generate(vec![cyc(6, &[&[0, 1, 2], &[3, 4]])]).unwrap();
        let h = g.induced_on(&[0, 1, 2]).unwrap();
        assert_eq!(h.order(), 3);
        assert_eq!(g.induced_on(&[0, 3]).unwrap_err(), GroupError::NotInvariant);
        let sets = vec![
            vec![0, 3],
            vec![1, 4],
            vec![2, 3],
            vec![0, 4],
            vec![1, 3],
            vec![2, 4],
            vec![5],
        ];
        let orbits = g.orbits_on_sets(&sets).unwrap();
        assert_eq!(orbits, vec![vec![0, 1, 2, 3, 4, 5], vec![6]]);
        assert!(g.orbits_on_sets(&sets[..2]).is_none());
    }

    #[test]
    fn enumeration_cap() {
        // S_10 has 3628800 elements
        let s10 = PermGroup::generate(vec![
            cyc(10, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]]),
            cyc(10, &[&[0, 1]]),
        ])
        .unwrap();
        assert_eq!(s10.order(), 3_628_800);
        assert_eq!(s10.elements().unwrap_err(), GroupError::TooLarge(3_628_800));
    }

    fn perm_of_degree(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn chain_matches_closure(gens in prop::collection::vec(perm_of_degree(6), 1..4), probe in perm_of_degree(6)) {
            let g = PermGroup::generate(gens.clone()).unwrap();
            let all = closure(6, &gens);
            prop_assert_eq!(g.order(), all.len() as u128);
            prop_assert_eq!(g.contains(&probe), all.contains(&probe));
            let orbit_sum: usize = g.orbits().iter().map(Vec::len).sum();
            prop_assert_eq!(orbit_sum, 6);
        }

        #[test]
        fn product_laws(a in perm_of_degree(7), b in perm_of_degree(7), x in 0u32..7) {
            prop_assert_eq!(a.then(&b).apply(x), b.apply(a.apply(x)));
            prop_assert!(a.then(&a.inverse()).is_identity());
            prop_assert_eq!(a.conjugate_by(&b), b.inverse().then(&a).then(&b));
            prop_assert!(a.pow(a.order()).is_identity());
        }
    }
}
