//! Translations of a unital: automorphisms fixing a center `c` and every
//! block through `c`.
//!
//! A translation maps each block through `c` to itself, so the image of a
//! point `x != c` lies on the block `cx`. Once two points `x, w` of a block
//! not through `c` have images, every other point `z` of that block must go
//! to the unique point of the image block lying on the block `cz`. The
//! search assigns images point by point, most constrained first, and runs
//! this propagation to a fixed point after each choice.

use crate::field::smallest_prime_divisor;
use crate::groups::{PermGroup, Permutation};
use crate::incidence::Unital;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};

const NONE: u32 = u32::MAX;

/// Whether `pi` maps every block of `u` onto a block.
pub fn is_automorphism(u: &Unital, pi: &Permutation) -> bool {
    if pi.degree() != u.v() {
        return false;
    }
    let inc = u.incidence();
    u.blocks().iter().all(|b| {
        let target = u.join(pi.apply(b[0]), pi.apply(b[1])) as usize;
        b[2..].iter().all(|&z| inc.contains(target, pi.apply(z)))
    })
}

pub fn is_translation(u: &Unital, pi: &Permutation, c: u32) -> bool {
    if pi.degree() != u.v() || c as usize >= u.v() || pi.apply(c) != c {
        return false;
    }
    let inc = u.incidence();
    let pencil_fixed = u.pencil(c).iter().all(|&b| {
        inc.block(b as usize)
            .iter()
            .all(|&z| inc.contains(b as usize, pi.apply(z)))
    });
    pencil_fixed && is_automorphism(u, pi)
}

struct Search<'a> {
    u: &'a Unital,
    c: u32,
    /// Block `cx` for each `x != c`.
    cline: Vec<u32>,
    /// Reject images with an extra fixed point.
    prune_fixed: bool,
    found: Vec<Permutation>,
}

#[derive(Clone)]
struct State {
    image: Vec<u32>,
    used: Vec<bool>,
    block_done: Vec<bool>,
    unassigned: usize,
}

impl Search<'_> {
    fn allowed(&self, x: u32, y: u32) -> bool {
        y != self.c
            && self.cline[y as usize] == self.cline[x as usize]
            && !(self.prune_fixed && x == y)
    }

    fn propagate(&self, st: &mut State, mut queue: Vec<(u32, u32)>) -> bool {
        let inc = self.u.incidence();
        while let Some((x, y)) = queue.pop() {
            let cur = st.image[x as usize];
            if cur != NONE {
                if cur != y {
                    return false;
                }
                continue;
            }
            if st.used[y as usize] || !self.allowed(x, y) {
                return false;
            }
            st.image[x as usize] = y;
            st.used[y as usize] = true;
            st.unassigned -= 1;
            for &b in inc.blocks_at(x as usize) {
                if b == self.cline[x as usize] || st.block_done[b as usize] {
                    continue;
                }
                let block = inc.block(b as usize);
                let Some(&w) = block
                    .iter()
                    .find(|&&w| w != x && st.image[w as usize] != NONE)
                else {
                    continue;
                };
                st.block_done[b as usize] = true;
                let target = inc.block(self.u.join(y, st.image[w as usize]) as usize);
                for &z in block {
                    let line = self.cline[z as usize];
                    match target.iter().find(|&&t| self.cline[t as usize] == line) {
                        Some(&t) => queue.push((z, t)),
                        None => return false,
                    }
                }
            }
        }
        true
    }

    fn candidates(&self, st: &State, x: u32) -> Vec<u32> {
        self.u
            .block(self.cline[x as usize] as usize)
            .iter()
            .copied()
            .filter(|&y| !st.used[y as usize] && self.allowed(x, y))
            .collect()
    }

    fn dfs(&mut self, st: State) {
        if st.unassigned == 0 {
            let pi = Permutation::from_images(st.image).expect("injective assignment");
            if is_translation(self.u, &pi, self.c) {
                self.found.push(pi);
            }
            return;
        }
        // Prefer points off the blocks through `c` that already carry an
        // assigned point: those choices propagate immediately.
        let mut on_line = vec![0u32; self.u.blocks().len()];
        let mut assigned = 0;
        for x in 0..self.u.v() {
            if x != self.c as usize && st.image[x] != NONE {
                on_line[self.cline[x] as usize] += 1;
                assigned += 1;
            }
        }
        let mut best: Option<((bool, usize), u32)> = None;
        for x in 0..self.u.v() as u32 {
            if st.image[x as usize] != NONE {
                continue;
            }
            let silent = assigned == on_line[self.cline[x as usize] as usize];
            let key = (silent, self.candidates(&st, x).len());
            if key.1 == 0 {
                return;
            }
            if best.is_none_or(|(m, _)| key < m) {
                best = Some((key, x));
                if key.1 <= 1 && !silent {
                    break;
                }
            }
        }
        let (_, x) = best.expect("an unassigned point");
        let options = self.candidates(&st, x);
        for y in options {
            let mut child = st.clone();
            if self.propagate(&mut child, vec![(x, y)]) {
                self.dfs(child);
            }
        }
    }
}

/// Translation group with center `c`, identity first, then ascending by
/// image array.
pub fn translations_at(u: &Unital, c: u32) -> Vec<Permutation> {
    translations_at_with(u, c, true)
}

/// As [`translations_at`]; `prune_fixed` enables the rule that a
/// nontrivial translation fixes no point besides its center.
pub fn translations_at_with(u: &Unital, c: u32, prune_fixed: bool) -> Vec<Permutation> {
    let v = u.v();
    let mut cline = vec![NONE; v];
    for x in 0..v as u32 {
        if x != c {
            cline[x as usize] = u.join(c, x);
        }
    }
    let mut image = vec![NONE; v];
    image[c as usize] = c;
    let mut used = vec![false; v];
    used[c as usize] = true;
    let state = State {
        image,
        used,
        block_done: vec![false; u.blocks().len()],
        unassigned: v - 1,
    };
    let mut search = Search {
        u,
        c,
        cline,
        prune_fixed,
        found: Vec::new(),
    };
    search.dfs(state);
    let mut out = search.found;
    if prune_fixed {
        out.push(Permutation::identity(v));
    }
    out.sort_by(|a, b| b.is_identity().cmp(&a.is_identity()).then_with(|| a.cmp(b)));
    out
}

/// All translations of a unital, grouped by center, with the derived
/// point sets `Ω_n`, `℧`, `K` and the groups `T[n]`.
#[derive(Debug, Clone)]
pub struct TranslationAtlas {
    v: usize,
    trs: Vec<Vec<Permutation>>,
    omega: BTreeMap<u64, Vec<u32>>,
    mho: Vec<u32>,
    k: BTreeSet<u32>,
    tgroups: BTreeMap<u64, PermGroup>,
}

pub fn build_atlas(u: &Unital) -> TranslationAtlas {
    let trs: Vec<Vec<Permutation>> = (0..u.v() as u32)
        .into_par_iter()
        .map(|c| translations_at(u, c))
        .collect();
    TranslationAtlas::from_translations(u.v(), trs)
}

impl TranslationAtlas {
    /// Assembles an atlas from per-center translation groups.
    pub fn from_translations(v: usize, trs: Vec<Vec<Permutation>>) -> Self {
        let mut omega: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        let mut by_order: BTreeMap<u64, Vec<Permutation>> = BTreeMap::new();
        let mut mho = Vec::new();
        for (c, group) in trs.iter().enumerate() {
            let mut orders = BTreeSet::new();
            for t in group.iter().filter(|t| !t.is_identity()) {
                let n = t.order();
                orders.insert(n);
                by_order.entry(n).or_default().push(t.clone());
            }
            if orders.is_empty() {
                mho.push(c as u32);
            }
            for n in orders {
                omega.entry(n).or_default().push(c as u32);
            }
        }
        let k = omega
            .keys()
            .filter_map(|&n| smallest_prime_divisor(n as u32))
            .collect();
        let tgroups = by_order
            .into_iter()
            .map(|(n, gens)| (n, PermGroup::from_elements(v, &gens)))
            .collect();
        TranslationAtlas {
            v,
            trs,
            omega,
            mho,
            k,
            tgroups,
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// `trs(c)`, identity first.
    pub fn translations(&self, c: u32) -> &[Permutation] {
        &self.trs[c as usize]
    }

    /// Translations of order exactly `n` with their centers.
    pub fn of_order(&self, n: u64) -> impl Iterator<Item = (u32, &Permutation)> + '_ {
        self.trs.iter().enumerate().flat_map(move |(c, g)| {
            g.iter()
                .filter(move |t| !t.is_identity() && t.order() == n)
                .map(move |t| (c as u32, t))
        })
    }

    /// Orders of nontrivial translations that occur.
    pub fn orders(&self) -> Vec<u64> {
        self.omega.keys().copied().collect()
    }

    /// Centers of translations of order `n`; empty if there are none.
    pub fn omega(&self, n: u64) -> &[u32] {
        self.omega.get(&n).map_or(&[], Vec::as_slice)
    }

    /// Points whose translation group is trivial.
    pub fn mho(&self) -> &[u32] {
        &self.mho
    }

    /// Smallest prime divisors of the occurring orders.
    pub fn k(&self) -> &BTreeSet<u32> {
        &self.k
    }

    /// `T[n]`, the group generated by the translations of order `n`.
    pub fn tgroup(&self, n: u64) -> PermGroup {
        self.tgroups
            .get(&n)
            .cloned()
            .unwrap_or_else(|| PermGroup::trivial(self.v))
    }

    /// `U = ℧ ⊔ ⋃_{p ∈ K} Ω_p` with the union disjoint.
    pub fn partition_holds(&self) -> bool {
        let mut count = vec![0u32; self.v];
        for &x in &self.mho {
            count[x as usize] += 1;
        }
        for &p in &self.k {
            for &x in self.omega(p as u64) {
                count[x as usize] += 1;
            }
        }
        count.iter().all(|&n| n == 1)
    }

    pub fn summary(&self) -> AtlasSummary {
        AtlasSummary {
            v: self.v,
            omega: self
                .omega
                .iter()
                .map(|(n, pts)| (n.to_string(), pts.clone()))
                .collect(),
            mho: self.mho.clone(),
            k: self.k.iter().copied().collect(),
            tgroup_orders: self
                .tgroups
                .iter()
                .map(|(n, g)| (n.to_string(), g.order().to_string()))
                .collect(),
            trs_orders: self.trs.iter().map(Vec::len).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasSummary {
    pub v: usize,
    pub omega: BTreeMap<String, Vec<u32>>,
    pub mho: Vec<u32>,
    pub k: Vec<u32>,
    /// Orders as decimal strings; they may exceed 64 bits.
    pub tgroup_orders: BTreeMap<String, String>,
    /// `|trs(c)|` for each center.
    pub trs_orders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub prime: u32,
    pub translations: usize,
    /// Every nontrivial translation fixes exactly its center.
    pub fixed_point_sets: bool,
    /// Every order is a power of `prime`.
    pub prime_power_orders: bool,
    /// Each `trs(c)` is closed under products and inverses.
    pub groups_closed: bool,
    pub verified: bool,
    /// First offending center.
    pub failure: Option<u32>,
}

fn is_power_of(n: u64, p: u64) -> bool {
    let mut n = n;
    while n > 1 && n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// Re-checks every stored translation against the definition and the
/// structural properties expected of a translation group.
pub fn translation_axioms(u: &Unital, atlas: &TranslationAtlas) -> AxiomReport {
    let prime = smallest_prime_divisor(u.order() as u32).unwrap_or(1);
    let mut report = AxiomReport {
        prime,
        translations: 0,
        fixed_point_sets: true,
        prime_power_orders: true,
        groups_closed: true,
        verified: true,
        failure: None,
    };
    for c in 0..atlas.v() as u32 {
        let group = atlas.translations(c);
        let set: HashSet<&Permutation> = group.iter().collect();
        let mut ok = true;
        for t in group {
            ok &= is_translation(u, t, c);
            if t.is_identity() {
                continue;
            }
            report.translations += 1;
            if t.fixed_points() != [c] {
                report.fixed_point_sets = false;
                ok = false;
            }
            if !is_power_of(t.order(), prime as u64) {
                report.prime_power_orders = false;
                ok = false;
            }
        }
        let closed = group.iter().any(Permutation::is_identity)
            && group.iter().all(|a| {
                set.contains(&a.inverse()) && group.iter().all(|b| set.contains(&a.then(b)))
            });
        if !closed {
            report.groups_closed = false;
            ok = false;
        }
        if !ok && report.failure.is_none() {
            report.failure = Some(c);
        }
    }
    report.verified = report.failure.is_none();
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorCheck {
    pub n: u64,
    pub k: u64,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrsOmegaReport {
    pub p: u32,
    pub omega_size: usize,
    /// `T[p]` is transitive on `Ω_p`.
    pub transitive: bool,
    /// Blocks meeting `Ω_p` in at least two points.
    pub blocks_checked: usize,
    /// For each such block, the translations centered on it are transitive
    /// on its points in `Ω_p`.
    pub block_transitive: bool,
    pub failing_block: Option<u32>,
    /// `Ω_k = Ω_n` for every occurring order `n` and divisor `k > 1`.
    pub divisors: Vec<DivisorCheck>,
    pub holds: bool,
}

/// Transitivity of `T[p]` on `Ω_p`, of the block-centered translation
/// groups on `Ω_p ∩ B`, and `Ω_k = Ω_n` for divisors. `None` if `Ω_p` is
/// empty.
pub fn check_lemma_trs_omega_p(
    u: &Unital,
    atlas: &TranslationAtlas,
    p: u32,
) -> Option<TrsOmegaReport> {
    let omega = atlas.omega(p as u64);
    if omega.is_empty() {
        return None;
    }
    let tp = atlas.tgroup(p as u64);
    let transitive = tp.orbit(omega[0]).as_slice() == omega;

    let in_omega: HashSet<u32> = omega.iter().copied().collect();
    let p_translations: Vec<(u32, &Permutation)> = atlas.of_order(p as u64).collect();
    let mut blocks_checked = 0;
    let mut failing_block = None;
    for (b, block) in u.blocks().iter().enumerate() {
        let part: Vec<u32> = block
            .iter()
            .copied()
            .filter(|x| in_omega.contains(x))
            .collect();
        if part.len() < 2 {
            continue;
        }
        blocks_checked += 1;
        let gens: Vec<Permutation> = p_translations
            .iter()
            .filter(|(c, _)| part.contains(c))
            .map(|(_, t)| (*t).clone())
            .collect();
        let group = PermGroup::new(u.v(), gens).expect("same degree");
        if group.orbit(part[0]) != part && failing_block.is_none() {
            failing_block = Some(b as u32);
        }
    }

    let mut divisors = Vec::new();
    for n in atlas.orders() {
        for k in (2..=n).filter(|k| n % k == 0 && *k != n) {
            divisors.push(DivisorCheck {
                n,
                k,
                equal: atlas.omega(k) == atlas.omega(n),
            });
        }
    }
    let block_transitive = failing_block.is_none();
    let holds = transitive && block_transitive && divisors.iter().all(|d| d.equal);
    Some(TrsOmegaReport {
        p,
        omega_size: omega.len(),
        transitive,
        blocks_checked,
        block_transitive,
        failing_block,
        divisors,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleProfile {
    /// Nontrivial cycles inside `Ω_n`.
    pub inside: usize,
    /// Cycles outside `Ω_n`.
    pub outside: usize,
    pub translations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub n: u64,
    pub omega_size: usize,
    /// `|Ω_n| ≡ 1 (mod n)`.
    pub omega_congruent: bool,
    /// Every translation of order `n` fixes only its center and all its
    /// other cycles have length `n`.
    pub semiregular: bool,
    pub profiles: Vec<CycleProfile>,
    pub holds: bool,
}

/// `None` if `Ω_n` is empty.
pub fn orbit_congruence_check(atlas: &TranslationAtlas, n: u64) -> Option<CongruenceReport> {
    let omega = atlas.omega(n);
    if omega.is_empty() {
        return None;
    }
    let in_omega: HashSet<u32> = omega.iter().copied().collect();
    let mut semiregular = true;
    let mut profiles: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (c, t) in atlas.of_order(n) {
        semiregular &= t.fixed_points() == [c];
        let cycles = t.cycles();
        semiregular &= cycles.iter().all(|cyc| cyc.len() as u64 == n);
        let inside = cycles
            .iter()
            .filter(|cyc| in_omega.contains(&cyc[0]))
            .count();
        *profiles.entry((inside, cycles.len() - inside)).or_default() += 1;
    }
    let omega_congruent = omega.len() as u64 % n == 1 % n;
    Some(CongruenceReport {
        n,
        omega_size: omega.len(),
        omega_congruent,
        semiregular,
        profiles: profiles
            .into_iter()
            .map(|((inside, outside), translations)| CycleProfile {
                inside,
                outside,
                translations,
            })
            .collect(),
        holds: omega_congruent && semiregular,
    })
}
