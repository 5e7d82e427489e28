//! Base and strong generating set by the deterministic incremental
//! Schreier–Sims algorithm.
//!
//! Level `i` stores a base point `b_i`, the strong generators `S_i` added at
//! that level, and coset representatives `u_β` with `b_i^{u_β} = β` for every
//! `β` in the orbit of `b_i` under `⟨S_i⟩`. Invariant: `⟨S_{i+1}⟩` is the
//! stabilizer of `b_i` in `⟨S_i⟩`.

use super::Permutation;

#[derive(Debug, Clone)]
struct Level {
    base: u32,
    gens: Vec<Permutation>,
    orbit: Vec<u32>,
    reps: Vec<Option<Permutation>>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut reps = vec![None; degree];
        reps[base as usize] = Some(Permutation::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            reps,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Chain whose base starts with `prefix`.
    pub fn new(degree: usize, prefix: &[u32], gens: &[Permutation]) -> Self {
        let mut chain = StabChain {
            degree,
            levels: prefix.iter().map(|&b| Level::new(b, degree)).collect(),
        };
        for g in gens {
            chain.extend(0, g.clone());
        }
        chain
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Sifts `g` from level `i`; returns the residue and the level reached.
    fn sift(&self, i: usize, g: &Permutation) -> (Permutation, usize) {
        let mut g = g.clone();
        for (j, level) in self.levels.iter().enumerate().skip(i) {
            let beta = g.apply(level.base);
            match &level.reps[beta as usize] {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    fn contains_from(&self, i: usize, g: &Permutation) -> bool {
        let (r, j) = self.sift(i, g);
        j == self.levels.len() && r.is_identity()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.contains_from(0, g)
    }

    fn extend(&mut self, i: usize, g: Permutation) {
        if self.contains_from(i, &g) {
            return;
        }
        if i == self.levels.len() {
            let moved = (0..self.degree as u32)
                .find(|&x| g.apply(x) != x)
                .expect("non-identity residue");
            self.levels.push(Level::new(moved, self.degree));
        }
        self.levels[i].gens.push(g.clone());

        // Schreier generators from the old orbit with the new generator.
        let old_len = self.levels[i].orbit.len();
        for k in 0..old_len {
            let beta = self.levels[i].orbit[k];
            self.visit(i, beta, &g);
        }
        // New orbit points against every generator.
        let mut k = old_len;
        while k < self.levels[i].orbit.len() {
            let beta = self.levels[i].orbit[k];
            let gens = self.levels[i].gens.clone();
            for s in &gens {
                self.visit(i, beta, s);
            }
            k += 1;
        }
    }

    /// Handles the edge `beta --s--> gamma` of the orbit graph at level `i`.
    fn visit(&mut self, i: usize, beta: u32, s: &Permutation) {
        let gamma = s.apply(beta);
        let u_beta = self.levels[i].reps[beta as usize]
            .clone()
            .expect("orbit point has a representative");
        let through = u_beta.then(s);
        match &self.levels[i].reps[gamma as usize] {
            None => {
                self.levels[i].reps[gamma as usize] = Some(through);
                self.levels[i].orbit.push(gamma);
            }
            Some(u_gamma) => {
                let h = through.then(&u_gamma.inverse());
                if !h.is_identity() {
                    self.extend(i + 1, h);
                }
            }
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Generators of the stabilizer of the first `i` base points.
    pub fn stabilizer_generators(&self, i: usize) -> Vec<Permutation> {
        self.levels
            .get(i)
            .map(|l| l.gens.clone())
            .unwrap_or_default()
    }

    /// Order of the stabilizer of the first `i` base points.
    pub fn stabilizer_order(&self, i: usize) -> u128 {
        self.levels
            .iter()
            .skip(i)
            .map(|l| l.orbit.len() as u128)
            .product()
    }

    /// All elements, in a deterministic order.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            let mut orbit = level.orbit.clone();
            orbit.sort_unstable();
            for h in &out {
                for &beta in &orbit {
                    let u = level.reps[beta as usize].as_ref().unwrap();
                    next.push(h.then(u));
                }
            }
            out = next;
        }
        out
    }
}
