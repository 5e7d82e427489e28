//! Structural analyses built on a translation atlas: the substructure on
//! the centers `Ω_p`, the constant-intersection criterion, the
//! classification harness, and the generalized dihedral equivalences.

use crate::field::prime_power;
use crate::groups::predicates::{
    dihedral_conclusion, generalized_dihedral_check, is_abelian, is_regular_on,
    semiregular_by_conjugation, DihedralReport, PredicateError,
};
use crate::groups::{GroupError, PermGroup, Permutation};
use crate::incidence::{
    ideal_embedding_check, isomorphism_search, restrict_to, IdealEmbedding, IsoOutcome, Unital,
};
use crate::plane::hermitian_unital;
use crate::translation::{build_atlas, TranslationAtlas};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("no translations of order {0}")]
    EmptyOmega(u32),
    #[error("the centers of order-{0} translations lie on one block")]
    OmegaInBlock(u32),
}

/// Whether all points of `set` lie on a common block.
fn contained_in_block(u: &Unital, set: &[u32]) -> bool {
    if set.len() < 2 {
        return true;
    }
    let b = u.join(set[0], set[1]) as usize;
    set.iter().all(|&x| u.incidence().contains(b, x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubunitalReport {
    pub p: u32,
    pub omega: Vec<u32>,
    pub blocks: usize,
    pub contained_in_block: bool,
    pub linear_space: bool,
    pub embedding: IdealEmbedding,
    /// Only the identity of `T[p]` fixes `Ω_p` pointwise.
    pub faithful: bool,
    /// Order `s` when the substructure is a 2-(s³+1, s+1, 1) design.
    pub unital_order: Option<usize>,
    /// Map from `Ω_p` (ascending, re-indexed from 0) onto the hermitian
    /// unital of order `s`, when one was found.
    pub hermitian_isomorphism: Option<Vec<u32>>,
}

/// Studies the structure `U_p = (Ω_p, B_p)` induced on the centers of
/// `p`-translations.
pub fn subunital_analysis(
    u: &Unital,
    atlas: &TranslationAtlas,
    p: u32,
) -> Result<SubunitalReport, StructureError> {
    let omega = atlas.omega(p as u64).to_vec();
    if omega.is_empty() {
        return Err(StructureError::EmptyOmega(p));
    }
    let restriction = restrict_to(u.incidence(), &omega);
    let in_block = contained_in_block(u, &omega);
    let faithful = atlas.tgroup(p as u64).pointwise_stabilizer(&omega).order() == 1;
    let sub = (!in_block)
        .then(|| Unital::new(restriction.incidence.clone()).ok())
        .flatten();
    let unital_order = sub.as_ref().map(Unital::order);
    let hermitian_isomorphism = sub.as_ref().and_then(|s| {
        prime_power(s.order() as u32)?;
        let h = hermitian_unital(s.order() as u32).ok()?;
        match isomorphism_search(s.incidence(), h.incidence(), 0) {
            IsoOutcome::Found(map) => Some(map),
            _ => None,
        }
    });
    Ok(SubunitalReport {
        p,
        blocks: restriction.incidence.blocks().len(),
        contained_in_block: in_block,
        linear_space: restriction.linear_space,
        embedding: ideal_embedding_check(u.incidence(), &omega),
        faithful,
        unital_order,
        hermitian_isomorphism,
        omega,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub p: u32,
    /// `|Ω_p ∩ B|` ↦ number of blocks `B ∈ B_p` with that intersection size.
    pub sizes: BTreeMap<usize, usize>,
    pub constant: Option<usize>,
    pub omega_is_everything: bool,
    /// `T[p]` transitive on all points; evaluated only when the size is constant.
    pub transitive: Option<bool>,
    /// The hypothesis that every point is a center, with a point violating it.
    pub every_point_a_center: bool,
    pub centerless_point: Option<u32>,
    /// The criterion's conclusion holds, or its hypothesis fails.
    pub consistent: bool,
}

/// If `|Ω_p ∩ B|` is constant over the blocks meeting `Ω_p` twice and
/// every point is a center, then `Ω_p` is the whole point set.
pub fn constant_intersection_check(
    u: &Unital,
    atlas: &TranslationAtlas,
    p: u32,
) -> Result<IntersectionReport, StructureError> {
    let omega = atlas.omega(p as u64);
    if omega.is_empty() {
        return Err(StructureError::EmptyOmega(p));
    }
    if contained_in_block(u, omega) {
        return Err(StructureError::OmegaInBlock(p));
    }
    let mut member = vec![false; u.v()];
    for &x in omega {
        member[x as usize] = true;
    }
    let mut sizes = BTreeMap::new();
    for b in u.blocks() {
        let n = b.iter().filter(|&&x| member[x as usize]).count();
        if n >= 2 {
            *sizes.entry(n).or_default() += 1;
        }
    }
    let constant = (sizes.len() == 1).then(|| *sizes.keys().next().unwrap());
    let omega_is_everything = omega.len() == u.v();
    let all: Vec<u32> = (0..u.v() as u32).collect();
    let transitive = constant.map(|_| atlas.tgroup(p as u64).orbit(0) == all);
    let centerless_point = atlas.mho().first().copied();
    let every_point_a_center = centerless_point.is_none();
    let consistent = constant.is_none()
        || !every_point_a_center
        || (omega_is_everything && transitive == Some(true));
    Ok(IntersectionReport {
        p,
        sizes,
        constant,
        omega_is_everything,
        transitive,
        every_point_a_center,
        centerless_point,
        consistent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub every_point_a_center: bool,
    pub exists_involutory_translation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    VerifiedHermitian,
    HypothesisFailed,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// The failing hypothesis, named as the field of [`Hypotheses`].
    pub hypothesis: String,
    /// A point that is not a center, when that hypothesis fails.
    pub point: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub order: usize,
    pub hypotheses: Hypotheses,
    pub omega2_full: bool,
    pub conclusion: Conclusion,
    pub witness: Option<Witness>,
    /// Point map onto `hermitian_unital(q)`, checked block by block.
    pub isomorphism: Option<Vec<u32>>,
    /// `(q+1)²` does not divide `q³+1`; `None` for `q = 2`.
    pub case_a_arithmetic: Option<bool>,
}

pub fn classify(u: &Unital) -> ClassificationReport {
    classify_with_atlas(u, &build_atlas(u))
}

/// Checks whether every point is a center and an involutory translation
/// exists; if so, looks for an explicit isomorphism with the hermitian
/// unital of the same order.
pub fn classify_with_atlas(u: &Unital, atlas: &TranslationAtlas) -> ClassificationReport {
    let q = u.order();
    let hypotheses = Hypotheses {
        every_point_a_center: atlas.mho().is_empty(),
        exists_involutory_translation: !atlas.omega(2).is_empty(),
    };
    let omega2_full = atlas.omega(2).len() == u.v();
    let case_a_arithmetic = (q > 2).then(|| {
        let q = q as u128;
        !(q * q * q + 1).is_multiple_of((q + 1) * (q + 1))
    });
    let mut report = ClassificationReport {
        order: q,
        hypotheses,
        omega2_full,
        conclusion: Conclusion::Undetermined,
        witness: None,
        isomorphism: None,
        case_a_arithmetic,
    };
    if !hypotheses.every_point_a_center {
        report.conclusion = Conclusion::HypothesisFailed;
        report.witness = Some(Witness {
            hypothesis: "every_point_a_center".into(),
            point: atlas.mho().first().copied(),
        });
        return report;
    }
    if !hypotheses.exists_involutory_translation {
        report.conclusion = Conclusion::HypothesisFailed;
        report.witness = Some(Witness {
            hypothesis: "exists_involutory_translation".into(),
            point: None,
        });
        return report;
    }
    if !omega2_full || prime_power(q as u32).is_none() {
        return report;
    }
    let Ok(h) = hermitian_unital(q as u32) else {
        return report;
    };
    if let IsoOutcome::Found(map) = isomorphism_search(u.incidence(), h.incidence(), 0) {
        if u.incidence().relabel(&map) == *h.incidence() {
            report.conclusion = Conclusion::VerifiedHermitian;
            report.isomorphism = Some(map);
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoPointReport {
    pub x: u32,
    pub y: u32,
    /// Orbit lengths of the stabilizer of `x` and `y`, ascending.
    pub lengths: Vec<usize>,
    /// The block through `x` and `y` is `{x, y}` plus one orbit.
    pub block_is_orbit: bool,
}

pub fn two_point_profile(
    u: &Unital,
    group: &PermGroup,
    x: u32,
    y: u32,
) -> Result<TwoPointReport, GroupError> {
    let stab = group.pointwise_stabilizer(&[x, y]);
    let mut lengths: Vec<usize> = stab.orbits().iter().map(Vec::len).collect();
    lengths.sort_unstable();
    let mut rest: Vec<u32> = u
        .block(u.join(x, y) as usize)
        .iter()
        .copied()
        .filter(|&z| z != x && z != y)
        .collect();
    rest.sort_unstable();
    let block_is_orbit = rest.first().is_none_or(|&z| stab.orbit(z) == rest);
    Ok(TwoPointReport {
        x,
        y,
        lengths,
        block_is_orbit,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("precondition failed: {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharplyReport {
    pub m_order: usize,
    pub m_abelian: bool,
    pub m_regular: bool,
    pub tau_semiregular: bool,
    /// The three conditions agree.
    pub equivalent: bool,
    pub tau_inverts_m: Option<bool>,
    pub coset_is_class: Option<bool>,
    /// On `⟨τ⟩M`, when the three conditions hold.
    pub dihedral: Option<DihedralReport>,
    pub holds: bool,
}

/// Evaluates "M abelian", "M regular on Ω" and "τ semi-regular on M" for
/// a transitive group with an involution fixing one point of `Ω` and an
/// odd-order normal transitive subgroup `M`. Without `m`, `M` is taken as
/// the set of products of two involutions.
pub fn sharplytrs_suite(
    g: &PermGroup,
    omega: &[u32],
    tau: &Permutation,
    m: Option<&PermGroup>,
) -> Result<SharplyReport, SuiteError> {
    if !g.is_transitive_on(omega).unwrap_or(false) {
        return Err(SuiteError::Precondition("G is not transitive on the set"));
    }
    let m_elements = match m {
        Some(m) => m.elements()?,
        None => {
            if !tau.is_involution() || !g.contains(tau) {
                return Err(SuiteError::Precondition("tau is not an involution of G"));
            }
            let report = generalized_dihedral_check(g, tau)?;
            if !report.m_is_subgroup {
                return Err(SuiteError::Precondition(
                    "products of two involutions do not form a subgroup",
                ));
            }
            let elements = g.elements()?;
            let invs: Vec<&Permutation> = elements.iter().filter(|x| x.is_involution()).collect();
            let mut set: Vec<Permutation> = invs
                .iter()
                .flat_map(|a| invs.iter().map(move |b| a.then(b)))
                .collect();
            set.push(Permutation::identity(g.degree()));
            set.sort();
            set.dedup();
            set
        }
    };
    if m_elements.len() % 2 == 0 {
        return Err(SuiteError::Precondition("M has even order"));
    }
    let mgroup = PermGroup::from_elements(g.degree(), &m_elements);
    let normal = g.generators().iter().all(|x| {
        mgroup
            .generators()
            .iter()
            .all(|y| mgroup.contains(&y.conjugate_by(x)))
    });
    if !normal {
        return Err(SuiteError::Precondition("M is not normal in G"));
    }
    if !mgroup.is_transitive_on(omega).unwrap_or(false) {
        return Err(SuiteError::Precondition("M is not transitive on the set"));
    }
    if !tau.is_involution() || !g.contains(tau) {
        return Err(SuiteError::Precondition("tau is not an involution of G"));
    }
    if omega.iter().filter(|&&x| tau.apply(x) == x).count() != 1 {
        return Err(SuiteError::Precondition(
            "tau does not fix exactly one point of the set",
        ));
    }
    let m_abelian = is_abelian(&m_elements);
    let m_regular = is_regular_on(&m_elements, omega);
    let tau_semiregular = semiregular_by_conjugation(&m_elements, tau);
    let equivalent = m_abelian == m_regular && m_regular == tau_semiregular;
    let mut report = SharplyReport {
        m_order: m_elements.len(),
        m_abelian,
        m_regular,
        tau_semiregular,
        equivalent,
        tau_inverts_m: None,
        coset_is_class: None,
        dihedral: None,
        holds: equivalent,
    };
    if equivalent && m_abelian {
        let (inverts, coset) = dihedral_conclusion(&m_elements, tau);
        let mut gens = mgroup.generators().to_vec();
        gens.push(tau.clone());
        let extended = PermGroup::new(g.degree(), gens)?;
        let dihedral = generalized_dihedral_check(&extended, tau)?;
        report.holds = inverts && coset && dihedral.generalized_dihedral;
        report.tau_inverts_m = Some(inverts);
        report.coset_is_class = Some(coset);
        report.dihedral = Some(dihedral);
    }
    Ok(report)
}

/// Points of `U` with at least one nontrivial translation, i.e. the
/// complement of `℧`.
pub fn centers(atlas: &TranslationAtlas) -> Vec<u32> {
    let mut is_mho = vec![false; atlas.v()];
    for &x in atlas.mho() {
        is_mho[x as usize] = true;
    }
    (0..atlas.v() as u32)
        .filter(|&x| !is_mho[x as usize])
        .collect()
}
