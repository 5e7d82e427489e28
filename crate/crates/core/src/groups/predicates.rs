//! Targeted group-theoretic predicates: Gleason's transitivity criterion,
//! generalized dihedral recognition and involution counting.

use super::{GroupError, PermGroup, Permutation};
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error("no certificate for point {0}")]
    MissingCertificate(u32),
    #[error("certificate for point {point} has order {order}, expected {expected}")]
    CertificateOrder {
        point: u32,
        order: u64,
        expected: u32,
    },
    #[error("certificate for point {point} fixes {fixed:?} within the set")]
    CertificateFixedPoints { point: u32, fixed: Vec<u32> },
    #[error("element is not an involution")]
    NotInvolution,
    #[error("element is not in the group")]
    NotInGroup,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Checks Gleason's hypotheses on `set` and returns whether the group
/// generated by the certificates is transitive there.
///
/// Each certificate `(x, g)` claims `g` has order `p` and fixes `x` but no
/// other point of `set`. A bad certificate is an error; non-transitivity is
/// `Ok(false)`.
pub fn gleason_check(
    certificates: &[(u32, Permutation)],
    set: &[u32],
    p: u32,
) -> Result<bool, PredicateError> {
    let mut member = HashSet::new();
    for &x in set {
        member.insert(x);
    }
    for &x in set {
        let (_, g) = certificates
            .iter()
            .find(|(y, _)| *y == x)
            .ok_or(PredicateError::MissingCertificate(x))?;
        let order = g.order();
        if order != p as u64 {
            return Err(PredicateError::CertificateOrder {
                point: x,
                order,
                expected: p,
            });
        }
        let fixed: Vec<u32> = g
            .fixed_points()
            .into_iter()
            .filter(|y| member.contains(y))
            .collect();
        if fixed != [x] {
            return Err(PredicateError::CertificateFixedPoints { point: x, fixed });
        }
    }
    let Some(degree) = certificates.first().map(|(_, g)| g.degree()) else {
        return Ok(set.len() <= 1);
    };
    let group = PermGroup::new(
        degree,
        certificates.iter().map(|(_, g)| g.clone()).collect(),
    )?;
    Ok(group.is_transitive_on(set)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DihedralReport {
    pub group_order: u128,
    /// Size of the set of products of two involutions.
    pub m_order: usize,
    pub m_is_subgroup: bool,
    pub m_odd_order: bool,
    pub m_index_two: bool,
    pub m_abelian: bool,
    /// Regular on the points moved by the group.
    pub m_regular: bool,
    pub tau_semiregular_on_m: bool,
    pub tau_inverts_m: bool,
    /// `τM` equals the conjugacy class `τ^M` and consists of involutions.
    pub coset_is_class: bool,
    pub generalized_dihedral: bool,
}

/// Conjugation by `tau` inverts every element, and the coset `τM` is the
/// `M`-class of `tau` made of involutions.
pub(crate) fn dihedral_conclusion(m: &[Permutation], tau: &Permutation) -> (bool, bool) {
    let inverts = m.iter().all(|x| x.conjugate_by(tau) == x.inverse());
    let coset: HashSet<Permutation> = m.iter().map(|x| tau.then(x)).collect();
    let class: HashSet<Permutation> = m.iter().map(|x| tau.conjugate_by(x)).collect();
    let coset_is_class = coset == class && coset.iter().all(Permutation::is_involution);
    (inverts, coset_is_class)
}

pub(crate) fn is_abelian(m: &[Permutation]) -> bool {
    m.iter().all(|a| m.iter().all(|b| a.then(b) == b.then(a)))
}

pub(crate) fn is_regular_on(m: &[Permutation], domain: &[u32]) -> bool {
    let Some(&x) = domain.first() else {
        return true;
    };
    let images: HashSet<u32> = m.iter().map(|g| g.apply(x)).collect();
    let mut d = domain.to_vec();
    d.sort_unstable();
    d.dedup();
    m.len() == d.len() && images.len() == d.len() && d.iter().all(|y| images.contains(y))
}

pub(crate) fn semiregular_by_conjugation(m: &[Permutation], tau: &Permutation) -> bool {
    m.iter()
        .all(|x| x.is_identity() || x.conjugate_by(tau) != *x)
}

/// Recognizes `G = ⟨τ⟩M` with `M` the set of products of two involutions.
pub fn generalized_dihedral_check(
    group: &PermGroup,
    tau: &Permutation,
) -> Result<DihedralReport, PredicateError> {
    if !tau.is_involution() {
        return Err(PredicateError::NotInvolution);
    }
    if !group.contains(tau) {
        return Err(PredicateError::NotInGroup);
    }
    let elements = group.elements()?;
    let involutions: Vec<&Permutation> = elements.iter().filter(|g| g.is_involution()).collect();
    let mut m_set: HashSet<Permutation> = HashSet::new();
    m_set.insert(Permutation::identity(group.degree()));
    for a in &involutions {
        for b in &involutions {
            m_set.insert(a.then(b));
        }
    }
    let mut m: Vec<Permutation> = m_set.iter().cloned().collect();
    m.sort();
    let m_is_subgroup = m
        .iter()
        .all(|a| m.iter().all(|b| m_set.contains(&a.then(b))));
    let order = group.order();
    let m_odd_order = m.len() % 2 == 1;
    let m_index_two = 2 * m.len() as u128 == order;
    let support: Vec<u32> = (0..group.degree() as u32)
        .filter(|&x| group.generators().iter().any(|g| g.apply(x) != x))
        .collect();
    let m_abelian = is_abelian(&m);
    let m_regular = is_regular_on(&m, &support);
    let tau_semiregular_on_m = semiregular_by_conjugation(&m, tau);
    let (tau_inverts_m, coset_is_class) = dihedral_conclusion(&m, tau);
    let generalized_dihedral = m_is_subgroup
        && m_odd_order
        && m_index_two
        && !m_set.contains(tau)
        && m_abelian
        && tau_inverts_m
        && coset_is_class;
    Ok(DihedralReport {
        group_order: order,
        m_order: m.len(),
        m_is_subgroup,
        m_odd_order,
        m_index_two,
        m_abelian,
        m_regular,
        tau_semiregular_on_m,
        tau_inverts_m,
        coset_is_class,
        generalized_dihedral,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvolutionReport {
    pub involutions: usize,
    pub unique: bool,
    /// With an auxiliary subgroup `N`: whether the unique involution
    /// inverts every element of `N`.
    pub inverts_n: Option<bool>,
}

pub fn unique_involution_check(
    q: &PermGroup,
    n: Option<&PermGroup>,
) -> Result<InvolutionReport, PredicateError> {
    let involutions: Vec<Permutation> = q
        .elements()?
        .into_iter()
        .filter(Permutation::is_involution)
        .collect();
    let unique = involutions.len() == 1;
    let inverts_n = match (n, unique) {
        (Some(n), true) => {
            let t = &involutions[0];
            Some(
                n.elements()?
                    .iter()
                    .all(|x| x.conjugate_by(t) == x.inverse()),
            )
        }
        (Some(_), false) => Some(false),
        (None, _) => None,
    };
    Ok(InvolutionReport {
        involutions: involutions.len(),
        unique,
        inverts_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[u32]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn s3_is_dihedral() {
        let s3 = PermGroup::generate(vec![cyc(3, &[&[0, 1, 2]]), cyc(3, &[&[0, 1]])]).unwrap();
        let r = generalized_dihedral_check(&s3, &cyc(3, &[&[0, 1]])).unwrap();
        assert_eq!(r.m_order, 3);
        assert!(r.generalized_dihedral && r.m_abelian && r.m_regular && r.tau_semiregular_on_m);
        assert!(r.tau_inverts_m && r.coset_is_class);
    }

    #[test]
    fn c4_is_not() {
        let c4 = PermGroup::generate(vec![cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        let tau = cyc(4, &[&[0, 2], &[1, 3]]);
        let r = generalized_dihedral_check(&c4, &tau).unwrap();
        assert_eq!(r.m_order, 1);
        assert!(!r.m_index_two && !r.generalized_dihedral);
        assert_eq!(
            generalized_dihedral_check(&c4, &cyc(4, &[&[0, 1, 2, 3]])),
            Err(PredicateError::NotInvolution)
        );
        assert_eq!(
            generalized_dihedral_check(&c4, &cyc(4, &[&[0, 1]])),
            Err(PredicateError::NotInGroup)
        );
    }

    #[test]
    fn involution_counts() {
        let c2 = PermGroup::generate(vec![cyc(2, &[&[0, 1]])]).unwrap();
        let r = unique_involution_check(&c2, None).unwrap();
        assert!(r.unique && r.involutions == 1 && r.inverts_n.is_none());
        let v4 = PermGroup::generate(vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])]).unwrap();
        let r = unique_involution_check(&v4, None).unwrap();
        assert_eq!(r.involutions, 3);
        assert!(!r.unique);
        // D3 = <(0 1 2), (1 2)>: the involution (1 2) inverts C3 but has two conjugates
        let tau = PermGroup::generate(vec![cyc(3, &[&[1, 2]])]).unwrap();
        let c3 = PermGroup::generate(vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(
            unique_involution_check(&tau, Some(&c3)).unwrap().inverts_n,
            Some(true)
        );
    }

    #[test]
    fn gleason_singleton_and_errors() {
        assert!(gleason_check(&[(0, Permutation::identity(1))], &[0], 1).unwrap());
        // the 3-cycle fixes nothing, so it is a bad certificate for point 0
        let c = cyc(4, &[&[0, 1, 2]]);
        let certs = vec![(3, c.clone()), (0, c.clone())];
        assert!(matches!(
            gleason_check(&certs, &[0, 3], 3),
            Err(PredicateError::CertificateFixedPoints { point: 0, .. })
        ));
        assert_eq!(
            gleason_check(&certs, &[3, 1], 3),
            Err(PredicateError::MissingCertificate(1))
        );
        let double = cyc(5, &[&[0, 1]]);
        assert!(matches!(
            gleason_check(&[(2, double)], &[2, 3], 2),
            Err(PredicateError::CertificateFixedPoints { point: 2, .. })
        ));
    }

    #[test]
    fn gleason_on_a4() {
        // each 3-cycle of A4 fixes exactly one point
        let certs: Vec<(u32, Permutation)> = vec![
            (0, cyc(4, &[&[1, 2, 3]])),
            (1, cyc(4, &[&[0, 2, 3]])),
            (2, cyc(4, &[&[0, 1, 3]])),
            (3, cyc(4, &[&[0, 1, 2]])),
        ];
        assert!(gleason_check(&certs, &[0, 1, 2, 3], 3).unwrap());
    }
}
