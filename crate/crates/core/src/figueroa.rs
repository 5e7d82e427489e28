//! The Figueroa plane of order `q⁶`, its polarity, and the polar unital of
//! order `q³`.
//!
//! Start from PG(2, F_{q⁶}) and the collineation `α: x ↦ x^{q²}` applied to
//! coordinates. A point `P` is of type I if `P^α = P`, of type II if
//! `P, P^α, P^{α²}` are distinct and collinear, and of type III if they form
//! a triangle; lines are typed dually. For type III put
//! `μ(P) = P^α P^{α²}` and `μ(ℓ) = ℓ^α ∩ ℓ^{α²}`. The new incidence agrees
//! with the classical one unless both arguments have type III, in which
//! case `P` lies on `ℓ` iff `μ(ℓ)` lies on `μ(P)` classically.

use crate::field::{prime_power, Field};
use crate::groups::Permutation;
use crate::incidence::{isomorphism_search, restrict_to, Incidence, IsoOutcome, Unital};
use crate::plane::hermitian_unital;
use crate::plane::{Coords, PLine, PPoint, Plane, PlaneError};
use crate::translation::{is_automorphism, TranslationAtlas};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FigError {
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("element {0} is not of type III")]
    NotTypeThree(usize),
    #[error("polarity check failed at point {point}, line {line}")]
    PolarityFailed { point: usize, line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ElementType {
    I,
    II,
    III,
}

#[derive(Debug, Clone)]
pub struct FigPlane {
    q: u32,
    plane: Plane,
    /// Frobenius index of `α`.
    alpha: u32,
    point_types: Vec<ElementType>,
    line_types: Vec<ElementType>,
    /// `μ` on type-III points (a line index) and lines (a point index).
    mu_point: Vec<u32>,
    mu_line: Vec<u32>,
    /// Points on each line under the twisted incidence, ascending.
    lines: Vec<Vec<u32>>,
}

impl FigPlane {
    pub fn new(q: u32) -> Result<Self, FigError> {
        let (p, e) = prime_power(q).ok_or(FigError::NotPrimePower(q))?;
        let plane = Plane::new(Field::new(p, 6 * e).map_err(PlaneError::from)?);
        let alpha = 2 * e;
        let n = plane.size();
        let alpha_of = |c: Coords, k: u32| plane.frobenius(c, alpha * k);

        let typed: Vec<(ElementType, u32)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let c = plane.point(i).0;
                let (a1, a2) = (PPoint(alpha_of(c, 1)), PPoint(alpha_of(c, 2)));
                if a1.0 == c {
                    return (ElementType::I, NONE);
                }
                let l = plane.line_through(a1, a2).expect("distinct conjugates");
                if plane.incident(PPoint(c), l) {
                    (ElementType::II, NONE)
                } else {
                    (ElementType::III, plane.index_of(l.0) as u32)
                }
            })
            .collect();
        let (point_types, mu_point): (Vec<_>, Vec<_>) = typed.into_iter().unzip();
        let typed: Vec<(ElementType, u32)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let c = plane.line(i).0;
                let (a1, a2) = (PLine(alpha_of(c, 1)), PLine(alpha_of(c, 2)));
                if a1.0 == c {
                    return (ElementType::I, NONE);
                }
                let m = plane.meet(a1, a2).expect("distinct conjugates");
                if plane.incident(m, PLine(c)) {
                    (ElementType::II, NONE)
                } else {
                    (ElementType::III, plane.index_of(m.0) as u32)
                }
            })
            .collect();
        let (line_types, mu_line): (Vec<_>, Vec<_>) = typed.into_iter().unzip();

        // μ⁻¹ on lines, to list the type-III points of a type-III line.
        let mut mu_point_inv = vec![NONE; n];
        for (i, &m) in mu_point.iter().enumerate() {
            if m != NONE {
                mu_point_inv[m as usize] = i as u32;
            }
        }
        let lines = (0..n)
            .into_par_iter()
            .map(|l| {
                let classical = plane.points_on(plane.line(l));
                if line_types[l] != ElementType::III {
                    return classical.into_iter().map(|x| x as u32).collect();
                }
                let mut pts: Vec<u32> = classical
                    .into_iter()
                    .filter(|&x| point_types[x] != ElementType::III)
                    .map(|x| x as u32)
                    .collect();
                // type-III points P with μ(ℓ) on μ(P)
                let m = plane.point(mu_line[l] as usize);
                for through in plane.points_on(PLine(m.0)) {
                    let p = mu_point_inv[through];
                    if p != NONE {
                        pts.push(p);
                    }
                }
                pts.sort_unstable();
                pts
            })
            .collect();
        Ok(FigPlane {
            q,
            plane,
            alpha,
            point_types,
            line_types,
            mu_point,
            mu_line,
            lines,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The order `q⁶`.
    pub fn order(&self) -> usize {
        self.plane.field().order() as usize
    }

    /// Number of points, equal to the number of lines.
    pub fn size(&self) -> usize {
        self.plane.size()
    }

    /// The underlying desarguesian plane.
    pub fn classical(&self) -> &Plane {
        &self.plane
    }

    pub fn classify_type(&self, p: PPoint) -> ElementType {
        self.point_types[self.plane.index_of(p.0)]
    }

    pub fn point_type(&self, i: usize) -> ElementType {
        self.point_types[i]
    }

    pub fn line_type(&self, i: usize) -> ElementType {
        self.line_types[i]
    }

    pub fn mu_point(&self, i: usize) -> Result<usize, FigError> {
        match self.mu_point[i] {
            NONE => Err(FigError::NotTypeThree(i)),
            m => Ok(m as usize),
        }
    }

    pub fn mu_line(&self, i: usize) -> Result<usize, FigError> {
        match self.mu_line[i] {
            NONE => Err(FigError::NotTypeThree(i)),
            m => Ok(m as usize),
        }
    }

    /// Twisted incidence, evaluated from coordinates.
    pub fn fig_incident(&self, point: usize, line: usize) -> bool {
        let (mp, ml) = (self.mu_point[point], self.mu_line[line]);
        if mp != NONE && ml != NONE {
            self.plane
                .incident(self.plane.point(ml as usize), self.plane.line(mp as usize))
        } else {
            self.plane
                .incident(self.plane.point(point), self.plane.line(line))
        }
    }

    /// Points on `line` under the twisted incidence, ascending.
    pub fn points_on(&self, line: usize) -> &[u32] {
        &self.lines[line]
    }

    pub fn alpha_point(&self, i: usize) -> usize {
        self.plane
            .index_of(self.plane.frobenius(self.plane.point(i).0, self.alpha))
    }

    pub fn alpha_line(&self, i: usize) -> usize {
        self.plane
            .index_of(self.plane.frobenius(self.plane.line(i).0, self.alpha))
    }

    /// Numbers of points of each type, in the order I, II, III.
    pub fn type_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for t in &self.point_types {
            counts[*t as usize] += 1;
        }
        counts
    }

    /// Line size, points per line, unique joins and a quadrangle.
    pub fn check_axioms(&self) -> PlaneAxioms {
        let n = self.size();
        let k = self.order() + 1;
        let line_sizes = self.lines.iter().all(|l| l.len() == k);
        let mut at: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, l) in self.lines.iter().enumerate() {
            for &x in l {
                at[x as usize].push(i as u32);
            }
        }
        let point_degrees = at.iter().all(|ls| ls.len() == k);
        let unique_joins = (0..n).into_par_iter().all(|x| {
            let mut seen = vec![false; n];
            for &l in &at[x] {
                for &y in &self.lines[l as usize] {
                    if y as usize != x {
                        if seen[y as usize] {
                            return false;
                        }
                        seen[y as usize] = true;
                    }
                }
            }
            seen.iter().enumerate().all(|(y, &s)| s || y == x)
        });
        // [1:0:0], [0:1:0], [0:0:1], [1:1:1] in general position
        let f = self.plane.field();
        let quad: Vec<usize> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
            .iter()
            .map(|&c| {
                self.plane
                    .index_of(c.map(|x| if x == 1 { f.one().rep() } else { 0 }))
            })
            .collect();
        let quadrangle = (0..4).all(|a| {
            (a + 1..4).all(|b| {
                let line = self
                    .lines
                    .iter()
                    .position(|l| l.contains(&(quad[a] as u32)) && l.contains(&(quad[b] as u32)));
                line.is_some_and(|l| {
                    quad.iter()
                        .filter(|&&x| self.lines[l].contains(&(x as u32)))
                        .count()
                        == 2
                })
            })
        });
        PlaneAxioms {
            order: self.order(),
            points: n,
            line_sizes,
            point_degrees,
            unique_joins,
            quadrangle,
            holds: line_sizes && point_degrees && unique_joins && quadrangle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlaneAxioms {
    pub order: usize,
    pub points: usize,
    pub line_sizes: bool,
    pub point_degrees: bool,
    /// Any two points are joined by exactly one line.
    pub unique_joins: bool,
    pub quadrangle: bool,
    pub holds: bool,
}

/// The correspondence `(x0, x1, x2) ↦ [x0^{q³}, x1^{q³}, x2^{q³}]`.
#[derive(Debug, Clone)]
pub struct FigPolarity {
    /// Image line of each point; the map on lines is the same index map.
    map: Vec<u32>,
    pub report: PolarityReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolarityReport {
    pub involutory: bool,
    /// Point-line pairs compared.
    pub pairs_checked: u64,
    pub reverses_incidence: bool,
    pub commutes_with_alpha: bool,
}

/// Planes up to this many points get the all-pairs incidence comparison;
/// larger ones are checked flag by flag.
const EXHAUSTIVE_LIMIT: usize = 20_000;

pub fn build_fig_polarity(fig: &FigPlane) -> Result<FigPolarity, FigError> {
    let plane = fig.classical();
    let (_, e) = prime_power(fig.q).expect("checked at construction");
    let n = fig.size();
    let map: Vec<u32> = (0..n)
        .map(|i| plane.index_of(plane.frobenius(plane.point(i).0, 3 * e)) as u32)
        .collect();
    let involutory = (0..n).all(|i| map[map[i] as usize] as usize == i);
    let commutes_with_alpha =
        (0..n).all(|i| map[fig.alpha_point(i)] as usize == fig.alpha_line(map[i] as usize));
    // P on ℓ iff π(ℓ) on π(P)
    let failure = if n <= EXHAUSTIVE_LIMIT {
        (0..n).into_par_iter().find_map_first(|p| {
            (0..n)
                .find(|&l| {
                    fig.fig_incident(p, l) != fig.fig_incident(map[l] as usize, map[p] as usize)
                })
                .map(|l| (p, l))
        })
    } else {
        // π is a bijection on points and on lines, so mapping flags into
        // flags forces non-flags onto non-flags.
        (0..n).into_par_iter().find_map_first(|l| {
            fig.points_on(l)
                .iter()
                .find(|&&p| {
                    fig.points_on(map[p as usize] as usize)
                        .binary_search(&map[l])
                        .is_err()
                })
                .map(|&p| (p as usize, l))
        })
    };
    let pairs_checked = if n <= EXHAUSTIVE_LIMIT {
        (n * n) as u64
    } else {
        (n * (fig.order() + 1)) as u64
    };
    if let Some((point, line)) = failure {
        return Err(FigError::PolarityFailed { point, line });
    }
    Ok(FigPolarity {
        map,
        report: PolarityReport {
            involutory,
            pairs_checked,
            reverses_incidence: true,
            commutes_with_alpha,
        },
    })
}

impl FigPolarity {
    pub fn point_to_line(&self, p: usize) -> usize {
        self.map[p] as usize
    }

    pub fn line_to_point(&self, l: usize) -> usize {
        self.map[l] as usize
    }
}

/// The unital of absolute points with its provenance in the plane.
#[derive(Debug, Clone)]
pub struct FigueroaUnital {
    pub unital: Unital,
    /// Plane index of each unital point, ascending.
    pub plane_points: Vec<usize>,
    /// Unital points of type I.
    pub hermitian_points: Vec<u32>,
    /// `α` restricted to the unital points.
    pub alpha: Permutation,
}

pub fn build_polar_unital(fig: &FigPlane, pol: &FigPolarity) -> FigueroaUnital {
    let n = fig.size();
    let plane_points: Vec<usize> = (0..n)
        .filter(|&p| {
            fig.points_on(pol.point_to_line(p))
                .binary_search(&(p as u32))
                .is_ok()
        })
        .collect();
    let mut local = vec![NONE; n];
    for (j, &i) in plane_points.iter().enumerate() {
        local[i] = j as u32;
    }
    let blocks: Vec<Vec<u32>> = (0..n)
        .filter_map(|l| {
            let trace: Vec<u32> = fig
                .points_on(l)
                .iter()
                .filter_map(|&x| (local[x as usize] != NONE).then_some(local[x as usize]))
                .collect();
            (trace.len() > 1).then_some(trace)
        })
        .collect();
    let q3 = fig.q as usize * fig.q as usize * fig.q as usize;
    let incidence = Incidence::new(plane_points.len(), blocks).expect("distinct traces");
    let unital = Unital::with_order(incidence, q3).expect("polar unital satisfies the axioms");
    let hermitian_points = plane_points
        .iter()
        .enumerate()
        .filter(|(_, &i)| fig.point_type(i) == ElementType::I)
        .map(|(j, _)| j as u32)
        .collect();
    let alpha = Permutation::from_images(
        plane_points
            .iter()
            .map(|&i| local[fig.alpha_point(i)])
            .collect(),
    )
    .expect("α permutes the absolute points");
    FigueroaUnital {
        unital,
        plane_points,
        hermitian_points,
        alpha,
    }
}

/// The points of the Figueroa unital lying in the fixed subplane of `α`.
pub fn hermitian_subunital(fu: &FigueroaUnital) -> &[u32] {
    &fu.hermitian_points
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    /// Packed field representatives of the normalized coordinates.
    pub coords: Coords,
    #[serde(rename = "type")]
    pub kind: ElementType,
}

/// Coordinates and type of every unital point, for the JSON sidecar.
pub fn point_records(fig: &FigPlane, fu: &FigueroaUnital) -> Vec<PointRecord> {
    fu.plane_points
        .iter()
        .enumerate()
        .map(|(index, &i)| PointRecord {
            index,
            coords: fig.classical().point(i).0,
            kind: fig.point_type(i),
        })
        .collect()
}

/// Plane, polarity and unital for one value of `q`.
#[derive(Debug, Clone)]
pub struct FigueroaBuild {
    pub plane: FigPlane,
    pub polarity: FigPolarity,
    pub unital: FigueroaUnital,
}

pub fn build_figueroa(q: u32) -> Result<FigueroaBuild, FigError> {
    let plane = FigPlane::new(q)?;
    let polarity = build_fig_polarity(&plane)?;
    let unital = build_polar_unital(&plane, &polarity);
    Ok(FigueroaBuild {
        plane,
        polarity,
        unital,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FigueroaReport {
    pub q: u32,
    pub plane_axioms: PlaneAxioms,
    pub polarity: PolarityReport,
    pub type_counts: [usize; 3],
    pub v: usize,
    pub b: usize,
    pub k: Option<usize>,
    pub h: Vec<u32>,
    /// Map from `H` (ascending) onto `hermitian_unital(q)`.
    pub h_hermitian_isomorphism: Option<Vec<u32>>,
    pub omega2_is_h: bool,
    pub mho_is_complement: bool,
    /// Every nontrivial translation is an involution.
    pub all_involutions: bool,
    /// `|trs(c)|` for the points `c` of `H`.
    pub trs_orders_on_h: Vec<usize>,
    pub h_invariant: bool,
    /// Order of the group `T[2]` induces on `H`.
    pub t2_on_h_order: String,
    pub t2_transitive_on_h: bool,
    pub t2_two_transitive_on_h: bool,
    pub alpha_automorphism: bool,
    pub alpha_order: u64,
    pub alpha_trivial_on_omega2: bool,
    /// Whether every automorphism trivial on `Ω_2` is the identity; `α`
    /// is a counterexample.
    pub faithful_with_alpha: bool,
    pub holds: bool,
}

/// Checks the translation structure of the Figueroa unital against its
/// hermitian subunital `H` and the collineation `α`.
pub fn verify_figueroa_theorems(build: &FigueroaBuild, atlas: &TranslationAtlas) -> FigueroaReport {
    let fu = &build.unital;
    let u = &fu.unital;
    let h = fu.hermitian_points.clone();
    let mut in_h = vec![false; u.v()];
    for &x in &h {
        in_h[x as usize] = true;
    }
    let complement: Vec<u32> = (0..u.v() as u32).filter(|&x| !in_h[x as usize]).collect();
    let restricted = restrict_to(u.incidence(), &h);
    let h_hermitian_isomorphism = hermitian_unital(build.plane.q()).ok().and_then(|herm| {
        match isomorphism_search(&restricted.incidence, herm.incidence(), 0) {
            IsoOutcome::Found(map) => Some(map),
            _ => None,
        }
    });
    let all_involutions = atlas.orders() == [2];
    let trs_orders_on_h = h.iter().map(|&c| atlas.translations(c).len()).collect();
    let h_invariant = (0..u.v() as u32).all(|c| {
        atlas
            .translations(c)
            .iter()
            .all(|t| h.iter().all(|&x| in_h[t.apply(x) as usize]))
    });
    let t2 = atlas.tgroup(2);
    let (t2_on_h_order, t2_transitive_on_h, t2_two_transitive_on_h) = match t2.induced_on(&h) {
        Ok(g) => {
            let local: Vec<u32> = (0..h.len() as u32).collect();
            (
                g.order().to_string(),
                g.is_transitive_on(&local).unwrap_or(false),
                g.is_two_transitive_on(&local).unwrap_or(false),
            )
        }
        Err(_) => ("0".into(), false, false),
    };
    let alpha = &fu.alpha;
    let alpha_trivial_on_omega2 = atlas.omega(2).iter().all(|&x| alpha.apply(x) == x);
    let report = FigueroaReport {
        q: build.plane.q(),
        plane_axioms: build.plane.check_axioms(),
        polarity: build.polarity.report,
        type_counts: build.plane.type_counts(),
        v: u.v(),
        b: u.blocks().len(),
        k: u.incidence().constant_block_size(),
        omega2_is_h: atlas.omega(2) == h,
        mho_is_complement: atlas.mho() == complement,
        h,
        h_hermitian_isomorphism,
        all_involutions,
        trs_orders_on_h,
        h_invariant,
        t2_on_h_order,
        t2_transitive_on_h,
        t2_two_transitive_on_h,
        alpha_automorphism: is_automorphism(u, alpha),
        alpha_order: alpha.order(),
        alpha_trivial_on_omega2,
        faithful_with_alpha: !(alpha_trivial_on_omega2 && !alpha.is_identity()),
        holds: false,
    };
    let holds = report.plane_axioms.holds
        && report.polarity.reverses_incidence
        && report.polarity.involutory
        && report.h_hermitian_isomorphism.is_some()
        && report.omega2_is_h
        && report.mho_is_complement
        && report.all_involutions
        && report.h_invariant
        && report.t2_transitive_on_h
        && report.alpha_automorphism
        && report.alpha_order == 3
        && report.alpha_trivial_on_omega2;
    FigueroaReport { holds, ..report }
}
