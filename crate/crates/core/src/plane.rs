//! The desarguesian plane PG(2, F_s) with canonical homogeneous coordinates,
//! the hermitian polarity, and the hermitian unital.

use crate::field::{prime_power, Field, FieldError};
use crate::incidence::{Incidence, Unital};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaneError {
    #[error("the two arguments coincide")]
    Coincident,
    #[error("all coordinates are zero")]
    ZeroVector,
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Packed field reps of a homogeneous triple.
pub type Coords = [u32; 3];

/// A projective point, first nonzero coordinate equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PPoint(pub Coords);

/// A projective line `[a0:a1:a2]`, normalized like points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLine(pub Coords);

#[derive(Debug, Clone)]
pub struct Plane {
    field: Field,
    coords: Vec<Coords>,
}

impl Plane {
    /// Enumerates all `s^2 + s + 1` points (equivalently, line coordinates) in
    /// lexicographic order of their normalized triples.
    pub fn new(field: Field) -> Self {
        let s = field.order();
        let mut coords = Vec::with_capacity((s * s + s + 1) as usize);
        coords.push([0, 0, 1]);
        for a in 0..s {
            coords.push([0, 1, a]);
        }
        for a in 0..s {
            for b in 0..s {
                coords.push([1, a, b]);
            }
        }
        Plane { field, coords }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of points, which is also the number of lines.
    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub fn point(&self, i: usize) -> PPoint {
        PPoint(self.coords[i])
    }

    pub fn line(&self, i: usize) -> PLine {
        PLine(self.coords[i])
    }

    pub fn points(&self) -> impl Iterator<Item = PPoint> + '_ {
        self.coords.iter().map(|&c| PPoint(c))
    }

    pub fn lines(&self) -> impl Iterator<Item = PLine> + '_ {
        self.coords.iter().map(|&c| PLine(c))
    }

    /// Index of a normalized triple in the enumeration order.
    pub fn index_of(&self, c: Coords) -> usize {
        let s = self.field.order() as usize;
        match c {
            [0, 0, _] => 0,
            [0, _, a] => 1 + a as usize,
            [_, a, b] => 1 + s + a as usize * s + b as usize,
        }
    }

    pub fn normalize(&self, c: Coords) -> Result<Coords, PlaneError> {
        let f = &self.field;
        let lead = c
            .iter()
            .copied()
            .find(|&x| x != 0)
            .ok_or(PlaneError::ZeroVector)?;
        let inv = f.inv_raw(lead).expect("nonzero");
        Ok(c.map(|x| f.mul_raw(x, inv)))
    }

    #[inline]
    pub fn dot(&self, a: Coords, b: Coords) -> u32 {
        let f = &self.field;
        let t = f.add_raw(f.mul_raw(a[0], b[0]), f.mul_raw(a[1], b[1]));
        f.add_raw(t, f.mul_raw(a[2], b[2]))
    }

    #[inline]
    pub fn incident(&self, p: PPoint, l: PLine) -> bool {
        self.dot(p.0, l.0) == 0
    }

    fn cross(&self, a: Coords, b: Coords) -> Coords {
        let f = &self.field;
        let m = |x, y| f.mul_raw(x, y);
        [
            f.sub_raw(m(a[1], b[2]), m(a[2], b[1])),
            f.sub_raw(m(a[2], b[0]), m(a[0], b[2])),
            f.sub_raw(m(a[0], b[1]), m(a[1], b[0])),
        ]
    }

    pub fn line_through(&self, p: PPoint, q: PPoint) -> Result<PLine, PlaneError> {
        if p == q {
            return Err(PlaneError::Coincident);
        }
        Ok(PLine(self.normalize(self.cross(p.0, q.0))?))
    }

    pub fn meet(&self, l: PLine, m: PLine) -> Result<PPoint, PlaneError> {
        if l == m {
            return Err(PlaneError::Coincident);
        }
        Ok(PPoint(self.normalize(self.cross(l.0, m.0))?))
    }

    /// Indices of the `s + 1` points on `l`, ascending.
    pub fn points_on(&self, l: PLine) -> Vec<usize> {
        let f = &self.field;
        let mut base: Vec<Coords> = Vec::with_capacity(2);
        for axis in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            if let Ok(p) = self.meet(l, PLine(axis)) {
                if !base.contains(&p.0) {
                    base.push(p.0);
                }
            }
            if base.len() == 2 {
                break;
            }
        }
        let (p, q) = (base[0], base[1]);
        let mut out = Vec::with_capacity(f.order() as usize + 1);
        out.push(self.index_of(p));
        for t in 0..f.order() {
            let c = [0, 1, 2].map(|i| f.add_raw(q[i], f.mul_raw(t, p[i])));
            out.push(self.index_of(self.normalize(c).expect("distinct points")));
        }
        out.sort_unstable();
        out
    }

    /// Coordinatewise `x ↦ x^(p^k)`; maps points to points and lines to lines.
    pub fn frobenius(&self, c: Coords, k: u32) -> Coords {
        c.map(|x| self.field.frobenius_raw(x, k))
    }
}

/// The polarity of PG(2, F_{q^2}) induced by the identity-Gram hermitian form
/// `x0 y0^q + x1 y1^q + x2 y2^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianPolarity {
    /// Frobenius index `k` with `p^k = q`.
    conj: u32,
}

impl HermitianPolarity {
    pub fn new(plane: &Plane) -> Self {
        let e = plane.field().degree();
        assert!(
            e.is_multiple_of(2),
            "hermitian polarity needs a square field order"
        );
        HermitianPolarity { conj: e / 2 }
    }

    pub fn point_to_line(&self, plane: &Plane, p: PPoint) -> PLine {
        PLine(plane.frobenius(p.0, self.conj))
    }

    pub fn line_to_point(&self, plane: &Plane, l: PLine) -> PPoint {
        PPoint(plane.frobenius(l.0, self.conj))
    }

    pub fn is_absolute(&self, plane: &Plane, p: PPoint) -> bool {
        plane.incident(p, self.point_to_line(plane, p))
    }
}

/// A hermitian unital together with its embedding in PG(2, F_{q^2}).
#[derive(Debug, Clone)]
pub struct HermitianConstruction {
    pub plane: Plane,
    pub polarity: HermitianPolarity,
    /// Plane index of each unital point; ascending.
    pub plane_points: Vec<usize>,
    pub unital: Unital,
}

impl HermitianConstruction {
    pub fn new(q: u32) -> Result<Self, PlaneError> {
        let (p, e) = prime_power(q).ok_or(PlaneError::NotPrimePower(q))?;
        let plane = Plane::new(Field::new(p, 2 * e)?);
        let polarity = HermitianPolarity::new(&plane);
        let plane_points: Vec<usize> = (0..plane.size())
            .filter(|&i| polarity.is_absolute(&plane, plane.point(i)))
            .collect();
        let mut local = vec![u32::MAX; plane.size()];
        for (j, &i) in plane_points.iter().enumerate() {
            local[i] = j as u32;
        }
        let mut blocks = Vec::new();
        for l in plane.lines() {
            let trace: Vec<u32> = plane
                .points_on(l)
                .into_iter()
                .filter_map(|i| (local[i] != u32::MAX).then_some(local[i]))
                .collect();
            if trace.len() > 1 {
                blocks.push(trace);
            }
        }
        let incidence =
            Incidence::new(plane_points.len(), blocks).expect("secant traces are distinct");
        let unital = Unital::new(incidence).expect("hermitian unital satisfies the axioms");
        Ok(HermitianConstruction {
            plane,
            polarity,
            plane_points,
            unital,
        })
    }

    /// Unital index of a plane point, if it is absolute.
    pub fn local_index(&self, plane_index: usize) -> Option<usize> {
        self.plane_points.binary_search(&plane_index).ok()
    }
}

/// The hermitian unital H(F_{q^2}|F_q) with canonically ordered blocks.
pub fn hermitian_unital(q: u32) -> Result<Unital, PlaneError> {
    Ok(HermitianConstruction::new(q)?.unital)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(p: u32, e: u32) -> Plane {
        Plane::new(Field::new(p, e).unwrap())
    }

    #[test]
    fn point_counts() {
        assert_eq!(plane(2, 1).size(), 7);
        assert_eq!(plane(2, 2).size(), 21);
        assert_eq!(plane(2, 6).size(), 4161);
    }

    #[test]
    fn plane_axioms_small() {
        for (p, e) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            let pl = plane(p, e);
            let s = pl.field().order() as usize;
            let n = pl.size();
            let mut joined = vec![0u8; n * n];
            for l in pl.lines() {
                let pts = pl.points_on(l);
                assert_eq!(pts.len(), s + 1);
                for &a in &pts {
                    assert!(pl.incident(pl.point(a), l));
                    for &b in &pts {
                        if a != b {
                            joined[a * n + b] += 1;
                        }
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(joined[a * n + b], (a != b) as u8);
                }
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let pl = plane(3, 2);
        for i in 0..pl.size() {
            assert_eq!(pl.index_of(pl.point(i).0), i);
            assert_eq!(pl.normalize(pl.point(i).0).unwrap(), pl.point(i).0);
        }
    }

    #[test]
    fn join_and_meet_of_axes() {
        let pl = plane(2, 2);
        let l = pl
            .line_through(PPoint([1, 0, 0]), PPoint([0, 1, 0]))
            .unwrap();
        assert_eq!(l, PLine([0, 0, 1]));
        assert_eq!(
            pl.meet(PLine([0, 0, 1]), PLine([0, 1, 0])).unwrap(),
            PPoint([1, 0, 0])
        );
        let (p, q) = (pl.point(5), pl.point(17));
        assert_eq!(
            pl.line_through(p, q).unwrap(),
            pl.line_through(q, p).unwrap()
        );
        assert!(pl.incident(p, pl.line_through(p, q).unwrap()));
        assert_eq!(pl.line_through(p, p).unwrap_err(), PlaneError::Coincident);
        assert_eq!(
            pl.meet(PLine([0, 0, 1]), PLine([0, 0, 1])).unwrap_err(),
            PlaneError::Coincident
        );
    }

    #[test]
    fn hermitian_polarity_q2() {
        let pl = plane(2, 2);
        let pi = HermitianPolarity::new(&pl);
        assert_eq!(pi.point_to_line(&pl, PPoint([1, 0, 0])), PLine([1, 0, 0]));
        for p in pl.points() {
            assert_eq!(pi.line_to_point(&pl, pi.point_to_line(&pl, p)), p);
            for l in pl.lines() {
                assert_eq!(
                    pl.incident(p, l),
                    pl.incident(pi.line_to_point(&pl, l), pi.point_to_line(&pl, p))
                );
            }
        }
    }

    #[test]
    fn hermitian_counts() {
        for (q, v, b) in [(2, 9, 12), (3, 28, 63), (4, 65, 208)] {
            let u = hermitian_unital(q).unwrap();
            assert_eq!(u.order(), q as usize);
            assert_eq!(u.incidence().v(), v);
            assert_eq!(u.incidence().blocks().len(), b);
        }
        assert_eq!(
            hermitian_unital(6).unwrap_err(),
            PlaneError::NotPrimePower(6)
        );
    }

    #[test]
    fn lines_are_tangent_or_secant() {
        for q in [2u32, 3] {
            let h = HermitianConstruction::new(q).unwrap();
            let pl = &h.plane;
            for l in pl.lines() {
                let k = pl
                    .points_on(l)
                    .into_iter()
                    .filter(|&i| h.local_index(i).is_some())
                    .count();
                assert!(k == 1 || k == q as usize + 1, "line meets in {k}");
                if k == 1 {
                    // tangent lines are polars of their point of contact
                    let p = h.polarity.line_to_point(pl, l);
                    assert!(h.polarity.is_absolute(pl, p));
                    assert!(pl.incident(p, l));
                }
            }
        }
    }
}
