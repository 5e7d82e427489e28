//! Arithmetic in the finite field `F_{p^e}`.
//!
//! Elements are coefficient vectors over `F_p` with respect to the power basis
//! of a primitive polynomial, packed into a `u32` as base-`p` digits (the
//! coefficient of `x^i` is digit `i`). Log/antilog tables accelerate
//! multiplication; addition is digitwise (XOR in characteristic 2).

use thiserror::Error;

/// Largest field order accepted by [`Field::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field order {0} exceeds the desk-scale bound 2^20")]
    TooLarge(u64),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields (orders {0} and {1})")]
    MixedFields(u32, u32),
    #[error("subfield degree {sub} does not divide extension degree {ext}")]
    NotASubfield { sub: u32, ext: u32 },
    #[error("frobenius index {k} out of range for degree {e}")]
    FrobeniusIndex { k: u32, e: u32 },
}

/// An element tagged with the order of its field.
///
/// Fields are constructed deterministically from `(p, e)`, and `p^e` determines
/// both, so the order is a sufficient owner tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    order: u32,
    rep: u32,
}

impl FieldElement {
    /// Packed coefficient vector.
    pub fn rep(self) -> u32 {
        self.rep
    }

    pub fn field_order(self) -> u32 {
        self.order
    }
}

#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    e: u32,
    order: u32,
    /// Coefficients `c_0..c_e` of the monic modulus, low degree first.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q = p^e` into `(p, e)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

pub fn smallest_prime_divisor(n: u32) -> Option<u32> {
    (n >= 2).then(|| (2..=n).find(|d| n.is_multiple_of(*d)).unwrap())
}

/// Multiplies the packed element `a` by `x` modulo the monic `modulus`.
fn times_x(a: u32, p: u32, e: u32, modulus: &[u32]) -> u32 {
    let e = e as usize;
    if p == 2 {
        let mask = modulus[..e]
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &c)| m | (c << i));
        let shifted = a << 1;
        return if shifted >> e & 1 == 1 {
            (shifted ^ (1 << e)) ^ mask
        } else {
            shifted
        };
    }
    let mut digits = [0u32; 32];
    let mut rest = a;
    for d in digits.iter_mut().take(e) {
        *d = rest % p;
        rest /= p;
    }
    let top = digits[e - 1];
    for i in (1..e).rev() {
        digits[i] = digits[i - 1];
    }
    digits[0] = 0;
    // x^e = -(c_0 + c_1 x + ... + c_{e-1} x^{e-1})
    for (d, &c) in digits.iter_mut().zip(modulus).take(e) {
        *d = (*d + top * (p - c % p)) % p;
    }
    pack(&digits[..e], p)
}

fn unpack(mut a: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(a % p);
        a /= p;
    }
    out
}

fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Returns the exp table if `x` has multiplicative order `p^e - 1`.
fn primitive_powers(p: u32, e: u32, modulus: &[u32]) -> Option<Vec<u32>> {
    let order = p.pow(e);
    let group = order - 1;
    let mut exp = Vec::with_capacity(group as usize);
    let mut cur = 1u32;
    for i in 0..group {
        if i > 0 && cur == 1 {
            return None;
        }
        exp.push(cur);
        cur = times_x(cur, p, e, modulus);
    }
    (cur == 1).then_some(exp)
}

impl Field {
    /// Builds `F_{p^e}` over the lexicographically least primitive polynomial,
    /// comparing coefficient vectors from the constant term upward.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(order));
        }
        let order = order as u32;
        // Tuples (c_0, ..., c_{e-1}) in lexicographic order with c_0 most
        // significant; c_0 = 0 is never primitive.
        let tail = p.pow(e - 1);
        for c0 in 1..p {
            for t in 0..tail {
                let mut modulus = vec![c0];
                let mut rest = t;
                let mut tail_digits = Vec::with_capacity(e as usize - 1);
                for _ in 1..e {
                    tail_digits.push(rest % p);
                    rest /= p;
                }
                // most significant digit of `t` is c_1
                tail_digits.reverse();
                modulus.extend(tail_digits);
                modulus.push(1);
                if let Some(exp) = primitive_powers(p, e, &modulus) {
                    return Ok(Self::from_tables(p, e, order, modulus, exp));
                }
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    fn from_tables(p: u32, e: u32, order: u32, modulus: Vec<u32>, exp: Vec<u32>) -> Self {
        let mut log = vec![0u32; order as usize];
        for (i, &a) in exp.iter().enumerate() {
            log[a as usize] = i as u32;
        }
        let mut field = Field {
            p,
            e,
            order,
            modulus,
            exp,
            log,
            add: None,
        };
        if p != 2 && order <= 1024 {
            let n = order as usize;
            let mut table = vec![0u32; n * n];
            for a in 0..order {
                for b in 0..order {
                    table[a as usize * n + b as usize] = field.add_digits(a, b);
                }
            }
            field.add = Some(table);
        }
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn element(&self, rep: u32) -> FieldElement {
        assert!(rep < self.order, "rep {rep} out of range");
        FieldElement {
            order: self.order,
            rep,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The root of the modulus, a generator of the multiplicative group.
    pub fn generator(&self) -> FieldElement {
        self.element(self.exp.get(1).copied().unwrap_or(1))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(|r| self.element(r))
    }

    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        unpack(a.rep, self.p, self.e)
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let (p, mut a, mut b) = (self.p, a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    // Raw operations on packed representations. Callers guarantee that every
    // operand is below `order`.

    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if let Some(t) = &self.add {
            t[a as usize * self.order as usize + b as usize]
        } else {
            self.add_digits(a, b)
        }
    }

    #[inline]
    pub fn neg_raw(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (p, mut a) = (self.p, a);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.neg_raw(b))
    }

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    #[inline]
    pub fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order - 1;
        let l = self.log[a as usize];
        Some(self.exp[((n - l) % n) as usize])
    }

    pub fn pow_raw(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (k % n)) % n) as usize]
    }

    /// `a^(p^k)`.
    #[inline]
    pub fn frobenius_raw(&self, a: u32, k: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        let pk = (self.p as u64).pow(k) % n;
        self.exp[((self.log[a as usize] as u64 * pk) % n) as usize]
    }

    fn check(&self, a: FieldElement) -> Result<u32, FieldError> {
        if a.order != self.order {
            return Err(FieldError::MixedFields(self.order, a.order));
        }
        Ok(a.rep)
    }

    fn check2(&self, a: FieldElement, b: FieldElement) -> Result<(u32, u32), FieldError> {
        if a.order != b.order {
            return Err(FieldError::MixedFields(a.order, b.order));
        }
        Ok((self.check(a)?, self.check(b)?))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let (a, b) = self.check2(a, b)?;
        Ok(self.element(self.add_raw(a, b)))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let (a, b) = self.check2(a, b)?;
        Ok(self.element(self.sub_raw(a, b)))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.element(self.neg_raw(self.check(a)?)))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        let (a, b) = self.check2(a, b)?;
        Ok(self.element(self.mul_raw(a, b)))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let a = self.check(a)?;
        self.inv_raw(a)
            .map(|r| self.element(r))
            .ok_or(FieldError::ZeroInverse)
    }

    pub fn pow(&self, a: FieldElement, k: u64) -> Result<FieldElement, FieldError> {
        Ok(self.element(self.pow_raw(self.check(a)?, k)))
    }

    /// The automorphism `a ↦ a^(p^k)`, for `0 <= k < e`.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> Result<FieldElement, FieldError> {
        if k >= self.e {
            return Err(FieldError::FrobeniusIndex { k, e: self.e });
        }
        Ok(self.element(self.frobenius_raw(self.check(a)?, k)))
    }

    /// Norm from `F_{p^e}` down to the subfield `F_{p^d}`:
    /// `a^((p^e - 1)/(p^d - 1))`.
    pub fn rel_norm(&self, a: FieldElement, d: u32) -> Result<FieldElement, FieldError> {
        if d == 0 || !self.e.is_multiple_of(d) {
            return Err(FieldError::NotASubfield {
                sub: d,
                ext: self.e,
            });
        }
        let a = self.check(a)?;
        let k = (self.order as u64 - 1) / ((self.p as u64).pow(d) - 1);
        Ok(self.element(self.pow_raw(a, k)))
    }

    /// True iff `a` lies in the subfield of degree `d`.
    pub fn in_subfield_raw(&self, a: u32, d: u32) -> bool {
        self.frobenius_raw(a, d) == a
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Result<u32, FieldError> {
        let a = self.check(a)?;
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let n = self.order - 1;
        let l = self.log[a as usize];
        Ok(n / gcd(n, l))
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
