//! Exact arithmetic over prime fields `F_p` and quadratic extensions
//! `F_p[X]/(X^2 - c1 X - c0)`.
//!
//! Elements are plain `Copy` values; every operation goes through the
//! [`FieldSpec`] they belong to. Products are formed in 128-bit width, so any
//! 64-bit prime modulus works.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// The Mersenne prime `2^61 - 1`, used to emulate generic matrices.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Above this bound irreducibility is decided by the Euler criterion instead
/// of an exhaustive root search.
const EXHAUSTIVE_ROOT_LIMIT: u64 = 1_000_000;

/// Reduction rule `X^2 = c0 + c1 X` of a quadratic extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Quadratic {
    c0: u64,
    c1: u64,
}

/// A finite field: `F_p`, or `F_{p^2}` presented by a monic irreducible quadratic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    ext: Option<Quadratic>,
}

/// The element `a0 + a1 X`. In a prime field `a1` is always zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    a0: u64,
    a1: u64,
}

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement { a0: 0, a1: 0 };
    pub const ONE: FieldElement = FieldElement { a0: 1, a1: 0 };

    /// Constant coefficient.
    pub fn a0(self) -> u64 {
        self.a0
    }

    /// Coefficient of `X`.
    pub fn a1(self) -> u64 {
        self.a1
    }

    pub fn is_zero(self) -> bool {
        self.a0 == 0 && self.a1 == 0
    }
}

impl FieldSpec {
    /// `F_p` for a prime `p`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec { p, ext: None })
    }

    /// `F_p[X]/(X^2 - c)` for a quadratic non-residue `c` and odd prime `p`.
    pub fn quadratic(p: u64, c: u64) -> Result<Self> {
        let base = Self::prime(p)?;
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let c = c % p;
        if c == 0 || base.legendre(c) == 1 {
            return Err(Error::QuadraticResidue { p, c });
        }
        Ok(FieldSpec {
            p,
            ext: Some(Quadratic { c0: c, c1: 0 }),
        })
    }

    /// `F_p[X]/(X^2 - c1 X - c0)`, i.e. the extension where `X^2 = c0 + c1 X`.
    pub fn quadratic_general(p: u64, c0: u64, c1: u64) -> Result<Self> {
        let base = Self::prime(p)?;
        let (c0, c1) = (c0 % p, c1 % p);
        let poly = format!("X^2 - {c1}X - {c0}");
        // x^2 - c1 x - c0 has a root iff the polynomial is reducible.
        let has_root = if p <= EXHAUSTIVE_ROOT_LIMIT {
            (0..p).any(|x| {
                let x = base.from_u64(x);
                let v = base.sub(
                    base.sub(base.mul(x, x), base.mul(base.from_u64(c1), x)),
                    base.from_u64(c0),
                );
                v.is_zero()
            })
        } else {
            let disc = base.add(
                base.mul(base.from_u64(c1), base.from_u64(c1)),
                base.mul(base.from_u64(4), base.from_u64(c0)),
            );
            disc.is_zero() || base.legendre(disc.a0) == 1
        };
        if has_root {
            return Err(Error::Reducible { p, poly });
        }
        Ok(FieldSpec {
            p,
            ext: Some(Quadratic { c0, c1 }),
        })
    }

    /// `F_p^2` presented as `F_p[X]/(X^2 - c)` with `c` the smallest non-residue.
    pub fn quadratic_smallest(p: u64) -> Result<Self> {
        let base = Self::prime(p)?;
        if p == 2 {
            return Self::quadratic_general(2, 1, 1);
        }
        let c = base.smallest_non_residue();
        Self::quadratic(p, c)
    }

    /// The field used to instantiate generic matrices.
    pub fn generic() -> Self {
        FieldSpec {
            p: MERSENNE_61,
            ext: None,
        }
    }

    /// The characteristic.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The number of elements.
    pub fn order(&self) -> u128 {
        match self.ext {
            None => self.p as u128,
            Some(_) => self.p as u128 * self.p as u128,
        }
    }

    pub fn is_extension(&self) -> bool {
        self.ext.is_some()
    }

    /// Coefficients `(constant, linear)` of the monic modulus `X^2 + linear X + constant`.
    pub fn modulus(&self) -> Option<(u64, u64)> {
        self.ext
            .map(|q| ((self.p - q.c0) % self.p, (self.p - q.c1) % self.p))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The adjoined root `X`. Only meaningful in an extension.
    pub fn x(&self) -> Result<FieldElement> {
        match self.ext {
            Some(_) => Ok(FieldElement { a0: 0, a1: 1 }),
            None => Err(Error::Precondition(format!(
                "F_{} has no adjoined element X",
                self.p
            ))),
        }
    }

    pub fn from_u64(&self, v: u64) -> FieldElement {
        FieldElement {
            a0: v % self.p,
            a1: 0,
        }
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        if v >= 0 {
            self.from_u64(v as u64)
        } else {
            self.neg(self.from_u64(v.unsigned_abs()))
        }
    }

    /// Builds `a0 + a1 X`, reducing both coefficients.
    pub fn element(&self, a0: u64, a1: u64) -> Result<FieldElement> {
        if a1 % self.p != 0 && self.ext.is_none() {
            return Err(Error::Precondition(format!(
                "F_{} elements have no X component",
                self.p
            )));
        }
        Ok(FieldElement {
            a0: a0 % self.p,
            a1: a1 % self.p,
        })
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        x.a0 < self.p && x.a1 < self.p && (self.ext.is_some() || x.a1 == 0)
    }

    #[inline]
    fn add_mod(&self, a: u64, b: u64) -> u64 {
        let (s, overflow) = a.overflowing_add(b);
        if overflow || s >= self.p {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }

    #[inline]
    fn sub_mod(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.p)
        }
    }

    #[inline]
    fn mul_mod(&self, a: u64, b: u64) -> u64 {
        if self.p <= u32::MAX as u64 {
            return a * b % self.p;
        }
        let prod = a as u128 * b as u128;
        if self.p == MERSENNE_61 {
            let lo = (prod as u64) & MERSENNE_61;
            let hi = (prod >> 61) as u64;
            let s = lo + hi;
            return if s >= MERSENNE_61 { s - MERSENNE_61 } else { s };
        }
        (prod % self.p as u128) as u64
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement {
            a0: self.add_mod(x.a0, y.a0),
            a1: self.add_mod(x.a1, y.a1),
        }
    }

    #[inline]
    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement {
            a0: self.sub_mod(x.a0, y.a0),
            a1: self.sub_mod(x.a1, y.a1),
        }
    }

    #[inline]
    pub fn neg(&self, x: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, x)
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        match self.ext {
            None => FieldElement {
                a0: self.mul_mod(x.a0, y.a0),
                a1: 0,
            },
            Some(q) => {
                // (x0 + x1 X)(y0 + y1 X) = x0 y0 + (x0 y1 + x1 y0) X + x1 y1 X^2
                let hi = self.mul_mod(x.a1, y.a1);
                let a0 = self.add_mod(self.mul_mod(x.a0, y.a0), self.mul_mod(hi, q.c0));
                let a1 = self.add_mod(
                    self.add_mod(self.mul_mod(x.a0, y.a1), self.mul_mod(x.a1, y.a0)),
                    self.mul_mod(hi, q.c1),
                );
                FieldElement { a0, a1 }
            }
        }
    }

    /// `x + a*y`, the elimination workhorse.
    #[inline]
    pub fn mul_add(&self, x: FieldElement, a: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.mul(a, y))
    }

    pub fn pow(&self, x: FieldElement, mut e: u128) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv_base(&self, a: u64) -> u64 {
        // Extended Euclid on u128 to stay clear of overflow.
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        t0.rem_euclid(self.p as i128) as u64
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self.ext {
            None => Ok(FieldElement {
                a0: self.inv_base(x.a0),
                a1: 0,
            }),
            Some(q) => {
                // The conjugate replaces X by the other root c1 - X; the norm
                // x * conj(x) lies in F_p.
                let conj = FieldElement {
                    a0: self.add_mod(x.a0, self.mul_mod(x.a1, q.c1)),
                    a1: self.sub_mod(0, x.a1),
                };
                let norm = self.mul(x, conj);
                debug_assert_eq!(norm.a1, 0);
                let n_inv = self.inv_base(norm.a0);
                Ok(self.mul(conj, FieldElement { a0: n_inv, a1: 0 }))
            }
        }
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Legendre symbol of `a mod p` for odd `p`: 1, p-1 (i.e. -1) or 0.
    fn legendre(&self, a: u64) -> u64 {
        let a = FieldElement {
            a0: a % self.p,
            a1: 0,
        };
        let base = FieldSpec {
            p: self.p,
            ext: None,
        };
        base.pow(a, ((self.p - 1) / 2) as u128).a0
    }

    /// Euler criterion on the base field.
    pub fn is_quadratic_residue(&self, a: u64) -> bool {
        let a = a % self.p;
        a == 0 || self.p == 2 || self.legendre(a) == 1
    }

    /// Smallest quadratic non-residue of an odd prime field.
    pub fn smallest_non_residue(&self) -> u64 {
        (2..self.p)
            .find(|&c| !self.is_quadratic_residue(c))
            .expect("odd primes have non-residues")
    }

    /// Smallest `z > 1` in `F_p` with `z^3 = 1`.
    pub fn cube_root_of_unity(&self) -> Result<FieldElement> {
        if self.p % 3 != 1 {
            return Err(Error::NoCubeRoot(self.p));
        }
        let base = FieldSpec {
            p: self.p,
            ext: None,
        };
        (2..self.p)
            .map(|z| base.from_u64(z))
            .find(|&z| base.pow(z, 3) == FieldElement::ONE)
            .ok_or(Error::NoCubeRoot(self.p))
    }

    /// A uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let a0 = rng.random_range(0..self.p);
        let a1 = if self.ext.is_some() {
            rng.random_range(0..self.p)
        } else {
            0
        };
        FieldElement { a0, a1 }
    }

    /// Enumerates every element, constants first.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let a1_max = if self.ext.is_some() { self.p } else { 1 };
        (0..a1_max).flat_map(move |a1| (0..self.p).map(move |a0| FieldElement { a0, a1 }))
    }

    /// Parses an element literal: `a0`, `a0+a1x` or `a1x`.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad field element {s:?}"));
        let parse_int = |t: &str| -> Result<FieldElement> {
            let t = t.trim();
            if let Some(rest) = t.strip_prefix('-') {
                let v: u64 = rest.parse().map_err(|_| bad())?;
                Ok(self.neg(self.from_u64(v)))
            } else {
                let v: u64 = t.parse().map_err(|_| bad())?;
                Ok(self.from_u64(v))
            }
        };
        let (c, x) = match s.find('+') {
            Some(pos) => (&s[..pos], Some(&s[pos + 1..])),
            None if s.ends_with('x') || s.ends_with('X') => ("0", Some(s)),
            None => (s, None),
        };
        let a0 = parse_int(c)?;
        let a1 = match x {
            None => FieldElement::ZERO,
            Some(t) => {
                let t = t
                    .trim()
                    .strip_suffix(['x', 'X'])
                    .ok_or_else(bad)?;
                if t.is_empty() {
                    self.from_u64(1)
                } else {
                    parse_int(t)?
                }
            }
        };
        if !a1.is_zero() && self.ext.is_none() {
            return Err(bad());
        }
        Ok(FieldElement {
            a0: a0.a0,
            a1: a1.a0,
        })
    }

    /// Formats an element in literal syntax.
    pub fn format_element(&self, x: FieldElement) -> String {
        if x.a1 == 0 {
            x.a0.to_string()
        } else {
            format!("{}+{}x", x.a0, x.a1)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ext {
            None => write!(f, "p={}", self.p),
            Some(Quadratic { c0, c1: 0 }) => write!(f, "p={};x2={}", self.p, c0),
            Some(Quadratic { c0, c1 }) => write!(f, "p={};x2={}+{}x", self.p, c0, c1),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `p=13` or `p=7;x2=3` (meaning `X^2 = 3`), or `p=2;x2=1+1x`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad field literal {s:?}"));
        let mut parts = s.trim().split(';');
        let p: u64 = parts
            .next()
            .and_then(|t| t.trim().strip_prefix("p="))
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let base = FieldSpec::prime(p)?;
        match parts.next() {
            None => Ok(base),
            Some(t) => {
                let rule = t.trim().strip_prefix("x2=").ok_or_else(bad)?;
                if parts.next().is_some() {
                    return Err(bad());
                }
                let lit = FieldSpec {
                    p,
                    ext: Some(Quadratic { c0: 0, c1: 0 }),
                };
                let r = lit.parse_element(rule)?;
                if r.a1 == 0 && p != 2 {
                    FieldSpec::quadratic(p, r.a0)
                } else {
                    FieldSpec::quadratic_general(p, r.a0, r.a1)
                }
            }
        }
    }
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}
