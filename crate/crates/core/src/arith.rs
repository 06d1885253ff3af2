//! Exact arithmetic in F_p together with the character tables everything
//! else consumes: the additive character ψ(a) = exp(2πi·a/p), the Legendre
//! symbol, and characters of finite cyclic groups.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("mismatched moduli: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("discrete log index {index} out of range for a group of order {order}")]
    LogOutOfRange { index: usize, order: usize },
}

/// Largest modulus accepted. Tables are dense in p and operators are p×p.
pub const MAX_MODULUS: u32 = 1 << 16;

pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes in the inclusive range `[lo, hi]`.
pub fn odd_primes_in(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&n| is_odd_prime(n as u64)).collect()
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn check_modulus(p: u32) -> Result<(), ArithError> {
    if p > MAX_MODULUS || !is_odd_prime(p as u64) {
        return Err(ArithError::NotOddPrime(p as u64));
    }
    Ok(())
}

/// A residue modulo an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    /// Reduces `value` modulo `modulus` after checking that the modulus is an
    /// odd prime.
    pub fn new(value: i64, modulus: u32) -> Result<Self, ArithError> {
        check_modulus(modulus)?;
        Ok(Self::reduce(value, modulus))
    }

    /// Caller guarantees `modulus` is an odd prime.
    pub(crate) fn reduce(value: i64, modulus: u32) -> Self {
        FieldElement {
            value: value.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn zero(modulus: u32) -> Self {
        FieldElement { value: 0, modulus }
    }

    pub fn one(modulus: u32) -> Self {
        FieldElement { value: 1, modulus }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, rhs: Self) -> Result<(), ArithError> {
        if self.modulus != rhs.modulus {
            return Err(ArithError::ModulusMismatch {
                left: self.modulus,
                right: rhs.modulus,
            });
        }
        Ok(())
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, ArithError> {
        self.same_modulus(rhs)?;
        let s = (self.value as u64 + rhs.value as u64) % self.modulus as u64;
        Ok(FieldElement {
            value: s as u32,
            modulus: self.modulus,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, ArithError> {
        self.same_modulus(rhs)?;
        let m = self.modulus as u64;
        let s = (self.value as u64 + m - rhs.value as u64) % m;
        Ok(FieldElement {
            value: s as u32,
            modulus: self.modulus,
        })
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, ArithError> {
        self.same_modulus(rhs)?;
        let s = (self.value as u64 * rhs.value as u64) % self.modulus as u64;
        Ok(FieldElement {
            value: s as u32,
            modulus: self.modulus,
        })
    }

    pub fn inverse(self) -> Result<Self, ArithError> {
        if self.value == 0 {
            return Err(ArithError::ZeroInverse);
        }
        let m = self.modulus as u64;
        let inv = pow_mod(self.value as u64, m - 2, m);
        Ok(FieldElement {
            value: inv as u32,
            modulus: self.modulus,
        })
    }

    /// `self · 2⁻¹`.
    pub fn half(self) -> Self {
        let m = self.modulus as u64;
        let inv2 = m / 2 + 1;
        FieldElement {
            value: (self.value as u64 * inv2 % m) as u32,
            modulus: self.modulus,
        }
    }

    pub fn pow(self, exp: u64) -> Self {
        FieldElement {
            value: pow_mod(self.value as u64, exp, self.modulus as u64) as u32,
            modulus: self.modulus,
        }
    }

    pub fn legendre(self) -> i8 {
        legendre(self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;

            /// Panics when the moduli differ; use the `checked_*` form to get
            /// an error instead.
            fn $method(self, rhs: Self) -> Self {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> Self {
        FieldElement {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

/// ψ(a) = exp(2πi·a/p).
pub fn additive_char(a: FieldElement) -> Complex64 {
    unit_root(a.value as u64, a.modulus as u64)
}

/// Legendre symbol, with `legendre(0) = 0`.
pub fn legendre(a: FieldElement) -> i8 {
    if a.value == 0 {
        return 0;
    }
    let m = a.modulus as u64;
    if pow_mod(a.value as u64, (m - 1) / 2, m) == 1 {
        1
    } else {
        -1
    }
}

fn unit_root(k: u64, n: u64) -> Complex64 {
    let theta = TAU * (k % n) as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Table of the `n`-th roots of unity `exp(2πi·k/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootsOfUnity {
    table: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "roots of unity of order zero");
        let table = (0..n as u64).map(|k| unit_root(k, n as u64)).collect();
        RootsOfUnity { table }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.table[k % self.table.len()]
    }
}

/// Character χ_k of a cyclic group of order N with a fixed generator g:
/// χ_k(g^j) = exp(2πi·k·j/N).
#[derive(Debug, Clone)]
pub struct CyclicCharacter {
    index: usize,
    roots: Arc<RootsOfUnity>,
}

impl CyclicCharacter {
    pub fn new(index: usize, roots: Arc<RootsOfUnity>) -> Self {
        let index = index % roots.order();
        CyclicCharacter { index, roots }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn order(&self) -> usize {
        self.roots.order()
    }

    /// Value at `g^element_log`.
    pub fn value(&self, element_log: usize) -> Result<Complex64, ArithError> {
        let n = self.order();
        if element_log >= n {
            return Err(ArithError::LogOutOfRange {
                index: element_log,
                order: n,
            });
        }
        Ok(self.roots.get(self.index * element_log % n))
    }

    pub fn product(&self, other: &CyclicCharacter) -> CyclicCharacter {
        assert_eq!(self.order(), other.order(), "characters of different groups");
        CyclicCharacter::new(self.index + other.index, self.roots.clone())
    }
}

/// Precomputed tables for one prime field. Read-only after construction.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u32,
    psi: Vec<Complex64>,
    legendre: Vec<i8>,
    inverse: Vec<u32>,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, ArithError> {
        check_modulus(p)?;
        let pp = p as u64;
        let psi = (0..pp).map(|a| unit_root(a, pp)).collect();
        let legendre = (0..p).map(|a| legendre(FieldElement::reduce(a as i64, p))).collect();
        let inverse = (0..pp)
            .map(|a| if a == 0 { 0 } else { pow_mod(a, pp - 2, pp) as u32 })
            .collect();
        Ok(PrimeField {
            p,
            psi,
            legendre,
            inverse,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn elem(&self, value: i64) -> FieldElement {
        FieldElement::reduce(value, self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.p).map(move |v| FieldElement {
            value: v,
            modulus: self.p,
        })
    }

    #[inline]
    pub fn psi(&self, a: FieldElement) -> Complex64 {
        debug_assert_eq!(a.modulus, self.p);
        self.psi[a.value as usize]
    }

    #[inline]
    pub(crate) fn psi_raw(&self, a: u32) -> Complex64 {
        self.psi[a as usize]
    }

    #[inline]
    pub fn chi_q(&self, a: FieldElement) -> i8 {
        self.legendre[a.value as usize]
    }

    #[inline]
    pub fn chi_q_raw(&self, a: u32) -> i8 {
        self.legendre[a as usize]
    }

    pub fn inverse(&self, a: FieldElement) -> Result<FieldElement, ArithError> {
        if a.value == 0 {
            return Err(ArithError::ZeroInverse);
        }
        Ok(FieldElement {
            value: self.inverse[a.value as usize],
            modulus: self.p,
        })
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// Smallest generator of F_p*.
    pub fn primitive_root(&self) -> FieldElement {
        let order = (self.p - 1) as u64;
        let factors = prime_factors(order);
        (2..self.p as u64)
            .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, self.p as u64) != 1))
            .map(|g| self.elem(g as i64))
            .unwrap_or_else(|| self.elem(1))
    }
}
