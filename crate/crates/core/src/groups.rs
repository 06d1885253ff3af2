//! The symplectic plane (F_p², ω), its Heisenberg group, SL₂(F_p) acting on
//! both, cat maps over ℤ and their Hecke tori.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_odd_prime, legendre, prime_factors, ArithError, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("enhanced Lagrangian needs a nonzero vector")]
    ZeroSigma,
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(i64),
    #[error("cat map has |trace| = {0}, need > 2 for hyperbolicity")]
    NotHyperbolic(i64),
    #[error("cannot parse matrix {0:?}: expected \"a,b;c,d\"")]
    Parse(String),
    #[error("p = {0} divides tr² - 4; the centralizer is not a torus")]
    Ramified(u32),
    #[error("cat map reduces to ±I mod {0}")]
    NonRegular(u32),
    #[error("centralizer mod {p} has {found} elements, expected {expected}")]
    TorusOrder { p: u32, found: usize, expected: usize },
    #[error("no generator found for the Hecke torus mod {0}")]
    NoGenerator(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticVector {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl SymplecticVector {
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        assert_eq!(x.modulus(), y.modulus(), "coordinates over different fields");
        SymplecticVector { x, y }
    }

    pub fn from_ints(x: i64, y: i64, p: u32) -> Self {
        SymplecticVector {
            x: FieldElement::reduce(x, p),
            y: FieldElement::reduce(y, p),
        }
    }

    pub fn zero(p: u32) -> Self {
        Self::from_ints(0, 0, p)
    }

    pub fn modulus(&self) -> u32 {
        self.x.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, a: FieldElement) -> Self {
        SymplecticVector {
            x: a * self.x,
            y: a * self.y,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SymplecticVector {
            x: self.x + other.x,
            y: self.y + other.y,
        }
    }

    pub fn neg(&self) -> Self {
        SymplecticVector { x: -self.x, y: -self.y }
    }

    /// ω(u, v) = u₁v₂ − u₂v₁.
    pub fn omega(&self, other: &Self) -> FieldElement {
        self.x * other.y - self.y * other.x
    }

    /// `Some(a)` with `other = a·self` when the two span the same line.
    pub fn ratio_to(&self, other: &Self) -> Option<FieldElement> {
        if self.is_zero() || !self.omega(other).is_zero() {
            return None;
        }
        let a = if !self.x.is_zero() {
            other.x * self.x.inverse().ok()?
        } else {
            other.y * self.y.inverse().ok()?
        };
        Some(a)
    }
}

impl fmt::Display for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Element (v, z) of the Heisenberg group with
/// (v,z)·(v′,z′) = (v+v′, z+z′+½ω(v,v′)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub v: SymplecticVector,
    pub z: FieldElement,
}

impl HeisenbergElement {
    pub fn new(v: SymplecticVector, z: FieldElement) -> Self {
        HeisenbergElement { v, z }
    }

    pub fn from_ints(a: i64, b: i64, z: i64, p: u32) -> Self {
        HeisenbergElement {
            v: SymplecticVector::from_ints(a, b, p),
            z: FieldElement::reduce(z, p),
        }
    }

    pub fn identity(p: u32) -> Self {
        Self::from_ints(0, 0, 0, p)
    }

    pub fn central(z: FieldElement) -> Self {
        HeisenbergElement {
            v: SymplecticVector::zero(z.modulus()),
            z,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        HeisenbergElement {
            v: self.v.add(&other.v),
            z: self.z + other.z + self.v.omega(&other.v).half(),
        }
    }

    pub fn inverse(&self) -> Self {
        HeisenbergElement {
            v: self.v.neg(),
            z: -self.z,
        }
    }

    /// Heisenberg elements generating the group together with the center.
    pub fn generators(p: u32) -> [Self; 2] {
        [Self::from_ints(1, 0, 0, p), Self::from_ints(0, 1, 0, p)]
    }
}

pub fn heis_mul(h1: &HeisenbergElement, h2: &HeisenbergElement) -> HeisenbergElement {
    h1.mul(h2)
}

/// An element of SL₂(F_p) = Sp(F_p², ω) acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SympMatrix {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl SympMatrix {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Result<Self, GroupError> {
        let m = SympMatrix { a, b, c, d };
        let det = m.det();
        if det.value() != 1 {
            return Err(GroupError::NotUnimodular(det.value() as i64));
        }
        Ok(m)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, p: u32) -> Result<Self, GroupError> {
        let r = |v| FieldElement::reduce(v, p);
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity(p: u32) -> Self {
        let (o, z) = (FieldElement::one(p), FieldElement::zero(p));
        SympMatrix { a: o, b: z, c: z, d: o }
    }

    pub fn modulus(&self) -> u32 {
        self.a.modulus()
    }

    pub fn det(&self) -> FieldElement {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> FieldElement {
        self.a + self.d
    }

    pub fn apply(&self, v: &SymplecticVector) -> SymplecticVector {
        SymplecticVector {
            x: self.a * v.x + self.b * v.y,
            y: self.c * v.x + self.d * v.y,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        SympMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        SympMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.modulus());
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus())
    }

    /// Automorphism (v, z) ↦ (gv, z) of the Heisenberg group.
    pub fn act(&self, h: &HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement {
            v: self.apply(&h.v),
            z: h.z,
        }
    }

    /// All of SL₂(F_p); p³ − p elements.
    pub fn enumerate(p: u32) -> Vec<SympMatrix> {
        let mut out = Vec::with_capacity((p as usize).pow(3));
        let r = |v: u32| FieldElement::reduce(v as i64, p);
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let (a, b, c, d) = (r(a), r(b), r(c), r(d));
                        if (a * d - b * c).value() == 1 {
                            out.push(SympMatrix { a, b, c, d });
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for SympMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn matrix_act(g: &SympMatrix, h: &HeisenbergElement) -> HeisenbergElement {
    g.act(h)
}

/// A hyperbolic element of SL₂(ℤ), written `"a,b;c,d"` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl CatMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, GroupError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(GroupError::NotUnimodular(det));
        }
        if (a + d).abs() <= 2 {
            return Err(GroupError::NotHyperbolic((a + d).abs()));
        }
        Ok(CatMap { a, b, c, d })
    }

    /// The standard example [[2,1],[1,1]].
    pub fn arnold() -> Self {
        CatMap { a: 2, b: 1, c: 1, d: 1 }
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn discriminant(&self) -> i64 {
        self.trace() * self.trace() - 4
    }

    pub fn reduce(&self, p: u32) -> SympMatrix {
        let r = |v| FieldElement::reduce(v, p);
        SympMatrix {
            a: r(self.a),
            b: r(self.b),
            c: r(self.c),
            d: r(self.d),
        }
    }
}

impl FromStr for CatMap {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::Parse(s.to_string());
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut vals = Vec::with_capacity(4);
        for row in rows {
            let cols: Vec<&str> = row.split(',').collect();
            if cols.len() != 2 {
                return Err(bad());
            }
            for c in cols {
                vals.push(c.trim().parse::<i64>().map_err(|_| bad())?);
            }
        }
        CatMap::new(vals[0], vals[1], vals[2], vals[3])
    }
}

impl fmt::Display for CatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusKind {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for TorusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorusKind::Split => "split",
            TorusKind::Inert => "inert",
            TorusKind::Ramified => "ramified",
        })
    }
}

/// Splitting type of tr(A)² − 4 modulo p.
pub fn classify_prime(cat: &CatMap, p: u32) -> Result<TorusKind, GroupError> {
    if !is_odd_prime(p as u64) {
        return Err(ArithError::NotOddPrime(p as u64).into());
    }
    let disc = FieldElement::reduce(cat.discriminant(), p);
    Ok(match legendre(disc) {
        0 => TorusKind::Ramified,
        1 => TorusKind::Split,
        _ => TorusKind::Inert,
    })
}

/// Enhanced Lagrangian (L, σ) in the plane: every line is Lagrangian and σ
/// is a nonzero vector on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnhancedLagrangian {
    sigma: SymplecticVector,
}

impl EnhancedLagrangian {
    pub fn new(sigma: SymplecticVector) -> Result<Self, GroupError> {
        if sigma.is_zero() {
            return Err(GroupError::ZeroSigma);
        }
        Ok(EnhancedLagrangian { sigma })
    }

    pub fn sigma(&self) -> SymplecticVector {
        self.sigma
    }

    pub fn modulus(&self) -> u32 {
        self.sigma.modulus()
    }

    pub fn same_line(&self, other: &Self) -> bool {
        self.sigma.omega(&other.sigma).is_zero()
    }

    /// a·(L, σ) = (L, a·σ).
    pub fn scaled(&self, a: FieldElement) -> Result<Self, GroupError> {
        Self::new(self.sigma.scale(a))
    }

    pub fn transform(&self, g: &SympMatrix) -> Self {
        EnhancedLagrangian {
            sigma: g.apply(&self.sigma),
        }
    }

    /// Index of this line in [`enumerate_lagrangians`] order.
    pub fn line_index(&self) -> usize {
        let p = self.modulus() as usize;
        if self.sigma.x.is_zero() {
            p
        } else {
            let slope = self.sigma.y * self.sigma.x.inverse().expect("nonzero");
            slope.value() as usize
        }
    }

    /// Short label used in reports, e.g. `1:3` or `0:1`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.sigma.x, self.sigma.y)
    }
}

impl fmt::Display for EnhancedLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L°{}", self.sigma)
    }
}

/// One enhanced Lagrangian per line: σ = (1, m) for m = 0..p−1, then (0, 1).
pub fn enumerate_lagrangians(p: u32) -> Vec<EnhancedLagrangian> {
    let mut out: Vec<_> = (0..p as i64)
        .map(|m| EnhancedLagrangian {
            sigma: SymplecticVector::from_ints(1, m, p),
        })
        .collect();
    out.push(EnhancedLagrangian {
        sigma: SymplecticVector::from_ints(0, 1, p),
    });
    out
}

/// The vertical line σ = (0, 1), used as the defining realization.
pub fn defining_lagrangian(p: u32) -> EnhancedLagrangian {
    EnhancedLagrangian {
        sigma: SymplecticVector::from_ints(0, 1, p),
    }
}

/// The centralizer of a regular cat map in SL₂(F_p), stored as powers of a
/// generator so that `elements()[j] = generator^j`.
#[derive(Debug, Clone)]
pub struct HeckeTorus {
    cat: CatMap,
    matrix: SympMatrix,
    kind: TorusKind,
    generator: SympMatrix,
    elements: Vec<SympMatrix>,
    log: HashMap<SympMatrix, usize>,
}

impl HeckeTorus {
    pub fn new(cat: &CatMap, p: u32) -> Result<Self, GroupError> {
        let kind = classify_prime(cat, p)?;
        if kind == TorusKind::Ramified {
            return Err(GroupError::Ramified(p));
        }
        let a = cat.reduce(p);
        let id = SympMatrix::identity(p);
        let minus_id = SympMatrix {
            a: -id.a,
            b: id.b,
            c: id.c,
            d: -id.d,
        };
        if a == id || a == minus_id {
            return Err(GroupError::NonRegular(p));
        }
        let expected = match kind {
            TorusKind::Split => p as usize - 1,
            _ => p as usize + 1,
        };

        // Every matrix commuting with a regular A is a polynomial xI + yA.
        let mut members = Vec::with_capacity(expected);
        for x in 0..p as i64 {
            for y in 0..p as i64 {
                let (x, y) = (FieldElement::reduce(x, p), FieldElement::reduce(y, p));
                let m = SympMatrix {
                    a: x + y * a.a,
                    b: y * a.b,
                    c: y * a.c,
                    d: x + y * a.d,
                };
                if m.det().value() == 1 {
                    members.push(m);
                }
            }
        }
        if members.len() != expected {
            return Err(GroupError::TorusOrder {
                p,
                found: members.len(),
                expected,
            });
        }

        let factors = prime_factors(expected as u64);
        let generator = members
            .iter()
            .copied()
            .find(|g| {
                g.pow(expected as u64).is_identity()
                    && factors.iter().all(|&q| !g.pow(expected as u64 / q).is_identity())
            })
            .ok_or(GroupError::NoGenerator(p))?;

        let mut elements = Vec::with_capacity(expected);
        let mut log = HashMap::with_capacity(expected);
        let mut cur = id;
        for j in 0..expected {
            log.insert(cur, j);
            elements.push(cur);
            cur = cur.mul(&generator);
        }
        if log.len() != expected || members.iter().any(|m| !log.contains_key(m)) {
            return Err(GroupError::NoGenerator(p));
        }
        Ok(HeckeTorus {
            cat: *cat,
            matrix: a,
            kind,
            generator,
            elements,
            log,
        })
    }

    pub fn cat_map(&self) -> &CatMap {
        &self.cat
    }

    /// The cat map reduced mod p.
    pub fn matrix(&self) -> &SympMatrix {
        &self.matrix
    }

    pub fn modulus(&self) -> u32 {
        self.matrix.modulus()
    }

    pub fn kind(&self) -> TorusKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generator(&self) -> &SympMatrix {
        &self.generator
    }

    pub fn elements(&self) -> &[SympMatrix] {
        &self.elements
    }

    pub fn element(&self, j: usize) -> SympMatrix {
        self.elements[j % self.elements.len()]
    }

    pub fn log(&self, g: &SympMatrix) -> Option<usize> {
        self.log.get(g).copied()
    }

    /// Lines fixed by every torus element (the two eigenlines when split).
    pub fn fixed_lines(&self) -> Vec<EnhancedLagrangian> {
        enumerate_lagrangians(self.modulus())
            .into_iter()
            .filter(|l| l.same_line(&l.transform(&self.generator)))
            .collect()
    }
}
