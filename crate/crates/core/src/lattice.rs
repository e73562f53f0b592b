//! Rank-2 sublattices of ℤ² in Hermite normal form.
//!
//! Every lattice `L` is stored as the triple `(a, c, b)` with basis columns
//! `(a, c)ᵀ` and `(0, b)ᵀ`: `aℤ` is the projection of `L` on the first
//! coordinate, `L ∩ ({0}×ℤ) = {0}×bℤ`, and `0 ≤ c < b`. The triple is unique
//! per point set, so structural equality is set equality.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{crt_pair, extended_gcd, Int, Mat2, RatMat2, Vec2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("generators span a subgroup of rank < 2")]
    RankDeficient,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid lattice triple: {0}")]
    InvalidTriple(String),
    #[error("congruence system has no rows")]
    EmptySystem,
    #[error("congruence modulus must be >= 1, got {0}")]
    InvalidModulus(String),
    #[error("transform is not unimodular")]
    NotUnimodular,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    a: Int,
    c: Int,
    b: Int,
}

impl Lattice {
    /// Checked constructor from an already-canonical triple.
    pub fn new(a: Int, c: Int, b: Int) -> Result<Self, LatticeError> {
        if a < Int::one() || b < Int::one() || c.is_negative() || c >= b {
            return Err(LatticeError::InvalidTriple(format!("a={a}, c={c}, b={b}")));
        }
        Ok(Lattice { a, c, b })
    }

    pub fn from_triple(a: i64, c: i64, b: i64) -> Result<Self, LatticeError> {
        Lattice::new(a.into(), c.into(), b.into())
    }

    /// ℤ² itself.
    pub fn full() -> Self {
        Lattice { a: Int::one(), c: Int::zero(), b: Int::one() }
    }

    /// `nℤ²`.
    pub fn scaled_full(n: &Int) -> Self {
        let n = n.abs();
        Lattice { a: n.clone(), c: Int::zero(), b: n }
    }

    pub fn a(&self) -> &Int {
        &self.a
    }

    pub fn b(&self) -> &Int {
        &self.b
    }

    pub fn c(&self) -> &Int {
        &self.c
    }

    pub fn index(&self) -> Int {
        &self.a * &self.b
    }

    pub fn is_full(&self) -> bool {
        self.a.is_one() && self.b.is_one()
    }

    /// Canonical basis columns `(a, c)ᵀ`, `(0, b)ᵀ`.
    pub fn basis(&self) -> [Vec2; 2] {
        [
            Vec2::new(self.a.clone(), self.c.clone()),
            Vec2::new(Int::zero(), self.b.clone()),
        ]
    }

    /// Subgroup generated by `vs`.
    pub fn from_generators<'a, I>(vs: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = &'a Vec2>,
    {
        let mut acc = HnfAccumulator::new();
        for v in vs {
            acc.push(v);
        }
        acc.finish()
    }

    /// Solution set of a system of linear congruences.
    pub fn from_congruences(sys: &CongruenceSystem) -> Self {
        sys.rows
            .iter()
            .map(Congruence::solutions)
            .reduce(|l, r| l.intersect(&r))
            .expect("congruence systems are non-empty")
    }

    /// `L(γ) = {x ∈ ℤ² : γx ∈ ℤ²}`.
    ///
    /// Each row of `γ` is brought to a common denominator `m`, giving the
    /// congruence `α x1 + β x2 ≡ 0 (mod m)`.
    pub fn from_matrix(g: &RatMat2) -> Result<Self, LatticeError> {
        if g.det().is_zero() {
            return Err(LatticeError::SingularMatrix);
        }
        let row = |p: &crate::Rat, q: &crate::Rat| {
            let m = p.denom().lcm(q.denom());
            Congruence {
                alpha: p.numer() * (&m / p.denom()),
                beta: q.numer() * (&m / q.denom()),
                modulus: m,
            }
        };
        let sys = CongruenceSystem {
            rows: vec![row(&g.m11, &g.m12), row(&g.m21, &g.m22)],
        };
        Ok(Lattice::from_congruences(&sys))
    }

    /// Membership: `a | x1` and `x2 ≡ (x1/a)·c (mod b)`.
    pub fn contains(&self, x: &Vec2) -> bool {
        if !x.x1.is_multiple_of(&self.a) {
            return false;
        }
        let s = &x.x1 / &self.a;
        (&x.x2 - s * &self.c).is_multiple_of(&self.b)
    }

    /// `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let l = self.a.lcm(&other.a);
        let s1 = &l / &self.a;
        let s2 = &l / &other.a;
        // x1 = k·l is admissible iff the two x2-cosets meet, i.e.
        // k·(s1·c1 − s2·c2) ≡ 0 mod gcd(b1, b2).
        let g = self.b.gcd(&other.b);
        let delta = &s1 * &self.c - &s2 * &other.c;
        let k = &g / delta.gcd(&g);
        let r1 = (&k * &s1 * &self.c).mod_floor(&self.b);
        let r2 = (&k * &s2 * &other.c).mod_floor(&other.b);
        let (c, b) = crt_pair(&r1, &self.b, &r2, &other.b)
            .expect("compatibility was enforced by the choice of k");
        Lattice { a: k * l, c, b }
    }

    /// Smallest lattice containing both.
    pub fn join(&self, other: &Lattice) -> Lattice {
        let [u1, v1] = self.basis();
        let [u2, v2] = other.basis();
        Lattice::from_generators([&u1, &v1, &u2, &v2]).expect("join of lattices has rank 2")
    }

    /// Image `U·L` under a unimodular integer matrix.
    pub fn transform(&self, u: &Mat2) -> Result<Lattice, LatticeError> {
        if !u.is_unimodular() {
            return Err(LatticeError::NotUnimodular);
        }
        let imgs = self.basis().map(|v| u.apply(&v));
        Lattice::from_generators(&imgs)
    }

    /// Two congruences cutting out this lattice:
    /// `x1 ≡ 0 (mod a)` and `−c·x1 + a·x2 ≡ 0 (mod ab)`.
    pub fn to_congruences(&self) -> CongruenceSystem {
        CongruenceSystem {
            rows: vec![
                Congruence { alpha: Int::one(), beta: Int::zero(), modulus: self.a.clone() },
                Congruence { alpha: -self.c.clone(), beta: self.a.clone(), modulus: self.index() },
            ],
        }
    }

    /// All lattices of index `n`, in the total order. There are `σ(n)`.
    pub fn all_of_index(n: u64) -> Vec<Lattice> {
        let mut out = Vec::new();
        for a in 1..=n {
            if !n.is_multiple_of(a) {
                continue;
            }
            let b = n / a;
            for c in 0..b {
                out.push(Lattice { a: a.into(), c: c.into(), b: b.into() });
            }
        }
        out.sort();
        out
    }
}

impl Ord for Lattice {
    /// Lexicographic on `(index, a, c, b)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.index()
            .cmp(&other.index())
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.c.cmp(&other.c))
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl PartialOrd for Lattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lattice {
    /// Bracket notation `[[a,0],[c,b]]`: columns `(a, c)ᵀ` and `(0, b)ᵀ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},0],[{},{}]]", self.a, self.c, self.b)
    }
}

/// Incremental 2D Hermite reduction: `first = (a, c)` generates the first
/// projection, `kernel` is the generator `b` of the x2-axis part.
struct HnfAccumulator {
    a: Int,
    c: Int,
    b: Int,
}

impl HnfAccumulator {
    fn new() -> Self {
        HnfAccumulator { a: Int::zero(), c: Int::zero(), b: Int::zero() }
    }

    fn push(&mut self, w: &Vec2) {
        let (g, u, v) = extended_gcd(&self.a, &w.x1);
        if g.is_zero() {
            // both first coordinates vanish: pure kernel contribution
            self.b = self.b.gcd(&w.x2);
            return;
        }
        // new first generator u·(a, c) + v·w has first coordinate g
        let new_c = &u * &self.c + &v * &w.x2;
        // (w1/g)·(a, c) − (a/g)·w lies on the x2-axis
        let kern = (&w.x1 / &g) * &self.c - (&self.a / &g) * &w.x2;
        self.b = self.b.gcd(&kern);
        self.a = g;
        self.c = if self.b.is_zero() { new_c } else { new_c.mod_floor(&self.b) };
    }

    fn finish(self) -> Result<Lattice, LatticeError> {
        if self.a.is_zero() || self.b.is_zero() {
            return Err(LatticeError::RankDeficient);
        }
        let c = self.c.mod_floor(&self.b);
        Ok(Lattice { a: self.a, c, b: self.b })
    }
}

/// One row `α·x1 + β·x2 ≡ 0 (mod m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Congruence {
    pub alpha: Int,
    pub beta: Int,
    pub modulus: Int,
}

impl Congruence {
    pub fn new(alpha: Int, beta: Int, modulus: Int) -> Result<Self, LatticeError> {
        if modulus < Int::one() {
            return Err(LatticeError::InvalidModulus(modulus.to_string()));
        }
        Ok(Congruence { alpha, beta, modulus })
    }

    pub fn from_i64(alpha: i64, beta: i64, modulus: i64) -> Result<Self, LatticeError> {
        Congruence::new(alpha.into(), beta.into(), modulus.into())
    }

    pub fn is_vacuous(&self) -> bool {
        self.alpha.is_multiple_of(&self.modulus) && self.beta.is_multiple_of(&self.modulus)
    }

    /// Solution lattice, generated by `(m,0)`, `(0,m)`, the integer kernel
    /// direction `(β, −α)/g` and the Bézout point scaled to hit `mℤ`.
    fn solutions(&self) -> Lattice {
        let m = &self.modulus;
        let alpha = self.alpha.mod_floor(m);
        let beta = self.beta.mod_floor(m);
        let (g, u, v) = extended_gcd(&alpha, &beta);
        if g.is_zero() {
            return Lattice::full();
        }
        let t = m / g.gcd(m);
        let gens = [
            Vec2::new(m.clone(), Int::zero()),
            Vec2::new(Int::zero(), m.clone()),
            Vec2::new(&beta / &g, -(&alpha / &g)),
            Vec2::new(u * &t, v * &t),
        ];
        Lattice::from_generators(&gens).expect("contains mℤ²")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruenceSystem {
    rows: Vec<Congruence>,
}

impl CongruenceSystem {
    pub fn new(rows: Vec<Congruence>) -> Result<Self, LatticeError> {
        if rows.is_empty() {
            return Err(LatticeError::EmptySystem);
        }
        Ok(CongruenceSystem { rows })
    }

    pub fn from_i64(rows: &[(i64, i64, i64)]) -> Result<Self, LatticeError> {
        let rows = rows
            .iter()
            .map(|&(a, b, m)| Congruence::from_i64(a, b, m))
            .collect::<Result<Vec<_>, _>>()?;
        CongruenceSystem::new(rows)
    }

    pub fn rows(&self) -> &[Congruence] {
        &self.rows
    }
}
