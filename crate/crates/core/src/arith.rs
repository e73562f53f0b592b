//! Exact scalar and 2×2 matrix arithmetic.
//!
//! The matrix and vector types are generic over the scalar ring; the crate
//! root fixes the two instantiations used everywhere else: [`Int`]
//! (arbitrary-precision integers) and [`Rat`] (normalized fractions).
//! Vectors are columns and matrices act on the left, so `M·(x1, x2)ᵀ`
//! corresponds to the substitution `F(m11 X + m12 Y, m21 X + m22 Y)`.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer.
pub type Int = BigInt;
/// Exact rational in lowest terms with positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("{0} is not a prime")]
    InvalidPrime(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

/// Column vector `(x1, x2)ᵀ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector2<T> {
    pub x1: T,
    pub x2: T,
}

impl<T> Vector2<T> {
    pub const fn new(x1: T, x2: T) -> Self {
        Vector2 { x1, x2 }
    }
}

impl Vector2<Int> {
    pub fn from_i64(x1: i64, x2: i64) -> Self {
        Vector2::new(Int::from(x1), Int::from(x2))
    }
}

impl<T: fmt::Display> fmt::Display for Vector2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x1, self.x2)
    }
}

/// 2×2 matrix, row-major fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix2<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

impl<T> Matrix2<T> {
    pub const fn new(m11: T, m12: T, m21: T, m22: T) -> Self {
        Matrix2 { m11, m12, m21, m22 }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Matrix2<U> {
        Matrix2::new(f(&self.m11), f(&self.m12), f(&self.m21), f(&self.m22))
    }

    pub fn rows(&self) -> [[&T; 2]; 2] {
        [[&self.m11, &self.m12], [&self.m21, &self.m22]]
    }
}

impl<T: Clone + Zero + One> Matrix2<T> {
    pub fn identity() -> Self {
        Matrix2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn diag(d1: T, d2: T) -> Self {
        Matrix2::new(d1, T::zero(), T::zero(), d2)
    }
}

impl<T> Matrix2<T>
where
    T: Clone + Zero + One + Mul<Output = T> + std::ops::Sub<Output = T>,
{
    pub fn det(&self) -> T {
        self.m11.clone() * self.m22.clone() - self.m12.clone() * self.m21.clone()
    }

    pub fn apply(&self, v: &Vector2<T>) -> Vector2<T> {
        Vector2::new(
            self.m11.clone() * v.x1.clone() + self.m12.clone() * v.x2.clone(),
            self.m21.clone() * v.x1.clone() + self.m22.clone() * v.x2.clone(),
        )
    }

    pub fn transpose(&self) -> Self {
        Matrix2::new(self.m11.clone(), self.m21.clone(), self.m12.clone(), self.m22.clone())
    }
}

impl<T: Clone + Neg<Output = T>> Matrix2<T> {
    /// `[[d, -b], [-c, a]]`, so that `M · adj(M) = det(M) · id`.
    pub fn adjugate(&self) -> Self {
        Matrix2::new(
            self.m22.clone(),
            -self.m12.clone(),
            -self.m21.clone(),
            self.m11.clone(),
        )
    }
}

impl<T: Clone + Neg<Output = T>> Neg for Matrix2<T> {
    type Output = Matrix2<T>;
    fn neg(self) -> Self::Output {
        Matrix2::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

impl<T: Clone + Neg<Output = T>> Neg for &Matrix2<T> {
    type Output = Matrix2<T>;
    fn neg(self) -> Self::Output {
        -self.clone()
    }
}

impl<T> Mul for &Matrix2<T>
where
    T: Clone + Mul<Output = T> + std::ops::Add<Output = T>,
{
    type Output = Matrix2<T>;
    fn mul(self, rhs: &Matrix2<T>) -> Matrix2<T> {
        let dot = |a: &T, b: &T, c: &T, d: &T| a.clone() * b.clone() + c.clone() * d.clone();
        Matrix2::new(
            dot(&self.m11, &rhs.m11, &self.m12, &rhs.m21),
            dot(&self.m11, &rhs.m12, &self.m12, &rhs.m22),
            dot(&self.m21, &rhs.m11, &self.m22, &rhs.m21),
            dot(&self.m21, &rhs.m12, &self.m22, &rhs.m22),
        )
    }
}

impl<T> Mul for Matrix2<T>
where
    T: Clone + Mul<Output = T> + std::ops::Add<Output = T>,
{
    type Output = Matrix2<T>;
    fn mul(self, rhs: Matrix2<T>) -> Matrix2<T> {
        &self * &rhs
    }
}

impl<T: Clone + Integer + Signed> Matrix2<Ratio<T>> {
    /// Exact inverse over the rationals.
    pub fn inverse(&self) -> Result<Self, ArithError> {
        let det = self.det();
        if det.is_zero() {
            return Err(ArithError::SingularMatrix);
        }
        let inv = det.recip();
        Ok(self.adjugate().map(|x| x.clone() * inv.clone()))
    }

    pub fn is_integral(&self) -> bool {
        [&self.m11, &self.m12, &self.m21, &self.m22]
            .iter()
            .all(|x| x.is_integer())
    }

    /// The integer matrix with the same entries, if every entry is integral.
    pub fn to_integer(&self) -> Option<Matrix2<T>> {
        if self.is_integral() {
            Some(self.map(|x| x.to_integer()))
        } else {
            None
        }
    }

    /// True iff every entry is an integer and the determinant is ±1.
    pub fn is_gl2z(&self) -> bool {
        self.is_integral() && self.det().abs().is_one()
    }
}

impl<T: Clone + Integer> Matrix2<T> {
    pub fn to_rational(&self) -> Matrix2<Ratio<T>> {
        self.map(|x| Ratio::from_integer(x.clone()))
    }
}

impl Matrix2<Int> {
    pub fn from_i64(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        Matrix2::new(m11.into(), m12.into(), m21.into(), m22.into())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }
}

impl Matrix2<Rat> {
    pub fn from_ratios(entries: [(i64, i64); 4]) -> Self {
        let r = |(p, q): (i64, i64)| Rat::new(p.into(), q.into());
        Matrix2::new(r(entries[0]), r(entries[1]), r(entries[2]), r(entries[3]))
    }
}

impl<T: fmt::Display> fmt::Display for Matrix2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.m11, self.m12, self.m21, self.m22
        )
    }
}

pub type Vec2 = Vector2<Int>;
pub type Mat2 = Matrix2<Int>;
pub type RatMat2 = Matrix2<Rat>;

/// Exact determinant of a rational matrix.
pub fn det(m: &RatMat2) -> Rat {
    m.det()
}

/// Exact inverse of a rational matrix.
pub fn inverse(m: &RatMat2) -> Result<RatMat2, ArithError> {
    m.inverse()
}

pub fn is_gl2z(m: &RatMat2) -> bool {
    m.is_gl2z()
}

/// `(g, u, v)` with `g = gcd(a, b) ≥ 0` and `u·a + v·b = g`.
///
/// `(0, 0)` maps to `(0, 0, 0)`. The Bézout pair is whatever the Euclidean
/// recursion produces; callers should only rely on the identity.
pub fn extended_gcd<T: Clone + Integer + Signed>(a: &T, b: &T) -> (T, T, T) {
    if a.is_zero() && b.is_zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Solve `x ≡ r1 (mod m1)`, `x ≡ r2 (mod m2)`; `None` when incompatible.
/// The result is reduced into `[0, lcm(m1, m2))`.
pub fn crt_pair<T: Clone + Integer + Signed>(r1: &T, m1: &T, r2: &T, m2: &T) -> Option<(T, T)> {
    let (g, u, _) = extended_gcd(m1, m2);
    let diff = r2.clone() - r1.clone();
    if !diff.is_multiple_of(&g) {
        return None;
    }
    let m2g = m2.clone() / g.clone();
    let lcm = m1.clone() * m2g.clone();
    let k = (diff / g * u).mod_floor(&m2g);
    let x = (r1.clone() + m1.clone() * k).mod_floor(&lcm);
    Some((x, lcm))
}

/// p-adic valuation; `v_p(0) = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinite => None,
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(e) => write!(f, "{e}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Trial-division primality test.
pub fn is_prime<T: Clone + Integer>(n: &T) -> bool {
    let two = T::one() + T::one();
    if *n < two {
        return false;
    }
    let mut d = two;
    while d.clone() * d.clone() <= *n {
        if n.is_multiple_of(&d) {
            return false;
        }
        d = d + T::one();
    }
    true
}

pub fn valuation<T>(n: &T, p: &T) -> Result<Valuation, ArithError>
where
    T: Clone + Integer + Signed + fmt::Display,
{
    if !is_prime(p) {
        return Err(ArithError::InvalidPrime(p.to_string()));
    }
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let mut m = n.abs();
    let mut e = 0;
    while m.is_multiple_of(p) {
        m = m / p.clone();
        e += 1;
    }
    Ok(Valuation::Finite(e))
}

/// 2-adic valuation, the only one the dihedral analysis needs.
pub fn v2(n: &Int) -> Valuation {
    if n.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(n.trailing_zeros().unwrap_or(0) as u32)
    }
}

/// Rational from `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, ArithError> {
    let t = s.trim();
    let err = || ArithError::ParseRational(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| err())?;
            let q: Int = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(t.parse().map_err(|_| err())?)),
    }
}

/// Canonical `"p/q"` rendering; integers render without the denominator.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}
