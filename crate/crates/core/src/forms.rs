//! Binary forms over ℚ, the dihedral group of order 8, and the lattices
//! cut out by isomorphisms between forms with that automorphism group.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{ArithError, Int, Mat2, Rat, RatMat2};
use crate::lattice::{Congruence, CongruenceSystem, Lattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("the zero form is not allowed")]
    ZeroForm,
    #[error("degree must be at least 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("forms have different degrees ({0} and {1})")]
    DegreeMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `Σ a_k X^k Y^(d−k)`, stored as `[a_d, a_(d−1), …, a_0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<Rat>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Rat>) -> Result<Self, FormError> {
        let degree = coeffs.len().saturating_sub(1);
        if degree < 3 {
            return Err(FormError::DegreeTooSmall(degree));
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(FormError::ZeroForm);
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, FormError> {
        BinaryForm::new(coeffs.iter().map(|&a| Rat::from_integer(a.into())).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `[a_d, …, a_0]`.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// The coefficient `a_k` of `X^k Y^(d−k)`.
    pub fn a(&self, k: usize) -> &Rat {
        &self.coeffs[self.degree() - k]
    }

    /// `F(aX + bY, cX + dY)`.
    pub fn act(&self, g: &RatMat2) -> BinaryForm {
        let d = self.degree();
        let first = [g.m12.clone(), g.m11.clone()];
        let second = [g.m22.clone(), g.m21.clone()];
        // ascending powers of X
        let mut acc = vec![Rat::zero(); d + 1];
        for k in 0..=d {
            let a_k = self.a(k);
            if a_k.is_zero() {
                continue;
            }
            let term = mul(&power(&first, k), &power(&second, d - k));
            for (slot, t) in acc.iter_mut().zip(term) {
                *slot += a_k * t;
            }
        }
        acc.reverse();
        BinaryForm { coeffs: acc }
    }

    pub fn is_automorphism(&self, g: &RatMat2) -> bool {
        &self.act(g) == self
    }

    /// Every element of the dihedral group of order 8 fixes the form.
    pub fn has_d4_by_matrices(&self) -> bool {
        d4_elements().iter().all(|m| self.is_automorphism(&m.to_rational()))
    }

    /// Odd-index coefficients vanish and `a_k = a_(d−k)` for every `k`.
    pub fn has_d4_by_coeffs(&self) -> bool {
        let d = self.degree();
        (0..=d).all(|k| (k % 2 == 0 || self.a(k).is_zero()) && self.a(k) == self.a(d - k))
    }

    /// No repeated linear factor over ℚ̄.
    ///
    /// A repeated factor divides both partial derivatives. A factor other
    /// than `Y` survives setting `Y = 1`, and `Y` itself survives `X = 1`.
    pub fn is_nondegenerate(&self) -> bool {
        let d = self.degree();
        // ascending powers of X after Y = 1
        let fx: Vec<Rat> = (1..=d).map(|k| self.a(k) * Rat::from_integer(k.into())).collect();
        let fy: Vec<Rat> = (0..d).map(|k| self.a(k) * Rat::from_integer((d - k).into())).collect();
        // ascending powers of Y after X = 1
        let gx: Vec<Rat> = fx.iter().rev().cloned().collect();
        let gy: Vec<Rat> = fy.iter().rev().cloned().collect();
        is_constant(&poly_gcd(fx, fy)) && is_constant(&poly_gcd(gx, gy))
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for k in (0..=d).rev() {
            let a = self.a(k);
            if a.is_zero() {
                continue;
            }
            let monomial = [("X", k), ("Y", d - k)]
                .iter()
                .filter(|(_, e)| *e > 0)
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            let sign = if a.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = a.abs();
            let body = match (mag.is_one(), monomial.is_empty()) {
                (true, false) => monomial,
                (_, true) => crate::arith::format_rat(&mag),
                (false, false) => format!("{}*{monomial}", crate::arith::format_rat(&mag)),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

fn mul(p: &[Rat], q: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn power(p: &[Rat], n: usize) -> Vec<Rat> {
    (0..n).fold(vec![Rat::one()], |acc, _| mul(&acc, p))
}

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn is_constant(p: &[Rat]) -> bool {
    p.len() == 1
}

/// Monic-free Euclid over ℚ on ascending coefficient vectors.
fn poly_gcd(a: Vec<Rat>, b: Vec<Rat>) -> Vec<Rat> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_rem(mut a: Vec<Rat>, b: &[Rat]) -> Vec<Rat> {
    let lead = b.last().expect("non-zero divisor");
    while a.len() >= b.len() {
        let q = a.last().expect("non-empty") / lead;
        let shift = a.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            a[shift + i] -= &q * c;
        }
        a = trim(a);
        if a.is_empty() {
            break;
        }
    }
    a
}

/// `A1 = [[0,1],[−1,0]]`, `A2 = [[0,1],[1,0]]`, `A3 = [[1,0],[0,−1]]`;
/// `A0` is the identity.
pub fn d4_generator(i: usize) -> Mat2 {
    match i {
        0 => Mat2::identity(),
        1 => Mat2::from_i64(0, 1, -1, 0),
        2 => Mat2::from_i64(0, 1, 1, 0),
        3 => Mat2::from_i64(1, 0, 0, -1),
        _ => panic!("no generator A{i}"),
    }
}

/// `id, A1, A2, A3, −id, −A1, −A2, −A3`.
pub fn d4_elements() -> [Mat2; 8] {
    std::array::from_fn(|i| if i < 4 { d4_generator(i) } else { -d4_generator(i - 4) })
}

/// A pair `(D, ν)` with `D | ν`, `ν ≤ D²`, `Dν > 1`; `γ = diag(D, D/ν)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaParams {
    d: Int,
    nu: Int,
}

impl GammaParams {
    pub fn new(d: Int, nu: Int) -> Result<Self, FormError> {
        let bad = |why: &str| Err(FormError::InvalidConfig(format!("(D, ν) = ({d}, {nu}): {why}")));
        if !d.is_positive() || !nu.is_positive() {
            return bad("D and ν must be positive");
        }
        if !nu.is_multiple_of(&d) {
            return bad("D must divide ν");
        }
        if nu > &d * &d {
            return bad("ν must not exceed D²");
        }
        if (&d * &nu).is_one() {
            return bad("Dν must exceed 1");
        }
        Ok(GammaParams { d, nu })
    }

    pub fn from_i64(d: i64, nu: i64) -> Result<Self, FormError> {
        GammaParams::new(d.into(), nu.into())
    }

    /// Every admissible pair with `D ≤ d_max`, in increasing order.
    pub fn all_up_to(d_max: u64) -> Vec<GammaParams> {
        (1..=d_max)
            .flat_map(|d| (1..=d).map(move |m| (d, d * m)))
            .filter_map(|(d, nu)| GammaParams::new(d.into(), nu.into()).ok())
            .collect()
    }

    pub fn d(&self) -> &Int {
        &self.d
    }

    pub fn nu(&self) -> &Int {
        &self.nu
    }

    pub fn gamma(&self) -> RatMat2 {
        RatMat2::diag(
            Rat::from_integer(self.d.clone()),
            Rat::new(self.d.clone(), self.nu.clone()),
        )
    }

    pub fn gamma_inv(&self) -> RatMat2 {
        RatMat2::diag(
            Rat::new(Int::one(), self.d.clone()),
            Rat::new(self.nu.clone(), self.d.clone()),
        )
    }
}

/// Integer matrix `T2 = [[t1,t2],[t3,t4]]`, primitive, non-singular, and
/// with its first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct T2Config {
    t: [Int; 4],
}

impl T2Config {
    pub fn new(t: [Int; 4]) -> Result<Self, FormError> {
        let bad = |why: &str| {
            let [t1, t2, t3, t4] = &t;
            Err(FormError::InvalidConfig(format!("t = ({t1}, {t2}, {t3}, {t4}): {why}")))
        };
        if !content(&t).is_one() {
            return bad("entries must be coprime");
        }
        if t.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            return bad("first nonzero entry must be positive");
        }
        if (&t[0] * &t[3] - &t[1] * &t[2]).is_zero() {
            return bad("matrix is singular");
        }
        Ok(T2Config { t })
    }

    pub fn from_i64(t: [i64; 4]) -> Result<Self, FormError> {
        T2Config::new(t.map(Int::from))
    }

    /// Divides out the content and fixes the sign, then validates.
    pub fn normalized(t: [Int; 4]) -> Result<Self, FormError> {
        let g = content(&t);
        if g.is_zero() {
            return Err(FormError::InvalidConfig("t = (0, 0, 0, 0)".into()));
        }
        let sign = if t.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            -Int::one()
        } else {
            Int::one()
        };
        T2Config::new(t.map(|x| x / &g * &sign))
    }

    pub fn t(&self) -> &[Int; 4] {
        &self.t
    }

    pub fn matrix(&self) -> Mat2 {
        let [t1, t2, t3, t4] = self.t.clone();
        Mat2::new(t1, t2, t3, t4)
    }

    /// `|t1·t4 − t2·t3|`.
    pub fn d2(&self) -> Int {
        self.matrix().det().abs()
    }

    /// `T2⁻¹·A_i·T2` for `i` in `0..4`.
    pub fn sigma(&self, i: usize) -> RatMat2 {
        let t = self.matrix().to_rational();
        let inv = t.inverse().expect("non-singular");
        &(&inv * &d4_generator(i).to_rational()) * &t
    }

    /// The four coset representatives `σ_0 = id, σ_1, σ_2, σ_3`.
    pub fn sigma_set(&self) -> [RatMat2; 4] {
        std::array::from_fn(|i| self.sigma(i))
    }
}

impl fmt::Display for T2Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [t1, t2, t3, t4] = &self.t;
        write!(f, "({t1},{t2},{t3},{t4})")
    }
}

fn content(t: &[Int; 4]) -> Int {
    t.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

fn check_index(i: usize) -> Result<(), FormError> {
    if i < 4 {
        Ok(())
    } else {
        Err(FormError::InvalidConfig(format!("σ index {i} is not in 0..4")))
    }
}

/// The closed-form congruence system of `Λ(σ_i)` for any integer `T2`.
///
/// For `σ_0` the rows are `x1 ≡ 0` and `ν·x2 ≡ 0 (mod D)`. For the others
/// both rows are taken modulo `|det T2|·D`, the second scaled by `ν`.
pub fn sigma_congruences(p: &GammaParams, t: &[Int; 4], i: usize) -> Result<CongruenceSystem, FormError> {
    check_index(i)?;
    let [t1, t2, t3, t4] = t;
    let two = Int::from(2);
    let (d, nu) = (p.d(), p.nu());
    let rows = if i == 0 {
        [(Int::one(), Int::zero()), (Int::zero(), nu.clone())]
    } else {
        let ((a, b), (c, e)) = match i {
            1 => ((t1 * t2 + t3 * t4, t2 * t2 + t4 * t4), (t1 * t1 + t3 * t3, t1 * t2 + t3 * t4)),
            2 => ((t3 * t4 - t1 * t2, t4 * t4 - t2 * t2), (t1 * t1 - t3 * t3, t1 * t2 - t3 * t4)),
            _ => ((t2 * t3 + t1 * t4, &two * t2 * t4), (&two * t1 * t3, t2 * t3 + t1 * t4)),
        };
        [(a, b), (nu * c, nu * e)]
    };
    let modulus = if i == 0 { d.clone() } else { (t1 * t4 - t2 * t3).abs() * d };
    let rows = rows
        .into_iter()
        .map(|(a, b)| Congruence::new(a, b, modulus.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CongruenceSystem::new(rows)?)
}

/// `Λ(σ_i)` from its closed-form congruence system.
pub fn lambda_sigma_explicit(p: &GammaParams, t: &T2Config, i: usize) -> Result<Lattice, FormError> {
    Ok(Lattice::from_congruences(&sigma_congruences(p, t.t(), i)?))
}

/// `Λ(σ_i) = L(γ⁻¹·σ_i)` computed from the matrix itself.
pub fn lambda_sigma_generic(p: &GammaParams, t: &T2Config, i: usize) -> Result<Lattice, FormError> {
    check_index(i)?;
    Ok(Lattice::from_matrix(&(&p.gamma_inv() * &t.sigma(i)))?)
}

/// Which side of `γ` an isomorphism sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsomTag {
    /// `γ⁻¹·σ_i`
    Left(usize),
    /// `σ_i·γ`
    Right(usize),
}

impl fmt::Display for IsomTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsomTag::Left(i) => write!(f, "inv(gamma)*sigma{i}"),
            IsomTag::Right(i) => write!(f, "sigma{i}*gamma"),
        }
    }
}

/// The lattices `L(γ⁻¹σ)` and `L(σγ)` for the four coset representatives.
/// Signs are dropped since `L(τ) = L(−τ)`.
pub fn isom_index_family(p: &GammaParams, t: &T2Config) -> Result<Vec<(IsomTag, Lattice)>, FormError> {
    let sigmas = t.sigma_set();
    let (g, g_inv) = (p.gamma(), p.gamma_inv());
    let left = sigmas
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((IsomTag::Left(i), Lattice::from_matrix(&(&g_inv * s))?)));
    let right = sigmas
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((IsomTag::Right(i), Lattice::from_matrix(&(s * &g))?)));
    left.chain(right).collect()
}

/// First unimodular `γ` with entries in `[−bound, bound]` and `F∘γ = G`.
///
/// Absence in the box proves nothing beyond the box.
pub fn search_gl2z_equivalence(f: &BinaryForm, g: &BinaryForm, bound: u32) -> Result<Option<Mat2>, FormError> {
    if f.degree() != g.degree() {
        return Err(FormError::DegreeMismatch(f.degree(), g.degree()));
    }
    let b = i64::from(bound);
    for a in -b..=b {
        for bb in -b..=b {
            for c in -b..=b {
                for d in -b..=b {
                    if (a * d - bb * c).abs() != 1 {
                        continue;
                    }
                    let m = Mat2::from_i64(a, bb, c, d);
                    if &f.act(&m.to_rational()) == g {
                        return Ok(Some(m));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn lat(a: i64, c: i64, b: i64) -> Lattice {
        Lattice::from_triple(a, c, b).unwrap()
    }

    fn ints(t: [i64; 4]) -> T2Config {
        T2Config::from_i64(t).unwrap()
    }

    #[test]
    fn construction_rejects_bad_forms() {
        assert_eq!(BinaryForm::from_i64(&[1, 0, 1]), Err(FormError::DegreeTooSmall(2)));
        assert_eq!(BinaryForm::from_i64(&[0, 0, 0, 0]), Err(FormError::ZeroForm));
    }

    #[test]
    fn action_examples() {
        let quartic = form(&[1, 0, 0, 0, 1]);
        assert_eq!(quartic.act(&d4_generator(2).to_rational()), quartic);
        let shear = Mat2::from_i64(1, 1, 0, 1).to_rational();
        assert_eq!(form(&[1, 0, 0, 0, 0]).act(&shear), form(&[1, 4, 6, 4, 1]));
        let half = RatMat2::from_ratios([(1, 2), (0, 1), (0, 1), (1, 1)]);
        let expect = BinaryForm::new(vec![
            Rat::new(1.into(), 16.into()),
            Rat::zero(),
            Rat::zero(),
            Rat::zero(),
            Rat::one(),
        ])
        .unwrap();
        assert_eq!(quartic.act(&half), expect);
    }

    #[test]
    fn automorphism_examples() {
        let quartic = form(&[1, 0, 0, 0, 1]);
        assert!(quartic.is_automorphism(&d4_generator(1).to_rational()));
        assert!(!form(&[1, 1, 0, 0, 0]).is_automorphism(&d4_generator(2).to_rational()));
        assert!(form(&[1, 0, 5, 0, 5, 0, 1]).has_d4_by_matrices());
        assert!(quartic.has_d4_by_coeffs());
        assert!(!form(&[1, 1, 0, 0, 0]).has_d4_by_coeffs());
        assert!(form(&[1, 0, 3, 0, 1]).has_d4_by_coeffs());
        assert!(form(&[1, 0, 3, 0, 1]).has_d4_by_matrices());
    }

    #[test]
    fn d4_is_a_group_of_small_orders() {
        let els = d4_elements();
        for x in &els {
            for y in &els {
                assert!(els.contains(&(x * y)));
            }
            let order = (1..=4).find(|&n| (0..n).fold(Mat2::identity(), |acc, _| &acc * x) == Mat2::identity());
            assert!(matches!(order, Some(1 | 2 | 4)));
        }
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(form(&[1, 0, 0, 0, 1]).is_nondegenerate());
        assert!(!form(&[0, 1, 0, 0, 0]).is_nondegenerate());
        assert!(!form(&[1, 0, 2, 0, 1]).is_nondegenerate());
        assert!(!form(&[0, 0, 0, 1]).is_nondegenerate());
        assert!(form(&[1, 0, 0, -1]).is_nondegenerate());
        assert!(!form(&[1, 0, 0, 0]).is_nondegenerate());
    }

    #[test]
    fn display_renders_polynomial_text() {
        assert_eq!(form(&[1, 0, 0, 0, 1]).to_string(), "X^4 + Y^4");
        assert_eq!(form(&[2, -1, 0, 0, -3]).to_string(), "2*X^4 - X^3*Y - 3*Y^4");
    }

    #[test]
    fn gamma_params_validation() {
        assert!(GammaParams::from_i64(1, 1).is_err());
        assert!(GammaParams::from_i64(2, 3).is_err());
        assert!(GammaParams::from_i64(2, 8).is_err());
        assert!(GammaParams::from_i64(2, 2).is_ok());
        let pairs: Vec<(i64, i64)> = GammaParams::all_up_to(4)
            .iter()
            .map(|p| (p.d().try_into().unwrap(), p.nu().try_into().unwrap()))
            .collect();
        assert_eq!(
            pairs,
            vec![(2, 2), (2, 4), (3, 3), (3, 6), (3, 9), (4, 4), (4, 8), (4, 12), (4, 16)]
        );
    }

    #[test]
    fn t2_validation_and_normalization() {
        assert!(T2Config::from_i64([1, 1, 1, 1]).is_err());
        assert!(T2Config::from_i64([2, 0, 0, 2]).is_err());
        assert!(T2Config::from_i64([-1, 0, 0, 1]).is_err());
        let t = T2Config::normalized([-2, 0, 4, 6].map(Int::from)).unwrap();
        assert_eq!(t, ints([1, 0, -2, -3]));
        assert_eq!(t.d2(), Int::from(3));
    }

    #[test]
    fn lambda_examples() {
        let p = GammaParams::from_i64(2, 2).unwrap();
        let t = ints([1, 0, 0, 1]);
        assert_eq!(lambda_sigma_explicit(&p, &t, 0).unwrap(), lat(2, 0, 1));
        assert_eq!(lambda_sigma_explicit(&p, &t, 1).unwrap(), lat(1, 0, 2));
        assert_eq!(lambda_sigma_explicit(&p, &t, 3).unwrap(), lat(2, 0, 1));
        assert_eq!(lambda_sigma_generic(&p, &t, 1).unwrap(), lat(1, 0, 2));
        let p4 = GammaParams::from_i64(2, 4).unwrap();
        assert_eq!(lambda_sigma_generic(&p4, &t, 0).unwrap(), lat(2, 0, 1));
        assert!(lambda_sigma_explicit(&p, &t, 4).is_err());
    }

    #[test]
    fn isom_family_examples() {
        let t = ints([1, 0, 0, 1]);
        let index_of_gamma = |p: &GammaParams| {
            isom_index_family(p, &t)
                .unwrap()
                .into_iter()
                .find(|(tag, _)| *tag == IsomTag::Right(0))
                .unwrap()
                .1
                .index()
        };
        assert_eq!(index_of_gamma(&GammaParams::from_i64(2, 2).unwrap()), Int::from(1));
        assert_eq!(index_of_gamma(&GammaParams::from_i64(2, 4).unwrap()), Int::from(2));
    }

    #[test]
    fn equivalence_search_examples() {
        let quartic = form(&[1, 0, 0, 0, 1]);
        let found = search_gl2z_equivalence(&quartic, &quartic, 1).unwrap().unwrap();
        assert!(quartic.is_automorphism(&found.to_rational()));
        let shear = Mat2::from_i64(1, 0, 1, 1);
        let image = quartic.act(&shear.to_rational());
        let found = search_gl2z_equivalence(&quartic, &image, 2).unwrap().unwrap();
        assert_eq!(quartic.act(&found.to_rational()), image);
        assert_eq!(search_gl2z_equivalence(&quartic, &form(&[1, 0, 0, 0, 2]), 3).unwrap(), None);
        assert!(search_gl2z_equivalence(&quartic, &form(&[1, 0, 0, 1]), 1).is_err());
    }
}
