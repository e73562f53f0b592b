//! Seeded randomized checks of the lattice identities the D4 argument
//! relies on, plus the exhaustive antidiagonal check.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{v2, Int, Rat, RatMat2};
use crate::d4::verify_antidiagonal;
use crate::forms::{
    lambda_sigma_explicit, lambda_sigma_generic, BinaryForm, GammaParams, T2Config,
};
use crate::lattice::{Congruence, CongruenceSystem, Lattice};

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub samples: u64,
    pub seed: u64,
    pub primes: Vec<u64>,
    /// Bound on `|t_i|` for sampled `T2` matrices.
    pub t_bound: i64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { samples: 10_000, seed: 2024, primes: vec![3, 5, 7, 11, 13], t_bound: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.samples > 0
    }
}

struct Tally {
    name: &'static str,
    samples: u64,
    failures: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, samples: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
            self.first_failure.get_or_insert_with(describe);
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            samples: self.samples,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

/// A non-singular rational matrix with small numerators and denominators.
pub fn random_rat_matrix(rng: &mut impl Rng) -> RatMat2 {
    loop {
        let mut entry = || Rat::new(rng.gen_range(-30..=30).into(), rng.gen_range(1..=12).into());
        let m = RatMat2::new(entry(), entry(), entry(), entry());
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// An admissible `(D, ν)` with `D ≤ d_max` and a valid normalized `T2`.
pub fn random_config(rng: &mut impl Rng, d_max: i64, t_bound: i64) -> (GammaParams, T2Config) {
    let d = rng.gen_range(2..=d_max);
    let nu = d * rng.gen_range(1..=d);
    let params = GammaParams::from_i64(d, nu).expect("admissible by construction");
    loop {
        let t: [Int; 4] = std::array::from_fn(|_| rng.gen_range(-t_bound..=t_bound).into());
        if let Ok(t2) = T2Config::normalized(t) {
            return (params, t2);
        }
    }
}

/// `[ℤ² : L(γ)]·|det γ|` is a positive integer.
pub fn index_det_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut rng = rng_for(opts.seed, 1);
    let mut tally = Tally::new("index-times-det");
    for _ in 0..opts.samples {
        let g = random_rat_matrix(&mut rng);
        let l = Lattice::from_matrix(&g).expect("non-singular");
        let product = Rat::from_integer(l.index()) * g.det().abs();
        tally.record(product.is_integer() && product.is_positive(), || {
            format!("gamma={g}: index {} times |det| = {product}", l.index())
        });
    }
    tally.finish()
}

/// `v2(α) < v2(β)` and `v2(α) < v2(m)` force `αx1 + βx2 ≡ 0 (mod m)` into
/// `{x1 even}`.
pub fn two_adic_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut rng = rng_for(opts.seed, 2);
    let mut tally = Tally::new("two-adic-inclusion");
    let even = Lattice::from_triple(2, 0, 1).expect("valid");
    for _ in 0..opts.samples {
        let k: u32 = rng.gen_range(0..=5);
        let odd = |rng: &mut ChaCha8Rng| Int::from(2 * rng.gen_range(-50i64..=50) + 1);
        let alpha = odd(&mut rng) << k;
        let beta = if rng.gen_bool(0.1) {
            Int::zero()
        } else {
            Int::from(rng.gen_range(-50i64..=50)) << (k + 1)
        };
        let m = Int::from(rng.gen_range(1i64..=50)) << (k + 1);
        debug_assert!(v2(&alpha) < v2(&beta) && v2(&alpha) < v2(&m));
        let row = Congruence::new(alpha.clone(), beta.clone(), m.clone()).expect("positive modulus");
        let l = Lattice::from_congruences(&CongruenceSystem::new(vec![row]).expect("one row"));
        tally.record(l.is_sublattice_of(&even), || {
            format!("{alpha}*x1 + {beta}*x2 = 0 mod {m} gives {l}")
        });
    }
    tally.finish()
}

/// The closed-form systems for `Λ(σ)` agree with `L(γ⁻¹σ)`.
pub fn dual_path_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut rng = rng_for(opts.seed, 3);
    let mut tally = Tally::new("dual-path-lambda");
    for _ in 0..opts.samples {
        let (p, t) = random_config(&mut rng, 8, opts.t_bound);
        let bad = (0..4).find(|&i| {
            lambda_sigma_explicit(&p, &t, i).expect("valid")
                != lambda_sigma_generic(&p, &t, i).expect("valid")
        });
        tally.record(bad.is_none(), || {
            format!("D={} nu={} t={t}: sigma{} differs", p.d(), p.nu(), bad.unwrap_or(0))
        });
    }
    tally.finish()
}

/// `[ℤ² : Λ(id)] = D`.
pub fn identity_index_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut rng = rng_for(opts.seed, 4);
    let mut tally = Tally::new("identity-index");
    for _ in 0..opts.samples {
        let (p, t) = random_config(&mut rng, 16, opts.t_bound);
        let idx = lambda_sigma_generic(&p, &t, 0).expect("valid").index();
        tally.record(&idx == p.d(), || format!("D={} nu={}: index {idx}", p.d(), p.nu()));
    }
    tally.finish()
}

/// A random form of even degree `4..=10`, symmetric under the dihedral
/// group half the time, possibly with one coefficient perturbed.
pub fn random_even_form(rng: &mut impl Rng) -> BinaryForm {
    let d = 2 * rng.gen_range(2..=5usize);
    let mut coeffs: Vec<Rat> = vec![Rat::zero(); d + 1];
    if rng.gen_bool(0.5) {
        for k in (0..=d / 2).step_by(2) {
            let a = Rat::from_integer(rng.gen_range(-5i64..=5).into());
            coeffs[k] = a.clone();
            coeffs[d - k] = a;
        }
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(0..=d);
            coeffs[k] += Rat::from_integer(rng.gen_range(1i64..=3).into());
        }
    } else {
        for c in coeffs.iter_mut() {
            *c = Rat::from_integer(rng.gen_range(-5i64..=5).into());
        }
    }
    if coeffs.iter().all(Zero::is_zero) {
        coeffs[0] = Rat::from_integer(1.into());
        coeffs[d] = Rat::from_integer(1.into());
    }
    BinaryForm::new(coeffs).expect("degree at least 4 and nonzero")
}

/// The coefficient test for dihedral symmetry matches the matrix test.
pub fn coefficient_criterion_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut rng = rng_for(opts.seed, 5);
    let mut tally = Tally::new("coefficient-criterion");
    let n = (opts.samples / 10).max(1);
    for _ in 0..n {
        let f = random_even_form(&mut rng);
        tally.record(f.has_d4_by_coeffs() == f.has_d4_by_matrices(), || format!("{f}"));
    }
    tally.finish()
}

/// Exhaustive antidiagonal check for each prime.
pub fn antidiagonal_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut tally = Tally::new("antidiagonal");
    for &p in &opts.primes {
        match verify_antidiagonal(p) {
            Ok(r) => tally.record(r.holds(), || format!("p={p}: {:?}", r.counterexample)),
            Err(e) => tally.record(false, || format!("p={p}: {e}")),
        }
    }
    tally.finish()
}

pub fn run_all(opts: &SuiteOptions) -> Vec<SuiteReport> {
    vec![
        index_det_suite(opts),
        two_adic_suite(opts),
        dual_path_suite(opts),
        identity_index_suite(opts),
        coefficient_criterion_suite(opts),
        antidiagonal_suite(opts),
    ]
}
