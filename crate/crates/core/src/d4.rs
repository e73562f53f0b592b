//! Exhaustive search for `(D, ν, T2)` configurations whose four lattices
//! `Λ(σ)` would cover ℤ² under the side conditions an extraordinary pair of
//! forms with dihedral automorphism group must satisfy.

use std::fmt;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arith::{is_prime, ArithError, Int};
use crate::covering::covers;
use crate::forms::{
    isom_index_family, lambda_sigma_explicit, lambda_sigma_generic, FormError, GammaParams,
    T2Config,
};
use crate::lattice::Lattice;

/// One search point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct D4Config {
    pub params: GammaParams,
    pub t2: T2Config,
}

impl D4Config {
    pub fn new(d: i64, nu: i64, t: [i64; 4]) -> Result<Self, FormError> {
        Ok(D4Config { params: GammaParams::from_i64(d, nu)?, t2: T2Config::from_i64(t)? })
    }
}

impl fmt::Display for D4Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D={} nu={} t={}", self.params.d(), self.params.nu(), self.t2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigReport {
    pub config: D4Config,
    /// `Λ(σ_0), …, Λ(σ_3)`.
    pub lambdas: [Lattice; 4],
    /// No `Λ(σ)` is ℤ².
    pub all_proper: bool,
    /// The four lattices cover ℤ².
    pub covers: bool,
    /// `[ℤ² : L(γ)] = ν/D` is at most the index of every `L(γ⁻¹σ)`, `L(σγ)`.
    pub gamma_minimal: bool,
    pub survivor: bool,
}

pub fn check_config(c: &D4Config) -> ConfigReport {
    let lambdas: [Lattice; 4] = std::array::from_fn(|i| {
        lambda_sigma_explicit(&c.params, &c.t2, i).expect("valid configuration")
    });
    let all_proper = lambdas.iter().all(|l| !l.is_full());
    let covers = covers(&lambdas);
    let floor = gamma_index(&c.params);
    let gamma_minimal = isom_index_family(&c.params, &c.t2)
        .expect("valid configuration")
        .iter()
        .all(|(_, l)| floor <= l.index());
    ConfigReport {
        config: c.clone(),
        survivor: all_proper && covers && gamma_minimal,
        lambdas,
        all_proper,
        covers,
        gamma_minimal,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    /// `|t_i| ≤ t_bound`.
    pub t_bound: u32,
    pub d_max: u32,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// Why a configuration is not a survivor; the first failing test wins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Buckets {
    /// Tuples that are primitive and sign-normalized but singular.
    pub invalid: u64,
    pub not_proper: u64,
    pub not_covering: u64,
    pub not_minimal: u64,
}

impl Buckets {
    pub fn total(&self) -> u64 {
        self.invalid + self.not_proper + self.not_covering + self.not_minimal
    }

    fn merge(mut self, o: Buckets) -> Buckets {
        self.invalid += o.invalid;
        self.not_proper += o.not_proper;
        self.not_covering += o.not_covering;
        self.not_minimal += o.not_minimal;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanReport {
    pub configs: u64,
    pub buckets: Buckets,
    pub survivors: Vec<ConfigReport>,
    /// Configurations with every `Λ(σ)` proper that cover ℤ².
    pub proper_covering: Vec<ConfigReport>,
    /// Broken cross-checks, one line each; expected empty.
    pub violations: Vec<String>,
}

impl ScanReport {
    fn merge(mut self, o: ScanReport) -> ScanReport {
        self.configs += o.configs;
        self.buckets = self.buckets.merge(o.buckets);
        self.survivors.extend(o.survivors);
        self.proper_covering.extend(o.proper_covering);
        self.violations.extend(o.violations);
        self
    }
}

/// Primitive, sign-normalized integer quadruples in the box, in
/// lexicographic order. Singular ones are included.
fn normalized_tuples(bound: i64) -> Vec<[Int; 4]> {
    let r = -bound..=bound;
    let mut out = Vec::new();
    for t1 in r.clone() {
        for t2 in r.clone() {
            for t3 in r.clone() {
                for t4 in r.clone() {
                    let t = [t1, t2, t3, t4];
                    let lead = t.iter().find(|&&x| x != 0);
                    let g = t.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
                    if g == 1 && lead.is_some_and(|&x| x > 0) {
                        out.push(t.map(Int::from));
                    }
                }
            }
        }
    }
    out
}

/// End-to-end cross-checks on one configuration.
fn cross_check(c: &D4Config, r: &ConfigReport) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..4 {
        let generic = lambda_sigma_generic(&c.params, &c.t2, i).expect("valid configuration");
        if generic != r.lambdas[i] {
            out.push(format!("{c}: sigma{i} explicit {} != generic {generic}", r.lambdas[i]));
        }
        let m = &c.params.gamma_inv() * &c.t2.sigma(i);
        let neg = Lattice::from_matrix(&-m).expect("non-singular");
        if neg != generic {
            out.push(format!("{c}: sigma{i} sign changes the lattice"));
        }
    }
    if &r.lambdas[0].index() != c.params.d() {
        out.push(format!("{c}: index of Lambda(id) is {}", r.lambdas[0].index()));
    }
    out
}

/// Every normalized `T2` in the box against every admissible `(D, ν)`.
pub fn scan(s: &ScanConfig) -> ScanReport {
    let params = GammaParams::all_up_to(u64::from(s.d_max));
    let tuples = normalized_tuples(i64::from(s.t_bound));
    let per_tuple = |t: &[Int; 4]| -> ScanReport {
        let mut rep = ScanReport::default();
        let Ok(t2) = T2Config::new(t.clone()) else {
            let n = params.len() as u64;
            rep.configs = n;
            rep.buckets.invalid = n;
            return rep;
        };
        for p in &params {
            let c = D4Config { params: p.clone(), t2: t2.clone() };
            let r = check_config(&c);
            rep.configs += 1;
            rep.violations.extend(cross_check(&c, &r));
            if !r.all_proper {
                rep.buckets.not_proper += 1;
            } else if !r.covers {
                rep.buckets.not_covering += 1;
            } else {
                rep.proper_covering.push(r.clone());
                if !r.gamma_minimal {
                    rep.buckets.not_minimal += 1;
                } else {
                    rep.survivors.push(r);
                }
            }
        }
        rep
    };
    let run = || {
        tuples
            .par_iter()
            .map(per_tuple)
            .collect::<Vec<_>>()
            .into_iter()
            .fold(ScanReport::default(), ScanReport::merge)
    };
    match s.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntidiagonalReport {
    pub prime: u64,
    pub tuples_checked: u64,
    /// A tuple and the pair of sets `(i, j)` all of whose members vanish.
    pub counterexample: Option<([u64; 4], (usize, usize))>,
}

impl AntidiagonalReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// For every `t ∈ (ℤ/p)⁴ ∖ {0}` and every pair of the sets
/// `S1 = {t2²+t4², t1²+t3²}`, `S2 = {t4²−t2², t1²−t3²}`,
/// `S3 = {2t2t4, 2t1t3}`, some member of the union is nonzero mod `p`.
pub fn verify_antidiagonal(p: u64) -> Result<AntidiagonalReport, ArithError> {
    if p == 2 || !is_prime(&p) {
        return Err(ArithError::InvalidPrime(p.to_string()));
    }
    let mut checked = 0;
    for code in 1..p.pow(4) {
        let t = [code / (p * p * p), code / (p * p) % p, code / p % p, code % p];
        let [t1, t2, t3, t4] = t;
        let sets = [
            [(t2 * t2 + t4 * t4) % p, (t1 * t1 + t3 * t3) % p],
            [(t4 * t4 + p * p - t2 * t2) % p, (t1 * t1 + p * p - t3 * t3) % p],
            [2 * t2 * t4 % p, 2 * t1 * t3 % p],
        ];
        checked += 1;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if sets[i].iter().chain(&sets[j]).all(|&v| v == 0) {
                return Ok(AntidiagonalReport {
                    prime: p,
                    tuples_checked: checked,
                    counterexample: Some((t, (i + 1, j + 1))),
                });
            }
        }
    }
    Ok(AntidiagonalReport { prime: p, tuples_checked: checked, counterexample: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionReport {
    /// Configurations examined (proper and covering).
    pub examined: usize,
    pub violations: Vec<String>,
}

impl ReductionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_vacuous(&self) -> bool {
        self.examined == 0
    }
}

/// Checks the funnel on `(D, ν)` that any proper covering configuration
/// must pass: `D ∈ {2, 4}`, and with the minimality of `L(γ)` also
/// `(D, ν) ∈ {(2,2), (2,4), (4,8)}`.
pub fn verify_d_reduction(reports: &[ConfigReport]) -> ReductionReport {
    let small = |x: &Int| x.to_i64();
    let mut violations = Vec::new();
    let mut examined = 0;
    for r in reports.iter().filter(|r| r.all_proper && r.covers) {
        examined += 1;
        let d = small(r.config.params.d());
        let nu = small(r.config.params.nu());
        if !matches!(d, Some(2 | 4)) {
            violations.push(format!("{}: D outside {{2, 4}}", r.config));
        } else if r.gamma_minimal
            && !matches!((d, nu), (Some(2), Some(2 | 4)) | (Some(4), Some(8)))
        {
            violations.push(format!("{}: (D, nu) outside {{(2,2), (2,4), (4,8)}}", r.config));
        }
    }
    ReductionReport { examined, violations }
}

/// Index of `L(γ)`, which is `ν/D`.
pub fn gamma_index(p: &GammaParams) -> Int {
    p.nu() / p.d()
}

impl ConfigReport {
    /// Bucket label used in reports.
    pub fn verdict(&self) -> &'static str {
        if !self.all_proper {
            "not_proper"
        } else if !self.covers {
            "not_covering"
        } else if !self.gamma_minimal {
            "not_minimal"
        } else {
            "survivor"
        }
    }
}
