//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are reported as FAIL and must fail
//! with the recorded observation; any other failure fails the target.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use latcover::covering::{enumerate_minimal, gl2z_orbits, transform, EnumerateOptions};
use latcover::d4::verify_antidiagonal;
use latcover::forms::d4_elements;
use latcover::json::{lattice_from_json, lattices_from_json};
use latcover::{BinaryForm, Covering, Int, Lattice, Mat2, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const ENUMERATE_SMALL_LIMIT: Duration = Duration::from_secs(1);
const ENUMERATE_LARGE_LIMIT: Duration = Duration::from_secs(300);
const ANTIDIAGONAL_LIMIT: Duration = Duration::from_secs(10);
const SCAN_LIMIT: Duration = Duration::from_secs(600);
const RANDOM_SAMPLES: u64 = 10_000;
const FORM_SAMPLES: u64 = 1_000;
const MEET_JOIN_PAIRS: usize = 10_000;
const CLOSURE_TRANSFORMS: usize = 50;

/// Criterion number and the observation its failure must reproduce.
const EXPECTED_FAILURES: &[(u32, &str)] = &[
    (2, "length 5: 9, length 6: 40 (8 orbits)"),
    (11, "index bound violated at lengths 5 and 6"),
];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn cli(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_latcover"))
        .args(args)
        .output()
        .expect("binary runs");
    (out, start.elapsed())
}

fn cli_json(args: &[&str]) -> (Value, i32, Duration) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (out, took) = cli(&full);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap_or(-1), took)
}

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect()
}

/// A covering from bases whose columns are the generators.
fn covering_of(bases: &[[[i64; 2]; 2]]) -> Covering {
    let ls = bases
        .iter()
        .map(|b| lattice_from_json(&json!({ "basis": b })).unwrap())
        .collect();
    Covering::new(ls).unwrap()
}

const MOD_FOUR_COVERING: [[[i64; 2]; 2]; 4] = [[[1, 0], [0, 2]], [[2, 0], [0, 1]], [[1, 0], [1, 4]], [[1, 0], [3, 4]]];

fn reference_list() -> Vec<Vec<Covering>> {
    let trivial = covering_of(&[[[1, 0], [0, 1]]]);
    let three = covering_of(&[[[1, 0], [0, 2]], [[2, 0], [0, 1]], [[1, 0], [1, 2]]]);
    let four_a = covering_of(&[[[1, 0], [0, 2]], [[4, 0], [0, 1]], [[1, 0], [1, 2]], [[2, 0], [1, 2]]]);
    let four_b = covering_of(&[[[1, 0], [0, 4]], [[2, 0], [0, 1]], [[1, 0], [1, 2]], [[1, 0], [2, 4]]]);
    let four_c = covering_of(&MOD_FOUR_COVERING);
    let four_d = covering_of(&[[[1, 0], [0, 3]], [[3, 0], [0, 1]], [[1, 0], [1, 3]], [[1, 0], [2, 3]]]);
    let mut four = vec![four_a, four_b, four_c, four_d];
    four.sort();
    vec![vec![trivial], vec![], vec![three], four]
}

fn enumerated(v: &Value) -> Vec<Vec<Covering>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|entry| {
            entry["coverings"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| Covering::new(lattices_from_json(c).unwrap()).unwrap())
                .collect()
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let (v, code, took) = cli_json(&["cover", "enumerate", "--length", "4", "--upto"]);
    let got = enumerated(&v);
    let counts: Vec<usize> = got.iter().map(Vec::len).collect();
    let ok = code == 0 && got == reference_list() && took < ENUMERATE_SMALL_LIMIT;
    verdict(ok, format!("counts {counts:?}, bases match reference: {}, {took:.2?}", got == reference_list()))
}

fn criterion_2() -> Verdict {
    let (v, code, took) = cli_json(&["cover", "enumerate", "--length", "6", "--upto"]);
    let count = |k: usize| v[k - 1]["count"].as_u64().unwrap();
    let orbits = v[5]["orbits"].as_u64().unwrap();
    let ok = code == 0 && count(5) == 9 && count(6) == 49 && took < ENUMERATE_LARGE_LIMIT;
    verdict(
        ok,
        format!("length 5: {}, length 6: {} ({orbits} orbits), expected 9 and 49, {took:.2?}", count(5), count(6)),
    )
}

fn criterion_3() -> Verdict {
    // y = 0 (2), x = 0 (2), 3x + y = 0 (4), x + y = 0 (4)
    let eqs = [(0, 1, 2), (1, 0, 2), (3, 1, 4), (1, 1, 4)];
    let all_classes = (0..4).all(|x| (0..4).all(|y| eqs.iter().any(|&(a, b, m)| (a * x + b * y) % m == 0)));
    let from_eqs: Vec<Lattice> = eqs
        .iter()
        .map(|&(a, b, m)| {
            lattice_from_json(&json!({"congruences": [{"alpha": a, "beta": b, "mod": m}]})).unwrap()
        })
        .collect();
    let same = Covering::new(from_eqs).unwrap() == covering_of(&MOD_FOUR_COVERING);
    verdict(all_classes && same, format!("16 classes covered: {all_classes}, equations define the covering: {same}"))
}

fn criterion_4() -> Verdict {
    let path = fixture("prime_index_gap.json");
    let (out, _) = cli(&["cover", "check", path.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout).trim().to_string();
    let ls = lattices_from_json(&serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()).unwrap();
    let primes = ls.iter().all(|l| [2, 3, 5, 7].contains(&i64::try_from(l.index()).unwrap()));
    let missed = ls.iter().all(|l| !l.contains(&Vec2::from_i64(1, 4)));
    let ok = out.status.code() == Some(1) && text == "NOT A COVERING, witness (1,4)" && primes && missed;
    verdict(ok, format!("{text:?}, prime indices: {primes}"))
}

fn suites() -> (Value, i32) {
    let samples = RANDOM_SAMPLES.to_string();
    let (v, code, _) = cli_json(&["verify", "lemmas", "--samples", &samples, "--seed", "2024"]);
    (v, code)
}

fn suite_verdict(suites: &Value, name: &str, min_samples: u64) -> Verdict {
    let s = suites
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["suite"] == name)
        .unwrap_or_else(|| panic!("suite {name} missing"));
    let (n, f) = (s["samples"].as_u64().unwrap(), s["failures"].as_u64().unwrap());
    verdict(n >= min_samples && f == 0, format!("{name}: {n} samples, {f} failures"))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in [3, 5, 7, 11, 13] {
        let r = verify_antidiagonal(p).unwrap();
        checked += r.tuples_checked;
        if !r.holds() {
            bad.push(p);
        }
    }
    let took = start.elapsed();
    verdict(
        bad.is_empty() && took < ANTIDIAGONAL_LIMIT,
        format!("{checked} tuples, counterexamples at {bad:?}, {took:.2?}"),
    )
}

/// Primitive tuples in `[-t, t]^4` up to sign.
fn normalized_tuple_count(t: i64) -> u64 {
    let r = -t..=t;
    let mut n = 0;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let g = [a, b, c, d].iter().fold(0i64, |g, &x| gcd(g, x.abs()));
                    n += u64::from(g == 1);
                }
            }
        }
    }
    n / 2
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn criterion_9() -> Verdict {
    let (v, code, took) = cli_json(&["d4", "scan", "--tmax", "5", "--dmax", "4"]);
    // (D, nu) with D | nu | D^2 and 2 <= D <= 4.
    let pairs = 2 + 2 + 3 + 2;
    let expected = pairs * normalized_tuple_count(5);
    let configs = v["configs"].as_u64().unwrap();
    let survivors = v["survivors"].as_array().unwrap().len();
    let violations = v["violations"].as_array().unwrap().len();
    let ok = code == 0
        && configs == expected
        && survivors == 0
        && violations == 0
        && v["reduction_holds"] == true
        && took < SCAN_LIMIT;
    verdict(
        ok,
        format!("{configs} configs (expected {expected}), {survivors} survivors, {violations} violations, {took:.1?}"),
    )
}

fn criterion_10(suites: &Value) -> Verdict {
    let random = suite_verdict(suites, "coefficient-criterion", FORM_SAMPLES);
    let quartic = BinaryForm::from_i64(&[1, 0, 0, 0, 1]).unwrap();
    let fixed = d4_elements().iter().filter(|g| quartic.is_automorphism(&g.to_rational())).count();
    let sym = quartic.has_d4_by_coeffs() && quartic.has_d4_by_matrices() && fixed == 8;
    let other = BinaryForm::from_i64(&[1, 1, 0, 0, 0]).unwrap();
    let asym = !other.has_d4_by_coeffs() && !other.has_d4_by_matrices();
    verdict(
        random.passed && sym && asym,
        format!("{}; X^4+Y^4 fixed by {fixed}/8; X^4+X^3Y rejected: {asym}", random.detail),
    )
}

fn random_unimodular(rng: &mut ChaCha8Rng) -> Mat2 {
    let gens = [
        Mat2::from_i64(0, -1, 1, 0),
        Mat2::from_i64(1, 1, 0, 1),
        Mat2::from_i64(1, -1, 0, 1),
        Mat2::from_i64(1, 0, 0, -1),
    ];
    (0..rng.gen_range(1..=20)).fold(Mat2::identity(), |m, _| &m * &gens[rng.gen_range(0..4)])
}

fn criterion_11() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let random_lattice = |rng: &mut ChaCha8Rng| {
        let b = rng.gen_range(1..=30);
        Lattice::from_triple(rng.gen_range(1..=30), rng.gen_range(0..b), b).unwrap()
    };
    let multiplicative = (0..MEET_JOIN_PAIRS).all(|_| {
        let (l, m) = (random_lattice(&mut rng), random_lattice(&mut rng));
        l.intersect(&m).index() * l.join(&m).index() == l.index() * m.index()
    });

    let opts = EnumerateOptions::default();
    let lists: Vec<Vec<Covering>> = (1..=6).map(|k| enumerate_minimal(k, &opts).unwrap()).collect();
    let mut over_bound = Vec::new();
    let mut some_member_within = true;
    let mut antichain = true;
    for (k, list) in (1..).zip(&lists) {
        let bound = Int::from(k);
        for c in list {
            let ls = c.lattices();
            if ls.iter().any(|l| l.index() > bound) && !over_bound.contains(&k) {
                over_bound.push(k);
            }
            some_member_within &= ls.iter().any(|l| l.index() <= bound);
            antichain &= ls
                .iter()
                .enumerate()
                .all(|(i, l)| ls.iter().enumerate().all(|(j, m)| i == j || !l.is_sublattice_of(m)));
        }
    }

    let mut closed = true;
    for list in &lists[..5] {
        let set: BTreeSet<&Covering> = list.iter().collect();
        for _ in 0..CLOSURE_TRANSFORMS {
            let u = random_unimodular(&mut rng);
            closed &= list.iter().all(|c| set.contains(&transform(c, &u).unwrap()));
        }
    }
    let orbits_ok = gl2z_orbits(&lists[4]).is_ok();

    let bound_detail = if over_bound.is_empty() {
        "index bound holds".to_string()
    } else {
        let ks: Vec<String> = over_bound.iter().map(ToString::to_string).collect();
        format!("index bound violated at lengths {}", ks.join(" and "))
    };
    verdict(
        multiplicative && over_bound.is_empty() && antichain && closed && orbits_ok,
        format!(
            "{bound_detail}; some member within bound: {some_member_within}; meet/join multiplicative: {multiplicative}; \
             pairwise non-inclusion: {antichain}; closed under {CLOSURE_TRANSFORMS} unimodular maps: {closed}"
        ),
    )
}

fn main() {
    let lemma_suites = suites();
    let runs: Vec<(u32, Box<dyn Fn() -> Verdict>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(|| suite_verdict(&lemma_suites.0, "dual-path-lambda", RANDOM_SAMPLES))),
        (6, Box::new(|| suite_verdict(&lemma_suites.0, "index-times-det", RANDOM_SAMPLES))),
        (7, Box::new(|| suite_verdict(&lemma_suites.0, "two-adic-inclusion", RANDOM_SAMPLES))),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(|| criterion_10(&lemma_suites.0))),
        (11, Box::new(criterion_11)),
    ];

    let mut unexpected = Vec::new();
    for (n, run) in runs {
        let v = run();
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {n:>2}: {status}  {}", v.detail);
        match EXPECTED_FAILURES.iter().find(|(m, _)| *m == n) {
            None if !v.passed => unexpected.push(format!("criterion {n} failed")),
            Some(_) if v.passed => unexpected.push(format!("criterion {n} passed but is listed as failing")),
            Some((_, seen)) if !v.detail.contains(seen) => {
                unexpected.push(format!("criterion {n} failed differently: {}", v.detail))
            }
            _ => {}
        }
    }
    println!("lemma suites exit code: {}", lemma_suites.1);
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("unexpected: {u}");
        }
        std::process::exit(1);
    }
}
