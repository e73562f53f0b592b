use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use latcover::covering::{
    enumerate_minimal, extract_minimal, gl2z_orbits, is_covering, is_minimal, snapshot,
    EnumerateOptions,
};
use latcover::d4::{check_config, scan, verify_d_reduction, D4Config, ScanConfig};
use latcover::forms::{
    d4_elements, isom_index_family, lambda_sigma_explicit, lambda_sigma_generic,
    search_gl2z_equivalence, FormError,
};
use latcover::json::{
    config_report_to_json, cover_report_to_json, covering_to_json, form_from_json, form_to_json,
    lattice_from_json, lattice_to_json, lattices_from_json, ratmat_from_json, ratmat_to_json,
    scan_report_to_json, JsonError,
};
use latcover::suites::{run_all, SuiteOptions};
use latcover::{BinaryForm, Covering, Lattice, RatMat2};

#[derive(Parser)]
#[command(name = "latcover", version, about = "Sublattices of Z^2, coverings by lattices, and dihedral binary forms")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice algebra.
    #[command(subcommand)]
    Lat(LatCmd),
    /// Covering checks and enumeration.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Dihedral configurations and the exhaustive scan.
    #[command(subcommand)]
    D4(D4Cmd),
    /// Randomized and exhaustive lemma checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Binary forms.
    #[command(subcommand)]
    Form(FormCmd),
}

/// Lattices are given as a file path or inline JSON: `{"basis": …}`,
/// `{"congruences": …}`, or a bare basis matrix such as `[[2,0],[1,3]]`.
#[derive(Subcommand)]
enum LatCmd {
    /// Canonical basis, index and defining congruences.
    Info { lattice: String },
    /// Intersection.
    Meet { a: String, b: String },
    /// Sum.
    Join { a: String, b: String },
    /// The lattice of points a rational matrix sends into Z^2.
    Ofmat { matrix: String },
}

#[derive(Subcommand)]
enum CoverCmd {
    /// Decide whether the lattices cover Z^2.
    Check { input: String },
    /// Decide minimality and extract a minimal covering.
    Minimal { input: String },
    /// List every minimal covering of a given length.
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    length: usize,
    /// All lengths from 1 to --length.
    #[arg(long)]
    upto: bool,
    /// Also write the snapshot text to this file.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Permit lengths above 6.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Subcommand)]
enum D4Cmd {
    /// The four lattices and the verdict for one configuration.
    Lambda {
        #[arg(long = "D")]
        d: i64,
        #[arg(long)]
        nu: i64,
        /// t1,t2,t3,t4
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        t: Vec<i64>,
    },
    /// Every normalized configuration in a box.
    Scan {
        #[arg(long, default_value_t = 3)]
        tmax: u32,
        #[arg(long, default_value_t = 4)]
        dmax: u32,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run the lemma suites.
    Lemmas {
        #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5, 7, 11, 13])]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

/// Forms are given as a file path or inline JSON: `{"degree", "coeffs"}` or
/// a bare coefficient array `["a_d", …, "a_0"]`.
#[derive(Subcommand)]
enum FormCmd {
    /// Dihedral symmetry and nondegeneracy.
    Aut { form: String },
    /// Substitute a rational matrix.
    Act {
        form: String,
        #[arg(long)]
        matrix: String,
    },
    /// Search for an integral unimodular change of variables.
    Equiv {
        f: String,
        g: String,
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
}

enum Failure {
    /// Exit 1.
    Found(String),
    /// Exit 2.
    Invalid(String),
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read_value(arg: &str) -> Result<Value, Failure> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| Failure::Invalid(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{arg}: {e}")))
}

fn read_lattice(arg: &str) -> Result<Lattice, Failure> {
    let v = read_value(arg)?;
    let v = if v.is_array() { json!({ "basis": v }) } else { v };
    Ok(lattice_from_json(&v)?)
}

fn read_form(arg: &str) -> Result<BinaryForm, Failure> {
    let v = read_value(arg)?;
    let v = if v.is_array() { json!({ "coeffs": v }) } else { v };
    Ok(form_from_json(&v)?)
}

fn read_matrix(arg: &str) -> Result<RatMat2, Failure> {
    Ok(ratmat_from_json(&read_value(arg)?)?)
}

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, value: Value, text: impl FnOnce() -> String) {
        let body = if self.json {
            serde_json::to_string_pretty(&value).expect("serializable")
        } else {
            text()
        };
        // A closed pipe is not an error worth reporting.
        let _ = writeln!(io::stdout().lock(), "{body}");
    }
}

fn lattice_text(l: &Lattice) -> String {
    format!("{l}  index {}", l.index())
}

fn lat(cmd: LatCmd, out: &Out) -> Outcome {
    match cmd {
        LatCmd::Info { lattice } => {
            let l = read_lattice(&lattice)?;
            let rows: Vec<Value> = l
                .to_congruences()
                .rows()
                .iter()
                .map(|r| json!({"alpha": r.alpha.to_string(), "beta": r.beta.to_string(), "mod": r.modulus.to_string()}))
                .collect();
            let mut v = lattice_to_json(&l);
            v["index"] = json!(l.index().to_string());
            v["congruences"] = json!(rows);
            out.emit(v, || {
                let eqs: Vec<String> = l
                    .to_congruences()
                    .rows()
                    .iter()
                    .map(|r| format!("{}*x1 + {}*x2 = 0 mod {}", r.alpha, r.beta, r.modulus))
                    .collect();
                format!("{}\ncongruences: {}", lattice_text(&l), eqs.join("; "))
            });
        }
        LatCmd::Meet { a, b } => {
            let l = read_lattice(&a)?.intersect(&read_lattice(&b)?);
            out.emit(lattice_to_json(&l), || lattice_text(&l));
        }
        LatCmd::Join { a, b } => {
            let l = read_lattice(&a)?.join(&read_lattice(&b)?);
            out.emit(lattice_to_json(&l), || lattice_text(&l));
        }
        LatCmd::Ofmat { matrix } => {
            let m = read_matrix(&matrix)?;
            let l = Lattice::from_matrix(&m).map_err(|e| Failure::Invalid(e.to_string()))?;
            out.emit(lattice_to_json(&l), || lattice_text(&l));
        }
    }
    Ok(true)
}

fn read_covering(arg: &str) -> Result<Covering, Failure> {
    let members = lattices_from_json(&read_value(arg)?)?;
    Covering::new(members).map_err(|e| Failure::Invalid(e.to_string()))
}

fn cover(cmd: CoverCmd, out: &Out) -> Outcome {
    match cmd {
        CoverCmd::Check { input } => {
            let c = read_covering(&input)?;
            let r = is_covering(&c).map_err(|e| Failure::Invalid(e.to_string()))?;
            out.emit(cover_report_to_json(&r), || match &r.witness {
                None => format!("COVERS (modulus {})", c.modulus()),
                Some(w) => format!("NOT A COVERING, witness {w}"),
            });
            Ok(r.covers)
        }
        CoverCmd::Minimal { input } => {
            let c = read_covering(&input)?;
            if !is_covering(&c).map_err(|e| Failure::Invalid(e.to_string()))?.covers {
                let r = is_covering(&c).expect("checked above");
                let w = r.witness.expect("not a covering");
                return Err(Failure::Found(format!("NOT A COVERING, witness {w}")));
            }
            let minimal = is_minimal(&c).map_err(|e| Failure::Invalid(e.to_string()))?;
            let ex = extract_minimal(&c).map_err(|e| Failure::Invalid(e.to_string()))?;
            out.emit(
                json!({"minimal": minimal, "extracted": covering_to_json(&ex.covering), "map": ex.map}),
                || {
                    let verdict = if minimal { "MINIMAL" } else { "NOT MINIMAL" };
                    format!("{verdict}\nextracted: {}\nmap: {:?}", ex.covering, ex.map)
                },
            );
            Ok(true)
        }
        CoverCmd::Enumerate(args) => enumerate(args, out),
    }
}

fn enumerate(args: EnumerateArgs, out: &Out) -> Outcome {
    let opts = EnumerateOptions { threads: args.threads, allow_large: args.allow_large };
    let lengths = if args.upto { 1..=args.length } else { args.length..=args.length };
    let mut text = String::new();
    let mut summary = Vec::new();
    let mut listed = Vec::new();
    for k in lengths {
        let found = enumerate_minimal(k, &opts).map_err(|e| Failure::Invalid(e.to_string()))?;
        let orbits = gl2z_orbits(&found).map_err(|e| Failure::Invalid(e.to_string()))?;
        summary.push(format!("k={k}: {} minimal coverings, {} GL(2,Z) orbits", found.len(), orbits.len()));
        text.push_str(&snapshot(&found));
        listed.push(json!({
            "length": k,
            "count": found.len(),
            "orbits": orbits.len(),
            "coverings": found.iter().map(covering_to_json).collect::<Vec<_>>(),
        }));
    }
    if let Some(path) = &args.snapshot {
        fs::write(path, &text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    }
    out.emit(json!(listed), || format!("{}\n{}", summary.join("\n"), text.trim_end()));
    Ok(true)
}

fn d4(cmd: D4Cmd, out: &Out) -> Outcome {
    match cmd {
        D4Cmd::Lambda { d, nu, t } => {
            let t: [i64; 4] = t.try_into().map_err(|_| Failure::Invalid("--t needs four integers".into()))?;
            let c = D4Config::new(d, nu, t)?;
            let r = check_config(&c);
            let family = isom_index_family(&c.params, &c.t2)?;
            let generic: Vec<Lattice> = (0..4)
                .map(|i| lambda_sigma_generic(&c.params, &c.t2, i))
                .collect::<Result<_, _>>()?;
            let agree = (0..4).all(|i| {
                lambda_sigma_explicit(&c.params, &c.t2, i).is_ok_and(|l| l == generic[i])
            });
            let mut v = config_report_to_json(&r);
            v["d2"] = json!(c.t2.d2().to_string());
            v["paths_agree"] = json!(agree);
            v["family"] = json!(family
                .iter()
                .map(|(tag, l)| json!({"tag": tag.to_string(), "index": l.index().to_string()}))
                .collect::<Vec<_>>());
            out.emit(v, || {
                let mut s = format!("{c}  d2={}\n", c.t2.d2());
                for (i, l) in r.lambdas.iter().enumerate() {
                    s.push_str(&format!("Lambda(sigma{i}) = {}\n", lattice_text(l)));
                }
                s.push_str(&format!("explicit and generic agree: {agree}\n"));
                for (tag, l) in &family {
                    s.push_str(&format!("index L({tag}) = {}\n", l.index()));
                }
                s.push_str(&format!(
                    "all_proper={} covers={} gamma_minimal={} -> {}",
                    r.all_proper,
                    r.covers,
                    r.gamma_minimal,
                    r.verdict()
                ));
                s
            });
            Ok(agree && !r.survivor)
        }
        D4Cmd::Scan { tmax, dmax, threads } => {
            if tmax < 1 || dmax < 2 {
                return Err(Failure::Invalid("need --tmax >= 1 and --dmax >= 2".into()));
            }
            let rep = scan(&ScanConfig { t_bound: tmax, d_max: dmax, threads });
            let reduction = verify_d_reduction(&rep.proper_covering);
            let mut v = scan_report_to_json(&rep);
            v["reduction_holds"] = json!(reduction.holds());
            out.emit(v, || {
                let b = &rep.buckets;
                let mut s = format!(
                    "{} configs: invalid {}, not_proper {}, not_covering {}, not_minimal {}\n",
                    rep.configs, b.invalid, b.not_proper, b.not_covering, b.not_minimal
                );
                for r in &rep.survivors {
                    s.push_str(&format!("SURVIVOR {}\n", r.config));
                }
                for line in rep.violations.iter().chain(&reduction.violations) {
                    s.push_str(&format!("VIOLATION {line}\n"));
                }
                s.push_str(&format!("{} survivors", rep.survivors.len()));
                s
            });
            Ok(rep.survivors.is_empty() && rep.violations.is_empty() && reduction.holds())
        }
    }
}

fn verify(cmd: VerifyCmd, out: &Out) -> Outcome {
    let VerifyCmd::Lemmas { primes, samples, seed } = cmd;
    let opts = SuiteOptions { samples, seed, primes, ..Default::default() };
    let reports = run_all(&opts);
    let v = json!(reports
        .iter()
        .map(|r| json!({
            "suite": r.name,
            "samples": r.samples,
            "failures": r.failures,
            "first_failure": r.first_failure,
        }))
        .collect::<Vec<_>>());
    out.emit(v, || {
        reports
            .iter()
            .map(|r| {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                let detail = r.first_failure.as_deref().map(|f| format!(" first: {f}")).unwrap_or_default();
                format!("{status} {:<22} {} samples, {} failures{detail}", r.name, r.samples, r.failures)
            })
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(reports.iter().all(|r| r.passed()))
}

fn form(cmd: FormCmd, out: &Out) -> Outcome {
    match cmd {
        FormCmd::Aut { form } => {
            let f = read_form(&form)?;
            let fixing: Vec<String> = d4_elements()
                .iter()
                .filter(|m| f.is_automorphism(&m.to_rational()))
                .map(ToString::to_string)
                .collect();
            let (by_coeffs, by_matrices) = (f.has_d4_by_coeffs(), f.has_d4_by_matrices());
            out.emit(
                json!({
                    "form": form_to_json(&f),
                    "d4_by_coeffs": by_coeffs,
                    "d4_by_matrices": by_matrices,
                    "nondegenerate": f.is_nondegenerate(),
                    "fixing": fixing,
                }),
                || {
                    format!(
                        "{f}\nD4 by coefficients: {by_coeffs}\nD4 by matrices: {by_matrices}\nnondegenerate: {}\nfixed by: {}",
                        f.is_nondegenerate(),
                        fixing.join(" ")
                    )
                },
            );
            Ok(by_coeffs == by_matrices)
        }
        FormCmd::Act { form, matrix } => {
            let f = read_form(&form)?;
            let m = read_matrix(&matrix)?;
            let g = f.act(&m);
            out.emit(json!({"matrix": ratmat_to_json(&m), "form": form_to_json(&g)}), || g.to_string());
            Ok(true)
        }
        FormCmd::Equiv { f, g, bound } => {
            let (f, g) = (read_form(&f)?, read_form(&g)?);
            let found = search_gl2z_equivalence(&f, &g, bound)?;
            out.emit(
                json!({"bound": bound, "matrix": found.as_ref().map(|m| ratmat_to_json(&m.to_rational()))}),
                || match &found {
                    Some(m) => format!("EQUIVALENT via {m}"),
                    None => format!("no unimodular matrix with entries in [-{bound}, {bound}]"),
                },
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { json: cli.json };
    let result = match cli.command {
        Command::Lat(c) => lat(c, &out),
        Command::Cover(c) => cover(c, &out),
        Command::D4(c) => d4(c, &out),
        Command::Verify(c) => verify(c, &out),
        Command::Form(c) => form(c, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Found(msg)) => {
            println!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
