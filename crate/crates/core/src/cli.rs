//! Command-line front end.
//!
//! `run` does all the work and returns what would be printed, so the
//! binary is a thin wrapper and tests can call it directly.

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::mfactor::{factor_irreducible, Factorization};
use crate::mgcd::gcd;
use crate::mreduce::{content_extract, contentfree_test, mroot_extract, msquarefree};
use crate::rng::{stream, Rng};
use crate::sparseinterp::{eval_sequence, prony_interpolate, verify_candidate, GeometricSequence};
use crate::sparsepoly::{JsonPoly, SparsePoly};

pub const DEFAULT_PRIME: u64 = 0xffff_ffff_0000_0001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sparse-factor", version, about = "Sparse multivariate polynomials over prime fields")]
pub struct Cli {
    /// Field characteristic; must be prime with smooth p - 1.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    pub prime: u64,
    /// Master seed for every random choice.
    #[arg(long, global = true, env = "SPARSE_FACTOR_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Repetitions per bench case.
    #[arg(long, global = true, default_value_t = 1)]
    pub trials: usize,
    /// Number of variables (default: largest index in the input).
    #[arg(long, global = true)]
    pub nvars: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Polynomial arguments are text (`3*x1^2*x2 - x3^-1`), JSON
/// (`{"n": .., "terms": [..]}`) or `@path` to read either from a file.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irreducible factorization.
    Factor {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Greatest common divisor, normalized.
    Gcd {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Square-free factorization.
    Sqfree {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// F = c R^l.
    Root {
        #[arg(long = "l")]
        l: usize,
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Offending variables, or the content in `--var` (1-based).
    Content {
        #[arg(long)]
        var: Option<usize>,
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Black-box round trip: evaluate on a geometric sequence and recover
    /// the polynomial with a doubling term bound.
    Interp {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Run a fixture suite: content-pathology or swell.
    Bench {
        suite: String,
        /// Include wall-clock milliseconds (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
}

/// What the process should print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 1,
                },
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome {
            stdout,
            stderr: String::new(),
            code: 0,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: exit_code(&e),
        },
    }
}

/// 2 for outcomes of randomized search that may succeed with another
/// seed, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_)
        | Error::VerificationFailed(_)
        | Error::LiftError(_)
        | Error::LiftFailed(_)
        | Error::InterpolationFailed(_)
        | Error::TermBudgetExceeded
        | Error::NormalizationFailed
        | Error::DegenerateShift => 2,
        _ => 1,
    }
}

pub fn execute(cli: &Cli) -> Result<String> {
    let k = if cli.prime == DEFAULT_PRIME {
        PrimeField::goldilocks()
    } else {
        PrimeField::new(cli.prime)?
    };
    let job = Job { cli, k: &k };
    match &cli.command {
        Command::Factor { input } => job.factor(input),
        Command::Gcd { a, b } => job.gcd(a, b),
        Command::Sqfree { input } => job.sqfree(input),
        Command::Root { l, input } => job.root(input, *l),
        Command::Content { var, input } => job.content(input, *var),
        Command::Interp { input } => job.interp(input),
        Command::Bench { suite, timings } => bench(&k, suite, cli.trials, cli.seed, *timings, cli.format),
    }
}

struct Job<'a> {
    cli: &'a Cli,
    k: &'a PrimeField,
}

impl Job<'_> {
    fn rng(&self, label: &str) -> Rng {
        stream(self.cli.seed, label)
    }

    fn polys(&self, inputs: &[&str]) -> Result<Vec<SparsePoly>> {
        let parsed = inputs.iter().map(|s| read_poly(self.k, s)).collect::<Result<Vec<_>>>()?;
        let widest = parsed.iter().map(SparsePoly::nvars).max().unwrap_or(0);
        let n = match self.cli.nvars {
            Some(n) if n < widest => return Err(Error::ArityMismatch(n, widest)),
            Some(n) => n,
            None => widest,
        };
        Ok(parsed.into_iter().map(|p| p.extend(n)).collect())
    }

    fn header(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(command));
        m.insert("prime".into(), json!(self.k.p().to_string()));
        m.insert("seed".into(), json!(self.cli.seed));
        m
    }

    fn emit(&self, mut head: serde_json::Map<String, Value>, body: Value, text: String) -> String {
        match self.cli.format {
            Format::Text => text,
            Format::Json => {
                if let Value::Object(b) = body {
                    head.extend(b);
                }
                format!("{}\n", Value::Object(head))
            }
        }
    }

    fn factor(&self, input: &str) -> Result<String> {
        let f = self.polys(&[input])?.remove(0);
        let fz = factor_irreducible(self.k, &f, &mut self.rng("cli.factor"))?;
        Ok(self.emit(self.header("factor"), factorization_json(self.k, &fz), factorization_text(self.k, &fz)))
    }

    fn sqfree(&self, input: &str) -> Result<String> {
        let f = self.polys(&[input])?.remove(0);
        let fz = msquarefree(self.k, &f, &mut self.rng("cli.sqfree"))?;
        Ok(self.emit(self.header("sqfree"), factorization_json(self.k, &fz), factorization_text(self.k, &fz)))
    }

    fn gcd(&self, a: &str, b: &str) -> Result<String> {
        let ps = self.polys(&[a, b])?;
        let g = gcd(self.k, &ps[0], &ps[1], &mut self.rng("cli.gcd"))?;
        let text = format!("{}\n", g.to_text(self.k));
        Ok(self.emit(self.header("gcd"), json!({ "gcd": poly_json(self.k, &g) }), text))
    }

    fn root(&self, input: &str, l: usize) -> Result<String> {
        let f = self.polys(&[input])?.remove(0);
        match mroot_extract(self.k, &f, l, &mut self.rng("cli.root")) {
            Ok((c, r)) => {
                let text = format!("c: {}\nroot: {}\n", signed(self.k, c), r.to_text(self.k));
                let body = json!({ "l": l, "c": c.to_string(), "root": poly_json(self.k, &r) });
                Ok(self.emit(self.header("root"), body, text))
            }
            Err(Error::NotAPower) => {
                let text = format!("not a power of order {l}\n");
                Ok(self.emit(self.header("root"), json!({ "l": l, "c": null, "root": null }), text))
            }
            Err(e) => Err(e),
        }
    }

    fn content(&self, input: &str, var: Option<usize>) -> Result<String> {
        let f = self.polys(&[input])?.remove(0);
        let n = f.nvars();
        let mut rng = self.rng("cli.content");
        match var {
            None => {
                let off: Vec<usize> = contentfree_test(self.k, &f, &mut rng)?.into_iter().map(|i| i + 1).collect();
                let text = if off.is_empty() {
                    "content-free\n".to_string()
                } else {
                    let names: Vec<String> = off.iter().map(|i| format!("x{i}")).collect();
                    format!("offending: {}\n", names.join(" "))
                };
                Ok(self.emit(self.header("content"), json!({ "offending": off }), text))
            }
            Some(v) if v == 0 || v > n => Err(Error::Precondition("--var must name a variable of the input")),
            Some(v) => {
                let (c, q) = content_extract(self.k, &f, v - 1, &mut rng)?;
                let text = format!("content: {}\nprimitive: {}\n", c.to_text(self.k), q.to_text(self.k));
                let body = json!({
                    "var": v,
                    "content": poly_json(self.k, &c),
                    "primitive": poly_json(self.k, &q),
                });
                Ok(self.emit(self.header("content"), body, text))
            }
        }
    }

    fn interp(&self, input: &str) -> Result<String> {
        let f = self.polys(&[input])?.remove(0);
        let mut rng = self.rng("cli.interp");
        let (got, evaluations) = black_box_round_trip(self.k, &f, &mut rng)?;
        let text = format!("{}\nevaluations: {}\n", got.to_text(self.k), evaluations);
        let body = json!({ "evaluations": evaluations, "result": poly_json(self.k, &got) });
        Ok(self.emit(self.header("interp"), body, text))
    }
}

/// Recovers `f` from its values only, doubling the term bound until the
/// result passes a random-point check. Returns the evaluation count.
pub fn black_box_round_trip(k: &PrimeField, f: &SparsePoly, rng: &mut Rng) -> Result<(SparsePoly, usize)> {
    let lo = f.min_exponents();
    let hi = f.max_exponents();
    let seq = GeometricSequence::with_window(k, &lo, &hi, rng)?;
    let oracle = |z: &[Fp]| f.eval(k, z).unwrap_or(0);
    let mut s = 1usize;
    loop {
        let values = eval_sequence(k, f, &seq, 0, 2 * s);
        if let Ok(g) = prony_interpolate(k, &values, &seq, s, rng) {
            if g.len() < s && verify_candidate(k, oracle, &g, rng) {
                return Ok((g, 2 * s));
            }
        }
        if s as u64 > seq.capacity() {
            return Err(Error::InterpolationFailed("term bound exhausted"));
        }
        s *= 2;
    }
}

fn read_poly(k: &PrimeField, arg: &str) -> Result<SparsePoly> {
    let owned;
    let text = match arg.strip_prefix('@') {
        Some(path) => {
            owned = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                line: 0,
                column: 0,
                message: format!("cannot read {path}: {e}"),
            })?;
            owned.as_str()
        }
        None => arg,
    };
    if text.trim_start().starts_with('{') {
        let j: JsonPoly = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        SparsePoly::from_json(k, &j)
    } else {
        SparsePoly::parse(k, text.trim(), None)
    }
}

fn signed(k: &PrimeField, c: Fp) -> String {
    k.to_signed(c).to_string()
}

fn poly_json(k: &PrimeField, f: &SparsePoly) -> Value {
    let mut v = serde_json::to_value(f.to_json()).expect("polynomials serialize");
    v["text"] = json!(f.to_text(k));
    v
}

pub fn factorization_json(k: &PrimeField, fz: &Factorization) -> Value {
    let factors: Vec<Value> = fz
        .factors
        .iter()
        .map(|(f, m)| json!({ "factor": poly_json(k, f), "multiplicity": m }))
        .collect();
    json!({ "nvars": fz.nvars, "unit": fz.unit.to_string(), "factors": factors })
}

pub fn factorization_text(k: &PrimeField, fz: &Factorization) -> String {
    let mut s = format!("unit: {}\n", signed(k, fz.unit));
    for (f, m) in &fz.factors {
        let _ = match m {
            1 => writeln!(s, "({})", f.to_text(k)),
            _ => writeln!(s, "({})^{}", f.to_text(k), m),
        };
    }
    s
}

/// Fixture suites. One JSON line (or text line) per (case, trial), in case
/// order, then a summary line; nothing at all when `trials` is zero.
pub fn bench(k: &PrimeField, suite: &str, trials: usize, seed: u64, timings: bool, format: Format) -> Result<String> {
    let cases: Vec<Case> = match suite {
        "content-pathology" => [(5, 4, 1), (5, 4, 2), (7, 4, 1), (7, 5, 1)]
            .into_iter()
            .map(|(p, q, n)| Case::Content { p, q, n })
            .collect(),
        "swell" => (2..=6).map(|d| Case::Swell { k: d }).collect(),
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    if trials == 0 {
        return Ok(String::new());
    }
    let jobs: Vec<(usize, usize)> = (0..cases.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();
    let rows: Vec<Value> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let mut rng = stream(seed, &format!("bench.{suite}.{c}.{t}"));
            let start = Instant::now();
            let mut row = cases[c].run(k, &mut rng);
            row["suite"] = json!(suite);
            row["case"] = json!(c);
            row["trial"] = json!(t);
            if timings {
                row["millis"] = json!(start.elapsed().as_millis() as u64);
            }
            row
        })
        .collect();
    let count = |s: &str| rows.iter().filter(|r| r["status"] == s).count();
    let summary = json!({
        "suite": suite,
        "summary": true,
        "ok": count("ok"),
        "inconclusive": count("inconclusive"),
        "failed": count("failed"),
    });
    let mut out = String::new();
    for r in rows.iter().chain(std::iter::once(&summary)) {
        match format {
            Format::Json => out.push_str(&format!("{r}\n")),
            Format::Text => {
                let Value::Object(m) = r else { unreachable!() };
                let parts: Vec<String> = m.iter().map(|(key, v)| format!("{key}={v}")).collect();
                out.push_str(&parts.join(" "));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

enum Case {
    /// prod_j F_{p,q}(x_j, y) and its content in y.
    Content { p: i64, q: i64, n: usize },
    /// F = P_1 P_2 with P_i = (x_i + y_i)^k - (u_i + v_i)^k. Q_1 Q_2 has
    /// |Q_1|^2 terms since the two live in disjoint variables.
    Swell { k: u32 },
}

/// F_{p,q}(x_j, y) = x_j^{pq} - 1 + (x_j^{p+q} - x_j^p - x_j^q + 1) y,
/// y being the last of n + 1 variables.
pub fn content_fixture(k: &PrimeField, p: i64, q: i64, j: usize, n: usize) -> SparsePoly {
    let y = n;
    let mono = |ex: i64, ey: i64, c: i64| {
        let mut e = vec![0; n + 1];
        e[j] = ex;
        e[y] = ey;
        (e, k.from_i64(c))
    };
    SparsePoly::from_terms(
        k,
        n + 1,
        [
            mono(p * q, 0, 1),
            mono(0, 0, -1),
            mono(p + q, 1, 1),
            mono(p, 1, -1),
            mono(q, 1, -1),
            mono(0, 1, 1),
        ],
    )
}

/// (x_i + y_i)^k - (u_i + v_i)^k in the variable order
/// x1 x2 y1 y2 u1 u2 v1 v2.
pub fn swell_fixture(k: &PrimeField, i: usize, d: u32) -> SparsePoly {
    let v = |j: usize| SparsePoly::var(8, j);
    let a = v(i).add(k, &v(2 + i)).pow(k, d);
    let b = v(4 + i).add(k, &v(6 + i)).pow(k, d);
    a.sub(k, &b)
}

fn failure_bound(k: &PrimeField, nvars: usize, deg: i64) -> f64 {
    (2 * nvars) as f64 * (deg * deg) as f64 / (k.p() - 1) as f64
}

impl Case {
    fn run(&self, k: &PrimeField, rng: &mut Rng) -> Value {
        match *self {
            Case::Content { p, q, n } => {
                let f = (0..n).fold(SparsePoly::one(n + 1), |acc, j| acc.mul(k, &content_fixture(k, p, q, j, n)));
                let expected = (2 * q).pow(n as u32);
                let bound = failure_bound(k, n + 1, f.total_degree());
                let mut row = json!({ "p": p, "q": q, "n": n, "input_terms": f.len(), "expected_content_terms": expected, "failure_bound": bound });
                match content_extract(k, &f, n, rng) {
                    Ok((c, prim)) => {
                        let ok = c.mul(k, &prim) == f && c.len() as i64 == expected;
                        row["content_terms"] = json!(c.len());
                        row["primitive_terms"] = json!(prim.len());
                        row["status"] = json!(if ok { "ok" } else { "failed" });
                    }
                    Err(e) => status_from(&mut row, &e),
                }
                row
            }
            Case::Swell { k: d } => {
                let p1 = swell_fixture(k, 0, d);
                let p2 = swell_fixture(k, 1, d);
                let f = p1.mul(k, &p2);
                let lin = SparsePoly::parse(k, "x1 + x3 - x5 - x7", Some(8)).expect("fixed text");
                let q1 = p1.div_exact(k, &lin).map(|q| q.len()).unwrap_or(0);
                let bound = failure_bound(k, 8, f.total_degree());
                let mut row = json!({ "k": d, "input_terms": f.len(), "p_terms": [p1.len(), p2.len()], "q_terms": q1, "swell_terms": q1 * q1, "failure_bound": bound });
                match factor_irreducible(k, &f, rng) {
                    Ok(fz) => {
                        let sizes: Vec<usize> = fz.factors.iter().map(|(g, _)| g.len()).collect();
                        row["factor_terms"] = json!(sizes);
                        row["factors"] = json!(fz.factors.len());
                        row["status"] = json!(if fz.expand(k) == f { "ok" } else { "failed" });
                    }
                    Err(e) => status_from(&mut row, &e),
                }
                row
            }
        }
    }
}

fn status_from(row: &mut Value, e: &Error) {
    row["status"] = json!(if exit_code(e) == 2 { "inconclusive" } else { "failed" });
    row["error"] = json!(e.to_string());
}
