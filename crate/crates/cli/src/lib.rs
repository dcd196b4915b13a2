//! Command surface for `mvdyn`. [`run_command`] parses arguments, runs one
//! command and returns a [`Report`] with the exit code: 0 for an affirmative
//! decision, 1 for a negative one, 2 for usage or validation errors.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use mvdyn_core::freeprod::{lift_dual_check, mobius_to_u1n, BallMobius, U1nMatrix};
use mvdyn_core::quotient::{entry_signature, local_signature};
use mvdyn_core::reps::{build_truncated_fock, check_ck_relations, decide_tensor_vs_semicrossed, TensorDecision};
use mvdyn_core::semicrossed::{partition_isomorphism, SemicrossedElement};
use mvdyn_core::{
    decide_conjugate, decide_partition, decide_piecewise, verify_partition_witness, FiniteSystem, PartitionWitness,
};

pub mod format;

pub use format::{canonical_text, parse_system, SystemFile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("format error: {0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] mvdyn_core::Error),
}

/// Machine-readable command outcome. Fields serialize in declaration order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    /// `true`/`false` for a decision, `null` on error.
    pub decision: Option<bool>,
    pub summary: String,
    pub witness: Option<Value>,
    pub timing_ms: f64,
    pub version: String,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn exit_code(&self) -> i32 {
        match self.decision {
            Some(true) => 0,
            Some(false) => 1,
            None => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mvdyn", version, about = "Conjugacy and operator-algebra checks for finite multivariable systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Conjugate,
    Piecewise,
    Partition,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide conjugacy, piecewise conjugacy or partition conjugacy.
    Check {
        #[arg(long, value_enum)]
        mode: Mode,
        a: PathBuf,
        b: PathBuf,
        /// Allow a global permutation of the maps (conjugate mode).
        #[arg(long)]
        recolor: bool,
    },
    /// Replay a partition witness against two systems.
    Verify { a: PathBuf, b: PathBuf, witness: PathBuf },
    /// Entry signature of a system, or the local signature at one point.
    Signature {
        sys: PathBuf,
        #[arg(long)]
        point: Option<usize>,
    },
    /// Whether the tensor algebra equals the semicrossed product.
    TensorVsSemicrossed { sys: PathBuf },
    /// Build the isomorphism induced by a partition witness.
    IsoBuild { a: PathBuf, b: PathBuf },
    /// Check the noncommutative lift of a U(1,n) matrix against its ball action.
    Lift {
        #[arg(long)]
        u1n: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Build a truncated Fock Cuntz–Krieger family and check its relations.
    Fock {
        sys: PathBuf,
        /// Comma-separated points, e.g. `0,1`.
        #[arg(long)]
        subset: String,
        #[arg(long)]
        depth: usize,
    },
    /// Run the built-in worked examples.
    Selftest,
}

struct Outcome {
    decision: bool,
    summary: String,
    witness: Option<Value>,
}

fn outcome(decision: bool, summary: impl Into<String>, witness: Option<Value>) -> Outcome {
    Outcome { decision, summary: summary.into(), witness }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_system(path: &Path) -> Result<FiniteSystem, CliError> {
    parse_system(&read(path)?).map(|f| f.system).map_err(|e| match e {
        CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

fn element_json(a: &SemicrossedElement) -> Value {
    Value::Array(a.terms().iter().map(|(w, f)| json!({ "word": w.letters(), "coefficients": to_json(f) })).collect())
}

/// Runs one command. `argv[0]` is the program name.
pub fn run_command<I, S>(argv: I) -> (Report, i32)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let start = Instant::now();
    let result = match Cli::try_parse_from(&argv) {
        Ok(cli) => dispatch(cli.command),
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            Ok(outcome(true, e.to_string(), None))
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let command = argv.iter().skip(1).cloned().collect();
    let report = match result {
        Ok(o) => Report {
            command,
            decision: Some(o.decision),
            summary: o.summary,
            witness: o.witness,
            timing_ms,
            version: VERSION.into(),
        },
        Err(e) => Report { command, decision: None, summary: e.to_string(), witness: None, timing_ms, version: VERSION.into() },
    };
    let code = report.exit_code();
    (report, code)
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Check { mode, a, b, recolor } => check(mode, &load_system(&a)?, &load_system(&b)?, recolor),
        Command::Verify { a, b, witness } => {
            // Either a bare witness or a whole `check --mode partition` report.
            let bad = |e: serde_json::Error| CliError::Format(format!("{}: {e}", witness.display()));
            let mut v: Value = serde_json::from_str(&read(&witness)?).map_err(bad)?;
            if let Some(inner) = v.get_mut("witness") {
                v = inner.take();
            }
            let w: PartitionWitness = serde_json::from_value(v).map_err(bad)?;
            let rep = verify_partition_witness(&load_system(&a)?, &load_system(&b)?, &w)?;
            let ok = rep.passed();
            Ok(outcome(ok, if ok { "witness verified" } else { "witness rejected" }, Some(to_json(&rep))))
        }
        Command::Signature { sys, point } => {
            let s = load_system(&sys)?;
            match point {
                Some(x) => {
                    let sig = local_signature(&s, x)?;
                    Ok(outcome(true, format!("local signature at {x}: {sig}"), Some(to_json(&sig))))
                }
                None => {
                    let all: Vec<usize> = s.points().collect();
                    let sig = entry_signature(&s.restrict(&all)?);
                    let local = s.points().map(|x| local_signature(&s, x)).collect::<Result<Vec<_>, _>>()?;
                    Ok(outcome(true, format!("entry signature {sig}"), Some(json!({ "system": sig, "local": local }))))
                }
            }
        }
        Command::TensorVsSemicrossed { sys } => {
            let s = Arc::new(load_system(&sys)?);
            let d = decide_tensor_vs_semicrossed(&s)?;
            let summary = match &d {
                TensorDecision::Isomorphic { .. } => "ranges pairwise disjoint: tensor algebra equals semicrossed product".into(),
                TensorDecision::NotIsomorphic { overlap, row_norm, .. } => format!(
                    "ranges of maps {} and {} meet at point {}; nest representation has row norm {row_norm:.12}",
                    overlap.first, overlap.second, overlap.point
                ),
            };
            Ok(outcome(d.is_isomorphic(), summary, Some(to_json(&d))))
        }
        Command::IsoBuild { a, b } => {
            let (a, b) = (Arc::new(load_system(&a)?), Arc::new(load_system(&b)?));
            let Some(w) = decide_partition(&a, &b)? else {
                return Ok(outcome(false, "no partition witness", None));
            };
            let (phi, theta) = partition_isomorphism(&a, &b, &w)?;
            let phi_gens: Vec<Value> = phi.image_of_generator.iter().map(element_json).collect();
            let theta_gens: Vec<Value> = theta.image_of_generator.iter().map(element_json).collect();
            Ok(outcome(
                true,
                "isomorphism built from partition witness",
                Some(json!({ "partition": to_json(&w), "phi_generators": phi_gens, "theta_generators": theta_gens })),
            ))
        }
        Command::Lift { u1n, degree, samples, seed } => {
            let x = parse_u1n(&read(&u1n)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<Complex64>> = (0..samples).map(|_| sample_ball(x.n(), 0.9, &mut rng)).collect();
            let check = lift_dual_check(&x, degree, &pts)?;
            let ok = check.within_tail(1e-10);
            let summary = format!(
                "best convention {:?}/{:?}: deviation {:.3e}, certified tail {:.3e}",
                check.variant, check.pairing, check.max_deviation, check.certified_tail
            );
            Ok(outcome(ok, summary, Some(to_json(&check))))
        }
        Command::Fock { sys, subset, depth } => {
            let s = load_system(&sys)?;
            let pts = subset
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|e| CliError::Usage(format!("--subset {p:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let fam = build_truncated_fock(&s.restrict(&pts)?.colored_graph(), depth)?;
            let rep = check_ck_relations(&fam);
            let ok = rep.passed();
            let summary = format!("dimension {}, relations {}", fam.dim(), if ok { "hold" } else { "fail" });
            Ok(outcome(ok, summary, Some(to_json(&rep))))
        }
        Command::Selftest => selftest(),
    }
}

fn check(mode: Mode, a: &FiniteSystem, b: &FiniteSystem, recolor: bool) -> Result<Outcome, CliError> {
    Ok(match mode {
        Mode::Conjugate => match decide_conjugate(a, b, recolor)? {
            Some(w) => outcome(true, "conjugate", Some(to_json(&w))),
            None => outcome(false, "no conjugacy witness", None),
        },
        Mode::Piecewise => match decide_piecewise(a, b)? {
            Some(w) => outcome(true, "piecewise conjugate", Some(to_json(&w))),
            None => outcome(false, "no piecewise witness", None),
        },
        Mode::Partition => match decide_partition(a, b)? {
            Some(w) => outcome(true, "partition conjugate", Some(to_json(&w))),
            None => outcome(false, "no partition witness", None),
        },
    })
}

fn sample_ball(n: usize, radius: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / (2.0 * n as f64));
    v.into_iter().map(|c| c * (r / norm)).collect()
}

fn complex(v: &Value, at: &str) -> Result<Complex64, CliError> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(CliError::Format(format!("{at}: expected [re, im]"))),
        },
        _ => Err(CliError::Format(format!("{at}: expected a number or [re, im]"))),
    }
}

fn complex_matrix(v: &Value, at: &str) -> Result<nalgebra::DMatrix<Complex64>, CliError> {
    let rows = v.as_array().ok_or_else(|| CliError::Format(format!("{at}: expected a list of rows")))?;
    let n = rows.len();
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|row| row.len() == n).ok_or_else(|| CliError::Format(format!("{at}[{r}]: expected {n} entries")))?;
        for (c, e) in row.iter().enumerate() {
            m[(r, c)] = complex(e, &format!("{at}[{r}][{c}]"))?;
        }
    }
    Ok(m)
}

/// `{"matrix": [[..]]}` gives `X` directly; `{"a": [..], "u": [[..]]}` gives
/// the ball automorphism `λ ↦ U φ_a(λ)`. Entries are numbers or `[re, im]`.
pub fn parse_u1n(text: &str) -> Result<U1nMatrix, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Format(format!("line {}: {e}", e.line())))?;
    if let Some(m) = v.get("matrix") {
        return Ok(U1nMatrix::new(complex_matrix(m, "matrix")?)?);
    }
    let a = v
        .get("a")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Format("expected field `matrix`, or fields `a` and `u`".into()))?
        .iter()
        .enumerate()
        .map(|(k, e)| complex(e, &format!("a[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let u = match v.get("u") {
        Some(u) => complex_matrix(u, "u")?,
        None => nalgebra::DMatrix::identity(a.len(), a.len()),
    };
    Ok(mobius_to_u1n(&BallMobius::new(a, u)?))
}

fn selftest() -> Result<Outcome, CliError> {
    let sys = |size, t: Vec<Vec<usize>>| FiniteSystem::new(size, t);
    let dk_s = sys(2, vec![vec![0, 1], vec![1, 0]])?;
    let dk_t = sys(2, vec![vec![0, 0], vec![1, 1]])?;
    let du = Arc::new(sys(4, vec![vec![1, 2, 2, 2], vec![1, 3, 3, 3]])?);
    let pa = sys(4, vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]])?;
    let pb = sys(4, vec![vec![1, 0, 3, 2], vec![0, 1, 2, 3]])?;
    let mut results: Vec<(&str, bool)> = vec![
        ("doubly covered pair: piecewise conjugate", decide_piecewise(&dk_s, &dk_t)?.is_some()),
        ("doubly covered pair: not partition conjugate", decide_partition(&dk_s, &dk_t)?.is_none()),
        ("doubly covered pair: not conjugate", decide_conjugate(&dk_s, &dk_t, true)?.is_none()),
        ("signatures differ at 0", local_signature(&dk_s, 0)? != local_signature(&dk_t, 0)?),
        ("overlapping ranges: tensor algebra differs", !decide_tensor_vs_semicrossed(&du)?.is_isomorphic()),
    ];
    let w = decide_partition(&pa, &pb)?;
    results.push(("permuted pair: partition witness replays", match &w {
        Some(w) => verify_partition_witness(&pa, &pb, w)?.passed(),
        None => false,
    }));
    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let witness = Value::Array(results.iter().map(|(name, ok)| json!({ "check": name, "passed": ok })).collect());
    let summary = if failed.is_empty() { format!("{} checks passed", results.len()) } else { format!("failed: {}", failed.join("; ")) };
    Ok(outcome(failed.is_empty(), summary, Some(witness)))
}
