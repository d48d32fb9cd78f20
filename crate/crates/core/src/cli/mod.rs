//! The `qlog` command-line tool.
//!
//! Each subcommand fronts one library operation and prints a JSON object
//! with the fields `op`, `inputs`, `value`, `error_estimate`, `certified` and
//! `method`; tabular results can also be written as CSV. Exit codes: 0 on
//! success, 2 for invalid input, 1 for numerical failures.

pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::QError;
use crate::qlog::{lnq_coefficients, lnq_eval, lnq_qderivative_coeffs, LnqMethod};
use crate::qnum::{set_default_term_cap, Convention, Family, FunctionSpec, QParam, Series};
use crate::sumrules::{
    b_series_coeffs_with, exp_b_eval_with, q_bernoulli, q_dilog, q_zeta, series_index, sigma_series, z_index,
    BernoulliVariant, SigmaMethod,
};
use crate::zeroscape::{
    collision_point, continue_in_q, extract_contours, find_complex_zeros, find_real_zeros, find_turning_points,
    leading_zeros, positive_real_zeros, CollisionKind, CollisionOutcome, ContourField, RootKind, SeedStrategy,
    TurningPointRecord, TurningSearch, Window, ZeroRecord,
};
use output::{complex, csv_float, emit, record, to_csv, to_json};

#[derive(Debug, Parser)]
#[command(name = "qlog", version, about = "q-deformed exponentials, their logarithms, zero sum rules and zero geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Symmetric,
    Jackson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(alias = "e")]
    Exp,
    /// Exponential in the Jackson convention, whatever `--convention` says.
    Jackson,
    Cos,
    Sin,
    #[value(alias = "exp-derivative")]
    Derivative,
    #[value(alias = "exp-integral")]
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaMethodArg {
    Recursive,
    Direct,
    Series,
    Closed,
    Zeros,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LnqMethodArg {
    Recursive,
    Reversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairKindArg {
    Zero,
    Turning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Plain,
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    PaperFixtures,
}

#[derive(Debug, Clone, Args)]
pub struct Deform {
    /// Deformation parameter.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Symmetric)]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Exp)]
    pub family: FamilyArg,
    /// Order of the derivative or integral family.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
}

#[derive(Debug, Clone, Args)]
pub struct Io {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here (atomically) instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a family member (or a derivative) by its power series.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        #[arg(long, default_value_t = 0.0)]
        re: f64,
        #[arg(long, default_value_t = 0.0)]
        im: f64,
        /// Relative truncation tolerance.
        #[arg(long, default_value_t = 1e-16)]
        tol: f64,
        /// Derivative order.
        #[arg(long, default_value_t = 0)]
        order: u32,
        #[command(flatten)]
        io: Io,
    },
    /// Sum rule sigma_n over reciprocal powers of the zeros.
    #[command(allow_negative_numbers = true)]
    Sumrules {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        /// Index as a power of z (even for cos, odd and at least 3 for sin).
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = SigmaMethodArg::Recursive)]
        method: SigmaMethodArg,
        /// Number of zeros for `--method zeros`.
        #[arg(long = "M", default_value_t = 20)]
        m: usize,
        /// Report every index up to `n`.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Coefficients of ln_q(1+w), optionally evaluated at w.
    #[command(allow_negative_numbers = true)]
    Lnq {
        #[command(flatten)]
        deform: Deform,
        #[arg(long = "N", default_value_t = 30)]
        n: usize,
        #[arg(long, value_enum, default_value_t = LnqMethodArg::Recursive)]
        method: LnqMethodArg,
        #[arg(long)]
        w_re: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        w_im: f64,
        /// Report the q-derivative series instead.
        #[arg(long)]
        derivative: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Natural-logarithm series b(z) = -sum sigma_n z^n / n.
    #[command(allow_negative_numbers = true)]
    Bseries {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        #[arg(long = "N", default_value_t = 20)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SigmaMethodArg::Recursive)]
        method: SigmaMethodArg,
        #[arg(long)]
        z_re: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        z_im: f64,
        #[command(flatten)]
        io: Io,
    },
    /// Zeros: on a real window, or the smallest ones by modulus.
    #[command(allow_negative_numbers = true)]
    Zeros {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, requires = "x_max")]
        x_min: Option<f64>,
        #[arg(long, requires = "x_min")]
        x_max: Option<f64>,
        /// Only the complex pairs, followed from small q.
        #[arg(long, conflicts_with = "x_min")]
        complex: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Turning points (zeros of f') with branch values f(tau).
    #[command(allow_negative_numbers = true)]
    Turning {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, requires = "x_max")]
        x_min: Option<f64>,
        #[arg(long, requires = "x_min")]
        x_max: Option<f64>,
        #[command(flatten)]
        io: Io,
    },
    /// Deformation at which a pair of real roots collides.
    Collide {
        #[arg(long, value_enum, default_value_t = PairKindArg::Zero)]
        kind: PairKindArg,
        #[arg(long, default_value_t = 1)]
        pair: usize,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        #[command(flatten)]
        io: Io,
    },
    /// Follow all zeros or turning points in q.
    Track {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = PairKindArg::Zero)]
        kind: PairKindArg,
        #[arg(long, default_value_t = 0.1)]
        q_from: f64,
        #[arg(long, default_value_t = 0.3)]
        q_to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Zero-level curves of Re f or Im f with their images under f.
    #[command(allow_negative_numbers = true)]
    Contour {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        deform: Deform,
        #[arg(long)]
        re_min: f64,
        #[arg(long)]
        re_max: f64,
        #[arg(long)]
        im_min: f64,
        #[arg(long)]
        im_max: f64,
        #[arg(long = "grid-n", default_value_t = 64)]
        grid_n: usize,
        #[arg(long, value_enum, default_value_t = FieldArg::Im)]
        field: FieldArg,
        #[command(flatten)]
        io: Io,
    },
    /// q-Bernoulli numbers from the trigonometric sum rules.
    Bernoulli {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        deform: Deform,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
        #[command(flatten)]
        io: Io,
    },
    /// q-zeta value from the located trigonometric zeros.
    Zeta {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        deform: Deform,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
        #[arg(long, default_value_t = 40)]
        count: usize,
        #[command(flatten)]
        io: Io,
    },
    /// q-dilogarithm (Jackson convention, 0 < q < 1).
    #[command(allow_negative_numbers = true)]
    Dilog {
        #[arg(long)]
        re: f64,
        #[arg(long, default_value_t = 0.0)]
        im: f64,
        #[command(flatten)]
        deform: Deform,
        #[arg(long = "N", default_value_t = 2000)]
        n: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Run the fixture table; exits 1 if any row fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::PaperFixtures)]
        suite: Suite,
        /// Machine-readable output; the default is an aligned text table.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Failure of a command, mapped onto the exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(QError),
    Io(std::io::Error),
    /// The verification table has failing rows; it has been printed.
    Failed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(e) if e.is_domain() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "output: {e}"),
            CliError::Failed(n) => write!(f, "{n} verification row(s) failed"),
        }
    }
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn convention(c: ConventionArg) -> Convention {
    match c {
        ConventionArg::Symmetric => Convention::Symmetric,
        ConventionArg::Jackson => Convention::Jackson,
    }
}

fn qparam(deform: &Deform) -> CliResult<QParam> {
    QParam::new(deform.q, convention(deform.convention)).map_err(|e| CliError::Usage(format!("--q: {e}")))
}

fn build_spec(family: &FamilyArgs, deform: &Deform) -> CliResult<FunctionSpec> {
    let conv = match family.family {
        FamilyArg::Jackson => Convention::Jackson,
        _ => convention(deform.convention),
    };
    let qp = QParam::new(deform.q, conv).map_err(|e| CliError::Usage(format!("--q: {e}")))?;
    let fam = match family.family {
        FamilyArg::Exp | FamilyArg::Jackson => Family::Exp,
        FamilyArg::Cos => Family::Cos,
        FamilyArg::Sin => Family::Sin,
        FamilyArg::Derivative => Family::ExpDerivative(family.r),
        FamilyArg::Integral => Family::ExpIntegral(family.r),
    };
    Ok(FunctionSpec::new(fam, qp))
}

fn spec_json(spec: FunctionSpec) -> Value {
    json!({
        "family": spec.family.to_string(),
        "q": spec.qp.q(),
        "convention": spec.qp.convention().to_string(),
    })
}

fn sigma_method(m: SigmaMethodArg, zeros: usize) -> SigmaMethod {
    match m {
        SigmaMethodArg::Recursive => SigmaMethod::Recursive,
        SigmaMethodArg::Direct => SigmaMethod::Direct,
        SigmaMethodArg::Series => SigmaMethod::Series,
        SigmaMethodArg::Closed => SigmaMethod::ClosedForm,
        SigmaMethodArg::Zeros => SigmaMethod::ZeroPartialSum { zeros },
    }
}

fn require_json(io: &Io, op: &str) -> CliResult<()> {
    if io.format == Format::Csv {
        return Err(CliError::Usage(format!("--format csv is not available for {op}")));
    }
    Ok(())
}

fn kind_name(kind: RootKind) -> &'static str {
    match kind {
        RootKind::RealAxis => "real_axis",
        RootKind::ConjugatePairUpper => "conjugate_pair_upper",
        RootKind::ConjugatePairLower => "conjugate_pair_lower",
    }
}

fn zero_json(z: &ZeroRecord) -> Value {
    json!({
        "index": z.index,
        "location": complex(z.location),
        "kind": kind_name(z.kind),
        "residual": z.residual,
        "local_scale": z.local_scale,
        "location_error": z.location_error,
        "certified": z.certified,
    })
}

fn zero_rows(zeros: &[ZeroRecord]) -> Vec<Vec<String>> {
    zeros
        .iter()
        .map(|z| {
            vec![
                z.index.to_string(),
                csv_float(z.location.re),
                csv_float(z.location.im),
                kind_name(z.kind).to_string(),
                csv_float(z.location_error),
                z.certified.to_string(),
            ]
        })
        .collect()
}

fn turning_json(t: &TurningPointRecord) -> Value {
    let mut v = zero_json(&t.root);
    v["branch_value"] = complex(t.branch_value);
    v
}

fn finish(map: Map<String, Value>, io: &Io) -> CliResult<()> {
    emit(&to_json(&Value::Object(map)), io.output.as_deref())?;
    Ok(())
}

/// Parse the process arguments, run, and return the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(CliError::Failed(n)) => {
            eprintln!("qlog: {n} verification row(s) failed");
            1
        }
        Err(e) => {
            eprintln!("qlog: {e}");
            e.exit_code()
        }
    }
}

fn apply_environment() -> CliResult<()> {
    if let Ok(raw) = std::env::var("QLOG_TERM_CAP") {
        let cap: usize = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("QLOG_TERM_CAP must be a positive integer, got {raw:?}")))?;
        set_default_term_cap(cap).map_err(|e| CliError::Usage(format!("QLOG_TERM_CAP: {e}")))?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    apply_environment()?;
    match cli.command {
        Command::Eval { family, deform, re, im, tol, order, io } => {
            require_json(&io, "eval")?;
            let spec = build_spec(&family, &deform)?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")));
            }
            let z = Complex64::new(re, im);
            let v = Series::new(spec).eval_derivative(z, order, tol)?;
            let mut m = record(
                "eval",
                json!({ "spec": spec_json(spec), "z": complex(z), "order": order, "tol": tol }),
                complex(v.value),
                json!(v.error_estimate()),
                true,
                "series",
            );
            m.insert("tail_bound".into(), json!(v.tail_bound));
            m.insert("terms_used".into(), json!(v.terms_used));
            finish(m, &io)
        }
        Command::Sumrules { family, deform, n, method, m, all, io } => {
            require_json(&io, "sumrules")?;
            let spec = build_spec(&family, &deform)?;
            let top = series_index(spec.family, n).map_err(|e| CliError::Usage(format!("--n: {e}")))?;
            let method = sigma_method(method, m);
            let (values, errors) = sigma_series(spec, top, method)?;
            let certified = errors[top].is_finite();
            let (value, error) = if all {
                let idx: Vec<Value> = (1..=top)
                    .map(|k| json!({ "n": z_index(spec.family, k), "sigma": values[k], "error_estimate": errors[k] }))
                    .collect();
                (Value::Array(idx), json!(errors[top]))
            } else {
                (json!(values[top]), json!(errors[top]))
            };
            let out = record(
                "sumrules",
                json!({ "spec": spec_json(spec), "n": n, "M": m, "all": all }),
                value,
                error,
                certified,
                method.name(),
            );
            finish(out, &io)
        }
        Command::Lnq { deform, n, method, w_re, w_im, derivative, io } => {
            let qp = qparam(&deform)?;
            let method = match method {
                LnqMethodArg::Recursive => LnqMethod::Recursive,
                LnqMethodArg::Reversion => LnqMethod::Reversion,
            };
            let mut coeffs = lnq_coefficients(n, qp, method)?;
            if derivative {
                coeffs = lnq_qderivative_coeffs(&coeffs)?;
            }
            if io.format == Format::Csv {
                let rows: Vec<Vec<String>> = (0..coeffs.coeffs.len())
                    .map(|k| vec![k.to_string(), csv_float(coeffs.coeffs[k]), csv_float(coeffs.errors[k])])
                    .collect();
                emit(&to_csv(&["n", "coefficient", "error"], &[rows]), io.output.as_deref())?;
                return Ok(());
            }
            let method_name = match method {
                LnqMethod::Recursive => "recursive",
                LnqMethod::Reversion => "reversion",
            };
            let mut inputs = json!({ "q": qp.q(), "convention": qp.convention().to_string(), "N": n, "derivative": derivative });
            let (value, error, certified) = match w_re {
                Some(re) => {
                    let w = Complex64::new(re, w_im);
                    inputs["w"] = complex(w);
                    let v = lnq_eval(w, &coeffs)?;
                    (complex(v.value), json!(v.last_term), v.certified)
                }
                None => (json!(coeffs.coeffs), json!(coeffs.errors), true),
            };
            let mut out = record("lnq", inputs, value, error, certified, method_name);
            if w_re.is_some() {
                out.insert("coefficients".into(), json!(coeffs.coeffs));
            }
            finish(out, &io)
        }
        Command::Bseries { family, deform, n, method, z_re, z_im, io } => {
            require_json(&io, "bseries")?;
            let spec = build_spec(&family, &deform)?;
            let method = sigma_method(method, 20);
            let coeffs = b_series_coeffs_with(spec, n, method)?;
            let mut inputs = json!({ "spec": spec_json(spec), "N": n });
            let (value, error, certified) = match z_re {
                Some(re) => {
                    let z = Complex64::new(re, z_im);
                    inputs["z"] = complex(z);
                    let v = exp_b_eval_with(&coeffs, z)?;
                    (complex(v.value), json!(v.last_term), v.certified)
                }
                None => (json!(coeffs.coeffs), json!(coeffs.errors), true),
            };
            finish(record("bseries", inputs, value, error, certified, method.name()), &io)
        }
        Command::Zeros { family, deform, count, x_min, x_max, complex: only_complex, io } => {
            let spec = build_spec(&family, &deform)?;
            let (zeros, method, truncated) = match (x_min, x_max) {
                (Some(a), Some(b)) => {
                    let found = find_real_zeros(spec, a, b, count)?;
                    (found.zeros, "real-scan", found.truncated)
                }
                _ if only_complex => (find_complex_zeros(spec, &SeedStrategy::Continuation, count)?, "continuation", false),
                _ if matches!(spec.family, Family::Cos | Family::Sin) => {
                    (positive_real_zeros(spec, count)?, "real-scan", false)
                }
                _ => (leading_zeros(spec, count)?, "argument-principle", false),
            };
            if io.format == Format::Csv {
                let text = to_csv(&["index", "re", "im", "kind", "location_error", "certified"], &[zero_rows(&zeros)]);
                emit(&text, io.output.as_deref())?;
                return Ok(());
            }
            let certified = zeros.iter().all(|z| z.certified);
            let errors: Vec<f64> = zeros.iter().map(|z| z.location_error).collect();
            let mut out = record(
                "zeros",
                json!({ "spec": spec_json(spec), "count": count, "x_min": x_min, "x_max": x_max, "complex": only_complex }),
                Value::Array(zeros.iter().map(zero_json).collect()),
                json!(errors),
                certified,
                method,
            );
            out.insert("truncated".into(), json!(truncated));
            finish(out, &io)
        }
        Command::Turning { family, deform, count, x_min, x_max, io } => {
            let spec = build_spec(&family, &deform)?;
            let search = match (x_min, x_max) {
                (Some(x_min), Some(x_max)) => TurningSearch::Window { x_min, x_max },
                _ => TurningSearch::Continuation,
            };
            let tps = find_turning_points(spec, &search, count)?;
            if io.format == Format::Csv {
                let rows: Vec<Vec<String>> = tps
                    .iter()
                    .map(|t| {
                        vec![
                            t.root.index.to_string(),
                            csv_float(t.root.location.re),
                            csv_float(t.root.location.im),
                            csv_float(t.branch_value.re),
                            csv_float(t.branch_value.im),
                        ]
                    })
                    .collect();
                emit(&to_csv(&["index", "re", "im", "b_re", "b_im"], &[rows]), io.output.as_deref())?;
                return Ok(());
            }
            let method = match search {
                TurningSearch::Window { .. } => "real-scan",
                TurningSearch::Continuation => "continuation",
            };
            let errors: Vec<f64> = tps.iter().map(|t| t.root.location_error).collect();
            let out = record(
                "turning",
                json!({ "spec": spec_json(spec), "count": count, "x_min": x_min, "x_max": x_max }),
                Value::Array(tps.iter().map(turning_json).collect()),
                json!(errors),
                tps.iter().all(|t| t.root.certified),
                method,
            );
            finish(out, &io)
        }
        Command::Collide { kind, pair, family, deform, io } => {
            require_json(&io, "collide")?;
            let spec = build_spec(&family, &deform)?;
            let kind = match kind {
                PairKindArg::Zero => CollisionKind::ZeroPair(pair),
                PairKindArg::Turning => CollisionKind::TurningPair(pair),
            };
            let outcome = collision_point(spec, kind)?;
            let inputs = json!({ "spec": spec_json(spec), "kind": kind, "pair": pair });
            let out = match outcome {
                CollisionOutcome::Collision(r) => {
                    let mut m = record(
                        "collide",
                        inputs,
                        json!({ "q_star": r.q_star, "location": r.location }),
                        json!(r.bracket_width),
                        r.bracket_width <= 1e-4,
                        "bisection+newton",
                    );
                    m.insert("collision".into(), json!(true));
                    m
                }
                CollisionOutcome::NoCollision { q_min, q_max } => {
                    let mut m = record(
                        "collide",
                        inputs,
                        Value::Null,
                        Value::Null,
                        true,
                        "sampled-count",
                    );
                    m.insert("collision".into(), json!(false));
                    m.insert("q_range".into(), json!([q_min, q_max]));
                    m
                }
            };
            finish(out, &io)
        }
        Command::Track { family, kind, q_from, q_to, steps, io } => {
            let deform = Deform { q: q_from, convention: ConventionArg::Symmetric };
            let spec = build_spec(&family, &deform)?;
            let order = match kind {
                PairKindArg::Zero => 0,
                PairKindArg::Turning => 1,
            };
            let t = continue_in_q(spec, order, q_from, q_to, steps)?;
            if io.format == Format::Csv {
                let rows: Vec<Vec<String>> = t
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            csv_float(r.q),
                            r.id.to_string(),
                            csv_float(r.location.re),
                            csv_float(r.location.im),
                            kind_name(r.kind).to_string(),
                        ]
                    })
                    .collect();
                emit(&to_csv(&["q", "id", "re", "im", "kind"], &[rows]), io.output.as_deref())?;
                return Ok(());
            }
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| json!({ "q": r.q, "id": r.id, "location": complex(r.location), "kind": kind_name(r.kind) }))
                .collect();
            let mut out = record(
                "track",
                json!({ "spec": spec_json(spec), "kind": order, "q_from": q_from, "q_to": q_to, "steps": steps }),
                Value::Array(rows),
                Value::Null,
                !t.truncated,
                "predictor-corrector",
            );
            out.insert("events".into(), serde_json::to_value(&t.events).unwrap_or(Value::Null));
            out.insert("q_reached".into(), json!(t.q_reached));
            out.insert("truncated".into(), json!(t.truncated));
            finish(out, &io)
        }
        Command::Contour { family, deform, re_min, re_max, im_min, im_max, grid_n, field, io } => {
            let spec = build_spec(&family, &deform)?;
            let window = Window { re_min, re_max, im_min, im_max };
            let field = match field {
                FieldArg::Re => ContourField::ReZero,
                FieldArg::Im => ContourField::ImZero,
            };
            let set = extract_contours(spec, window, grid_n, field)?;
            if io.format == Format::Csv {
                let blocks: Vec<Vec<Vec<String>>> = set
                    .polylines
                    .iter()
                    .zip(&set.w_images)
                    .map(|(line, images)| {
                        line.iter()
                            .zip(images)
                            .map(|(z, w)| vec![csv_float(z.re), csv_float(z.im), csv_float(w.re), csv_float(w.im)])
                            .collect()
                    })
                    .collect();
                emit(&to_csv(&["x", "y", "u", "v"], &blocks), io.output.as_deref())?;
                return Ok(());
            }
            let lines: Vec<Value> = set
                .polylines
                .iter()
                .zip(&set.w_images)
                .map(|(line, images)| {
                    json!({
                        "z": line.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                        "w": images.iter().map(|w| json!([w.re, w.im])).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let cell = ((re_max - re_min) / grid_n as f64).max((im_max - im_min) / grid_n as f64);
            let out = record(
                "contour",
                json!({ "spec": spec_json(spec), "window": [re_min, re_max, im_min, im_max], "grid_n": grid_n, "field": field }),
                Value::Array(lines),
                json!(cell),
                true,
                "marching-squares",
            );
            finish(out, &io)
        }
        Command::Bernoulli { n, deform, variant, io } => {
            require_json(&io, "bernoulli")?;
            let qp = qparam(&deform)?;
            let v = match variant {
                VariantArg::Plain => BernoulliVariant::Plain,
                VariantArg::Tilde => BernoulliVariant::Tilde,
            };
            let value = q_bernoulli(n, qp, v)?;
            let out = record(
                "bernoulli",
                json!({ "n": n, "q": qp.q(), "convention": qp.convention().to_string(), "variant": v }),
                json!(value),
                json!(4.0 * f64::EPSILON * value.abs()),
                true,
                "series",
            );
            finish(out, &io)
        }
        Command::Zeta { p, deform, variant, count, io } => {
            require_json(&io, "zeta")?;
            let qp = qparam(&deform)?;
            let v = match variant {
                VariantArg::Plain => BernoulliVariant::Plain,
                VariantArg::Tilde => BernoulliVariant::Tilde,
            };
            let z = q_zeta(p, qp, v, count)?;
            let mut out = record(
                "zeta",
                json!({ "p": p, "q": qp.q(), "convention": qp.convention().to_string(), "variant": v, "count": count }),
                json!(z.value),
                json!(z.tail_estimate),
                z.tail_estimate.is_finite(),
                "zeros",
            );
            out.insert("zeros_used".into(), json!(z.zeros_used));
            finish(out, &io)
        }
        Command::Dilog { re, im, deform, n, io } => {
            require_json(&io, "dilog")?;
            let qp = qparam(&deform)?;
            let z = Complex64::new(re, im);
            let v = q_dilog(z, qp, n)?;
            let out = record(
                "dilog",
                json!({ "z": complex(z), "q": qp.q(), "convention": qp.convention().to_string(), "N": n }),
                complex(v.value),
                json!(v.last_term),
                v.certified,
                "series",
            );
            finish(out, &io)
        }
        Command::Verify { suite: Suite::PaperFixtures, format, output } => {
            let rows = verify::paper_fixtures();
            let failed = rows.iter().filter(|r| !r.pass).count();
            let text = match format {
                None => verify::to_table(&rows),
                Some(Format::Json) => to_json(&verify::to_json_value(&rows)),
                Some(Format::Csv) => verify::to_csv_table(&rows),
            };
            emit(&text, output.as_deref())?;
            if failed > 0 {
                return Err(CliError::Failed(failed));
            }
            Ok(())
        }
    }
}
