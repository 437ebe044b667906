//! Argument parsing and command dispatch.
//!
//! Exit codes: 0 when the relation holds or the operation succeeded, 1 when
//! the relation fails (the verdict is still printed), 2 on usage, parse or
//! input errors. Stdout only ever carries JSON; diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use psdorder_core::canonical::{congruence_canonical, inertia, sim_congruence};
use psdorder_core::linmodels::{blue_check, mc_quadratic_forms, model_compare, qform_rank_criterion};
use psdorder_core::orders::{adjacent, minus_leq, order_leq, Certificate, MinusMethod, OrderRelation};
use psdorder_core::preservers::{
    congruence_map, fit_congruence, identity_map, preserves_order, projector_fixed_point_suite,
    rank_collapse, trace_inflation, MatrixMap,
};
use psdorder_core::{Error, PsdMatrix, ToleranceConfig};
use serde_json::{json, Value};

use crate::io::{self, IoError};
use crate::model::read_model;
use crate::output;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "psdorder",
    version,
    about = "Decide matrix partial orders on the PSD cone and related model checks"
)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,

    /// Compact single-line JSON on stdout (also for usage errors).
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Relative rank cutoff (eigenvalues with |λ| <= tol * max|λ| count as zero).
    #[arg(long, global = true, env = "PSDORDER_TOL_RANK", value_name = "TOL")]
    tol_rank: Option<f64>,
    /// Relative slack of PSD tests.
    #[arg(long, global = true, env = "PSDORDER_TOL_PSD", value_name = "TOL")]
    tol_psd: Option<f64>,
    /// Idempotency and {0,1}-spectrum slack.
    #[arg(long, global = true, env = "PSDORDER_TOL_IDEM", value_name = "TOL")]
    tol_idem: Option<f64>,
    /// Reconstruction and equality slack.
    #[arg(long, global = true, env = "PSDORDER_TOL_RECON", value_name = "TOL")]
    tol_recon: Option<f64>,
}

impl TolArgs {
    fn config(&self) -> Result<ToleranceConfig, Error> {
        let mut t = ToleranceConfig::default();
        if let Some(v) = self.tol_rank {
            t = t.with_rank_rel_tol(v);
        }
        if let Some(v) = self.tol_psd {
            t = t.with_psd_tol(v);
        }
        if let Some(v) = self.tol_idem {
            t = t.with_idem_tol(v);
        }
        if let Some(v) = self.tol_recon {
            t = t.with_recon_tol(v);
        }
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order predicates.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Inertia, canonical forms and simultaneous congruence.
    #[command(subcommand)]
    Canon(CanonCmd),
    /// Order preservation of maps and recovery of congruence factors.
    #[command(subcommand)]
    Preserver(PreserverCmd),
    /// Linear model comparison and BLUE checks.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Quadratic forms in a normal vector.
    #[command(subcommand)]
    Qform(QformCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RelationArg {
    Lowner,
    Minus,
    Star,
    LeftStar,
    RightStar,
}

impl From<RelationArg> for OrderRelation {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::Lowner => OrderRelation::Lowner,
            RelationArg::Minus => OrderRelation::Minus,
            RelationArg::Star => OrderRelation::Star,
            RelationArg::LeftStar => OrderRelation::LeftStar,
            RelationArg::RightStar => OrderRelation::RightStar,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Rank,
    Image,
    Ginv,
}

impl From<MethodArg> for MinusMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Rank => MinusMethod::Rank,
            MethodArg::Image => MinusMethod::Image,
            MethodArg::Ginv => MinusMethod::Ginv,
        }
    }
}

#[derive(Debug, Subcommand)]
enum OrderCmd {
    /// Decide A ≤ B for the chosen relation.
    Check {
        #[arg(long)]
        relation: RelationArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Decide A ≤⁻ B by one of its three characterizations.
    Minus {
        #[arg(long, default_value = "rank")]
        method: MethodArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Decide whether rank(A - B) = 1.
    Adjacent { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
enum CanonCmd {
    /// Sylvester inertia (n_plus, n_minus, n_zero).
    Inertia { a: PathBuf },
    /// S with A = S diag(I_p, -I_q, 0) Sᵗ.
    Canonical {
        a: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S with A = S E_r Sᵗ and B = S E_s Sᵗ.
    Simcong {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum PreserverCmd {
    /// Sample pairs and check both directions of order preservation.
    Verify {
        /// congruence:S.csv, identity, trace-inflation or rank-collapse.
        #[arg(long)]
        map: String,
        #[arg(long)]
        relation: RelationArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimension for maps that do not carry one.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Check that projectors map to projectors of the same rank.
    Projectors {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Recover S from probe pairs A_<k>.csv / B_<k>.csv in a directory.
    Fit {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ModelCmd {
    /// Exit 0 iff the first model is at least as good as the second.
    Compare { m1: PathBuf, m2: PathBuf },
    /// Check whether Ly is the BLUE of Xβ.
    Blue {
        #[arg(long)]
        estimator: PathBuf,
        model: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum QformCmd {
    /// Rank criterion for independent chi-squared forms, optional Monte Carlo.
    Check {
        #[arg(long, value_delimiter = ',', required = true)]
        forms: Vec<PathBuf>,
        #[arg(long)]
        cov: PathBuf,
        #[arg(long)]
        mean: PathBuf,
        /// Number of Monte Carlo samples.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Io(IoError::Read { .. } | IoError::Write { .. }) => "IoError",
            CliError::Io(IoError::Parse { .. }) => "ParseError",
            CliError::Io(IoError::Matrix { source, .. }) => error_kind(source),
            CliError::Core(e) => error_kind(e),
        }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::NotSquare { .. } => "NotSquare",
        Error::Empty => "Empty",
        Error::NonFinite { .. } => "NonFinite",
        Error::NotSymmetric { .. } => "NotSymmetric",
        Error::NotPsd { .. } => "NotPsd",
        Error::NonConvergence { .. } => "NonConvergence",
        Error::SingularMatrix { .. } => "SingularS",
        Error::NotMinusComparable { .. } => "NotMinusComparable",
        Error::OutOfRange { .. } => "OutOfRange",
        Error::InvalidTolerance { .. } => "InvalidTolerance",
        Error::InconsistentSamples(_) => "InconsistentSamples",
        Error::PreconditionViolated(_) => "PreconditionViolated",
    }
}

struct Outcome {
    body: Value,
    code: i32,
}

fn holds(body: Value, ok: bool) -> Outcome {
    Outcome {
        body,
        code: if ok { EXIT_OK } else { EXIT_FAILS },
    }
}

struct Ctx<'a> {
    tol: ToleranceConfig,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn sym(&mut self, p: &Path) -> Result<psdorder_core::SymMatrix, CliError> {
        Ok(io::read_matrix(p, &self.tol, self.stderr)?)
    }

    fn psd(&mut self, p: &Path) -> Result<PsdMatrix, CliError> {
        Ok(io::read_psd(p, &self.tol, self.stderr)?)
    }
}

fn emit(out: &mut dyn Write, v: &Value, compact: bool) {
    let text = if compact {
        serde_json::to_string(v)
    } else {
        serde_json::to_string_pretty(v)
    }
    .expect("JSON values serialize");
    let _ = writeln!(out, "{text}");
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let compact = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let _ = write!(stderr, "{}", e.render());
            if compact {
                emit(
                    stdout,
                    &json!({
                        "error": "UsageError",
                        "message": e.kind().to_string(),
                        "version": output::VERSION,
                    }),
                    true,
                );
            }
            return EXIT_USAGE;
        }
    };

    let tol = match cli.tol.config() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            emit(
                stdout,
                &json!({ "error": error_kind(&e), "message": e.to_string(), "version": output::VERSION }),
                compact,
            );
            return EXIT_USAGE;
        }
    };
    let name = command_name(&cli.command);
    let mut ctx = Ctx { tol, stderr };
    let (body, code) = match dispatch(&cli.command, &mut ctx) {
        Ok(o) => (o.body, o.code),
        Err(e) => {
            let _ = writeln!(ctx.stderr, "error: {e}");
            (
                json!({ "error": e.kind(), "message": e.to_string() }),
                EXIT_USAGE,
            )
        }
    };
    emit(stdout, &output::envelope(name, body, &tol), compact);
    code
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Order(OrderCmd::Check { .. }) => "order check",
        Command::Order(OrderCmd::Minus { .. }) => "order minus",
        Command::Order(OrderCmd::Adjacent { .. }) => "order adjacent",
        Command::Canon(CanonCmd::Inertia { .. }) => "canon inertia",
        Command::Canon(CanonCmd::Canonical { .. }) => "canon canonical",
        Command::Canon(CanonCmd::Simcong { .. }) => "canon simcong",
        Command::Preserver(PreserverCmd::Verify { .. }) => "preserver verify",
        Command::Preserver(PreserverCmd::Projectors { .. }) => "preserver projectors",
        Command::Preserver(PreserverCmd::Fit { .. }) => "preserver fit",
        Command::Model(ModelCmd::Compare { .. }) => "model compare",
        Command::Model(ModelCmd::Blue { .. }) => "model blue",
        Command::Qform(QformCmd::Check { .. }) => "qform check",
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    match cmd {
        Command::Order(c) => order(c, ctx),
        Command::Canon(c) => canon(c, ctx),
        Command::Preserver(c) => preserver(c, ctx),
        Command::Model(c) => model(c, ctx),
        Command::Qform(c) => qform(c, ctx),
    }
}

fn order(cmd: &OrderCmd, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    match cmd {
        OrderCmd::Check { relation, a, b } => {
            let (a, b) = (ctx.sym(a)?, ctx.sym(b)?);
            let v = order_leq(&a, &b, (*relation).into(), &ctx.tol)?;
            Ok(holds(output::verdict(&v), v.holds))
        }
        OrderCmd::Minus { method, a, b } => {
            let (a, b) = (ctx.sym(a)?, ctx.sym(b)?);
            let v = minus_leq(&a, &b, (*method).into(), &ctx.tol)?;
            Ok(holds(output::verdict(&v), v.holds))
        }
        OrderCmd::Adjacent { a, b } => {
            let (a, b) = (ctx.sym(a)?, ctx.sym(b)?);
            let h = adjacent(&a, &b, &ctx.tol)?;
            Ok(holds(json!({ "holds": h }), h))
        }
    }
}

fn write_out(path: &Option<PathBuf>, m: &psdorder_core::Matrix) -> Result<(), CliError> {
    if let Some(p) = path {
        io::write_matrix(p, m)?;
    }
    Ok(())
}

fn canon(cmd: &CanonCmd, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    match cmd {
        CanonCmd::Inertia { a } => {
            let a = ctx.sym(a)?;
            let i = inertia(&a, &ctx.tol)?;
            Ok(holds(
                json!({ "result": output::inertia(&i), "rank": i.rank(), "n": i.dim() }),
                true,
            ))
        }
        CanonCmd::Canonical { a, out } => {
            let a = ctx.sym(a)?;
            let (s, i) = congruence_canonical(&a, &ctx.tol)?;
            write_out(out, &s)?;
            Ok(holds(
                json!({ "result": { "S": output::matrix(&s), "inertia": output::inertia(&i) } }),
                true,
            ))
        }
        CanonCmd::Simcong { a, b, out } => {
            let (a, b) = (ctx.psd(a)?, ctx.psd(b)?);
            match sim_congruence(&a, &b, &ctx.tol) {
                Ok(res) => {
                    write_out(out, &res.transform)?;
                    Ok(holds(json!({ "holds": true, "result": output::sim_cong(&res) }), true))
                }
                Err(Error::NotMinusComparable { stage, residual }) => {
                    let v = minus_leq(&a, &b, MinusMethod::Rank, &ctx.tol)?;
                    let triple = match v.certificate {
                        Certificate::RankTriple {
                            rank_a,
                            rank_b,
                            rank_diff,
                        } => json!({ "rank_a": rank_a, "rank_b": rank_b, "rank_diff": rank_diff }),
                        _ => Value::Null,
                    };
                    Ok(holds(
                        json!({
                            "holds": false,
                            "error": "NotMinusComparable",
                            "stage": stage.to_string(),
                            "residual": residual,
                            "rank_triple": triple,
                        }),
                        false,
                    ))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn parse_map(text: &str, dim: usize, tol: &ToleranceConfig) -> Result<(MatrixMap, usize), CliError> {
    if let Some(path) = text.strip_prefix("congruence:") {
        let s = io::read_general_matrix(Path::new(path))?;
        let n = s.rows();
        return Ok((congruence_map(s, tol)?, n));
    }
    if dim == 0 {
        return Err(CliError::Usage("--dim must be at least 1".into()));
    }
    let map = match text {
        "identity" => identity_map(dim),
        "trace-inflation" => trace_inflation(),
        "rank-collapse" => rank_collapse(),
        other => {
            return Err(CliError::Usage(format!(
                "unknown map `{other}` (expected congruence:S.csv, identity, trace-inflation or rank-collapse)"
            )))
        }
    };
    Ok((map, dim))
}

/// Pairs `A_<k>` with `B_<k>` (any extension), ordered by `k`.
fn sample_files(dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| IoError::Read {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut a_files = std::collections::BTreeMap::new();
    let mut b_files = std::collections::BTreeMap::new();
    for entry in entries {
        let path = entry
            .map_err(|source| IoError::Read {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let (side, key) = match stem.split_once('_') {
            Some((side @ ("A" | "B"), key)) => (side, key.to_string()),
            _ => continue,
        };
        let Ok(k) = key.parse::<u64>() else {
            continue;
        };
        let target = if side == "A" { &mut a_files } else { &mut b_files };
        target.insert(k, path);
    }
    if a_files.is_empty() {
        return Err(CliError::Usage(format!(
            "no A_<k> / B_<k> sample files in {}",
            dir.display()
        )));
    }
    a_files
        .into_iter()
        .map(|(k, a)| match b_files.remove(&k) {
            Some(b) => Ok((a, b)),
            None => Err(CliError::Usage(format!("A_{k} has no matching B_{k}"))),
        })
        .collect()
}

fn preserver(cmd: &PreserverCmd, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    match cmd {
        PreserverCmd::Verify {
            map,
            relation,
            trials,
            seed,
            dim,
        } => {
            let (map, n) = parse_map(map, *dim, &ctx.tol)?;
            let rep = preserves_order(&map, (*relation).into(), n, *seed, *trials, &ctx.tol)?;
            let mut body = output::preservation(&rep);
            body["map"] = json!(map.kind().name());
            body["dim"] = json!(n);
            body["seed"] = json!(seed);
            Ok(holds(body, rep.preserves_both()))
        }
        PreserverCmd::Projectors { map, dim } => {
            let (map, n) = parse_map(map, *dim, &ctx.tol)?;
            let rep = projector_fixed_point_suite(&map, n, &ctx.tol)?;
            let mut body = output::preservation(&rep);
            body["map"] = json!(map.kind().name());
            Ok(holds(body, rep.preserves_both()))
        }
        PreserverCmd::Fit { samples, out } => {
            let files = sample_files(samples)?;
            let mut pairs = Vec::with_capacity(files.len());
            for (a, b) in &files {
                pairs.push((ctx.psd(a)?, ctx.psd(b)?));
            }
            match fit_congruence(&pairs, &ctx.tol) {
                Ok(s) => {
                    write_out(out, &s)?;
                    Ok(holds(
                        json!({ "result": { "S": output::matrix(&s) }, "pairs": pairs.len() }),
                        true,
                    ))
                }
                Err(e @ Error::InconsistentSamples(_)) => Ok(holds(
                    json!({ "error": error_kind(&e), "message": e.to_string(), "pairs": pairs.len() }),
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn model(cmd: &ModelCmd, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    match cmd {
        ModelCmd::Compare { m1, m2 } => {
            let (l1, l2) = (read_model(m1, &ctx.tol)?, read_model(m2, &ctx.tol)?);
            let v = model_compare(&l1, &l2, &ctx.tol)?;
            let mut body = output::comparison(&v);
            body["labels"] = json!([l1.label, l2.label]);
            Ok(holds(body, v.l1_geq_l2))
        }
        ModelCmd::Blue { estimator, model } => {
            let l = io::read_general_matrix(estimator)?;
            let m = read_model(model, &ctx.tol)?;
            let v = blue_check(&l, &m, &ctx.tol)?;
            Ok(holds(output::blue(&v), v.is_blue))
        }
    }
}

fn qform(cmd: &QformCmd, ctx: &mut Ctx<'_>) -> Result<Outcome, CliError> {
    let QformCmd::Check {
        forms,
        cov,
        mean,
        mc,
        seed,
    } = cmd;
    let forms = forms
        .iter()
        .map(|p| ctx.psd(p))
        .collect::<Result<Vec<_>, _>>()?;
    let v = ctx.psd(cov)?;
    let mu = io::read_vector(mean)?;
    let rep = qform_rank_criterion(&forms, &v, &mu, &ctx.tol)?;
    let mut body = output::qform(&rep);
    if let Some(n) = mc {
        let mc = mc_quadratic_forms(&forms, &v, &mu, *n, *seed, &ctx.tol)?;
        body["monte_carlo"] = output::monte_carlo(&mc);
    }
    Ok(holds(body, rep.overall))
}
