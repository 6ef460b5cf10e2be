//! The `chamberwalk` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hypergroup_mc::{
    deformation_check, sample_cloud, semicharacter_multiplicativity, summarize, support_equivalence, transform_homomorphism,
    Convolution, EmpiricalMeasure, TestFunction,
};
use crate::random_walk::{euclidean_walk_crosscheck, mz_rate_scan, run_group_walk, Atom, WalkConfig};
use crate::root_system::{build_root_system, ChamberPoint, RootFamily, RootSystem};
use crate::selftest::{run_suite, Level, Mutation, SuiteOptions};
use crate::special_functions::{m1_closed, semicharacter, spherical_phi, spherical_psi};

const CSV_HELP: &str = "\
CSV outputs start with a `# manifest: {...}` line, then a header row.
  convolve: c1..cd,weight      one sampled spectrum per row, uniform weights
  walk:     replica,n,q1_over_n..qd_over_n,scaled_deviation
            one row per replica and checkpoint n = 1, 2, 4, ... and n_steps;
            q(S_n)/n is the normalized log-singular spectrum and
            scaled_deviation is n^(-1/r) |q(S_n) - n m1|

Exit codes: 0 success, 1 check failure or numerical error, 2 usage error.";

#[derive(Debug, Parser)]
#[command(name = "chamberwalk", version, about = "Spherical functions, orbit hypergroups and biinvariant random walks on Weyl chambers", after_long_help = CSV_HELP)]
pub struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "CHAMBERWALK_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Dump root data: positive roots, rho, Weyl group order.
    Rho(FamilyRank),
    /// Evaluate psi, phi, the semicharacter or m1 at a point.
    Eval(EvalArgs),
    /// Sample the hermitian (*) or group (•) convolution of two point masses.
    Convolve(ConvolveArgs),
    /// Run one of the Monte-Carlo identity checks.
    Check(CheckArgs),
    /// Run a biinvariant random walk on SL(d, C).
    Walk(WalkArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyRank {
    #[arg(value_name = "FAMILY", required_unless_present = "family")]
    family_pos: Option<RootFamily>,
    #[arg(value_name = "RANK", required_unless_present = "rank")]
    rank_pos: Option<usize>,
    #[arg(long, conflicts_with = "family_pos")]
    family: Option<RootFamily>,
    #[arg(long, conflicts_with = "rank_pos")]
    rank: Option<usize>,
}

impl FamilyRank {
    fn build(&self) -> Result<RootSystem> {
        let family = self.family.or(self.family_pos).ok_or_else(|| Error::Parse("missing family".into()))?;
        let rank = self.rank.or(self.rank_pos).ok_or_else(|| Error::Parse("missing rank".into()))?;
        build_root_system(family, rank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalKind {
    Psi,
    Phi,
    Semichar,
    M1,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(value_enum)]
    kind: EvalKind,
    #[command(flatten)]
    root: FamilyRank,
    /// Spectral parameter: JSON list of numbers or [re, im] pairs.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Point, as a JSON list.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvolveArgs {
    #[arg(value_enum)]
    mode: ConvMode,
    #[arg(long)]
    d: usize,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file for the sampled cloud.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvMode {
    Hermitian,
    Group,
}

impl From<ConvMode> for Convolution {
    fn from(m: ConvMode) -> Self {
        match m {
            ConvMode::Hermitian => Convolution::Hermitian,
            ConvMode::Group => Convolution::Group,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Deformation,
    SemicharMult,
    Support,
    TransformHomomorphism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFn {
    Gaussian,
    Phi,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(value_enum)]
    which: CheckKind,
    #[arg(long)]
    d: usize,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// Needed by transform-homomorphism and by `--test-fn phi`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, value_enum, default_value_t = TestFn::Gaussian)]
    test_fn: TestFn,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkMode {
    /// Group walk and strong-law check.
    Group,
    /// Euclidean and group walks compared by KS distance.
    Crosscheck,
    /// Fluctuation exponent scan.
    MzScan,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WalkArgs {
    /// JSON walk configuration; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = WalkMode::Group)]
    mode: WalkMode,
    #[arg(long)]
    d: Option<usize>,
    /// Step distribution as JSON: [{"point": [...], "weight": w}, ...].
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x")]
    mu: Option<String>,
    /// Point-mass step distribution.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long)]
    n_steps: Option<usize>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    renorm_period: Option<usize>,
    /// Moment exponent r in [1, 2).
    #[arg(long)]
    r: Option<f64>,
    /// JSON report; the CSV trajectory goes next to it with extension .csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MutateArg {
    Rho,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelftestArgs {
    #[arg(value_enum)]
    level: LevelArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for selftest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    mutate: Option<MutateArg>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest sidecar, JSON output or CSV output.
    manifest: PathBuf,
    /// Write to this path instead of the recorded one.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// What produced an output file; enough to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

struct Ctx {
    manifest: RunManifest,
    started: Instant,
}

impl Ctx {
    fn envelope(&self, result: impl Serialize) -> Result<String> {
        let v = json!({"manifest": self.manifest, "result": result});
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    fn csv_header(&self) -> Result<String> {
        Ok(format!("# manifest: {}\n", serde_json::to_string(&self.manifest)?))
    }

    /// Write `contents` to `path` and the timed manifest next to it.
    fn write(&self, path: &Path, contents: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, contents)?;
        let mut timed = self.manifest.clone();
        timed.wall_time_s = Some(self.started.elapsed().as_secs_f64());
        let mut side = path.as_os_str().to_owned();
        side.push(".manifest.json");
        fs::write(PathBuf::from(side), serde_json::to_string_pretty(&timed)? + "\n")?;
        Ok(())
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    let t = if t.starts_with('[') { t.to_string() } else { format!("[{t}]") };
    serde_json::from_str::<Vec<f64>>(&t).map_err(|e| Error::Parse(format!("bad vector {s:?}: {e}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

fn parse_complex_vector(s: &str) -> Result<Vec<Complex64>> {
    let t = s.trim();
    let t = if t.starts_with('[') { t.to_string() } else { format!("[{t}]") };
    let v: Vec<ComplexEntry> = serde_json::from_str(&t).map_err(|e| Error::Parse(format!("bad vector {s:?}: {e}")))?;
    Ok(v.into_iter()
        .map(|e| match e {
            ComplexEntry::Real(r) => Complex64::new(r, 0.0),
            ComplexEntry::Pair([re, im]) => Complex64::new(re, im),
        })
        .collect())
}

fn chamber_point(rs: &RootSystem, s: &str) -> Result<ChamberPoint> {
    ChamberPoint::new(rs, parse_vector(s)?, 1e-12)
}

/// 0 for success, 1 for failed checks and numerical errors, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::DimensionMismatch { .. }
        | Error::NotZeroSum { .. }
        | Error::NotInChamber { .. }
        | Error::RankOutOfBounds { .. }
        | Error::WeylOrderTooLarge { .. }
        | Error::InvalidConfig(_)
        | Error::NotNormalized { .. }
        | Error::NoMatrixRealization { .. }
        | Error::TooFewSamples { .. }
        | Error::RejectionInfeasible { .. }
        | Error::NotHermitianTraceless { .. }
        | Error::NotUnimodular { .. }
        | Error::Io(_)
        | Error::Json(_) => 2,
        Error::NoConvergence { .. }
        | Error::IllConditioned { .. }
        | Error::Underflow { .. }
        | Error::Overflow { .. }
        | Error::EnvelopeExceeded { .. } => 1,
    }
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Convolve(a) => Some(a.seed),
        Command::Check(a) => Some(a.seed),
        Command::Walk(a) => a.seed,
        Command::Selftest(a) => Some(a.seed),
        _ => None,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Rho(_) => "rho",
        Command::Eval(_) => "eval",
        Command::Convolve(_) => "convolve",
        Command::Check(_) => "check",
        Command::Walk(_) => "walk",
        Command::Selftest(_) => "selftest",
        Command::Replay(_) => "replay",
    }
}

/// Parse `args` (without the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(std::iter::once("chamberwalk".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(t) = cli.threads {
        // the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let recorded: Vec<String> = strip_threads(&argv);
    match dispatch(&cli.command, recorded) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn strip_threads(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--threads" {
            skip = true;
        } else if !a.starts_with("--threads=") {
            out.push(a.clone());
        }
    }
    out
}

fn dispatch(cmd: &Command, argv: Vec<String>) -> Result<i32> {
    let ctx = Ctx {
        manifest: RunManifest {
            command: command_name(cmd).to_string(),
            argv,
            params: serde_json::to_value(cmd)?,
            seed: seed_of(cmd),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: None,
        },
        started: Instant::now(),
    };
    let code = match cmd {
        Command::Rho(a) => cmd_rho(&ctx, a)?,
        Command::Eval(a) => cmd_eval(&ctx, a)?,
        Command::Convolve(a) => cmd_convolve(&ctx, a)?,
        Command::Check(a) => cmd_check(&ctx, a)?,
        Command::Walk(a) => cmd_walk(&ctx, a)?,
        Command::Selftest(a) => cmd_selftest(&ctx, a)?,
        Command::Replay(a) => return cmd_replay(a),
    };
    eprintln!("wall_time_s={:.3}", ctx.started.elapsed().as_secs_f64());
    Ok(code)
}

fn print(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_rho(ctx: &Ctx, a: &FamilyRank) -> Result<i32> {
    let rs = a.build()?;
    print(&ctx.envelope(rs.root_data())?)?;
    Ok(0)
}

fn cmd_eval(ctx: &Ctx, a: &EvalArgs) -> Result<i32> {
    let rs = a.root.build()?;
    let x = parse_vector(&a.x)?;
    let lambda = || -> Result<Vec<Complex64>> {
        let s = a.lambda.as_deref().ok_or_else(|| Error::Parse("--lambda is required for psi and phi".into()))?;
        parse_complex_vector(s)
    };
    let result = match a.kind {
        EvalKind::Psi => json!({"kind": "psi", "lambda": cx_list(&lambda()?), "x": x, "value": spherical_psi(&rs, &lambda()?, &x)?}),
        EvalKind::Phi => json!({"kind": "phi", "lambda": cx_list(&lambda()?), "x": x, "value": spherical_phi(&rs, &lambda()?, &x)?}),
        EvalKind::Semichar => json!({"kind": "semichar", "x": x, "value": semicharacter(&rs, &x)?}),
        EvalKind::M1 => {
            let p = ChamberPoint::new(&rs, x.clone(), 1e-12)?;
            json!({"kind": "m1", "x": x, "value": m1_closed(&rs, &p)?})
        }
    };
    print(&ctx.envelope(json!({"family": rs.family(), "rank": rs.rank(), "eval": result}))?)?;
    Ok(0)
}

fn cx_list(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn cmd_convolve(ctx: &Ctx, a: &ConvolveArgs) -> Result<i32> {
    let rs = crate::hypergroup_mc::type_a(a.d)?;
    let x = chamber_point(&rs, &a.x)?;
    let y = chamber_point(&rs, &a.y)?;
    let cloud = sample_cloud(a.mode.into(), a.d, &x, &y, a.n, a.seed)?;
    let summary = summarize(&cloud);
    if let Some(path) = &a.out {
        let mut buf = ctx.csv_header()?.into_bytes();
        EmpiricalMeasure::uniform(cloud).write_csv(&mut buf)?;
        ctx.write(path, &buf)?;
    }
    print(&ctx.envelope(summary)?)?;
    Ok(0)
}

fn cmd_check(ctx: &Ctx, a: &CheckArgs) -> Result<i32> {
    let rs = crate::hypergroup_mc::type_a(a.d)?;
    let x = chamber_point(&rs, &a.x)?;
    let y = chamber_point(&rs, &a.y)?;
    let lambda = || -> Result<Vec<f64>> {
        let s = a.lambda.as_deref().ok_or_else(|| Error::Parse("--lambda is required here".into()))?;
        let l = parse_vector(s)?;
        rs.check_dim(l.len())?;
        Ok(l)
    };
    let (pass, report) = match a.which {
        CheckKind::Deformation => {
            let f = match a.test_fn {
                TestFn::Gaussian => TestFunction::GaussianBump,
                TestFn::Phi => TestFunction::Phi { lambda: lambda()? },
            };
            let r = deformation_check(a.d, &x, &y, &f, a.n, a.seed)?;
            (r.pass, serde_json::to_value(&r)?)
        }
        CheckKind::SemicharMult => {
            let r = semicharacter_multiplicativity(a.d, &x, &y, a.n, a.seed)?;
            (r.pass, serde_json::to_value(&r)?)
        }
        CheckKind::Support => {
            let r = support_equivalence(a.d, &x, &y, a.n, a.seed)?;
            (r.pass, serde_json::to_value(&r)?)
        }
        CheckKind::TransformHomomorphism => {
            let r = transform_homomorphism(a.d, &x, &y, &lambda()?, a.n, a.seed)?;
            (r.pass, serde_json::to_value(&r)?)
        }
    };
    let text = ctx.envelope(&report)?;
    if let Some(path) = &a.out {
        ctx.write(path, text.as_bytes())?;
    }
    print(&text)?;
    Ok(if pass { 0 } else { 1 })
}

fn walk_config(a: &WalkArgs) -> Result<WalkConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str::<WalkConfig>(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?
        }
        None => WalkConfig::point_mass(0, Vec::new(), 0, 1, 0),
    };
    if let Some(s) = &a.mu {
        cfg.mu = serde_json::from_str::<Vec<Atom>>(s).map_err(|e| Error::Parse(format!("bad --mu: {e}")))?;
    }
    if let Some(s) = &a.x {
        cfg.mu = vec![Atom { point: parse_vector(s)?, weight: 1.0 }];
    }
    if let Some(d) = a.d {
        cfg.d = d;
    } else if cfg.d == 0 {
        cfg.d = cfg.mu.first().map_or(0, |m| m.point.len());
    }
    if let Some(n) = a.n_steps {
        cfg.n_steps = n;
    }
    if let Some(r) = a.replicas {
        cfg.n_replicas = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(p) = a.renorm_period {
        cfg.renorm_period = p;
    }
    if let Some(r) = a.r {
        cfg.r_exponent = r;
    }
    Ok(cfg)
}

fn cmd_walk(ctx: &Ctx, a: &WalkArgs) -> Result<i32> {
    let cfg = walk_config(a)?;
    let (pass, report, csv) = match a.mode {
        WalkMode::Group => {
            let r = run_group_walk(&cfg)?;
            let mut buf = ctx.csv_header()?.into_bytes();
            r.write_csv(&mut buf)?;
            (r.pass, serde_json::to_value(&r)?, Some(buf))
        }
        WalkMode::Crosscheck => {
            let r = euclidean_walk_crosscheck(&cfg)?;
            (r.pass, serde_json::to_value(&r)?, None)
        }
        WalkMode::MzScan => {
            let r = mz_rate_scan(&cfg)?;
            (r.pass, serde_json::to_value(&r)?, None)
        }
    };
    let text = ctx.envelope(json!({"config": cfg, "report": report}))?;
    if let Some(path) = &a.out {
        ctx.write(path, text.as_bytes())?;
        if let Some(buf) = csv {
            ctx.write(&path.with_extension("csv"), &buf)?;
        }
    }
    print(&text)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_selftest(ctx: &Ctx, a: &SelftestArgs) -> Result<i32> {
    let opts = SuiteOptions {
        level: match a.level {
            LevelArg::Fast => Level::Fast,
            LevelArg::Full => Level::Full,
        },
        seed: a.seed,
        mutation: match a.mutate {
            Some(MutateArg::Rho) => Mutation::Rho,
            None => Mutation::None,
        },
    };
    let report = run_suite(&opts, |r, secs| {
        println!("{}", r.line());
        eprintln!("criterion {} took {secs:.2}s", r.id);
    })?;
    if let Some(dir) = &a.out {
        ctx.write(&dir.join("selftest.json"), ctx.envelope(&report)?.as_bytes())?;
    }
    println!("{}", if report.pass { "selftest passed" } else { "selftest FAILED" });
    Ok(if report.pass { 0 } else { 1 })
}

/// Pull a manifest out of a sidecar, a JSON envelope or a CSV header line.
pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    if let Some(line) = text.lines().next().and_then(|l| l.strip_prefix("# manifest: ")) {
        return Ok(serde_json::from_str(line)?);
    }
    let v: Value = serde_json::from_str(&text)?;
    let m = v.get("manifest").cloned().unwrap_or(v);
    Ok(serde_json::from_value(m)?)
}

/// `argv` with the value of `--out` replaced.
pub fn override_out(argv: &[String], out: &Path) -> Vec<String> {
    let out = out.to_string_lossy().into_owned();
    let mut res = Vec::with_capacity(argv.len() + 2);
    let mut found = false;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
            res.extend(["--out".to_string(), out.clone()]);
            found = true;
        } else if a.starts_with("--out=") {
            res.push(format!("--out={out}"));
            found = true;
        } else {
            res.push(a.clone());
        }
    }
    if !found {
        res.extend(["--out".to_string(), out]);
    }
    res
}

fn cmd_replay(a: &ReplayArgs) -> Result<i32> {
    let m = read_manifest(&a.manifest)?;
    if m.version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest written by version {}, replaying with {}", m.version, env!("CARGO_PKG_VERSION"));
    }
    let argv = match &a.out {
        Some(p) => override_out(&m.argv, p),
        None => m.argv.clone(),
    };
    if argv.first().map(String::as_str) == Some("replay") {
        return Err(Error::InvalidConfig("manifest records a replay".into()));
    }
    Ok(run(argv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_parse_with_or_without_brackets() {
        assert_eq!(parse_vector("[1,-1]").unwrap(), vec![1.0, -1.0]);
        assert_eq!(parse_vector("1, -1").unwrap(), vec![1.0, -1.0]);
        assert!(matches!(parse_vector("[1,x]"), Err(Error::Parse(_))));
        let z = parse_complex_vector("[1, [0, 2]]").unwrap();
        assert_eq!(z, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
    }

    #[test]
    fn out_override_replaces_or_appends() {
        let a: Vec<String> = ["walk", "--out", "a.json", "--x", "[1,-1]"].map(String::from).to_vec();
        assert_eq!(override_out(&a, Path::new("b.json"))[2], "b.json");
        let b: Vec<String> = ["check", "support"].map(String::from).to_vec();
        assert_eq!(override_out(&b, Path::new("c.json")), ["check", "support", "--out", "c.json"]);
    }

    #[test]
    fn threads_flag_is_not_recorded() {
        let a: Vec<String> = ["--threads", "4", "rho", "A", "2", "--threads=2"].map(String::from).to_vec();
        assert_eq!(strip_threads(&a), ["rho", "A", "2"]);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["eval", "psi", "A", "1", "--lambda", "[1]", "--x", "[1,-1]"]), 2);
        assert_eq!(run(["rho", "B", "1"]), 2);
        assert_eq!(run(["frobnicate"]), 2);
        assert_eq!(run(["rho", "A", "2"]), 0);
    }
}
