//! Command-line front end tying the modules together for desk-scale
//! experiments: build, certify, extract, measure, intersect, witness and
//! verify, all speaking exact-rational JSON.

mod io;

pub use io::{read_build, read_json, read_schedule, write_build, write_json};

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cantor::{
    build as cantor_build, intersect_schedules, BudgetPolicy, BuildOptions, CantorError,
    CantorSchedule, MiddleChildren, NoRemovals, RemovalRule, ScriptedRule,
};
use crate::certify::{certify_nonempty, check_dimension_condition, CertifyError};
use crate::littlewood::{
    build_full, check_sieve_soundness, diagnostic_constants, verify_witness, witness, DSequence,
    Instance, InstanceParams, LittlewoodError, Variant, WitnessCertificate,
};
use crate::local::{
    build_measure, extract_local, verify_mdp_bound, ExtractOptions, LocalError, LocalSchedule,
    MdpFamily,
};
use crate::rigor::{parse_rat, ClosedInterval, Precision, Rat, RigorError};

use thiserror::Error;

/// Exit codes, one per failure family (documented in the README).
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const BUDGET: i32 = 4;
    pub const EMPTY_LEVEL: i32 = 5;
    pub const MISMATCHED_FRAME: i32 = 6;
    pub const UNDECIDABLE: i32 = 7;
    pub const NO_SURVIVOR: i32 = 8;
    pub const EMPTY_EXTRACTION: i32 = 9;
    pub const INVARIANT: i32 = 10;
    pub const NODE_CAP: i32 = 11;
    pub const VIOLATIONS: i32 = 12;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("empty level {0}")]
    EmptyLevel(u32),
    #[error("verification reported {0} violations")]
    Violations(u64),
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Littlewood(#[from] LittlewoodError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use exit_codes::*;
        match self {
            CliError::Io(_) | CliError::Parse(_) => PARSE,
            CliError::Usage(_) => USAGE,
            CliError::EmptyLevel(_) => EMPTY_LEVEL,
            CliError::Violations(_) => VIOLATIONS,
            CliError::Rigor(e) => rigor_code(e),
            CliError::Cantor(e) => cantor_code(e),
            CliError::Certify(e) => match e {
                CertifyError::DegenerateRecursion { .. }
                | CertifyError::UndecidableCondition { .. } => UNDECIDABLE,
                CertifyError::Cantor(c) => cantor_code(c),
                CertifyError::Rigor(r) => rigor_code(r),
            },
            CliError::Local(e) => match e {
                LocalError::EmptyExtraction { .. } => EMPTY_EXTRACTION,
                LocalError::EmptyLevel { .. } => EMPTY_LEVEL,
                LocalError::InvariantViolation(_) => INVARIANT,
                LocalError::Mismatch(_) => MISMATCHED_FRAME,
                LocalError::Cantor(c) => cantor_code(c),
                LocalError::Rigor(r) => rigor_code(r),
            },
            CliError::Littlewood(e) => match e {
                LittlewoodError::NoSurvivor { .. } => NO_SURVIVOR,
                LittlewoodError::BudgetViolation { .. } => BUDGET,
                LittlewoodError::InvalidParams(_) | LittlewoodError::Overflow(_) => USAGE,
                LittlewoodError::Cantor(c) => cantor_code(c),
                LittlewoodError::Rigor(r) => rigor_code(r),
            },
        }
    }
}

fn cantor_code(e: &CantorError) -> i32 {
    use exit_codes::*;
    match e {
        CantorError::BudgetExceeded { .. } => BUDGET,
        CantorError::MismatchedFrame(_) | CantorError::LevelMismatch(_) => MISMATCHED_FRAME,
        CantorError::NodeCapExceeded { .. } => NODE_CAP,
        CantorError::Rigor(r) => rigor_code(r),
        _ => RUNTIME,
    }
}

fn rigor_code(e: &RigorError) -> i32 {
    use exit_codes::*;
    match e {
        RigorError::UndecidableFloor { .. }
        | RigorError::UndecidableComparison { .. }
        | RigorError::PrecisionGuard(_) => UNDECIDABLE,
        _ => RUNTIME,
    }
}

#[derive(Parser)]
#[command(
    name = "littlewood",
    about = "Generalised Cantor set engine and mixed-Littlewood witness pipeline",
    version
)]
pub struct Cli {
    /// Precision cap in bits for adaptive refinements (also settable via
    /// LITTLEWOOD_PRECISION_CAP).
    #[arg(long, global = true)]
    precision_cap: Option<u32>,
    /// Worker threads for parallel sections (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build Cantor set levels from a schedule under a named removal rule.
    Build(BuildArgs),
    /// Compute non-emptiness and dimension certificates for a schedule.
    Certify(CertifyArgs),
    /// Extract the local subset from a build directory.
    Extract(ExtractArgs),
    /// Build the measure over a local family, optionally checking the
    /// mass-distribution bound.
    Measure(MeasureArgs),
    /// Combine schedules sharing a frame; budgets sum entrywise.
    Intersect(IntersectArgs),
    /// Build a certified witness chain for a mixed-Littlewood instance.
    Witness(WitnessArgs),
    /// Brute-force check a witness certificate.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Schedule file (omit only with --rule littlewood:<params.json>).
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Removal rule: none | middle:<k> | scripted:<file> | littlewood:<params.json>
    #[arg(long)]
    rule: String,
    #[arg(long)]
    depth: u32,
    /// Output directory for level files, removal records and the ledger.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000_000)]
    node_cap: usize,
    /// Record budget violations in the ledger instead of aborting.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Schedule file with exact rational budgets.
    #[arg(long, conflicts_with = "littlewood")]
    schedule: Option<PathBuf>,
    /// Certify the materialized mixed-Littlewood schedule instead.
    #[arg(long)]
    littlewood: bool,
    #[arg(long, value_parser = parse_variant, requires = "littlewood")]
    variant: Option<Variant>,
    #[arg(long = "R", requires = "littlewood")]
    r: Option<u64>,
    #[arg(long, requires = "littlewood")]
    c1: Option<String>,
    #[arg(long, requires = "littlewood")]
    c: Option<String>,
    #[arg(long, requires = "littlewood", default_value = "const:2")]
    d: String,
    /// Horizon: levels 0..=depth are certified.
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a human-readable table.
    #[arg(long)]
    report: bool,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    schedule: PathBuf,
    /// Build directory produced by `build`.
    #[arg(long)]
    levels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Record the full table history and verify the extraction conditions.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct MeasureArgs {
    /// Extraction file produced by `extract` (preferred), or
    #[arg(long, conflicts_with = "levels")]
    extraction: Option<PathBuf>,
    /// a build directory whose levels form the local family directly.
    #[arg(long)]
    levels: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Run the mass-distribution check with this exponent s.
    #[arg(long)]
    s: Option<String>,
    #[arg(long, default_value_t = 0)]
    n0: u32,
    /// Dyadic family resolution: cells down to |I| 2^-k.
    #[arg(long, default_value_t = 12)]
    max_scale: u32,
    /// Schedule of the local family (needed for the MDP check).
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct IntersectArgs {
    /// Two or more schedule files sharing root and branching.
    #[arg(long, num_args = 2.., required = true)]
    schedules: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WitnessArgs {
    /// D-sequence: const:<p> | list:[d1,d2,...] | doubling
    #[arg(long)]
    d: String,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long = "R")]
    r: u64,
    #[arg(long)]
    c1: String,
    #[arg(long)]
    c: String,
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    out: PathBuf,
    /// Left endpoint of the root interval (defaults to 0; length is c1).
    #[arg(long)]
    root_left: Option<String>,
    /// Build even when parameter validation fails (experimental mode).
    #[arg(long)]
    allow_uncertified: bool,
    /// Print the proof-internal diagnostic constants before building.
    #[arg(long)]
    constants: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    cert: PathBuf,
    #[arg(long)]
    qmax: u64,
    /// Also run the independent sieve-soundness pass.
    #[arg(long)]
    sieve: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    match s {
        "prop1" => Ok(Variant::Prop1),
        "prop2" => Ok(Variant::Prop2),
        _ => Err(format!("unknown variant {s:?} (expected prop1 or prop2)")),
    }
}

fn parse_rat_arg(s: &str, what: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|_| CliError::Usage(format!("cannot parse {what} from {s:?}")))
}

#[derive(Serialize, Deserialize)]
struct ScriptedFile {
    deletions: Vec<ScriptedDeletion>,
}

#[derive(Serialize, Deserialize)]
struct ScriptedDeletion {
    level: u32,
    child: usize,
    stratum: u32,
}

fn cmd_build(args: &BuildArgs) -> Result<(), CliError> {
    let options = BuildOptions {
        node_cap: args.node_cap,
        policy: if args.audit {
            BudgetPolicy::Audit
        } else {
            BudgetPolicy::Enforce
        },
        precision: Precision::default_cap(),
    };
    let out = if let Some(params_path) = args.rule.strip_prefix("littlewood:") {
        let params: InstanceParams = io::read_json(&PathBuf::from(params_path))?;
        let inst = Instance::new(params)?;
        build_full(&inst, args.depth, args.node_cap)?
    } else {
        let schedule_path = args.schedule.as_ref().ok_or_else(|| {
            CliError::Usage("--schedule is required unless the rule is littlewood:<params>".into())
        })?;
        let schedule = io::read_schedule(schedule_path)?;
        let rule: Box<dyn RemovalRule> = match args.rule.as_str() {
            "none" => Box::new(NoRemovals),
            r if r.starts_with("middle:") => {
                let count = r["middle:".len()..]
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad middle rule {r:?}")))?;
                Box::new(MiddleChildren { count })
            }
            r if r.starts_with("scripted:") => {
                let file: ScriptedFile = io::read_json(&PathBuf::from(&r["scripted:".len()..]))?;
                let mut per_level: BTreeMap<u32, Vec<(usize, u32)>> = BTreeMap::new();
                for d in file.deletions {
                    per_level
                        .entry(d.level)
                        .or_default()
                        .push((d.child, d.stratum));
                }
                Box::new(ScriptedRule { per_level })
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown rule {other:?} (expected none, middle:<k>, scripted:<file> or littlewood:<params>)"
                )))
            }
        };
        cantor_build(&schedule, rule.as_ref(), args.depth, &options)?
    };
    io::write_build(&args.out, &out)?;
    let counts = out.counts();
    println!("built {} levels, counts {:?}", out.levels.len(), counts);
    if let Some(n) = out.empty_from {
        println!("level {n} is empty");
        return Err(CliError::EmptyLevel(n));
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifyOutput {
    nonempty: crate::certify::NonEmptinessCertificate,
    dimension: crate::certify::DimensionCertificate,
}

fn cmd_certify(args: &CertifyArgs) -> Result<(), CliError> {
    let precision = Precision::default_cap();
    let schedule: CantorSchedule = if args.littlewood {
        let variant = args
            .variant
            .ok_or_else(|| CliError::Usage("--variant is required with --littlewood".into()))?;
        let r = args
            .r
            .ok_or_else(|| CliError::Usage("--R is required with --littlewood".into()))?;
        let c1 = parse_rat_arg(
            args.c1
                .as_deref()
                .ok_or_else(|| CliError::Usage("--c1 is required with --littlewood".into()))?,
            "c1",
        )?;
        let c = match &args.c {
            Some(c) => parse_rat_arg(c, "c")?,
            None => crate::rigor::rat_pow2(-80),
        };
        let d = DSequence::parse(&args.d)?;
        let inst = Instance::new(InstanceParams::new(variant, d, r, c1, c))?;
        inst.schedule_for(args.depth + 1)?
    } else {
        let path = args.schedule.as_ref().ok_or_else(|| {
            CliError::Usage("either --schedule or --littlewood must be given".into())
        })?;
        io::read_schedule(path)?
    };

    let nonempty = certify_nonempty(&schedule, args.depth, &precision)?;
    let dimension = check_dimension_condition(&schedule, args.depth, &precision)?;

    if args.report {
        println!("non-emptiness: {}", verdict_word(nonempty.verdict));
        if let Some(k) = nonempty.first_failure {
            println!("  first nonpositive t at index {k}");
        }
        println!("  n    t_n");
        for (n, t) in nonempty.t_values.iter().enumerate() {
            println!("  {n:<4} [{}, {}]", t.lo, t.hi);
        }
        println!("dimension condition: {}", verdict_word(dimension.verdict));
        println!("  n    lhs                  rhs        R_n>=4  pass");
        for row in &dimension.conditions {
            println!(
                "  {:<4} [{}, {}]  {}  {}  {}",
                row.level, row.lhs.lo, row.lhs.hi, row.rhs.lo, row.branch_at_least_four, row.pass
            );
        }
        if let Some(bound) = &dimension.bound {
            println!(
                "  empirical min over horizon: [{}, {}]{}",
                bound.empirical_min.lo,
                bound.empirical_min.hi,
                if bound.branching_nondecreasing {
                    " (branching nondecreasing: a true liminf lower bound)"
                } else {
                    " (empirical only)"
                }
            );
            if let Some(tail) = &bound.tail_bound {
                println!("  tail value at horizon: [{}, {}]", tail.lo, tail.hi);
            }
        }
    }

    let output = CertifyOutput {
        nonempty,
        dimension,
    };
    if let Some(out) = &args.out {
        io::write_json(out, &output)?;
    } else if !args.report {
        println!("{}", serde_json::to_string_pretty(&output).unwrap());
    }
    Ok(())
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize, Deserialize)]
struct ExtractionFile {
    report: crate::local::ExtractionReport,
    levels: Vec<crate::cantor::LevelCollection>,
}

fn cmd_extract(args: &ExtractArgs) -> Result<(), CliError> {
    let schedule = io::read_schedule(&args.schedule)?;
    let build = io::read_build(&args.levels)?;
    let local = LocalSchedule::from_base(&schedule);
    let extraction = extract_local(
        &build,
        &local,
        &ExtractOptions {
            record_history: args.check,
        },
    )?;
    if args.check {
        crate::local::verify_conditions(&build, &local, &extraction)?;
        println!("extraction conditions verified");
    }
    let report = extraction.report();
    println!(
        "extracted {} levels, final counts {:?}",
        extraction.levels.len(),
        extraction
            .levels
            .iter()
            .map(|l| l.len())
            .collect::<Vec<_>>()
    );
    io::write_json(
        &args.out,
        &ExtractionFile {
            report,
            levels: extraction.levels,
        },
    )
}

#[derive(Serialize)]
struct MeasureOutput {
    measure: crate::local::MeasureTable,
    mdp: Option<crate::local::MdpReport>,
}

fn cmd_measure(args: &MeasureArgs) -> Result<(), CliError> {
    let levels = if let Some(path) = &args.extraction {
        let file: ExtractionFile = io::read_json(path)?;
        file.levels
    } else if let Some(dir) = &args.levels {
        io::read_build(dir)?.levels
    } else {
        return Err(CliError::Usage(
            "either --extraction or --levels must be given".into(),
        ));
    };
    let measure = build_measure(&levels)?;
    let mdp = match &args.s {
        Some(s_raw) => {
            let schedule_path = args.schedule.as_ref().ok_or_else(|| {
                CliError::Usage("--schedule is required for the MDP check".into())
            })?;
            let schedule = io::read_schedule(schedule_path)?;
            let local = LocalSchedule::from_base(&schedule);
            let s = parse_rat_arg(s_raw, "s")?;
            let family = MdpFamily {
                max_scale: args.max_scale,
                include_construction: true,
                extra: Vec::new(),
            };
            let report = verify_mdp_bound(
                &levels,
                &measure,
                &local,
                &s,
                args.n0,
                &family,
                &Precision::default_cap(),
            )?;
            println!(
                "mdp check: {} ({} intervals, {} failures)",
                verdict_word(report.verdict),
                report.checked,
                report.failures
            );
            Some(report)
        }
        None => None,
    };
    io::write_json(&args.out, &MeasureOutput { measure, mdp })
}

fn cmd_intersect(args: &IntersectArgs) -> Result<(), CliError> {
    let schedules: Vec<CantorSchedule> = args
        .schedules
        .iter()
        .map(|p| io::read_schedule(p))
        .collect::<Result<_, _>>()?;
    let joint = intersect_schedules(&schedules)?;
    io::write_json(&args.out, &joint)?;
    println!("merged {} schedules", schedules.len());
    Ok(())
}

fn cmd_witness(args: &WitnessArgs) -> Result<(), CliError> {
    let d = DSequence::parse(&args.d)?;
    let c1 = parse_rat_arg(&args.c1, "c1")?;
    let c = parse_rat_arg(&args.c, "c")?;
    let mut params = InstanceParams::new(args.variant, d, args.r, c1.clone(), c);
    if let Some(left_raw) = &args.root_left {
        let left = parse_rat_arg(left_raw, "root-left")?;
        params = params.with_root(ClosedInterval::new(left.clone(), left + c1));
    }
    let mut inst = Instance::new(params)?;
    let check = inst.validate()?;
    if args.constants {
        println!("{}", constants_report(inst.params(), &check)?);
    }
    if !check.pass {
        if args.allow_uncertified {
            eprintln!("warning: parameters fail validation; building in experimental mode");
        } else {
            return Err(CliError::Usage(
                "parameters fail validation (rerun with --allow-uncertified for experimental mode)"
                    .into(),
            ));
        }
    }
    let cert = witness(&inst, args.depth)?;
    println!(
        "witness built: {} levels, height bound {}, certified: {}",
        cert.chain.len() - 1,
        cert.height_bound,
        cert.params.certified
    );
    io::write_json(&args.out, &cert)
}

#[derive(Serialize)]
struct VerifyOutput {
    report: crate::littlewood::VerifyReport,
    sieve: Option<crate::littlewood::SieveReport>,
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let cert: WitnessCertificate = io::read_json(&args.cert)?;
    let report = verify_witness(&cert, args.qmax)?;
    let sieve = if args.sieve {
        let s = check_sieve_soundness(&cert)?;
        println!(
            "sieve soundness: {} candidates, {} inner intersections",
            s.candidates_checked, s.inner_intersections
        );
        Some(s)
    } else {
        None
    };
    println!(
        "verified q <= {}: {} checked, {} above the height bound, {} violations",
        report.q_max,
        report.checked,
        report.skipped_above_bound,
        report.violations.len()
    );
    let violations =
        report.violations.len() as u64 + sieve.as_ref().map_or(0, |s| s.inner_intersections);
    let output = VerifyOutput { report, sieve };
    if let Some(out) = &args.out {
        io::write_json(out, &output)?;
    }
    if violations > 0 {
        return Err(CliError::Violations(violations));
    }
    Ok(())
}

/// Entry point: parses arguments, runs the command, maps errors to exit
/// codes.
pub fn main() -> i32 {
    let cli = Cli::parse();
    if let Some(bits) = cli.precision_cap {
        // must run before the first precision lookup caches the default
        std::env::set_var(crate::rigor::PRECISION_CAP_ENV, bits.to_string());
    }
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let result = match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Measure(args) => cmd_measure(args),
        Command::Intersect(args) => cmd_intersect(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => exit_codes::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Diagnostic report of the proof-internal constants for an instance.
pub fn constants_report(
    params: &InstanceParams,
    check: &crate::littlewood::ParamCertificate,
) -> Result<String, CliError> {
    let eps = crate::rigor::rat_pow2(-32);
    let consts = diagnostic_constants(params, &eps)?;
    Ok(format!(
        "c1 condition: {} (lhs in [{}, {}])\nc condition: {} (lhs in [{}, {}])\nstrata factor in [{}, {}]\nremoval sum factor in [{}, {}]",
        verdict_word(check.c1_smallness.pass),
        check.c1_smallness.lhs.lo,
        check.c1_smallness.lhs.hi,
        verdict_word(check.c_smallness.pass),
        check.c_smallness.lhs.lo,
        check.c_smallness.lhs.hi,
        consts.strata_factor.lo,
        consts.strata_factor.hi,
        consts.removal_sum_factor.lo,
        consts.removal_sum_factor.hi,
    ))
}
