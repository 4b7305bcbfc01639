//! Command-line front end: flag parsing, text/JSON rendering and the
//! `verify` orchestration of the cross-checks.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use crate::eigen::{EigenClass, TraceOrbit};
use crate::ffcount::{GroupData, PunctureKind};
use crate::formulas::{
    char_class_closed, generic_coefficients, iterated_tube_closed_form, reducible_and_diag_classes,
    rep_class_closed,
};
use crate::interpolate::{fit_all, render_operator_file};
use crate::kring::LocalizedClass;
use crate::operators::{
    assemble_representation_class, eta_apply, eta_inverse_apply, semisimple_tube_apply, tube_apply,
    OperatorData, SurfaceSpec, TubeKind,
};
use crate::wmodule::{CoreGen, ModuleElement, CORE_GENS};

pub const DEFAULT_WORK_LIMIT: u64 = 10_000_000_000;

#[derive(Parser)]
#[command(
    name = "charvar",
    version,
    about = "Virtual classes of parabolic SL(2,C) representation and character varieties"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Genus of the closed orientable surface
    #[arg(long, default_value_t = 1)]
    genus: u32,
    /// Number of punctures with unipotent-plus holonomy [J+]
    #[arg(long, default_value_t = 0)]
    jordan_plus: u32,
    /// Number of punctures with unipotent-minus holonomy [J-]
    #[arg(long, default_value_t = 0)]
    jordan_minus: u32,
    /// Number of punctures with holonomy -Id
    #[arg(long, default_value_t = 0)]
    minus_id: u32,
    /// Semisimple puncture eigenvalue (repeatable); syntax: rat:N/D,
    /// zeta:ORDER:EXP, or sym:x1 (symbolic)
    #[arg(long)]
    semisimple: Vec<String>,
    /// Cross-check the result against the independent closed-formula /
    /// pipeline route
    #[arg(long)]
    verify: bool,
    /// Fitted operator data file (default: built-in copy of
    /// data/operators.json)
    #[arg(long)]
    data_file: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    genus: u32,
    #[arg(long, default_value_t = 0)]
    jordan_plus: u32,
    #[arg(long, default_value_t = 0)]
    jordan_minus: u32,
    #[arg(long, default_value_t = 0)]
    minus_id: u32,
    /// Semisimple puncture trace value mod p (repeatable)
    #[arg(long)]
    semisimple_trace: Vec<u64>,
    /// Prime field size (repeatable)
    #[arg(long, required = true)]
    prime: Vec<u64>,
    /// Compare the count against the symbolic class (generic eigenvalues)
    /// evaluated at q = p
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    data_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
    work_limit: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the virtual class of the representation variety
    ComputeRep(SurfaceArgs),
    /// Compute the virtual class of the character variety
    ComputeChar(SurfaceArgs),
    /// Print a tube operator as a matrix on the core generators
    TubeMatrix {
        /// handle, jordan-plus, jordan-minus or semisimple
        #[arg(long)]
        kind: String,
        /// Eigenvalue of the semisimple tube (required for kind=semisimple)
        #[arg(long)]
        semisimple: Option<String>,
        #[arg(long)]
        data_file: Option<PathBuf>,
    },
    /// Count representation-variety points over a prime field
    OracleCount(OracleArgs),
    /// Refit the handle and Jordan core matrices from finite-field counts
    FitOperators {
        /// Output path (default: ./data/operators.json)
        #[arg(long)]
        data_file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
        work_limit: u64,
    },
    /// Run the command-line addressable subset of the cross-check suite
    Verify {
        #[arg(long)]
        data_file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
        work_limit: u64,
    },
}

struct CliError {
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

macro_rules! impl_from_error {
    ($ty:ty, $code:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($code, e.to_string())
            }
        }
    };
}

impl_from_error!(crate::eigen::EigenError, "eigen");
impl_from_error!(crate::kring::KringError, "kring");
impl_from_error!(crate::ffcount::CountError, "count");
impl_from_error!(crate::interpolate::FitError, "fit");
impl_from_error!(std::io::Error, "io");

impl From<crate::operators::OperatorError> for CliError {
    fn from(e: crate::operators::OperatorError) -> Self {
        use crate::operators::OperatorError as E;
        let code = match &e {
            E::Eigen(_) => "eigen",
            E::Kring(_) => "kring",
            E::MissingOperatorData(_) => "missing-operator-data",
            E::OutOfScopeTwisted => "out-of-scope-twisted",
            E::NotPolynomial(_) => "internal",
            E::InvalidSurface(_) => "invalid-surface",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<crate::formulas::FormulaError> for CliError {
    fn from(e: crate::formulas::FormulaError) -> Self {
        use crate::formulas::FormulaError as E;
        let code = match &e {
            E::TooManyPunctures(_) => "too-many-punctures",
            E::BackendMismatch => "backend-mismatch",
            E::InvalidSurface(_) => "invalid-surface",
            E::OutOfScopeTwisted => "out-of-scope-twisted",
            E::Eigen(_) => "eigen",
            E::Kring(_) => "kring",
        };
        CliError::new(code, e.to_string())
    }
}

/// Parse `argv` (without the program name already stripped or not — clap
/// handles both via `try_parse_from`) and run; rendered output goes to
/// `out`. Returns the process exit code.
pub fn run(argv: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own help/usage; exit code 2 for usage errors
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(err) => {
            let payload = json!({
                "error": {
                    "code": err.code,
                    "message": err.message,
                }
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&payload).unwrap());
            1
        }
    }
}

/// Entry point for the binary: parses the real process arguments and
/// writes to stdout.
pub fn run_main() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(&argv, &mut lock)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::ComputeRep(args) => compute_rep(args, cli.format, out),
        Command::ComputeChar(args) => compute_char(args, cli.format, out),
        Command::TubeMatrix {
            kind,
            semisimple,
            data_file,
        } => tube_matrix(
            kind,
            semisimple.as_deref(),
            data_file.as_deref(),
            cli.format,
            out,
        ),
        Command::OracleCount(args) => oracle_count(args, cli.format, out),
        Command::FitOperators {
            data_file,
            work_limit,
        } => fit_operators(data_file.as_deref(), *work_limit, cli.format, out),
        Command::Verify {
            data_file,
            work_limit,
        } => verify(data_file.as_deref(), *work_limit, out),
    }
}

fn build_spec(args: &SurfaceArgs) -> Result<SurfaceSpec, CliError> {
    let semisimple = EigenClass::parse_list(&args.semisimple)?;
    Ok(SurfaceSpec {
        genus: args.genus,
        r_plus: args.jordan_plus,
        r_minus: args.jordan_minus,
        minus_id: args.minus_id,
        semisimple,
    })
}

/// The closed-formula route for a general surface: sigma-reduce the
/// holonomies, then apply the closed representation formula.
fn closed_rep_for_spec(spec: &SurfaceSpec) -> Result<Option<LocalizedClass>, CliError> {
    if spec.genus < 1 || spec.s() == 0 {
        return Ok(None); // closed formula not applicable
    }
    let mut eigs = spec.semisimple.clone();
    if spec.sigma() == -1 {
        eigs[0] = eigs[0].neg();
    }
    let r = spec.r_plus + spec.r_minus;
    Ok(Some(rep_class_closed(spec.genus, r, &eigs)?))
}

fn emit_class(
    command: &str,
    class: &LocalizedClass,
    verified: Option<bool>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    match format {
        Format::Text => {
            writeln!(out, "{class}")?;
            match verified {
                Some(true) => writeln!(out, "verified: independent route agrees")?,
                Some(false) => writeln!(out, "verified: MISMATCH against independent route")?,
                None => {}
            }
        }
        Format::Json => {
            let payload = json!({
                "command": command,
                "class": class,
                "pretty": class.to_string(),
                "verified": verified,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&payload).unwrap())?;
        }
    }
    Ok(if verified == Some(false) { 1 } else { 0 })
}

fn compute_rep(args: &SurfaceArgs, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = build_spec(args)?;
    let data = OperatorData::load(args.data_file.as_deref())?;
    let class = assemble_representation_class(&spec, &data)?;
    let verified = if args.verify {
        closed_rep_for_spec(&spec)?.map(|closed| closed == class)
    } else {
        None
    };
    emit_class("compute-rep", &class, verified, format, out)
}

fn compute_char(args: &SurfaceArgs, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = build_spec(args)?;
    let class = char_class_closed(&spec)?;
    let verified = if args.verify {
        // independent route: representation class via the operator
        // pipeline, pushed through the GIT strata assembly
        let data = OperatorData::load(args.data_file.as_deref())?;
        let rep = assemble_representation_class(&spec, &data)?;
        let mut eigs = spec.semisimple.clone();
        if spec.sigma() == -1 {
            eigs[0] = eigs[0].neg();
        }
        let inv = LocalizedClass::inv_q3_minus_q(1);
        let strata = if spec.r_plus + spec.r_minus > 0 {
            rep.mul(&inv)
        } else {
            let (reducible, diag) = reducible_and_diag_classes(spec.genus, &eigs)?;
            rep.sub(&reducible).mul(&inv).add(&diag)
        };
        Some(strata == class)
    } else {
        None
    };
    emit_class("compute-char", &class, verified, format, out)
}

fn column_elements(
    kind: &TubeKind,
    data: &OperatorData,
) -> Result<Vec<(CoreGen, ModuleElement)>, CliError> {
    let mut cols = Vec::new();
    for g in CORE_GENS {
        let v = ModuleElement::core_gen(g);
        let image = tube_apply(kind, data, &v, true)?;
        cols.push((g, image));
    }
    Ok(cols)
}

fn tube_matrix(
    kind: &str,
    semisimple: Option<&str>,
    data_file: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let tube = match kind {
        "handle" => TubeKind::Handle,
        "jordan-plus" => TubeKind::JordanPlus,
        "jordan-minus" => TubeKind::JordanMinus,
        "semisimple" => {
            let eig = semisimple.ok_or_else(|| {
                CliError::new("usage", "kind=semisimple requires --semisimple <eigenvalue>")
            })?;
            TubeKind::Semisimple(TraceOrbit::of(&EigenClass::parse(eig)?)?)
        }
        other => {
            return Err(CliError::new(
                "usage",
                format!("unknown tube kind '{other}' (expected handle, jordan-plus, jordan-minus or semisimple)"),
            ))
        }
    };
    let data = match tube {
        TubeKind::Semisimple(_) => OperatorData::load(data_file).unwrap_or_else(|_| OperatorData {
            handle: crate::operators::CoreMatrix::zero(),
            jordan_plus: crate::operators::CoreMatrix::zero(),
            jordan_minus: crate::operators::CoreMatrix::zero(),
        }),
        _ => OperatorData::load(data_file)?,
    };
    let cols = column_elements(&tube, &data)?;
    match format {
        Format::Text => {
            writeln!(out, "reduced tube operator: {tube}")?;
            for (g, image) in &cols {
                writeln!(out, "  {g} -> {image}")?;
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            for (g, image) in &cols {
                obj.insert(g.to_string(), serde_json::to_value(image).unwrap());
            }
            let payload = json!({
                "command": "tube-matrix",
                "kind": tube.to_string(),
                "columns": obj,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&payload).unwrap())?;
        }
    }
    Ok(0)
}

fn oracle_punctures(args: &OracleArgs) -> Vec<PunctureKind> {
    let mut punctures = Vec::new();
    punctures.extend(std::iter::repeat_n(
        PunctureKind::JordanPlus,
        args.jordan_plus as usize,
    ));
    punctures.extend(std::iter::repeat_n(
        PunctureKind::JordanMinus,
        args.jordan_minus as usize,
    ));
    punctures.extend(std::iter::repeat_n(
        PunctureKind::MinusId,
        args.minus_id as usize,
    ));
    punctures.extend(
        args.semisimple_trace
            .iter()
            .map(|&t| PunctureKind::Semisimple(t)),
    );
    punctures
}

fn oracle_count(args: &OracleArgs, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let punctures = oracle_punctures(args);
    // symbolic comparison class: one free eigenvalue per semisimple
    // puncture (fully generic configuration)
    let compare_class = if args.compare {
        let s = args.semisimple_trace.len();
        let spec = SurfaceSpec {
            genus: args.genus,
            r_plus: args.jordan_plus,
            r_minus: args.jordan_minus,
            minus_id: args.minus_id,
            semisimple: (0..s)
                .map(|i| EigenClass::symbolic_generator(i, s.max(1)))
                .collect::<Result<_, _>>()?,
        };
        let data = OperatorData::load(args.data_file.as_deref())?;
        Some(assemble_representation_class(&spec, &data)?)
    } else {
        None
    };
    let mut results = Vec::new();
    for &p in &args.prime {
        let group = GroupData::new(p)?;
        let count = group.count_representation_points(args.genus, &punctures, args.work_limit)?;
        let evaluated = match &compare_class {
            Some(c) => {
                let v = c.evaluate_at(&BigRational::from_integer(p.into()))?;
                Some(v)
            }
            None => None,
        };
        results.push((p, count, evaluated));
    }
    match format {
        Format::Text => {
            for (p, count, evaluated) in &results {
                match evaluated {
                    Some(v) => {
                        let agree = *v == BigRational::from_integer((*count).into());
                        writeln!(
                            out,
                            "p={p}: count = {count}, class value = {v} ({})",
                            if agree { "agree" } else { "differ" }
                        )?;
                    }
                    None => writeln!(out, "p={p}: count = {count}")?,
                }
            }
        }
        Format::Json => {
            let entries: Vec<_> = results
                .iter()
                .map(|(p, count, evaluated)| {
                    json!({
                        "prime": p,
                        "count": count.to_string(),
                        "class_value": evaluated.as_ref().map(|v| v.to_string()),
                        "agree": evaluated
                            .as_ref()
                            .map(|v| *v == BigRational::from_integer((*count).into())),
                    })
                })
                .collect();
            let payload = json!({
                "command": "oracle-count",
                "results": entries,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&payload).unwrap())?;
        }
    }
    Ok(0)
}

fn fit_operators(
    data_file: Option<&Path>,
    work_limit: u64,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let file = fit_all(work_limit)?;
    let rendered = render_operator_file(&file);
    let path = data_file
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("data/operators.json"));
    std::fs::write(&path, &rendered)?;
    match format {
        Format::Text => {
            writeln!(
                out,
                "fitted {} operators -> {}",
                file.operators.len(),
                path.display()
            )?;
        }
        Format::Json => {
            let payload = json!({
                "command": "fit-operators",
                "operators": file.operators.iter().map(|o| o.kind.clone()).collect::<Vec<_>>(),
                "path": path.display().to_string(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&payload).unwrap())?;
        }
    }
    Ok(0)
}

// --- verify ----------------------------------------------------------------

type CheckResult = Result<(), String>;

fn check_eta_inverse() -> CheckResult {
    let mut gens: Vec<ModuleElement> = CORE_GENS
        .iter()
        .map(|&g| ModuleElement::core_gen(g))
        .collect();
    let sym = EigenClass::symbolic_generator(0, 1).map_err(|e| e.to_string())?;
    gens.push(ModuleElement::sky_gen(
        TraceOrbit::of(&sym).map_err(|e| e.to_string())?,
    ));
    for v in &gens {
        let round = eta_inverse_apply(&eta_apply(v));
        if round != *v {
            return Err(format!("eta round trip failed on {v}"));
        }
    }
    Ok(())
}

fn check_generic_coefficients() -> CheckResult {
    let q = LocalizedClass::q();
    for s in 1..=8 {
        let (a, b, c, d) = generic_coefficients(s);
        let rel = LocalizedClass::q2_plus_q()
            .mul(&a)
            .add(&q.mul(&b))
            .sub(&q.mul(&c))
            .sub(&q.mul(&d));
        if !rel.is_zero() {
            return Err(format!("coefficient relation fails at s = {s}"));
        }
    }
    Ok(())
}

fn verify_eig_configs() -> Result<Vec<Vec<EigenClass>>, String> {
    let rat = |n: i64, d: i64| EigenClass::rational_int(n, d).map_err(|e| e.to_string());
    let sym = |i: usize, n: usize| EigenClass::symbolic_generator(i, n).map_err(|e| e.to_string());
    let zeta = |n: u64, k: u64| EigenClass::root_of_unity(n, k).map_err(|e| e.to_string());
    Ok(vec![
        vec![sym(0, 1)?],
        vec![sym(0, 2)?, sym(1, 2)?],
        vec![rat(3, 1)?],
        vec![rat(2, 1)?, rat(1, 2)?],
        vec![zeta(4, 1)?, zeta(4, 1)?],
        vec![zeta(3, 1)?, zeta(3, 1)?, zeta(3, 1)?],
    ])
}

fn check_iterated_tube() -> CheckResult {
    for eigs in verify_eig_configs()? {
        let closed = iterated_tube_closed_form(&eigs).map_err(|e| e.to_string())?;
        let mut pipeline = ModuleElement::core_gen(CoreGen::T2);
        for e in &eigs {
            let t0 = TraceOrbit::of(e).map_err(|e| e.to_string())?;
            pipeline = semisimple_tube_apply(&t0, &pipeline, true).map_err(|e| e.to_string())?;
        }
        if closed != pipeline {
            return Err(format!("closed form diverges from pipeline for {eigs:?}"));
        }
    }
    Ok(())
}

fn check_rep_theorem(data: &OperatorData) -> CheckResult {
    for g in 1..=2u32 {
        for r in 0..=2u32 {
            for eigs in verify_eig_configs()? {
                let spec = SurfaceSpec {
                    genus: g,
                    r_plus: r,
                    semisimple: eigs.clone(),
                    ..Default::default()
                };
                let pipeline =
                    assemble_representation_class(&spec, data).map_err(|e| e.to_string())?;
                let closed = rep_class_closed(g, r, &eigs).map_err(|e| e.to_string())?;
                if closed != pipeline {
                    return Err(format!("rep formula diverges at g={g} r={r} eigs={eigs:?}"));
                }
            }
        }
    }
    Ok(())
}

fn check_char_theorem() -> CheckResult {
    // char_class_closed internally asserts direct formula == strata
    // assembly on every call
    for g in 1..=2u32 {
        for r in 0..=2u32 {
            for eigs in verify_eig_configs()? {
                let spec = SurfaceSpec {
                    genus: g,
                    r_plus: r,
                    semisimple: eigs,
                    ..Default::default()
                };
                char_class_closed(&spec).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(())
}

fn check_oracle(data: &OperatorData, work_limit: u64) -> CheckResult {
    // (genus, jordan-plus count, semisimple traces, prime); all primes are
    // faithful for the listed trace data
    let configs: [(u32, u32, &[u64], u64); 4] = [
        (1, 0, &[], 3),
        (1, 0, &[], 5),
        (1, 1, &[], 3),
        (0, 0, &[0], 3),
    ];
    for (genus, r, traces, p) in configs {
        let group = GroupData::new(p).map_err(|e| e.to_string())?;
        let mut punctures = vec![PunctureKind::JordanPlus; r as usize];
        punctures.extend(traces.iter().map(|&t| PunctureKind::Semisimple(t)));
        let count = group
            .count_representation_points(genus, &punctures, work_limit)
            .map_err(|e| e.to_string())?;
        let s = traces.len();
        let spec = SurfaceSpec {
            genus,
            r_plus: r,
            semisimple: (0..s)
                .map(|i| EigenClass::symbolic_generator(i, s.max(1)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?,
            ..Default::default()
        };
        let class = assemble_representation_class(&spec, data).map_err(|e| e.to_string())?;
        let value = class
            .evaluate_at(&BigRational::from_integer(p.into()))
            .map_err(|e| e.to_string())?;
        if value != BigRational::from_integer(count.into()) {
            return Err(format!(
                "count {count} != class value {value} at p={p} (g={genus}, r={r}, traces={traces:?})"
            ));
        }
    }
    Ok(())
}

fn verify(data_file: Option<&Path>, work_limit: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let data = OperatorData::load(data_file)?;
    let checks: Vec<(&str, CheckResult)> = vec![
        ("eta-round-trip", check_eta_inverse()),
        ("generic-coefficient-relation", check_generic_coefficients()),
        ("iterated-tube-closed-form", check_iterated_tube()),
        ("rep-theorem-vs-pipeline", check_rep_theorem(&data)),
        ("char-theorem-routes", check_char_theorem()),
        ("finite-field-oracle", check_oracle(&data, work_limit)),
    ];
    let mut failed = 0;
    for (name, result) in &checks {
        match result {
            Ok(()) => writeln!(out, "PASS {name}")?,
            Err(msg) => {
                failed += 1;
                writeln!(out, "FAIL {name}: {msg}")?;
            }
        }
    }
    Ok(if failed == 0 { 0 } else { 1 })
}
