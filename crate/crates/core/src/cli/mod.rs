//! Command-line surface: file loading, the verification commands and their reports.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 on parse or validation errors.

mod files;
mod parse;
mod report;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde_json::json;

pub use files::{
    from_json, load_algebra, read_input, AlgebraFile, AnsatzEntry, AnsatzFile, BivectorTerm, BracketEntry, InputRecord, RMatrixFile, TermEntry,
    TwistFile, TwistTerm,
};
pub use parse::parse_expr;
pub use report::{Check, ReportFile, TermVerdict};

use crate::dynr::{
    cdybe_residual, closed_form, construct_at_point, construct_r, equivariance_residual, fatness, BaseStructure, ClosedForm, DynamicalR,
};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, Rational, ZeroTest, DEFAULT_SEED, DEFAULT_TERM_BUDGET, DEFAULT_TRIALS};
use crate::liealg::{BuiltinName, Decomposition};
use crate::pbw::PbwStar;
use crate::qdybe::{solve_twist_order, DynTensor, TensorAlgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    ConstructR,
    CheckCdybe,
    CheckEquivariance,
    Fatness,
    Star,
    CheckCocycle,
    CheckQdybe,
    #[value(name = "derive-R", alias = "derive-r")]
    DeriveR,
    CheckLemma,
    SolveTwist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ZeroTestArg {
    Exact,
    Sampled,
    Auto,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "dynrmat", version, about = "Construct and verify dynamical r-matrices and their twist quantizations")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Algebra file, or `builtin:sl2`, `builtin:sl3`, `builtin:heisenberg(m,n)`, `builtin:abelian(n)`.
    #[arg(long)]
    pub algebra: Option<String>,
    /// `constructed`, `closed` (builtin closed forms), or an r-matrix file.
    #[arg(long)]
    pub rmatrix: Option<String>,
    /// Twist file; its `algebra` field is used when `--algebra` is absent
    #[arg(long)]
    pub twist: Option<PathBuf>,
    /// Ansatz file for `solve-twist`.
    #[arg(long)]
    pub ansatz: Option<PathBuf>,
    /// Truncation order in ℏ (for `solve-twist`, the order being solved).
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = ZeroTestArg::Auto)]
    pub zero_test: ZeroTestArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Comma-separated rational coordinates, e.g. `1/2,3`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// First factor for `star`.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Second factor for `star`.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    fn strategy(&self) -> ZeroTest {
        match self.zero_test {
            ZeroTestArg::Exact => ZeroTest::Exact { budget: DEFAULT_TERM_BUDGET },
            ZeroTestArg::Sampled => ZeroTest::Sampled { seed: self.seed, trials: DEFAULT_TRIALS },
            ZeroTestArg::Auto => ZeroTest::Auto { budget: DEFAULT_TERM_BUDGET, seed: self.seed, trials: DEFAULT_TRIALS },
        }
    }
}

/// Errors that mean the inputs were unusable, as opposed to a check failing.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Syntax { .. }
            | Error::Format(_)
            | Error::UnknownName(_)
            | Error::InvalidArgument(_)
            | Error::PointDimension { .. }
            | Error::ArityMismatch(..)
            | Error::NotUnital
            | Error::SlotOutOfRange { .. }
            | Error::SlotNotFree(_)
            | Error::DivisionByZero(_)
    )
}

fn command_name(c: Command) -> String {
    c.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn zero_test_name(z: ZeroTestArg) -> String {
    z.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

/// Runs one command; the report is complete even when the command fails.
pub fn run(cli: &Cli) -> (i32, ReportFile) {
    let mut report = ReportFile::new(&command_name(cli.command), cli.seed, &zero_test_name(cli.zero_test));
    match execute(cli, &mut report) {
        Ok(()) => {
            report.passed = report.checks.iter().all(|c| c.passed);
            (if report.passed { 0 } else { 1 }, report)
        }
        Err(e) => {
            report.passed = false;
            report.error = Some(e.to_string());
            (if is_input_error(&e) { 2 } else { 1 }, report)
        }
    }
}

/// Parses arguments (the first is the program name) and runs; argument errors come back as text.
pub fn run_args<I, T>(args: I) -> std::result::Result<(i32, ReportFile), String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
    Ok(run(&cli))
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (code, report) = run(&cli);
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
            for c in &report.checks {
                println!("{}: {}", c.name, if c.passed { "pass" } else { "FAIL" });
            }
            if let Some(e) = &report.error {
                eprintln!("error: {e}");
            }
        }
        None => print!("{text}"),
    }
    code
}

/// Applies the `THREADS` override to the global thread pool.
pub fn init_threads() {
    if let Some(n) = std::env::var("THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn parse_point(text: &str, rank: usize) -> Result<Vec<Rational>> {
    let point: Vec<Rational> = text.split(',').map(parse_rational).collect::<Result<_>>()?;
    if point.len() != rank {
        return Err(Error::PointDimension { expected: rank, got: point.len() });
    }
    Ok(point)
}

fn algebra(cli: &Cli, report: &mut ReportFile) -> Result<Decomposition> {
    let source = cli.algebra.as_deref().ok_or_else(|| Error::InvalidArgument("--algebra is required".into()))?;
    let (dec, record) = load_algebra(source)?;
    report.inputs.insert("algebra".into(), record);
    Ok(dec)
}

fn closed_form_for(source: &str) -> Result<ClosedForm> {
    let name: BuiltinName = source
        .strip_prefix("builtin:")
        .ok_or_else(|| Error::InvalidArgument("--rmatrix closed needs a builtin algebra".into()))?
        .parse()?;
    match name {
        BuiltinName::Sl2 | BuiltinName::Sl3 => Ok(ClosedForm::SimpleCartan(name)),
        BuiltinName::Heisenberg(m, n) => Ok(ClosedForm::Heisenberg(m, n)),
        BuiltinName::Abelian(_) => Err(Error::InvalidArgument("no closed form for abelian algebras".into())),
    }
}

/// The r-matrix requested by `--rmatrix` (default `constructed`).
fn rmatrix(cli: &Cli, dec: &Decomposition, report: &mut ReportFile) -> Result<DynamicalR> {
    match cli.rmatrix.as_deref().unwrap_or("constructed") {
        "constructed" => construct_r(dec),
        "closed" => closed_form(&closed_form_for(cli.algebra.as_deref().unwrap_or_default())?),
        path => {
            let (text, record) = read_input(Path::new(path))?;
            report.inputs.insert("rmatrix".into(), record);
            let file: RMatrixFile = from_json(&text, path)?;
            let r = file.to_multivector(dec).map_err(|e| Error::Format(format!("{path}: {e}")))?;
            DynamicalR::new(dec.clone(), r)
        }
    }
}

/// Loads the twist file and its algebra (`--algebra` wins over the file's own reference).
fn twist(cli: &Cli, report: &mut ReportFile) -> Result<(TensorAlgebra, DynTensor)> {
    let path = cli.twist.as_deref().ok_or_else(|| Error::InvalidArgument("--twist is required".into()))?;
    load_twist(cli, path, report)
}

fn load_twist(cli: &Cli, path: &Path, report: &mut ReportFile) -> Result<(TensorAlgebra, DynTensor)> {
    let origin = path.display().to_string();
    let (text, record) = read_input(path)?;
    report.inputs.insert("twist".into(), record);
    let file: TwistFile = from_json(&text, &origin)?;
    let dec = match (&cli.algebra, &file.algebra) {
        (Some(_), _) => algebra(cli, report)?,
        (None, Some(reference)) => {
            let (dec, record) = load_algebra(&files::resolve_relative(reference, path))?;
            report.inputs.insert("algebra".into(), record);
            dec
        }
        (None, None) => return Err(Error::InvalidArgument("no algebra: pass --algebra or set \"algebra\" in the twist file".into())),
    };
    if file.arity != 2 {
        return Err(Error::Format(format!("{origin}: twists have arity 2, found {}", file.arity)));
    }
    let ctx = TensorAlgebra::new(dec, cli.order);
    let f = file.to_tensor(&ctx).map_err(|e| Error::Format(format!("{origin}: {e}")))?;
    let ctx = ctx.with_order(f.order());
    report.order = Some(f.order());
    Ok((ctx, f))
}

fn execute(cli: &Cli, report: &mut ReportFile) -> Result<()> {
    let strategy = cli.strategy();
    match cli.command {
        Command::Validate => {
            let source = cli.algebra.as_deref().ok_or_else(|| Error::InvalidArgument("--algebra is required".into()))?;
            let (alg, base, complement) = if source.starts_with("builtin:") {
                let (dec, record) = load_algebra(source)?;
                report.inputs.insert("algebra".into(), record);
                (dec.algebra().clone(), dec.base().to_vec(), dec.complement().to_vec())
            } else {
                let (text, record) = read_input(Path::new(source))?;
                report.inputs.insert("algebra".into(), record);
                let file: AlgebraFile = from_json(&text, source)?;
                (file.lie_algebra().map_err(|e| Error::Format(format!("{source}: {e}")))?, file.base, file.complement)
            };
            let lie = alg.validate();
            let message = (!lie.is_valid()).then(|| serde_json::to_string(&lie.violations).unwrap_or_default());
            report.checks.push(Check::flag("lie_algebra", lie.is_valid(), message));
            if lie.is_valid() {
                let dec = Decomposition::new(Arc::new(alg), base, complement)?;
                let red = dec.check_reductive();
                let message = (!red.is_reductive()).then(|| serde_json::to_string(&red.violations).unwrap_or_default());
                report.checks.push(Check::flag("reductive", red.is_reductive(), message));
            }
        }
        Command::ConstructR => {
            let dec = algebra(cli, report)?;
            let r = construct_r(&dec)?;
            let det = r.construction().map(|c| c.det.to_string()).unwrap_or_default();
            let mut output = json!({ "r": RMatrixFile::from_multivector(r.bivector(), dec.algebra().labels()), "det": det });
            if let Some(p) = &cli.point {
                let point = parse_point(p, dec.rank())?;
                let at = construct_at_point(&dec, &point)?;
                output["at_point"] = json!(RMatrixFile::from_multivector(&at.r(), dec.algebra().labels()));
            }
            report.checks.push(Check::flag("constructed", true, None));
            report.output = Some(output);
        }
        Command::CheckCdybe => {
            let dec = algebra(cli, report)?;
            let labels = dec.algebra().labels().to_vec();
            match (rmatrix(cli, &dec, report), &cli.point) {
                (Err(Error::ComplementTooLarge(_)), Some(p)) => {
                    let point = parse_point(p, dec.rank())?;
                    let at = construct_at_point(&dec, &point)?;
                    report.checks.push(Check::multivector("cdybe_at_point", &at.cdybe_residual(&dec), &labels, strategy));
                }
                (r, _) => report.checks.push(Check::multivector("cdybe", &cdybe_residual(&r?), &labels, strategy)),
            }
        }
        Command::CheckEquivariance => {
            let dec = algebra(cli, report)?;
            let labels = dec.algebra().labels().to_vec();
            let r = rmatrix(cli, &dec, report)?;
            let base = BaseStructure::new(&dec);
            for (i, &h) in dec.base().iter().enumerate() {
                let res = equivariance_residual(&r, &base, i)?;
                report.checks.push(Check::multivector(&format!("equivariance[{}]", labels[h]), &res, &labels, strategy));
            }
        }
        Command::Fatness => {
            let dec = algebra(cli, report)?;
            match &cli.point {
                Some(p) => {
                    let point = parse_point(p, dec.rank())?;
                    let fat = fatness(&dec, &point)?;
                    let at = point.iter().enumerate().map(|(i, x)| format!("λ{}={}", i + 1, crate::exact::format_rational(x))).collect::<Vec<_>>().join(",");
                    let message = if fat.fat { format!("fat at {at}") } else { format!("not fat at {at}") };
                    report.checks.push(Check::flag("fat", fat.fat, Some(message)));
                    report.output = Some(json!(fat));
                }
                None => {
                    let det = crate::dynr::det_a(&dec);
                    let fat = !det.is_zero();
                    let message = if fat { "fat on the complement of det a(λ) = 0".to_string() } else { "degenerate everywhere".to_string() };
                    report.checks.push(Check::flag("fat", fat, Some(message)));
                    report.output = Some(json!({ "det": det.to_string() }));
                }
            }
        }
        Command::Star => {
            let dec = algebra(cli, report)?;
            let rank = dec.rank();
            let f = parse_expr(cli.f.as_deref().ok_or_else(|| Error::InvalidArgument("--f is required".into()))?, Some(rank))?;
            let g = parse_expr(cli.g.as_deref().ok_or_else(|| Error::InvalidArgument("--g is required".into()))?, Some(rank))?;
            let star = PbwStar::for_decomposition(&dec);
            let series = star.star_expr(&f, &g, cli.order)?;
            report.order = Some(cli.order);
            let coeffs: Vec<String> = series
                .iter()
                .map(|e| e.to_ratfn(DEFAULT_TERM_BUDGET).map(|r| r.to_expr_string()))
                .collect::<Result<_>>()?;
            report.checks.push(Check::flag("star", true, None));
            report.output = Some(json!({ "f": f.to_string(), "g": g.to_string(), "coefficients": coeffs }));
        }
        Command::CheckCocycle => {
            let (ctx, f) = twist(cli, report)?;
            let labels = ctx.labels().to_vec();
            report.checks.push(Check::tensor("cocycle", &ctx.cocycle_residual(&f)?, &labels, strategy));
            let (left, right) = ctx.counit_check(&f)?;
            report.checks.push(Check::tensor("counit_left", &left, &labels, strategy));
            report.checks.push(Check::tensor("counit_right", &right, &labels, strategy));
        }
        Command::CheckQdybe => {
            let (ctx, f) = twist(cli, report)?;
            let labels = ctx.labels().to_vec();
            let r = ctx.r_from_twist(&f)?;
            report.checks.push(Check::tensor("qdybe", &ctx.qdybe_residual(&r)?, &labels, strategy));
        }
        Command::DeriveR => {
            let (ctx, f) = twist(cli, report)?;
            let r = ctx.r_from_twist(&f)?;
            report.checks.push(Check::flag("derived", true, None));
            report.output = Some(json!(TwistFile::from_tensor(&r, ctx.labels(), None)));
        }
        Command::CheckLemma => {
            let (ctx, f) = twist(cli, report)?;
            let labels = ctx.labels().to_vec();
            let (first, second) = ctx.lemma_check(&f)?;
            report.checks.push(Check::tensor("lemma_first_leg", &first, &labels, strategy));
            report.checks.push(Check::tensor("lemma_second_leg", &second, &labels, strategy));
            report.checks.push(Check::tensor("shifted_r", &ctx.shifted_r_residual(&f)?, &labels, strategy));
            let phi = ctx.phi(&f)?.sub(&ctx.phi_from_shift(&f)?);
            report.checks.push(Check::tensor("phi_shifted_form", &phi, &labels, strategy));
        }
        Command::SolveTwist => solve(cli, report)?,
    }
    Ok(())
}

fn solve(cli: &Cli, report: &mut ReportFile) -> Result<()> {
    let k = cli.order;
    let (ctx, lower) = match &cli.twist {
        Some(path) => {
            let (ctx, f) = load_twist(&Cli { order: k, ..cli.clone() }, path, report)?;
            (ctx.with_order(k), f)
        }
        None => {
            let dec = algebra(cli, report)?;
            let ctx = TensorAlgebra::new(dec, k);
            let one = ctx.one(2);
            (ctx, one)
        }
    };
    report.order = Some(k);
    let dec = ctx.decomposition().clone();
    let path = cli.ansatz.as_deref().ok_or_else(|| Error::InvalidArgument("--ansatz is required".into()))?;
    let origin = path.display().to_string();
    let (text, record) = read_input(path)?;
    report.inputs.insert("ansatz".into(), record);
    let ansatz = from_json::<AnsatzFile>(&text, &origin)?.to_terms(&dec).map_err(|e| Error::Format(format!("{origin}: {e}")))?;
    let classical = match (&cli.rmatrix, k) {
        (Some(_), 1) => Some(ctx.with_order(1).iota(rmatrix(cli, &dec, report)?.bivector(), 1)?),
        (Some(_), _) => return Err(Error::InvalidArgument("--rmatrix constrains order 1 only".into())),
        (None, _) => None,
    };
    let labels = dec.algebra().labels().to_vec();
    match solve_twist_order(&ctx, &lower, &ansatz, k, classical.as_ref()) {
        Ok(sol) => {
            report.checks.push(Check::flag("solvable", true, Some(format!("{}-dimensional affine solution set", sol.kernel.len()))));
            let coefficients: Vec<String> = sol.coefficients.particular.iter().map(crate::exact::format_rational).collect();
            let kernel: Vec<Vec<String>> = sol.coefficients.kernel.iter().map(|v| v.iter().map(crate::exact::format_rational).collect()).collect();
            report.output = Some(json!({
                "particular": TwistFile::from_tensor(&sol.particular, &labels, cli.algebra.clone()),
                "coefficients": coefficients,
                "kernel": kernel,
            }));
        }
        Err(Error::Infeasible { order }) => {
            let residual = ctx.with_order(order).cocycle_residual(&lower.truncate(order - 1).truncate(order))?.order_part(order);
            let mut check = Check::tensor("solvable", &residual, &labels, ZeroTest::exact());
            check.passed = false;
            check.message = Some(format!("no combination of the ansatz solves order {order}; failures list the residual before correction"));
            report.checks.push(check);
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("dynrmat").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn builtin_checks_pass() {
        let (code, report) = run(&cli(&["check-cdybe", "--algebra", "builtin:sl2", "--rmatrix", "constructed"]));
        assert_eq!(code, 0, "{}", report.to_json());
        let (code, _) = run(&cli(&["check-equivariance", "--algebra", "builtin:heisenberg(1,1)", "--rmatrix", "closed"]));
        assert_eq!(code, 0);
    }

    #[test]
    fn fatness_at_origin_fails() {
        let (code, report) = run(&cli(&["fatness", "--algebra", "builtin:sl2", "--point", "0"]));
        assert_eq!(code, 1);
        assert_eq!(report.checks[0].message.as_deref(), Some("not fat at λ1=0"));
        let (code, _) = run(&cli(&["fatness", "--algebra", "builtin:sl2", "--point", "0,1"]));
        assert_eq!(code, 2);
    }

    #[test]
    fn star_reports_coefficients() {
        let (code, report) = run(&cli(&["star", "--algebra", "builtin:heisenberg(1,1)", "--f", "l1", "--g", "l2", "--order", "2"]));
        assert_eq!(code, 0, "{}", report.to_json());
        assert_eq!(report.output.unwrap()["coefficients"], json!(["l1*l2", "1/2*l3", "0"]));
        let (code, report) = run(&cli(&["star", "--algebra", "builtin:sl2", "--f", "1//l1", "--g", "l1"]));
        assert_eq!(code, 2);
        assert!(report.error.unwrap().contains("column 3"));
    }

    #[test]
    fn missing_inputs_exit_2() {
        assert_eq!(run(&cli(&["check-cocycle"])).0, 2);
        assert_eq!(run(&cli(&["validate", "--algebra", "builtin:so5"])).0, 2);
        assert_eq!(main_with_args(["dynrmat", "no-such-command"]), 2);
    }
}
