//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
//! 3 violated mathematical precondition (with a machine-readable JSON
//! reason on stderr). FTMODSYM_THREADS caps the worker pool.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ftmodsym::error::Error as LibError;
use ftmodsym::explicit_basis::{basis_enumerate, complete_parabolic_basis, rewrite};
use ftmodsym::field::FqField;
use ftmodsym::hecke::{
    atkin_lehner_matrix, hecke_matrix, heilbronn_enumerate, SymbolBasis,
};
use ftmodsym::json;
use ftmodsym::poly::{format_poly, parse_poly, Poly};
use ftmodsym::presentation::{parabolic_subspace, solve_presentation};
use ftmodsym::projective::{p1_normalize, LevelContext};
use ftmodsym::verify::{run_all, run_suite, SuiteReport, SUITES};
use ftmodsym::winding::{
    independence_rank, independence_rank_mod_p, nonvanishing_count, winding_denominator,
    winding_element,
};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

const ENUMERATION_GUARDRAIL: u64 = 20_000;

#[derive(Parser)]
#[command(
    name = "ftmodsym",
    about = "Exact modular symbols for Gamma_0(n) over Fq[T]",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    /// Field size q = p^e (a prime power)
    #[arg(long)]
    q: u64,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output to this path instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Allow P^1 enumerations past the q^deg > 20000 guardrail
    #[arg(long)]
    force: bool,
    /// Degree cap for lattice/rank computations (where applicable)
    #[arg(long, global = false)]
    cap: Option<usize>,
    /// Seed for randomized checks (where applicable)
    #[arg(long, default_value = "42")]
    seed: u64,
}

#[derive(Args)]
struct LevelArg {
    /// Monic level polynomial, e.g. "T^3+T+1"
    #[arg(long)]
    level: String,
}

#[derive(Subcommand)]
enum Command {
    /// The explicit basis at a prime level of odd degree
    Basis {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Coordinates of one generator in the explicit basis
    Rewrite {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
        /// Point "(u:v)", e.g. "(T^2:T+1)"
        #[arg(long, value_name = "POINT")]
        point: Option<String>,
        /// Point, positional form
        #[arg(value_name = "POINT")]
        point_pos: Option<String>,
    },
    /// Brute-force presentation: rank, torsion, generator coordinates
    Oracle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Hecke operator matrix and characteristic polynomial
    Hecke {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
        /// Monic ideal generator, e.g. "T"
        #[arg(long, value_name = "M")]
        m: Option<String>,
        /// Ideal generator, positional form
        #[arg(value_name = "M")]
        m_pos: Option<String>,
        /// Restrict to the parabolic block (prime levels)
        #[arg(long)]
        parabolic: bool,
    },
    /// The matrix set S_m implementing T_m (level-independent)
    Heilbronn {
        #[command(flatten)]
        common: Common,
        /// Monic ideal generator, e.g. "T"
        #[arg(long, value_name = "M")]
        m: Option<String>,
        /// Ideal generator, positional form
        #[arg(value_name = "M")]
        m_pos: Option<String>,
    },
    /// Atkin-Lehner involution matrix
    AtkinLehner {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
        /// Restrict to the parabolic block (prime levels)
        #[arg(long)]
        parabolic: bool,
    },
    /// Winding element, denominator, independence ranks, nonvanishing count
    Winding {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Nonvanishing count of central L-values via the stable orbit rank
    Nonvanish {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Run the invariant suites; exit 0 iff all checks pass
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArg,
        /// Run a single named suite
        #[arg(long)]
        suite: Option<String>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FTMODSYM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => fail(&err),
    }
}

/// Parse errors exit 2; everything else is a precondition failure, exit 3
/// with a machine-readable reason.
fn fail(err: &LibError) -> ExitCode {
    let (code, kind) = match err {
        LibError::Parse(_) => (2u8, "parse"),
        _ => (3u8, "precondition"),
    };
    let payload = json!({"error": err.to_string(), "kind": kind});
    eprintln!("{payload}");
    ExitCode::from(code)
}

fn field_for(q: u64) -> Result<FqField, LibError> {
    // factor q as p^e
    if q < 2 {
        return Err(LibError::NotPrime(q));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        p = q; // q itself is prime
    }
    let mut e = 0u32;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(LibError::NotPrime(q));
    }
    FqField::new(p as u32, e)
}

fn context(q: u64, level: &str) -> Result<LevelContext, LibError> {
    let fq = field_for(q)?;
    let n = parse_poly(level, &fq)?;
    LevelContext::new(fq, n)
}

fn guard_enumeration(ctx: &LevelContext, force: bool) -> Result<(), LibError> {
    let size = (ctx.fq.q as u64).checked_pow(ctx.degree as u32);
    match size {
        Some(s) if s <= ENUMERATION_GUARDRAIL => Ok(()),
        _ if force => Ok(()),
        _ => Err(LibError::Parse(format!(
            "q^deg(level) exceeds {ENUMERATION_GUARDRAIL}; pass --force to enumerate anyway"
        ))),
    }
}

fn emit(common: &Common, payload: &Value, csv: Option<String>, text: String) -> Result<ExitCode, LibError> {
    let body = match common.format {
        Format::Json => json::render(payload),
        Format::Csv => csv.ok_or_else(|| {
            LibError::Parse("csv output is only available for matrix artifacts".into())
        })?,
        Format::Text => text,
    };
    match &common.out {
        None => print!("{body}"),
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| LibError::Parse(format!("cannot write {}: {e}", path.display())))?;
            f.write_all(body.as_bytes())
                .map_err(|e| LibError::Parse(format!("write failed: {e}")))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parabolic_or_full(
    ctx: &LevelContext,
    parabolic: bool,
) -> Result<SymbolBasis, LibError> {
    if ctx.prime && ctx.degree % 2 == 1 {
        if parabolic {
            SymbolBasis::explicit_parabolic(ctx)
        } else {
            SymbolBasis::explicit(ctx)
        }
    } else {
        let pres = Arc::new(solve_presentation(ctx));
        if parabolic {
            ctx.require_prime()?;
            let family = complete_parabolic_basis(ctx, &pres)?;
            SymbolBasis::from_family(ctx, pres, family, "oracle-parabolic".into())
        } else {
            Ok(SymbolBasis::oracle_full(ctx, pres))
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, LibError> {
    match cmd {
        Command::Basis { common, level } => {
            let ctx = context(common.q, &level.level)?;
            let basis = basis_enumerate(&ctx)?;
            let payload = json::basis_json(&ctx, &basis);
            let mut text = format!(
                "explicit basis at level {} over F{} ({} elements)\n",
                format_poly(&ctx.modulus),
                ctx.fq.q,
                basis.len()
            );
            for (k, s, e) in &basis.blocks {
                let labels: Vec<String> =
                    basis.elements[*s..*e].iter().map(|p| p.to_string()).collect();
                text.push_str(&format!("  block k={k}: {}\n", labels.join(" ")));
            }
            emit(&common, &payload, None, text)
        }
        Command::Rewrite { common, level, point, point_pos } => {
            let ctx = context(common.q, &level.level)?;
            let point = pick_arg(point, point_pos, "point")?;
            let (u, v) = parse_point(&point, &ctx)?;
            let x = p1_normalize(&u, &v, &ctx)?;
            let basis = basis_enumerate(&ctx)?;
            let coords = rewrite(&x, &ctx)?;
            let payload = json!({
                "q": ctx.fq.q,
                "level": format_poly(&ctx.modulus),
                "point": x.to_string(),
                "basis": basis.elements.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "coords": json::vector_json(&coords),
                "conventions": json::conventions(),
            });
            let nonzero: Vec<String> = coords
                .iter()
                .zip(&basis.elements)
                .filter(|(c, _)| json::rational_str(c) != "0/1")
                .map(|(c, b)| format!("{} * {b}", json::rational_str(c)))
                .collect();
            let text = format!(
                "xi{x} = {}\n",
                if nonzero.is_empty() { "0".into() } else { nonzero.join(" + ") }
            );
            emit(&common, &payload, None, text)
        }
        Command::Oracle { common, level } => {
            let ctx = context(common.q, &level.level)?;
            guard_enumeration(&ctx, common.force)?;
            let pres = solve_presentation(&ctx);
            let mut payload = json::presentation_json(&ctx, &pres);
            if ctx.prime {
                let para = parabolic_subspace(&ctx, &pres)?;
                payload["parabolic_rank"] = json!(para.rank);
            }
            let text = format!(
                "level {} over F{}: rank {}, torsion {:?}\n",
                format_poly(&ctx.modulus),
                ctx.fq.q,
                pres.rank,
                pres.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>()
            );
            emit(&common, &payload, None, text)
        }
        Command::Hecke { common, level, m, m_pos, parabolic } => {
            let ctx = context(common.q, &level.level)?;
            let m = parse_poly(&pick_arg(m, m_pos, "m")?, &ctx.fq)?;
            if !(ctx.prime && ctx.degree % 2 == 1) {
                guard_enumeration(&ctx, common.force)?;
            }
            let basis = parabolic_or_full(&ctx, parabolic)?;
            let op = hecke_matrix(&m, &ctx, &basis)?;
            let payload = json::matrix_json(&ctx, &op);
            let csv = json::matrix_csv(&op);
            let text = matrix_text(&op);
            emit(&common, &payload, Some(csv), text)
        }
        Command::Heilbronn { common, m, m_pos } => {
            let fq = field_for(common.q)?;
            let m = parse_poly(&pick_arg(m, m_pos, "m")?, &fq)?;
            let set = heilbronn_enumerate(&m, &fq)?;
            let payload = json::heilbronn_json(&set);
            let csv = json::heilbronn_csv(&set);
            let mut text = format!("S_({}) has {} matrices\n", format_poly(&m), set.matrices.len());
            for mat in &set.matrices {
                text.push_str(&format!(
                    "  ({} {}; {} {})\n",
                    format_poly(&mat.a),
                    format_poly(&mat.b),
                    format_poly(&mat.c),
                    format_poly(&mat.d)
                ));
            }
            emit(&common, &payload, Some(csv), text)
        }
        Command::AtkinLehner { common, level, parabolic } => {
            let ctx = context(common.q, &level.level)?;
            if !(ctx.prime && ctx.degree % 2 == 1) {
                guard_enumeration(&ctx, common.force)?;
            }
            let basis = parabolic_or_full(&ctx, parabolic)?;
            let op = atkin_lehner_matrix(&ctx, &basis)?;
            let payload = json::matrix_json(&ctx, &op);
            let csv = json::matrix_csv(&op);
            let text = matrix_text(&op);
            emit(&common, &payload, Some(csv), text)
        }
        Command::Winding { common, level } => {
            let ctx = context(common.q, &level.level)?;
            let e = winding_element(&ctx)?;
            let delta = winding_denominator(&ctx, &e)?;
            let r_max = common.cap.unwrap_or((ctx.degree.saturating_sub(3)) / 2);
            let mut ranks = Vec::new();
            let mut ranks_p = Vec::new();
            for r in 0..=r_max {
                ranks.push((r, independence_rank(&ctx, r)?));
                ranks_p.push((r, independence_rank_mod_p(&ctx, r)?));
            }
            let nv = nonvanishing_count(&ctx)?;
            let basis = SymbolBasis::explicit_parabolic(&ctx)?;
            let payload = json::winding_json(
                &ctx,
                &e,
                &basis.labels(),
                &delta,
                &ranks,
                &ranks_p,
                nv.count,
                nv.stable_at_cap,
            );
            let coords: Vec<String> = e.vector.iter().map(json::rational_str).collect();
            let text = format!(
                "e = ({}) in basis {:?}\ndenominator = {delta}\nranks = {ranks:?}\nnonvanishing = {} (stable at cap {})\n",
                coords.join(", "),
                basis.labels(),
                nv.count,
                nv.stable_at_cap
            );
            emit(&common, &payload, None, text)
        }
        Command::Nonvanish { common, level } => {
            let ctx = context(common.q, &level.level)?;
            let nv = nonvanishing_count(&ctx)?;
            let payload = json!({
                "q": ctx.fq.q,
                "level": format_poly(&ctx.modulus),
                "nonvanishing": nv.count,
                "stable_at_cap": nv.stable_at_cap,
                "lower_bound": nv.lower_bound,
            });
            let text = format!(
                "nonvanishing central L-values: {} (bound {}, stable at cap {})\n",
                nv.count, nv.lower_bound, nv.stable_at_cap
            );
            emit(&common, &payload, None, text)
        }
        Command::Verify { common, level, suite } => {
            let ctx = context(common.q, &level.level)?;
            guard_enumeration(&ctx, common.force)?;
            let reports = match suite {
                Some(name) => vec![run_suite(&ctx, &name, common.seed)?],
                None => run_all(&ctx, common.seed)?,
            };
            let all_passed = reports.iter().all(SuiteReport::passed);
            let payload = verify_json(&reports);
            let text = verify_text(&reports);
            emit(&common, &payload, None, text)?;
            if all_passed {
                Ok(ExitCode::SUCCESS)
            } else {
                let first = reports
                    .iter()
                    .find_map(|r| r.first_failure().map(|c| (r.suite.clone(), c.clone())))
                    .expect("some suite failed");
                let msg = json!({
                    "failed": format!("{}/{}", first.0, first.1.name),
                    "detail": first.1.detail,
                });
                eprintln!("{msg}");
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn matrix_text(op: &ftmodsym::hecke::OperatorMatrix) -> String {
    let mut text = format!("{} on basis {:?}\n", op.label, op.basis_labels);
    for i in 0..op.mat.rows {
        let row: Vec<String> = op.mat.row(i).iter().map(json::rational_str).collect();
        text.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    let cp: Vec<String> = op.charpoly().iter().map(json::rational_str).collect();
    text.push_str(&format!("charpoly (leading first): [{}]\n", cp.join(", ")));
    text
}

fn pick_arg(
    flag: Option<String>,
    positional: Option<String>,
    name: &str,
) -> Result<String, LibError> {
    match (flag, positional) {
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (Some(_), Some(_)) => Err(LibError::Parse(format!(
            "pass --{name} or a positional value, not both"
        ))),
        (None, None) => Err(LibError::Parse(format!("missing required argument {name}"))),
    }
}

fn parse_point(s: &str, ctx: &LevelContext) -> Result<(Poly, Poly), LibError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| LibError::Parse(format!("point '{s}' must look like (u:v)")))?;
    let (u, v) = inner
        .split_once(':')
        .ok_or_else(|| LibError::Parse(format!("point '{s}' must look like (u:v)")))?;
    Ok((parse_poly(u, &ctx.fq)?, parse_poly(v, &ctx.fq)?))
}

fn verify_json(reports: &[SuiteReport]) -> Value {
    let suites: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "suite": r.suite,
                "passed": r.passed(),
                "checks": r
                    .checks
                    .iter()
                    .map(|c| {
                        json!({
                            "name": c.name,
                            "passed": c.passed,
                            "skipped": c.skipped,
                            "detail": c.detail,
                        })
                    })
                    .collect::<Vec<Value>>(),
            })
        })
        .collect();
    json!({
        "suites": suites,
        "known_suites": SUITES,
        "all_passed": reports.iter().all(SuiteReport::passed),
    })
}

fn verify_text(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reports {
        for c in &r.checks {
            let tag = if c.skipped {
                "SKIP"
            } else if c.passed {
                "PASS"
            } else {
                "FAIL"
            };
            if c.detail.is_empty() {
                out.push_str(&format!("[{tag}] {}/{}\n", r.suite, c.name));
            } else {
                out.push_str(&format!("[{tag}] {}/{}: {}\n", r.suite, c.name, c.detail));
            }
        }
    }
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failed: usize = reports
        .iter()
        .map(|r| r.checks.iter().filter(|c| !c.passed).count())
        .sum();
    out.push_str(&format!("{} checks, {} failed\n", total, failed));
    out
}
