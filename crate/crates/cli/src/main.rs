//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 2 a verification check failed (which
//! would contradict a proven bound, i.e. a bug somewhere), 3 input or
//! size errors.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use colevel::bounds::{
    affine_bound_table, complement_bound_table, polar_requirement, projective_bound_table,
    source_name, AmbientProblem, BoundTable, DegreeSequence,
};
use colevel::counting::{
    ax_katz_check, count_tower, dimension_hint, now_unix, CountOptions, PointCountRecord,
    VarietySpec, DEFAULT_CEILING,
};
use colevel::fixtures;
use colevel::zeta::{certify_factor, reconstruct, verify_polar, verify_whole_zeta, ZetaFunction};
use std::path::PathBuf;

const SLOW_CEILING: u64 = 1 << 44;

#[derive(Parser)]
#[command(
    name = "colevel",
    version,
    about = "Colevel bound tables, point counting, and zeta divisibility checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the colevel lower-bound table for a variety.
    Bounds(BoundsArgs),
    /// Count points over a tower of field extensions.
    Count(CountArgs),
    /// Count, reconstruct the zeta function, and certify divisibility.
    Verify(VerifyArgs),
    /// Run the exhaustive bound-property grids and fixture regressions.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Built-in example, e.g. det1:5, det2:4, cone, coordunion, fermat:3:3.
    #[arg(long, conflicts_with = "spec")]
    example: Option<String>,
    /// Variety description file (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Read the (homogeneous) equations as a projective variety.
    #[arg(long)]
    projective: bool,
    /// Also emit the table for the complement of the variety.
    #[arg(long)]
    complement: bool,
    /// text, json or csv.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TowerArgs {
    /// Prime characteristic.
    #[arg(long = "p")]
    p: u64,
    /// Base extension degree: counts run over GF(p^(s_base * s)).
    #[arg(long = "s-base", default_value_t = 1)]
    s_base: u32,
    /// Tower length: s = 1..=S.
    #[arg(long = "S")]
    tower: Option<u32>,
    /// Worker threads for counting (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Max point evaluations per count (default 2^36).
    #[arg(long)]
    ceiling: Option<u64>,
    /// Raise the evaluation ceiling to 2^44.
    #[arg(long)]
    slow: bool,
    /// Count cache file (also via COLEVEL_CACHE_DIR; default ./colevel-cache.json).
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    tower: TowerArgs,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    tower: TowerArgs,
    /// Zeta degree bounds: numerator then denominator.
    #[arg(long = "deg", num_args = 2, value_names = ["D_P", "D_Q"])]
    deg: Option<Vec<usize>>,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Count(args) => cmd_count(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Selftest(args) => Ok(cmd_selftest(args)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn meta() -> serde_json::Value {
    serde_json::json!({
        "tool": "colevel",
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix": now_unix(),
    })
}

fn emit(out: &Option<PathBuf>, text: String) -> colevel::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

/// What the bounds command needs: no polynomial expansion for the
/// built-in families.
struct BoundInput {
    label: String,
    problem: AmbientProblem,
    degrees: DegreeSequence,
    measured: Option<Vec<i64>>,
    notes: Vec<String>,
}

fn load_bound_input(source: &SourceArgs, projective: bool) -> colevel::Result<BoundInput> {
    match (&source.example, &source.spec) {
        (Some(name), None) => {
            let descriptor = fixtures::by_name(name)?;
            let problem = if projective {
                descriptor.projectivized_problem()?
            } else {
                descriptor.problem()
            };
            Ok(BoundInput {
                label: descriptor.label.clone(),
                problem,
                degrees: descriptor.degrees(),
                measured: None,
                notes: descriptor.notes.clone(),
            })
        }
        (None, Some(path)) => {
            let variety = VarietySpec::from_json_file(path)?;
            let variety = if projective && !variety.projective {
                variety.projectivize()?
            } else {
                variety
            };
            Ok(BoundInput {
                label: variety.label.clone(),
                problem: variety.problem(),
                degrees: DegreeSequence::new(variety.degrees().degrees().to_vec())?,
                measured: Some(variety.measured_degrees().to_vec()),
                notes: Vec::new(),
            })
        }
        _ => Err(colevel::Error::InvalidProblem(
            "provide exactly one of --example or --spec".into(),
        )),
    }
}

fn load_variety(source: &SourceArgs) -> colevel::Result<VarietySpec> {
    match (&source.example, &source.spec) {
        (Some(name), None) => Ok(fixtures::by_name(name)?.variety()),
        (None, Some(path)) => VarietySpec::from_json_file(path),
        _ => Err(colevel::Error::InvalidProblem(
            "provide exactly one of --example or --spec".into(),
        )),
    }
}

fn resolve_cache(tower: &TowerArgs) -> PathBuf {
    if let Some(path) = &tower.cache {
        return path.clone();
    }
    if let Ok(dir) = std::env::var("COLEVEL_CACHE_DIR") {
        return PathBuf::from(dir).join("counts.json");
    }
    PathBuf::from("colevel-cache.json")
}

fn count_options(tower: &TowerArgs) -> CountOptions {
    let ceiling = tower.ceiling.unwrap_or(if tower.slow {
        SLOW_CEILING
    } else {
        DEFAULT_CEILING
    });
    CountOptions {
        workers: tower.workers,
        ceiling,
        cache_path: Some(resolve_cache(tower)),
    }
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn bounds_tables(input: &BoundInput, complement: bool) -> colevel::Result<Vec<BoundTable>> {
    let base = if input.problem.projective {
        projective_bound_table(&input.problem, &input.degrees)?
    } else {
        affine_bound_table(&input.problem, &input.degrees)?
    };
    let mut tables = vec![base];
    if complement {
        tables.push(complement_bound_table(&input.problem, &input.degrees)?);
    }
    Ok(tables)
}

fn table_csv(tables: &[BoundTable]) -> String {
    let mut out =
        String::from("table,i,new_bound,deligne,ax_katz,esnault_katz,question_mu,source\n");
    for table in tables {
        let kind = colevel::bounds::kind_name(table.kind);
        for (i, e) in &table.entries {
            let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{kind},{i},{},{},{},{},{},{}\n",
                e.new_bound,
                e.deligne,
                e.ax_katz,
                opt(e.esnault_katz),
                opt(e.question_mu),
                source_name(e.source),
            ));
        }
    }
    out.pop();
    out
}

fn table_text(label: &str, tables: &[BoundTable]) -> String {
    let mut out = String::new();
    for table in tables {
        let kind = colevel::bounds::kind_name(table.kind);
        out.push_str(&format!(
            "{label} [{kind}]  N = {}, n = {}, degrees = {:?}\n",
            table.ambient_dim, table.dim, table.degrees
        ));
        out.push_str(&format!(
            "cohomology vanishes outside degrees [{}, {}]; entries bound the\n\
             Frobenius/Hodge colevel of compactly supported cohomology from below\n",
            table.min_degree, table.max_degree
        ));
        out.push_str("    i  new_bound  deligne  ax_katz  esnault_katz  question_mu  source\n");
        for (i, e) in &table.entries {
            let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{i:>5}  {:>9}  {:>7}  {:>7}  {:>12}  {:>11}  {}\n",
                e.new_bound,
                e.deligne,
                e.ax_katz,
                opt(e.esnault_katz),
                opt(e.question_mu),
                source_name(e.source),
            ));
        }
        out.push('\n');
    }
    out.pop();
    out
}

fn cmd_bounds(args: BoundsArgs) -> colevel::Result<i32> {
    let input = load_bound_input(&args.source, args.projective)?;
    let tables = bounds_tables(&input, args.complement)?;
    let text = match args.format.as_str() {
        "text" => {
            let mut t = table_text(&input.label, &tables);
            for note in &input.notes {
                t.push_str(&format!("\nnote: {note}"));
            }
            t
        }
        "csv" => table_csv(&tables),
        "json" => {
            let mut body = serde_json::json!({
                "meta": meta(),
                "label": input.label,
                "declared_degrees": input.degrees.degrees(),
                "bounds": tables[0].to_json(),
            });
            if let Some(measured) = &input.measured {
                body["measured_degrees"] = serde_json::json!(measured);
            }
            if !input.notes.is_empty() {
                body["notes"] = serde_json::json!(input.notes);
            }
            if let Some(comp) = tables.get(1) {
                body["complement"] = comp.to_json();
            }
            serde_json::to_string_pretty(&body)?
        }
        other => {
            return Err(colevel::Error::InvalidProblem(format!(
                "unknown format `{other}` (expected text, json or csv)"
            )))
        }
    };
    emit(&args.out, text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

fn record_text(record: &PointCountRecord) -> String {
    let mut out = format!(
        "{}: counts over GF({}^({} * s))\n",
        record.label, record.p, record.s_base
    );
    for (s, n) in &record.counts {
        let modulus = record
            .moduli
            .get(s)
            .map(|m| format!("  [modulus {m}]"))
            .unwrap_or_default();
        out.push_str(&format!("  s = {s}: {n}{modulus}\n"));
    }
    if let Some(hint) = dimension_hint(record) {
        out.push_str(&format!(
            "advisory dimension estimate log_q(N_s)/s ~ {hint:.3} (not verified)\n"
        ));
    }
    out.pop();
    out
}

fn cmd_count(args: CountArgs) -> colevel::Result<i32> {
    let variety = load_variety(&args.source)?;
    let steps = args
        .tower
        .tower
        .ok_or_else(|| colevel::Error::InvalidProblem("count needs --S (tower length)".into()))?;
    let opts = count_options(&args.tower);
    let record = count_tower(&variety, args.tower.p, args.tower.s_base, steps, &opts)?;
    let text = match args.format.as_str() {
        "text" => record_text(&record),
        "json" => {
            let body = serde_json::json!({
                "meta": meta(),
                "record": record.to_json(),
                "dimension_hint": dimension_hint(&record),
            });
            serde_json::to_string_pretty(&body)?
        }
        other => {
            return Err(colevel::Error::InvalidProblem(format!(
                "unknown format `{other}` (expected text or json)"
            )))
        }
    };
    emit(&args.out, text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn degree_bounds(
    deg: &Option<Vec<usize>>,
    tower: Option<u32>,
) -> colevel::Result<(usize, usize, u32)> {
    match (deg, tower) {
        (Some(d), s) => {
            let (dp, dq) = (d[0], d[1]);
            let steps = s.unwrap_or(2 * (dp + dq) as u32 + 1);
            Ok((dp, dq, steps))
        }
        (None, Some(steps)) => {
            if steps < 2 {
                return Err(colevel::Error::InvalidProblem(
                    "need at least 2 counts to reconstruct".into(),
                ));
            }
            let dp = (steps as usize - 1) / 2;
            let dq = steps as usize - 1 - dp;
            Ok((dp, dq, steps))
        }
        (None, None) => Err(colevel::Error::InvalidProblem(
            "verify needs --S or --deg".into(),
        )),
    }
}

fn verify_text(
    record: &PointCountRecord,
    zeta: &ZetaFunction,
    verdicts: &[serde_json::Value],
    pass: bool,
) -> String {
    let mut out = record_text(record);
    out.push_str(&format!(
        "\nzeta = ({}) / ({})  [reproduces all {} counts]\n",
        zeta.numerator, zeta.denominator, zeta.verified_up_to
    ));
    for v in verdicts {
        let name = v["check"].as_str().unwrap_or("?");
        let ok = v["pass"].as_bool().unwrap_or(false);
        let mark = if ok { "pass" } else { "FAIL" };
        let detail = match name {
            "ax_katz" => format!(
                "point counts divisible by q^(s * mu_0), mu_0 = {}",
                v["mu0"]
            ),
            "whole_zeta" => format!(
                "all reciprocal zeros and poles divisible by q^{}; certified ({}, {})",
                v["required"], v["numerator_certified_m"], v["denominator_certified_m"]
            ),
            "polar" => format!(
                "reciprocal poles ({} side) divisible by q^{}; certified {}{}",
                v["pole_side"].as_str().unwrap_or("?"),
                v["required"],
                v["certified_m"],
                if v["vacuous"].as_bool() == Some(true) {
                    " (vacuously: pole side is constant)"
                } else {
                    ""
                }
            ),
            _ => String::new(),
        };
        out.push_str(&format!("  [{mark}] {name}: {detail}\n"));
    }
    out.push_str(if pass {
        "all checks passed"
    } else {
        "VERIFICATION FAILED: a proven bound is violated; this indicates a bug"
    });
    out
}

fn cmd_verify(args: VerifyArgs) -> colevel::Result<i32> {
    let variety = load_variety(&args.source)?;
    if variety.projective {
        return Err(colevel::Error::InvalidProblem(
            "verify covers affine varieties; the divisibility statements checked here are affine"
                .into(),
        ));
    }
    let (dp, dq, steps) = degree_bounds(&args.deg, args.tower.tower)?;
    let opts = count_options(&args.tower);
    let p = args.tower.p;
    let s_base = args.tower.s_base;
    let record = count_tower(&variety, p, s_base, steps, &opts)?;

    let zeta = reconstruct(&record, dp, dq)?;
    let problem = variety.problem();
    let degrees = DegreeSequence::new(variety.degrees().degrees().to_vec())?;
    let ax = ax_katz_check(&record, &degrees, variety.ambient_dim);
    let whole = verify_whole_zeta(&zeta, &degrees, variety.ambient_dim, p, s_base);
    let polar = verify_polar(&zeta, &problem, &degrees, p, s_base)?;
    let polar_req = polar_requirement(&problem, &degrees)?;
    let pass = ax.pass && whole.pass && polar.pass;

    let mut ax_json = ax.to_json();
    ax_json["check"] = serde_json::json!("ax_katz");
    let verdicts = vec![ax_json, whole.to_json(), polar.to_json()];

    let certificates = vec![
        {
            let mut c = certify_factor(&zeta.numerator, p, s_base).to_json();
            c["side"] = serde_json::json!("numerator");
            c
        },
        {
            let mut c = certify_factor(&zeta.denominator, p, s_base).to_json();
            c["side"] = serde_json::json!("denominator");
            c
        },
    ];

    let text = match args.format.as_str() {
        "text" => verify_text(&record, &zeta, &verdicts, pass),
        "json" => {
            let bounds = affine_bound_table(&problem, &degrees)?;
            let body = serde_json::json!({
                "meta": meta(),
                "config": {
                    "label": variety.label,
                    "p": p,
                    "s_base": s_base,
                    "S": steps,
                    "deg": [dp, dq],
                    "ceiling": opts.ceiling,
                    "workers": opts.workers,
                },
                "bounds": bounds.to_json(),
                "counts": record.to_json()["counts"],
                "dimension_hint": dimension_hint(&record),
                "zeta": zeta.to_json(),
                "certificates": certificates,
                "polar_requirement": {
                    "exponent": polar_req.exponent,
                    "even_sign": polar_req.even_sign,
                },
                "verdicts": verdicts,
                "pass": pass,
            });
            serde_json::to_string_pretty(&body)?
        }
        other => {
            return Err(colevel::Error::InvalidProblem(format!(
                "unknown format `{other}` (expected text or json)"
            )))
        }
    };
    emit(&args.out, text)?;
    Ok(if pass { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

fn cmd_selftest(args: SelftestArgs) -> i32 {
    let reports = colevel::selftest::run_all();
    let all_pass = reports.iter().all(|r| r.passed());
    if args.format == "json" {
        let body = serde_json::json!({
            "meta": meta(),
            "grids": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "pass": all_pass,
        });
        println!("{}", serde_json::to_string_pretty(&body).unwrap());
    } else {
        let mut cases = 0;
        let mut violations = 0;
        for r in &reports {
            println!(
                "[{}] {}: {} cases, {} violations",
                if r.passed() { "pass" } else { "FAIL" },
                r.name,
                r.cases,
                r.violation_count
            );
            for v in &r.violations {
                println!("    {v}");
            }
            cases += r.cases;
            violations += r.violation_count;
        }
        println!("{cases} cases checked, {violations} violations");
    }
    if all_pass {
        0
    } else {
        2
    }
}
