use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde_json::{json, Value};

use makerforge_core::coloring::{
    check_lll_condition, default_pairing, halving_coloring_with_budget, lll_degree_threshold, random_bounded_degree_hypergraph, verify_proper_halving,
    ColoringError, Hypergraph,
};
use makerforge_core::constructions::{build_construction, neighborhood_census, Construction};
use makerforge_core::game::{minimax_value, verify_maker_wins, Adversary, GameError, Player, VerifyReport};
use makerforge_core::io::{from_json, to_dot, to_json, to_value};
use makerforge_core::tree::{audit_branches, validate_class_c, TreeHypergraph};
use makerforge_core::unit_calculus::strong::{explicit_run, sweep};
use makerforge_core::unit_calculus::{symbolic_run, CalcError, Mode, StrongParams, StrongReport, Q};

use crate::{BackendArg, CliError, Command, ConstructionArg, Context, ExportFormat, Io, ModeArg, Outcome, Source};

pub fn run(command: Command, ctx: &Context, io: &mut Io) -> Result<Outcome, CliError> {
    match command {
        Command::Build { source, out } => build(&source, out.as_deref(), ctx),
        Command::Verify { file, source, trials } => verify(&load(file, &source, ctx)?, trials, ctx),
        Command::Census { file, source } => census(&load(file, &source, ctx)?, ctx),
        Command::Play {
            source,
            breaker,
            seed,
            server,
            minimax_budget,
        } => match server {
            Some(url) => crate::play::remote(&url, &source, breaker, seed, minimax_budget, io),
            None => crate::play::local(&load(None, &source, ctx)?, breaker, seed, minimax_budget, io),
        },
        Command::Tournament {
            file,
            source,
            trials,
            adversaries,
        } => tournament(&load(file, &source, ctx)?, trials, &adversaries, ctx),
        Command::Solve { file, source, minimax_budget } => solve(&load(file, &source, ctx)?, minimax_budget),
        Command::AuditStrong { sweep: true, ns, cs, .. } => audit_sweep(&ns, &cs, ctx),
        Command::AuditStrong { n, c, backend, mode, .. } => {
            let n = n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
            let c = parse_q(c.as_deref().unwrap_or_default())?;
            audit_strong(n, c, backend, mode, ctx)
        }
        Command::Color {
            input,
            n,
            max_degree,
            edges,
            vertices,
            seed,
            max_resamples,
            out,
        } => {
            let h = match input {
                Some(path) => load_hypergraph(&path)?,
                None => random_instance(n, max_degree, edges, vertices, seed)?,
            };
            color(&h, seed, max_resamples, out.as_deref())
        }
        Command::Export { file, source, format, out } => export(&load(file, &source, ctx)?, format, out.as_deref()),
        Command::Serve { host, port, max_vertices } => serve(&host, port, max_vertices, ctx),
    }
}

pub(crate) fn parse_q(s: &str) -> Result<Ratio<i64>, CliError> {
    s.parse::<Q>().map(|q| q.0).map_err(CliError::Usage)
}

pub(crate) fn construction_of(arg: ConstructionArg) -> Construction {
    match arg {
        ConstructionArg::Es => Construction::Es,
        ConstructionArg::Theorem1 => Construction::Theorem1,
        ConstructionArg::Weak => Construction::Weak,
        ConstructionArg::Strong => Construction::Strong,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load(file: Option<PathBuf>, source: &Source, ctx: &Context) -> Result<TreeHypergraph, CliError> {
    if let Some(path) = file.or_else(|| source.input.clone()) {
        let text = read(&path)?;
        return from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
    }
    let Some(kind) = source.construction else {
        return Err(CliError::Usage("give a document (--in PATH) or --construction with --n".into()));
    };
    let n = source.n.ok_or_else(|| CliError::Usage("--n is required with --construction".into()))?;
    let c = source.c.as_deref().map(parse_q).transpose()?;
    build_construction(construction_of(kind), n, c, ctx.budget).map_err(|e| CliError::Usage(e.to_string()))
}

fn summary(h: &TreeHypergraph, ctx: &Context) -> Value {
    let a = audit_branches(h);
    json!({
        "vertices": a.vertices,
        "edges": a.edges,
        "uniform": a.uniform,
        "max_degree": a.max_degree,
        "max_neighborhood": if ctx.include_self { a.max_neighborhood_incl } else { a.max_neighborhood_excl },
        "include_self": ctx.include_self,
        "every_branch_covered": a.every_branch_covered,
    })
}

fn uniform_text(u: Option<u32>) -> String {
    u.map_or("not uniform".into(), |n| format!("{n}-uniform"))
}

fn build(source: &Source, out: Option<&Path>, ctx: &Context) -> Result<Outcome, CliError> {
    let h = load(None, source, ctx)?;
    let doc = to_json(&h);
    match out {
        Some(path) => {
            write(path, &(doc + "\n"))?;
            let mut s = summary(&h, ctx);
            s["path"] = json!(path.display().to_string());
            let text = format!(
                "wrote {}: {} vertices, {} edges, {}, max degree {}, max neighborhood {}\n",
                path.display(),
                s["vertices"],
                s["edges"],
                uniform_text(h.uniform_size()),
                s["max_degree"],
                s["max_neighborhood"]
            );
            Ok(Outcome::ok(s, text))
        }
        None => Ok(Outcome::ok(to_value(&h), doc + "\n")),
    }
}

fn maker_text(r: &VerifyReport) -> String {
    r.rows
        .iter()
        .map(|row| format!("{}/{} vs {:?}", row.maker_wins, row.matches, row.adversary).to_lowercase())
        .collect::<Vec<_>>()
        .join(", ")
}

fn verify(h: &TreeHypergraph, trials: usize, ctx: &Context) -> Result<Outcome, CliError> {
    let violations = validate_class_c(h);
    let a = audit_branches(h);
    let maker = if violations.is_empty() && !h.is_empty() {
        Some(verify_maker_wins(h, &[Adversary::Random, Adversary::Potential], trials, ctx.parallel))
    } else {
        None
    };
    let maker_ok = match &maker {
        Some(Ok(r)) => r.all_won,
        _ => false,
    };
    // without full coverage Maker may lose, and that is not a failed check
    let ok = violations.is_empty() && !h.is_empty() && (!a.every_branch_covered || maker_ok);
    let nbhd = if ctx.include_self { a.max_neighborhood_incl } else { a.max_neighborhood_excl };
    let mut text = String::new();
    let _ = writeln!(text, "vertices {}, edges {}, {}", a.vertices, a.edges, uniform_text(a.uniform));
    let _ = writeln!(text, "max degree {}, root degree {}", a.max_degree, a.root_degree);
    let _ = writeln!(
        text,
        "max_neighborhood={nbhd} ({} the edge itself)",
        if ctx.include_self { "including" } else { "excluding" }
    );
    let _ = writeln!(
        text,
        "every branch covered: {} ({} of {} branches uncovered)",
        yes(a.every_branch_covered),
        a.uncovered_branches,
        a.branches
    );
    let _ = writeln!(text, "class violations: {}", violations.len());
    for v in violations.iter().take(10) {
        let _ = writeln!(text, "  {v:?}");
    }
    let maker_json = match &maker {
        Some(Ok(r)) => {
            let _ = writeln!(text, "maker walk: {}", maker_text(r));
            serde_json::to_value(r).expect("report serializes")
        }
        Some(Err(e)) => {
            let _ = writeln!(text, "maker walk: {e}");
            json!({ "error": e.to_string() })
        }
        None => Value::Null,
    };
    let _ = writeln!(text, "{}", if ok { "verified" } else { "NOT verified" });
    Ok(Outcome {
        ok,
        json: json!({
            "verified": ok,
            "audit": a,
            "max_neighborhood": nbhd,
            "include_self": ctx.include_self,
            "class_violations": violations,
            "maker": maker_json,
        }),
        text,
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn census(h: &TreeHypergraph, ctx: &Context) -> Result<Outcome, CliError> {
    let rows = neighborhood_census(h).map_err(|e| CliError::Usage(e.to_string()))?;
    let shift = u64::from(ctx.include_self);
    let ok = rows.iter().all(|r| r.within_bound);
    let mut text = String::from("class          edges      min      max   stated    bound  within\n");
    for r in &rows {
        let opt = |x: Option<u64>| x.map_or("-".to_string(), |v| (v + shift).to_string());
        let _ = writeln!(
            text,
            "{:<12} {:>7} {:>8} {:>8} {:>8} {:>8}  {}",
            r.class.label(),
            r.edges_in_class,
            r.min_neighborhood + shift,
            r.max_neighborhood + shift,
            opt(Some(r.claimed)),
            opt(r.bound),
            yes(r.within_bound)
        );
    }
    Ok(Outcome {
        ok,
        json: json!({ "include_self": ctx.include_self, "rows": rows }),
        text,
    })
}

fn tournament(h: &TreeHypergraph, trials: usize, names: &[String], ctx: &Context) -> Result<Outcome, CliError> {
    let adversaries = names
        .iter()
        .map(|s| Adversary::parse(s.trim()).ok_or_else(|| CliError::Usage(format!("unknown adversary {s:?} (random, potential, optimal)"))))
        .collect::<Result<Vec<_>, _>>()?;
    let r = verify_maker_wins(h, &adversaries, trials, ctx.parallel).map_err(game_error)?;
    let ok = !r.every_branch_covered || r.all_won;
    let mut text = String::from("adversary   matches  maker wins  plies (min/mean/max)\n");
    for row in &r.rows {
        let _ = writeln!(
            text,
            "{:<10} {:>8} {:>11}  {}/{:.1}/{}",
            format!("{:?}", row.adversary).to_lowercase(),
            row.matches,
            row.maker_wins,
            row.min_plies,
            row.mean_plies,
            row.max_plies
        );
    }
    let _ = writeln!(text, "every branch covered: {}; Maker won every match: {}", yes(r.every_branch_covered), yes(r.all_won));
    Ok(Outcome {
        ok,
        json: serde_json::to_value(&r).expect("report serializes"),
        text,
    })
}

pub(crate) fn game_error(e: GameError) -> CliError {
    match e {
        GameError::NoSafeChild(_) | GameError::WalkEnded(_) => CliError::Failed(format!("Maker's walk is stuck: {e}")),
        other => CliError::Usage(other.to_string()),
    }
}

fn solve(h: &TreeHypergraph, budget: usize) -> Result<Outcome, CliError> {
    let winner = minimax_value(h, budget).map_err(|e| CliError::Usage(e.to_string()))?;
    let value = match winner {
        Player::Maker => "MakerWin",
        Player::Breaker => "BreakerWin",
    };
    Ok(Outcome::ok(json!({ "value": value, "winner": winner }), format!("{value}\n")))
}

fn strong_text(r: &StrongReport) -> String {
    let row = r.summary();
    let mut text = String::new();
    let _ = writeln!(text, "n={} log d={} c={} backend={} mode={}", row.n, row.log_d, row.c, r.backend, r.mode);
    let _ = writeln!(
        text,
        "checks {}, failed critical {}, failed advisory {}, branch errors {}",
        row.checks, row.failed_critical, row.failed_advisory, row.branch_errors
    );
    let _ = writeln!(
        text,
        "max degree 2^{:.3} (2d = 2^{}), within 2d: {}",
        row.max_degree_log2,
        row.two_d_log2,
        yes(row.ledger_within_2d)
    );
    for (name, m) in &row.min_margins {
        let _ = writeln!(text, "  min margin {name}: {m}");
    }
    if let Some(v) = &row.first_violation {
        let _ = writeln!(text, "first violation: {v}");
    }
    if let Some(e) = &row.error {
        let _ = writeln!(text, "error: {e}");
    }
    let _ = writeln!(text, "certified: {}", yes(row.certified));
    text
}

fn audit_strong(n: u32, c: Ratio<i64>, backend: BackendArg, mode: ModeArg, ctx: &Context) -> Result<Outcome, CliError> {
    let p = StrongParams::new(n, c).map_err(|e| CliError::Usage(e.to_string()))?;
    let mode = match mode {
        ModeArg::Record => Mode::Record,
        ModeArg::Strict => Mode::Strict,
    };
    let report = match backend {
        BackendArg::Symbolic => symbolic_run(&p, mode),
        BackendArg::Explicit => match explicit_run(&p, mode, ctx.budget) {
            Ok((_, r)) => r,
            Err(e @ CalcError::TooLarge { .. }) => return Err(CliError::Usage(format!("{e}; the symbolic backend handles any n"))),
            Err(e) => return Err(CliError::Failed(e.to_string())),
        },
    };
    Ok(Outcome {
        ok: report.certified,
        text: strong_text(&report),
        json: serde_json::to_value(&report).expect("report serializes"),
    })
}

fn audit_sweep(ns: &[u32], cs: &[String], ctx: &Context) -> Result<Outcome, CliError> {
    let cs = cs.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>()?;
    let r = sweep(ns, &cs, ctx.parallel).map_err(|e| CliError::Usage(e.to_string()))?;
    let ok = r.rows.iter().all(|row| row.failed_critical > 0 || row.ledger_within_2d);
    let mut text = String::from("n        c      certified  within 2d  checks  first violation\n");
    for row in &r.rows {
        let _ = writeln!(
            text,
            "{:<8} {:<6} {:<10} {:<10} {:>6}  {}",
            row.n,
            row.c.to_string(),
            yes(row.certified),
            yes(row.ledger_within_2d),
            row.checks,
            row.first_violation.as_deref().or(row.error.as_deref()).unwrap_or("-")
        );
    }
    match &r.minimal_certified {
        Some((n, c)) => {
            let _ = writeln!(text, "minimal certified: n={n}, c={c}");
        }
        None => {
            let _ = writeln!(text, "no pair certified");
        }
    }
    Ok(Outcome {
        ok,
        json: serde_json::to_value(&r).expect("report serializes"),
        text,
    })
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph, CliError> {
    let text = read(path)?;
    let bad = |e: String| CliError::Usage(format!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let h = if value.get("format").is_some() {
        Hypergraph::from_tree(&makerforge_core::io::from_value(value).map_err(|e| bad(e.to_string()))?)
    } else {
        serde_json::from_value::<Hypergraph>(value).map_err(|e| bad(e.to_string()))?
    };
    h.validate().map_err(|e| bad(e.to_string()))?;
    Ok(h)
}

fn random_instance(n: Option<u32>, max_degree: Option<u32>, edges: Option<usize>, vertices: Option<u32>, seed: u64) -> Result<Hypergraph, CliError> {
    let n = n.ok_or_else(|| CliError::Usage("give --in PATH or --n for a random instance".into()))?;
    if !(2..=62).contains(&n) {
        return Err(CliError::Usage(format!("--n {n} is outside 2..=62")));
    }
    let d = match max_degree {
        Some(d) => d,
        None => u32::try_from(lll_degree_threshold(n)).unwrap_or(u32::MAX).max(1),
    };
    let v = vertices.unwrap_or(200);
    let e = edges.unwrap_or((u64::from(v) * u64::from(d) / u64::from(n) * 9 / 10) as usize);
    random_bounded_degree_hypergraph(n, d, e, v, seed).map_err(|e| CliError::Usage(e.to_string()))
}

fn color(h: &Hypergraph, seed: u64, max_resamples: u64, out: Option<&Path>) -> Result<Outcome, CliError> {
    let pairing = default_pairing(h, seed);
    let lll = h.n.filter(|&n| n >= 2).map(|n| check_lll_condition(n, h.max_degree().into()));
    let mut text = format!(
        "{} vertices, {} edges, {}, max degree {}\n",
        h.vertex_count,
        h.edges.len(),
        uniform_text(h.n),
        h.max_degree()
    );
    if let Some(l) = &lll {
        let _ = writeln!(text, "local lemma condition: {} (margin {:.6})", if l.holds { "holds" } else { "fails" }, l.margin.to_f64());
    }
    let mut result = json!({
        "vertices": h.vertex_count,
        "edges": h.edges.len(),
        "n": h.n,
        "max_degree": h.max_degree(),
        "lll": lll,
        "seed": seed,
        "pairing": pairing,
    });
    match halving_coloring_with_budget(h, &pairing, seed, max_resamples) {
        Ok(c) => {
            let check = verify_proper_halving(h, &c).map_err(|e| CliError::Usage(e.to_string()))?;
            let _ = writeln!(
                text,
                "colored after {} resamples; proper: {}; balance {}",
                c.resamples,
                yes(check.proper),
                check.balance
            );
            if let Some(path) = out {
                write(path, &(serde_json::to_string(&c).expect("coloring serializes") + "\n"))?;
                let _ = writeln!(text, "wrote {}", path.display());
            }
            let ok = check.proper && check.balance == h.vertex_count % 2;
            result["coloring"] = serde_json::to_value(&c).expect("coloring serializes");
            result["check"] = serde_json::to_value(&check).expect("check serializes");
            Ok(Outcome { ok, json: result, text })
        }
        Err(ColoringError::ResampleBudgetExceeded { resamples, bad_edges }) => {
            let _ = writeln!(text, "gave up after {resamples} resamples with {} monochromatic edges", bad_edges.len());
            result["error"] = json!("resample budget exceeded");
            result["bad_edges"] = json!(bad_edges);
            Ok(Outcome { ok: false, json: result, text })
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

fn export(h: &TreeHypergraph, format: ExportFormat, out: Option<&Path>) -> Result<Outcome, CliError> {
    let (name, content) = match format {
        ExportFormat::Json => ("json", to_json(h) + "\n"),
        ExportFormat::Dot => ("dot", to_dot(h)),
    };
    match out {
        Some(path) => {
            write(path, &content)?;
            Ok(Outcome::ok(
                json!({ "format": name, "path": path.display().to_string(), "bytes": content.len() }),
                format!("wrote {}\n", path.display()),
            ))
        }
        None => Ok(Outcome::ok(json!({ "format": name, "content": content }), content)),
    }
}

fn serve(host: &str, port: u16, max_vertices: u64, ctx: &Context) -> Result<Outcome, CliError> {
    let addr: std::net::SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| CliError::Usage(format!("bad address {host}:{port}: {e}")))?;
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .try_init();
    let config = makerforge_service::ServiceConfig {
        max_vertices: max_vertices.min(ctx.budget),
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Usage(e.to_string()))?;
    rt.block_on(makerforge_service::serve(addr, config)).map_err(|e| CliError::Usage(format!("{addr}: {e}")))?;
    Ok(Outcome::ok(json!({ "stopped": true }), "stopped\n".into()))
}
