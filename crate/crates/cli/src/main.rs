//! `opct` — command-line surface over the omega-poset toolkit.
//!
//! Exit codes: 0 holds, 1 fails, 2 unknown, 3 usage or IO error.

use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::Digest;

use opct_core::combinatorics::{Oracle, ORACLE_DEFAULT_BOUND};
use opct_core::generators;
use opct_core::io::{
    self, export_dot, oracle_report, parse_poset, parse_refiner, serialize_poset,
    serialize_refiner, verdict_record, DotOptions, InputDigest, Report,
};
use opct_core::predicates;
use opct_core::refiners;
use opct_core::spectrum;
use opct_core::stars::StarEngine;
use opct_core::verdict::Verdict;
use opct_core::{Flag, TruncatedPoset};

#[derive(Parser)]
#[command(name = "opct", version, about = "omega-poset truncation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Poset file, or `-` for standard input.
    file: String,
    /// Evidence horizon; defaults to the truncation depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Assert structural flags, comma separated (e.g. graded,atomless).
    #[arg(long, value_delimiter = ',')]
    assume: Vec<String>,
    /// Emit the machine-readable report on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in family.
    Generate {
        /// arc | circle | tree | cofinite | crooked | gradify
        family: String,
        #[arg(long)]
        depth: usize,
        /// Tree arity.
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Seed path length for crooked towers.
        #[arg(long, default_value_t = 4)]
        seed_links: usize,
        /// Input poset for gradify.
        #[arg(long)]
        of: Option<PathBuf>,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the staged back-and-forth refiner of a gradification here.
        #[arg(long)]
        emit_refiner: Option<PathBuf>,
    },
    /// Run a predicate and report the verdict.
    Check {
        #[arg(long)]
        predicate: String,
        /// Level argument for snake/cluster checks.
        #[arg(long)]
        level: Option<usize>,
        /// Element argument for prime-element checks.
        #[arg(long)]
        element: Option<String>,
        /// Skip bound for regularity scans.
        #[arg(long, default_value_t = 3)]
        skip: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustively classify a finite poset.
    Oracle {
        #[arg(long, default_value_t = ORACLE_DEFAULT_BOUND)]
        max_elements: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Star of an element within a level.
    Stars {
        #[arg(long)]
        element: String,
        #[arg(long)]
        cap_level: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Spectrum-level operations.
    Spectrum {
        /// enumerate | equal | connectivity | tangled
        operation: String,
        /// First thread, comma-separated element names.
        #[arg(long, value_delimiter = ',')]
        thread_a: Vec<String>,
        /// Second thread, comma-separated element names.
        #[arg(long, value_delimiter = ',')]
        thread_b: Vec<String>,
        /// Cluster-pair bound for the exhaustive tangled check.
        #[arg(long, default_value_t = 12)]
        size_bound: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Operations on refiners between two posets.
    Refiner {
        /// check | apply | star | compose | back-and-forth
        operation: String,
        /// Source poset (the relation maps its spectrum forward).
        source: PathBuf,
        /// Target poset.
        target: PathBuf,
        /// Refiner file.
        refiner: PathBuf,
        /// Second refiner file for compose (target side).
        #[arg(long)]
        with: Option<PathBuf>,
        /// Middle poset for compose.
        #[arg(long)]
        via: Option<PathBuf>,
        /// Thread on the source poset for apply.
        #[arg(long, value_delimiter = ',')]
        thread: Vec<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Export the Hasse diagram as DOT.
    Dot {
        file: String,
        /// Attach generator interval labels.
        #[arg(long)]
        labels: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-validate the witnesses of a report against the input poset.
    VerifyWitness { report: PathBuf, file: String },
}

fn read_input(path: &str) -> Result<(String, String)> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading standard input")?;
        Ok(("<stdin>".to_string(), buf))
    } else {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        Ok((path.to_string(), text))
    }
}

fn digest(path: &str, text: &str) -> InputDigest {
    let mut hasher = sha2::Sha256::new();
    hasher.update(text.as_bytes());
    InputDigest {
        path: path.to_string(),
        sha256: hex::encode(hasher.finalize()),
    }
}

fn load_poset(path: &str, assume: &[String]) -> Result<(TruncatedPoset, InputDigest)> {
    let (name, text) = read_input(path)?;
    let mut poset = parse_poset(&text).map_err(|e| anyhow!("{name}: {e}"))?;
    for flag in assume {
        match Flag::parse(flag) {
            Some(f) => poset.assume(f),
            None => bail!("unknown flag `{flag}` in --assume"),
        }
    }
    Ok((poset, digest(&name, &text)))
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path:?}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(report: &mut Report, started: Instant, json: bool) -> Result<i32> {
    report.wall_ms = started.elapsed().as_millis();
    let code = report
        .verdicts
        .iter()
        .map(|v| match v.outcome.as_str() {
            "holds" => 0,
            "fails" => 1,
            _ => 2,
        })
        .max()
        .unwrap_or(0);
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        for v in &report.verdicts {
            let mut line = format!("{}: {}", v.predicate, v.outcome);
            if let Some(w) = &v.witness {
                line.push_str(&format!(
                    " (witness: {})",
                    serde_json::to_string(w).unwrap_or_default()
                ));
            }
            if !v.assumptions.is_empty() {
                line.push_str(&format!(" [assumes {}]", v.assumptions.join(", ")));
            }
            if let Some(n) = &v.note {
                line.push_str(&format!(" — {n}"));
            }
            println!("{line}");
        }
    }
    Ok(code)
}

fn run_check(
    predicate: &str,
    level: Option<usize>,
    element: Option<String>,
    skip: usize,
    common: &Common,
) -> Result<i32> {
    let started = Instant::now();
    let (p, input) = load_poset(&common.file, &common.assume)?;
    let depth = common.depth.unwrap_or(p.depth());
    let engine = StarEngine::new(&p);
    let need_level = || -> Result<Vec<usize>> {
        let n = level.ok_or_else(|| anyhow!("--level required for `{predicate}`"))?;
        Ok(p.level(n).map_err(|e| anyhow!("{e}"))?.to_vec())
    };
    let mut details: Vec<String> = Vec::new();
    let verdict: Verdict = match predicate {
        "graded" => predicates::check_graded(&p),
        "weakly-graded" => predicates::check_weakly_graded(&p, depth),
        "predetermined" => predicates::check_predetermined(&p, depth),
        "level-injective" => {
            let report = predicates::check_level_injective_all(&p, depth);
            details = report.details;
            report.verdict
        }
        "branching" => predicates::check_branching(&p, depth),
        "cap-determined" => predicates::check_cap_determined_sufficient(&p, depth),
        "prime-element" => {
            let name = element.ok_or_else(|| anyhow!("--element required"))?;
            let e = p
                .elem_by_name(&name)
                .ok_or_else(|| anyhow!("unknown element `{name}`"))?;
            predicates::check_prime_element(&p, e, depth, 1)
        }
        "regular" => engine.check_regular(depth, skip),
        "edge-witnessing" => engine.check_edge_witnessing(depth),
        "star-refining" => engine.check_star_refining(depth),
        "snake" => engine.is_snake(&need_level()?, depth),
        "cluster" => spectrum::is_cluster(&p, &need_level()?, depth),
        "tangled" => spectrum::check_tangled_poset(&p, depth, 12),
        "connectivity" => spectrum::connectivity_report(&p, depth),
        other => bail!("unknown predicate `{other}`"),
    };
    let mut report = Report::new("check");
    report.inputs.push(input);
    report.depth = Some(depth);
    let mut record = verdict_record(predicate, &p, &verdict);
    record.details = details;
    report.verdicts.push(record);
    emit(&mut report, started, common.json)
}

fn run_generate(
    family: &str,
    depth: usize,
    arity: usize,
    seed_links: usize,
    of: &Option<PathBuf>,
    out: &Option<PathBuf>,
    emit_refiner: &Option<PathBuf>,
) -> Result<i32> {
    let poset = match family {
        "arc" => generators::gen_arc(depth),
        "circle" => generators::gen_circle(depth),
        "tree" => generators::gen_tree(arity, depth).map_err(|e| anyhow!("{e}"))?,
        "cofinite" => generators::gen_cofinite(depth),
        "crooked" => generators::gen_crooked(depth, seed_links).map_err(|e| anyhow!("{e}"))?,
        "gradify" => {
            let src = of
                .as_ref()
                .ok_or_else(|| anyhow!("gradify needs --of FILE"))?;
            let text = std::fs::read_to_string(src)?;
            let p = parse_poset(&text).map_err(|e| anyhow!("{e}"))?;
            let (g, stages) = generators::gradify(&p);
            if let Some(path) = emit_refiner {
                let empty = refiners::Refiner::default();
                std::fs::write(path, serialize_refiner(&empty, &stages, &p, &g))?;
            }
            write_or_print(out, &serialize_poset(&g))?;
            return Ok(0);
        }
        other => bail!("unknown family `{other}`"),
    };
    write_or_print(out, &serialize_poset(&poset))?;
    Ok(0)
}

fn run_oracle(max_elements: usize, common: &Common) -> Result<i32> {
    let started = Instant::now();
    let (p, input) = load_poset(&common.file, &common.assume)?;
    let oracle = Oracle::new(&p, max_elements).map_err(|e| anyhow!("{e}"))?;
    let classification = oracle_report(&p, &oracle);
    if common.json {
        let mut report = Report::new("oracle");
        report.inputs.push(input);
        report.data = Some(serde_json::to_value(&classification)?);
        report.wall_ms = started.elapsed().as_millis();
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("bands: {}", classification.bands.len());
        println!("caps: {}", classification.caps.len());
        println!("minimal caps: {:?}", classification.minimal_caps);
        println!("selectors: {}", classification.selectors.len());
        println!("minimal selectors: {:?}", classification.minimal_selectors);
    }
    Ok(0)
}

fn run_stars(element: &str, cap_level: usize, common: &Common) -> Result<i32> {
    let started = Instant::now();
    let (p, input) = load_poset(&common.file, &common.assume)?;
    let depth = common.depth.unwrap_or(p.depth());
    let e = p
        .elem_by_name(element)
        .ok_or_else(|| anyhow!("unknown element `{element}`"))?;
    let engine = StarEngine::new(&p);
    let star = engine.level_star(e, cap_level, depth);
    let mut report = Report::new("stars");
    report.inputs.push(input);
    report.depth = Some(depth);
    report.data = Some(serde_json::json!({
        "element": element,
        "cap_level": cap_level,
        "members": p.names_of(&star.members),
        "decided": star.decided,
        "assumptions": star.assumptions.iter().map(|f| f.name()).collect::<Vec<_>>(),
    }));
    if common.json {
        report.wall_ms = started.elapsed().as_millis();
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "star of `{element}` in level {cap_level}: {:?}{}",
            p.names_of(&star.members),
            if star.decided { "" } else { " (lower bound)" }
        );
    }
    Ok(0)
}

fn parse_thread(p: &TruncatedPoset, names: &[String]) -> Result<spectrum::Thread> {
    let elems = io::resolve_names(p, names).map_err(|e| anyhow!(e))?;
    spectrum::Thread::new(p, elems).map_err(|e| anyhow!("{e}"))
}

fn run_spectrum(
    operation: &str,
    thread_a: &[String],
    thread_b: &[String],
    size_bound: usize,
    common: &Common,
) -> Result<i32> {
    let started = Instant::now();
    let (p, input) = load_poset(&common.file, &common.assume)?;
    let depth = common.depth.unwrap_or(p.depth());
    let mut report = Report::new(&format!("spectrum {operation}"));
    report.inputs.push(input);
    report.depth = Some(depth);
    match operation {
        "enumerate" => {
            let sels = spectrum::enumerate_minimal_selectors(&p).map_err(|e| anyhow!("{e}"))?;
            let names: Vec<Vec<String>> = sels.iter().map(|s| p.names_of(&s.elements)).collect();
            report.data = Some(serde_json::to_value(&names)?);
            if !common.json {
                for s in &names {
                    println!("{s:?}");
                }
                return Ok(0);
            }
        }
        "equal" => {
            let a = parse_thread(&p, thread_a)?;
            let b = parse_thread(&p, thread_b)?;
            let v = spectrum::points_equal(&p, &a, &b, depth).map_err(|e| anyhow!("{e}"))?;
            report.verdicts.push(verdict_record("points-equal", &p, &v));
            return emit(&mut report, started, common.json);
        }
        "connectivity" => {
            let v = spectrum::connectivity_report(&p, depth);
            report.verdicts.push(verdict_record("connectivity", &p, &v));
            return emit(&mut report, started, common.json);
        }
        "tangled" => {
            let v = spectrum::check_tangled_poset(&p, depth, size_bound);
            report.verdicts.push(verdict_record("tangled", &p, &v));
            return emit(&mut report, started, common.json);
        }
        other => bail!("unknown spectrum operation `{other}`"),
    }
    report.wall_ms = started.elapsed().as_millis();
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_refiner(
    operation: &str,
    source: &PathBuf,
    target: &PathBuf,
    refiner: &PathBuf,
    with: &Option<PathBuf>,
    via: &Option<PathBuf>,
    thread: &[String],
    depth: Option<usize>,
    json: bool,
    out: &Option<PathBuf>,
) -> Result<i32> {
    let started = Instant::now();
    let src_text = std::fs::read_to_string(source)?;
    let tgt_text = std::fs::read_to_string(target)?;
    let p = parse_poset(&src_text).map_err(|e| anyhow!("{e}"))?;
    let q = parse_poset(&tgt_text).map_err(|e| anyhow!("{e}"))?;
    let r_text = std::fs::read_to_string(refiner)?;
    let depth = depth.unwrap_or_else(|| p.depth().min(q.depth()));
    let mut report = Report::new(&format!("refiner {operation}"));
    report
        .inputs
        .push(digest(&source.display().to_string(), &src_text));
    report
        .inputs
        .push(digest(&target.display().to_string(), &tgt_text));
    report
        .inputs
        .push(digest(&refiner.display().to_string(), &r_text));
    report.depth = Some(depth);
    match operation {
        "check" => {
            let (r, _) = parse_refiner(&r_text, &q, &p).map_err(|e| anyhow!("{e}"))?;
            let v1 = refiners::check_refiner(&q, &p, &r, depth);
            let v2 = refiners::check_wedge_preserving(&q, &p, &r, depth);
            report.verdicts.push(verdict_record("refiner", &p, &v1));
            report
                .verdicts
                .push(verdict_record("wedge-preserving", &q, &v2));
            emit(&mut report, started, json)
        }
        "apply" => {
            let (r, _) = parse_refiner(&r_text, &q, &p).map_err(|e| anyhow!("{e}"))?;
            let t = parse_thread(&p, thread)?;
            let prefix =
                refiners::apply_refiner(&q, &p, &r, &t, depth).map_err(|e| anyhow!("{e}"))?;
            report.data = Some(serde_json::json!({
                "elements": q.names_of(&prefix.elements),
                "complete": prefix.complete,
            }));
            report.wall_ms = started.elapsed().as_millis();
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        "star" => {
            let (r, _) = parse_refiner(&r_text, &q, &p).map_err(|e| anyhow!("{e}"))?;
            let star = refiners::star_of_refiner(&q, &p, &r, depth);
            let text = serialize_refiner(&star, &refiners::Stages::default(), &q, &p);
            write_or_print(out, &text)?;
            Ok(0)
        }
        "compose" => {
            let mid_path = via
                .as_ref()
                .ok_or_else(|| anyhow!("compose needs --via MID.poset"))?;
            let with_path = with
                .as_ref()
                .ok_or_else(|| anyhow!("compose needs --with SECOND.refiner"))?;
            let mid =
                parse_poset(&std::fs::read_to_string(mid_path)?).map_err(|e| anyhow!("{e}"))?;
            // first refiner: mid × source; second: target × mid
            let (r1, _) = parse_refiner(&r_text, &mid, &p).map_err(|e| anyhow!("{e}"))?;
            let (r2, _) = parse_refiner(&std::fs::read_to_string(with_path)?, &q, &mid)
                .map_err(|e| anyhow!("{e}"))?;
            let star = refiners::star_compose(&q, &p, &r2, &r1, depth);
            let text = serialize_refiner(&star, &refiners::Stages::default(), &q, &p);
            write_or_print(out, &text)?;
            Ok(0)
        }
        "back-and-forth" => {
            let (_, stages) = parse_refiner(&r_text, &q, &p).map_err(|e| anyhow!("{e}"))?;
            let v = refiners::verify_back_and_forth(&p, &q, &stages, depth)
                .map_err(|e| anyhow!("{e}"))?;
            report
                .verdicts
                .push(verdict_record("back-and-forth", &p, &v));
            emit(&mut report, started, json)
        }
        other => bail!("unknown refiner operation `{other}`"),
    }
}

fn run_verify_witness(report_path: &PathBuf, file: &str) -> Result<i32> {
    let (p, _) = load_poset(file, &[])?;
    let text = std::fs::read_to_string(report_path)?;
    let report: Report = serde_json::from_str(&text).context("parsing report")?;
    if report.schema != "opct-report-v1" {
        bail!("unsupported report schema `{}`", report.schema);
    }
    let mut bad = 0usize;
    for record in &report.verdicts {
        match io::verify_witness(&p, record) {
            Ok(()) => println!("{}: witness ok", record.predicate),
            Err(e) => {
                println!("{}: witness REJECTED — {e}", record.predicate);
                bad += 1;
            }
        }
    }
    Ok(if bad == 0 { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Generate {
            family,
            depth,
            arity,
            seed_links,
            of,
            out,
            emit_refiner,
        } => run_generate(family, *depth, *arity, *seed_links, of, out, emit_refiner),
        Command::Check {
            predicate,
            level,
            element,
            skip,
            common,
        } => run_check(predicate, *level, element.clone(), *skip, common),
        Command::Oracle {
            max_elements,
            common,
        } => run_oracle(*max_elements, common),
        Command::Stars {
            element,
            cap_level,
            common,
        } => run_stars(element, *cap_level, common),
        Command::Spectrum {
            operation,
            thread_a,
            thread_b,
            size_bound,
            common,
        } => run_spectrum(operation, thread_a, thread_b, *size_bound, common),
        Command::Refiner {
            operation,
            source,
            target,
            refiner,
            with,
            via,
            thread,
            depth,
            json,
            out,
        } => run_refiner(
            operation, source, target, refiner, with, via, thread, *depth, *json, out,
        ),
        Command::Dot { file, labels, out } => {
            let (_, text) = read_input(file)?;
            let p = parse_poset(&text).map_err(|e| anyhow!("{e}"))?;
            let dot = export_dot(&p, DotOptions { labels: *labels });
            write_or_print(out, &dot)?;
            Ok(0)
        }
        Command::VerifyWitness { report, file } => run_verify_witness(report, file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on its own channel
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(e) => {
            eprintln!("opct: {e:#}");
            ExitCode::from(3)
        }
    }
}
