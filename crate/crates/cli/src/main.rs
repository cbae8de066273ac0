use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use spiral_core::composition::{
    self, category_closure_probe, intersection_points, lines, lines_csv, min_q, parse_chain,
    search_category2, symmetry_check, SearchConfig, SinkBound,
};
use spiral_core::sequences::{Level, Sequence};
use spiral_core::spiral::{export_polar, polar_csv, polar_svg, SVG_ANGLE_STEP};
use spiral_core::step::{self, family_table, family_table_csv, jacobsthal_c, jacobsthal_d, prime_divides_c};
use spiral_core::trajectory::{self, enter_spiral, iterates_table, iterates_table_csv, sweep};
use spiral_core::tree::{build_tree, connectivity_check, predecessors};
use spiral_core::{Error, FamilyIndex, SpiralValue};

/// Environment variable holding the default worker count.
const JOBS_ENV: &str = "COLLATZ_SPIRAL_JOBS";

#[derive(Parser, Debug)]
#[command(name = "collatz-spiral", version, about = "Spiral coordinates for the odd Collatz dynamics")]
struct Cli {
    /// Worker threads for sweeps and searches.
    #[arg(long, global = true, env = JOBS_ENV, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,

    /// Step budget for any single trajectory.
    #[arg(long, global = true, default_value_t = trajectory::DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,

    /// Output format; each subcommand accepts a subset.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Svg,
    Dot,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Dot => "dot",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Terms of A016789, A075677 or A329480, or level boundaries.
    Seq(SeqArgs),
    /// Polar coordinates of the first rays (csv, svg or json).
    SpiralExport(SpiralExportArgs),
    /// Single step maps: classify, apply, family table, constants.
    #[command(subcommand)]
    Step(StepCommand),
    /// Spiral trajectory of an odd number next to its odd Collatz values.
    Trajectory(TrajectoryArgs),
    /// Check spiral trajectories against the Collatz map for all 6x+-1 below a bound.
    Verify(VerifyArgs),
    /// Collatz iterates of 6x + 1.
    Table(TableArgs),
    /// Compose a chain of step maps.
    Compose(ComposeArgs),
    /// Search bounded chains for a composite with positive slope and negative constant.
    SearchCat2(SearchArgs),
    /// Slopes and intercepts of the step maps, and the exact line checks.
    Lines(LinesArgs),
    /// The predecessor tree around 0.
    Tree(TreeArgs),
    /// Constant numerators of the step maps and their prime divisibility.
    Jacobsthal(KmaxArgs),
}

#[derive(Args, Debug)]
struct SeqArgs {
    /// a016789, a075677 or a329480.
    #[arg(long, default_value = "a329480")]
    name: Sequence,
    /// Number of terms.
    #[arg(long, default_value_t = 20)]
    count: u64,
    /// Emit the boundaries of levels 1..=K instead of terms.
    #[arg(long, value_name = "K")]
    levels: Option<u32>,
}

#[derive(Args, Debug)]
struct SpiralExportArgs {
    #[arg(long, default_value_t = 42, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: u64,
}

#[derive(Subcommand, Debug)]
enum StepCommand {
    /// The family member whose domain holds a spiral value.
    Classify {
        #[arg(allow_hyphen_values = true)]
        x: BigInt,
    },
    /// Apply f_k to a spiral value in its domain.
    Apply {
        #[arg(allow_hyphen_values = true)]
        k: FamilyIndex,
        #[arg(allow_hyphen_values = true)]
        x: BigInt,
    },
    /// Maps f_1, f_-1, ..., f_K with their first inputs and outputs.
    Table {
        #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u32).range(1..))]
        kmax: u32,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
    /// Constant numerators of the step maps.
    Jacobsthal(KmaxArgs),
}

#[derive(Args, Debug)]
struct KmaxArgs {
    #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u32).range(1..))]
    kmax: u32,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    /// A positive integer; odd multiples of 3 and even numbers are first walked into 6x+-1 form.
    n: BigInt,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Exclusive upper bound.
    #[arg(long, default_value_t = 1_000_000)]
    max: u64,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, default_value_t = 22, value_parser = clap::value_parser!(u64).range(1..))]
    xmax: u64,
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(1..))]
    imax: u64,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    /// Indices in application order, e.g. "f2,f-2,f-1".
    #[arg(long, allow_hyphen_values = true)]
    chain: String,
    /// Read the chain right to left, as in f_{-1}f_{-2}f_2.
    #[arg(long)]
    right_to_left: bool,
    /// How many domain members to show.
    #[arg(long, default_value_t = 3)]
    samples: usize,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = SearchConfig::DEFAULT_DEPTH, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    /// Largest |k| at any step.
    #[arg(long, default_value_t = SearchConfig::DEFAULT_MAX_K, value_parser = clap::value_parser!(u32).range(1..))]
    max_k: u32,
    /// Visit every chain; also reports in-domain integer fixed points.
    #[arg(long)]
    no_prune: bool,
    /// Also print the category transition table up to this depth.
    #[arg(long, value_name = "DEPTH")]
    closure: Option<u32>,
}

#[derive(Args, Debug)]
struct LinesArgs {
    #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u32).range(1..))]
    kmax: u32,
    /// Run the exact intersection and symmetry checks instead of listing lines.
    #[arg(long)]
    check: bool,
    /// Print min q for p = 1..=P under both sink bounds.
    #[arg(long, value_name = "P")]
    lattice: Option<u32>,
}

#[derive(Args, Debug)]
struct TreeArgs {
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    radius: u64,
    /// Check that every |v| <= radius reaches 0 instead of listing edges.
    #[arg(long)]
    connectivity: bool,
    /// List predecessors of this spiral value instead of the tree.
    #[arg(long, allow_hyphen_values = true, value_name = "V")]
    predecessors_of: Option<BigInt>,
    #[arg(long, default_value_t = 6)]
    count: usize,
}

/// How a run ended, mapped to the process exit status.
enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    print!("{out}");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn allow(cli: &Cli, command: &str, formats: &[Format]) -> Result<Format, Failure> {
    if formats.contains(&cli.format) {
        return Ok(cli.format);
    }
    let names: Vec<&str> = formats.iter().map(|f| f.name()).collect();
    Err(Failure::Usage(format!(
        "--format {} is not supported by `{command}` (use {})",
        cli.format.name(),
        names.join(", ")
    )))
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn jobs(cli: &Cli) -> usize {
    cli.jobs as usize
}

/// Writes the artifact into `out`; verification failures still emit their report.
fn run(cli: &Cli, out: &mut String) -> Result<(), Failure> {
    let (text, verified) = match &cli.command {
        Command::Seq(a) => (seq(cli, a)?, true),
        Command::SpiralExport(a) => (spiral_export(cli, a)?, true),
        Command::Step(c) => (step_command(cli, c)?, true),
        Command::Trajectory(a) => (trajectory_command(cli, a)?, true),
        Command::Verify(a) => verify(cli, a)?,
        Command::Table(a) => (table(cli, a)?, true),
        Command::Compose(a) => (compose(cli, a)?, true),
        Command::SearchCat2(a) => search(cli, a)?,
        Command::Lines(a) => lines_command(cli, a)?,
        Command::Tree(a) => tree(cli, a)?,
        Command::Jacobsthal(a) => (jacobsthal(cli, a)?, true),
    };
    out.push_str(&text);
    if verified {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn seq(cli: &Cli, a: &SeqArgs) -> Outcome {
    let format = allow(cli, "seq", &[Format::Text, Format::Csv, Format::Json])?;
    if let Some(k) = a.levels {
        let levels = (1..=k).map(Level::new).collect::<Result<Vec<_>, _>>()?;
        return Ok(match format {
            Format::Json => to_json(&levels),
            _ => {
                let mut s = String::from("level,first,last,size\n");
                for l in &levels {
                    let _ = writeln!(s, "{},{},{},{}", l.k, l.first_index, l.last_index, l.len());
                }
                s
            }
        });
    }
    let terms: Vec<(u64, BigInt)> = a.name.terms(a.count).collect();
    Ok(match format {
        Format::Json => to_json(&terms.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>()),
        _ => {
            let mut s = String::from("index,value\n");
            for (n, v) in &terms {
                let _ = writeln!(s, "{n},{v}");
            }
            s
        }
    })
}

fn spiral_export(cli: &Cli, a: &SpiralExportArgs) -> Outcome {
    let format = allow(cli, "spiral-export", &[Format::Text, Format::Csv, Format::Svg, Format::Json])?;
    let rows = export_polar(a.n_max)?;
    Ok(match format {
        Format::Svg => polar_svg(&rows, SVG_ANGLE_STEP),
        Format::Json => to_json(&rows),
        _ => polar_csv(&rows),
    })
}

fn step_command(cli: &Cli, c: &StepCommand) -> Outcome {
    match c {
        StepCommand::Classify { x } => {
            let format = allow(cli, "step classify", &[Format::Text, Format::Json])?;
            let v = SpiralValue(x.clone());
            let (index, y) = step::next_with_index(&v);
            let family = step::output_family(index);
            Ok(match format {
                Format::Json => to_json(&json!({
                    "x": x.to_string(),
                    "decoded": v.decode().to_string(),
                    "index": index.get(),
                    "next": y.to_string(),
                    "output_family": family.roman(),
                })),
                _ => format!("x={x} decoded={} index={index} next={y} output_family={family}\n", v.decode()),
            })
        }
        StepCommand::Apply { k, x } => {
            let format = allow(cli, "step apply", &[Format::Text, Format::Json])?;
            let y = step::apply(*k, &SpiralValue(x.clone()))?;
            Ok(match format {
                Format::Json => to_json(&json!({"index": k.get(), "x": x.to_string(), "value": y.to_string()})),
                _ => format!("{y}\n"),
            })
        }
        StepCommand::Table { kmax, samples } => {
            let format = allow(cli, "step table", &[Format::Text, Format::Csv, Format::Json])?;
            let rows = family_table(*kmax, *samples as usize)?;
            Ok(match format {
                Format::Json => to_json(&rows),
                _ => family_table_csv(&rows),
            })
        }
        StepCommand::Jacobsthal(a) => jacobsthal(cli, a),
    }
}

fn trajectory_command(cli: &Cli, a: &TrajectoryArgs) -> Outcome {
    let format = allow(cli, "trajectory", &[Format::Text, Format::Json])?;
    if a.n.sign() != num_bigint::Sign::Plus {
        return Err(Failure::Usage(format!("trajectory start must be positive, got {}", a.n)));
    }
    let (prefix, start) = enter_spiral(&a.n, cli.budget)?;
    let entry = start.decode();
    let spiral = trajectory::spiral_trajectory(&start, cli.budget)?;
    let odds = trajectory::odd_trajectory(&entry, cli.budget.saturating_mul(64))?;
    let join = |v: &[String]| v.join(", ");
    let spiral_values: Vec<String> = spiral.steps.iter().map(|v| v.to_string()).collect();
    let decoded: Vec<String> = spiral.decoded().iter().map(|v| v.to_string()).collect();
    let odd_values: Vec<String> = odds.iter().map(|v| v.to_string()).collect();
    let prefix_values: Vec<String> = prefix.iter().map(|v| v.to_string()).collect();
    let reached = spiral.reached_root();
    Ok(match format {
        Format::Json => to_json(&json!({
            "n": a.n.to_string(),
            "pre_walk": prefix_values,
            "entry": entry.to_string(),
            "spiral": spiral_values,
            "decoded": decoded,
            "odd_collatz": odd_values,
            "reached_root": reached,
        })),
        _ => {
            let mut s = String::new();
            if !prefix.is_empty() {
                let _ = writeln!(s, "pre-walk: {} -> {entry}", join(&prefix_values));
            }
            let _ = writeln!(s, "spiral: {}", join(&spiral_values));
            let _ = writeln!(s, "decoded: {}", join(&decoded));
            let _ = writeln!(s, "odd collatz: {}", join(&odd_values));
            if !reached {
                let _ = writeln!(s, "budget of {} steps exhausted before reaching 0", cli.budget);
            }
            s
        }
    })
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<(String, bool), Failure> {
    let format = allow(cli, "verify", &[Format::Text, Format::Json])?;
    let report = sweep(a.max, cli.budget, jobs(cli));
    let text = match format {
        Format::Json => to_json(&report),
        _ => {
            let mut s = String::new();
            for w in &report.witnesses {
                let _ = writeln!(
                    s,
                    "mismatch n={}: spiral {:?} vs collatz {:?}",
                    w.n,
                    w.spiral_decoded.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    w.collatz_odds.iter().map(|v| v.to_string()).collect::<Vec<_>>()
                );
            }
            for n in &report.exhausted {
                let _ = writeln!(s, "budget exhausted n={n}");
            }
            let _ = writeln!(s, "checked={} failed={}", report.checked, report.failed);
            s
        }
    };
    Ok((text, report.passed()))
}

fn table(cli: &Cli, a: &TableArgs) -> Outcome {
    let format = allow(cli, "table", &[Format::Text, Format::Csv, Format::Json])?;
    let rows = iterates_table(a.xmax, a.imax)?;
    Ok(match format {
        Format::Json => to_json(
            &rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        ),
        _ => iterates_table_csv(&rows),
    })
}

fn compose(cli: &Cli, a: &ComposeArgs) -> Outcome {
    let format = allow(cli, "compose", &[Format::Text, Format::Json])?;
    let indices = parse_chain(&a.chain, a.right_to_left)?;
    let c = composition::chain(&indices)?;
    let samples = c.smallest_elements(a.samples);
    let images: Vec<(String, String)> = samples
        .iter()
        .map(|x| {
            let y = c.apply(x).expect("domain member");
            (x.to_string(), y.to_string())
        })
        .collect();
    Ok(match format {
        Format::Json => to_json(&json!({
            "chain": c,
            "samples": images,
        })),
        _ => {
            let fp = c.fixed_point();
            let mut s = String::new();
            let _ = writeln!(s, "chain: {}", c.label());
            let _ = writeln!(s, "composite: {}", c.composite);
            match &c.domain {
                Some(d) => {
                    let _ = writeln!(s, "domain: {d}");
                }
                None => {
                    let _ = writeln!(s, "domain: empty");
                }
            }
            let _ = writeln!(s, "category: {}", c.category());
            let _ = writeln!(s, "sink: {}", c.is_sink());
            let _ = writeln!(
                s,
                "fixed point: {} ({})",
                fp.point,
                if fp.in_domain { "in domain" } else { "not in domain" }
            );
            for (x, y) in &images {
                let _ = writeln!(s, "{x} -> {y}");
            }
            s
        }
    })
}

fn search(cli: &Cli, a: &SearchArgs) -> Result<(String, bool), Failure> {
    let format = allow(cli, "search-cat2", &[Format::Text, Format::Json])?;
    let config = SearchConfig {
        depth: a.depth,
        max_k: a.max_k,
        prune: !a.no_prune,
        jobs: jobs(cli),
    };
    let report = search_category2(&config)?;
    let closure = a.closure.map(|d| category_closure_probe(d, a.max_k)).transpose()?;
    let nontrivial: Vec<_> = report.nontrivial_cycles().collect();
    let closure_ok = closure.as_ref().is_none_or(|c| c.holds());
    let passed = report.is_empty() && nontrivial.is_empty() && closure_ok;
    let failed = report.witnesses.len() + nontrivial.len();
    let text = match format {
        Format::Json => to_json(&json!({
            "report": report,
            "closure": closure,
        })),
        _ => {
            let mut s = String::new();
            for w in &report.witnesses {
                let _ = writeln!(
                    s,
                    "witness: {} category={} domain={} smallest={}",
                    w.chain,
                    w.chain.category(),
                    w.chain.domain.as_ref().map_or("empty".to_string(), |d| d.to_string()),
                    w.smallest_input.as_ref().map_or("none".to_string(), |x| x.to_string())
                );
            }
            for c in &report.cycles {
                let _ = writeln!(
                    s,
                    "cycle: {} fixed point {}{}",
                    c.chain,
                    c.fixed_point,
                    if c.trivial { " (trivial)" } else { "" }
                );
            }
            if report.is_empty() {
                let _ = writeln!(
                    s,
                    "no Category 2 composite among chains from f1/f2 of length <= {} with |k| <= {}",
                    report.depth, report.max_k
                );
            }
            if !report.pruning {
                let _ = writeln!(
                    s,
                    "integer fixed points: {} (in domain and nontrivial: {})",
                    report.integer_fixed_points,
                    nontrivial.len()
                );
            }
            if let Some(c) = &closure {
                let _ = writeln!(s, "transitions (depth {}, |k| <= {}):", c.depth, c.max_k);
                for t in &c.transitions {
                    let _ = writeln!(s, "  {} --{}--> {} x{}", t.from, t.step, t.to, t.count);
                }
                let _ = writeln!(s, "forbidden transitions: {}", c.forbidden().len());
            }
            let _ = writeln!(
                s,
                "visited={} pruned_subtrees={}",
                report.visited, report.pruned_subtrees
            );
            let _ = writeln!(s, "checked={} failed={}", report.visited, failed);
            s
        }
    };
    Ok((text, passed))
}

fn lines_command(cli: &Cli, a: &LinesArgs) -> Result<(String, bool), Failure> {
    if let Some(p) = a.lattice {
        let format = allow(cli, "lines --lattice", &[Format::Text, Format::Csv, Format::Json])?;
        let rows = (1..=p)
            .map(|p| {
                Ok((
                    p,
                    min_q(p, SinkBound::CoefLt1)?,
                    min_q(p, SinkBound::CoefGtNegHalf)?,
                ))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let text = match format {
            Format::Json => to_json(
                &rows
                    .iter()
                    .map(|(p, a, b)| json!({"p": p, "coef_lt_1": a, "coef_gt_neg_half": b}))
                    .collect::<Vec<_>>(),
            ),
            _ => {
                let mut s = String::from("p,coef_lt_1,coef_gt_neg_half\n");
                for (p, a, b) in &rows {
                    let _ = writeln!(s, "{p},{a},{b}");
                }
                s
            }
        };
        return Ok((text, true));
    }
    if a.check {
        let format = allow(cli, "lines --check", &[Format::Text, Format::Json])?;
        let inter = intersection_points(a.kmax)?;
        let sym = symmetry_check(a.kmax)?;
        let failed = inter.failures.len() + sym.reflection_failures.len();
        let text = match format {
            Format::Json => to_json(&json!({"intersections": inter, "symmetry": sym})),
            _ => {
                let mut s = String::new();
                let _ = writeln!(
                    s,
                    "positive side through ({}, {}), non-positive side through ({}, {})",
                    inter.positive_point.0,
                    inter.positive_point.1,
                    inter.non_positive_point.0,
                    inter.non_positive_point.1
                );
                for i in &inter.failures {
                    let _ = writeln!(s, "f{i} misses its common point");
                }
                let _ = writeln!(
                    s,
                    "f-k(x) = fk(1/3 - x): {} of {} fail",
                    sym.reflection_failures.len(),
                    a.kmax
                );
                let _ = writeln!(
                    s,
                    "1/3 - fk(1/3 - x) = f-k(x): {} of {} fail",
                    sym.conjugation_failures.len(),
                    a.kmax
                );
                let _ = writeln!(s, "checked={} failed={}", inter.checked + a.kmax as u64, failed);
                s
            }
        };
        return Ok((text, failed == 0));
    }
    let format = allow(cli, "lines", &[Format::Text, Format::Csv, Format::Json])?;
    let rows = lines(a.kmax)?;
    let text = match format {
        Format::Json => to_json(&rows),
        _ => lines_csv(&rows),
    };
    Ok((text, true))
}

fn tree(cli: &Cli, a: &TreeArgs) -> Result<(String, bool), Failure> {
    if let Some(t) = &a.predecessors_of {
        let format = allow(cli, "tree --predecessors-of", &[Format::Text, Format::Csv, Format::Json])?;
        let fam = predecessors(&SpiralValue(t.clone()), a.count)?;
        let text = match format {
            Format::Json => to_json(&fam),
            _ => {
                let mut s = String::from("index,predecessor\n");
                for p in &fam.entries {
                    let _ = writeln!(s, "{},{}", p.index, p.value);
                }
                if format == Format::Text {
                    for f in &fam.closed_forms {
                        let side = if f.positive { "positive" } else { "non-positive" };
                        let sign = if f.positive { "" } else { "-" };
                        let _ = writeln!(
                            s,
                            "{side}: x(n) = {} via f{sign}(6n+{}), n >= 0",
                            f.expression, f.offset
                        );
                    }
                }
                s
            }
        };
        return Ok((text, true));
    }
    if a.connectivity {
        let format = allow(cli, "tree --connectivity", &[Format::Text, Format::Json])?;
        let report = connectivity_check(a.radius, cli.budget, jobs(cli))?;
        let text = match format {
            Format::Json => to_json(&report),
            _ => {
                let mut s = String::new();
                for v in &report.failed {
                    let _ = writeln!(s, "unresolved: {v}");
                }
                let _ = writeln!(
                    s,
                    "longest chain: {} ({} steps)",
                    report.farthest, report.farthest_steps
                );
                let _ = writeln!(s, "checked={} failed={}", report.checked, report.failed.len());
                s
            }
        };
        return Ok((text, report.connected()));
    }
    let format = allow(cli, "tree", &[Format::Text, Format::Csv, Format::Json, Format::Dot])?;
    let slice = build_tree(a.radius, cli.budget)?;
    let text = match format {
        Format::Dot => slice.to_dot(),
        Format::Json => to_json(&slice),
        _ => slice.to_csv(),
    };
    Ok((text, slice.all_reach_root))
}

fn jacobsthal(cli: &Cli, a: &KmaxArgs) -> Outcome {
    let format = allow(cli, "jacobsthal", &[Format::Text, Format::Csv, Format::Json])?;
    let rows = (1..=a.kmax)
        .map(|k| {
            Ok((
                k,
                jacobsthal_c(k)?,
                jacobsthal_d(k)?,
                prime_divides_c(k as u64),
            ))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(match format {
        Format::Json => to_json(
            &rows
                .iter()
                .map(|(k, c, d, p)| json!({"k": k, "c": c.to_string(), "d": d.to_string(), "k_divides_c": p}))
                .collect::<Vec<_>>(),
        ),
        _ => {
            let mut s = String::from("k,c,d,k_divides_c\n");
            for (k, c, d, p) in &rows {
                let _ = writeln!(s, "{k},{c},{d},{p}");
            }
            s
        }
    })
}
