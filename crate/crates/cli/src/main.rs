mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use newton_strata::isocrystal::estimate_generic_newton;
use newton_strata::newton::{chain_length, dominance_leq, interval, maximal_chains, IntervalLimits};
use newton_strata::strata::{analyze, compare_with_fixture, generic_newton_point, parse_fixture, search_triples};
use newton_strata::{DiagramAutomorphism, Error, IsoClass, QuantumBruhatGraph, WeylElement};

use config::{cartan_from, RunConfig};
use report::{emit, sha256_hex, Format, Mismatch};

const THREADS_VAR: &str = "NEWTON_STRATA_THREADS";

#[derive(Parser)]
#[command(name = "newton-strata", version, about = "Newton strata of Iwahori double cosets for split GL_n")]
struct Cli {
    /// Output format on stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GroupArgs {
    #[arg(long = "type", default_value = "A")]
    cartan_type: String,
    #[arg(long)]
    rank: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate triples (v, w, s) satisfying the reduction conditions.
    Search {
        #[command(flatten)]
        group: GroupArgs,
        /// Diagram automorphism as the images of 1..=rank, e.g. "4 3 2 1".
        #[arg(long, default_value = "")]
        sigma: String,
        /// Reference CSV (v;w;s) to compare against as a set.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Write the triples in fixture format (v;w;s) to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full analysis of one element from a run configuration.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Distance and shortest-path weight in the quantum Bruhat graph.
    QbgDist {
        #[command(flatten)]
        group: GroupArgs,
        /// Source vertex as a word, e.g. "1 2 3".
        #[arg(long, default_value = "")]
        from: String,
        #[arg(long, default_value = "")]
        to: String,
        /// Print the whole graph in Graphviz format instead.
        #[arg(long)]
        dot: bool,
    },
    /// Monte-Carlo estimate of the generic Newton point.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Queries on the poset of isocrystal classes of GL_n.
    Poset {
        #[arg(value_enum)]
        query: PosetQuery,
        /// Lower class, e.g. "149,74,0,-74,-149" or "1/2,1/2".
        #[arg(long, allow_hyphen_values = true)]
        lower: String,
        #[arg(long, allow_hyphen_values = true)]
        upper: String,
        #[arg(long, default_value_t = IntervalLimits::default().max_gap)]
        max_gap: u64,
        #[arg(long, default_value_t = IntervalLimits::default().max_nodes)]
        max_nodes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetQuery {
    Interval,
    ChainLength,
    Chains,
}

impl PosetQuery {
    fn name(self) -> &'static str {
        match self {
            PosetQuery::Interval => "interval",
            PosetQuery::ChainLength => "chain-length",
            PosetQuery::Chains => "chains",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Mismatch>().is_some() {
        3
    } else if matches!(err.downcast_ref::<Error>(), Some(Error::PrecisionLoss(_))) {
        4
    } else {
        2
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().with_context(|| format!("{THREADS_VAR}={value:?}"))?;
    if threads == 0 {
        bail!("{THREADS_VAR} must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring the worker pool")?;
    Ok(())
}

/// Resolves bare fixture names against `./fixtures` and the bundled fixture directory.
fn locate_fixture(path: &Path) -> PathBuf {
    if path.exists() || path.components().count() != 1 {
        return path.to_path_buf();
    }
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(path);
    [Path::new("fixtures").join(path), bundled].into_iter().find(|p| p.exists()).unwrap_or_else(|| path.to_path_buf())
}

fn run(cli: &Cli) -> Result<()> {
    let out = |command: &str, hash: String, body: serde_json::Value, text: String| {
        emit(cli.format, cli.output.as_deref(), command, &hash, body, &text)
    };
    match &cli.command {
        Command::Search { group, sigma, fixture, csv } => {
            let cartan = cartan_from(&group.cartan_type, group.rank)?;
            let sigma = DiagramAutomorphism::parse(&cartan, sigma)?;
            let g = QuantumBruhatGraph::build(&cartan);
            let found = search_triples(&g, &sigma)?;
            let comparison = match fixture {
                Some(path) => {
                    let path = locate_fixture(path);
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let expected = parse_fixture(&text, group.rank)?;
                    let expected: Vec<_> = expected
                        .into_iter()
                        .map(|mut c| {
                            c.sigma = sigma.clone();
                            c
                        })
                        .collect();
                    Some((path.display().to_string(), compare_with_fixture(&found, &expected)))
                }
                None => None,
            };
            let canonical = format!("search type={} rank={} sigma={}", group.cartan_type, group.rank, sigma);
            let body = report::SearchReport::new(&cartan, &sigma, &found, comparison.as_ref());
            let rows: String = found.iter().map(|c| format!("{}\n", c.fixture_row())).collect();
            if let Some(path) = csv {
                std::fs::write(path, format!("v;w;s\n{rows}"))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut text = rows;
            text.push_str(&format!("{} triples for type {}{}\n", found.len(), group.cartan_type, group.rank));
            if let Some((path, diff)) = &comparison {
                text.push_str(&format!(
                    "fixture {path}: {}\n",
                    if diff.is_match() {
                        "match".to_string()
                    } else {
                        format!("{} missing, {} unexpected", diff.missing.len(), diff.unexpected.len())
                    }
                ));
            }
            out("search", sha256_hex(canonical.as_bytes()), report::json(&body)?, text)?;
            if let Some((path, diff)) = comparison {
                if !diff.is_match() {
                    return Err(Mismatch(format!("search result differs from {path}")).into());
                }
            }
            Ok(())
        }
        Command::Analyze { config } => {
            let cfg = RunConfig::load(config)?;
            let g = QuantumBruhatGraph::build(&cfg.cartan);
            let analysis = analyze(&cfg.triple, &cfg.mu, cfg.bound, &cfg.classes, &g)?;
            let text = analysis.to_string();
            out("analyze", sha256_hex(&cfg.source), report::json(&analysis)?, text)
        }
        Command::QbgDist { group, from, to, dot } => {
            let cartan = cartan_from(&group.cartan_type, group.rank)?;
            let g = QuantumBruhatGraph::build(&cartan);
            let canonical =
                format!("qbg-dist type={} rank={} from={from} to={to} dot={dot}", group.cartan_type, group.rank);
            if *dot {
                let dot_text = g.to_dot();
                let body = report::DotReport { vertices: g.vertices().len(), edges: g.edge_count(), dot: &dot_text };
                return out("qbg-dist", sha256_hex(canonical.as_bytes()), report::json(&body)?, dot_text.clone());
            }
            let u = WeylElement::parse_word(group.rank, from)?;
            let v = WeylElement::parse_word(group.rank, to)?;
            let distance = g.distance(&u, &v)?;
            let weight = g.min_path_weight(&u, &v)?;
            let body = report::DistanceReport { from: &u, to: &v, distance, weight: &weight };
            let label = |w: &WeylElement| if w.is_identity() { "e".to_string() } else { w.to_string() };
            let text = format!("d({}, {}) = {distance}, weight ({weight})\n", label(&u), label(&v));
            out("qbg-dist", sha256_hex(canonical.as_bytes()), report::json(&body)?, text)
        }
        Command::Sample { config, samples, prime, seed } => {
            let cfg = RunConfig::load(config)?;
            let x = cfg.element()?;
            let sampler = cfg.sampler_config(&x, *samples, *prime, *seed)?;
            let summary = estimate_generic_newton(&x, &sampler)?;
            let formula = if cfg.sigma.is_identity() {
                let g = QuantumBruhatGraph::build(&cfg.cartan);
                generic_newton_point(&x, &cfg.sigma, &g, cfg.bound).ok()
            } else {
                None
            };
            let below = formula.as_ref().map(|f| summary.histogram.keys().all(|c| dominance_leq(c, f)));
            let mut hashed = cfg.source.clone();
            hashed.extend_from_slice(format!("\nsampler={sampler:?}").as_bytes());
            let body = report::SampleReport {
                sampler: &sampler,
                formula: formula.as_ref(),
                all_below_formula: below,
                summary: &summary,
            };
            let mut text = String::new();
            for (class, count) in &summary.histogram {
                text.push_str(&format!("{count:>8}  {class}\n"));
            }
            let maxima: Vec<String> = summary.max_points.iter().map(IsoClass::to_string).collect();
            text.push_str(&format!(
                "{} accepted, {} discarded, {} rechecked; maximal: {}\n",
                summary.accepted,
                summary.discarded,
                summary.stability_checked,
                maxima.join(" ")
            ));
            if let (Some(f), Some(b)) = (&formula, below) {
                text.push_str(&format!("formula {f}; all samples below it: {b}\n"));
            }
            out("sample", sha256_hex(&hashed), report::json(&body)?, text)?;
            eprintln!("maximal sampled classes: {}", maxima.join(" "));
            Ok(())
        }
        Command::Poset { query, lower, upper, max_gap, max_nodes } => {
            let a: IsoClass = lower.parse()?;
            let b: IsoClass = upper.parse()?;
            let limits = IntervalLimits { max_gap: *max_gap, max_nodes: *max_nodes };
            let canonical =
                format!("poset {} lower={a} upper={b} max_gap={max_gap} max_nodes={max_nodes}", query.name());
            let hash = sha256_hex(canonical.as_bytes());
            match query {
                PosetQuery::Interval => {
                    let members = interval(&a, &b, &limits)?;
                    let text: String = members.iter().map(|c| format!("{c}\n")).collect();
                    out(
                        "poset interval",
                        hash,
                        report::json(&report::ListReport { lower: &a, upper: &b, items: &members })?,
                        text,
                    )
                }
                PosetQuery::ChainLength => {
                    let length = chain_length(&a, &b)?;
                    out(
                        "poset chain-length",
                        hash,
                        report::json(&report::LengthReport { lower: &a, upper: &b, chain_length: length })?,
                        format!("{length}\n"),
                    )
                }
                PosetQuery::Chains => {
                    let chains = maximal_chains(&a, &b, &limits)?;
                    let text: String = chains.iter().map(|c| format!("{c}\n")).collect();
                    out(
                        "poset chains",
                        hash,
                        report::json(&report::ListReport { lower: &a, upper: &b, items: &chains })?,
                        text,
                    )
                }
            }
        }
    }
}
