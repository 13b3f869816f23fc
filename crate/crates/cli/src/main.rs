use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hpl_core::absorption::{assemble, PipelineParams};
use hpl_core::augment::{sample_gnp, union};
use hpl_core::bounds::{self, JansonGenericInput, JansonForestInput};
use hpl_core::constructions::{blowup_kminus, dense_host, extremal_graph, pminus, ExtremalSpec};
use hpl_core::experiments::{run_batch, threshold_bisect, ExperimentConfig};
use hpl_core::search::{find_power_ham_cycle, SearchBudget, SearchOutcome};
use hpl_core::{edgelist, rng, Graph};

#[derive(Parser)]
#[command(name = "hpl", version, about = "Powers of Hamiltonian cycles in randomly augmented dense graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Extremal,
    Pminus,
    Blowup,
    Dense,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a deterministic graph and write it as an edge list.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Class size for `blowup`.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union a graph with G(n, C/n); writes a sidecar manifest next to `out`.
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact search for the r-th power of a Hamiltonian cycle.
    Search {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        power: usize,
        #[arg(long, default_value_t = 50_000_000)]
        budget_nodes: u64,
        /// Defaults to `<input>.cert`.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Run the absorption pipeline on `G ∪ G(n, C/n)`.
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long = "C")]
        c: f64,
        /// Overrides the desk preset.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Evaluate a tail bound and print it as JSON.
    Bounds {
        #[command(subcommand)]
        which: BoundCmd,
    },
    /// Run a Monte Carlo batch (`c_grid`) or a bisection (`c_range` only).
    Threshold {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum BoundCmd {
    /// `2^(-c_F ρ² p n²)` for a forest family of density `ρ`.
    #[command(name = "janson-paper")]
    JansonForest {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1.0)]
        cf: f64,
    },
    JansonGeneric {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta_bar: f64,
    },
    Chernoff {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        t: f64,
    },
    Union {
        /// Comma-separated probabilities.
        #[arg(long, value_delimiter = ',')]
        parts: Vec<f64>,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    edgelist::read(path).with_context(|| format!("reading {}", path.display()))
}

fn construct(kind: Kind, k: usize, n: Option<usize>, eps: Option<f64>, m: usize, alpha: Option<f64>, seed: u64) -> Result<Graph> {
    Ok(match kind {
        Kind::Extremal => {
            let (Some(n), Some(eps)) = (n, eps) else {
                bail!("extremal needs --n and --eps");
            };
            extremal_graph(&ExtremalSpec::new(k, n, eps)?)?
        }
        Kind::Pminus => pminus(k),
        Kind::Blowup => blowup_kminus(k, m),
        Kind::Dense => {
            let (Some(n), Some(alpha)) = (n, alpha) else {
                bail!("dense needs --n and --alpha");
            };
            dense_host(n, alpha, seed)?
        }
    })
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Construct { kind, k, n, eps, m, alpha, seed, out } => {
            let g = construct(kind, k, n, eps, m, alpha, seed)?;
            match out {
                Some(path) => edgelist::write(&path, &g)?,
                None => print!("{}", edgelist::to_string(&g)),
            }
        }
        Cmd::Augment { input, c, seed, out } => {
            let g = read_graph(&input)?;
            let n = g.n();
            let p = if n == 0 { 0.0 } else { (c / n as f64).clamp(0.0, 1.0) };
            let h = union(&g, &sample_gnp(n, p, seed)?)?;
            edgelist::write(&out, &h.union)?;
            let manifest = json!({
                "input": input,
                "n": n,
                "C": c,
                "p": p,
                "seed": seed,
                "generator_version": rng::GENERATOR_VERSION,
                "random_edges": h.rnd.graph.edge_count(),
                "union_edges": h.union.edge_count(),
            });
            fs::write(manifest_path(&out), serde_json::to_string_pretty(&manifest)? + "\n")?;
        }
        Cmd::Search { input, power, budget_nodes, cert } => {
            let h = read_graph(&input)?;
            match find_power_ham_cycle(&h, power, SearchBudget::nodes(budget_nodes))? {
                SearchOutcome::Found(c) => {
                    let path = cert.unwrap_or_else(|| {
                        let mut s = input.as_os_str().to_owned();
                        s.push(".cert");
                        PathBuf::from(s)
                    });
                    fs::write(&path, c.to_text())?;
                    println!("FOUND {}", path.display());
                }
                SearchOutcome::Absent => println!("ABSENT"),
                SearchOutcome::BudgetExhausted => println!("UNKNOWN"),
            }
        }
        Cmd::Pipeline { input, k, eps, c, gamma, seed, emit_cert, trace } => {
            let g = read_graph(&input)?;
            let n = g.n();
            let alpha = k as f64 / (k as f64 + 1.0) + eps;
            let mut params = PipelineParams::desk_preset(k, n, alpha, c, seed);
            if let Some(gamma) = gamma {
                params.gamma = gamma;
            }
            let p = (c / n.max(1) as f64).clamp(0.0, 1.0);
            let h = union(&g, &sample_gnp(n, p, rng::labelled_seed(seed, "gnp", 0))?)?;
            let asm = assemble(&h, &params);
            if let Some(path) = trace {
                let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
                for e in &asm.trace {
                    serde_json::to_writer(&mut f, e)?;
                    f.write_all(b"\n")?;
                }
                f.flush()?;
            }
            match &asm.outcome {
                Ok(cert) => {
                    if let Some(path) = emit_cert {
                        fs::write(&path, cert.to_text())?;
                    }
                    println!("SUCCESS");
                }
                Err(f) => println!("FAILED {}: {}", f.stage, f.detail),
            }
        }
        Cmd::Bounds { which } => {
            let b = match which {
                BoundCmd::JansonForest { rho, p, n, cf } => {
                    bounds::janson_forest_bound(&JansonForestInput { rho, p, n, c_f: cf })
                }
                BoundCmd::JansonGeneric { lambda, delta_bar } => {
                    bounds::janson_generic_bound(&JansonGenericInput { lambda, delta_bar })
                }
                BoundCmd::Chernoff { mu, t } => bounds::chernoff_hypergeometric(mu, t),
                BoundCmd::Union { parts } => bounds::union_bound(&parts),
            };
            println!("{}", serde_json::to_string(&b)?);
        }
        Cmd::Threshold { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text)?;
            if cfg.c_grid.is_empty() {
                let b = threshold_bisect(&cfg)?;
                fs::create_dir_all(&out)?;
                hpl_core::experiments::emit_report(&b.evaluated, &out)?;
                fs::write(out.join("bisection.json"), serde_json::to_string_pretty(&b)? + "\n")?;
                println!("threshold in ({}, {}] after {} steps", b.lo.c, b.hi.c, b.steps);
            } else {
                let batch = run_batch(&cfg, &out)?;
                for e in &batch.estimates {
                    println!(
                        "C = {:<8} rate {:.3} [{:.3}, {:.3}] ({} unknown)",
                        e.c, e.rate, e.ci_lo, e.ci_hi, e.unknowns
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
