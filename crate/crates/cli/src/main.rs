use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use forman_core::curvature::curvature_map;
use forman_core::distance::{graph_distance, Bandwidth, DistanceParams, Kernel};
use forman_core::dynamics::{DEFAULT_CHANGE_DT, DEFAULT_CHANGE_STEPS, DEFAULT_CHANGE_THRESHOLD};
use forman_core::flow::{run_flow, DenoiseConfig, FlowConfig};
use forman_core::generators::RNG_ALGORITHM;
use forman_core::io::{
    emit_change_report, emit_curvature, emit_curvature_map, emit_distance_matrix, emit_flow_trace,
    emit_histogram, label_table_path, read_edge_list, save_edge_list,
};
use forman_core::numeric::DenseMatrix;
use forman_core::{
    align_edges, apply_combinatorial_weights, curvature_field, denoise_with, detect_changes,
    generate, sample_subgraph, ChangeParams, EdgeListFormat, FlowVariant, GeneratorSpec, Model,
    WeightedNetwork,
};

/// Forman-Ricci curvature, curvature flows and curvature-based network comparison.
#[derive(Debug, Parser)]
#[command(name = "forman", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-edge curvature as CSV.
    Curvature {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Histogram of edge curvatures as CSV.
    Histogram {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
    /// Node-by-node curvature matrix plus a label table.
    Map {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Curvature-distribution distance between networks.
    ///
    /// With `--a` and `--b` the distance is printed; with `--inputs` a
    /// pairwise matrix is written to `--output`.
    Distance {
        #[arg(long, requires = "b", conflicts_with = "inputs")]
        a: Option<PathBuf>,
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
        #[arg(long, num_args = 2.., requires = "output")]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        read: ReadArgs,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Evolve edge weights by a curvature flow; writes the final edge list.
    Flow {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
        variant: VariantArg,
        #[arg(long, default_value_t = DEFAULT_CHANGE_DT)]
        dt: f64,
        #[arg(long = "K", default_value_t = DEFAULT_CHANGE_STEPS)]
        k: usize,
        /// Per-step weights and mean curvature as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Smooth edge weights with a few negative Laplacian-flow steps.
    Denoise {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long = "K", default_value_t = 3)]
        k: usize,
        /// Clamp weights that would turn non-positive instead of failing.
        #[arg(long)]
        clamp: bool,
    },
    /// Flag edges whose weights diverge between two snapshots.
    Changes {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        read: ReadArgs,
        #[arg(long, default_value_t = DEFAULT_CHANGE_DT)]
        dt: f64,
        #[arg(long = "K", default_value_t = DEFAULT_CHANGE_STEPS)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_CHANGE_THRESHOLD)]
        threshold: f64,
    },
    /// Generate a random model network as an edge list.
    Generate {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "k-ring")]
        k_ring: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long = "m-attach")]
        m_attach: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Snowball-sample an induced subgraph.
    Sample {
        #[command(flatten)]
        read: ReadArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "sample-size")]
        sample_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ReadArgs {
    #[arg(long)]
    directed: bool,
    #[arg(long, value_enum, default_value_t = WeightsArg::File)]
    weights: WeightsArg,
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    read: ReadArgs,
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,
    /// `silverman` or a positive number.
    #[arg(long, default_value = "silverman", value_parser = parse_bandwidth)]
    bandwidth: Bandwidth,
    #[arg(long, default_value_t = forman_core::distance::DEFAULT_BINS)]
    bins: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightsArg {
    /// Every node and edge weighs 1.
    Unit,
    /// Edge weights from the third column (1 when absent).
    File,
    /// Mean-neighbour-degree node weights and derived edge weights, normalized.
    Combinatorial,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Epanechnikov,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    Normalized,
    Reverse,
    Laplacian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Er,
    Ws,
    Ab,
}

fn parse_bandwidth(s: &str) -> Result<Bandwidth, String> {
    if s.eq_ignore_ascii_case("silverman") {
        return Ok(Bandwidth::Silverman);
    }
    match s.parse::<f64>() {
        Ok(h) if h > 0.0 && h.is_finite() => Ok(Bandwidth::Fixed(h)),
        _ => Err(format!("expected `silverman` or a positive number, got {s:?}")),
    }
}

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<forman_core::Error> for Failure {
    fn from(e: forman_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn load(path: &Path, read: &ReadArgs) -> Result<WeightedNetwork, Failure> {
    let g = read_edge_list(path, EdgeListFormat::directed(read.directed)).map_err(|e| match e {
        forman_core::Error::Io { .. } => anyhow::Error::from(e),
        e => anyhow::Error::from(e).context(path.display().to_string()),
    })?;
    let g = match read.weights {
        WeightsArg::File => g,
        WeightsArg::Unit => {
            let m = g.edge_count();
            g.with_edge_weights(vec![1.0; m])?
        }
        WeightsArg::Combinatorial => apply_combinatorial_weights(&g)
            .with_context(|| path.display().to_string())?,
    };
    Ok(g)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Curvature { graph, output } => {
            let g = load(&graph.input, &graph.read)?;
            emit_curvature(&g, &curvature_field(&g), &output)?;
        }
        Command::Histogram {
            graph,
            output,
            bins,
        } => {
            if bins == 0 {
                return usage("--bins must be at least 1");
            }
            let g = load(&graph.input, &graph.read)?;
            emit_histogram(&curvature_field(&g), bins, &output)?;
        }
        Command::Map { graph, output } => {
            let g = load(&graph.input, &graph.read)?;
            let map = curvature_map(&g, &curvature_field(&g))?;
            emit_curvature_map(&map, g.labels(), &output)?;
            eprintln!("labels written to {}", label_table_path(&output).display());
        }
        Command::Distance {
            a,
            b,
            inputs,
            output,
            read,
            density,
        } => {
            if density.bins == 0 {
                return usage("--bins must be at least 1");
            }
            let params = DistanceParams {
                kernel: match density.kernel {
                    KernelArg::Gaussian => Kernel::Gaussian,
                    KernelArg::Epanechnikov => Kernel::Epanechnikov,
                },
                bandwidth: density.bandwidth,
                bins: density.bins,
                ..Default::default()
            };
            match (a, b) {
                (Some(a), Some(b)) => {
                    let (ga, gb) = (load(&a, &read)?, load(&b, &read)?);
                    let d = graph_distance(&ga, &gb, &params)?;
                    println!("{d:?}");
                }
                _ if inputs.len() >= 2 => {
                    let graphs = inputs
                        .iter()
                        .map(|p| load(p, &read))
                        .collect::<Result<Vec<_>, _>>()?;
                    let k = graphs.len();
                    let pairs: Vec<(usize, usize)> =
                        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
                    let values = pairs
                        .par_iter()
                        .map(|&(i, j)| graph_distance(&graphs[i], &graphs[j], &params))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut d = DenseMatrix::zeros(k, k);
                    for (&(i, j), v) in pairs.iter().zip(values) {
                        d[(i, j)] = v;
                        d[(j, i)] = v;
                    }
                    let names: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
                    emit_distance_matrix(&names, &d, output.as_deref().expect("required by clap"))?;
                }
                _ => return usage("give --a and --b, or --inputs with at least two files"),
            }
        }
        Command::Flow {
            graph,
            output,
            variant,
            dt,
            k,
            trace,
        } => {
            let variant = match variant {
                VariantArg::Standard => FlowVariant::Standard,
                VariantArg::Normalized => FlowVariant::Normalized,
                VariantArg::Reverse => FlowVariant::Reverse,
                VariantArg::Laplacian => FlowVariant::Laplacian,
            };
            let cfg = FlowConfig::new(dt, k, variant).map_err(|e| Failure::Usage(e.to_string()))?;
            let g = load(&graph.input, &graph.read)?;
            let (out, tr) = run_flow(&g, &cfg)?;
            save_edge_list(&out, &[format!("{variant:?} flow, dt={dt}, K={k}")], &output)?;
            if let Some(path) = trace {
                emit_flow_trace(&g, &tr, &path)?;
            }
        }
        Command::Denoise {
            graph,
            output,
            dt,
            k,
            clamp,
        } => {
            if !(dt >= 0.0 && dt.is_finite()) {
                return usage(format!("--dt must be non-negative, got {dt}"));
            }
            let g = load(&graph.input, &graph.read)?;
            let cfg = DenoiseConfig {
                strict: !clamp,
                ..DenoiseConfig::new(dt, k)
            };
            let out = if dt == 0.0 || k == 0 {
                g.clone()
            } else {
                denoise_with(&g, &cfg)?.network
            };
            save_edge_list(&out, &[format!("denoised, dt={dt}, K={k}")], &output)?;
        }
        Command::Changes {
            a,
            b,
            output,
            read,
            dt,
            k,
            threshold,
        } => {
            if !(threshold >= 0.0) {
                return usage(format!("--threshold must be non-negative, got {threshold}"));
            }
            if k > 0 && !(dt > 0.0 && dt.is_finite()) {
                return usage(format!("--dt must be positive, got {dt}"));
            }
            let (ga, gb) = (load(&a, &read)?, load(&b, &read)?);
            let pair = align_edges(&ga, &gb)?;
            let report = detect_changes(
                &pair,
                &ChangeParams {
                    dt,
                    steps: k,
                    threshold,
                },
            )?;
            emit_change_report(&pair.a, &pair.b, &report, &output)?;
            eprintln!(
                "{} of {} shared edges flagged; {} added, {} removed",
                report.flagged.len(),
                report.deviations.len(),
                report.added.len(),
                report.removed.len()
            );
        }
        Command::Generate {
            model,
            n,
            p,
            k_ring,
            beta,
            m_attach,
            seed,
            output,
        } => {
            let missing = |flag: &str| Failure::Usage(format!("--model {model:?} needs {flag}"));
            let model = match model {
                ModelArg::Er => Model::ErdosRenyi {
                    n,
                    p: p.ok_or_else(|| missing("--p"))?,
                },
                ModelArg::Ws => Model::WattsStrogatz {
                    n,
                    k_ring: k_ring.ok_or_else(|| missing("--k-ring"))?,
                    beta: beta.ok_or_else(|| missing("--beta"))?,
                },
                ModelArg::Ab => Model::AlbertBarabasi {
                    n,
                    m_attach: m_attach.ok_or_else(|| missing("--m-attach"))?,
                },
            };
            let spec = GeneratorSpec::new(model, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            let g = generate(&spec)?;
            let header = [format!("{model:?}"), format!("seed={seed} rng={RNG_ALGORITHM}")];
            save_edge_list(&g, &header, &output)?;
        }
        Command::Sample {
            read,
            input,
            sample_size,
            seed,
            output,
        } => {
            let g = load(&input, &read)?;
            let s = sample_subgraph(&g, sample_size, seed)?;
            let header = [format!(
                "snowball sample of {} nodes from {}, seed={seed} rng={RNG_ALGORITHM}",
                sample_size,
                input.display()
            )];
            save_edge_list(&s, &header, &output)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
