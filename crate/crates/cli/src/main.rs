mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use curvflow::curvature::{self, CurvatureContext};
use curvflow::engine::{self, Preset};
use curvflow::isoperimetry::{self, IsoperimetryResult};
use curvflow::metric;
use curvflow::spectral;
use curvflow::wl::{self, RefineConfig};
use curvflow::{flow, DirectedWeightedGraph, Error, FeatureKind, LayerConfig, NodeState, PairSelection, Result};

use output::{fmt_float, sink, to_json};

/// Curvature, transport and refinement tools for directed weighted graphs.
///
/// Graph inputs are JSON (`.json`) or whitespace-separated edge lists.
/// CURVFLOW_THREADS caps the worker count (0 = all cores).
#[derive(Parser)]
#[command(name = "curvflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Curc,
    Eps,
    Idle,
    Ollivier,
    Forman,
    Lb1,
    Lb2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Limit,
    Eps,
    Hop,
}

#[derive(Clone, Copy, ValueEnum)]
enum Export {
    M,
    #[value(name = "W")]
    W,
    Mu,
}

#[derive(Subcommand)]
enum Command {
    /// Per-pair curvature with summary statistics.
    Curvature {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "curc")]
        kind: Kind,
        /// Mask threshold for `--kind eps`; defaults to the limit threshold ε*.
        #[arg(long)]
        eps: Option<f64>,
        /// `all`, `edges`, or a list `x:y,x:y,...`. Defaults to `edges` for
        /// forman and lb2, `all` otherwise.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perron measure, random walk matrix and mean transition kernel.
    Perron {
        graph: PathBuf,
        /// Emit one component only.
        #[arg(long, value_enum)]
        export: Option<Export>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All-pairs quasi-metric.
    Distance {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "limit")]
        mode: Mode,
        /// Mask threshold for `--mode eps`; defaults to ε*.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force Dirichlet isoperimetric constant and its curvature bound.
    Cheeger {
        graph: PathBuf,
        /// Base vertex; every vertex when absent.
        #[arg(long)]
        x: Option<usize>,
        /// Radius; the distance quantiles of the base vertex when absent.
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Color refinement with adjacency features.
    Wl {
        graph: PathBuf,
        /// `rrwp:K`, `spd:C`, `adj`, `sym`, `row`, or `+`-joined parts.
        /// Repeated features are concatenated unless `--cycle` is given.
        #[arg(long, required = true)]
        feature: Vec<String>,
        /// Rotate through the features round by round.
        #[arg(long)]
        cycle: bool,
        /// Second graph; prints a discrimination verdict.
        #[arg(long)]
        pair: Option<PathBuf>,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One propagation layer.
    Engine {
        graph: PathBuf,
        /// `gcn`, `sage_gcn`, `gin` or `gated`.
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        /// Layer configuration JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Node states as a JSON array of rows; a single all-ones channel
        /// when absent.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Writes the head-summed propagation matrix as matrix JSON.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature trend over a series of per-epoch matrices.
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("CURVFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("CURVFLOW_THREADS must be a nonnegative integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<DirectedWeightedGraph> {
    DirectedWeightedGraph::load_auto(path)
}

fn in_file(path: &Path, e: impl Into<Error>) -> Error {
    Error::File {
        path: path.to_path_buf(),
        source: Box::new(e.into()),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| in_file(path, e))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(to_json(value)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn parse_pairs(text: &str) -> Result<PairSelection> {
    match text {
        "all" => Ok(PairSelection::All),
        "edges" => Ok(PairSelection::Edges),
        list => list
            .split(',')
            .map(|p| {
                let bad = || Error::Parse(format!("pair {p:?} is not of the form x:y"));
                let (x, y) = p.trim().split_once(':').ok_or_else(bad)?;
                Ok((x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>>>()
            .map(PairSelection::List),
    }
}

fn write_matrix_csv(m: &curvflow::DenseMatrix, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Curvature {
            graph,
            kind,
            eps,
            pairs,
            format,
            out,
        } => {
            let g = load(&graph)?;
            let default = match kind {
                Kind::Forman | Kind::Lb2 => "edges",
                _ => "all",
            };
            let pairs = parse_pairs(pairs.as_deref().unwrap_or(default))?;
            let report = match kind {
                Kind::Curc => curvature::curc(&g, &pairs)?,
                Kind::Eps => {
                    let eps = match eps {
                        Some(e) => e,
                        None => metric::epsilon_star(&g)?,
                    };
                    curvature::curc_eps(&g, eps, &pairs)?
                }
                Kind::Idle => curvature::idle_curc(&g, &pairs)?,
                Kind::Ollivier => curvature::ollivier(&g, &pairs)?,
                Kind::Forman => curvature::forman_report(&g, &pairs)?,
                Kind::Lb1 => curvature::lb1(&g, &pairs)?,
                Kind::Lb2 => curvature::lb2(&g, &pairs)?,
            };
            match format {
                Format::Json => emit_json(&report, out.as_deref()),
                Format::Csv => {
                    let mut w = sink(out.as_deref())?;
                    report.write_csv(&mut w, fmt_float)?;
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Command::Perron {
            graph,
            export,
            format,
            out,
        } => {
            let g = load(&graph)?;
            let k = spectral::mean_transition_kernel(&g)?;
            match (export, format) {
                (None, Format::Json) => emit_json(&k, out.as_deref()),
                (None, Format::Csv) => Err(Error::Parse("csv output needs --export m, W or mu".into())),
                (Some(Export::M), Format::Json) => {
                    emit_json(&serde_json::json!({"m": k.m, "residual": k.residual}), out.as_deref())
                }
                (Some(Export::M), Format::Csv) => {
                    let mut w = sink(out.as_deref())?;
                    writeln!(w, "vertex,m")?;
                    for (v, m) in k.m.iter().enumerate() {
                        writeln!(w, "{v},{}", fmt_float(*m))?;
                    }
                    w.flush()?;
                    Ok(())
                }
                (Some(Export::W), Format::Json) => emit_json(&k.w, out.as_deref()),
                (Some(Export::Mu), Format::Json) => emit_json(&k.mu, out.as_deref()),
                (Some(Export::W), Format::Csv) => write_matrix_csv(&k.w, out.as_deref()),
                (Some(Export::Mu), Format::Csv) => write_matrix_csv(&k.mu, out.as_deref()),
            }
        }
        Command::Distance {
            graph,
            mode,
            eps,
            format,
            out,
        } => {
            let g = load(&graph)?;
            g.assert_strongly_connected()?;
            let d = match mode {
                Mode::Limit => metric::limit_distance(&g)?,
                Mode::Hop => metric::hop_distance(&g)?,
                Mode::Eps => {
                    let eps = match eps {
                        Some(e) => e,
                        None => metric::epsilon_star(&g)?,
                    };
                    metric::epsilon_distance(&g, eps)?
                }
            };
            match format {
                Format::Json => emit_json(&d, out.as_deref()),
                Format::Csv => write_matrix_csv(&d.d, out.as_deref()),
            }
        }
        Command::Cheeger { graph, x, r, out } => {
            let g = load(&graph)?;
            let ctx = CurvatureContext::new(&g)?;
            let bases: Vec<usize> = match x {
                Some(x) if x >= g.n() => return Err(Error::IndexOutOfRange { index: x, n: g.n() }),
                Some(x) => vec![x],
                None => (0..g.n()).collect(),
            };
            let mut results: Vec<IsoperimetryResult> = Vec::new();
            for x in bases {
                let base = isoperimetry::base_curvature(&ctx, x)?;
                let radii = match r {
                    Some(r) => vec![r],
                    None => {
                        let mut q = isoperimetry::distance_quantiles(&ctx, x);
                        q.dedup();
                        q
                    }
                };
                for r in radii {
                    results.push(isoperimetry::dirichlet_constant_with(&ctx, x, r, base)?);
                }
            }
            emit_json(&results, out.as_deref())
        }
        Command::Wl {
            graph,
            feature,
            cycle,
            pair,
            max_rounds,
            out,
        } => {
            let kinds = feature.iter().map(|f| f.parse()).collect::<Result<Vec<FeatureKind>>>()?;
            let kinds = if cycle || kinds.len() == 1 {
                kinds
            } else {
                vec![FeatureKind::Concat(kinds)]
            };
            let g = load(&graph)?;
            match pair {
                Some(other) => {
                    let h = load(&other)?;
                    let cfg = RefineConfig {
                        cycle: kinds,
                        max_rounds,
                    };
                    let verdict = wl::distinguishes(&g, &h, &cfg)?;
                    let mut w = sink(out.as_deref())?;
                    writeln!(w, "{}", verdict.line())?;
                    w.flush()?;
                    Ok(())
                }
                None => {
                    let feats = kinds.iter().map(|k| k.build(&g)).collect::<Result<Vec<_>>>()?;
                    let history = wl::dynamic_refine(&feats, max_rounds)?;
                    #[derive(Serialize)]
                    struct Out {
                        features: Vec<String>,
                        stable_round: Option<usize>,
                        class_count: usize,
                        partition: Vec<usize>,
                        rounds: Vec<Vec<usize>>,
                    }
                    let at = history.stable_round.unwrap_or(history.rounds.len() - 1);
                    let body = Out {
                        features: kinds.iter().map(ToString::to_string).collect(),
                        stable_round: history.stable_round,
                        class_count: history.rounds[at].class_count(),
                        partition: history.stable_partition(),
                        rounds: history.rounds.iter().map(|c| c.partition()).collect(),
                    };
                    emit_json(&body, out.as_deref())
                }
            }
        }
        Command::Engine {
            graph,
            preset,
            config,
            state,
            matrix_out,
            out,
        } => {
            let g = load(&graph)?;
            let h = match state {
                Some(p) => {
                    let rows: Vec<Vec<f64>> = serde_json::from_str(&read_text(&p)?).map_err(|e| in_file(&p, e))?;
                    NodeState::from_rows(rows).map_err(|e| in_file(&p, e))?
                }
                None => NodeState::from_rows(vec![vec![1.0]; g.n()])?,
            };
            let cfg = match (preset, config) {
                (Some(p), _) => match p.parse::<Preset>()? {
                    Preset::Gated(w) if w.w_src.is_empty() && w.w_dst.is_empty() && w.w_feat.is_empty() => {
                        Preset::gated_zero(h.channels()).config(h.channels())
                    }
                    p => p.config(h.channels()),
                },
                (None, Some(path)) => LayerConfig::from_json(&read_text(&path)?).map_err(|e| in_file(&path, e))?,
                (None, None) => unreachable!("clap requires --preset or --config"),
            };
            if let Some(path) = matrix_out {
                let heads = engine::propagation_matrix(&g, &cfg, &h)?;
                let n = g.n();
                let total = curvflow::DenseMatrix::from_fn(n, |i, j| heads.iter().map(|m| m[(i, j)]).sum());
                emit_json(&total, Some(&path))?;
            }
            let next = engine::layer_forward(&g, &cfg, &h)?;
            emit_json(&next, out.as_deref())
        }
        Command::Analyze { manifest, format, out } => {
            let series = flow::load_epoch_series(&manifest)?;
            let report = flow::trend(&series)?;
            match format {
                Format::Json => emit_json(&report, out.as_deref()),
                Format::Csv => {
                    let mut w = sink(out.as_deref())?;
                    report.write_csv(&mut w, fmt_float)?;
                    w.flush()?;
                    Ok(())
                }
            }
        }
    }
}
