//! Batch front end: one subcommand per operation family, JSON config in,
//! CSV tables and JSON reports out.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Band, ExperimentConfig};
use crate::control::{gcc_classical_with, gcc_flow_with, ControlOptions, ControlReport, FlowControlOptions, Verdict};
use crate::error::{Error, Result};
use crate::geom::fibonacci_sphere;
use crate::harmonics::HarmonicExpansion;
use crate::observability::{cluster_min_mass, cluster_spacing_table, evolution_gram, geodesic_husimi, spacing_table, MassRecord};
use crate::operator::{assemble, diagonalize_with, region_projector, ClusterOptions, SpectralDecomposition};
use crate::radon::{hamiltonian_flow, radon, second_average, second_average_function, GeodesicFunction};

const AFTER_HELP: &str = "\
Configuration is a JSON object; every key is optional (see `config.json` in any
output directory for the full set with defaults). Environment variables
SPHERELAB_<KEY>=<json> override individual keys, e.g. SPHERELAB_L=20.

Regions use a small grammar over spherical caps:
  cap(cx,cy,cz,alpha)   open cap of angular radius alpha about (cx,cy,cz)
  union(r1,r2,...)      union
  inter(r1,r2,...)      intersection
  compl(r)              complement
  full | empty
Example: union(cap(0,0,1,0.5),cap(0,0,-1,0.5))";

#[derive(Debug, Parser)]
#[command(name = "spherelab", version, about = "Spectral and control experiments on the round sphere", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config's `output`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Eigenvalues of −Δ/2 + V: spectrum.csv
    Spectrum,
    /// Great-circle averages of V on a geodesic-sphere grid: radon.csv
    Radon,
    /// Hamiltonian flow of the averaged potential: flow.csv
    Flow,
    /// Classical and flow control conditions: gcc.json
    Gcc,
    /// Cluster minimal masses on the region: obs_eig.csv
    ObsEig,
    /// Smallest eigenvalue of the time-averaged Gram operator per L: obs_evol.csv
    ObsEvol,
    /// Level spacings: spacing.csv and cluster_spacing.csv
    Spacing,
    /// Geodesic Husimi weights of an extreme cluster eigenvector: husimi.csv
    Husimi,
    /// Full observability scenario: report.json
    Counterexample,
}

/// Runs `command` with `config`, writing into `out`; returns the files written.
pub fn execute(command: Command, config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let echo = out.join("config.json");
    write_text(&echo, &config.to_json())?;
    let mut written = vec![echo];
    let v = config.potential()?;
    match command {
        Command::Spectrum => {
            let s = spectrum(&v, config, config.l_max)?;
            let rows = (0..s.len()).map(|j| SpectrumRow {
                index: j,
                k: s.cluster_of_index(j),
                lambda: s.eigenvalues[j],
                residual: s.residuals[j],
            });
            written.push(write_csv(out, "spectrum.csv", &["index", "k", "lambda", "residual"], rows)?);
        }
        Command::Radon => {
            let h = radon(&v);
            let normals = fibonacci_sphere(config.grid);
            let rows = normals
                .par_iter()
                .map(|n| {
                    let second = if config.second_order {
                        Some(second_average(&v, n, config.second_average_nodes)?)
                    } else {
                        None
                    };
                    Ok(RadonRow {
                        n_x: n.x(),
                        n_y: n.y(),
                        n_z: n.z(),
                        value: h.evaluate(n),
                        second_average: second,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            written.push(write_csv(out, "radon.csv", radon_header(config.second_order), rows)?);
        }
        Command::Flow => {
            let h = flow_hamiltonian(&v, config)?;
            let traj = hamiltonian_flow(&h, &config.start()?, config.horizon, config.dt)?;
            let rows = (0..traj.times.len()).map(|i| FlowRow {
                t: traj.times[i],
                n_x: traj.points[i].x(),
                n_y: traj.points[i].y(),
                n_z: traj.points[i].z(),
                energy: traj.energies[i],
            });
            written.push(write_csv(out, "flow.csv", &["t", "n_x", "n_y", "n_z", "energy"], rows)?);
        }
        Command::Gcc => {
            let (classical, flow) = control_reports(&v, config)?;
            let path = out.join("gcc.json");
            write_json(&path, &GccReport { classical, flow })?;
            written.push(path);
        }
        Command::ObsEig => {
            let records = mass_curve(&v, config)?;
            let rows = records.iter().map(|r| CurveRow { k: r.k, min_mass: r.min_mass });
            written.push(write_csv(out, "obs_eig.csv", &["k", "min_mass"], rows)?);
        }
        Command::ObsEvol => {
            let rows = gram_trend(&v, config)?;
            written.push(write_csv(out, "obs_evol.csv", &["L", "lambda_min"], rows)?);
        }
        Command::Spacing => {
            let s = spectrum(&v, config, config.l_max)?;
            written.push(write_csv(
                out,
                "spacing.csv",
                &["j", "lambda", "gap", "sqrt_scaled", "cube_scaled"],
                spacing_table(&s).rows,
            )?);
            let rows = s
                .clusters
                .iter()
                .filter(|c| config.keeps_cluster(c.k))
                .map(|c| {
                    let t = cluster_spacing_table(&s, c.k)?;
                    Ok(ClusterSpacingRow {
                        k: c.k,
                        min_sqrt_scaled: t.min_sqrt_scaled(),
                        min_cube_scaled: t.min_cube_scaled(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            written.push(write_csv(out, "cluster_spacing.csv", &["k", "min_sqrt_scaled", "min_cube_scaled"], rows)?);
        }
        Command::Husimi => {
            let s = spectrum(&v, config, config.l_max)?;
            let cluster = s.cluster(config.husimi_k)?;
            let index = match config.husimi_band {
                Band::Min => cluster.range.start,
                Band::Max => cluster.range.end - 1,
            };
            let h = geodesic_husimi(&s.eigenvector(index), config.husimi_k, &fibonacci_sphere(config.husimi_grid))?;
            let rows = h.normals.iter().zip(&h.weights).map(|(n, w)| HusimiRow {
                n_x: n.x(),
                n_y: n.y(),
                n_z: n.z(),
                weight: *w,
            });
            written.push(write_csv(out, "husimi.csv", &["n_x", "n_y", "n_z", "weight"], rows)?);
        }
        Command::Counterexample => {
            let report = counterexample(&v, config)?;
            let path = out.join("report.json");
            write_json(&path, &report)?;
            written.push(path);
            if let Some(first) = report.failures.first() {
                return Err(Error::Scenario {
                    stage: first.stage.clone(),
                    detail: report
                        .failures
                        .iter()
                        .map(|f| format!("{}: {}", f.stage, f.detail))
                        .collect::<Vec<_>>()
                        .join("; "),
                });
            }
        }
    }
    Ok(written)
}

/// Parses arguments and environment, then runs; the entry point of the binary.
pub fn run<I>(cli: Cli, vars: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = (String, String)>,
{
    let config = ExperimentConfig::load(cli.config.as_deref(), vars)?;
    let out = cli.out.clone().unwrap_or_else(|| config.output.clone());
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| execute(cli.command, &config, &out)),
        None => execute(cli.command, &config, &out),
    }
}

fn spectrum(v: &HarmonicExpansion, config: &ExperimentConfig, l_max: usize) -> Result<SpectralDecomposition> {
    let h = assemble(v, l_max)?;
    diagonalize_with(
        &h,
        ClusterOptions {
            min_cluster: config.min_cluster,
        },
    )
}

/// `I(V)`, or the second-order average when requested.
fn flow_hamiltonian(v: &HarmonicExpansion, config: &ExperimentConfig) -> Result<GeodesicFunction> {
    if config.second_order {
        second_average_function(v, config.second_average_nodes)
    } else {
        Ok(radon(v))
    }
}

fn control_reports(v: &HarmonicExpansion, config: &ExperimentConfig) -> Result<(ControlReport, ControlReport)> {
    let region = config.region()?;
    let control = ControlOptions {
        tolerance: config.tolerance,
        closed: config.closed,
    };
    let classical = gcc_classical_with(&region, config.grid, control);
    let h = flow_hamiltonian(v, config)?;
    let flow = gcc_flow_with(
        &region,
        &h,
        config.horizon,
        config.grid,
        FlowControlOptions {
            control,
            dt: config.dt,
            saturation: config.saturation,
        },
    );
    Ok((classical, flow))
}

fn mass_curve(v: &HarmonicExpansion, config: &ExperimentConfig) -> Result<Vec<MassRecord>> {
    let s = spectrum(v, config, config.l_max)?;
    let p = region_projector(&config.region()?, config.l_max)?;
    let curve = cluster_min_mass(&s, &p)?;
    Ok(curve.records.into_iter().filter(|r| config.keeps_cluster(r.k)).collect())
}

fn gram_trend(v: &HarmonicExpansion, config: &ExperimentConfig) -> Result<Vec<GramRow>> {
    let region = config.region()?;
    config
        .gram_l
        .iter()
        .map(|&l| {
            let h = assemble(v, l)?;
            let s = diagonalize_with(&h, ClusterOptions::default())?;
            let g = evolution_gram(&s, &region_projector(&region, l)?, config.gram_horizon)?;
            Ok(GramRow {
                l_max: l,
                lambda_min: g.min_eigenvalue,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub passed: bool,
    pub failures: Vec<StageFailure>,
    pub classical: ControlReport,
    pub flow: ControlReport,
    pub min_mass: Vec<MassRecord>,
    pub mass_floor: f64,
    pub gram: Vec<GramRow>,
    pub gram_ratio: f64,
}

/// Classical control fails, flow control holds, eigenfunction masses stay
/// bounded below and the evolution Gram floor decays with `L`.
pub fn counterexample(v: &HarmonicExpansion, config: &ExperimentConfig) -> Result<CounterexampleReport> {
    let mut failures = Vec::new();
    let mut fail = |stage: &str, detail: String| {
        failures.push(StageFailure {
            stage: stage.into(),
            detail,
        })
    };
    let (classical, flow) = control_reports(v, config)?;
    if classical.verdict != Verdict::Nonempty {
        fail("gcc_classical", format!("expected nonempty, found {:?}", classical.verdict));
    }
    if flow.verdict != Verdict::Empty {
        fail(
            "gcc_flow",
            format!(
                "expected empty, found {:?} ({} witnesses, {} undecided)",
                flow.verdict,
                flow.witnesses.len(),
                flow.undecided.len()
            ),
        );
    }
    let min_mass = mass_curve(v, config)?;
    match min_mass.iter().min_by(|a, b| a.min_mass.total_cmp(&b.min_mass)) {
        None => fail("cluster_min_mass", "no retained cluster in range".into()),
        Some(worst) if worst.min_mass < config.mass_floor => fail(
            "cluster_min_mass",
            format!("mass {} at k = {} below floor {}", worst.min_mass, worst.k, config.mass_floor),
        ),
        Some(_) => {}
    }
    let gram = gram_trend(v, config)?;
    let gram_ratio = gram[0].lambda_min / gram[gram.len() - 1].lambda_min;
    if !(gram_ratio >= config.gram_decay) {
        fail(
            "evolution_gram",
            format!("λ_min ratio {gram_ratio} between L = {} and L = {} below {}", gram[0].l_max, gram[gram.len() - 1].l_max, config.gram_decay),
        );
    }
    Ok(CounterexampleReport {
        passed: failures.is_empty(),
        failures,
        classical,
        flow,
        min_mass,
        mass_floor: config.mass_floor,
        gram,
        gram_ratio,
    })
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    k: Option<usize>,
    lambda: f64,
    residual: f64,
}

#[derive(Serialize)]
struct RadonRow {
    n_x: f64,
    n_y: f64,
    n_z: f64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    second_average: Option<f64>,
}

#[derive(Serialize)]
struct FlowRow {
    t: f64,
    n_x: f64,
    n_y: f64,
    n_z: f64,
    energy: f64,
}

#[derive(Serialize)]
struct GccReport {
    classical: ControlReport,
    flow: ControlReport,
}

#[derive(Serialize)]
struct CurveRow {
    k: usize,
    min_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GramRow {
    #[serde(rename = "L")]
    pub l_max: usize,
    pub lambda_min: f64,
}

#[derive(Serialize)]
struct ClusterSpacingRow {
    k: usize,
    min_sqrt_scaled: Option<f64>,
    min_cube_scaled: Option<f64>,
}

#[derive(Serialize)]
struct HusimiRow {
    n_x: f64,
    n_y: f64,
    n_z: f64,
    weight: f64,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })?;
    write_text(path, &(text + "\n"))
}

fn radon_header(second_order: bool) -> &'static [&'static str] {
    if second_order {
        &["n_x", "n_y", "n_z", "value", "second_average"]
    } else {
        &["n_x", "n_y", "n_z", "value"]
    }
}

/// Writes `header` then `rows`; the header is present even when `rows` is empty.
fn write_csv<T, I>(dir: &Path, name: &str, header: &[&str], rows: I) -> Result<PathBuf>
where
    T: Serialize,
    I: IntoIterator<Item = T>,
{
    let path = dir.join(name);
    let csv_error = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(&path, source),
        other => Error::NumericalBreakdown(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&path)
        .map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
