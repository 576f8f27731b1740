use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mvfield::cost::{model1_costs, model2_costs, refined_costs};
use mvfield::dynamics::{build_digraph, condensation_dot, criticality, morse_decomposition};
use mvfield::geometry::{assign_vectors, delaunay, kmeans, parse_dataset, write_dataset_csv};
use mvfield::milp::{
    build_model1, build_model2, check_integrality, export_lp, solve_ilp, solve_lp_relaxation, CoverageSense, LpOptions,
    ModelKind, SolveStatus,
};
use mvfield::mvf::{extract_model1, extract_model2, repair_convexity, validate, MultivectorField};
use mvfield::{IlpInstance, SimplexId, SimplicialComplex, Solution, VectorAssignment, VectorSample};
use mvfield_cli::{
    builtin_system, render_svg, run_pipeline, sample_random, PipelineConfig, PipelineError, Result, View,
};

#[derive(Parser)]
#[command(name = "mvfield", version, about = "Combinatorial multivector fields from sampled vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Coverage {
    AtLeast,
    AtMost,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Matching,
    Field,
    Gradient,
    Morse,
}

#[derive(Subcommand)]
enum Command {
    /// Draw uniform samples of a built-in system and write them as CSV.
    Sample {
        #[arg(long, default_value = "reporbit")]
        system: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Half-width of the sampling box around the origin.
        #[arg(long, default_value_t = 3.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce a dataset to cluster centroids with mean velocities.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        clusters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Delaunay complex of a dataset's positions.
    Triangulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a binary program over a complex and its vertex data.
    Build {
        #[arg(long)]
        complex: PathBuf,
        /// Dataset whose i-th row belongs to vertex i.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 2)]
        model: u8,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        refined: bool,
        #[arg(long, value_enum, default_value_t = Coverage::AtLeast)]
        coverage: Coverage,
        #[arg(long)]
        out: PathBuf,
        /// Also write the instance in LP format.
        #[arg(long)]
        lp: Option<PathBuf>,
    },
    /// Solve an instance exactly, or only its LP relaxation.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        relaxation: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn a 0/1 solution into a multivector field.
    Extract {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Split non-convex parts of a generalized-model solution.
        #[arg(long)]
        repair: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Critical multivectors, Morse sets and Conley indices of a field.
    Analyze {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Draw a planar field as SVG.
    Render {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_enum, default_value_t = ViewArg::Field)]
        view: ViewArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage from a preset or config file.
    Pipeline {
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        model: Option<u8>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probe how often the LP relaxation is already binary.
    CheckIntegrality {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(PipelineError::io(path))
}

fn write(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(PipelineError::io(dir))?;
    }
    std::fs::write(path, body).map_err(PipelineError::io(path))
}

fn load_dataset(path: &Path) -> Result<Vec<VectorSample>> {
    parse_dataset(&read(path)?).map_err(PipelineError::stage("dataset"))
}

fn load_complex(path: &Path) -> Result<SimplicialComplex> {
    SimplicialComplex::from_json(&read(path)?).map_err(PipelineError::stage("complex"))
}

fn load_assignment(k: &SimplicialComplex, data: &Path) -> Result<VectorAssignment> {
    let samples = load_dataset(data)?;
    let pos: Vec<Vec<f64>> = samples.iter().map(|s| s.position.clone()).collect();
    let vel: Vec<Vec<f64>> = samples.iter().map(|s| s.velocity.clone()).collect();
    assign_vectors(k, &pos, &vel).map_err(PipelineError::stage("assign"))
}

fn load_field(k: &SimplicialComplex, path: &Path) -> Result<MultivectorField> {
    Ok(MultivectorField::from_json(k, &read(path)?).map_err(PipelineError::stage("field"))?.0)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample { system, n, half_width, seed, out } => {
            let sys = builtin_system(&system)?;
            let samples = sample_random(sys, n, &vec![[-half_width, half_width]; sys.dim()], seed)?;
            write(&out, &write_dataset_csv(&samples))
        }
        Command::Cluster { input, clusters, seed, out } => {
            let c = kmeans(&load_dataset(&input)?, clusters, seed).map_err(PipelineError::stage("cluster"))?;
            write(&out, &write_dataset_csv(&c))
        }
        Command::Triangulate { input, seed, out } => {
            let pos: Vec<Vec<f64>> = load_dataset(&input)?.into_iter().map(|s| s.position).collect();
            let k = delaunay(&pos, seed).map_err(PipelineError::stage("triangulate"))?;
            write(&out, &k.to_json())
        }
        Command::Build { complex, data, model, alpha, beta, refined, coverage, out, lp } => {
            let k = load_complex(&complex)?;
            let a = load_assignment(&k, &data)?;
            let inst = match model {
                2 => build_model2(&k, &model2_costs(&k, &a).map_err(PipelineError::stage("cost"))?),
                1 => {
                    let costs =
                        if refined { refined_costs(&k, &a, alpha, beta) } else { model1_costs(&k, &a, alpha, beta) }
                            .map_err(PipelineError::stage("cost"))?;
                    let sense = match coverage {
                        Coverage::AtLeast => CoverageSense::AtLeast,
                        Coverage::AtMost => CoverageSense::AtMost,
                    };
                    build_model1(&k, &costs, sense)
                }
                _ => return Err(PipelineError::Config("model must be 1 or 2".into())),
            }
            .map_err(PipelineError::stage("build"))?;
            if let Some(lp) = lp {
                write(&lp, &export_lp(&inst))?;
            }
            write(&out, &inst.to_json())
        }
        Command::Solve { instance, relaxation, out } => {
            let inst = IlpInstance::from_json(&read(&instance)?).map_err(PipelineError::stage("instance"))?;
            let sol = if relaxation {
                let lp = solve_lp_relaxation(&inst, &LpOptions::default()).map_err(PipelineError::stage("solve"))?;
                Solution { values: lp.values, objective: lp.objective, status: lp.status, stats: Default::default() }
            } else {
                solve_ilp(&inst, None).map_err(PipelineError::stage("solve"))?
            };
            write(&out, &sol.to_json())?;
            match sol.status {
                SolveStatus::Optimal | SolveStatus::Feasible => Ok(()),
                SolveStatus::IterationLimit => Err(PipelineError::SolverLimit("iteration or node limit".into())),
                SolveStatus::Infeasible => Err(PipelineError::Validation("instance is infeasible".into())),
            }
        }
        Command::Extract { complex, instance, solution, repair, out } => {
            let k = load_complex(&complex)?;
            let inst = IlpInstance::from_json(&read(&instance)?).map_err(PipelineError::stage("instance"))?;
            let sol = Solution::from_json(&read(&solution)?).map_err(PipelineError::stage("solution"))?;
            let field = match inst.model {
                ModelKind::OneToplex => extract_model2(&k, &sol.values),
                ModelKind::General => extract_model1(&k, &sol.values).map(|f| match repair {
                    true => repair_convexity(&k, &f),
                    false => f,
                }),
            }
            .map_err(PipelineError::stage("extract"))?;
            write(&out, &field.to_json(&k, inst.model))?;
            let report = validate(&k, &field);
            match report.is_valid() {
                true => Ok(()),
                false => Err(PipelineError::Validation(format!("{:?}", report.violations))),
            }
        }
        Command::Analyze { complex, field, out, dot } => {
            let k = load_complex(&complex)?;
            let f = load_field(&k, &field)?;
            let report = validate(&k, &f);
            if !report.is_valid() {
                return Err(PipelineError::Validation(format!("{:?}", report.violations)));
            }
            let crit = criticality(&k, &f).map_err(PipelineError::stage("homology"))?;
            let ambient = k.dim();
            let morse = morse_decomposition(&k, &f, &crit, ambient);
            if let Some(dot) = dot {
                write(&dot, &condensation_dot(&build_digraph(&k, &f), &morse))?;
            }
            write(&out, &morse.to_json())
        }
        Command::Render { complex, data, field, view, out } => {
            let k = load_complex(&complex)?;
            let a = load_assignment(&k, &data)?;
            let f = load_field(&k, &field)?;
            let crit = criticality(&k, &f).map_err(PipelineError::stage("homology"))?;
            let morse = morse_decomposition(&k, &f, &crit, a.dim());
            let view = match view {
                ViewArg::Matching => View::Matching,
                ViewArg::Field => View::Field,
                ViewArg::Gradient => View::Gradient,
                ViewArg::Morse => View::Morse,
            };
            // arrows from each part's lowest simplex to its other members
            let matching: Vec<(SimplexId, SimplexId)> = f
                .parts()
                .iter()
                .flat_map(|p| {
                    let head = *p.iter().next().expect("parts are non-empty");
                    p.iter().skip(1).map(move |&t| (head, t))
                })
                .collect();
            let svg = render_svg(&k, &a, &f, &matching, &morse, view).map_err(PipelineError::stage("render"))?;
            write(&out, &svg)
        }
        Command::Pipeline { preset, config, model, alpha, beta, seed, clusters, system, out } => {
            let mut cfg = match (&preset, &config) {
                (Some(p), _) => PipelineConfig::preset(p)?,
                (None, Some(path)) => PipelineConfig::from_json(&read(path)?)?,
                (None, None) => PipelineConfig::default(),
            };
            if let Some(m) = model {
                cfg.model = m;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            if let Some(b) = beta {
                cfg.beta = b;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(c) = clusters {
                cfg.n_clusters = c;
            }
            if let Some(s) = system {
                cfg.system = Some(s);
            }
            if out.is_some() {
                cfg.output = out;
            }
            let run = run_pipeline(&cfg)?;
            if cfg.output.is_none() {
                print!("{}", run.report.to_json());
            }
            Ok(())
        }
        Command::CheckIntegrality { instance, reps, seed, out } => {
            let inst = IlpInstance::from_json(&read(&instance)?).map_err(PipelineError::stage("instance"))?;
            let report = check_integrality(&inst, reps, seed).map_err(PipelineError::stage("integrality"))?;
            match out {
                Some(path) => write(&path, &report.to_json()),
                None => {
                    println!("{}", report.to_json());
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
