//! End-to-end run: samples -> clusters -> complex -> costs -> ILP -> field
//! -> dynamics -> report and artifacts.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{CostVariant, PipelineConfig, VelocitySource};
use crate::error::{PipelineError, Result};
use crate::render::{render_svg, View};
use crate::systems::{builtin_system, euler_trajectory, sample_random, System};
use mvfield::cost::{model1_costs, model2_costs, refined_costs};
use mvfield::dynamics::{build_digraph, condensation_dot, criticality, morse_decomposition, MorseReport};
use mvfield::geometry::{assign_vectors, delaunay, kmeans, parse_dataset, write_dataset_csv};
use mvfield::homology::{relative_homology, BettiVector, Label};
use mvfield::milp::{
    build_model1, build_model2, instance_dimensions, solve_ilp, ClosedFormComparison, ModelKind, SolveStats,
    SolveStatus,
};
use mvfield::mvf::{canonical_feasible, extract_model1, extract_model2, repair_convexity, validate, MultivectorField};
use mvfield::{SimplexId, SimplicialComplex, VectorAssignment, VectorSample};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub samples: usize,
    pub clusters: usize,
    pub simplices: usize,
    pub toplexes: usize,
    pub variables: usize,
    pub eq_rows: usize,
    pub le_rows: usize,
    pub multivectors: usize,
    pub critical_multivectors: usize,
    /// Parts before convexity repair (generalized model only).
    pub raw_parts: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPart {
    pub part: usize,
    pub size: usize,
    pub conley_index: BettiVector,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseSummary {
    pub parts: Vec<usize>,
    pub n_simplices: usize,
    pub exit_set_size: usize,
    pub conley_index: Option<BettiVector>,
    pub label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub system: Option<String>,
    pub model: u8,
    pub seed: u64,
    pub dim: usize,
    pub counts: Counts,
    pub objective: f64,
    pub solver_status: SolveStatus,
    pub solver: SolveStats,
    /// Root LP relaxation already binary.
    pub lp_integral: Option<bool>,
    pub valid: bool,
    pub critical_parts: Vec<CriticalPart>,
    pub morse_sets: Vec<MorseSummary>,
    /// Morse sets made of at least two multivectors.
    pub nontrivial_sccs: usize,
    pub largest_scc_fraction: f64,
    pub largest_scc_exit_set: usize,
    pub morse_poset: Vec<(usize, usize)>,
    pub closed_form: Option<ClosedFormComparison>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Everything a run produces, for further inspection or rendering.
pub struct RunOutput {
    pub config: PipelineConfig,
    pub report: RunReport,
    pub samples: Vec<VectorSample>,
    pub clusters: Vec<VectorSample>,
    pub complex: SimplicialComplex,
    pub assignment: VectorAssignment,
    pub model: ModelKind,
    /// Pairs `(sigma, tau)` with `z = 1`, loops excluded.
    pub matching: Vec<(SimplexId, SimplexId)>,
    pub raw_field: Option<MultivectorField>,
    pub field: MultivectorField,
    pub morse: MorseReport,
}

/// Input samples per the config: dataset file, Euler orbit or uniform draw.
pub fn load_samples(cfg: &PipelineConfig) -> Result<Vec<VectorSample>> {
    if let Some(path) = &cfg.dataset {
        let text = std::fs::read_to_string(path).map_err(PipelineError::io(path))?;
        return parse_dataset(&text).map_err(PipelineError::stage("dataset"));
    }
    let system = builtin_system(cfg.system.as_deref().unwrap_or_default())?;
    match &cfg.trajectory {
        Some(t) => {
            let orbit = euler_trajectory(system, &t.x0, t.dt, t.steps)?;
            Ok(orbit.into_iter().skip(1).step_by(t.stride).collect())
        }
        None => sample_random(system, cfg.n_samples, &cfg.sample_box, cfg.seed),
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutput> {
    cfg.check()?;
    let system: Option<System> = cfg.system.as_deref().map(builtin_system).transpose()?;
    let samples = load_samples(cfg)?;
    let mut clusters = kmeans(&samples, cfg.n_clusters, cfg.seed).map_err(PipelineError::stage("cluster"))?;
    if cfg.velocity == VelocitySource::System {
        let sys = system.expect("checked by config");
        for c in &mut clusters {
            c.velocity = sys.eval(&c.position);
        }
    }
    let positions: Vec<Vec<f64>> = clusters.iter().map(|c| c.position.clone()).collect();
    let mut vectors: Vec<Vec<f64>> = clusters.iter().map(|c| c.velocity.clone()).collect();
    if cfg.normalize_vectors {
        for v in &mut vectors {
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 0.0 {
                v.iter_mut().for_each(|c| *c /= n);
            }
        }
    }
    let k = delaunay(&positions, cfg.seed).map_err(PipelineError::stage("triangulate"))?;
    let assignment = assign_vectors(&k, &positions, &vectors).map_err(PipelineError::stage("assign"))?;

    let (model, inst, warm) = if cfg.model == 2 {
        let costs = model2_costs(&k, &assignment).map_err(PipelineError::stage("cost"))?;
        let warm = canonical_feasible(&k, &costs).map_err(PipelineError::stage("build"))?.values;
        (ModelKind::OneToplex, build_model2(&k, &costs).map_err(PipelineError::stage("build"))?, warm)
    } else {
        let costs = match cfg.cost_variant {
            CostVariant::Base => model1_costs(&k, &assignment, cfg.alpha, cfg.beta),
            CostVariant::Refined => refined_costs(&k, &assignment, cfg.alpha, cfg.beta),
        }
        .map_err(PipelineError::stage("cost"))?;
        let inst = build_model1(&k, &costs, cfg.coverage).map_err(PipelineError::stage("build"))?;
        // every simplex on its own loop is feasible for both coverage senses
        let warm = inst.var_dict.iter().map(|v| if v.is_loop() { 1.0 } else { 0.0 }).collect();
        (ModelKind::General, inst, warm)
    };
    let dims = instance_dimensions(&inst);
    let sol = solve_ilp(&inst, Some(&warm)).map_err(PipelineError::stage("solve"))?;
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::IterationLimit => return Err(PipelineError::SolverLimit("branch-and-bound node limit".into())),
        s => return Err(PipelineError::Validation(format!("solver returned {s:?}"))),
    }
    let matching: Vec<(SimplexId, SimplexId)> = inst
        .var_dict
        .iter()
        .zip(&sol.values)
        .filter(|(v, &z)| !v.is_loop() && z > 0.5)
        .map(|(v, _)| (v.sigma, v.tau))
        .collect();

    let (raw_field, field) = match model {
        ModelKind::OneToplex => (None, extract_model2(&k, &sol.values).map_err(PipelineError::stage("extract"))?),
        ModelKind::General => {
            let raw = extract_model1(&k, &sol.values).map_err(PipelineError::stage("extract"))?;
            let fixed = repair_convexity(&k, &raw);
            (Some(raw), fixed)
        }
    };
    let validation = validate(&k, &field);
    if !validation.is_valid() {
        return Err(PipelineError::Validation(format!("{:?}", validation.violations[0])));
    }

    let dim = assignment.dim();
    let critical = criticality(&k, &field).map_err(PipelineError::stage("homology"))?;
    let morse = morse_decomposition(&k, &field, &critical, dim);
    let critical_parts = critical
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(p, _)| {
            let idx = relative_homology(&k, field.part(p)).map_err(PipelineError::stage("homology"))?;
            let label = mvfield::homology::classify(&idx, dim);
            Ok(CriticalPart { part: p, size: field.part(p).len(), conley_index: idx, label })
        })
        .collect::<Result<Vec<_>>>()?;
    let morse_sets: Vec<MorseSummary> = morse
        .morse_sets
        .iter()
        .map(|m| MorseSummary {
            parts: m.parts.clone(),
            n_simplices: m.simplices.len(),
            exit_set_size: m.exit_set.len(),
            conley_index: m.conley_index.clone(),
            label: m.label,
        })
        .collect();
    let largest = morse.sccs.iter().enumerate().max_by_key(|(i, c)| (c.len(), std::cmp::Reverse(*i))).map(|(_, c)| c);
    let (largest_scc_fraction, largest_scc_exit_set) = match largest {
        Some(c) => {
            let union: BTreeSet<SimplexId> = c.iter().flat_map(|&p| field.part(p).iter().copied()).collect();
            (c.len() as f64 / field.len() as f64, k.mouth(&union).len())
        }
        None => (0.0, 0),
    };

    let report = RunReport {
        system: cfg.system.clone(),
        model: model.number(),
        seed: cfg.seed,
        dim,
        counts: Counts {
            samples: samples.len(),
            clusters: clusters.len(),
            simplices: k.len(),
            toplexes: k.toplexes().len(),
            variables: dims.m,
            eq_rows: dims.n_eq,
            le_rows: dims.n_le,
            multivectors: field.len(),
            critical_multivectors: critical_parts.len(),
            raw_parts: raw_field.as_ref().map(MultivectorField::len),
        },
        objective: sol.objective,
        solver_status: sol.status,
        lp_integral: sol.stats.root_integral,
        solver: sol.stats.clone(),
        valid: true,
        critical_parts,
        nontrivial_sccs: morse.morse_sets.iter().filter(|m| m.parts.len() >= 2).count(),
        morse_sets,
        largest_scc_fraction,
        largest_scc_exit_set,
        morse_poset: morse.poset.clone(),
        closed_form: dims.closed_form,
    };
    let out = RunOutput {
        config: cfg.clone(),
        report,
        samples,
        clusters,
        complex: k,
        assignment,
        model,
        matching,
        raw_field,
        field,
        morse,
    };
    if let Some(dir) = &cfg.output {
        write_artifacts(&out, dir)?;
    }
    Ok(out)
}

/// Writes `report.json`, `field.json`, `complex.json`, `clusters.csv`,
/// `condensation.dot` and,
/// for planar runs with rendering on, one SVG per view.
pub fn write_artifacts(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(PipelineError::io(dir))?;
    let mut files = vec![
        ("report.json", out.report.to_json()),
        ("field.json", out.field.to_json(&out.complex, out.model)),
        ("complex.json", out.complex.to_json()),
        ("clusters.csv", write_dataset_csv(&out.clusters)),
        ("condensation.dot", condensation_dot(&build_digraph(&out.complex, &out.field), &out.morse)),
    ];
    if out.config.render && out.assignment.dim() == 2 {
        for view in View::ALL {
            let svg = render_svg(&out.complex, &out.assignment, &out.field, &out.matching, &out.morse, view)
                .map_err(PipelineError::stage("render"))?;
            files.push((view.file_name(), svg));
        }
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(PipelineError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}
