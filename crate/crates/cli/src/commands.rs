//! The four subcommands as library functions.

use plsigma::catalog::{self, CatalogEntry};
use plsigma::checks::{sample_points, verify_bialgebra};
use plsigma::group::{coordinate_bivector, frame_matrix, pi_matrix};
use plsigma::lattice::{
    coordinate_coframe, eom_residual_intrinsic, eps_tilde_sweep, run_convergence_study, smooth_fields,
    solve_on_grid, Direction, EdgeField, Grid, LatticeFields, StudySettings, Worldsheet,
};
use plsigma::{build_double, Defect, DefectReport, DoubleAlgebra, GroupBivector, GroupPoint, Subgroup};

use crate::config::ModelConfig;
use crate::report::{fmt_f64, ProbeSweep, Report};
use crate::CliError;

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub grid: Option<usize>,
    pub refine: Option<usize>,
}

impl Overrides {
    /// Apply and re-validate. `--grid`/`--refine` rebuild the size list as
    /// successive halvings of the spacing.
    pub fn apply(&self, mut config: ModelConfig) -> Result<ModelConfig, CliError> {
        if let Some(t) = self.tolerance {
            config.tolerances.tol = t;
        }
        if let Some(s) = self.seed {
            config.sampling.seed = s;
            config.lattice.seed = s;
        }
        if let Some(p) = self.points {
            config.sampling.points = p;
        }
        if self.grid.is_some() || self.refine.is_some() {
            let base = self.grid.unwrap_or(config.lattice.sizes[0]);
            let refine = self.refine.unwrap_or(config.lattice.sizes.len().saturating_sub(1));
            if base < 3 {
                return Err(CliError::Input(format!("--grid must be at least 3, got {base}")));
            }
            let mut sizes = vec![base];
            for _ in 0..refine {
                let last = *sizes.last().expect("non-empty");
                sizes.push(
                    last.checked_mul(2)
                        .and_then(|v| v.checked_sub(1))
                        .ok_or_else(|| CliError::Input("--refine overflows the grid size".into()))?,
                );
            }
            config.lattice.sizes = sizes;
        }
        config.validate()?;
        Ok(config)
    }
}

fn double_of(config: &ModelConfig) -> Result<DoubleAlgebra, CliError> {
    build_double(&config.constants()?, &config.cocommutator()?, &config.tolerances)
        .map_err(|e| CliError::Failure(format!("double construction: {e}")))
}

/// The full check battery.
pub fn cmd_verify(config: &ModelConfig) -> Result<Report, CliError> {
    let c = config.constants()?;
    let f = config.cocommutator()?;
    let r = config.r();
    let reports = verify_bialgebra(&c, &f, r.as_ref(), &config.tolerances, &config.sampling);
    Ok(Report::new("verify", config, config.sampling.seed, reports))
}

/// Where `construct` tabulates.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    /// Seeded uniform samples in the sampling box.
    Random(usize),
    /// A tensor grid with this many nodes per axis over the sampling box.
    Grid(usize),
    Explicit(Vec<Vec<f64>>),
}

fn points_of(config: &ModelConfig, spec: &PointSpec) -> Result<Vec<Vec<f64>>, CliError> {
    let n = config.dimension;
    let w = config.sampling.half_width;
    match spec {
        PointSpec::Random(count) => Ok(sample_points(config.sampling.seed, n, *count, w)),
        PointSpec::Grid(m) => {
            if *m < 2 {
                return Err(CliError::Input("grid needs at least 2 nodes per axis".into()));
            }
            let total = m.checked_pow(n as u32).filter(|t| *t <= 1_000_000).ok_or_else(|| {
                CliError::Input(format!("grid of {m}^{n} points is too large"))
            })?;
            let axis = |k: usize| -w + 2.0 * w * k as f64 / (*m - 1) as f64;
            Ok((0..total)
                .map(|idx| {
                    let mut rest = idx;
                    (0..n)
                        .map(|_| {
                            let k = rest % m;
                            rest /= m;
                            axis(k)
                        })
                        .collect()
                })
                .collect())
        }
        PointSpec::Explicit(points) => {
            if let Some(p) = points.iter().find(|p| p.len() != n || p.iter().any(|v| !v.is_finite())) {
                return Err(CliError::Input(format!("point {p:?} needs {n} finite coordinates")));
            }
            Ok(points.clone())
        }
    }
}

/// CSV of `Π^{ij}`, chart `P^{ij}` and frame `e^i_j` at each point, long format.
pub fn cmd_construct(config: &ModelConfig, spec: &PointSpec) -> Result<String, CliError> {
    let double = double_of(config)?;
    let n = config.dimension;
    let points = points_of(config, spec)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["point".to_string()];
    header.extend((0..n).map(|k| format!("y{k}")));
    header.extend(["quantity", "i", "j", "value"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for (idx, y) in points.iter().enumerate() {
        let g = GroupPoint::new(&double, Subgroup::Base, y).map_err(runtime)?;
        let tables = [
            ("pi", pi_matrix(&double, &g).map_err(runtime)?),
            ("coordinate_bivector", coordinate_bivector(&double, &g).map_err(runtime)?),
            ("frame", frame_matrix(&double, &g).map_err(runtime)?.e),
        ];
        for (name, m) in &tables {
            for i in 0..n {
                for j in 0..n {
                    let mut row = vec![idx.to_string()];
                    row.extend(y.iter().map(|v| fmt_f64(*v)));
                    row.extend([name.to_string(), i.to_string(), j.to_string(), fmt_f64(m[(i, j)])]);
                    w.write_record(&row).map_err(csv_error)?;
                }
            }
        }
    }
    finish_csv(w)
}

/// Probe sweep values, fixed in the tool so runs are comparable.
pub const EPS_TILDE: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Refinement study, probe sweep and snapshots of the finest grid.
pub struct Simulation {
    pub report: Report,
    /// `(file name, CSV contents)`.
    pub snapshots: Vec<(String, String)>,
}

pub fn cmd_simulate(config: &ModelConfig) -> Result<Simulation, CliError> {
    let double = double_of(config)?;
    let settings: &StudySettings = &config.lattice;
    let n = config.dimension;
    let study = run_convergence_study(&double, settings).map_err(runtime)?;

    let finest = *settings.sizes.last().expect("validated");
    let (ws, mut fields, out) = solve_on_grid(&double, finest, settings).map_err(runtime)?;
    fields.a_coord = Some(coordinate_coframe(&double, &ws, &fields).map_err(runtime)?);
    let bivector = GroupBivector::new(double.clone());
    let b = smooth_fields(&ws, n, 1.0, settings.seed.wrapping_add(1)).a;
    let (solution, solution_slope) =
        eps_tilde_sweep(&bivector, &ws, &fields, &b, &EPS_TILDE).map_err(runtime)?;
    let other = smooth_fields(&ws, n, 0.5, settings.seed.wrapping_add(2));
    let (non_solution, non_solution_slope) =
        eps_tilde_sweep(&bivector, &ws, &other, &b, &EPS_TILDE).map_err(runtime)?;

    let reports = vec![
        order_report("lattice.flatness_order", &study.flatness_orders, study.rows.last().map(|r| r.flatness), 1.8),
        order_report("lattice.cross_order", &study.cross_orders, study.rows.last().map(|r| r.cross), 0.9),
    ];
    let mut report = Report::new("simulate", config, settings.seed, reports);
    report.convergence = Some(study.clone());
    report.probe = Some(ProbeSweep {
        nodes: finest,
        eps_tilde: EPS_TILDE.to_vec(),
        solution,
        solution_slope,
        non_solution,
        non_solution_slope,
    });

    let residuals = eom_residual_intrinsic(&double, &ws, &fields).map_err(runtime)?;
    let mut conv = csv::Writer::from_writer(Vec::new());
    conv.write_record(["nodes", "h", "flatness", "cross", "eq1"]).map_err(csv_error)?;
    for r in &study.rows {
        conv.write_record([r.nodes.to_string(), fmt_f64(r.h), fmt_f64(r.flatness), fmt_f64(r.cross), fmt_f64(r.eq1)])
            .map_err(csv_error)?;
    }
    let snapshots = vec![
        ("convergence.csv".to_string(), finish_csv(conv)?),
        ("nodes.csv".to_string(), node_csv(&ws, &fields)?),
        ("edges.csv".to_string(), edge_csv(&fields.a, "a")?),
        ("cross.csv".to_string(), grid_csv(&out.cross, "cross")?),
        ("residual_eq1.csv".to_string(), edge_csv(&residuals.eq1, "eq1")?),
        ("residual_eq2.csv".to_string(), grid_csv(&residuals.eq2, "eq2")?),
    ];
    Ok(Simulation { report, snapshots })
}

/// Below this the finest-grid error is round-off and the order is meaningless.
pub const EXACT_RESIDUAL: f64 = 1e-12;

fn order_report(name: &str, orders: &[f64], finest: Option<f64>, threshold: f64) -> DefectReport {
    let min = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    if finest.is_some_and(|e| e <= EXACT_RESIDUAL) {
        let mut r = DefectReport::new(name, &Defect { value: 0.0, witness: vec![] }, threshold);
        r.note = Some(format!("finest-grid residual at round-off level; order {min} not meaningful"));
        return r;
    }
    let worst = orders.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1));
    let defect = Defect {
        value: worst.map_or(f64::NAN, |w| w.1),
        witness: worst.map(|w| vec![w.0]).unwrap_or_default(),
    };
    DefectReport::expect_above(name, &defect, threshold)
}

fn node_csv(ws: &Worldsheet, fields: &LatticeFields) -> Result<String, CliError> {
    let n = fields.x.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["i", "j", "s1", "s2"].map(String::from).to_vec();
    header.extend((0..n).map(|k| format!("x{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for j in 0..ws.ny() {
        for i in 0..ws.nx() {
            let (s1, s2) = ws.sigma(i, j);
            let mut row = vec![i.to_string(), j.to_string(), fmt_f64(s1), fmt_f64(s2)];
            row.extend(fields.x.get(i, j).iter().map(|v| fmt_f64(*v)));
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    finish_csv(w)
}

fn edge_csv(field: &EdgeField, prefix: &str) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["dir", "i", "j"].map(String::from).to_vec();
    header.extend((0..field.dim()).map(|k| format!("{prefix}{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for (label, dir) in [("x", Direction::X), ("y", Direction::Y)] {
        let g = field.grid(dir);
        for j in 0..g.rows() {
            for i in 0..g.cols() {
                let mut row = vec![label.to_string(), i.to_string(), j.to_string()];
                row.extend(g.get(i, j).iter().map(|v| fmt_f64(*v)));
                w.write_record(&row).map_err(csv_error)?;
            }
        }
    }
    finish_csv(w)
}

fn grid_csv(g: &Grid, prefix: &str) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["i", "j"].map(String::from).to_vec();
    header.extend((0..g.dim()).map(|k| format!("{prefix}{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for j in 0..g.rows() {
        for i in 0..g.cols() {
            let mut row = vec![i.to_string(), j.to_string()];
            row.extend(g.get(i, j).iter().map(|v| fmt_f64(*v)));
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    finish_csv(w)
}

/// `catalog list`: one line per entry, name and dimension.
pub fn catalog_list() -> String {
    let mut out = String::new();
    for e in catalog::entries().iter().chain(catalog::invalid_fixtures().iter()) {
        let first = e.doc.split(". ").next().unwrap_or("");
        out.push_str(&format!("{}\t{}\t{}\n", e.name, e.dimension, first.trim_end_matches('.')));
    }
    out
}

pub fn catalog_entry(name: &str) -> Result<CatalogEntry, CliError> {
    catalog::lookup(name).ok_or_else(|| CliError::Input(format!("unknown catalog entry `{name}`")))
}

fn runtime(e: plsigma::Error) -> CliError {
    CliError::Failure(e.to_string())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Failure(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Failure(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))
}
