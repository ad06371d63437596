//! Field generators and refinement studies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    solver::integrate_group_field, solver::pure_gauge_dual_field, Direction,
    EdgeField, Grid, LatticeFields, Worldsheet,
};
use crate::bialgebra::DoubleAlgebra;
use crate::error::Result;
use crate::lattice::residual::eom_residual_intrinsic;

/// Random trigonometric modes `Σ c sin(π(p σ¹ + q σ²) + φ)` per component.
#[derive(Debug, Clone)]
struct SmoothFunction {
    modes: Vec<(f64, f64, f64, f64)>,
}

impl SmoothFunction {
    fn random(rng: &mut ChaCha8Rng, amplitude: f64) -> Self {
        let modes = (0..3)
            .map(|_| {
                (
                    amplitude * rng.random_range(-1.0..=1.0),
                    rng.random_range(0.0..=1.5),
                    rng.random_range(0.0..=1.5),
                    rng.random_range(0.0..=std::f64::consts::TAU),
                )
            })
            .collect();
        Self { modes }
    }

    fn eval(&self, s1: f64, s2: f64) -> f64 {
        self.modes
            .iter()
            .map(|&(c, p, q, phi)| c * (std::f64::consts::PI * (p * s1 + q * s2) + phi).sin())
            .sum()
    }
}

/// Smooth coordinates for the dual gauge field `h̃`, zero at the origin.
pub fn smooth_dual_profile(ws: &Worldsheet, dim: usize, amplitude: f64, seed: u64) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<SmoothFunction> = (0..dim).map(|_| SmoothFunction::random(&mut rng, amplitude)).collect();
    Grid::from_fn(ws.nx(), ws.ny(), dim, |i, j| {
        let (s1, s2) = ws.sigma(i, j);
        fs.iter().map(|f| f.eval(s1, s2) - f.eval(0.0, 0.0)).collect()
    })
}

/// Smooth `X` and one-forms sampled from smooth densities (midpoint rule).
///
/// Both `a` and `a_coord` are filled with independent smooth fields; callers
/// that need them related overwrite one of them.
pub fn smooth_fields(ws: &Worldsheet, dim: usize, amplitude: f64, seed: u64) -> LatticeFields {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<SmoothFunction> = (0..dim).map(|_| SmoothFunction::random(&mut rng, amplitude)).collect();
    let one_form = |rng: &mut ChaCha8Rng| {
        let fx: Vec<SmoothFunction> = (0..dim).map(|_| SmoothFunction::random(rng, amplitude)).collect();
        let fy: Vec<SmoothFunction> = (0..dim).map(|_| SmoothFunction::random(rng, amplitude)).collect();
        EdgeField::from_fn(ws, dim, |dir, i, j| {
            let (s1, s2) = ws.sigma(i, j);
            match dir {
                Direction::X => fx.iter().map(|f| f.eval(s1 + 0.5 * ws.hx(), s2) * ws.hx()).collect(),
                Direction::Y => fy.iter().map(|f| f.eval(s1, s2 + 0.5 * ws.hy()) * ws.hy()).collect(),
            }
        })
    };
    let a = one_form(&mut rng);
    let a_coord = one_form(&mut rng);
    let x = Grid::from_fn(ws.nx(), ws.ny(), dim, |i, j| {
        let (s1, s2) = ws.sigma(i, j);
        xs.iter().map(|f| f.eval(s1, s2)).collect()
    });
    LatticeFields {
        x,
        a,
        a_coord: Some(a_coord),
    }
}

/// Independent uniform values in `[-scale, scale]` on every node and edge.
pub fn random_fields(ws: &Worldsheet, dim: usize, scale: f64, seed: u64) -> LatticeFields {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_: usize, _: usize| (0..dim).map(|_| rng.random_range(-scale..=scale)).collect();
    let x = Grid::from_fn(ws.nx(), ws.ny(), dim, &mut draw);
    let a = EdgeField::from_fn(ws, dim, |_, i, j| draw(i, j));
    let a_coord = EdgeField::from_fn(ws, dim, |_, i, j| draw(i, j));
    LatticeFields {
        x,
        a,
        a_coord: Some(a_coord),
    }
}

/// Observed order `log(e_coarse / e_fine) / log(h_coarse / h_fine)`.
pub fn convergence_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Parameters of the flat-then-integrate refinement study.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudySettings {
    /// Node counts per direction, coarse to fine.
    pub sizes: Vec<usize>,
    /// Amplitude of the dual gauge profile.
    pub amplitude: f64,
    pub seed: u64,
    /// Chart coordinates of `X` at node `(0, 0)`.
    pub x0: Option<Vec<f64>>,
}

impl Default for StudySettings {
    fn default() -> Self {
        Self {
            sizes: vec![17, 33, 65],
            amplitude: 0.5,
            seed: 11,
            x0: None,
        }
    }
}

/// Errors on one grid of the study.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceRow {
    pub nodes: usize,
    pub h: f64,
    /// Max per-plaquette `|dÃ + ½[Ã∧Ã]|` of the pure-gauge field.
    pub flatness: f64,
    /// Max per-length first-equation defect on y-edges not used by the integrator.
    pub cross: f64,
    /// Max per-edge first-equation residual with midpoint evaluation, all edges.
    pub eq1: f64,
}

/// A refinement study with successive observed orders.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub flatness_orders: Vec<f64>,
    pub cross_orders: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn min_flatness_order(&self) -> f64 {
        self.flatness_orders.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn min_cross_order(&self) -> f64 {
        self.cross_orders.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// The solution on one square grid: pure-gauge `Ã`, integrated `X`.
pub fn solve_on_grid(
    double: &DoubleAlgebra,
    nodes: usize,
    settings: &StudySettings,
) -> Result<(Worldsheet, LatticeFields, super::SolverOutput)> {
    let n = double.half_dim();
    let ws = Worldsheet::new(nodes, nodes)?;
    let profile = smooth_dual_profile(&ws, n, settings.amplitude, settings.seed);
    let a = pure_gauge_dual_field(double, &ws, &profile)?;
    let x0 = settings.x0.clone().unwrap_or_else(|| vec![0.1; n]);
    let out = integrate_group_field(double, &ws, &a, &x0)?;
    let fields = LatticeFields {
        x: out.x.clone(),
        a,
        a_coord: None,
    };
    Ok((ws, fields, out))
}

/// Run the study over `settings.sizes`.
pub fn run_convergence_study(double: &DoubleAlgebra, settings: &StudySettings) -> Result<ConvergenceStudy> {
    let mut rows = Vec::new();
    for &nodes in &settings.sizes {
        let (ws, fields, out) = solve_on_grid(double, nodes, settings)?;
        let res = eom_residual_intrinsic(double, &ws, &fields)?;
        rows.push(ConvergenceRow {
            nodes,
            h: ws.hx(),
            flatness: res.max_eq2(),
            cross: out.max_cross,
            eq1: res.max_eq1(),
        });
    }
    let orders = |f: &dyn Fn(&ConvergenceRow) -> f64| -> Vec<f64> {
        rows.windows(2)
            .map(|w| convergence_order(f(&w[0]), f(&w[1]), w[0].h, w[1].h))
            .collect()
    };
    let flatness_orders = orders(&|r| r.flatness);
    let cross_orders = orders(&|r| r.cross);
    Ok(ConvergenceStudy {
        rows,
        flatness_orders,
        cross_orders,
    })
}

