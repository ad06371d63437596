//! Numerical checks of the Poisson-Lie bivector.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bialgebra::{
    coboundary_of, cocycle_defect, sklyanin_components, Cocommutator, DoubleAlgebra,
};
use crate::bivector::ChartBivector;
use crate::defect::{Defect, DefectReport};
use crate::error::{Error, Result};
use crate::group::{
    automorphism_defect, decompose, form_preservation_defect, frame_matrix, pi_both,
    pi_from_adjoint, GroupBivector, GroupPoint, Subgroup,
};
use crate::lie::{LieAlgebra, StructureConstants};
use crate::linalg::{matrix_exp, max_abs};
use crate::settings::Tolerances;

/// Seeded uniform samples in `[-half_width, half_width]^dim`.
pub fn sample_points(seed: u64, dim: usize, count: usize, half_width: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| rng.random_range(-half_width..=half_width))
                .collect()
        })
        .collect()
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Jacobiator of a chart bivector at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiatorEstimate {
    /// From Richardson-extrapolated derivatives.
    pub extrapolated: Defect,
    /// With plain central differences at `h`.
    pub coarse: f64,
    /// With plain central differences at `h/2`.
    pub fine: f64,
}

/// `∂_l P^{jk}` by central differences, indexed `[l][(j, k)]`.
fn bivector_gradient(p: &dyn ChartBivector, y: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
    let n = p.dim();
    (0..n)
        .map(|l| {
            let mut plus = y.to_vec();
            let mut minus = y.to_vec();
            plus[l] += h;
            minus[l] -= h;
            Ok((p.eval(&plus)? - p.eval(&minus)?) / (2.0 * h))
        })
        .collect()
}

fn cyclic_jacobiator(p: &DMatrix<f64>, grad: &[DMatrix<f64>]) -> Defect {
    let n = p.nrows();
    let mut worst = Defect::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += p[(i, l)] * grad[l][(j, k)]
                        + p[(j, l)] * grad[l][(k, i)]
                        + p[(k, l)] * grad[l][(i, j)];
                }
                worst.observe(s, || vec![i, j, k]);
            }
        }
    }
    worst
}

/// Max over `(i, j, k)` of `|Σ_cyc P^{il} ∂_l P^{jk}|` at `y`, step `h` and `h/2`.
pub fn jacobiator_field(p: &dyn ChartBivector, y: &[f64], h: f64) -> Result<JacobiatorEstimate> {
    let value = p.eval(y)?;
    let coarse = bivector_gradient(p, y, h)?;
    let fine = bivector_gradient(p, y, h / 2.0)?;
    let extrapolated: Vec<DMatrix<f64>> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| c.zip_map(f, richardson))
        .collect();
    Ok(JacobiatorEstimate {
        extrapolated: cyclic_jacobiator(&value, &extrapolated),
        coarse: cyclic_jacobiator(&value, &coarse).value,
        fine: cyclic_jacobiator(&value, &fine).value,
    })
}

/// Step `fd_step · (1 + max|y|)`.
pub fn scaled_step(tolerances: &Tolerances, y: &[f64]) -> f64 {
    let m = y.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    tolerances.fd_step * (1.0 + m)
}

fn g_block(double: &DoubleAlgebra, ad: &DMatrix<f64>) -> DMatrix<f64> {
    let n = double.half_dim();
    ad.view((0, 0), (n, n)).into_owned()
}

/// `|Π(gh) - Π(g) - A_g Π(h) A_gᵀ|` with `Π(gh)` from the product adjoint matrix.
pub fn multiplicativity_defect(
    double: &DoubleAlgebra,
    p: &GroupPoint,
    q: &GroupPoint,
) -> Result<Defect> {
    let pi_g = pi_from_adjoint(double, p.adjoint_inv(), p.coords())?;
    let pi_h = pi_from_adjoint(double, q.adjoint_inv(), q.coords())?;
    let prod_inv = q.adjoint_inv() * p.adjoint_inv();
    let pi_gh = pi_from_adjoint(double, &prod_inv, p.coords())?;
    let a_g = g_block(double, p.adjoint());
    let diff = pi_gh - pi_g - &a_g * pi_h * a_g.transpose();
    Ok(matrix_defect(&diff))
}

/// `|(Ad_{gh}a - a) - (Ad_g a - a) - Ad_g(Ad_h a - a)|` on `g`-blocks.
pub fn sklyanin_identity_defect(
    double: &DoubleAlgebra,
    p: &GroupPoint,
    q: &GroupPoint,
    a_skew: &DMatrix<f64>,
) -> Defect {
    let a_g = g_block(double, p.adjoint());
    let a_h = g_block(double, q.adjoint());
    let a_gh = &a_g * &a_h;
    let skl = |m: &DMatrix<f64>| m * a_skew * m.transpose() - a_skew;
    let diff = skl(&a_gh) - skl(&a_g) - &a_g * skl(&a_h) * a_g.transpose();
    matrix_defect(&diff)
}

fn matrix_defect(m: &DMatrix<f64>) -> Defect {
    let mut worst = Defect::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst.observe(m[(i, j)], || vec![i, j]);
        }
    }
    worst
}

/// Right-hand side of the derivative law `c_kl^i Π^{lj} - c_kl^j Π^{li} + f^{ij}_k`.
pub fn invariant_derivative_rhs(double: &DoubleAlgebra, pi: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let ck = double.base().ad(k);
    let cp = ck * pi;
    &cp - cp.transpose() + double.cocommutator().component_matrix(k)
}

/// `Π` along the right-invariant flow `t ↦ e^{t T_k} g`.
fn flow_pi(double: &DoubleAlgebra, p: &GroupPoint, k: usize, t: f64) -> Result<DMatrix<f64>> {
    let back = matrix_exp(&(double.total().ad(k) * (-t)))?;
    pi_from_adjoint(double, &(p.adjoint_inv() * back), p.coords())
}

/// Richardson-extrapolated `d/dt Π(e^{t T_k} g)` at `t = 0`.
pub fn flow_derivative(
    double: &DoubleAlgebra,
    p: &GroupPoint,
    k: usize,
    h: f64,
) -> Result<DMatrix<f64>> {
    let diff = |s: f64| -> Result<DMatrix<f64>> {
        Ok((flow_pi(double, p, k, s)? - flow_pi(double, p, k, -s)?) / (2.0 * s))
    };
    let coarse = diff(h)?;
    let fine = diff(h / 2.0)?;
    Ok(coarse.zip_map(&fine, richardson))
}

/// Componentwise defect of the right-invariant derivative law at `p`.
pub fn invariant_derivative_defect(
    double: &DoubleAlgebra,
    p: &GroupPoint,
    k: usize,
    h: f64,
) -> Result<DMatrix<f64>> {
    if k >= double.half_dim() {
        return Err(Error::DimensionMismatch {
            expected: double.half_dim(),
            found: k,
        });
    }
    let lhs = flow_derivative(double, p, k, h)?;
    let pi = pi_from_adjoint(double, p.adjoint_inv(), p.coords())?;
    Ok((lhs - invariant_derivative_rhs(double, &pi, k)).abs())
}

/// Estimate `f^{ij}_k` as the flow derivative of `Π^{ij}` at the identity.
///
/// Dense `(i, j, k)` layout.
pub fn tangent_bialgebra(double: &DoubleAlgebra, h: f64) -> Result<Vec<f64>> {
    let n = double.half_dim();
    let e = GroupPoint::identity(double, Subgroup::Base);
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        let d = flow_derivative(double, &e, k, h)?;
        for i in 0..n {
            for j in 0..n {
                out[(i * n + j) * n + k] = d[(i, j)];
            }
        }
    }
    Ok(out)
}

/// How many random points the point-based checks use.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub seed: u64,
    pub points: usize,
    /// Points used by the (more expensive) flow-derivative check.
    pub derivative_points: usize,
    /// Half-width of the coordinate box.
    pub half_width: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            seed: 7,
            points: 100,
            derivative_points: 20,
            half_width: 1.0,
        }
    }
}

/// Fixed thresholds for derivative-based checks.
pub const JACOBIATOR_FIELD_TOL: f64 = 1e-6;
pub const INVARIANT_DERIVATIVE_TOL: f64 = 1e-8;
pub const ROUND_TRIP_TOL: f64 = 1e-8;
pub const SKLYANIN_TOL: f64 = 1e-9;

/// Sample point with its `(defect, scale)` or the error raised there.
type PointOutcome = (Vec<f64>, Result<(Defect, f64)>);

struct Accumulator {
    reports: Vec<DefectReport>,
}

impl Accumulator {
    fn push(&mut self, name: &str, defect: &Defect, tol: f64) {
        self.reports.push(DefectReport::new(name, defect, tol));
    }

    fn push_pointwise(
        &mut self,
        name: &str,
        tol: f64,
        per_point: Vec<PointOutcome>,
    ) {
        // (defect, scale) per point; the threshold is tol·(1+scale) of the worst point
        let mut worst: Option<(Vec<f64>, Defect, f64)> = None;
        let mut ratio_worst = f64::NEG_INFINITY;
        for (y, r) in per_point {
            match r {
                Err(e) => {
                    self.reports.push(DefectReport::errored(name, tol, &e));
                    return;
                }
                Ok((d, scale)) => {
                    let ratio = d.value / (1.0 + scale);
                    if ratio > ratio_worst || d.value.is_nan() {
                        ratio_worst = ratio;
                        worst = Some((y, d, scale));
                    }
                }
            }
        }
        if let Some((y, d, scale)) = worst {
            self.reports
                .push(DefectReport::new(name, &d, tol * (1.0 + scale)).with_point(y));
        }
    }
}

/// Algebraic and group-level identities for a bialgebra, one report per check.
///
/// When the double cannot be built the battery stops after the algebraic checks.
pub fn verify_bialgebra(
    c: &StructureConstants,
    f: &Cocommutator,
    r: Option<&DMatrix<f64>>,
    tolerances: &Tolerances,
    sampling: &Sampling,
) -> Vec<DefectReport> {
    let tol = tolerances.tol;
    let mut acc = Accumulator { reports: vec![] };
    let base = LieAlgebra::new(c.clone());
    let cmax = c.max_abs();
    acc.push("lie.jacobiator", &c.jacobiator(), tolerances.scaled(cmax * cmax));
    acc.push(
        "lie.killing_invariance",
        &base.killing_invariance_defect(),
        tolerances.scaled(max_abs(base.killing_form())),
    );
    let fmax = f.as_constants().max_abs();
    acc.push("dual.jacobiator", &f.dual_jacobiator(), tolerances.scaled(fmax * fmax));
    match cocycle_defect(c, f) {
        Ok(d) => acc.push("bialgebra.cocycle", &d, tolerances.scaled(cmax * fmax)),
        Err(e) => acc.reports.push(DefectReport::errored("bialgebra.cocycle", tol, &e)),
    }
    let double = match crate::bialgebra::build_double(c, f, tolerances) {
        Ok(d) => d,
        Err(e) => {
            acc.reports.push(DefectReport::errored("double.jacobiator", tol, &e));
            return acc.reports;
        }
    };
    let total = double.total().constants();
    let tmax = total.max_abs();
    acc.push("double.jacobiator", &total.jacobiator(), tolerances.scaled(tmax * tmax));
    acc.push("double.ad_invariance", &double.ad_invariance_defect(), tolerances.scaled(tmax));
    acc.push("double.form", &double.form_defect(), 0.0);

    let n = c.dim();
    let pts = sample_points(sampling.seed, n, sampling.points, sampling.half_width);
    let partners = sample_points(
        sampling.seed.wrapping_add(1),
        n,
        sampling.points,
        sampling.half_width,
    );
    let a_skew = r.map(|r| (r - r.transpose()) * 0.5);

    struct PointResult {
        form: Result<(Defect, f64)>,
        automorphism: Result<(Defect, f64)>,
        reassemble: Result<(Defect, f64)>,
        pipelines: Result<(Defect, f64)>,
        antisymmetry: Result<(Defect, f64)>,
        frame_inverse: Result<(Defect, f64)>,
        jacobiator: Result<(Defect, f64)>,
        multiplicativity: Result<(Defect, f64)>,
        sklyanin: Option<Result<(Defect, f64)>>,
        sklyanin_identity: Option<Result<(Defect, f64)>>,
    }

    let bivector = GroupBivector::new(double.clone());
    let results: Vec<PointResult> = pts
        .par_iter()
        .zip(partners.par_iter())
        .map(|(y, z)| {
            let point = GroupPoint::new(&double, Subgroup::Base, y);
            let partner = GroupPoint::new(&double, Subgroup::Base, z);
            let with_point = |g: &dyn Fn(&GroupPoint) -> Result<(Defect, f64)>| match &point {
                Ok(p) => g(p),
                Err(e) => Err(e.clone()),
            };
            let scalar = |v: f64, scale: f64| (Defect { value: v, witness: vec![] }, scale);
            let form = with_point(&|p| {
                Ok(scalar(form_preservation_defect(&double, p.adjoint()), max_abs(p.adjoint())))
            });
            let automorphism = with_point(&|p| {
                let s = max_abs(p.adjoint());
                Ok(scalar(automorphism_defect(&double, p.adjoint()), s * s * tmax))
            });
            let reassemble = with_point(&|p| {
                let dec = decompose(p.adjoint_inv(), tol)?;
                Ok(scalar(
                    max_abs(&(dec.reassemble() - p.adjoint_inv())),
                    max_abs(p.adjoint_inv()),
                ))
            });
            let both = point.as_ref().map_err(Clone::clone).and_then(|p| pi_both(&double, p));
            let pipelines = both
                .as_ref()
                .map(|(b, pr)| (matrix_defect(&(b - pr)), max_abs(b)))
                .map_err(Clone::clone);
            let antisymmetry = both
                .as_ref()
                .map(|(b, _)| (matrix_defect(&(b + b.transpose())), max_abs(b)))
                .map_err(Clone::clone);
            let frame_inverse = with_point(&|p| {
                let fr = frame_matrix(&double, p)?;
                let id = DMatrix::<f64>::identity(n, n);
                Ok((matrix_defect(&(&fr.e * &fr.f - id)), 0.0))
            });
            let jacobiator = crate::checks::jacobiator_field(&bivector, y, scaled_step(tolerances, y))
                .map(|j| (j.extrapolated, 0.0));
            let multiplicativity = match (&point, &partner) {
                (Ok(p), Ok(q)) => multiplicativity_defect(&double, p, q).map(|d| {
                    let scale = both.as_ref().map(|(b, _)| max_abs(b)).unwrap_or(0.0);
                    (d, scale)
                }),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            let sklyanin = a_skew.as_ref().map(|a| {
                both.as_ref()
                    .map_err(Clone::clone)
                    .and_then(|(b, _)| {
                        let p = point.as_ref().map_err(Clone::clone)?;
                        let s = sklyanin_components(p, a);
                        Ok((matrix_defect(&(s - b)), max_abs(b)))
                    })
            });
            let sklyanin_identity = a_skew.as_ref().map(|a| match (&point, &partner) {
                (Ok(p), Ok(q)) => Ok((sklyanin_identity_defect(&double, p, q, a), max_abs(a))),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            });
            PointResult {
                form,
                automorphism,
                reassemble,
                pipelines,
                antisymmetry,
                frame_inverse,
                jacobiator,
                multiplicativity,
                sklyanin,
                sklyanin_identity,
            }
        })
        .collect();

    macro_rules! column {
        ($field:ident) => {
            pts.iter()
                .cloned()
                .zip(results.iter().map(|r| r.$field.clone()))
                .collect::<Vec<_>>()
        };
    }
    acc.push_pointwise("group.form_preservation", tol, column!(form));
    acc.push_pointwise("group.automorphism", tol, column!(automorphism));
    acc.push_pointwise("group.decompose_reassemble", 1e-12, column!(reassemble));
    acc.push_pointwise("group.pi_pipelines", 1e-11, column!(pipelines));
    acc.push_pointwise("group.pi_antisymmetry", 1e-12, column!(antisymmetry));
    acc.push_pointwise("group.frame_inverse", 1e-12, column!(frame_inverse));
    acc.push_pointwise("poisson.jacobiator", JACOBIATOR_FIELD_TOL, column!(jacobiator));
    acc.push_pointwise("poisson.multiplicativity", tol, column!(multiplicativity));

    let deriv_pts: Vec<Vec<f64>> = pts.iter().take(sampling.derivative_points).cloned().collect();
    let deriv: Vec<PointOutcome> = deriv_pts
        .par_iter()
        .map(|y| {
            let r = GroupPoint::new(&double, Subgroup::Base, y).and_then(|p| {
                let mut worst = Defect::zero();
                for k in 0..n {
                    let m = invariant_derivative_defect(&double, &p, k, scaled_step(tolerances, y))?;
                    worst = worst.max(matrix_defect(&m).with_prefix(k));
                }
                Ok((worst, 0.0))
            });
            (y.clone(), r)
        })
        .collect();
    acc.push_pointwise("poisson.invariant_derivative", INVARIANT_DERIVATIVE_TOL, deriv);

    match tangent_bialgebra(&double, tolerances.fd_step) {
        Ok(est) => {
            let mut worst = Defect::zero();
            for (idx, (e, t)) in est.iter().zip(f.as_constants().as_slice()).enumerate() {
                worst.observe(e - t, || vec![idx / (n * n), (idx / n) % n, idx % n]);
            }
            acc.push("poisson.round_trip", &worst, ROUND_TRIP_TOL);
        }
        Err(e) => acc
            .reports
            .push(DefectReport::errored("poisson.round_trip", ROUND_TRIP_TOL, &e)),
    }

    if let Some(r) = r {
        let delta = coboundary_of(c, r);
        let mut worst = Defect::zero();
        for (idx, (e, t)) in delta.iter().zip(f.as_constants().as_slice()).enumerate() {
            worst.observe(e - t, || vec![idx / (n * n), (idx / n) % n, idx % n]);
        }
        acc.push("coboundary.delta_of_r", &worst, 1e-9 * (1.0 + fmax));
        let skl: Vec<_> = pts
            .iter()
            .cloned()
            .zip(results.iter().map(|r| r.sklyanin.clone().expect("r given")))
            .collect();
        acc.push_pointwise("coboundary.sklyanin", SKLYANIN_TOL, skl);
        let ident: Vec<_> = pts
            .iter()
            .cloned()
            .zip(results.iter().map(|r| r.sklyanin_identity.clone().expect("r given")))
            .collect();
        acc.push_pointwise("coboundary.sklyanin_identity", 1e-12, ident);
    }
    acc.reports
}
