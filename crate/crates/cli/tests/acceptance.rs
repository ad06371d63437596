//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DVector;
use plsigma::bialgebra::{sklyanin_components, solve_r_matrix, CoboundarySolution};
use plsigma::bivector::non_poisson_fixture;
use plsigma::catalog;
use plsigma::checks::{
    invariant_derivative_defect, jacobiator_field, multiplicativity_defect, sample_points, scaled_step,
    sklyanin_identity_defect, tangent_bialgebra,
};
use plsigma::group::{decompose, frame_matrix, pi_matrix};
use plsigma::lattice::*;
use plsigma::linalg::max_abs;
use plsigma::{GroupBivector, GroupPoint, LieAlgebra, StructureConstants, Subgroup, Tolerances};

const BETAS: [f64; 3] = [-2.0, 0.5, 1.0];
const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let tol = Tolerances::default();
    let (mut worst_pi, mut worst_pipeline, mut worst_e) = (0.0f64, 0.0f64, 0.0f64);
    for beta in BETAS {
        let d = catalog::example_beta(beta).double(&tol).unwrap();
        for y in sample_points(SEED, 2, 100, 1.0) {
            let g = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
            let expected = beta * y[0].exp() * y[1];
            let pi = pi_matrix(&d, &g).unwrap();
            let blocks = decompose(g.adjoint_inv(), tol.tol).unwrap();
            let by_blocks = -(&blocks.b * blocks.a.clone().try_inverse().unwrap());
            let rel = |v: f64| (v - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
            worst_pi = worst_pi.max(rel(pi[(0, 1)])).max(rel(-pi[(1, 0)]));
            worst_pipeline = worst_pipeline.max(rel(by_blocks[(0, 1)]));
            let e = frame_matrix(&d, &g).unwrap().e;
            let want = [1.0, 0.0, 0.0, y[0].exp()];
            for (k, w) in want.iter().enumerate() {
                worst_e = worst_e.max((e[(k / 2, k % 2)] - w).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_pi <= 1e-10 && worst_pipeline <= 1e-10 && worst_e <= 1e-12 && secs < 10.0,
        format!("Π rel {worst_pi:.2e}, blocks rel {worst_pipeline:.2e}, e abs {worst_e:.2e}, {secs:.2}s"),
    )
}

/// The example's equations transcribed directly, with `B = A_coord`:
/// `ΔX⁰ + β X¹ B₁`, `ΔX¹ - β X¹ B₀`, `dB₀`, `dB₁ + β B₀∧B₁`, and in the
/// right-invariant frame `T + Π A` with `T = diag(1, e^{X⁰}) ΔX`,
/// `dA₀`, `dA₁ + β A₀∧A₁`.
fn criterion_2() -> Outcome {
    let tol = Tolerances::default();
    let (mut coord_err, mut inv_err) = (0.0f64, 0.0f64);
    for (s, beta) in BETAS.iter().enumerate() {
        let beta = *beta;
        let d = catalog::example_beta(beta).double(&tol).unwrap();
        let ws = Worldsheet::new(12, 10).unwrap();
        let f = random_fields(&ws, 2, 1.0, 100 + s as u64);
        let coord = eom_residual_coordinate(&GroupBivector::new(d.clone()), &ws, &f, &tol).unwrap();
        let inv = eom_residual_invariant(&d, &ws, &f).unwrap();
        let intr = eom_residual_intrinsic(&d, &ws, &f).unwrap();
        let b = f.a_coord.as_ref().unwrap();
        for (dir, di, dj) in [(Direction::X, 1, 0), (Direction::Y, 0, 1)] {
            let g = b.grid(dir);
            for j in 0..g.rows() {
                for i in 0..g.cols() {
                    let (p, q) = (f.x.get(i, j), f.x.get(i + di, j + dj));
                    let dx = [q[0] - p[0], q[1] - p[1]];
                    let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
                    let bb = g.get(i, j);
                    let want = [dx[0] + beta * m[1] * bb[1], dx[1] - beta * m[1] * bb[0]];
                    let got = coord.eq1.grid(dir).get(i, j);
                    coord_err = coord_err.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
                    let a = f.a.grid(dir).get(i, j);
                    let pi = beta * m[0].exp() * m[1];
                    let want = [dx[0] + pi * a[1], m[0].exp() * dx[1] - pi * a[0]];
                    let got = inv.eq1.grid(dir).get(i, j);
                    inv_err = inv_err.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
                }
            }
        }
        let plaquette = |w: &EdgeField, i: usize, j: usize| {
            let (x0, x1) = (w.x.get(i, j), w.x.get(i, j + 1));
            let (y0, y1) = (w.y.get(i, j), w.y.get(i + 1, j));
            let d: Vec<f64> = (0..2).map(|k| x0[k] + y1[k] - x1[k] - y0[k]).collect();
            let ax: Vec<f64> = (0..2).map(|k| (x0[k] + x1[k]) / 2.0).collect();
            let ay: Vec<f64> = (0..2).map(|k| (y0[k] + y1[k]) / 2.0).collect();
            [d[0], d[1] + beta * (ax[0] * ay[1] - ay[0] * ax[1])]
        };
        for j in 0..ws.ny() - 1 {
            for i in 0..ws.nx() - 1 {
                let want = plaquette(b, i, j);
                let got = coord.eq2.get(i, j);
                coord_err = coord_err.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
                let want = plaquette(&f.a, i, j);
                let got = intr.eq2.get(i, j);
                inv_err = inv_err.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
            }
        }
    }
    outcome(
        coord_err <= 1e-12 && inv_err <= 1e-12,
        format!("coordinate form {coord_err:.2e}, right-invariant form {inv_err:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for e in catalog::entries() {
        let p = GroupBivector::new(e.double(&tol).unwrap());
        for y in sample_points(SEED, e.dimension, 100, 1.0) {
            let est = jacobiator_field(&p, &y, scaled_step(&tol, &y)).unwrap();
            worst = worst.max(est.extrapolated.value);
        }
    }
    let fixture = non_poisson_fixture();
    let at = [0.5, 0.5, 0.5];
    let bad = jacobiator_field(&fixture, &at, scaled_step(&tol, &at)).unwrap().extrapolated.value;
    outcome(
        worst <= 1e-6 && bad > 1e-2,
        format!("catalog max {worst:.2e}, non-Poisson fixture {bad:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for e in catalog::entries() {
        let d = e.double(&tol).unwrap();
        let gs = sample_points(SEED, e.dimension, 100, 1.0);
        let hs = sample_points(SEED + 1, e.dimension, 100, 1.0);
        for (y, z) in gs.iter().zip(&hs) {
            let p = GroupPoint::new(&d, Subgroup::Base, y).unwrap();
            let q = GroupPoint::new(&d, Subgroup::Base, z).unwrap();
            let n = d.half_dim();
            let a_g = p.adjoint().view((0, 0), (n, n)).into_owned();
            let scale = 1.0
                + max_abs(&pi_matrix(&d, &p).unwrap())
                + max_abs(&a_g).powi(2) * max_abs(&pi_matrix(&d, &q).unwrap());
            worst = worst.max(multiplicativity_defect(&d, &p, &q).unwrap().value / scale);
        }
    }
    let sl2 = catalog::sl2_standard();
    let d = sl2.double(&tol).unwrap();
    let r = sl2.r().unwrap();
    let a_skew = (&r - r.transpose()) * 0.5;
    let mut skl = 0.0f64;
    for (y, z) in sample_points(SEED, 3, 100, 1.0).iter().zip(&sample_points(SEED + 1, 3, 100, 1.0)) {
        let p = GroupPoint::new(&d, Subgroup::Base, y).unwrap();
        let q = GroupPoint::new(&d, Subgroup::Base, z).unwrap();
        skl = skl.max(sklyanin_identity_defect(&d, &p, &q, &a_skew).value);
    }
    outcome(
        worst <= 1e-10 && skl <= 1e-12,
        format!("multiplicativity max {worst:.2e}·scale, Sklyanin identity {skl:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let (mut law, mut round_trip) = (0.0f64, 0.0f64);
    for e in catalog::entries() {
        let d = e.double(&tol).unwrap();
        for y in sample_points(SEED, e.dimension, 20, 1.0) {
            let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
            for k in 0..d.half_dim() {
                law = law.max(max_abs(&invariant_derivative_defect(&d, &p, k, tol.fd_step).unwrap()));
            }
        }
        let t = tangent_bialgebra(&d, tol.fd_step).unwrap();
        for (a, b) in t.iter().zip(d.cocommutator().as_constants().as_slice()) {
            round_trip = round_trip.max((a - b).abs());
        }
    }
    outcome(
        law <= 1e-8 && round_trip <= 1e-8,
        format!("derivative law {law:.2e}, tangent cocommutator {round_trip:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let sl2 = catalog::sl2_standard();
    let d = sl2.double(&tol).unwrap();
    let cb = match solve_r_matrix(&sl2.constants().unwrap(), &sl2.cocommutator().unwrap(), &tol).unwrap() {
        CoboundarySolution::Coboundary(cb) => cb,
        CoboundarySolution::NoSolution { residual } => {
            return outcome(false, format!("sl2_standard not recognized as coboundary ({residual:e})"))
        }
    };
    let mut skl = 0.0f64;
    for y in sample_points(SEED, 3, 100, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let diff = pi_matrix(&d, &p).unwrap() - sklyanin_components(&p, &cb.a_skew);
        skl = skl.max(max_abs(&diff));
    }
    let k_inv = d.base().killing_form().clone().try_inverse().unwrap();
    let mut chain = 0.0f64;
    for seed in 0..3 {
        let ws = Worldsheet::new(10, 9).unwrap();
        let f = random_fields(&ws, 3, 1.0, 200 + seed);
        let cob = eom_residual_coboundary(&d, &cb, &ws, &f).unwrap();
        let intr = eom_residual_intrinsic(&d, &ws, &f).unwrap();
        let scale = 1.0 + intr.max_eq1().max(intr.max_eq2());
        let mapped = intr.eq2.map(|v| (&k_inv * DVector::from_column_slice(v)).as_slice().to_vec());
        chain = chain
            .max(cob.eq1.sub(&intr.eq1).max_abs() / scale)
            .max(cob.eq2.sub(&mapped).max_abs() / scale);
    }
    outcome(
        skl <= 1e-9 && chain <= 1e-10,
        format!("Π vs Ad_g(a) - a {skl:.2e}, coboundary vs intrinsic {chain:.2e}·scale"),
    )
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let so3 = LieAlgebra::new(
        StructureConstants::from_entries(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]).unwrap(),
    );
    let k_inv = so3.killing_form().clone().try_inverse().unwrap();
    let mut tilde = 0.0f64;
    for seed in 0..3 {
        let ws = Worldsheet::new(11, 11).unwrap();
        let f = random_fields(&ws, 3, 1.0, 300 + seed);
        let lin = eom_residual_linear(&so3, &ws, &f).unwrap();
        let t = linear_tilde_residual(&so3, &ws, &f, &tol).unwrap();
        let mapped = lin.eq1.map(|v| (&k_inv * DVector::from_column_slice(v)).as_slice().to_vec());
        tilde = tilde.max(t.sub(&mapped).max_abs());
    }
    let sl2 = LieAlgebra::new(catalog::sl2_standard().constants().unwrap());
    let mut killing = 0.0f64;
    for alg in [&so3, &sl2] {
        killing = killing
            .max(alg.killing_invariance_defect().value)
            .max(alg.killing_inverse_coadjoint_defect(tol.semisimple_det).unwrap().value);
    }
    outcome(
        tilde <= 1e-12 && killing <= 1e-12,
        format!("so(3) X̃-form {tilde:.2e}, Killing identity {killing:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let tol = Tolerances::default();
    let d = catalog::example_beta(1.0).double(&tol).unwrap();
    let study = run_convergence_study(&d, &StudySettings::default()).unwrap();
    let (flat, cross) = (study.min_flatness_order(), study.min_cross_order());

    let mut trivial = 0.0f64;
    let ws = Worldsheet::new(8, 8).unwrap();
    for e in catalog::entries() {
        let n = e.dimension;
        let d = e.double(&tol).unwrap();
        let x = Grid::from_fn(8, 8, n, |_, _| vec![0.3; n]);
        let f = LatticeFields {
            x,
            a: ws.edge_field(n),
            a_coord: Some(ws.edge_field(n)),
        };
        for r in [
            eom_residual_coordinate(&GroupBivector::new(d.clone()), &ws, &f, &tol).unwrap(),
            eom_residual_invariant(&d, &ws, &f).unwrap(),
            eom_residual_intrinsic(&d, &ws, &f).unwrap(),
            eom_residual_linear(d.base(), &ws, &f).unwrap(),
        ] {
            trivial = trivial.max(r.max_eq1()).max(r.max_eq2());
        }
    }
    let f1 = random_fields(&ws, 2, 1.0, 1);
    let mut f2 = random_fields(&ws, 2, 1.0, 2);
    f2.a = f1.a.clone();
    let same = eom_residual_intrinsic(&d, &ws, &f1).unwrap().eq2 == eom_residual_intrinsic(&d, &ws, &f2).unwrap().eq2;
    outcome(
        flat >= 1.8 && cross >= 0.9 && trivial == 0.0 && same,
        format!(
            "flatness order {flat:.3}, cross order {cross:.3}, trivial residual {trivial:e}, X-independent Eq2 {same}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let tol = Tolerances::default();
    let d = catalog::example_beta(1.0).double(&tol).unwrap();
    let settings = StudySettings::default();
    let finest = *settings.sizes.last().unwrap();
    let (ws, mut fields, _) = solve_on_grid(&d, finest, &settings).unwrap();
    fields.a_coord = Some(coordinate_coframe(&d, &ws, &fields).unwrap());
    let p = GroupBivector::new(d);
    let sweep = [0.1, 0.05, 0.025, 0.0125];
    let (mut sol_min, mut off_worst) = (f64::INFINITY, 0.0f64);
    let mut off_slopes = Vec::new();
    for k in 1..=5u64 {
        let b = smooth_fields(&ws, 2, 1.0, settings.seed + k).a;
        let (_, s) = eps_tilde_sweep(&p, &ws, &fields, &b, &sweep).unwrap();
        sol_min = sol_min.min(s);
        let other = smooth_fields(&ws, 2, 0.5, settings.seed + 10 + k);
        let (_, s) = eps_tilde_sweep(&p, &ws, &other, &b, &sweep).unwrap();
        off_worst = off_worst.max((s - 1.0).abs());
        off_slopes.push(s);
    }
    outcome(
        sol_min >= 1.8 && off_worst <= 0.1,
        format!("solution slope min {sol_min:.3} ({finest} nodes), non-solution slopes {off_slopes:.3?}"),
    )
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_plsigma");
    let run = |args: &[&str]| -> (Vec<u8>, Vec<(String, Vec<u8>)>) {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(bin).args(args).arg("--output-dir").arg(dir.path()).output().unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        (out.stdout, files)
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for args in [
        &["verify", "catalog:sl2_standard", "--seed", "3"][..],
        &["simulate", "catalog:example_beta", "--seed", "3", "--grid", "17", "--refine", "2"][..],
    ] {
        let (a, fa) = run(args);
        let (b, fb) = run(args);
        let same = !a.is_empty() && a == b && fa == fb;
        ok &= same;
        detail.push(format!("{} {} bytes + {} files identical: {same}", args[0], a.len(), fa.len()));
    }
    outcome(ok, detail.join(", "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("golden example Π and frame", criterion_1),
        ("golden equations of motion", criterion_2),
        ("Poisson property", criterion_3),
        ("multiplicativity", criterion_4),
        ("invariant derivative law", criterion_5),
        ("coboundary cross-check", criterion_6),
        ("linear model", criterion_7),
        ("simulation convergence", criterion_8),
        ("variation probe", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name:<28} {verdict}  {}", k + 1, result.detail);
        failed += usize::from(!result.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
