//! Lie bialgebras, Manin triples and coboundary data.

use nalgebra::{DMatrix, DVector};

use crate::defect::Defect;
use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::lie::{LieAlgebra, StructureConstants};
use crate::settings::Tolerances;

/// Cocommutator `δ(T_k) = Σ f[i][j][k] T_i ⊗ T_j`.
///
/// The same array read as structure constants gives the dual bracket
/// `[T̃^i, T̃^j] = f^{ij}_k T̃^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocommutator(StructureConstants);

impl Cocommutator {
    pub fn new(constants: StructureConstants) -> Self {
        Self(constants)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(StructureConstants::zeros(dim))
    }

    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        StructureConstants::from_entries(dim, entries).map(Self)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0.get(i, j, k)
    }

    /// The dual bracket as structure constants.
    pub fn as_constants(&self) -> &StructureConstants {
        &self.0
    }

    /// Jacobiator of the dual bracket.
    pub fn dual_jacobiator(&self) -> Defect {
        self.0.jacobiator()
    }

    /// `δ(T_k)` as an n×n matrix of `T_i ⊗ T_j` components.
    pub fn component_matrix(&self, k: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j, k))
    }
}

fn check_same_dim(c: &StructureConstants, f: &Cocommutator) -> Result<()> {
    if c.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

/// Max-norm over basis pairs `(a, b)` and components `(i, j)` of
/// `ad_a^(2) δ(T_b) - ad_b^(2) δ(T_a) - δ([T_a, T_b])`.
pub fn cocycle_defect(c: &StructureConstants, f: &Cocommutator) -> Result<Defect> {
    check_same_dim(c, f)?;
    let n = c.dim();
    let ad2 = |a: usize, b: usize, i: usize, j: usize| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            s += c.get(a, p, i) * f.get(p, j, b) + c.get(a, p, j) * f.get(i, p, b);
        }
        s
    };
    let mut worst = Defect::zero();
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = ad2(a, b, i, j) - ad2(b, a, i, j);
                    for m in 0..n {
                        v -= c.get(a, b, m) * f.get(i, j, m);
                    }
                    worst.observe(v, || vec![a, b, i, j]);
                }
            }
        }
    }
    Ok(worst)
}

/// Structure constants of `g ⊕ g̃` in the basis `(T_0..T_{n-1}, T̃^0..T̃^{n-1})`.
///
/// Mixed brackets follow `[T_i, T̃^j] = f^{jk}_i T_k - c_ik^j T̃^k`. No
/// Jacobi check is made here.
pub fn assemble_double_constants(
    c: &StructureConstants,
    f: &Cocommutator,
) -> Result<StructureConstants> {
    check_same_dim(c, f)?;
    let n = c.dim();
    let big = 2 * n;
    let mut raw = vec![0.0; big * big * big];
    let idx = |a: usize, b: usize, k: usize| (a * big + b) * big + k;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                raw[idx(i, j, k)] = c.get(i, j, k);
                raw[idx(n + i, n + j, n + k)] = f.get(i, j, k);
                let to_g = f.get(j, k, i);
                let to_dual = -c.get(i, k, j);
                raw[idx(i, n + j, k)] = to_g;
                raw[idx(n + j, i, k)] = -to_g;
                raw[idx(i, n + j, n + k)] = to_dual;
                raw[idx(n + j, i, n + k)] = -to_dual;
            }
        }
    }
    StructureConstants::from_dense(big, raw, 0.0)
}

/// The Drinfel'd double algebra of a Lie bialgebra.
#[derive(Debug, Clone)]
pub struct DoubleAlgebra {
    base: LieAlgebra,
    dual: LieAlgebra,
    total: LieAlgebra,
    cocommutator: Cocommutator,
    bform: DMatrix<f64>,
    proj_g: DMatrix<f64>,
    proj_gdual: DMatrix<f64>,
    tolerances: Tolerances,
}

/// Assemble and validate the double of `(c, f)`.
///
/// Fails with [`Error::DoubleJacobiFailure`] when the assembled algebra
/// violates Jacobi, which happens exactly when `(c, f)` is not a bialgebra.
pub fn build_double(
    c: &StructureConstants,
    f: &Cocommutator,
    tolerances: &Tolerances,
) -> Result<DoubleAlgebra> {
    let total = assemble_double_constants(c, f)?;
    let scale = total.max_abs();
    let jac = total.jacobiator();
    if jac.value > tolerances.scaled(scale * scale) {
        let triple = [jac.witness[0], jac.witness[1], jac.witness[2]];
        return Err(Error::DoubleJacobiFailure {
            defect: jac.value,
            triple,
        });
    }
    let n = c.dim();
    let big = 2 * n;
    let bform = DMatrix::from_fn(big, big, |a, b| {
        if (a < n && b == a + n) || (a >= n && b + n == a) {
            1.0
        } else {
            0.0
        }
    });
    let proj_g = DMatrix::from_fn(big, big, |a, b| if a == b && a < n { 1.0 } else { 0.0 });
    let proj_gdual = DMatrix::from_fn(big, big, |a, b| if a == b && a >= n { 1.0 } else { 0.0 });
    Ok(DoubleAlgebra {
        base: LieAlgebra::new(c.clone()),
        dual: LieAlgebra::new(f.as_constants().clone()),
        total: LieAlgebra::new(total),
        cocommutator: f.clone(),
        bform,
        proj_g,
        proj_gdual,
        tolerances: *tolerances,
    })
}

impl DoubleAlgebra {
    /// Dimension `n` of each half.
    pub fn half_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &LieAlgebra {
        &self.base
    }

    pub fn dual(&self) -> &LieAlgebra {
        &self.dual
    }

    pub fn total(&self) -> &LieAlgebra {
        &self.total
    }

    pub fn cocommutator(&self) -> &Cocommutator {
        &self.cocommutator
    }

    pub fn base_constants(&self) -> &StructureConstants {
        self.base.constants()
    }

    /// `⟨·,·⟩_d` in the canonical basis: `[[0, I], [I, 0]]`.
    pub fn bform(&self) -> &DMatrix<f64> {
        &self.bform
    }

    pub fn proj_g(&self) -> &DMatrix<f64> {
        &self.proj_g
    }

    pub fn proj_gdual(&self) -> &DMatrix<f64> {
        &self.proj_gdual
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    /// Max over basis triples of `|⟨[Z,X],Y⟩_d + ⟨X,[Z,Y]⟩_d|`.
    pub fn ad_invariance_defect(&self) -> Defect {
        let big = self.total.dim();
        let mut worst = Defect::zero();
        for z in 0..big {
            let ad = self.total.ad(z);
            let m = ad.transpose() * &self.bform + &self.bform * ad;
            for x in 0..big {
                for y in 0..big {
                    worst.observe(m[(x, y)], || vec![z, x, y]);
                }
            }
        }
        worst
    }

    /// Max-norm defect of isotropy, the canonical pairing and the projector identities.
    pub fn form_defect(&self) -> Defect {
        let n = self.half_dim();
        let big = 2 * n;
        let mut worst = Defect::zero();
        for a in 0..big {
            for b in 0..big {
                let expected = if (a < n && b == a + n) || (a >= n && b + n == a) {
                    1.0
                } else {
                    0.0
                };
                worst.observe(self.bform[(a, b)] - expected, || vec![a, b]);
            }
        }
        let id = DMatrix::<f64>::identity(big, big);
        let sum = &self.proj_g + &self.proj_gdual - id;
        let p2 = &self.proj_g * &self.proj_g - &self.proj_g;
        let q2 = &self.proj_gdual * &self.proj_gdual - &self.proj_gdual;
        for m in [sum, p2, q2] {
            for a in 0..big {
                for b in 0..big {
                    worst.observe(m[(a, b)], || vec![a, b]);
                }
            }
        }
        worst
    }

    /// The double with the roles of `g` and `g̃` interchanged.
    pub fn role_swapped(&self) -> Result<DoubleAlgebra> {
        let c = self.dual.constants().clone();
        let f = Cocommutator::new(self.base.constants().clone());
        build_double(&c, &f, &self.tolerances)
    }
}

/// Permutation matrix exchanging the two halves of the double basis.
pub fn swap_map(n: usize) -> DMatrix<f64> {
    let big = 2 * n;
    DMatrix::from_fn(big, big, |a, b| {
        if (a < n && b == a + n) || (a >= n && a == b + n) {
            1.0
        } else {
            0.0
        }
    })
}

/// Result of the coboundary analysis.
#[derive(Debug, Clone)]
pub enum CoboundarySolution {
    Coboundary(CoboundaryData),
    NoSolution { residual: f64 },
}

/// An r-matrix with `δ = Δ(r)` and the data derived from it.
#[derive(Debug, Clone)]
pub struct CoboundaryData {
    /// `r ∈ g ⊗ g`, least-squares minimum-norm solution.
    pub r: DMatrix<f64>,
    /// Skew part `a = (r - rᵀ)/2`.
    pub a_skew: DMatrix<f64>,
    /// Symmetric part; reported, not used downstream.
    pub r_sym: DMatrix<f64>,
    /// `R = a∘K`, matrix `R^i_j = K_jl a^{li}`; only for semisimple bases.
    pub big_r: Option<DMatrix<f64>>,
    /// Relative residual `|Δ(r) - δ| / |δ|`.
    pub residual: f64,
}

/// `Δ(r)(T_k)^{ij} = c_kl^i r^{lj} + c_kl^j r^{il}` as a dense `(i, j, k)` array.
pub fn coboundary_of(c: &StructureConstants, r: &DMatrix<f64>) -> Vec<f64> {
    let n = c.dim();
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += c.get(k, l, i) * r[(l, j)] + c.get(k, l, j) * r[(i, l)];
                }
                out[(i * n + j) * n + k] = s;
            }
        }
    }
    out
}

/// Solve `Δ(r) = δ` for `r` by SVD least squares.
pub fn solve_r_matrix(
    c: &StructureConstants,
    f: &Cocommutator,
    tolerances: &Tolerances,
) -> Result<CoboundarySolution> {
    check_same_dim(c, f)?;
    let n = c.dim();
    let rows = n * n * n;
    let cols = n * n;
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = DVector::<f64>::zeros(rows);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let row = (i * n + j) * n + k;
                rhs[row] = f.get(i, j, k);
                for l in 0..n {
                    // c_kl^i r^{lj}
                    design[(row, l * n + j)] += c.get(k, l, i);
                    // c_kl^j r^{il}
                    design[(row, i * n + l)] += c.get(k, l, j);
                }
            }
        }
    }
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(CoboundarySolution::Coboundary(coboundary_data(
            c,
            DMatrix::zeros(n, n),
            0.0,
            tolerances,
        )));
    }
    let svd = design.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = max_sv * 1e-12;
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::InvalidInput(format!("least-squares solve failed: {e}")))?;
    let residual = (&design * &sol - &rhs).norm() / rhs_norm;
    if residual > tolerances.coboundary_residual {
        return Ok(CoboundarySolution::NoSolution { residual });
    }
    let r = DMatrix::from_fn(n, n, |l, m| sol[l * n + m]);
    Ok(CoboundarySolution::Coboundary(coboundary_data(
        c, r, residual, tolerances,
    )))
}

/// Package an r-matrix into [`CoboundaryData`] without solving.
pub fn coboundary_data(
    c: &StructureConstants,
    r: DMatrix<f64>,
    residual: f64,
    tolerances: &Tolerances,
) -> CoboundaryData {
    let a_skew = (&r - r.transpose()) * 0.5;
    let r_sym = (&r + r.transpose()) * 0.5;
    let algebra = LieAlgebra::new(c.clone());
    let big_r = if algebra.is_semisimple(tolerances.semisimple_det) {
        Some(a_skew.transpose() * algebra.killing_form())
    } else {
        None
    };
    CoboundaryData {
        r,
        a_skew,
        r_sym,
        big_r,
        residual,
    }
}

/// `[x, y]_R = [R x, y] + [x, R y]`.
///
/// This is the bracket for which `K⁻¹[K x, K y]_{g*} = [x, y]_R` holds when
/// `δ = Δ(r)`.
pub fn r_bracket(
    algebra: &LieAlgebra,
    big_r: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> DVector<f64> {
    algebra.bracket_vec(&(big_r * x), y) + algebra.bracket_vec(x, &(big_r * y))
}

/// Max over basis pairs of `|[x,y]_R - K⁻¹[K x, K y]_{g*}|`, for a candidate bracket.
pub fn r_bracket_isomorphism_defect(
    double: &DoubleAlgebra,
    big_r: &DMatrix<f64>,
    bracket: impl Fn(&LieAlgebra, &DMatrix<f64>, &DVector<f64>, &DVector<f64>) -> DVector<f64>,
) -> Result<Defect> {
    let base = double.base();
    let n = base.dim();
    let k = base.killing_form();
    let kinv = k.clone().try_inverse().ok_or(Error::NotSemisimple {
        det: base.killing_determinant(),
    })?;
    let mut worst = Defect::zero();
    for a in 0..n {
        for b in 0..n {
            let x = DVector::from_fn(n, |i, _| if i == a { 1.0 } else { 0.0 });
            let y = DVector::from_fn(n, |i, _| if i == b { 1.0 } else { 0.0 });
            let lhs = bracket(base, big_r, &x, &y);
            let rhs = &kinv * double.dual().bracket_vec(&(k * &x), &(k * &y));
            for i in 0..n {
                worst.observe(lhs[i] - rhs[i], || vec![a, b, i]);
            }
        }
    }
    Ok(worst)
}

/// Sklyanin components `Π(g) = Ad_g(a) - a` for `g` in the base group.
///
/// `Ad_g` acts on both tensor slots through the `g`-block of the double adjoint.
pub fn sklyanin_components(point: &GroupPoint, a_skew: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a_skew.nrows();
    let block = point.adjoint().view((0, 0), (n, n)).into_owned();
    &block * a_skew * block.transpose() - a_skew
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_c() -> StructureConstants {
        StructureConstants::from_entries(2, &[(0, 1, 1, 1.0)]).unwrap()
    }

    fn example_f(beta: f64) -> Cocommutator {
        Cocommutator::from_entries(2, &[(0, 1, 1, beta)]).unwrap()
    }

    #[test]
    fn zero_cocommutator_is_a_cocycle() {
        assert_eq!(cocycle_defect(&example_c(), &Cocommutator::zeros(2)).unwrap().value, 0.0);
    }

    #[test]
    fn example_bialgebra_is_a_cocycle() {
        for beta in [-2.0, 0.5, 1.0] {
            assert!(cocycle_defect(&example_c(), &example_f(beta)).unwrap().value < 1e-15);
        }
    }

    #[test]
    fn every_cocommutator_on_the_two_dim_algebra_is_a_cocycle() {
        // ad_{T_0} acts on Λ²g by its trace 1, so δ(T_0) never enters the cocycle sum.
        let f = Cocommutator::from_entries(2, &[(0, 1, 1, 1.0), (0, 1, 0, 0.1)]).unwrap();
        assert_eq!(cocycle_defect(&example_c(), &f).unwrap().value, 0.0);
        assert!(build_double(&example_c(), &f, &Tolerances::default()).is_ok());
    }

    #[test]
    fn so3_with_constant_cocommutator_is_not_a_bialgebra() {
        let so3 =
            StructureConstants::from_entries(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)])
                .unwrap();
        let f = Cocommutator::from_entries(3, &[(0, 1, 2, 0.1)]).unwrap();
        // the dual bracket alone is Lie
        assert_eq!(f.dual_jacobiator().value, 0.0);
        let d = cocycle_defect(&so3, &f).unwrap();
        assert!((d.value - 0.1).abs() < 1e-15, "{d:?}");
        let total = assemble_double_constants(&so3, &f).unwrap();
        assert!((total.jacobiator().value - 0.1).abs() < 1e-15);
        assert!(matches!(
            build_double(&so3, &f, &Tolerances::default()),
            Err(Error::DoubleJacobiFailure { .. })
        ));
    }

    #[test]
    fn cocycle_rejects_dimension_mismatch() {
        assert!(matches!(
            cocycle_defect(&example_c(), &Cocommutator::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn example_double_mixed_brackets() {
        let beta = 1.0;
        let d = build_double(&example_c(), &example_f(beta), &Tolerances::default()).unwrap();
        let t = d.total().constants();
        // [T_0, T̃^1] = f^{1k}_0 T_k - c_0k^1 T̃^k = -T̃^1
        for k in 0..4 {
            let expected = if k == 3 { -1.0 } else { 0.0 };
            assert_eq!(t.get(0, 3, k), expected);
        }
        // [T_1, T̃^1] = f^{1k}_1 T_k - c_1k^1 T̃^k = -β T_0 + T̃^0
        assert_eq!(t.get(1, 3, 0), -beta);
        assert_eq!(t.get(1, 3, 2), 1.0);
        assert_eq!(t.jacobiator().value, 0.0);
        assert_eq!(d.ad_invariance_defect().value, 0.0);
        assert_eq!(d.form_defect().value, 0.0);
    }

    #[test]
    fn zero_cocommutator_gives_semidirect_double() {
        let d = build_double(&example_c(), &Cocommutator::zeros(2), &Tolerances::default()).unwrap();
        let t = d.total().constants();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    // no T-components in mixed brackets; dual half abelian
                    assert_eq!(t.get(i, 2 + j, k), 0.0);
                    assert_eq!(t.get(i, 2 + j, 2 + k), -example_c().get(i, k, j));
                    assert_eq!(t.get(2 + i, 2 + j, 2 + k), 0.0);
                }
            }
        }
    }

    #[test]
    fn abelian_base_with_lie_dual_double_is_jacobi() {
        let so3 = StructureConstants::from_entries(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)])
            .unwrap();
        let f = Cocommutator::new(so3);
        let total = assemble_double_constants(&StructureConstants::zeros(3), &f).unwrap();
        assert_eq!(total.jacobiator().value, 0.0);
    }

    #[test]
    fn role_swap_is_form_preserving_isomorphism() {
        let d = build_double(&example_c(), &example_f(0.7), &Tolerances::default()).unwrap();
        let s = d.role_swapped().unwrap();
        let n = 2;
        let big = 4;
        let perm = |a: usize| if a < n { a + n } else { a - n };
        for a in 0..big {
            for b in 0..big {
                for k in 0..big {
                    assert_eq!(
                        s.total().constants().get(perm(a), perm(b), perm(k)),
                        d.total().constants().get(a, b, k)
                    );
                }
            }
        }
        let sw = swap_map(n);
        assert_eq!(sw.transpose() * d.bform() * &sw, s.bform().clone());
        assert_eq!(s.form_defect().value, 0.0);
    }

    #[test]
    fn example_is_not_coboundary() {
        for beta in [-2.0, 0.5, 1.0] {
            match solve_r_matrix(&example_c(), &example_f(beta), &Tolerances::default()).unwrap() {
                CoboundarySolution::NoSolution { residual } => assert!(residual > 0.5),
                CoboundarySolution::Coboundary(_) => panic!("unexpected r-matrix"),
            }
        }
    }

    #[test]
    fn zero_cocommutator_admits_zero_r() {
        match solve_r_matrix(&example_c(), &Cocommutator::zeros(2), &Tolerances::default()).unwrap() {
            CoboundarySolution::Coboundary(cb) => {
                assert_eq!(cb.residual, 0.0);
                assert_eq!(cb.r, DMatrix::zeros(2, 2));
            }
            CoboundarySolution::NoSolution { .. } => panic!("zero δ is coboundary"),
        }
    }
}
