//! Built-in bialgebra fixtures with closed-form checkpoints.

use nalgebra::DMatrix;

use crate::bialgebra::{build_double, Cocommutator, DoubleAlgebra};
use crate::error::Result;
use crate::group::{coordinate_bivector, frame_matrix, pi_matrix, GroupPoint, Subgroup};
use crate::lie::StructureConstants;
use crate::settings::Tolerances;

/// Which computed quantity a checkpoint pins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Right-invariant components `Π^{ij}`.
    Pi,
    /// Chart components `P^{ij}`.
    CoordinateBivector,
    /// Frame matrix entry `e^i_j`.
    Frame,
}

/// A closed-form value at a chart point.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Checkpoint {
    pub quantity: Quantity,
    pub point: Vec<f64>,
    pub i: usize,
    pub j: usize,
    pub value: f64,
    /// The closed form, as text.
    pub formula: &'static str,
}

impl Checkpoint {
    /// Recompute the pinned quantity at `point`.
    pub fn evaluate(&self, double: &DoubleAlgebra) -> Result<f64> {
        let g = GroupPoint::new(double, Subgroup::Base, &self.point)?;
        let m = match self.quantity {
            Quantity::Pi => pi_matrix(double, &g)?,
            Quantity::CoordinateBivector => coordinate_bivector(double, &g)?,
            Quantity::Frame => frame_matrix(double, &g)?.e,
        };
        Ok(m[(self.i, self.j)])
    }
}

/// A named bialgebra with its documentation and checkpoints.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub doc: String,
    pub dimension: usize,
    pub bracket: Vec<(usize, usize, usize, f64)>,
    pub cocommutator: Vec<(usize, usize, usize, f64)>,
    pub r_matrix: Option<Vec<(usize, usize, f64)>>,
    pub checkpoints: Vec<Checkpoint>,
}

impl CatalogEntry {
    pub fn constants(&self) -> Result<StructureConstants> {
        StructureConstants::from_entries(self.dimension, &self.bracket)
    }

    pub fn cocommutator(&self) -> Result<Cocommutator> {
        Cocommutator::from_entries(self.dimension, &self.cocommutator)
    }

    /// Dense `r`, if the entry carries one.
    pub fn r(&self) -> Option<DMatrix<f64>> {
        self.r_matrix.as_ref().map(|entries| {
            let mut r = DMatrix::zeros(self.dimension, self.dimension);
            for &(i, j, v) in entries {
                r[(i, j)] = v;
            }
            r
        })
    }

    pub fn double(&self, tolerances: &Tolerances) -> Result<DoubleAlgebra> {
        build_double(&self.constants()?, &self.cocommutator()?, tolerances)
    }
}

const SAMPLE_POINTS_2D: [[f64; 2]; 4] = [[0.0, 0.0], [0.3, 0.7], [-0.5, 0.2], [1.0, -1.0]];

/// `[T_0, T_1] = T_1`, `δ(T_1) = β (T_0⊗T_1 - T_1⊗T_0)`.
pub fn example_beta(beta: f64) -> CatalogEntry {
    let mut checkpoints = Vec::new();
    for p in SAMPLE_POINTS_2D {
        let pi = beta * p[0].exp() * p[1];
        checkpoints.push(Checkpoint {
            quantity: Quantity::Pi,
            point: p.to_vec(),
            i: 0,
            j: 1,
            value: pi,
            formula: "beta * exp(y0) * y1",
        });
        checkpoints.push(Checkpoint {
            quantity: Quantity::Pi,
            point: p.to_vec(),
            i: 1,
            j: 0,
            value: -pi,
            formula: "-beta * exp(y0) * y1",
        });
        checkpoints.push(Checkpoint {
            quantity: Quantity::Frame,
            point: p.to_vec(),
            i: 0,
            j: 0,
            value: 1.0,
            formula: "1",
        });
        checkpoints.push(Checkpoint {
            quantity: Quantity::Frame,
            point: p.to_vec(),
            i: 1,
            j: 1,
            value: p[0].exp(),
            formula: "exp(y0)",
        });
        checkpoints.push(Checkpoint {
            quantity: Quantity::Frame,
            point: p.to_vec(),
            i: 0,
            j: 1,
            value: 0.0,
            formula: "0",
        });
        checkpoints.push(Checkpoint {
            quantity: Quantity::CoordinateBivector,
            point: p.to_vec(),
            i: 0,
            j: 1,
            value: beta * p[1],
            formula: "beta * y1",
        });
    }
    CatalogEntry {
        name: "example_beta".into(),
        doc: format!(
            "Two-dimensional non-abelian algebra [T0,T1] = T1 with cocommutator \
             delta(T1) = beta (T0 x T1 - T1 x T0), beta = {beta}. Not coboundary. \
             Pi^01(y) = beta exp(y0) y1 in the chart exp(y0 T0) exp(y1 T1)."
        ),
        dimension: 2,
        bracket: vec![(0, 1, 1, 1.0)],
        cocommutator: vec![(0, 1, 1, beta)],
        r_matrix: None,
        checkpoints,
    }
}

/// `[T_0, T_1] = T_1` with zero cocommutator; `Π ≡ 0`.
pub fn abelian_dual() -> CatalogEntry {
    let checkpoints = SAMPLE_POINTS_2D
        .iter()
        .map(|p| Checkpoint {
            quantity: Quantity::Pi,
            point: p.to_vec(),
            i: 0,
            j: 1,
            value: 0.0,
            formula: "0",
        })
        .collect();
    CatalogEntry {
        name: "abelian_dual".into(),
        doc: "Algebra [T0,T1] = T1 with zero cocommutator. The dual half of the double \
              is an abelian ideal and the Poisson-Lie bivector vanishes."
            .into(),
        dimension: 2,
        bracket: vec![(0, 1, 1, 1.0)],
        cocommutator: vec![],
        r_matrix: Some(vec![]),
        checkpoints,
    }
}

/// Abelian `R^3` with dual bracket so(3); `Π^{ij}(y) = ε_{ijk} y^k`.
pub fn linear_so3() -> CatalogEntry {
    let mut checkpoints = Vec::new();
    for p in [[0.3, -0.2, 0.5], [1.0, 0.5, -1.0]] {
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            checkpoints.push(Checkpoint {
                quantity: Quantity::Pi,
                point: p.to_vec(),
                i,
                j,
                value: p[k],
                formula: "eps_ijk * y_k",
            });
        }
        checkpoints.push(Checkpoint {
            quantity: Quantity::Frame,
            point: p.to_vec(),
            i: 2,
            j: 2,
            value: 1.0,
            formula: "1",
        });
    }
    CatalogEntry {
        name: "linear_so3".into(),
        doc: "Abelian group R^3 whose dual is so(3): delta(T_k) = eps_ijk T_i x T_j. \
              The bivector is the linear (Lie-Poisson) structure Pi^ij(y) = eps_ijk y_k."
            .into(),
        dimension: 3,
        bracket: vec![],
        cocommutator: vec![(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
        r_matrix: None,
        checkpoints,
    }
}

/// sl(2,R) in the basis `(H, E, F)` with `r = ½ (E⊗F - F⊗E)`.
///
/// The stored cocommutator is `Δ(r)`: `δ(H) = 0`, `δ(E) = ½(E⊗H - H⊗E)`,
/// `δ(F) = ½(F⊗H - H⊗F)`.
pub fn sl2_standard() -> CatalogEntry {
    let mut checkpoints = Vec::new();
    for t in [0.4, -0.8] {
        // along exp(t E): Ad(a) - a = ½ t (E⊗H - H⊗E)
        checkpoints.push(Checkpoint {
            quantity: Quantity::Pi,
            point: vec![0.0, t, 0.0],
            i: 1,
            j: 0,
            value: 0.5 * t,
            formula: "y1 / 2",
        });
        // exp(t H) fixes E∧F
        checkpoints.push(Checkpoint {
            quantity: Quantity::Pi,
            point: vec![t, 0.0, 0.0],
            i: 1,
            j: 2,
            value: 0.0,
            formula: "0",
        });
    }
    CatalogEntry {
        name: "sl2_standard".into(),
        doc: "sl(2,R) with [H,E] = 2E, [H,F] = -2F, [E,F] = H and the standard skew \
              r-matrix r = (E x F - F x E)/2. Coboundary, semisimple base."
            .into(),
        dimension: 3,
        bracket: vec![(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)],
        cocommutator: vec![(0, 1, 1, -0.5), (0, 2, 2, -0.5)],
        r_matrix: Some(vec![(1, 2, 0.5), (2, 1, -0.5)]),
        checkpoints,
    }
}

/// The built-in entries, `example_beta` at β = 1.
pub fn entries() -> Vec<CatalogEntry> {
    vec![example_beta(1.0), abelian_dual(), linear_so3(), sl2_standard()]
}

/// Entry by name; `example_beta` accepts an optional `:β` suffix.
pub fn lookup(name: &str) -> Option<CatalogEntry> {
    if let Some(rest) = name.strip_prefix("example_beta") {
        if rest.is_empty() {
            return Some(example_beta(1.0));
        }
        let beta: f64 = rest.strip_prefix(':')?.parse().ok()?;
        return beta.is_finite().then(|| example_beta(beta));
    }
    entries()
        .into_iter()
        .chain(invalid_fixtures())
        .find(|e| e.name == name)
}

/// Inputs that must be rejected.
pub fn invalid_fixtures() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "broken_jacobi".into(),
            doc: "c_01^0 = c_02^1 = 1 in three dimensions; violates Jacobi.".into(),
            dimension: 3,
            bracket: vec![(0, 1, 0, 1.0), (0, 2, 1, 1.0)],
            cocommutator: vec![],
            r_matrix: None,
            checkpoints: vec![],
        },
        CatalogEntry {
            name: "broken_cocycle".into(),
            doc: "so(3) with delta(T2) = 0.1 T0 ^ T1. The dual bracket is Lie but delta \
                  is not a 1-cocycle, so the double violates Jacobi."
                .into(),
            dimension: 3,
            bracket: vec![(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
            cocommutator: vec![(0, 1, 2, 0.1)],
            r_matrix: None,
            checkpoints: vec![],
        },
    ]
}
