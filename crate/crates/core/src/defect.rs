use serde::{Deserialize, Serialize};

/// Max-norm defect of an identity together with the worst offending index tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub value: f64,
    pub witness: Vec<usize>,
}

impl Defect {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            witness: Vec::new(),
        }
    }

    /// Keep the larger of the two; ties keep `self` so index order decides.
    pub fn max(self, other: Defect) -> Defect {
        if other.value > self.value || (self.value.is_nan() && !other.value.is_nan()) {
            other
        } else {
            self
        }
    }

    /// Prepend an index to the witness tuple.
    pub fn with_prefix(mut self, index: usize) -> Self {
        self.witness.insert(0, index);
        self
    }

    pub(crate) fn observe(&mut self, value: f64, witness: impl FnOnce() -> Vec<usize>) {
        let v = value.abs();
        if v > self.value || v.is_nan() {
            self.value = v;
            self.witness = witness();
        }
    }
}

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub check_name: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Index tuple of the worst case.
    pub witness: Vec<usize>,
    /// Sample point of the worst case, when the check is point-based.
    pub point: Option<Vec<f64>>,
    /// Error text when the check could not be evaluated.
    pub note: Option<String>,
}

impl DefectReport {
    pub fn new(name: impl Into<String>, defect: &Defect, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            max_defect: defect.value,
            tolerance,
            pass: defect.value <= tolerance,
            witness: defect.witness.clone(),
            point: None,
            note: None,
        }
    }

    /// Report for checks where exceeding the threshold is the expected outcome.
    pub fn expect_above(name: impl Into<String>, defect: &Defect, threshold: f64) -> Self {
        Self {
            check_name: name.into(),
            max_defect: defect.value,
            tolerance: threshold,
            pass: defect.value > threshold,
            witness: defect.witness.clone(),
            point: None,
            note: None,
        }
    }

    pub fn with_point(mut self, point: Vec<f64>) -> Self {
        self.point = Some(point);
        self
    }

    /// A failed report for a check that raised an error.
    pub fn errored(name: impl Into<String>, tolerance: f64, error: &crate::error::Error) -> Self {
        Self {
            check_name: name.into(),
            max_defect: f64::INFINITY,
            tolerance,
            pass: false,
            witness: Vec::new(),
            point: match error {
                crate::error::Error::ChartBoundary { coords, .. } => Some(coords.clone()),
                _ => None,
            },
            note: Some(error.to_string()),
        }
    }
}
