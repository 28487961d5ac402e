use serde::{Deserialize, Serialize};
use std::ops::Add;

/// Absolute tolerance (meters / obstruction units) under which two cost
/// vectors count as the same vector.
pub const COST_EPS: f64 = 1e-9;

/// Criterion class of a cost component: performance (`P`) or user comfort
/// (`C`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriterionClass {
    #[serde(rename = "P")]
    Performance,
    #[serde(rename = "C")]
    Comfort,
}

/// Edge or path cost `(w1, w2, w3)`: summed obstruction, turn count and
/// traveled distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostVector {
    pub obstruction: f64,
    pub turns: u32,
    pub distance: f64,
}

impl CostVector {
    pub const ZERO: CostVector = CostVector {
        obstruction: 0.0,
        turns: 0,
        distance: 0.0,
    };

    /// Class tags for `(obstruction, turns, distance)`.
    pub const CLASSES: [CriterionClass; 3] = [
        CriterionClass::Performance,
        CriterionClass::Comfort,
        CriterionClass::Comfort,
    ];

    pub const fn new(obstruction: f64, turns: u32, distance: f64) -> Self {
        Self {
            obstruction,
            turns,
            distance,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.obstruction, self.turns as f64, self.distance]
    }

    /// Equality with exact turn counts and `eps` slack on the real parts.
    pub fn approx_eq(&self, other: &CostVector, eps: f64) -> bool {
        self.turns == other.turns
            && (self.obstruction - other.obstruction).abs() <= eps
            && (self.distance - other.distance).abs() <= eps
    }

    /// `self <= other` componentwise, with `eps` slack on the real parts.
    /// This is "dominates or equals" under tolerance.
    pub fn covers(&self, other: &CostVector, eps: f64) -> bool {
        self.turns <= other.turns
            && self.obstruction <= other.obstruction + eps
            && self.distance <= other.distance + eps
    }
}

impl Add for CostVector {
    type Output = CostVector;
    fn add(self, rhs: CostVector) -> CostVector {
        CostVector {
            obstruction: self.obstruction + rhs.obstruction,
            turns: self.turns + rhs.turns,
            distance: self.distance + rhs.distance,
        }
    }
}

impl std::iter::Sum for CostVector {
    fn sum<I: Iterator<Item = CostVector>>(iter: I) -> Self {
        iter.fold(CostVector::ZERO, Add::add)
    }
}

impl std::fmt::Display for CostVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({:.4}, {}, {:.4})",
            self.obstruction, self.turns, self.distance
        )
    }
}
