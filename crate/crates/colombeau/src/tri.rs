//! Three-valued logic for predicates a finite grid can only semi-decide.

use serde::{Deserialize, Serialize};

/// Outcome of a semi-decidable test: decided true, decided false, or out of
/// reach for the configured grid and exponent budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    True,
    False,
    Undecidable,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    pub fn is_false(self) -> bool {
        self == Tri::False
    }

    pub fn is_undecidable(self) -> bool {
        self == Tri::Undecidable
    }

    /// Kleene conjunction: false dominates, then undecidable.
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::Undecidable, _) | (_, Tri::Undecidable) => Tri::Undecidable,
            _ => Tri::True,
        }
    }

    /// Kleene disjunction: true dominates, then undecidable.
    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::Undecidable, _) | (_, Tri::Undecidable) => Tri::Undecidable,
            _ => Tri::False,
        }
    }

    pub fn negate(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Undecidable => Tri::Undecidable,
        }
    }
}

/// A tri-state decision together with the integer exponent that witnesses it,
/// when one exists (positivity thresholds, exterior distances, and so on).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witnessed {
    pub decision: Tri,
    /// Exponent m such that the tested quantity clears eps^m on the tail.
    pub witness: Option<i32>,
}

impl Witnessed {
    pub fn decided_true(witness: i32) -> Witnessed {
        Witnessed { decision: Tri::True, witness: Some(witness) }
    }

    pub fn decided_false() -> Witnessed {
        Witnessed { decision: Tri::False, witness: None }
    }

    pub fn undecidable() -> Witnessed {
        Witnessed { decision: Tri::Undecidable, witness: None }
    }
}
