//! Closed intervals with exact rational endpoints.

use serde::{Deserialize, Serialize};

use super::rat::{rat_serde, Rat};

/// `[left, right]` with `left <= right`; endpoints are exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedInterval {
    #[serde(with = "rat_serde")]
    pub left: Rat,
    #[serde(with = "rat_serde")]
    pub right: Rat,
}

impl ClosedInterval {
    pub fn new(left: Rat, right: Rat) -> Self {
        assert!(left <= right, "interval endpoints out of order");
        ClosedInterval { left, right }
    }

    pub fn length(&self) -> Rat {
        &self.right - &self.left
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        &self.left <= x && x <= &self.right
    }

    /// Closed-set intersection test: shared endpoints count as meeting.
    pub fn meets(&self, other: &ClosedInterval) -> bool {
        self.left <= other.right && other.left <= self.right
    }

    /// `self ⊆ other`.
    pub fn within(&self, other: &ClosedInterval) -> bool {
        other.left <= self.left && self.right <= other.right
    }

    /// Distance between disjoint intervals (zero if they meet).
    pub fn distance(&self, other: &ClosedInterval) -> Rat {
        use num_traits::Zero;
        if self.meets(other) {
            Rat::zero()
        } else if self.right < other.left {
            &other.left - &self.right
        } else {
            &self.left - &other.right
        }
    }
}
