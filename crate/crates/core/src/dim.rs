use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// A dimension value: a non-negative integer or the empty-set sentinel −∞.
///
/// `NegInfinity` orders below every finite value so that `max`/`min`
/// aggregation follows the convention dim(∅) = −∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    NegInfinity,
    Finite(usize),
}

impl Dim {
    pub fn finite(self) -> Option<usize> {
        match self {
            Dim::NegInfinity => None,
            Dim::Finite(k) => Some(k),
        }
    }

    pub fn is_empty(self) -> bool {
        self == Dim::NegInfinity
    }

    /// Saturating `total - rank`, used for level-set dimension counts.
    pub fn codim(total: usize, rank: usize) -> Dim {
        Dim::Finite(total.saturating_sub(rank))
    }
}

impl PartialOrd for Dim {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dim {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dim::NegInfinity, Dim::NegInfinity) => Ordering::Equal,
            (Dim::NegInfinity, _) => Ordering::Less,
            (_, Dim::NegInfinity) => Ordering::Greater,
            (Dim::Finite(a), Dim::Finite(b)) => a.cmp(b),
        }
    }
}

impl From<usize> for Dim {
    fn from(k: usize) -> Self {
        Dim::Finite(k)
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::NegInfinity => write!(f, "-inf"),
            Dim::Finite(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dim::NegInfinity => s.serialize_str("-inf"),
            Dim::Finite(k) => s.serialize_u64(*k as u64),
        }
    }
}

/// Maximum of an iterator of dimensions; the empty maximum is −∞.
pub fn max_dim<I: IntoIterator<Item = Dim>>(it: I) -> Dim {
    it.into_iter().max().unwrap_or(Dim::NegInfinity)
}
