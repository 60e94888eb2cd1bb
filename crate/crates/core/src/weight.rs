//! Scalars of the completed max-plus semiring.
//!
//! A [`Weight`] is a finite real, `ε = −∞` or `⊤ = +∞`. The max-plus
//! operations are [`oplus`] (max) and [`otimes`] (+); the min-plus duals are
//! [`oplus_dual`] (min) and [`otimes_dual`] (+). When `ε` meets `⊤` under a
//! product, the max-plus product lets `ε` win and the min-plus product lets
//! `⊤` win.

use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

/// Element of `ℝ ∪ {−∞, +∞}`. NaN is never stored.
#[derive(Clone, Copy)]
pub struct Weight(f64);

impl Weight {
    /// `ε = −∞`, the zero of max-plus.
    pub const EPSILON: Weight = Weight(f64::NEG_INFINITY);
    /// `⊤ = +∞`, the zero of min-plus.
    pub const TOP: Weight = Weight(f64::INFINITY);
    /// `𝟙 = 0`, the unit of both products.
    pub const ONE: Weight = Weight(0.0);

    /// Wraps a finite value.
    ///
    /// # Panics
    /// If `v` is not finite. Use [`Weight::from_f64`] for values that may be
    /// infinite.
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "Weight::finite called with {v}");
        Weight(v + 0.0)
    }

    /// Maps `-inf` to `ε`, `+inf` to `⊤`, and rejects NaN.
    pub fn from_f64(v: f64) -> Option<Self> {
        if v.is_nan() {
            None
        } else {
            Some(Weight(v + 0.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_epsilon(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_top(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Finite value, if any.
    pub fn as_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }
}

impl From<i32> for Weight {
    fn from(v: i32) -> Self {
        Weight(v as f64)
    }
}

impl From<i64> for Weight {
    fn from(v: i64) -> Self {
        Weight(v as f64)
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for Weight {}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is excluded at construction.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl Hash for Weight {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Prints `-inf`, `+inf`, and reals with the shortest round-tripping
/// representation (integers without a fractional part).
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_epsilon() {
            f.write_str("-inf")
        } else if self.is_top() {
            f.write_str("+inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Sum of extended reals where `absorbing` wins whenever both infinities meet.
fn add_with_preference(a: Weight, b: Weight, absorbing: Weight) -> Weight {
    if a == absorbing || b == absorbing {
        absorbing
    } else {
        Weight(a.0 + b.0)
    }
}

/// `a ⊕ b = max(a, b)`.
pub fn oplus(a: Weight, b: Weight) -> Weight {
    if a >= b {
        a
    } else {
        b
    }
}

/// `a ⊗ b = a + b`, with `ε` absorbing (so `ε ⊗ ⊤ = ε`).
pub fn otimes(a: Weight, b: Weight) -> Weight {
    add_with_preference(a, b, Weight::EPSILON)
}

/// `a ⊕′ b = min(a, b)`.
pub fn oplus_dual(a: Weight, b: Weight) -> Weight {
    if a <= b {
        a
    } else {
        b
    }
}

/// `a ⊗′ b = a + b`, with `⊤` absorbing (so `⊤ ⊗′ ε = ⊤`).
pub fn otimes_dual(a: Weight, b: Weight) -> Weight {
    add_with_preference(a, b, Weight::TOP)
}
