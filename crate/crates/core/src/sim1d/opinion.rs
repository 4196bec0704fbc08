use std::cmp::Ordering;
use std::fmt;

use crate::analytics::fractional_part;
use crate::error::{Error, Result};

/// Magnitude limit for positions, so that the integer part and the
/// reconstructed `f64` stay exact.
pub const MAX_ABS_POSITION: f64 = 4_503_599_627_370_496.0; // 2^52

/// A point on the opinion axis, stored as integer part plus fractional part.
///
/// Agents only ever move by whole units, so a jump touches `whole` alone and
/// the fractional part is carried through bit-for-bit. Plain `f64` does not
/// have this property: `0.1 + 1.0 - 1.0 != 0.1`.
#[derive(Clone, Copy)]
pub struct Opinion {
    whole: i64,
    frac: f64,
}

impl Opinion {
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || x.abs() >= MAX_ABS_POSITION {
            return Err(Error::Validation(format!(
                "position {x} is not finite or exceeds 2^52 in magnitude"
            )));
        }
        let floor = x.floor();
        let frac = fractional_part(x);
        // fractional_part maps a rounded-up 1.0 to 0.0; keep the integer part in step.
        let whole = if frac == 0.0 && x - floor >= 1.0 {
            floor as i64 + 1
        } else {
            floor as i64
        };
        Ok(Opinion {
            whole,
            frac: frac + 0.0,
        })
    }

    pub fn whole(self) -> i64 {
        self.whole
    }

    /// Fractional part in `[0, 1)`; invariant under [`Opinion::shifted`].
    pub fn frac(self) -> f64 {
        self.frac
    }

    /// Nearest `f64` to the represented value.
    pub fn value(self) -> f64 {
        self.whole as f64 + self.frac
    }

    #[must_use]
    pub fn shifted(self, units: i64) -> Self {
        Opinion {
            whole: self.whole + units,
            frac: self.frac,
        }
    }

    /// `self - other`, rounded once.
    pub fn minus(self, other: Opinion) -> f64 {
        (self.whole - other.whole) as f64 + (self.frac - other.frac)
    }

    /// Exact test of `self - other <= units`.
    pub fn within(self, other: Opinion, units: i64) -> bool {
        self <= other.shifted(units)
    }
}

impl PartialEq for Opinion {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Opinion {}

impl PartialOrd for Opinion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Opinion {
    fn cmp(&self, other: &Self) -> Ordering {
        self.whole
            .cmp(&other.whole)
            .then_with(|| self.frac.total_cmp(&other.frac))
    }
}

impl fmt::Debug for Opinion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}
