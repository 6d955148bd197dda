//! Quantity and price primitives.
//!
//! Quantities are integer multiples of a market resolution so that pro-rata
//! splits, conservation checks and oracle comparisons are exact. Prices are
//! plain `f64` currency values.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Currency per unit of commodity.
pub type Price = f64;

/// A quantity expressed in resolution units.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Qty(pub u64);

impl Qty {
    pub const ZERO: Qty = Qty(0);

    pub fn units(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn saturating_sub(self, rhs: Qty) -> Qty {
        Qty(self.0.saturating_sub(rhs.0))
    }

    pub fn min(self, rhs: Qty) -> Qty {
        Qty(self.0.min(rhs.0))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl Add for Qty {
    type Output = Qty;
    fn add(self, rhs: Qty) -> Qty {
        Qty(self.0 + rhs.0)
    }
}

impl AddAssign for Qty {
    fn add_assign(&mut self, rhs: Qty) {
        self.0 += rhs.0;
    }
}

impl Sub for Qty {
    type Output = Qty;
    fn sub(self, rhs: Qty) -> Qty {
        Qty(self.0 - rhs.0)
    }
}

impl SubAssign for Qty {
    fn sub_assign(&mut self, rhs: Qty) {
        self.0 -= rhs.0;
    }
}

impl Sum for Qty {
    fn sum<I: Iterator<Item = Qty>>(iter: I) -> Qty {
        Qty(iter.map(|q| q.0).sum())
    }
}

impl<'a> Sum<&'a Qty> for Qty {
    fn sum<I: Iterator<Item = &'a Qty>>(iter: I) -> Qty {
        Qty(iter.map(|q| q.0).sum())
    }
}

impl fmt::Display for Qty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}u", self.0)
    }
}

/// Size of one quantity unit in physical commodity units (MWh, shares, ...).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Resolution(pub f64);

impl Default for Resolution {
    fn default() -> Self {
        Resolution(0.001)
    }
}

impl Resolution {
    /// Nearest whole number of units for a physical amount. Negative input maps to zero.
    pub fn to_units(self, physical: f64) -> Qty {
        let units = (physical / self.0).round();
        if units <= 0.0 {
            Qty::ZERO
        } else {
            Qty(units as u64)
        }
    }

    /// Largest whole number of units not exceeding a physical amount.
    pub fn floor_units(self, physical: f64) -> Qty {
        // tolerate representation error just below an exact multiple
        let units = (physical / self.0 + 1e-9).floor();
        if units <= 0.0 {
            Qty::ZERO
        } else {
            Qty(units as u64)
        }
    }

    pub fn to_physical(self, q: Qty) -> f64 {
        q.0 as f64 * self.0
    }

    /// Number of decimal places needed to print a multiple of this resolution.
    pub fn decimals(self) -> usize {
        let mut d = 0;
        let mut scaled = self.0;
        while d < 12 && (scaled - scaled.round()).abs() > 1e-9 {
            scaled *= 10.0;
            d += 1;
        }
        d
    }
}
