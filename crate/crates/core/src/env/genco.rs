use rand::Rng;

use super::GencoConfig;
use crate::game::Ask;
use crate::units::{Price, Qty, Resolution};

/// Block asks for the unsold part of the generator's capacity.
///
/// `sold` is the quantity already committed to the slot, so repeated calls
/// within a slot walk up the same quadratic curve.
pub fn genco_asks<R: Rng>(
    genco: &GencoConfig,
    sold: Qty,
    resolution: Resolution,
    p_max: Price,
    rng: &mut R,
) -> Vec<Ask> {
    let capacity = resolution.floor_units(genco.capacity);
    let block = resolution.to_units(genco.block).max(Qty(1));
    let mut asks = Vec::new();
    let mut start = sold;
    while start < capacity {
        let end = (start + block).min(capacity);
        let q = resolution.to_physical(end);
        let base = genco.a * q * q + genco.b * q + genco.c;
        let noise = if genco.sigma > 0.0 {
            rng.gen_range(1.0 - genco.sigma..=1.0 + genco.sigma)
        } else {
            1.0
        };
        asks.push(Ask::new((base * noise).clamp(0.0, p_max), end - start));
        start = end;
    }
    asks
}
