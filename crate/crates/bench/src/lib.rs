//! Fixtures shared by the benchmarks.

use pda_core::auction::{normalize_book, BookLimits, CombinedBook, Order, OwnerId};
use pda_core::Qty;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random book with `asks` generator asks and `players` prosumers, each
/// submitting one buy and maybe one sell.
pub fn random_book(seed: u64, asks: usize, players: usize) -> CombinedBook {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orders = Vec::with_capacity(asks + 2 * players);
    for _ in 0..asks {
        orders.push(Order::ask(rng.gen_range(0.0..100.0), Qty(rng.gen_range(1..50))));
    }
    for p in 0..players {
        let owner = OwnerId::prosumer(p);
        orders.push(Order::buy(owner, rng.gen_range(0.0..100.0), Qty(rng.gen_range(1..50))));
        if rng.gen_bool(0.3) {
            orders.push(Order::sell(owner, rng.gen_range(0.0..100.0), Qty(rng.gen_range(1..20))));
        }
    }
    normalize_book(orders, &BookLimits::new(100.0)).expect("fixture book is valid")
}
