//! Fixed inputs shared by the benchmarks.

use latfree::expr::{parse, Expr};
use latfree::random::{random_expr, seeded};

pub const SUITE: [(usize, &str); 5] =
    [(2, "t1 \\/ t2"), (3, "t1 \\/ t2 \\/ t3"), (2, "|t1| + |t2|"), (2, "t1 - t2"), (1, "|t1|")];

pub fn suite() -> Vec<(usize, Expr)> {
    SUITE.iter().map(|&(n, text)| (n, parse(text, n).expect("fixture parses"))).collect()
}

/// Random expressions in three variables with the given number of leaves.
pub fn random_batch(leaves: usize, count: usize) -> Vec<Expr> {
    let mut rng = seeded(leaves as u64);
    (0..count).map(|_| random_expr(&mut rng, 3, leaves, 3)).collect()
}
