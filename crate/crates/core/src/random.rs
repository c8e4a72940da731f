//! Seeded random schemes and addresses for fuzzing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::address::Address;
use crate::scheme::{FiniteScheme, Symbol, TokenSet, Word};

pub const MAX_SYMBOLS: usize = 4;
pub const MAX_BASE: usize = 4;

/// A valid scheme with `|Y|, |X0|` in `1..=4` and `|X0| <= |X1| <= |Y||X0|`.
pub fn random_scheme(seed: u64) -> FiniteScheme {
    random_scheme_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_scheme_with<R: Rng>(rng: &mut R) -> FiniteScheme {
    let ny = rng.gen_range(1..=MAX_SYMBOLS);
    let n0 = rng.gen_range(1..=MAX_BASE);
    let n1 = rng.gen_range(n0..=ny * n0);

    let mut targets: Vec<usize> = (0..n1).collect();
    targets.shuffle(rng);
    let phi = targets[..n0].to_vec();

    let mut cells: Vec<usize> = (0..ny * n0).collect();
    cells.shuffle(rng);
    let mut pi = vec![0; ny * n0];
    for (i, &cell) in cells.iter().enumerate() {
        pi[cell] = if i < n1 { i } else { rng.gen_range(0..n1) };
    }

    let names = |prefix: &str, n: usize| {
        TokenSet::new((0..n).map(|i| format!("{prefix}{i}"))).expect("distinct generated names")
    };
    FiniteScheme::new(names("", ny), names("p", n0), names("q", n1), phi, pi).expect("tables are in range")
}

/// `u(v)` with `|u|` in `0..=3` and `|v|` in `1..=3`.
pub fn random_address<R: Rng>(rng: &mut R, symbol_count: usize) -> Address {
    let u_len = rng.gen_range(0..=3);
    let v_len = rng.gen_range(1..=3);
    let mut word = |len: usize| -> Word { (0..len).map(|_| Symbol::from(rng.gen_range(0..symbol_count))).collect() };
    let u = word(u_len);
    let v = word(v_len);
    Address::new(u, v).expect("period is nonempty")
}

pub fn seeded_addresses(seed: u64, symbol_count: usize, count: usize) -> Vec<Address> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_address(&mut rng, symbol_count)).collect()
}
