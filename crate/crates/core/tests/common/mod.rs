#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Integer-weighted binary-input channel: `w[y][x]` is proportional to
/// `P(y | x)` with one scale for the whole table.
#[derive(Debug, Clone)]
pub struct IntChannel {
    pub w: Vec<[u64; 2]>,
}

impl IntChannel {
    /// BSC(0.1): 0.9 : 0.1 = 9 : 1.
    pub fn bsc_tenth() -> Self {
        Self { w: vec![[9, 1], [1, 9]] }
    }

    /// BEC with outputs 0, 1 and the erasure symbol 2.
    pub fn bec() -> Self {
        Self { w: vec![[1, 0], [0, 1], [1, 1]] }
    }

    /// Extended phase channel of depolarizing(0.1): symbol `w + 2u` with
    /// weight 27 when `u = 0` and `w = x`, 1 otherwise (0.9 : 1/30).
    pub fn extended_depolarizing_tenth() -> Self {
        Self { w: vec![[27, 1], [1, 27], [1, 1], [1, 1]] }
    }

    pub fn outputs(&self) -> usize {
        self.w.len()
    }

    pub fn sample(&self, x: u8, rng: &mut impl Rng) -> usize {
        let total: u64 = self.w.iter().map(|r| r[x as usize]).sum();
        let mut t = rng.gen_range(0..total);
        for (y, r) in self.w.iter().enumerate() {
            if t < r[x as usize] {
                return y;
            }
            t -= r[x as usize];
        }
        unreachable!()
    }
}

/// `x_i = XOR of u_j over all j whose bits contain the bits of i`.
pub fn reference_encode(u: &[u8]) -> Vec<u8> {
    let n = u.len();
    (0..n)
        .map(|i| (0..n).filter(|&j| j & i == i).fold(0, |a, j| a ^ u[j]))
        .collect()
}

/// Likelihood of `y` summed over all inputs that start with `prefix`.
fn prefix_likelihood(ch: &IntChannel, y: &[usize], prefix: &[u8]) -> u128 {
    let n = y.len();
    let free = n - prefix.len();
    let mut total = 0u128;
    let mut u = prefix.to_vec();
    u.resize(n, 0);
    for m in 0u64..1 << free {
        for b in 0..free {
            u[prefix.len() + b] = (m >> b & 1) as u8;
        }
        let x = reference_encode(&u);
        total += y
            .iter()
            .zip(&x)
            .map(|(&yk, &xk)| ch.w[yk][xk as usize] as u128)
            .product::<u128>();
    }
    total
}

/// Maximum posterior decision for input `i` given earlier decisions, ties to 0.
pub fn oracle_decision(ch: &IntChannel, y: &[usize], history: &[u8]) -> u8 {
    let mut p = history.to_vec();
    p.push(0);
    let l0 = prefix_likelihood(ch, y, &p);
    p.pop();
    p.push(1);
    let l1 = prefix_likelihood(ch, y, &p);
    u8::from(l1 > l0)
}

/// Index positions where the decoder's decision differs from the oracle fed
/// the decoder's own earlier decisions.
pub fn mismatches(ch: &IntChannel, y: &[usize], decoded: &[u8]) -> Vec<usize> {
    (0..y.len())
        .filter(|&i| oracle_decision(ch, y, &decoded[..i]) != decoded[i])
        .collect()
}

pub fn test_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_input(n: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2u8)).collect()
}
