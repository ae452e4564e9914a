//! Counter-based, splittable random streams.
//!
//! Every random draw in the crate is a function of a [`SeedSpec`] only, which
//! makes results independent of scheduling and thread count. The bit-level
//! contract is:
//!
//! ```text
//! mix64(z):   z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//!             z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//!             return z ^ (z >> 31)                  (all arithmetic mod 2^64)
//!
//! GAMMA = 0x9E37_79B9_7F4A_7C15
//!
//! derive_stream((m, s), c) = (mix64(m ^ mix64(s + GAMMA)), c)
//!
//! stream state   x0 = mix64(m + mix64(s + GAMMA))
//! k-th output    u_k = mix64(x0 + k * GAMMA),  k = 1, 2, ...
//! uniform double (u_k >> 11) * 2^-53            in [0, 1)
//! ```
//!
//! Standard complex normals use Box–Muller on two consecutive uniforms
//! `a, b`: `r = sqrt(−2 ln(1 − a))`, `θ = 2π b`, and the sample is
//! `(r cos θ + i r sin θ) / √2`, so `E|z|² = 1`.

use num_complex::Complex64;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Shorthand for [`derive_stream`].
    pub fn child(&self, index: u64) -> SeedSpec {
        derive_stream(*self, index)
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::new(*self)
    }
}

/// Child stream `index` of `seed`. Injective in `index` for a fixed parent.
pub fn derive_stream(seed: SeedSpec, index: u64) -> SeedSpec {
    SeedSpec { master_seed: mix64(seed.master_seed ^ mix64(seed.stream_id.wrapping_add(GAMMA))), stream_id: index }
}

/// SplitMix-style generator keyed by a [`SeedSpec`].
#[derive(Clone, Debug)]
pub struct StreamRng {
    state: u64,
}

impl StreamRng {
    pub fn new(seed: SeedSpec) -> Self {
        Self { state: mix64(seed.master_seed.wrapping_add(mix64(seed.stream_id.wrapping_add(GAMMA)))) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair coin.
    #[inline]
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Integer in `0..n` by the multiply-high map (bias below `n / 2^64`).
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard complex normal (`E|z|² = 1`) by Box–Muller.
    pub fn complex_normal(&mut self) -> Complex64 {
        let a = self.uniform();
        let b = self.uniform();
        let r = (-2.0 * (1.0 - a).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * b;
        Complex64::new(r * theta.cos(), r * theta.sin()) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Index drawn from a cumulative distribution (last entry ≈ 1). Entries
    /// with zero weight are never returned.
    #[inline]
    pub fn categorical(&mut self, cumulative: &[f64]) -> usize {
        let u = self.uniform() * cumulative[cumulative.len() - 1];
        let mut idx = cumulative.partition_point(|&c| c <= u);
        if idx >= cumulative.len() {
            // u landed on the rounding gap at the top; take the last category with mass.
            idx = cumulative.len() - 1;
            while idx > 0 && cumulative[idx] == cumulative[idx - 1] {
                idx -= 1;
            }
        }
        idx
    }
}

/// Cumulative sums of nonnegative weights (negatives clamped to zero).
pub fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|&w| {
            acc += w.max(0.0);
            acc
        })
        .collect()
}
