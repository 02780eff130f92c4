//! Labeled, counter-addressable random streams.
//!
//! All randomness in the crate flows from a single top-level seed. Consumers
//! derive a sub-seed from a short label ("data", "init", "shuffle", "shots",
//! "jitter", ...) and then select an independent ChaCha8 stream by index, so
//! the draw sequence of one component can never shift another's. Query
//! campaigns key their streams on (sample id, query time), which lets a remote
//! service regenerate exactly the draws an in-process run would make.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; bijective, well-mixed, cheap.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Combine two words into one well-mixed stream key.
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b)
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Sub-seed for a labeled stream family under `master`.
pub fn label_seed(master: u64, label: &str) -> u64 {
    mix(master, fnv1a(label))
}

/// Generator for stream `stream` of the labeled family.
pub fn stream_rng(master: u64, label: &str, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(label_seed(master, label));
    rng.set_stream(stream);
    rng
}

/// Generator for the draws of one query, keyed on the request fields alone.
pub fn query_rng(master: u64, label: &str, sample_id: u64, t_hours: f64) -> ChaCha8Rng {
    stream_rng(master, label, mix(sample_id, t_hours.to_bits()))
}

/// Standard normal deviate via Box-Muller; consumes two uniforms.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1], keeps ln finite
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
