//! Shared inputs for the criterion benches.

use logmin_core::{gen_synthetic, CallRecord, GeneratorProfile};

pub fn synthetic_log(n: usize, seed: u64) -> Vec<CallRecord> {
    gen_synthetic(&GeneratorProfile {
        seed,
        n,
        contacts: 200,
        conference_rate: 0.05,
        ..Default::default()
    })
    .expect("bench profile is valid")
}
