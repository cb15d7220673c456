// Copyright 2026 The seqfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Seeded instance generators for experiments and property suites.

use crate::model::{Instance, RoundMatrix};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG used by every generator in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer valuations drawn uniformly from `0..=max_value`, resampled until
/// every agent has a positive valuation somewhere.
pub fn random_instance<V: Scalar>(n: usize, m: usize, t: usize, max_value: u32, seed: u64) -> Instance<V> {
    assert!(n > 0 && m > 0 && t > 0 && max_value > 0, "dimensions and max_value must be positive");
    let mut rng = rng(seed);
    loop {
        let rounds: Vec<RoundMatrix<V>> = (0..t)
            .map(|_| {
                let rows = (0..n)
                    .map(|_| (0..m).map(|_| V::from_count(rng.gen_range(0..=max_value) as usize)).collect())
                    .collect();
                RoundMatrix::new(rows).expect("non-negative")
            })
            .collect();
        if let Ok(inst) = Instance::new(rounds) {
            return inst;
        }
    }
}

/// A uniformly random ranking of `m` candidates, best first (0-based).
pub fn random_ranking<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order
}
