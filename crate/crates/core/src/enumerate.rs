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

//! Exhaustive outcome enumeration.
//!
//! Outcomes are visited in lexicographic order of candidate indices. The
//! parallel mode splits the search on the first round's candidate and reduces
//! chunk results in chunk order, so it returns exactly what the sequential
//! scan returns.

use crate::error::{Error, Result};
use crate::model::{Instance, Outcome};
use crate::scalar::Scalar;
use num::BigUint;
use rayon::prelude::*;

/// Default cap on the number of outcomes an exhaustive search may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum `m^T` a search accepts.
    pub budget: u64,
    /// Split the search over rayon's pool.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, parallel: false }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: u64) -> Self {
        Self { budget, ..Self::default() }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    /// Returns `m^T` when it fits in the budget.
    pub fn admit<V: Scalar>(&self, instance: &Instance<V>) -> Result<u64> {
        match instance.outcome_count() {
            Some(count) if count <= self.budget => Ok(count),
            _ => {
                let required = BigUint::from(instance.m()).pow(instance.horizon() as u32);
                Err(Error::BudgetExceeded { required: required.to_string(), budget: self.budget })
            }
        }
    }
}

/// Lexicographic odometer over all full-length outcomes.
#[derive(Debug, Clone)]
pub struct OutcomeIter {
    m: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for OutcomeIter {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.m {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(Outcome::new(current))
    }
}

/// Streams all `m^T` outcomes of `instance` in lexicographic order.
pub fn enumerate_outcomes<V: Scalar>(instance: &Instance<V>, budget: u64) -> Result<OutcomeIter> {
    SearchConfig::with_budget(budget).admit(instance)?;
    Ok(OutcomeIter { m: instance.m(), next: Some(vec![0; instance.horizon()]) })
}

struct Walker<'a, V> {
    instance: &'a Instance<V>,
    choices: Vec<usize>,
    levels: Vec<Vec<V>>,
}

impl<'a, V: Scalar> Walker<'a, V> {
    fn new(instance: &'a Instance<V>) -> Self {
        let t = instance.horizon();
        Self { instance, choices: Vec::with_capacity(t), levels: vec![vec![V::zero(); instance.n()]; t + 1] }
    }

    fn push(&mut self, candidate: usize) {
        let depth = self.choices.len();
        let round = self.instance.round(depth);
        let (done, rest) = self.levels.split_at_mut(depth + 1);
        for (i, (dst, src)) in rest[0].iter_mut().zip(done[depth].iter()).enumerate() {
            *dst = src.clone() + round.value(i, candidate).clone();
        }
        self.choices.push(candidate);
    }

    fn pop(&mut self) {
        self.choices.pop();
    }

    /// Visits every completion of the current prefix; stops when `f` returns false.
    fn walk<F: FnMut(&[usize], &[V]) -> bool>(&mut self, f: &mut F) -> bool {
        let depth = self.choices.len();
        if depth == self.instance.horizon() {
            return f(&self.choices, &self.levels[depth]);
        }
        for c in 0..self.instance.m() {
            self.push(c);
            let go_on = self.walk(f);
            self.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Calls `f` with every full outcome and its utility vector, in lexicographic order.
pub fn for_each_outcome<V: Scalar>(
    instance: &Instance<V>,
    config: &SearchConfig,
    mut f: impl FnMut(&[usize], &[V]),
) -> Result<()> {
    config.admit(instance)?;
    Walker::new(instance).walk(&mut |o: &[usize], u: &[V]| {
        f(o, u);
        true
    });
    Ok(())
}

fn chunk_best<V: Scalar, K: Ord, S>(instance: &Instance<V>, first: Option<usize>, score: &S) -> Option<(Vec<usize>, K)>
where
    S: Fn(&[usize], &[V]) -> Option<K>,
{
    let mut walker = Walker::new(instance);
    if let Some(c) = first {
        walker.push(c);
    }
    let mut best: Option<(Vec<usize>, K)> = None;
    walker.walk(&mut |o: &[usize], u: &[V]| {
        if let Some(k) = score(o, u) {
            if best.as_ref().is_none_or(|(_, b)| k > *b) {
                best = Some((o.to_vec(), k));
            }
        }
        true
    });
    best
}

/// Lexicographically smallest outcome maximising `score`; outcomes scored
/// `None` are skipped. Returns `None` when every outcome is skipped.
pub fn best_outcome<V, K, S>(instance: &Instance<V>, config: &SearchConfig, score: S) -> Result<Option<(Outcome, K)>>
where
    V: Scalar,
    K: Ord + Send,
    S: Fn(&[usize], &[V]) -> Option<K> + Sync,
{
    config.admit(instance)?;
    let best = if config.parallel && instance.m() > 1 {
        let chunks: Vec<Option<(Vec<usize>, K)>> =
            (0..instance.m()).into_par_iter().map(|c| chunk_best(instance, Some(c), &score)).collect();
        let mut best: Option<(Vec<usize>, K)> = None;
        for (o, k) in chunks.into_iter().flatten() {
            if best.as_ref().is_none_or(|(_, b)| k > *b) {
                best = Some((o, k));
            }
        }
        best
    } else {
        chunk_best(instance, None, &score)
    };
    Ok(best.map(|(o, k)| (Outcome::new(o), k)))
}

/// Lexicographically first outcome satisfying `pred`.
pub fn find_first<V, P>(instance: &Instance<V>, config: &SearchConfig, pred: P) -> Result<Option<Outcome>>
where
    V: Scalar,
    P: Fn(&[usize], &[V]) -> bool + Sync,
{
    let found = best_outcome(instance, config, |o, u| pred(o, u).then_some(()))?;
    Ok(found.map(|(o, ())| o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ratio;

    fn inst(m: usize, t: usize) -> Instance<Ratio> {
        let row: Vec<i64> = (0..m as i64).map(|c| c + 1).collect();
        Instance::from_ints(&vec![&[&row[..]][..]; t]).unwrap()
    }

    #[test]
    fn lexicographic_order() {
        let all: Vec<Vec<usize>> = enumerate_outcomes(&inst(2, 2), 100).unwrap().map(|o| o.labels()).collect();
        assert_eq!(all, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        let all: Vec<Outcome> = enumerate_outcomes(&inst(1, 5), 100).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].labels(), vec![1; 5]);
        let mut it = enumerate_outcomes(&inst(3, 3), 100).unwrap();
        assert_eq!(it.next().unwrap().labels(), vec![1, 1, 1]);
        assert_eq!(it.count(), 26);
    }

    #[test]
    fn budget_is_enforced() {
        match enumerate_outcomes(&inst(3, 3), 26) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, "27");
                assert_eq!(budget, 26);
            }
            other => panic!("unexpected {other:?}"),
        }
        let huge = inst(2, 70);
        match SearchConfig::default().admit(&huge) {
            Err(Error::BudgetExceeded { required, .. }) => assert_eq!(required, "1180591620717411303424"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn walker_matches_odometer() {
        let inst = Instance::<Ratio>::from_ints(&[&[&[1, 2, 0], &[0, 5, 1]], &[&[3, 0, 1], &[1, 1, 2]]]).unwrap();
        let mut seen = Vec::new();
        for_each_outcome(&inst, &SearchConfig::default(), |o, u| {
            let expect = crate::model::accumulated_utility(&inst, &Outcome::new(o.to_vec())).unwrap();
            assert_eq!(expect.values(), u);
            seen.push(o.to_vec());
        })
        .unwrap();
        let odo: Vec<Vec<usize>> = enumerate_outcomes(&inst, 100).unwrap().map(|o| o.choices().to_vec()).collect();
        assert_eq!(seen, odo);
    }

    #[test]
    fn parallel_reduction_keeps_first_maximum() {
        let inst = Instance::<Ratio>::from_ints(&[&[&[1, 1, 1]], &[&[2, 2, 1]], &[&[0, 3, 3]]]).unwrap();
        let score = |_: &[usize], u: &[Ratio]| Some(u[0].clone());
        let seq = best_outcome(&inst, &SearchConfig::default(), score).unwrap().unwrap();
        let par = best_outcome(&inst, &SearchConfig::default().parallel(true), score).unwrap().unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.0.labels(), vec![1, 1, 2]);
    }
}
