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

//! Instances, outcomes and utility accounting.
//!
//! Storage is 0-based. Everything that faces a user (`Display`, file formats,
//! CLI, reports) uses the 1-based labels `c1..cm` and agents `1..n`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::fmt;

/// Valuations of all agents for all candidates in a single round.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoundMatrix<V> {
    n: usize,
    m: usize,
    values: Vec<V>,
}

impl<V: Scalar> RoundMatrix<V> {
    /// Builds a matrix from `n` rows of `m` valuations each.
    pub fn new(rows: Vec<Vec<V>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInstance("round matrix has no agents".into()));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(Error::InvalidInstance("round matrix has no candidates".into()));
        }
        let mut values = Vec::with_capacity(n * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInstance(format!(
                    "agent {} has {} valuations, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::InvalidInstance(format!(
                        "negative valuation {v} for agent {} candidate c{}",
                        i + 1,
                        j + 1
                    )));
                }
                values.push(v);
            }
        }
        Ok(Self { n, m, values })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| V::from_i64(v).expect("integer fits")).collect()).collect())
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self { n, m, values: vec![V::zero(); n * m] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn value(&self, agent: usize, candidate: usize) -> &V {
        &self.values[agent * self.m + candidate]
    }

    pub fn row(&self, agent: usize) -> &[V] {
        &self.values[agent * self.m..(agent + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[V]> {
        self.values.chunks(self.m)
    }

    /// Column of valuations every agent assigns to `candidate`.
    pub fn column(&self, candidate: usize) -> Vec<V> {
        (0..self.n).map(|i| self.value(i, candidate).clone()).collect()
    }

    /// Largest valuation of `agent` in this round.
    pub fn max_value(&self, agent: usize) -> &V {
        self.row(agent).iter().max().expect("m >= 1")
    }

    /// Smallest-index candidate attaining the agent's largest valuation.
    pub fn top_candidate(&self, agent: usize) -> usize {
        let best = self.max_value(agent);
        self.row(agent).iter().position(|v| v == best).expect("max exists")
    }

    /// Applies `f` to every entry, keeping the shape.
    pub fn map<W: Scalar>(&self, f: impl Fn(&V) -> W) -> RoundMatrix<W> {
        RoundMatrix { n: self.n, m: self.m, values: self.values.iter().map(f).collect() }
    }

    /// Stacks `copies` copies of the agent rows on top of each other.
    pub fn replicate_agents(&self, copies: usize) -> Self {
        let mut values = Vec::with_capacity(self.values.len() * copies);
        for _ in 0..copies {
            values.extend(self.values.iter().cloned());
        }
        Self { n: self.n * copies, m: self.m, values }
    }

    pub fn to_rows(&self) -> Vec<Vec<V>> {
        self.rows().map(|r| r.to_vec()).collect()
    }
}

/// A full sequential decision problem: `T` rounds of `n x m` valuations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance<V = num::BigRational> {
    n: usize,
    m: usize,
    rounds: Vec<RoundMatrix<V>>,
}

impl<V: Scalar> Instance<V> {
    /// Validates shape, non-negativity and that every agent values something.
    pub fn new(rounds: Vec<RoundMatrix<V>>) -> Result<Self> {
        let first =
            rounds.first().ok_or_else(|| Error::InvalidInstance("an instance needs at least one round".into()))?;
        let (n, m) = (first.n(), first.m());
        for (t, r) in rounds.iter().enumerate() {
            if r.n() != n || r.m() != m {
                return Err(Error::InvalidInstance(format!(
                    "round {} is {}x{}, expected {n}x{m}",
                    t + 1,
                    r.n(),
                    r.m()
                )));
            }
        }
        for i in 0..n {
            if !rounds.iter().any(|r| r.row(i).iter().any(|v| v.is_positive())) {
                return Err(Error::InvalidInstance(format!("agent {} has no positive valuation", i + 1)));
            }
        }
        Ok(Self { n, m, rounds })
    }

    /// Builds an instance from nested rows, `rows[t][i][c]`.
    pub fn from_rows(rows: Vec<Vec<Vec<V>>>) -> Result<Self> {
        Self::new(rows.into_iter().map(RoundMatrix::new).collect::<Result<_>>()?)
    }

    pub fn from_ints(rows: &[&[&[i64]]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| RoundMatrix::from_ints(r)).collect::<Result<_>>()?)
    }

    /// Same matrix repeated for `t` rounds.
    pub fn repeated(round: RoundMatrix<V>, t: usize) -> Result<Self> {
        Self::new(vec![round; t])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of rounds `T`.
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn round(&self, t: usize) -> &RoundMatrix<V> {
        &self.rounds[t]
    }

    pub fn rounds(&self) -> &[RoundMatrix<V>] {
        &self.rounds
    }

    pub fn value(&self, round: usize, agent: usize, candidate: usize) -> &V {
        self.rounds[round].value(agent, candidate)
    }

    /// `m^T` as an exact count, or `None` when it does not fit in `u64`.
    pub fn outcome_count(&self) -> Option<u64> {
        (self.m as u64).checked_pow(u32::try_from(self.horizon()).ok()?)
    }

    pub fn map<W: Scalar>(&self, f: impl Fn(&V) -> W) -> Instance<W> {
        Instance { n: self.n, m: self.m, rounds: self.rounds.iter().map(|r| r.map(&f)).collect() }
    }

    pub fn check_agent(&self, agent: usize) -> Result<()> {
        if agent < self.n {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("agent index {} out of range 1..={}", agent + 1, self.n)))
        }
    }

    pub fn check_round(&self, round: usize) -> Result<()> {
        if round < self.horizon() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("round index {} out of range 1..={}", round + 1, self.horizon())))
        }
    }

    /// Checks that `outcome` is a valid (possibly partial) outcome here.
    pub fn check_outcome(&self, outcome: &Outcome) -> Result<()> {
        if outcome.len() > self.horizon() {
            return Err(Error::InvalidOutcome(format!(
                "outcome has {} rounds but the instance has {}",
                outcome.len(),
                self.horizon()
            )));
        }
        if let Some((t, c)) = outcome.iter().enumerate().find(|(_, &c)| c >= self.m) {
            return Err(Error::InvalidOutcome(format!(
                "round {} chooses c{} but there are only {} candidates",
                t + 1,
                c + 1,
                self.m
            )));
        }
        Ok(())
    }

    pub fn check_full_outcome(&self, outcome: &Outcome) -> Result<()> {
        self.check_outcome(outcome)?;
        if outcome.len() != self.horizon() {
            return Err(Error::InvalidOutcome(format!(
                "expected a full outcome of {} rounds, got {}",
                self.horizon(),
                outcome.len()
            )));
        }
        Ok(())
    }
}

/// Sequence of chosen candidates, one per decided round (0-based storage).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(Vec<usize>);

impl Outcome {
    pub fn new(choices: Vec<usize>) -> Self {
        Self(choices)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds an outcome from 1-based candidate labels, e.g. `[1, 4]` is `(c1, c4)`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        labels
            .iter()
            .map(|&k| k.checked_sub(1).ok_or_else(|| Error::InvalidOutcome("candidate labels start at 1".into())))
            .collect::<Result<_>>()
            .map(Self)
    }

    /// Parses the comma separated 1-based syntax `3,2`.
    pub fn parse_labels(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty());
        }
        let labels = text
            .split(',')
            .map(|s| {
                let s = s.trim();
                let s = s.strip_prefix('c').unwrap_or(s);
                s.parse::<usize>().map_err(|_| Error::InvalidOutcome(format!("`{s}` is not a candidate label")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(&labels)
    }

    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|c| c + 1).collect()
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn push(&mut self, candidate: usize) {
        self.0.push(candidate)
    }

    pub fn prefix(&self, len: usize) -> Outcome {
        Outcome(self.0[..len].to_vec())
    }
}

impl std::ops::Index<usize> for Outcome {
    type Output = usize;

    fn index(&self, t: usize) -> &usize {
        &self.0[t]
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "c{}", c + 1)?;
        }
        f.write_str(")")
    }
}

/// Accumulated utility of every agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtilityVector<V>(Vec<V>);

impl<V: Scalar> UtilityVector<V> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![V::zero(); n])
    }

    pub fn from_values(values: Vec<V>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[V] {
        &self.0
    }

    pub fn into_values(self) -> Vec<V> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds the column of `candidate` in `round` to every entry.
    pub fn add_choice(&mut self, round: &RoundMatrix<V>, candidate: usize) {
        for (i, u) in self.0.iter_mut().enumerate() {
            *u = u.clone() + round.value(i, candidate).clone();
        }
    }

    /// Utility vector after additionally choosing `candidate` in `round`.
    pub fn with_choice(&self, round: &RoundMatrix<V>, candidate: usize) -> Self {
        let mut next = self.clone();
        next.add_choice(round, candidate);
        next
    }
}

impl<V> std::ops::Index<usize> for UtilityVector<V> {
    type Output = V;

    fn index(&self, i: usize) -> &V {
        &self.0[i]
    }
}

impl<V: fmt::Display> fmt::Display for UtilityVector<V> {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("(")?;
        for (k, u) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{u}")?;
        }
        f.write_str(")")
    }
}

/// Utility ratio that may sit in a tier above every finite value.
///
/// `Finite(a) < Finite(b)` iff `a < b`, every `Finite` is below every
/// `Infinite`, and `Infinite(a) < Infinite(b)` iff `a < b`. The derived `Ord`
/// gives exactly this order because `Finite` is declared first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<V> {
    Finite(V),
    Infinite(V),
}

impl<V: Scalar> Extended<V> {
    /// `utility / share`, where a zero share stands for an infinitesimal.
    pub fn normalized(utility: &V, share: &V) -> Self {
        if share.is_zero() {
            if utility.is_zero() {
                Extended::Finite(V::zero())
            } else {
                Extended::Infinite(utility.clone())
            }
        } else {
            Extended::Finite(utility.clone() / share.clone())
        }
    }
}

impl<V: fmt::Display> fmt::Display for Extended<V> {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite(v) => write!(f, "{v}/eps"),
        }
    }
}

/// Sum of each agent's valuations of the chosen candidates.
pub fn accumulated_utility<V: Scalar>(instance: &Instance<V>, outcome: &Outcome) -> Result<UtilityVector<V>> {
    instance.check_outcome(outcome)?;
    let mut u = UtilityVector::zeros(instance.n());
    for (t, &c) in outcome.iter().enumerate() {
        u.add_choice(instance.round(t), c);
    }
    Ok(u)
}

/// Largest valuation `agent` has for any candidate in `round`.
pub fn cmax_value<V: Scalar>(instance: &Instance<V>, agent: usize, round: usize) -> Result<V> {
    instance.check_agent(agent)?;
    instance.check_round(round)?;
    Ok(instance.round(round).max_value(agent).clone())
}

/// Proportional share: `1/n` of the utility of choosing the agent's favourite every round.
pub fn prop_share<V: Scalar>(instance: &Instance<V>, agent: usize) -> Result<V> {
    instance.check_agent(agent)?;
    let total = instance.rounds().iter().fold(V::zero(), |acc, r| acc + r.max_value(agent).clone());
    Ok(total / V::from_count(instance.n()))
}

/// Round-robin share: every `n`-th entry of the agent's per-round maxima
/// sorted in non-ascending order.
pub fn rrs_share<V: Scalar>(instance: &Instance<V>, agent: usize) -> Result<V> {
    instance.check_agent(agent)?;
    let mut maxima: Vec<V> = instance.rounds().iter().map(|r| r.max_value(agent).clone()).collect();
    maxima.sort_by(|a, b| b.cmp(a));
    let n = instance.n();
    Ok(maxima.iter().skip(n - 1).step_by(n).fold(V::zero(), |acc, v| acc + v.clone()))
}

pub fn prop_shares<V: Scalar>(instance: &Instance<V>) -> Vec<V> {
    (0..instance.n()).map(|i| prop_share(instance, i).expect("valid agent")).collect()
}

pub fn rrs_shares<V: Scalar>(instance: &Instance<V>) -> Vec<V> {
    (0..instance.n()).map(|i| rrs_share(instance, i).expect("valid agent")).collect()
}

/// Compares two vectors under the leximin order: sort both non-descending
/// and compare lexicographically.
pub fn leximin_compare<T: Ord + Clone>(x: &[T], y: &[T]) -> Result<Ordering> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    Ok(leximin_cmp_unchecked(x, y))
}

pub(crate) fn leximin_cmp_unchecked<T: Ord + Clone>(x: &[T], y: &[T]) -> Ordering {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort();
    ys.sort();
    xs.cmp(&ys)
}

/// Key that orders vectors by leximin; equal keys are leximin-equivalent.
pub fn leximin_key<T: Ord + Clone>(x: &[T]) -> Vec<T> {
    let mut xs = x.to_vec();
    xs.sort();
    xs
}
