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

//! Offline mechanisms: round robin over rounds, maximum Nash welfare and
//! (normalized) leximin.
//!
//! Ties are broken toward the smallest index everywhere: rounds, candidates,
//! and outcomes in lexicographic order.

use crate::enumerate::{best_outcome, for_each_outcome, SearchConfig};
use crate::error::{Error, Result};
use crate::model::{leximin_key, prop_shares, rrs_shares, Extended, Instance, Outcome};
use crate::scalar::{product, Scalar};
use std::fmt;
use std::str::FromStr;

/// An ordering of all agents (0-based), used to assign turns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::InvalidParameter(format!("not a permutation of {n} agents: {order:?}")));
            }
            seen[i] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// From 1-based agent labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidParameter("agent labels start at 1".into()));
        }
        Self::new(labels.iter().map(|l| l - 1).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Agent whose turn it is at 0-based step `k`.
    pub fn turn(&self, k: usize) -> usize {
        self.0[k % self.0.len()]
    }

    pub fn check_agents(&self, n: usize) -> Result<()> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch { left: self.0.len(), right: n })
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", labels.join(","))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Comma-separated 1-based labels, optionally parenthesised: `"2,1,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let labels = body
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad agent label {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(&labels)
    }
}

/// How utilities are rescaled before the leximin comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    #[default]
    None,
    ByRrs,
    ByProp,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Normalization::None => "none",
            Normalization::ByRrs => "rrs",
            Normalization::ByProp => "prop",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Normalization::None),
            "rrs" => Ok(Normalization::ByRrs),
            "prop" => Ok(Normalization::ByProp),
            other => Err(Error::Parse(format!("unknown normalization {other:?} (none|rrs|prop)"))),
        }
    }
}

/// Maps a utility vector into the space the leximin comparison runs in.
#[derive(Debug, Clone)]
pub struct Normalizer<V> {
    kind: Normalization,
    shares: Vec<V>,
}

impl<V: Scalar> Normalizer<V> {
    pub fn new(instance: &Instance<V>, kind: Normalization) -> Self {
        let shares = match kind {
            Normalization::None => Vec::new(),
            Normalization::ByRrs => rrs_shares(instance),
            Normalization::ByProp => prop_shares(instance),
        };
        Self { kind, shares }
    }

    pub fn apply(&self, utilities: &[V]) -> Vec<Extended<V>> {
        match self.kind {
            Normalization::None => utilities.iter().cloned().map(Extended::Finite).collect(),
            Normalization::ByProp => {
                utilities.iter().zip(&self.shares).map(|(u, p)| Extended::Finite(u.clone() / p.clone())).collect()
            }
            Normalization::ByRrs => {
                utilities.iter().zip(&self.shares).map(|(u, s)| Extended::normalized(u, s)).collect()
            }
        }
    }
}

/// Agents take turns in `pi`-cyclic order; each claims the unassigned round
/// where their favourite candidate is worth the most and elects it there.
pub fn rr_offline<V: Scalar>(instance: &Instance<V>, pi: &Permutation) -> Result<Outcome> {
    pi.check_agents(instance.n())?;
    let horizon = instance.horizon();
    let mut chosen: Vec<Option<usize>> = vec![None; horizon];
    for k in 0..horizon {
        let agent = pi.turn(k);
        let mut pick: Option<usize> = None;
        for t in (0..horizon).filter(|&t| chosen[t].is_none()) {
            let better = match pick {
                None => true,
                Some(p) => instance.round(t).max_value(agent) > instance.round(p).max_value(agent),
            };
            if better {
                pick = Some(t);
            }
        }
        let t = pick.expect("an unclaimed round remains");
        chosen[t] = Some(instance.round(t).top_candidate(agent));
    }
    Ok(Outcome::new(chosen.into_iter().map(|c| c.expect("all rounds assigned")).collect()))
}

/// Largest set of agents some outcome gives positive utility to; among sets
/// of that size, the lexicographically smallest (sorted agent indices).
pub fn max_positive_support<V: Scalar>(instance: &Instance<V>, config: &SearchConfig) -> Result<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    for_each_outcome(instance, config, |_, u| {
        let support: Vec<usize> = (0..u.len()).filter(|&i| u[i].is_positive()).collect();
        let better = match &best {
            None => true,
            Some(b) => support.len() > b.len() || (support.len() == b.len() && support < *b),
        };
        if better {
            best = Some(support);
        }
    })?;
    Ok(best.unwrap_or_default())
}

/// Maximum Nash welfare over full outcomes.
///
/// When every outcome has product zero, the product is taken over the agent
/// set returned by [`max_positive_support`] instead.
pub fn mnw_offline<V: Scalar>(instance: &Instance<V>, config: &SearchConfig) -> Result<Outcome> {
    let (outcome, welfare) = best_outcome(instance, config, |_, u| Some(product(u)))?.expect("at least one outcome");
    if welfare.is_positive() {
        return Ok(outcome);
    }
    let support = max_positive_support(instance, config)?;
    let best = best_outcome(instance, config, |_, u| {
        support.iter().all(|&i| u[i].is_positive()).then(|| support.iter().fold(V::one(), |acc, &i| acc * u[i].clone()))
    })?;
    Ok(best.map(|(o, _)| o).unwrap_or(outcome))
}

/// Leximin-optimal outcome under the given normalization.
pub fn leximin_offline<V: Scalar>(
    instance: &Instance<V>,
    norm: Normalization,
    config: &SearchConfig,
) -> Result<Outcome> {
    let normalizer = Normalizer::new(instance, norm);
    let (outcome, _) =
        best_outcome(instance, config, |_, u| Some(leximin_key(&normalizer.apply(u))))?.expect("at least one outcome");
    Ok(outcome)
}
