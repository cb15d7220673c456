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

//! Fairness and efficiency checkers with witnesses.
//!
//! Every checker works on exact scalars, so verdicts are decided without any
//! tolerance. Witnesses use 0-based agent and round indices; their `Display`
//! output is 1-based.

use crate::enumerate::{best_outcome, find_first, SearchConfig};
use crate::error::{Error, Result};
use crate::model::{accumulated_utility, prop_shares, rrs_shares, Instance, Outcome};
use crate::scalar::Scalar;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    ParetoOptimal,
    AlphaProp,
    AlphaProp1,
    AlphaRrs,
    AdditiveProp,
    Mpp,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Property::ParetoOptimal => "PO",
            Property::AlphaProp => "alpha-Prop",
            Property::AlphaProp1 => "alpha-Prop1",
            Property::AlphaRrs => "alpha-RRS",
            Property::AdditiveProp => "additive-Prop",
            Property::Mpp => "MPP",
        })
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness<V> {
    /// Least agent whose utility falls below the threshold.
    Agent { agent: usize, utility: V, threshold: V },
    /// First outcome (lexicographically) that Pareto-dominates the checked one.
    Dominated { by: Outcome, utilities: Vec<V> },
    /// Earliest round whose swap certifies Prop1, per agent.
    Prop1Rounds(Vec<usize>),
    /// The outcome reaches ratio `achieved` for `agent` while `optimum` is attainable.
    MppGap { agent: usize, achieved: V, optimum: V, optimal: Outcome },
}

impl<V: fmt::Display> fmt::Display for Witness<V> {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Witness::Agent { agent, utility, threshold } => {
                write!(f, "agent {}: value {utility} vs required {threshold}", agent + 1)
            }
            Witness::Dominated { by, utilities } => {
                write!(f, "dominated by {by} with utilities (")?;
                for (k, u) in utilities.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{u}")?;
                }
                f.write_str(")")
            }
            Witness::Prop1Rounds(rounds) => {
                f.write_str("certifying rounds:")?;
                for (i, t) in rounds.iter().enumerate() {
                    write!(f, " agent {}->round {}", i + 1, t + 1)?;
                }
                Ok(())
            }
            Witness::MppGap { agent, achieved, optimum, optimal } => {
                write!(f, "agent {} reaches ratio {achieved} but {optimum} is attainable via {optimal}", agent + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessReport<V> {
    pub property: Property,
    /// The `alpha` or `beta` the check was run with.
    pub parameter: Option<V>,
    pub verdict: bool,
    pub witness: Option<Witness<V>>,
}

impl<V> FairnessReport<V> {
    fn pass(property: Property, parameter: Option<V>, witness: Option<Witness<V>>) -> Self {
        Self { property, parameter, verdict: true, witness }
    }

    fn fail(property: Property, parameter: Option<V>, witness: Witness<V>) -> Self {
        Self { property, parameter, verdict: false, witness: Some(witness) }
    }
}

fn check_alpha<V: Scalar>(alpha: &V) -> Result<()> {
    if alpha.is_positive() && *alpha <= V::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

fn threshold_check<V: Scalar>(
    instance: &Instance<V>,
    outcome: &Outcome,
    property: Property,
    parameter: V,
    threshold: impl Fn(usize) -> V,
) -> Result<FairnessReport<V>> {
    instance.check_full_outcome(outcome)?;
    let u = accumulated_utility(instance, outcome)?;
    for i in 0..instance.n() {
        let need = threshold(i);
        if u[i] < need {
            return Ok(FairnessReport::fail(
                property,
                Some(parameter),
                Witness::Agent { agent: i, utility: u[i].clone(), threshold: need },
            ));
        }
    }
    Ok(FairnessReport::pass(property, Some(parameter), None))
}

/// Pareto optimality by exhaustive search over all `m^T` outcomes.
pub fn check_pareto_optimal<V: Scalar>(
    instance: &Instance<V>,
    outcome: &Outcome,
    config: &SearchConfig,
) -> Result<FairnessReport<V>> {
    instance.check_full_outcome(outcome)?;
    let base = accumulated_utility(instance, outcome)?;
    let base = base.values();
    let dominating = find_first(instance, config, |_, u| {
        u.iter().zip(base).all(|(a, b)| a >= b) && u.iter().zip(base).any(|(a, b)| a > b)
    })?;
    Ok(match dominating {
        None => FairnessReport::pass(Property::ParetoOptimal, None, None),
        Some(by) => {
            let utilities = accumulated_utility(instance, &by)?.into_values();
            FairnessReport::fail(Property::ParetoOptimal, None, Witness::Dominated { by, utilities })
        }
    })
}

/// `u_i >= alpha * Prop_i` for every agent.
pub fn check_alpha_prop<V: Scalar>(instance: &Instance<V>, outcome: &Outcome, alpha: &V) -> Result<FairnessReport<V>> {
    check_alpha(alpha)?;
    let props = prop_shares(instance);
    threshold_check(instance, outcome, Property::AlphaProp, alpha.clone(), |i| alpha.clone() * props[i].clone())
}

/// For every agent some single round, swapped to the agent's favourite,
/// lifts that agent to `alpha * Prop_i`. Reports the earliest such round.
pub fn check_alpha_prop1<V: Scalar>(instance: &Instance<V>, outcome: &Outcome, alpha: &V) -> Result<FairnessReport<V>> {
    check_alpha(alpha)?;
    instance.check_full_outcome(outcome)?;
    let u = accumulated_utility(instance, outcome)?;
    let props = prop_shares(instance);
    let mut certifying = Vec::with_capacity(instance.n());
    for i in 0..instance.n() {
        let need = alpha.clone() * props[i].clone();
        let swapped = |t: usize| {
            let r = instance.round(t);
            u[i].clone() - r.value(i, outcome[t]).clone() + r.max_value(i).clone()
        };
        match (0..instance.horizon()).find(|&t| swapped(t) >= need) {
            Some(t) => certifying.push(t),
            None => {
                let best = (0..instance.horizon()).map(swapped).max().expect("T >= 1");
                return Ok(FairnessReport::fail(
                    Property::AlphaProp1,
                    Some(alpha.clone()),
                    Witness::Agent { agent: i, utility: best, threshold: need },
                ));
            }
        }
    }
    Ok(FairnessReport::pass(Property::AlphaProp1, Some(alpha.clone()), Some(Witness::Prop1Rounds(certifying))))
}

/// `u_i >= alpha * RRS_i` for every agent.
pub fn check_alpha_rrs<V: Scalar>(instance: &Instance<V>, outcome: &Outcome, alpha: &V) -> Result<FairnessReport<V>> {
    check_alpha(alpha)?;
    let shares = rrs_shares(instance);
    threshold_check(instance, outcome, Property::AlphaRrs, alpha.clone(), |i| alpha.clone() * shares[i].clone())
}

/// `u_i + beta >= Prop_i` for every agent.
pub fn check_additive_prop<V: Scalar>(
    instance: &Instance<V>,
    outcome: &Outcome,
    beta: &V,
) -> Result<FairnessReport<V>> {
    if !beta.is_positive() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let props = prop_shares(instance);
    threshold_check(instance, outcome, Property::AdditiveProp, beta.clone(), |i| props[i].clone() - beta.clone())
}

/// `min_i u_i / Prop_i`, the largest alpha (uncapped) the utilities support.
pub fn min_prop_ratio<V: Scalar>(props: &[V], utilities: &[V]) -> V {
    utilities.iter().zip(props).map(|(u, p)| u.clone() / p.clone()).min().expect("n >= 1")
}

/// Lexicographically smallest outcome maximising `min_i u_i / Prop_i`,
/// with that (uncapped) maximum.
pub fn best_prop_ratio<V: Scalar>(instance: &Instance<V>, config: &SearchConfig) -> Result<(Outcome, V)> {
    let props = prop_shares(instance);
    let best = best_outcome(instance, config, |_, u| Some(min_prop_ratio(&props, u)))?;
    Ok(best.expect("at least one outcome"))
}

/// Largest `alpha` in `[0, 1]` for which some outcome satisfies alpha-Prop.
///
/// Alpha-Prop is only defined for `alpha <= 1`, so the attainable ratio is
/// capped at one; zero means every outcome leaves some agent empty-handed.
pub fn max_possible_alpha<V: Scalar>(instance: &Instance<V>, config: &SearchConfig) -> Result<V> {
    let (_, ratio) = best_prop_ratio(instance, config)?;
    Ok(ratio.min(V::one()))
}

/// Max-Possible-Prop: the outcome attains the instance's largest alpha.
pub fn check_mpp<V: Scalar>(
    instance: &Instance<V>,
    outcome: &Outcome,
    config: &SearchConfig,
) -> Result<FairnessReport<V>> {
    instance.check_full_outcome(outcome)?;
    let (optimal, best) = best_prop_ratio(instance, config)?;
    let optimum = best.min(V::one());
    mpp_verdict(instance, outcome, optimum, optimal)
}

/// MPP verdict against a precomputed `optimum` (the capped alpha) and an outcome achieving it.
pub fn mpp_verdict<V: Scalar>(
    instance: &Instance<V>,
    outcome: &Outcome,
    optimum: V,
    optimal: Outcome,
) -> Result<FairnessReport<V>> {
    let u = accumulated_utility(instance, outcome)?;
    let props = prop_shares(instance);
    for i in 0..instance.n() {
        let ratio = u[i].clone() / props[i].clone();
        if ratio < optimum {
            return Ok(FairnessReport::fail(
                Property::Mpp,
                None,
                Witness::MppGap { agent: i, achieved: ratio, optimum, optimal },
            ));
        }
    }
    Ok(FairnessReport::pass(Property::Mpp, None, None))
}

/// One agent's Prop1 bookkeeping after a prefix of rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Entry<V> {
    /// `sum_{k <= t} cMax^k_i / n`.
    pub prop_up_to: V,
    /// Largest single-round gain from swapping to the agent's favourite.
    pub max_swap_gain: V,
    /// `u_i(o^t) + max_swap_gain - prop_up_to`; negative means Prop1 already fails.
    pub slack: V,
}

/// Prop1 slack for every prefix length `1..=len` and every agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Trace<V> {
    /// `rounds[t][i]` describes agent `i` after `t + 1` rounds.
    pub rounds: Vec<Vec<Prop1Entry<V>>>,
}

impl<V: Scalar> Prop1Trace<V> {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Slack of `agent` after `rounds` decided rounds (1-based count).
    pub fn slack(&self, rounds: usize, agent: usize) -> &V {
        &self.rounds[rounds - 1][agent].slack
    }

    /// Earliest `(rounds decided, agent)` with negative slack.
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        self.rounds
            .iter()
            .enumerate()
            .find_map(|(t, row)| row.iter().position(|e| e.slack.is_negative()).map(|i| (t + 1, i)))
    }
}

pub fn prop1_trace<V: Scalar>(instance: &Instance<V>, prefix: &Outcome) -> Result<Prop1Trace<V>> {
    instance.check_outcome(prefix)?;
    let n = instance.n();
    let nv = V::from_count(n);
    let mut utility = vec![V::zero(); n];
    let mut maxima = vec![V::zero(); n];
    let mut gains = vec![V::zero(); n];
    let mut rounds = Vec::with_capacity(prefix.len());
    for (t, &c) in prefix.iter().enumerate() {
        let r = instance.round(t);
        let row = (0..n)
            .map(|i| {
                let top = r.max_value(i).clone();
                let got = r.value(i, c).clone();
                utility[i] = utility[i].clone() + got.clone();
                maxima[i] = maxima[i].clone() + top.clone();
                let gain = top - got;
                if gain > gains[i] {
                    gains[i] = gain;
                }
                let prop_up_to = maxima[i].clone() / nv.clone();
                Prop1Entry {
                    slack: utility[i].clone() + gains[i].clone() - prop_up_to.clone(),
                    prop_up_to,
                    max_swap_gain: gains[i].clone(),
                }
            })
            .collect();
        rounds.push(row);
    }
    Ok(Prop1Trace { rounds })
}
