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

//! Per-round axioms for online mechanisms: local Pareto optimality,
//! invariance to affine transformations, approval and homogeneity.
//!
//! The axioms quantify over all instances, so these harnesses decide a
//! single supplied case; a pass is evidence, a fail is a replayable witness.

use crate::error::{Error, Result};
use crate::model::{accumulated_utility, Instance, Outcome, RoundMatrix, UtilityVector};
use crate::offline::Permutation;
use crate::online::{run_online, OnlineMechanism, OnlineState};
use crate::scalar::Scalar;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    LocalPo,
    Iat,
    Approval,
    Homogeneity,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [Axiom::LocalPo, Axiom::Iat, Axiom::Approval, Axiom::Homogeneity];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Axiom::LocalPo => "local PO",
            Axiom::Iat => "IAT",
            Axiom::Approval => "approval",
            Axiom::Homogeneity => "homogeneity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomWitness {
    /// In `round`, `candidate` dominates the chosen one.
    Dominated { round: usize, chosen: usize, candidate: usize },
    /// Outcomes on the original and transformed instance deliver different utilities.
    Affine { original: Outcome, transformed: Outcome },
    /// The choice is not among the approval winners.
    Approval { chosen: usize, winners: Vec<usize> },
    /// Round `round`'s choice differs in value once agents are replicated.
    Homogeneity { round: usize, original: usize, replicated: usize },
}

impl fmt::Display for AxiomWitness {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            AxiomWitness::Dominated { round, chosen, candidate } => {
                write!(f, "round {}: c{} dominates chosen c{}", round + 1, candidate + 1, chosen + 1)
            }
            AxiomWitness::Affine { original, transformed } => {
                write!(f, "original outcome {original}, transformed outcome {transformed}")
            }
            AxiomWitness::Approval { chosen, winners } => {
                let w: Vec<String> = winners.iter().map(|c| format!("c{}", c + 1)).collect();
                write!(f, "chose c{} outside approval winners {{{}}}", chosen + 1, w.join(","))
            }
            AxiomWitness::Homogeneity { round, original, replicated } => {
                write!(f, "round {}: c{} originally, c{} after replication", round + 1, original + 1, replicated + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    /// Mechanism name; `None` for outcome-level checks.
    pub mechanism: Option<String>,
    pub pass: bool,
    pub witness: Option<AxiomWitness>,
}

impl AxiomVerdict {
    fn new(axiom: Axiom, mechanism: Option<&OnlineMechanism>, witness: Option<AxiomWitness>) -> Self {
        Self { axiom, mechanism: mechanism.map(|m| m.to_string()), pass: witness.is_none(), witness }
    }
}

/// First candidate (smallest index) dominating `chosen` in `round`.
pub fn dominating_candidate<V: Scalar>(round: &RoundMatrix<V>, chosen: usize) -> Option<usize> {
    let base = round.column(chosen);
    (0..round.m()).find(|&c| {
        let col = round.column(c);
        col.iter().zip(&base).all(|(a, b)| a >= b) && col.iter().zip(&base).any(|(a, b)| a > b)
    })
}

/// No round's choice is dominated by another candidate of that round.
pub fn check_local_po<V: Scalar>(instance: &Instance<V>, outcome: &Outcome) -> Result<AxiomVerdict> {
    instance.check_full_outcome(outcome)?;
    let witness = outcome.iter().enumerate().find_map(|(t, &chosen)| {
        dominating_candidate(instance.round(t), chosen).map(|candidate| AxiomWitness::Dominated {
            round: t,
            chosen,
            candidate,
        })
    });
    Ok(AxiomVerdict::new(Axiom::LocalPo, None, witness))
}

/// Runs `mechanism` on `instance` and on `a * v + b`; passes when both
/// outcomes give the same utilities under the original valuations.
pub fn iat_test<V: Scalar>(mechanism: &OnlineMechanism, instance: &Instance<V>, a: &V, b: &V) -> Result<AxiomVerdict> {
    if !a.is_positive() {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {a}")));
    }
    let rows = instance.rounds().iter().map(|r| r.map(|v| a.clone() * v.clone() + b.clone()).to_rows()).collect();
    let transformed = Instance::from_rows(rows).map_err(|e| match e {
        Error::InvalidInstance(msg) => Error::Precondition(format!("transformed valuations invalid: {msg}")),
        other => other,
    })?;
    let original = run_online(mechanism, instance)?;
    let moved = run_online(mechanism, &transformed)?;
    let same = accumulated_utility(instance, &original)? == accumulated_utility(instance, &moved)?;
    let witness = (!same).then_some(AxiomWitness::Affine { original, transformed: moved });
    Ok(AxiomVerdict::new(Axiom::Iat, Some(mechanism), witness))
}

/// Approval winners: candidates approved by the most agents.
pub fn approval_winners<V: Scalar>(round: &RoundMatrix<V>) -> Vec<usize> {
    let scores: Vec<V> = (0..round.m()).map(|c| round.column(c).into_iter().fold(V::zero(), |a, v| a + v)).collect();
    let best = scores.iter().max().expect("m >= 1").clone();
    (0..round.m()).filter(|&c| scores[c] == best).collect()
}

/// With 0/1 valuations and equal accumulated utilities, the mechanism's
/// next choice must be an approval winner.
pub fn approval_test<V: Scalar>(
    mechanism: &OnlineMechanism,
    round: &RoundMatrix<V>,
    utilities: &UtilityVector<V>,
    rounds_done: usize,
) -> Result<AxiomVerdict> {
    if !round.rows().all(|row| row.iter().all(|v| v.is_zero() || v.is_one())) {
        return Err(Error::Precondition("approval needs 0/1 valuations".into()));
    }
    if utilities.len() != round.n() {
        return Err(Error::LengthMismatch { left: utilities.len(), right: round.n() });
    }
    if utilities.values().windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Precondition("approval needs equal accumulated utilities".into()));
    }
    let prefix = Outcome::new(vec![0; rounds_done]);
    let state = OnlineState::from_parts(mechanism.clone(), prefix, utilities.clone())?;
    let (chosen, _) = state.step(round)?;
    let winners = approval_winners(round);
    let witness = (!winners.contains(&chosen)).then_some(AxiomWitness::Approval { chosen, winners });
    Ok(AxiomVerdict::new(Axiom::Approval, Some(mechanism), witness))
}

/// Round robin over replicated agents: each agent's copies take
/// consecutive turns in the original order.
pub fn replicated_permutation(pi: &Permutation, copies: usize) -> Permutation {
    let n = pi.len();
    let order = pi.order().iter().flat_map(|&a| (0..copies).map(move |k| k * n + a)).collect();
    Permutation::new(order).expect("bijection by construction")
}

fn replicated_mechanism(mechanism: &OnlineMechanism, copies: usize) -> OnlineMechanism {
    match mechanism {
        OnlineMechanism::RoundRobin(pi) => OnlineMechanism::RoundRobin(replicated_permutation(pi, copies)),
        other => other.clone(),
    }
}

/// Decides round `round` (0-based) after the mechanism's own first
/// `round` choices, once as is and once with every agent replicated
/// `copies` times; passes when the two choices are worth the same to
/// every original agent.
pub fn homogeneity_test<V: Scalar>(
    mechanism: &OnlineMechanism,
    instance: &Instance<V>,
    copies: usize,
    round: usize,
) -> Result<AxiomVerdict> {
    if copies == 0 {
        return Err(Error::InvalidParameter("copies must be at least 1".into()));
    }
    instance.check_round(round)?;
    let mut state = OnlineState::new(mechanism.clone(), instance.n(), Some(instance.horizon()))?;
    for t in 0..round {
        state = state.step(instance.round(t))?.1;
    }
    let (original, _) = state.step(instance.round(round))?;
    let replicated_utilities =
        UtilityVector::from_values((0..copies).flat_map(|_| state.utilities().values().iter().cloned()).collect());
    let replica =
        OnlineState::from_parts(replicated_mechanism(mechanism, copies), state.prefix().clone(), replicated_utilities)?;
    let (replicated, _) = replica.step(&instance.round(round).replicate_agents(copies))?;
    let r = instance.round(round);
    let same = (0..instance.n()).all(|i| r.value(i, original) == r.value(i, replicated));
    let witness = (!same).then_some(AxiomWitness::Homogeneity { round, original, replicated });
    Ok(AxiomVerdict::new(Axiom::Homogeneity, Some(mechanism), witness))
}
