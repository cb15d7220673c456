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

//! Online mechanisms: one candidate per round, seeing only the rounds
//! revealed so far.
//!
//! [`OnlineState`] is an immutable value; [`OnlineState::step`] consumes the
//! current round's valuations and returns the choice with the next state.
//! Adaptive callers pick the next matrix after seeing each choice.

use crate::borda::{tracker_step, TrackerState};
use crate::error::{Error, Result};
use crate::model::{leximin_key, Instance, Outcome, RoundMatrix, UtilityVector};
use crate::offline::Permutation;
use crate::scalar::Scalar;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OnlineMechanism {
    /// Round `t` goes to agent `pi(t mod n)`'s favourite.
    RoundRobin(Permutation),
    /// Greedy Nash welfare of the accumulated utilities.
    Mnw,
    /// Greedy leximin of the accumulated utilities.
    LMin,
    /// Borda-only covering construction that keeps everyone within one of Prop.
    Tracker,
}

impl OnlineMechanism {
    pub fn name(&self) -> &'static str {
        match self {
            OnlineMechanism::RoundRobin(_) => "rr",
            OnlineMechanism::Mnw => "mnw",
            OnlineMechanism::LMin => "lmin",
            OnlineMechanism::Tracker => "tracker",
        }
    }

    /// Parses `rr`, `mnw`, `lmin` or `tracker`; round robin gets `pi`, or the
    /// identity over `n` agents.
    pub fn parse(name: &str, n: usize, pi: Option<Permutation>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rr" => Ok(OnlineMechanism::RoundRobin(pi.unwrap_or_else(|| Permutation::identity(n)))),
            "mnw" => Ok(OnlineMechanism::Mnw),
            "lmin" => Ok(OnlineMechanism::LMin),
            "tracker" => Ok(OnlineMechanism::Tracker),
            other => Err(Error::Parse(format!("unknown online mechanism {other:?} (rr|mnw|lmin|tracker)"))),
        }
    }
}

impl fmt::Display for OnlineMechanism {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            OnlineMechanism::RoundRobin(pi) => write!(f, "rr{pi}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnlineState<V> {
    mechanism: OnlineMechanism,
    n: usize,
    m: Option<usize>,
    horizon: Option<usize>,
    prefix: Outcome,
    utility: UtilityVector<V>,
    tracker: Option<TrackerState>,
}

impl<V: Scalar> OnlineState<V> {
    /// Fresh state for `n` agents. With a `horizon`, steps past it fail.
    pub fn new(mechanism: OnlineMechanism, n: usize, horizon: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("need at least one agent".into()));
        }
        if let OnlineMechanism::RoundRobin(pi) = &mechanism {
            pi.check_agents(n)?;
        }
        Ok(Self {
            mechanism,
            n,
            m: None,
            horizon,
            prefix: Outcome::empty(),
            utility: UtilityVector::zeros(n),
            tracker: None,
        })
    }

    /// State after `prefix` was chosen with the given accumulated utilities.
    /// The caller vouches that the two are consistent.
    pub fn from_parts(mechanism: OnlineMechanism, prefix: Outcome, utilities: UtilityVector<V>) -> Result<Self> {
        let mut state = Self::new(mechanism, utilities.len(), None)?;
        state.prefix = prefix;
        state.utility = utilities;
        Ok(state)
    }

    pub fn mechanism(&self) -> &OnlineMechanism {
        &self.mechanism
    }

    /// 1-based index of the next round.
    pub fn round_index(&self) -> usize {
        self.prefix.len() + 1
    }

    pub fn prefix(&self) -> &Outcome {
        &self.prefix
    }

    pub fn utilities(&self) -> &UtilityVector<V> {
        &self.utility
    }

    pub fn tracker(&self) -> Option<&TrackerState> {
        self.tracker.as_ref()
    }

    /// Chooses this round's candidate and returns it with the advanced state.
    pub fn step(&self, round: &RoundMatrix<V>) -> Result<(usize, OnlineState<V>)> {
        let t = self.prefix.len();
        if let Some(horizon) = self.horizon {
            if t >= horizon {
                return Err(Error::RoundOverflow { round: t + 1, horizon });
            }
        }
        if round.n() != self.n {
            return Err(Error::LengthMismatch { left: round.n(), right: self.n });
        }
        if let Some(m) = self.m {
            if round.m() != m {
                return Err(Error::LengthMismatch { left: round.m(), right: m });
            }
        }
        let mut next = self.clone();
        next.m = Some(round.m());
        let choice = match &self.mechanism {
            OnlineMechanism::RoundRobin(pi) => round.top_candidate(pi.turn(t)),
            OnlineMechanism::Mnw => self.mnw_choice(round),
            OnlineMechanism::LMin => self.lmin_choice(round),
            OnlineMechanism::Tracker => {
                let state = TrackerState::resume(self.n, round.m(), t as u64, self.utility.values())?;
                let (c, s) = tracker_step(&state, &self.utility, round)?;
                next.tracker = Some(s);
                c
            }
        };
        next.utility.add_choice(round, choice);
        next.prefix.push(choice);
        Ok((choice, next))
    }

    /// Most agents with positive utility, then largest product over them.
    fn mnw_choice(&self, round: &RoundMatrix<V>) -> usize {
        argmax_candidate(round.m(), |c| {
            let after = self.utility.with_choice(round, c);
            let positive: Vec<&V> = after.values().iter().filter(|u| u.is_positive()).collect();
            let prod = positive.iter().fold(V::one(), |acc, u| acc * (*u).clone());
            (positive.len(), prod)
        })
    }

    fn lmin_choice(&self, round: &RoundMatrix<V>) -> usize {
        argmax_candidate(round.m(), |c| leximin_key(self.utility.with_choice(round, c).values()))
    }
}

/// Smallest candidate index with the largest key.
fn argmax_candidate<K: Ord>(m: usize, key: impl Fn(usize) -> K) -> usize {
    let mut best = 0;
    let mut best_key = key(0);
    for c in 1..m {
        let k = key(c);
        if k > best_key {
            best = c;
            best_key = k;
        }
    }
    best
}

/// Source of round valuations for an online run, asked for round `t`
/// (0-based) only after rounds `0..t` are decided.
pub trait RoundFeed<V> {
    fn horizon(&self) -> usize;
    fn agents(&self) -> usize;
    fn reveal(&mut self, t: usize, prefix: &Outcome) -> Result<RoundMatrix<V>>;
}

impl<V: Scalar> RoundFeed<V> for &Instance<V> {
    fn horizon(&self) -> usize {
        Instance::horizon(self)
    }

    fn agents(&self) -> usize {
        self.n()
    }

    fn reveal(&mut self, t: usize, _prefix: &Outcome) -> Result<RoundMatrix<V>> {
        Ok(self.round(t).clone())
    }
}

/// States after each step of a run over `feed`, starting after round 1.
pub fn online_history<V: Scalar, F: RoundFeed<V>>(
    mechanism: &OnlineMechanism,
    mut feed: F,
) -> Result<Vec<OnlineState<V>>> {
    let horizon = feed.horizon();
    let mut state = OnlineState::new(mechanism.clone(), feed.agents(), Some(horizon))?;
    let mut history = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let round = feed.reveal(t, state.prefix())?;
        let (_, next) = state.step(&round)?;
        history.push(next.clone());
        state = next;
    }
    Ok(history)
}

/// Runs `mechanism` over the rounds of `instance`, revealing one at a time.
pub fn run_online<V: Scalar>(mechanism: &OnlineMechanism, instance: &Instance<V>) -> Result<Outcome> {
    let history = online_history(mechanism, instance)?;
    Ok(history.last().map(|s| s.prefix().clone()).unwrap_or_default())
}
