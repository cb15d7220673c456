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

//! Borda valuations: rankings, validation, generation, and the covering
//! construction that keeps every agent within one point of Prop online.

use crate::error::{Error, Result};
use crate::model::{Instance, RoundMatrix, UtilityVector};
use crate::random::{random_ranking, rng};
use crate::scalar::Scalar;

/// Per round, per agent: candidates best first (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingProfile {
    m: usize,
    rankings: Vec<Vec<Vec<usize>>>,
}

impl RankingProfile {
    pub fn new(m: usize, rankings: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if m == 0 || rankings.is_empty() || rankings[0].is_empty() {
            return Err(Error::InvalidInstance("ranking profile needs m, n, T >= 1".into()));
        }
        let n = rankings[0].len();
        for (t, round) in rankings.iter().enumerate() {
            if round.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "round {} has {} rankings, expected {n}",
                    t + 1,
                    round.len()
                )));
            }
            for (i, order) in round.iter().enumerate() {
                let mut seen = vec![false; m];
                let ok = order.len() == m && order.iter().all(|&c| c < m && !std::mem::replace(&mut seen[c], true));
                if !ok {
                    return Err(Error::InvalidInstance(format!(
                        "round {}, agent {}: not a ranking of {m} candidates",
                        t + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { m, rankings })
    }

    /// From 1-based candidate labels.
    pub fn from_labels(m: usize, rankings: &[Vec<Vec<usize>>]) -> Result<Self> {
        let zero_based = rankings
            .iter()
            .map(|round| {
                round
                    .iter()
                    .map(|order| {
                        order
                            .iter()
                            .map(|&c| {
                                c.checked_sub(1)
                                    .ok_or_else(|| Error::InvalidInstance("candidate labels start at 1".into()))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, zero_based)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rankings[0].len()
    }

    pub fn horizon(&self) -> usize {
        self.rankings.len()
    }

    pub fn ranking(&self, round: usize, agent: usize) -> &[usize] {
        &self.rankings[round][agent]
    }

    pub fn rankings(&self) -> &[Vec<Vec<usize>>] {
        &self.rankings
    }
}

/// Best candidate gets `m - 1`, worst gets 0.
pub fn borda_round<V: Scalar>(m: usize, orders: &[Vec<usize>]) -> Result<RoundMatrix<V>> {
    let rows = orders
        .iter()
        .map(|order| {
            let mut row = vec![V::zero(); m];
            for (pos, &c) in order.iter().enumerate() {
                row[c] = V::from_count(m - 1 - pos);
            }
            row
        })
        .collect();
    RoundMatrix::new(rows)
}

/// Fails for `m = 1`, where every valuation is zero.
pub fn borda_from_rankings<V: Scalar>(profile: &RankingProfile) -> Result<Instance<V>> {
    let rounds = profile.rankings.iter().map(|round| borda_round(profile.m, round)).collect::<Result<Vec<_>>>()?;
    Instance::new(rounds)
}

/// Row order recovered from a Borda instance: candidates by decreasing value.
pub fn rankings_from_borda<V: Scalar>(instance: &Instance<V>) -> Result<RankingProfile> {
    if !is_borda(instance) {
        return Err(Error::Precondition("instance is not Borda".into()));
    }
    let rankings = instance
        .rounds()
        .iter()
        .map(|round| {
            round
                .rows()
                .map(|row| {
                    let mut order: Vec<usize> = (0..row.len()).collect();
                    order.sort_by(|&a, &b| row[b].cmp(&row[a]));
                    order
                })
                .collect()
        })
        .collect();
    RankingProfile::new(instance.m(), rankings)
}

/// Every row is a permutation of `0..m`.
pub fn is_borda_round<V: Scalar>(round: &RoundMatrix<V>) -> bool {
    let m = round.m();
    round.rows().all(|row| {
        let mut seen = vec![false; m];
        row.iter().all(|v| match v.to_usize_exact() {
            Some(k) if k < m && !seen[k] => {
                seen[k] = true;
                true
            }
            _ => false,
        })
    })
}

pub fn is_borda<V: Scalar>(instance: &Instance<V>) -> bool {
    instance.rounds().iter().all(is_borda_round)
}

/// Independent uniform rankings per (round, agent); `m >= 2`.
pub fn random_borda_instance<V: Scalar>(n: usize, m: usize, t: usize, seed: u64) -> Instance<V> {
    assert!(n > 0 && m > 1 && t > 0, "need n >= 1, m >= 2, T >= 1");
    let mut rng = rng(seed);
    let rankings = (0..t).map(|_| (0..n).map(|_| random_ranking(&mut rng, m)).collect()).collect();
    let profile = RankingProfile::new(m, rankings).expect("valid by construction");
    borda_from_rankings(&profile).expect("m >= 2")
}

/// `floor(t (m - 1) / n)`.
pub fn qprop(t: u64, m: u64, n: u64) -> u64 {
    t * (m - 1) / n
}

/// `t (m - 1) mod n`.
pub fn rprop(t: u64, m: u64, n: u64) -> u64 {
    t * (m - 1) % n
}

/// Smallest candidate worth at least `x[i]` to every agent `i`.
///
/// With Borda rows and `sum(x) = m - 1` one always exists: agent `i` rules
/// out exactly `x[i]` candidates.
pub fn covering_candidate<V: Scalar>(round: &RoundMatrix<V>, x: &[u64]) -> Result<usize> {
    if !is_borda_round(round) {
        return Err(Error::Precondition("round is not Borda".into()));
    }
    if x.len() != round.n() {
        return Err(Error::LengthMismatch { left: x.len(), right: round.n() });
    }
    let total: u64 = x.iter().sum();
    if total != round.m() as u64 - 1 {
        return Err(Error::Precondition(format!("targets sum to {total}, expected {}", round.m() - 1)));
    }
    (0..round.m())
        .find(|&c| (0..round.n()).all(|i| *round.value(i, c) >= V::from_count(x[i] as usize)))
        .ok_or_else(|| Error::Precondition("no covering candidate".into()))
}

/// Bookkeeping for the covering construction after `t` rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackerState {
    pub t: u64,
    pub n: usize,
    pub m: usize,
    pub qprop: u64,
    pub rprop: u64,
    /// Agents whose utility is at least `qprop + 1`.
    pub strict: Vec<usize>,
    /// Targets used for the latest round; empty before the first step.
    pub target: Vec<u64>,
}

impl TrackerState {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m < 2 {
            return Err(Error::InvalidParameter("tracker needs n >= 1 and m >= 2".into()));
        }
        Ok(Self { t: 0, n, m, qprop: 0, rprop: 0, strict: Vec::new(), target: Vec::new() })
    }

    /// State after `t` rounds with the given utilities; the tracker needs
    /// nothing else from the past.
    pub fn resume<V: Scalar>(n: usize, m: usize, t: u64, utilities: &[V]) -> Result<Self> {
        let u = integer_utilities(utilities)?;
        Ok(Self::new(n, m)?.at(t, &u, Vec::new()))
    }

    fn at(&self, t: u64, utilities: &[u64], target: Vec<u64>) -> Self {
        let (m, n) = (self.m as u64, self.n as u64);
        let q = qprop(t, m, n);
        Self {
            t,
            n: self.n,
            m: self.m,
            qprop: q,
            rprop: rprop(t, m, n),
            strict: (0..self.n).filter(|&i| utilities[i] > q).collect(),
            target,
        }
    }

    /// Every agent has at least `qprop`, and at least `rprop` have more.
    pub fn conditions_hold(&self, utilities: &[u64]) -> bool {
        utilities.iter().all(|&u| u >= self.qprop) && self.strict.len() as u64 >= self.rprop
    }

    /// Next round's targets: `qProp^1` each, plus one for the first agents
    /// outside the strict set, plus one for the first agents overall, so the
    /// total is `m - 1`.
    pub fn targets(&self) -> Vec<u64> {
        let (m, n) = (self.m as u64, self.n as u64);
        let (q1, r1) = (qprop(1, m, n), rprop(1, m, n) as usize);
        let mut x = vec![q1; self.n];
        let outside: Vec<usize> = (0..self.n).filter(|i| !self.strict.contains(i)).collect();
        let lifted = outside.len().min(r1);
        for &i in &outside[..lifted] {
            x[i] += 1;
        }
        for xi in x.iter_mut().take(r1 - lifted) {
            *xi += 1;
        }
        x
    }
}

fn integer_utilities<V: Scalar>(utilities: &[V]) -> Result<Vec<u64>> {
    utilities
        .iter()
        .map(|u| {
            u.to_usize_exact().map(|k| k as u64).ok_or_else(|| Error::Precondition(format!("non-integer utility {u}")))
        })
        .collect()
}

/// One round of the covering construction: the smallest candidate meeting
/// every agent's target, and the state after electing it.
pub fn tracker_step<V: Scalar>(
    state: &TrackerState,
    utilities: &UtilityVector<V>,
    round: &RoundMatrix<V>,
) -> Result<(usize, TrackerState)> {
    if round.n() != state.n || round.m() != state.m {
        return Err(Error::LengthMismatch { left: round.n() * round.m(), right: state.n * state.m });
    }
    let before = integer_utilities(utilities.values())?;
    let current = state.at(state.t, &before, Vec::new());
    if !current.conditions_hold(&before) {
        return Err(Error::Precondition(format!("tracker invariant broken before round {}", state.t + 1)));
    }
    let x = current.targets();
    let c = covering_candidate(round, &x)?;
    let after = integer_utilities(utilities.with_choice(round, c).values())?;
    let next = state.at(state.t + 1, &after, x);
    if !next.conditions_hold(&after) {
        return Err(Error::Precondition(format!("tracker invariant broken after round {}", next.t)));
    }
    Ok((c, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_outcomes;
    use crate::fairness::{
        best_prop_ratio, check_additive_prop, check_alpha_prop1, check_alpha_rrs, check_mpp, max_possible_alpha,
        min_prop_ratio, mpp_verdict,
    };
    use crate::model::{accumulated_utility, leximin_compare, prop_shares, Outcome};
    use crate::offline::{leximin_offline, mnw_offline, rr_offline, Normalization, Permutation};
    use crate::online::{online_history, run_online, OnlineMechanism};
    use crate::{Ratio, SearchConfig, SmallRatio};
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn r(n: i64) -> Ratio {
        Ratio::from_integer(n.into())
    }

    fn utilities(inst: &Instance<Ratio>, outcome: &Outcome) -> Vec<Ratio> {
        accumulated_utility(inst, outcome).unwrap().into_values()
    }

    #[test]
    fn ranking_conversion() {
        let p = RankingProfile::from_labels(3, &[vec![vec![1, 2, 3], vec![3, 2, 1]]]).unwrap();
        let inst: Instance<Ratio> = borda_from_rankings(&p).unwrap();
        assert_eq!(inst.round(0).row(0), &[r(2), r(1), r(0)]);
        assert_eq!(inst.round(0).row(1), &[r(0), r(1), r(2)]);
        let ex1 = RankingProfile::from_labels(6, &[vec![vec![1, 2, 3, 4, 5, 6], vec![6, 5, 3, 1, 2, 4]]]).unwrap();
        let inst: Instance<Ratio> = borda_from_rankings(&ex1).unwrap();
        let expected = Instance::<Ratio>::from_ints(&[&[&[5, 4, 3, 2, 1, 0], &[2, 1, 3, 0, 4, 5]]]).unwrap();
        assert_eq!(inst, expected);
        assert!(RankingProfile::from_labels(3, &[vec![vec![1, 1, 3]]]).is_err());
        assert!(RankingProfile::from_labels(3, &[vec![vec![1, 2]]]).is_err());
        assert!(RankingProfile::from_labels(3, &[vec![vec![0, 1, 2]]]).is_err());
        assert!(RankingProfile::from_labels(3, &[vec![vec![1, 2, 3]], vec![]]).is_err());
        let single = RankingProfile::from_labels(1, &[vec![vec![1]]]).unwrap();
        assert!(borda_from_rankings::<Ratio>(&single).is_err());
    }

    #[test]
    fn borda_detection() {
        let ex1 = Instance::<Ratio>::from_ints(&[&[&[5, 4, 3, 2, 1, 0], &[2, 1, 3, 0, 4, 5]]]).unwrap();
        assert!(is_borda(&ex1));
        let ex2 =
            Instance::<Ratio>::from_ints(&[&[&[5000, 2500, 50], &[30, 40, 50]], &[&[0, 1, 0], &[0, 1, 0]]]).unwrap();
        assert!(!is_borda(&ex2));
        assert!(is_borda_round(&RoundMatrix::<Ratio>::zeros(3, 1)));
        assert!(!is_borda_round(&RoundMatrix::<Ratio>::from_ints(&[&[1, 1]]).unwrap()));
        let half = RoundMatrix::<Ratio>::new(vec![vec![Ratio::new(1.into(), 2.into()), r(0)]]).unwrap();
        assert!(!is_borda_round(&half));
    }

    #[test]
    fn random_generation() {
        let a: Instance<Ratio> = random_borda_instance(3, 4, 5, 42);
        assert_eq!(a, random_borda_instance(3, 4, 5, 42));
        assert_ne!(a, random_borda_instance(3, 4, 5, 43));
        for seed in 0..50 {
            assert!(is_borda(&random_borda_instance::<Ratio>(1 + seed as usize % 4, 2 + seed as usize % 5, 3, seed)));
        }
    }

    #[test]
    fn random_snapshot() {
        let inst: Instance<Ratio> = random_borda_instance(2, 3, 2, 0);
        let rows: Vec<Vec<Vec<Ratio>>> = inst.rounds().iter().map(|r| r.to_rows()).collect();
        let expected: Vec<Vec<Vec<Ratio>>> = SNAPSHOT
            .iter()
            .map(|round| round.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect())
            .collect();
        assert_eq!(rows, expected);
    }

    // pinned from the first build
    const SNAPSHOT: [[[i64; 3]; 2]; 2] = [[[2, 1, 0], [2, 0, 1]], [[2, 1, 0], [0, 2, 1]]];

    #[test]
    fn rank_recovery_round_trips() {
        for seed in 0..30 {
            let inst: Instance<Ratio> = random_borda_instance(3, 4, 3, seed);
            let profile = rankings_from_borda(&inst).unwrap();
            assert_eq!(borda_from_rankings::<Ratio>(&profile).unwrap(), inst);
        }
    }

    #[test]
    fn qprop_examples() {
        assert_eq!((qprop(0, 5, 3), rprop(0, 5, 3)), (0, 0));
        assert_eq!((qprop(3, 5, 3), rprop(3, 5, 3)), (4, 0));
        assert_eq!((qprop(1, 5, 3), rprop(1, 5, 3)), (1, 1));
    }

    proptest! {
        #[test]
        fn division_identity(t in 0u64..500, m in 2u64..40, n in 1u64..30) {
            prop_assert_eq!(qprop(t, m, n) * n + rprop(t, m, n), t * (m - 1));
        }

        #[test]
        fn split_identity(a in 0u64..500, m in 2u64..40, n in 1u64..30) {
            let carry = qprop(a + 1, m, n) - qprop(a, m, n) - qprop(1, m, n);
            prop_assert!(carry <= 1);
            let wraps = rprop(a, m, n) + rprop(1, m, n) >= n;
            prop_assert_eq!(carry == 1, wraps);
            let expected = (rprop(a, m, n) + rprop(1, m, n)) % n;
            prop_assert_eq!(rprop(a + 1, m, n), expected);
        }

        #[test]
        fn covering_exists_large(seed in 0u64..100_000, n in 1usize..6, m in 2usize..9) {
            let inst: Instance<Ratio> = random_borda_instance(n, m, 1, seed);
            let mut rng = rng(seed ^ 0x5eed);
            // random composition of m - 1 into n parts
            let mut x = vec![0u64; n];
            for _ in 0..m - 1 {
                x[rand::Rng::gen_range(&mut rng, 0..n)] += 1;
            }
            let c = covering_candidate(inst.round(0), &x).unwrap();
            for (i, &need) in x.iter().enumerate() {
                prop_assert!(*inst.round(0).value(i, c) >= r(need as i64));
            }
        }
    }

    #[test]
    fn covering_small_cases() {
        let round = RoundMatrix::<Ratio>::from_ints(&[&[1, 2, 0]]).unwrap();
        assert_eq!(covering_candidate(&round, &[2]).unwrap(), 1);
        assert_eq!(covering_candidate(&RoundMatrix::<Ratio>::zeros(1, 1), &[0]).unwrap(), 0);
        assert!(covering_candidate(&round, &[1]).is_err());
        assert!(covering_candidate(&RoundMatrix::<Ratio>::from_ints(&[&[1, 1, 0]]).unwrap(), &[2]).is_err());
        // all 36 row pairs for m = 3, all three splits of 2
        let perms: [[i64; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut checked = 0;
        for a in &perms {
            for b in &perms {
                let round = RoundMatrix::<Ratio>::from_ints(&[a, b]).unwrap();
                for x in [[0, 2], [1, 1], [2, 0]] {
                    let c = covering_candidate(&round, &x).unwrap();
                    assert!(a[c] >= x[0] as i64 && b[c] >= x[1] as i64);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 108);
    }

    #[test]
    fn tracker_targets() {
        let start = TrackerState::new(3, 5).unwrap();
        assert!(start.conditions_hold(&[0, 0, 0]));
        assert_eq!(start.targets(), vec![2, 1, 1]);
        let mut s = start.clone();
        s.strict = vec![0];
        assert_eq!(s.targets(), vec![1, 2, 1]);
        assert!(TrackerState::new(2, 1).is_err());
    }

    #[test]
    fn tracker_is_one_additive() {
        for seed in 0..120 {
            let (n, m, t) = (1 + seed as usize % 5, 2 + seed as usize % 6, 1 + seed as usize % 9);
            let inst: Instance<Ratio> = random_borda_instance(n, m, t, 3000 + seed);
            let history = online_history(&OnlineMechanism::Tracker, &inst).unwrap();
            for state in &history {
                let tr = state.tracker().unwrap();
                let u = integer_utilities(state.utilities().values()).unwrap();
                assert!(tr.conditions_hold(&u));
                assert_eq!(tr.target.iter().sum::<u64>(), m as u64 - 1);
                assert_eq!(tr.qprop * n as u64 + tr.rprop, tr.t * (m as u64 - 1));
            }
            let out = history.last().unwrap().prefix();
            let props = prop_shares(&inst);
            for (u, p) in utilities(&inst, out).iter().zip(&props) {
                assert!(u.clone() + r(1) > *p, "seed {seed}");
            }
        }
    }

    #[test]
    fn tracker_rejects_non_borda() {
        let inst = Instance::<Ratio>::from_ints(&[&[&[3, 0], &[0, 1]]]).unwrap();
        assert!(run_online(&OnlineMechanism::Tracker, &inst).is_err());
    }

    #[test]
    fn small_ratio_agrees() {
        for seed in 0..20 {
            let big: Instance<Ratio> = random_borda_instance(3, 4, 4, seed);
            let small: Instance<SmallRatio> = random_borda_instance(3, 4, 4, seed);
            assert_eq!(
                run_online(&OnlineMechanism::LMin, &big).unwrap(),
                run_online(&OnlineMechanism::LMin, &small).unwrap()
            );
            assert_eq!(
                run_online(&OnlineMechanism::Tracker, &big).unwrap(),
                run_online(&OnlineMechanism::Tracker, &small).unwrap()
            );
        }
    }

    fn borda_sample(seed: u64) -> Instance<Ratio> {
        let n = 2 + seed as usize % 3;
        let m = 2 + (seed / 3) as usize % 4;
        let mut t = 1 + (seed / 7) as usize % 5;
        while (m as u64).pow(t as u32) > 1000 {
            t -= 1;
        }
        random_borda_instance(n, m, t, 4000 + seed)
    }

    #[test]
    fn borda_implications_hold() {
        let cfg = SearchConfig::default();
        let half = Ratio::new(1.into(), 2.into());
        for seed in 0..40 {
            let inst = borda_sample(seed);
            let m1 = r(inst.m() as i64 - 1);
            let optimum = max_possible_alpha(&inst, &cfg).unwrap();
            let (optimal, _) = best_prop_ratio(&inst, &cfg).unwrap();
            for cand in enumerate_outcomes(&inst, 1000).unwrap() {
                let mpp = mpp_verdict(&inst, &cand, optimum.clone(), optimal.clone()).unwrap().verdict;
                let add1 = check_additive_prop(&inst, &cand, &r(1)).unwrap().verdict;
                let rrs = check_alpha_rrs(&inst, &cand, &r(1)).unwrap().verdict;
                let addm = check_additive_prop(&inst, &cand, &m1).unwrap().verdict;
                let prop1 = check_alpha_prop1(&inst, &cand, &r(1)).unwrap().verdict;
                let half_prop1 = check_alpha_prop1(&inst, &cand, &half).unwrap().verdict;
                assert!(!mpp || add1, "MPP => 1-additive, seed {seed} {cand}");
                assert!(!mpp || rrs, "MPP => RRS, seed {seed} {cand}");
                assert!(!rrs || addm, "RRS => (m-1)-additive, seed {seed} {cand}");
                assert!(!add1 || prop1, "1-additive => Prop1, seed {seed} {cand}");
                assert!(!prop1 || addm, "Prop1 => (m-1)-additive, seed {seed} {cand}");
                assert!(!addm || half_prop1, "(m-1)-additive => half-Prop1, seed {seed} {cand}");
            }
        }
    }

    #[test]
    fn borda_mechanism_guarantees() {
        let cfg = SearchConfig::default();
        for seed in 0..40 {
            let inst = borda_sample(seed);
            let pi = Permutation::identity(inst.n());
            for out in [rr_offline(&inst, &pi).unwrap(), mnw_offline(&inst, &cfg).unwrap()] {
                assert!(check_alpha_prop1(&inst, &out, &r(1)).unwrap().verdict, "seed {seed} {out}");
            }
            let lex: Vec<Outcome> = [Normalization::None, Normalization::ByRrs, Normalization::ByProp]
                .iter()
                .map(|&norm| leximin_offline(&inst, norm, &cfg).unwrap())
                .collect();
            for out in &lex {
                assert!(check_additive_prop(&inst, out, &r(1)).unwrap().verdict);
                assert!(check_alpha_prop1(&inst, out, &r(1)).unwrap().verdict);
                assert!(check_alpha_rrs(&inst, out, &r(1)).unwrap().verdict);
                assert!(check_mpp(&inst, out, &cfg).unwrap().verdict);
            }
            let u0 = utilities(&inst, &lex[0]);
            for out in &lex[1..] {
                assert_eq!(leximin_compare(&u0, &utilities(&inst, out)).unwrap(), Ordering::Equal, "seed {seed}");
            }
            let ratio = min_prop_ratio(&prop_shares(&inst), &u0);
            assert_eq!(ratio.min(r(1)), max_possible_alpha(&inst, &cfg).unwrap());
        }
    }
}
