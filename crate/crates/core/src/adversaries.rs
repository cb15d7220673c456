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

//! Fixed counterexample instances with their expected behaviour, and the
//! adaptive adversaries that defeat every online mechanism on RRS, Prop1
//! and MPP.

use crate::axioms::{check_local_po, iat_test};
use crate::borda::is_borda;
use crate::enumerate::{for_each_outcome, SearchConfig};
use crate::error::{Error, Result};
use crate::fairness::{check_alpha_rrs, check_mpp, max_possible_alpha, prop1_trace, Property, Witness};
use crate::mechanism::{evaluate, Check, Mechanism};
use crate::model::{accumulated_utility, prop_shares, rrs_shares, Instance, Outcome, RoundMatrix};
use crate::offline::{Normalization, Permutation};
use crate::online::{OnlineMechanism, OnlineState};
use crate::Ratio;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

fn int(k: i64) -> Ratio {
    Ratio::from_integer(k.into())
}

fn frac(n: i64, d: i64) -> Ratio {
    Ratio::new(n.into(), d.into())
}

fn outcome(labels: &[usize]) -> Outcome {
    Outcome::from_labels(labels).expect("labels start at 1")
}

fn matrix(rows: Vec<Vec<Ratio>>) -> RoundMatrix<Ratio> {
    RoundMatrix::new(rows).expect("non-negative entries")
}

fn diag(a: Ratio, b: Ratio) -> RoundMatrix<Ratio> {
    matrix(vec![vec![a, Ratio::zero()], vec![Ratio::zero(), b]])
}

/// A claim about a named instance, re-checkable by running the code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Output {
        mechanism: Mechanism,
        outcome: Outcome,
    },
    AgentUtility {
        mechanism: Mechanism,
        agent: usize,
        utility: Ratio,
    },
    /// `Prop_i - u_i` for the mechanism's outcome.
    PropGap {
        mechanism: Mechanism,
        agent: usize,
        gap: Ratio,
    },
    Verdict {
        outcome: Outcome,
        check: Check,
        parameter: Option<Ratio>,
        holds: bool,
    },
    MaxAlpha(Ratio),
    PropShare {
        agent: usize,
        share: Ratio,
    },
    RrsShare {
        agent: usize,
        share: Ratio,
    },
    /// Every outcome leaves some agent at least `gap` below Prop.
    EveryOutcomeGap(Ratio),
    Iat {
        mechanism: OnlineMechanism,
        scale: Ratio,
        shift: Ratio,
        pass: bool,
    },
    Borda(bool),
}

/// Outcome of re-checking one [`Expectation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationCheck {
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub ok: bool,
}

impl Expectation {
    pub fn describe(&self) -> String {
        match self {
            Expectation::Output { mechanism, .. } => format!("{mechanism} outcome"),
            Expectation::AgentUtility { mechanism, agent, .. } => format!("{mechanism} utility of agent {}", agent + 1),
            Expectation::PropGap { mechanism, agent, .. } => format!("{mechanism} Prop gap of agent {}", agent + 1),
            Expectation::Verdict { outcome, check, parameter, .. } => match parameter {
                Some(p) => format!("{check}({p}) of {outcome}"),
                None => format!("{check} of {outcome}"),
            },
            Expectation::MaxAlpha(_) => "max possible alpha".into(),
            Expectation::PropShare { agent, .. } => format!("Prop share of agent {}", agent + 1),
            Expectation::RrsShare { agent, .. } => format!("RRS share of agent {}", agent + 1),
            Expectation::EveryOutcomeGap(_) => "smallest worst Prop gap over outcomes".into(),
            Expectation::Iat { mechanism, scale, shift, .. } => format!("IAT of {mechanism} under {scale}*v+{shift}"),
            Expectation::Borda(_) => "Borda valuations".into(),
        }
    }

    pub fn verify(&self, instance: &Instance<Ratio>, config: &SearchConfig) -> Result<ExpectationCheck> {
        let (expected, observed) = match self {
            Expectation::Output { mechanism, outcome } => {
                (outcome.to_string(), mechanism.run(instance, config)?.to_string())
            }
            Expectation::AgentUtility { mechanism, agent, utility } => {
                let out = mechanism.run(instance, config)?;
                (utility.to_string(), accumulated_utility(instance, &out)?[*agent].to_string())
            }
            Expectation::PropGap { mechanism, agent, gap } => {
                let out = mechanism.run(instance, config)?;
                let u = accumulated_utility(instance, &out)?;
                (gap.to_string(), (prop_shares(instance)[*agent].clone() - u[*agent].clone()).to_string())
            }
            Expectation::Verdict { outcome, check, parameter, holds } => {
                let r = evaluate(instance, outcome, *check, parameter.as_ref(), config)?;
                (holds.to_string(), r.verdict.to_string())
            }
            Expectation::MaxAlpha(alpha) => (alpha.to_string(), max_possible_alpha(instance, config)?.to_string()),
            Expectation::PropShare { agent, share } => (share.to_string(), prop_shares(instance)[*agent].to_string()),
            Expectation::RrsShare { agent, share } => (share.to_string(), rrs_shares(instance)[*agent].to_string()),
            Expectation::EveryOutcomeGap(gap) => {
                let props = prop_shares(instance);
                let mut smallest: Option<Ratio> = None;
                for_each_outcome(instance, config, |_, u| {
                    let worst = u.iter().zip(&props).map(|(u, p)| p - u).max().expect("n >= 1");
                    if smallest.as_ref().is_none_or(|s| worst < *s) {
                        smallest = Some(worst);
                    }
                })?;
                (gap.to_string(), smallest.expect("at least one outcome").to_string())
            }
            Expectation::Iat { mechanism, scale, shift, pass } => {
                (pass.to_string(), iat_test(mechanism, instance, scale, shift)?.pass.to_string())
            }
            Expectation::Borda(b) => (b.to_string(), is_borda(instance).to_string()),
        };
        Ok(ExpectationCheck { claim: self.describe(), ok: expected == observed, expected, observed })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedInstance {
    pub id: String,
    pub summary: String,
    pub instance: Instance<Ratio>,
    pub expectations: Vec<Expectation>,
}

impl NamedInstance {
    pub fn verify(&self, config: &SearchConfig) -> Result<Vec<ExpectationCheck>> {
        self.expectations.iter().map(|e| e.verify(&self.instance, config)).collect()
    }
}

/// Base ids of the named corpus; parameterised ones take `(key=value,...)`.
pub const NAMED_IDS: [&str; 11] = [
    "example-1",
    "example-2",
    "rr-not-po",
    "online-not-po",
    "mnw-not-iat",
    "mpp-online-x",
    "mpp-online-y",
    "additive-lower-bound(n=3)",
    "rr-lower-bound(n=4,m=3)",
    "mnw-gap(n=3,t=3)",
    "tradeoff(n=3,t=6,eps=1/31)",
];

fn parse_id(id: &str) -> Result<(String, BTreeMap<String, String>)> {
    let id = id.trim();
    let Some(open) = id.find('(') else {
        return Ok((id.to_string(), BTreeMap::new()));
    };
    let body =
        id[open + 1..].strip_suffix(')').ok_or_else(|| Error::Parse(format!("unbalanced parameters in {id:?}")))?;
    let mut params = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
        params.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    Ok((id[..open].to_string(), params))
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.0.remove(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("parameter {key}={v:?} is not an integer"))),
        }
    }

    fn ratio(&mut self, key: &str, default: Ratio) -> Result<Ratio> {
        match self.0.remove(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("parameter {key}={v:?} is not a rational"))),
        }
    }

    fn finish(self, id: &str) -> Result<()> {
        match self.0.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Parse(format!("unknown parameter {k:?} for {id}"))),
        }
    }
}

/// Looks up a named instance, e.g. `example-1` or `rr-lower-bound(n=4,m=3)`.
pub fn get_named_instance(id: &str) -> Result<NamedInstance> {
    let (base, params) = parse_id(id)?;
    let mut p = Params(params);
    let named = match base.as_str() {
        "example-1" => example_1(),
        "example-2" => example_2(),
        "rr-not-po" => rr_not_po(),
        "online-not-po" => online_not_po(),
        "mnw-not-iat" => mnw_not_iat(),
        "mpp-online-x" => mpp_online(Branch::X),
        "mpp-online-y" => mpp_online(Branch::Y),
        "additive-lower-bound" => additive_lower_bound(p.usize("n", 3)?)?,
        "rr-lower-bound" => {
            let n = p.usize("n", 4)?;
            rr_lower_bound(n, p.usize("m", 3)?)?
        }
        "mnw-gap" => {
            let n = p.usize("n", 3)?;
            mnw_gap_instance(n, p.usize("t", 3)?)?
        }
        "tradeoff" => {
            let n = p.usize("n", 3)?;
            let t = p.usize("t", 6)?;
            tradeoff_instance(n, t, &p.ratio("eps", frac(1, 31))?)?
        }
        _ => {
            let known: Vec<&str> = NAMED_IDS.iter().map(|i| i.split('(').next().unwrap_or(i)).collect();
            return Err(Error::UnknownId(format!("instance {base:?}; known: {}", known.join(", "))));
        }
    };
    p.finish(&base)?;
    Ok(named)
}

fn rr(order: &[usize]) -> Mechanism {
    Mechanism::RrOffline(Permutation::from_labels(order).expect("valid permutation"))
}

pub fn example_1() -> NamedInstance {
    let instance = Instance::from_ints(&[&[&[5, 4, 3, 2, 1, 0], &[2, 1, 3, 0, 4, 5]]]).expect("valid");
    let mut expectations = vec![
        Expectation::Output { mechanism: Mechanism::MnwOffline, outcome: outcome(&[1]) },
        Expectation::Output { mechanism: rr(&[1, 2]), outcome: outcome(&[1]) },
        Expectation::Output { mechanism: rr(&[2, 1]), outcome: outcome(&[6]) },
        Expectation::MaxAlpha(Ratio::one()),
        Expectation::Verdict { outcome: outcome(&[1]), check: Check::Mpp, parameter: None, holds: false },
        Expectation::Verdict { outcome: outcome(&[3]), check: Check::Mpp, parameter: None, holds: true },
        Expectation::Borda(true),
    ];
    for c in 1..=6 {
        expectations.push(Expectation::Verdict {
            outcome: outcome(&[c]),
            check: Check::Prop,
            parameter: None,
            holds: c == 3,
        });
    }
    NamedInstance {
        id: "example-1".into(),
        summary: "one round, six candidates: only c3 is proportional, MNW and RR miss it".into(),
        instance,
        expectations,
    }
}

pub fn example_2() -> NamedInstance {
    let instance =
        Instance::from_ints(&[&[&[5000, 2500, 50], &[30, 40, 50]], &[&[0, 1, 0], &[0, 1, 0]]]).expect("valid");
    NamedInstance {
        id: "example-2".into(),
        summary: "RRS-normalised leximin prefers c3 first although (c2,c2) is proportional".into(),
        instance,
        expectations: vec![
            Expectation::RrsShare { agent: 0, share: Ratio::one() },
            Expectation::RrsShare { agent: 1, share: Ratio::one() },
            Expectation::Output {
                mechanism: Mechanism::LeximinOffline(Normalization::ByRrs),
                outcome: outcome(&[3, 2]),
            },
            Expectation::Verdict { outcome: outcome(&[2, 2]), check: Check::Prop, parameter: None, holds: true },
            Expectation::Verdict { outcome: outcome(&[3, 2]), check: Check::Rrs, parameter: None, holds: true },
            Expectation::Verdict { outcome: outcome(&[3, 2]), check: Check::Mpp, parameter: None, holds: false },
            Expectation::Output {
                mechanism: Mechanism::LeximinOffline(Normalization::ByProp),
                outcome: outcome(&[1, 2]),
            },
            Expectation::Borda(false),
        ],
    }
}

pub fn rr_not_po() -> NamedInstance {
    let round: &[&[i64]] = &[&[3, 2, 1, 0], &[0, 2, 1, 3]];
    NamedInstance {
        id: "rr-not-po".into(),
        summary: "offline round robin is not Pareto optimal".into(),
        instance: Instance::from_ints(&[round, round]).expect("valid"),
        expectations: vec![
            Expectation::Output { mechanism: rr(&[1, 2]), outcome: outcome(&[1, 4]) },
            Expectation::Verdict { outcome: outcome(&[1, 4]), check: Check::Po, parameter: None, holds: false },
            Expectation::Verdict { outcome: outcome(&[2, 2]), check: Check::Po, parameter: None, holds: true },
            Expectation::Borda(true),
        ],
    }
}

pub fn online_not_po() -> NamedInstance {
    let round: &[&[i64]] = &[&[8, 7, 6, 5, 4, 3, 2, 0, 1], &[1, 0, 2, 3, 4, 5, 6, 7, 8]];
    let c55 = outcome(&[5, 5]);
    NamedInstance {
        id: "online-not-po".into(),
        summary: "online leximin and MNW settle on c5 twice; (c1,c9) dominates".into(),
        instance: Instance::from_ints(&[round, round]).expect("valid"),
        expectations: vec![
            Expectation::Output { mechanism: Mechanism::Online(OnlineMechanism::LMin), outcome: c55.clone() },
            Expectation::Output { mechanism: Mechanism::Online(OnlineMechanism::Mnw), outcome: c55.clone() },
            Expectation::Verdict { outcome: c55.clone(), check: Check::Po, parameter: None, holds: false },
            Expectation::Verdict { outcome: c55, check: Check::LocalPo, parameter: None, holds: true },
            Expectation::Verdict { outcome: outcome(&[1, 9]), check: Check::Po, parameter: None, holds: true },
            Expectation::Borda(true),
        ],
    }
}

pub fn mnw_not_iat() -> NamedInstance {
    NamedInstance {
        id: "mnw-not-iat".into(),
        summary: "adding one to every valuation flips online MNW from c2 to c1".into(),
        instance: Instance::from_ints(&[&[&[5, 1], &[0, 1]]]).expect("valid"),
        expectations: vec![
            Expectation::Output { mechanism: Mechanism::Online(OnlineMechanism::Mnw), outcome: outcome(&[2]) },
            Expectation::Iat { mechanism: OnlineMechanism::Mnw, scale: Ratio::one(), shift: Ratio::one(), pass: false },
            Expectation::Iat { mechanism: OnlineMechanism::LMin, scale: Ratio::one(), shift: Ratio::one(), pass: true },
        ],
    }
}

/// Second-round matrix chosen by the MPP adversary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    X,
    Y,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Branch::X => "X",
            Branch::Y => "Y",
        })
    }
}

fn mpp_rounds() -> (RoundMatrix<Ratio>, RoundMatrix<Ratio>, RoundMatrix<Ratio>) {
    let first = RoundMatrix::from_ints(&[&[1, 0], &[1, 0], &[0, 1], &[0, 1]]).expect("valid");
    let x = RoundMatrix::from_ints(&[&[1, 0], &[0, 1], &[0, 1], &[0, 1]]).expect("valid");
    let y = RoundMatrix::from_ints(&[&[1, 0], &[1, 0], &[1, 0], &[0, 1]]).expect("valid");
    (first, x, y)
}

pub fn mpp_online(branch: Branch) -> NamedInstance {
    let (first, x, y) = mpp_rounds();
    let second = if branch == Branch::X { x } else { y };
    let fair = if branch == Branch::X { [1, 2] } else { [2, 1] };
    let mut expectations = vec![Expectation::MaxAlpha(Ratio::one()), Expectation::Borda(true)];
    for a in 1..=2 {
        for b in 1..=2 {
            expectations.push(Expectation::Verdict {
                outcome: outcome(&[a, b]),
                check: Check::Prop,
                parameter: None,
                holds: [a, b] == fair,
            });
        }
    }
    NamedInstance {
        id: format!("mpp-online-{}", branch.to_string().to_lowercase()),
        summary: format!("second round {branch}: the only proportional outcome is {}", outcome(&fair)),
        instance: Instance::new(vec![first, second]).expect("valid"),
        expectations,
    }
}

/// One round, `m = n`, agent `i` values `c_j` at `(j - i) mod n`.
pub fn additive_lower_bound(n: usize) -> Result<NamedInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter("additive lower bound needs n >= 2".into()));
    }
    let rows = (0..n).map(|i| (0..n).map(|j| int(((j + n - i) % n) as i64)).collect()).collect();
    let instance = Instance::new(vec![matrix(rows)])?;
    let gap = frac(n as i64 - 1, n as i64);
    let below = gap.clone() - frac(1, 100 * n as i64);
    let mut expectations = vec![Expectation::Borda(true), Expectation::EveryOutcomeGap(gap)];
    for c in 1..=n {
        expectations.push(Expectation::Verdict {
            outcome: outcome(&[c]),
            check: Check::Additive,
            parameter: Some(below.clone()),
            holds: false,
        });
    }
    Ok(NamedInstance {
        id: format!("additive-lower-bound(n={n})"),
        summary: "every outcome leaves some agent (n-1)/n below Prop".into(),
        instance,
        expectations,
    })
}

/// `T = n - 1` rounds; the first `n - 1` agents rank `c1` first, agent `n`
/// ranks it last.
pub fn rr_lower_bound(n: usize, m: usize) -> Result<NamedInstance> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter("RR lower bound needs n >= 2 and m >= 2".into()));
    }
    let row =
        |reversed: bool| -> Vec<Ratio> { (0..m).map(|j| int(if reversed { j } else { m - 1 - j } as i64)).collect() };
    let round = matrix((0..n).map(|i| row(i == n - 1)).collect());
    let instance = Instance::repeated(round, n - 1)?;
    let share = frac(((n - 1) * (m - 1)) as i64, n as i64);
    Ok(NamedInstance {
        id: format!("rr-lower-bound(n={n},m={m})"),
        summary: "round robin leaves the last agent with nothing".into(),
        instance,
        expectations: vec![
            Expectation::Output { mechanism: rr(&(1..=n).collect::<Vec<_>>()), outcome: outcome(&vec![1; n - 1]) },
            Expectation::AgentUtility {
                mechanism: rr(&(1..=n).collect::<Vec<_>>()),
                agent: n - 1,
                utility: Ratio::zero(),
            },
            Expectation::PropShare { agent: n - 1, share },
            Expectation::Borda(true),
        ],
    })
}

/// `m = n + 2`; agent 1 ranks `c_m` second to last, everyone else ranks it
/// first. MNW keeps electing `c_m`, leaving agent 1 `T/n` short of Prop.
pub fn mnw_gap_instance(n: usize, t: usize) -> Result<NamedInstance> {
    if n <= 2 || t == 0 || t > n * (n - 1) / 2 {
        return Err(Error::InvalidParameter(format!("MNW gap needs n > 2 and 0 < T <= n(n-1)/2, got n={n}, T={t}")));
    }
    let m = n + 2;
    let mut first: Vec<Ratio> = (0..m - 2).map(|j| int((m - 1 - j) as i64)).collect();
    first.extend([int(0), int(1)]);
    let others: Vec<Ratio> = (0..m).map(|j| int(j as i64)).collect();
    let rows = std::iter::once(first).chain((1..n).map(|_| others.clone())).collect();
    let instance = Instance::repeated(matrix(rows), t)?;
    Ok(NamedInstance {
        id: format!("mnw-gap(n={n},t={t})"),
        summary: format!("MNW elects c{m} every round; agent 1 ends {t}/{n} below Prop"),
        instance,
        expectations: vec![
            Expectation::Output { mechanism: Mechanism::MnwOffline, outcome: outcome(&vec![m; t]) },
            Expectation::PropGap { mechanism: Mechanism::MnwOffline, agent: 0, gap: frac(t as i64, n as i64) },
            Expectation::Borda(true),
        ],
    })
}

/// The outcome every MPP mechanism must return on [`tradeoff_instance`]:
/// `c2`, then `c3` until the last round, then `c1`.
pub fn tradeoff_outcome(t: usize) -> Outcome {
    let mut labels = vec![2];
    labels.extend(std::iter::repeat_n(3, t - 2));
    labels.push(1);
    outcome(&labels)
}

/// Three candidates. Agent 1 values only `c1`, mostly before the last
/// round; agent 2 values only `c2` in round 1; agent 3 values `c3`, almost
/// all in round 1; further agents value everything at `1/T`. Every agent's
/// Prop is `1/n`.
pub fn tradeoff_instance(n: usize, t: usize, eps: &Ratio) -> Result<NamedInstance> {
    if n <= 2 || t < 2 * n {
        return Err(Error::InvalidParameter(format!("tradeoff needs n > 2 and T >= 2n, got n={n}, T={t}")));
    }
    let ti = t as i64;
    if !eps.is_positive() || *eps >= frac(1, ti * (ti - 1)) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/(T(T-1))), got {eps}")));
    }
    let late = eps.clone() * int(ti - 1);
    let early = frac(1, ti - 1) - eps.clone();
    assert!(early > late, "epsilon bound guarantees 1/(T-1) - eps > eps (T-1)");
    let z = Ratio::zero;
    let rounds = (1..=t)
        .map(|r| {
            let a1 = if r == t { late.clone() } else { early.clone() };
            let a2 = if r == 1 { Ratio::one() } else { z() };
            let a3 = match r {
                1 => Ratio::one() - late.clone(),
                2 => eps.clone() * int(2),
                _ if r == t => z(),
                _ => eps.clone(),
            };
            let mut rows = vec![vec![a1, z(), z()], vec![z(), a2, z()], vec![z(), z(), a3]];
            rows.extend((3..n).map(|_| vec![frac(1, ti); 3]));
            matrix(rows)
        })
        .collect();
    let instance = Instance::new(rounds)?;
    let hat = tradeoff_outcome(t);
    let lmin = Mechanism::LeximinOffline(Normalization::ByProp);
    let mut expectations: Vec<Expectation> =
        (0..n).map(|i| Expectation::PropShare { agent: i, share: frac(1, n as i64) }).collect();
    expectations.push(Expectation::Output { mechanism: lmin.clone(), outcome: hat.clone() });
    for (agent, utility) in [(0, late.clone()), (1, Ratio::one()), (2, late)] {
        expectations.push(Expectation::AgentUtility { mechanism: lmin.clone(), agent, utility });
    }
    expectations.push(Expectation::Verdict { outcome: hat, check: Check::Mpp, parameter: None, holds: true });
    Ok(NamedInstance {
        id: format!("tradeoff(n={n},t={t},eps={eps})"),
        summary: "the unique MPP outcome starves agents 1 and 3 down to eps(T-1)".into(),
        instance,
        expectations,
    })
}

/// `alpha / (T (T-1))`: with it the forced MPP outcome violates alpha-RRS
/// (`0 < alpha < 1`).
pub fn rrs_tradeoff_epsilon(alpha: &Ratio, t: usize) -> Ratio {
    let ti = t as i64;
    alpha.clone() / int(ti * (ti - 1))
}

/// `alpha (alpha (T-1) - n) / (n T (T-1) (T-2))`, for `T >= 2n/alpha + 1`:
/// with it the forced MPP outcome violates alpha-Prop1.
pub fn prop1_tradeoff_epsilon(alpha: &Ratio, n: usize, t: usize) -> Result<Ratio> {
    let (ni, ti) = (n as i64, t as i64);
    if int(ti) < int(2 * ni) / alpha.clone() + Ratio::one() {
        return Err(Error::InvalidParameter(format!("need T >= 2n/alpha + 1, got T={t}")));
    }
    Ok(alpha.clone() * (alpha.clone() * int(ti - 1) - int(ni)) / int(ni * ti * (ti - 1) * (ti - 2)))
}

/// Adaptive constructions against online mechanisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adversary {
    /// Three rounds, two agents; defeats alpha-RRS.
    Rrs(Ratio),
    /// `2k + 3` rounds alternating a fixed round with a matrix keyed on the
    /// previous choice; defeats Prop1 for `k > 32`.
    Prop1(usize),
    /// Two rounds, four agents, Borda; the second round punishes the first choice.
    MppOnline,
}

pub const ADVERSARY_IDS: [&str; 3] = ["rrs", "prop1", "mpp-online"];

impl Adversary {
    pub fn parse(id: &str, alpha: Option<Ratio>, k: Option<usize>) -> Result<Self> {
        let adv = match id {
            "rrs" => Adversary::Rrs(alpha.unwrap_or_else(Ratio::one)),
            "prop1" => Adversary::Prop1(k.unwrap_or(33)),
            "mpp-online" => Adversary::MppOnline,
            other => {
                return Err(Error::UnknownId(format!(
                    "adversary {other:?}; expected one of {}",
                    ADVERSARY_IDS.join(", ")
                )))
            }
        };
        adv.validate()?;
        Ok(adv)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Adversary::Rrs(alpha) if !alpha.is_positive() || *alpha > Ratio::one() => {
                Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")))
            }
            Adversary::Prop1(0) => Err(Error::InvalidParameter("k must be at least 1".into())),
            _ => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Adversary::MppOnline => 4,
            _ => 2,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            Adversary::Rrs(_) => 3,
            Adversary::Prop1(k) => 2 * k + 3,
            Adversary::MppOnline => 2,
        }
    }

    pub fn branches(&self) -> Vec<Option<Branch>> {
        match self {
            Adversary::MppOnline => vec![Some(Branch::X), Some(Branch::Y)],
            _ => vec![None],
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Adversary::Rrs(alpha) => write!(f, "rrs(alpha={alpha})"),
            Adversary::Prop1(k) => write!(f, "prop1(k={k})"),
            Adversary::MppOnline => f.write_str("mpp-online"),
        }
    }
}

/// An adversary after emitting `revealed` rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveAdversary {
    pub adversary: Adversary,
    /// Harness-selected second round for [`Adversary::MppOnline`].
    pub branch: Option<Branch>,
    pub revealed: usize,
}

impl AdaptiveAdversary {
    pub fn new(adversary: Adversary, branch: Option<Branch>) -> Result<Self> {
        adversary.validate()?;
        match (&adversary, branch) {
            (Adversary::MppOnline, None) => Err(Error::InvalidParameter("mpp-online needs a branch".into())),
            (Adversary::MppOnline, Some(_)) | (_, None) => Ok(Self { adversary, branch, revealed: 0 }),
            (_, Some(_)) => Err(Error::InvalidParameter("only mpp-online takes a branch".into())),
        }
    }

    /// The next round's valuations given the choices so far, or `None` once
    /// the horizon is reached.
    pub fn next_round(&self, history: &Outcome) -> Result<Option<(RoundMatrix<Ratio>, AdaptiveAdversary)>> {
        if history.len() != self.revealed {
            return Err(Error::LengthMismatch { left: history.len(), right: self.revealed });
        }
        let t = self.revealed;
        if t >= self.adversary.horizon() {
            return Ok(None);
        }
        let picked = |k: usize| history[k];
        let round = match &self.adversary {
            Adversary::Rrs(alpha) => match t {
                0 => diag(Ratio::one(), Ratio::one()),
                1 => {
                    let (big, small) = (int(2) / alpha.clone(), alpha.clone() / int(2));
                    if picked(0) == 0 {
                        diag(big, small)
                    } else {
                        diag(small, big)
                    }
                }
                _ => {
                    if picked(0) != picked(1) {
                        let v = int(4) / (alpha.clone() * alpha.clone());
                        diag(v.clone(), v)
                    } else {
                        RoundMatrix::zeros(2, 2)
                    }
                }
            },
            Adversary::Prop1(_) => {
                // rounds are 1-based in the schedule: odd rounds are fixed
                if t.is_multiple_of(2) {
                    diag(Ratio::one(), Ratio::one())
                } else if picked(t - 1) == 0 {
                    diag(Ratio::one(), frac(7, 8))
                } else {
                    diag(frac(7, 8), Ratio::one())
                }
            }
            Adversary::MppOnline => {
                let (first, x, y) = mpp_rounds();
                match (t, self.branch) {
                    (0, _) => first,
                    (_, Some(Branch::X)) => x,
                    _ => y,
                }
            }
        };
        let next = Self { revealed: t + 1, ..self.clone() };
        Ok(Some((round, next)))
    }
}

pub fn adversary_next_round(
    adversary: &AdaptiveAdversary,
    history: &Outcome,
) -> Result<Option<(RoundMatrix<Ratio>, AdaptiveAdversary)>> {
    adversary.next_round(history)
}

/// Drives `mechanism` against the adversary; returns the realised instance
/// and the mechanism's outcome on it.
pub fn play(adversary: &AdaptiveAdversary, mechanism: &OnlineMechanism) -> Result<(Instance<Ratio>, Outcome)> {
    let mut adv = adversary.clone();
    let mut state = OnlineState::new(mechanism.clone(), adv.adversary.n(), Some(adv.adversary.horizon()))?;
    let mut rounds = Vec::new();
    while let Some((round, next)) = adv.next_round(state.prefix())? {
        state = state.step(&round)?.1;
        rounds.push(round);
        adv = next;
    }
    Ok((Instance::new(rounds)?, state.prefix().clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationReport {
    pub adversary: Adversary,
    pub mechanism: OnlineMechanism,
    pub branch: Option<Branch>,
    pub property: Property,
    pub agent: usize,
    /// Number of decided rounds at which the violation is visible.
    pub round: usize,
    pub detail: String,
    pub instance: Instance<Ratio>,
    pub outcome: Outcome,
}

impl ViolationReport {
    /// One line per round: valuations and the mechanism's choice.
    pub fn transcript(&self) -> Vec<String> {
        self.instance
            .rounds()
            .iter()
            .zip(self.outcome.iter())
            .enumerate()
            .map(|(t, (round, &c))| {
                let rows: Vec<String> = round
                    .rows()
                    .map(|row| format!("({})", row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                format!("round {}: V = [{}] -> c{}", t + 1, rows.join(" "), c + 1)
            })
            .collect()
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{} vs {}", self.adversary, self.mechanism)?;
        if let Some(b) = self.branch {
            write!(f, " (branch {b})")?;
        }
        write!(
            f,
            ": {} violated for agent {} after {} rounds; {}",
            self.property,
            self.agent + 1,
            self.round,
            self.detail
        )
    }
}

/// Plays every branch of `adversary` against `mechanism` and returns the
/// first violation found, or `None` if the mechanism survived.
pub fn demonstrate_violation(adversary: &Adversary, mechanism: &OnlineMechanism) -> Result<Option<ViolationReport>> {
    let config = SearchConfig::default();
    for branch in adversary.branches() {
        let (instance, outcome) = play(&AdaptiveAdversary::new(adversary.clone(), branch)?, mechanism)?;
        let found = match adversary {
            Adversary::Rrs(alpha) => {
                let report = check_alpha_rrs(&instance, &outcome, alpha)?;
                match report.witness {
                    Some(Witness::Agent { agent, utility, threshold }) if !report.verdict => Some((
                        Property::AlphaRrs,
                        agent,
                        instance.horizon(),
                        format!("utility {utility} < alpha * RRS = {threshold}"),
                    )),
                    _ => None,
                }
            }
            Adversary::Prop1(_) => {
                let trace = prop1_trace(&instance, &outcome)?;
                trace.first_violation().map(|(t, agent)| {
                    (Property::AlphaProp1, agent, t, format!("Prop1 slack {} after {t} rounds", trace.slack(t, agent)))
                })
            }
            Adversary::MppOnline => {
                let report = check_mpp(&instance, &outcome, &config)?;
                match report.witness {
                    Some(Witness::MppGap { agent, achieved, optimum, optimal }) if !report.verdict => Some((
                        Property::Mpp,
                        agent,
                        instance.horizon(),
                        format!("ratio {achieved} < attainable {optimum} via {optimal}"),
                    )),
                    _ => None,
                }
            }
        };
        if let Some((property, agent, round, detail)) = found {
            return Ok(Some(ViolationReport {
                adversary: adversary.clone(),
                mechanism: mechanism.clone(),
                branch,
                property,
                agent,
                round,
                detail,
                instance,
                outcome,
            }));
        }
    }
    Ok(None)
}

/// Outcome check used by the violation tests: local PO of the realised run.
pub fn realised_local_po(instance: &Instance<Ratio>, outcome: &Outcome) -> Result<bool> {
    Ok(check_local_po(instance, outcome)?.pass)
}
