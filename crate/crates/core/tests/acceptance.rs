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

//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line and
//! then asserts; time limits are wall-clock and pinned below.

use num::{One, Zero};
use rand::Rng;
use seqfair::adversaries::{demonstrate_violation, get_named_instance, Adversary};
use seqfair::axioms::check_local_po;
use seqfair::borda::{qprop, random_borda_instance, rprop};
use seqfair::fairness::{
    best_prop_ratio, check_alpha_prop, check_pareto_optimal, max_possible_alpha, min_prop_ratio, Witness,
};
use seqfair::mechanism::Mechanism;
use seqfair::model::{accumulated_utility, leximin_compare, prop_shares, Instance, Outcome};
use seqfair::offline::{leximin_offline, mnw_offline, rr_offline, Normalization, Permutation};
use seqfair::online::{online_history, OnlineMechanism};
use seqfair::random::{random_instance, rng};
use seqfair::repro::{axiom_table, implication_counterexamples, small_borda_instance, IMPLICATIONS};
use seqfair::{Ratio, SearchConfig};
use std::cmp::Ordering;
use std::time::{Duration, Instant};

const EXAMPLE_LIMIT: Duration = Duration::from_secs(1);
const MPP_LIMIT: Duration = Duration::from_secs(30);
const ADDITIVE_LIMIT: Duration = Duration::from_secs(30);
const LOWER_BOUND_LIMIT: Duration = Duration::from_secs(10);
const IMPOSSIBILITY_LIMIT: Duration = Duration::from_secs(10);
const IMPLICATION_LIMIT: Duration = Duration::from_secs(60);

fn r(k: i64) -> Ratio {
    Ratio::from_integer(k.into())
}

fn q(n: i64, d: i64) -> Ratio {
    Ratio::new(n.into(), d.into())
}

fn o(labels: &[usize]) -> Outcome {
    Outcome::from_labels(labels).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default().parallel(true)
}

/// Prints the verdict line, then fails the test with the collected reasons.
fn report(criterion: u32, failures: &[String], elapsed: Duration, limit: Option<Duration>) {
    let mut failures = failures.to_vec();
    if let Some(limit) = limit {
        if elapsed > limit {
            failures.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
    }
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} ({:.3}s)", elapsed.as_secs_f64());
    assert!(failures.is_empty(), "criterion {criterion}: {}", failures.join("; "));
}

fn expect(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn utilities(inst: &Instance<Ratio>, out: &Outcome) -> Vec<Ratio> {
    accumulated_utility(inst, out).unwrap().into_values()
}

#[test]
fn criterion_1_examples() {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;

    let start = Instant::now();
    let ex1 = get_named_instance("example-1").unwrap().instance;
    let mnw = mnw_offline(&ex1, &cfg()).unwrap();
    expect(&mut failures, mnw == o(&[1]), || format!("example 1 MNW gave {mnw}"));
    for (pi, want) in [(vec![1, 2], 1), (vec![2, 1], 6)] {
        let out = rr_offline(&ex1, &Permutation::from_labels(&pi).unwrap()).unwrap();
        expect(&mut failures, out == o(&[want]), || format!("example 1 RR {pi:?} gave {out}"));
    }
    let passing: Vec<usize> =
        (1..=6).filter(|&c| check_alpha_prop(&ex1, &o(&[c]), &Ratio::one()).unwrap().verdict).collect();
    expect(&mut failures, passing == vec![3], || format!("example 1 Prop holds for {passing:?}"));
    slowest = slowest.max(start.elapsed());

    let start = Instant::now();
    let ex2 = get_named_instance("example-2").unwrap().instance;
    let lex = leximin_offline(&ex2, Normalization::ByRrs, &cfg()).unwrap();
    expect(&mut failures, lex[0] == 2, || format!("example 2 RRS leximin gave {lex}"));
    let c22 = check_alpha_prop(&ex2, &o(&[2, 2]), &Ratio::one()).unwrap().verdict;
    expect(&mut failures, c22, || "example 2 (c2,c2) is not proportional".into());
    slowest = slowest.max(start.elapsed());

    report(1, &failures, slowest, Some(EXAMPLE_LIMIT));
}

#[test]
fn criterion_2_leximin_attains_mpp() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let config = cfg();
    let mut g = rng(2);
    for trial in 0..500u64 {
        let (n, m) = (g.gen_range(1..=3), g.gen_range(1..=3));
        let mut t = g.gen_range(1..=4);
        while (m as u32).pow(t as u32) > 81 {
            t -= 1;
        }
        let inst: Instance<Ratio> = random_instance(n, m, t, 6, 20_000 + trial);
        let out = leximin_offline(&inst, Normalization::ByProp, &config).unwrap();
        let ratio = min_prop_ratio(&prop_shares(&inst), &utilities(&inst, &out));
        let alpha_star = max_possible_alpha(&inst, &config).unwrap();
        let (_, raw) = best_prop_ratio(&inst, &config).unwrap();
        // alpha* is capped at 1; the uncapped optimum must match exactly too
        expect(&mut failures, ratio.clone().min(Ratio::one()) == alpha_star && ratio == raw, || {
            format!("trial {trial}: leximin ratio {ratio}, alpha* {alpha_star}, best ratio {raw}")
        });
    }
    report(2, &failures, start.elapsed(), Some(MPP_LIMIT));
}

#[test]
fn criterion_3_one_additive() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut g = rng(3);
    for trial in 0..500u64 {
        let (n, m, t) = (g.gen_range(1..=5), g.gen_range(2..=6), g.gen_range(1..=8));
        let inst: Instance<Ratio> = random_borda_instance(n, m, t, 30_000 + trial);
        let props = prop_shares(&inst);
        for mech in [OnlineMechanism::LMin, OnlineMechanism::Tracker] {
            let history = online_history(&mech, &inst).unwrap();
            for (k, state) in history.iter().enumerate() {
                let rounds = k as u64 + 1;
                let (qp, rp) = (qprop(rounds, m as u64, n as u64), rprop(rounds, m as u64, n as u64));
                let u = state.utilities().values();
                let floor_ok = u.iter().all(|x| *x >= r(qp as i64));
                let exceeders = u.iter().filter(|x| **x > r(qp as i64)).count() as u64;
                expect(&mut failures, floor_ok && exceeders >= rp, || {
                    format!("trial {trial} {mech} round {rounds}: u={u:?} qProp={qp} rProp={rp}")
                });
            }
            let u = history.last().unwrap().utilities().values();
            let floor = r(((t * (m - 1)) / n) as i64);
            let ok = u.iter().zip(&props).all(|(x, p)| *x >= floor && x.clone() + Ratio::one() > *p);
            expect(&mut failures, ok, || format!("trial {trial} {mech}: final u={u:?}"));
        }
    }
    report(3, &failures, start.elapsed(), Some(ADDITIVE_LIMIT));
}

#[test]
fn criterion_4_lower_bounds() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let config = cfg();

    let gap = get_named_instance("mnw-gap(n=3,t=3)").unwrap().instance;
    let m = gap.m() as i64;
    let out = mnw_offline(&gap, &config).unwrap();
    let (u1, p1) = (utilities(&gap, &out)[0].clone(), prop_shares(&gap)[0].clone());
    expect(&mut failures, u1 == r(3) && p1 == r(4), || format!("MNW gap: u1={u1}, Prop1={p1}"));
    expect(&mut failures, p1.clone() - u1.clone() == q(m - 3, 2) && p1 - u1 == r(1), || {
        "MNW gap is not (m-3)/2 = 1".into()
    });

    let n = 4;
    let rr = get_named_instance("rr-lower-bound(n=4,m=3)").unwrap().instance;
    let m = rr.m() as i64;
    let out = rr_offline(&rr, &Permutation::identity(n)).unwrap();
    let (un, pn) = (utilities(&rr, &out)[n - 1].clone(), prop_shares(&rr)[n - 1].clone());
    expect(&mut failures, un.is_zero() && pn == q((n as i64 - 1) * (m - 1), n as i64), || {
        format!("RR bound: u_n={un}, Prop_n={pn}")
    });

    for n in [3usize, 4, 5] {
        let add = get_named_instance(&format!("additive-lower-bound(n={n})")).unwrap().instance;
        let props = prop_shares(&add);
        let want = q(n as i64 - 1, n as i64);
        for c in 1..=n {
            let u = utilities(&add, &o(&[c]));
            let worst = u.iter().zip(&props).map(|(u, p)| p - u).max().unwrap();
            expect(&mut failures, worst >= want, || format!("additive n={n}: (c{c}) worst gap {worst}"));
        }
    }
    report(4, &failures, start.elapsed(), Some(LOWER_BOUND_LIMIT));
}

#[test]
fn criterion_5_impossibility() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut found = 0;
    for adv in [Adversary::Rrs(Ratio::one()), Adversary::Rrs(q(1, 2)), Adversary::Prop1(33), Adversary::MppOnline] {
        for mech in
            [OnlineMechanism::RoundRobin(Permutation::identity(adv.n())), OnlineMechanism::Mnw, OnlineMechanism::LMin]
        {
            match demonstrate_violation(&adv, &mech).unwrap() {
                Some(report) => {
                    found += 1;
                    println!("  {report}");
                }
                None => failures.push(format!("{mech} survived {adv}")),
            }
        }
    }
    println!("  {found}/12 violations");
    report(5, &failures, start.elapsed(), Some(IMPOSSIBILITY_LIMIT));
}

#[test]
fn criterion_6_implications() {
    let start = Instant::now();
    let counts = implication_counterexamples(300, 20, 6, &cfg()).unwrap();
    let failures: Vec<String> = IMPLICATIONS
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(name, c)| format!("{name}: {c} counterexamples"))
        .collect();
    report(6, &failures, start.elapsed(), Some(IMPLICATION_LIMIT));
}

#[test]
fn criterion_7_leximin_collapse() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let config = cfg();
    for seed in 0..200u64 {
        let inst = small_borda_instance(70_000 + seed, 10_000);
        let vectors: Vec<Vec<Ratio>> = [Normalization::None, Normalization::ByRrs, Normalization::ByProp]
            .iter()
            .map(|&norm| utilities(&inst, &leximin_offline(&inst, norm, &config).unwrap()))
            .collect();
        for v in &vectors[1..] {
            expect(&mut failures, leximin_compare(&vectors[0], v).unwrap() == Ordering::Equal, || {
                format!("seed {seed}: {:?} vs {v:?}", vectors[0])
            });
        }
    }
    report(7, &failures, start.elapsed(), None);
}

#[test]
fn criterion_8_axiom_table() {
    let start = Instant::now();
    let cells = axiom_table(100, 8).unwrap();
    let failures: Vec<String> = cells
        .iter()
        .filter(|c| !c.ok())
        .map(|c| format!("{} / {}: expected {}, got {} ({})", c.mechanism, c.axiom, c.expected, c.observed, c.evidence))
        .collect();
    let mut failures = failures;
    expect(&mut failures, cells.len() == 12, || format!("{} cells", cells.len()));
    report(8, &failures, start.elapsed(), None);
}

#[test]
fn criterion_9_pareto() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let config = cfg();

    let rr = get_named_instance("rr-not-po").unwrap().instance;
    let out = rr_offline(&rr, &Permutation::identity(2)).unwrap();
    let po = check_pareto_optimal(&rr, &out, &config).unwrap();
    let witness_ok = matches!(&po.witness, Some(Witness::Dominated { by, .. }) if *by == o(&[2, 2]));
    expect(&mut failures, !po.verdict && witness_ok, || format!("RR-not-PO: {out}, {po:?}"));

    let inst = get_named_instance("online-not-po").unwrap().instance;
    for mech in [Mechanism::Online(OnlineMechanism::LMin), Mechanism::Online(OnlineMechanism::Mnw)] {
        let out = mech.run(&inst, &config).unwrap();
        expect(&mut failures, out == o(&[5, 5]), || format!("{mech} gave {out}"));
        let global = check_pareto_optimal(&inst, &out, &config).unwrap().verdict;
        let local = check_local_po(&inst, &out).unwrap().pass;
        expect(&mut failures, !global && local, || format!("{mech}: global PO {global}, local PO {local}"));
    }
    report(9, &failures, start.elapsed(), None);
}
