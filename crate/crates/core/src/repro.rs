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

//! Reproduction suites: each target recomputes a reference table or claim
//! and reports expected vs observed, row by row.

use crate::adversaries::{get_named_instance, NAMED_IDS};
use crate::axioms::{approval_test, check_local_po, homogeneity_test, iat_test, Axiom, AxiomVerdict};
use crate::borda::random_borda_instance;
use crate::enumerate::SearchConfig;
use crate::error::{Error, Result};
use crate::fairness::{
    best_prop_ratio, check_additive_prop, check_alpha_prop, check_alpha_prop1, check_alpha_rrs, max_possible_alpha,
    mpp_verdict,
};
use crate::mechanism::{evaluate, Check, Mechanism};
use crate::model::{accumulated_utility, prop_shares, Instance, Outcome, RoundMatrix, UtilityVector};
use crate::offline::{Normalization, Permutation};
use crate::online::{run_online, OnlineMechanism};
use crate::random::{random_instance, random_ranking, rng};
use crate::Ratio;
use num::{One, Zero};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReproTarget {
    Examples,
    Table1,
    Table2,
    Table3,
    Implications,
    MnwGap,
    LowerBounds,
}

impl ReproTarget {
    pub const ALL: [ReproTarget; 7] = [
        ReproTarget::Examples,
        ReproTarget::Table1,
        ReproTarget::Table2,
        ReproTarget::Table3,
        ReproTarget::Implications,
        ReproTarget::MnwGap,
        ReproTarget::LowerBounds,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ReproTarget::Examples => "examples",
            ReproTarget::Table1 => "table1",
            ReproTarget::Table2 => "table2",
            ReproTarget::Table3 => "table3",
            ReproTarget::Implications => "implications",
            ReproTarget::MnwGap => "mnw-gap",
            ReproTarget::LowerBounds => "lower-bounds",
        }
    }
}

impl fmt::Display for ReproTarget {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ReproTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReproTarget::ALL.into_iter().find(|t| t.id() == s).ok_or_else(|| {
            let ids: Vec<&str> = ReproTarget::ALL.iter().map(|t| t.id()).collect();
            Error::UnknownId(format!("repro target {s:?}; expected one of {}", ids.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproRow {
    pub item: String,
    pub expected: String,
    pub observed: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproReport {
    pub target: ReproTarget,
    pub rows: Vec<ReproRow>,
}

impl ReproReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

impl fmt::Display for ReproReport {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let header = ["item", "expected", "observed", "status"];
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [r.item.clone(), r.expected.clone(), r.observed.clone(), if r.ok { "ok" } else { "MISMATCH" }.into()]
            })
            .collect();
        let mut width = header.map(str::len);
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |f: &mut fmt::Formatter, row: [&str; 4]| -> fmt::Result {
            let parts: Vec<String> = row.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
            writeln!(f, "{}", parts.join(" | ").trim_end())
        };
        writeln!(f, "repro {}", self.target)?;
        line(f, header)?;
        writeln!(f, "{}", width.map(|w| "-".repeat(w)).join("-+-"))?;
        for row in &cells {
            line(f, [&row[0], &row[1], &row[2], &row[3]])?;
        }
        let bad = self.rows.iter().filter(|r| !r.ok).count();
        write!(f, "{} rows, {} mismatches", self.rows.len(), bad)
    }
}

/// Number of random instances behind each "holds" cell of the property tables.
pub const TABLE_SAMPLES: u64 = 30;

pub fn run_repro(target: ReproTarget, config: &SearchConfig) -> Result<ReproReport> {
    let rows = match target {
        ReproTarget::Examples => examples(config)?,
        ReproTarget::Table1 => property_table(&table1(), config)?,
        ReproTarget::Table2 => property_table(&table2(), config)?,
        ReproTarget::Table3 => axiom_table(100, 0)?.iter().map(AxiomCell::row).collect(),
        ReproTarget::Implications => implication_rows(100, 20, 0, config)?,
        ReproTarget::MnwGap => mnw_gap_rows(config)?,
        ReproTarget::LowerBounds => lower_bound_rows(config)?,
    };
    Ok(ReproReport { target, rows })
}

fn examples(config: &SearchConfig) -> Result<Vec<ReproRow>> {
    let mut rows = Vec::new();
    for id in NAMED_IDS {
        for c in get_named_instance(id)?.verify(config)? {
            rows.push(ReproRow {
                item: format!("{id}: {}", c.claim),
                expected: c.expected,
                observed: c.observed,
                ok: c.ok,
            });
        }
    }
    Ok(rows)
}

fn frac(n: i64, d: i64) -> Ratio {
    Ratio::new(n.into(), d.into())
}

/// Mechanism rows of the property tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMechanism {
    LMinOff(Normalization),
    RrOff,
    MnwOff,
    LMinOn,
    RrOn,
    MnwOn,
}

impl TableMechanism {
    pub fn for_agents(&self, n: usize) -> Mechanism {
        match self {
            TableMechanism::LMinOff(norm) => Mechanism::LeximinOffline(*norm),
            TableMechanism::RrOff => Mechanism::RrOffline(Permutation::identity(n)),
            TableMechanism::MnwOff => Mechanism::MnwOffline,
            TableMechanism::LMinOn => Mechanism::Online(OnlineMechanism::LMin),
            TableMechanism::RrOn => Mechanism::Online(OnlineMechanism::RoundRobin(Permutation::identity(n))),
            TableMechanism::MnwOn => Mechanism::Online(OnlineMechanism::Mnw),
        }
    }

    fn label(&self) -> String {
        match self {
            TableMechanism::LMinOff(norm) => format!("lmin-off:{norm}"),
            TableMechanism::RrOff => "rr-off".into(),
            TableMechanism::MnwOff => "mnw-off".into(),
            TableMechanism::LMinOn => "lmin-on".into(),
            TableMechanism::RrOn => "rr-on".into(),
            TableMechanism::MnwOn => "mnw-on".into(),
        }
    }
}

/// Which random instances back the "holds" cells of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    General { agents: Option<usize> },
    Borda,
}

impl Domain {
    /// Small enough that PO and MPP can be decided by brute force.
    pub fn sample(&self, seed: u64) -> Instance<Ratio> {
        let mut g = rng(seed);
        match self {
            Domain::General { agents } => {
                let n = agents.unwrap_or_else(|| g.gen_range(2..=3));
                let (m, t) = (g.gen_range(2..=3), g.gen_range(1..=3));
                random_instance(n, m, t, 6, g.gen())
            }
            Domain::Borda => {
                let (n, m, t) = (g.gen_range(2..=4), g.gen_range(2..=4), g.gen_range(1..=3));
                random_borda_instance(n, m, t, g.gen())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Default,
    Fixed(i64, i64),
    MMinusOne,
    OneOverN,
}

impl Param {
    fn resolve(&self, instance: &Instance<Ratio>) -> Option<Ratio> {
        match self {
            Param::Default => None,
            Param::Fixed(p, q) => Some(frac(*p, *q)),
            Param::MMinusOne => Some(frac(instance.m() as i64 - 1, 1)),
            Param::OneOverN => Some(frac(1, instance.n() as i64)),
        }
    }

    fn describe(&self, check: Check) -> String {
        match self {
            Param::Default => check.to_string(),
            Param::Fixed(p, 1) => format!("{check}({p})"),
            Param::Fixed(p, q) => format!("{check}({p}/{q})"),
            Param::MMinusOne => format!("{check}(m-1)"),
            Param::OneOverN => format!("{check}(1/n)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    /// No counterexample among [`TABLE_SAMPLES`] random instances.
    Holds(Check, Param),
    /// The mechanism's outcome on the named instance fails the check.
    FailsOn(&'static str, Check, Param),
    /// Open question: report the random-suite tally without a verdict.
    Empirical(Check, Param),
}

#[derive(Debug, Clone)]
pub struct TableCell {
    pub row: TableMechanism,
    pub domain: Domain,
    pub column: &'static str,
    pub expected: &'static str,
    pub evidence: Vec<Evidence>,
}

fn cell(
    row: TableMechanism,
    domain: Domain,
    column: &'static str,
    expected: &'static str,
    evidence: Vec<Evidence>,
) -> TableCell {
    TableCell { row, domain, column, expected, evidence }
}

fn row_cells(row: TableMechanism, domain: Domain, cols: [(&'static str, Vec<Evidence>); 5]) -> Vec<TableCell> {
    const NAMES: [&str; 5] = ["PO", "Prop", "Prop1", "MPP", "RRS"];
    cols.into_iter().zip(NAMES).map(|((expected, ev), column)| cell(row, domain, column, expected, ev)).collect()
}

use Check::{Additive, Mpp, Po, Prop, Prop1, Rrs};
use Evidence::{Empirical, FailsOn, Holds};
use Param::{Default as D, Fixed, MMinusOne, OneOverN};

/// Offline mechanisms, unrestricted valuations.
pub fn table1() -> Vec<TableCell> {
    let lprop = TableMechanism::LMinOff(Normalization::ByProp);
    let lrrs = TableMechanism::LMinOff(Normalization::ByRrs);
    let two = Domain::General { agents: Some(2) };
    let three = Domain::General { agents: Some(3) };
    let any = Domain::General { agents: None };
    let no_prop2 = FailsOn("additive-lower-bound(n=2)", Prop, D);
    let no_prop3 = FailsOn("additive-lower-bound(n=3)", Prop, D);
    [
        row_cells(
            lprop,
            two,
            [
                ("yes", vec![Holds(Po, D)]),
                ("no", vec![no_prop2]),
                ("1/2", vec![Holds(Prop1, Fixed(1, 2))]),
                ("yes", vec![Holds(Mpp, D)]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            lprop,
            three,
            [
                ("yes", vec![Holds(Po, D)]),
                ("no", vec![no_prop3]),
                ("no", vec![FailsOn("tradeoff(n=3,t=7,eps=1/210)", Prop1, D)]),
                ("yes", vec![Holds(Mpp, D)]),
                ("no", vec![FailsOn("tradeoff(n=3,t=6,eps=1/60)", Rrs, Fixed(1, 2))]),
            ],
        ),
        row_cells(
            lrrs,
            any,
            [
                ("yes", vec![Holds(Po, D)]),
                ("no", vec![no_prop3]),
                ("1/2", vec![Holds(Prop1, Fixed(1, 2))]),
                ("no", vec![FailsOn("example-2", Mpp, D)]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            TableMechanism::RrOff,
            any,
            [
                ("no", vec![FailsOn("rr-not-po", Po, D)]),
                ("no", vec![no_prop3]),
                ("yes", vec![Holds(Prop1, D)]),
                ("no", vec![FailsOn("example-1", Mpp, D)]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            TableMechanism::MnwOff,
            any,
            [
                ("yes", vec![Holds(Po, D)]),
                ("no", vec![no_prop3]),
                ("yes", vec![Holds(Prop1, D)]),
                ("no", vec![FailsOn("example-1", Mpp, D)]),
                ("1/n", vec![Holds(Rrs, OneOverN)]),
            ],
        ),
    ]
    .concat()
}

/// Offline and online mechanisms, Borda valuations.
pub fn table2() -> Vec<TableCell> {
    let b = Domain::Borda;
    // gap T/n = 3/2 = (m-3)/2 at n=4, m=6, T=6
    let mnw_gap = FailsOn("mnw-gap(n=4,t=6)", Additive, Fixed(149, 100));
    let mnw_rrs = FailsOn("mnw-gap(n=3,t=3)", Rrs, D);
    let mpp_online = FailsOn("mpp-online-y", Mpp, D);
    [
        row_cells(
            TableMechanism::LMinOff(Normalization::ByProp),
            b,
            [
                ("yes", vec![Holds(Po, D)]),
                ("1-additive", vec![Holds(Additive, Fixed(1, 1))]),
                ("yes", vec![Holds(Prop1, D)]),
                ("yes", vec![Holds(Mpp, D)]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            TableMechanism::RrOff,
            b,
            [
                ("no", vec![FailsOn("rr-not-po", Po, D)]),
                ("(m-1)-additive", vec![Holds(Additive, MMinusOne)]),
                ("yes", vec![Holds(Prop1, D)]),
                ("no", vec![FailsOn("example-1", Mpp, D)]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            TableMechanism::MnwOff,
            b,
            [
                ("yes", vec![Holds(Po, D)]),
                ("x-additive, (m-3)/2 <= x <= m-1", vec![Holds(Additive, MMinusOne), mnw_gap]),
                ("yes", vec![Holds(Prop1, D)]),
                ("no", vec![FailsOn("example-1", Mpp, D)]),
                ("no", vec![mnw_rrs]),
            ],
        ),
        row_cells(
            TableMechanism::LMinOn,
            b,
            [
                ("no", vec![FailsOn("online-not-po", Po, D)]),
                ("1-additive", vec![Holds(Additive, Fixed(1, 1))]),
                ("yes", vec![Holds(Prop1, D)]),
                ("no", vec![mpp_online]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            TableMechanism::RrOn,
            b,
            [
                ("no", vec![FailsOn("rr-not-po", Po, D)]),
                ("(m-1)-additive", vec![Holds(Additive, MMinusOne)]),
                ("yes", vec![Holds(Prop1, D)]),
                ("no", vec![mpp_online]),
                ("yes", vec![Holds(Rrs, D)]),
            ],
        ),
        row_cells(
            TableMechanism::MnwOn,
            b,
            [
                ("no", vec![FailsOn("online-not-po", Po, D)]),
                ("x-additive, x >= (m-3)/2", vec![mnw_gap]),
                ("open", vec![Empirical(Prop1, D)]),
                ("no", vec![mpp_online]),
                ("no", vec![mnw_rrs]),
            ],
        ),
    ]
    .concat()
}

impl TableCell {
    /// Each evidence item yields `(observed, ok)`.
    pub fn assess(&self, config: &SearchConfig) -> Result<Vec<(String, bool)>> {
        self.evidence.iter().map(|ev| self.assess_one(*ev, config)).collect()
    }

    fn random_failures(&self, check: Check, param: Param, config: &SearchConfig) -> Result<(u64, Option<u64>)> {
        let mut failures = 0;
        let mut first = None;
        for seed in 0..TABLE_SAMPLES {
            let inst = self.domain.sample(seed);
            let out = self.row.for_agents(inst.n()).run(&inst, config)?;
            let verdict = evaluate(&inst, &out, check, param.resolve(&inst).as_ref(), config)?.verdict;
            if !verdict {
                failures += 1;
                first.get_or_insert(seed);
            }
        }
        Ok((failures, first))
    }

    fn assess_one(&self, ev: Evidence, config: &SearchConfig) -> Result<(String, bool)> {
        Ok(match ev {
            Holds(check, param) => {
                let (failures, first) = self.random_failures(check, param, config)?;
                let what = param.describe(check);
                match first {
                    None => (format!("{what} held on {TABLE_SAMPLES}/{TABLE_SAMPLES} random"), true),
                    Some(seed) => (format!("{what} failed on {failures} random (first seed {seed})"), false),
                }
            }
            Empirical(check, param) => {
                let (failures, _) = self.random_failures(check, param, config)?;
                let held = TABLE_SAMPLES - failures;
                (format!("{} held on {held}/{TABLE_SAMPLES} random", param.describe(check)), true)
            }
            FailsOn(id, check, param) => {
                let inst = get_named_instance(id)?.instance;
                let out = self.row.for_agents(inst.n()).run(&inst, config)?;
                let verdict = evaluate(&inst, &out, check, param.resolve(&inst).as_ref(), config)?.verdict;
                let what = param.describe(check);
                if verdict {
                    (format!("{what} held on {id} via {out}"), false)
                } else {
                    (format!("{what} fails on {id} via {out}"), true)
                }
            }
        })
    }
}

fn property_table(cells: &[TableCell], config: &SearchConfig) -> Result<Vec<ReproRow>> {
    let mut rows = Vec::new();
    for c in cells {
        let assessed = c.assess(config)?;
        let scope = match c.domain {
            Domain::General { agents: Some(2) } => " (n=2)",
            Domain::General { agents: Some(_) } => " (n>2)",
            _ => "",
        };
        rows.push(ReproRow {
            item: format!("{}{scope} / {}", c.row.label(), c.column),
            expected: c.expected.to_string(),
            observed: assessed.iter().map(|(o, _)| o.as_str()).collect::<Vec<_>>().join("; "),
            ok: assessed.iter().all(|(_, ok)| *ok),
        });
    }
    Ok(rows)
}

/// One cell of the online axiom table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCell {
    pub mechanism: &'static str,
    pub axiom: Axiom,
    pub expected: bool,
    pub observed: bool,
    pub evidence: String,
}

impl AxiomCell {
    pub fn ok(&self) -> bool {
        self.expected == self.observed
    }

    fn row(&self) -> ReproRow {
        let yn = |b: bool| if b { "yes" } else { "no" }.to_string();
        ReproRow {
            item: format!("{} / {}", self.mechanism, self.axiom),
            expected: yn(self.expected),
            observed: format!("{} ({})", yn(self.observed), self.evidence),
            ok: self.ok(),
        }
    }
}

const AXIOM_MECHANISMS: [&str; 3] = ["lmin-on", "rr-on", "mnw-on"];

fn axiom_expected(mechanism: &str, axiom: Axiom) -> bool {
    match (mechanism, axiom) {
        ("rr-on", Axiom::Iat) => true,
        ("rr-on", _) => false,
        ("mnw-on", Axiom::Iat) => false,
        _ => true,
    }
}

fn online_for(mechanism: &str, n: usize, g: &mut impl Rng) -> OnlineMechanism {
    match mechanism {
        "rr-on" => OnlineMechanism::RoundRobin(
            Permutation::new(random_ranking(g, n)).expect("random ranking is a permutation"),
        ),
        "mnw-on" => OnlineMechanism::Mnw,
        _ => OnlineMechanism::LMin,
    }
}

/// Fixed failing inputs for the "no" cells of the axiom table.
pub fn axiom_witness(mechanism: &str, axiom: Axiom) -> Result<Option<AxiomVerdict>> {
    let rr2 = OnlineMechanism::RoundRobin(Permutation::identity(2));
    Ok(match (mechanism, axiom) {
        ("rr-on", Axiom::LocalPo) => {
            let inst = Instance::<Ratio>::from_ints(&[&[&[1, 1], &[0, 1]]])?;
            Some(check_local_po(&inst, &run_online(&rr2, &inst)?)?)
        }
        ("rr-on", Axiom::Approval) => {
            let round = RoundMatrix::<Ratio>::from_ints(&[&[1, 0], &[0, 1], &[0, 1]])?;
            let rr3 = OnlineMechanism::RoundRobin(Permutation::identity(3));
            Some(approval_test(&rr3, &round, &UtilityVector::zeros(3), 0)?)
        }
        ("rr-on", Axiom::Homogeneity) => {
            let inst = Instance::<Ratio>::from_ints(&[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]])?;
            Some(homogeneity_test(&rr2, &inst, 2, 1)?)
        }
        ("mnw-on", Axiom::Iat) => {
            let inst = get_named_instance("mnw-not-iat")?.instance;
            Some(iat_test(&OnlineMechanism::Mnw, &inst, &Ratio::one(), &Ratio::one())?)
        }
        _ => None,
    })
}

/// One randomized trial of `axiom` for `mechanism`; seeded, so reruns agree.
pub fn axiom_trial(mechanism: &str, axiom: Axiom, seed: u64) -> Result<AxiomVerdict> {
    let mut g = rng(seed);
    let (n, m, t) = (g.gen_range(1..=4), g.gen_range(2..=4), g.gen_range(1..=4));
    let kind = online_for(mechanism, n, &mut g);
    match axiom {
        Axiom::LocalPo => {
            let inst: Instance<Ratio> = random_instance(n, m, t, 5, g.gen());
            check_local_po(&inst, &run_online(&kind, &inst)?)
        }
        Axiom::Iat => {
            let inst: Instance<Ratio> = random_instance(n, m, t, 5, g.gen());
            let a = frac(g.gen_range(1..=6), g.gen_range(1..=4));
            let b = frac(g.gen_range(0..=6), g.gen_range(1..=3));
            iat_test(&kind, &inst, &a, &b)
        }
        Axiom::Approval => {
            let rows = (0..n).map(|_| (0..m).map(|_| frac(g.gen_range(0..=1), 1)).collect()).collect();
            let round = RoundMatrix::new(rows)?;
            let level = frac(g.gen_range(0..=3), 1);
            approval_test(&kind, &round, &UtilityVector::from_values(vec![level; n]), g.gen_range(0..=4))
        }
        Axiom::Homogeneity => {
            let inst: Instance<Ratio> = random_instance(n, m, t, 5, g.gen());
            homogeneity_test(&kind, &inst, g.gen_range(1..=4), g.gen_range(0..t))
        }
    }
}

/// All twelve cells: witnesses for the "no" cells, `trials` random trials
/// for the "yes" cells.
pub fn axiom_table(trials: u64, seed: u64) -> Result<Vec<AxiomCell>> {
    let mut cells = Vec::new();
    for mechanism in AXIOM_MECHANISMS {
        for axiom in Axiom::ALL {
            let expected = axiom_expected(mechanism, axiom);
            let (observed, evidence) = match axiom_witness(mechanism, axiom)? {
                Some(v) => {
                    let w = v.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
                    (v.pass, format!("fixed witness: {w}"))
                }
                None => {
                    let mut failed = None;
                    for k in 0..trials {
                        let s = seed.wrapping_mul(1_000_003).wrapping_add(k);
                        if !axiom_trial(mechanism, axiom, s)?.pass {
                            failed = Some(s);
                            break;
                        }
                    }
                    match failed {
                        None => (true, format!("{trials}/{trials} random trials pass")),
                        Some(s) => (false, format!("random trial seed {s} fails")),
                    }
                }
            };
            cells.push(AxiomCell { mechanism, axiom, expected, observed, evidence });
        }
    }
    Ok(cells)
}

/// The implication graph: six edges valid under Borda valuations, three
/// valid in general.
pub const IMPLICATIONS: [&str; 9] = [
    "MPP => 1-additive",
    "MPP => RRS",
    "RRS => (m-1)-additive",
    "1-additive => Prop1",
    "Prop1 => (m-1)-additive",
    "(m-1)-additive => 1/2-Prop1",
    "Prop => MPP",
    "Prop => RRS",
    "RRS => 1/2-Prop1",
];

/// For each edge of [`IMPLICATIONS`], whether it holds for `outcome`
/// (vacuously when the premise fails). `optimum` and `optimal` come from
/// the MPP oracle for `instance`.
pub fn implications_hold(
    instance: &Instance<Ratio>,
    outcome: &Outcome,
    optimum: &Ratio,
    optimal: &Outcome,
) -> Result<[bool; 9]> {
    let one = Ratio::one();
    let half = frac(1, 2);
    let m1 = frac(instance.m() as i64 - 1, 1);
    let mpp = mpp_verdict(instance, outcome, optimum.clone(), optimal.clone())?.verdict;
    let add1 = check_additive_prop(instance, outcome, &one)?.verdict;
    let rrs = check_alpha_rrs(instance, outcome, &one)?.verdict;
    let addm = if m1.is_zero() { true } else { check_additive_prop(instance, outcome, &m1)?.verdict };
    let prop1 = check_alpha_prop1(instance, outcome, &one)?.verdict;
    let half_prop1 = check_alpha_prop1(instance, outcome, &half)?.verdict;
    let prop = check_alpha_prop(instance, outcome, &one)?.verdict;
    let imp = |a: bool, b: bool| !a || b;
    Ok([
        imp(mpp, add1),
        imp(mpp, rrs),
        imp(rrs, addm),
        imp(add1, prop1),
        imp(prop1, addm),
        imp(addm, half_prop1),
        imp(prop, mpp),
        imp(prop, rrs),
        imp(rrs, half_prop1),
    ])
}

/// Random Borda instance with at most `max_outcomes` outcomes, for suites
/// that need the MPP oracle.
pub fn small_borda_instance(seed: u64, max_outcomes: u64) -> Instance<Ratio> {
    let mut g = rng(seed);
    let (n, m) = (g.gen_range(2..=4), g.gen_range(2..=5));
    let mut t = g.gen_range(1..=6);
    while (m as u64).pow(t as u32) > max_outcomes && t > 1 {
        t -= 1;
    }
    random_borda_instance(n, m, t, g.gen())
}

/// Counterexample count per implication over `instances` random Borda
/// instances, each checked on the MPP-optimal outcome plus `samples - 1`
/// random outcomes.
pub fn implication_counterexamples(
    instances: u64,
    samples: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<[u64; 9]> {
    let mut counts = [0u64; 9];
    for k in 0..instances {
        let inst = small_borda_instance(seed.wrapping_mul(7919).wrapping_add(k), 1000);
        let optimum = max_possible_alpha(&inst, config)?;
        let (optimal, _) = best_prop_ratio(&inst, config)?;
        let mut g = rng(seed ^ (k << 20));
        let mut outcomes = vec![optimal.clone()];
        while outcomes.len() < samples.max(1) {
            outcomes.push(Outcome::new((0..inst.horizon()).map(|_| g.gen_range(0..inst.m())).collect()));
        }
        for out in &outcomes {
            for (c, ok) in counts.iter_mut().zip(implications_hold(&inst, out, &optimum, &optimal)?) {
                *c += u64::from(!ok);
            }
        }
    }
    Ok(counts)
}

fn implication_rows(instances: u64, samples: usize, seed: u64, config: &SearchConfig) -> Result<Vec<ReproRow>> {
    let counts = implication_counterexamples(instances, samples, seed, config)?;
    Ok(IMPLICATIONS
        .iter()
        .zip(counts)
        .map(|(name, c)| ReproRow {
            item: (*name).to_string(),
            expected: "0 counterexamples".into(),
            observed: format!("{c} counterexamples in {instances}x{samples}"),
            ok: c == 0,
        })
        .collect())
}

fn utility_gap(instance: &Instance<Ratio>, outcome: &Outcome, agent: usize) -> Result<(Ratio, Ratio, Ratio)> {
    let u = accumulated_utility(instance, outcome)?[agent].clone();
    let p = prop_shares(instance)[agent].clone();
    Ok((u.clone(), p.clone(), p - u))
}

fn mnw_gap_rows(config: &SearchConfig) -> Result<Vec<ReproRow>> {
    let mut rows = Vec::new();
    for n in [3usize, 4] {
        for t in 1..=3usize {
            let named = get_named_instance(&format!("mnw-gap(n={n},t={t})"))?;
            let out = Mechanism::MnwOffline.run(&named.instance, config)?;
            let (u, p, gap) = utility_gap(&named.instance, &out, 0)?;
            let want = frac(t as i64, n as i64);
            rows.push(ReproRow {
                item: format!("mnw-gap n={n} T={t}: agent 1 gap"),
                expected: want.to_string(),
                observed: format!("{gap} (u={u}, Prop={p}, outcome {out})"),
                ok: gap == want,
            });
        }
    }
    Ok(rows)
}

fn lower_bound_rows(config: &SearchConfig) -> Result<Vec<ReproRow>> {
    let mut rows = Vec::new();
    for n in [3usize, 4] {
        let named = get_named_instance(&format!("additive-lower-bound(n={n})"))?;
        let props = prop_shares(&named.instance);
        let mut best: Option<Ratio> = None;
        crate::enumerate::for_each_outcome(&named.instance, config, |_, u| {
            let worst = u.iter().zip(&props).map(|(u, p)| p - u).max().expect("n >= 1");
            if best.as_ref().is_none_or(|b| worst < *b) {
                best = Some(worst);
            }
        })?;
        let want = frac(n as i64 - 1, n as i64);
        let got = best.expect("some outcome");
        rows.push(ReproRow {
            item: format!("additive n={n}: least worst gap over outcomes"),
            expected: want.to_string(),
            observed: got.to_string(),
            ok: got == want,
        });
    }
    for (n, m) in [(4usize, 3usize), (3, 5)] {
        let named = get_named_instance(&format!("rr-lower-bound(n={n},m={m})"))?;
        let out = Mechanism::RrOffline(Permutation::identity(n)).run(&named.instance, config)?;
        let (u, p, _) = utility_gap(&named.instance, &out, n - 1)?;
        let want = frac(((n - 1) * (m - 1)) as i64, n as i64);
        rows.push(ReproRow {
            item: format!("rr-off n={n} m={m}: agent {n} utility and Prop"),
            expected: format!("0 and {want}"),
            observed: format!("{u} and {p}"),
            ok: u.is_zero() && p == want,
        });
    }
    for (n, t) in [(3usize, 3usize), (4, 6)] {
        let named = get_named_instance(&format!("mnw-gap(n={n},t={t})"))?;
        let out = Mechanism::MnwOffline.run(&named.instance, config)?;
        let (_, _, gap) = utility_gap(&named.instance, &out, 0)?;
        let want = frac(named.instance.m() as i64 - 3, 2);
        rows.push(ReproRow {
            item: format!("mnw-off n={n} T={t}: agent 1 gap vs (m-3)/2"),
            expected: want.to_string(),
            observed: gap.to_string(),
            ok: gap == want,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SearchConfig {
        SearchConfig::default().parallel(true)
    }

    #[test]
    fn target_ids_round_trip() {
        for t in ReproTarget::ALL {
            assert_eq!(t.id().parse::<ReproTarget>().unwrap(), t);
        }
        assert!(matches!("table4".parse::<ReproTarget>(), Err(Error::UnknownId(_))));
    }

    #[test]
    fn cheap_targets_match() {
        for t in [ReproTarget::Examples, ReproTarget::MnwGap, ReproTarget::LowerBounds, ReproTarget::Table3] {
            let report = run_repro(t, &cfg()).unwrap();
            assert!(report.all_ok(), "{report}");
        }
    }

    #[test]
    fn property_tables_match() {
        for t in [ReproTarget::Table1, ReproTarget::Table2] {
            let report = run_repro(t, &cfg()).unwrap();
            assert_eq!(report.rows.len(), if t == ReproTarget::Table1 { 25 } else { 30 });
            assert!(report.all_ok(), "{report}");
        }
    }

    #[test]
    fn implications_target() {
        let counts = implication_counterexamples(30, 10, 3, &cfg()).unwrap();
        assert_eq!(counts, [0; 9]);
    }

    #[test]
    fn implications_catch_a_planted_failure() {
        // Prop => MPP is false when the oracle is fed a wrong optimum
        let inst = get_named_instance("example-1").unwrap().instance;
        let c3 = Outcome::from_labels(&[3]).unwrap();
        let holds = implications_hold(&inst, &c3, &frac(2, 1), &Outcome::from_labels(&[1]).unwrap()).unwrap();
        assert!(!holds[6]);
        let honest = implications_hold(&inst, &c3, &Ratio::one(), &c3).unwrap();
        assert!(honest.iter().all(|&h| h));
    }

    #[test]
    fn axiom_trials_are_seeded() {
        for axiom in Axiom::ALL {
            assert_eq!(axiom_trial("lmin-on", axiom, 9).unwrap(), axiom_trial("lmin-on", axiom, 9).unwrap());
        }
    }

    #[test]
    fn report_renders() {
        let report = ReproReport {
            target: ReproTarget::Examples,
            rows: vec![ReproRow { item: "a".into(), expected: "1".into(), observed: "2".into(), ok: false }],
        };
        let text = report.to_string();
        assert!(text.contains("MISMATCH") && text.ends_with("1 rows, 1 mismatches"));
    }
}
