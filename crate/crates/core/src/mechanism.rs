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

//! String-addressable mechanisms and property checks, shared by the named
//! instance corpus, the reproduction suites and the command line.

use crate::axioms::check_local_po;
use crate::enumerate::SearchConfig;
use crate::error::{Error, Result};
use crate::fairness::{
    check_additive_prop, check_alpha_prop, check_alpha_prop1, check_alpha_rrs, check_mpp, check_pareto_optimal,
};
use crate::model::{Instance, Outcome};
use crate::offline::{leximin_offline, mnw_offline, rr_offline, Normalization, Permutation};
use crate::online::{run_online, OnlineMechanism};
use crate::scalar::Scalar;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    RrOffline(Permutation),
    MnwOffline,
    LeximinOffline(Normalization),
    Online(OnlineMechanism),
}

pub const MECHANISM_IDS: [&str; 7] = ["rr-off", "mnw-off", "lmin-off", "rr-on", "mnw-on", "lmin-on", "tracker-on"];

impl Mechanism {
    /// Parses `rr-off`, `mnw-off`, `lmin-off[:none|rrs|prop]`, `rr-on`,
    /// `mnw-on`, `lmin-on` or `tracker-on`. `pi` defaults to the identity
    /// over `n` agents; `norm` applies when the id carries no suffix.
    pub fn parse(id: &str, n: usize, pi: Option<Permutation>, norm: Option<Normalization>) -> Result<Self> {
        let pi = pi.unwrap_or_else(|| Permutation::identity(n));
        let (base, suffix) = match id.split_once(':') {
            Some((b, s)) => (b, Some(s)),
            None => (id, None),
        };
        if suffix.is_some() && base != "lmin-off" {
            return Err(Error::Parse(format!("only lmin-off takes a normalization suffix, got {id:?}")));
        }
        Ok(match base {
            "rr-off" => Mechanism::RrOffline(pi),
            "mnw-off" => Mechanism::MnwOffline,
            "lmin-off" => {
                let norm = match suffix {
                    Some(s) => s.parse()?,
                    None => norm.unwrap_or_default(),
                };
                Mechanism::LeximinOffline(norm)
            }
            "rr-on" => Mechanism::Online(OnlineMechanism::RoundRobin(pi)),
            "mnw-on" => Mechanism::Online(OnlineMechanism::Mnw),
            "lmin-on" => Mechanism::Online(OnlineMechanism::LMin),
            "tracker-on" => Mechanism::Online(OnlineMechanism::Tracker),
            other => {
                return Err(Error::UnknownId(format!(
                    "mechanism {other:?}; expected one of {}",
                    MECHANISM_IDS.join(", ")
                )))
            }
        })
    }

    /// Base id without parameters, as accepted by [`Mechanism::parse`].
    pub fn id(&self) -> &'static str {
        match self {
            Mechanism::RrOffline(_) => "rr-off",
            Mechanism::MnwOffline => "mnw-off",
            Mechanism::LeximinOffline(_) => "lmin-off",
            Mechanism::Online(OnlineMechanism::RoundRobin(_)) => "rr-on",
            Mechanism::Online(OnlineMechanism::Mnw) => "mnw-on",
            Mechanism::Online(OnlineMechanism::LMin) => "lmin-on",
            Mechanism::Online(OnlineMechanism::Tracker) => "tracker-on",
        }
    }

    pub fn is_online(&self) -> bool {
        matches!(self, Mechanism::Online(_))
    }

    pub fn permutation(&self) -> Option<&Permutation> {
        match self {
            Mechanism::RrOffline(pi) | Mechanism::Online(OnlineMechanism::RoundRobin(pi)) => Some(pi),
            _ => None,
        }
    }

    pub fn run<V: Scalar>(&self, instance: &Instance<V>, config: &SearchConfig) -> Result<Outcome> {
        match self {
            Mechanism::RrOffline(pi) => rr_offline(instance, pi),
            Mechanism::MnwOffline => mnw_offline(instance, config),
            Mechanism::LeximinOffline(norm) => leximin_offline(instance, *norm, config),
            Mechanism::Online(kind) => run_online(kind, instance),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Mechanism::RrOffline(pi) => write!(f, "rr-off{pi}"),
            Mechanism::MnwOffline => f.write_str("mnw-off"),
            Mechanism::LeximinOffline(norm) => write!(f, "lmin-off:{norm}"),
            Mechanism::Online(OnlineMechanism::RoundRobin(pi)) => write!(f, "rr-on{pi}"),
            Mechanism::Online(kind) => write!(f, "{}-on", kind.name()),
        }
    }
}

/// Property ids accepted by [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Po,
    Prop,
    Prop1,
    Rrs,
    Additive,
    Mpp,
    LocalPo,
}

impl Check {
    pub const ALL: [Check; 7] =
        [Check::Po, Check::Prop, Check::Prop1, Check::Rrs, Check::Additive, Check::Mpp, Check::LocalPo];

    pub fn id(&self) -> &'static str {
        match self {
            Check::Po => "po",
            Check::Prop => "prop",
            Check::Prop1 => "prop1",
            Check::Rrs => "rrs",
            Check::Additive => "additive",
            Check::Mpp => "mpp",
            Check::LocalPo => "local-po",
        }
    }

    pub fn takes_parameter(&self) -> bool {
        matches!(self, Check::Prop | Check::Prop1 | Check::Rrs | Check::Additive)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.id() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownId(format!("property {s:?} (po|prop|prop1|rrs|additive|mpp|local-po)")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult<V> {
    pub check: Check,
    pub parameter: Option<V>,
    pub verdict: bool,
    pub witness: Option<String>,
}

/// Runs one property check. Parameterised checks default to 1 (alpha for
/// prop/prop1/rrs, beta for additive).
pub fn evaluate<V: Scalar>(
    instance: &Instance<V>,
    outcome: &Outcome,
    check: Check,
    parameter: Option<&V>,
    config: &SearchConfig,
) -> Result<CheckResult<V>> {
    if parameter.is_some() && !check.takes_parameter() {
        return Err(Error::InvalidParameter(format!("{check} takes no parameter")));
    }
    let p = parameter.cloned().unwrap_or_else(V::one);
    let report = match check {
        Check::Po => check_pareto_optimal(instance, outcome, config)?,
        Check::Prop => check_alpha_prop(instance, outcome, &p)?,
        Check::Prop1 => check_alpha_prop1(instance, outcome, &p)?,
        Check::Rrs => check_alpha_rrs(instance, outcome, &p)?,
        Check::Additive => check_additive_prop(instance, outcome, &p)?,
        Check::Mpp => check_mpp(instance, outcome, config)?,
        Check::LocalPo => {
            let v = check_local_po(instance, outcome)?;
            return Ok(CheckResult {
                check,
                parameter: None,
                verdict: v.pass,
                witness: v.witness.map(|w| w.to_string()),
            });
        }
    };
    Ok(CheckResult {
        check,
        parameter: report.parameter,
        verdict: report.verdict,
        witness: report.witness.map(|w| w.to_string()),
    })
}
