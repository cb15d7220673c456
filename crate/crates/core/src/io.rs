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

//! JSON instance files and run records.
//!
//! ```json
//! {"schema": 1, "n": 2, "m": 3, "T": 1,
//!  "valuations": [[["1/2", 0, 3], [1, "2/3", 0]]]}
//! ```
//!
//! `"rankings"` may replace `"valuations"`: per round and agent, the 1-based
//! candidates from best to worst, converted to Borda scores on load.

use crate::borda::{borda_from_rankings, RankingProfile};
use crate::error::{Error, Result};
use crate::mechanism::{CheckResult, Mechanism};
use crate::model::{accumulated_utility, Instance, Outcome};
use crate::offline::Normalization;
use crate::Ratio;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// A rational cell: a JSON integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn from_ratio(v: &Ratio) -> Self {
        if v.is_integer() {
            if let Ok(k) = i64::try_from(v.to_integer()) {
                return Cell::Int(k);
            }
        }
        Cell::Text(v.to_string())
    }

    fn to_ratio(&self, field: &str) -> Result<Ratio> {
        match self {
            Cell::Int(k) => Ok(Ratio::from_integer((*k).into())),
            Cell::Text(s) => parse_ratio(s).map_err(|e| Error::Parse(format!("field {field}: {e}"))),
        }
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_ratio(text: &str) -> Result<Ratio> {
    let t = text.trim();
    if t.ends_with("/0") || t.contains("/-") {
        return Err(Error::Parse(format!("bad denominator in {text:?}")));
    }
    t.parse::<Ratio>().map_err(|_| Error::Parse(format!("expected an integer or p/q, got {text:?}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<Vec<Vec<Cell>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rankings: Option<Vec<Vec<Vec<usize>>>>,
}

fn expect_len(field: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Parse(format!("field {field}: expected {want} entries, found {got}")))
    }
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance<Ratio>) -> Self {
        let valuations = instance
            .rounds()
            .iter()
            .map(|r| r.rows().map(|row| row.iter().map(Cell::from_ratio).collect()).collect())
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            n: instance.n(),
            m: instance.m(),
            t: instance.horizon(),
            valuations: Some(valuations),
            rankings: None,
        }
    }

    pub fn to_instance(&self) -> Result<Instance<Ratio>> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("field schema: unsupported version {}", self.schema)));
        }
        match (&self.valuations, &self.rankings) {
            (Some(vals), None) => {
                expect_len("valuations", vals.len(), self.t)?;
                let mut rows = Vec::with_capacity(self.t);
                for (t, round) in vals.iter().enumerate() {
                    expect_len(&format!("valuations[{t}]"), round.len(), self.n)?;
                    let mut agents = Vec::with_capacity(self.n);
                    for (i, row) in round.iter().enumerate() {
                        expect_len(&format!("valuations[{t}][{i}]"), row.len(), self.m)?;
                        let values = row
                            .iter()
                            .enumerate()
                            .map(|(j, c)| c.to_ratio(&format!("valuations[{t}][{i}][{j}]")))
                            .collect::<Result<Vec<_>>>()?;
                        agents.push(values);
                    }
                    rows.push(agents);
                }
                Instance::from_rows(rows)
            }
            (None, Some(ranks)) => {
                expect_len("rankings", ranks.len(), self.t)?;
                for (t, round) in ranks.iter().enumerate() {
                    expect_len(&format!("rankings[{t}]"), round.len(), self.n)?;
                }
                borda_from_rankings(&RankingProfile::from_labels(self.m, ranks)?)
            }
            (Some(_), Some(_)) => Err(Error::Parse("give either valuations or rankings, not both".into())),
            (None, None) => Err(Error::Parse("missing field valuations (or rankings)".into())),
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    // serde_json already appends "at line L column C"
    Error::Parse(format!("instance file: {e}"))
}

pub fn parse_instance(text: &str) -> Result<Instance<Ratio>> {
    serde_json::from_str::<InstanceFile>(text).map_err(json_error)?.to_instance()
}

pub fn instance_to_json(instance: &Instance<Ratio>) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(instance)).expect("plain data serializes")
}

pub fn load_instance(path: &Path) -> Result<Instance<Ratio>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_instance(instance: &Instance<Ratio>, path: &Path) -> Result<()> {
    std::fs::write(path, instance_to_json(instance) + "\n")
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub property: String,
    pub parameter: Option<String>,
    pub verdict: bool,
    pub witness: Option<String>,
}

impl From<&CheckResult<Ratio>> for CheckRecord {
    fn from(r: &CheckResult<Ratio>) -> Self {
        Self {
            property: r.check.id().to_string(),
            parameter: r.parameter.as_ref().map(|p| p.to_string()),
            verdict: r.verdict,
            witness: r.witness.clone(),
        }
    }
}

/// Everything needed to re-run a mechanism and compare its output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub mechanism: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    /// 1-based candidate labels.
    pub outcome: Vec<usize>,
    pub utilities: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub elapsed_micros: u64,
}

impl RunRecord {
    pub fn new(
        mechanism: &Mechanism,
        instance: &Instance<Ratio>,
        outcome: &Outcome,
        checks: &[CheckResult<Ratio>],
        elapsed: std::time::Duration,
    ) -> Result<Self> {
        let utilities = accumulated_utility(instance, outcome)?;
        Ok(Self {
            mechanism: mechanism.id().to_string(),
            permutation: mechanism.permutation().map(|p| p.order().iter().map(|a| a + 1).collect()),
            normalization: match mechanism {
                Mechanism::LeximinOffline(norm) => Some(norm.to_string()),
                _ => None,
            },
            outcome: outcome.labels(),
            utilities: utilities.values().iter().map(|u| u.to_string()).collect(),
            checks: checks.iter().map(CheckRecord::from).collect(),
            elapsed_micros: u64::try_from(elapsed.as_micros()).unwrap_or(u64::MAX),
        })
    }

    /// Rebuilds the mechanism the record was produced by.
    pub fn mechanism(&self, n: usize) -> Result<Mechanism> {
        let pi =
            self.permutation.as_ref().map(|labels| crate::offline::Permutation::from_labels(labels)).transpose()?;
        let norm = self.normalization.as_deref().map(str::parse::<Normalization>).transpose()?;
        Mechanism::parse(&self.mechanism, n, pi, norm)
    }

    pub fn outcome(&self) -> Result<Outcome> {
        Outcome::from_labels(&self.outcome)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("run record: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{get_named_instance, NAMED_IDS};
    use crate::mechanism::{evaluate, Check};
    use crate::random::random_instance;
    use crate::SearchConfig;
    use proptest::prelude::*;

    #[test]
    fn parses_mixed_cells() {
        let inst =
            parse_instance(r#"{"schema":1,"n":2,"m":3,"T":1,"valuations":[[["1/2",0,3],[1,"2/3","0"]]]}"#).unwrap();
        assert_eq!(inst.value(0, 0, 0), &Ratio::new(1.into(), 2.into()));
        assert_eq!(inst.value(0, 1, 1), &Ratio::new(2.into(), 3.into()));
        assert_eq!(inst.value(0, 0, 2), &Ratio::from_integer(3.into()));
    }

    #[test]
    fn rankings_become_borda() {
        let inst = parse_instance(r#"{"schema":1,"n":2,"m":3,"T":1,"rankings":[[[2,1,3],[3,2,1]]]}"#).unwrap();
        let ints: Vec<Vec<i64>> =
            inst.round(0).rows().map(|r| r.iter().map(|v| i64::try_from(v.to_integer()).unwrap()).collect()).collect();
        assert_eq!(ints, vec![vec![1, 2, 0], vec![0, 1, 2]]);
    }

    #[test]
    fn errors_carry_context() {
        let cases = [
            (r#"{"schema":1,"n":2,"m":2,"T":1,"valuations":[[[1,0],[0,"x"]]]}"#, "valuations[0][1][1]"),
            (r#"{"schema":1,"n":2,"m":2,"T":1,"valuations":[[[1,0]]]}"#, "valuations[0]"),
            (r#"{"schema":1,"n":2,"m":2,"T":2,"valuations":[[[1,0],[0,1]]]}"#, "valuations"),
            (r#"{"schema":1,"n":2,"m":2,"T":1,"valuations":[[[1,0],[0,"1/0"]]]}"#, "valuations[0][1][1]"),
            (r#"{"schema":2,"n":2,"m":2,"T":1,"valuations":[[[1,0],[0,1]]]}"#, "schema"),
            ("{\"schema\":1,\n\"n\":2,\n\"m\":2,\n\"T\":1,\n\"valuations\": [[[1,0],[0,1]],]}", "line 5"),
            (r#"{"schema":1,"n":2,"m":2,"T":1,"weights":[]}"#, "weights"),
            (r#"{"schema":1,"n":2,"m":2,"T":1}"#, "valuations"),
        ];
        for (text, needle) in cases {
            let msg = parse_instance(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{msg:?} lacks {needle:?}");
        }
        // shape is fine but all zeros is not a valid instance
        assert!(matches!(
            parse_instance(r#"{"schema":1,"n":1,"m":2,"T":1,"valuations":[[[0,0]]]}"#),
            Err(Error::InvalidInstance(_))
        ));
        assert!(parse_instance(r#"{"schema":1,"n":1,"m":2,"T":1,"valuations":[[[-1,2]]]}"#).is_err());
    }

    #[test]
    fn named_corpus_round_trips() {
        for id in NAMED_IDS {
            let inst = get_named_instance(id).unwrap().instance;
            assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst, "{id}");
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = get_named_instance("tradeoff").unwrap().instance;
        save_instance(&inst, &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), inst);
        let err = load_instance(&dir.path().join("missing.json")).unwrap_err().to_string();
        assert!(err.contains("missing.json"));
    }

    #[test]
    fn run_record_replays() {
        let cfg = SearchConfig::default();
        for (seed, id) in ["rr-off", "mnw-off", "lmin-off:rrs", "rr-on", "mnw-on", "lmin-on"].iter().enumerate() {
            let inst = random_instance::<Ratio>(3, 3, 3, 4, seed as u64);
            let pi = crate::offline::Permutation::from_labels(&[3, 1, 2]).unwrap();
            let mech = Mechanism::parse(id, 3, Some(pi), None).unwrap();
            let out = mech.run(&inst, &cfg).unwrap();
            let checks = vec![evaluate(&inst, &out, Check::Prop, None, &cfg).unwrap()];
            let rec = RunRecord::new(&mech, &inst, &out, &checks, std::time::Duration::from_millis(3)).unwrap();
            let back = RunRecord::from_json(&rec.to_json()).unwrap();
            assert_eq!(back, rec);
            let again = back.mechanism(3).unwrap();
            assert_eq!(again, mech);
            assert_eq!(again.run(&inst, &cfg).unwrap(), back.outcome().unwrap());
        }
    }

    proptest! {
        #[test]
        fn cells_round_trip(p in -1_000_000_000_000i64..1_000_000_000_000, q in 1i64..1_000_000) {
            let v = Ratio::new(p.into(), q.into());
            let cell = Cell::from_ratio(&v);
            let json = serde_json::to_string(&cell).unwrap();
            let back: Cell = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back.to_ratio("x").unwrap(), v);
        }

        #[test]
        fn random_instances_round_trip(n in 1usize..4, m in 1usize..4, t in 1usize..4, seed in 0u64..1000) {
            let inst = random_instance::<Ratio>(n, m, t, 7, seed);
            prop_assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
        }
    }
}
