//! Executable property checks over a library of instances.

mod checks;
pub mod library;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exactgeom::rational::{QVector, Rational};
use crate::io::{self, FlagSpec, Variety};
use crate::oracle::SampleConfig;

pub use checks::run_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Slicing,
    DimVol,
    Criteria,
    PositivePart,
    Zariski,
    Simplex,
    LimitingLimit,
    Birational,
    Oracle,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        CheckKind::Slicing,
        CheckKind::DimVol,
        CheckKind::Criteria,
        CheckKind::PositivePart,
        CheckKind::Zariski,
        CheckKind::Simplex,
        CheckKind::LimitingLimit,
        CheckKind::Birational,
        CheckKind::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Slicing => "slicing",
            CheckKind::DimVol => "dim_vol",
            CheckKind::Criteria => "criteria",
            CheckKind::PositivePart => "positive_part",
            CheckKind::Zariski => "zariski",
            CheckKind::Simplex => "simplex",
            CheckKind::LimitingLimit => "limiting_limit",
            CheckKind::Birational => "birational",
            CheckKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Schema(format!("unknown check {s:?}")))
    }
}

/// Tags the instance is expected to carry; unset tags are not compared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expected {
    pub psef: Option<bool>,
    pub big: Option<bool>,
    pub kappa: Option<Dimension>,
    pub kappa_nu: Option<Dimension>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckParams {
    /// Slice dimensions for the slicing check (default: 1..n-1, or 1 on surfaces).
    pub slicing_k: Vec<usize>,
    pub ample: Option<QVector>,
    pub second_ample: Option<QVector>,
    pub oracle: Option<SampleConfig>,
    pub oracle_threshold: Option<Rational>,
    /// Toric birational check: blow up this maximal cone.
    pub blowup_cone: Option<Vec<usize>>,
    /// Surface birational check: the same data on the blown-up model.
    pub partner: Option<Box<Instance>>,
    /// Exceptional curve of the partner model.
    pub exceptional: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub variety: Variety,
    pub divisor: QVector,
    pub flags: Vec<FlagSpec>,
    pub expected: Expected,
    pub note: String,
    pub checks: Vec<CheckKind>,
    pub params: CheckParams,
}

impl Instance {
    pub fn new(id: impl Into<String>, variety: Variety, divisor: QVector) -> Self {
        Instance {
            id: id.into(),
            variety,
            divisor,
            flags: Vec::new(),
            expected: Expected::default(),
            note: String::new(),
            checks: Vec::new(),
            params: CheckParams::default(),
        }
    }

    pub fn flag(mut self, f: FlagSpec) -> Self {
        self.flags.push(f);
        self
    }

    pub fn checks(mut self, checks: &[CheckKind]) -> Self {
        self.checks.extend_from_slice(checks);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.variety {
            Variety::Toric(x) => {
                let r = x.validate();
                if !r.is_valid() {
                    return Err(Error::InvalidInput(r.describe().join("; ")));
                }
            }
            Variety::Surface(s) => {
                let r = s.validate();
                if !r.is_valid() {
                    return Err(Error::InvalidInput(r.problems.join("; ")));
                }
            }
        }
        if self.divisor.len() != self.variety.divisor_len() {
            return Err(Error::DimensionMismatch {
                expected: self.variety.divisor_len(),
                got: self.divisor.len(),
            });
        }
        if let (Some(k), Some(kn)) = (self.expected.kappa, self.expected.kappa_nu) {
            if k > kn {
                return Err(Error::InvalidInput(format!(
                    "{}: expected κ = {k} exceeds κ_ν = {kn}",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Hypothesis unmet; never counted as a pass.
    Gated(String),
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Gated(_) => "gated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: CheckKind,
    pub instance: String,
    pub status: Status,
    pub witness: Value,
    pub notes: Vec<String>,
    /// Vertex count of every body computed by the check.
    pub vertex_counts: Vec<usize>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "check": self.check.as_str(),
            "instance": self.instance,
            "status": self.status.as_str(),
            "witness": self.witness,
            "notes": self.notes,
            "vertex_counts": self.vertex_counts,
        });
        if let Status::Gated(reason) = &self.status {
            v["reason"] = Value::String(reason.clone());
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub reports: Vec<CheckReport>,
}

impl SuiteSummary {
    pub fn count(&self, status: &str) -> usize {
        self.reports.iter().filter(|r| r.status.as_str() == status).count()
    }

    pub fn failures(&self) -> Vec<&CheckReport> {
        self.reports.iter().filter(|r| r.failed()).collect()
    }

    pub fn of(&self, check: CheckKind) -> Vec<&CheckReport> {
        self.reports.iter().filter(|r| r.check == check).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.count("pass"),
            "fail": self.count("fail"),
            "gated": self.count("gated"),
            "reports": self.reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<40} {:<15} {}\n", "instance", "check", "status");
        for r in &self.reports {
            let extra = match &r.status {
                Status::Gated(reason) => format!(" ({reason})"),
                _ => String::new(),
            };
            out.push_str(&format!(
                "{:<40} {:<15} {}{}\n",
                r.instance,
                r.check,
                r.status.as_str(),
                extra
            ));
        }
        out.push_str(&format!(
            "{} pass, {} fail, {} gated\n",
            self.count("pass"),
            self.count("fail"),
            self.count("gated")
        ));
        out
    }
}

/// Runs every listed check of every instance; reports sorted by instance id.
pub fn run_suite(instances: &[Instance]) -> SuiteSummary {
    let mut reports: Vec<CheckReport> = instances
        .iter()
        .flat_map(|inst| inst.checks.iter().map(move |&c| run_check(inst, c)))
        .collect();
    reports.sort_by(|a, b| (&a.instance, a.check).cmp(&(&b.instance, b.check)));
    SuiteSummary { reports }
}

pub fn instance_to_json(inst: &Instance) -> Value {
    let e = &inst.expected;
    let mut expected = serde_json::Map::new();
    if let Some(b) = e.psef {
        expected.insert("psef".into(), json!(b));
    }
    if let Some(b) = e.big {
        expected.insert("big".into(), json!(b));
    }
    if let Some(k) = e.kappa {
        expected.insert("kappa".into(), json!(k.to_string()));
    }
    if let Some(k) = e.kappa_nu {
        expected.insert("kappa_nu".into(), json!(k.to_string()));
    }
    let p = &inst.params;
    let mut params = serde_json::Map::new();
    if !p.slicing_k.is_empty() {
        params.insert("slicing_k".into(), json!(p.slicing_k));
    }
    if let Some(a) = &p.ample {
        params.insert("ample".into(), io::divisor_to_json(a, &inst.variety));
    }
    if let Some(a) = &p.second_ample {
        params.insert("second_ample".into(), io::divisor_to_json(a, &inst.variety));
    }
    if let Some(cfg) = &p.oracle {
        params.insert("oracle".into(), serde_json::to_value(cfg).expect("plain config"));
    }
    if let Some(t) = &p.oracle_threshold {
        params.insert("oracle_threshold".into(), io::rational_to_json(t));
    }
    if let Some(c) = &p.blowup_cone {
        params.insert("blowup_cone".into(), json!(c));
    }
    if let Some(partner) = &p.partner {
        params.insert("partner".into(), instance_to_json(partner));
    }
    if let Some(e) = &p.exceptional {
        params.insert("exceptional".into(), json!(e));
    }
    json!({
        "id": inst.id,
        "variety": io::variety_to_json(&inst.variety),
        "divisor": io::divisor_to_json(&inst.divisor, &inst.variety),
        "flags": inst.flags.iter().map(io::flag_to_json).collect::<Vec<_>>(),
        "expected": Value::Object(expected),
        "note": inst.note,
        "checks": inst.checks.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        "params": Value::Object(params),
    })
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

pub fn instance_from_json(v: &Value) -> Result<Instance> {
    let id = v
        .get("id")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("instance needs a string \"id\""))?
        .to_string();
    let variety = io::variety_from_json(v.get("variety").ok_or_else(|| schema("instance needs a variety"))?)?;
    let divisor = io::divisor_from_json(
        v.get("divisor").ok_or_else(|| schema("instance needs a divisor"))?,
        &variety,
    )?;
    let flags = match v.get("flags") {
        Some(fs) => fs
            .as_array()
            .ok_or_else(|| schema("flags must be an array"))?
            .iter()
            .map(io::flag_from_json)
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let mut expected = Expected::default();
    if let Some(e) = v.get("expected") {
        expected.psef = e.get("psef").and_then(Value::as_bool);
        expected.big = e.get("big").and_then(Value::as_bool);
        let dim = |key: &str| -> Result<Option<Dimension>> {
            match e.get(key) {
                None => Ok(None),
                Some(Value::String(s)) => Dimension::parse(s)
                    .map(Some)
                    .ok_or_else(|| schema(format!("bad dimension {s:?}"))),
                Some(Value::Number(n)) => Ok(n.as_u64().map(|k| Dimension::Finite(k as usize))),
                Some(other) => Err(schema(format!("bad dimension {other}"))),
            }
        };
        expected.kappa = dim("kappa")?;
        expected.kappa_nu = dim("kappa_nu")?;
    }
    let checks = match v.get("checks") {
        Some(cs) => cs
            .as_array()
            .ok_or_else(|| schema("checks must be an array"))?
            .iter()
            .map(|c| c.as_str().ok_or_else(|| schema("check names are strings"))?.parse())
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let mut params = CheckParams::default();
    if let Some(p) = v.get("params") {
        if let Some(ks) = p.get("slicing_k") {
            params.slicing_k = ks
                .as_array()
                .ok_or_else(|| schema("slicing_k must be an array"))?
                .iter()
                .map(|k| {
                    k.as_u64()
                        .map(|k| k as usize)
                        .ok_or_else(|| schema("slicing_k entries are integers"))
                })
                .collect::<Result<_>>()?;
        }
        if let Some(a) = p.get("ample") {
            params.ample = Some(io::divisor_from_json(a, &variety)?);
        }
        if let Some(a) = p.get("second_ample") {
            params.second_ample = Some(io::divisor_from_json(a, &variety)?);
        }
        if let Some(c) = p.get("oracle") {
            params.oracle = Some(serde_json::from_value(c.clone()).map_err(|e| schema(format!("oracle config: {e}")))?);
        }
        if let Some(t) = p.get("oracle_threshold") {
            params.oracle_threshold = Some(io::rational_from_json(t)?);
        }
        if let Some(c) = p.get("blowup_cone") {
            params.blowup_cone = Some(
                c.as_array()
                    .ok_or_else(|| schema("blowup_cone must be an array"))?
                    .iter()
                    .map(|i| {
                        i.as_u64()
                            .map(|i| i as usize)
                            .ok_or_else(|| schema("cone entries are integers"))
                    })
                    .collect::<Result<_>>()?,
            );
        }
        if let Some(partner) = p.get("partner") {
            params.partner = Some(Box::new(instance_from_json(partner)?));
        }
        if let Some(e) = p.get("exceptional") {
            params.exceptional = Some(
                e.as_str()
                    .ok_or_else(|| schema("exceptional is a curve name"))?
                    .to_string(),
            );
        }
    }
    let inst = Instance {
        id,
        variety,
        divisor,
        flags,
        expected,
        note: v.get("note").and_then(Value::as_str).unwrap_or_default().to_string(),
        checks,
        params,
    };
    inst.validate()?;
    Ok(inst)
}
