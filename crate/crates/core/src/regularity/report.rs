//! Report schema for regularity runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::frame::{BranchFlag, SingularFlag};
use crate::macaulay::{IrreducibilityCertificate, SaturatedLinearPart, SequenceCertificate};
use crate::sqrt_branch::SplitObstruction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "R1.1")]
    R1_1,
    #[serde(rename = "R1.2")]
    R1_2,
    #[serde(rename = "R1.3")]
    R1_3,
    #[serde(rename = "R1.4")]
    R1_4,
    #[serde(rename = "R2.1")]
    R2_1,
    #[serde(rename = "R2.2")]
    R2_2,
    #[serde(rename = "R2.3")]
    R2_3,
    #[serde(rename = "R2.4")]
    R2_4,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionId::R1_1 => "R1.1",
            ConditionId::R1_2 => "R1.2",
            ConditionId::R1_3 => "R1.3",
            ConditionId::R1_4 => "R1.4",
            ConditionId::R2_1 => "R2.1",
            ConditionId::R2_2 => "R2.2",
            ConditionId::R2_3 => "R2.3",
            ConditionId::R2_4 => "R2.4",
        };
        f.write_str(s)
    }
}

/// Ordered from best to worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// A sequence certificate stopped at the degree cap.
    DCap,
    /// Irreducibility of a set or of its double cover could not be certified.
    ComponentProbe,
    /// The saturated linear part did not stabilize.
    Saturation,
    /// The Hilbert function fell below the complete-intersection reference.
    Anomaly,
    /// A quadric rank pattern outside the expected cases.
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The Hilbert function exceeds the complete-intersection value at `degree`.
    DefectDegree {
        sequence: Vec<String>,
        vars: Vec<String>,
        polynomials: Vec<String>,
        degree: u32,
        actual: u64,
        expected: i64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        lambda: Option<String>,
    },
    Rank { form: String, vars: Vec<String>, polynomial: String, rank: usize, required: usize },
    /// Linear forms beyond the expected ones vanishing on the whole zero scheme.
    LinearSpan { forms: Vec<String> },
    /// `g - root^2` lies in the saturation of the ideal of a set containing the section.
    ExactSquare { root: String, set: String },
    /// The cubic term vanishes on a plane of a split section.
    Multiplicity { plane: String, set: String },
}

/// Verdict with its justification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<Reason>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Outcome {
    pub fn pass() -> Self {
        Outcome { verdict: Verdict::Pass, witness: None, reason: None, detail: None }
    }

    pub fn fail(w: Witness) -> Self {
        Outcome { verdict: Verdict::Fail, witness: Some(w), reason: None, detail: None }
    }

    pub fn inconclusive(r: Reason, detail: impl Into<String>) -> Self {
        Outcome { verdict: Verdict::Inconclusive, witness: None, reason: Some(r), detail: Some(detail.into()) }
    }

    /// Keeps the worse of the two; ties keep `self`.
    pub fn and(self, other: Outcome) -> Outcome {
        if other.verdict > self.verdict {
            other
        } else {
            self
        }
    }

    pub fn worst(items: impl IntoIterator<Item = Outcome>) -> Outcome {
        items.into_iter().fold(Outcome::pass(), Outcome::and)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Sequence {
        sequence: Vec<String>,
        certificate: SequenceCertificate,
    },
    Rank {
        form: String,
        rank: usize,
    },
    LinearPart {
        ideal: Vec<String>,
        part: SaturatedLinearPart,
    },
    Irreducibility {
        set: String,
        certificate: IrreducibilityCertificate,
    },
    Obstruction {
        set: String,
        result: SplitObstruction,
    },
    /// Two points of the set where `g` takes a nonzero square and a non-square.
    Character {
        set: String,
        residue_at: Vec<u32>,
        nonresidue_at: Vec<u32>,
    },
    Classification {
        set: String,
        quadric_rank: usize,
        components: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Zero,
    Coordinate,
    AllOnes,
    Random,
    Tangent,
}

/// One quantified instance (a linear form `lambda` or a hyperplane).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub index: usize,
    pub kind: SampleKind,
    pub form: String,
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub evidence: Vec<Evidence>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampled {
    pub deterministic: usize,
    pub random: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub condition: ConditionId,
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampled: Option<Sampled>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub evidence: Vec<Evidence>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub samples: Vec<SampleEntry>,
}

impl ConditionEntry {
    pub fn new(condition: ConditionId, outcome: Outcome, evidence: Vec<Evidence>) -> Self {
        ConditionEntry { condition, outcome, sampled: None, evidence, samples: Vec::new() }
    }

    pub fn verdict(&self) -> Verdict {
        self.outcome.verdict
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub point: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch: Option<BranchFlag>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub singular: Option<SingularFlag>,
    /// Rows of `B` with `z = point + B y`.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub frame: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub entries: Vec<ConditionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub created_unix: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(rename = "M")]
    pub big_m: u32,
    pub m: u32,
    pub l: u32,
    pub p: u32,
    pub toy: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstFail {
    pub point: usize,
    pub condition: ConditionId,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub verdict: Verdict,
    pub points: usize,
    pub point_errors: usize,
    pub pass: usize,
    pub inconclusive: usize,
    pub fail: usize,
    /// Worst verdict per condition over all points.
    pub conditions: BTreeMap<String, Verdict>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub reasons: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_fail: Option<FirstFail>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub header: Option<ReportHeader>,
    pub seed: u64,
    pub instance: InstanceMeta,
    pub options: super::CheckOptions,
    pub points: Vec<PointReport>,
    pub summary: ReportSummary,
}

fn reason_name(r: Reason) -> String {
    serde_json::to_value(r).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

impl ReportSummary {
    pub fn from_points(points: &[PointReport]) -> Self {
        let mut s = ReportSummary {
            verdict: Verdict::Pass,
            points: points.len(),
            point_errors: 0,
            pass: 0,
            inconclusive: 0,
            fail: 0,
            conditions: BTreeMap::new(),
            reasons: BTreeMap::new(),
            first_fail: None,
        };
        for p in points {
            if p.error.is_some() {
                s.point_errors += 1;
                s.verdict = s.verdict.max(Verdict::Inconclusive);
            }
            for e in &p.entries {
                let v = e.verdict();
                match v {
                    Verdict::Pass => s.pass += 1,
                    Verdict::Inconclusive => s.inconclusive += 1,
                    Verdict::Fail => s.fail += 1,
                }
                if let Some(r) = e.outcome.reason {
                    *s.reasons.entry(reason_name(r)).or_default() += 1;
                }
                let slot = s.conditions.entry(e.condition.to_string()).or_insert(Verdict::Pass);
                *slot = (*slot).max(v);
                s.verdict = s.verdict.max(v);
                if v == Verdict::Fail && s.first_fail.is_none() {
                    s.first_fail =
                        Some(FirstFail { point: p.index, condition: e.condition, witness: e.outcome.witness.clone() });
                }
            }
        }
        s
    }
}

impl RegularityReport {
    pub fn verdict(&self) -> Verdict {
        self.summary.verdict
    }

    /// All entries, in report order.
    pub fn entries(&self) -> impl Iterator<Item = (&PointReport, &ConditionEntry)> + '_ {
        self.points.iter().flat_map(|p| p.entries.iter().map(move |e| (p, e)))
    }

    /// Checks the structural invariants: Fail carries a witness, Inconclusive a
    /// reason, and a Pass entry has no non-Pass sample or sequence certificate.
    pub fn validate(&self) -> Result<(), String> {
        for (p, e) in self.entries() {
            let ctx = format!("point {} {}", p.index, e.condition);
            check_outcome(&e.outcome, &ctx)?;
            for s in &e.samples {
                check_outcome(&s.outcome, &ctx)?;
                if s.outcome.verdict > e.outcome.verdict {
                    return Err(format!("{ctx}: sample {} is worse than the entry", s.index));
                }
            }
            if e.verdict() == Verdict::Pass {
                let all = e.evidence.iter().chain(e.samples.iter().flat_map(|s| s.evidence.iter()));
                for ev in all {
                    if let Evidence::Sequence { certificate, .. } = ev {
                        if !certificate.is_regular() {
                            return Err(format!("{ctx}: Pass over a non-regular certificate"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_outcome(o: &Outcome, ctx: &str) -> Result<(), String> {
    match o.verdict {
        Verdict::Fail if o.witness.is_none() => Err(format!("{ctx}: Fail without witness")),
        Verdict::Inconclusive if o.reason.is_none() => Err(format!("{ctx}: Inconclusive without reason")),
        _ => Ok(()),
    }
}
