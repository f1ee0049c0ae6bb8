//! Regularity conditions for double covers `y^2 = g` of hypersurfaces `f = 0`.
//!
//! Each point of `Q` is moved to the origin and put in a normal frame; the
//! conditions matching its type are then checked with sequence certificates,
//! saturated linear parts, quadric ranks and cover-splitting tests.

mod checks;
mod frame;
mod generate;
mod instance;
mod report;
mod sets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use frame::{classify_hyperplane, classify_point, BranchFlag, HyperplaneClass, HyperplaneKind, PointContext, SingularFlag};
pub use generate::{generate_instance, random_point, random_poly, sample_points, GenConfig, ImposedPoint, LINE_RETRY_BUDGET};
pub use instance::{check_parameters, DoubleCoverInstance, InstanceFile};
pub use report::{
    ConditionEntry, ConditionId, Evidence, FirstFail, InstanceMeta, Outcome, PointReport, Reason, RegularityReport,
    ReportHeader, ReportSummary, SampleEntry, SampleKind, Sampled, Verdict, Witness,
};

use crate::error::Result;
use crate::macaulay::{DEFAULT_DCAP, DEFAULT_SATURATION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub seed: u64,
    /// Random linear forms added to the deterministic ones.
    pub lambda_samples: usize,
    /// Random hyperplanes added to the tangent one.
    pub hyperplanes: usize,
    pub dcap: u32,
    pub saturation: u32,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 0, lambda_samples: 20, hyperplanes: 5, dcap: DEFAULT_DCAP, saturation: DEFAULT_SATURATION }
    }
}

fn entries_for(inst: &DoubleCoverInstance, ctx: &PointContext, opts: &CheckOptions, index: usize) -> Result<Vec<ConditionEntry>> {
    let run = checks::PointRun { inst, ctx, opts, index };
    match (ctx.branch, ctx.singular) {
        (BranchFlag::OutsideBranch, SingularFlag::Smooth) => run.outside_branch(),
        (BranchFlag::OnBranch, SingularFlag::Smooth) => run.on_branch(),
        (_, SingularFlag::Type1) => run.type1(),
        (_, SingularFlag::Type2) => run.type2(),
    }
}

/// Classifies one point and runs the matching checks; errors are recorded.
pub fn check_point(inst: &DoubleCoverInstance, index: usize, point: &[u32], opts: &CheckOptions) -> PointReport {
    let mut report = PointReport {
        index,
        point: point.to_vec(),
        branch: None,
        singular: None,
        frame: Vec::new(),
        error: None,
        entries: Vec::new(),
    };
    let ctx = match classify_point(inst, point) {
        Ok(c) => c,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.branch = Some(ctx.branch);
    report.singular = Some(ctx.singular);
    report.frame = ctx.frame.to_rows();
    match entries_for(inst, &ctx, opts, index) {
        Ok(mut entries) => {
            entries.sort_by_key(|e| e.condition);
            report.entries = entries;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// Checks every point (in parallel) and aggregates in point order.
pub fn run_full_report(inst: &DoubleCoverInstance, points: &[Vec<u32>], opts: &CheckOptions) -> RegularityReport {
    let reports: Vec<PointReport> =
        points.par_iter().enumerate().map(|(i, pt)| check_point(inst, i, pt, opts)).collect();
    let summary = ReportSummary::from_points(&reports);
    RegularityReport {
        header: None,
        seed: opts.seed,
        instance: InstanceMeta {
            big_m: inst.big_m,
            m: inst.m,
            l: inst.l,
            p: inst.field.modulus(),
            toy: inst.toy,
            warnings: inst.warnings.clone(),
        },
        options: opts.clone(),
        points: reports,
        summary,
    }
}

#[cfg(test)]
mod tests;
