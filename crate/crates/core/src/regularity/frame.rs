//! Local frames at a point of `Q` and the hyperplane classification.

use serde::{Deserialize, Serialize};

use super::instance::DoubleCoverInstance;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::FpPoly;
use crate::quadratic::quadratic_rank;
use crate::subst::{frame_matrix, linear_change};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchFlag {
    OutsideBranch,
    OnBranch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularFlag {
    Smooth,
    /// `Q` has a nondegenerate quadratic singularity outside the branch divisor.
    Type1,
    /// `Q` is smooth but `W` is tangent to it: `w_1` is proportional to `q_1`.
    Type2,
}

/// The instance seen from a point: `z = point + B y`, and `f`, `g` in `y`.
#[derive(Clone, Debug)]
pub struct PointContext {
    pub point: Vec<u32>,
    pub branch: BranchFlag,
    pub singular: SingularFlag,
    pub frame: Matrix,
    pub f: FpPoly,
    /// Constant term 1 outside the branch divisor.
    pub g: FpPoly,
}

impl PointContext {
    pub fn q(&self, i: u32) -> FpPoly {
        self.f.homogeneous_component(i)
    }

    pub fn w(&self, i: u32) -> FpPoly {
        self.g.homogeneous_component(i)
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }
}

fn is_zero_vec(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Translates to the point and normalizes the frame.
///
/// Outside the branch divisor `g` is scaled to constant term 1. On it, `q_1`
/// becomes `z_{M+1}` and, when independent of `q_1`, `w_1` becomes `z_1`.
pub fn classify_point(inst: &DoubleCoverInstance, pt: &[u32]) -> Result<PointContext> {
    inst.check_coordinates(pt)?;
    let field = inst.field;
    if inst.f.evaluate(pt) != 0 {
        return Err(Error::PointNotOnHypersurface);
    }
    let n = inst.nvars();
    let f = inst.f.shift(pt);
    let g = inst.g.shift(pt);
    let q1 = f.linear_coeffs();
    let w1 = g.linear_coeffs();
    let g0 = g.constant_term();
    if g0 != 0 {
        let g = g.scale(&field.inv_u32(g0).expect("nonzero"));
        let singular = if !is_zero_vec(&q1) {
            SingularFlag::Smooth
        } else {
            let r = quadratic_rank(&f.homogeneous_component(2))?;
            if r != n {
                return Err(Error::InvalidInstance(format!(
                    "Q is singular at the point with a quadratic part of rank {r} < {n}; only nondegenerate quadratic singularities are supported"
                )));
            }
            SingularFlag::Type1
        };
        return Ok(PointContext {
            point: pt.to_vec(),
            branch: BranchFlag::OutsideBranch,
            singular,
            frame: Matrix::identity(n),
            f,
            g,
        });
    }
    if is_zero_vec(&q1) {
        return Err(Error::InvalidInstance(
            "Q is singular at a point of the branch divisor; no normal form is available there".into(),
        ));
    }
    let independent = frame_matrix(&field, n, &[(n - 1, q1.clone()), (0, w1.clone())]);
    let (singular, (_, b)) = match independent {
        Ok(pair) => (SingularFlag::Smooth, pair),
        Err(Error::DegenerateFrame(_)) => (SingularFlag::Type2, frame_matrix(&field, n, &[(n - 1, q1)])?),
        Err(e) => return Err(e),
    };
    Ok(PointContext {
        point: pt.to_vec(),
        branch: BranchFlag::OnBranch,
        singular,
        f: linear_change(&f, &b)?,
        g: linear_change(&g, &b)?,
        frame: b,
    })
}

/// A divisor `c y + lambda(z_2..z_M) = 0` on the cover near a branch point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneClass {
    pub lambda: Vec<u32>,
    pub y_coefficient: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperplaneKind {
    PulledBack,
    NotPulledBack,
}

pub fn classify_hyperplane(b: &HyperplaneClass) -> Result<HyperplaneKind> {
    if b.y_coefficient != 0 {
        Ok(HyperplaneKind::NotPulledBack)
    } else if !is_zero_vec(&b.lambda) {
        Ok(HyperplaneKind::PulledBack)
    } else {
        Err(Error::InvalidArgument("the zero form does not define a hyperplane".into()))
    }
}
