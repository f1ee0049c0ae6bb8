//! Random instances with dense coefficients, optionally forced through given
//! points, and random `F_p`-points of `Q` found on random lines.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{check_parameters, DoubleCoverInstance};
use super::sets::univariate_roots;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::monomial::Monomial;
use crate::poly::{FpPoly, VarList};

/// Lines tried by [`sample_points`] before giving up.
pub const LINE_RETRY_BUDGET: usize = 1000;

/// A point the generated instance must pass through.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImposedPoint {
    pub coords: Vec<u32>,
    /// `g` vanishes at the point when set, otherwise `g` takes the value 1.
    pub on_branch: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    #[serde(rename = "M")]
    pub big_m: u32,
    pub m: u32,
    pub l: u32,
    pub p: u32,
    pub toy: bool,
    pub seed: u64,
    pub imposed: Vec<ImposedPoint>,
}

/// A polynomial with every monomial of degree `<= deg` and uniform coefficients.
pub fn random_poly(field: &PrimeField, vars: &std::sync::Arc<VarList>, deg: u32, rng: &mut ChaCha8Rng) -> FpPoly {
    let p = field.modulus();
    let mut out = FpPoly::zero(field, vars);
    for d in 0..=deg {
        for m in Monomial::all_of_degree(vars.len(), d) {
            out.add_term(m, rng.gen_range(0..p));
        }
    }
    out
}

/// Monomials of lowest degree first, as many as requested.
fn low_monomials(n: usize, count: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut d = 0;
    while out.len() < count {
        let mut level = Monomial::all_of_degree(n, d);
        level.reverse();
        out.extend(level.into_iter().take(count - out.len()));
        d += 1;
    }
    out
}

/// Adjusts the coefficients of the lowest monomials of `base` so that it takes
/// the value `targets[i]` at `points[i]`.
fn interpolate(base: &FpPoly, points: &[Vec<u32>], targets: &[u32], max_deg: u32) -> Result<FpPoly> {
    let field = *base.ring();
    let k = points.len();
    if k == 0 {
        return Ok(base.clone());
    }
    let monos = low_monomials(base.nvars(), k);
    if monos.iter().any(|m| m.degree() > max_deg) {
        return Err(Error::InvalidInstance(format!("too many imposed points ({k}) for degree {max_deg}")));
    }
    let mut cleared = base.clone();
    for &m in &monos {
        cleared.add_term(m, field.sub_u32(0, base.coeff(m)));
    }
    let mut aug = Matrix::zeros(k, k + 1);
    for (i, pt) in points.iter().enumerate() {
        for (j, &m) in monos.iter().enumerate() {
            aug.set(i, j, FpPoly::monomial(&field, base.vars(), m, 1).evaluate(pt));
        }
        aug.set(i, k, field.sub_u32(targets[i], cleared.evaluate(pt)));
    }
    let pivots = aug.rref(&field);
    if pivots.len() < k || pivots.contains(&k) {
        return Err(Error::InvalidInstance("the imposed points give singular interpolation conditions".into()));
    }
    let mut out = cleared;
    for (r, &m) in monos.iter().enumerate() {
        out.add_term(m, aug.get(r, k));
    }
    Ok(out)
}

/// Dense random `(f, g)` over `F_p` passing through the imposed points.
pub fn generate_instance(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<DoubleCoverInstance> {
    check_parameters(cfg.big_m, cfg.m, cfg.l, cfg.p, cfg.toy)?;
    let field = PrimeField::new(cfg.p as u64)?;
    let vars = VarList::z(cfg.big_m as usize + 1);
    let n = vars.len();
    for ip in &cfg.imposed {
        if ip.coords.len() != n {
            return Err(Error::InvalidArgument(format!("imposed point has {} coordinates, expected {n}", ip.coords.len())));
        }
    }
    let points: Vec<Vec<u32>> =
        cfg.imposed.iter().map(|ip| ip.coords.iter().map(|&c| c % field.modulus()).collect()).collect();
    let f = random_poly(&field, &vars, cfg.m, rng);
    let g = random_poly(&field, &vars, 2 * cfg.l, rng);
    let f = interpolate(&f, &points, &vec![0; points.len()], cfg.m)?;
    let g_targets: Vec<u32> = cfg.imposed.iter().map(|ip| u32::from(!ip.on_branch)).collect();
    let g = interpolate(&g, &points, &g_targets, 2 * cfg.l)?;
    DoubleCoverInstance::new(cfg.big_m, cfg.m, cfg.l, field, f, g, cfg.toy)?.with_points(points)
}

/// A uniformly random point of `F_p^n`.
pub fn random_point(field: &PrimeField, n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..field.modulus())).collect()
}

/// Distinct `F_p`-points of `Q = {f = 0}` from roots of `f` on random lines.
pub fn sample_points(inst: &DoubleCoverInstance, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<u32>>> {
    let field = inst.field;
    let n = inst.nvars();
    let deg = inst.f.degree().unwrap_or(0) as usize;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..LINE_RETRY_BUDGET {
        if out.len() == count {
            break;
        }
        let a = random_point(&field, n, rng);
        let b = random_point(&field, n, rng);
        let on_line = |t: u32| -> Vec<u32> { a.iter().zip(&b).map(|(&x, &y)| field.add_u32(x, field.mul_u32(t, y))).collect() };
        let roots = univariate_roots(&field, deg, rng, |t| inst.f.evaluate(&on_line(t)));
        for t in roots {
            let pt = on_line(t);
            if out.len() < count && seen.insert(pt.clone()) {
                out.push(pt);
            }
        }
    }
    if out.len() < count {
        return Err(Error::InvalidInstance(format!(
            "found only {} of {count} points on Q within {LINE_RETRY_BUDGET} random lines",
            out.len()
        )));
    }
    Ok(out)
}
