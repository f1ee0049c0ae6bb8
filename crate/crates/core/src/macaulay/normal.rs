//! Irreducibility of a cone via Serre's criterion.
//!
//! If the generators form a regular sequence (so `R/I` is Cohen-Macaulay) and
//! the Jacobian ideal cuts out a locus of codimension at least two in the cone,
//! then `R/I` is a normal graded ring with `R_0` a field, hence a domain, and
//! the cone is irreducible and reduced, also over the algebraic closure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{certify_sequence, GradedIdeal, SequenceVerdict};
use crate::error::Result;
use crate::poly::FpPoly;

const PROBE_SEED: u64 = 0x0a11_5e12_7e5a_1e2d;

/// Largest degree tried when waiting for the Jacobian section to become Artinian.
const ARTINIAN_LIMIT: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IrreducibilityCertificate {
    /// The cone is a linear subspace.
    Linear { dimension: usize },
    /// Normal complete intersection: dimension of the cone, number of Jacobian
    /// minors, and the degree at which the cut Jacobian quotient vanished.
    Normal { dimension: usize, minors: usize, artinian_at: u32 },
    Unknown { reason: String },
}

impl IrreducibilityCertificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self, IrreducibilityCertificate::Unknown { .. })
    }
}

fn unknown(reason: impl Into<String>) -> IrreducibilityCertificate {
    IrreducibilityCertificate::Unknown { reason: reason.into() }
}

/// Tries to certify that the affine cone `V(I)` is irreducible and reduced.
pub fn irreducibility_certificate(ideal: &GradedIdeal) -> Result<IrreducibilityCertificate> {
    let field = ideal.field();
    let red = ideal.reduce();
    let n = red.reduced_nvars();
    let target = ideal.vars().select(&red.keep);
    let gens: Vec<FpPoly> = ideal
        .generators()
        .iter()
        .zip(ideal.degrees())
        .filter(|(_, &d)| d > 1)
        .map(|(g, _)| FpPoly::from_terms(&field, &target, red.reduce_poly(g)))
        .filter(|g| !g.is_zero())
        .collect();
    if ideal.degrees().contains(&0) {
        return Ok(unknown("unit ideal"));
    }
    let c = gens.len();
    if c == 0 {
        return Ok(IrreducibilityCertificate::Linear { dimension: n });
    }
    if c > n {
        return Ok(unknown("more equations than variables"));
    }
    let dim = n - c;
    if dim < 2 {
        return Ok(unknown(format!("cone of dimension {dim}")));
    }
    let seq: Vec<(FpPoly, u32)> = gens.iter().map(|g| (g.clone(), g.degree().unwrap_or(0))).collect();
    let bound: u32 = seq.iter().map(|(_, d)| d - 1).sum::<u32>() + 1;
    if bound > ARTINIAN_LIMIT {
        return Ok(unknown("stabilization bound too large"));
    }
    let cert = certify_sequence(&seq, bound)?;
    if cert.verdict != SequenceVerdict::Regular {
        return Ok(unknown("not a certified complete intersection"));
    }
    let minors = jacobian_minors(&gens, n);
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let cuts: Vec<FpPoly> = (0..dim - 2)
        .map(|_| {
            let coeffs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..field.modulus())).collect();
            FpPoly::linear(&field, &target, &coeffs)
        })
        .collect();
    let jac = GradedIdeal::from_nonzero(field, &target, gens.iter().cloned().chain(minors.iter().cloned()).chain(cuts))?;
    let mut jr = jac.reduce();
    for d in 0..=ARTINIAN_LIMIT {
        if jr.engine.hilbert(d) == 0 {
            return Ok(IrreducibilityCertificate::Normal { dimension: dim, minors: minors.len(), artinian_at: d });
        }
    }
    Ok(unknown("singular locus not certified to have codimension two"))
}

/// All maximal minors of the Jacobian matrix of `gens` in `n` variables.
pub(crate) fn jacobian_minors(gens: &[FpPoly], n: usize) -> Vec<FpPoly> {
    let c = gens.len();
    let jac: Vec<Vec<FpPoly>> = gens.iter().map(|g| (0..n).map(|j| g.derivative(j)).collect()).collect();
    let mut out = Vec::new();
    let mut cols: Vec<usize> = (0..c).collect();
    loop {
        let sub: Vec<Vec<&FpPoly>> = jac.iter().map(|row| cols.iter().map(|&j| &row[j]).collect()).collect();
        let d = det(&sub);
        if !d.is_zero() {
            out.push(d);
        }
        // next combination
        let mut i = c;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cols[i] < n - c + i {
                cols[i] += 1;
                for k in i + 1..c {
                    cols[k] = cols[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn det(m: &[Vec<&FpPoly>]) -> FpPoly {
    let k = m.len();
    if k == 1 {
        return m[0][0].clone();
    }
    let ring = *m[0][0].ring();
    let vars = m[0][0].vars().clone();
    let mut acc = FpPoly::zero(&ring, &vars);
    for j in 0..k {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<&FpPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| *p).collect()).collect();
        let term = m[0][j] * &det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}
