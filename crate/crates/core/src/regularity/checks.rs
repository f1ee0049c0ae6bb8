//! The regularity conditions at one point, in its local frame.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frame::PointContext;
use super::instance::DoubleCoverInstance;
use super::report::{
    ConditionEntry, ConditionId, Evidence, Outcome, Reason, SampleEntry, SampleKind, Sampled, Witness,
};
use super::sets::{cover_check, form_string, split_by_quadric, split_cover_check, CoverParams, LocalSet};
use super::CheckOptions;
use crate::error::Result;
use crate::field::PrimeField;
use crate::macaulay::{certify_sequence, saturated_linear_forms, GradedIdeal, SequenceVerdict};
use crate::poly::{FpPoly, VarList};
use crate::quadratic::quadratic_rank;
use crate::sqrt_branch::SqrtExpansion;

const TAG_LAMBDA: u64 = 0x4c41_4d42;
const TAG_HYPERPLANE: u64 = 0x4859_5045;
const TAG_PROBE: u64 = 0x5052_4f42;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent random stream for `(seed, point, tag)`.
pub(crate) fn stream(seed: u64, point: usize, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed ^ splitmix(point as u64)) ^ tag))
}

pub(crate) struct PointRun<'a> {
    pub inst: &'a DoubleCoverInstance,
    pub ctx: &'a PointContext,
    pub opts: &'a CheckOptions,
    pub index: usize,
}

struct Lambda {
    kind: SampleKind,
    coeffs: Vec<u32>,
}

/// Zero form (optional), coordinate forms, all-ones form, then `random` forms.
fn lambda_set(field: &PrimeField, k: usize, include_zero: bool, random: usize, rng: &mut ChaCha8Rng) -> Vec<Lambda> {
    let mut out = Vec::new();
    if include_zero {
        out.push(Lambda { kind: SampleKind::Zero, coeffs: vec![0; k] });
    }
    for i in 0..k {
        let mut c = vec![0; k];
        c[i] = 1;
        out.push(Lambda { kind: SampleKind::Coordinate, coeffs: c });
    }
    out.push(Lambda { kind: SampleKind::AllOnes, coeffs: vec![1; k] });
    for _ in 0..random {
        let coeffs = loop {
            let c: Vec<u32> = (0..k).map(|_| rng.gen_range(0..field.modulus())).collect();
            if c.iter().any(|&x| x != 0) {
                break c;
            }
        };
        out.push(Lambda { kind: SampleKind::Random, coeffs });
    }
    out
}

fn sampled(set: &[Lambda]) -> Sampled {
    let random = set.iter().filter(|l| l.kind == SampleKind::Random).count();
    Sampled { deterministic: set.len() - random, random }
}

/// Certificate for a labelled sequence, mapped to a verdict.
fn certify(seq: &[(FpPoly, u32)], labels: &[String], dcap: u32, lambda: Option<&str>) -> Result<(Outcome, Evidence)> {
    let cert = certify_sequence(seq, dcap)?;
    let outcome = match cert.verdict {
        SequenceVerdict::Regular => Outcome::pass(),
        SequenceVerdict::NotRegular { degree } => {
            let row = cert.rows.iter().find(|r| r.degree == degree).copied().expect("defect row recorded");
            Outcome::fail(Witness::DefectDegree {
                sequence: labels.to_vec(),
                vars: seq[0].0.vars().names().to_vec(),
                polynomials: seq.iter().map(|(p, _)| p.to_string()).collect(),
                degree,
                actual: row.actual,
                expected: row.expected,
                lambda: lambda.map(str::to_string),
            })
        }
        SequenceVerdict::InconclusiveThrough { degree } if cert.has_anomaly() => {
            Outcome::inconclusive(Reason::Anomaly, format!("Hilbert function below the reference in degree {degree}"))
        }
        SequenceVerdict::InconclusiveThrough { degree } => Outcome::inconclusive(
            Reason::DCap,
            format!("matched through degree {degree}; stabilization needs {}", cert.stabilization_bound),
        ),
    };
    Ok((outcome, Evidence::Sequence { sequence: labels.to_vec(), certificate: cert }))
}

fn rank_check(form: &str, p: &FpPoly, required: usize, evidence: &mut Vec<Evidence>) -> Result<Outcome> {
    let rank = if p.is_zero() { 0 } else { quadratic_rank(p)? };
    evidence.push(Evidence::Rank { form: form.to_string(), rank });
    Ok(if rank < required {
        Outcome::fail(Witness::Rank {
            form: form.to_string(),
            vars: p.vars().names().to_vec(),
            polynomial: p.to_string(),
            rank,
            required,
        })
    } else {
        Outcome::pass()
    })
}

/// Saturated linear part of `gens` must equal `expected`; then the zero set must
/// be certified irreducible.
fn span_check(field: PrimeField, vars: &Arc<VarList>, gens: Vec<FpPoly>, expected: &[Vec<u32>], saturation: u32) -> Result<(Outcome, Vec<Evidence>)> {
    let labels: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    let ideal = GradedIdeal::from_nonzero(field, vars, gens)?;
    let part = saturated_linear_forms(&ideal, saturation);
    let mut evidence = vec![Evidence::LinearPart { ideal: labels, part: part.clone() }];
    let n = vars.len();
    let base = crate::linalg::row_basis(expected, n, &field).len();
    let extra: Vec<String> = part
        .basis
        .iter()
        .filter(|b| row_basis_of(expected, b, &field).len() > base)
        .map(|b| form_string(&field, vars, b))
        .collect();
    if !extra.is_empty() {
        return Ok((Outcome::fail(Witness::LinearSpan { forms: extra }), evidence));
    }
    if part.stabilized_at.is_none() {
        return Ok((Outcome::inconclusive(Reason::Saturation, "saturated linear part did not stabilize"), evidence));
    }
    let cert = crate::macaulay::irreducibility_certificate(&ideal)?;
    let ok = cert.is_certified();
    evidence.push(Evidence::Irreducibility { set: "zero set".into(), certificate: cert });
    Ok(if ok {
        (Outcome::pass(), evidence)
    } else {
        (Outcome::inconclusive(Reason::ComponentProbe, "irreducibility of the zero set not certified"), evidence)
    })
}

/// Row basis of `expected` together with `b`.
fn row_basis_of(expected: &[Vec<u32>], b: &[u32], field: &PrimeField) -> Vec<Vec<u32>> {
    let mut rows = expected.to_vec();
    rows.push(b.to_vec());
    crate::linalg::row_basis(&rows, b.len(), field)
}

fn sum_from(f: &FpPoly, from: u32) -> FpPoly {
    let mut out = FpPoly::zero(f.ring(), f.vars());
    for c in f.components().into_iter().skip(from as usize) {
        out = &out + &c;
    }
    out
}

impl<'a> PointRun<'a> {
    fn field(&self) -> PrimeField {
        self.inst.field
    }

    fn rng(&self, tag: u64) -> ChaCha8Rng {
        stream(self.opts.seed, self.index, tag)
    }

    fn cover(&self, g: &'a FpPoly) -> CoverParams<'a> {
        CoverParams { g, l: self.inst.l, saturation: self.opts.saturation }
    }

    pub fn outside_branch(&self) -> Result<Vec<ConditionEntry>> {
        let (m, l) = (self.inst.m, self.inst.l);
        let ctx = self.ctx;
        let field = self.field();
        let vars = ctx.f.vars().clone();
        let q: Vec<FpPoly> = (0..=m).map(|i| ctx.q(i)).collect();
        let mut entries = Vec::new();

        // R1.1
        let exp = SqrtExpansion::new(&ctx.g, (2 * l - 2).max(1))?;
        let mut seq: Vec<(FpPoly, u32)> = (1..=m).map(|i| (q[i as usize].clone(), i)).collect();
        let mut labels: Vec<String> = (1..=m).map(|i| format!("q{i}")).collect();
        for k in l + 1..=2 * l - 1 {
            seq.push((exp.h(k).clone(), k));
            labels.push(format!("h{k}"));
        }
        let (o, ev) = certify(&seq, &labels, self.opts.dcap, None)?;
        entries.push(ConditionEntry::new(ConditionId::R1_1, o, vec![ev]));

        // R1.2
        let q1 = ctx.f.linear_coeffs();
        let (o, ev) = span_check(field, &vars, vec![q[1].clone(), q[2].clone(), q[3].clone()], &[q1.clone()], self.opts.saturation)?;
        entries.push(ConditionEntry::new(ConditionId::R1_2, o, ev));

        // R1.3
        let mut hrng = self.rng(TAG_HYPERPLANE);
        let mut planes = vec![(SampleKind::Tangent, q1.clone())];
        for _ in 0..self.opts.hyperplanes {
            let c: Vec<u32> = (0..vars.len()).map(|_| hrng.gen_range(0..field.modulus())).collect();
            planes.push((SampleKind::Random, c));
        }
        let cp = self.cover(&ctx.g);
        let rest = sum_from(&ctx.f, 3);
        let mut samples = Vec::new();
        for (idx, (kind, ell)) in planes.into_iter().enumerate() {
            let form = form_string(&field, &vars, &ell);
            let label = format!("section by {form} = 0");
            let mut prng = self.rng(TAG_PROBE ^ (0x13 << 32) ^ idx as u64);
            let linear = vec![q1.clone(), ell];
            let (outcome, evidence) = if m == 3 {
                let set = LocalSet { label: label.clone(), vars: vars.clone(), linear, quadric: Some(q[2].clone()), extra: Some(q[3].clone()) };
                cover_check(&set, &cp, &mut prng)?
            } else {
                let split = split_by_quadric(field, &vars, linear, &q[2], &rest, &q[3], &label)?;
                split_cover_check(split, &label, &cp, &mut prng)?
            };
            samples.push(SampleEntry { index: idx, kind, form, outcome, evidence });
        }
        entries.push(self.sampled_entry(ConditionId::R1_3, Outcome::pass(), Vec::new(), samples, None));
        Ok(entries)
    }

    fn sampled_entry(
        &self,
        condition: ConditionId,
        base: Outcome,
        evidence: Vec<Evidence>,
        samples: Vec<SampleEntry>,
        sampled: Option<Sampled>,
    ) -> ConditionEntry {
        let outcome = samples.iter().fold(base, |acc, s| acc.and(s.outcome.clone()));
        ConditionEntry { condition, outcome, sampled, evidence, samples }
    }

    pub fn on_branch(&self) -> Result<Vec<ConditionEntry>> {
        let (m, big_m) = (self.inst.m, self.inst.big_m as usize);
        let ctx = self.ctx;
        let field = self.field();
        let n = ctx.nvars();
        let bar = |p: &FpPoly| p.restrict_to_zero(&[0, n - 1]);
        let qb: Vec<FpPoly> = (0..=m).map(|i| bar(&ctx.q(i))).collect();
        let gb = bar(&ctx.g);
        let w2b = gb.homogeneous_component(2);
        let vars = gb.vars().clone();
        let k = big_m - 1;
        let mut lrng = self.rng(TAG_LAMBDA);
        let lambdas = lambda_set(&field, k, true, self.opts.lambda_samples, &mut lrng);
        let mut entries = Vec::new();

        // R2.1
        let mut evidence = Vec::new();
        let base = rank_check("w2bar", &w2b, 4, &mut evidence)?.and(rank_check("q2bar", &qb[2], 3, &mut evidence)?);
        let mut samples = Vec::new();
        for (idx, lam) in lambdas.iter().enumerate() {
            let lp = FpPoly::linear(&field, &vars, &lam.coeffs);
            let form = lp.to_string();
            let mut seq = vec![(&(&lp * &lp) - &w2b, 2)];
            let mut labels = vec!["lambda^2 - w2bar".to_string()];
            for i in 2..=m {
                seq.push((qb[i as usize].clone(), i));
                labels.push(format!("q{i}bar"));
            }
            let (o, ev) = certify(&seq, &labels, self.opts.dcap, Some(&form))?;
            samples.push(SampleEntry { index: idx, kind: lam.kind, form, outcome: o, evidence: vec![ev] });
        }
        entries.push(self.sampled_entry(ConditionId::R2_1, base, evidence, samples, Some(sampled(&lambdas))));

        // R2.2
        let (o, ev) = span_check(field, &vars, vec![qb[2].clone(), qb[3].clone()], &[], self.opts.saturation)?;
        entries.push(ConditionEntry::new(ConditionId::R2_2, o, ev));

        // R2.3
        let cp = self.cover(&gb);
        let rest = bar(&sum_from(&ctx.f, 3));
        let mut samples = Vec::new();
        for (idx, lam) in lambdas.iter().enumerate() {
            let form = form_string(&field, &vars, &lam.coeffs);
            let label = format!("lambda = {form}");
            let mut prng = self.rng(TAG_PROBE ^ (0x23 << 32) ^ idx as u64);
            let linear = vec![lam.coeffs.clone()];
            let (outcome, evidence) = if m == 3 {
                let set = LocalSet { label: label.clone(), vars: vars.clone(), linear, quadric: Some(qb[2].clone()), extra: Some(qb[3].clone()) };
                cover_check(&set, &cp, &mut prng)?
            } else {
                let split = split_by_quadric(field, &vars, linear, &qb[2], &rest, &qb[3], &label)?;
                split_cover_check(split, &label, &cp, &mut prng)?
            };
            samples.push(SampleEntry { index: idx, kind: lam.kind, form, outcome, evidence });
        }
        entries.push(self.sampled_entry(ConditionId::R2_3, Outcome::pass(), Vec::new(), samples, Some(sampled(&lambdas))));
        Ok(entries)
    }

    pub fn type1(&self) -> Result<Vec<ConditionEntry>> {
        let (m, l) = (self.inst.m, self.inst.l);
        let ctx = self.ctx;
        let field = self.field();
        let vars = ctx.f.vars().clone();
        let q: Vec<FpPoly> = (0..=m).map(|i| ctx.q(i)).collect();
        let exp = SqrtExpansion::new(&ctx.g, 2 * l - 1)?;
        let rest = sum_from(&ctx.f, 3);
        let cp = self.cover(&ctx.g);
        let mut lrng = self.rng(TAG_LAMBDA);
        let lambdas = lambda_set(&field, vars.len(), false, self.opts.lambda_samples, &mut lrng);
        let (q_top, h_top) = if m <= 2 * l { (m, 2 * l - 1) } else { (m - 1, 2 * l) };
        let mut samples = Vec::new();
        for (idx, lam) in lambdas.iter().enumerate() {
            let lp = FpPoly::linear(&field, &vars, &lam.coeffs);
            let form = lp.to_string();
            let mut seq = vec![(lp, 1)];
            let mut labels = vec!["lambda".to_string()];
            for i in 2..=q_top {
                seq.push((q[i as usize].clone(), i));
                labels.push(format!("q{i}"));
            }
            for k in l + 1..=h_top {
                seq.push((exp.h(k).clone(), k));
                labels.push(format!("h{k}"));
            }
            let (mut outcome, ev) = certify(&seq, &labels, self.opts.dcap, Some(&form))?;
            let mut evidence = vec![ev];
            let label = format!("lambda = {form}");
            let mut prng = self.rng(TAG_PROBE ^ (0x14 << 32) ^ idx as u64);
            let split = split_by_quadric(field, &vars, vec![lam.coeffs.clone()], &q[2], &rest, &q[3], &label)?;
            let (o, more) = split_cover_check(split, &label, &cp, &mut prng)?;
            evidence.extend(more);
            outcome = outcome.and(o);
            samples.push(SampleEntry { index: idx, kind: lam.kind, form, outcome, evidence });
        }
        Ok(vec![self.sampled_entry(ConditionId::R1_4, Outcome::pass(), Vec::new(), samples, Some(sampled(&lambdas)))])
    }

    pub fn type2(&self) -> Result<Vec<ConditionEntry>> {
        let (m, big_m) = (self.inst.m, self.inst.big_m as usize);
        let ctx = self.ctx;
        let field = self.field();
        let n = ctx.nvars();
        let bar = |p: &FpPoly| p.restrict_to_zero(&[n - 1]);
        let qb: Vec<FpPoly> = (0..=m).map(|i| bar(&ctx.q(i))).collect();
        let gb = bar(&ctx.g);
        let w2b = gb.homogeneous_component(2);
        let vars = gb.vars().clone();

        let mut evidence = Vec::new();
        let mut base = rank_check("w2bar", &w2b, big_m, &mut evidence)?.and(rank_check("q2bar", &qb[2], big_m, &mut evidence)?);
        let (o, ev) = span_check(field, &vars, vec![qb[2].clone(), qb[3].clone()], &[], self.opts.saturation)?;
        evidence.extend(ev);
        base = base.and(o);

        let rest = bar(&sum_from(&ctx.f, 3));
        let cp = self.cover(&gb);
        let mut lrng = self.rng(TAG_LAMBDA);
        let lambdas = lambda_set(&field, big_m, true, self.opts.lambda_samples, &mut lrng);
        let mut samples = Vec::new();
        for (idx, lam) in lambdas.iter().enumerate() {
            let lp = FpPoly::linear(&field, &vars, &lam.coeffs);
            let form = lp.to_string();
            let mut seq = vec![(&(&lp * &lp) - &w2b, 2)];
            let mut labels = vec!["lambda^2 - w2bar".to_string()];
            for i in 2..=m {
                seq.push((qb[i as usize].clone(), i));
                labels.push(format!("q{i}bar"));
            }
            let (mut outcome, ev) = certify(&seq, &labels, self.opts.dcap, Some(&form))?;
            let mut evs = vec![ev];
            let label = format!("lambda = {form}");
            let mut prng = self.rng(TAG_PROBE ^ (0x24 << 32) ^ idx as u64);
            let split = split_by_quadric(field, &vars, vec![lam.coeffs.clone()], &qb[2], &rest, &qb[3], &label)?;
            let (o, more) = split_cover_check(split, &label, &cp, &mut prng)?;
            evs.extend(more);
            outcome = outcome.and(o);
            samples.push(SampleEntry { index: idx, kind: lam.kind, form, outcome, evidence: evs });
        }
        Ok(vec![self.sampled_entry(ConditionId::R2_4, base, evidence, samples, Some(sampled(&lambdas)))])
    }
}
