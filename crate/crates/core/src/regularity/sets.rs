//! Sets through the origin cut out by linear forms, a quadric and one more
//! equation, and the test that the double cover over such a set does not split.
//!
//! A split cover over an irreducible normal set `Y` means `g|_Y = h^2` with `h`
//! regular on `Y` (over the algebraic closure). Two certificates exclude this:
//! for a cone and `g(0) = 1`, a residual `h_{j+1}` outside the (prime) ideal;
//! for any `Y`, two `F_p`-points where `g` is a nonzero square and a non-square.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::report::{Evidence, Outcome, Reason, Witness};
use crate::error::Result;
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::macaulay::{irreducibility_certificate, membership_by_degree, GradedIdeal, IrreducibilityCertificate};
use crate::monomial::Monomial;
use crate::poly::{FpPoly, VarList};
use crate::quadratic::{quadratic_rank, split_rank_two, QuadraticForm};
use crate::sqrt_branch::{cover_split_obstruction_at, sqrt_truncation};
use crate::subst::compose;

/// Lines tried by the point search before giving up.
const LINE_BUDGET: usize = 60;
/// Largest number of parameter values scanned per line.
const SCAN_LIMIT: u32 = 1 << 16;

#[derive(Clone, Debug)]
pub(crate) struct LocalSet {
    pub label: String,
    pub vars: Arc<VarList>,
    pub linear: Vec<Vec<u32>>,
    pub quadric: Option<FpPoly>,
    pub extra: Option<FpPoly>,
}

pub(crate) fn form_string(field: &PrimeField, vars: &Arc<VarList>, coeffs: &[u32]) -> String {
    FpPoly::linear(field, vars, coeffs).to_string()
}

impl LocalSet {
    pub fn field(&self) -> PrimeField {
        match (&self.quadric, &self.extra) {
            (Some(q), _) => *q.ring(),
            (_, Some(e)) => *e.ring(),
            _ => unreachable!("sets carry at least one polynomial"),
        }
    }

    fn linear_polys(&self, field: &PrimeField) -> Vec<FpPoly> {
        self.linear.iter().map(|c| FpPoly::linear(field, &self.vars, c)).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.extra.as_ref().map_or(true, |e| e.is_zero() || e.is_homogeneous())
    }

    /// Homogeneous ideal of the smallest listed cone containing the set.
    pub fn cone_ideal(&self, field: PrimeField) -> Result<GradedIdeal> {
        let mut gens = self.linear_polys(&field);
        gens.extend(self.quadric.iter().cloned());
        if self.is_homogeneous() {
            gens.extend(self.extra.iter().cloned());
        }
        GradedIdeal::from_nonzero(field, &self.vars, gens)
    }

    /// Ideal of the cone over the projective closure, in one extra variable.
    fn closure_ideal(&self, field: PrimeField) -> Result<GradedIdeal> {
        let mut names = self.vars.names().to_vec();
        names.push("t0".into());
        let target = VarList::new(names)?;
        let n = self.vars.len();
        let lift = |p: &FpPoly| -> FpPoly {
            let d = p.degree().unwrap_or(0);
            let mut out = FpPoly::zero(&field, &target);
            for (m, &c) in p.terms() {
                let mut exps = m.exponents(n);
                exps.push(d - m.degree());
                out.add_term(Monomial::from_exponents(&exps), c);
            }
            out
        };
        let mut gens: Vec<FpPoly> = self.linear_polys(&field).iter().map(lift).collect();
        gens.extend(self.quadric.iter().map(lift));
        gens.extend(self.extra.iter().map(lift));
        GradedIdeal::from_nonzero(field, &target, gens)
    }

    pub fn irreducibility(&self, field: PrimeField) -> Result<IrreducibilityCertificate> {
        if self.is_homogeneous() {
            irreducibility_certificate(&self.cone_ideal(field)?)
        } else {
            irreducibility_certificate(&self.closure_ideal(field)?)
        }
    }

    /// Basis of the subspace cut out by the linear forms.
    fn subspace(&self, field: &PrimeField) -> Vec<Vec<u32>> {
        let n = self.vars.len();
        let rows: Vec<Vec<u32>> = self.linear.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
        if rows.is_empty() {
            return (0..n).map(|i| (0..n).map(|j| (i == j) as u32).collect()).collect();
        }
        Matrix::from_rows(&rows, n).kernel(field)
    }
}

/// Restriction of ambient polynomials to a subspace with the given basis.
pub(crate) struct Subspace {
    pub basis: Vec<Vec<u32>>,
    images: Vec<FpPoly>,
}

impl Subspace {
    pub fn new(field: &PrimeField, basis: Vec<Vec<u32>>, n: usize) -> Self {
        let k = basis.len();
        let vars = VarList::new((1..=k).map(|i| format!("u{i}")).collect()).expect("valid names");
        let images = (0..n)
            .map(|j| {
                let coeffs: Vec<u32> = basis.iter().map(|b| b[j]).collect();
                FpPoly::linear(field, &vars, &coeffs)
            })
            .collect();
        Subspace { basis, images }
    }

    pub fn pull(&self, p: &FpPoly) -> Result<FpPoly> {
        compose(p, &self.images)
    }

    pub fn point(&self, field: &PrimeField, u: &[u32]) -> Vec<u32> {
        let n = self.images.len();
        let mut x = vec![0u32; n];
        for (b, &c) in self.basis.iter().zip(u) {
            if c == 0 {
                continue;
            }
            for j in 0..n {
                x[j] = field.add_u32(x[j], field.mul_u32(c, b[j]));
            }
        }
        x
    }

    /// An ambient linear form restricting to `coeffs` on the subspace. Relies on
    /// the kernel basis having one unit coordinate per vector.
    pub fn lift_form(&self, coeffs: &[u32]) -> Vec<u32> {
        let n = self.images.len();
        let mut out = vec![0u32; n];
        for (i, b) in self.basis.iter().enumerate() {
            let pos = (0..n)
                .find(|&j| b[j] == 1 && self.basis.iter().enumerate().all(|(k, o)| k == i || o[j] == 0))
                .expect("kernel basis has unit coordinates");
            out[pos] = coeffs[i];
        }
        out
    }
}

/// How a section `{linear = 0, quadric = 0}` of the extra hypersurface decomposes.
pub(crate) enum QuadricSplit {
    /// One set; the quadric restricted to the subspace has the given rank.
    Irreducible(usize, LocalSet),
    /// Planes from a rank 2 or rank 1 restriction, with their `(plane, cubic vanishes)` flags.
    Planes(usize, Vec<(LocalSet, bool)>),
    /// A rank 2 restriction whose planes are conjugate over `F_{p^2}`.
    Conjugate,
    /// The quadric vanishes on the subspace.
    Degenerate,
}

/// Classifies `{linear = 0, q2 = 0, rest = 0}` by the rank of `q2` on the subspace;
/// `q3` is tested for vanishing on each plane.
pub(crate) fn split_by_quadric(
    field: PrimeField,
    vars: &Arc<VarList>,
    linear: Vec<Vec<u32>>,
    q2: &FpPoly,
    rest: &FpPoly,
    q3: &FpPoly,
    label: &str,
) -> Result<QuadricSplit> {
    let probe = LocalSet { label: label.to_string(), vars: vars.clone(), linear: linear.clone(), quadric: None, extra: None };
    let sub = Subspace::new(&field, probe.subspace(&field), vars.len());
    let q2u = sub.pull(q2)?;
    let rank = if q2u.is_zero() { 0 } else { quadratic_rank(&q2u)? };
    let plane = |form: Vec<u32>, tag: &str| -> Result<(LocalSet, bool)> {
        let ambient = sub.lift_form(&form);
        let mut lin = linear.clone();
        lin.push(ambient.clone());
        let set = LocalSet {
            label: format!("{label}, plane {tag}: {} = 0", form_string(&field, vars, &ambient)),
            vars: vars.clone(),
            linear: lin.clone(),
            quadric: None,
            extra: Some(rest.clone()),
        };
        let lin_ideal = GradedIdeal::from_nonzero(field, vars, lin.iter().map(|c| FpPoly::linear(&field, vars, c)))?;
        let cubic_vanishes = q3.is_zero() || membership_by_degree(&lin_ideal, q3, 0)?;
        Ok((set, cubic_vanishes))
    };
    match rank {
        0 => Ok(QuadricSplit::Degenerate),
        1 => {
            let diag = QuadraticForm::from_poly(&q2u)?.diagonalize();
            Ok(QuadricSplit::Planes(1, vec![plane(diag[0].1.clone(), "S")?]))
        }
        2 => match split_rank_two(&q2u)? {
            Some((a, b)) => Ok(QuadricSplit::Planes(2, vec![plane(a, "S1")?, plane(b, "S2")?])),
            None => Ok(QuadricSplit::Conjugate),
        },
        r => Ok(QuadricSplit::Irreducible(
            r,
            LocalSet { label: label.to_string(), vars: vars.clone(), linear, quadric: Some(q2.clone()), extra: Some(rest.clone()) },
        )),
    }
}

fn bilinear(g: &Matrix, f: &PrimeField, a: &[u32], b: &[u32]) -> u32 {
    let mut acc = 0;
    for i in 0..a.len() {
        if a[i] == 0 {
            continue;
        }
        for j in 0..b.len() {
            acc = f.add_u32(acc, f.mul_u32(a[i], f.mul_u32(g.get(i, j), b[j])));
        }
    }
    acc
}

fn random_vec(rng: &mut ChaCha8Rng, f: &PrimeField, k: usize) -> Vec<u32> {
    (0..k).map(|_| rng.gen_range(0..f.modulus())).collect()
}

fn axpy(f: &PrimeField, a: u32, x: &[u32], b: u32, y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(&u, &v)| f.add_u32(f.mul_u32(a, u), f.mul_u32(b, v))).collect()
}

/// Roots in `F_p` of `t -> value(t)` for a polynomial function of degree at most
/// `deg`, by interpolation and scanning (at most `SCAN_LIMIT` values).
pub(crate) fn univariate_roots(f: &PrimeField, deg: usize, rng: &mut ChaCha8Rng, value: impl Fn(u32) -> u32) -> Vec<u32> {
    let p = f.modulus();
    let nodes: Vec<u32> = (0..=deg as u32).map(|k| k % p).collect();
    if nodes.len() > p as usize {
        return (0..p).filter(|&t| value(t) == 0).collect();
    }
    // Newton divided differences.
    let mut coef: Vec<u32> = nodes.iter().map(|&t| value(t)).collect();
    for j in 1..coef.len() {
        for i in (j..coef.len()).rev() {
            let num = f.sub_u32(coef[i], coef[i - 1]);
            let den = f.sub_u32(nodes[i], nodes[i - j]);
            coef[i] = f.mul_u32(num, f.inv_u32(den).expect("distinct nodes"));
        }
    }
    if coef.iter().all(|&c| c == 0) {
        return Vec::new();
    }
    let eval = |t: u32| {
        let mut acc = coef[coef.len() - 1];
        for i in (0..coef.len() - 1).rev() {
            acc = f.add_u32(f.mul_u32(acc, f.sub_u32(t, nodes[i])), coef[i]);
        }
        acc
    };
    let (start, count) = if p <= SCAN_LIMIT { (0, p) } else { (rng.gen_range(0..p), SCAN_LIMIT) };
    (0..count).map(|i| ((start as u64 + i as u64) % p as u64) as u32).filter(|&t| eval(t) == 0).collect()
}

/// Nonzero `F_p`-points of the set, in ambient coordinates.
pub(crate) fn find_points(set: &LocalSet, rng: &mut ChaCha8Rng, want: usize) -> Result<Vec<Vec<u32>>> {
    let field = set.field();
    let sub = Subspace::new(&field, set.subspace(&field), set.vars.len());
    let k = sub.basis.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let extra = match &set.extra {
        Some(e) if !e.is_zero() => Some(sub.pull(e)?),
        _ => None,
    };
    let quadric = match &set.quadric {
        Some(q) => {
            let qu = sub.pull(q)?;
            if qu.is_zero() {
                None
            } else {
                Some(QuadraticForm::from_poly(&qu)?)
            }
        }
        None => None,
    };
    let extra_deg = extra.as_ref().and_then(|e| e.degree()).unwrap_or(0) as usize;
    let mut out = Vec::new();
    let push = |u: Vec<u32>, out: &mut Vec<Vec<u32>>| {
        if u.iter().any(|&x| x != 0) {
            let x = sub.point(&field, &u);
            if !out.contains(&x) {
                out.push(x);
            }
        }
    };
    let on_extra = |u: &[u32]| extra.as_ref().map_or(0, |e| e.evaluate(u));
    match quadric {
        None => {
            for _ in 0..LINE_BUDGET {
                if out.len() >= want {
                    break;
                }
                let a = random_vec(rng, &field, k);
                let b = random_vec(rng, &field, k);
                if extra.is_none() {
                    push(a, &mut out);
                    continue;
                }
                let pt = |t: u32| axpy(&field, 1, &a, t, &b);
                let roots = univariate_roots(&field, extra_deg, rng, |t| on_extra(&pt(t)));
                for t in roots {
                    push(pt(t), &mut out);
                }
            }
        }
        Some(q) => {
            let gram = q.gram().clone();
            let qv = |v: &[u32]| bilinear(&gram, &field, v, v);
            let bv = |a: &[u32], b: &[u32]| bilinear(&gram, &field, a, b);
            // A point of the quadric outside its kernel.
            let mut base = None;
            for _ in 0..LINE_BUDGET {
                let a = random_vec(rng, &field, k);
                let b = random_vec(rng, &field, k);
                let (qa, bab, qb) = (qv(&a), bv(&a, &b), qv(&b));
                let roots: Vec<u32> = if qb == 0 {
                    if bab == 0 {
                        continue;
                    }
                    let two_b = field.add_u32(bab, bab);
                    vec![field.mul_u32(field.sub_u32(0, qa), field.inv_u32(two_b).unwrap())]
                } else {
                    let disc = field.sub_u32(field.mul_u32(bab, bab), field.mul_u32(qa, qb));
                    let Some(s) = field.sqrt(disc) else { continue };
                    let inv = field.inv_u32(qb).unwrap();
                    let neg = field.sub_u32(0, bab);
                    vec![field.mul_u32(field.add_u32(neg, s), inv), field.mul_u32(field.sub_u32(neg, s), inv)]
                };
                for t in roots {
                    let u = axpy(&field, 1, &a, t, &b);
                    let gu: Vec<u32> = (0..k).map(|i| (0..k).fold(0, |acc, j| field.add_u32(acc, field.mul_u32(gram.get(i, j), u[j])))).collect();
                    if gu.iter().any(|&x| x != 0) {
                        base = Some(u);
                        break;
                    }
                }
                if base.is_some() {
                    break;
                }
            }
            let Some(u0) = base else { return Ok(out) };
            // Second intersection of the line through u0 in direction v.
            let through = |v: &[u32]| -> Vec<u32> {
                let two = field.add_u32(bv(&u0, v), bv(&u0, v));
                axpy(&field, qv(v), &u0, field.sub_u32(0, two), v)
            };
            push(u0.clone(), &mut out);
            for _ in 0..LINE_BUDGET {
                if out.len() >= want {
                    break;
                }
                let c = random_vec(rng, &field, k);
                let d = random_vec(rng, &field, k);
                let at = |s: u32| through(&axpy(&field, 1, &c, s, &d));
                if extra.is_none() {
                    push(at(rng.gen_range(0..field.modulus())), &mut out);
                    continue;
                }
                let roots = univariate_roots(&field, 2 * extra_deg, rng, |s| on_extra(&at(s)));
                for s in roots {
                    push(at(s), &mut out);
                }
            }
            if extra.is_some() {
                out.retain(|x| {
                    let e = set.extra.as_ref().unwrap();
                    e.evaluate(x) == 0
                });
            }
        }
    }
    out.truncate(want.max(1));
    Ok(out)
}

/// Searches for points where `g` is a nonzero square and a non-square.
pub(crate) fn character_witness(set: &LocalSet, g: &FpPoly, rng: &mut ChaCha8Rng) -> Result<Option<(Vec<u32>, Vec<u32>)>> {
    let field = set.field();
    let cone = set.is_homogeneous();
    let points = find_points(set, rng, if cone { 4 } else { 64 })?;
    let mut residue: Option<Vec<u32>> = None;
    let mut nonresidue: Option<Vec<u32>> = None;
    let note = |x: Vec<u32>, v: u32, residue: &mut Option<Vec<u32>>, nonresidue: &mut Option<Vec<u32>>| match field.legendre(v) {
        1 if residue.is_none() => *residue = Some(x),
        -1 if nonresidue.is_none() => *nonresidue = Some(x),
        _ => {}
    };
    let comps = g.components();
    for x in points {
        if cone {
            // g(t x) = sum_d g_d(x) t^d
            let coeffs: Vec<u32> = comps.iter().map(|c| c.evaluate(&x)).collect();
            let mut ts: Vec<u32> = (1..field.modulus().min(400)).collect();
            ts.shuffle(rng);
            for t in ts {
                let v = coeffs.iter().rev().fold(0u32, |acc, &c| field.add_u32(field.mul_u32(acc, t), c));
                let tx: Vec<u32> = x.iter().map(|&c| field.mul_u32(c, t)).collect();
                note(tx, v, &mut residue, &mut nonresidue);
                if residue.is_some() && nonresidue.is_some() {
                    break;
                }
            }
        } else {
            let v = g.evaluate(&x);
            note(x, v, &mut residue, &mut nonresidue);
        }
        if let (Some(a), Some(b)) = (&residue, &nonresidue) {
            return Ok(Some((a.clone(), b.clone())));
        }
    }
    Ok(None)
}

/// Parameters shared by the cover checks of one point.
pub(crate) struct CoverParams<'a> {
    pub g: &'a FpPoly,
    pub l: u32,
    pub saturation: u32,
}

/// Decides whether the double cover over `set` is irreducible.
pub(crate) fn cover_check(set: &LocalSet, cp: &CoverParams, rng: &mut ChaCha8Rng) -> Result<(Outcome, Vec<Evidence>)> {
    let field = set.field();
    let mut evidence = Vec::new();
    let structure = set.irreducibility(field)?;
    let certified = structure.is_certified();
    evidence.push(Evidence::Irreducibility { set: set.label.clone(), certificate: structure });
    let unit = cp.g.constant_term() == 1;
    let cone = set.cone_ideal(field)?;
    if unit && set.is_homogeneous() {
        // A prime ideal is saturated, so degree-wise membership is exact.
        let e = if certified { 0 } else { cp.saturation };
        let obstruction = cover_split_obstruction_at(cp.g, &cone, cp.l, e)?;
        let done = obstruction.is_certified();
        evidence.push(Evidence::Obstruction { set: set.label.clone(), result: obstruction });
        if done && certified {
            return Ok((Outcome::pass(), evidence));
        }
    }
    if unit {
        let root = sqrt_truncation(cp.g, cp.l)?;
        let residual = cp.g - &(&root * &root);
        let mut split = true;
        for c in residual.components() {
            if !c.is_zero() && !membership_by_degree(&cone, &c, cp.saturation)? {
                split = false;
                break;
            }
        }
        if split {
            return Ok((Outcome::fail(Witness::ExactSquare { root: root.to_string(), set: set.label.clone() }), evidence));
        }
    }
    if !certified {
        return Ok((Outcome::inconclusive(Reason::ComponentProbe, format!("irreducibility of {} not certified", set.label)), evidence));
    }
    if let Some((a, b)) = character_witness(set, cp.g, rng)? {
        evidence.push(Evidence::Character { set: set.label.clone(), residue_at: a, nonresidue_at: b });
        return Ok((Outcome::pass(), evidence));
    }
    Ok((Outcome::inconclusive(Reason::ComponentProbe, format!("splitting of the cover over {} not excluded", set.label)), evidence))
}

/// Cover checks for every component of a quadric split, plus multiplicity checks.
pub(crate) fn split_cover_check(
    split: QuadricSplit,
    label: &str,
    cp: &CoverParams,
    rng: &mut ChaCha8Rng,
) -> Result<(Outcome, Vec<Evidence>)> {
    match split {
        QuadricSplit::Degenerate => Ok((
            Outcome::inconclusive(Reason::Unclassified, format!("{label}: the quadric vanishes on the section")),
            Vec::new(),
        )),
        QuadricSplit::Conjugate => Ok((
            Outcome::inconclusive(Reason::ComponentProbe, format!("{label}: the two planes are conjugate over F_p^2")),
            vec![],
        )),
        QuadricSplit::Irreducible(rank, set) => {
            let mut ev = vec![Evidence::Classification { set: label.to_string(), quadric_rank: rank, components: vec![set.label.clone()] }];
            let (o, more) = cover_check(&set, cp, rng)?;
            ev.extend(more);
            Ok((o, ev))
        }
        QuadricSplit::Planes(rank, planes) => {
            let mut ev = vec![Evidence::Classification {
                set: label.to_string(),
                quadric_rank: rank,
                components: planes.iter().map(|(s, _)| s.label.clone()).collect(),
            }];
            let mut outcome = Outcome::pass();
            for (set, cubic_vanishes) in planes {
                if cubic_vanishes {
                    let w = Witness::Multiplicity { plane: set.label.clone(), set: label.to_string() };
                    outcome = outcome.and(Outcome::fail(w));
                    continue;
                }
                let (o, more) = cover_check(&set, cp, rng)?;
                ev.extend(more);
                outcome = outcome.and(o);
            }
            Ok((outcome, ev))
        }
    }
}
