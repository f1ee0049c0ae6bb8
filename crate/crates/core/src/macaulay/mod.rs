//! Graded linear algebra over `F_p`: Hilbert functions, regular-sequence
//! certificates, saturated linear parts and degree-wise ideal membership.

mod certificate;
mod engine;
mod normal;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{row_basis, Matrix};
use crate::monomial::Monomial;
use crate::poly::{FpPoly, VarList};

pub use certificate::{
    certify_sequence, koszul_coefficient, regular_sequence_certificate, CertificateRoute, HilbertRow, HilbertTable,
    SequenceCertificate, SequenceVerdict, DEFAULT_DCAP,
};
pub use engine::GradedEngine;
pub use normal::{irreducibility_certificate, IrreducibilityCertificate};

/// Default saturation level.
pub const DEFAULT_SATURATION: u32 = 4;

/// Homogeneous ideal given by nonzero homogeneous generators.
#[derive(Clone, Debug)]
pub struct GradedIdeal {
    field: PrimeField,
    vars: Arc<VarList>,
    gens: Vec<FpPoly>,
    degrees: Vec<u32>,
}

impl GradedIdeal {
    pub fn new(field: PrimeField, vars: &Arc<VarList>, gens: Vec<FpPoly>) -> Result<Self> {
        let mut degrees = Vec::with_capacity(gens.len());
        for g in &gens {
            if g.vars() != vars {
                return Err(Error::VariableMismatch);
            }
            if *g.ring() != field {
                return Err(Error::InvalidArgument("generator over a different field".into()));
            }
            let d = g.degree().ok_or_else(|| Error::InvalidArgument("zero generator".into()))?;
            if !g.is_homogeneous_of(d) {
                return Err(Error::NotHomogeneous(d));
            }
            degrees.push(d);
        }
        Ok(GradedIdeal { field, vars: vars.clone(), gens, degrees })
    }

    /// Like [`GradedIdeal::new`] but silently skips zero polynomials.
    pub fn from_nonzero(field: PrimeField, vars: &Arc<VarList>, gens: impl IntoIterator<Item = FpPoly>) -> Result<Self> {
        Self::new(field, vars, gens.into_iter().filter(|g| !g.is_zero()).collect())
    }

    pub fn empty(field: PrimeField, vars: &Arc<VarList>) -> Self {
        GradedIdeal { field, vars: vars.clone(), gens: Vec::new(), degrees: Vec::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn vars(&self) -> &Arc<VarList> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn generators(&self) -> &[FpPoly] {
        &self.gens
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn with_generators(&self, extra: impl IntoIterator<Item = FpPoly>) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens.extend(extra.into_iter().filter(|g| !g.is_zero()));
        Self::new(self.field, &self.vars, gens)
    }

    pub(crate) fn reduce(&self) -> Reduced {
        Reduced::new(self)
    }
}

/// The ideal with its linear generators eliminated: `R/I = R'/I'` where `R'`
/// keeps only the non-pivot variables.
pub(crate) struct Reduced {
    pub engine: GradedEngine,
    vars: Arc<VarList>,
    keep: Vec<usize>,
    images: Vec<(usize, FpPoly)>,
    /// RREF basis of the span of the linear generators (original coordinates).
    pub linear_basis: Vec<Vec<u32>>,
}

impl Reduced {
    fn new(ideal: &GradedIdeal) -> Self {
        let f = ideal.field;
        let n = ideal.nvars();
        let lin_rows: Vec<Vec<u32>> = ideal
            .gens
            .iter()
            .zip(&ideal.degrees)
            .filter(|(_, &d)| d == 1)
            .map(|(g, _)| g.linear_coeffs())
            .collect();
        let basis = row_basis(&lin_rows, n, &f);
        let mut pivots = Vec::new();
        let mut images = Vec::new();
        for row in &basis {
            let p = row.iter().position(|&x| x != 0).expect("nonzero row");
            pivots.push(p);
            let mut img = FpPoly::zero(&f, &ideal.vars);
            for (c, &v) in row.iter().enumerate() {
                if c != p && v != 0 {
                    img.add_term(Monomial::var(c), f.sub_u32(0, v));
                }
            }
            images.push((p, img));
        }
        let keep: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut red = Reduced {
            engine: GradedEngine::new(f, keep.len(), Vec::new()),
            vars: ideal.vars.clone(),
            keep,
            images,
            linear_basis: basis,
        };
        let mut gens = Vec::new();
        for (g, &d) in ideal.gens.iter().zip(&ideal.degrees) {
            if d == 1 {
                continue;
            }
            let terms = red.reduce_poly(g);
            if !terms.is_empty() {
                gens.push((d, terms));
            }
        }
        red.engine = GradedEngine::new(f, red.keep.len(), gens);
        red
    }

    /// Image of a polynomial of the original ring in the reduced ring.
    pub fn reduce_poly(&self, p: &FpPoly) -> Vec<(Monomial, u32)> {
        let mut q = p.clone();
        for (v, img) in &self.images {
            q = q.substitute_var(*v, img);
        }
        q.terms()
            .map(|(m, &c)| {
                let exps: Vec<u32> = self.keep.iter().map(|&old| m.exp(old)).collect();
                (Monomial::from_exponents(&exps), c)
            })
            .collect()
    }

    pub fn reduced_nvars(&self) -> usize {
        self.keep.len()
    }

    /// Original coordinates of a linear form in the reduced variables.
    fn lift_linear(&self, coeffs: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.vars.len()];
        for (i, &old) in self.keep.iter().enumerate() {
            out[old] = coeffs[i];
        }
        out
    }

    fn is_zero_mod(&mut self, d: u32, terms: Vec<(Monomial, u32)>) -> bool {
        self.engine.normal_form(d, terms).is_empty()
    }
}

/// Dimension of `(R/I)_d`.
pub fn hilbert_function(ideal: &GradedIdeal, d: u32) -> u64 {
    ideal.reduce().engine.hilbert(d) as u64
}

/// Hilbert function values for degrees `0..=max_degree`.
pub fn hilbert_table(ideal: &GradedIdeal, max_degree: u32) -> HilbertTable {
    let mut red = ideal.reduce();
    HilbertTable { by_degree: (0..=max_degree).map(|d| (d, red.engine.hilbert(d) as u64)).collect(), max_degree }
}

/// True iff `P * R_e` is contained in `I_{d+e}`.
pub fn membership_by_degree(ideal: &GradedIdeal, p: &FpPoly, e: u32) -> Result<bool> {
    let mut red = ideal.reduce();
    membership_reduced(&mut red, ideal, p, e)
}

pub(crate) fn membership_reduced(red: &mut Reduced, ideal: &GradedIdeal, p: &FpPoly, e: u32) -> Result<bool> {
    if p.vars() != ideal.vars() {
        return Err(Error::VariableMismatch);
    }
    let Some(d) = p.degree() else { return Ok(true) };
    if !p.is_homogeneous_of(d) {
        return Err(Error::NotHomogeneous(d));
    }
    let terms = red.reduce_poly(p);
    if terms.is_empty() {
        return Ok(true);
    }
    for m in Monomial::all_of_degree(red.reduced_nvars(), e) {
        let shifted: Vec<(Monomial, u32)> = terms.iter().map(|(t, c)| (t.mul(m), *c)).collect();
        if !red.is_zero_mod(d + e, shifted) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Degree-one part of the saturation, as computed by [`saturated_linear_forms`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturatedLinearPart {
    /// Row-reduced basis, coefficient vectors in the ideal's variables.
    pub basis: Vec<Vec<u32>>,
    /// Smallest `e` with `L_e = L_{e+1}`, if found within the limit.
    pub stabilized_at: Option<u32>,
    pub e_max: u32,
}

impl SaturatedLinearPart {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn polys(&self, field: &PrimeField, vars: &Arc<VarList>) -> Vec<FpPoly> {
        self.basis.iter().map(|b| FpPoly::linear(field, vars, b)).collect()
    }

    /// True when the span equals the span of the given coefficient vectors.
    pub fn spans(&self, vectors: &[Vec<u32>], field: &PrimeField) -> bool {
        let n = self.basis.first().map(|b| b.len()).or_else(|| vectors.first().map(|v| v.len())).unwrap_or(0);
        row_basis(vectors, n, field) == self.basis
    }
}

/// Linear forms `l` with `l * R_e` inside `I_{e+1}`, at the first stable `e`.
pub fn saturated_linear_forms(ideal: &GradedIdeal, e_max: u32) -> SaturatedLinearPart {
    let f = ideal.field;
    let mut red = ideal.reduce();
    let n = red.reduced_nvars();
    let mut prev: Option<Vec<Vec<u32>>> = None;
    let mut last = Vec::new();
    for e in 0..=e_max + 1 {
        let space = linear_annihilator(&mut red, n, e);
        if let Some(p) = &prev {
            if *p == space {
                return SaturatedLinearPart { basis: lift_space(&red, p, &f), stabilized_at: Some(e - 1), e_max };
            }
        }
        if e <= e_max {
            last = space.clone();
        }
        prev = Some(space);
    }
    SaturatedLinearPart { basis: lift_space(&red, &last, &f), stabilized_at: None, e_max }
}

fn lift_space(red: &Reduced, space: &[Vec<u32>], f: &PrimeField) -> Vec<Vec<u32>> {
    let n = red.vars.len();
    let mut rows: Vec<Vec<u32>> = red.linear_basis.clone();
    rows.extend(space.iter().map(|v| red.lift_linear(v)));
    row_basis(&rows, n, f)
}

/// RREF basis of `{l in R'_1 : l * R'_e in I'}`.
fn linear_annihilator(red: &mut Reduced, n: usize, e: u32) -> Vec<Vec<u32>> {
    let f = *red.engine.field();
    if n == 0 {
        return Vec::new();
    }
    red.engine.ensure(e + 1);
    let mut echelon: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for m in Monomial::all_of_degree(n, e) {
        // column i of this block: NF(x_i * m) on the standard columns.
        let images: Vec<Vec<(u32, u32)>> =
            (0..n).map(|i| red.engine.normal_form(e + 1, [(m.mul(Monomial::var(i)), 1)])).collect();
        let mut by_col: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
        for (i, img) in images.iter().enumerate() {
            for &(c, v) in img {
                by_col.entry(c).or_insert_with(|| vec![0; n])[i] = v;
            }
        }
        for (_, mut row) in by_col {
            insert_row(&f, &mut echelon, &mut pivots, &mut row);
            if echelon.len() == n {
                return Vec::new();
            }
        }
    }
    let m = if echelon.is_empty() { Matrix::zeros(0, n) } else { Matrix::from_rows(&echelon, n) };
    let kernel = if echelon.is_empty() { (0..n).map(|i| unit(n, i)).collect() } else { m.kernel(&f) };
    row_basis(&kernel, n, &f)
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn insert_row(f: &PrimeField, echelon: &mut Vec<Vec<u32>>, pivots: &mut Vec<usize>, row: &mut [u32]) {
    for (r, &p) in echelon.iter().zip(pivots.iter()) {
        let c = row[p];
        if c != 0 {
            for (x, &y) in row.iter_mut().zip(r.iter()) {
                *x = f.sub_u32(*x, f.mul_u32(c, y));
            }
        }
    }
    if let Some(p) = row.iter().position(|&x| x != 0) {
        let inv = f.inv_u32(row[p]).expect("nonzero");
        for x in row.iter_mut() {
            *x = f.mul_u32(*x, inv);
        }
        for r in echelon.iter_mut() {
            let c = r[p];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(row.iter()) {
                    *x = f.sub_u32(*x, f.mul_u32(c, y));
                }
            }
        }
        echelon.push(row.to_vec());
        pivots.push(p);
    }
}
