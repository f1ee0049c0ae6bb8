//! Double cover instances `y^2 = g`, `f = 0` in affine coordinates over `F_p`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::monomial::MAX_VARS;
use crate::poly::{FpPoly, VarList};
use crate::text::parse_poly;

/// On-disk form; polynomials use the text format in `z1..z_{M+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "M")]
    pub big_m: u32,
    pub m: u32,
    pub l: u32,
    pub p: u32,
    #[serde(default)]
    pub toy: bool,
    pub f: String,
    pub g: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct DoubleCoverInstance {
    pub big_m: u32,
    pub m: u32,
    pub l: u32,
    pub field: PrimeField,
    pub vars: Arc<VarList>,
    pub f: FpPoly,
    pub g: FpPoly,
    pub toy: bool,
    pub points: Vec<Vec<u32>>,
    pub warnings: Vec<String>,
}

/// Validates `(M, m, l, p)`; returns the toy-mode warnings.
pub fn check_parameters(big_m: u32, m: u32, l: u32, p: u32, toy: bool) -> Result<Vec<String>> {
    let bad = |s: String| Err(Error::InvalidInstance(s));
    if m < 3 {
        return bad(format!("m = {m}: the degree of Q must be at least 3"));
    }
    if l < 2 {
        return bad(format!("l = {l}: the half-degree of the branch divisor must be at least 2"));
    }
    if big_m as usize + 1 > MAX_VARS {
        return bad(format!("M = {big_m}: at most {} ambient variables are supported", MAX_VARS));
    }
    if 2 * l > 255 || m > 255 {
        return bad("degrees above 255 are not supported".into());
    }
    let field = PrimeField::new(p as u64)?;
    if field.modulus() <= 2 * l {
        return bad(format!("p = {p} must exceed 2l = {}", 2 * l));
    }
    let mut warnings = Vec::new();
    if big_m < 6 {
        if !toy {
            return bad(format!("M = {big_m} < 6 requires toy mode"));
        }
        if big_m < 3 {
            return bad(format!("M = {big_m}: toy mode needs M >= 3"));
        }
        warnings.push(format!("toy mode: M = {big_m} < 6"));
    }
    if m + l != big_m + 1 {
        if !toy {
            return bad(format!("m + l = {} must equal M + 1 = {}", m + l, big_m + 1));
        }
        warnings.push(format!("toy mode: m + l = {} differs from M + 1 = {}", m + l, big_m + 1));
    }
    if toy && warnings.is_empty() {
        warnings.push("toy mode".into());
    }
    Ok(warnings)
}

impl DoubleCoverInstance {
    pub fn new(big_m: u32, m: u32, l: u32, field: PrimeField, f: FpPoly, g: FpPoly, toy: bool) -> Result<Self> {
        let warnings = check_parameters(big_m, m, l, field.modulus(), toy)?;
        let vars = VarList::z(big_m as usize + 1);
        for (name, poly, bound) in [("f", &f, m), ("g", &g, 2 * l)] {
            if poly.vars().names() != vars.names() {
                return Err(Error::InvalidInstance(format!("{name} must be written in z1..z{}", big_m + 1)));
            }
            match poly.degree() {
                None => return Err(Error::InvalidInstance(format!("{name} is zero"))),
                Some(d) if d > bound => {
                    return Err(Error::InvalidInstance(format!("{name} has degree {d} > {bound}")));
                }
                _ => {}
            }
        }
        Ok(DoubleCoverInstance { big_m, m, l, field, vars, f, g, toy, points: Vec::new(), warnings })
    }

    pub fn with_points(mut self, points: Vec<Vec<u32>>) -> Result<Self> {
        for pt in &points {
            self.check_coordinates(pt)?;
        }
        self.points = points;
        Ok(self)
    }

    pub fn nvars(&self) -> usize {
        self.big_m as usize + 1
    }

    pub fn check_coordinates(&self, pt: &[u32]) -> Result<()> {
        if pt.len() != self.nvars() {
            return Err(Error::InvalidArgument(format!("point has {} coordinates, expected {}", pt.len(), self.nvars())));
        }
        if pt.iter().any(|&x| x >= self.field.modulus()) {
            return Err(Error::InvalidArgument("point coordinates must be reduced residues".into()));
        }
        Ok(())
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let field = PrimeField::new(file.p as u64)?;
        let vars = VarList::z(file.big_m as usize + 1);
        let f = parse_poly(&field, &vars, &file.f)?;
        let g = parse_poly(&field, &vars, &file.g)?;
        Self::new(file.big_m, file.m, file.l, field, f, g, file.toy)?.with_points(file.points.clone())
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            big_m: self.big_m,
            m: self.m,
            l: self.l,
            p: self.field.modulus(),
            toy: self.toy,
            f: self.f.to_string(),
            g: self.g.to_string(),
            points: self.points.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("malformed instance file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }
}
