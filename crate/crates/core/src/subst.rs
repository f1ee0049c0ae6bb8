//! Linear substitutions, restrictions and linear changes of coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{PrimeField, Ring};
use crate::linalg::Matrix;
use crate::monomial::Monomial;
use crate::poly::{FpPoly, SparsePoly, VarList};

/// Assignments `z_i -> linear form` where no image mentions an assigned variable.
#[derive(Clone, Debug)]
pub struct LinearSubstitution<R: Ring> {
    vars: Arc<VarList>,
    assignments: BTreeMap<usize, SparsePoly<R>>,
}

impl<R: Ring> LinearSubstitution<R> {
    pub fn identity(vars: &Arc<VarList>) -> Self {
        LinearSubstitution { vars: vars.clone(), assignments: BTreeMap::new() }
    }

    /// Builds a substitution from `(variable name, image)` pairs.
    pub fn new(vars: &Arc<VarList>, assignments: Vec<(&str, SparsePoly<R>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, image) in assignments {
            let idx = vars.index(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if image.vars() != vars {
                return Err(Error::VariableMismatch);
            }
            if !image.is_homogeneous_of(1) {
                return Err(Error::InvalidArgument(format!("image of {name} is not a linear form")));
            }
            if map.insert(idx, image).is_some() {
                return Err(Error::InvalidArgument(format!("{name} assigned twice")));
            }
        }
        for image in map.values() {
            for (m, _) in image.terms() {
                if map.keys().any(|&k| m.exp(k) > 0) {
                    return Err(Error::InvalidArgument("an image involves a substituted variable".into()));
                }
            }
        }
        Ok(LinearSubstitution { vars: vars.clone(), assignments: map })
    }

    /// Sets the named variables to zero.
    pub fn zeroing(vars: &Arc<VarList>, names: &[&str], ring: &R) -> Result<Self> {
        Self::new(vars, names.iter().map(|n| (*n, SparsePoly::zero(ring, vars))).collect())
    }

    pub fn assigned(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.keys().copied()
    }

    /// Variables that survive the substitution.
    pub fn target_vars(&self) -> Arc<VarList> {
        let keep: Vec<usize> = (0..self.vars.len()).filter(|i| !self.assignments.contains_key(i)).collect();
        self.vars.select(&keep)
    }
}

/// Applies `s` and re-homes the result in the surviving variables.
pub fn restrict<R: Ring>(p: &SparsePoly<R>, s: &LinearSubstitution<R>) -> Result<SparsePoly<R>> {
    if p.vars() != &s.vars {
        return Err(Error::VariableMismatch);
    }
    let mut out = p.clone();
    for (&i, image) in &s.assignments {
        out = out.substitute_var(i, image);
    }
    let target = s.target_vars();
    let mut map = vec![None; p.nvars()];
    let mut next = 0;
    for (i, slot) in map.iter_mut().enumerate() {
        if !s.assignments.contains_key(&i) {
            *slot = Some(next);
            next += 1;
        }
    }
    out.relabel(&target, &map)
}

enum Elementary {
    Swap(usize, usize),
    Scale(usize, u32),
    /// `z_a -> z_a + c z_b`
    Shear(usize, usize, u32),
}

/// Returns `P(B y)`: the polynomial expressed in new coordinates `y` with `z = B y`.
pub fn linear_change(p: &FpPoly, b: &Matrix) -> Result<FpPoly> {
    let f = *p.ring();
    let n = p.nvars();
    if b.rows != n || b.cols != n {
        return Err(Error::InvalidArgument("matrix size does not match variable count".into()));
    }
    // Row-reduce B to the identity; B is the product of the inverse operations.
    let mut work = b.clone();
    let mut ops = Vec::new();
    for c in 0..n {
        let pr = (c..n).find(|&r| work.get(r, c) != 0).ok_or_else(|| Error::InvalidArgument("singular change of coordinates".into()))?;
        if pr != c {
            for j in 0..n {
                let (x, y) = (work.get(c, j), work.get(pr, j));
                work.set(c, j, y);
                work.set(pr, j, x);
            }
            ops.push(Elementary::Swap(c, pr));
        }
        let piv = work.get(c, c);
        if piv != 1 {
            let inv = f.inv_u32(piv).expect("nonzero");
            for j in 0..n {
                work.set(c, j, f.mul_u32(work.get(c, j), inv));
            }
            ops.push(Elementary::Scale(c, piv));
        }
        for r in 0..n {
            let factor = work.get(r, c);
            if r == c || factor == 0 {
                continue;
            }
            for j in 0..n {
                let v = f.sub_u32(work.get(r, j), f.mul_u32(factor, work.get(c, j)));
                work.set(r, j, v);
            }
            // row_r -= factor * row_c ; inverse adds it back.
            ops.push(Elementary::Shear(r, c, factor));
        }
    }
    let vars = p.vars().clone();
    let mut out = p.clone();
    for op in &ops {
        out = match *op {
            Elementary::Swap(a, bb) => {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(a, bb);
                let terms: Vec<(Monomial, u32)> = out.terms().map(|(m, c)| (m.permute(&perm), *c)).collect();
                FpPoly::from_terms(&f, &vars, terms)
            }
            Elementary::Scale(a, s) => out.substitute_var(a, &FpPoly::var(&f, &vars, a).scale(&s)),
            Elementary::Shear(a, bb, c) => {
                let image = &FpPoly::var(&f, &vars, a) + &FpPoly::var(&f, &vars, bb).scale(&c);
                out.substitute_var(a, &image)
            }
        };
    }
    Ok(out)
}

/// Coordinate change making the given independent linear forms into coordinates.
///
/// `forms[k] = (slot, coefficients)` requests `y_slot = form(z)`; the remaining
/// slots are filled with coordinate functions `z_i` so that the matrix `A` with
/// `y = A z` is invertible. Returns `(A, A^{-1})`.
pub fn frame_matrix(f: &PrimeField, n: usize, forms: &[(usize, Vec<u32>)]) -> Result<(Matrix, Matrix)> {
    let mut a = Matrix::zeros(n, n);
    let mut used = vec![false; n];
    for (slot, coeffs) in forms {
        if *slot >= n || used[*slot] || coeffs.len() != n {
            return Err(Error::InvalidArgument("bad frame specification".into()));
        }
        used[*slot] = true;
        for (j, &c) in coeffs.iter().enumerate() {
            a.set(*slot, j, c);
        }
    }
    let rows: Vec<Vec<u32>> = forms.iter().map(|(_, c)| c.clone()).collect();
    let mut span = Matrix::from_rows(&rows, n);
    let pivots = span.rref(f);
    if pivots.len() < forms.len() {
        return Err(Error::DegenerateFrame("linear forms are dependent".into()));
    }
    let mut completions = (0..n).filter(|c| !pivots.contains(c));
    for slot in 0..n {
        if !used[slot] {
            let c = completions.next().expect("enough completion coordinates");
            a.set(slot, c, 1);
        }
    }
    let inv = a.inverse(f).ok_or_else(|| Error::DegenerateFrame("frame matrix is singular".into()))?;
    Ok((a, inv))
}

/// `p(images[0], ..., images[n-1])` where the images are polynomials in a common ring.
pub fn compose(p: &FpPoly, images: &[FpPoly]) -> Result<FpPoly> {
    if images.len() != p.nvars() {
        return Err(Error::InvalidArgument("one image per variable is required".into()));
    }
    let Some(first) = images.first() else { return Ok(p.clone()) };
    let f = *p.ring();
    let target = first.vars().clone();
    if images.iter().any(|i| i.vars() != &target) {
        return Err(Error::VariableMismatch);
    }
    let mut powers: Vec<Vec<FpPoly>> = vec![vec![FpPoly::one(&f, &target)]; images.len()];
    let mut out = FpPoly::zero(&f, &target);
    for (m, c) in p.terms() {
        let mut term = FpPoly::constant(&f, &target, *c);
        for (i, img) in images.iter().enumerate() {
            let e = m.exp(i) as usize;
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e {
                let next = &powers[i][powers[i].len() - 1] * img;
                powers[i].push(next);
            }
            term = &term * &powers[i][e];
        }
        for (tm, tc) in term.terms() {
            out.add_term(*tm, *tc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;

    #[test]
    fn restrict_examples() {
        let f = PrimeField::new(32003).unwrap();
        let v = VarList::z(3);
        let p = parse_poly(&f, &v, "z1*z2 + z3^2").unwrap();
        let img = parse_poly(&f, &v, "z2 + z3").unwrap();
        let s = LinearSubstitution::new(&v, vec![("z1", img)]).unwrap();
        let r = restrict(&p, &s).unwrap();
        let tv = s.target_vars();
        assert_eq!(r, parse_poly(&f, &tv, "z2^2 + z2*z3 + z3^2").unwrap());
        let id = LinearSubstitution::identity(&v);
        assert_eq!(restrict(&p, &id).unwrap(), p);
        assert!(LinearSubstitution::<PrimeField>::zeroing(&v, &["w"], &f).is_err());
        let bad = parse_poly(&f, &v, "z1").unwrap();
        assert!(LinearSubstitution::new(&v, vec![("z1", bad)]).is_err());
    }

    #[test]
    fn linear_change_matches_evaluation() {
        let f = PrimeField::new(101).unwrap();
        let v = VarList::z(3);
        let p = parse_poly(&f, &v, "z1^2*z3 + 3*z2*z3 + 5*z1 + 7").unwrap();
        let b = Matrix::from_rows(&[vec![0, 2, 1], vec![1, 1, 0], vec![3, 0, 4]], 3);
        let q = linear_change(&p, &b).unwrap();
        for y in [[1u32, 2, 3], [4, 0, 9], [17, 33, 2]] {
            let z: Vec<u32> = (0..3)
                .map(|i| (0..3).fold(0, |acc, j| f.add_u32(acc, f.mul_u32(b.get(i, j), y[j]))))
                .collect();
            assert_eq!(q.evaluate(&y), p.evaluate(&z));
        }
    }
}
