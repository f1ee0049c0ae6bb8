//! Quadratic forms over `F_p`: Gram matrices, rank and diagonalization.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::monomial::Monomial;
use crate::poly::FpPoly;

/// Symmetric Gram matrix of a homogeneous quadratic polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    field: PrimeField,
    gram: Matrix,
}

impl QuadraticForm {
    pub fn from_poly(p: &FpPoly) -> Result<Self> {
        let f = *p.ring();
        let n = p.nvars();
        let half = f.inv_u32(2).ok_or(Error::CharacteristicTwo)?;
        let mut gram = Matrix::zeros(n, n);
        for (m, &c) in p.terms() {
            if m.degree() != 2 {
                return Err(Error::NotHomogeneous(2));
            }
            let idx: Vec<usize> = (0..n).filter(|&i| m.exp(i) > 0).collect();
            if idx.len() == 1 {
                gram.set(idx[0], idx[0], c);
            } else {
                let h = f.mul_u32(c, half);
                gram.set(idx[0], idx[1], h);
                gram.set(idx[1], idx[0], h);
            }
        }
        Ok(QuadraticForm { field: f, gram })
    }

    pub fn dimension(&self) -> usize {
        self.gram.rows
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rank(&self.field)
    }

    /// Writes the form as `sum a_k * l_k^2` with independent linear forms `l_k`.
    pub fn diagonalize(&self) -> Vec<(u32, Vec<u32>)> {
        let f = self.field;
        let n = self.dimension();
        let mut g = self.gram.clone();
        let mut out = Vec::new();
        let qv = |g: &Matrix, v: &[u32]| -> u32 {
            let mut acc = 0;
            for i in 0..n {
                for j in 0..n {
                    acc = f.add_u32(acc, f.mul_u32(v[i], f.mul_u32(g.get(i, j), v[j])));
                }
            }
            acc
        };
        loop {
            let mut chosen = None;
            'search: for i in 0..n {
                let mut v = vec![0u32; n];
                v[i] = 1;
                if qv(&g, &v) != 0 {
                    chosen = Some(v);
                    break;
                }
                for j in i + 1..n {
                    if g.get(i, j) != 0 {
                        v[j] = 1;
                        chosen = Some(v);
                        break 'search;
                    }
                }
            }
            let Some(v) = chosen else { break };
            let a = qv(&g, &v);
            let ainv = f.inv_u32(a).expect("nonzero value");
            let gv: Vec<u32> = (0..n).map(|i| (0..n).fold(0, |acc, j| f.add_u32(acc, f.mul_u32(g.get(i, j), v[j])))).collect();
            let form: Vec<u32> = gv.iter().map(|&x| f.mul_u32(x, ainv)).collect();
            for i in 0..n {
                for j in 0..n {
                    let t = f.mul_u32(a, f.mul_u32(form[i], form[j]));
                    g.set(i, j, f.sub_u32(g.get(i, j), t));
                }
            }
            out.push((a, form));
        }
        out
    }
}

/// Rank of the quadratic form attached to a homogeneous quadratic polynomial.
pub fn quadratic_rank(p: &FpPoly) -> Result<usize> {
    Ok(QuadraticForm::from_poly(p)?.rank())
}

/// Factors a rank-2 quadratic form into two linear forms over `F_p` when possible.
pub fn split_rank_two(p: &FpPoly) -> Result<Option<(Vec<u32>, Vec<u32>)>> {
    let q = QuadraticForm::from_poly(p)?;
    let diag = q.diagonalize();
    if diag.len() != 2 {
        return Err(Error::InvalidArgument("form does not have rank 2".into()));
    }
    let f = q.field;
    let (a, u) = &diag[0];
    let (b, v) = &diag[1];
    // a u^2 + b v^2 = a (u - s v)(u + s v) with s^2 = -b/a.
    let target = f.mul_u32(f.sub_u32(0, *b), f.inv_u32(*a).expect("nonzero"));
    let Some(s) = f.sqrt(target) else { return Ok(None) };
    let l1: Vec<u32> = u.iter().zip(v).map(|(&x, &y)| f.mul_u32(*a, f.sub_u32(x, f.mul_u32(s, y)))).collect();
    let l2: Vec<u32> = u.iter().zip(v).map(|(&x, &y)| f.add_u32(x, f.mul_u32(s, y))).collect();
    Ok(Some((l1, l2)))
}

/// Builds the polynomial of a linear form given by coefficients.
pub fn linear_poly(field: &PrimeField, vars: &std::sync::Arc<crate::poly::VarList>, coeffs: &[u32]) -> FpPoly {
    FpPoly::from_terms(field, vars, coeffs.iter().enumerate().map(|(i, &c)| (Monomial::var(i), c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarList;
    use crate::text::parse_poly;

    fn fp() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = fp();
        let v = VarList::z(4);
        assert_eq!(quadratic_rank(&FpPoly::zero(&f, &v)).unwrap(), 0);
        assert_eq!(quadratic_rank(&parse_poly(&f, &v, "z1^2 + z2^2 + z3^2").unwrap()).unwrap(), 3);
        assert_eq!(quadratic_rank(&parse_poly(&f, &v, "z1*z2").unwrap()).unwrap(), 2);
        assert!(quadratic_rank(&parse_poly(&f, &v, "z1*z2 + z3").unwrap()).is_err());
    }

    #[test]
    fn diagonalization_reconstructs() {
        let f = fp();
        let v = VarList::z(3);
        let p = parse_poly(&f, &v, "z1*z2 + 3*z2*z3 + 5*z3^2").unwrap();
        let diag = QuadraticForm::from_poly(&p).unwrap().diagonalize();
        let mut sum = FpPoly::zero(&f, &v);
        for (a, form) in &diag {
            let l = linear_poly(&f, &v, form);
            sum = &sum + &(&l * &l).scale(a);
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn rank_two_split() {
        let f = fp();
        let v = VarList::z(3);
        let p = parse_poly(&f, &v, "z1*z2 + z1*z3").unwrap();
        let (a, b) = split_rank_two(&p).unwrap().unwrap();
        assert_eq!(&linear_poly(&f, &v, &a) * &linear_poly(&f, &v, &b), p);
        // z1^2 + z2^2 is irreducible when -1 is a non-residue (32003 = 3 mod 4).
        let q = parse_poly(&f, &v, "z1^2 + z2^2").unwrap();
        assert!(split_rank_two(&q).unwrap().is_none());
    }
}
