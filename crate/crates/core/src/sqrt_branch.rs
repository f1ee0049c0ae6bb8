//! Truncated square roots of a unit power series and the cover-splitting test.
//!
//! For `g = 1 + w_1 + w_2 + ...` with `w_i` homogeneous of degree `i`, the formal
//! square root is `1 + sum_k gamma_k (g - 1)^k = 1 + Phi_1 + Phi_2 + ...`. The
//! truncation `[sqrt g]_j` keeps `Phi_1..Phi_j`, and `h_{j+1}` is the lowest
//! component of `g - [sqrt g]_j^2`, which always sits in degree `j + 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Ring;
use crate::macaulay::{membership_reduced, GradedIdeal, DEFAULT_SATURATION};
use crate::poly::{FpPoly, SparsePoly};

/// Coefficient of `t^i` in `(1 + t)^{1/2}`, `i >= 1`.
pub fn gamma(i: u32) -> Result<BigRational> {
    if i == 0 {
        return Err(Error::InvalidArgument("gamma is defined for i >= 1".into()));
    }
    // (2i - 3)!! with (-1)!! = 1
    let mut num = BigInt::one();
    let mut k = 2 * i as i64 - 3;
    while k > 1 {
        num *= k;
        k -= 2;
    }
    let mut den = BigInt::one() << i as usize;
    for k in 2..=i {
        den *= k;
    }
    let value = BigRational::new(num, den);
    Ok(if i % 2 == 1 { value } else { -value })
}

fn check_unit<R: Ring>(g: &SparsePoly<R>) -> Result<()> {
    if !g.ring().is_one(&g.constant_term()) {
        return Err(Error::NonUnitConstant);
    }
    if g.ring().characteristic() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    Ok(())
}

fn gammas<R: Ring>(ring: &R, j: u32) -> Result<Vec<R::Elem>> {
    (1..=j).map(|i| ring.from_rational(&gamma(i)?)).collect()
}

/// `[sqrt g]_j = 1 + Phi_1 + ... + Phi_j`.
pub fn sqrt_truncation<R: Ring>(g: &SparsePoly<R>, j: u32) -> Result<SparsePoly<R>> {
    check_unit(g)?;
    let ring = g.ring().clone();
    let one = SparsePoly::one(&ring, g.vars());
    let w = (g - &one).truncate(j);
    let gs = gammas(&ring, j)?;
    let mut acc = one;
    let mut power = w.clone();
    for (k, c) in gs.iter().enumerate() {
        if power.is_zero() {
            break;
        }
        acc = &acc + &power.scale(c);
        if k + 1 < gs.len() {
            power = power.mul_truncated(&w, j);
        }
    }
    Ok(acc)
}

/// Degree `j + 1` component of `g - [sqrt g]_j^2`; lower components are checked to vanish.
pub fn h_component<R: Ring>(g: &SparsePoly<R>, j: u32) -> Result<SparsePoly<R>> {
    let root = sqrt_truncation(g, j)?;
    residual_head(g, &root, j)
}

fn residual_head<R: Ring>(g: &SparsePoly<R>, root: &SparsePoly<R>, j: u32) -> Result<SparsePoly<R>> {
    let residual = g.truncate(j + 1) - root.mul_truncated(root, j + 1);
    if let Some(low) = residual.order() {
        if low <= j {
            return Err(Error::Invariant(format!("residual of the order {j} root has a component in degree {low}")));
        }
    }
    Ok(residual.homogeneous_component(j + 1))
}

/// Truncations `[sqrt g]_j` and residual heads `h_{j+1}` for `j = 1..=j_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtExpansion<R: Ring> {
    pub g: SparsePoly<R>,
    /// Entry `j - 1` is `[sqrt g]_j`.
    pub truncations: Vec<SparsePoly<R>>,
    /// Entry `j - 1` is `h_{j+1}`.
    pub residual_components: Vec<SparsePoly<R>>,
}

impl<R: Ring> SqrtExpansion<R> {
    pub fn new(g: &SparsePoly<R>, j_max: u32) -> Result<Self> {
        let full = sqrt_truncation(g, j_max.max(1))?;
        let mut truncations = Vec::with_capacity(j_max as usize);
        let mut residual_components = Vec::with_capacity(j_max as usize);
        for j in 1..=j_max {
            let root = full.truncate(j);
            residual_components.push(residual_head(g, &root, j)?);
            truncations.push(root);
        }
        Ok(SqrtExpansion { g: g.clone(), truncations, residual_components })
    }

    pub fn j_max(&self) -> u32 {
        self.truncations.len() as u32
    }

    pub fn truncation(&self, j: u32) -> &SparsePoly<R> {
        &self.truncations[j as usize - 1]
    }

    /// `h_k` for `2 <= k <= j_max + 1`.
    pub fn h(&self, k: u32) -> &SparsePoly<R> {
        &self.residual_components[k as usize - 2]
    }

    /// `Phi_i` for `1 <= i <= j_max`.
    pub fn phi(&self, i: u32) -> SparsePoly<R> {
        self.truncations[self.truncations.len() - 1].homogeneous_component(i)
    }
}

/// Outcome of the truncated non-squareness test along a cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitObstruction {
    /// `h_degree` is not in the saturated ideal, so `g` is not the square of a
    /// polynomial of degree at most `l` modulo the ideal.
    IrreducibleCertified { degree: u32, witness: String },
    /// Every tested `h` lies in the saturated ideal; `root` is `[sqrt g]_l`.
    SplitNotExcluded { root: String, tested: Vec<u32> },
}

impl SplitObstruction {
    pub fn is_certified(&self) -> bool {
        matches!(self, SplitObstruction::IrreducibleCertified { .. })
    }
}

/// Tests `h_{j+1}` for `j = l..=2l-1` against the saturation of `ideal` at the
/// default level.
pub fn cover_split_obstruction(g: &FpPoly, ideal: &GradedIdeal, l: u32) -> Result<SplitObstruction> {
    cover_split_obstruction_at(g, ideal, l, DEFAULT_SATURATION)
}

pub fn cover_split_obstruction_at(g: &FpPoly, ideal: &GradedIdeal, l: u32, e: u32) -> Result<SplitObstruction> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be positive".into()));
    }
    if g.vars() != ideal.vars() {
        return Err(Error::VariableMismatch);
    }
    let exp = SqrtExpansion::new(g, 2 * l - 1)?;
    let mut red = ideal.reduce();
    let mut tested = Vec::new();
    for j in l..=2 * l - 1 {
        let h = exp.h(j + 1);
        tested.push(j + 1);
        if !membership_reduced(&mut red, ideal, h, e)? {
            return Ok(SplitObstruction::IrreducibleCertified { degree: j + 1, witness: h.to_string() });
        }
    }
    Ok(SplitObstruction::SplitNotExcluded { root: exp.truncation(l).to_string(), tested })
}

/// `(1 + t)^{1/2}` through `t^n` by Newton iteration on truncated series.
pub fn newton_sqrt_series(n: usize) -> Vec<BigRational> {
    let target: Vec<BigRational> =
        (0..=n).map(|k| if k <= 1 { BigRational::one() } else { BigRational::zero() }).collect();
    let mut x = vec![BigRational::zero(); n + 1];
    x[0] = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut precision = 1;
    while precision <= n {
        precision *= 2;
        let q = series_div(&target, &x);
        x = x.iter().zip(&q).map(|(a, b)| (a + b) * &half).collect();
    }
    x
}

fn series_div(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len();
    let inv0 = BigRational::one() / &b[0];
    let mut q: Vec<BigRational> = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = a[k].clone();
        for i in 1..=k {
            s -= &b[i] * &q[k - i];
        }
        q.push(s * &inv0);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::poly::{QPoly, VarList};
    use crate::text::parse_poly;

    fn q(s: &str, n: usize) -> QPoly {
        parse_poly(&Rationals, &VarList::z(n), s).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1).unwrap(), rat(1, 2));
        assert_eq!(gamma(2).unwrap(), rat(-1, 8));
        assert_eq!(gamma(3).unwrap(), rat(1, 16));
        assert!(gamma(0).is_err());
        let newton = newton_sqrt_series(12);
        for i in 1..=12 {
            assert_eq!(gamma(i).unwrap(), newton[i as usize]);
        }
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(sqrt_truncation(&q("1 + 2*z1 + z1^2", 1), 3).unwrap(), q("1 + z1", 1));
        assert_eq!(sqrt_truncation(&q("1 + z1", 1), 2).unwrap(), q("1 + 1/2*z1 - 1/8*z1^2", 1));
        assert_eq!(sqrt_truncation(&q("1 + z1 + z2^2", 2), 2).unwrap(), q("1 + 1/2*z1 + 1/2*z2^2 - 1/8*z1^2", 2));
        assert_eq!(sqrt_truncation(&q("2 + z1", 1), 2), Err(Error::NonUnitConstant));
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_component(&q("1 + z1", 1), 1).unwrap(), q("-1/4*z1^2", 1));
        assert!(h_component(&q("1 + 2*z1 + z1^2", 1), 2).unwrap().is_zero());
        assert_eq!(h_component(&q("1 + z1*z2", 2), 1).unwrap(), q("z1*z2", 2));
    }

    #[test]
    fn h_is_twice_next_phi() {
        let g = q("1 + z1 - 3*z2^2 + z1*z2^3 + 5*z2^4", 2);
        let exp = SqrtExpansion::new(&g, 6).unwrap();
        for j in 1..6 {
            assert_eq!(*exp.h(j + 1), exp.phi(j + 1).scale(&rat(2, 1)));
        }
    }

    #[test]
    fn obstruction_examples() {
        let f = PrimeField::new(32003).unwrap();
        let v = VarList::z(2);
        let p = |s: &str| parse_poly(&f, &v, s).unwrap();
        let ideal = GradedIdeal::new(f, &v, vec![p("z2")]).unwrap();
        let sq = cover_split_obstruction(&p("1 + 2*z1 + z1^2"), &ideal, 1).unwrap();
        assert!(matches!(sq, SplitObstruction::SplitNotExcluded { .. }));
        let r = cover_split_obstruction(&p("1 + z1^2"), &ideal, 1).unwrap();
        assert!(matches!(r, SplitObstruction::IrreducibleCertified { degree: 2, .. }));
        let r = cover_split_obstruction(&p("1 + z2^2"), &ideal, 1).unwrap();
        assert!(matches!(r, SplitObstruction::SplitNotExcluded { .. }));
        // A square of a quadratic polynomial is not mistaken for a non-square.
        let g = p("1 + z1 + z1^2").pow(2);
        let r = cover_split_obstruction(&g, &GradedIdeal::empty(f, &v), 2).unwrap();
        assert!(matches!(r, SplitObstruction::SplitNotExcluded { .. }));
    }
}
