//! Packed exponent vectors ordered by graded reverse lexicographic order.

use std::cmp::Ordering;
use std::fmt;

/// Maximum number of variables a monomial can carry.
pub const MAX_VARS: usize = 16;
/// Maximum total degree (each exponent occupies one byte).
pub const MAX_DEGREE: u32 = 255;

/// Exponent vector with one byte per variable, variable `i` in bits `8i..8i+8`.
///
/// The length is implied by the owning polynomial's variable list; unused
/// slots are zero. `Ord` is graded reverse lexicographic with `z1 > z2 > ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(i: usize) -> Self {
        debug_assert!(i < MAX_VARS);
        Monomial(1u128 << (8 * i))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let total: u32 = exps.iter().sum();
        assert!(total <= MAX_DEGREE, "degree overflow");
        let mut packed = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            packed |= (e as u128) << (8 * i);
        }
        Monomial(packed)
    }

    #[inline]
    pub fn raw(self) -> u128 {
        self.0
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (8 * i)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(i)).collect()
    }

    #[inline]
    pub fn degree(self) -> u32 {
        self.0.to_le_bytes().iter().map(|&b| b as u32).sum()
    }

    /// Product; the caller guarantees the total degree stays within range.
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        debug_assert!(self.degree() + other.degree() <= MAX_DEGREE);
        Monomial(self.0 + other.0)
    }

    #[inline]
    pub fn divides(self, other: Monomial) -> bool {
        let a = self.0.to_le_bytes();
        let b = other.0.to_le_bytes();
        a.iter().zip(b.iter()).all(|(x, y)| x <= y)
    }

    #[inline]
    pub fn div(self, other: Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(self.0 - other.0))
        } else {
            None
        }
    }

    pub fn with_exp(self, i: usize, e: u32) -> Monomial {
        let cleared = self.0 & !(0xffu128 << (8 * i));
        Monomial(cleared | ((e as u128) << (8 * i)))
    }

    /// Drops the exponent at slot `i`, shifting the higher slots down.
    pub fn remove_slot(self, i: usize) -> Monomial {
        let low_mask = if i == 0 { 0 } else { (1u128 << (8 * i)) - 1 };
        let low = self.0 & low_mask;
        let high = if i + 1 >= MAX_VARS { 0 } else { self.0 >> (8 * (i + 1)) };
        Monomial(low | (high << (8 * i)))
    }

    /// Moves exponent slots according to `map[old] = new`.
    pub fn permute(self, map: &[usize]) -> Monomial {
        let mut packed = 0u128;
        for (old, &new) in map.iter().enumerate() {
            packed |= ((self.0 >> (8 * old)) & 0xff) << (8 * new);
        }
        Monomial(packed)
    }

    /// All monomials of total degree `d` in `n` variables, in descending order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Monomial::ONE);
            }
            return out;
        }
        let mut exps = vec![0u32; n];
        fill(&mut exps, 0, d, &mut out);
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

fn fill(exps: &mut Vec<u32>, i: usize, rest: u32, out: &mut Vec<Monomial>) {
    if i + 1 == exps.len() {
        exps[i] = rest;
        out.push(Monomial::from_exponents(exps));
        return;
    }
    for e in 0..=rest {
        exps[i] = e;
        fill(exps, i + 1, rest - e, out);
    }
    exps[i] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        // Reverse lex: the last differing exponent decides; smaller wins.
        let a = self.0.to_le_bytes();
        let b = other.0.to_le_bytes();
        for i in (0..MAX_VARS).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<u32> = (0..MAX_VARS).map(|i| self.exp(i)).collect();
        let last = exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &exps[..last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_order() {
        let m = |e: &[u32]| Monomial::from_exponents(e);
        // degree first
        assert!(m(&[0, 0, 2]) > m(&[1, 0, 0]));
        // x^2 > xy > y^2 > xz > yz > z^2
        let mut v = vec![m(&[0, 0, 2]), m(&[1, 1, 0]), m(&[0, 1, 1]), m(&[2, 0, 0]), m(&[1, 0, 1]), m(&[0, 2, 0])];
        v.sort_by(|a, b| b.cmp(a));
        assert_eq!(
            v,
            vec![m(&[2, 0, 0]), m(&[1, 1, 0]), m(&[0, 2, 0]), m(&[1, 0, 1]), m(&[0, 1, 1]), m(&[0, 0, 2])]
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Monomial::all_of_degree(6, 12).len(), 6188);
        assert_eq!(Monomial::all_of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::all_of_degree(0, 0).len(), 1);
        assert!(Monomial::all_of_degree(0, 1).is_empty());
    }

    #[test]
    fn slots() {
        let a = Monomial::from_exponents(&[1, 2, 3]);
        assert_eq!(a.remove_slot(1), Monomial::from_exponents(&[1, 3]));
        assert_eq!(a.permute(&[2, 0, 1]), Monomial::from_exponents(&[2, 3, 1]));
        assert_eq!(a.div(Monomial::var(1)), Some(Monomial::from_exponents(&[1, 1, 3])));
        assert_eq!(a.degree(), 6);
    }
}
