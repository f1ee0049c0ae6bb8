//! Human-readable polynomial text format, e.g. `3*z1^2*z2 - 1/2*z3 + 7`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::Ring;
use crate::monomial::{Monomial, MAX_DEGREE};
use crate::poly::{SparsePoly, VarList};

impl<R: Ring> fmt::Display for SparsePoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let ring = self.ring();
        for (k, (m, c)) in self.terms().rev().enumerate() {
            let negative = ring.is_negative(c);
            let abs = if negative { ring.neg(c) } else { c.clone() };
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono = format_monomial(*m, self.vars());
            if mono.is_empty() {
                f.write_str(&ring.format(&abs))?;
            } else if ring.is_one(&abs) {
                f.write_str(&mono)?;
            } else {
                write!(f, "{}*{}", ring.format(&abs), mono)?;
            }
        }
        Ok(())
    }
}

fn format_monomial(m: Monomial, vars: &VarList) -> String {
    let mut parts = Vec::new();
    for i in 0..vars.len() {
        match m.exp(i) {
            0 => {}
            1 => parts.push(vars.name(i).to_string()),
            e => parts.push(format!("{}^{}", vars.name(i), e)),
        }
    }
    parts.join("*")
}

/// Parses the text format into a polynomial over `ring` in `vars`.
pub fn parse_poly<R: Ring>(ring: &R, vars: &Arc<VarList>, text: &str) -> Result<SparsePoly<R>> {
    Parser { src: text.as_bytes(), pos: 0 }.poly(ring, vars)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(s.parse().expect("decimal digits"))
    }

    fn poly<R: Ring>(&mut self, ring: &R, vars: &Arc<VarList>) -> Result<SparsePoly<R>> {
        let mut out = SparsePoly::zero(ring, vars);
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'+') if !first => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                None if first => return self.err("empty polynomial"),
                _ if first => false,
                None => break,
                Some(_) => return self.err("expected `+` or `-`"),
            };
            first = false;
            let (m, c) = self.term(vars)?;
            let c = if negative { -c } else { c };
            out.add_term(m, ring.from_rational(&c)?);
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self, vars: &VarList) -> Result<(Monomial, BigRational)> {
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; vars.len()];
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let num = self.digits()?;
                    let den = if self.peek() == Some(b'/') {
                        self.pos += 1;
                        self.skip_ws();
                        let d = self.digits()?;
                        if d == BigInt::from(0) {
                            return self.err("zero denominator");
                        }
                        d
                    } else {
                        BigInt::one()
                    };
                    coeff *= BigRational::new(num, den);
                }
                Some(b) if b.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                    let idx = vars.index(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        let d = self.digits()?;
                        e = match u32::try_from(d) {
                            Ok(v) if v <= MAX_DEGREE => v,
                            _ => return self.err("exponent too large"),
                        };
                    }
                    exps[idx] += e;
                }
                _ => return self.err("expected a coefficient or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let total: u32 = exps.iter().sum();
        if total > MAX_DEGREE {
            return Err(Error::DegreeOverflow(total, MAX_DEGREE));
        }
        Ok((Monomial::from_exponents(&exps), coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn round_trip_fp() {
        let f = PrimeField::new(32003).unwrap();
        let v = VarList::z_with_y(3);
        let p = parse_poly(&f, &v, "3*z1^2*z2 - z3 + 2*y + 5 + z1*z1").unwrap();
        let s = p.to_string();
        assert_eq!(s, "3*z1^2*z2 + z1^2 + 32002*z3 + 2*y + 5");
        assert_eq!(parse_poly(&f, &v, &s).unwrap(), p);
        assert_eq!(parse_poly(&f, &v, "1/2*z1").unwrap().to_string(), "16002*z1");
    }

    #[test]
    fn round_trip_q() {
        let v = VarList::z(2);
        let p = parse_poly(&Rationals, &v, "-1/8*z1^2 + 1/2*z1 + 1").unwrap();
        let s = p.to_string();
        assert_eq!(s, "-1/8*z1^2 + 1/2*z1 + 1");
        assert_eq!(parse_poly(&Rationals, &v, &s).unwrap().to_string(), s);
        assert_eq!(parse_poly(&Rationals, &v, "0").unwrap().to_string(), "0");
    }

    #[test]
    fn rejects_garbage() {
        let v = VarList::z(2);
        assert!(matches!(parse_poly(&Rationals, &v, "z3"), Err(Error::UnknownVariable(_))));
        assert!(parse_poly(&Rationals, &v, "").is_err());
        assert!(parse_poly(&Rationals, &v, "z1 +").is_err());
        assert!(parse_poly(&Rationals, &v, "z1 z2").is_err());
        assert!(parse_poly(&Rationals, &v, "1/0").is_err());
        let f = PrimeField::new(7).unwrap();
        assert_eq!(parse_poly(&f, &v, "1/7*z1"), Err(Error::DivisionByZero));
    }
}
