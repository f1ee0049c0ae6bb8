//! Regular-sequence certificates by comparison with the complete-intersection series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GradedIdeal;
use crate::error::{Error, Result};
use crate::poly::FpPoly;

pub const DEFAULT_DCAP: u32 = 12;

const SECTION_SEED: u64 = 0x5ec7_10f0_2dc0_4e11;

/// Hilbert function values `(d, dim (R/I)_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertTable {
    pub by_degree: Vec<(u32, u64)>,
    pub max_degree: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceVerdict {
    Regular,
    NotRegular { degree: u32 },
    InconclusiveThrough { degree: u32 },
}

/// How the Hilbert data were obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRoute {
    /// Hilbert function of `R/I` itself.
    Direct,
    /// Hilbert function of `R/(I + (l_1..l_s))` for the listed linear forms; when
    /// the section is a complete intersection through the stabilization bound,
    /// the ambient table is its `s`-fold cumulative sum.
    GenericSection { forms: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertRow {
    pub degree: u32,
    pub actual: u64,
    pub expected: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceCertificate {
    pub verdict: SequenceVerdict,
    pub degrees: Vec<u32>,
    pub n_amb: usize,
    pub stabilization_bound: u32,
    pub cap: u32,
    pub route: CertificateRoute,
    /// `(d, actual, expected)` for the degrees actually computed.
    pub rows: Vec<HilbertRow>,
    /// Degrees where the actual dimension fell below the reference.
    pub anomalies: Vec<u32>,
}

impl SequenceCertificate {
    pub fn hilbert(&self) -> HilbertTable {
        HilbertTable {
            by_degree: self.rows.iter().map(|r| (r.degree, r.actual)).collect(),
            max_degree: self.rows.last().map_or(0, |r| r.degree),
        }
    }

    pub fn koszul_reference(&self) -> Vec<(u32, i128)> {
        self.rows.iter().map(|r| (r.degree, r.expected as i128)).collect()
    }

    pub fn is_regular(&self) -> bool {
        self.verdict == SequenceVerdict::Regular
    }

    pub fn has_anomaly(&self) -> bool {
        !self.anomalies.is_empty()
    }
}

/// Coefficient of `t^d` in `prod (1 - t^{d_i}) / (1 - t)^n`.
pub fn koszul_coefficient(degrees: &[u32], n_amb: usize, d: u32) -> i128 {
    let len = d as usize + 1;
    // (1 - t)^{-n}: binomial series C(k + n - 1, n - 1)
    let mut series: Vec<i128> = (0..len).map(|k| if n_amb == 0 { (k == 0) as i128 } else { binom(k + n_amb - 1, n_amb - 1) }).collect();
    for &di in degrees {
        let di = di as usize;
        for k in (di..len).rev() {
            series[k] -= series[k - di];
        }
    }
    series[d as usize]
}

fn binom(n: usize, k: usize) -> i128 {
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Reference values `0..=top`, clamped at zero once they turn non-positive when
/// the sequence is as long as the number of variables.
fn reference(degrees: &[u32], n_amb: usize, top: u32) -> Vec<i128> {
    let mut out = Vec::with_capacity(top as usize + 1);
    let mut clamped = false;
    for d in 0..=top {
        let mut k = koszul_coefficient(degrees, n_amb, d);
        if degrees.len() >= n_amb {
            if clamped || k <= 0 {
                clamped = true;
                k = 0;
            }
        }
        out.push(k);
    }
    out
}

/// Certificate for nonzero homogeneous inputs (degrees inferred).
pub fn regular_sequence_certificate(polys: &[FpPoly], d_cap: u32) -> Result<SequenceCertificate> {
    let mut seq = Vec::with_capacity(polys.len());
    for p in polys {
        let d = p.degree().ok_or_else(|| Error::InvalidArgument("zero polynomial needs a declared degree".into()))?;
        seq.push((p.clone(), d));
    }
    certify_sequence(&seq, d_cap)
}

/// Certificate for `(poly, declared degree)` pairs; zero polynomials are allowed
/// and count with their declared degree.
pub fn certify_sequence(seq: &[(FpPoly, u32)], d_cap: u32) -> Result<SequenceCertificate> {
    let Some((first, _)) = seq.first() else {
        return Err(Error::InvalidArgument("empty sequence".into()));
    };
    let field = *first.ring();
    let vars = first.vars().clone();
    let n = vars.len();
    for (p, d) in seq {
        if p.vars() != &vars {
            return Err(Error::VariableMismatch);
        }
        if *d == 0 {
            return Err(Error::InvalidArgument("sequence elements need positive degree".into()));
        }
        if !p.is_homogeneous_of(*d) {
            return Err(Error::NotHomogeneous(*d));
        }
    }
    let c = seq.len();
    if c > n {
        return Err(Error::InvalidArgument(format!("{c} elements cannot form a regular sequence in {n} variables")));
    }
    let degrees: Vec<u32> = seq.iter().map(|(_, d)| *d).collect();
    let bound = degrees.iter().map(|d| d - 1).sum::<u32>() + 1;
    let top = bound.min(d_cap);
    let ideal = GradedIdeal::from_nonzero(field, &vars, seq.iter().map(|(p, _)| p.clone()))?;
    let ambient_ref = reference(&degrees, n, top);

    let s = n - c;
    if s > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(SECTION_SEED);
        let forms: Vec<FpPoly> = (0..s)
            .map(|_| {
                let coeffs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..field.modulus())).collect();
                FpPoly::linear(&field, &vars, &coeffs)
            })
            .collect();
        let mut sec_degrees = degrees.clone();
        sec_degrees.extend(std::iter::repeat(1).take(s));
        let sec_ref = reference(&sec_degrees, n, top);
        let section = ideal.with_generators(forms.iter().cloned())?;
        let mut red = section.reduce();
        let mut sec_vals = Vec::new();
        let mut matched = true;
        for d in 0..=top {
            let h = red.engine.hilbert(d) as u64;
            sec_vals.push(h);
            if h as i128 != sec_ref[d as usize] {
                matched = false;
                break;
            }
        }
        if matched {
            let route = CertificateRoute::GenericSection { forms: forms.iter().map(|f| f.to_string()).collect() };
            if top == bound {
                let mut ambient = sec_vals.clone();
                for _ in 0..s {
                    let mut acc = 0u64;
                    for v in ambient.iter_mut() {
                        acc += *v;
                        *v = acc;
                    }
                }
                let rows = rows_from(&ambient, &ambient_ref);
                return Ok(SequenceCertificate {
                    verdict: SequenceVerdict::Regular,
                    degrees,
                    n_amb: n,
                    stabilization_bound: bound,
                    cap: d_cap,
                    route,
                    rows,
                    anomalies: Vec::new(),
                });
            }
            let rows = rows_from(&sec_vals, &sec_ref);
            return Ok(SequenceCertificate {
                verdict: SequenceVerdict::InconclusiveThrough { degree: top },
                degrees,
                n_amb: n,
                stabilization_bound: bound,
                cap: d_cap,
                route,
                rows,
                anomalies: Vec::new(),
            });
        }
    }

    // Direct computation on the ideal itself.
    let mut red = ideal.reduce();
    let mut rows = Vec::new();
    let mut anomalies = Vec::new();
    let mut verdict = if top == bound {
        SequenceVerdict::Regular
    } else {
        SequenceVerdict::InconclusiveThrough { degree: top }
    };
    for d in 0..=top {
        let h = red.engine.hilbert(d) as u64;
        let r = ambient_ref[d as usize];
        rows.push(HilbertRow { degree: d, actual: h, expected: r as i64 });
        if (h as i128) > r {
            verdict = SequenceVerdict::NotRegular { degree: d };
            break;
        }
        if (h as i128) < r {
            anomalies.push(d);
            verdict = SequenceVerdict::InconclusiveThrough { degree: d };
            break;
        }
    }
    Ok(SequenceCertificate {
        verdict,
        degrees,
        n_amb: n,
        stabilization_bound: bound,
        cap: d_cap,
        route: CertificateRoute::Direct,
        rows,
        anomalies,
    })
}

fn rows_from(actual: &[u64], expected: &[i128]) -> Vec<HilbertRow> {
    actual
        .iter()
        .zip(expected)
        .enumerate()
        .map(|(d, (&a, &e))| HilbertRow { degree: d as u32, actual: a, expected: e as i64 })
        .collect()
}
