//! Exact evaluation of the closed-form codimension bounds, the hypertangent
//! schedule and the multiplicity ledger.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

fn choose(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    binomial(BigInt::from(n), BigInt::from(k))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Minimum over `j = 0..=k` of `(mu_{j+1} - j)(N - j) + 1`, where `mu_j` is the
/// smallest sum of `j` of the degrees and `k + 1` is the number of degrees.
pub fn prop41_bound(n: u64, degrees: &[u64]) -> Result<BigInt> {
    Ok(prop41_terms(n, degrees)?.into_iter().min().expect("at least one term"))
}

/// The individual terms `j = 0..=k` of [`prop41_bound`].
pub fn prop41_terms(n: u64, degrees: &[u64]) -> Result<Vec<BigInt>> {
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("at least one degree is required".into()));
    }
    let k = degrees.len() as u64 - 1;
    if k + 1 > n {
        return Err(Error::InvalidArgument(format!("k = {k} must be at most N - 1 = {}", n as i64 - 1)));
    }
    if degrees.iter().any(|&d| d < 2) {
        return Err(Error::InvalidArgument("all degrees must be at least 2".into()));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mut mu = BigInt::zero();
    let mut out = Vec::with_capacity(sorted.len());
    for (j, d) in sorted.iter().enumerate() {
        mu += *d;
        let j = j as i64;
        out.push((&mu - j) * (n as i64 - j) + 1);
    }
    Ok(out)
}

/// `C(2l + k - 1, k - 1)`.
pub fn lemma41_codim(l: u64, k: u64) -> Result<BigInt> {
    if l < 2 || k < 2 {
        return Err(Error::InvalidArgument("lemma bound needs l >= 2 and k >= 2".into()));
    }
    Ok(choose(2 * l + k - 1, k - 1))
}

/// `(k + 5)(k + 3) k (k - 2) / 24 + 1`.
pub fn alpha(k: u64) -> Result<BigInt> {
    if k < 2 {
        return Err(Error::InvalidArgument("alpha is defined for k >= 2".into()));
    }
    let k = big(k as i64);
    let prod: BigInt = (&k + 5) * (&k + 3) * &k * (&k - 2);
    debug_assert!(BigInt::is_zero(&(&prod % big(24))));
    Ok(prod / 24 + 1)
}

/// `2 alpha_k - alpha_{k-1}` for `k >= 3`.
pub fn alpha_pair(k: u64) -> Result<BigInt> {
    if k < 3 {
        return Err(Error::InvalidArgument("the pair bound needs k >= 3".into()));
    }
    Ok(alpha(k)? * 2 - alpha(k - 1)?)
}

/// `C(M + 2, 4) - M^2 + 3`.
pub fn quartic_reducibility_codim(big_m: u64) -> Result<BigInt> {
    if big_m < 6 {
        return Err(Error::InvalidArgument("the quartic count needs M >= 6".into()));
    }
    Ok(choose(big_m + 2, 4) - big(big_m as i64).pow(2) + 3)
}

fn check_strict(m: u64, l: u64) -> Result<u64> {
    if m < 3 || l < 2 {
        return Err(Error::InvalidInstance(format!("need m >= 3 and l >= 2, got m = {m}, l = {l}")));
    }
    Ok(m + l - 1)
}

/// Sorted union of `{1..m-1}` and `{l..2l-2}` with base-set codimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypertangentSchedule {
    pub m: u64,
    pub l: u64,
    /// `k(1) <= ... <= k(M-1)`.
    pub ks: Vec<u64>,
    /// `codim Bs Lambda_{k(i)}` for each position.
    pub codims: Vec<u64>,
}

impl HypertangentSchedule {
    pub fn big_m(&self) -> u64 {
        self.m + self.l - 1
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    /// `#([1,k] cap L) + #([1,k] cap M)`.
    pub fn codim_base_set(&self, k: u64) -> u64 {
        let from_m = k.min(self.m - 1);
        let from_l = if k < self.l { 0 } else { k.min(2 * self.l - 2) - self.l + 1 };
        from_m + from_l
    }
}

pub fn hypertangent_schedule(m: u64, l: u64) -> Result<HypertangentSchedule> {
    let big_m = check_strict(m, l)?;
    let mut ks: Vec<u64> = (1..m).chain(l..=2 * l - 2).collect();
    ks.sort_unstable();
    let mut sched = HypertangentSchedule { m, l, ks, codims: Vec::new() };
    sched.codims = sched.ks.iter().map(|&k| sched.codim_base_set(k)).collect();
    if sched.len() as u64 != big_m - 1 {
        return Err(Error::Invariant(format!("schedule has {} entries, expected {}", sched.len(), big_m - 1)));
    }
    for (i, &c) in sched.codims.iter().enumerate() {
        if c < i as u64 + 1 {
            return Err(Error::Invariant(format!("codim at position {} is {c}", i + 1)));
        }
    }
    Ok(sched)
}

/// The closed form quoted for a parameter regime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormComparison {
    pub regime: String,
    pub closed_form: String,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TelescopingProduct {
    pub m: u64,
    pub l: u64,
    pub value: String,
    pub m_over_3: String,
    pub at_least_m_over_3: bool,
    pub closed_form: ClosedFormComparison,
    #[serde(skip)]
    pub exact: BigRational,
}

/// Product of `(k(i) + 1) / k(i)` over schedule positions `5..=M-1`.
pub fn telescoping_product(m: u64, l: u64) -> Result<TelescopingProduct> {
    let big_m = check_strict(m, l)?;
    if big_m <= 5 {
        return Err(Error::InvalidArgument(format!("the product needs M > 5, got {big_m}")));
    }
    let sched = hypertangent_schedule(m, l)?;
    let exact = telescoping_by_runs(&sched.ks[4..]);
    let third = ratio(m as i64, 3);
    let (regime, form) = match l {
        2 => ("l = 2", third.clone()),
        3 => ("l = 3", ratio(3 * m as i64, 8)),
        _ => ("l >= 4", ratio((m * (2 * l - 1)) as i64, (5 * l) as i64)),
    };
    Ok(TelescopingProduct {
        m,
        l,
        value: exact.to_string(),
        m_over_3: third.to_string(),
        at_least_m_over_3: exact >= third,
        closed_form: ClosedFormComparison { regime: regime.into(), closed_form: form.to_string(), matches: exact == form },
        exact,
    })
}

/// Term-by-term product, used as an independent path.
pub fn telescoping_bruteforce(ks: &[u64]) -> BigRational {
    ks.iter().fold(BigRational::one(), |acc, &k| acc * ratio(k as i64 + 1, k as i64))
}

/// Product over maximal runs `a, a+1, .., b`, each contributing `(b + 1) / a`.
fn telescoping_by_runs(ks: &[u64]) -> BigRational {
    let mut acc = BigRational::one();
    let mut i = 0;
    while i < ks.len() {
        let start = ks[i];
        let mut end = start;
        while i + 1 < ks.len() && ks[i + 1] == end + 1 {
            i += 1;
            end += 1;
        }
        acc *= ratio(end as i64 + 1, start as i64);
        i += 1;
    }
    acc
}

/// Optional inputs for the sub-identities of the multiplicity ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerExtras {
    /// `mult_o D`.
    pub mult_o_d: BigRational,
    /// The excess multiplicity of the quadric in the tangent cone.
    pub excess: BigRational,
    /// `mult_B D^+`.
    pub mult_b_d_plus: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerStatus {
    Consistent,
    Contradictory,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubIdentity {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerAudit {
    pub m: u64,
    pub n: u64,
    pub a: String,
    pub b: String,
    pub deg_y_m: String,
    /// `(i, mult_o Y_i)` for `i = 2..=m`.
    pub mult_o_y: Vec<(u64, String)>,
    pub scaled_lhs: String,
    pub scaled_rhs: String,
    pub reduced_lhs: String,
    pub reduced_rhs: String,
    pub status: LedgerStatus,
    pub sub_identities: Vec<SubIdentity>,
}

impl LedgerAudit {
    pub fn is_consistent(&self) -> bool {
        self.status == LedgerStatus::Consistent
    }
}

fn nonneg(name: &str, v: &BigRational) -> Result<()> {
    if v.is_negative() {
        return Err(Error::InvalidArgument(format!("{name} must be non-negative")));
    }
    Ok(())
}

/// Degree and multiplicity chain for the cycle `Y_m`; `a` stands for
/// `mult_o D_T` and `b` for `mult_{B_T} D_T^+`.
pub fn ledger_audit(m: u64, n: u64, a: &BigRational, b: &BigRational, extras: Option<&LedgerExtras>) -> Result<LedgerAudit> {
    if m < 3 || n < 1 {
        return Err(Error::InvalidArgument("ledger needs m >= 3 and n >= 1".into()));
    }
    nonneg("a", a)?;
    nonneg("b", b)?;
    let mf = BigRational::from_integer(factorial(m));
    let deg_y_m = BigInt::from(2 * n) * factorial(m);
    let mult_o_y = (2..=m)
        .map(|i| (i, (BigRational::new(factorial(i), big(2)) * a).to_string()))
        .collect();
    let two = BigRational::from_integer(big(2));
    let scaled_lhs = &two * b * &mf + a * &mf;
    let scaled_rhs = BigRational::from_integer(big(4 * n as i64)) * &mf;
    let reduced_lhs = a + &two * b;
    let reduced_rhs = BigRational::from_integer(big(4 * n as i64));
    debug_assert_eq!(scaled_lhs <= scaled_rhs, reduced_lhs <= reduced_rhs);
    let status = if reduced_lhs <= reduced_rhs { LedgerStatus::Consistent } else { LedgerStatus::Contradictory };
    let mut sub_identities = Vec::new();
    if let Some(x) = extras {
        nonneg("mult_o D", &x.mult_o_d)?;
        nonneg("excess", &x.excess)?;
        nonneg("mult_B D+", &x.mult_b_d_plus)?;
        let c2 = &two * &x.mult_o_d + &two * &x.excess;
        sub_identities.push(SubIdentity { name: "c2".into(), lhs: a.to_string(), rhs: c2.to_string(), holds: *a == c2 });
        let c3 = b + &x.excess;
        sub_identities.push(SubIdentity {
            name: "c3".into(),
            lhs: c3.to_string(),
            rhs: x.mult_b_d_plus.to_string(),
            holds: c3 >= x.mult_b_d_plus,
        });
    }
    Ok(LedgerAudit {
        m,
        n,
        a: a.to_string(),
        b: b.to_string(),
        deg_y_m: deg_y_m.to_string(),
        mult_o_y,
        scaled_lhs: scaled_lhs.to_string(),
        scaled_rhs: scaled_rhs.to_string(),
        reduced_lhs: reduced_lhs.to_string(),
        reduced_rhs: reduced_rhs.to_string(),
        status,
        sub_identities,
    })
}

/// `nu + mult_B <= 2n`.
pub fn prop51_bound_check(n: &BigRational, nu: &BigRational, mult_b: &BigRational) -> bool {
    nu + mult_b <= BigRational::from_integer(big(2)) * n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusCell {
    pub name: String,
    pub value: String,
    pub relation: Relation,
    pub threshold: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CensusCell {
    fn int(name: &str, value: BigInt, relation: Relation, threshold: BigInt, note: Option<String>) -> Self {
        CensusCell {
            name: name.into(),
            pass: relation.holds(&value, &threshold),
            value: value.to_string(),
            relation,
            threshold: threshold.to_string(),
            note,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    #[serde(rename = "M")]
    pub big_m: u64,
    pub m: u64,
    pub l: u64,
    pub cells: Vec<CensusCell>,
    pub telescoping: TelescopingProduct,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CensusRow {
    pub fn cell(&self, name: &str) -> Option<&CensusCell> {
        self.cells.iter().find(|c| c.name == name)
    }

    pub fn pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

/// Census rows for every strict `(M, m, l)` with `M` in a range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusTable {
    pub m_min: u64,
    pub m_max: u64,
    pub rows: Vec<CensusRow>,
    pub all_pass: bool,
}

/// Degrees of `(lambda^2 - w2bar, q2bar, .., qmbar)`: `(2, 2, 3, .., m)`.
pub fn r21_degrees(m: u64) -> Vec<u64> {
    let mut d = vec![2];
    d.extend(2..=m);
    d
}

pub fn census_row(m: u64, l: u64) -> Result<CensusRow> {
    let big_m = check_strict(m, l)?;
    if big_m < 6 {
        return Err(Error::InvalidArgument("census rows need M >= 6".into()));
    }
    let two_m = big(2 * big_m as i64);
    let mut cells = Vec::new();
    if m == 3 {
        cells.push(CensusCell::int("e2_lemma41", choose(3 * big_m - 8, big_m - 4), Relation::Gt, two_m.clone(), None));
    } else {
        let c_m4 = choose(big_m, 4);
        cells.push(CensusCell::int("lemma41_general", lemma41_codim(l, big_m - 3)?, Relation::Ge, c_m4.clone(), None));
        cells.push(CensusCell::int("binom_M_4", c_m4, Relation::Gt, two_m.clone(), None));
        cells.push(CensusCell::int("quartic_count", quartic_reducibility_codim(big_m)?, Relation::Gt, two_m.clone(), None));
        let k_lo = big_m.div_ceil(2).max(3);
        let (k_min, v_min) = (k_lo..=big_m - 2)
            .map(|k| (k, alpha_pair(k).expect("k >= 3")))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty k range");
        cells.push(CensusCell::int(
            "alpha_pair_min",
            v_min,
            Relation::Ge,
            two_m.clone(),
            Some(format!("minimum over k in [{k_lo}, {}] attained at k = {k_min}", big_m - 2)),
        ));
        cells.push(CensusCell::int("alpha_M_minus_2", alpha(big_m - 2)?, Relation::Gt, two_m.clone(), None));
    }
    let mut notes = Vec::new();
    if m <= big_m - 2 {
        let terms = prop41_terms(big_m - 2, &r21_degrees(m))?;
        let (j_min, _) = terms.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).expect("terms");
        cells.push(CensusCell::int(
            "prop41_r21",
            terms[j_min].clone(),
            Relation::Gt,
            two_m.clone() - 1,
            Some(format!("minimum attained at j = {j_min}")),
        ));
    } else {
        notes.push(format!("prop41_r21 not evaluated: {m} forms in {} variables exceed k <= N - 1", big_m - 1));
    }
    let telescoping = telescoping_product(m, l)?;
    let note = if telescoping.closed_form.matches {
        None
    } else {
        Some(format!(
            "closed-form mismatch: exact {} vs closed form {} ({})",
            telescoping.value, telescoping.closed_form.closed_form, telescoping.closed_form.regime
        ))
    };
    cells.push(CensusCell {
        name: "telescoping".into(),
        value: telescoping.value.clone(),
        relation: Relation::Ge,
        threshold: telescoping.m_over_3.clone(),
        pass: telescoping.at_least_m_over_3,
        note,
    });
    Ok(CensusRow { big_m, m, l, cells, telescoping, notes })
}

impl CensusTable {
    pub fn build(m_min: u64, m_max: u64) -> Result<Self> {
        if m_min < 6 || m_min > m_max {
            return Err(Error::InvalidArgument(format!("invalid M range {m_min}..={m_max}")));
        }
        let params: Vec<(u64, u64)> =
            (m_min..=m_max).flat_map(|big_m| (3..big_m).map(move |m| (m, big_m + 1 - m))).collect();
        let rows: Vec<CensusRow> = params.par_iter().map(|&(m, l)| census_row(m, l)).collect::<Result<_>>()?;
        let all_pass = rows.iter().all(CensusRow::pass);
        Ok(CensusTable { m_min, m_max, rows, all_pass })
    }

    pub fn failing_cells(&self) -> Vec<(&CensusRow, &CensusCell)> {
        self.rows.iter().flat_map(|r| r.cells.iter().filter(|c| !c.pass).map(move |c| (r, c))).collect()
    }

    /// Aligned plain-text rendering, one line per cell.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<[String; 8]> = vec![[
            "M".into(),
            "m".into(),
            "l".into(),
            "bound".into(),
            "value".into(),
            "rel".into(),
            "threshold".into(),
            "ok".into(),
        ]];
        let mut notes = Vec::new();
        for r in &self.rows {
            for c in &r.cells {
                lines.push([
                    r.big_m.to_string(),
                    r.m.to_string(),
                    r.l.to_string(),
                    c.name.clone(),
                    c.value.clone(),
                    c.relation.symbol().into(),
                    c.threshold.clone(),
                    if c.pass { "pass".into() } else { "FAIL".into() },
                ]);
                notes.push(c.note.clone());
            }
        }
        let widths: Vec<usize> = (0..8).map(|i| lines.iter().map(|l| l[i].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for (idx, line) in lines.iter().enumerate() {
            let cols: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            let mut text = cols.join("  ").trim_end().to_string();
            if idx > 0 {
                if let Some(n) = &notes[idx - 1] {
                    let _ = write!(text, "  # {n}");
                }
            }
            out.push_str(&text);
            out.push('\n');
        }
        out
    }
}
