//! Exact integer polynomials and truncated power series.
//!
//! Everything here works over [`BigInt`]; there is no floating point. The
//! closed forms for finite Weyl groups (product of `t`-integers over the
//! degrees of the basic invariants) and for untwisted affine Weyl groups
//! (the finite polynomial times `prod 1/(1 - t^(d_i - 1))`) live here too.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown finite type {0}")]
    UnknownType(String),
    #[error("denominator constant term {0} is not a unit")]
    NonUnitConstant(BigInt),
    #[error("guard {guard} exceeds the {available} available coefficients")]
    GuardExceedsTruncation { guard: usize, available: usize },
    #[error("cannot parse coefficient list: {0}")]
    Parse(String),
}

/// Integer polynomial in `t`, coefficients stored lowest degree first.
///
/// Trailing zeros are never stored, so the zero polynomial has no
/// coefficients and no degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly {
    #[serde(with = "coeff_serde")]
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    /// `t^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPoly { coeffs }
    }

    /// `1 + t + ... + t^(d-1)`, i.e. `(t^d - 1)/(t - 1)`.
    pub fn t_integer(d: usize) -> Self {
        IntPoly::new(vec![BigInt::one(); d])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        (0..e).fold(IntPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    /// The polynomial viewed as a power series truncated at `t^truncation`.
    pub fn to_series(&self, truncation: usize) -> TruncSeries {
        TruncSeries::new((0..=truncation).map(|k| self.coeff(k)).collect())
    }

    /// Comma separated coefficients, lowest degree first. The zero
    /// polynomial renders as `0`.
    pub fn to_csv(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        join_csv(&self.coeffs)
    }
}

impl From<Vec<BigInt>> for IntPoly {
    fn from(coeffs: Vec<BigInt>) -> Self {
        IntPoly::new(coeffs)
    }
}

impl FromStr for IntPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_csv(s).map(IntPoly::new)
    }
}

/// Renders in the `1 - t - 2t^3 + t^4` style.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_terms(f, &self.coeffs, None)
    }
}

/// Power series `c_0 + c_1 t + ... + c_T t^T + O(t^(T+1))`.
///
/// Always holds exactly `T + 1` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncSeries {
    #[serde(with = "coeff_serde")]
    coeffs: Vec<BigInt>,
}

impl TruncSeries {
    /// Panics on an empty coefficient list; a series always knows `c_0`.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        TruncSeries { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one(truncation: usize) -> Self {
        IntPoly::one().to_series(truncation)
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&BigInt> {
        self.coeffs.get(k)
    }

    pub fn truncate(&self, truncation: usize) -> TruncSeries {
        let t = truncation.min(self.truncation());
        TruncSeries::new(self.coeffs[..=t].to_vec())
    }

    /// The known coefficients as a polynomial (the `O(t^(T+1))` tail dropped).
    pub fn to_poly(&self) -> IntPoly {
        IntPoly::new(self.coeffs.clone())
    }

    pub fn to_csv(&self) -> String {
        join_csv(&self.coeffs)
    }

    /// Index of the first negative coefficient, if any.
    pub fn first_negative(&self) -> Option<usize> {
        self.coeffs.iter().position(Signed::is_negative)
    }
}

impl FromStr for TruncSeries {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = parse_csv(s)?;
        if coeffs.is_empty() {
            return Err(PolyError::Parse("empty series".into()));
        }
        Ok(TruncSeries::new(coeffs))
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_terms(f, &self.coeffs, Some(self.coeffs.len()))
    }
}

/// Coefficient lists as JSON arrays: plain numbers while they fit in 64
/// bits, decimal strings beyond that.
pub mod coeff_serde {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Coeff {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(coeffs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => Coeff::Small(v),
                None => Coeff::Big(c.to_string()),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Coeff>::deserialize(d)?
            .into_iter()
            .map(|c| match c {
                Coeff::Small(v) => Ok(BigInt::from(v)),
                Coeff::Big(s) => s.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

fn join_csv(coeffs: &[BigInt]) -> String {
    coeffs
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_csv(s: &str) -> Result<Vec<BigInt>, PolyError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<BigInt>()
                .map_err(|_| PolyError::Parse(format!("bad coefficient {tok:?}")))
        })
        .collect()
}

fn render_terms(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[BigInt],
    order: Option<usize>,
) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if c.is_negative() { " - " } else { " + " })?;
        }
        first = false;
        let show_mag = k == 0 || !mag.is_one();
        if show_mag {
            write!(f, "{mag}")?;
        }
        match k {
            0 => {}
            1 => f.write_str("t")?,
            _ => write!(f, "t^{k}")?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    if let Some(n) = order {
        write!(f, " + O(t^{n})")?;
    }
    Ok(())
}

/// Cauchy product to the smaller of the two truncations.
pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
    let t = a.truncation().min(b.truncation());
    let mut out = vec![BigInt::zero(); t + 1];
    for (i, x) in a.coeffs[..=t].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs[..=t - i].iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    TruncSeries::new(out)
}

/// Exact quotient `num / den` to the shared truncation.
///
/// `den` must have constant term `±1` so the recurrence
/// `q_n = (num_n - sum_{s<n} q_s den_{n-s}) / den_0` stays integral.
pub fn series_div(num: &TruncSeries, den: &TruncSeries) -> Result<TruncSeries, PolyError> {
    let d0 = &den.coeffs[0];
    if !d0.abs().is_one() {
        return Err(PolyError::NonUnitConstant(d0.clone()));
    }
    let t = num.truncation().min(den.truncation());
    let mut q: Vec<BigInt> = Vec::with_capacity(t + 1);
    for n in 0..=t {
        let mut acc = num.coeffs[n].clone();
        for (s, qs) in q.iter().enumerate() {
            let d = &den.coeffs[n - s];
            if !d.is_zero() {
                acc -= qs * d;
            }
        }
        // d0 is +-1, so dividing is multiplying.
        q.push(acc * d0);
    }
    Ok(TruncSeries::new(q))
}

/// If the last `guard` coefficients of `s` vanish, the prefix is taken to
/// be a polynomial and returned; otherwise `None`.
pub fn polynomial_terminates(s: &TruncSeries, guard: usize) -> Result<Option<IntPoly>, PolyError> {
    let n = s.coeffs.len();
    if guard == 0 || guard > n {
        return Err(PolyError::GuardExceedsTruncation {
            guard,
            available: n,
        });
    }
    if s.coeffs[n - guard..].iter().all(Zero::is_zero) {
        Ok(Some(IntPoly::new(s.coeffs[..n - guard].to_vec())))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];

    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    fn admits(self, rank: usize) -> bool {
        match self {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 3,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        }
    }
}

/// A finite simple type `X_n` of the Cartan-Killing list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FiniteType {
    family: Family,
    rank: usize,
}

impl FiniteType {
    pub fn new(family: Family, rank: usize) -> Result<Self, PolyError> {
        if family.admits(rank) {
            Ok(FiniteType { family, rank })
        } else {
            Err(PolyError::UnknownType(format!(
                "{}{}",
                family.letter(),
                rank
            )))
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Degrees of the basic invariants.
    pub fn degrees(&self) -> Vec<usize> {
        let n = self.rank;
        match self.family {
            Family::A => (2..=n + 1).collect(),
            Family::B | Family::C => (1..=n).map(|k| 2 * k).collect(),
            Family::D => {
                let mut d: Vec<usize> = (1..n).map(|k| 2 * k).collect();
                d.push(n);
                d.sort_unstable();
                d
            }
            Family::E => match n {
                6 => vec![2, 5, 6, 8, 9, 12],
                7 => vec![2, 6, 8, 10, 12, 14, 18],
                _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
            },
            Family::F => vec![2, 6, 8, 12],
            Family::G => vec![2, 6],
        }
    }

    /// Number of positive roots, `sum (d_i - 1)`.
    pub fn positive_root_count(&self) -> usize {
        self.degrees().iter().map(|d| d - 1).sum()
    }

    /// `|W| = prod d_i`.
    pub fn weyl_order(&self) -> BigInt {
        self.degrees().iter().map(|&d| BigInt::from(d)).product()
    }

    /// Every finite simple type of rank at most `max_rank`, ordered by
    /// `(positive root count, family, rank)`.
    pub fn all_up_to_rank(max_rank: usize) -> Vec<FiniteType> {
        let mut out: Vec<FiniteType> = Family::ALL
            .iter()
            .flat_map(|&f| (1..=max_rank).filter_map(move |r| FiniteType::new(f, r).ok()))
            .collect();
        out.sort_by_key(|ft| (ft.positive_root_count(), ft.family, ft.rank));
        out
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for FiniteType {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || PolyError::UnknownType(s.to_string());
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(unknown()),
        };
        let digits = chars.as_str().trim_start_matches('_');
        let rank: usize = digits.parse().map_err(|_| unknown())?;
        FiniteType::new(family, rank)
    }
}

impl TryFrom<String> for FiniteType {
    type Error = PolyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FiniteType> for String {
    fn from(ft: FiniteType) -> Self {
        ft.to_string()
    }
}

/// Poincaré polynomial of the finite Weyl group: `prod (t^d - 1)/(t - 1)`.
pub fn finite_poincare(ft: &FiniteType) -> IntPoly {
    ft.degrees()
        .into_iter()
        .fold(IntPoly::one(), |acc, d| acc.mul(&IntPoly::t_integer(d)))
}

/// Growth series of the untwisted affine Weyl group over `ft`, truncated at
/// `t^truncation`.
pub fn affine_poincare(ft: &FiniteType, truncation: usize) -> TruncSeries {
    let mut acc = finite_poincare(ft).to_series(truncation);
    for d in ft.degrees() {
        // 1/(1 - t^(d-1)) is a running sum with stride d-1.
        let stride = d - 1;
        let c = &mut acc.coeffs;
        for k in stride..=truncation {
            let prev = c[k - stride].clone();
            c[k] += prev;
        }
    }
    acc
}
