//! Splitting growth series: `P(G) = P(g) R` through parabolic subgroups, and
//! denominator polynomials `Q` with `P(H) = P(G) / Q` for finite `G`.

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cartan::{CartanError, CartanMatrix};
use crate::polyseries::{
    finite_poincare, polynomial_terminates, series_div, series_mul, FiniteType, IntPoly, PolyError,
    TruncSeries,
};
use crate::weylgrowth::{enumerate, growth_series, GrowthError, GrowthOptions, GrowthSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("R has negative coefficient {value} at order {order}; the divisor is not a parabolic factor")]
    NegativeCoefficient { order: usize, value: BigInt },
    #[error("truncation {truncation} too shallow: need {needed} coefficients for D + guard")]
    TruncationTooShallow { truncation: usize, needed: usize },
    #[error("mismatch at order {order}: expected {expected}, found {actual}")]
    Mismatch {
        order: usize,
        expected: BigInt,
        actual: BigInt,
    },
    #[error("series must start with 1")]
    ConstantTerm,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
}

/// `numerator / denominator` with a unit constant term below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunction {
    numerator: IntPoly,
    denominator: IntPoly,
}

impl RationalFunction {
    pub fn new(numerator: IntPoly, denominator: IntPoly) -> Result<Self, FactorError> {
        let d0 = denominator.coeff(0);
        if d0.abs() != BigInt::from(1) {
            return Err(PolyError::NonUnitConstant(d0).into());
        }
        Ok(RationalFunction {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.denominator
    }

    pub fn expand(&self, truncation: usize) -> TruncSeries {
        series_div(
            &self.numerator.to_series(truncation),
            &self.denominator.to_series(truncation),
        )
        .expect("unit constant term checked on construction")
    }
}

/// `R = h / sub`, rejecting a negative coefficient: a genuine parabolic
/// factor leaves coset counts, which are never negative.
pub fn compute_r(h: &TruncSeries, sub: &TruncSeries) -> Result<TruncSeries, FactorError> {
    let (r, negative) = compute_r_exploratory(h, sub)?;
    match negative {
        Some(order) => Err(FactorError::NegativeCoefficient {
            order,
            value: r.coeffs()[order].clone(),
        }),
        None => Ok(r),
    }
}

/// Like [`compute_r`] but reports the first negative coefficient instead of
/// failing.
pub fn compute_r_exploratory(
    h: &TruncSeries,
    sub: &TruncSeries,
) -> Result<(TruncSeries, Option<usize>), FactorError> {
    let r = series_div(h, sub)?;
    let neg = r.first_negative();
    Ok((r, neg))
}

/// Everything computed while checking `P(W) = P(W_J) R` on a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationReport {
    pub parabolic: Vec<usize>,
    pub order: usize,
    pub growth: GrowthSeries,
    pub cosets: GrowthSeries,
    pub subgroup: GrowthSeries,
    pub r_series: TruncSeries,
}

/// Enumerates `W`, the coset representatives of `W_J \ W` and `W_J` itself,
/// then checks `w_M = sum_s u_s v_(M-s)` at every order up to `order` and
/// that dividing out `P(W_J)` gives back the coset counts.
///
/// `W_J` may be infinite; its series is then enumerated to the same order.
pub fn verify_factorization(
    m: &CartanMatrix,
    parabolic: &[usize],
    order: usize,
    options: &GrowthOptions,
) -> Result<FactorizationReport, FactorError> {
    let e = enumerate(m, order, &[parabolic.to_vec()], options, &mut |_| {})?;
    let subgroup = if parabolic.is_empty() {
        GrowthSeries::new(vec![1], true)
    } else {
        growth_series(&m.submatrix(parabolic)?, order, options)?
    };
    let growth = e.growth;
    let cosets = e
        .cosets
        .into_iter()
        .next()
        .expect("one parabolic requested");

    let full = growth.to_series(order);
    let u = subgroup.to_series(order);
    let v = cosets.to_series(order);
    let conv = series_mul(&u, &v);
    first_difference(&full, &conv)?;

    let r = compute_r(&full, &u)?;
    first_difference(&v, &r)?;

    Ok(FactorizationReport {
        parabolic: parabolic.to_vec(),
        order: full.truncation(),
        growth,
        cosets,
        subgroup,
        r_series: r,
    })
}

fn first_difference(expected: &TruncSeries, actual: &TruncSeries) -> Result<(), FactorError> {
    let t = expected.truncation().min(actual.truncation());
    for k in 0..=t {
        if expected.coeffs()[k] != actual.coeffs()[k] {
            return Err(FactorError::Mismatch {
                order: k,
                expected: expected.coeffs()[k].clone(),
                actual: actual.coeffs()[k].clone(),
            });
        }
    }
    Ok(())
}

/// A finite type `G` and polynomial `Q` with `P(H) Q = P(G)` to
/// `verified_to`, the last `guard` coefficients of the quotient being zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenominatorFit {
    pub finite_type: FiniteType,
    pub q: IntPoly,
    pub observed_degree: usize,
    pub positive_roots: usize,
    pub verified_to: usize,
    pub guard: usize,
}

impl DenominatorFit {
    /// Degree is `D` or `D - 1`.
    pub fn degree_is_d_or_d_minus_one(&self) -> bool {
        self.observed_degree == self.positive_roots
            || self.observed_degree + 1 == self.positive_roots
    }
}

/// Tries `Q = P(G) / h`. Needs `D + guard` known coefficients of `h`.
pub fn fit_denominator(
    h: &TruncSeries,
    g: &FiniteType,
    guard: usize,
) -> Result<Option<DenominatorFit>, FactorError> {
    if h.coeffs()[0] != BigInt::from(1) {
        return Err(FactorError::ConstantTerm);
    }
    let d = g.positive_root_count();
    let t = h.truncation();
    if t + 1 < d + guard {
        return Err(FactorError::TruncationTooShallow {
            truncation: t,
            needed: d + guard,
        });
    }
    let pg = finite_poincare(g).to_series(t);
    let q_series = series_div(&pg, h)?;
    let Some(q) = polynomial_terminates(&q_series, guard)? else {
        return Ok(None);
    };
    debug_assert_eq!(series_mul(&q.to_series(t), h), pg);
    Ok(Some(DenominatorFit {
        finite_type: *g,
        observed_degree: q.degree().unwrap_or(0),
        q,
        positive_roots: d,
        verified_to: t,
        guard,
    }))
}

/// Every finite simple `G` of rank at most `max_rank` whose `P(G) / h`
/// terminates, ordered by `(D, family, rank)`.
pub fn search_denominator(
    h: &TruncSeries,
    max_rank: usize,
    guard: usize,
) -> Result<Vec<DenominatorFit>, FactorError> {
    if h.coeffs()[0] != BigInt::from(1) {
        return Err(FactorError::ConstantTerm);
    }
    let t = h.truncation();
    let candidates: Vec<FiniteType> = FiniteType::all_up_to_rank(max_rank)
        .into_iter()
        .filter(|g| g.positive_root_count() + guard <= t + 1)
        .collect();
    let fits = candidates
        .par_iter()
        .map(|g| fit_denominator(h, g, guard))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(fits.into_iter().flatten().collect())
}

/// Result of comparing a rational function's expansion against a series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCheck {
    pub matches: bool,
    pub first_mismatch: Option<usize>,
    pub checked_to: usize,
}

pub fn rational_check(rf: &RationalFunction, target: &TruncSeries) -> RationalCheck {
    let t = target.truncation();
    let expansion = rf.expand(t);
    let first_mismatch = (0..=t).find(|&k| expansion.coeffs()[k] != target.coeffs()[k]);
    RationalCheck {
        matches: first_mismatch.is_none(),
        first_mismatch,
        checked_to: t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{finite_cartan, h48_cartan};
    use crate::polyseries::affine_poincare;

    fn ft(s: &str) -> FiniteType {
        s.parse().unwrap()
    }

    #[test]
    fn r_of_itself_is_one() {
        let p = finite_poincare(&ft("A4")).to_series(12);
        assert_eq!(compute_r(&p, &p).unwrap(), TruncSeries::one(12));
    }

    #[test]
    fn negative_coefficient_is_reported() {
        let h = TruncSeries::from_i64s(&[1, 1, 0, 0]);
        let sub = TruncSeries::from_i64s(&[1, 2, 0, 0]);
        assert!(matches!(
            compute_r(&h, &sub),
            Err(FactorError::NegativeCoefficient { order: 1, .. })
        ));
        let (r, neg) = compute_r_exploratory(&h, &sub).unwrap();
        assert_eq!(neg, Some(1));
        assert_eq!(r.coeffs()[1], BigInt::from(-1));
    }

    #[test]
    fn empty_parabolic_passes() {
        let rep = verify_factorization(
            &finite_cartan(&ft("B3")),
            &[],
            12,
            &GrowthOptions::sequential(),
        )
        .unwrap();
        assert_eq!(rep.r_series, rep.growth.to_series(12));
    }

    #[test]
    fn finite_group_over_finite_parabolic() {
        // B4 over its A3: R = P(B4)/P(A3) exactly
        let m = finite_cartan(&ft("B4"));
        let rep = verify_factorization(&m, &[0, 1, 2], 20, &GrowthOptions::sequential()).unwrap();
        assert_eq!(rep.cosets.total(), 384 / 24);
    }

    #[test]
    fn h48_a4_parabolic() {
        let rep = verify_factorization(
            &h48_cartan(),
            &[0, 1, 2, 3],
            6,
            &GrowthOptions::sequential(),
        )
        .unwrap();
        assert_eq!(rep.cosets.coeffs(), &[1, 2, 3, 7, 12, 19, 32]);
    }

    #[test]
    fn self_fit() {
        let h = finite_poincare(&ft("A2")).to_series(6);
        let fit = fit_denominator(&h, &ft("A2"), 1).unwrap().unwrap();
        assert_eq!(fit.q, IntPoly::one());
        assert_eq!(fit.observed_degree, 0);
    }

    #[test]
    fn shallow_truncation() {
        let h = TruncSeries::from_i64s(&[1, 6, 20]);
        assert!(matches!(
            fit_denominator(&h, &ft("B5"), 1),
            Err(FactorError::TruncationTooShallow {
                truncation: 2,
                needed: 26
            })
        ));
        let bad = TruncSeries::from_i64s(&[2, 6, 20]);
        assert_eq!(
            fit_denominator(&bad, &ft("A1"), 1),
            Err(FactorError::ConstantTerm)
        );
    }

    #[test]
    fn g2_self_fit_in_search() {
        let h = finite_poincare(&ft("G2")).to_series(12);
        let fits = search_denominator(&h, 8, 1).unwrap();
        assert!(fits
            .iter()
            .any(|f| f.finite_type == ft("G2") && f.q == IntPoly::one()));
    }

    #[test]
    fn rational_function_needs_unit() {
        assert!(RationalFunction::new(IntPoly::one(), IntPoly::from_i64s(&[2, 1])).is_err());
        let one = RationalFunction::new(IntPoly::one(), IntPoly::one()).unwrap();
        let chk = rational_check(&one, &TruncSeries::one(9));
        assert!(chk.matches);
        assert_eq!(chk.checked_to, 9);
        let off = rational_check(&one, &TruncSeries::from_i64s(&[1, 0, 3]));
        assert_eq!(off.first_mismatch, Some(2));
    }

    #[test]
    fn affine_over_affine_is_one() {
        let m = crate::cartan::affine_cartan(&ft("A2"));
        let h = growth_series(&m, 15, &GrowthOptions::sequential())
            .unwrap()
            .as_series();
        let r = compute_r(&h, &affine_poincare(&ft("A2"), 15)).unwrap();
        assert_eq!(r, TruncSeries::one(15));
    }
}
