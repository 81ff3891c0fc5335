//! Generalized Cartan matrices, their classification, and the weight lattice.
//!
//! Conventions: `A[i][j] = <alpha_j, alpha_i^vee>`, so the fundamental-weight
//! coordinates of the simple root `alpha_j` form column `j` of `A`. Weights are
//! stored in the fundamental-weight basis; coordinate `i` is the pairing with
//! the `i`-th simple coroot, and the Weyl vector is `(1, ..., 1)`.
//!
//! Node indices are 0-based throughout the library.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::polyseries::{Family, FiniteType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("not a generalized Cartan matrix: {0}")]
    NotGcm(String),
    #[error("matrix is not symmetrizable")]
    NotSymmetrizable,
    #[error("Dynkin diagram is disconnected; classify each component separately")]
    Disconnected,
    #[error("Cartan matrix is singular")]
    Singular,
    #[error("node {node} out of range for rank {rank}")]
    NodeOutOfRange { node: usize, rank: usize },
    #[error("unknown algebra name {0:?}")]
    UnknownAlgebra(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CartanClass {
    Finite,
    Affine,
    Indefinite,
}

impl fmt::Display for CartanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CartanClass::Finite => "Finite",
            CartanClass::Affine => "Affine",
            CartanClass::Indefinite => "Indefinite",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Classification {
    pub class: CartanClass,
    pub hyperbolic: bool,
}

/// A validated, symmetrizable generalized Cartan matrix.
///
/// Disconnected matrices are accepted (parabolic subdiagrams are often
/// disconnected) but carry no classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanMatrix {
    entries: Vec<Vec<i64>>,
    classification: Option<Classification>,
    labels: Option<Vec<String>>,
}

impl CartanMatrix {
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Fundamental-weight coordinates of the simple root `alpha_j`.
    pub fn root_coords(&self, j: usize) -> Vec<i64> {
        self.entries.iter().map(|row| row[j]).collect()
    }

    /// `None` when the diagram is disconnected.
    pub fn classification(&self) -> Option<Classification> {
        self.classification
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, CartanError> {
        if labels.len() != self.rank() {
            return Err(CartanError::NotGcm(format!(
                "{} labels for rank {}",
                labels.len(),
                self.rank()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn determinant(&self) -> BigInt {
        let idx: Vec<usize> = (0..self.rank()).collect();
        minor(&self.entries, &idx)
    }

    pub fn is_connected(&self) -> bool {
        components(&self.entries, &(0..self.rank()).collect::<Vec<_>>()).len() <= 1
    }

    /// Connected components of the Dynkin diagram, each sorted ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components(&self.entries, &(0..self.rank()).collect::<Vec<_>>())
    }

    /// True when every connected component is of finite type, i.e. the Weyl
    /// group is finite. The empty matrix counts as finite.
    pub fn is_finite_type(&self) -> bool {
        let all: Vec<usize> = (0..self.rank()).collect();
        components(&self.entries, &all)
            .iter()
            .all(|c| class_of_connected(&self.entries, c) == CartanClass::Finite)
    }

    /// Principal submatrix on `nodes`, in the given order.
    pub fn submatrix(&self, nodes: &[usize]) -> Result<CartanMatrix, CartanError> {
        for &n in nodes {
            if n >= self.rank() {
                return Err(CartanError::NodeOutOfRange {
                    node: n,
                    rank: self.rank(),
                });
            }
        }
        let raw = nodes
            .iter()
            .map(|&i| nodes.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        let mut sub = validate_gcm(raw)?;
        if let Some(labels) = &self.labels {
            sub.labels = Some(nodes.iter().map(|&i| labels[i].clone()).collect());
        }
        Ok(sub)
    }
}

impl fmt::Display for CartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Checks the GCM axioms and symmetrizability, then classifies connected
/// input.
pub fn validate_gcm(raw: Vec<Vec<i64>>) -> Result<CartanMatrix, CartanError> {
    let n = raw.len();
    if n == 0 {
        return Err(CartanError::NotGcm("empty matrix".into()));
    }
    for (i, row) in raw.iter().enumerate() {
        if row.len() != n {
            return Err(CartanError::NotGcm(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        if row[i] != 2 {
            return Err(CartanError::NotGcm(format!(
                "diagonal entry ({0},{0}) is {1}",
                i + 1,
                row[i]
            )));
        }
        for (j, &a) in row.iter().enumerate() {
            if i == j {
                continue;
            }
            if a > 0 {
                return Err(CartanError::NotGcm(format!(
                    "off-diagonal entry ({},{}) is positive",
                    i + 1,
                    j + 1
                )));
            }
            if (a == 0) != (raw[j][i] == 0) {
                return Err(CartanError::NotGcm(format!(
                    "entries ({0},{1}) and ({1},{0}) break the zero pattern",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    if !is_symmetrizable(&raw) {
        return Err(CartanError::NotSymmetrizable);
    }
    let mut m = CartanMatrix {
        entries: raw,
        classification: None,
        labels: None,
    };
    m.classification = classify(&m).ok();
    Ok(m)
}

/// Finite / affine / indefinite type plus the hyperbolic flag.
///
/// Finite: positive definite symmetrization, tested through the leading
/// principal minors. Affine: singular with every one-node deletion finite.
/// Hyperbolic: indefinite with every one-node deletion made of finite and
/// affine components.
pub fn classify(m: &CartanMatrix) -> Result<Classification, CartanError> {
    let all: Vec<usize> = (0..m.rank()).collect();
    if components(&m.entries, &all).len() > 1 {
        return Err(CartanError::Disconnected);
    }
    let class = class_of_connected(&m.entries, &all);
    let hyperbolic = class == CartanClass::Indefinite
        && all.iter().all(|&drop| {
            let rest: Vec<usize> = all.iter().copied().filter(|&k| k != drop).collect();
            components(&m.entries, &rest)
                .iter()
                .all(|c| class_of_connected(&m.entries, c) != CartanClass::Indefinite)
        });
    Ok(Classification { class, hyperbolic })
}

fn class_of_connected(a: &[Vec<i64>], nodes: &[usize]) -> CartanClass {
    if nodes.is_empty() {
        return CartanClass::Finite;
    }
    // Sylvester on the symmetrization; leading minors of A and of DA differ by
    // positive factors.
    if (1..=nodes.len()).all(|k| minor(a, &nodes[..k]).is_positive()) {
        return CartanClass::Finite;
    }
    if minor(a, nodes).is_zero() {
        let proper_finite = nodes.iter().all(|&drop| {
            let rest: Vec<usize> = nodes.iter().copied().filter(|&k| k != drop).collect();
            components(a, &rest)
                .iter()
                .all(|c| class_of_connected(a, c) == CartanClass::Finite)
        });
        if proper_finite {
            return CartanClass::Affine;
        }
    }
    CartanClass::Indefinite
}

/// Exact determinant of the principal submatrix on `nodes` (fraction-free
/// Gaussian elimination).
pub(crate) fn minor(a: &[Vec<i64>], nodes: &[usize]) -> BigInt {
    let n = nodes.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = nodes
        .iter()
        .map(|&i| nodes.iter().map(|&j| BigInt::from(a[i][j])).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn components(a: &[Vec<i64>], nodes: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; a.len()];
    let mut out = Vec::new();
    for &start in nodes {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in nodes {
                if !seen[v] && a[u][v] != 0 {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Looks for positive `d` with `d_i a_ij = d_j a_ji`.
fn is_symmetrizable(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(BigRational::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let di = d[i].clone().expect("visited");
            for j in 0..n {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                let dj = di.clone() * BigRational::new(a[i][j].into(), a[j][i].into());
                match &d[j] {
                    Some(existing) if *existing != dj => return false,
                    Some(_) => {}
                    None => {
                        d[j] = Some(dj);
                        stack.push(j);
                    }
                }
            }
        }
    }
    true
}

/// Integral weight in the fundamental-weight basis.
///
/// Starts out with 64-bit coordinates and moves to arbitrary precision the
/// first time an operation would overflow.
#[derive(Clone, Debug)]
pub struct Weight(Coords);

#[derive(Clone, Debug)]
enum Coords {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

impl Weight {
    /// The Weyl vector `rho = (1, ..., 1)`.
    pub fn rho(rank: usize) -> Self {
        Weight(Coords::Small(vec![1; rank]))
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        Weight(Coords::Small(coords.to_vec()))
    }

    pub fn from_bigints(coords: Vec<BigInt>) -> Self {
        Weight(Coords::Big(coords))
    }

    pub fn rank(&self) -> usize {
        match &self.0 {
            Coords::Small(v) => v.len(),
            Coords::Big(v) => v.len(),
        }
    }

    pub fn is_big(&self) -> bool {
        matches!(self.0, Coords::Big(_))
    }

    /// 64-bit coordinates, if every coordinate fits.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        match &self.0 {
            Coords::Small(v) => Some(v.clone()),
            Coords::Big(v) => v.iter().map(ToPrimitive::to_i64).collect(),
        }
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        match &self.0 {
            Coords::Small(v) => v.iter().map(|&c| BigInt::from(c)).collect(),
            Coords::Big(v) => v.clone(),
        }
    }

    /// Sign of coordinate `i` compared to zero.
    pub fn sign(&self, i: usize) -> Ordering {
        match &self.0 {
            Coords::Small(v) => v[i].cmp(&0),
            Coords::Big(v) => v[i].sign_cmp(),
        }
    }

    /// Applies `sigma_{i_1} ... sigma_{i_k}`, rightmost reflection first.
    pub fn apply_word(&self, word: &[usize], m: &CartanMatrix) -> Result<Weight, CartanError> {
        word.iter()
            .rev()
            .try_fold(self.clone(), |w, &i| reflect(&w, i, m))
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Coords::Small(a), Coords::Small(b)) => a == b,
            _ => self.to_bigints() == other.to_bigints(),
        }
    }
}

impl Eq for Weight {}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.to_bigints().iter().map(ToString::to_string).collect();
        write!(f, "({})", cells.join(", "))
    }
}

/// `sigma_i(w) = w - <w, alpha_i^vee> alpha_i`.
pub fn reflect(w: &Weight, i: usize, m: &CartanMatrix) -> Result<Weight, CartanError> {
    let n = m.rank();
    if i >= n {
        return Err(CartanError::NodeOutOfRange { node: i, rank: n });
    }
    if w.rank() != n {
        return Err(CartanError::NotGcm(format!(
            "weight of rank {} for matrix of rank {n}",
            w.rank()
        )));
    }
    if let Coords::Small(v) = &w.0 {
        let c = v[i];
        let small: Option<Vec<i64>> = v
            .iter()
            .zip(m.entries.iter())
            .map(|(&x, row)| c.checked_mul(row[i]).and_then(|p| x.checked_sub(p)))
            .collect();
        if let Some(out) = small {
            return Ok(Weight(Coords::Small(out)));
        }
    }
    let v = w.to_bigints();
    let c = v[i].clone();
    let out = v
        .iter()
        .zip(m.entries.iter())
        .map(|(x, row)| x - &c * row[i])
        .collect();
    Ok(Weight(Coords::Big(out)))
}

/// Exact rational square matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    entries: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn mul_integer_left(&self, a: &CartanMatrix) -> RationalMatrix {
        let n = a.rank();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(BigRational::zero(), |acc, k| {
                            acc + BigRational::from_integer(a.entry(i, k).into())
                                * &self.entries[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        RationalMatrix { entries }
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
        })
    }
}

/// `A^{-1}` over the rationals, by Gauss-Jordan elimination.
pub fn inverse_cartan(m: &CartanMatrix) -> Result<RationalMatrix, CartanError> {
    let n = m.rank();
    let mut left: Vec<Vec<BigRational>> = m
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect()
        })
        .collect();
    let mut right: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !left[r][col].is_zero())
            .ok_or(CartanError::Singular)?;
        left.swap(col, pivot);
        right.swap(col, pivot);
        let inv = left[col][col].recip();
        for v in left[col].iter_mut().chain(right[col].iter_mut()) {
            *v *= &inv;
        }
        for r in 0..n {
            if r == col || left[r][col].is_zero() {
                continue;
            }
            let factor = left[r][col].clone();
            for c in 0..n {
                let dl = &factor * &left[col][c];
                left[r][c] -= dl;
                let dr = &factor * &right[col][c];
                right[r][c] -= dr;
            }
        }
    }
    Ok(RationalMatrix { entries: right })
}

/// Highest root of `ft` in simple-root coordinates (Bourbaki numbering).
fn highest_root(ft: &FiniteType) -> Vec<i64> {
    let n = ft.rank();
    match ft.family() {
        Family::A => vec![1; n],
        Family::B => (0..n).map(|k| if k == 0 { 1 } else { 2 }).collect(),
        Family::C => (0..n).map(|k| if k == n - 1 { 1 } else { 2 }).collect(),
        Family::D => (0..n)
            .map(|k| if k == 0 || k >= n - 2 { 1 } else { 2 })
            .collect(),
        Family::E => match n {
            6 => vec![1, 2, 2, 3, 2, 1],
            7 => vec![2, 2, 3, 4, 3, 2, 1],
            _ => vec![2, 3, 4, 6, 5, 4, 3, 2],
        },
        Family::F => vec![2, 3, 4, 2],
        Family::G => vec![3, 2],
    }
}

/// Squared-length ratio of the long roots to simple root `k` (1 for long
/// roots).
fn short_ratio(ft: &FiniteType, k: usize) -> i64 {
    let n = ft.rank();
    match ft.family() {
        Family::B if k == n - 1 => 2,
        Family::C if k < n - 1 => 2,
        Family::F if k >= 2 => 2,
        Family::G if k == 0 => 3,
        _ => 1,
    }
}

/// Cartan matrix of a finite simple type, Bourbaki numbering.
pub fn finite_cartan(ft: &FiniteType) -> CartanMatrix {
    let n = ft.rank();
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut bond = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match ft.family() {
        Family::A => (0..n - 1).for_each(|k| bond(k, k + 1, -1, -1)),
        Family::B => {
            (0..n - 2).for_each(|k| bond(k, k + 1, -1, -1));
            bond(n - 2, n - 1, -1, -2);
        }
        Family::C => {
            (0..n - 2).for_each(|k| bond(k, k + 1, -1, -1));
            bond(n - 2, n - 1, -2, -1);
        }
        Family::D => {
            (0..n - 2).for_each(|k| bond(k, k + 1, -1, -1));
            bond(n - 3, n - 1, -1, -1);
        }
        Family::E => {
            bond(0, 2, -1, -1);
            bond(1, 3, -1, -1);
            (2..n - 1).for_each(|k| bond(k, k + 1, -1, -1));
        }
        Family::F => {
            bond(0, 1, -1, -1);
            bond(1, 2, -1, -2);
            bond(2, 3, -1, -1);
        }
        Family::G => bond(0, 1, -3, -1),
    }
    validate_gcm(a).expect("built-in finite Cartan matrix is valid")
}

/// Untwisted affine Cartan matrix over `ft`; the affine node is node 0 and
/// node `k + 1` is the finite node `k`.
pub fn affine_cartan(ft: &FiniteType) -> CartanMatrix {
    let fin = finite_cartan(ft);
    let n = ft.rank();
    let theta = highest_root(ft);
    let theta_vee: Vec<i64> = (0..n).map(|k| theta[k] / short_ratio(ft, k)).collect();
    let mut a = vec![vec![0i64; n + 1]; n + 1];
    a[0][0] = 2;
    for j in 0..n {
        a[j + 1][0] = -(0..n).map(|k| theta[k] * fin.entry(j, k)).sum::<i64>();
        a[0][j + 1] = -(0..n).map(|k| theta_vee[k] * fin.entry(k, j)).sum::<i64>();
        for k in 0..n {
            a[j + 1][k + 1] = fin.entry(j, k);
        }
    }
    validate_gcm(a).expect("built-in affine Cartan matrix is valid")
}

/// The rank-6 hyperbolic matrix with node 3 (1-based) joined to 2, 4, 5, 6 and
/// node 1 hanging off node 2.
pub fn h48_cartan() -> CartanMatrix {
    let mut a = vec![vec![0i64; 6]; 6];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j) in [(0, 1), (1, 2), (2, 3), (2, 4), (2, 5)] {
        a[i][j] = -1;
        a[j][i] = -1;
    }
    validate_gcm(a).expect("built-in hyperbolic matrix is valid")
}

/// Resolves a built-in algebra name: finite types (`A4`, `B5`, `G2`, ...),
/// untwisted affine types (`affine:D4`), and `H48`.
pub fn named(name: &str) -> Result<CartanMatrix, CartanError> {
    let trimmed = name.trim();
    let unknown = || CartanError::UnknownAlgebra(name.to_string());
    if trimmed.eq_ignore_ascii_case("H48") || trimmed.eq_ignore_ascii_case("H_48") {
        return Ok(h48_cartan());
    }
    if let Some(rest) = trimmed.strip_prefix("affine:") {
        let ft: FiniteType = rest.parse().map_err(|_| unknown())?;
        return Ok(affine_cartan(&ft));
    }
    let ft: FiniteType = trimmed.parse().map_err(|_| unknown())?;
    Ok(finite_cartan(&ft))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ft(s: &str) -> FiniteType {
        s.parse().unwrap()
    }

    /// All principal minors, straight from the definition.
    fn all_principal_minors_positive(m: &CartanMatrix) -> bool {
        let n = m.rank();
        (1u32..(1 << n)).all(|mask| {
            let nodes: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
            minor(m.rows(), &nodes).is_positive()
        })
    }

    #[test]
    fn a2_is_finite() {
        let m = validate_gcm(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(
            m.classification(),
            Some(Classification {
                class: CartanClass::Finite,
                hyperbolic: false
            })
        );
    }

    #[test]
    fn rejects_non_gcm() {
        let err = |raw: Vec<Vec<i64>>| validate_gcm(raw).unwrap_err();
        assert!(matches!(
            err(vec![vec![2, -1], vec![0, 2]]),
            CartanError::NotGcm(_)
        ));
        assert!(matches!(
            err(vec![vec![3, -1], vec![-1, 2]]),
            CartanError::NotGcm(_)
        ));
        assert!(matches!(
            err(vec![vec![2, 1], vec![1, 2]]),
            CartanError::NotGcm(_)
        ));
        assert!(matches!(err(vec![vec![2, -1]]), CartanError::NotGcm(_)));
        assert!(matches!(err(vec![]), CartanError::NotGcm(_)));
        // cycle with inconsistent ratios
        let cyc = vec![vec![2, -1, -1], vec![-2, 2, -1], vec![-1, -1, 2]];
        assert_eq!(err(cyc), CartanError::NotSymmetrizable);
    }

    #[test]
    fn h48_is_hyperbolic() {
        let m = h48_cartan();
        let c = classify(&m).unwrap();
        assert_eq!(c.class, CartanClass::Indefinite);
        assert!(c.hyperbolic);
        assert!(m.determinant().is_negative());
    }

    #[test]
    fn affine_d4_singular() {
        let m = affine_cartan(&ft("D4"));
        assert_eq!(m.rank(), 5);
        assert_eq!(m.determinant(), BigInt::zero());
        assert_eq!(classify(&m).unwrap().class, CartanClass::Affine);
        // a centre adjacent to four leaves
        let degrees: Vec<usize> = (0..5)
            .map(|i| (0..5).filter(|&j| j != i && m.entry(i, j) != 0).count())
            .collect();
        let mut sorted = degrees.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 1, 1, 1, 4]);
        assert_eq!(inverse_cartan(&m).unwrap_err(), CartanError::Singular);
    }

    #[test]
    fn every_affine_type_is_affine() {
        for t in FiniteType::all_up_to_rank(8) {
            let m = affine_cartan(&t);
            let c = classify(&m).unwrap();
            assert_eq!(c.class, CartanClass::Affine, "{t}");
            assert_eq!(m.determinant(), BigInt::zero(), "{t}");
        }
    }

    #[test]
    fn finite_tables_classify_finite() {
        for t in FiniteType::all_up_to_rank(8) {
            let m = finite_cartan(&t);
            assert_eq!(classify(&m).unwrap().class, CartanClass::Finite, "{t}");
            assert!(all_principal_minors_positive(&m), "{t}");
        }
    }

    #[test]
    fn rank_two_boundary() {
        let class = |a: i64, b: i64| {
            classify(&validate_gcm(vec![vec![2, -a], vec![-b, 2]]).unwrap()).unwrap()
        };
        assert_eq!(class(1, 3).class, CartanClass::Finite);
        assert_eq!(class(1, 4).class, CartanClass::Affine);
        assert_eq!(class(2, 2).class, CartanClass::Affine);
        let c = class(1, 5);
        assert_eq!(c.class, CartanClass::Indefinite);
        assert!(c.hyperbolic);
    }

    #[test]
    fn non_hyperbolic_indefinite() {
        // H48 extended by one more leaf on node 1: deleting the far leaf
        // leaves the indefinite H48 behind.
        let mut a = h48_cartan().rows().to_vec();
        for row in a.iter_mut() {
            row.push(0);
        }
        a.push(vec![0; 7]);
        a[6][6] = 2;
        a[0][6] = -1;
        a[6][0] = -1;
        let m = validate_gcm(a).unwrap();
        let c = classify(&m).unwrap();
        assert_eq!(c.class, CartanClass::Indefinite);
        assert!(!c.hyperbolic);
    }

    #[test]
    fn disconnected() {
        let m = validate_gcm(vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(m.classification(), None);
        assert_eq!(classify(&m), Err(CartanError::Disconnected));
        assert!(m.is_finite_type());
        assert_eq!(m.components(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn reflect_rho() {
        let m = h48_cartan();
        let w = reflect(&Weight::rho(6), 0, &m).unwrap();
        assert_eq!(w, Weight::from_i64s(&[-1, 2, 1, 1, 1, 1]));
        assert!(reflect(&w, 6, &m).is_err());
    }

    #[test]
    fn a2_braid_relation() {
        let m = finite_cartan(&ft("A2"));
        let rho = Weight::rho(2);
        assert_eq!(rho.apply_word(&[0, 1, 0, 1, 0, 1], &m).unwrap(), rho);
        assert_eq!(
            rho.apply_word(&[0, 1, 0], &m).unwrap(),
            rho.apply_word(&[1, 0, 1], &m).unwrap()
        );
    }

    #[test]
    fn reflect_promotes_on_overflow() {
        let m = validate_gcm(vec![vec![2, -3], vec![-3, 2]]).unwrap();
        let w = Weight::from_i64s(&[i64::MAX / 2, 1]);
        let r = reflect(&w, 0, &m).unwrap();
        assert!(r.is_big());
        assert_eq!(reflect(&r, 0, &m).unwrap(), w);
    }

    #[test]
    fn inverse_a2() {
        let m = finite_cartan(&ft("A2"));
        let inv = inverse_cartan(&m).unwrap();
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(inv.entry(0, 0), &q(2, 3));
        assert_eq!(inv.entry(0, 1), &q(1, 3));
        assert_eq!(inv.entry(1, 0), &q(1, 3));
        assert_eq!(inv.entry(1, 1), &q(2, 3));
    }

    #[test]
    fn inverse_h48_identity() {
        let m = h48_cartan();
        let inv = inverse_cartan(&m).unwrap();
        assert!(inv.mul_integer_left(&m).is_identity());
    }

    #[test]
    fn named_lookup() {
        assert_eq!(named("H48").unwrap(), h48_cartan());
        assert_eq!(named("affine:D4").unwrap().rank(), 5);
        assert_eq!(named("G2").unwrap().entry(0, 1), -3);
        assert!(named("H47").is_err());
        assert!(named("affine:X3").is_err());
    }

    #[test]
    fn submatrix_keeps_labels() {
        let m = h48_cartan()
            .with_labels((1..=6).map(|k| format!("a{k}")).collect())
            .unwrap();
        let s = m.submatrix(&[2, 3]).unwrap();
        assert_eq!(s.labels().unwrap(), &["a3".to_string(), "a4".to_string()]);
        assert!(m.submatrix(&[7]).is_err());
    }

    fn rank3_gcm() -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(0i64..4, 3).prop_map(|off| {
            // symmetric, so always symmetrizable
            let mut a = vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]];
            for (k, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
                a[i][j] = -off[k];
                a[j][i] = -off[k];
            }
            a
        })
    }

    proptest! {
        #[test]
        fn reflect_is_involution(coords in prop::collection::vec(-1000i64..1000, 6), i in 0usize..6) {
            let m = h48_cartan();
            let w = Weight::from_i64s(&coords);
            let back = reflect(&reflect(&w, i, &m).unwrap(), i, &m).unwrap();
            prop_assert_eq!(back, w);
        }

        #[test]
        fn reflect_fixes_hyperplane(mut coords in prop::collection::vec(-1000i64..1000, 6), i in 0usize..6) {
            coords[i] = 0;
            let w = Weight::from_i64s(&coords);
            prop_assert_eq!(reflect(&w, i, &h48_cartan()).unwrap(), w);
        }

        #[test]
        fn finite_matches_principal_minor_definition(raw in rank3_gcm()) {
            let m = validate_gcm(raw).unwrap();
            if m.is_connected() {
                let finite = classify(&m).unwrap().class == CartanClass::Finite;
                prop_assert_eq!(finite, all_principal_minors_positive(&m));
            }
        }
    }
}
