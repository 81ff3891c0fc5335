//! Level-by-level enumeration of Weyl group elements through their images of
//! the Weyl vector.
//!
//! Since `rho` is strictly dominant, `w -> w(rho)` is injective. For
//! `v = w(rho)`, coordinate `i` of `v` is negative exactly when `sigma_i w`
//! is shorter than `w`. So the elements of length `k + 1` are the images
//! `sigma_i(v)` for `v` at level `k` with `v_i > 0`, and only the current
//! frontier has to be kept in memory.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cartan::{CartanError, CartanMatrix, Weight};
use crate::polyseries::TruncSeries;

/// Default cap on vectors held at once (frontier plus candidates).
pub const DEFAULT_MAX_VECTORS: u64 = 1 << 31;
/// Default deepest level for which [`reduced_words`] will produce words.
pub const DEFAULT_WORD_DEPTH: usize = 8;
/// Default level cap for [`finite_order`].
pub const DEFAULT_FINITE_DEPTH: usize = 1024;

const CHUNK_ROWS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("enumeration budget exceeded before level {level} ({reason})")]
    BudgetExceeded {
        level: usize,
        reason: String,
        partial: Box<GrowthSeries>,
    },
    #[error("level {level} is beyond the word-tracking depth {depth}")]
    LevelNotEnumerated { level: usize, depth: usize },
    #[error("no termination within {0} levels; the group is not finite")]
    NotFinite(usize),
    #[error("node {node} out of range for rank {rank}")]
    NodeOutOfRange { node: usize, rank: usize },
    #[error(transparent)]
    Cartan(#[from] CartanError),
}

/// Tuning knobs shared by every enumeration entry point.
#[derive(Clone, Debug)]
pub struct GrowthOptions {
    /// Worker threads; `0` means one per available core, `1` forces the
    /// sequential path.
    pub workers: usize,
    pub max_vectors: u64,
    pub max_bytes: Option<u64>,
    pub word_depth: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            workers: 0,
            max_vectors: DEFAULT_MAX_VECTORS,
            max_bytes: None,
            word_depth: DEFAULT_WORD_DEPTH,
        }
    }
}

impl GrowthOptions {
    pub fn sequential() -> Self {
        GrowthOptions {
            workers: 1,
            ..Default::default()
        }
    }

    pub fn with_workers(workers: usize) -> Self {
        GrowthOptions {
            workers,
            ..Default::default()
        }
    }
}

/// Coefficients `|W^0|, |W^1|, ...` of a growth series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSeries {
    coeffs: Vec<u64>,
    complete: bool,
}

impl GrowthSeries {
    pub fn new(coeffs: Vec<u64>, complete: bool) -> Self {
        GrowthSeries { coeffs, complete }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Highest order enumerated. For a complete series this is the length of
    /// the longest element.
    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// True when enumeration ran out of elements: the group is finite and
    /// the coefficients are its whole Poincaré polynomial.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn total(&self) -> u128 {
        self.coeffs.iter().map(|&c| c as u128).sum()
    }

    /// As a power series to `t^truncation`. A complete series is padded with
    /// zeros; an incomplete one cannot be extended past what was enumerated.
    pub fn to_series(&self, truncation: usize) -> TruncSeries {
        let top = if self.complete {
            truncation
        } else {
            truncation.min(self.truncation())
        };
        TruncSeries::new(
            (0..=top)
                .map(|k| BigInt::from(self.coeffs.get(k).copied().unwrap_or(0)))
                .collect(),
        )
    }

    /// The whole known series, `T = truncation()`.
    pub fn as_series(&self) -> TruncSeries {
        self.to_series(self.truncation())
    }
}

/// One line of the per-level progress stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub coefficient: u64,
    pub frontier_size: u64,
    /// Coset-representative counts, one per requested parabolic subset.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coset_counts: Vec<u64>,
    pub elapsed_ms: u64,
}

/// Word `sigma_{i_1} ... sigma_{i_k}`, stored with 0-based nodes and
/// displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReducedWord(Vec<usize>);

impl ReducedWord {
    pub fn new(nodes: Vec<usize>) -> Self {
        ReducedWord(nodes)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| (n + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

trait Coord: Clone + Ord + Send + Sync {
    fn is_pos(&self) -> bool;
    /// Pushes `row - row[i] * col` onto `out`.
    fn reflect_into(
        row: &[Self],
        i: usize,
        col: &[i64],
        out: &mut Vec<Self>,
    ) -> Result<(), Overflow>;
    fn to_big(&self) -> BigInt;
}

#[derive(Debug)]
struct Overflow;

impl Coord for i64 {
    fn is_pos(&self) -> bool {
        *self > 0
    }

    fn reflect_into(
        row: &[i64],
        i: usize,
        col: &[i64],
        out: &mut Vec<i64>,
    ) -> Result<(), Overflow> {
        let c = row[i];
        for (x, a) in row.iter().zip(col) {
            let v = c
                .checked_mul(*a)
                .and_then(|p| x.checked_sub(p))
                .ok_or(Overflow)?;
            out.push(v);
        }
        Ok(())
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coord for BigInt {
    fn is_pos(&self) -> bool {
        self.is_positive()
    }

    fn reflect_into(
        row: &[BigInt],
        i: usize,
        col: &[i64],
        out: &mut Vec<BigInt>,
    ) -> Result<(), Overflow> {
        let c = &row[i];
        out.extend(row.iter().zip(col).map(|(x, &a)| x - c * a));
        Ok(())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Flat row-major storage of equally long coordinate vectors.
#[derive(Clone, Debug)]
struct Rows<C> {
    rank: usize,
    data: Vec<C>,
}

impl<C: Coord> Rows<C> {
    fn len(&self) -> usize {
        self.data.len().checked_div(self.rank).unwrap_or(0)
    }

    fn iter(&self) -> std::slice::Chunks<'_, C> {
        self.data.chunks(self.rank)
    }

    fn candidate_count(&self) -> u64 {
        self.data.iter().filter(|c| c.is_pos()).count() as u64
    }

    fn has_successor(&self) -> bool {
        self.data.iter().any(Coord::is_pos)
    }

    fn count_dominant(&self, nodes: &[usize]) -> u64 {
        self.iter()
            .filter(|row| nodes.iter().all(|&j| row[j].is_pos()))
            .count() as u64
    }

    fn expand_chunk(&self, rows: &[C], cols: &[Vec<i64>]) -> Result<Vec<C>, Overflow> {
        let mut out = Vec::new();
        for row in rows.chunks(self.rank) {
            for (i, c) in row.iter().enumerate() {
                if c.is_pos() {
                    C::reflect_into(row, i, &cols[i], &mut out)?;
                }
            }
        }
        Ok(out)
    }

    /// Next level: every ascent image, deduplicated and sorted.
    fn expand(
        &self,
        cols: &[Vec<i64>],
        pool: Option<&rayon::ThreadPool>,
    ) -> Result<Rows<C>, Overflow> {
        let n = self.rank;
        let chunk = CHUNK_ROWS * n;
        let candidates: Vec<C> = match pool {
            None => self.expand_chunk(&self.data, cols)?,
            Some(pool) => pool.install(|| {
                self.data
                    .par_chunks(chunk)
                    .map(|rows| self.expand_chunk(rows, cols))
                    .collect::<Result<Vec<_>, _>>()
                    .map(|parts| parts.concat())
            })?,
        };
        let count = candidates.len() / n;
        let row = |k: usize| &candidates[k * n..(k + 1) * n];
        let mut order: Vec<usize> = (0..count).collect();
        match pool {
            None => order.sort_unstable_by(|&a, &b| row(a).cmp(row(b))),
            Some(pool) => pool.install(|| order.par_sort_unstable_by(|&a, &b| row(a).cmp(row(b)))),
        }
        // exact full-vector comparison
        order.dedup_by(|a, b| row(*a) == row(*b));
        let mut data = Vec::with_capacity(order.len() * n);
        for k in order {
            data.extend_from_slice(row(k));
        }
        Ok(Rows { rank: n, data })
    }

    fn to_big(&self) -> Rows<BigInt> {
        Rows {
            rank: self.rank,
            data: self.data.iter().map(Coord::to_big).collect(),
        }
    }
}

#[derive(Clone, Debug)]
enum Frontier {
    Small(Rows<i64>),
    Big(Rows<BigInt>),
}

impl Frontier {
    fn len(&self) -> usize {
        match self {
            Frontier::Small(r) => r.len(),
            Frontier::Big(r) => r.len(),
        }
    }

    fn coord_bytes(&self) -> u64 {
        match self {
            Frontier::Small(_) => std::mem::size_of::<i64>() as u64,
            // a few limbs plus the header
            Frontier::Big(_) => 64,
        }
    }
}

/// Steps through the levels `W^0, W^1, ...` of the Weyl group, holding one
/// level of `rho`-images at a time.
///
/// Each level is kept sorted, so everything derived from it is independent
/// of the worker count.
pub struct LevelWalker<'m> {
    matrix: &'m CartanMatrix,
    cols: Vec<Vec<i64>>,
    level: usize,
    frontier: Frontier,
    pool: Option<rayon::ThreadPool>,
    options: GrowthOptions,
    started: Instant,
}

/// Reason a walker could not advance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub reason: String,
}

impl<'m> LevelWalker<'m> {
    pub fn new(matrix: &'m CartanMatrix, options: &GrowthOptions) -> Self {
        let n = matrix.rank();
        let pool = match options.workers {
            1 => None,
            w => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .expect("thread pool"),
            ),
        };
        LevelWalker {
            matrix,
            cols: (0..n).map(|j| matrix.root_coords(j)).collect(),
            level: 0,
            frontier: Frontier::Small(Rows {
                rank: n,
                data: vec![1; n],
            }),
            pool,
            options: options.clone(),
            started: Instant::now(),
        }
    }

    pub fn matrix(&self) -> &CartanMatrix {
        self.matrix
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `|W^level|`.
    pub fn len(&self) -> u64 {
        self.frontier.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.frontier.len() == 0
    }

    /// Whether any element of this level has a longer successor; `false`
    /// means this is the top level of a finite group.
    pub fn has_next(&self) -> bool {
        match &self.frontier {
            Frontier::Small(r) => r.has_successor(),
            Frontier::Big(r) => r.has_successor(),
        }
    }

    /// Images that are strictly positive on every node of `nodes`: the
    /// minimal-length representatives of `W_J \ W` at this level.
    pub fn count_dominant(&self, nodes: &[usize]) -> u64 {
        match &self.frontier {
            Frontier::Small(r) => r.count_dominant(nodes),
            Frontier::Big(r) => r.count_dominant(nodes),
        }
    }

    /// This level's images of `rho`, in sorted order.
    pub fn images(&self) -> Vec<Weight> {
        match &self.frontier {
            Frontier::Small(r) => r.iter().map(Weight::from_i64s).collect(),
            Frontier::Big(r) => r
                .iter()
                .map(|row| Weight::from_bigints(row.to_vec()))
                .collect(),
        }
    }

    pub fn uses_big_integers(&self) -> bool {
        matches!(self.frontier, Frontier::Big(_))
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.started.elapsed().as_millis() as u64
    }

    /// Moves to the next level.
    pub fn advance(&mut self) -> Result<(), Budget> {
        self.check_budget()?;
        let pool = self.pool.as_ref();
        let next = match &self.frontier {
            Frontier::Small(rows) => match rows.expand(&self.cols, pool) {
                Ok(r) => Frontier::Small(r),
                Err(Overflow) => Frontier::Big(
                    rows.to_big()
                        .expand(&self.cols, pool)
                        .expect("big integers do not overflow"),
                ),
            },
            Frontier::Big(rows) => Frontier::Big(
                rows.expand(&self.cols, pool)
                    .expect("big integers do not overflow"),
            ),
        };
        self.frontier = next;
        self.level += 1;
        Ok(())
    }

    fn check_budget(&self) -> Result<(), Budget> {
        let candidates = match &self.frontier {
            Frontier::Small(r) => r.candidate_count(),
            Frontier::Big(r) => r.candidate_count(),
        };
        let stored = self.len() + candidates;
        if stored > self.options.max_vectors {
            return Err(Budget {
                reason: format!(
                    "{stored} vectors exceed the cap of {}",
                    self.options.max_vectors
                ),
            });
        }
        if let Some(cap) = self.options.max_bytes {
            let n = self.matrix.rank() as u64;
            let bytes = stored * n * self.frontier.coord_bytes() + candidates * 8;
            if bytes > cap {
                return Err(Budget {
                    reason: format!("about {bytes} bytes exceed the cap of {cap}"),
                });
            }
        }
        Ok(())
    }
}

/// Full growth series plus one coset series per requested parabolic subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub growth: GrowthSeries,
    pub cosets: Vec<GrowthSeries>,
}

/// Walks to `max_order`, recording `|W^k|` and, for each subset in
/// `parabolics`, the number of level-`k` images dominant on that subset.
///
/// `observer` sees one record per level; its coefficient is the full count.
pub fn enumerate(
    m: &CartanMatrix,
    max_order: usize,
    parabolics: &[Vec<usize>],
    options: &GrowthOptions,
    observer: &mut dyn FnMut(&LevelRecord),
) -> Result<Enumeration, GrowthError> {
    for j in parabolics.iter().flatten() {
        if *j >= m.rank() {
            return Err(GrowthError::NodeOutOfRange {
                node: *j,
                rank: m.rank(),
            });
        }
    }
    let mut walker = LevelWalker::new(m, options);
    let mut growth = Vec::with_capacity(max_order + 1);
    let mut cosets: Vec<Vec<u64>> = vec![Vec::with_capacity(max_order + 1); parabolics.len()];
    loop {
        growth.push(walker.len());
        let counts: Vec<u64> = parabolics
            .iter()
            .map(|j| walker.count_dominant(j))
            .collect();
        for (series, &c) in cosets.iter_mut().zip(&counts) {
            series.push(c);
        }
        observer(&LevelRecord {
            level: walker.level(),
            coefficient: walker.len(),
            frontier_size: walker.len(),
            coset_counts: counts,
            elapsed_ms: walker.elapsed_ms(),
        });
        let complete = !walker.has_next();
        if complete || walker.level() >= max_order {
            return Ok(Enumeration {
                growth: GrowthSeries::new(growth, complete),
                cosets: cosets
                    .into_iter()
                    .map(|c| GrowthSeries::new(c, complete))
                    .collect(),
            });
        }
        if let Err(b) = walker.advance() {
            let partial = match cosets.into_iter().next() {
                Some(c) if parabolics.len() == 1 => c,
                _ => growth,
            };
            return Err(GrowthError::BudgetExceeded {
                level: walker.level() + 1,
                reason: b.reason,
                partial: Box::new(GrowthSeries::new(partial, false)),
            });
        }
    }
}

/// `|W^k|` for `k = 0..=max_order`, stopping early if the group runs out.
pub fn growth_series(
    m: &CartanMatrix,
    max_order: usize,
    options: &GrowthOptions,
) -> Result<GrowthSeries, GrowthError> {
    enumerate(m, max_order, &[], options, &mut |_| {}).map(|e| e.growth)
}

/// Counts of minimal-length coset representatives for `W_J \ W`, level by
/// level: these are the coefficients of `R` in `P(W) = P(W_J) R`.
pub fn parabolic_coset_growth(
    m: &CartanMatrix,
    parabolic: &[usize],
    max_order: usize,
    options: &GrowthOptions,
) -> Result<GrowthSeries, GrowthError> {
    let mut e = enumerate(m, max_order, &[parabolic.to_vec()], options, &mut |_| {})?;
    Ok(e.cosets.remove(0))
}

/// Lexicographically least reduced word for the element with image `v` of
/// `rho`: repeatedly strip the smallest left descent.
pub fn canonical_word(v: &Weight, m: &CartanMatrix) -> Result<ReducedWord, GrowthError> {
    let n = m.rank();
    let mut word = Vec::new();
    let mut cur = v.clone();
    while let Some(i) = (0..n).find(|&i| cur.sign(i).is_lt()) {
        word.push(i);
        cur = crate::cartan::reflect(&cur, i, m)?;
    }
    Ok(ReducedWord(word))
}

/// One canonical word per element at `level`, optionally restricted to
/// representatives dominant on `filter`, sorted, at most `limit` of them.
pub fn reduced_words(
    m: &CartanMatrix,
    level: usize,
    filter: Option<&[usize]>,
    limit: usize,
    options: &GrowthOptions,
) -> Result<Vec<ReducedWord>, GrowthError> {
    if level > options.word_depth {
        return Err(GrowthError::LevelNotEnumerated {
            level,
            depth: options.word_depth,
        });
    }
    let mut walker = LevelWalker::new(m, options);
    while walker.level() < level {
        if !walker.has_next() {
            return Ok(Vec::new());
        }
        walker.advance().map_err(|b| GrowthError::BudgetExceeded {
            level: walker.level() + 1,
            reason: b.reason,
            partial: Box::new(GrowthSeries::new(Vec::new(), false)),
        })?;
    }
    let mut words = walker
        .images()
        .into_iter()
        .filter(|v| filter.is_none_or(|j| j.iter().all(|&k| v.sign(k).is_gt())))
        .map(|v| canonical_word(&v, m))
        .collect::<Result<Vec<_>, _>>()?;
    words.sort();
    words.truncate(limit);
    Ok(words)
}

/// `|W|` for a finite-type matrix, by enumerating until the frontier empties.
pub fn finite_order(
    m: &CartanMatrix,
    options: &GrowthOptions,
    depth_cap: usize,
) -> Result<u128, GrowthError> {
    let s = growth_series(m, depth_cap, options)?;
    if s.is_complete() {
        Ok(s.total())
    } else {
        Err(GrowthError::NotFinite(depth_cap))
    }
}

/// True if some coordinate vanishes. Never the case for an image of `rho`.
pub fn has_zero_coordinate(v: &Weight) -> bool {
    v.to_bigints().iter().any(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{finite_cartan, h48_cartan, reflect, validate_gcm};
    use crate::polyseries::FiniteType;
    use std::collections::HashSet;

    fn seq() -> GrowthOptions {
        GrowthOptions::sequential()
    }

    fn fin(s: &str) -> CartanMatrix {
        finite_cartan(&s.parse::<FiniteType>().unwrap())
    }

    #[test]
    fn a1_growth() {
        let m = validate_gcm(vec![vec![2]]).unwrap();
        let s = growth_series(&m, 10, &seq()).unwrap();
        assert_eq!(s.coeffs(), &[1, 1]);
        assert!(s.is_complete());
    }

    #[test]
    fn a4_growth() {
        let s = growth_series(&fin("A4"), 50, &seq()).unwrap();
        assert_eq!(s.coeffs(), &[1, 4, 9, 15, 20, 22, 20, 15, 9, 4, 1]);
        assert!(s.is_complete());
        assert_eq!(s.total(), 120);
    }

    #[test]
    fn stopping_exactly_at_the_top_still_completes() {
        let s = growth_series(&fin("A2"), 3, &seq()).unwrap();
        assert!(s.is_complete());
        let s = growth_series(&fin("A2"), 2, &seq()).unwrap();
        assert!(!s.is_complete());
        assert_eq!(s.coeffs(), &[1, 2, 2]);
    }

    #[test]
    fn finite_orders() {
        assert_eq!(finite_order(&fin("A4"), &seq(), 100).unwrap(), 120);
        assert_eq!(finite_order(&fin("B5"), &seq(), 100).unwrap(), 3840);
        assert_eq!(finite_order(&fin("G2"), &seq(), 100).unwrap(), 12);
        let affine = crate::cartan::affine_cartan(&"A2".parse().unwrap());
        assert_eq!(
            finite_order(&affine, &seq(), 20),
            Err(GrowthError::NotFinite(20))
        );
    }

    #[test]
    fn empty_parabolic_is_full_growth() {
        let m = h48_cartan();
        let full = growth_series(&m, 8, &seq()).unwrap();
        let cos = parabolic_coset_growth(&m, &[], 8, &seq()).unwrap();
        assert_eq!(full, cos);
    }

    #[test]
    fn h48_head_and_cosets() {
        let m = h48_cartan();
        let e = enumerate(&m, 6, &[vec![0, 1, 2, 3]], &seq(), &mut |_| {}).unwrap();
        assert_eq!(e.growth.coeffs(), &[1, 6, 20, 52, 117, 237, 445]);
        assert_eq!(e.cosets[0].coeffs(), &[1, 2, 3, 7, 12, 19, 32]);
        assert!(!e.growth.is_complete());
    }

    #[test]
    fn out_of_range_parabolic() {
        let m = fin("A2");
        assert!(matches!(
            parabolic_coset_growth(&m, &[5], 3, &seq()),
            Err(GrowthError::NodeOutOfRange { node: 5, rank: 2 })
        ));
    }

    #[test]
    fn level_one_words() {
        let m = h48_cartan();
        let words = reduced_words(&m, 1, None, 100, &seq()).unwrap();
        let expect: Vec<ReducedWord> = (0..6).map(|i| ReducedWord::new(vec![i])).collect();
        assert_eq!(words, expect);
    }

    #[test]
    fn a2_longest_word() {
        let words = reduced_words(&fin("A2"), 3, None, 10, &seq()).unwrap();
        assert_eq!(words, vec![ReducedWord::new(vec![0, 1, 0])]);
        assert_eq!(words[0].to_string(), "(1,2,1)");
        assert!(reduced_words(&fin("A2"), 4, None, 10, &seq())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn word_depth_cap() {
        let err = reduced_words(&h48_cartan(), 9, None, 10, &seq()).unwrap_err();
        assert_eq!(err, GrowthError::LevelNotEnumerated { level: 9, depth: 8 });
    }

    #[test]
    fn words_reproduce_their_images() {
        let m = h48_cartan();
        let mut walker = LevelWalker::new(&m, &seq());
        for _ in 0..4 {
            walker.advance().unwrap();
        }
        for v in walker.images() {
            let w = canonical_word(&v, &m).unwrap();
            assert_eq!(w.len(), 4);
            assert_eq!(Weight::rho(6).apply_word(w.nodes(), &m).unwrap(), v);
        }
    }

    #[test]
    fn budget_returns_partial_series() {
        let opts = GrowthOptions {
            max_vectors: 200,
            ..seq()
        };
        match growth_series(&h48_cartan(), 25, &opts) {
            Err(GrowthError::BudgetExceeded { partial, .. }) => {
                assert!(!partial.is_complete());
                assert_eq!(&partial.coeffs()[..3], &[1, 6, 20]);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        let opts = GrowthOptions {
            max_bytes: Some(1000),
            ..seq()
        };
        assert!(matches!(
            growth_series(&h48_cartan(), 25, &opts),
            Err(GrowthError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn big_integer_promotion_matches() {
        // rank-2 hyperbolic with fast coordinate growth: coordinates pass
        // i64 range after a few dozen steps
        let m = validate_gcm(vec![vec![2, -40], vec![-40, 2]]).unwrap();
        let mut walker = LevelWalker::new(&m, &seq());
        let mut levels = 0;
        while !walker.uses_big_integers() {
            walker.advance().unwrap();
            levels += 1;
            assert!(levels < 64);
        }
        // infinite dihedral: two elements per positive length
        assert_eq!(walker.len(), 2);
        let s = growth_series(&m, levels + 3, &seq()).unwrap();
        assert!(s.coeffs()[1..].iter().all(|&c| c == 2));
    }

    #[test]
    fn worker_counts_agree() {
        let m = h48_cartan();
        let base = enumerate(&m, 12, &[vec![0, 1, 2, 3]], &seq(), &mut |_| {}).unwrap();
        for w in [2, 3, 4] {
            let par = enumerate(
                &m,
                12,
                &[vec![0, 1, 2, 3]],
                &GrowthOptions::with_workers(w),
                &mut |_| {},
            )
            .unwrap();
            assert_eq!(par, base, "workers={w}");
        }
    }

    #[test]
    fn observer_sees_each_level() {
        let mut seen = Vec::new();
        enumerate(&fin("B3"), 100, &[], &seq(), &mut |r| {
            seen.push((r.level, r.coefficient))
        })
        .unwrap();
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[9], (9, 1));
    }

    /// Levels are pairwise disjoint, no image has a zero coordinate, and
    /// every descent lands one level down.
    #[test]
    fn exhaustive_level_structure() {
        let cases = [
            fin("A4"),
            fin("B4"),
            fin("F4"),
            crate::cartan::affine_cartan(&"A3".parse().unwrap()),
            validate_gcm(vec![vec![2, -1, -1], vec![-1, 2, -2], vec![-1, -2, 2]]).unwrap(),
        ];
        for m in &cases {
            let mut walker = LevelWalker::new(m, &seq());
            let mut all: HashSet<Vec<BigInt>> = HashSet::new();
            let mut prev: HashSet<Vec<BigInt>> = HashSet::new();
            for _ in 0..10 {
                let imgs = walker.images();
                let here: HashSet<Vec<BigInt>> = imgs.iter().map(Weight::to_bigints).collect();
                assert_eq!(here.len(), imgs.len());
                for v in &imgs {
                    assert!(!has_zero_coordinate(v));
                    assert!(all.insert(v.to_bigints()), "image repeated across levels");
                    let descents: Vec<usize> =
                        (0..m.rank()).filter(|&i| v.sign(i).is_lt()).collect();
                    assert_eq!(descents.is_empty(), walker.level() == 0);
                    for i in descents {
                        let down = reflect(v, i, m).unwrap();
                        assert!(prev.contains(&down.to_bigints()));
                    }
                }
                prev = here;
                if !walker.has_next() {
                    break;
                }
                walker.advance().unwrap();
            }
        }
    }

    #[test]
    fn series_conversion() {
        let s = GrowthSeries::new(vec![1, 2, 2, 1], true);
        assert_eq!(s.to_series(5).truncation(), 5);
        let p = GrowthSeries::new(vec![1, 2, 2], false);
        assert_eq!(p.to_series(5).truncation(), 2);
    }
}
