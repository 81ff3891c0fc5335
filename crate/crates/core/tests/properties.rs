use hyperpoincare::cartan::{affine_cartan, finite_cartan, h48_cartan, validate_gcm, CartanMatrix};
use hyperpoincare::factorization::{compute_r, search_denominator, verify_factorization};
use hyperpoincare::polyseries::{
    affine_poincare, finite_poincare, Family, FiniteType, IntPoly, TruncSeries,
};
use hyperpoincare::weylgrowth::{finite_order, growth_series, GrowthOptions, DEFAULT_FINITE_DEPTH};
use num_bigint::BigInt;
use proptest::prelude::*;

fn seq() -> GrowthOptions {
    GrowthOptions::sequential()
}

fn as_poly(coeffs: &[u64]) -> IntPoly {
    IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
}

/// Permutations of n letters by inversion count.
fn mahonian(n: usize) -> Vec<u64> {
    let mut dist = vec![1u64];
    for k in 1..n {
        let mut next = vec![0u64; dist.len() + k];
        for (i, &c) in dist.iter().enumerate() {
            for j in 0..=k {
                next[i + j] += c;
            }
        }
        dist = next;
    }
    dist
}

#[test]
fn type_a_matches_inversion_counts() {
    for n in 1..=7 {
        let a = FiniteType::new(Family::A, n).unwrap();
        assert_eq!(finite_poincare(&a), as_poly(&mahonian(n + 1)), "A{n}");
    }
}

#[test]
fn closed_form_matches_enumeration_for_rank_le_6() {
    for t in FiniteType::all_up_to_rank(6) {
        let g = growth_series(&finite_cartan(&t), t.positive_root_count() + 2, &seq()).unwrap();
        assert!(g.is_complete(), "{t}");
        assert_eq!(as_poly(g.coeffs()), finite_poincare(&t), "{t}");
        assert_eq!(
            BigInt::from(finite_order(&finite_cartan(&t), &seq(), DEFAULT_FINITE_DEPTH).unwrap()),
            t.weyl_order()
        );
    }
}

#[test]
fn bott_formula_matches_enumeration() {
    let order = 12;
    for t in FiniteType::all_up_to_rank(4) {
        let g = growth_series(&affine_cartan(&t), order, &seq()).unwrap();
        assert!(!g.is_complete(), "affine {t}");
        assert_eq!(g.to_series(order), affine_poincare(&t, order), "affine {t}");
    }
}

#[test]
fn finite_series_palindromic_with_unit_top() {
    for t in FiniteType::all_up_to_rank(8) {
        let p = finite_poincare(&t);
        let c = p.coeffs();
        assert!(c.iter().eq(c.iter().rev()), "{t}");
        assert_eq!(p.degree(), Some(t.positive_root_count()), "{t}");
        assert_eq!(c.last(), Some(&BigInt::from(1)), "{t}");
        assert_eq!(c.iter().sum::<BigInt>(), t.weyl_order(), "{t}");
    }
}

#[test]
fn search_against_geometric_series() {
    let order = 20;
    for guard in 1..=3 {
        let h = TruncSeries::from_u64s(&[1; 21]);
        let found = search_denominator(&h, 8, guard).unwrap();
        // P(G) (1 - t) has degree D + 1, and must vanish over the guard band.
        let expected: Vec<(FiniteType, IntPoly)> = FiniteType::all_up_to_rank(8)
            .into_iter()
            .filter(|t| t.positive_root_count() + 1 + guard <= order)
            .map(|t| {
                let p = finite_poincare(&t);
                let mut q = vec![BigInt::from(0); p.coeffs().len() + 1];
                for (k, c) in p.coeffs().iter().enumerate() {
                    q[k] += c;
                    q[k + 1] -= c;
                }
                (t, IntPoly::new(q))
            })
            .collect();
        let got: Vec<(FiniteType, IntPoly)> =
            found.into_iter().map(|f| (f.finite_type, f.q)).collect();
        assert_eq!(got, expected, "guard {guard}");
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |mask| (0..n).filter(|&k| mask & (1 << k) != 0).collect())
}

#[test]
fn every_finite_parabolic_of_h48_factorizes() {
    let m = h48_cartan();
    let order = 14;
    let h = growth_series(&m, order, &seq()).unwrap().to_series(order);
    let mut checked = 0;
    for j in subsets(m.rank()) {
        let sub = m.submatrix(&j).unwrap();
        if !sub.is_finite_type() {
            continue;
        }
        let u = growth_series(&sub, DEFAULT_FINITE_DEPTH, &seq()).unwrap();
        assert!(u.is_complete());
        let r = compute_r(&h, &u.to_series(order)).unwrap();
        assert_eq!(r.first_negative(), None, "J = {j:?}");
        let rep = verify_factorization(&m, &j, order, &seq()).unwrap();
        assert_eq!(rep.r_series, r, "J = {j:?}");
        checked += 1;
    }
    // Excluded: the whole diagram and the affine D4 star {2,...,6}.
    assert_eq!(checked, 61);
}

#[test]
fn external_rank3_matrix_reproduces_tabulated_q1() {
    let text = include_str!("data/rank3_override.jsonl");
    let entries = hyperpoincare::catalog::load_catalog_with(Some(text)).unwrap();
    let e = &entries[0];
    assert_eq!(
        e.matrix_source,
        Some(hyperpoincare::catalog::MatrixSource::UserFile)
    );
    let r = hyperpoincare::catalog::verify_entry(
        e,
        hyperpoincare::catalog::default_depth(e, 2),
        2,
        &seq(),
    );
    assert_eq!(r.status, hyperpoincare::catalog::Status::Verified, "{r:?}");
}

fn arb_rank3_gcm() -> impl Strategy<Value = CartanMatrix> {
    let off = prop_oneof![Just((0i64, 0i64)), (1i64..=3, 1i64..=3)];
    (off.clone(), off.clone(), off).prop_filter_map(
        "not a connected symmetrizable GCM",
        |(a, b, c)| {
            let raw = vec![
                vec![2, -a.0, -b.0],
                vec![-a.1, 2, -c.0],
                vec![-b.1, -c.1, 2],
            ];
            validate_gcm(raw).ok().filter(|m| m.is_connected())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_node_factorization(m in arb_rank3_gcm(), node in 0usize..3) {
        let order = 10;
        let rep = verify_factorization(&m, &[node], order, &seq()).unwrap();
        // W_{node} = {1, s}: every level splits as cosets(k) + cosets(k - 1).
        let g = rep.growth.to_series(order);
        let c = rep.cosets.to_series(order);
        for k in 1..=order {
            prop_assert_eq!(&g.coeffs()[k], &(&c.coeffs()[k] + &c.coeffs()[k - 1]));
        }
    }

    #[test]
    fn level_one_equals_rank(m in arb_rank3_gcm()) {
        let g = growth_series(&m, 1, &seq()).unwrap();
        prop_assert_eq!(g.coeffs(), &[1u64, 3][..]);
    }
}
