use geomdim::approx::{default_support_sequence, delta_bounds, id_bounds, SupportSequence};
use geomdim::rng::SplitMix64;
use geomdim::scores::rank_ascending;
use geomdim::selection::{plan_selection, remaining_share, Policy};
use geomdim::{
    apply_selection, delta_exact, id_exact, nid_curve, phi_profile, score_features_approx,
    score_features_exact, DatasetMatrix, Nid,
};
use proptest::prelude::*;

fn matrix(max_n: usize, max_d: usize) -> impl Strategy<Value = DatasetMatrix> {
    (2usize..=max_n, 1usize..=max_d).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0f64..10.0, n * d)
            .prop_map(move |v| DatasetMatrix::new(n, d, v).unwrap())
    })
}

/// Values on a 1/64 grid so translations by integers are exact.
fn dyadic_matrix() -> impl Strategy<Value = DatasetMatrix> {
    (2usize..=30, 1usize..=5).prop_flat_map(|(n, d)| {
        prop::collection::vec(-640i32..640, n * d).prop_map(move |v| {
            DatasetMatrix::new(n, d, v.into_iter().map(|x| x as f64 / 64.0).collect()).unwrap()
        })
    })
}

fn random_support(n: usize, rng: &mut SplitMix64) -> SupportSequence {
    let mut e = vec![2, n];
    for k in 3..n {
        if rng.below(3) == 0 {
            e.push(k);
        }
    }
    e.sort_unstable();
    e.dedup();
    SupportSequence::new(e, n).unwrap()
}

fn permute_rows(m: &DatasetMatrix, seed: u64) -> DatasetMatrix {
    let order = geomdim::rng::sample_indices(m.rows(), m.rows(), seed);
    let rows: Vec<Vec<f64>> = order.iter().map(|&i| m.row(i).to_vec()).collect();
    DatasetMatrix::from_rows(&rows).unwrap()
}

fn map_columns(m: &DatasetMatrix, f: impl Fn(usize, f64) -> f64) -> DatasetMatrix {
    let cols: Vec<Vec<f64>> = (0..m.cols())
        .map(|j| m.column(j).unwrap().into_iter().map(|v| f(j, v)).collect())
        .collect();
    DatasetMatrix::from_columns(&cols).unwrap()
}

fn within(lo: f64, x: f64, hi: f64) -> bool {
    let slack = 1e-12 * x.abs().max(1.0);
    lo <= x + slack && x <= hi + slack
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn phi_nondecreasing(m in matrix(40, 4)) {
        for j in 0..m.cols() {
            let p = phi_profile(&m, j).unwrap();
            prop_assert!(p.phi.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(p.phi.iter().all(|&v| v >= 0.0));
            let col = m.column(j).unwrap();
            let spread = col.iter().cloned().fold(f64::MIN, f64::max)
                - col.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert_eq!(*p.phi.last().unwrap(), spread);
        }
    }

    #[test]
    fn row_permutation_is_bit_exact(m in matrix(40, 4), seed in any::<u64>()) {
        let p = permute_rows(&m, seed);
        for j in 0..m.cols() {
            prop_assert_eq!(phi_profile(&m, j).unwrap(), phi_profile(&p, j).unwrap());
        }
        prop_assert_eq!(delta_exact(&m).unwrap().to_bits(), delta_exact(&p).unwrap().to_bits());
        prop_assert_eq!(id_exact(&m).unwrap(), id_exact(&p).unwrap());
        prop_assert_eq!(score_features_exact(&m).unwrap(), score_features_exact(&p).unwrap());
    }

    #[test]
    fn column_permutation_is_bit_exact(m in matrix(30, 5)) {
        let d = m.cols();
        let rev: Vec<usize> = (0..d).rev().collect();
        let p = m.select_columns(&rev).unwrap();
        prop_assert_eq!(delta_exact(&m).unwrap().to_bits(), delta_exact(&p).unwrap().to_bits());
        prop_assert_eq!(id_exact(&m).unwrap(), id_exact(&p).unwrap());
    }

    #[test]
    fn scaling_law(m in matrix(30, 4), c in 0.01f64..100.0) {
        let s = map_columns(&m, |_, v| v * c);
        let (d0, d1) = (delta_exact(&m).unwrap(), delta_exact(&s).unwrap());
        prop_assert!((d1 - c * d0).abs() <= 1e-9 * (c * d0).abs().max(f64::MIN_POSITIVE));
        if let (Some(a), Some(b)) = (id_exact(&m).unwrap().id_mid(), id_exact(&s).unwrap().id_mid()) {
            prop_assert!((b - a / (c * c)).abs() <= 1e-9 * (a / (c * c)));
        }
    }

    #[test]
    fn translation_exact_on_dyadic_data(m in dyadic_matrix(), shift in -50i32..50, col in 0usize..5) {
        let col = col % m.cols();
        let t = map_columns(&m, |j, v| if j == col { v + shift as f64 } else { v });
        prop_assert_eq!(delta_exact(&m).unwrap().to_bits(), delta_exact(&t).unwrap().to_bits());
        prop_assert_eq!(id_exact(&m).unwrap(), id_exact(&t).unwrap());
        prop_assert_eq!(score_features_exact(&m).unwrap(), score_features_exact(&t).unwrap());
    }

    #[test]
    fn translation_close_on_reals(m in matrix(30, 4), shift in -100.0f64..100.0) {
        let t = map_columns(&m, |j, v| if j == 0 { v + shift } else { v });
        let (a, b) = (delta_exact(&m).unwrap(), delta_exact(&t).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * 200.0);
    }

    #[test]
    fn adding_a_column_never_lowers_delta(m in matrix(30, 4), extra in prop::collection::vec(-10.0f64..10.0, 30)) {
        let mut cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j).unwrap()).collect();
        cols.push(extra[..m.rows()].to_vec());
        let wider = DatasetMatrix::from_columns(&cols).unwrap();
        prop_assert!(delta_exact(&wider).unwrap() >= delta_exact(&m).unwrap());
    }

    #[test]
    fn bounds_sandwich_exact(m in matrix(200, 5), seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let exact = delta_exact(&m).unwrap();
        let id = id_exact(&m).unwrap();
        let exact_scores = score_features_exact(&m).unwrap();
        for _ in 0..3 {
            let s = random_support(m.rows(), &mut rng);
            let (lo, hi) = delta_bounds(&m, &s).unwrap();
            prop_assert!(within(lo, exact, hi));
            let b = id_bounds(&m, &s).unwrap();
            if let (Some(l), Some(x), Some(u)) = (b.id_lower(), id.id_mid(), b.id_upper()) {
                prop_assert!(within(l, x, u));
                prop_assert!(l <= b.id_mid().unwrap() && b.id_mid().unwrap() <= u);
            } else {
                prop_assert!(b.is_infinite() && id.is_infinite());
            }
            for (a, e) in score_features_approx(&m, &s).unwrap().iter().zip(&exact_scores) {
                let bd = a.bounds.unwrap();
                prop_assert!(within(bd.delta_norm_lower, e.delta_norm, bd.delta_norm_upper));
                prop_assert!(within(bd.delta_star_lower, e.delta_star, bd.delta_star_upper));
                match (bd.nid_lower, e.nid, bd.nid_upper) {
                    (Nid::Finite(l), Nid::Finite(x), Nid::Finite(u)) => prop_assert!(within(l, x, u)),
                    (Nid::Infinite, Nid::Infinite, Nid::Infinite) => {}
                    other => prop_assert!(false, "mixed finiteness {:?}", other),
                }
            }
        }
    }

    #[test]
    fn refinement_never_widens(m in matrix(120, 3), seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let coarse = random_support(m.rows(), &mut rng);
        let missing: Vec<usize> = (2..m.rows()).filter(|k| !coarse.entries().contains(k)).collect();
        prop_assume!(!missing.is_empty());
        let extra = missing[rng.below(missing.len() as u64) as usize];
        let mut e = coarse.entries().to_vec();
        e.push(extra);
        e.sort_unstable();
        let fine = SupportSequence::new(e, m.rows()).unwrap();
        let (l0, h0) = delta_bounds(&m, &coarse).unwrap();
        let (l1, h1) = delta_bounds(&m, &fine).unwrap();
        let slack = 1e-12 * h0.max(1.0);
        prop_assert!(l1 + slack >= l0);
        prop_assert!(h1 <= h0 + slack);
    }

    #[test]
    fn complete_sequence_collapses(m in matrix(80, 4)) {
        let s = SupportSequence::complete(m.rows()).unwrap();
        let exact = delta_exact(&m).unwrap();
        let (lo, hi) = delta_bounds(&m, &s).unwrap();
        prop_assert!((lo - exact).abs() <= 1e-12 && (hi - exact).abs() <= 1e-12);
    }

    #[test]
    fn default_sequence_valid(n in 2usize..200_000, l in 2usize..3000) {
        let s = default_support_sequence(n, l).unwrap();
        prop_assert_eq!(s.entries()[0], 2);
        prop_assert_eq!(s.rows(), n);
        prop_assert!(s.entries().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.len() <= l.max(n - 1));
    }

    #[test]
    fn normalized_below_plain_discriminability(m in matrix(40, 4)) {
        for s in score_features_exact(&m).unwrap() {
            prop_assert!(s.delta_norm <= s.delta_star);
            if let Nid::Finite(nid) = s.nid {
                prop_assert!(nid * (1.0 + 1e-12) >= 1.0 / (s.delta_star * s.delta_star));
            }
        }
    }

    #[test]
    fn per_feature_scaling(m in matrix(30, 3), c in 0.1f64..10.0) {
        let s = map_columns(&m, |j, v| if j == 0 { v * c } else { v });
        let (a, b) = (score_features_exact(&m).unwrap(), score_features_exact(&s).unwrap());
        prop_assert!((b[0].delta_star - c * a[0].delta_star).abs() <= 1e-9 * (c * a[0].delta_star).max(1e-300));
        prop_assert!((b[0].delta_norm - c * a[0].delta_norm).abs() <= 1e-9 * (c * a[0].delta_norm).max(1e-300));
        if let (Nid::Finite(x), Nid::Finite(y)) = (a[0].nid, b[0].nid) {
            prop_assert!((y - x / (c * c)).abs() <= 1e-9 * x / (c * c));
        }
        for j in 1..m.cols() {
            prop_assert_eq!(a[j], b[j]);
        }
    }

    #[test]
    fn ranking_invariant_under_uniform_scaling(m in matrix(30, 6), e in -8i32..8) {
        let c = 2f64.powi(e);
        let s = map_columns(&m, |_, v| v * c);
        prop_assert_eq!(
            rank_ascending(&score_features_exact(&m).unwrap()),
            rank_ascending(&score_features_exact(&s).unwrap())
        );
    }

    #[test]
    fn curve_shape(m in matrix(20, 8)) {
        let scores = score_features_exact(&m).unwrap();
        let c = nid_curve(&scores).unwrap();
        let d = scores.len();
        prop_assert!(c.points.windows(2).all(|w| w[0].rel_nid <= w[1].rel_nid));
        prop_assert_eq!(c.points.last().unwrap().rel_nid, 1.0);
        for (i, p) in c.points.iter().enumerate() {
            prop_assert_eq!(p.rel_rank, (i + 1) as f64 / d as f64);
            prop_assert!(p.rel_nid > 0.0 && p.rel_nid <= 1.0);
        }
    }

    #[test]
    fn top_and_reversed_complement(m in matrix(20, 8), i in 1usize..8) {
        let scores = score_features_exact(&m).unwrap();
        let d = scores.len();
        prop_assume!(i < d);
        let mut nids: Vec<f64> = scores.iter().map(|s| s.nid.as_f64()).collect();
        nids.sort_by(f64::total_cmp);
        prop_assume!(nids.windows(2).all(|w| w[0] < w[1]));
        let a = i as f64 / d as f64;
        let top = plan_selection(&scores, Policy::Top, a, 0).unwrap();
        let rev = plan_selection(&scores, Policy::Reversed, 1.0 - a, 0).unwrap();
        prop_assert_eq!(top.discarded.len() + rev.discarded.len(), d);
        prop_assert_eq!(top.discarded, rev.kept);
    }

    #[test]
    fn random_plans_reproducible(m in matrix(10, 12), seed in any::<u64>(), a in 0.0f64..0.9) {
        let scores = score_features_exact(&m).unwrap();
        let p1 = plan_selection(&scores, Policy::Random, a, seed).unwrap();
        let p2 = plan_selection(&scores, Policy::Random, a, seed).unwrap();
        prop_assert_eq!(&p1, &p2);
        let reduced = apply_selection(&m, &p1).unwrap();
        prop_assert_eq!(reduced.rows(), m.rows());
        for i in 0..m.rows() {
            let expect: Vec<f64> = p1.kept.iter().map(|&j| m.get(i, j)).collect();
            prop_assert_eq!(reduced.row(i), expect.as_slice());
        }
    }

    #[test]
    fn top_share_nonincreasing(m in matrix(20, 10)) {
        let scores = score_features_exact(&m).unwrap();
        prop_assume!(scores.iter().any(|s| s.delta_norm > 0.0));
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let a = i as f64 / 10.0;
            let Ok(plan) = plan_selection(&scores, Policy::Top, a, 0) else { break };
            let share = remaining_share(&scores, &plan).unwrap();
            if i == 0 {
                prop_assert_eq!(share, 1.0);
            }
            prop_assert!(share <= prev);
            prev = share;
        }
    }
}

#[test]
fn random_seeds_vary() {
    let cols: Vec<Vec<f64>> = (0..20).map(|j| vec![0.0, j as f64 + 1.0, 0.5]).collect();
    let m = DatasetMatrix::from_columns(&cols).unwrap();
    let scores = score_features_exact(&m).unwrap();
    let plans: std::collections::BTreeSet<Vec<usize>> = (0..10)
        .map(|s| {
            plan_selection(&scores, Policy::Random, 0.5, s)
                .unwrap()
                .discarded
        })
        .collect();
    assert!(plans.len() > 1);
}

#[test]
fn top_beats_random_share() {
    // distinct discriminabilities, 100 seeds
    let mut rng = SplitMix64::new(11);
    let cols: Vec<Vec<f64>> = (0..16)
        .map(|j| (0..40).map(|_| rng.next_f64() * (j as f64 + 1.0)).collect())
        .collect();
    let m = DatasetMatrix::from_columns(&cols).unwrap();
    let scores = score_features_exact(&m).unwrap();
    let top = remaining_share(
        &scores,
        &plan_selection(&scores, Policy::Top, 0.5, 0).unwrap(),
    )
    .unwrap();
    let wins = (0..100)
        .filter(|&s| {
            let p = plan_selection(&scores, Policy::Random, 0.5, s).unwrap();
            top >= remaining_share(&scores, &p).unwrap()
        })
        .count();
    assert!(wins >= 95, "{wins}");
}
