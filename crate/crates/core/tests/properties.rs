use proptest::prelude::*;

use rankcap::bounds::{
    bound_bartlett, bound_golowich, bound_main_full, bound_main_simplified, bound_neyshabur, bound_r_term,
    bound_single_layer, DataStats,
};
use rankcap::linalg::{ky_fan, numerical_rank, project_rank_spectral, singular_values, spectral_norm, svd};
use rankcap::{Activation, BoundInputs, ConstraintSet, Constants, DenseMatrix, NetworkSpec};

fn matrix(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0f64..5.0, r * c).prop_map(move |v| DenseMatrix::from_row_major(r, c, v).unwrap())
    })
}

fn matrix_pair(max_dim: usize) -> impl Strategy<Value = (DenseMatrix, DenseMatrix)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        let entries = || prop::collection::vec(-5.0f64..5.0, r * c);
        (entries(), entries()).prop_map(move |(a, b)| {
            (DenseMatrix::from_row_major(r, c, a).unwrap(), DenseMatrix::from_row_major(r, c, b).unwrap())
        })
    })
}

/// A rank-`k` matrix `A Bᵀ` with `A: r×k`, `B: c×k`.
fn low_rank(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_dim, 1..=max_dim, 1..=3usize).prop_flat_map(|(r, c, k)| {
        (prop::collection::vec(-2.0f64..2.0, r * k), prop::collection::vec(-2.0f64..2.0, c * k)).prop_map(
            move |(a, b)| {
                let a = DenseMatrix::from_row_major(r, k, a).unwrap();
                let b = DenseMatrix::from_row_major(c, k, b).unwrap();
                a.matmul_nt(&b).unwrap()
            },
        )
    })
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

fn caps() -> impl Strategy<Value = (usize, f64)> {
    (1..=6usize, 0.1f64..4.0)
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn svd_reconstructs_and_is_orthonormal(m in matrix(9)) {
        let f = svd(&m).unwrap();
        prop_assert!(f.reconstruct().max_abs_diff(&m).unwrap() < 1e-10 * (1.0 + m.frobenius_norm()));
        let k = f.singular_values.len();
        let utu = f.left_vectors.matmul_tn(&f.left_vectors).unwrap();
        let vtv = f.right_vectors.matmul_tn(&f.right_vectors).unwrap();
        prop_assert!(utu.max_abs_diff(&DenseMatrix::identity(k)).unwrap() < 1e-10);
        prop_assert!(vtv.max_abs_diff(&DenseMatrix::identity(k)).unwrap() < 1e-10);
        prop_assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1] && w[1] >= 0.0));
    }

    #[test]
    fn svd_handles_rank_deficient_input(m in low_rank(8)) {
        let f = svd(&m).unwrap();
        prop_assert!(f.reconstruct().max_abs_diff(&m).unwrap() < 1e-10 * (1.0 + m.frobenius_norm()));
        prop_assert!(numerical_rank(&m, 1e-8).unwrap() <= 3);
    }

    #[test]
    fn power_iteration_agrees_with_svd(m in matrix(9)) {
        let s = singular_values(&m).unwrap();
        let p = spectral_norm(&m, 1e-12).unwrap();
        prop_assert!((p - s[0]).abs() <= 1e-6 * (1.0 + s[0]), "{p} vs {}", s[0]);
    }

    #[test]
    fn projection_is_feasible_and_idempotent(m in matrix(8), (r, b) in caps()) {
        let r = r.min(m.rows().min(m.cols()));
        let c = ConstraintSet::new(r, b).unwrap();
        let p = project_rank_spectral(&m, &c).unwrap();
        let s = singular_values(&p).unwrap();
        prop_assert!(s[0] <= b * (1.0 + 1e-9));
        prop_assert!(numerical_rank(&p, 1e-8).unwrap() <= r);
        let again = project_rank_spectral(&p, &c).unwrap();
        prop_assert!(again.max_abs_diff(&p).unwrap() < 1e-9 * (1.0 + b));
    }

    #[test]
    fn projection_beats_other_feasible_points((m, other) in matrix_pair(6), (r, b) in caps()) {
        let r = r.min(m.rows().min(m.cols()));
        let c = ConstraintSet::new(r, b).unwrap();
        let p = project_rank_spectral(&m, &c).unwrap();
        // any feasible point, e.g. a projected random matrix, is no nearer
        let q = project_rank_spectral(&other, &c).unwrap();
        let dp = m.sub(&p).unwrap().frobenius_norm();
        let dq = m.sub(&q).unwrap().frobenius_norm();
        prop_assert!(dp <= dq + 1e-9, "{dp} > {dq}");
    }

    #[test]
    fn ky_fan_is_the_constrained_supremum((m, other) in matrix_pair(7), r in 1..=6usize) {
        let r = r.min(m.rows().min(m.cols()));
        let c = ConstraintSet::new(r, 1.0).unwrap();
        let k = ky_fan(&m, r).unwrap();
        let f = svd(&m).unwrap();
        let top = f.reconstruct_with(|i, _| if i < r { 1.0 } else { 0.0 });
        prop_assert!((top.inner(&m).unwrap() - k).abs() <= 1e-9 * (1.0 + k));
        let w = project_rank_spectral(&other, &c).unwrap();
        prop_assert!(w.inner(&m).unwrap() <= k + 1e-9);
    }
}

fn inputs(dims: Vec<usize>, ranks: Vec<usize>, spectral: Vec<f64>, stable: Vec<f64>, m: usize) -> BoundInputs {
    // frobenius between spectral and √rank·spectral
    let frob: Vec<f64> = spectral
        .iter()
        .zip(&ranks)
        .zip(&stable)
        .map(|((s, &r), t)| s * (1.0 + t * ((r as f64).sqrt() - 1.0)))
        .collect();
    let l21 = frob.iter().zip(&dims[1..]).map(|(f, &h)| f * (h as f64).sqrt()).collect();
    BoundInputs {
        spectral_norms: spectral,
        frobenius_norms: frob,
        l21_norms: l21,
        ranks,
        dims,
        data: DataStats::worst_case(m, 1.0),
        activation_lipschitz: 1.0,
        constants: Constants::default(),
    }
}

fn network() -> impl Strategy<Value = BoundInputs> {
    (1..=5usize, 2..=2000usize).prop_flat_map(|(depth, m)| {
        (
            prop::collection::vec(1..=24usize, depth + 1),
            prop::collection::vec(1..=24usize, depth),
            prop::collection::vec(0.05f64..3.0, depth),
            prop::collection::vec(0.0f64..=1.0, depth),
        )
            .prop_map(move |(dims, raw_ranks, spectral, stable)| {
                let ranks = raw_ranks.iter().enumerate().map(|(i, r)| (*r).min(dims[i].min(dims[i + 1]))).collect();
                inputs(dims, ranks, spectral, stable, m)
            })
    })
}

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn bounds_are_finite_and_nonnegative(b in network()) {
        for v in [bound_main_full(&b), bound_main_simplified(&b), bound_golowich(&b), bound_neyshabur(&b), bound_bartlett(&b)] {
            prop_assert!(v.is_finite() && v >= 0.0);
        }
    }

    #[test]
    fn bounds_grow_with_spectral_norms(b in network(), layer in 0..5usize, factor in 1.0f64..3.0) {
        let i = layer % b.depth();
        let mut bigger = b.clone();
        bigger.spectral_norms[i] *= factor;
        bigger.frobenius_norms[i] *= factor;
        bigger.l21_norms[i] *= factor;
        for f in [bound_main_full, bound_main_simplified, bound_golowich] {
            prop_assert!(f(&bigger) >= f(&b) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn bounds_shrink_with_more_samples(b in network()) {
        let mut more = b.clone();
        more.data = DataStats::worst_case(4 * b.data.m, b.data.radius);
        for f in [bound_main_full, bound_main_simplified, bound_golowich, bound_neyshabur, bound_bartlett] {
            let (a, z) = (f(&b), f(&more));
            prop_assert!((z - a / 2.0).abs() <= 1e-9 * (1.0 + a), "{a} -> {z}");
        }
    }

    #[test]
    fn main_bounds_are_homogeneous_in_radius(b in network(), scale in 0.1f64..10.0) {
        let mut wider = b.clone();
        wider.data = DataStats::worst_case(b.data.m, scale);
        for f in [bound_main_full, bound_main_simplified, bound_golowich] {
            prop_assert!((f(&wider) - scale * f(&b)).abs() <= 1e-9 * (1.0 + scale * f(&b)));
        }
    }

    #[test]
    fn simplified_form_dominates_full_form_at_caps(b in network()) {
        // at the caps, with unit constants and worst-case data, the printed
        // simplification loses at most a factor 2√2 + 1
        let spec = NetworkSpec::new(
            b.dims.clone(),
            b.ranks.clone(),
            b.spectral_norms.clone(),
            Activation::Relu,
        ).unwrap();
        let at_caps = BoundInputs::from_caps(&spec, b.data, Constants::default()).unwrap();
        let full = bound_main_full(&at_caps);
        let simp = bound_main_simplified(&at_caps);
        prop_assert!(full <= (1.0 + 2.0 * 2f64.sqrt()) * simp * (1.0 + 1e-12), "{full} vs {simp}");
    }

    #[test]
    fn r_term_matches_direct_formula(b in network(), layer in 1..=5usize) {
        let layer = 1 + (layer - 1) % b.depth();
        let want = b.frobenius_norms[layer - 1] * (b.dims[layer] as f64).sqrt();
        prop_assert_eq!(bound_r_term(&b, layer).unwrap(), want);
    }

    #[test]
    fn single_layer_bound_scales_as_sqrt_rank(b in network()) {
        let mut doubled = b.clone();
        doubled.ranks[0] *= 4;
        let ratio = bound_single_layer(&doubled, 1).unwrap() / bound_single_layer(&b, 1).unwrap();
        prop_assert!((ratio - 2.0).abs() < 1e-12);
    }
}
