mod common;

use common::{csr, gaussian, sparse_like};
use ndarray::{array, s, Array2};
use proptest::prelude::*;
use streampca::algorithms::{Checkpoint, RunResult};
use streampca::metrics::{covariance_spectrum, offline_topk_with, OfflineMethod};
use streampca::{
    eval_curve, explained_variance, init_basis, offline_topk, orthonormalize, Basis, Dataset,
    Error, RunConfig,
};

/// Data with a decaying column scale so the spectrum has clear gaps.
fn shaped(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut x = gaussian(n, d, seed);
    for (j, mut col) in x.columns_mut().into_iter().enumerate() {
        col *= 1.0 / (1.0 + j as f64);
    }
    x.dot(&init_basis(d, d, seed ^ 77).unwrap().columns())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ev_depends_only_on_the_subspace(n in 2usize..40, d in 2usize..12, kf in 0.0f64..1.0, seed in any::<u64>()) {
        let k = 1 + ((d - 1) as f64 * kf) as usize;
        let data = Dataset::Dense(gaussian(n, d, seed));
        let w = init_basis(d, k, seed ^ 3).unwrap();
        let rot = init_basis(k, k, seed ^ 4).unwrap();
        let rotated = Basis::from_orthonormal(w.columns().dot(&rot.columns())).unwrap();
        let a = explained_variance(&data, &w).unwrap();
        let b = explained_variance(&data, &rotated).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }
}

#[test]
fn offline_subspace_is_maximal() {
    for dataset in 0..20u64 {
        let x = gaussian(50, 8, dataset);
        let data = Dataset::Dense(x);
        let best = explained_variance(&data, &offline_topk(&data, 3).unwrap()).unwrap();
        for trial in 0..100 {
            let w = init_basis(8, 3, 1000 * dataset + trial).unwrap();
            assert!(explained_variance(&data, &w).unwrap() <= best + 1e-12);
        }
    }
}

#[test]
fn offline_ev_is_eigenvalue_ratio() {
    for seed in 0..10 {
        let data = Dataset::Dense(gaussian(40, 9, seed));
        let lambda = covariance_spectrum(&data);
        let total = lambda.sum();
        for k in 1..=9 {
            let ev = explained_variance(&data, &offline_topk(&data, k).unwrap()).unwrap();
            let ratio = lambda.slice(s![..k]).sum() / total;
            assert!((ev - ratio).abs() < 1e-10, "seed {seed} k {k}");
        }
    }
}

#[test]
fn offline_ev_grows_with_k() {
    for seed in 0..5 {
        let data = Dataset::Dense(gaussian(30, 10, seed));
        let lambda = covariance_spectrum(&data);
        let evs: Vec<f64> = (1..=10)
            .map(|k| explained_variance(&data, &offline_topk(&data, k).unwrap()).unwrap())
            .collect();
        for k in 1..10 {
            assert!(evs[k] >= evs[k - 1]);
            if lambda[k] > 1e-12 * lambda[0] {
                assert!(evs[k] > evs[k - 1]);
            }
        }
    }
}

#[test]
fn dominant_direction() {
    let data = Dataset::Dense(array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    let q = offline_topk(&data, 1).unwrap();
    assert!((q.column(0)[0].abs() - 1.0).abs() < 1e-12);
}

#[test]
fn orthogonal_iteration_matches_dense() {
    let data = Dataset::Dense(shaped(300, 100, 5));
    for k in [1, 5, 10] {
        let dense = offline_topk_with(&data, k, OfflineMethod::Dense).unwrap();
        let iter = offline_topk_with(&data, k, OfflineMethod::OrthogonalIteration).unwrap();
        let a = explained_variance(&data, &dense).unwrap();
        let b = explained_variance(&data, &iter).unwrap();
        assert!((a - b).abs() < 1e-8, "k {k}: {a} vs {b}");
    }
}

#[test]
fn sparse_and_dense_metrics_agree() {
    let x = sparse_like(60, 25, 0.2, 3);
    let dense = Dataset::Dense(x.clone());
    let sparse = Dataset::Sparse(csr(&x));
    let w = init_basis(25, 4, 1).unwrap();
    let a = explained_variance(&dense, &w).unwrap();
    let b = explained_variance(&sparse, &w).unwrap();
    assert!((a - b).abs() < 1e-12);
    let top_d = explained_variance(&dense, &offline_topk(&dense, 4).unwrap()).unwrap();
    let top_s = explained_variance(
        &sparse,
        &offline_topk_with(&sparse, 4, OfflineMethod::OrthogonalIteration).unwrap(),
    )
    .unwrap();
    assert!((top_d - top_s).abs() < 1e-8);
}

#[test]
fn rank_limits_offline_k() {
    let x = gaussian(3, 10, 0);
    let data = Dataset::Dense(x);
    assert!(offline_topk(&data, 3).is_ok());
    assert!(matches!(
        offline_topk(&data, 4),
        Err(Error::RankDeficient { .. })
    ));
    let zero = Dataset::Dense(Array2::zeros((4, 3)));
    assert!(matches!(
        explained_variance(&zero, &init_basis(3, 1, 0).unwrap()),
        Err(Error::Degenerate(_))
    ));
}

#[test]
fn single_checkpoint_curve() {
    let data = Dataset::Dense(gaussian(20, 6, 2));
    let top = offline_topk(&data, 2).unwrap();
    let result = RunResult {
        algorithm: "offline".into(),
        config: RunConfig::new(2, 20, 0),
        schedule: None,
        final_basis: top.clone(),
        checkpoints: vec![Checkpoint {
            samples_seen: 20,
            basis: top.clone(),
        }],
        blocks: 1,
        samples: 20,
        stream_digest: String::new(),
    };
    let curve = eval_curve(&data, &result, "g").unwrap();
    assert_eq!(
        curve.points,
        vec![(20, explained_variance(&data, &top).unwrap())]
    );
    assert_eq!(curve.dataset, "g");
}

#[test]
fn orthogonal_rows_score_zero() {
    let data = Dataset::Dense(array![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
    let w = orthonormalize(array![[0.0], [1.0], [1.0]].view()).unwrap();
    assert!(explained_variance(&data, &w).unwrap() < 1e-15);
}
