mod common;

use common::*;
use psdorder_core::linmodels::{
    blue_check, efficiency_matrix, efficiency_matrix_reduced, efficiency_matrix_with_seed,
    mc_quadratic_forms, model_compare, qform_rank_criterion, LinearModel,
};
use psdorder_core::numkernel::inverse;
use psdorder_core::orders::lowner_leq;
use psdorder_core::sampling::{gaussian_matrix, random_psd};
use psdorder_core::{PsdMatrix, SymMatrix};
use psdorder_oracle as oracle;
use rand::Rng;

fn random_model<R: Rng>(r: &mut R, n: usize, p: usize) -> LinearModel {
    let x = gaussian_matrix(r, n, p);
    let rank = r.gen_range(0..=n);
    LinearModel::new(x, random_psd(r, n, rank), 1.0, "random").unwrap()
}

#[test]
fn efficiency_is_independent_of_inner_inverse() {
    let t = tol();
    let mut r = rng(400);
    for _ in 0..30 {
        let n = r.gen_range(2..=6);
        let p = r.gen_range(1..=n);
        let m = random_model(&mut r, n, p);
        let base = efficiency_matrix(&m, &t).unwrap();
        for seed in 1..=10 {
            let other = efficiency_matrix_with_seed(&m, seed, &t).unwrap();
            assert!(rel_err(&other, &base) <= 1e-8, "seed {seed}");
        }
    }
}

#[test]
fn square_models_reduce_to_d() {
    let t = tol();
    let mut r = rng(401);
    for _ in 0..30 {
        let n = r.gen_range(1..=6);
        let rank = r.gen_range(1..=n);
        let d = random_psd(&mut r, n, rank);
        let m = LinearModel::new(d.as_matrix().clone(), d.clone(), 1.0, "sq").unwrap();
        assert!(rel_err(&efficiency_matrix_reduced(&m, &t).unwrap(), &d) <= 1e-8);
    }
}

#[test]
fn square_model_comparison_follows_lowner_order_of_d() {
    let t = tol();
    let mut r = rng(402);
    for _ in 0..100 {
        let n = r.gen_range(1..=5);
        let (a, b) = int_psd_pair(&mut r, n);
        let (d1, d2) = (to_psd(&a), to_psd(&b));
        let l1 = LinearModel::new(d1.as_matrix().clone(), d1.clone(), 1.0, "1").unwrap();
        let l2 = LinearModel::new(d2.as_matrix().clone(), d2.clone(), 1.0, "2").unwrap();
        let v = model_compare(&l1, &l2, &t).unwrap();
        assert_eq!(v.l1_geq_l2, oracle::lowner_leq(&to_q(&b), &to_q(&a)), "D1={a:?} D2={b:?}");
        assert_eq!(v.l2_geq_l1, oracle::lowner_leq(&to_q(&a), &to_q(&b)));
        assert_eq!(v.l1_geq_l2, lowner_leq(&d2, &d1, &t).unwrap().holds);
    }
}

#[test]
fn comparison_is_a_preorder() {
    let t = tol();
    let mut r = rng(403);
    for _ in 0..20 {
        let n = r.gen_range(2..=6);
        let p = r.gen_range(1..=n);
        let m = random_model(&mut r, n, p);
        let v = model_compare(&m, &m, &t).unwrap();
        assert!(v.l1_geq_l2 && v.l2_geq_l1);

        // Adding noise covariance makes a model worse: D ≤ D' ≤ D''.
        let worse = LinearModel::new(m.x.clone(), PsdMatrix::certify(m.d.add(&random_psd(&mut r, n, 1)).unwrap(), &t).unwrap(), 1.0, "w").unwrap();
        let worst = LinearModel::new(m.x.clone(), PsdMatrix::certify(worse.d.add(&random_psd(&mut r, n, 2)).unwrap(), &t).unwrap(), 1.0, "ww").unwrap();
        assert!(model_compare(&m, &worse, &t).unwrap().l1_geq_l2);
        assert!(model_compare(&worse, &worst, &t).unwrap().l1_geq_l2);
        assert!(model_compare(&m, &worst, &t).unwrap().l1_geq_l2);
    }
}

#[test]
fn gauss_markov_hat_matrix_is_blue() {
    let t = tol();
    let mut r = rng(404);
    for _ in 0..50 {
        let n = r.gen_range(2..=10);
        let p = r.gen_range(1..n);
        let x = gaussian_matrix(&mut r, n, p);
        let h = x
            .matmul(&inverse(&x.transpose().matmul(&x).unwrap(), &t).unwrap())
            .unwrap()
            .matmul(&x.transpose())
            .unwrap();
        let m = LinearModel::new(x, PsdMatrix::identity(n), r.gen_range(0.5..2.0), "gm").unwrap();
        let v = blue_check(&h, &m, &t).unwrap();
        assert!(v.cond_i && v.cond_ii && v.cond_iii, "{v:?}");
        let sc = v.sim_cong.unwrap();
        assert_eq!((sc.r, sc.s), (p, n));
    }
}

#[test]
fn qform_criterion_matches_exact_rank_additivity() {
    let t = tol();
    let mut r = rng(405);
    let mut seen = [0usize; 2];
    for _ in 0..100 {
        let n = r.gen_range(2..=5);
        // Split an integer factor's columns into groups: A_i = G_i G_iᵗ.
        let k = r.gen_range(1..=n + 1);
        let g = int_factor(&mut r, n, k);
        let groups = r.gen_range(1..=k.min(3));
        let assign: Vec<usize> = (0..k).map(|_| r.gen_range(0..groups)).collect();
        let forms_i: Vec<Vec<Vec<i64>>> = (0..groups)
            .map(|gi| {
                let keep: Vec<usize> = (0..k).filter(|&j| assign[j] == gi).collect();
                int_gram(&columns(&g, &keep))
            })
            .collect();
        let total = int_gram(&g);
        // V = I, μ = 0: WᵗAW = diag(A, 0), so ranks are those of A_i and A.
        let ranks: Vec<usize> = forms_i.iter().map(|f| oracle::rank(&to_q(f))).collect();
        let want = forms_i
            .iter()
            .all(|f| oracle::minus_leq(&to_q(f), &to_q(&total)));
        let forms: Vec<PsdMatrix> = forms_i.iter().map(|f| to_psd(f)).collect();
        let rep = qform_rank_criterion(&forms, &PsdMatrix::identity(n), &vec![0.0; n], &t).unwrap();
        assert_eq!(rep.overall, want);
        assert_eq!(rep.forms.iter().map(|f| f.rank).collect::<Vec<_>>(), ranks);
        assert_eq!(rep.s, oracle::rank(&to_q(&total)));
        seen[want as usize] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn monte_carlo_tracks_rank_criterion() {
    let t = tol();
    let v = PsdMatrix::identity(4);
    let mu = [0.0; 4];
    let d = |x: &[f64]| PsdMatrix::certify(SymMatrix::diag(x), &t).unwrap();
    let cochran = [d(&[1.0, 0.0, 0.0, 0.0]), d(&[0.0, 1.0, 1.0, 0.0]), d(&[0.0, 0.0, 0.0, 1.0])];
    assert!(qform_rank_criterion(&cochran, &v, &mu, &t).unwrap().overall);
    let rep = mc_quadratic_forms(&cochran, &v, &mu, 40_000, 17, &t).unwrap();
    assert!(rep.max_abs_correlation < 0.03, "{rep:?}");
    assert!(rep.ks.iter().all(|&k| k < 0.015), "{:?}", rep.ks);

    let overlapping = [d(&[1.0, 1.0, 0.0, 0.0]), d(&[0.0, 1.0, 1.0, 0.0])];
    assert!(!qform_rank_criterion(&overlapping, &v, &mu, &t).unwrap().overall);
    let same = [d(&[1.0, 0.0, 0.0, 0.0]), d(&[1.0, 0.0, 0.0, 0.0])];
    let rep = mc_quadratic_forms(&same, &v, &mu, 20_000, 18, &t).unwrap();
    assert!(rep.max_abs_correlation > 0.5);
}

#[test]
fn correlated_covariance_is_sampled_through_its_root() {
    let t = tol();
    let v = PsdMatrix::certify(SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(), &t).unwrap();
    // A = V⁻¹ makes xᵗAx ~ χ²(2) for x ~ N(0, V).
    let a = PsdMatrix::certify(
        SymMatrix::symmetrized(inverse(v.as_matrix(), &t).unwrap()).unwrap().0,
        &t,
    )
    .unwrap();
    let rep = mc_quadratic_forms(&[a], &v, &[0.0, 0.0], 40_000, 5, &t).unwrap();
    assert_eq!(rep.df, vec![2]);
    assert!(rep.ks[0] < 0.015);
    assert!((rep.means[0] - 2.0).abs() < 0.05);
}
