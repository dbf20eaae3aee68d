mod support;

use ndarray::Array2;
use panelfactor::factor::{
    covariance, estimate_factors, ic_value, select_num_factors, sym_eigen, variance_explained, FactorModel,
    IcValue, Penalty,
};
use panelfactor::panel::standardize;
use panelfactor::synth::{generate, SynthSpec};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use support::{random_matrix, random_panel, standardized};

#[test]
fn covariance_matches_double_loop() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    let z = standardized(&random_matrix(&mut rng, 5, 50));
    let s = covariance(&z).unwrap();
    let y = z.data();
    for i in 0..5 {
        assert!((s[[i, i]] - 1.0).abs() < 1e-10);
        for j in 0..5 {
            let mut acc = 0.0;
            for t in 0..50 {
                acc += y[[i, t]] * y[[j, t]];
            }
            assert!((s[[i, j]] - acc / 50.0).abs() < 1e-12);
            assert_eq!(s[[i, j]], s[[j, i]]);
        }
    }
}

#[test]
fn model_invariants_on_random_panels() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(17);
    for _ in 0..10 {
        let z = random_panel(&mut rng, 9, 40);
        let (q, t) = (9usize, 40usize);
        let e = sym_eigen(&covariance(&z).unwrap()).unwrap();
        assert!((e.total() - q as f64).abs() < 1e-6);
        assert!(e.eigenvalues.iter().all(|&l| l >= -1e-8));

        let mut prev_ssr = f64::INFINITY;
        for r in 1..=q {
            let m = FactorModel::from_eigen(&z, &e, r).unwrap();
            let ll = m.loadings.t().dot(&m.loadings) / q as f64;
            for ((i, j), v) in ll.indexed_iter() {
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
            }
            let ff = m.factors.dot(&m.factors.t()) / t as f64;
            for ((i, j), v) in ff.indexed_iter() {
                let want = if i == j { e.eigenvalues[i] / q as f64 } else { 0.0 };
                assert!((v - want).abs() < 1e-8);
            }
            let ssr = m.ssr();
            assert!(ssr <= prev_ssr + 1e-9);
            // SSR(r) = T · Σ_{j>r} λ_j
            let tail: f64 = e.eigenvalues[r..].iter().sum();
            assert!((ssr - t as f64 * tail).abs() < 1e-8 * (1.0 + ssr));
            prev_ssr = ssr;
        }
        let full = FactorModel::from_eigen(&z, &e, q).unwrap();
        assert!(full.residuals.iter().all(|v| v.abs() < 1e-10));
        let rebuilt = full.loadings.dot(&full.factors) + &full.residuals;
        for (a, b) in rebuilt.iter().zip(z.data().iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn loadings_are_bit_identical_across_runs() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    let z = random_panel(&mut rng, 15, 60);
    assert_eq!(estimate_factors(&z, 4).unwrap(), estimate_factors(&z, 4).unwrap());
}

fn planted(q: usize, t: usize, r: usize, noise_sd: f64, seed: u64) -> panelfactor::panel::StandardizedPanel {
    let s = generate(&SynthSpec {
        q,
        t,
        r_true: r,
        noise_sd,
        seed,
    })
    .unwrap();
    standardize(&s.panel).unwrap()
}

#[test]
fn planted_two_factor_noiseless_share() {
    let z = planted(12, 40, 2, 0.0, 1);
    let e = sym_eigen(&covariance(&z).unwrap()).unwrap();
    assert!((variance_explained(&e, 2).unwrap() - 1.0).abs() < 1e-10);
    assert!(e.eigenvalues[2..].iter().all(|l| l.abs() < 1e-8));
    assert_eq!(variance_explained(&e, 12).unwrap(), 1.0);
}

#[test]
fn planted_three_factor_curve_minimised_at_three() {
    // loadings of equal norm keep the idiosyncratic share equal across series
    // after standardization, so the noise eigenvalues stay tightly clustered
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(42);
    let (q, t) = (60, 120);
    let mut l = random_matrix(&mut rng, q, 3);
    for mut row in l.rows_mut() {
        let norm = row.dot(&row).sqrt();
        row.mapv_inplace(|v| v / norm);
    }
    let f = random_matrix(&mut rng, 3, t);
    let noise = random_matrix(&mut rng, q, t);
    let z = standardized(&(l.dot(&f) + noise * 0.1));
    let report = select_num_factors(&z, 10, &Penalty::ALL).unwrap();
    for p in Penalty::ALL {
        // brute force: score each r on its own and take the smallest
        let curve: Vec<f64> = (1..=10).map(|r| ic_value(&z, r, p).unwrap().as_f64()).collect();
        let best = (0..10).min_by(|&a, &b| curve[a].total_cmp(&curve[b])).unwrap() + 1;
        assert_eq!(best, 3, "{p}: {curve:?}");
        assert_eq!(report.selected_for(p), Some(3));
        for (a, b) in report.curve(p).unwrap().iter().zip(&curve) {
            assert!((a.as_f64() - b).abs() < 1e-9);
        }
    }
}

#[test]
fn noiseless_rank_two_selects_two() {
    let z = planted(20, 50, 2, 0.0, 8);
    let report = select_num_factors(&z, 10, &Penalty::ALL).unwrap();
    for p in Penalty::ALL {
        assert_eq!(report.selected_for(p), Some(2));
        assert_eq!(report.curve(p).unwrap()[1], IcValue::ExactFit);
    }
}

#[test]
fn selection_errors() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    let z = standardized(&random_matrix(&mut rng, 4, 10));
    assert!(select_num_factors(&z, 0, &Penalty::ALL).is_err());
    assert!(select_num_factors(&z, 5, &Penalty::ALL).is_err());
    assert!(select_num_factors(&z, 3, &[]).is_err());
    let r = select_num_factors(&z, 4, &[Penalty::G2, Penalty::G2]).unwrap();
    assert_eq!(r.curves.len(), 1);
    assert_eq!(r.curves[0].1.len(), 4);
}

#[test]
fn rank_one_outer_product() {
    let a: Vec<f64> = (0..6).map(|i| 1.0 + i as f64 * 0.3).collect();
    let b: Vec<f64> = (0..20).map(|t| ((t * 7 % 11) as f64) - 5.0).collect();
    let z = standardized(&Array2::from_shape_fn((6, 20), |(i, t)| a[i] * b[t]));
    let m = estimate_factors(&z, 1).unwrap();
    assert!((m.eigenvalues[0] - 6.0).abs() < 1e-10);
    assert!(m.residuals.iter().all(|v| v.abs() < 1e-10));
}
