//! Simulator, special-case and Monte Carlo checks.

use stratolevy::integrals::{hu_meyer_terms, ito_bound, ito_integral, stratonovich_integral, GridFunction};
use stratolevy::levy::{moments, replica_seed, simulate, JumpLaw, LevyModel};
use stratolevy::measures::{diagonal_measure_refinement, AtomFamily};
use stratolevy::special::{
    brownian_hu_meyer, jump_measure_hu_meyer, jump_measure_ito, jump_measure_stratonovich, poisson_reduced_integral,
    JumpMeasure, QuadraticVariation,
};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn gamma_moments_by_monte_carlo() {
    let eps = 1e-3;
    let model = LevyModel::gamma(eps, 2.0).unwrap();
    let (x1, x2): (Vec<f64>, Vec<f64>) = (0..4000)
        .map(|r| {
            let p = simulate(&model, 16, replica_seed(11, r)).unwrap();
            (p.variation_total(1).unwrap(), p.variation_total(2).unwrap())
        })
        .unzip();
    let (m1, se1) = mean_and_se(&x1);
    // E[X_T] = T ∫_ε^∞ e^{-x} dx
    assert!((m1 - 2.0 * (-eps).exp()).abs() < 4.0 * se1, "{m1} ± {se1}");
    let (m2, se2) = mean_and_se(&x2);
    let want = 2.0 * (1.0 + eps) * (-eps).exp();
    assert!((m2 - want).abs() < 4.0 * se2, "{m2} ± {se2}");
}

#[test]
fn compound_poisson_counts() {
    let model = LevyModel::compound_poisson(3.0, JumpLaw::Uniform { low: 0.5, high: 1.5 }, false, 2.0).unwrap();
    let counts: Vec<f64> =
        (0..4000).map(|r| simulate(&model, 8, replica_seed(5, r)).unwrap().jumps().len() as f64).collect();
    let (m, se) = mean_and_se(&counts);
    assert!((m - 6.0).abs() < 4.0 * se);
    let sums: Vec<f64> =
        (0..4000).map(|r| simulate(&model, 8, replica_seed(5, r)).unwrap().variation_total(1).unwrap()).collect();
    let (m, se) = mean_and_se(&sums);
    assert!((m - 6.0).abs() < 4.0 * se);
}

#[test]
fn brownian_quadratic_variation_concentrates() {
    let model = LevyModel::brownian(1.5, 0.0, 1.0).unwrap();
    let levels = [2, 5, 9];
    let mut gaps = vec![Vec::new(); levels.len()];
    for r in 0..400 {
        let path = simulate(&model, 512, replica_seed(3, r)).unwrap();
        let all: Vec<usize> = (0..512).collect();
        let s = diagonal_measure_refinement(&path, 2, &all, &levels).unwrap();
        assert_eq!(s.reference, 2.25);
        for (g, v) in gaps.iter_mut().zip(&s.values) {
            g.push((v - s.reference).powi(2));
        }
    }
    let means: Vec<f64> = gaps.iter().map(|g| mean_and_se(g).0).collect();
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
    // E[(Σ ΔW² − σ²T)²] = 2σ⁴T²/N
    assert!((means[2] - 2.0 * 2.25f64.powi(2) / 512.0).abs() < 0.003);
}

#[test]
fn brownian_variation_kills_higher_blocks() {
    let model = LevyModel::brownian(1.0, 0.2, 1.0).unwrap();
    let path = simulate(&model, 4, 9).unwrap();
    let atoms = AtomFamily::from_path_variations(&path, 4).unwrap();
    let f = GridFunction::dense(4, 4, 1.0, (0..256).map(|k| (k % 7) as f64 - 3.0).collect()).unwrap();
    for term in hu_meyer_terms(&f).unwrap() {
        if term.orders.iter().any(|&o| o >= 3) {
            assert_eq!(term.evaluate(&atoms).unwrap(), 0.0, "{}", term.sigma);
        }
    }
}

#[test]
fn brownian_second_chaos() {
    let model = LevyModel::brownian(1.0, 0.0, 1.0).unwrap();
    let path = simulate(&model, 256, 21).unwrap();
    let one = GridFunction::constant(2, 256, 1.0, 1.0).unwrap();
    let w: f64 = path.base_increments().iter().sum();
    // the empirical variant is the exact discrete Hu–Meyer identity
    let empirical = brownian_hu_meyer(&one, &path, QuadraticVariation::Empirical).unwrap();
    assert!((empirical - w * w).abs() < 1e-10 * (1.0 + w * w));
    let limit = brownian_hu_meyer(&one, &path, QuadraticVariation::Deterministic).unwrap();
    let qv: f64 = path.base_increments().iter().map(|x| x * x).sum();
    assert!((limit - (w * w - qv + 1.0)).abs() < 1e-10);
    let jumpy = simulate(&LevyModel::compensated_poisson(1.0, 1.0).unwrap(), 256, 1).unwrap();
    assert!(brownian_hu_meyer(&one, &jumpy, QuadraticVariation::Deterministic).is_err());
}

#[test]
fn brownian_third_chaos_mean_square() {
    let model = LevyModel::brownian(1.0, 0.0, 1.0).unwrap();
    let n_cells = 256;
    let g: Vec<f64> = (0..n_cells).map(|k| ((k + 1) as f64 / n_cells as f64).cos()).collect();
    let f = GridFunction::tensor_power(1.0, g.clone(), 3).unwrap();
    let g1 = GridFunction::tensor_power(1.0, g.clone(), 1).unwrap();
    let int_g2: f64 = g.iter().map(|x| x * x).sum::<f64>() / n_cells as f64;
    let gaps: Vec<f64> = (0..400)
        .map(|r| {
            let path = simulate(&model, n_cells, replica_seed(8, r)).unwrap();
            let atoms = AtomFamily::from_path_increments(&path);
            let i1 = ito_integral(&g1, &[1], &atoms).unwrap();
            let i3 = ito_integral(&f, &[1, 1, 1], &atoms).unwrap();
            (i1.powi(3) - i3 - 3.0 * i1 * int_g2).powi(2)
        })
        .collect();
    let (m, _) = mean_and_se(&gaps);
    assert!(m < 0.05, "{m}");
}

#[test]
fn poisson_reduction_is_exact_on_the_grid() {
    let model = LevyModel::compensated_poisson(2.5, 1.0).unwrap();
    for seed in 0..10 {
        let path = simulate(&model, 8, seed).unwrap();
        let atoms = AtomFamily::from_path_variations(&path, 3).unwrap();
        for r in [vec![2], vec![1, 2], vec![3, 2], vec![2, 1, 3], vec![1, 1, 1]] {
            let n = r.len();
            let f =
                GridFunction::dense(n, 8, 1.0, (0..8usize.pow(n as u32)).map(|k| ((k * 5) % 9) as f64 - 4.0).collect())
                    .unwrap();
            let direct = ito_integral(&f, &r, &atoms).unwrap();
            let reduced = poisson_reduced_integral(&f, &r, &path).unwrap();
            assert!((direct - reduced).abs() <= 1e-10 * (1.0 + direct.abs()), "{r:?}: {direct} vs {reduced}");
        }
    }
}

#[test]
fn pathwise_hu_meyer_on_subordinators() {
    let f = |t: &[f64]| t.iter().enumerate().map(|(k, x)| (x * (k + 1) as f64).sin() + 1.5).product::<f64>();
    let models = [
        LevyModel::compound_poisson(4.0, JumpLaw::Exponential { mean: 0.7 }, false, 1.0).unwrap(),
        LevyModel::gamma(0.05, 1.0).unwrap(),
    ];
    for model in &models {
        for seed in 0..5 {
            let jm = JumpMeasure::from_path(&simulate(model, 4, seed).unwrap()).unwrap();
            for n in 1..=3 {
                let lhs = jump_measure_stratonovich(&f, n, &jm).unwrap();
                let rhs = jump_measure_hu_meyer(&f, n, &jm).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
            }
        }
    }
    let g = |t: &[f64]| 1.0 + t[0];
    let path = simulate(&models[0], 4, 1).unwrap();
    let jm = JumpMeasure::from_path(&path).unwrap();
    let want: f64 = jm.jumps().iter().map(|j| (1.0 + j.time) * j.size).sum();
    let prod = |t: &[f64]| t.iter().map(|x| 1.0 + x).product::<f64>();
    assert!((jump_measure_stratonovich(&prod, 3, &jm).unwrap() - want.powi(3)).abs() < 1e-10 * want.powi(3));
    assert!((jump_measure_ito(&g, &[1], &jm).unwrap() - want).abs() < 1e-12);
}

#[test]
fn pathwise_ito_matches_grid() {
    let model = LevyModel::compound_poisson(5.0, JumpLaw::Constant(1.0), false, 1.0).unwrap();
    let f = |t: &[f64]| (t[0] - t[1]).cos() + t[0];
    let path = simulate(&model, 1024, 17).unwrap();
    let jm = JumpMeasure::from_path(&path).unwrap();
    let exact = jump_measure_ito(&f, &[1, 1], &jm).unwrap();
    let grid = GridFunction::from_time_fn(2, 1024, 1.0, move |t: &[f64]| f(t)).unwrap();
    let atoms = AtomFamily::from_path_variations(&path, 1).unwrap();
    let approx = ito_integral(&grid, &[1, 1], &atoms).unwrap();
    let mass = jm.mass();
    // Lipschitz constant 3 in each argument
    assert!((exact - approx).abs() <= 3.0 * 2.0 / 1024.0 * mass * mass, "{exact} vs {approx}");
}

#[test]
fn first_order_isometry_and_bound() {
    let model = LevyModel::compensated_poisson(2.0, 1.0).unwrap();
    let k = moments(&model, 2).unwrap();
    let n_cells = 32;
    let g: Vec<f64> = (0..n_cells).map(|c| (c as f64 / 8.0).sin()).collect();
    let f = GridFunction::tensor_power(1.0, g.clone(), 1).unwrap();
    let bound = ito_bound(&f, &[1], &k).unwrap();
    let sq: Vec<f64> = (0..8000)
        .map(|r| {
            let p = simulate(&model, n_cells, replica_seed(4, r)).unwrap();
            stratonovich_integral(&f, &AtomFamily::from_path_increments(&p)).unwrap().powi(2)
        })
        .collect();
    let (m, se) = mean_and_se(&sq);
    let exact = 2.0 / n_cells as f64 * g.iter().map(|x| x * x).sum::<f64>();
    assert!((m - exact).abs() < 4.0 * se);
    assert!(m <= bound);
}

#[test]
fn second_order_bound_brownian() {
    let model = LevyModel::brownian(1.0, 0.0, 1.0).unwrap();
    let k = moments(&model, 2).unwrap();
    let one = GridFunction::constant(2, 64, 1.0, 1.0).unwrap();
    // E[I_2(1)²] = 2T²(1 − 1/N) on the grid
    assert!(ito_bound(&one, &[1, 1], &k).unwrap() >= 2.0);
}
