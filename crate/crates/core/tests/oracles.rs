//! Naive-loop oracles for the measure and integral engines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratolevy::diagonal::{CellRectangle, CellSet};
use stratolevy::integrals::{ito_integral, lambda_norm_sq, stratonovich_integral};
use stratolevy::measures::{
    collapse_block_atoms, ito_measure, ito_measure_enumerated, product_measure, product_measure_enumerated, AtomFamily,
    DiagonalSpec,
};
use stratolevy::partition::{enumerate_partitions, Partition};
use stratolevy::GridFunction;

fn uniform(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + b.abs())
}

#[test]
fn three_fold_measures_against_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n_cells = 5;
    let a1 = uniform(&mut rng, n_cells);
    let a2 = uniform(&mut rng, n_cells);
    let atoms = AtomFamily::registered([(1, a1.clone()), (2, a2.clone())]).unwrap();
    let rect = CellRectangle::new(vec![vec![0, 1, 3], vec![1, 2, 3, 4], vec![0, 3, 4]]).unwrap();
    let r = [1, 2, 1];
    let rows = [&a1, &a2, &a1];
    let mut full = 0.0;
    let mut distinct = 0.0;
    for i in 0..n_cells {
        for j in 0..n_cells {
            for k in 0..n_cells {
                if !rect.contains(&[i, j, k]) {
                    continue;
                }
                let w = rows[0][i] * rows[1][j] * rows[2][k];
                full += w;
                if i != j && j != k && i != k {
                    distinct += w;
                }
            }
        }
    }
    let spec = DiagonalSpec::new(CellSet::Rectangle(rect.clone()), Partition::finest(3).unwrap()).unwrap();
    assert!(close(product_measure(&atoms, &r, &spec).unwrap(), full));
    assert!(close(product_measure_enumerated(&atoms, &r, &spec).unwrap(), full));
    assert!(close(ito_measure(&atoms, &r, &spec).unwrap(), distinct));
    assert!(close(ito_measure_enumerated(&atoms, &r, &spec).unwrap(), distinct));
}

#[test]
fn rectangle_fast_paths_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=4 {
        for _ in 0..10 {
            let cells = rng.random_range(1..=4);
            let atoms = AtomFamily::registered((1..=4).map(|k| (k, uniform(&mut rng, cells)))).unwrap();
            let factors = (0..n).map(|_| (0..cells).filter(|_| rng.random_bool(0.7)).collect()).collect();
            let rect = CellRectangle::new(factors).unwrap();
            let r: Vec<usize> = (0..n).map(|_| rng.random_range(1..=4)).collect();
            for pi in enumerate_partitions(n).unwrap() {
                let spec = DiagonalSpec::new(CellSet::Rectangle(rect.clone()), pi).unwrap();
                let fast = product_measure(&atoms, &r, &spec).unwrap();
                assert!(close(fast, product_measure_enumerated(&atoms, &r, &spec).unwrap()));
                let fast = ito_measure(&atoms, &r, &spec).unwrap();
                assert!(close(fast, ito_measure_enumerated(&atoms, &r, &spec).unwrap()));
            }
        }
    }
}

#[test]
fn mobius_five_terms_on_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = uniform(&mut rng, 4);
    let atoms = AtomFamily::multiplicative(b).unwrap();
    let spec = DiagonalSpec::full(3).unwrap();
    let parts = enumerate_partitions(3).unwrap();
    assert_eq!(parts.len(), 5);
    let mut sum = 0.0;
    for sigma in &parts {
        let mu = stratolevy::partition::mobius(&Partition::finest(3).unwrap(), sigma).unwrap() as f64;
        sum += mu * product_measure(&atoms, &[1, 1, 1], &spec.with_base(sigma.clone()).unwrap()).unwrap();
    }
    assert!(close(sum, ito_measure(&atoms, &[1, 1, 1], &spec).unwrap()));
}

#[test]
fn integrals_against_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n_cells = 4;
    let a = uniform(&mut rng, n_cells);
    let vals = uniform(&mut rng, 64);
    let f = GridFunction::dense(3, n_cells, 1.0, vals.clone()).unwrap();
    let atoms = AtomFamily::multiplicative(a.clone()).unwrap();
    let (mut all, mut distinct, mut mixed) = (0.0, 0.0, 0.0);
    for i in 0..n_cells {
        for j in 0..n_cells {
            for k in 0..n_cells {
                let v = vals[(i * n_cells + j) * n_cells + k];
                all += v * a[i] * a[j] * a[k];
                if i != j && j != k && i != k {
                    distinct += v * a[i] * a[j] * a[k];
                    mixed += v * a[i] * a[j].powi(3) * a[k].powi(2);
                }
            }
        }
    }
    assert!(close(stratonovich_integral(&f, &atoms).unwrap(), all));
    assert!(close(ito_integral(&f, &[1, 1, 1], &atoms).unwrap(), distinct));
    assert!(close(ito_integral(&f, &[1, 3, 2], &atoms).unwrap(), mixed));
    let indicator = GridFunction::indicator(3, n_cells, 1.0, CellSet::Full).unwrap();
    let spec = DiagonalSpec::full(3).unwrap();
    assert!(close(
        ito_integral(&indicator, &[1, 1, 1], &atoms).unwrap(),
        ito_measure(&atoms, &[1, 1, 1], &spec).unwrap()
    ));
}

#[test]
fn lambda_norm_two_term_hand_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n_cells, horizon) = (6, 2.0);
    let vals = uniform(&mut rng, 36);
    let f = GridFunction::dense(2, n_cells, horizon, vals.clone()).unwrap();
    let h = horizon / n_cells as f64;
    let full: f64 = vals.iter().map(|v| v * v).sum();
    let diag: f64 = (0..n_cells).map(|i| vals[i * n_cells + i].powi(2)).sum();
    assert!(close(lambda_norm_sq(&f).unwrap(), h * h * full + h * diag));
}

#[test]
fn collapse_is_elementwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a1 = uniform(&mut rng, 5);
    let a2 = uniform(&mut rng, 5);
    let atoms = AtomFamily::registered([(1, a1.clone()), (2, a2.clone())]).unwrap();
    let c = collapse_block_atoms(&atoms, &[1, 2, 1], &Partition::parse("{{1,3},{2}}").unwrap()).unwrap();
    assert_eq!(c.orders(), &[2, 2]);
    for k in 0..5 {
        assert_eq!(c.atoms(0)[k], a1[k] * a1[k]);
        assert_eq!(c.atoms(1)[k], a2[k]);
    }
}

#[test]
fn stratonovich_factorises_on_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = uniform(&mut rng, 8);
    let g = uniform(&mut rng, 8);
    let h = uniform(&mut rng, 8);
    let atoms = AtomFamily::multiplicative(a.clone()).unwrap();
    let f = GridFunction::product(1.0, vec![g.clone(), h.clone()]).unwrap();
    let dot = |u: &[f64]| u.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>();
    assert!(close(stratonovich_integral(&f, &atoms).unwrap(), dot(&g) * dot(&h)));
    assert!(close(stratonovich_integral(&f.densify().unwrap(), &atoms).unwrap(), dot(&g) * dot(&h)));
}
