use nsbidico::model::augmented_objectives;
use nsbidico::problems;
use nsbidico::ranking::pareto_dominates;
use nsbidico::{initialize, step, RunConfig};

#[test]
fn identity_variation_only_reshuffles_parents() {
    let p = problems::tnk();
    let cfg = RunConfig {
        population_size: 20,
        budget: 20 * 11,
        f: 0.0,
        cr: 0.0,
        pm: Some(0.0),
        force_inherit: false,
        seed: 4,
        ..RunConfig::default()
    };
    let mut s = initialize(&cfg, &p).unwrap();
    while s.can_step(&cfg) {
        let before = s.population.members.clone();
        let feasible = before.iter().filter(|i| i.is_feasible()).count();
        let min_cv = before.iter().map(|i| i.cv).fold(f64::INFINITY, f64::min);
        step(&mut s, &cfg, &p).unwrap();
        let after = &s.population.members;
        for ind in after {
            assert!(before.iter().any(|b| b.objectives == ind.objectives));
        }
        assert!(after.iter().filter(|i| i.is_feasible()).count() >= feasible);
        assert!(after.iter().map(|i| i.cv).fold(f64::INFINITY, f64::min) <= min_cv);
    }
}

#[test]
fn archive_stays_bounded_infeasible_and_nondominated() {
    let p = problems::eq_ring();
    for seed in 0..2 {
        let cfg = RunConfig {
            population_size: 30,
            budget: 30 * 60,
            seed,
            ..RunConfig::default()
        };
        let mut s = initialize(&cfg, &p).unwrap();
        while s.can_step(&cfg) {
            step(&mut s, &cfg, &p).unwrap();
            assert!(s.archive.len() <= 30);
            assert!(s.archive.iter().all(|a| a.cv > 0.0));
            let aug: Vec<Vec<f64>> = s.archive.iter().map(augmented_objectives).collect();
            for a in &aug {
                assert!(!aug.iter().any(|b| pareto_dominates(b, a)));
            }
        }
    }
}
