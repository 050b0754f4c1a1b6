//! Solver-vs-oracle agreement on randomized inputs: the bisection induced
//! measure against the plain grid scan, across every set structure tag.

use risklab::acceptance::{from_measure, hull_of_orthants, orthant_at, union, AcceptanceSet};
use risklab::measures::RiskFunctional;
use risklab::oracles::grid_induced;
use risklab::rng;
use risklab::space::{Position, ProbSpace};

const SEED: u64 = 7;

fn random_position(space: &ProbSpace, stream: u64, idx: u64, lo: f64, hi: f64) -> Position {
    let values = (0..space.len())
        .map(|j| rng::range(SEED, stream, idx * 8 + j as u64, lo, hi))
        .collect();
    space.position(values).unwrap()
}

fn random_set(space: &ProbSpace, idx: u64) -> AcceptanceSet {
    match idx % 4 {
        0 => from_measure(RiskFunctional::es(space.clone(), 0.5).unwrap()),
        1 => orthant_at(space.clone(), random_position(space, 0x10, idx, -2.0, 2.0)).unwrap(),
        2 => hull_of_orthants(
            space.clone(),
            random_position(space, 0x11, idx, -2.0, 2.0),
            random_position(space, 0x12, idx, -2.0, 2.0),
        )
        .unwrap(),
        _ => union(vec![
            orthant_at(space.clone(), random_position(space, 0x13, idx, -2.0, 2.0)).unwrap(),
            orthant_at(space.clone(), random_position(space, 0x14, idx, -2.0, 2.0)).unwrap(),
        ])
        .unwrap(),
    }
}

#[test]
fn induced_measure_matches_grid_oracle() {
    let space = ProbSpace::uniform(3).unwrap();
    let tol = 1e-9;
    let pitch = 1e-3;
    for idx in 0..1_000u64 {
        let set = random_set(&space, idx);
        let x = random_position(&space, 0x20, idx, -4.0, 4.0);
        let solver = set.induced_measure(&x, tol).unwrap();
        let oracle = grid_induced(&set, &x, (-20.0, 20.0), pitch).unwrap();
        assert!(
            (solver - oracle).abs() <= pitch + tol,
            "set {idx}: solver {solver} vs grid {oracle}"
        );
    }
}
