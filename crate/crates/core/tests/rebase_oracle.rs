mod support;

use mux_overhead::prelude::*;
use mux_overhead::router::lower_gate;
use support::{same_unitary, unitary};

fn specs() -> Vec<HardwareSpec> {
    vec![grid_spec(square_grid(1, 2).unwrap()), eagle_spec()]
}

fn one_gate(kind: GateKind, params: &[f64]) -> Circuit {
    let qs: Vec<usize> = (0..kind.arity().unwrap()).collect();
    Circuit::new(qs.len()).gate(kind, &qs, params)
}

const FRONTEND: [GateKind; 11] = [
    GateKind::H,
    GateKind::X,
    GateKind::Sx,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Cx,
    GateKind::Cz,
    GateKind::Swap,
    GateKind::ISwap,
    GateKind::Ecr,
];

#[test]
fn every_rule_preserves_the_unitary() {
    for spec in specs() {
        for kind in FRONTEND {
            for theta in [0.0, 0.37, -1.9, 3.0] {
                let params = vec![theta; kind.num_params()];
                let c = one_gate(kind, &params);
                let lowered = rebase_to_native(&c, &spec).unwrap();
                assert!(
                    same_unitary(&c, &lowered),
                    "{kind}({theta}) on {}",
                    spec.name
                );
                assert!(lowered.gates.iter().all(|g| spec.supports(g.kind)));
            }
        }
    }
}

#[test]
fn swap_from_cz_matches_permutation_matrix() {
    let spec = grid_spec(square_grid(1, 2).unwrap());
    let c = rebase_to_native(&one_gate(GateKind::Swap, &[]), &spec).unwrap();
    assert_eq!(c.count_class(GateClass::TwoPhysical), 3);
    let u = unitary(&c);
    // columns are images of |00>,|01>,|10>,|11>; swap exchanges the middle two
    let perm = [0usize, 2, 1, 3];
    let phase = u[0][0];
    for (j, col) in u.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            let expect = if i == perm[j] { phase } else { 0.0.into() };
            assert!((v - expect).norm() < 1e-9, "entry ({i},{j})");
        }
    }
}

#[test]
fn cx_rules_by_spec() {
    let grid = grid_spec(square_grid(1, 2).unwrap());
    let steps = lower_gate(GateKind::Cx, &[0, 1], &[], &grid).unwrap();
    let kinds: Vec<GateKind> = steps.iter().map(|s| s.0).collect();
    assert_eq!(kinds, vec![GateKind::H, GateKind::Cz, GateKind::H]);
    let eagle = eagle_spec();
    let steps = lower_gate(GateKind::Cx, &[0, 1], &[], &eagle).unwrap();
    assert_eq!(steps.iter().filter(|s| s.0 == GateKind::Ecr).count(), 1);
}

#[test]
fn random_three_qubit_circuits_rebase_exactly() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let grid = grid_spec(square_grid(1, 3).unwrap());
    for _ in 0..40 {
        let mut c = Circuit::new(3);
        for _ in 0..12 {
            let kind = FRONTEND[rng.random_range(0..FRONTEND.len())];
            let a = rng.random_range(0..3);
            let qs = if kind.arity() == Some(2) {
                vec![a, (a + 1 + rng.random_range(0..2)) % 3]
            } else {
                vec![a]
            };
            let ps: Vec<f64> = (0..kind.num_params()).map(|_| rng.random_range(-3.0..3.0)).collect();
            c.push(kind, &qs, &ps).unwrap();
        }
        for spec in [&grid, &eagle_spec()] {
            assert!(same_unitary(&c, &rebase_to_native(&c, spec).unwrap()));
        }
    }
}
