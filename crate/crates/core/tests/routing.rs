mod support;

use mux_overhead::prelude::*;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{phase_distance, random_state, run};

fn line(n: usize) -> HardwareSpec {
    grid_spec(CouplingMap::new(n, (1..n).map(|i| (i - 1, i))).unwrap())
}

/// Smallest number of swaps after which `a` and `b` are adjacent (breadth-first over layouts).
fn min_swaps(map: &CouplingMap, a: usize, b: usize, limit: usize) -> Option<usize> {
    let mut frontier = vec![(0..map.n).collect::<Vec<_>>()];
    for depth in 0..=limit {
        let mut next = Vec::new();
        for pos in &frontier {
            if map.has_edge(pos[a], pos[b]) {
                return Some(depth);
            }
            for &(p, q) in &map.edges {
                let mut np = pos.clone();
                for x in np.iter_mut() {
                    if *x == p {
                        *x = q;
                    } else if *x == q {
                        *x = p;
                    }
                }
                next.push(np);
            }
        }
        frontier = next;
    }
    None
}

#[test]
fn distant_cz_on_line_needs_one_swap() {
    let spec = line(3);
    assert_eq!(min_swaps(&spec.coupling, 0, 2, 2), Some(1));
    let r = route(&Circuit::new(3).cz(0, 2).with_durations(&spec).unwrap(), &spec, 0).unwrap();
    assert_eq!(r.swap_count, 1);
}

fn random_native(spec: &HardwareSpec, n: usize, gates: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    for _ in 0..gates {
        if rng.random::<f64>() < 0.5 {
            let kind = [GateKind::H, GateKind::Rz, GateKind::Rx][rng.random_range(0..3)];
            let ps: Vec<f64> = (0..kind.num_params()).map(|_| rng.random_range(0.0..6.0)).collect();
            c.push(kind, &[rng.random_range(0..n)], &ps).unwrap();
        } else {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            c.push(GateKind::Cz, &[a, b], &[]).unwrap();
        }
    }
    c.with_durations(spec).unwrap()
}

/// Expected device state: logical qubit `l` sits on `layout[l]`, idle device qubits in |0>.
fn relabel(psi: &[C], n: usize, n_dev: usize, layout: &[usize]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); 1 << n_dev];
    for (idx, amp) in psi.iter().enumerate() {
        let mut p = 0;
        for l in 0..n {
            if idx & (1 << (n - 1 - l)) != 0 {
                p |= 1 << (n_dev - 1 - layout[l]);
            }
        }
        out[p] = *amp;
    }
    out
}

#[test]
fn routed_circuits_implement_the_logical_circuit_up_to_layout() {
    let specs = [line(5), grid_spec(square_grid(2, 3).unwrap())];
    for spec in &specs {
        let n_dev = spec.coupling.n;
        for seed in 0..60u64 {
            let n = 3 + (seed as usize % (n_dev - 2));
            let c = random_native(spec, n, 14, seed);
            let r = route(&c, spec, seed).unwrap();
            for g in &r.circuit.gates {
                assert!(spec.supports(g.kind));
                if g.is_two_physical() {
                    assert!(spec.coupling.has_edge(g.qubits[0], g.qubits[1]));
                }
            }
            let psi = random_state(n, seed);
            let mut input = vec![C::new(0.0, 0.0); 1 << n_dev];
            input[..].copy_from_slice(&relabel(&psi, n, n_dev, &(0..n).collect::<Vec<_>>()));
            let got = run(&r.circuit, &input);
            let want = relabel(&run(&c, &psi), n, n_dev, &r.layout);
            assert!(phase_distance(&want, &got) < 1e-9, "seed {seed} on {}", spec.name);
        }
    }
}

#[test]
fn interaction_multiset_is_preserved() {
    let spec = grid_spec(square_grid(2, 4).unwrap());
    for seed in 0..50u64 {
        let c = random_native(&spec, 8, 40, seed);
        let r = route(&c, &spec, seed).unwrap();
        let mut used = vec![0usize; c.len()];
        for (g, origin) in r.circuit.gates.iter().zip(&r.origin) {
            if let Some(i) = origin {
                used[*i] += 1;
                assert_eq!(g.kind, c.gates[*i].kind);
                assert_eq!(g.params, c.gates[*i].params);
            }
        }
        assert!(used.iter().all(|&u| u == 1));
        // replay the swaps to recover the logical qubits of every routed gate
        let mut p2l: Vec<usize> = (0..spec.coupling.n).collect();
        let mut swaps = r.swaps.iter().peekable();
        for (pos, (g, origin)) in r.circuit.gates.iter().zip(&r.origin).enumerate() {
            while let Some(s) = swaps.peek() {
                if s.position != pos {
                    break;
                }
                p2l.swap(s.physical.0, s.physical.1);
                swaps.next();
            }
            if let Some(i) = origin {
                let logical: Vec<usize> = g.qubits.iter().map(|&p| p2l[p]).collect();
                assert_eq!(logical, c.gates[*i].qubits);
            }
        }
    }
}

#[test]
fn routing_is_deterministic_per_seed() {
    let spec = grid_spec(square_grid(5, 5).unwrap());
    let c = rebase_to_native(
        &random_circuit(&RandomCircuitConfig::new(25, 500, 3), &spec).unwrap(),
        &spec,
    )
    .unwrap();
    assert_eq!(route(&c, &spec, 4).unwrap(), route(&c, &spec, 4).unwrap());
}

#[test]
fn heavy_hex_routing_stays_on_edges() {
    let spec = eagle_spec();
    let logical = algo_circuit(Algorithm::Qft, 12, 0).unwrap();
    let r = route(&rebase_to_native(&logical, &spec).unwrap(), &spec, 1).unwrap();
    for g in &r.circuit.gates {
        if g.is_two_physical() {
            assert!(spec.coupling.has_edge(g.qubits[0], g.qubits[1]));
        }
    }
    assert!(r.swap_count > 0);
}
