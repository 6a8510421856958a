//! Dense state-vector simulator used as an independent oracle in tests.
#![allow(dead_code)]

use mux_overhead::circuit::{Circuit, GateKind};
use num_complex::Complex64 as C;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Row-major matrix of a gate; for two-qubit gates the first listed qubit is the
/// most significant index bit.
pub fn matrix(kind: GateKind, params: &[f64]) -> Vec<Vec<C>> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match kind {
        GateKind::H => vec![vec![c(s2, 0.0), c(s2, 0.0)], vec![c(s2, 0.0), c(-s2, 0.0)]],
        GateKind::X => vec![vec![z, o], vec![o, z]],
        GateKind::Sx => vec![
            vec![c(0.5, 0.5), c(0.5, -0.5)],
            vec![c(0.5, -0.5), c(0.5, 0.5)],
        ],
        GateKind::Rx => {
            let (co, si) = ((params[0] / 2.0).cos(), (params[0] / 2.0).sin());
            vec![vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]
        }
        GateKind::Ry => {
            let (co, si) = ((params[0] / 2.0).cos(), (params[0] / 2.0).sin());
            vec![vec![c(co, 0.0), c(-si, 0.0)], vec![c(si, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz => {
            let h = params[0] / 2.0;
            vec![vec![C::from_polar(1.0, -h), z], vec![z, C::from_polar(1.0, h)]]
        }
        GateKind::Cx => vec![
            vec![o, z, z, z],
            vec![z, o, z, z],
            vec![z, z, z, o],
            vec![z, z, o, z],
        ],
        GateKind::Cz => vec![
            vec![o, z, z, z],
            vec![z, o, z, z],
            vec![z, z, o, z],
            vec![z, z, z, -o],
        ],
        GateKind::Swap => vec![
            vec![o, z, z, z],
            vec![z, z, o, z],
            vec![z, o, z, z],
            vec![z, z, z, o],
        ],
        GateKind::ISwap => vec![
            vec![o, z, z, z],
            vec![z, z, i, z],
            vec![z, i, z, z],
            vec![z, z, z, o],
        ],
        GateKind::Ecr => {
            let m = [
                [z, o, z, i],
                [o, z, -i, z],
                [z, i, z, o],
                [-i, z, o, z],
            ];
            m.iter().map(|r| r.iter().map(|x| x * s2).collect()).collect()
        }
        // bookkeeping gates act as the identity
        GateKind::Sw | GateKind::SDel | GateKind::Measure | GateKind::Barrier => Vec::new(),
    }
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub fn apply(state: &mut [C], n: usize, kind: GateKind, qubits: &[usize], params: &[f64]) {
    let m = matrix(kind, params);
    if m.is_empty() {
        return;
    }
    let masks: Vec<usize> = qubits.iter().map(|&q| bit(n, q)).collect();
    let all: usize = masks.iter().sum();
    let dim = 1 << qubits.len();
    for base in 0..state.len() {
        if base & all != 0 {
            continue;
        }
        let idx = |sub: usize| {
            let mut i = base;
            for (j, &mask) in masks.iter().enumerate() {
                if sub & (1 << (qubits.len() - 1 - j)) != 0 {
                    i |= mask;
                }
            }
            i
        };
        let old: Vec<C> = (0..dim).map(|s| state[idx(s)]).collect();
        for r in 0..dim {
            state[idx(r)] = (0..dim).map(|s| m[r][s] * old[s]).sum();
        }
    }
}

pub fn run(circuit: &Circuit, input: &[C]) -> Vec<C> {
    let mut s = input.to_vec();
    for g in &circuit.gates {
        apply(&mut s, circuit.n, g.kind, &g.qubits, &g.params);
    }
    s
}

/// Full unitary, column `j` = image of basis state `j`.
pub fn unitary(circuit: &Circuit) -> Vec<Vec<C>> {
    let dim = 1 << circuit.n;
    (0..dim)
        .map(|j| {
            let mut e = vec![C::new(0.0, 0.0); dim];
            e[j] = C::new(1.0, 0.0);
            run(circuit, &e)
        })
        .collect()
}

/// Distance between two vectors after removing the best global phase.
pub fn phase_distance(a: &[C], b: &[C]) -> f64 {
    let inner: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 1e-12 { inner / inner.norm() } else { C::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Equal up to one global phase.
pub fn same_unitary(a: &Circuit, b: &Circuit) -> bool {
    let ua: Vec<C> = unitary(a).into_iter().flatten().collect();
    let ub: Vec<C> = unitary(b).into_iter().flatten().collect();
    phase_distance(&ua, &ub) < 1e-9
}

/// Deterministic pseudo-random normalised state.
pub fn random_state(n: usize, seed: u64) -> Vec<C> {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let v: Vec<C> = (0..1 << n).map(|_| C::new(next(), next())).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}
