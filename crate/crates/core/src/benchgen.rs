//! Random benchmark circuits and a few textbook algorithm circuits.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::hardware::HardwareSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomCircuitConfig {
    pub n: usize,
    pub num_gates: usize,
    /// Probability of drawing a single-qubit gate.
    pub w1: f64,
    pub w2: f64,
    pub seed: u64,
}

impl RandomCircuitConfig {
    pub fn new(n: usize, num_gates: usize, seed: u64) -> Self {
        RandomCircuitConfig {
            n,
            num_gates,
            w1: 0.7,
            w2: 0.3,
            seed,
        }
    }

    pub fn with_weights(mut self, w1: f64, w2: f64) -> Self {
        self.w1 = w1;
        self.w2 = w2;
        self
    }
}

/// Random circuit in the hardware's native gates, with durations filled in.
///
/// Single-qubit kinds are drawn uniformly from the native physical and virtual
/// single-qubit gates; two-qubit gates land on a uniformly chosen coupling edge
/// (restricted to the first `n` qubits) with random orientation.
pub fn random_circuit(cfg: &RandomCircuitConfig, spec: &HardwareSpec) -> Result<Circuit> {
    if cfg.n > spec.coupling.n {
        return Err(Error::Capacity {
            needed: cfg.n,
            available: spec.coupling.n,
        });
    }
    if cfg.w1 < 0.0 || cfg.w2 < 0.0 || ((cfg.w1 + cfg.w2) - 1.0).abs() > 1e-9 {
        return Err(Error::validation(
            "gate weights must be non-negative and sum to 1",
        ));
    }
    let mut kinds_1q = spec.native_1q();
    kinds_1q.extend(spec.virtual_gates.iter().copied());
    let kinds_2q = spec.native_2q();
    let edges: Vec<(usize, usize)> = spec
        .coupling
        .edges
        .iter()
        .copied()
        .filter(|&(a, b)| a < cfg.n && b < cfg.n)
        .collect();
    if cfg.num_gates > 0 && cfg.n == 0 {
        return Err(Error::validation("cannot place gates on zero qubits"));
    }
    let can_2q = !edges.is_empty() && !kinds_2q.is_empty();
    if cfg.w2 > 0.0 && cfg.num_gates > 0 && !can_2q {
        return Err(Error::validation(
            "no coupling edge among the requested qubits",
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Circuit::new(cfg.n);
    for _ in 0..cfg.num_gates {
        if rng.random::<f64>() < cfg.w1 {
            let kind = kinds_1q[rng.random_range(0..kinds_1q.len())];
            let q = rng.random_range(0..cfg.n);
            let params: Vec<f64> = (0..kind.num_params())
                .map(|_| rng.random_range(0.0..2.0 * PI))
                .collect();
            c.push_timed(kind, vec![q], params, spec.duration_of(kind).unwrap());
        } else {
            let kind = kinds_2q[rng.random_range(0..kinds_2q.len())];
            let (a, b) = edges[rng.random_range(0..edges.len())];
            let qs = if rng.random::<bool>() {
                vec![a, b]
            } else {
                vec![b, a]
            };
            c.push_timed(kind, qs, vec![], spec.duration_of(kind).unwrap());
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ghz,
    Qft,
    GraphState,
    Bv,
    WState,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ghz,
        Algorithm::Qft,
        Algorithm::GraphState,
        Algorithm::Bv,
        Algorithm::WState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ghz => "ghz",
            Algorithm::Qft => "qft",
            Algorithm::GraphState => "graphstate",
            Algorithm::Bv => "bv",
            Algorithm::WState => "wstate",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown algorithm `{s}`")))
    }
}

fn cphase(c: Circuit, theta: f64, ctrl: usize, tgt: usize) -> Circuit {
    c.rz(theta / 2.0, ctrl)
        .cx(ctrl, tgt)
        .rz(-theta / 2.0, tgt)
        .cx(ctrl, tgt)
        .rz(theta / 2.0, tgt)
}

/// Algorithm circuit in frontend gates (durations unset).
pub fn algo_circuit(alg: Algorithm, n: usize, seed: u64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::validation(
            "algorithm circuits need at least one qubit",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    match alg {
        Algorithm::Ghz => {
            c = c.h(0);
            for i in 1..n {
                c = c.cx(i - 1, i);
            }
        }
        Algorithm::Qft => {
            for i in 0..n {
                c = c.h(i);
                for j in i + 1..n {
                    c = cphase(c, PI / f64::from(1u32 << (j - i).min(30)), j, i);
                }
            }
        }
        Algorithm::GraphState => {
            let mut edges = Vec::new();
            for i in 1..n {
                edges.push((rng.random_range(0..i), i));
            }
            for a in 0..n {
                for b in a + 2..n {
                    if rng.random::<f64>() < 0.1 && !edges.contains(&(a, b)) {
                        edges.push((a, b));
                    }
                }
            }
            for q in 0..n {
                c = c.h(q);
            }
            for (a, b) in edges {
                c = c.cz(a, b);
            }
        }
        Algorithm::Bv => {
            let anc = n - 1;
            let secret: Vec<bool> = (0..anc).map(|_| rng.random()).collect();
            c = c.x(anc);
            for q in 0..n {
                c = c.h(q);
            }
            for (q, &bit) in secret.iter().enumerate() {
                if bit {
                    c = c.cx(q, anc);
                }
            }
            for q in 0..anc {
                c = c.h(q);
            }
        }
        Algorithm::WState => {
            c = c.x(n - 1);
            for m in 1..n {
                let (i, j) = (n - m, n - m - 1);
                let theta = (1.0 / (n - m + 1) as f64).sqrt().acos();
                c = c.gate(GateKind::Ry, &[j], &[-theta]).cz(i, j).gate(
                    GateKind::Ry,
                    &[j],
                    &[theta],
                );
            }
            for k in (1..n).rev() {
                c = c.cx(k - 1, k);
            }
        }
    }
    Ok(c)
}
