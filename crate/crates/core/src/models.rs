//! Layered toy model of serialization and the max-of-exponentials queueing law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::grouping::trivial_grouping;
use crate::hardware::CouplingMap;
use crate::parallel::{par_map, seq_map};
use crate::stats::{mean, std_dev};
use crate::{Error, Result};

/// How a layer without two-qubit gates is timed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum No2qRule {
    /// Largest number of gates on any one switch.
    #[default]
    PerSwitchMax,
    /// Total number of single-qubit gates in the layer.
    TotalCount,
}

/// Times are in units of the single-qubit gate duration.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModelConfig {
    pub grid: CouplingMap,
    pub depth: usize,
    pub p1: f64,
    pub p2: f64,
    pub t2: f64,
    pub k: usize,
    pub seed: u64,
    pub no_2q_rule: No2qRule,
}

impl ToyModelConfig {
    pub fn new(grid: CouplingMap, k: usize, p1: f64, p2: f64, t2: f64) -> Self {
        ToyModelConfig {
            grid,
            depth: 100,
            p1,
            p2,
            t2,
            k,
            seed: 0,
            no_2q_rule: No2qRule::PerSwitchMax,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p1) || !(0.0..=1.0).contains(&self.p2) {
            return Err(Error::validation("gate probabilities must lie in [0, 1]"));
        }
        if self.t2 < 1.0 {
            return Err(Error::validation("t2 must be at least t1 = 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyResult {
    pub k: usize,
    pub mean_factor: f64,
    pub std_factor: f64,
}

/// Independent, reproducible stream for one trial (or chunk).
fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn toy_trial(cfg: &ToyModelConfig, switch_of: &[usize], m: usize, trial: u64) -> f64 {
    let mut rng = stream(cfg.seed, trial);
    let n = cfg.grid.n;
    let mut counts = vec![0usize; m];
    let (mut ideal, mut serialized) = (0.0, 0.0);
    for _ in 0..cfg.depth {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut total = 0;
        for &s in switch_of.iter().take(n) {
            if rng.random::<f64>() < cfg.p1 {
                counts[s] += 1;
                total += 1;
            }
        }
        let mut any_2q = false;
        for _ in &cfg.grid.edges {
            any_2q |= rng.random::<f64>() < cfg.p2;
        }
        let busiest = counts.iter().copied().max().unwrap_or(0) as f64;
        if any_2q {
            ideal += cfg.t2;
            serialized += cfg.t2.max(busiest);
        } else if total > 0 {
            ideal += 1.0;
            serialized += match cfg.no_2q_rule {
                No2qRule::PerSwitchMax => busiest,
                No2qRule::TotalCount => total as f64,
            };
        }
    }
    if ideal == 0.0 {
        1.0
    } else {
        serialized / ideal
    }
}

/// Mean and standard deviation of the serialized/ideal duration ratio over trials,
/// with qubits on switches by index blocks.
pub fn toy_model_run(cfg: &ToyModelConfig, trials: usize) -> Result<ToyResult> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::validation("need at least one trial"));
    }
    let ids: Vec<u64> = (0..trials as u64).collect();
    let factors = toy_trial_factors(cfg, &ids, true)?;
    Ok(ToyResult {
        k: cfg.k,
        mean_factor: mean(&factors),
        std_factor: std_dev(&factors),
    })
}

/// Per-trial factors for the given trial indices, optionally forcing a sequential loop.
pub fn toy_trial_factors(cfg: &ToyModelConfig, trials: &[u64], parallel: bool) -> Result<Vec<f64>> {
    cfg.validate()?;
    let grouping = trivial_grouping(cfg.grid.n, cfg.k)?;
    let one = |&t: &u64| toy_trial(cfg, &grouping.group_of, grouping.m(), t);
    Ok(if parallel {
        par_map(trials, one)
    } else {
        seq_map(trials, one)
    })
}

/// Runs the toy model for each k (same seed and trial streams for every k).
pub fn toy_sweep(cfg: &ToyModelConfig, ks: &[usize], trials: usize) -> Result<Vec<ToyResult>> {
    ks.iter()
        .map(|&k| {
            let c = ToyModelConfig { k, ..cfg.clone() };
            toy_model_run(&c, trials)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
}

const MC_CHUNK: usize = 4096;

/// Monte Carlo mean of the maximum of `k` iid `Exp(eta)` waiting times.
pub fn queue_max_waiting_mc(eta: f64, k: usize, trials: usize, seed: u64) -> Result<McResult> {
    if !(eta > 0.0) || k == 0 || trials == 0 {
        return Err(Error::validation("need eta > 0, k >= 1 and trials >= 1"));
    }
    let exp = Exp::new(eta).map_err(|e| Error::validation(e.to_string()))?;
    let chunks: Vec<(u64, usize)> = (0..trials.div_ceil(MC_CHUNK))
        .map(|c| (c as u64, MC_CHUNK.min(trials - c * MC_CHUNK)))
        .collect();
    let sums = par_map(&chunks, |&(c, len)| {
        let mut rng = stream(seed, c);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            let m = (0..k).map(|_| exp.sample(&mut rng)).fold(0.0, f64::max);
            s += m;
            s2 += m * m;
        }
        (s, s2)
    });
    let (s, s2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let nf = trials as f64;
    let mean = s / nf;
    let var = if trials > 1 {
        (s2 - nf * mean * mean) / (nf - 1.0)
    } else {
        0.0
    };
    Ok(McResult {
        k,
        mean,
        stderr: (var.max(0.0) / nf).sqrt(),
    })
}

/// `H_k / eta`, the exact expected maximum of `k` iid `Exp(eta)` variables.
pub fn expected_max_exponential(eta: f64, k: usize) -> f64 {
    // summed small-to-large for accuracy at large k
    (1..=k).rev().map(|i| 1.0 / i as f64).sum::<f64>() / eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::square_grid;

    #[test]
    fn k_one_factor_is_one() {
        let cfg = ToyModelConfig::new(square_grid(5, 5).unwrap(), 1, 0.3, 0.05, 10.0);
        let r = toy_model_run(&cfg, 20).unwrap();
        assert_eq!(r.mean_factor, 1.0);
        assert_eq!(r.std_factor, 0.0);
    }

    #[test]
    fn dense_single_switch_factor_is_n() {
        let cfg = ToyModelConfig::new(square_grid(3, 3).unwrap(), 9, 1.0, 0.0, 10.0);
        assert_eq!(toy_model_run(&cfg, 5).unwrap().mean_factor, 9.0);
    }

    #[test]
    fn total_count_rule_ignores_switches() {
        let mut cfg = ToyModelConfig::new(square_grid(3, 3).unwrap(), 3, 1.0, 0.0, 10.0);
        cfg.no_2q_rule = No2qRule::TotalCount;
        assert_eq!(toy_model_run(&cfg, 3).unwrap().mean_factor, 9.0);
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(expected_max_exponential(2.0, 1), 0.5);
        assert_eq!(expected_max_exponential(1.0, 2), 1.5);
        assert!((expected_max_exponential(2.0, 4) - 25.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn mc_small_cases() {
        let r = queue_max_waiting_mc(1.0, 2, 20_000, 5).unwrap();
        assert!((r.mean - 1.5).abs() < 4.0 * r.stderr);
        assert!(queue_max_waiting_mc(0.0, 2, 10, 0).is_err());
        assert_eq!(
            queue_max_waiting_mc(1.0, 3, 5000, 9).unwrap(),
            queue_max_waiting_mc(1.0, 3, 5000, 9).unwrap()
        );
    }
}
