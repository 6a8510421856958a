//! Rebasing to a hardware gate set and SWAP-insertion routing.
//!
//! The router is a lookahead swap heuristic: gates whose qubits are adjacent are
//! executed greedily, and when the front layer is blocked the swap minimising a
//! decay-weighted sum of front-layer and extended-set distances is applied.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{build_dag, Circuit, GateClass, GateKind};
use crate::hardware::HardwareSpec;
use crate::{Error, Result};

/// One gate of a rebased sequence on logical positions `0`/`1` of the source gate.
type Step = (GateKind, Vec<usize>, Vec<f64>);

fn step1(kind: GateKind, q: usize) -> Step {
    (kind, vec![q], vec![])
}

fn rot(kind: GateKind, theta: f64, q: usize) -> Step {
    (kind, vec![q], vec![theta])
}

fn lower(
    kind: GateKind,
    qubits: &[usize],
    params: &[f64],
    spec: &HardwareSpec,
    out: &mut Vec<Step>,
) -> Result<()> {
    if spec.supports(kind) {
        out.push((kind, qubits.to_vec(), params.to_vec()));
        return Ok(());
    }
    let has = |k: GateKind| spec.supports(k);
    let fail = || Err(Error::unsupported(format!("{kind} on {}", spec.name)));
    let q = qubits[0];
    match kind {
        GateKind::H => {
            if has(GateKind::Rz) && has(GateKind::Sx) {
                out.extend([
                    rot(GateKind::Rz, FRAC_PI_2, q),
                    step1(GateKind::Sx, q),
                    rot(GateKind::Rz, FRAC_PI_2, q),
                ]);
            } else if has(GateKind::Rx) && has(GateKind::Ry) {
                out.extend([rot(GateKind::Ry, FRAC_PI_2, q), rot(GateKind::Rx, PI, q)]);
            } else {
                return fail();
            }
        }
        GateKind::X => {
            if has(GateKind::Rx) {
                out.push(rot(GateKind::Rx, PI, q));
            } else if has(GateKind::Sx) {
                out.extend([step1(GateKind::Sx, q), step1(GateKind::Sx, q)]);
            } else {
                return fail();
            }
        }
        GateKind::Sx => {
            if has(GateKind::Rx) {
                out.push(rot(GateKind::Rx, FRAC_PI_2, q));
            } else if has(GateKind::H) && has(GateKind::Rz) {
                out.extend([
                    step1(GateKind::H, q),
                    rot(GateKind::Rz, FRAC_PI_2, q),
                    step1(GateKind::H, q),
                ]);
            } else {
                return fail();
            }
        }
        GateKind::Rx => {
            if !has(GateKind::Rz) {
                return fail();
            }
            lower(GateKind::H, &[q], &[], spec, out)?;
            out.push(rot(GateKind::Rz, params[0], q));
            lower(GateKind::H, &[q], &[], spec, out)?;
        }
        GateKind::Ry => {
            if !has(GateKind::Rz) {
                return fail();
            }
            out.push(rot(GateKind::Rz, -FRAC_PI_2, q));
            lower(GateKind::Rx, &[q], params, spec, out)?;
            out.push(rot(GateKind::Rz, FRAC_PI_2, q));
        }
        GateKind::Cx => {
            let (c, t) = (qubits[0], qubits[1]);
            if has(GateKind::Cz) {
                lower(GateKind::H, &[t], &[], spec, out)?;
                out.push((GateKind::Cz, vec![c, t], vec![]));
                lower(GateKind::H, &[t], &[], spec, out)?;
            } else if has(GateKind::Ecr) && has(GateKind::Rz) {
                // CX = frame · ECR · frame (checked against the 4x4 unitary in tests)
                lower(GateKind::Sx, &[c], &[], spec, out)?;
                out.push(rot(GateKind::Rz, -FRAC_PI_2, c));
                out.push(rot(GateKind::Rz, -FRAC_PI_2, t));
                lower(GateKind::Sx, &[t], &[], spec, out)?;
                out.push((GateKind::Ecr, vec![c, t], vec![]));
                for q in [c, t] {
                    out.push(rot(GateKind::Rz, -FRAC_PI_2, q));
                    lower(GateKind::Sx, &[q], &[], spec, out)?;
                    out.push(rot(GateKind::Rz, FRAC_PI_2, q));
                }
            } else {
                return fail();
            }
        }
        GateKind::Cz => {
            let (a, b) = (qubits[0], qubits[1]);
            lower(GateKind::H, &[b], &[], spec, out)?;
            lower(GateKind::Cx, &[a, b], &[], spec, out)?;
            lower(GateKind::H, &[b], &[], spec, out)?;
        }
        GateKind::Swap => {
            let (a, b) = (qubits[0], qubits[1]);
            lower(GateKind::Cx, &[a, b], &[], spec, out)?;
            lower(GateKind::Cx, &[b, a], &[], spec, out)?;
            lower(GateKind::Cx, &[a, b], &[], spec, out)?;
        }
        GateKind::ISwap => {
            let (a, b) = (qubits[0], qubits[1]);
            if !has(GateKind::Rz) {
                return fail();
            }
            out.push(rot(GateKind::Rz, FRAC_PI_2, a));
            out.push(rot(GateKind::Rz, FRAC_PI_2, b));
            lower(GateKind::H, &[a], &[], spec, out)?;
            lower(GateKind::Cx, &[a, b], &[], spec, out)?;
            lower(GateKind::Cx, &[b, a], &[], spec, out)?;
            lower(GateKind::H, &[b], &[], spec, out)?;
        }
        GateKind::Ecr => {
            // inverse of the CX-from-ECR frame
            let (a, b) = (qubits[0], qubits[1]);
            if !has(GateKind::Rz) {
                return fail();
            }
            out.push(rot(GateKind::Rz, FRAC_PI_2, a));
            lower(GateKind::Rx, &[a], &[-FRAC_PI_2], spec, out)?;
            lower(GateKind::Rx, &[b], &[-FRAC_PI_2], spec, out)?;
            out.push(rot(GateKind::Rz, FRAC_PI_2, b));
            lower(GateKind::Cx, &[a, b], &[], spec, out)?;
            for q in [a, b] {
                out.push(rot(GateKind::Rz, -FRAC_PI_2, q));
                lower(GateKind::Rx, &[q], &[-FRAC_PI_2], spec, out)?;
                out.push(rot(GateKind::Rz, FRAC_PI_2, q));
            }
        }
        _ => return fail(),
    }
    Ok(())
}

/// Native decomposition of a single gate, as `(kind, qubits, params)` steps.
pub fn lower_gate(
    kind: GateKind,
    qubits: &[usize],
    params: &[f64],
    spec: &HardwareSpec,
) -> Result<Vec<(GateKind, Vec<usize>, Vec<f64>)>> {
    let mut out = Vec::new();
    lower(kind, qubits, params, spec, &mut out)?;
    Ok(out)
}

/// Rewrites every gate into the hardware's native and virtual gates and assigns durations.
pub fn rebase_to_native(circuit: &Circuit, spec: &HardwareSpec) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n);
    let mut steps = Vec::new();
    for g in &circuit.gates {
        steps.clear();
        lower(g.kind, &g.qubits, &g.params, spec, &mut steps)?;
        for (kind, qubits, params) in steps.drain(..) {
            let d = spec.duration_of(kind).expect("lowered to supported gate");
            out.push_timed(kind, qubits, params, d);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapRecord {
    /// Number of output gates emitted before this swap's decomposition.
    pub position: usize,
    pub physical: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    /// Physical circuit over all device qubits, native gates with durations.
    pub circuit: Circuit,
    /// Final logical → physical placement.
    pub layout: Vec<usize>,
    pub swap_count: usize,
    pub seed: u64,
    pub swaps: Vec<SwapRecord>,
    /// For every output gate, the index of the input gate it came from (`None` for swap gates).
    pub origin: Vec<Option<usize>>,
}

const EXTENDED_SET_SIZE: usize = 20;
const DECAY_RESET_INTERVAL: usize = 5;

struct Router<'a> {
    spec: &'a HardwareSpec,
    dist: Vec<Vec<u32>>,
    l2p: Vec<usize>,
    p2l: Vec<usize>,
    decay: Vec<f64>,
    out: Circuit,
    origin: Vec<Option<usize>>,
    swaps: Vec<SwapRecord>,
    extended_weight: f64,
    decay_step: f64,
}

impl Router<'_> {
    fn emit_logical(&mut self, idx: usize, circuit: &Circuit) {
        let g = &circuit.gates[idx];
        let qubits = g.qubits.iter().map(|&q| self.l2p[q]).collect();
        let d = self.spec.duration_of(g.kind).expect("validated native");
        self.out.push_timed(g.kind, qubits, g.params.clone(), d);
        self.origin.push(Some(idx));
    }

    fn apply_swap(&mut self, p: usize, q: usize) {
        self.swaps.push(SwapRecord {
            position: self.out.len(),
            physical: (p, q),
        });
        let steps = lower_gate(GateKind::Swap, &[p, q], &[], self.spec)
            .expect("swap lowers on any spec that can lower CX");
        for (kind, qubits, params) in steps {
            let d = self.spec.duration_of(kind).unwrap();
            self.out.push_timed(kind, qubits, params, d);
            self.origin.push(None);
        }
        let (lp, lq) = (self.p2l[p], self.p2l[q]);
        self.p2l.swap(p, q);
        self.l2p[lp] = q;
        self.l2p[lq] = p;
        self.decay[p] += self.decay_step;
        self.decay[q] += self.decay_step;
    }

    fn pair_distance(&self, a: usize, b: usize) -> f64 {
        self.dist[self.l2p[a]][self.l2p[b]] as f64
    }

    fn score(&self, front: &[(usize, usize)], extended: &[(usize, usize)]) -> f64 {
        let f: f64 = front.iter().map(|&(a, b)| self.pair_distance(a, b)).sum();
        let mut h = f / front.len() as f64;
        if !extended.is_empty() {
            let e: f64 = extended
                .iter()
                .map(|&(a, b)| self.pair_distance(a, b))
                .sum();
            h += self.extended_weight * e / extended.len() as f64;
        }
        h
    }
}

/// Routes a native circuit onto the hardware coupling map from the identity layout.
pub fn route(circuit: &Circuit, spec: &HardwareSpec, seed: u64) -> Result<RoutedCircuit> {
    let n_dev = spec.coupling.n;
    if circuit.n > n_dev {
        return Err(Error::Capacity {
            needed: circuit.n,
            available: n_dev,
        });
    }
    circuit.validate()?;
    for g in &circuit.gates {
        if !spec.supports(g.kind) {
            return Err(Error::unsupported(format!(
                "{} is not native on {}; rebase first",
                g.kind, spec.name
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Router {
        spec,
        dist: spec.coupling.distance_matrix(),
        l2p: (0..n_dev).collect(),
        p2l: (0..n_dev).collect(),
        decay: vec![1.0; n_dev],
        out: Circuit::new(n_dev),
        origin: Vec::with_capacity(circuit.len()),
        swaps: Vec::new(),
        // The seed perturbs the heuristic weights; exact score ties still go to the
        // lexicographically smallest physical pair.
        extended_weight: 0.5 * (0.8 + 0.4 * rng.random::<f64>()),
        decay_step: 0.001 * (0.5 + rng.random::<f64>()),
    };
    let adj = spec.coupling.adjacency();

    let dag = build_dag(circuit);
    let mut remaining: Vec<usize> = dag.preds.iter().map(Vec::len).collect();
    let mut front: BTreeSet<usize> = (0..circuit.len()).filter(|&i| remaining[i] == 0).collect();
    let is_2q = |i: usize| circuit.gates[i].kind.class() == GateClass::TwoPhysical;

    let mut swaps_since_progress = 0usize;
    let mut swaps_since_reset = 0usize;
    let release_after = 10 * n_dev.max(1);

    while !front.is_empty() {
        // Execute everything executable; repeat until the front stalls.
        let mut progressed = false;
        loop {
            let ready: Vec<usize> = front
                .iter()
                .copied()
                .filter(|&i| {
                    !is_2q(i) || {
                        let g = &circuit.gates[i];
                        spec.coupling
                            .has_edge(r.l2p[g.qubits[0]], r.l2p[g.qubits[1]])
                    }
                })
                .collect();
            if ready.is_empty() {
                break;
            }
            for i in ready {
                front.remove(&i);
                r.emit_logical(i, circuit);
                for &s in &dag.succs[i] {
                    remaining[s] -= 1;
                    if remaining[s] == 0 {
                        front.insert(s);
                    }
                }
            }
            progressed = true;
        }
        if front.is_empty() {
            break;
        }
        if progressed {
            swaps_since_progress = 0;
            swaps_since_reset = 0;
            r.decay.iter_mut().for_each(|d| *d = 1.0);
        }

        let front_pairs: Vec<(usize, usize)> = front
            .iter()
            .map(|&i| (circuit.gates[i].qubits[0], circuit.gates[i].qubits[1]))
            .collect();

        if swaps_since_progress >= release_after {
            // Walk the first blocked gate's qubits together along a shortest path.
            let (a, b) = front_pairs[0];
            while !spec.coupling.has_edge(r.l2p[a], r.l2p[b]) {
                let pa = r.l2p[a];
                let pb = r.l2p[b];
                let next = adj[pa]
                    .iter()
                    .copied()
                    .find(|&w| r.dist[w][pb] + 1 == r.dist[pa][pb])
                    .expect("connected coupling map");
                r.apply_swap(pa.min(next), pa.max(next));
            }
            swaps_since_progress = 0;
            continue;
        }

        let extended = extended_set(circuit, &dag.succs, &front, &remaining);
        let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(a, b) in &front_pairs {
            for p in [r.l2p[a], r.l2p[b]] {
                for &w in &adj[p] {
                    candidates.insert((p.min(w), p.max(w)));
                }
            }
        }
        let mut best: Option<((usize, usize), f64)> = None;
        for &(p, q) in &candidates {
            // trial swap
            let (lp, lq) = (r.p2l[p], r.p2l[q]);
            r.l2p[lp] = q;
            r.l2p[lq] = p;
            let s = r.score(&front_pairs, &extended) * r.decay[p].max(r.decay[q]);
            r.l2p[lp] = p;
            r.l2p[lq] = q;
            if best.is_none_or(|(_, b)| s < b) {
                best = Some(((p, q), s));
            }
        }
        let ((p, q), _) = best.expect("a blocked 2q gate always has swap candidates");
        r.apply_swap(p, q);
        swaps_since_progress += 1;
        swaps_since_reset += 1;
        if swaps_since_reset >= DECAY_RESET_INTERVAL {
            swaps_since_reset = 0;
            r.decay.iter_mut().for_each(|d| *d = 1.0);
        }
    }

    let layout = r.l2p[..circuit.n].to_vec();
    Ok(RoutedCircuit {
        swap_count: r.swaps.len(),
        circuit: r.out,
        layout,
        seed,
        swaps: r.swaps,
        origin: r.origin,
    })
}

/// Upcoming two-qubit interactions beyond the front layer, breadth-first.
fn extended_set(
    circuit: &Circuit,
    succs: &[Vec<usize>],
    front: &BTreeSet<usize>,
    remaining: &[usize],
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut pending: std::collections::HashMap<usize, usize> = Default::default();
    let mut queue: std::collections::VecDeque<usize> = front.iter().copied().collect();
    while let Some(i) = queue.pop_front() {
        for &s in &succs[i] {
            let left = pending.entry(s).or_insert(remaining[s]);
            *left -= 1;
            if *left == 0 {
                let g = &circuit.gates[s];
                if g.kind.class() == GateClass::TwoPhysical {
                    out.push((g.qubits[0], g.qubits[1]));
                    if out.len() >= EXTENDED_SET_SIZE {
                        return out;
                    }
                }
                queue.push_back(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::{eagle_spec, grid_spec, square_grid, CouplingMap};

    fn line3() -> HardwareSpec {
        grid_spec(CouplingMap::new(3, [(0, 1), (1, 2)]).unwrap())
    }

    #[test]
    fn cx_on_grid_is_h_cz_h() {
        let spec = grid_spec(square_grid(2, 2).unwrap());
        let out = rebase_to_native(&Circuit::new(2).cx(0, 1), &spec).unwrap();
        let kinds: Vec<_> = out
            .gates
            .iter()
            .map(|g| (g.kind, g.qubits.clone()))
            .collect();
        assert_eq!(
            kinds,
            vec![
                (GateKind::H, vec![1]),
                (GateKind::Cz, vec![0, 1]),
                (GateKind::H, vec![1])
            ]
        );
        assert_eq!(out.gates[1].duration, 200);
    }

    #[test]
    fn native_circuit_unchanged() {
        let spec = grid_spec(square_grid(2, 2).unwrap());
        let c = Circuit::new(2).h(0).rz(0.4, 1).cz(0, 1);
        let out = rebase_to_native(&c, &spec).unwrap();
        assert!(out.same_structure(&c));
    }

    #[test]
    fn swap_on_grid_has_three_cz() {
        let spec = grid_spec(square_grid(2, 2).unwrap());
        let c = Circuit::new(2).gate(GateKind::Swap, &[0, 1], &[]);
        let out = rebase_to_native(&c, &spec).unwrap();
        assert_eq!(out.count_class(GateClass::TwoPhysical), 3);
        assert_eq!(out.count_class(GateClass::SinglePhysical), 6);
    }

    #[test]
    fn rebase_growth_is_bounded() {
        let spec = eagle_spec();
        for kind in [
            GateKind::H,
            GateKind::Rx,
            GateKind::Ry,
            GateKind::Cx,
            GateKind::Cz,
            GateKind::Swap,
            GateKind::ISwap,
        ] {
            let qs: Vec<usize> = (0..kind.arity().unwrap()).collect();
            let params = vec![0.3; kind.num_params()];
            let steps = lower_gate(kind, &qs, &params, &spec).unwrap();
            assert!(steps.len() <= 40, "{kind} -> {}", steps.len());
            assert!(steps.iter().all(|(k, _, _)| spec.supports(*k)));
        }
        let bare = HardwareSpec::new(
            "bare",
            square_grid(1, 2).unwrap(),
            [(GateKind::H, 20), (GateKind::Cz, 200)],
            [],
            10,
        )
        .unwrap();
        assert!(matches!(
            lower_gate(GateKind::Rx, &[0], &[0.1], &bare),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn routes_distant_cz_with_one_swap() {
        let spec = line3();
        let routed = route(&Circuit::new(3).cz(0, 2), &spec, 0).unwrap();
        assert_eq!(routed.swap_count, 1);
        for g in &routed.circuit.gates {
            if g.is_two_physical() {
                assert!(spec.coupling.has_edge(g.qubits[0], g.qubits[1]));
            }
        }
    }

    #[test]
    fn adjacent_circuit_needs_no_swaps() {
        let spec = grid_spec(square_grid(2, 2).unwrap());
        let c = Circuit::new(4)
            .h(0)
            .cz(0, 1)
            .cz(2, 3)
            .h(3)
            .with_durations(&spec)
            .unwrap();
        let routed = route(&c, &spec, 3).unwrap();
        assert_eq!(routed.swap_count, 0);
        assert_eq!(routed.circuit.duration().unwrap(), c.duration().unwrap());
        assert_eq!(routed.layout, vec![0, 1, 2, 3]);
    }

    #[test]
    fn capacity_and_non_native_errors() {
        let spec = line3();
        assert!(matches!(
            route(&Circuit::new(4), &spec, 0),
            Err(Error::Capacity {
                needed: 4,
                available: 3
            })
        ));
        assert!(matches!(
            route(&Circuit::new(2).cx(0, 1), &spec, 0),
            Err(Error::Unsupported { .. })
        ));
    }
}
