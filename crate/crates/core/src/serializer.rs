//! Serialization of concurrent single-qubit gates that share a control switch.
//!
//! Concurrency is the physical layer of the routed circuit (see
//! [`layer_indices`]). Per layer and switch group the physical single-qubit
//! gates are chained: `SW(a, b)` hands the switch from `a` to `b` and `SDEL(b)`
//! waits out the switching time before the next gate on `b`. When the switch
//! is still held by a qubit from an earlier layer, a bare `SW` moves it first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{
    asap_schedule, build_dag, layer_indices, Circuit, Gate, GateClass, GateKind, Nanos,
};
use crate::grouping::SwitchGrouping;
use crate::hardware::HardwareSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderHeuristic {
    /// Ascending qubit index.
    ByIndex,
    /// Ascending number of layers until the next two-qubit gate on the gate's qubit.
    DistToNext2q,
}

impl OrderHeuristic {
    pub fn name(self) -> &'static str {
        match self {
            OrderHeuristic::ByIndex => "index",
            OrderHeuristic::DistToNext2q => "dist2q",
        }
    }
}

impl fmt::Display for OrderHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderHeuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "index" | "by_index" => Ok(OrderHeuristic::ByIndex),
            "dist2q" | "distance_to_next_2q" => Ok(OrderHeuristic::DistToNext2q),
            _ => Err(Error::validation(format!("unknown order heuristic `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SerializerOptions {
    pub order: OrderHeuristic,
    /// Drop switch delays that are covered by concurrent two-qubit gates.
    pub hide_delays: bool,
    /// Overrides the hardware's switching time.
    pub t_sw: Option<Nanos>,
}

impl Default for SerializerOptions {
    fn default() -> Self {
        SerializerOptions {
            order: OrderHeuristic::DistToNext2q,
            hide_delays: true,
            t_sw: None,
        }
    }
}

impl SerializerOptions {
    /// Index ordering and no delay hiding.
    pub fn plain() -> Self {
        SerializerOptions {
            order: OrderHeuristic::ByIndex,
            hide_delays: false,
            t_sw: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerializedCircuit {
    pub circuit: Circuit,
    pub inserted_sw: usize,
    pub inserted_sdel: usize,
    pub duration: Nanos,
    /// Duration of the input circuit.
    pub base_duration: Nanos,
}

impl SerializedCircuit {
    pub fn overhead(&self) -> Nanos {
        self.duration - self.base_duration
    }
}

/// Emits gates in list order while tracking per-qubit ASAP finish times.
struct Emitter {
    out: Vec<Gate>,
    ready: Vec<Nanos>,
    last_kind: Vec<Option<GateKind>>,
    next_id: usize,
    sw: usize,
    sdel: usize,
}

impl Emitter {
    fn place(&mut self, gate: Gate) -> Nanos {
        let start = gate
            .qubits
            .iter()
            .map(|&q| self.ready[q])
            .max()
            .unwrap_or(0);
        let finish = start + gate.duration;
        for &q in &gate.qubits {
            self.ready[q] = finish;
            if gate.kind.is_physical() {
                self.last_kind[q] = Some(gate.kind);
            }
        }
        self.out.push(gate);
        finish
    }

    fn marker(&mut self, kind: GateKind, qubits: Vec<usize>, duration: Nanos) {
        let id = self.next_id;
        self.next_id += 1;
        match kind {
            GateKind::Sw => self.sw += 1,
            _ => self.sdel += 1,
        }
        self.place(Gate {
            id,
            kind,
            qubits,
            params: Vec::new(),
            duration,
        });
    }
}

/// Inserts switch and switch-delay gates so that no two single-qubit gates on the
/// same switch overlap in the ASAP schedule.
pub fn serialize(
    routed: &Circuit,
    grouping: &SwitchGrouping,
    spec: &HardwareSpec,
    opts: &SerializerOptions,
) -> Result<SerializedCircuit> {
    let t_sw = opts.t_sw.unwrap_or(spec.t_sw);
    for g in &routed.gates {
        if g.kind.is_mux() {
            return Err(Error::validation("input already contains switch gates"));
        }
        if let Some(&q) = g.qubits.iter().find(|&&q| q >= grouping.n()) {
            return Err(Error::validation(format!(
                "qubit {q} is not covered by the switch grouping"
            )));
        }
    }
    let base_duration = routed.duration()?;
    let layers = layer_indices(routed);
    let depth = layers.iter().copied().max().unwrap_or(0);

    // Layer of the next two-qubit gate on each gate's first qubit, and the kind of
    // the next physical gate on the same qubit.
    let n_gates = routed.len();
    let mut next_2q_layer = vec![usize::MAX; n_gates];
    let mut next_phys_is_2q = vec![false; n_gates];
    {
        let mut upcoming_2q = vec![usize::MAX; routed.n];
        let mut upcoming_phys: Vec<Option<GateClass>> = vec![None; routed.n];
        for i in (0..n_gates).rev() {
            let g = &routed.gates[i];
            if g.qubits.len() == 1 {
                let q = g.qubits[0];
                next_2q_layer[i] = upcoming_2q[q];
                next_phys_is_2q[i] = upcoming_phys[q] == Some(GateClass::TwoPhysical);
            }
            for &q in &g.qubits {
                if g.kind.is_physical() {
                    upcoming_phys[q] = Some(g.kind.class());
                }
                if g.is_two_physical() {
                    upcoming_2q[q] = layers[i];
                }
            }
        }
    }

    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for (i, &l) in layers.iter().enumerate() {
        by_layer[l].push(i);
    }

    let mut em = Emitter {
        out: Vec::with_capacity(n_gates * 2),
        ready: vec![0; routed.n],
        last_kind: vec![None; routed.n],
        next_id: routed.gates.iter().map(|g| g.id + 1).max().unwrap_or(0),
        sw: 0,
        sdel: 0,
    };
    let mut token: Vec<Option<usize>> = vec![None; grouping.m()];
    let mut per_group: Vec<Vec<usize>> = vec![Vec::new(); grouping.m()];
    let mut group_done: Vec<Nanos> = vec![0; grouping.m()];

    for (layer, members) in by_layer.iter().enumerate() {
        for list in &mut per_group {
            list.clear();
        }
        let mut others = Vec::new();
        let mut trailing = Vec::new();
        for &i in members {
            let g = &routed.gates[i];
            if g.is_single_physical() {
                per_group[grouping.group_of[g.qubits[0]]].push(i);
            } else if g.kind.is_physical() {
                others.push(i);
            } else {
                trailing.push(i);
            }
        }

        for (grp, chain) in per_group.iter_mut().enumerate() {
            if chain.is_empty() {
                continue;
            }
            let q_of = |i: usize| routed.gates[i].qubits[0];
            match opts.order {
                OrderHeuristic::ByIndex => chain.sort_by_key(|&i| q_of(i)),
                OrderHeuristic::DistToNext2q => chain.sort_by_key(|&i| {
                    let d = next_2q_layer[i].saturating_sub(layer);
                    (d, q_of(i))
                }),
            }
            let first_q = q_of(chain[0]);
            if let Some(holder) = token[grp] {
                // Skip the move when the schedule already orders the first gate after
                // the group's previous one; the SW would only add false dependencies
                // on whatever the holder executed since.
                let redundant = em.ready[first_q] >= group_done[grp];
                if holder != first_q && !redundant {
                    em.marker(GateKind::Sw, vec![holder, first_q], 0);
                }
            }
            let mut prev: Option<(usize, Nanos)> = None;
            for &i in chain.iter() {
                let b = q_of(i);
                if let Some((p, prev_finish)) = prev {
                    let a = q_of(p);
                    let b_busy_until = em.ready[b];
                    let b_after_2q =
                        em.last_kind[b].is_some_and(|k| k.class() == GateClass::TwoPhysical);
                    em.marker(GateKind::Sw, vec![a, b], 0);
                    let hide = opts.hide_delays
                        && b_after_2q
                        && (next_phys_is_2q[p] || b_busy_until >= prev_finish + t_sw);
                    if !hide {
                        em.marker(GateKind::SDel, vec![b], t_sw);
                    }
                }
                let finish = em.place(routed.gates[i].clone());
                prev = Some((i, finish));
            }
            token[grp] = prev.map(|(p, _)| q_of(p));
            group_done[grp] = prev.map_or(0, |(_, f)| f);
        }
        for i in others.into_iter().chain(trailing) {
            em.place(routed.gates[i].clone());
        }
    }

    let circuit = Circuit {
        n: routed.n,
        gates: em.out,
    };
    let duration = asap_schedule(&build_dag(&circuit))?.total_duration;
    Ok(SerializedCircuit {
        circuit,
        inserted_sw: em.sw,
        inserted_sdel: em.sdel,
        duration,
        base_duration,
    })
}

/// Removes every `SW` and `SDEL` gate.
pub fn strip_mux_gates(s: &SerializedCircuit) -> Circuit {
    Circuit {
        n: s.circuit.n,
        gates: s
            .circuit
            .gates
            .iter()
            .filter(|g| !g.kind.is_mux())
            .cloned()
            .collect(),
    }
}

/// First pair of physical single-qubit gates (ids) on the same switch that overlap in time.
pub fn switch_overlap(
    circuit: &Circuit,
    grouping: &SwitchGrouping,
) -> Result<Option<(usize, usize)>> {
    let sched = asap_schedule(&build_dag(circuit))?;
    let mut per_group: Vec<Vec<(Nanos, Nanos, usize)>> = vec![Vec::new(); grouping.m()];
    for (i, g) in circuit.gates.iter().enumerate() {
        if g.is_single_physical() && g.duration > 0 {
            let s = sched.start[i];
            per_group[grouping.group_of[g.qubits[0]]].push((s, s + g.duration, g.id));
        }
    }
    let mut first = None;
    for ivs in &mut per_group {
        ivs.sort_unstable();
        let mut reach: Option<(Nanos, usize)> = None;
        for &(s, f, id) in ivs.iter() {
            if let Some((rf, rid)) = reach {
                if s < rf && first.is_none_or(|(t, _)| s < t) {
                    first = Some((s, (rid, id)));
                }
            }
            if reach.is_none_or(|(rf, _)| f > rf) {
                reach = Some((f, id));
            }
        }
    }
    Ok(first.map(|(_, p)| p))
}
