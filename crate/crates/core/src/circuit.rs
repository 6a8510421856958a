//! Circuit IR, dependency DAG, ASAP scheduling and gate-density metrics.
//!
//! Gates are opaque labelled boxes with integer-nanosecond durations. The
//! dependency DAG has one edge per adjacent pair of gates sharing a qubit, and
//! the critical path through it is the circuit's execution time.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Time in nanoseconds.
pub type Nanos = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GateKind {
    H,
    X,
    Sx,
    Rx,
    Ry,
    Rz,
    Cx,
    Cz,
    ISwap,
    Ecr,
    Swap,
    /// Zero-duration switch-token bookkeeping gate.
    Sw,
    /// Switch settling delay.
    SDel,
    Measure,
    Barrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateClass {
    SinglePhysical,
    TwoPhysical,
    Virtual,
    SwitchMarker,
    SwitchDelay,
    Meta,
}

impl GateKind {
    pub const ALL: [GateKind; 15] = [
        GateKind::H,
        GateKind::X,
        GateKind::Sx,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::ISwap,
        GateKind::Ecr,
        GateKind::Swap,
        GateKind::Sw,
        GateKind::SDel,
        GateKind::Measure,
        GateKind::Barrier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Sx => "SX",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
            GateKind::ISwap => "ISWAP",
            GateKind::Ecr => "ECR",
            GateKind::Swap => "SWAP",
            GateKind::Sw => "SW",
            GateKind::SDel => "SDEL",
            GateKind::Measure => "MEASURE",
            GateKind::Barrier => "BARRIER",
        }
    }

    /// Fixed qubit count, or `None` for barriers which span any number of qubits.
    pub fn arity(self) -> Option<usize> {
        match self.class() {
            GateClass::TwoPhysical | GateClass::SwitchMarker => Some(2),
            GateClass::Meta if self == GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            _ => 0,
        }
    }

    pub fn class(self) -> GateClass {
        match self {
            GateKind::H | GateKind::X | GateKind::Sx | GateKind::Rx | GateKind::Ry => {
                GateClass::SinglePhysical
            }
            GateKind::Rz => GateClass::Virtual,
            GateKind::Cx | GateKind::Cz | GateKind::ISwap | GateKind::Ecr | GateKind::Swap => {
                GateClass::TwoPhysical
            }
            GateKind::Sw => GateClass::SwitchMarker,
            GateKind::SDel => GateClass::SwitchDelay,
            GateKind::Measure | GateKind::Barrier => GateClass::Meta,
        }
    }

    pub fn is_physical(self) -> bool {
        matches!(
            self.class(),
            GateClass::SinglePhysical | GateClass::TwoPhysical
        )
    }

    pub fn is_mux(self) -> bool {
        matches!(
            self.class(),
            GateClass::SwitchMarker | GateClass::SwitchDelay
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == upper)
            .ok_or_else(|| Error::unsupported(s))
    }
}

impl TryFrom<String> for GateKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GateKind> for String {
    fn from(k: GateKind) -> String {
        k.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub id: usize,
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    pub duration: Nanos,
}

impl Gate {
    pub fn is_single_physical(&self) -> bool {
        self.kind.class() == GateClass::SinglePhysical
    }

    pub fn is_two_physical(&self) -> bool {
        self.kind.class() == GateClass::TwoPhysical
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

/// Per-qubit view of one gate used for structural comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct WireOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    // Ids are assigned in increasing order by every constructor in this crate.
    fn next_id(&self) -> usize {
        self.gates.last().map_or(0, |g| g.id + 1)
    }

    /// Appends a gate with zero duration, validating arity, parameters and indices.
    pub fn push(&mut self, kind: GateKind, qubits: &[usize], params: &[f64]) -> Result<usize> {
        check_shape(self.n, kind, qubits, params)?;
        let id = self.next_id();
        self.gates.push(Gate {
            id,
            kind,
            qubits: qubits.to_vec(),
            params: params.to_vec(),
            duration: 0,
        });
        Ok(id)
    }

    /// Appends a gate that already has a duration (used by passes that emit timed gates).
    pub(crate) fn push_timed(
        &mut self,
        kind: GateKind,
        qubits: Vec<usize>,
        params: Vec<f64>,
        duration: Nanos,
    ) -> usize {
        let id = self.next_id();
        self.gates.push(Gate {
            id,
            kind,
            qubits,
            params,
            duration,
        });
        id
    }

    // Builder shorthands. They panic on invalid indices, which is what tests want.

    pub fn h(mut self, q: usize) -> Self {
        self.push(GateKind::H, &[q], &[]).expect("valid gate");
        self
    }

    pub fn x(mut self, q: usize) -> Self {
        self.push(GateKind::X, &[q], &[]).expect("valid gate");
        self
    }

    pub fn rz(mut self, theta: f64, q: usize) -> Self {
        self.push(GateKind::Rz, &[q], &[theta]).expect("valid gate");
        self
    }

    pub fn cx(mut self, c: usize, t: usize) -> Self {
        self.push(GateKind::Cx, &[c, t], &[]).expect("valid gate");
        self
    }

    pub fn cz(mut self, a: usize, b: usize) -> Self {
        self.push(GateKind::Cz, &[a, b], &[]).expect("valid gate");
        self
    }

    pub fn gate(mut self, kind: GateKind, qubits: &[usize], params: &[f64]) -> Self {
        self.push(kind, qubits, params).expect("valid gate");
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(self.gates.len());
        for g in &self.gates {
            check_shape(self.n, g.kind, &g.qubits, &g.params)?;
            if !seen.insert(g.id) {
                return Err(Error::validation(format!("duplicate gate id {}", g.id)));
            }
        }
        Ok(())
    }

    /// Copy with every gate's duration taken from `spec`.
    pub fn with_durations(&self, spec: &crate::hardware::HardwareSpec) -> Result<Circuit> {
        let mut out = self.clone();
        for g in &mut out.gates {
            g.duration = spec
                .duration_of(g.kind)
                .ok_or_else(|| Error::unsupported(format!("{} on {}", g.kind, spec.name)))?;
        }
        Ok(out)
    }

    pub fn count_class(&self, class: GateClass) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind.class() == class)
            .count()
    }

    /// Gate sequence seen by each qubit, in order.
    pub fn wire_ops(&self) -> Vec<Vec<WireOp>> {
        let mut wires = vec![Vec::new(); self.n];
        for g in &self.gates {
            for &q in &g.qubits {
                wires[q].push(WireOp {
                    kind: g.kind,
                    qubits: g.qubits.clone(),
                    params: g.params.clone(),
                });
            }
        }
        wires
    }

    /// Same qubit count and identical per-qubit gate sequences.
    pub fn same_structure(&self, other: &Circuit) -> bool {
        self.n == other.n && self.wire_ops() == other.wire_ops()
    }

    /// Qubits touched by at least one gate.
    pub fn active_qubits(&self) -> usize {
        let mut used = vec![false; self.n];
        for g in &self.gates {
            for &q in &g.qubits {
                used[q] = true;
            }
        }
        used.into_iter().filter(|&u| u).count()
    }

    pub fn duration(&self) -> Result<Nanos> {
        Ok(asap_schedule(&build_dag(self))?.total_duration)
    }
}

fn check_shape(n: usize, kind: GateKind, qubits: &[usize], params: &[f64]) -> Result<()> {
    match kind.arity() {
        Some(a) if a != qubits.len() => {
            return Err(Error::validation(format!(
                "{kind} expects {a} qubit(s), got {}",
                qubits.len()
            )))
        }
        None if qubits.is_empty() => {
            return Err(Error::validation(format!(
                "{kind} needs at least one qubit"
            )))
        }
        _ => {}
    }
    if params.len() != kind.num_params() {
        return Err(Error::validation(format!(
            "{kind} expects {} parameter(s), got {}",
            kind.num_params(),
            params.len()
        )));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::validation(format!(
                "qubit {q} out of range for {n}-qubit circuit"
            )));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::validation(format!("{kind} repeats qubit {q}")));
        }
    }
    Ok(())
}

/// Dependency graph over the gates of a circuit; node `i` is `circuit.gates[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDag {
    pub ids: Vec<usize>,
    pub durations: Vec<Nanos>,
    pub preds: Vec<Vec<usize>>,
    pub succs: Vec<Vec<usize>>,
}

impl CircuitDag {
    /// Builds a graph from explicit edges. Used to feed hand-made graphs (including
    /// cyclic ones) to the scheduler.
    pub fn from_edges(durations: Vec<Nanos>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = durations.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::validation(format!("edge ({a},{b}) out of range")));
            }
            if !succs[a].contains(&b) {
                succs[a].push(b);
                preds[b].push(a);
            }
        }
        Ok(CircuitDag {
            ids: (0..n).collect(),
            durations,
            preds,
            succs,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Edges as `(pred, succ)` gate ids, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .succs
            .iter()
            .enumerate()
            .flat_map(|(a, ss)| ss.iter().map(move |&b| (a, b)))
            .map(|(a, b)| (self.ids[a], self.ids[b]))
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn build_dag(circuit: &Circuit) -> CircuitDag {
    let n = circuit.gates.len();
    let mut last: Vec<Option<usize>> = vec![None; circuit.n];
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    for (i, g) in circuit.gates.iter().enumerate() {
        for &q in &g.qubits {
            if let Some(p) = last[q] {
                if !preds[i].contains(&p) {
                    preds[i].push(p);
                    succs[p].push(i);
                }
            }
            last[q] = Some(i);
        }
    }
    CircuitDag {
        ids: circuit.gates.iter().map(|g| g.id).collect(),
        durations: circuit.gates.iter().map(|g| g.duration).collect(),
        preds,
        succs,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Start time per DAG node, aligned with `CircuitDag::ids`.
    pub start: Vec<Nanos>,
    pub ids: Vec<usize>,
    pub total_duration: Nanos,
}

impl Schedule {
    pub fn start_of(&self, id: usize) -> Option<Nanos> {
        self.ids
            .iter()
            .position(|&i| i == id)
            .map(|p| self.start[p])
    }
}

/// As-soon-as-possible start times; the makespan is the longest weighted path.
pub fn asap_schedule(dag: &CircuitDag) -> Result<Schedule> {
    let n = dag.len();
    let mut indeg: Vec<usize> = dag.preds.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut start = vec![0; n];
    let mut visited = 0;
    let mut total = 0;
    while let Some(v) = queue.pop_front() {
        visited += 1;
        let finish = start[v] + dag.durations[v];
        total = total.max(finish);
        for &s in &dag.succs[v] {
            start[s] = start[s].max(finish);
            indeg[s] -= 1;
            if indeg[s] == 0 {
                queue.push_back(s);
            }
        }
    }
    if visited != n {
        return Err(Error::Structural(format!(
            "dependency cycle: {} of {n} gates unreachable in topological order",
            n - visited
        )));
    }
    Ok(Schedule {
        start,
        ids: dag.ids.clone(),
        total_duration: total,
    })
}

/// Layer index of every gate. Physical gates occupy layers `1..=depth`; virtual,
/// meta and switch gates take the current layer of their qubits without opening
/// a new one (0 when nothing physical precedes them). Barriers synchronise the
/// layer counters of the qubits they span.
pub fn layer_indices(circuit: &Circuit) -> Vec<usize> {
    let mut level = vec![0usize; circuit.n];
    circuit
        .gates
        .iter()
        .map(|g| {
            let cur = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
            let l = if g.kind.is_physical() { cur + 1 } else { cur };
            if g.kind.is_physical() || g.kind == GateKind::Barrier {
                for &q in &g.qubits {
                    level[q] = l;
                }
            }
            l
        })
        .collect()
}

/// Layered depth over physical gates only.
pub fn depth(circuit: &Circuit) -> usize {
    layer_indices(circuit).into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub n1: usize,
    pub n2: usize,
    pub depth: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub rho_total: f64,
}

/// Single- and two-qubit gate densities, `rho1 = N1/(nD)` and `rho2 = 2 N2/(nD)`.
pub fn gate_densities(circuit: &Circuit) -> Result<DensityReport> {
    densities_over(circuit, circuit.n)
}

/// Densities normalised by an explicit qubit count (e.g. only the active qubits).
pub fn densities_over(circuit: &Circuit, n: usize) -> Result<DensityReport> {
    if circuit.gates.iter().any(|g| g.kind.is_mux()) {
        return Err(Error::validation(
            "gate densities are defined on circuits without switch gates",
        ));
    }
    let n1 = circuit.count_class(GateClass::SinglePhysical);
    let n2 = circuit.count_class(GateClass::TwoPhysical);
    let d = depth(circuit);
    let cells = n * d;
    if cells == 0 {
        return Err(Error::Degenerate(format!("n*D = 0 (n = {n}, D = {d})")));
    }
    let rho1 = n1 as f64 / cells as f64;
    let rho2 = 2.0 * n2 as f64 / cells as f64;
    Ok(DensityReport {
        n1,
        n2,
        depth: d,
        rho1,
        rho2,
        rho_total: rho1 + rho2,
    })
}
