//! Coupling maps and native-gate duration tables for the benchmarked platforms.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{GateClass, GateKind, Nanos};
use crate::{Error, Result};

/// Switch settling delay used when a spec does not say otherwise.
pub const DEFAULT_T_SW_NS: Nanos = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMap {
    pub n: usize,
    /// Undirected edges stored as `(low, high)`, sorted and unique.
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<(f64, f64)>>,
}

impl CouplingMap {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::validation(format!("self-loop on qubit {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::validation(format!(
                    "edge ({a},{b}) out of range for {n} qubits"
                )));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(CouplingMap {
            n,
            edges: out,
            coords: None,
        })
    }

    pub fn with_coords(mut self, coords: Vec<(f64, f64)>) -> Self {
        debug_assert_eq!(coords.len(), self.n);
        self.coords = Some(coords);
        self
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().copied().collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degree(&self, q: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == q || b == q)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All-pairs hop distances; `u32::MAX` marks unreachable pairs.
    pub fn distance_matrix(&self) -> Vec<Vec<u32>> {
        let adj = self.adjacency();
        (0..self.n)
            .map(|src| {
                let mut dist = vec![u32::MAX; self.n];
                dist[src] = 0;
                let mut queue = VecDeque::from([src]);
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if dist[w] == u32::MAX {
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                dist
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distance_matrix()[0].iter().all(|&d| d != u32::MAX)
    }

    pub fn diameter(&self) -> u32 {
        self.distance_matrix()
            .into_iter()
            .flatten()
            .filter(|&d| d != u32::MAX)
            .max()
            .unwrap_or(0)
    }

    /// Two-colouring of the graph, if it is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let adj = self.adjacency();
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                let cv = color[v].unwrap();
                for &w in &adj[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(!cv);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }
}

/// `rows x cols` nearest-neighbour lattice, qubits numbered row-major.
pub fn square_grid(rows: usize, cols: usize) -> Result<CouplingMap> {
    if rows == 0 || cols == 0 {
        return Err(Error::validation(format!(
            "grid dimensions must be positive, got {rows}x{cols}"
        )));
    }
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    let coords = (0..rows * cols)
        .map(|q| ((q % cols) as f64, (q / cols) as f64))
        .collect();
    Ok(CouplingMap::new(rows * cols, edges)?.with_coords(coords))
}

// 127-qubit Eagle heavy-hexagon connectivity: seven rows of qubits joined by
// four bridge qubits between consecutive rows.
const HEAVY_HEX_127_EDGES: [(usize, usize); 144] = [
    (0, 1),
    (0, 14),
    (1, 2),
    (2, 3),
    (3, 4),
    (4, 5),
    (4, 15),
    (5, 6),
    (6, 7),
    (7, 8),
    (8, 9),
    (8, 16),
    (9, 10),
    (10, 11),
    (11, 12),
    (12, 13),
    (12, 17),
    (14, 18),
    (15, 22),
    (16, 26),
    (17, 30),
    (18, 19),
    (19, 20),
    (20, 21),
    (20, 33),
    (21, 22),
    (22, 23),
    (23, 24),
    (24, 25),
    (24, 34),
    (25, 26),
    (26, 27),
    (27, 28),
    (28, 29),
    (28, 35),
    (29, 30),
    (30, 31),
    (31, 32),
    (32, 36),
    (33, 39),
    (34, 43),
    (35, 47),
    (36, 51),
    (37, 38),
    (37, 52),
    (38, 39),
    (39, 40),
    (40, 41),
    (41, 42),
    (41, 53),
    (42, 43),
    (43, 44),
    (44, 45),
    (45, 46),
    (45, 54),
    (46, 47),
    (47, 48),
    (48, 49),
    (49, 50),
    (49, 55),
    (50, 51),
    (52, 56),
    (53, 60),
    (54, 64),
    (55, 68),
    (56, 57),
    (57, 58),
    (58, 59),
    (58, 71),
    (59, 60),
    (60, 61),
    (61, 62),
    (62, 63),
    (62, 72),
    (63, 64),
    (64, 65),
    (65, 66),
    (66, 67),
    (66, 73),
    (67, 68),
    (68, 69),
    (69, 70),
    (70, 74),
    (71, 77),
    (72, 81),
    (73, 85),
    (74, 89),
    (75, 76),
    (75, 90),
    (76, 77),
    (77, 78),
    (78, 79),
    (79, 80),
    (79, 91),
    (80, 81),
    (81, 82),
    (82, 83),
    (83, 84),
    (83, 92),
    (84, 85),
    (85, 86),
    (86, 87),
    (87, 88),
    (87, 93),
    (88, 89),
    (90, 94),
    (91, 98),
    (92, 102),
    (93, 106),
    (94, 95),
    (95, 96),
    (96, 97),
    (96, 109),
    (97, 98),
    (98, 99),
    (99, 100),
    (100, 101),
    (100, 110),
    (101, 102),
    (102, 103),
    (103, 104),
    (104, 105),
    (104, 111),
    (105, 106),
    (106, 107),
    (107, 108),
    (108, 112),
    (109, 114),
    (110, 118),
    (111, 122),
    (112, 126),
    (113, 114),
    (114, 115),
    (115, 116),
    (116, 117),
    (117, 118),
    (118, 119),
    (119, 120),
    (120, 121),
    (121, 122),
    (122, 123),
    (123, 124),
    (124, 125),
    (125, 126),
];

pub fn heavy_hexagon_127() -> CouplingMap {
    // Row layout: (first qubit, first column, length); bridges sit between rows.
    const ROWS: [(usize, usize, usize); 7] = [
        (0, 0, 14),
        (18, 0, 15),
        (37, 0, 15),
        (56, 0, 15),
        (75, 0, 15),
        (94, 0, 15),
        (113, 1, 14),
    ];
    let mut coords = vec![(0.0, 0.0); 127];
    for (r, &(first, col0, len)) in ROWS.iter().enumerate() {
        for i in 0..len {
            coords[first + i] = ((col0 + i) as f64, 2.0 * r as f64);
        }
    }
    for &(a, b) in &HEAVY_HEX_127_EDGES {
        // bridge qubits are the ones not covered by any row
        let in_row = |q: usize| ROWS.iter().any(|&(f, _, l)| q >= f && q < f + l);
        if in_row(a) && !in_row(b) && coords[b] == (0.0, 0.0) {
            coords[b] = (coords[a].0, coords[a].1 + 1.0);
        }
    }
    CouplingMap::new(127, HEAVY_HEX_127_EDGES)
        .expect("embedded heavy-hex edge list is valid")
        .with_coords(coords)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardwareSpec {
    pub name: String,
    pub coupling: CouplingMap,
    /// Native physical gates and their durations.
    pub gates: BTreeMap<GateKind, Nanos>,
    /// Zero-duration frame gates.
    pub virtual_gates: BTreeSet<GateKind>,
    pub t_sw: Nanos,
}

impl HardwareSpec {
    pub fn new(
        name: impl Into<String>,
        coupling: CouplingMap,
        gates: impl IntoIterator<Item = (GateKind, Nanos)>,
        virtual_gates: impl IntoIterator<Item = GateKind>,
        t_sw: Nanos,
    ) -> Result<Self> {
        let spec = HardwareSpec {
            name: name.into(),
            coupling,
            gates: gates.into_iter().collect(),
            virtual_gates: virtual_gates.into_iter().collect(),
            t_sw,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks gate classes and the timescale ordering `t_sw < t_1q <= t_2q`.
    pub fn validate(&self) -> Result<()> {
        for &k in self.gates.keys() {
            if !k.is_physical() {
                return Err(Error::validation(format!(
                    "{k} cannot be a timed native gate"
                )));
            }
        }
        for &k in &self.virtual_gates {
            if k.class() != GateClass::Virtual {
                return Err(Error::validation(format!("{k} is not a virtual gate")));
            }
        }
        let t1 = self
            .t_1q()
            .ok_or_else(|| Error::validation("spec has no native single-qubit gate"))?;
        let t2 = self
            .t_2q()
            .ok_or_else(|| Error::validation("spec has no native two-qubit gate"))?;
        if !(self.t_sw < t1 && t1 <= t2) {
            return Err(Error::validation(format!(
                "timescales must satisfy t_sw < t_1q <= t_2q (got {} / {t1} / {t2} ns)",
                self.t_sw
            )));
        }
        Ok(())
    }

    pub fn duration_of(&self, kind: GateKind) -> Option<Nanos> {
        if let Some(&d) = self.gates.get(&kind) {
            return Some(d);
        }
        match kind.class() {
            GateClass::Virtual if self.virtual_gates.contains(&kind) => Some(0),
            GateClass::SwitchMarker | GateClass::Meta => Some(0),
            GateClass::SwitchDelay => Some(self.t_sw),
            _ => None,
        }
    }

    /// Native, virtual, switch or meta gate: anything with a defined duration.
    pub fn supports(&self, kind: GateKind) -> bool {
        self.duration_of(kind).is_some()
    }

    pub fn native_1q(&self) -> Vec<GateKind> {
        self.gates
            .keys()
            .copied()
            .filter(|k| k.class() == GateClass::SinglePhysical)
            .collect()
    }

    pub fn native_2q(&self) -> Vec<GateKind> {
        self.gates
            .keys()
            .copied()
            .filter(|k| k.class() == GateClass::TwoPhysical)
            .collect()
    }

    pub fn t_1q(&self) -> Option<Nanos> {
        self.native_1q().iter().map(|k| self.gates[k]).min()
    }

    pub fn t_2q(&self) -> Option<Nanos> {
        self.native_2q().iter().map(|k| self.gates[k]).min()
    }

    pub fn with_t_sw(mut self, t_sw: Nanos) -> Result<Self> {
        self.t_sw = t_sw;
        self.validate()?;
        Ok(self)
    }

    /// Sets every native two-qubit gate to `ns`.
    pub fn with_two_qubit_ns(mut self, ns: Nanos) -> Result<Self> {
        for (k, d) in self.gates.iter_mut() {
            if k.class() == GateClass::TwoPhysical {
                *d = ns;
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)?;
        file.into_spec("custom")
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        file.into_spec(&name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecFile::from(self)).expect("spec serialises")
    }

    /// `grid5`, `grid11` or `eagle`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "grid5" => Some(grid_spec(square_grid(5, 5).ok()?).named("grid5")),
            "grid11" => Some(grid_spec(square_grid(11, 11).ok()?).named("grid11")),
            "eagle" => Some(eagle_spec()),
            _ => None,
        }
    }

    fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

/// On-disk JSON layout of a hardware spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub gates: BTreeMap<String, GateEntry>,
    #[serde(rename = "virtual")]
    pub virtual_gates: Vec<String>,
    pub t_sw_ns: Nanos,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateEntry {
    pub arity: usize,
    pub ns: Nanos,
}

impl SpecFile {
    fn into_spec(self, name: &str) -> Result<HardwareSpec> {
        let coupling = CouplingMap::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))?;
        let mut gates = Vec::new();
        for (gate_name, entry) in &self.gates {
            let kind: GateKind = gate_name.parse()?;
            if kind.arity() != Some(entry.arity) {
                return Err(Error::validation(format!(
                    "{gate_name} declared with arity {} but has arity {:?}",
                    entry.arity,
                    kind.arity()
                )));
            }
            gates.push((kind, entry.ns));
        }
        let virtual_gates = self
            .virtual_gates
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<GateKind>>>()?;
        HardwareSpec::new(name, coupling, gates, virtual_gates, self.t_sw_ns)
    }
}

impl From<&HardwareSpec> for SpecFile {
    fn from(spec: &HardwareSpec) -> Self {
        SpecFile {
            n: spec.coupling.n,
            edges: spec.coupling.edges.iter().map(|&(a, b)| [a, b]).collect(),
            gates: spec
                .gates
                .iter()
                .map(|(k, &ns)| {
                    (
                        k.name().to_string(),
                        GateEntry {
                            arity: k.arity().unwrap_or(1),
                            ns,
                        },
                    )
                })
                .collect(),
            virtual_gates: spec.virtual_gates.iter().map(|k| k.name().into()).collect(),
            t_sw_ns: spec.t_sw,
        }
    }
}

/// Flux-tunable square-grid device: CZ/iSWAP at 200 ns, RX/RY/H at 20 ns, virtual RZ.
pub fn grid_spec(map: CouplingMap) -> HardwareSpec {
    let name = format!("grid{}", map.n);
    HardwareSpec::new(
        name,
        map,
        [
            (GateKind::Cz, 200),
            (GateKind::ISwap, 200),
            (GateKind::Rx, 20),
            (GateKind::Ry, 20),
            (GateKind::H, 20),
        ],
        [GateKind::Rz],
        DEFAULT_T_SW_NS,
    )
    .expect("grid preset is valid")
}

/// IBM Eagle (Brisbane gate times): SX/X at 60 ns, ECR at 660 ns, virtual RZ.
pub fn eagle_spec() -> HardwareSpec {
    HardwareSpec::new(
        "eagle",
        heavy_hexagon_127(),
        [(GateKind::Sx, 60), (GateKind::X, 60), (GateKind::Ecr, 660)],
        [GateKind::Rz],
        DEFAULT_T_SW_NS,
    )
    .expect("eagle preset is valid")
}
