//! Grouping of coupler drive lines into stars that can never fire concurrently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{asap_schedule, build_dag, Circuit, GateClass};
use crate::hardware::CouplingMap;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplerGrouping {
    /// Edges `(lo, hi)` per group.
    pub groups: Vec<Vec<(usize, usize)>>,
    /// Star center of each group.
    pub centers: Vec<usize>,
    pub group_of: BTreeMap<(usize, usize), usize>,
    /// Set when the greedy fallback was used, so minimality is not guaranteed.
    pub non_minimal: bool,
}

#[derive(Serialize, Deserialize)]
struct GroupsFile {
    groups: Vec<Vec<[usize; 2]>>,
}

impl CouplerGrouping {
    /// Builds a grouping from explicit edge groups (no star requirement).
    pub fn from_groups(groups: Vec<Vec<(usize, usize)>>) -> Self {
        let groups: Vec<Vec<(usize, usize)>> = groups
            .into_iter()
            .map(|g| g.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect())
            .collect();
        let group_of = groups
            .iter()
            .enumerate()
            .flat_map(|(i, g)| g.iter().map(move |&e| (e, i)))
            .collect();
        let centers = groups
            .iter()
            .map(|g| common_qubit(g).unwrap_or(usize::MAX))
            .collect();
        CouplerGrouping {
            groups,
            centers,
            group_of,
            non_minimal: false,
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Every group's edges share one qubit.
    pub fn is_star_partition(&self) -> bool {
        self.groups.iter().all(|g| common_qubit(g).is_some())
    }

    pub fn to_json(&self) -> String {
        let file = GroupsFile {
            groups: self
                .groups
                .iter()
                .map(|g| g.iter().map(|&(a, b)| [a, b]).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GroupsFile = serde_json::from_str(text)?;
        Ok(Self::from_groups(
            file.groups
                .into_iter()
                .map(|g| g.into_iter().map(|[a, b]| (a, b)).collect())
                .collect(),
        ))
    }
}

fn common_qubit(edges: &[(usize, usize)]) -> Option<usize> {
    let &(a, b) = edges.first()?;
    [a, b]
        .into_iter()
        .find(|&q| edges.iter().all(|&(x, y)| x == q || y == q))
}

/// Star grouping. Bipartite maps (grids, heavy-hex) take the smaller colour class
/// as centers, the one containing qubit 0 on ties; every other map falls back to
/// greedy max-degree star peeling and sets `non_minimal`.
pub fn group_couplers_alternating(map: &CouplingMap) -> CouplerGrouping {
    let adj = map.adjacency();
    let mut centers_of_edge: Vec<(usize, (usize, usize))> = Vec::with_capacity(map.edges.len());
    let non_minimal;
    if let Some(side) = map.bipartition() {
        let count_true = side.iter().filter(|&&s| s).count();
        let count_false = side.len() - count_true;
        let zero_side = side.first().copied().unwrap_or(false);
        let (ct, cf) = (count_true, count_false);
        let center_side = match ct.cmp(&cf) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => zero_side,
        };
        for &(a, b) in &map.edges {
            let c = if side[a] == center_side { a } else { b };
            centers_of_edge.push((c, (a, b)));
        }
        non_minimal = false;
    } else {
        let mut remaining: Vec<Vec<usize>> = adj.clone();
        let mut left = map.edges.len();
        while left > 0 {
            let c = (0..map.n)
                .max_by(|&x, &y| remaining[x].len().cmp(&remaining[y].len()).then(y.cmp(&x)))
                .expect("edges imply qubits");
            for w in std::mem::take(&mut remaining[c]) {
                remaining[w].retain(|&v| v != c);
                centers_of_edge.push((c, (c.min(w), c.max(w))));
                left -= 1;
            }
        }
        non_minimal = true;
    }
    let mut by_center: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (c, e) in centers_of_edge {
        by_center.entry(c).or_default().push(e);
    }
    let mut g = CouplerGrouping::from_groups(by_center.values().cloned().collect());
    g.centers = by_center.keys().copied().collect();
    g.non_minimal = non_minimal;
    g
}

/// Result of a conflict check; `witness` holds the first overlapping gate-id pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    pub ok: bool,
    pub witness: Option<(usize, usize)>,
}

/// Checks that no two two-qubit gates of the same coupler group overlap in the ASAP schedule.
pub fn verify_conflict_free(
    circuit: &Circuit,
    grouping: &CouplerGrouping,
) -> Result<ConflictReport> {
    let sched = asap_schedule(&build_dag(circuit))?;
    let mut per_group: BTreeMap<usize, Vec<(u64, u64, usize)>> = BTreeMap::new();
    for (i, g) in circuit.gates.iter().enumerate() {
        if g.kind.class() != GateClass::TwoPhysical {
            continue;
        }
        let e = (g.qubits[0].min(g.qubits[1]), g.qubits[0].max(g.qubits[1]));
        if let Some(&grp) = grouping.group_of.get(&e) {
            let s = sched.start[i];
            per_group
                .entry(grp)
                .or_default()
                .push((s, s + g.duration, g.id));
        }
    }
    let mut first: Option<(u64, (usize, usize))> = None;
    for ivs in per_group.values_mut() {
        ivs.sort_unstable();
        for w in ivs.windows(2) {
            let (s0, f0, id0) = w[0];
            let (s1, _, id1) = w[1];
            if s1 < f0 && first.is_none_or(|(t, p)| (s0, (id0, id1)) < (t, p)) {
                first = Some((s0, (id0, id1)));
            }
        }
    }
    Ok(ConflictReport {
        ok: first.is_none(),
        witness: first.map(|(_, p)| p),
    })
}
