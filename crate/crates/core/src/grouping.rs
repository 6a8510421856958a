//! Assignment of qubits to shared single-qubit control switches.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hardware::CouplingMap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingStrategy {
    Trivial,
    Random,
    Clustered,
    Dispersed,
}

impl GroupingStrategy {
    pub const ALL: [GroupingStrategy; 4] = [
        GroupingStrategy::Trivial,
        GroupingStrategy::Random,
        GroupingStrategy::Clustered,
        GroupingStrategy::Dispersed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupingStrategy::Trivial => "trivial",
            GroupingStrategy::Random => "random",
            GroupingStrategy::Clustered => "clustered",
            GroupingStrategy::Dispersed => "dispersed",
        }
    }

    /// Groups all qubits of `map`.
    pub fn build(self, map: &CouplingMap, k: usize, seed: u64) -> Result<SwitchGrouping> {
        match self {
            GroupingStrategy::Trivial => trivial_grouping(map.n, k),
            GroupingStrategy::Random => random_grouping(map.n, k, seed),
            GroupingStrategy::Clustered => clustered_grouping(map, k, seed),
            GroupingStrategy::Dispersed => dispersed_grouping(map, k),
        }
    }
}

impl fmt::Display for GroupingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown grouping strategy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchGrouping {
    /// Capacity (qubits per switch).
    pub k: usize,
    pub groups: Vec<Vec<usize>>,
    pub group_of: Vec<usize>,
    /// Smallest pairwise graph distance inside any group, when computed.
    pub min_distance: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct GroupingFile {
    k: usize,
    groups: Vec<Vec<usize>>,
}

/// Group sizes for `n` qubits on `ceil(n/k)` switches, as even as possible, larger first.
pub fn balanced_sizes(n: usize, k: usize) -> Result<Vec<usize>> {
    if k < 1 || k > n {
        return Err(Error::validation(format!(
            "qubits per switch must satisfy 1 <= k <= n (k = {k}, n = {n})"
        )));
    }
    let m = n.div_ceil(k);
    let (base, extra) = (n / m, n % m);
    Ok((0..m).map(|i| base + usize::from(i < extra)).collect())
}

impl SwitchGrouping {
    /// Validates an exact cover of `0..n` and builds the lookup table.
    pub fn from_groups(n: usize, k: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut group_of = vec![usize::MAX; n];
        for (i, g) in groups.iter().enumerate() {
            if g.is_empty() || g.len() > k {
                return Err(Error::validation(format!(
                    "switch {i} has {} qubits, capacity is {k}",
                    g.len()
                )));
            }
            for &q in g {
                if q >= n {
                    return Err(Error::validation(format!("qubit {q} out of range")));
                }
                if group_of[q] != usize::MAX {
                    return Err(Error::validation(format!("qubit {q} assigned twice")));
                }
                group_of[q] = i;
            }
        }
        if let Some(q) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::validation(format!("qubit {q} is not on any switch")));
        }
        Ok(SwitchGrouping {
            k,
            groups,
            group_of,
            min_distance: None,
        })
    }

    pub fn n(&self) -> usize {
        self.group_of.len()
    }

    /// Number of switches.
    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GroupingFile {
            k: self.k,
            groups: self.groups.clone(),
        })
        .expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: GroupingFile = serde_json::from_str(text)?;
        let n = f.groups.iter().map(Vec::len).sum();
        Self::from_groups(n, f.k, f.groups)
    }

    /// Minimum graph distance between two qubits sharing a group (`None` if all singletons).
    pub fn intra_min_distance(&self, dist: &[Vec<u32>]) -> Option<u32> {
        self.groups
            .iter()
            .flat_map(|g| {
                g.iter()
                    .enumerate()
                    .flat_map(move |(i, &a)| g[i + 1..].iter().map(move |&b| dist[a][b]))
            })
            .min()
    }
}

fn blocks(order: &[usize], sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &s in sizes {
        out.push(order[at..at + s].to_vec());
        at += s;
    }
    out
}

/// Consecutive index blocks.
pub fn trivial_grouping(n: usize, k: usize) -> Result<SwitchGrouping> {
    let sizes = balanced_sizes(n, k)?;
    let order: Vec<usize> = (0..n).collect();
    SwitchGrouping::from_groups(n, k, blocks(&order, &sizes))
}

/// Uniform shuffle, then blocks.
pub fn random_grouping(n: usize, k: usize, seed: u64) -> Result<SwitchGrouping> {
    let sizes = balanced_sizes(n, k)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    SwitchGrouping::from_groups(n, k, blocks(&order, &sizes))
}

fn require_connected(map: &CouplingMap) -> Result<()> {
    if map.n > 0 && !map.is_connected() {
        return Err(Error::validation("coupling map must be connected"));
    }
    Ok(())
}

/// Objective of the clustered strategy: (connected groups, intra-group edges).
pub fn cluster_objective(
    adj: &[Vec<usize>],
    groups: &[Vec<usize>],
    group_of: &[usize],
) -> (usize, usize) {
    let mut connected = 0;
    let mut intra = 0;
    for (i, g) in groups.iter().enumerate() {
        let (c, e) = group_stats(adj, g, group_of, i);
        connected += usize::from(c);
        intra += e;
    }
    (connected, intra)
}

fn group_stats(adj: &[Vec<usize>], g: &[usize], group_of: &[usize], id: usize) -> (bool, usize) {
    let mut edges = 0;
    for &q in g {
        edges += adj[q]
            .iter()
            .filter(|&&w| group_of[w] == id && w > q)
            .count();
    }
    let Some(&start) = g.first() else {
        return (true, 0);
    };
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if group_of[w] == id && !seen.contains(&w) {
                seen.push(w);
                queue.push_back(w);
            }
        }
    }
    (seen.len() == g.len(), edges)
}

fn region_growing(adj: &[Vec<usize>], sizes: &[usize], first: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut assigned = vec![false; n];
    let mut groups = Vec::with_capacity(sizes.len());
    for (gi, &size) in sizes.iter().enumerate() {
        let free_deg =
            |q: usize, assigned: &[bool]| adj[q].iter().filter(|&&w| !assigned[w]).count();
        // Start in a "corner" of the remaining region so leftovers stay contiguous.
        let start = if gi == 0 {
            first
        } else {
            (0..n)
                .filter(|&q| !assigned[q])
                .min_by_key(|&q| (free_deg(q, &assigned), q))
                .expect("sizes sum to n")
        };
        let mut group = vec![start];
        assigned[start] = true;
        while group.len() < size {
            let next = (0..n)
                .filter(|&q| !assigned[q])
                .map(|q| (adj[q].iter().filter(|w| group.contains(w)).count(), q))
                .filter(|&(links, _)| links > 0)
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
                .map(|(_, q)| q)
                .or_else(|| (0..n).find(|&q| !assigned[q]))
                .expect("sizes sum to n");
            assigned[next] = true;
            group.push(next);
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups
}

fn lookup(n: usize, groups: &[Vec<usize>]) -> Vec<usize> {
    let mut group_of = vec![0; n];
    for (i, g) in groups.iter().enumerate() {
        for &q in g {
            group_of[q] = i;
        }
    }
    group_of
}

/// Trace of objective values during refinement (for monotonicity checks).
pub fn clustered_grouping_traced(
    map: &CouplingMap,
    k: usize,
    seed: u64,
) -> Result<(SwitchGrouping, Vec<(usize, usize)>)> {
    let n = map.n;
    let sizes = balanced_sizes(n, k)?;
    require_connected(map)?;
    let adj = map.adjacency();
    let first = ChaCha8Rng::seed_from_u64(seed).random_range(0..n);
    let grown = region_growing(&adj, &sizes, first);
    let trivial = blocks(&(0..n).collect::<Vec<_>>(), &sizes);
    let mut groups = {
        let a = cluster_objective(&adj, &grown, &lookup(n, &grown));
        let b = cluster_objective(&adj, &trivial, &lookup(n, &trivial));
        if b > a {
            trivial
        } else {
            grown
        }
    };
    let mut group_of = lookup(n, &groups);
    let mut stats: Vec<(bool, usize)> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| group_stats(&adj, g, &group_of, i))
        .collect();
    let score = |stats: &[(bool, usize)]| {
        stats
            .iter()
            .fold((0, 0), |(c, e), &(ok, x)| (c + usize::from(ok), e + x))
    };
    let mut trace = vec![score(&stats)];

    for _ in 0..50 * n {
        let current = score(&stats);
        let mut best: Option<((usize, usize), (usize, usize), [(bool, usize); 2])> = None;
        for u in 0..n {
            let gu = group_of[u];
            // candidates: neighbours' groups only (boundary swaps)
            for v in (u + 1)..n {
                let gv = group_of[v];
                if gu == gv {
                    continue;
                }
                let touches = adj[u].iter().any(|&w| group_of[w] == gv)
                    || adj[v].iter().any(|&w| group_of[w] == gu);
                if !touches {
                    continue;
                }
                group_of[u] = gv;
                group_of[v] = gu;
                let pu = groups[gu].iter().position(|&x| x == u).unwrap();
                let pv = groups[gv].iter().position(|&x| x == v).unwrap();
                groups[gu][pu] = v;
                groups[gv][pv] = u;
                let su = group_stats(&adj, &groups[gu], &group_of, gu);
                let sv = group_stats(&adj, &groups[gv], &group_of, gv);
                groups[gu][pu] = u;
                groups[gv][pv] = v;
                group_of[u] = gu;
                group_of[v] = gv;
                let old_u = stats[gu];
                let old_v = stats[gv];
                let c = current.0 + usize::from(su.0) + usize::from(sv.0)
                    - usize::from(old_u.0)
                    - usize::from(old_v.0);
                let e = current.1 + su.1 + sv.1 - old_u.1 - old_v.1;
                if (c, e) > current && best.is_none_or(|(_, s, _)| (c, e) > s) {
                    best = Some(((u, v), (c, e), [su, sv]));
                }
            }
        }
        let Some(((u, v), s, [su, sv])) = best else {
            break;
        };
        let (gu, gv) = (group_of[u], group_of[v]);
        let pu = groups[gu].iter().position(|&x| x == u).unwrap();
        let pv = groups[gv].iter().position(|&x| x == v).unwrap();
        groups[gu][pu] = v;
        groups[gv][pv] = u;
        group_of[u] = gv;
        group_of[v] = gu;
        stats[gu] = su;
        stats[gv] = sv;
        trace.push(s);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    Ok((SwitchGrouping::from_groups(n, k, groups)?, trace))
}

/// Balanced groups that are connected and edge-dense where possible.
pub fn clustered_grouping(map: &CouplingMap, k: usize, seed: u64) -> Result<SwitchGrouping> {
    clustered_grouping_traced(map, k, seed).map(|(g, _)| g)
}

/// Balanced groups whose members are pairwise far apart on the coupling map.
pub fn dispersed_grouping(map: &CouplingMap, k: usize) -> Result<SwitchGrouping> {
    let n = map.n;
    let sizes = balanced_sizes(n, k)?;
    require_connected(map)?;
    let dist = map.distance_matrix();
    let m = sizes.len();
    let hi = sizes[0];
    let hi_count = sizes.iter().filter(|&&s| s == hi).count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&q| (std::cmp::Reverse(map.degree(q)), q));

    let attempt = |d: u32| -> Option<Vec<Vec<usize>>> {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut at_hi = 0;
        for &q in &order {
            let choice = (0..m)
                .filter(|&g| {
                    let len = groups[g].len();
                    len < hi && (len + 1 < hi || at_hi < hi_count || hi == sizes[m - 1])
                })
                .filter(|&g| groups[g].iter().all(|&p| dist[p][q] >= d))
                .min_by_key(|&g| (groups[g].len(), g))?;
            groups[choice].push(q);
            if groups[choice].len() == hi {
                at_hi += 1;
            }
        }
        Some(groups)
    };

    let upper = if n > 1 { map.diameter() } else { 1 };
    let mut d = upper.max(1);
    let groups = loop {
        if let Some(g) = attempt(d) {
            break g;
        }
        // d = 1 only needs distinct qubits, which always succeeds
        d -= 1;
    };
    let mut groups: Vec<Vec<usize>> = groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    groups.sort();
    let mut out = SwitchGrouping::from_groups(n, k, groups)?;
    out.min_distance = out.intra_min_distance(&dist);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::square_grid;
    use std::collections::BTreeSet;

    fn line(n: usize) -> CouplingMap {
        CouplingMap::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn trivial_examples() {
        let g = trivial_grouping(5, 2).unwrap();
        assert_eq!(g.groups, vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(trivial_grouping(25, 25).unwrap().m(), 1);
        let g = trivial_grouping(121, 13).unwrap();
        assert_eq!(g.m(), 10);
        assert!(g.groups.iter().all(|x| x.len() == 13 || x.len() == 12));
        assert!(matches!(trivial_grouping(4, 0), Err(Error::Validation(_))));
        assert!(matches!(trivial_grouping(4, 5), Err(Error::Validation(_))));
    }

    #[test]
    fn random_reaches_all_pairings_of_four() {
        let mut seen = BTreeSet::new();
        for seed in 0..1000 {
            let g = random_grouping(4, 2, seed).unwrap();
            let mut parts: Vec<Vec<usize>> = g
                .groups
                .into_iter()
                .map(|mut x| {
                    x.sort();
                    x
                })
                .collect();
            parts.sort();
            seen.insert(parts);
        }
        assert_eq!(seen.len(), 3);
        assert_eq!(
            random_grouping(10, 3, 5).unwrap(),
            random_grouping(10, 3, 5).unwrap()
        );
    }

    #[test]
    fn clustered_two_by_two() {
        let map = square_grid(2, 2).unwrap();
        let g = clustered_grouping(&map, 2, 0).unwrap();
        for grp in &g.groups {
            assert!(map.has_edge(grp[0], grp[1]));
        }
        assert_eq!(
            clustered_grouping(&map, 4, 0).unwrap().groups,
            vec![vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn clustered_refinement_monotone() {
        let map = square_grid(5, 5).unwrap();
        for k in [3, 4, 6, 7] {
            let (g, trace) = clustered_grouping_traced(&map, k, 11).unwrap();
            assert!(trace.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(g.m(), 25usize.div_ceil(k));
        }
    }

    #[test]
    fn dispersed_line_of_three() {
        let g = dispersed_grouping(&line(3), 2).unwrap();
        assert_eq!(g.groups, vec![vec![0, 2], vec![1]]);
        assert_eq!(g.min_distance, Some(2));
        let g = dispersed_grouping(&line(3), 1).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.min_distance, None);
    }

    #[test]
    fn json_roundtrip_and_rejects() {
        let g = trivial_grouping(5, 2).unwrap();
        assert_eq!(g.to_json(), r#"{"k":2,"groups":[[0,1],[2,3],[4]]}"#);
        assert_eq!(SwitchGrouping::from_json(&g.to_json()).unwrap(), g);
        assert!(SwitchGrouping::from_json(r#"{"k":2,"groups":[[0,1],[1,2]]}"#).is_err());
    }

    #[test]
    fn strategy_names() {
        for s in GroupingStrategy::ALL {
            assert_eq!(s.name().parse::<GroupingStrategy>().unwrap(), s);
        }
    }
}
