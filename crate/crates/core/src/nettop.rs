//! Agent networks and the coupling convention `J_ij = J / n`.
//!
//! Adjacency is stored in compressed sparse row form: `neighbors(i)` is a
//! sorted slice. The coupling divisor `n` is a property of the topology
//! rather than of the realized degrees: for a random small-world network it
//! is the expected degree `p_sw * N`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    Complete,
    RegularRing,
    RandomSmallWorld,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::Complete => "Complete",
            TopologyKind::RegularRing => "RegularRing",
            TopologyKind::RandomSmallWorld => "RandomSmallWorld",
        })
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Complete" => Ok(TopologyKind::Complete),
            "RegularRing" => Ok(TopologyKind::RegularRing),
            "RandomSmallWorld" => Ok(TopologyKind::RandomSmallWorld),
            other => Err(Error::Parse(format!("unknown topology kind `{other}`"))),
        }
    }
}

/// Immutable undirected network over `N` agents.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    n_agents: usize,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    n_divisor: f64,
    kind: TopologyKind,
}

impl NetworkTopology {
    /// Builds a topology from per-agent neighbor lists, checking symmetry and
    /// the absence of self-loops.
    fn from_lists(lists: Vec<Vec<u32>>, n_divisor: f64, kind: TopologyKind) -> Result<Self> {
        let n_agents = lists.len();
        let mut offsets = Vec::with_capacity(n_agents + 1);
        let mut adjacency = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0);
        for (i, mut list) in lists.into_iter().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.binary_search(&(i as u32)).is_ok() {
                return Err(Error::invalid(format!("self-loop at agent {i}")));
            }
            adjacency.extend_from_slice(&list);
            offsets.push(adjacency.len());
        }
        let topo = NetworkTopology {
            n_agents,
            offsets,
            adjacency,
            n_divisor,
            kind,
        };
        topo.check_symmetric()?;
        Ok(topo)
    }

    fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n_agents {
            for &j in self.neighbors(i) {
                let j = j as usize;
                if j >= self.n_agents {
                    return Err(Error::invalid(format!("agent {i} links to out-of-range agent {j}")));
                }
                if self.neighbors(j).binary_search(&(i as u32)).is_err() {
                    return Err(Error::invalid(format!("edge {i}->{j} has no reverse")));
                }
            }
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    /// The `n` in `J_ij = J / n`.
    pub fn n_divisor(&self) -> f64 {
        self.n_divisor
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len() / 2
    }

    /// Unordered edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_agents).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Breadth-first connectivity check.
    pub fn is_connected(&self) -> bool {
        if self.n_agents == 0 {
            return true;
        }
        let mut seen = vec![false; self.n_agents];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in self.neighbors(i) {
                let j = j as usize;
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n_agents
    }

    /// Text edge list: a header `N <N> kind <kind> n_divisor <value>` then one
    /// `i j` line per edge with `i < j`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "N {} kind {} n_divisor {}\n",
            self.n_agents, self.kind, self.n_divisor
        );
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (n_agents, kind, n_divisor) = match fields.as_slice() {
            ["N", n, "kind", kind, "n_divisor", div] => {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("line 1: bad agent count `{n}`")))?;
                let div: f64 = div
                    .parse()
                    .map_err(|_| Error::Parse(format!("line 1: bad n_divisor `{div}`")))?;
                (n, kind.parse::<TopologyKind>()?, div)
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line 1: expected `N <N> kind <kind> n_divisor <value>`, got `{header}`"
                )))
            }
        };
        if n_agents < 2 {
            return Err(Error::invalid("N must be at least 2"));
        }
        if !(n_divisor >= 0.0) || !n_divisor.is_finite() {
            return Err(Error::invalid(format!("n_divisor must be finite and non-negative, got {n_divisor}")));
        }
        let mut lists = vec![Vec::new(); n_agents];
        for (idx, line) in lines {
            let lineno = idx + 1;
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {lineno}: expected `i j`, got `{line}`")))
            };
            let i = parse(parts.next())?;
            let j = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!("line {lineno}: trailing fields in `{line}`")));
            }
            if i >= j || j >= n_agents {
                return Err(Error::Parse(format!(
                    "line {lineno}: need i < j < N, got `{line}`"
                )));
            }
            lists[i].push(j as u32);
            lists[j].push(i as u32);
        }
        Self::from_lists(lists, n_divisor, kind)
    }
}

pub fn build_complete(n_agents: usize) -> Result<NetworkTopology> {
    if n_agents < 2 {
        return Err(Error::invalid(format!("complete network needs N >= 2, got {n_agents}")));
    }
    let lists = (0..n_agents)
        .map(|i| (0..n_agents as u32).filter(|&j| j as usize != i).collect())
        .collect();
    NetworkTopology::from_lists(lists, n_agents as f64, TopologyKind::Complete)
}

/// Circulant ring where every agent has exactly `n` neighbors. Even `n` links
/// `n/2` agents on each side; odd `n` links `(n-1)/2` per side plus the
/// antipodal agent, which needs an even `N`.
pub fn build_regular_ring(n_agents: usize, n: usize) -> Result<NetworkTopology> {
    if n_agents < 3 {
        return Err(Error::invalid(format!("ring needs N >= 3, got {n_agents}")));
    }
    if n == 0 || n >= n_agents {
        return Err(Error::invalid(format!("ring degree must satisfy 1 <= n <= N-1, got n={n}, N={n_agents}")));
    }
    if n % 2 == 1 && n_agents % 2 == 1 {
        return Err(Error::invalid(format!(
            "odd ring degree n={n} needs an even N for the antipodal link, got N={n_agents}"
        )));
    }
    let half = n / 2;
    let lists = (0..n_agents)
        .map(|i| {
            let mut list: Vec<u32> = (1..=half)
                .flat_map(|k| [(i + k) % n_agents, (i + n_agents - k) % n_agents])
                .map(|j| j as u32)
                .collect();
            if n % 2 == 1 {
                list.push(((i + n_agents / 2) % n_agents) as u32);
            }
            list
        })
        .collect();
    let topo = NetworkTopology::from_lists(lists, n as f64, TopologyKind::RegularRing)?;
    debug_assert!((0..n_agents).all(|i| topo.degree(i) == n));
    Ok(topo)
}

/// Erdős–Rényi style random network: every unordered pair is linked
/// independently with probability `p_sw`. Isolated agents are allowed.
pub fn build_random_smallworld(n_agents: usize, p_sw: f64, seed: u64) -> Result<NetworkTopology> {
    if n_agents < 2 {
        return Err(Error::invalid(format!("random network needs N >= 2, got {n_agents}")));
    }
    if !(0.0..=1.0).contains(&p_sw) {
        return Err(Error::invalid(format!("p_sw must lie in [0, 1], got {p_sw}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists = vec![Vec::new(); n_agents];
    for i in 0..n_agents {
        for j in (i + 1)..n_agents {
            if rng.random_bool(p_sw) {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
    }
    NetworkTopology::from_lists(lists, p_sw * n_agents as f64, TopologyKind::RandomSmallWorld)
}
