use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::{Bfs, Reversed, Walker};

use crate::error::{Error, Result};

/// A quiver on labelled vertices with arrow multiplicities.
///
/// Invariants: no loops, no arrows between two frozen vertices, and no pair
/// of opposite arrows (2-cycles are cancelled on construction).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quiver {
    mutable: Vec<bool>,
    arrows: BTreeMap<(usize, usize), BigInt>,
}

impl Quiver {
    /// Builds a quiver from arrows `(tail, head, multiplicity)`; parallel arrows add up
    /// and opposite arrows cancel.
    pub fn new(mutable: Vec<bool>, arrows: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Result<Self> {
        let nv = mutable.len();
        let mut net: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (i, j, k) in arrows {
            if i >= nv || j >= nv {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    valid: format!("0..{nv}"),
                });
            }
            if k.is_negative() {
                return Err(Error::InvalidSeed(format!("negative multiplicity on {i}->{j}")));
            }
            if k.is_zero() {
                continue;
            }
            if i == j {
                return Err(Error::InvalidSeed(format!("loop at vertex {i}")));
            }
            if !mutable[i] && !mutable[j] {
                return Err(Error::InvalidSeed(format!("arrow {i}->{j} joins two frozen vertices")));
            }
            // store as a signed count on the ordered pair (min, max)
            let (key, signed) = if i < j { ((i, j), k) } else { ((j, i), -k) };
            *net.entry(key).or_insert_with(BigInt::zero) += signed;
        }
        let mut out = BTreeMap::new();
        for ((a, b), k) in net {
            if k.is_positive() {
                out.insert((a, b), k);
            } else if k.is_negative() {
                out.insert((b, a), -k);
            }
        }
        Ok(Quiver {
            mutable,
            arrows: out,
        })
    }

    pub fn from_edges(mutable: Vec<bool>, edges: &[(usize, usize, u64)]) -> Result<Self> {
        Self::new(
            mutable,
            edges.iter().map(|&(i, j, k)| (i, j, BigInt::from(k))),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.mutable.len()
    }

    pub fn is_mutable(&self, v: usize) -> bool {
        self.mutable.get(v).copied().unwrap_or(false)
    }

    pub fn mutable_flags(&self) -> &[bool] {
        &self.mutable
    }

    /// Arrows as `(tail, head) -> multiplicity`.
    pub fn arrows(&self) -> &BTreeMap<(usize, usize), BigInt> {
        &self.arrows
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> BigInt {
        self.arrows.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.arrows.contains_key(&(i, j))
    }

    /// Parallel arrows collapsed to one.
    pub fn reduced(&self) -> Quiver {
        Quiver {
            mutable: self.mutable.clone(),
            arrows: self.arrows.keys().map(|&e| (e, BigInt::one())).collect(),
        }
    }

    /// Arrows whose endpoints are both mutable.
    pub fn mutable_edges(&self) -> Vec<(usize, usize)> {
        self.arrows
            .keys()
            .copied()
            .filter(|&(i, j)| self.mutable[i] && self.mutable[j])
            .collect()
    }

    /// Quiver mutation at a mutable vertex `k`: add a composite arrow `i -> j` for
    /// every path `i -> k -> j`, reverse the arrows at `k`, then cancel 2-cycles.
    /// Composites between two frozen vertices are discarded.
    pub fn mutate(&self, k: usize) -> Result<Quiver> {
        if !self.is_mutable(k) {
            return Err(Error::IndexOutOfRange {
                index: k,
                valid: "mutable vertices".into(),
            });
        }
        let incoming: Vec<(usize, &BigInt)> = self
            .arrows
            .iter()
            .filter(|((_, h), _)| *h == k)
            .map(|((t, _), m)| (*t, m))
            .collect();
        let outgoing: Vec<(usize, &BigInt)> = self
            .arrows
            .iter()
            .filter(|((t, _), _)| *t == k)
            .map(|((_, h), m)| (*h, m))
            .collect();

        let mut arrows = Vec::new();
        for &(i, a) in &incoming {
            for &(j, b) in &outgoing {
                if self.mutable[i] || self.mutable[j] {
                    arrows.push((i, j, a * b));
                }
            }
        }
        for (&(i, j), m) in &self.arrows {
            if i == k || j == k {
                arrows.push((j, i, m.clone()));
            } else {
                arrows.push((i, j, m.clone()));
            }
        }
        Quiver::new(self.mutable.clone(), arrows)
    }

    /// Marks vertices frozen and drops arrows that now join two frozen vertices.
    pub fn freeze(&self, vertices: &[usize]) -> Result<Quiver> {
        let mut mutable = self.mutable.clone();
        for &v in vertices {
            if !self.is_mutable(v) {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    valid: "mutable vertices".into(),
                });
            }
            mutable[v] = false;
        }
        let arrows = self
            .arrows
            .iter()
            .filter(|((i, j), _)| mutable[*i] || mutable[*j])
            .map(|(&e, m)| (e, m.clone()))
            .collect();
        Ok(Quiver { mutable, arrows })
    }

    /// The arrows among mutable vertices; node `i` of the graph is vertex `i`.
    /// Frozen vertices stay as isolated nodes, so a path through a frozen vertex
    /// never closes a cycle.
    fn graph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.vertex_count(), self.arrows.len());
        for _ in 0..self.vertex_count() {
            g.add_node(());
        }
        for (i, j) in self.mutable_edges() {
            g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
        }
        g
    }

    pub fn has_directed_cycle(&self) -> bool {
        is_cyclic_directed(&self.graph())
    }

    /// Reachability relative to directed cycles, from strongly connected components.
    pub fn cycle_reach(&self) -> CycleReach {
        let g = self.graph();
        let on_cycle: Vec<NodeIndex> = tarjan_scc(&g)
            .into_iter()
            .filter(|c| c.len() > 1)
            .flatten()
            .collect();
        let mut from_cycle = BTreeSet::new();
        let mut to_cycle = BTreeSet::new();
        for &s in &on_cycle {
            from_cycle.extend(Bfs::new(&g, s).iter(&g).map(|v| v.index()));
            let rev = Reversed(&g);
            to_cycle.extend(Bfs::new(rev, s).iter(rev).map(|v| v.index()));
        }
        CycleReach {
            from_cycle,
            to_cycle,
        }
    }

    /// Whether the arrow `i -> j` between mutable vertices lies on no bi-infinite path.
    pub fn is_separating_edge(&self, i: usize, j: usize) -> Result<bool> {
        if !self.has_edge(i, j) || !self.is_mutable(i) || !self.is_mutable(j) {
            return Err(Error::EdgeNotFound(i, j));
        }
        Ok(self.cycle_reach().separates(i, j))
    }

    /// All separating arrows between mutable vertices, in lexicographic order.
    pub fn separating_edges(&self) -> Vec<(usize, usize)> {
        let reach = self.cycle_reach();
        self.mutable_edges()
            .into_iter()
            .filter(|&(i, j)| reach.separates(i, j))
            .collect()
    }
}

/// Vertices reachable from some directed cycle, and vertices that reach one.
#[derive(Clone, Debug)]
pub struct CycleReach {
    from_cycle: BTreeSet<usize>,
    to_cycle: BTreeSet<usize>,
}

impl CycleReach {
    /// A path through `i -> j` extends forever backwards iff `i` is reachable from a
    /// cycle, and forever forwards iff `j` reaches one.
    pub fn separates(&self, i: usize, j: usize) -> bool {
        !(self.from_cycle.contains(&i) && self.to_cycle.contains(&j))
    }
}
