//! Simple graphs, components with excess, the 2-core and the kernel.
//!
//! Terminology: *pruning* removes degree-1 vertices (what is left is the
//! 2-core), *smoothing* contracts maximal chains of degree-2 vertices into
//! single edges (what is left is the kernel, or 3-core). Vertices are
//! `0..n` here; the wire format is 1-based.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a simple graph on `0..n`. Loops, repeated edges and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::NotSimple(format!("loop at vertex {}", u + 1)));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotSimple(format!("repeated edge {}-{}", w[0].0 + 1, w[0].1 + 1)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self { n, adj, edges: list })
    }

    /// Same as [`Graph::new`] with 1-based labels.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u == 0 || v == 0) {
            return Err(Error::Domain(format!("edge ({u}, {v}) uses label 0; labels start at 1")));
        }
        Self::new(n, edges.iter().map(|&(u, v)| (u - 1, v - 1)))
    }

    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// The same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        Self::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Sorted vertex list.
    pub vertices: Vec<usize>,
    pub edges: usize,
    /// `edges − vertices`.
    pub excess: i64,
}

impl Component {
    pub fn is_complex(&self) -> bool {
        self.excess >= 1
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components of an arbitrary edge list (loops and repeated edges allowed),
/// ordered by smallest vertex.
pub fn multigraph_components(n: usize, edges: &[(usize, usize)]) -> Vec<Component> {
    let mut parent: Vec<usize> = (0..n).collect();
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        let i = *index.entry(r).or_insert_with(|| {
            comps.push(Component { vertices: Vec::new(), edges: 0, excess: 0 });
            comps.len() - 1
        });
        comps[i].vertices.push(v);
    }
    for &(u, _) in edges {
        let r = find(&mut parent, u);
        comps[index[&r]].edges += 1;
    }
    for c in &mut comps {
        c.excess = c.edges as i64 - c.vertices.len() as i64;
    }
    comps
}

pub fn components(g: &Graph) -> Vec<Component> {
    multigraph_components(g.n, &g.edges)
}

/// Result of pruning. Every vertex outside the core hangs from a unique
/// core vertex, or belongs to a tree component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCore {
    pub in_core: Vec<bool>,
    /// For a pruned vertex, its neighbour when it was removed (`None` for
    /// the last vertex of a tree component).
    pub parent: Vec<Option<usize>>,
    /// For a pruned vertex, the core vertex its tree hangs from.
    pub attach: Vec<Option<usize>>,
    /// Height of the tallest tree hanging below each vertex.
    pub height: Vec<usize>,
    /// Longest path inside the tree hanging below each vertex, the vertex
    /// included.
    pub tree_path: Vec<usize>,
    /// Order in which vertices were pruned.
    pub order: Vec<usize>,
}

impl TwoCore {
    pub fn core_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_core.iter().enumerate().filter(|p| *p.1).map(|p| p.0)
    }

    pub fn core_degree(&self, g: &Graph, v: usize) -> usize {
        g.neighbors(v).iter().filter(|&&w| self.in_core[w]).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeelOrder {
    Fifo,
    Lifo,
}

pub fn two_core(g: &Graph) -> TwoCore {
    two_core_with(g, PeelOrder::Fifo)
}

/// Prunes with an explicit queue discipline; the resulting core does not
/// depend on it.
pub fn two_core_with(g: &Graph, discipline: PeelOrder) -> TwoCore {
    let n = g.n;
    let mut deg = g.degrees();
    let mut in_core = vec![true; n];
    let mut parent = vec![None; n];
    let mut height = vec![0usize; n];
    let mut top2 = vec![(0usize, 0usize); n];
    let mut tree_path = vec![0usize; n];
    let mut order = Vec::new();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut queued: Vec<bool> = deg.iter().map(|&d| d <= 1).collect();
    loop {
        let next = match discipline {
            PeelOrder::Fifo => queue.pop_front(),
            PeelOrder::Lifo => queue.pop_back(),
        };
        let Some(v) = next else { break };
        in_core[v] = false;
        order.push(v);
        let p = g.neighbors(v).iter().copied().find(|&w| in_core[w]);
        parent[v] = p;
        tree_path[v] = tree_path[v].max(top2[v].0 + top2[v].1);
        if let Some(u) = p {
            let branch = height[v] + 1;
            height[u] = height[u].max(branch);
            let t = &mut top2[u];
            if branch > t.0 {
                *t = (branch, t.0);
            } else if branch > t.1 {
                t.1 = branch;
            }
            tree_path[u] = tree_path[u].max(tree_path[v]);
            deg[u] -= 1;
            if deg[u] <= 1 && !queued[u] {
                queued[u] = true;
                queue.push_back(u);
            }
        }
    }
    for v in 0..n {
        if in_core[v] {
            tree_path[v] = tree_path[v].max(top2[v].0 + top2[v].1);
        }
    }
    let mut attach = vec![None; n];
    for &v in order.iter().rev() {
        attach[v] = match parent[v] {
            Some(u) if in_core[u] => Some(u),
            Some(u) => attach[u],
            None => None,
        };
    }
    TwoCore { in_core, parent, attach, height, tree_path, order }
}

/// A 2-path: a chain of original edges between two corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelEdge {
    pub u: usize,
    pub v: usize,
    /// Number of original edges.
    pub length: usize,
    /// Degree-2 vertices from `u` to `v`.
    pub interior: Vec<usize>,
}

impl KernelEdge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelMultigraph {
    /// Corner vertices (original labels), sorted.
    pub vertices: Vec<usize>,
    pub edges: Vec<KernelEdge>,
    /// `|edges| − |vertices|`.
    pub excess: i64,
}

impl KernelMultigraph {
    /// Degree of a corner, loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.u == v) as usize + (e.v == v) as usize).sum()
    }

    pub fn loops(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    /// Edge multiplicities keyed by `(min, max)` endpoint.
    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(0) += 1;
        }
        m
    }

    pub fn is_simple(&self) -> bool {
        self.loops() == 0 && self.multiplicities().values().all(|&k| k == 1)
    }

    pub fn total_length(&self) -> usize {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// `κ = 1 / Π_x (2^{m_xx} Π_{y≥x} m_xy!)`.
    pub fn compensation_factor(&self) -> BigRational {
        compensation_factor(self)
    }
}

pub fn compensation_factor(k: &KernelMultigraph) -> BigRational {
    let mut den = BigInt::one();
    for (&(x, y), &mult) in &k.multiplicities() {
        for i in 2..=mult {
            den *= BigInt::from(i);
        }
        if x == y {
            den *= BigInt::from(2u32).pow(mult as u32);
        }
    }
    BigRational::new(BigInt::one(), den)
}

/// Smooths the 2-core of a complex component.
pub fn kernel(g: &Graph, core: &TwoCore, comp: &Component) -> Result<KernelMultigraph> {
    if comp.excess < 1 {
        return Err(Error::Precondition(format!(
            "kernels are formed for complex components only; excess is {}",
            comp.excess
        )));
    }
    let members: Vec<usize> = comp.vertices.iter().copied().filter(|&v| core.in_core[v]).collect();
    let corners: Vec<usize> = members.iter().copied().filter(|&v| core.core_degree(g, v) >= 3).collect();
    let is_corner: BTreeSet<usize> = corners.iter().copied().collect();
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges = Vec::new();
    for &c in &corners {
        for &w in g.neighbors(c) {
            if !core.in_core[w] || used.contains(&(c, w)) {
                continue;
            }
            used.insert((c, w));
            let (mut prev, mut cur) = (c, w);
            let mut interior = Vec::new();
            while !is_corner.contains(&cur) {
                interior.push(cur);
                let next = g
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|&x| core.in_core[x] && x != prev)
                    .ok_or_else(|| Error::Internal(format!("chain breaks at {}", cur + 1)))?;
                prev = cur;
                cur = next;
            }
            used.insert((cur, prev));
            edges.push(KernelEdge { u: c, v: cur, length: interior.len() + 1, interior });
        }
    }
    let k = KernelMultigraph { excess: edges.len() as i64 - corners.len() as i64, vertices: corners, edges };
    if k.excess != comp.excess {
        return Err(Error::Internal(format!(
            "kernel excess {} differs from component excess {}",
            k.excess, comp.excess
        )));
    }
    Ok(k)
}

/// Kernels of every complex component, in component order.
pub fn kernels(g: &Graph, core: &TwoCore, comps: &[Component]) -> Result<Vec<KernelMultigraph>> {
    comps.iter().filter(|c| c.is_complex()).map(|c| kernel(g, core, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_one_based(n, edges).unwrap()
    }

    fn theta(lengths: &[usize]) -> Graph {
        // Corners 1 and 2; each branch gets fresh interior vertices.
        let mut edges = Vec::new();
        let mut next = 3;
        for &l in lengths {
            let mut prev = 1;
            for _ in 1..l {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, 2));
        }
        g1(next - 1, &edges)
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::NotSimple(_))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(Error::NotSimple(_))));
        assert!(Graph::new(2, [(0, 2)]).is_err());
        assert!(Graph::from_one_based(2, &[(0, 1)]).is_err());
    }

    #[test]
    fn component_excess() {
        let empty = Graph::empty(4);
        let comps = components(&empty);
        assert_eq!(comps.len(), 4);
        assert!(comps.iter().all(|c| c.excess == -1));
        let tri = g1(3, &[(1, 2), (2, 3), (1, 3)]);
        let comps = components(&tri);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].excess, 0);
        assert!(!comps[0].is_complex());
    }

    #[test]
    fn pruning_trees_and_pendants() {
        let tree = g1(5, &[(1, 2), (2, 3), (2, 4), (4, 5)]);
        let core = two_core(&tree);
        assert!(core.in_core.iter().all(|&c| !c));
        // 4-cycle with a pendant path 1-5-6-7.
        let g = g1(7, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 5), (5, 6), (6, 7)]);
        let core = two_core(&g);
        assert_eq!(core.core_vertices().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(core.height[0], 3);
        assert_eq!(core.attach[6], Some(0));
        assert_eq!(core.parent[6], Some(5));
    }

    #[test]
    fn peeling_is_confluent() {
        let g = g1(9, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 6), (6, 4), (6, 7), (7, 8), (2, 9)]);
        let a = two_core_with(&g, PeelOrder::Fifo);
        let b = two_core_with(&g, PeelOrder::Lifo);
        assert_eq!(a.in_core, b.in_core);
        assert_eq!(a.height, b.height);
    }

    #[test]
    fn tree_paths_combine_two_branches() {
        // Core triangle 1-2-3 with pendant paths of length 2 and 3 at 1.
        let g = g1(8, &[(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (1, 6), (6, 7), (7, 8)]);
        let core = two_core(&g);
        assert_eq!(core.height[0], 3);
        assert_eq!(core.tree_path[0], 5);
    }

    #[test]
    fn theta_kernel() {
        let g = theta(&[2, 2, 2]);
        let comps = components(&g);
        let core = two_core(&g);
        let k = kernel(&g, &core, &comps[0]).unwrap();
        assert_eq!(k.vertices, vec![0, 1]);
        assert_eq!(k.edges.len(), 3);
        assert!(k.edges.iter().all(|e| e.length == 2));
        assert_eq!(k.excess, 1);
        assert_eq!(k.total_length(), g.m());
        assert_eq!(k.compensation_factor(), BigRational::new(1.into(), 6.into()));
    }

    #[test]
    fn kernel_of_non_complex_component_is_refused() {
        let tri = g1(3, &[(1, 2), (2, 3), (1, 3)]);
        let comps = components(&tri);
        let core = two_core(&tri);
        assert!(matches!(kernel(&tri, &core, &comps[0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn loops_in_kernel() {
        // Two triangles sharing vertex 1: one corner, two loops of length 3.
        let g = g1(5, &[(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (5, 1)]);
        let comps = components(&g);
        let core = two_core(&g);
        let k = kernel(&g, &core, &comps[0]).unwrap();
        assert_eq!(k.vertices, vec![0]);
        assert_eq!(k.loops(), 2);
        assert_eq!(k.degree(0), 4);
        assert_eq!(k.compensation_factor(), BigRational::new(1.into(), 8.into()));

        // Loop – edge – loop (dumbbell): κ = ¼.
        let g = g1(8, &[(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (5, 6), (6, 7), (7, 5), (4, 8)]);
        let comps = components(&g);
        let core = two_core(&g);
        let k = kernel(&g, &core, &comps[0]).unwrap();
        assert_eq!(k.vertices.len(), 2);
        assert_eq!(k.compensation_factor(), BigRational::new(1.into(), 4.into()));
        assert!(!k.is_simple());
    }

    #[test]
    fn complete_graph_kernel_is_simple() {
        let g = g1(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let comps = components(&g);
        let core = two_core(&g);
        let k = kernel(&g, &core, &comps[0]).unwrap();
        assert!(k.is_simple());
        assert_eq!(k.compensation_factor(), BigRational::one());
        assert_eq!(k.excess, 2);
    }
}
