//! Extremal statistics of the complex part: diameter, longest path,
//! circumference and planarity, plus exponential reference versions in
//! [`oracle`].
//!
//! Lengths count edges.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{self, Component, Graph, KernelEdge, KernelMultigraph, TwoCore};
use crate::{Error, Result};

/// Largest excess accepted by the exhaustive kernel searches.
pub const MAX_KERNEL_EXCESS: i64 = 12;
/// Corner limit of the planarity test, which is polynomial.
pub const MAX_PLANAR_CORNERS: usize = 4096;
const NEG: i64 = i64::MIN / 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSummary {
    pub largest_component: usize,
    /// Maximum component excess; −1 for a forest.
    pub largest_excess: i64,
    /// Sum of the excesses of the complex components.
    pub total_excess: i64,
    pub complex_size: usize,
    pub complex_diameter: Option<usize>,
    /// `None` also when some complex component has excess above
    /// [`MAX_KERNEL_EXCESS`]; same for the circumference.
    pub complex_longest_path: Option<usize>,
    pub complex_circumference: Option<usize>,
    pub planar: bool,
    pub attempts: u64,
}

impl GraphSummary {
    pub fn has_complex_part(&self) -> bool {
        self.complex_size > 0
    }

    /// Checks the documented relations between the fields.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("summary invariant violated: {what}")));
        match (self.complex_diameter, self.complex_longest_path, self.complex_circumference) {
            (None, None, None) => {
                if self.complex_size != 0 || self.total_excess != 0 || !self.planar {
                    return fail("empty complex part with non-empty fields");
                }
            }
            (Some(d), Some(l), Some(c)) => {
                if l < d {
                    return fail("longest path shorter than diameter");
                }
                if c > l + 1 {
                    return fail("circumference exceeds longest path + 1");
                }
                if c > self.complex_size || l >= self.complex_size || c < 3 {
                    return fail("length exceeds complex part size");
                }
                if self.total_excess < 1 {
                    return fail("complex part without excess");
                }
            }
            (Some(_), None, None) if self.largest_excess > MAX_KERNEL_EXCESS => {
                if self.complex_size == 0 || self.total_excess < self.largest_excess {
                    return fail("complex part fields");
                }
            }
            _ => return fail("partially empty complex statistics"),
        }
        if self.largest_excess < -1 || self.largest_component == 0 && self.complex_size > 0 {
            return fail("component fields");
        }
        Ok(())
    }
}

/// Per-vertex BFS distances inside `g`, from `src`.
fn bfs(g: &Graph, src: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) -> usize {
    dist.fill(usize::MAX);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    let mut far = 0;
    while let Some(v) = queue.pop_front() {
        far = far.max(dist[v]);
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

/// Exact diameter of one component by BFS from each of its vertices.
pub fn component_diameter(g: &Graph, comp: &Component) -> usize {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    comp.vertices.iter().map(|&v| bfs(g, v, &mut dist, &mut queue)).max().unwrap_or(0)
}

/// Maximum diameter over the complex components; `None` without any.
pub fn diameter(g: &Graph, comps: &[Component]) -> Option<usize> {
    comps.iter().filter(|c| c.is_complex()).map(|c| component_diameter(g, c)).max()
}

fn guard(k: &KernelMultigraph) -> Result<()> {
    if k.excess > MAX_KERNEL_EXCESS {
        return Err(Error::ExcessTooLarge(k.excess));
    }
    Ok(())
}

/// Partial entries into a 2-path from one side.
struct Side {
    /// `best[t] = max_{1≤s≤t} s + h(w_s)`, `w_s` at distance `s` from this side.
    prefix: Vec<i64>,
}

impl Side {
    fn new(e: &KernelEdge, core: &TwoCore, from_u: bool) -> Self {
        let l = e.length;
        let mut prefix = vec![NEG; l];
        for s in 1..l {
            let w = if from_u { e.interior[s - 1] } else { e.interior[l - 1 - s] };
            let v = s as i64 + core.height[w] as i64;
            prefix[s] = prefix[s - 1].max(v);
        }
        Self { prefix }
    }

    fn best(&self) -> i64 {
        *self.prefix.last().unwrap_or(&NEG)
    }
}

/// Best pair of non-overlapping entries into one 2-path from both sides.
fn joint(e: &KernelEdge, a: &Side, b: &Side, core: &TwoCore) -> i64 {
    let l = e.length;
    let mut best = NEG;
    for t in 1..l {
        let rest = l - 1 - t;
        if rest == 0 {
            break;
        }
        let w = e.interior[t - 1];
        let v = t as i64 + core.height[w] as i64;
        best = best.max(v + b.prefix[rest]);
    }
    let _ = a;
    best
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ext {
    Tree,
    /// Edge index and side (true = entering from `u`).
    Entry(usize, bool),
}

struct PathSearch<'a> {
    k: &'a KernelMultigraph,
    core: &'a TwoCore,
    sides: Vec<(Side, Side)>,
    incident: BTreeMap<usize, Vec<usize>>,
    best: i64,
}

impl<'a> PathSearch<'a> {
    fn options(&self, c: usize, used: &[bool]) -> Vec<(Ext, i64)> {
        let mut out = vec![(Ext::Tree, self.core.height[c] as i64)];
        for &ei in &self.incident[&c] {
            if used[ei] {
                continue;
            }
            let e = &self.k.edges[ei];
            if e.u == c {
                out.push((Ext::Entry(ei, true), self.sides[ei].0.best()));
            }
            if e.v == c {
                out.push((Ext::Entry(ei, false), self.sides[ei].1.best()));
            }
        }
        out
    }

    /// Best sum of two end extensions; `same` when both ends are one corner.
    fn ends(&self, a: usize, b: usize, used: &[bool]) -> i64 {
        let oa = self.options(a, used);
        let ob = self.options(b, used);
        let same = a == b;
        let mut best = NEG;
        for (i, &(xa, va)) in oa.iter().enumerate() {
            for (j, &(xb, vb)) in ob.iter().enumerate() {
                if same && j <= i {
                    continue;
                }
                let v = match (xa, xb) {
                    (Ext::Tree, Ext::Tree) if same => continue,
                    (Ext::Entry(ea, sa), Ext::Entry(eb, sb)) if ea == eb => {
                        if sa == sb {
                            continue;
                        }
                        let e = &self.k.edges[ea];
                        let (su, sv) = &self.sides[ea];
                        joint(e, su, sv, self.core)
                    }
                    _ => va + vb,
                };
                best = best.max(v);
            }
        }
        if same {
            // A path ending at the corner itself, or extending on one side only.
            best = best.max(oa.iter().map(|o| o.1).max().unwrap_or(0));
        }
        best
    }

    fn dfs(&mut self, start: usize, cur: usize, length: i64, used: &mut [bool], visited: &mut BTreeSet<usize>) {
        let total = length + self.ends(start, cur, used);
        self.best = self.best.max(total);
        let edges = self.incident[&cur].clone();
        for ei in edges {
            let e = &self.k.edges[ei];
            if used[ei] || e.is_loop() {
                continue;
            }
            let next = if e.u == cur { e.v } else { e.u };
            if visited.contains(&next) {
                continue;
            }
            used[ei] = true;
            visited.insert(next);
            let l = e.length as i64;
            self.dfs(start, next, length + l, used, visited);
            visited.remove(&next);
            used[ei] = false;
        }
    }
}

fn incidence(k: &KernelMultigraph) -> BTreeMap<usize, Vec<usize>> {
    let mut inc: BTreeMap<usize, Vec<usize>> = k.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for (i, e) in k.edges.iter().enumerate() {
        inc.get_mut(&e.u).expect("corner").push(i);
        if e.v != e.u {
            inc.get_mut(&e.v).expect("corner").push(i);
        }
    }
    inc
}

/// Longest simple path in a complex component, from its kernel, pruned
/// trees and 2-path interiors.
pub fn longest_path(comp: &Component, core: &TwoCore, k: &KernelMultigraph) -> Result<usize> {
    guard(k)?;
    let mut best: i64 = comp
        .vertices
        .iter()
        .filter(|&&v| core.in_core[v])
        .map(|&v| core.tree_path[v] as i64)
        .max()
        .unwrap_or(0);
    // Both ends inside a single 2-path, no corner visited.
    for e in &k.edges {
        let mut left = NEG;
        for j in 1..e.length {
            let hj = core.height[e.interior[j - 1]] as i64;
            if left > NEG {
                best = best.max(left + j as i64 + hj);
            }
            left = left.max(hj - j as i64);
        }
    }
    let sides = k.edges.iter().map(|e| (Side::new(e, core, true), Side::new(e, core, false))).collect();
    let mut search = PathSearch { k, core, sides, incident: incidence(k), best };
    let mut used = vec![false; k.edges.len()];
    for &c in &k.vertices {
        let mut visited = BTreeSet::from([c]);
        search.dfs(c, c, 0, &mut used, &mut visited);
    }
    Ok(search.best as usize)
}

/// Longest cycle of a complex component: loops, pairs of parallel 2-paths
/// and simple kernel cycles.
pub fn circumference(k: &KernelMultigraph) -> Result<usize> {
    guard(k)?;
    let mut best = 0usize;
    for e in k.edges.iter().filter(|e| e.is_loop()) {
        best = best.max(e.length);
    }
    // Longest and second longest 2-path per corner pair.
    let mut pairs: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for e in k.edges.iter().filter(|e| !e.is_loop()) {
        let p = pairs.entry((e.u.min(e.v), e.u.max(e.v))).or_insert((0, 0));
        if e.length > p.0 {
            *p = (e.length, p.0);
        } else if e.length > p.1 {
            p.1 = e.length;
        }
    }
    for &(a, b) in pairs.values() {
        if b > 0 {
            best = best.max(a + b);
        }
    }
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (&(u, v), &(l, _)) in &pairs {
        adj.entry(u).or_default().push((v, l));
        adj.entry(v).or_default().push((u, l));
    }
    fn cycles(
        adj: &BTreeMap<usize, Vec<(usize, usize)>>,
        start: usize,
        cur: usize,
        depth: usize,
        len: usize,
        visited: &mut BTreeSet<usize>,
        best: &mut usize,
    ) {
        for &(next, l) in &adj[&cur] {
            if next == start && depth >= 3 {
                *best = (*best).max(len + l);
            }
            if next > start && !visited.contains(&next) {
                visited.insert(next);
                cycles(adj, start, next, depth + 1, len + l, visited, best);
                visited.remove(&next);
            }
        }
    }
    for &s in adj.keys() {
        let mut visited = BTreeSet::from([s]);
        cycles(&adj, s, s, 1, 0, &mut visited, &mut best);
    }
    Ok(best)
}

type SimpleGraph = BTreeMap<usize, BTreeSet<usize>>;

fn remove_vertex(g: &mut SimpleGraph, v: usize) {
    if let Some(ns) = g.remove(&v) {
        for w in ns {
            g.get_mut(&w).map(|s| s.remove(&v));
        }
    }
}

/// Drops loops and parallel edges, prunes and smooths until every vertex
/// has degree at least 3. Planarity is unchanged.
fn reduce(k: &KernelMultigraph) -> SimpleGraph {
    let mut g: SimpleGraph = k.vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
    for e in k.edges.iter().filter(|e| !e.is_loop()) {
        g.get_mut(&e.u).expect("corner").insert(e.v);
        g.get_mut(&e.v).expect("corner").insert(e.u);
    }
    while let Some((&v, ns)) = g.iter().find(|(_, ns)| ns.len() <= 2) {
        let ns: Vec<usize> = ns.iter().copied().collect();
        remove_vertex(&mut g, v);
        if let [a, b] = ns[..] {
            g.get_mut(&a).expect("vertex").insert(b);
            g.get_mut(&b).expect("vertex").insert(a);
        }
    }
    g
}

/// Planarity of a kernel multigraph.
pub fn is_planar(k: &KernelMultigraph) -> Result<bool> {
    if k.vertices.len() > MAX_PLANAR_CORNERS {
        return Err(Error::TooLarge(format!("kernel with {} corners", k.vertices.len())));
    }
    Ok(simple_planar(&reduce(k)))
}

fn edge_count(g: &SimpleGraph) -> usize {
    g.values().map(BTreeSet::len).sum::<usize>() / 2
}

fn simple_planar(g: &SimpleGraph) -> bool {
    let (v, e) = (g.len(), edge_count(g));
    if v <= 4 {
        return true;
    }
    if e > 3 * v - 6 {
        return false;
    }
    blocks(g).iter().all(block_planar)
}

/// Biconnected components (as edge sets turned into graphs) with at least
/// three vertices.
fn blocks(g: &SimpleGraph) -> Vec<SimpleGraph> {
    struct State<'a> {
        g: &'a SimpleGraph,
        disc: BTreeMap<usize, usize>,
        low: BTreeMap<usize, usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<SimpleGraph>,
    }
    fn visit(s: &mut State, u: usize, parent: Option<usize>) {
        s.time += 1;
        s.disc.insert(u, s.time);
        s.low.insert(u, s.time);
        let ns: Vec<usize> = s.g[&u].iter().copied().collect();
        for w in ns {
            if Some(w) == parent {
                continue;
            }
            match s.disc.get(&w).copied() {
                None => {
                    s.stack.push((u, w));
                    visit(s, w, Some(u));
                    let lw = s.low[&w];
                    if lw < s.low[&u] {
                        s.low.insert(u, lw);
                    }
                    if lw >= s.disc[&u] {
                        let mut block = SimpleGraph::new();
                        while let Some((a, b)) = s.stack.pop() {
                            block.entry(a).or_default().insert(b);
                            block.entry(b).or_default().insert(a);
                            if (a, b) == (u, w) {
                                break;
                            }
                        }
                        if block.len() >= 3 {
                            s.out.push(block);
                        }
                    }
                }
                Some(dw) => {
                    if dw < s.disc[&u] {
                        s.stack.push((u, w));
                        if dw < s.low[&u] {
                            s.low.insert(u, dw);
                        }
                    }
                }
            }
        }
    }
    let mut s = State { g, disc: BTreeMap::new(), low: BTreeMap::new(), time: 0, stack: Vec::new(), out: Vec::new() };
    for &v in g.keys() {
        if !s.disc.contains_key(&v) {
            visit(&mut s, v, None);
        }
    }
    s.out
}

/// Path-addition planarity test on a biconnected graph: grow an embedding
/// from a cycle, placing a path of a fragment into an admissible face,
/// forced fragments first.
fn block_planar(g: &SimpleGraph) -> bool {
    let (v, e) = (g.len(), edge_count(g));
    if v <= 4 {
        return true;
    }
    if e > 3 * v - 6 {
        return false;
    }
    let Some(cycle) = find_cycle(g) else { return true };
    let mut in_h: BTreeSet<usize> = cycle.iter().copied().collect();
    let mut h_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        h_edges.insert((a.min(b), a.max(b)));
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle];
    loop {
        let frags = fragments(g, &in_h, &h_edges);
        if frags.is_empty() {
            return true;
        }
        let mut chosen: Option<(usize, usize)> = None;
        for (fi, f) in frags.iter().enumerate() {
            let admissible: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, face)| f.contacts.iter().all(|c| face.contains(c)))
                .map(|(i, _)| i)
                .collect();
            match admissible.len() {
                0 => return false,
                1 => {
                    chosen = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if chosen.is_none() {
                        chosen = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face_idx) = chosen.expect("fragments exist");
        let path = fragment_path(g, &in_h, &frags[fi]);
        for w in path.windows(2) {
            h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        in_h.extend(path.iter().copied());
        let face = faces.swap_remove(face_idx);
        let (f1, f2) = split_face(&face, &path);
        faces.push(f1);
        faces.push(f2);
    }
}

fn find_cycle(g: &SimpleGraph) -> Option<Vec<usize>> {
    let start = *g.keys().next()?;
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stack = vec![(start, usize::MAX)];
    let mut seen = BTreeSet::new();
    while let Some((u, p)) = stack.pop() {
        if !seen.insert(u) {
            continue;
        }
        if p != usize::MAX {
            parent.insert(u, p);
        }
        for &w in &g[&u] {
            if w == p {
                continue;
            }
            if seen.contains(&w) {
                // Back edge u–w closes a cycle along the DFS tree when w is an ancestor.
                let mut path = vec![u];
                let mut x = u;
                while x != w {
                    match parent.get(&x) {
                        Some(&y) => {
                            path.push(y);
                            x = y;
                        }
                        None => break,
                    }
                }
                if x == w && path.len() >= 3 {
                    return Some(path);
                }
            } else {
                stack.push((w, u));
            }
        }
    }
    None
}

struct Fragment {
    contacts: BTreeSet<usize>,
    /// Inner vertices (empty for a chord).
    inner: BTreeSet<usize>,
    chord: Option<(usize, usize)>,
}

fn fragments(g: &SimpleGraph, in_h: &BTreeSet<usize>, h_edges: &BTreeSet<(usize, usize)>) -> Vec<Fragment> {
    let mut out = Vec::new();
    for (&u, ns) in g {
        for &w in ns {
            if u < w && in_h.contains(&u) && in_h.contains(&w) && !h_edges.contains(&(u, w)) {
                out.push(Fragment { contacts: BTreeSet::from([u, w]), inner: BTreeSet::new(), chord: Some((u, w)) });
            }
        }
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for &s in g.keys() {
        if in_h.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut inner = BTreeSet::new();
        let mut contacts = BTreeSet::new();
        let mut queue = VecDeque::from([s]);
        seen.insert(s);
        while let Some(x) = queue.pop_front() {
            inner.insert(x);
            for &y in &g[&x] {
                if in_h.contains(&y) {
                    contacts.insert(y);
                } else if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out.push(Fragment { contacts, inner, chord: None });
    }
    out
}

/// A path through the fragment between two distinct contact vertices.
fn fragment_path(g: &SimpleGraph, in_h: &BTreeSet<usize>, f: &Fragment) -> Vec<usize> {
    if let Some((u, w)) = f.chord {
        return vec![u, w];
    }
    let a = *f.contacts.iter().next().expect("contacts");
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &x in &g[&a] {
        if f.inner.contains(&x) && !prev.contains_key(&x) {
            prev.insert(x, a);
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in &g[&x] {
            if in_h.contains(&y) && y != a {
                let mut path = vec![y, x];
                let mut z = x;
                while let Some(&p) = prev.get(&z) {
                    path.push(p);
                    if p == a {
                        break;
                    }
                    z = p;
                }
                path.reverse();
                return path;
            }
            if f.inner.contains(&y) && !prev.contains_key(&y) {
                prev.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    unreachable!("fragment of a biconnected graph has two contacts")
}

/// Splits a face (cyclic vertex list) along a path joining two of its
/// vertices.
fn split_face(face: &[usize], path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (a, b) = (path[0], *path.last().expect("path"));
    let n = face.len();
    let ia = face.iter().position(|&x| x == a).expect("contact on face");
    let ib = face.iter().position(|&x| x == b).expect("contact on face");
    let inner = &path[1..path.len() - 1];
    // a → b along the face, then back through the path.
    let mut f1 = Vec::new();
    let mut i = ia;
    loop {
        f1.push(face[i]);
        if i == ib {
            break;
        }
        i = (i + 1) % n;
    }
    f1.extend(inner.iter().rev());
    let mut f2 = Vec::new();
    let mut i = ib;
    loop {
        f2.push(face[i]);
        if i == ia {
            break;
        }
        i = (i + 1) % n;
    }
    f2.extend(inner.iter());
    (f1, f2)
}

/// All statistics for one graph. Longest path and circumference are left
/// empty when a component's excess exceeds [`MAX_KERNEL_EXCESS`].
pub fn summarize(g: &Graph, attempts: u64) -> Result<GraphSummary> {
    let comps = graph::components(g);
    let core = graph::two_core(g);
    let largest_component = comps.iter().map(|c| c.vertices.len()).max().unwrap_or(0);
    let largest_excess = comps.iter().map(|c| c.excess).max().unwrap_or(-1).max(-1);
    let mut s = GraphSummary {
        largest_component,
        largest_excess,
        total_excess: 0,
        complex_size: 0,
        complex_diameter: None,
        complex_longest_path: None,
        complex_circumference: None,
        planar: true,
        attempts,
    };
    let exhaustive = largest_excess <= MAX_KERNEL_EXCESS;
    for comp in comps.iter().filter(|c| c.is_complex()) {
        let k = graph::kernel(g, &core, comp)?;
        s.total_excess += comp.excess;
        s.complex_size += comp.vertices.len();
        let d = component_diameter(g, comp);
        s.complex_diameter = Some(s.complex_diameter.map_or(d, |x| x.max(d)));
        if exhaustive {
            let l = longest_path(comp, &core, &k)?;
            let c = circumference(&k)?;
            s.complex_longest_path = Some(s.complex_longest_path.map_or(l, |x| x.max(l)));
            s.complex_circumference = Some(s.complex_circumference.map_or(c, |x| x.max(c)));
        }
        s.planar &= is_planar(&k)?;
    }
    Ok(s)
}

/// Exponential reference implementations for small graphs.
pub mod oracle {
    use super::*;

    /// Floyd–Warshall diameter of the complex part.
    pub fn diameter(g: &Graph) -> Option<usize> {
        let n = g.n();
        let inf = usize::MAX / 2;
        let mut d = vec![vec![inf; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0;
        }
        for &(u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let complex = complex_vertices(g);
        complex
            .iter()
            .flat_map(|&i| complex.iter().map(move |&j| (i, j)))
            .map(|(i, j)| d[i][j])
            .filter(|&x| x < inf)
            .max()
    }

    fn complex_vertices(g: &Graph) -> Vec<usize> {
        graph::components(g).into_iter().filter(|c| c.is_complex()).flat_map(|c| c.vertices).collect()
    }

    fn dfs_path(g: &Graph, v: usize, len: usize, on: &mut [bool], best: &mut usize) {
        *best = (*best).max(len);
        for &w in g.neighbors(v) {
            if !on[w] {
                on[w] = true;
                dfs_path(g, w, len + 1, on, best);
                on[w] = false;
            }
        }
    }

    /// Longest simple path inside the complex part by exhaustive DFS.
    pub fn longest_path(g: &Graph) -> Option<usize> {
        let vs = complex_vertices(g);
        if vs.is_empty() {
            return None;
        }
        let mut best = 0;
        let mut on = vec![false; g.n()];
        for &v in &vs {
            on[v] = true;
            dfs_path(g, v, 0, &mut on, &mut best);
            on[v] = false;
        }
        Some(best)
    }

    fn dfs_cycle(g: &Graph, start: usize, v: usize, len: usize, on: &mut [bool], best: &mut usize) {
        for &w in g.neighbors(v) {
            if w == start && len >= 2 {
                *best = (*best).max(len + 1);
            }
            if w > start && !on[w] {
                on[w] = true;
                dfs_cycle(g, start, w, len + 1, on, best);
                on[w] = false;
            }
        }
    }

    /// Longest cycle inside the complex part by exhaustive DFS.
    pub fn circumference(g: &Graph) -> Option<usize> {
        let vs = complex_vertices(g);
        if vs.is_empty() {
            return None;
        }
        let mut best = 0;
        let mut on = vec![false; g.n()];
        for &v in &vs {
            on[v] = true;
            dfs_cycle(g, v, v, 0, &mut on, &mut best);
            on[v] = false;
        }
        Some(best)
    }

    /// Planarity by searching all rotation systems of each component for
    /// one with `V − E + F = 2`. `None` when the search exceeds `budget`
    /// rotation systems.
    pub fn planar(g: &Graph, budget: u64) -> Option<bool> {
        for comp in graph::components(g) {
            if comp.edges < 9 || comp.excess < 3 {
                // Fewer than nine edges or excess below three: no K₅ or K₃,₃ subdivision fits.
                continue;
            }
            let vs = &comp.vertices;
            let mut total: u64 = 1;
            for &v in vs {
                for k in 2..g.degree(v) as u64 {
                    total = total.saturating_mul(k);
                }
            }
            if total > budget {
                return None;
            }
            let target = 2 + comp.edges as i64 - vs.len() as i64;
            if !rotation_search(g, vs, target) {
                return Some(false);
            }
        }
        Some(true)
    }

    fn next_perm(a: &mut [usize]) -> bool {
        if a.len() < 2 {
            return false;
        }
        let mut i = a.len() - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = a.len() - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        true
    }

    fn rotation_search(g: &Graph, vs: &[usize], target: i64) -> bool {
        // rot[v] is a cyclic order of neighbours: first fixed, rest permuted.
        let mut rot: BTreeMap<usize, Vec<usize>> = vs.iter().map(|&v| (v, g.neighbors(v).to_vec())).collect();
        let keys: Vec<usize> = vs.to_vec();
        loop {
            if count_faces(&rot) == target {
                return true;
            }
            // Advance the odometer of permutations of rot[v][1..].
            let mut advanced = false;
            for &v in &keys {
                let r = rot.get_mut(&v).expect("vertex");
                if r.len() > 2 && next_perm(&mut r[1..]) {
                    advanced = true;
                    break;
                }
                if r.len() > 2 {
                    r[1..].sort_unstable();
                }
            }
            if !advanced {
                return false;
            }
        }
    }

    fn count_faces(rot: &BTreeMap<usize, Vec<usize>>) -> i64 {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut faces = 0;
        for (&u, ns) in rot {
            for &v in ns {
                if seen.contains(&(u, v)) {
                    continue;
                }
                faces += 1;
                let (mut a, mut b) = (u, v);
                while seen.insert((a, b)) {
                    // Next dart: at b, the neighbour after a in b's rotation.
                    let r = &rot[&b];
                    let i = r.iter().position(|&x| x == a).expect("dart");
                    let c = r[(i + 1) % r.len()];
                    a = b;
                    b = c;
                }
            }
        }
        faces
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{components, kernel, two_core};

    fn g1(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_one_based(n, edges).unwrap()
    }

    fn theta(lengths: &[usize]) -> Graph {
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

    fn all(g: &Graph) -> (usize, usize, usize, bool) {
        let s = summarize(g, 1).unwrap();
        (
            s.complex_diameter.unwrap(),
            s.complex_longest_path.unwrap(),
            s.complex_circumference.unwrap(),
            s.planar,
        )
    }

    #[test]
    fn theta_statistics() {
        let g = theta(&[2, 2, 2]);
        assert_eq!(all(&g).0, 2);
        let g = theta(&[3, 3, 3]);
        assert_eq!(all(&g).1, 7);
        let g = theta(&[2, 3, 4]);
        assert_eq!(all(&g).2, 7);
    }

    #[test]
    fn loop_circumference() {
        // Corner 1 with a 5-cycle and a triangle.
        let g = g1(7, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 6), (6, 7), (7, 1)]);
        let comps = components(&g);
        let core = two_core(&g);
        let k = kernel(&g, &core, &comps[0]).unwrap();
        assert_eq!(circumference(&k).unwrap(), 5);
        assert_eq!(longest_path(&comps[0], &core, &k).unwrap(), 6);
    }

    #[test]
    fn pendant_on_interior_extends_path() {
        // Theta (3,3,3) with a pendant path of length 4 at an interior vertex.
        let mut edges = vec![(1, 3), (3, 4), (4, 2), (1, 5), (5, 6), (6, 2), (1, 7), (7, 8), (8, 2)];
        edges.extend([(3, 9), (9, 10), (10, 11), (11, 12)]);
        let g = g1(12, &edges);
        assert_eq!(all(&g).1, oracle::longest_path(&g).unwrap());
        assert_eq!(all(&g).1, 11);
    }

    #[test]
    fn planarity_examples() {
        let k4 = g1(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert!(all(&k4).3);
        let mut k33 = Vec::new();
        for a in 1..=3 {
            for b in 4..=6 {
                k33.push((a, b));
            }
        }
        assert!(!all(&g1(6, &k33)).3);
        let mut k5 = Vec::new();
        for a in 1..=5 {
            for b in a + 1..=5 {
                k5.push((a, b));
            }
        }
        assert!(!all(&g1(5, &k5)).3);
        // Subdivided K₃,₃.
        let mut sub = Vec::new();
        let mut next = 7;
        for &(a, b) in &k33 {
            sub.push((a, next));
            sub.push((next, b));
            next += 1;
        }
        assert!(!all(&g1(next - 1, &sub)).3);
        assert!(all(&theta(&[2, 3, 4])).3);
        // Cube graph Q₃ is planar.
        let q3 = [(1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5), (1, 5), (2, 6), (3, 7), (4, 8)];
        assert!(all(&g1(8, &q3)).3);
        // Petersen graph is not.
        let pet = [
            (1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 6), (2, 7), (3, 8), (4, 9), (5, 10),
            (6, 8), (8, 10), (10, 7), (7, 9), (9, 6),
        ];
        assert!(!all(&g1(10, &pet)).3);
    }

    #[test]
    fn oracle_planarity_agrees_on_classics() {
        let mut k33 = Vec::new();
        for a in 1..=3 {
            for b in 4..=6 {
                k33.push((a, b));
            }
        }
        assert_eq!(oracle::planar(&g1(6, &k33), 1 << 20), Some(false));
        let q3 = [(1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5), (1, 5), (2, 6), (3, 7), (4, 8)];
        assert_eq!(oracle::planar(&g1(8, &q3), 1 << 20), Some(true));
    }

    #[test]
    fn forest_summary() {
        let g = g1(5, &[(1, 2), (2, 3), (4, 5)]);
        let s = summarize(&g, 1).unwrap();
        assert_eq!(s.largest_excess, -1);
        assert_eq!(s.total_excess, 0);
        assert!(s.planar && !s.has_complex_part());
        assert_eq!(s.complex_diameter, None);
        s.check().unwrap();
    }
}
