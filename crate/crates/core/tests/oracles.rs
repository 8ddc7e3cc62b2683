use degcrit_core::graph::{self, components, kernel, multigraph_components, two_core, two_core_with, Graph, PeelOrder};
use degcrit_core::sampler::{trial_rng, Sampler};
use degcrit_core::degset::DegreeSet;
use degcrit_core::stats::{self, oracle, summarize};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

const PLANARITY_BUDGET: u64 = 2_000_000;

fn random_graph<R: Rng>(rng: &mut R, n: usize, m: usize) -> Graph {
    let mut all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    all.shuffle(rng);
    all.truncate(m);
    Graph::new(n, all).unwrap()
}

fn random_complex_graphs(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = trial_rng(seed, 0);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(4..=12);
        let max_m = n * (n - 1) / 2;
        let m = rng.random_range(n..=(n + 6).min(max_m));
        let g = random_graph(&mut rng, n, m);
        if components(&g).iter().any(|c| c.is_complex()) {
            out.push(g);
        }
    }
    out
}

#[test]
fn statistics_match_brute_force() {
    let graphs = random_complex_graphs(500, 11);
    let mut planarity_checked = 0;
    let mut nonplanar = 0;
    for g in &graphs {
        let s = summarize(g, 1).unwrap();
        s.check().unwrap();
        assert_eq!(s.complex_diameter, oracle::diameter(g), "{:?}", g.edges());
        assert_eq!(s.complex_longest_path, oracle::longest_path(g), "{:?}", g.edges());
        assert_eq!(s.complex_circumference, oracle::circumference(g), "{:?}", g.edges());
        if let Some(p) = oracle::planar(g, PLANARITY_BUDGET) {
            assert_eq!(s.planar, p, "{:?}", g.edges());
            planarity_checked += 1;
            nonplanar += usize::from(!p);
        }
    }
    assert!(planarity_checked >= 450, "only {planarity_checked} planarity comparisons");
    assert!(nonplanar > 0);
}

#[test]
fn dense_planarity_matches_brute_force() {
    let mut rng = trial_rng(23, 0);
    let mut checked = 0;
    let mut nonplanar = 0;
    for _ in 0..400 {
        let n = rng.random_range(6..=9);
        let m = rng.random_range(n + 3..=2 * n + 2);
        let g = random_graph(&mut rng, n, m);
        let s = summarize(&g, 1).unwrap();
        if let Some(p) = oracle::planar(&g, PLANARITY_BUDGET / 10) {
            assert_eq!(s.planar, p, "{:?}", g.edges());
            checked += 1;
            nonplanar += usize::from(!p);
        }
    }
    assert!(checked >= 60 && nonplanar >= 10, "{checked} checked, {nonplanar} non-planar");
}

#[test]
fn relabeling_and_subdivision_invariance() {
    let mut rng = trial_rng(3, 1);
    for g in random_complex_graphs(100, 5) {
        let s = summarize(&g, 1).unwrap();
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut rng);
        let r = summarize(&g.relabel(&perm).unwrap(), 1).unwrap();
        assert_eq!(s, r);
        // Subdivide one edge of the 2-core: planarity is unchanged.
        let core = two_core(&g);
        let &(u, v) = g.edges().iter().find(|&&(u, v)| core.in_core[u] && core.in_core[v]).unwrap();
        let mut edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&e| e != (u, v)).collect();
        edges.push((u, g.n()));
        edges.push((g.n(), v));
        let sub = Graph::new(g.n() + 1, edges).unwrap();
        assert_eq!(summarize(&sub, 1).unwrap().planar, s.planar);
    }
}

#[test]
fn sampled_kernels_preserve_excess_and_counts() {
    let ds = DegreeSet::parse("1,3,5,7").unwrap();
    let sampler = Sampler::new(&ds, 400, 300).unwrap();
    let mut seen = 0;
    let mut trial = 0;
    while seen < 200 {
        let (g, _) = sampler.sample(&mut trial_rng(77, trial)).unwrap();
        trial += 1;
        let comps = components(&g);
        let core = two_core(&g);
        let lifo = two_core_with(&g, PeelOrder::Lifo);
        assert_eq!(core.in_core, lifo.in_core);
        for c in comps.iter().filter(|c| c.is_complex()) {
            let k = kernel(&g, &core, c).unwrap();
            assert_eq!(k.excess, c.excess);
            assert!(k.vertices.iter().all(|&v| k.degree(v) >= 3));
            let core_edges = c.vertices.iter().filter(|&&v| core.in_core[v]).map(|&v| core.core_degree(&g, v)).sum::<usize>() / 2;
            assert_eq!(k.total_length(), core_edges);
            let interior: usize = k.edges.iter().map(|e| e.interior.len()).sum();
            let below = c.vertices.iter().filter(|&&v| !core.in_core[v]).count();
            assert_eq!(k.vertices.len() + interior + below, c.vertices.len());
            let f = k.compensation_factor();
            assert!(f > num_rational::BigRational::from_integer(0.into()));
            assert_eq!(f == num_rational::BigRational::from_integer(1.into()), k.is_simple());
            seen += 1;
        }
    }
}

#[test]
fn figure_components_with_different_excess() {
    // Four connected pieces, the third with a double edge; 1-based labels
    // shifted by 4, 10 and 16.
    let mut e: Vec<(usize, usize)> = vec![(2, 1), (1, 3), (1, 4)];
    e.extend([(4, 1), (1, 3), (3, 4), (3, 2)].map(|(a, b)| (a + 4, b + 4)));
    e.extend([(1, 3), (1, 4), (1, 4), (4, 6), (6, 5), (5, 2), (2, 6)].map(|(a, b)| (a + 8, b + 8)));
    e.extend([(1, 2), (2, 4), (2, 3), (1, 3), (3, 4), (1, 4)].map(|(a, b)| (a + 14, b + 14)));
    let e0: Vec<(usize, usize)> = e.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    let comps = multigraph_components(18, &e0);
    let excesses: Vec<i64> = comps.iter().map(|c| c.excess).collect();
    assert_eq!(excesses, vec![-1, 0, 1, 2]);
    assert_eq!(excesses.iter().sum::<i64>(), 2);
}

#[test]
fn figure_random_graph_from_26_30() {
    let edges = [
        (5, 14), (5, 20), (5, 3), (5, 24), (5, 7), (14, 13), (14, 12), (14, 25), (14, 26), (14, 19),
        (14, 20), (13, 12), (26, 25), (26, 19), (19, 20), (3, 24), (9, 10), (7, 22), (25, 23), (25, 17),
        (25, 4), (19, 6), (19, 15), (9, 11), (10, 11), (11, 1), (8, 21), (8, 18), (8, 2), (2, 16),
    ];
    let g = Graph::from_one_based(26, &edges).unwrap();
    let ds = DegreeSet::parse("1,2,3,5,7").unwrap();
    assert!(g.degrees().iter().all(|&d| ds.contains(d as u32)));
    let mut excesses: Vec<i64> = components(&g).iter().map(|c| c.excess).collect();
    excesses.sort_unstable();
    assert_eq!(excesses, vec![-1, 0, 5]);
    let s = summarize(&g, 1).unwrap();
    assert_eq!(s.total_excess, 5);
    assert_eq!(s.largest_excess, 5);
    assert_eq!(s.complex_size, 17);
    assert_eq!(s.complex_diameter, oracle::diameter(&g));
    assert_eq!(s.complex_longest_path, oracle::longest_path(&g));
    assert_eq!(s.complex_circumference, oracle::circumference(&g));
    // Its 2-core drops the fringe.
    let core = two_core(&g);
    let complex = components(&g).into_iter().find(|c| c.is_complex()).unwrap();
    let core_set: Vec<usize> = complex.vertices.iter().copied().filter(|&v| core.in_core[v]).map(|v| v + 1).collect();
    assert_eq!(core_set, vec![3, 5, 12, 13, 14, 19, 20, 24, 25, 26]);
}

#[test]
fn path_attached_to_theta() {
    // Theta (2,2,2) on 1,2 via 3,4,5 plus a path of length 5 from 3.
    let edges = [(1, 3), (3, 2), (1, 4), (4, 2), (1, 5), (5, 2), (3, 6), (6, 7), (7, 8), (8, 9), (9, 10)];
    let g = Graph::from_one_based(10, &edges).unwrap();
    let s = summarize(&g, 1).unwrap();
    assert_eq!(s.complex_diameter, Some(7));
    assert_eq!(s.complex_diameter, oracle::diameter(&g));
    assert_eq!(s.complex_longest_path, oracle::longest_path(&g));
}

#[test]
fn adding_an_edge_never_lowers_total_excess() {
    let mut rng = trial_rng(8, 8);
    for _ in 0..200 {
        let n = rng.random_range(5..=12);
        let m = rng.random_range(n - 1..=n + 3);
        let g = random_graph(&mut rng, n, m);
        let missing: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !g.has_edge(u, v)).collect();
        let Some(&extra) = missing.choose(&mut rng) else { continue };
        let h = Graph::new(n, g.edges().iter().copied().chain([extra])).unwrap();
        assert!(summarize(&h, 1).unwrap().total_excess >= summarize(&g, 1).unwrap().total_excess);
    }
}

#[test]
fn kernel_search_guard() {
    // K₇ has excess 14.
    let k7: Vec<(usize, usize)> = (0..7).flat_map(|u| (u + 1..7).map(move |v| (u, v))).collect();
    let g = Graph::new(7, k7).unwrap();
    let c = &components(&g)[0];
    let k = kernel(&g, &two_core(&g), c).unwrap();
    assert!(matches!(stats::longest_path(c, &two_core(&g), &k), Err(degcrit_core::Error::ExcessTooLarge(14))));
    let _ = graph::kernels(&g, &two_core(&g), &components(&g)).unwrap();
    let s = summarize(&g, 1).unwrap();
    assert_eq!((s.complex_diameter, s.complex_longest_path, s.complex_circumference), (Some(1), None, None));
    assert!(!s.planar);
    s.check().unwrap();
}
