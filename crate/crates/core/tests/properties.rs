use std::collections::BTreeSet;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodcone::analysis::{
    algebraic_verdict, canonical_subgraph, decide_rod_rigidity, sample_cone_realization, AnalysisError, DecideOptions,
};
use rodcone::oracle::field::{bareiss_rank, gaussian_rank, integer_rows, reduce};
use rodcone::oracle::{
    is_sharply_independent_by_supports, sample_realization, ConcurrenceMatrix, Fp61, LinearRealization, Scalar,
    LINE_BUDGET,
};
use rodcone::pebble::{play, Edge, PebbleState};
use rodcone::{ConeGraph, ConeIncidenceGeometry, IncidenceGeometry};

fn geometry(max_points: usize, max_lines: usize) -> impl Strategy<Value = IncidenceGeometry> {
    (2..=max_points).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 2..=n), 1..=max_lines)
            .prop_map(move |lines| IncidenceGeometry::new(n, lines.into_iter().map(|l| l.into_iter().collect()).collect()).unwrap())
    })
}

fn connected_geometry(max_points: usize, max_lines: usize) -> impl Strategy<Value = IncidenceGeometry> {
    geometry(max_points, max_lines).prop_filter("connected", IncidenceGeometry::is_connected)
}

fn graph(max_vertices: usize, max_edges: usize) -> impl Strategy<Value = (usize, Vec<Edge>)> {
    (2..=max_vertices).prop_flat_map(move |n| {
        let edge = (0..n, 0..n).prop_filter("no loops", |(u, v)| u != v);
        (Just(n), prop::collection::vec(edge, 0..=max_edges))
    })
}

/// Whether every nonempty subset `F` has `|F| <= 2|V(F)| - 3`.
fn laman_sparse(edges: &[Edge]) -> bool {
    (1u32..1 << edges.len()).all(|mask| {
        let mut vs = 0u64;
        let mut m = 0i64;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                vs |= 1 << u | 1 << v;
                m += 1;
            }
        }
        m <= 2 * vs.count_ones() as i64 - 3
    })
}

/// Rank of the rigidity matrix at random coordinates over a 61-bit field.
fn generic_rigidity_rank(n: usize, edges: &[Edge], seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos: Vec<(Fp61, Fp61)> = (0..n).map(|_| (Fp61::random(&mut rng), Fp61::random(&mut rng))).collect();
    let rows = edges
        .iter()
        .map(|&(u, v)| {
            let mut row = vec![Fp61::zero(); 2 * n];
            let dx = pos[u].0.sub(&pos[v].0);
            let dy = pos[u].1.sub(&pos[v].1);
            row[2 * u] = dx;
            row[2 * u + 1] = dy;
            row[2 * v] = dx.neg();
            row[2 * v + 1] = dy.neg();
            row
        })
        .collect();
    gaussian_rank(rows)
}

/// Union-find connectivity of the point-line incidence graph.
fn connected_by_union_find(s: &IncidenceGeometry) -> bool {
    let n = s.num_points() + s.num_lines();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(p, l) in s.incidences() {
        let a = find(&mut parent, p);
        let b = find(&mut parent, s.num_points() + l);
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|x| find(&mut parent, x) == root)
}

fn random_inner(s: &IncidenceGeometry, rng: &mut impl Rng) -> Vec<usize> {
    (0..s.num_lines()).map(|l| *s.line(l).choose(rng).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn text_and_json_round_trip(s in geometry(9, 6)) {
        prop_assert_eq!(IncidenceGeometry::parse(&s.to_text()).unwrap(), s.clone());
        prop_assert_eq!(IncidenceGeometry::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn support_is_monotone(s in geometry(8, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big: Vec<_> = s.incidences().iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
        let small: Vec<_> = big.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let (a, b) = (s.support_of(&small).unwrap(), s.support_of(&big).unwrap());
        prop_assert!(a.points.is_subset(&b.points));
        prop_assert!(a.lines.is_subset(&b.lines));
        prop_assert!(a.incidences.is_subset(&b.incidences));
        let pts: BTreeSet<usize> = big.iter().map(|&(p, _)| p).collect();
        prop_assert_eq!(b.points, pts);
    }

    #[test]
    fn connectivity_matches_union_find(s in geometry(8, 4)) {
        prop_assert_eq!(s.is_connected(), connected_by_union_find(&s));
    }

    #[test]
    fn pebble_game_matches_generic_rigidity_rank((n, edges) in graph(7, 12), seed in any::<u64>()) {
        let v = play(n, &edges).unwrap();
        prop_assert_eq!(v.accepted.len(), generic_rigidity_rank(n, &edges, seed));
        let mut shuffled = edges.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(play(n, &shuffled).unwrap().accepted.len(), v.accepted.len());
    }

    #[test]
    fn accepted_edges_are_sparse_and_maximal((n, edges) in graph(6, 10)) {
        let v = play(n, &edges).unwrap();
        prop_assert!(laman_sparse(&v.accepted));
        for &e in &v.rejected {
            let mut with = v.accepted.clone();
            with.push(e);
            prop_assert!(!laman_sparse(&with));
        }
        // each accepted edge consumes exactly one pebble
        prop_assert_eq!(v.remaining_pebbles + v.accepted.len(), 2 * n);
    }

    #[test]
    fn pebbles_stay_conserved_during_play((n, edges) in graph(8, 16)) {
        let mut state = PebbleState::new(n);
        for &e in &edges {
            state.try_edge(e);
            let total: usize = (0..n).map(|v| state.pebbles(v) as usize + state.out_degree(v)).sum();
            prop_assert_eq!(total, 2 * n);
            prop_assert!((0..n).all(|v| state.pebbles(v) as usize + state.out_degree(v) == 2));
        }
    }

    #[test]
    fn classification_ignores_inner_choice(s in connected_geometry(7, 4), seed in any::<u64>()) {
        let base = ConeGraph::new(&s);
        let v0 = play(base.num_vertices(), base.edges()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = ConeGraph::with_inner(&s, random_inner(&s, &mut rng)).unwrap();
        let mut edges = other.edges().to_vec();
        edges.shuffle(&mut rng);
        let v1 = play(other.num_vertices(), &edges).unwrap();
        prop_assert_eq!(v0.is_rigid(), v1.is_rigid());
        prop_assert_eq!(v0.accepted.len(), v1.accepted.len());
    }

    #[test]
    fn canonical_size_is_the_matroid_rank(s in connected_geometry(7, 4), seed in any::<u64>()) {
        let w = canonical_subgraph(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ConeGraph::with_inner(&s, random_inner(&s, &mut rng)).unwrap();
        let mut edges = g.edges().to_vec();
        edges.shuffle(&mut rng);
        prop_assert_eq!(w.num_edges(), play(g.num_vertices(), &edges).unwrap().accepted.len());
        prop_assert_eq!(w.num_vertices(), s.num_points() + s.num_lines());
        prop_assert!(laman_sparse_by_pebbles(w.num_vertices(), &w.edges()));
    }

    #[test]
    fn residuals_vanish_and_trivial_redrawings_are_in_the_kernel(s in geometry(8, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(rho) = sample_realization::<Fp61, _>(&s, &mut rng) {
            for &(p, l) in s.incidences() {
                prop_assert!(rho.residual(p, l).is_zero());
            }
            let m = ConcurrenceMatrix::new(&s, &rho);
            for v in m.trivial_redrawings(&rho) {
                prop_assert!(m.apply(&v).iter().all(Scalar::is_zero));
            }
            prop_assert!(m.rank() <= m.max_rank());
        }
    }

    #[test]
    fn rank_is_field_agnostic(s in geometry(6, 4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(rho) = sample_realization::<BigRational, _>(&s, &mut rng) {
            let m = ConcurrenceMatrix::new(&s, &rho);
            let exact = m.rank();
            prop_assert_eq!(exact, bareiss_rank(integer_rows(m.rows())));
            let reduced: Vec<Vec<Fp61>> =
                m.rows().iter().map(|r| r.iter().map(|x| reduce(x).unwrap()).collect()).collect();
            prop_assert_eq!(gaussian_rank(reduced), exact);
        }
    }

    #[test]
    fn rank_is_monotone_in_rows(s in geometry(7, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(rho) = sample_realization::<Fp61, _>(&s, &mut rng) {
            let m = ConcurrenceMatrix::new(&s, &rho);
            let big: Vec<usize> = (0..m.num_rows()).filter(|_| rng.gen_bool(0.7)).collect();
            let small: Vec<usize> = big.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            prop_assert!(m.rank_of_rows(&small) <= m.rank_of_rows(&big));
            prop_assert!(m.rank_of_rows(&big) <= m.rank());
        }
    }
}

fn laman_sparse_by_pebbles(n: usize, edges: &[Edge]) -> bool {
    play(n, edges).unwrap().rejected.is_empty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_agree_on_random_geometries(s in connected_geometry(8, 5), seed in any::<u64>()) {
        match decide_rod_rigidity(&s, &DecideOptions::cross_validated(seed)) {
            Ok(_) => {}
            Err(AnalysisError::Disagreement(bundle)) => prop_assert!(false, "{}", bundle.to_json()),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn flexible_cone_graphs_never_give_rigid_strings(s in connected_geometry(8, 5), seed in any::<u64>()) {
        let w = canonical_subgraph(&s).unwrap();
        if w.play.is_rigid() {
            return Ok(());
        }
        if let Ok(a) = algebraic_verdict::<Fp61>(&s, seed, 10) {
            prop_assert!(a.ranks.iter().all(|&r| r < a.required));
        }
    }

    #[test]
    fn canonical_subgeometry_is_sharp_and_keeps_rigidity(s in connected_geometry(6, 3), seed in any::<u64>()) {
        let w = canonical_subgraph(&s).unwrap();
        let d = &w.derived;
        prop_assert!(is_sharply_independent_by_supports(&d.geometry, d.geometry.incidences(), LINE_BUDGET).unwrap());
        prop_assert_eq!(w.is_minimally_rigid(), d.count_excess() == 0);
        let cone = ConeIncidenceGeometry::new(&s);
        if let Ok(rho) = sample_cone_realization::<Fp61>(&s, &cone, seed) {
            let restricted: LinearRealization<Fp61> = rho.restrict(&d.source_lines);
            let m = ConcurrenceMatrix::new(&d.geometry, &restricted);
            prop_assert_eq!(m.rank() == m.max_rank(), w.is_minimally_rigid());
            prop_assert_eq!(m.rank(), m.num_rows());
        }
    }
}
