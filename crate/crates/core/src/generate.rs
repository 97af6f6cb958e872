//! Random and structured instances for fuzzing, tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::geometry::IncidenceGeometry;
use crate::pebble::Edge;

/// Attempts before [`random_connected_geometry`] gives up.
pub const GEOMETRY_ATTEMPTS: usize = 1000;

/// A connected geometry without isolated points, with up to `max_points`
/// points and `1..=max_lines` lines. Each line takes each point independently
/// with probability `density`; draws that are disconnected or leave a line
/// with fewer than two points are discarded.
pub fn random_connected_geometry<R: Rng + ?Sized>(
    rng: &mut R,
    max_points: usize,
    max_lines: usize,
    density: f64,
) -> Option<IncidenceGeometry> {
    assert!(max_points >= 2 && max_lines >= 1);
    for _ in 0..GEOMETRY_ATTEMPTS {
        let n = rng.gen_range(2..=max_points);
        let m = rng.gen_range(1..=max_lines);
        let lines: Vec<Vec<usize>> = (0..m)
            .map(|_| (0..n).filter(|_| rng.gen_bool(density)).collect())
            .collect();
        if lines.iter().any(|l: &Vec<usize>| l.len() < 2) {
            continue;
        }
        let Ok(s) = IncidenceGeometry::new(n, lines) else {
            continue;
        };
        if s.is_connected() {
            return Some(s);
        }
    }
    None
}

/// `num_lines` rods of `points_per_line` points, consecutive rods sharing one point.
pub fn chain_geometry(num_lines: usize, points_per_line: usize) -> IncidenceGeometry {
    assert!(num_lines >= 1 && points_per_line >= 2);
    let step = points_per_line - 1;
    let lines = (0..num_lines)
        .map(|i| (i * step..=(i + 1) * step).collect())
        .collect();
    IncidenceGeometry::new(num_lines * step + 1, lines).expect("chain is valid")
}

/// Every line through exactly the points in `sizes`, glued along a random
/// spanning structure so the result is connected. Used for small corpora.
pub fn random_small_geometry<R: Rng + ?Sized>(rng: &mut R, sizes: &[usize]) -> IncidenceGeometry {
    assert!(!sizes.is_empty() && sizes.iter().all(|&k| k >= 2));
    let mut lines: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    let mut num_points = 0;
    for &k in sizes {
        let mut pts: Vec<usize> = Vec::with_capacity(k);
        if num_points > 0 {
            // reuse between one and k - 1 existing points
            let reuse = rng.gen_range(1..k.min(num_points + 1));
            let mut pool: Vec<usize> = (0..num_points).collect();
            pool.shuffle(rng);
            pts.extend_from_slice(&pool[..reuse]);
        }
        while pts.len() < k {
            pts.push(num_points);
            num_points += 1;
        }
        lines.push(pts);
    }
    IncidenceGeometry::new(num_points, lines).expect("generated lines are valid")
}

/// A random minimally rigid graph on `n >= 2` vertices by Henneberg moves:
/// a new vertex joins two old ones, or splits an edge and joins a third.
pub fn henneberg_graph<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Edge> {
    assert!(n >= 2);
    let mut edges = vec![(0, 1)];
    for v in 2..n {
        if v >= 3 && rng.gen_bool(0.5) {
            let i = rng.gen_range(0..edges.len());
            let (a, b) = edges.swap_remove(i);
            let c = loop {
                let c = rng.gen_range(0..v);
                if c != a && c != b {
                    break c;
                }
            };
            edges.extend([(a, v), (b, v), (c, v)]);
        } else {
            let a = rng.gen_range(0..v);
            let b = loop {
                let b = rng.gen_range(0..v);
                if b != a {
                    break b;
                }
            };
            edges.extend([(a, v), (b, v)]);
        }
    }
    edges
}

/// `edges` with vertex `v` renamed to `map[v]`.
pub fn relabel(edges: &[Edge], map: &[usize]) -> Vec<Edge> {
    edges.iter().map(|&(u, v)| (map[u], map[v])).collect()
}
