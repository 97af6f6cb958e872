//! The (2,3)-pebble game for independence in the generic planar rigidity matroid.
//!
//! Every vertex starts with two pebbles. An edge is accepted when four pebbles
//! can be gathered on its endpoints; one of them is then spent and the edge is
//! oriented away from the endpoint that paid. Pebbles are fetched along directed
//! paths, reversing the path as the pebble moves. Throughout the game
//! `pebbles(v) + outdeg(v) == 2` for every vertex.

use serde::Serialize;
use thiserror::Error;

pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PebbleError {
    #[error("edge {index} is a self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge {index} references vertex {vertex} of {vertices}")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        vertices: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    MinimallyRigid,
    RigidRedundant,
    FlexibleIndependent,
    FlexibleRedundant,
}

impl Classification {
    pub fn is_rigid(self) -> bool {
        matches!(self, Self::MinimallyRigid | Self::RigidRedundant)
    }

    pub fn is_independent(self) -> bool {
        matches!(self, Self::MinimallyRigid | Self::FlexibleIndependent)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MinimallyRigid => "minimally-rigid",
            Self::RigidRedundant => "rigid-redundant",
            Self::FlexibleIndependent => "flexible-independent",
            Self::FlexibleRedundant => "flexible-redundant",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a complete game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PebbleVerdict {
    pub num_vertices: usize,
    pub accepted: Vec<Edge>,
    pub rejected: Vec<Edge>,
    pub remaining_pebbles: usize,
    pub classification: Classification,
}

impl PebbleVerdict {
    pub fn is_rigid(&self) -> bool {
        self.classification.is_rigid()
    }

    /// Internal degrees of freedom: remaining pebbles beyond the three trivial motions.
    pub fn degrees_of_freedom(&self) -> usize {
        self.remaining_pebbles.saturating_sub(3)
    }
}

#[derive(Debug, Clone)]
pub struct PebbleState {
    pebbles: Vec<u8>,
    out: Vec<Vec<usize>>,
    accepted: Vec<Edge>,
    rejected: Vec<Edge>,
    mark: Vec<u32>,
    stamp: u32,
    parent: Vec<usize>,
    stack: Vec<usize>,
}

impl PebbleState {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            pebbles: vec![2; num_vertices],
            out: vec![Vec::new(); num_vertices],
            accepted: Vec::new(),
            rejected: Vec::new(),
            mark: vec![0; num_vertices],
            stamp: 0,
            parent: vec![usize::MAX; num_vertices],
            stack: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.pebbles.len()
    }

    pub fn pebbles(&self, v: usize) -> u8 {
        self.pebbles[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn remaining_pebbles(&self) -> usize {
        self.pebbles.iter().map(|&p| p as usize).sum()
    }

    pub fn accepted(&self) -> &[Edge] {
        &self.accepted
    }

    pub fn rejected(&self) -> &[Edge] {
        &self.rejected
    }

    /// Plays one edge. Returns whether it was accepted.
    ///
    /// Panics on a self-loop or an out-of-range endpoint.
    pub fn try_edge(&mut self, (u, v): Edge) -> bool {
        assert_ne!(u, v, "self-loop at vertex {u}");
        loop {
            if self.pebbles[u] + self.pebbles[v] >= 4 {
                let tail = u.min(v);
                let head = u.max(v);
                self.pebbles[tail] -= 1;
                self.out[tail].push(head);
                self.accepted.push((u, v));
                return true;
            }
            if self.pebbles[u] < 2 && self.fetch_pebble(u, v) {
                continue;
            }
            if self.pebbles[v] < 2 && self.fetch_pebble(v, u) {
                continue;
            }
            self.rejected.push((u, v));
            return false;
        }
    }

    /// Whether `e` would be accepted, leaving this state untouched.
    pub fn independent_after(&self, e: Edge) -> bool {
        self.clone().try_edge(e)
    }

    /// Depth-first search from `root` for a free pebble, never entering
    /// `blocked`. On success the path is reversed and the pebble moves to `root`.
    fn fetch_pebble(&mut self, root: usize, blocked: usize) -> bool {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        self.mark[root] = stamp;
        self.mark[blocked] = stamp;
        self.stack.clear();
        self.stack.push(root);
        let mut found = None;
        'search: while let Some(x) = self.stack.pop() {
            for &y in &self.out[x] {
                if self.mark[y] == stamp {
                    continue;
                }
                self.mark[y] = stamp;
                self.parent[y] = x;
                if self.pebbles[y] > 0 {
                    found = Some(y);
                    break 'search;
                }
                self.stack.push(y);
            }
        }
        let Some(source) = found else {
            return false;
        };
        self.pebbles[source] -= 1;
        self.pebbles[root] += 1;
        let mut y = source;
        while y != root {
            let x = self.parent[y];
            let pos = self.out[x].iter().position(|&w| w == y).expect("path edge exists");
            self.out[x].swap_remove(pos);
            self.out[y].push(x);
            y = x;
        }
        true
    }

    pub fn verdict(&self) -> PebbleVerdict {
        let remaining = self.remaining_pebbles();
        let rigid = remaining == 3;
        let independent = self.rejected.is_empty();
        let classification = match (rigid, independent) {
            (true, true) => Classification::MinimallyRigid,
            (true, false) => Classification::RigidRedundant,
            (false, true) => Classification::FlexibleIndependent,
            (false, false) => Classification::FlexibleRedundant,
        };
        PebbleVerdict {
            num_vertices: self.num_vertices(),
            accepted: self.accepted.clone(),
            rejected: self.rejected.clone(),
            remaining_pebbles: remaining,
            classification,
        }
    }
}

/// Runs the pebble game over `edges` in the given order.
pub fn play(num_vertices: usize, edges: &[Edge]) -> Result<PebbleVerdict, PebbleError> {
    validate(num_vertices, edges)?;
    let mut state = PebbleState::new(num_vertices);
    for &e in edges {
        state.try_edge(e);
    }
    Ok(state.verdict())
}

pub fn validate(num_vertices: usize, edges: &[Edge]) -> Result<(), PebbleError> {
    for (index, &(u, v)) in edges.iter().enumerate() {
        if let Some(vertex) = [u, v].into_iter().find(|&w| w >= num_vertices) {
            return Err(PebbleError::VertexOutOfRange {
                index,
                vertex,
                vertices: num_vertices,
            });
        }
        if u == v {
            return Err(PebbleError::SelfLoop { index, vertex: u });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Vec<Edge> {
        vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    }

    fn check_invariant(state: &PebbleState) {
        for v in 0..state.num_vertices() {
            assert_eq!(state.pebbles(v) as usize + state.out_degree(v), 2, "vertex {v}");
        }
        assert_eq!(
            state.remaining_pebbles(),
            2 * state.num_vertices() - state.accepted().len()
        );
    }

    #[test]
    fn k4_is_rigid_redundant() {
        let v = play(4, &k4()).unwrap();
        assert_eq!((v.accepted.len(), v.rejected.len(), v.remaining_pebbles), (5, 1, 3));
        assert_eq!(v.classification, Classification::RigidRedundant);
        assert_eq!(v.rejected, vec![(2, 3)]);
    }

    #[test]
    fn triangle_is_minimally_rigid() {
        let v = play(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(v.classification, Classification::MinimallyRigid);
        assert_eq!(v.remaining_pebbles, 3);
    }

    #[test]
    fn bowtie_is_flexible_independent() {
        let edges = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)];
        let v = play(5, &edges).unwrap();
        assert_eq!(v.accepted.len(), 6);
        assert_eq!(v.remaining_pebbles, 4);
        assert_eq!(v.classification, Classification::FlexibleIndependent);
        assert_eq!(v.degrees_of_freedom(), 1);
    }

    #[test]
    fn first_edge_is_free() {
        let mut s = PebbleState::new(5);
        assert!(s.try_edge((3, 1)));
        assert_eq!(s.remaining_pebbles(), 9);
        assert_eq!(s.out_neighbours(1), &[3]);
        check_invariant(&s);
    }

    #[test]
    fn sixth_k4_edge_rejected_and_probe_agrees() {
        let mut s = PebbleState::new(4);
        for &e in &k4()[..5] {
            assert!(s.try_edge(e));
            check_invariant(&s);
        }
        assert!(!s.independent_after((2, 3)));
        assert_eq!(s.accepted().len(), 5);
        assert!(!s.try_edge((2, 3)));
        check_invariant(&s);
    }

    #[test]
    fn fresh_endpoint_always_accepted() {
        let mut s = PebbleState::new(5);
        for &e in &k4()[..5] {
            s.try_edge(e);
        }
        assert!(s.independent_after((4, 2)));
        assert!(s.try_edge((4, 2)));
        check_invariant(&s);
    }

    #[test]
    fn errors() {
        assert_eq!(play(3, &[(0, 1), (2, 2)]), Err(PebbleError::SelfLoop { index: 1, vertex: 2 }));
        assert!(matches!(
            play(3, &[(0, 3)]),
            Err(PebbleError::VertexOutOfRange { vertex: 3, .. })
        ));
    }

    #[test]
    fn degenerate_vertex_counts() {
        assert_eq!(play(0, &[]).unwrap().remaining_pebbles, 0);
        assert!(!play(1, &[]).unwrap().is_rigid());
        assert!(play(2, &[(0, 1)]).unwrap().is_rigid());
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let v = play(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(v.classification, Classification::RigidRedundant);
    }
}
