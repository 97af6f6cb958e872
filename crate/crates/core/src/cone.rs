//! Cone graphs and the cone incidence geometry.
//!
//! Vertex numbering is shared by [`ConeGraph`] and [`ConeIncidenceGeometry`]:
//! point `p` is vertex `p`, and the cone vertex of line `l` is `|P| + l`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::IncidenceGeometry;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("point {point} is not incident to line {line}")]
    NotIncident { line: usize, point: usize },
    #[error("inner-vertex choice has {got} entries for {expected} lines")]
    ChoiceLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Point(usize),
    Cone(usize),
}

/// Which part of a cone an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// `(c_line, point)`.
    Spoke { line: usize, point: usize },
    /// `(inner, point)` inside the star of `line`.
    Star { line: usize, inner: usize, point: usize },
}

impl EdgeKind {
    pub fn line(&self) -> usize {
        match *self {
            EdgeKind::Spoke { line, .. } | EdgeKind::Star { line, .. } => line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeGraph {
    num_points: usize,
    num_lines: usize,
    edges: Vec<(usize, usize)>,
    kinds: Vec<EdgeKind>,
    inner: Vec<usize>,
    cone_ranges: Vec<std::ops::Range<usize>>,
}

impl ConeGraph {
    /// Cone graph with the lowest-index point of every line as inner vertex.
    pub fn new(s: &IncidenceGeometry) -> Self {
        let inner = (0..s.num_lines()).map(|l| s.line(l)[0]).collect();
        Self::with_inner(s, inner).expect("lowest point is incident")
    }

    /// Cone graph with an explicit inner vertex per line.
    ///
    /// Cones are emitted in line order; inside a cone the spokes come first,
    /// then the star edges, each by point index.
    pub fn with_inner(s: &IncidenceGeometry, inner: Vec<usize>) -> Result<Self, ConeError> {
        if inner.len() != s.num_lines() {
            return Err(ConeError::ChoiceLength {
                expected: s.num_lines(),
                got: inner.len(),
            });
        }
        let np = s.num_points();
        let mut edges = Vec::with_capacity(2 * s.num_incidences());
        let mut kinds = Vec::with_capacity(edges.capacity());
        let mut cone_ranges = Vec::with_capacity(s.num_lines());
        for (l, &centre) in inner.iter().enumerate() {
            if !s.is_incident(centre, l) {
                return Err(ConeError::NotIncident { line: l, point: centre });
            }
            let start = edges.len();
            for &p in s.line(l) {
                edges.push((np + l, p));
                kinds.push(EdgeKind::Spoke { line: l, point: p });
            }
            for &p in s.line(l).iter().filter(|&&p| p != centre) {
                edges.push((centre, p));
                kinds.push(EdgeKind::Star {
                    line: l,
                    inner: centre,
                    point: p,
                });
            }
            cone_ranges.push(start..edges.len());
        }
        Ok(Self {
            num_points: np,
            num_lines: s.num_lines(),
            edges,
            kinds,
            inner,
            cone_ranges,
        })
    }

    /// The same cone graph with the star of `line` re-rooted at `point`.
    pub fn reassign_inner_vertex(
        &self,
        s: &IncidenceGeometry,
        line: usize,
        point: usize,
    ) -> Result<Self, ConeError> {
        if !s.is_incident(point, line) {
            return Err(ConeError::NotIncident { line, point });
        }
        let mut inner = self.inner.clone();
        inner[line] = point;
        Self::with_inner(s, inner)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_points + self.num_lines
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn cone_vertex(&self, line: usize) -> usize {
        self.num_points + line
    }

    pub fn vertex_kind(&self, v: usize) -> VertexKind {
        if v < self.num_points {
            VertexKind::Point(v)
        } else {
            VertexKind::Cone(v - self.num_points)
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_kinds(&self) -> &[EdgeKind] {
        &self.kinds
    }

    pub fn inner_vertices(&self) -> &[usize] {
        &self.inner
    }

    /// Edge indices of the cone of `line`.
    pub fn cone_edges(&self, line: usize) -> std::ops::Range<usize> {
        self.cone_ranges[line].clone()
    }

    /// Index of the first edge joining `u` and `v`, in either orientation.
    /// Repeated lines give repeated edges; use [`Self::cone_edges`] to tell them apart.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// Graphviz rendering: cone vertices are squares, point vertices circles,
    /// each cone in its own colour. `highlight` marks a subset of edge indices
    /// to draw solid; the rest are dashed. `None` draws every edge solid.
    pub fn to_dot(&self, s: &IncidenceGeometry, highlight: Option<&[usize]>) -> String {
        const PALETTE: [&str; 8] = [
            "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
        ];
        let mut kept = vec![highlight.is_none(); self.edges.len()];
        if let Some(h) = highlight {
            for &e in h {
                kept[e] = true;
            }
        }
        let mut out = String::from("graph cone {\n  node [fontname=\"Helvetica\"];\n");
        for p in 0..self.num_points {
            let label = s.name(p).map_or_else(|| p.to_string(), str::to_string);
            let _ = writeln!(out, "  p{p} [shape=circle, label=\"{label}\"];");
        }
        for l in 0..self.num_lines {
            let colour = PALETTE[l % PALETTE.len()];
            let _ = writeln!(
                out,
                "  c{l} [shape=square, color=\"{colour}\", label=\"c{l}\"];"
            );
        }
        let name = |v: usize| match self.vertex_kind(v) {
            VertexKind::Point(p) => format!("p{p}"),
            VertexKind::Cone(l) => format!("c{l}"),
        };
        for (i, (&(u, v), kind)) in self.edges.iter().zip(&self.kinds).enumerate() {
            let colour = PALETTE[kind.line() % PALETTE.len()];
            let style = if kept[i] { "solid" } else { "dashed" };
            let _ = writeln!(
                out,
                "  {} -- {} [color=\"{colour}\", style={style}];",
                name(u),
                name(v)
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Origin of a point of `S^C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConePointSource {
    Point(usize),
    ConeOf(usize),
}

/// Origin of a line of `S^C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeLineSource {
    /// The collinear class of an original line.
    Original(usize),
    /// The spoke line through `c_line` and `point`.
    Spoke { line: usize, point: usize },
}

/// The cone incidence geometry `S^C`.
///
/// Lines `0..|L|` are the original lines; line `|L| + i` is the spoke of the
/// `i`-th incidence of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeIncidenceGeometry {
    pub geometry: IncidenceGeometry,
    pub point_source: Vec<ConePointSource>,
    pub line_source: Vec<ConeLineSource>,
    pub base_points: usize,
    pub base_lines: usize,
}

impl ConeIncidenceGeometry {
    pub fn new(s: &IncidenceGeometry) -> Self {
        let np = s.num_points();
        let mut lines: Vec<Vec<usize>> = s.lines().to_vec();
        let mut line_source: Vec<_> = (0..s.num_lines()).map(ConeLineSource::Original).collect();
        for &(p, l) in s.incidences() {
            lines.push(vec![p, np + l]);
            line_source.push(ConeLineSource::Spoke { line: l, point: p });
        }
        let point_source = (0..np)
            .map(ConePointSource::Point)
            .chain((0..s.num_lines()).map(ConePointSource::ConeOf))
            .collect();
        let mut names: Vec<Option<String>> = (0..np).map(|p| s.name(p).map(str::to_string)).collect();
        names.extend((0..s.num_lines()).map(|l| Some(format!("c{l}"))));
        let geometry = IncidenceGeometry::with_names(np + s.num_lines(), lines, names)
            .expect("cone geometry is valid by construction");
        Self {
            geometry,
            point_source,
            line_source,
            base_points: np,
            base_lines: s.num_lines(),
        }
    }

    pub fn cone_point(&self, line: usize) -> usize {
        self.base_points + line
    }

    /// Index in `L^C` of the spoke through `c_line` and `point`.
    pub fn spoke_line(&self, s: &IncidenceGeometry, line: usize, point: usize) -> Option<usize> {
        s.incidence_index(point, line).map(|i| self.base_lines + i)
    }
}
