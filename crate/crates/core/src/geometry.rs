//! Rank-two incidence geometries: points, lines and the incidences between them.
//!
//! Points and lines are dense indices. A line is stored as the sorted list of
//! the points incident to it; the incidence list is derived from the lines and
//! ordered line-major, then by point index.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point-line incidence `(point, line)`.
pub type Incidence = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line} references point {point}, but the geometry has {points} points")]
    DanglingPoint {
        line: usize,
        point: usize,
        points: usize,
    },
    #[error("line {line} lists point {point} more than once")]
    DuplicateIncidence { line: usize, point: usize },
    #[error("line {line} has {count} incident point(s); a rod needs at least 2")]
    ShortLine { line: usize, count: usize },
    #[error("incidence (point {0}, line {1}) is not in the geometry")]
    UnknownIncidence(usize, usize),
    #[error("invalid JSON geometry: {0}")]
    Json(String),
}

/// An incidence geometry `S = (P, L, I)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGeometry {
    num_points: usize,
    names: Vec<Option<String>>,
    lines: Vec<Vec<usize>>,
    incidences: Vec<Incidence>,
    line_offsets: Vec<usize>,
}

impl IncidenceGeometry {
    /// Builds a validated geometry from point lists. Point lists are sorted;
    /// duplicates, dangling points and lines with fewer than two points are errors.
    pub fn new(num_points: usize, lines: Vec<Vec<usize>>) -> Result<Self, GeometryError> {
        Self::with_names(num_points, lines, vec![None; num_points])
    }

    pub fn with_names(
        num_points: usize,
        lines: Vec<Vec<usize>>,
        mut names: Vec<Option<String>>,
    ) -> Result<Self, GeometryError> {
        names.resize(num_points, None);
        let mut sorted = Vec::with_capacity(lines.len());
        for (l, mut pts) in lines.into_iter().enumerate() {
            if let Some(&p) = pts.iter().find(|&&p| p >= num_points) {
                return Err(GeometryError::DanglingPoint {
                    line: l,
                    point: p,
                    points: num_points,
                });
            }
            pts.sort_unstable();
            if let Some(w) = pts.windows(2).find(|w| w[0] == w[1]) {
                return Err(GeometryError::DuplicateIncidence { line: l, point: w[0] });
            }
            if pts.len() < 2 {
                return Err(GeometryError::ShortLine {
                    line: l,
                    count: pts.len(),
                });
            }
            sorted.push(pts);
        }
        let mut incidences = Vec::new();
        let mut line_offsets = Vec::with_capacity(sorted.len() + 1);
        for (l, pts) in sorted.iter().enumerate() {
            line_offsets.push(incidences.len());
            incidences.extend(pts.iter().map(|&p| (p, l)));
        }
        line_offsets.push(incidences.len());
        Ok(Self {
            num_points,
            names,
            lines: sorted,
            incidences,
            line_offsets,
        })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn num_incidences(&self) -> usize {
        self.incidences.len()
    }

    /// Points incident to line `l`, ascending.
    pub fn line(&self, l: usize) -> &[usize] {
        &self.lines[l]
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    /// All incidences, line-major.
    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn name(&self, p: usize) -> Option<&str> {
        self.names.get(p).and_then(|n| n.as_deref())
    }

    pub fn is_incident(&self, p: usize, l: usize) -> bool {
        self.lines.get(l).is_some_and(|pts| pts.binary_search(&p).is_ok())
    }

    /// Position of `(p, l)` in [`Self::incidences`].
    pub fn incidence_index(&self, p: usize, l: usize) -> Option<usize> {
        let pos = self.lines.get(l)?.binary_search(&p).ok()?;
        Some(self.line_offsets[l] + pos)
    }

    /// Lines through each point.
    pub fn lines_through(&self) -> Vec<Vec<usize>> {
        let mut through = vec![Vec::new(); self.num_points];
        for &(p, l) in &self.incidences {
            through[p].push(l);
        }
        through
    }

    /// Points that lie on no line.
    pub fn isolated_points(&self) -> Vec<usize> {
        let mut covered = vec![false; self.num_points];
        for &(p, _) in &self.incidences {
            covered[p] = true;
        }
        (0..self.num_points).filter(|&p| !covered[p]).collect()
    }

    /// Whether the bipartite point-line incidence graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.num_points + self.lines.len();
        if n == 0 {
            return true;
        }
        let through = self.lines_through();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            let neighbours: Box<dyn Iterator<Item = usize>> = if v < self.num_points {
                Box::new(through[v].iter().map(|&l| self.num_points + l))
            } else {
                Box::new(self.lines[v - self.num_points].iter().copied())
            };
            for w in neighbours {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    /// The geometry with line `l` and its incidences removed; all points stay.
    pub fn without_line(&self, l: usize) -> Self {
        let lines = self
            .lines
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != l)
            .map(|(_, pts)| pts.clone())
            .collect();
        Self::with_names(self.num_points, lines, self.names.clone())
            .expect("removing a line keeps a valid geometry")
    }

    /// Support `(J, Q, M)` of an incidence subset.
    pub fn support_of(&self, subset: &[Incidence]) -> Result<SubsetSupport, GeometryError> {
        let mut incidences = BTreeSet::new();
        let mut points = BTreeSet::new();
        let mut lines = BTreeSet::new();
        for &(p, l) in subset {
            if !self.is_incident(p, l) {
                return Err(GeometryError::UnknownIncidence(p, l));
            }
            incidences.insert((p, l));
            points.insert(p);
            lines.insert(l);
        }
        Ok(SubsetSupport {
            incidences,
            points,
            lines,
        })
    }

    /// Parses the text format:
    ///
    /// ```text
    /// # comment
    /// points: 3
    /// point 0 apex
    /// line: 0 1
    /// line: apex 2
    /// ```
    ///
    /// Line entries are point indices or names declared with `point`.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut num_points: Option<usize> = None;
        let mut names: Vec<Option<String>> = Vec::new();
        let mut by_name: HashMap<String, usize> = HashMap::new();
        let mut lines: Vec<Vec<usize>> = Vec::new();

        for (row, raw) in text.lines().enumerate() {
            let lineno = row + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let body = content.trim();
            let syntax = |column: usize, message: String| GeometryError::Syntax {
                line: lineno,
                column,
                message,
            };

            if let Some(rest) = body.strip_prefix("points:") {
                if num_points.is_some() {
                    return Err(syntax(indent + 1, "duplicate `points:` header".into()));
                }
                let column = indent + "points:".len() + 1 + (rest.len() - rest.trim_start().len());
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| syntax(column, format!("expected a point count, found `{}`", rest.trim())))?;
                num_points = Some(n);
                names = vec![None; n];
                continue;
            }
            let Some(n) = num_points else {
                return Err(syntax(indent + 1, "expected `points: <n>` header first".into()));
            };
            if let Some(rest) = body.strip_prefix("line:") {
                let base = indent + "line:".len();
                let mut pts = Vec::new();
                for (offset, token) in tokens(rest) {
                    let p = match token.parse::<usize>() {
                        Ok(p) => p,
                        Err(_) => *by_name
                            .get(token)
                            .ok_or_else(|| syntax(base + offset + 1, format!("unknown point `{token}`")))?,
                    };
                    if p >= n {
                        return Err(GeometryError::DanglingPoint {
                            line: lines.len(),
                            point: p,
                            points: n,
                        });
                    }
                    pts.push(p);
                }
                lines.push(pts);
            } else if let Some(rest) = body.strip_prefix("point") {
                let base = indent + "point".len();
                let toks: Vec<_> = tokens(rest).collect();
                if toks.len() != 2 {
                    return Err(syntax(base + 1, "expected `point <index> <name>`".into()));
                }
                let (off, idx) = toks[0];
                let idx = idx
                    .parse::<usize>()
                    .map_err(|_| syntax(base + off + 1, format!("expected a point index, found `{idx}`")))?;
                if idx >= n {
                    return Err(syntax(base + off + 1, format!("point index {idx} out of range 0..{n}")));
                }
                let (off, name) = toks[1];
                if name.parse::<usize>().is_ok() {
                    return Err(syntax(base + off + 1, "point names must not be numeric".into()));
                }
                if by_name.insert(name.to_string(), idx).is_some() {
                    return Err(syntax(base + off + 1, format!("duplicate point name `{name}`")));
                }
                names[idx] = Some(name.to_string());
            } else {
                let word = body.split_whitespace().next().unwrap_or(body);
                return Err(syntax(indent + 1, format!("unexpected `{word}`")));
            }
        }
        let n = num_points.ok_or(GeometryError::Syntax {
            line: text.lines().count().max(1),
            column: 1,
            message: "missing `points: <n>` header".into(),
        })?;
        Self::with_names(n, lines, names)
    }

    /// Writes the text format read by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("points: {}\n", self.num_points);
        for (p, name) in self.names.iter().enumerate() {
            if let Some(name) = name {
                let _ = writeln!(out, "point {p} {name}");
            }
        }
        for pts in &self.lines {
            out.push_str("line:");
            for p in pts {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let doc: GeometryDoc = serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
        Self::with_names(doc.points, doc.lines, doc.names.unwrap_or_default())
    }

    pub fn to_json(&self) -> String {
        let names = self.names.iter().any(Option::is_some).then(|| self.names.clone());
        let doc = GeometryDoc {
            points: self.num_points,
            lines: self.lines.clone(),
            names,
        };
        serde_json::to_string_pretty(&doc).expect("geometry serializes")
    }
}

/// JSON schema: `{"points": n, "lines": [[...], ...]}` with optional `names`.
#[derive(Debug, Serialize, Deserialize)]
struct GeometryDoc {
    points: usize,
    lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<Option<String>>>,
}

fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - s.as_ptr() as usize, t))
}

/// An incidence subset `J` together with its support `Q x M`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubsetSupport {
    pub incidences: BTreeSet<Incidence>,
    pub points: BTreeSet<usize>,
    pub lines: BTreeSet<usize>,
}

impl SubsetSupport {
    /// `|M| + 2|Q| - 3`, the largest rank the subset's rows can have.
    pub fn capacity(&self) -> i64 {
        self.lines.len() as i64 + 2 * self.points.len() as i64 - 3
    }
}
