//! Linear realizations: a slope and intercept per line, coordinates per point,
//! such that `f_l * x_p + y_p + h_l = 0` at every incidence.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::Scalar;
use super::OracleError;
use crate::cone::ConeIncidenceGeometry;
use crate::geometry::IncidenceGeometry;

/// Attempts per sampled entity before giving up.
pub const RETRY_BUDGET: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRealization<F> {
    pub slopes: Vec<F>,
    pub intercepts: Vec<F>,
    pub coords: Vec<(F, F)>,
}

impl<F: Scalar> LinearRealization<F> {
    /// `f_l * x_p + y_p + h_l`.
    pub fn residual(&self, p: usize, l: usize) -> F {
        let (x, y) = &self.coords[p];
        self.slopes[l].mul(x).add(y).add(&self.intercepts[l])
    }

    /// Verifies shape and exact incidence residuals against `s`.
    pub fn check(&self, s: &IncidenceGeometry) -> Result<(), OracleError> {
        if self.coords.len() != s.num_points()
            || self.slopes.len() != s.num_lines()
            || self.intercepts.len() != s.num_lines()
        {
            return Err(OracleError::ShapeMismatch {
                points: self.coords.len(),
                lines: self.slopes.len(),
                expected_points: s.num_points(),
                expected_lines: s.num_lines(),
            });
        }
        for &(p, l) in s.incidences() {
            if !self.residual(p, l).is_zero() {
                return Err(OracleError::Residual { point: p, line: l });
            }
        }
        Ok(())
    }

    /// Distinct points have distinct coordinates.
    pub fn is_proper(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.coords.len());
        self.coords.iter().all(|c| seen.insert(c))
    }

    /// All points share one coordinate pair.
    pub fn is_trivial(&self) -> bool {
        self.coords.windows(2).all(|w| w[0] == w[1])
    }

    /// Two distinct lines carry the same slope and intercept.
    pub fn has_coincident_lines(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.slopes.len());
        self.slopes.iter().zip(&self.intercepts).any(|key| !seen.insert(key))
    }

    /// Every point at the origin, every line `y = 0`.
    pub fn trivial(s: &IncidenceGeometry) -> Self {
        Self {
            slopes: vec![F::zero(); s.num_lines()],
            intercepts: vec![F::zero(); s.num_lines()],
            coords: vec![(F::zero(), F::zero()); s.num_points()],
        }
    }

    /// Derives slopes and intercepts from point coordinates, optionally after
    /// rotating every point by `(cos, sin)`.
    pub fn from_coords(
        s: &IncidenceGeometry,
        coords: Vec<(F, F)>,
        rotation: Option<(F, F)>,
    ) -> Result<Self, OracleError> {
        if coords.len() != s.num_points() {
            return Err(OracleError::ShapeMismatch {
                points: coords.len(),
                lines: s.num_lines(),
                expected_points: s.num_points(),
                expected_lines: s.num_lines(),
            });
        }
        let coords: Vec<(F, F)> = match rotation {
            Some((c, sn)) => coords
                .into_iter()
                .map(|(x, y)| (c.mul(&x).sub(&sn.mul(&y)), sn.mul(&x).add(&c.mul(&y))))
                .collect(),
            None => coords,
        };
        let mut slopes = Vec::with_capacity(s.num_lines());
        let mut intercepts = Vec::with_capacity(s.num_lines());
        for l in 0..s.num_lines() {
            let pts = s.line(l);
            let a = &coords[pts[0]];
            let b = pts
                .iter()
                .map(|&p| &coords[p])
                .find(|c| *c != a)
                .ok_or(OracleError::DegenerateLine { line: l })?;
            let (f, h) = line_through(a, b).ok_or(OracleError::VerticalLine { line: l })?;
            slopes.push(f);
            intercepts.push(h);
        }
        let rho = Self {
            slopes,
            intercepts,
            coords,
        };
        for &(p, l) in s.incidences() {
            if !rho.residual(p, l).is_zero() {
                return Err(OracleError::NotCollinear { line: l, point: p });
            }
        }
        Ok(rho)
    }

    /// Realization of a subgeometry whose line `i` lies on line `source[i]` of this one.
    pub fn restrict(&self, source: &[usize]) -> Self {
        Self {
            slopes: source.iter().map(|&l| self.slopes[l].clone()).collect(),
            intercepts: source.iter().map(|&l| self.intercepts[l].clone()).collect(),
            coords: self.coords.clone(),
        }
    }

    pub fn to_doc(&self) -> RealizationDoc {
        let pair = |x: &F| {
            let (n, d) = x.to_pair();
            [n, d]
        };
        RealizationDoc {
            field: F::FIELD.to_string(),
            modulus: F::modulus().map(|m| m.to_string()),
            slopes: Some(self.slopes.iter().map(pair).collect()),
            intercepts: Some(self.intercepts.iter().map(pair).collect()),
            coords: self.coords.iter().map(|(x, y)| [pair(x), pair(y)]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("realization serializes")
    }

    /// Reads a realization of `s`. When slopes are absent they are derived from
    /// the coordinates, rotating first if `rotation` is given.
    pub fn from_json(
        s: &IncidenceGeometry,
        text: &str,
        rotation: Option<(F, F)>,
    ) -> Result<Self, OracleError> {
        let doc: RealizationDoc =
            serde_json::from_str(text).map_err(|e| OracleError::Json(e.to_string()))?;
        if doc.field != F::FIELD {
            return Err(OracleError::Json(format!(
                "realization is over `{}`, expected `{}`",
                doc.field,
                F::FIELD
            )));
        }
        if doc.modulus != F::modulus().map(|m| m.to_string()) {
            return Err(OracleError::Json("modulus mismatch".into()));
        }
        let value = |[n, d]: &[String; 2]| {
            F::from_pair(n, d).ok_or_else(|| OracleError::Json(format!("bad number {n}/{d}")))
        };
        let coords = doc
            .coords
            .iter()
            .map(|[x, y]| Ok((value(x)?, value(y)?)))
            .collect::<Result<Vec<_>, OracleError>>()?;
        match (&doc.slopes, &doc.intercepts) {
            (Some(f), Some(h)) if rotation.is_none() => {
                let rho = Self {
                    slopes: f.iter().map(value).collect::<Result<_, _>>()?,
                    intercepts: h.iter().map(value).collect::<Result<_, _>>()?,
                    coords,
                };
                rho.check(s)?;
                Ok(rho)
            }
            _ => Self::from_coords(s, coords, rotation),
        }
    }
}

/// Serialized realization: exact numbers as `[numerator, denominator]` decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationDoc {
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercepts: Option<Vec<[String; 2]>>,
    pub coords: Vec<[[String; 2]; 2]>,
}

/// `(f, h)` of the line through two distinct points; `None` if vertical.
pub fn line_through<F: Scalar>(a: &(F, F), b: &(F, F)) -> Option<(F, F)> {
    let dx = b.0.sub(&a.0);
    let f = b.1.sub(&a.1).neg().div(&dx)?;
    let h = f.mul(&a.0).add(&a.1).neg();
    Some((f, h))
}

/// The rotation `((1 - t^2) / (1 + t^2), 2t / (1 + t^2))`; `None` if `1 + t^2 = 0`.
pub fn rotation<F: Scalar>(t: &F) -> Option<(F, F)> {
    let t2 = t.mul(t);
    let d = F::one().add(&t2).inv()?;
    Some((F::one().sub(&t2).mul(&d), F::from_i64(2).mul(t).mul(&d)))
}

/// A rotation `(cos, sin)` with exact entries, from a random rational parameter.
pub fn random_rotation<F: Scalar, R: Rng + ?Sized>(rng: &mut R) -> (F, F) {
    loop {
        if let Some(r) = rotation(&F::random(rng)) {
            return r;
        }
    }
}

/// Lines in breadth-first order over the line intersection graph, one
/// component after another, each started from its lowest-index line.
pub fn line_order(s: &IncidenceGeometry) -> Vec<usize> {
    let through = s.lines_through();
    let mut seen = vec![false; s.num_lines()];
    let mut order = Vec::with_capacity(s.num_lines());
    for start in 0..s.num_lines() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(l) = queue.pop_front() {
            order.push(l);
            let mut next: Vec<usize> = s
                .line(l)
                .iter()
                .flat_map(|&p| through[p].iter().copied())
                .filter(|&m| !seen[m])
                .collect();
            next.sort_unstable();
            next.dedup();
            for m in next {
                seen[m] = true;
                queue.push_back(m);
            }
        }
    }
    order
}

/// Samples a proper realization with pairwise distinct lines.
///
/// Lines are placed in breadth-first order. A line through no placed point
/// gets a random slope and intercept, through one placed point a random slope,
/// through two or more it is determined and must contain the rest. New points
/// land on the line at a random abscissa. A failed attempt is restarted.
pub fn sample_realization<F: Scalar, R: Rng + ?Sized>(
    s: &IncidenceGeometry,
    rng: &mut R,
) -> Result<LinearRealization<F>, OracleError> {
    let order = line_order(s);
    for _ in 0..RETRY_BUDGET {
        if let Some(rho) = sample_once(s, &order, rng) {
            if rho.is_proper() && !rho.has_coincident_lines() {
                debug_assert!(rho.check(s).is_ok());
                return Ok(rho);
            }
        }
    }
    Err(OracleError::Infeasible {
        attempts: RETRY_BUDGET,
    })
}

fn sample_once<F: Scalar, R: Rng + ?Sized>(
    s: &IncidenceGeometry,
    order: &[usize],
    rng: &mut R,
) -> Option<LinearRealization<F>> {
    let mut coords: Vec<Option<(F, F)>> = vec![None; s.num_points()];
    let mut slopes = vec![F::zero(); s.num_lines()];
    let mut intercepts = vec![F::zero(); s.num_lines()];
    for &l in order {
        let placed: Vec<&(F, F)> = s.line(l).iter().filter_map(|&p| coords[p].as_ref()).collect();
        let (f, h) = match placed.as_slice() {
            [] => (F::random(rng), F::random(rng)),
            [a] => {
                let f = F::random(rng);
                let h = f.mul(&a.0).add(&a.1).neg();
                (f, h)
            }
            [a, rest @ ..] => {
                let b = rest.iter().find(|b| **b != *a)?;
                let (f, h) = line_through(a, b)?;
                let on_line = |c: &(F, F)| f.mul(&c.0).add(&c.1).add(&h).is_zero();
                if !rest.iter().all(|c| on_line(c)) {
                    return None;
                }
                (f, h)
            }
        };
        for &p in s.line(l) {
            if coords[p].is_none() {
                let x = F::random(rng);
                let y = f.mul(&x).add(&h).neg();
                coords[p] = Some((x, y));
            }
        }
        slopes[l] = f;
        intercepts[l] = h;
    }
    let coords = coords
        .into_iter()
        .map(|c| c.unwrap_or_else(|| (F::random(rng), F::random(rng))))
        .collect();
    Some(LinearRealization {
        slopes,
        intercepts,
        coords,
    })
}

/// Extends a proper realization of `s` to one of `S^C`.
///
/// Each cone point is drawn at random off its line and away from every point
/// placed so far, with no spoke vertical or coinciding with an earlier line.
pub fn realize_cone<F: Scalar, R: Rng + ?Sized>(
    s: &IncidenceGeometry,
    cone: &ConeIncidenceGeometry,
    rho: &LinearRealization<F>,
    rng: &mut R,
) -> Result<LinearRealization<F>, OracleError> {
    rho.check(s)?;
    if !rho.is_proper() {
        return Err(OracleError::NotProper);
    }
    let mut coords = rho.coords.clone();
    let mut taken: HashSet<(F, F)> = coords.iter().cloned().collect();
    let mut lines: HashSet<(F, F)> = rho.slopes.iter().cloned().zip(rho.intercepts.iter().cloned()).collect();
    let mut spokes: Vec<Option<(F, F)>> = vec![None; s.num_incidences()];
    for l in 0..s.num_lines() {
        let mut placed = false;
        for _ in 0..RETRY_BUDGET {
            let c = (F::random(rng), F::random(rng));
            if taken.contains(&c) || rho.slopes[l].mul(&c.0).add(&c.1).add(&rho.intercepts[l]).is_zero() {
                continue;
            }
            let candidate: Option<Vec<(F, F)>> = s
                .line(l)
                .iter()
                .map(|&p| line_through(&c, &rho.coords[p]))
                .collect();
            let Some(candidate) = candidate else {
                continue;
            };
            let fresh: HashSet<_> = candidate.iter().collect();
            if fresh.len() != candidate.len() || candidate.iter().any(|k| lines.contains(k)) {
                continue;
            }
            for (&p, k) in s.line(l).iter().zip(candidate) {
                lines.insert(k.clone());
                spokes[s.incidence_index(p, l).expect("incident")] = Some(k);
            }
            taken.insert(c.clone());
            coords.push(c);
            placed = true;
            break;
        }
        if !placed {
            return Err(OracleError::Infeasible {
                attempts: RETRY_BUDGET,
            });
        }
    }
    let mut slopes = rho.slopes.clone();
    let mut intercepts = rho.intercepts.clone();
    for (f, h) in spokes.into_iter().map(|k| k.expect("every spoke placed")) {
        slopes.push(f);
        intercepts.push(h);
    }
    let out = LinearRealization {
        slopes,
        intercepts,
        coords,
    };
    debug_assert!(out.check(&cone.geometry).is_ok());
    Ok(out)
}
