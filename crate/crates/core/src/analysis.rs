//! Rigidity verdicts for rod configurations.
//!
//! The combinatorial verdict plays the pebble game on a cone graph of `S`. The
//! algebraic verdict ranks the concurrence matrix of random proper realizations
//! of `S^C`. For regular realizations the two always agree, so a disagreement
//! is reported as a defect together with everything needed to reproduce it.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cone::{ConeGraph, ConeIncidenceGeometry, EdgeKind};
use crate::geometry::IncidenceGeometry;
use crate::oracle::realization::line_order;
use crate::oracle::{
    realize_cone, sample_realization, string_config_rank, ConcurrenceMatrix, Fp61, Fp61Alt,
    LinearRealization, OracleError, RankReport, Scalar,
};
use crate::pebble::{Classification, Edge, PebbleState, PebbleVerdict};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Independent realizations sampled per cross-validation.
pub const CROSS_CHECK_SEEDS: usize = 3;
/// Largest `|L|` accepted by [`check_body_joint_counts`].
pub const BODY_SUBSET_BUDGET: usize = 20;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("geometry is disconnected")]
    Disconnected,
    #[error("geometry is not rigid, so minimal rigidity is undefined")]
    NotRigid,
    #[error("{lines} lines exceed the subset budget of {budget}")]
    BudgetExceeded { lines: usize, budget: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("combinatorial and algebraic verdicts disagree: {}", .0.detail)]
    Disagreement(Box<ReproBundle>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Combinatorial,
    CrossValidated,
}

/// Field used for algebraic checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Field {
    #[default]
    P61,
    P61Alt,
    Rational,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::P61 => "p61",
            Field::P61Alt => "p61-alt",
            Field::Rational => "rational",
        }
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p61" => Ok(Field::P61),
            "p61-alt" => Ok(Field::P61Alt),
            "rational" => Ok(Field::Rational),
            _ => Err(format!("unknown field `{s}` (expected p61, p61-alt or rational)")),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub mode: Mode,
    pub seed: u64,
    pub field: Field,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Combinatorial,
            seed: DEFAULT_SEED,
            field: Field::P61,
        }
    }
}

impl DecideOptions {
    pub fn cross_validated(seed: u64) -> Self {
        Self {
            mode: Mode::CrossValidated,
            seed,
            ..Self::default()
        }
    }
}

/// Why the algebraic side gave no verdict to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    NotRequested,
    Disconnected,
    /// No proper realization was found for some seed.
    Infeasible,
    /// The sampled realizations gave different verdicts.
    SeedsDisagree,
    /// A sampled realization is certified non-regular: the rows of the
    /// sharply independent canonical subgeometry are dependent.
    NonRegular,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::NotRequested => "not-requested",
            SkipReason::Disconnected => "disconnected",
            SkipReason::Infeasible => "infeasible",
            SkipReason::SeedsDisagree => "seeds-disagree",
            SkipReason::NonRegular => "non-regular",
        }
    }
}

/// Outcome of comparing the two verdicts. A disagreement is never a value of
/// this type; it surfaces as [`AnalysisError::Disagreement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    Skipped(SkipReason),
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agreement::Agree => f.write_str("agree"),
            Agreement::Skipped(r) => write!(f, "skipped ({})", r.as_str()),
        }
    }
}

/// Ranks of `M(S^C, rho)` for each sampled realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraicVerdict {
    pub field: String,
    pub seeds: Vec<u64>,
    pub ranks: Vec<usize>,
    pub required: usize,
}

impl AlgebraicVerdict {
    /// Every sample reached the rigidity rank.
    pub fn is_rigid(&self) -> bool {
        self.ranks.iter().all(|&r| r == self.required)
    }

    pub fn is_consistent(&self) -> bool {
        self.ranks.iter().all(|&r| (r == self.required) == self.is_rigid())
    }
}

/// Everything needed to replay a disagreement.
#[derive(Debug, Clone, Serialize)]
pub struct ReproBundle {
    pub detail: String,
    pub seed: u64,
    pub sample_seed: u64,
    pub field: String,
    pub geometry: String,
    pub combinatorial: Classification,
    pub rank: usize,
    pub required: usize,
    pub cone_realization: serde_json::Value,
}

impl ReproBundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}

/// Subgeometry of `S^C` spanned by a subgraph of a cone graph.
///
/// One line per original line whose star keeps at least one edge (its inner
/// vertex plus the kept star neighbours), then one two-point line per kept
/// spoke. `source_lines[i]` is the line of `S^C` that line `i` lies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSubgeometry {
    pub geometry: IncidenceGeometry,
    pub source_lines: Vec<usize>,
}

impl DerivedSubgeometry {
    /// `|I'| - (|L'| + 2|P'| - 3)`; zero when the count is tight.
    pub fn count_excess(&self) -> i64 {
        let g = &self.geometry;
        g.num_incidences() as i64 - (g.num_lines() as i64 + 2 * g.num_points() as i64 - 3)
    }
}

/// Builds the subgeometry of `S^C` for the edges of `graph` flagged in `kept`.
pub fn derived_subgeometry(
    s: &IncidenceGeometry,
    cone: &ConeIncidenceGeometry,
    graph: &ConeGraph,
    kept: &[bool],
) -> DerivedSubgeometry {
    let np = s.num_points();
    let mut stars: Vec<Vec<usize>> = vec![Vec::new(); s.num_lines()];
    let mut spokes = Vec::new();
    for (kind, _) in graph.edge_kinds().iter().zip(kept).filter(|(_, &k)| k) {
        match *kind {
            EdgeKind::Star { line, inner, point } => {
                if stars[line].is_empty() {
                    stars[line].push(inner);
                }
                stars[line].push(point);
            }
            EdgeKind::Spoke { line, point } => spokes.push((line, point)),
        }
    }
    let mut lines = Vec::new();
    let mut source_lines = Vec::new();
    for (l, star) in stars.into_iter().enumerate().filter(|(_, st)| !st.is_empty()) {
        lines.push(star);
        source_lines.push(l);
    }
    for (line, point) in spokes {
        lines.push(vec![point, np + line]);
        source_lines.push(cone.spoke_line(s, line, point).expect("spoke of an incidence"));
    }
    let geometry = IncidenceGeometry::new(cone.geometry.num_points(), lines)
        .expect("derived lines have two or more distinct points");
    DerivedSubgeometry {
        geometry,
        source_lines,
    }
}

/// The maximally independent subgraph of a cone graph built line by line.
///
/// Lines are taken in breadth-first order over shared points. For each line
/// `p` is its lowest already-seen point, `q_1 < q_2 < ...` the other seen
/// points and `p_1, ...` the new ones; the star is rooted at `p`. Edges are
/// tried in the order: `(c,p)`, `(c,q_1)`, all `(c,p_j)`, all `(p,p_j)`, the
/// other `(c,q_i)`, then `(p,q_i)` for every `q_i` whose spoke was kept, and
/// finally the remaining `(p,q_i)`, which are always rejected.
#[derive(Debug, Clone)]
pub struct CanonicalSubgraph {
    pub line_order: Vec<usize>,
    /// Cone graph with the star of each line rooted at its `p`.
    pub cone: ConeGraph,
    /// Cone edge indices in the order they were tried.
    pub trial_order: Vec<usize>,
    /// Whether each cone edge is in `G'`.
    pub kept: Vec<bool>,
    /// The full pebble game over the cone graph in trial order.
    pub play: PebbleVerdict,
    pub derived: DerivedSubgeometry,
}

impl CanonicalSubgraph {
    pub fn edges(&self) -> Vec<Edge> {
        self.cone
            .edges()
            .iter()
            .zip(&self.kept)
            .filter(|(_, &k)| k)
            .map(|(&e, _)| e)
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }

    pub fn num_vertices(&self) -> usize {
        self.cone.num_vertices()
    }

    pub fn is_minimally_rigid(&self) -> bool {
        self.num_edges() + 3 == 2 * self.num_vertices()
    }
}

pub fn canonical_subgraph(s: &IncidenceGeometry) -> Result<CanonicalSubgraph, AnalysisError> {
    if !s.is_connected() {
        return Err(AnalysisError::Disconnected);
    }
    let np = s.num_points();
    let order = line_order(s);
    let mut seen = vec![false; np];
    let mut inner = vec![0; s.num_lines()];
    // (p, q's, new points) per line
    let mut roles = vec![(0, Vec::new(), Vec::new()); s.num_lines()];
    for (i, &l) in order.iter().enumerate() {
        let (old, new): (Vec<usize>, Vec<usize>) = s.line(l).iter().partition(|&&x| seen[x]);
        let (p, qs, new) = if i == 0 {
            (new[0], Vec::new(), new[1..].to_vec())
        } else {
            (old[0], old[1..].to_vec(), new)
        };
        for &x in s.line(l) {
            seen[x] = true;
        }
        inner[l] = p;
        roles[l] = (p, qs, new);
    }
    let cone = ConeGraph::with_inner(s, inner).expect("p lies on its line");
    let mut state = PebbleState::new(cone.num_vertices());
    let mut kept = vec![false; cone.edges().len()];
    let mut trial_order = Vec::with_capacity(kept.len());
    // parallel lines can repeat an edge, so look it up within the line's cone
    let mut attempt = |l: usize, u: usize, v: usize| {
        let idx = cone
            .cone_edges(l)
            .find(|&i| {
                let (a, b) = cone.edges()[i];
                (a, b) == (u, v) || (b, a) == (u, v)
            })
            .expect("edge of the cone");
        trial_order.push(idx);
        kept[idx] = state.try_edge(cone.edges()[idx]);
        kept[idx]
    };
    for &l in &order {
        let (p, qs, new) = &roles[l];
        let c = np + l;
        let mut forced = attempt(l, c, *p);
        if let Some(&q1) = qs.first() {
            forced &= attempt(l, c, q1);
        }
        for &x in new {
            forced &= attempt(l, c, x);
        }
        for &x in new {
            forced &= attempt(l, *p, x);
        }
        debug_assert!(forced, "steps 2 to 5 keep independence");
        let mut spoke_kept: Vec<bool> = qs.iter().map(|_| false).collect();
        if !qs.is_empty() {
            spoke_kept[0] = true;
        }
        for (i, &q) in qs.iter().enumerate().skip(1) {
            spoke_kept[i] = attempt(l, c, q);
        }
        for (&q, _) in qs.iter().zip(&spoke_kept).filter(|(_, &k)| k) {
            attempt(l, *p, q);
        }
        for (&q, _) in qs.iter().zip(&spoke_kept).filter(|(_, &k)| !k) {
            let added = attempt(l, *p, q);
            debug_assert!(!added, "a star edge without its spoke is dependent");
        }
    }
    debug_assert_eq!(trial_order.len(), kept.len());
    let play = state.verdict();
    let cone_geometry = ConeIncidenceGeometry::new(s);
    let derived = derived_subgeometry(s, &cone_geometry, &cone, &kept);
    Ok(CanonicalSubgraph {
        line_order: order,
        cone,
        trial_order,
        kept,
        play,
        derived,
    })
}

#[derive(Debug, Clone)]
pub struct RigidityVerdict {
    pub connected: bool,
    pub combinatorial: PebbleVerdict,
    pub algebraic: Option<AlgebraicVerdict>,
    pub agreement: Agreement,
    /// Absent for disconnected geometries.
    pub witness: Option<CanonicalSubgraph>,
}

impl RigidityVerdict {
    pub fn is_rigid(&self) -> bool {
        self.connected && self.combinatorial.is_rigid()
    }

    pub fn classification(&self) -> Classification {
        self.combinatorial.classification
    }

    pub fn total_edges(&self) -> usize {
        self.combinatorial.accepted.len() + self.combinatorial.rejected.len()
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.combinatorial.degrees_of_freedom()
    }

    /// One-line summary, e.g. `rigid (19/20 edges independent, 3 pebbles remain)`.
    pub fn summary(&self) -> String {
        if self.is_rigid() {
            format!(
                "rigid ({}/{} edges independent, {} pebbles remain)",
                self.combinatorial.accepted.len(),
                self.total_edges(),
                self.combinatorial.remaining_pebbles
            )
        } else {
            let dof = self.degrees_of_freedom();
            let plural = if dof == 1 { "" } else { "s" };
            format!("flexible ({dof} internal degree{plural} of freedom)")
        }
    }

    pub fn report(&self, removable_rods: Option<Vec<usize>>) -> VerdictReport {
        VerdictReport {
            classification: self.classification(),
            rigid: self.is_rigid(),
            remaining_pebbles: self.combinatorial.remaining_pebbles,
            accepted_edges: self.combinatorial.accepted.len(),
            total_edges: self.total_edges(),
            agreement: match self.agreement {
                Agreement::Agree => "agree",
                Agreement::Skipped(_) => "skipped",
            },
            skip_reason: match self.agreement {
                Agreement::Agree => None,
                Agreement::Skipped(r) => Some(r),
            },
            algebraic: self.algebraic.clone(),
            removable_rods,
        }
    }
}

/// JSON form of a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub classification: Classification,
    pub rigid: bool,
    pub remaining_pebbles: usize,
    pub accepted_edges: usize,
    pub total_edges: usize,
    pub agreement: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<SkipReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebraic: Option<AlgebraicVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removable_rods: Option<Vec<usize>>,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The per-sample seeds drawn from a user seed.
pub fn sample_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen()).collect()
}

/// A random proper realization of `S^C` extending one of `S`.
pub fn sample_cone_realization<F: Scalar>(
    s: &IncidenceGeometry,
    cone: &ConeIncidenceGeometry,
    sample_seed: u64,
) -> Result<LinearRealization<F>, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let rho = sample_realization::<F, _>(s, &mut rng)?;
    realize_cone(s, cone, &rho, &mut rng)
}

pub fn decide_rod_rigidity(
    s: &IncidenceGeometry,
    options: &DecideOptions,
) -> Result<RigidityVerdict, AnalysisError> {
    if !s.is_connected() {
        let cone = ConeGraph::new(s);
        let combinatorial = crate::pebble::play(cone.num_vertices(), cone.edges()).expect("cone edges are valid");
        return Ok(RigidityVerdict {
            connected: false,
            combinatorial,
            algebraic: None,
            agreement: Agreement::Skipped(SkipReason::Disconnected),
            witness: None,
        });
    }
    let canon = canonical_subgraph(s)?;
    let (algebraic, agreement) = match options.mode {
        Mode::Combinatorial => (None, Agreement::Skipped(SkipReason::NotRequested)),
        Mode::CrossValidated => match options.field {
            Field::P61 => cross_validate::<Fp61>(s, &canon, options.seed)?,
            Field::P61Alt => cross_validate::<Fp61Alt>(s, &canon, options.seed)?,
            Field::Rational => cross_validate::<BigRational>(s, &canon, options.seed)?,
        },
    };
    Ok(RigidityVerdict {
        connected: true,
        combinatorial: canon.play.clone(),
        algebraic,
        agreement,
        witness: Some(canon),
    })
}

/// Algebraic verdict over the given field alone.
pub fn algebraic_verdict<F: Scalar>(
    s: &IncidenceGeometry,
    seed: u64,
    samples: usize,
) -> Result<AlgebraicVerdict, OracleError> {
    let cone = ConeIncidenceGeometry::new(s);
    let seeds = sample_seeds(seed, samples);
    let mut ranks = Vec::with_capacity(samples);
    let mut required = cone.geometry.num_lines() + 2 * cone.geometry.num_points() - 3;
    for &k in &seeds {
        let rho = sample_cone_realization::<F>(s, &cone, k)?;
        let report = string_config_rank(&cone.geometry, &rho)?;
        required = report.required;
        ranks.push(report.rank);
    }
    Ok(AlgebraicVerdict {
        field: F::FIELD.to_string(),
        seeds,
        ranks,
        required,
    })
}

fn cross_validate<F: Scalar>(
    s: &IncidenceGeometry,
    canon: &CanonicalSubgraph,
    seed: u64,
) -> Result<(Option<AlgebraicVerdict>, Agreement), AnalysisError> {
    let cone = ConeIncidenceGeometry::new(s);
    let seeds = sample_seeds(seed, CROSS_CHECK_SEEDS);
    let mut samples = Vec::with_capacity(seeds.len());
    for &k in &seeds {
        match sample_cone_realization::<F>(s, &cone, k) {
            Ok(rho) => {
                let report = string_config_rank(&cone.geometry, &rho)?;
                samples.push((k, rho, report));
            }
            Err(OracleError::Infeasible { .. }) => {
                return Ok((None, Agreement::Skipped(SkipReason::Infeasible)));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let verdict = AlgebraicVerdict {
        field: F::FIELD.to_string(),
        seeds,
        ranks: samples.iter().map(|(_, _, r)| r.rank).collect(),
        required: samples[0].2.required,
    };
    if !verdict.is_consistent() {
        return Ok((Some(verdict), Agreement::Skipped(SkipReason::SeedsDisagree)));
    }
    let comb_rigid = canon.play.is_rigid();
    if verdict.is_rigid() == comb_rigid {
        return Ok((Some(verdict), Agreement::Agree));
    }
    let (k, rho, report) = &samples[0];
    let bundle = |detail: String, rho: &LinearRealization<F>, k: u64, report: &RankReport| {
        AnalysisError::Disagreement(Box::new(ReproBundle {
            detail,
            seed,
            sample_seed: k,
            field: F::FIELD.to_string(),
            geometry: s.to_text(),
            combinatorial: canon.play.classification,
            rank: report.rank,
            required: report.required,
            cone_realization: serde_json::to_value(rho.to_doc()).expect("realization serializes"),
        }))
    };
    if !comb_rigid {
        return Err(bundle(
            "flexible cone graph but rigid string configuration".into(),
            rho,
            *k,
            report,
        ));
    }
    // A rigid cone graph with independent canonical rows forces full rank, so
    // a rank deficit must come with dependent canonical rows.
    let derived = &canon.derived;
    for (k, rho, report) in &samples {
        let restricted = rho.restrict(&derived.source_lines);
        let m = ConcurrenceMatrix::new(&derived.geometry, &restricted);
        if m.rank() == m.num_rows() {
            return Err(bundle(
                "rigid cone graph, independent canonical rows, yet rank deficient".into(),
                rho,
                *k,
                report,
            ));
        }
    }
    Ok((Some(verdict), Agreement::Skipped(SkipReason::NonRegular)))
}

#[derive(Debug, Clone)]
pub struct MinimalityReport {
    pub verdict: RigidityVerdict,
    /// Verdict after deleting each line, indexed by line.
    pub deletions: Vec<RigidityVerdict>,
}

impl MinimalityReport {
    /// Lines whose deletion leaves the configuration rigid.
    pub fn removable_rods(&self) -> Vec<usize> {
        (0..self.deletions.len()).filter(|&l| self.deletions[l].is_rigid()).collect()
    }

    pub fn is_minimally_rigid(&self) -> bool {
        self.deletions.iter().all(|d| !d.is_rigid())
    }
}

/// Decides rigidity after removing each rod in turn (all points stay).
pub fn decide_minimal_rigidity(
    s: &IncidenceGeometry,
    options: &DecideOptions,
) -> Result<MinimalityReport, AnalysisError> {
    let verdict = decide_rod_rigidity(s, options)?;
    if !verdict.is_rigid() {
        return Err(AnalysisError::NotRigid);
    }
    let deletions = (0..s.num_lines())
        .into_par_iter()
        .map(|l| decide_rod_rigidity(&s.without_line(l), options))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MinimalityReport { verdict, deletions })
}

/// Whether `2|I'| <= 3|L'| + 2|P'| - 3` holds globally and for every nonempty
/// set of lines `L'` with its incidences `I'` and incident points `P'`.
pub fn check_body_joint_counts(s: &IncidenceGeometry) -> Result<bool, AnalysisError> {
    check_body_joint_counts_with_budget(s, BODY_SUBSET_BUDGET)
}

pub fn check_body_joint_counts_with_budget(
    s: &IncidenceGeometry,
    budget: usize,
) -> Result<bool, AnalysisError> {
    let nl = s.num_lines();
    if nl > budget.min(30) {
        return Err(AnalysisError::BudgetExceeded { lines: nl, budget });
    }
    let global = 2 * s.num_incidences() as i64 <= 3 * nl as i64 + 2 * s.num_points() as i64 - 3;
    if !global {
        return Ok(false);
    }
    let mut touched = vec![0u32; s.num_points()];
    for mask in 1u32..1 << nl {
        let mut incidences = 0i64;
        let mut points = 0i64;
        for l in (0..nl).filter(|&l| mask >> l & 1 == 1) {
            incidences += s.line(l).len() as i64;
            for &p in s.line(l) {
                if touched[p] != mask {
                    touched[p] = mask;
                    points += 1;
                }
            }
        }
        if 2 * incidences > 3 * mask.count_ones() as i64 + 2 * points - 3 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{is_sharply_independent_by_supports, LINE_BUDGET};

    fn cevian() -> IncidenceGeometry {
        IncidenceGeometry::new(7, vec![vec![0, 2, 3], vec![0, 1, 4], vec![1, 2, 5], vec![1, 3, 6]]).unwrap()
    }

    fn hinge() -> IncidenceGeometry {
        IncidenceGeometry::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn triangle() -> IncidenceGeometry {
        IncidenceGeometry::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn cevian_is_rigid_with_nineteen_edges() {
        let v = decide_rod_rigidity(&cevian(), &DecideOptions::cross_validated(1)).unwrap();
        assert!(v.is_rigid());
        assert_eq!(v.summary(), "rigid (19/20 edges independent, 3 pebbles remain)");
        assert_eq!(v.agreement, Agreement::Agree);
        let w = v.witness.unwrap();
        assert_eq!((w.num_vertices(), w.num_edges()), (11, 19));
        assert_eq!(w.derived.count_excess(), 0);
    }

    #[test]
    fn hinge_has_one_degree_of_freedom() {
        let v = decide_rod_rigidity(&hinge(), &DecideOptions::cross_validated(2)).unwrap();
        assert_eq!(v.summary(), "flexible (1 internal degree of freedom)");
        assert_eq!(v.combinatorial.remaining_pebbles, 4);
        assert_eq!(v.agreement, Agreement::Agree);
        let a = v.algebraic.unwrap();
        assert!(a.ranks.iter().all(|&r| r + 1 == a.required));
    }

    #[test]
    fn hinge_canonical_subgraph_is_the_whole_cone() {
        let w = canonical_subgraph(&hinge()).unwrap();
        assert_eq!((w.num_vertices(), w.num_edges()), (5, 6));
        assert!(w.play.rejected.is_empty());
        assert!(w.derived.count_excess() < 0);
        let d = &w.derived.geometry;
        assert!(is_sharply_independent_by_supports(d, d.incidences(), LINE_BUDGET).unwrap());
    }

    #[test]
    fn lone_rods_are_rigid() {
        for k in 2..7 {
            let s = IncidenceGeometry::new(k, vec![(0..k).collect()]).unwrap();
            let v = decide_rod_rigidity(&s, &DecideOptions::cross_validated(k as u64)).unwrap();
            assert!(v.is_rigid(), "k = {k}");
            assert_eq!(v.agreement, Agreement::Agree);
            let w = v.witness.unwrap();
            assert!(w.kept.iter().all(|&b| b));
        }
    }

    #[test]
    fn disconnected_is_flexible() {
        let s = IncidenceGeometry::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let v = decide_rod_rigidity(&s, &DecideOptions::cross_validated(3)).unwrap();
        assert!(!v.is_rigid());
        assert_eq!(v.agreement, Agreement::Skipped(SkipReason::Disconnected));
        assert!(matches!(canonical_subgraph(&s), Err(AnalysisError::Disconnected)));
        let isolated = IncidenceGeometry::new(4, vec![vec![0, 1, 2]]).unwrap();
        assert!(!decide_rod_rigidity(&isolated, &DecideOptions::default()).unwrap().is_rigid());
    }

    #[test]
    fn triangle_is_minimally_rigid() {
        let r = decide_minimal_rigidity(&triangle(), &DecideOptions::cross_validated(4)).unwrap();
        assert!(r.is_minimally_rigid());
        assert!(r.removable_rods().is_empty());
        assert_eq!(r.deletions.len(), 3);
    }

    #[test]
    fn duplicated_line_is_removable() {
        let s = IncidenceGeometry::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 2]]).unwrap();
        let r = decide_minimal_rigidity(&s, &DecideOptions::default()).unwrap();
        assert!(!r.is_minimally_rigid());
        assert_eq!(r.removable_rods(), vec![2, 3]);
    }

    #[test]
    fn minimality_needs_rigidity() {
        assert!(matches!(
            decide_minimal_rigidity(&hinge(), &DecideOptions::default()),
            Err(AnalysisError::NotRigid)
        ));
    }

    #[test]
    fn cevian_minimality_agrees_with_oracle() {
        let r = decide_minimal_rigidity(&cevian(), &DecideOptions::cross_validated(5)).unwrap();
        for d in &r.deletions {
            assert_ne!(d.agreement, Agreement::Skipped(SkipReason::SeedsDisagree));
        }
        // deleting the cevian isolates its interior point
        assert_eq!(r.deletions[3].agreement, Agreement::Skipped(SkipReason::Disconnected));
        assert!(!r.deletions[3].is_rigid());
        // the remaining triangle of three-point rods, without that point
        let bare = IncidenceGeometry::new(6, vec![vec![0, 2, 3], vec![0, 1, 4], vec![1, 2, 5]]).unwrap();
        let v = decide_rod_rigidity(&bare, &DecideOptions::cross_validated(6)).unwrap();
        assert_eq!(v.agreement, Agreement::Agree);
    }

    #[test]
    fn body_joint_counts() {
        let rod = IncidenceGeometry::new(2, vec![vec![0, 1]]).unwrap();
        assert!(check_body_joint_counts(&rod).unwrap());
        let triple = IncidenceGeometry::new(2, vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        assert!(!check_body_joint_counts(&triple).unwrap());
        assert!(!check_body_joint_counts(&cevian()).unwrap());
        assert!(check_body_joint_counts(&triangle()).unwrap());
        let many = IncidenceGeometry::new(2, vec![vec![0, 1]; 21]).unwrap();
        assert!(matches!(
            check_body_joint_counts(&many),
            Err(AnalysisError::BudgetExceeded { lines: 21, budget: 20 })
        ));
    }

    #[test]
    fn report_json_shape() {
        let v = decide_rod_rigidity(&cevian(), &DecideOptions::default()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&v.report(None).to_json()).unwrap();
        assert_eq!(json["classification"], "rigid-redundant");
        assert_eq!(json["remaining_pebbles"], 3);
        assert_eq!(json["accepted_edges"], 19);
        assert_eq!(json["agreement"], "skipped");
        assert_eq!(json["skip_reason"], "not-requested");
        assert!(json.get("removable_rods").is_none());
    }

    #[test]
    fn field_names_round_trip() {
        for f in [Field::P61, Field::P61Alt, Field::Rational] {
            assert_eq!(f.as_str().parse::<Field>().unwrap(), f);
        }
        assert!("gf2".parse::<Field>().is_err());
    }
}
