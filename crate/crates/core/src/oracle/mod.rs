//! Exact algebraic ground truth for rod and string configurations.
//!
//! A string configuration realizing `S^C` is infinitesimally rigid exactly when
//! its concurrence matrix reaches rank `|L^C| + 2|P^C| - 3`: its infinitesimal
//! motions correspond to parallel redrawings, and the translations and the
//! dilation always account for three of those.

pub mod field;
pub mod independence;
pub mod matrix;
pub mod realization;

use thiserror::Error;

pub use field::{Fp61, Fp61Alt, Scalar, Zp};
pub use independence::{
    is_regular, is_regular_on, is_sharply_independent, is_sharply_independent_by_supports,
    LINE_BUDGET, SUBSET_BUDGET,
};
pub use matrix::ConcurrenceMatrix;
pub use realization::{random_rotation, realize_cone, rotation, sample_realization, LinearRealization};

use crate::cone::ConeIncidenceGeometry;
use crate::geometry::IncidenceGeometry;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no proper realization found after {attempts} attempts")]
    Infeasible { attempts: usize },
    #[error("realization is not proper (two points share coordinates)")]
    NotProper,
    #[error("line {line} would be vertical; retry with a rotation")]
    VerticalLine { line: usize },
    #[error("all points of line {line} coincide")]
    DegenerateLine { line: usize },
    #[error("point {point} is not on the line through the other points of line {line}")]
    NotCollinear { line: usize, point: usize },
    #[error("incidence (point {point}, line {line}) has a nonzero residual")]
    Residual { point: usize, line: usize },
    #[error("incidence (point {point}, line {line}) is not in the geometry")]
    UnknownIncidence { point: usize, line: usize },
    #[error("realization has {points} points and {lines} lines, geometry has {expected_points} and {expected_lines}")]
    ShapeMismatch {
        points: usize,
        lines: usize,
        expected_points: usize,
        expected_lines: usize,
    },
    #[error("enumeration over {size} elements exceeds the budget of {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("invalid realization file: {0}")]
    Json(String),
}

/// Rank of `M(S^C, rho)` and the rank needed for rigidity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub required: usize,
}

impl RankReport {
    pub fn is_rigid(&self) -> bool {
        self.rank == self.required
    }

    /// Parallel redrawings beyond translations and dilation.
    pub fn deficiency(&self) -> usize {
        self.required.saturating_sub(self.rank)
    }
}

/// Rank of the concurrence matrix of a proper realization against `|L| + 2|P| - 3`.
pub fn string_config_rank<F: Scalar>(
    geometry: &IncidenceGeometry,
    rho: &LinearRealization<F>,
) -> Result<RankReport, OracleError> {
    rho.check(geometry)?;
    if !rho.is_proper() {
        return Err(OracleError::NotProper);
    }
    let m = ConcurrenceMatrix::new(geometry, rho);
    Ok(RankReport {
        rank: m.rank(),
        required: m.max_rank(),
    })
}

/// Whether a proper string configuration realizing `S^C` is infinitesimally rigid.
pub fn is_string_config_rigid<F: Scalar>(
    cone: &ConeIncidenceGeometry,
    rho: &LinearRealization<F>,
) -> Result<bool, OracleError> {
    string_config_rank(&cone.geometry, rho).map(|r| r.is_rigid())
}
