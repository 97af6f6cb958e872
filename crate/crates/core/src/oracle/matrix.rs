use std::fmt::Write as _;

use super::field::Scalar;
use super::realization::LinearRealization;
use crate::geometry::{Incidence, IncidenceGeometry};

/// The concurrence geometry matrix `M(S, rho)`.
///
/// One row per incidence in [`IncidenceGeometry::incidences`] order. Columns
/// are the intercepts `h_0..h_{|L|-1}` followed by `x_0, y_0, x_1, y_1, ...`.
/// Row `(p, l)` holds `1` at `h_l`, `f_l` at `x_p` and `1` at `y_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcurrenceMatrix<F> {
    rows: Vec<Vec<F>>,
    row_incidences: Vec<Incidence>,
    num_lines: usize,
    num_points: usize,
}

impl<F: Scalar> ConcurrenceMatrix<F> {
    pub fn new(s: &IncidenceGeometry, rho: &LinearRealization<F>) -> Self {
        let num_lines = s.num_lines();
        let cols = num_lines + 2 * s.num_points();
        let rows = s
            .incidences()
            .iter()
            .map(|&(p, l)| {
                let mut row = vec![F::zero(); cols];
                row[l] = F::one();
                row[num_lines + 2 * p] = rho.slopes[l].clone();
                row[num_lines + 2 * p + 1] = F::one();
                row
            })
            .collect();
        Self {
            rows,
            row_incidences: s.incidences().to_vec(),
            num_lines,
            num_points: s.num_points(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.num_lines + 2 * self.num_points
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn row_incidences(&self) -> &[Incidence] {
        &self.row_incidences
    }

    /// `|L| + 2|P| - 3`, the largest possible rank once two points differ.
    pub fn max_rank(&self) -> usize {
        self.num_cols().saturating_sub(3)
    }

    pub fn rank(&self) -> usize {
        F::rank(self.rows.clone())
    }

    /// Rank of the rows with the given indices.
    pub fn rank_of_rows(&self, rows: &[usize]) -> usize {
        F::rank(rows.iter().map(|&r| self.rows[r].clone()).collect())
    }

    /// `M * v`.
    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    /// The two translations and the dilation of `rho`, as column vectors.
    pub fn trivial_redrawings(&self, rho: &LinearRealization<F>) -> [Vec<F>; 3] {
        let cols = self.num_cols();
        let (l, n) = (self.num_lines, self.num_points);
        let mut tx = vec![F::zero(); cols];
        let mut ty = vec![F::zero(); cols];
        let mut dil = vec![F::zero(); cols];
        for i in 0..l {
            tx[i] = rho.slopes[i].neg();
            ty[i] = F::one().neg();
            dil[i] = rho.intercepts[i].clone();
        }
        for j in 0..n {
            tx[l + 2 * j] = F::one();
            ty[l + 2 * j + 1] = F::one();
            dil[l + 2 * j] = rho.coords[j].0.clone();
            dil[l + 2 * j + 1] = rho.coords[j].1.clone();
        }
        [tx, ty, dil]
    }

    /// Exact entries as CSV; numbers print as `n` or `n/d`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point,line");
        for l in 0..self.num_lines {
            let _ = write!(out, ",h{l}");
        }
        for p in 0..self.num_points {
            let _ = write!(out, ",x{p},y{p}");
        }
        out.push('\n');
        for (row, &(p, l)) in self.rows.iter().zip(&self.row_incidences) {
            let _ = write!(out, "{p},{l}");
            for x in row {
                let (n, d) = x.to_pair();
                if d == "1" {
                    let _ = write!(out, ",{n}");
                } else {
                    let _ = write!(out, ",{n}/{d}");
                }
            }
            out.push('\n');
        }
        out
    }
}
