//! Sharp independence of incidence subsets and regularity of realizations.
//!
//! A subset `I'` of incidences is sharply independent when every `J` inside
//! it satisfies `|J| <= |M| + 2|Q| - 3` over its support `Q x M`. Subsets
//! through a single point are exempt: their rows are always independent, and
//! the bound would otherwise reject every lone incidence.

use std::collections::BTreeMap;

use super::field::Scalar;
use super::matrix::ConcurrenceMatrix;
use super::realization::LinearRealization;
use super::OracleError;
use crate::geometry::{Incidence, IncidenceGeometry};

/// Default size limit for enumerations over incidence subsets.
pub const SUBSET_BUDGET: usize = 16;
/// Default size limit for enumerations over line subsets.
pub const LINE_BUDGET: usize = 24;

/// Incidences relabelled with local point and line indices.
struct Local {
    points: Vec<usize>,
    lines: Vec<usize>,
}

fn localize(subset: &[Incidence]) -> Local {
    let mut pmap = BTreeMap::new();
    let mut lmap = BTreeMap::new();
    let mut points = Vec::with_capacity(subset.len());
    let mut lines = Vec::with_capacity(subset.len());
    for &(p, l) in subset {
        let np = pmap.len();
        let nl = lmap.len();
        points.push(*pmap.entry(p).or_insert(np));
        lines.push(*lmap.entry(l).or_insert(nl));
    }
    Local { points, lines }
}

fn check_subset(s: &IncidenceGeometry, subset: &[Incidence], budget: usize) -> Result<(), OracleError> {
    if let Some(&(p, l)) = subset.iter().find(|&&(p, l)| !s.is_incident(p, l)) {
        return Err(OracleError::UnknownIncidence { point: p, line: l });
    }
    if subset.len() > budget {
        return Err(OracleError::BudgetExceeded {
            size: subset.len(),
            budget,
        });
    }
    Ok(())
}

/// Whether the incidences selected by `mask` satisfy the count over their support.
fn count_holds(local: &Local, mask: u64) -> bool {
    let mut pts = 0u64;
    let mut lns = 0u64;
    let mut j = 0i64;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        pts |= 1 << local.points[i];
        lns |= 1 << local.lines[i];
        j += 1;
        m &= m - 1;
    }
    pts.count_ones() < 2 || j <= lns.count_ones() as i64 + 2 * pts.count_ones() as i64 - 3
}

/// Exhaustive check over all `2^|I'|` subsets. Errors if `|I'| > budget`.
pub fn is_sharply_independent(
    s: &IncidenceGeometry,
    subset: &[Incidence],
    budget: usize,
) -> Result<bool, OracleError> {
    check_subset(s, subset, budget.min(63))?;
    let local = localize(subset);
    Ok((1u64..1 << subset.len()).all(|mask| count_holds(&local, mask)))
}

/// Exhaustive check over all line subsets `M` of the support.
///
/// For fixed `M` the worst `J` takes every incidence between `M` and a point
/// set `Q`; a point on `d` lines of `M` adds `d - 2` to `|J| - 2|Q|`, so the
/// best `Q` is every point with `d >= 2`, topped up to two points with the
/// best remaining ones. A smaller support only tightens the bound, so checking
/// these maximal `J` decides every subset. Errors if the support has more than
/// `line_budget` lines.
pub fn is_sharply_independent_by_supports(
    s: &IncidenceGeometry,
    subset: &[Incidence],
    line_budget: usize,
) -> Result<bool, OracleError> {
    check_subset(s, subset, usize::MAX)?;
    let local = localize(subset);
    let num_lines = local.lines.iter().max().map_or(0, |m| m + 1);
    if num_lines > line_budget.min(63) {
        return Err(OracleError::BudgetExceeded {
            size: num_lines,
            budget: line_budget,
        });
    }
    let num_points = local.points.iter().max().map_or(0, |m| m + 1);
    // bitmask of local lines through each local point
    let mut through = vec![0u64; num_points];
    for (&p, &l) in local.points.iter().zip(&local.lines) {
        through[p] |= 1 << l;
    }
    let mut gains = Vec::with_capacity(num_points);
    for lines in 1u64..1 << num_lines {
        gains.clear();
        gains.extend(
            through
                .iter()
                .map(|t| (t & lines).count_ones() as i64)
                .filter(|&d| d > 0)
                .map(|d| d - 2),
        );
        if gains.len() < 2 {
            continue;
        }
        gains.sort_unstable_by(|a, b| b.cmp(a));
        let excess = gains[0] + gains[1] + gains[2..].iter().map(|&g| g.max(0)).sum::<i64>();
        if excess > lines.count_ones() as i64 - 3 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Flags, per subset mask of `subset`, whether that subset is sharply independent.
fn sharply_independent_family(subset: &[Incidence]) -> Vec<bool> {
    let local = localize(subset);
    let n = subset.len();
    let mut family = vec![false; 1 << n];
    family[0] = true;
    for mask in 1usize..1 << n {
        let mut m = mask;
        let mut ok = true;
        while m != 0 && ok {
            let bit = m & m.wrapping_neg();
            ok = family[mask ^ bit];
            m ^= bit;
        }
        family[mask] = ok && count_holds(&local, mask as u64);
    }
    family
}

/// Whether the rows of every sharply independent subset of `I` are independent
/// in `M(S, rho)`. Only maximal sharply independent subsets are ranked, since
/// both properties pass to subsets. Errors if `|I| > budget`.
pub fn is_regular<F: Scalar>(
    s: &IncidenceGeometry,
    rho: &LinearRealization<F>,
    budget: usize,
) -> Result<bool, OracleError> {
    is_regular_on(s, rho, s.incidences(), budget)
}

/// [`is_regular`] restricted to the subsets of `subset`.
pub fn is_regular_on<F: Scalar>(
    s: &IncidenceGeometry,
    rho: &LinearRealization<F>,
    subset: &[Incidence],
    budget: usize,
) -> Result<bool, OracleError> {
    check_subset(s, subset, budget.min(30))?;
    rho.check(s)?;
    let family = sharply_independent_family(subset);
    let matrix = ConcurrenceMatrix::new(s, rho);
    let row_of: Vec<usize> = subset
        .iter()
        .map(|&(p, l)| s.incidence_index(p, l).expect("checked incident"))
        .collect();
    let n = subset.len();
    for mask in 0usize..1 << n {
        if !family[mask] {
            continue;
        }
        let maximal = (0..n).all(|i| mask >> i & 1 == 1 || !family[mask | 1 << i]);
        if !maximal {
            continue;
        }
        let rows: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| row_of[i]).collect();
        if matrix.rank_of_rows(&rows) != rows.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::field::Fp61;
    use crate::oracle::realization::sample_realization;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> IncidenceGeometry {
        IncidenceGeometry::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn one_line_is_sharply_independent() {
        let s = IncidenceGeometry::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(is_sharply_independent(&s, s.incidences(), SUBSET_BUDGET).unwrap());
        assert!(is_sharply_independent_by_supports(&s, s.incidences(), LINE_BUDGET).unwrap());
    }

    #[test]
    fn triple_line_through_two_points_is_not() {
        let s = IncidenceGeometry::new(2, vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        // |J| = 6 > 3 + 4 - 3
        assert!(!is_sharply_independent(&s, s.incidences(), SUBSET_BUDGET).unwrap());
        assert!(!is_sharply_independent_by_supports(&s, s.incidences(), LINE_BUDGET).unwrap());
    }

    #[test]
    fn budgets_and_membership() {
        let s = IncidenceGeometry::new(9, vec![(0..9).collect(), (0..9).collect()]).unwrap();
        assert_eq!(
            is_sharply_independent(&s, s.incidences(), SUBSET_BUDGET),
            Err(OracleError::BudgetExceeded { size: 18, budget: 16 })
        );
        assert!(matches!(
            is_sharply_independent(&triangle(), &[(2, 0)], SUBSET_BUDGET),
            Err(OracleError::UnknownIncidence { point: 2, line: 0 })
        ));
    }

    #[test]
    fn support_enumeration_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut verdicts = [0usize; 2];
        for _ in 0..400 {
            let n = rng.gen_range(2..6);
            let lines: Vec<Vec<usize>> = (0..rng.gen_range(1..6))
                .map(|_| {
                    let mut pts: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
                    while pts.len() < 2 {
                        pts = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
                    }
                    pts
                })
                .collect();
            let s = IncidenceGeometry::new(n, lines).unwrap();
            let sub: Vec<Incidence> = s.incidences().iter().copied().filter(|_| rng.gen_bool(0.8)).collect();
            if sub.len() > 14 {
                continue;
            }
            let brute = is_sharply_independent(&s, &sub, SUBSET_BUDGET).unwrap();
            assert_eq!(is_sharply_independent_by_supports(&s, &sub, LINE_BUDGET).unwrap(), brute, "{s:?} {sub:?}");
            verdicts[brute as usize] += 1;
        }
        assert!(verdicts[0] > 20 && verdicts[1] > 20, "{verdicts:?}");
    }

    #[test]
    fn family_is_down_closed_and_counts() {
        let s = triangle();
        let fam = sharply_independent_family(s.incidences());
        assert!(fam.iter().all(|&b| b), "the triangle's incidences are sharply independent");
        let s = IncidenceGeometry::new(2, vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        let fam = sharply_independent_family(s.incidences());
        assert!(!fam[(1 << 6) - 1]);
        // two full lines through two points: 4 <= 2 + 4 - 3 fails
        assert!(!fam[0b1111]);
        assert!(fam[0b0111]);
    }

    #[test]
    fn random_triangle_realizations_are_regular() {
        let s = triangle();
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho: LinearRealization<Fp61> = sample_realization(&s, &mut rng).unwrap();
            assert!(is_regular(&s, &rho, SUBSET_BUDGET).unwrap());
        }
    }

    #[test]
    fn parallel_trivial_realization_is_not_regular() {
        let s = triangle();
        let rho = LinearRealization::<BigRational>::trivial(&s);
        assert!(!is_regular(&s, &rho, SUBSET_BUDGET).unwrap());
    }

    #[test]
    fn single_incidence_is_always_regular() {
        let s = triangle();
        let rho = LinearRealization::<BigRational>::trivial(&s);
        for &inc in s.incidences() {
            assert!(is_regular_on(&s, &rho, &[inc], SUBSET_BUDGET).unwrap());
        }
    }
}
