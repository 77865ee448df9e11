//! Brute-force exact solver for tiny instances: enumerate every assignment
//! of points to the given centers, keep those within the cost budget, and
//! take the exact optimum of the requested fairness objective. Test ground
//! truth only.

use crate::model::{
    clustering_cost, compute_violations, objective_value, AssignmentOf, InstanceOf,
    ObjectiveKind,
};
use crate::scalar::Real;
use crate::{Error, Result};

/// Enumeration guard: refuse instances with more than this many assignments.
const MAX_ENUMERATION: u64 = 10_000_000;

/// Exact optimum over all integral assignments of cost at most the budget.
#[derive(Debug, Clone)]
pub struct OracleResultOf<F> {
    pub objective: ObjectiveKind,
    pub best_value: F,
    pub best_deltas: Vec<F>,
    pub best_assignment: AssignmentOf<F>,
    /// Number of assignments examined (k^n).
    pub enumerated: u64,
}

/// Leximin order: compare violation vectors sorted descending,
/// lexicographically. Smaller is fairer.
pub fn leximin_less<F: Real>(a: &[F], b: &[F]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    b.sort_by(|x, y| y.partial_cmp(x).unwrap());
    for (x, y) in a.iter().zip(&b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Enumerate every function from points to centers, filter by cost, and
/// return the exact optimum for the requested objective.
pub fn brute_force<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    objective: ObjectiveKind,
) -> Result<OracleResultOf<F>> {
    if centers.is_empty() {
        return Err(Error::Structural("center set is empty".into()));
    }
    let n = instance.n();
    let k = centers.len();
    let total = (k as u64).checked_pow(n as u32).filter(|&t| t <= MAX_ENUMERATION);
    let Some(total) = total else {
        return Err(Error::GuardExceeded(format!(
            "{k}^{n} assignments exceed the enumeration guard of {MAX_ENUMERATION}"
        )));
    };

    let tol = F::of(1e-9);
    let mut labels = vec![0usize; n];
    let mut best: Option<(Vec<F>, AssignmentOf<F>)> = None;
    loop {
        let assignment = AssignmentOf::from_labels(centers.to_vec(), &labels, n)?;
        let cost = clustering_cost(&assignment, instance)?;
        if cost <= budget + tol * budget.abs().max(F::one()) {
            let deltas = compute_violations(&assignment, instance)?.delta;
            let better = match &best {
                None => true,
                Some((cur, _)) => match objective {
                    ObjectiveKind::Utilitarian => {
                        deltas.iter().copied().sum::<F>() < cur.iter().copied().sum::<F>()
                    }
                    ObjectiveKind::Egalitarian => {
                        deltas.iter().copied().fold(F::zero(), F::max)
                            < cur.iter().copied().fold(F::zero(), F::max)
                    }
                    ObjectiveKind::Leximin => leximin_less(&deltas, cur),
                },
            };
            if better {
                best = Some((deltas, assignment));
            }
        }
        // next assignment in base-k counting order
        let mut pos = 0;
        while pos < n {
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }

    let (best_deltas, best_assignment) = best.ok_or(Error::BudgetInfeasible {
        budget: budget.as_f64(),
    })?;
    let best_value = objective_value(
        &crate::model::ViolationVectorOf::new(best_deltas.clone()),
        objective,
    );
    Ok(OracleResultOf {
        objective,
        best_value,
        best_deltas,
        best_assignment,
        enumerated: total,
    })
}
