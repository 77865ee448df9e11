//! Feasibility LP for a fixed violation vector, behind a solver-adapter
//! contract.
//!
//! For centers `S`, budget `U`, and fixed per-color violations Δ_h, the LP
//! asks for fractional weights `x_ij ∈ [0,1]` with
//!
//! * `Σ_ij d^p(i,j) x_ij ≤ U^p` (for p ∈ {1,2}; for p = ∞ pairs with
//!   `d(i,j) > U` are eliminated instead),
//! * `Σ_i x_ij = 1` for every point j,
//! * `(β_h−Δ_h)·Σ_j x_ij ≤ Σ_{j∈P^h} x_ij ≤ (α_h+Δ_h)·Σ_j x_ij` per center
//!   and color, written homogeneously so empty clusters satisfy them.
//!
//! The Δ_h ∈ [0,1] box is omitted: violations are fixed inputs here.

pub mod simplex;

use crate::model::{AssignmentOf, InstanceOf, Norm, ViolationVectorOf};
use crate::scalar::Real;
use crate::{Error, Result};

pub use simplex::{BuiltinSimplex, LpBackend, LpProblem, LpRow, LpStatus, RowKind};

/// A sparse constraint row over LP variables.
#[derive(Debug, Clone)]
pub struct SparseRow<F> {
    pub cols: Vec<u32>,
    pub coefs: Vec<F>,
    pub rhs: F,
}

/// Label of a proportion row: which center, color, and side it bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub struct ProportionRow<F> {
    pub center: usize,
    pub color: usize,
    pub side: PropSide,
    pub row: SparseRow<F>,
}

/// The feasibility LP of a (instance, centers, budget, violations) tuple.
///
/// Variables are the surviving (center, point) pairs: all `|S|·n` of them for
/// p ∈ {1,2}, only those with `d(i,j) ≤ U` for p = ∞.
#[derive(Debug, Clone)]
pub struct FeasibilityLpOf<F> {
    centers: Vec<usize>,
    num_points: usize,
    p: Norm,
    budget: F,
    vars: Vec<(u32, u32)>, // (center position, point)
    dist: Vec<F>,          // distance per variable
    cost_row: Option<SparseRow<F>>,
    assignment_rows: Vec<SparseRow<F>>,
    proportion_rows: Vec<ProportionRow<F>>,
    crash: Vec<F>,
}

impl<F: Real> FeasibilityLpOf<F> {
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn budget(&self) -> F {
        self.budget
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[(u32, u32)] {
        &self.vars
    }

    pub fn cost_row(&self) -> Option<&SparseRow<F>> {
        self.cost_row.as_ref()
    }

    pub fn assignment_rows(&self) -> &[SparseRow<F>] {
        &self.assignment_rows
    }

    pub fn proportion_rows(&self) -> &[ProportionRow<F>] {
        &self.proportion_rows
    }

    /// Flatten into the generic solver form (cost row first when present,
    /// then assignment equalities, then proportion rows).
    pub fn to_problem(&self) -> LpProblem<F> {
        let mut rows = Vec::with_capacity(
            self.assignment_rows.len() + self.proportion_rows.len() + 1,
        );
        if let Some(c) = &self.cost_row {
            rows.push(LpRow {
                cols: c.cols.clone(),
                coefs: c.coefs.clone(),
                kind: RowKind::Le,
                rhs: c.rhs,
            });
        }
        for a in &self.assignment_rows {
            rows.push(LpRow {
                cols: a.cols.clone(),
                coefs: a.coefs.clone(),
                kind: RowKind::Eq,
                rhs: a.rhs,
            });
        }
        for p in &self.proportion_rows {
            rows.push(LpRow {
                cols: p.row.cols.clone(),
                coefs: p.row.coefs.clone(),
                kind: RowKind::Le,
                rhs: p.row.rhs,
            });
        }
        LpProblem { num_vars: self.vars.len(), rows }
    }

    /// Largest row violation of a candidate weight matrix (k × n row-major),
    /// in absolute terms. Useful for validating hand-constructed solutions.
    pub fn max_row_violation(&self, weights: &[F]) -> F {
        let n = self.num_points;
        let x = |v: usize| {
            let (c, j) = self.vars[v];
            weights[c as usize * n + j as usize]
        };
        let mut worst = F::zero();
        if let Some(cr) = &self.cost_row {
            let lhs: F = cr.cols.iter().zip(&cr.coefs).map(|(&v, &c)| c * x(v as usize)).sum();
            worst = worst.max(lhs - cr.rhs);
        }
        for a in &self.assignment_rows {
            let lhs: F = a.cols.iter().zip(&a.coefs).map(|(&v, &c)| c * x(v as usize)).sum();
            worst = worst.max((lhs - a.rhs).abs());
        }
        for p in &self.proportion_rows {
            let lhs: F =
                p.row.cols.iter().zip(&p.row.coefs).map(|(&v, &c)| c * x(v as usize)).sum();
            worst = worst.max(lhs - p.row.rhs);
        }
        worst
    }

    /// Serialize in the textual LP file format (debugging aid).
    pub fn write_lp_format(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let name = |v: u32| {
            let (c, j) = self.vars[v as usize];
            format!("x_{c}_{j}")
        };
        let term = |row: &SparseRow<F>| {
            let mut s = String::new();
            for (idx, (&v, &c)) in row.cols.iter().zip(&row.coefs).enumerate() {
                let c64 = c.as_f64();
                if idx == 0 {
                    let _ = write!(s, "{} {}", c64, name(v));
                } else if c64 < 0.0 {
                    let _ = write!(s, " - {} {}", -c64, name(v));
                } else {
                    let _ = write!(s, " + {} {}", c64, name(v));
                }
            }
            s
        };
        out.push_str("Minimize\n obj: 0\nSubject To\n");
        if let Some(c) = &self.cost_row {
            let _ = writeln!(out, " cost: {} <= {}", term(c), c.rhs.as_f64());
        }
        for (j, a) in self.assignment_rows.iter().enumerate() {
            let _ = writeln!(out, " asg_{j}: {} = {}", term(a), a.rhs.as_f64());
        }
        for p in &self.proportion_rows {
            let tag = match p.side {
                PropSide::Lower => "lo",
                PropSide::Upper => "hi",
            };
            let _ = writeln!(
                out,
                " {}_{}_{}: {} <= {}",
                tag,
                p.center,
                p.color,
                term(&p.row),
                p.row.rhs.as_f64()
            );
        }
        out.push_str("Bounds\n");
        for v in 0..self.vars.len() as u32 {
            let _ = writeln!(out, " 0 <= {} <= 1", name(v));
        }
        out.push_str("End\n");
        out
    }
}

/// Build the feasibility LP for fixed violations. `budget` must be positive;
/// `deltas` must carry one entry in `[0,1]` per color.
pub fn build_feasibility_lp<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    deltas: &ViolationVectorOf<F>,
) -> Result<FeasibilityLpOf<F>> {
    if centers.is_empty() {
        return Err(Error::Structural("center set is empty".into()));
    }
    if let Some(&c) = centers.iter().find(|&&c| c >= instance.n()) {
        return Err(Error::Structural(format!("center index {c} out of range")));
    }
    if budget <= F::zero() {
        return Err(Error::Structural(format!("budget must be positive, got {budget}")));
    }
    if deltas.delta.len() != instance.num_colors() {
        return Err(Error::Structural(format!(
            "{} violation entries for {} colors",
            deltas.delta.len(),
            instance.num_colors()
        )));
    }
    if deltas.delta.iter().any(|&d| d < F::zero() || d > F::one()) {
        return Err(Error::Structural("violation entries must lie in [0,1]".into()));
    }

    let n = instance.n();
    let k = centers.len();
    let p = instance.p();
    let keep = |d: F| match p {
        // Variable elimination replaces the cost row for the k-center
        // objective; the comparison forgives only float noise.
        Norm::Infinity => d <= budget * F::of(1.0 + 1e-12) + F::of(1e-12),
        _ => true,
    };

    let mut vars = Vec::new();
    let mut dist = Vec::new();
    let mut var_of = vec![u32::MAX; k * n];
    for (c, &center) in centers.iter().enumerate() {
        for j in 0..n {
            let d = instance.distance(center, j);
            if keep(d) {
                var_of[c * n + j] = vars.len() as u32;
                vars.push((c as u32, j as u32));
                dist.push(d);
            }
        }
    }

    let cost_row = match p {
        Norm::Infinity => None,
        _ => Some(SparseRow {
            cols: (0..vars.len() as u32).collect(),
            coefs: dist.iter().map(|&d| p.power(d)).collect(),
            rhs: p.power(budget),
        }),
    };

    let mut assignment_rows = Vec::with_capacity(n);
    for j in 0..n {
        let cols: Vec<u32> =
            (0..k).map(|c| var_of[c * n + j]).filter(|&v| v != u32::MAX).collect();
        let coefs = vec![F::one(); cols.len()];
        assignment_rows.push(SparseRow { cols, coefs, rhs: F::one() });
    }

    let mut proportion_rows = Vec::with_capacity(2 * k * instance.num_colors());
    for c in 0..k {
        let arc_vars: Vec<u32> =
            (0..n).map(|j| var_of[c * n + j]).filter(|&v| v != u32::MAX).collect();
        for h in 0..instance.num_colors() {
            let b = instance.bounds(h);
            let lo_coef = b.beta - deltas.delta[h];
            let hi_coef = b.alpha + deltas.delta[h];
            let mut lo = SparseRow {
                cols: arc_vars.clone(),
                coefs: Vec::with_capacity(arc_vars.len()),
                rhs: F::zero(),
            };
            let mut hi = SparseRow {
                cols: arc_vars.clone(),
                coefs: Vec::with_capacity(arc_vars.len()),
                rhs: F::zero(),
            };
            for &v in &arc_vars {
                let j = vars[v as usize].1 as usize;
                let same = instance.color(j) == h;
                lo.coefs.push(if same { lo_coef - F::one() } else { lo_coef });
                hi.coefs.push(if same { F::one() - hi_coef } else { -hi_coef });
            }
            proportion_rows.push(ProportionRow { center: c, color: h, side: PropSide::Lower, row: lo });
            proportion_rows.push(ProportionRow { center: c, color: h, side: PropSide::Upper, row: hi });
        }
    }

    // Crash hint: each point's nearest surviving center.
    let mut crash = vec![F::zero(); vars.len()];
    for j in 0..n {
        let mut best: Option<(u32, F)> = None;
        for c in 0..k {
            let v = var_of[c * n + j];
            if v == u32::MAX {
                continue;
            }
            let d = dist[v as usize];
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((v, d));
            }
        }
        if let Some((v, _)) = best {
            crash[v as usize] = F::one();
        }
    }

    Ok(FeasibilityLpOf {
        centers: centers.to_vec(),
        num_points: n,
        p,
        budget,
        vars,
        dist,
        cost_row,
        assignment_rows,
        proportion_rows,
        crash,
    })
}

/// Outcome of a feasibility check. When feasible, the witness is normalized
/// so every point's weights sum to exactly 1, and `lp_cost` reports the
/// achieved `Σ d^p x` (the maximum used radius for p = ∞).
#[derive(Debug, Clone)]
pub enum LpOutcomeOf<F> {
    Feasible { solution: AssignmentOf<F>, lp_cost: F },
    Infeasible,
}

impl<F> LpOutcomeOf<F> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcomeOf::Feasible { .. })
    }
}

/// Check feasibility with the built-in solver.
pub fn check_feasibility<F: Real>(lp: &FeasibilityLpOf<F>) -> Result<LpOutcomeOf<F>> {
    check_feasibility_with(lp, &BuiltinSimplex)
}

/// Check feasibility through a pluggable backend.
pub fn check_feasibility_with<F: Real>(
    lp: &FeasibilityLpOf<F>,
    backend: &dyn LpBackend<F>,
) -> Result<LpOutcomeOf<F>> {
    // A point whose columns were all eliminated (p = ∞ pruning) cannot be
    // assigned at all.
    if lp.assignment_rows.iter().any(|r| r.cols.is_empty()) {
        return Ok(LpOutcomeOf::Infeasible);
    }
    let problem = lp.to_problem();
    match backend.solve(&problem, Some(&lp.crash))? {
        LpStatus::Infeasible => Ok(LpOutcomeOf::Infeasible),
        LpStatus::Feasible(x) => {
            let n = lp.num_points;
            let k = lp.centers.len();
            let mut weights = vec![F::zero(); k * n];
            for (v, &(c, j)) in lp.vars.iter().enumerate() {
                weights[c as usize * n + j as usize] = x[v];
            }
            // Normalize columns to exactly 1.
            for j in 0..n {
                let sum: F = (0..k).map(|c| weights[c * n + j]).sum();
                if sum <= F::of(0.5) {
                    return Err(Error::SolverFailure(format!(
                        "witness column {j} sums to {sum}"
                    )));
                }
                for c in 0..k {
                    weights[c * n + j] = weights[c * n + j] / sum;
                }
            }
            let lp_cost = match lp.p {
                Norm::Infinity => lp
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|&(v, _)| x[v] > F::of(1e-9))
                    .map(|(v, _)| lp.dist[v])
                    .fold(F::zero(), F::max),
                _ => lp
                    .vars
                    .iter()
                    .enumerate()
                    .map(|(v, &(c, j))| {
                        lp.p.power(lp.dist[v]) * weights[c as usize * n + j as usize]
                    })
                    .sum(),
            };
            let solution = AssignmentOf::fractional(lp.centers.clone(), weights, n)?;
            Ok(LpOutcomeOf::Feasible { solution, lp_cost })
        }
    }
}

/// The two feasible LP solutions from the non-convexity construction, whose
/// midpoint violates the lower proportion row of the red color in cluster 2
/// by exactly 1/8.
#[derive(Debug)]
pub struct NonconvexityWitness<F> {
    pub instance: InstanceOf<F>,
    pub centers: Vec<usize>,
    pub budget: F,
    pub solution_a: AssignmentOf<F>,
    pub deltas_a: ViolationVectorOf<F>,
    pub solution_b: AssignmentOf<F>,
    pub deltas_b: ViolationVectorOf<F>,
    pub midpoint: AssignmentOf<F>,
    pub midpoint_deltas: ViolationVectorOf<F>,
    /// LHS − RHS of the violated lower-proportion constraint at the midpoint.
    pub lower_row_excess: F,
}

/// Self-contained counterexample showing the constraint set is not convex:
/// two feasible solutions at n = 24 (two colors, k = 2) whose midpoint
/// violates the red lower-proportion row in cluster 2.
pub fn nonconvexity_counterexample<F: Real>() -> NonconvexityWitness<F> {
    use crate::model::Bounds;

    let n = 24usize;
    let half = n / 2;
    let points: Vec<Vec<F>> = (0..n).map(|i| vec![F::from_usize(i).unwrap()]).collect();
    let colors: Vec<usize> = (0..n).map(|i| usize::from(i >= half)).collect();
    // beta = 1/2 for both colors, alpha = 2/3.
    let bounds = vec![
        Bounds::new(F::of(0.5), F::of(2.0 / 3.0)).unwrap(),
        Bounds::new(F::of(0.5), F::of(2.0 / 3.0)).unwrap(),
    ];
    let instance = InstanceOf::euclidean(points, colors, bounds, Norm::One).unwrap();
    let centers = vec![0usize, n - 1];
    let budget = F::of(1e6); // large enough that the cost row never binds

    let alpha = F::of(2.0 / 3.0);
    let w = |cluster1_red: F, cluster1_blue: F| -> Vec<F> {
        let mut weights = vec![F::zero(); 2 * n];
        for j in 0..n {
            let share = if j < half { cluster1_red } else { cluster1_blue };
            weights[j] = share;
            weights[n + j] = F::one() - share;
        }
        weights
    };
    // Solution 1: both colors split 2/3 : 1/3 across the clusters.
    let sol_a = AssignmentOf::fractional(centers.clone(), w(alpha, alpha), n).unwrap();
    let deltas_a = ViolationVectorOf::new(vec![F::zero(), F::one()]);
    // Solution 2: all reds in cluster 1; blues mostly in cluster 2.
    let blue_share = F::one() - (alpha + F::one() / F::from_usize(half).unwrap());
    let sol_b = AssignmentOf::fractional(centers.clone(), w(F::one(), blue_share), n).unwrap();
    let deltas_b = ViolationVectorOf::new(vec![F::of(0.5), F::one()]);

    let lp_a = build_feasibility_lp(&instance, &centers, budget, &deltas_a).unwrap();
    let lp_b = build_feasibility_lp(&instance, &centers, budget, &deltas_b).unwrap();
    assert!(lp_a.max_row_violation(sol_a.weights()) <= F::of(1e-9));
    assert!(lp_b.max_row_violation(sol_b.weights()) <= F::of(1e-9));

    let mid_weights: Vec<F> = sol_a
        .weights()
        .iter()
        .zip(sol_b.weights())
        .map(|(&a, &b)| (a + b) * F::of(0.5))
        .collect();
    let midpoint = AssignmentOf::fractional(centers.clone(), mid_weights, n).unwrap();
    let midpoint_deltas = ViolationVectorOf::new(vec![F::of(0.25), F::one()]);

    // Lower proportion row of red (color 0) in cluster 2 (center position 1):
    // (beta - delta) * |C_2| - |C_2^red|.
    let beta_minus_delta = F::of(0.5) - F::of(0.25);
    let mut cluster2_mass = F::zero();
    let mut cluster2_red = F::zero();
    for j in 0..n {
        let wgt = midpoint.weight(1, j);
        cluster2_mass = cluster2_mass + wgt;
        if j < half {
            cluster2_red = cluster2_red + wgt;
        }
    }
    let lower_row_excess = beta_minus_delta * cluster2_mass - cluster2_red;
    assert!(
        lower_row_excess > F::zero(),
        "midpoint must violate the lower proportion row"
    );
    // Assignment and cost rows still hold at the midpoint.
    let lp_mid = build_feasibility_lp(&instance, &centers, budget, &midpoint_deltas).unwrap();
    let asg_ok = lp_mid
        .assignment_rows()
        .iter()
        .all(|r| {
            let lhs: F = r
                .cols
                .iter()
                .zip(&r.coefs)
                .map(|(&v, &c)| {
                    let (cc, j) = lp_mid.vars[v as usize];
                    c * midpoint.weight(cc as usize, j as usize)
                })
                .sum();
            (lhs - F::one()).abs() <= F::of(1e-9)
        });
    assert!(asg_ok);

    NonconvexityWitness {
        instance,
        centers,
        budget,
        solution_a: sol_a,
        deltas_a,
        solution_b: sol_b,
        deltas_b,
        midpoint,
        midpoint_deltas,
        lower_row_excess,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bounds, InstanceOf, ViolationVectorOf};

    type Inst = InstanceOf<f64>;

    fn half_bounds() -> Vec<Bounds<f64>> {
        vec![Bounds::new(0.5, 0.5).unwrap(); 2]
    }

    /// Appendix-style step instance: two reds at 0 and 1, two blues at 100
    /// and 101, centers at 0 and 100.
    fn step_instance(p: Norm) -> Inst {
        Inst::euclidean(
            vec![vec![0.0], vec![1.0], vec![100.0], vec![101.0]],
            vec![0, 0, 1, 1],
            half_bounds(),
            p,
        )
        .unwrap()
    }

    #[test]
    fn row_counts_match_formulation() {
        // n=4, k=2, |H|=2, p=1: 8 variables, 1 cost row, 4 assignment rows,
        // 8 proportion rows.
        let inst = step_instance(Norm::One);
        let lp = build_feasibility_lp(
            &inst,
            &[0, 2],
            1000.0,
            &ViolationVectorOf::uniform(0.5, 2),
        )
        .unwrap();
        assert_eq!(lp.num_vars(), 8);
        assert!(lp.cost_row().is_some());
        assert_eq!(lp.assignment_rows().len(), 4);
        assert_eq!(lp.proportion_rows().len(), 8);
    }

    #[test]
    fn kcenter_prunes_far_pairs() {
        // U below every cross distance: each point keeps only its own column
        // if it is a center.
        let inst = step_instance(Norm::Infinity);
        let lp =
            build_feasibility_lp(&inst, &[0, 2], 0.5, &ViolationVectorOf::uniform(1.0, 2)).unwrap();
        assert_eq!(lp.num_vars(), 2);
        assert!(lp.cost_row().is_none());
        // Non-center points lost all columns: infeasible.
        assert!(!check_feasibility(&lp).unwrap().is_feasible());
    }

    #[test]
    fn full_violation_rows_are_vacuous() {
        let inst = step_instance(Norm::One);
        let lp = build_feasibility_lp(
            &inst,
            &[0, 2],
            1000.0,
            &ViolationVectorOf::uniform(1.0, 2),
        )
        .unwrap();
        for pr in lp.proportion_rows() {
            match pr.side {
                // beta - 1 <= 0 and alpha + 1 >= 1 make every coefficient of
                // the in-color variables non-positive.
                PropSide::Lower => assert!(pr.row.coefs.iter().all(|&c| c <= 0.0)),
                PropSide::Upper => assert!(pr.row.coefs.iter().all(|&c| c <= 0.0)),
            }
        }
        assert!(check_feasibility(&lp).unwrap().is_feasible());
    }

    #[test]
    fn nearest_assignment_is_witness_at_full_violation() {
        let inst = step_instance(Norm::Two);
        // nearest assignment cost: sqrt(0 + 1 + 0 + 1) = sqrt(2)
        let lp = build_feasibility_lp(
            &inst,
            &[0, 2],
            2.0_f64.sqrt() + 1e-9,
            &ViolationVectorOf::uniform(1.0, 2),
        )
        .unwrap();
        let outcome = check_feasibility(&lp).unwrap();
        match outcome {
            LpOutcomeOf::Feasible { lp_cost, .. } => {
                assert!(lp_cost <= 2.0 + 1e-6, "lp_cost {lp_cost}");
            }
            LpOutcomeOf::Infeasible => panic!("expected feasible"),
        }
    }

    #[test]
    fn step_instance_infeasible_below_r() {
        // U = 99 < R = 100 cannot reach violation 0.49 in either color.
        let inst = step_instance(Norm::Infinity);
        let lp =
            build_feasibility_lp(&inst, &[0, 2], 99.0, &ViolationVectorOf::uniform(0.49, 2))
                .unwrap();
        assert!(!check_feasibility(&lp).unwrap().is_feasible());
    }

    #[test]
    fn step_instance_feasible_at_r() {
        let inst = step_instance(Norm::Infinity);
        let lp =
            build_feasibility_lp(&inst, &[0, 2], 100.0, &ViolationVectorOf::uniform(0.0, 2))
                .unwrap();
        let outcome = check_feasibility(&lp).unwrap();
        match outcome {
            LpOutcomeOf::Feasible { solution, lp_cost } => {
                assert!(lp_cost <= 100.0 + 1e-9);
                let v = crate::model::compute_violations(&solution, &inst).unwrap();
                assert!(v.delta.iter().all(|&d| d <= 1e-7), "violations {:?}", v.delta);
            }
            LpOutcomeOf::Infeasible => panic!("expected feasible at U = R"),
        }
    }

    #[test]
    fn rescored_violations_within_input_levels() {
        let inst = step_instance(Norm::One);
        let deltas = ViolationVectorOf::uniform(0.3, 2);
        let lp = build_feasibility_lp(&inst, &[0, 2], 250.0, &deltas).unwrap();
        if let LpOutcomeOf::Feasible { solution, .. } = check_feasibility(&lp).unwrap() {
            let v = crate::model::compute_violations(&solution, &inst).unwrap();
            for (got, &want) in v.delta.iter().zip(&deltas.delta) {
                assert!(*got <= want + 1e-7);
            }
        } else {
            panic!("expected feasible");
        }
    }

    #[test]
    fn budget_must_be_positive() {
        let inst = step_instance(Norm::One);
        assert!(build_feasibility_lp(&inst, &[0], 0.0, &ViolationVectorOf::uniform(0.0, 2))
            .is_err());
    }

    #[test]
    fn nonconvexity_excess_is_one_eighth() {
        let w = nonconvexity_counterexample::<f64>();
        assert!((w.lower_row_excess - 0.125).abs() < 1e-12);
    }

    #[test]
    fn lp_export_names_rows() {
        let inst = step_instance(Norm::One);
        let lp = build_feasibility_lp(
            &inst,
            &[0, 2],
            1000.0,
            &ViolationVectorOf::uniform(0.25, 2),
        )
        .unwrap();
        let text = lp.write_lp_format();
        assert!(text.contains("cost:"));
        assert!(text.contains("asg_0:"));
        assert!(text.contains("lo_0_0:"));
        assert!(text.contains("hi_1_1:"));
        assert!(text.contains("x_0_0"));
        assert!(text.ends_with("End\n"));
    }
}
