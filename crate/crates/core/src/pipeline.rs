//! End-to-end solvers: fair assignment under a bounded cost (search + flow
//! rounding), fair clustering under a bounded cost (color-blind seeding in
//! front), and price-of-fairness budget sweeps.

use std::time::Instant;

use crate::colorblind::{
    gonzalez_kcenter, kmeans_pp_seed, local_search_kmedian, nearest_assignment, SeedResultOf,
};
use crate::model::{
    clustering_cost, compute_violations, min_cluster_size, objective_value, pof, AssignmentOf,
    InstanceOf, ObjectiveKind, ViolationVectorOf,
};
use crate::rounding::round_assignment;
use crate::scalar::Real;
use crate::search::{
    search_egalitarian, search_leximin, search_utilitarian, two_color_symmetric_search, Grid,
};
use crate::{Error, Result};

/// Which color-blind seeder anchors the center set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMethod {
    /// k-means++ with Lloyd refinement (p = 2).
    KMeansPp,
    /// Farthest-point greedy (any p; 2-approximation for k-center).
    Gonzalez { first: usize },
    /// Single-swap local search (p = 1).
    LocalSearchKMedian,
}

impl SeedMethod {
    pub fn run<F: Real>(
        &self,
        instance: &InstanceOf<F>,
        k: usize,
        rng_seed: u64,
    ) -> Result<SeedResultOf<F>> {
        match *self {
            SeedMethod::KMeansPp => kmeans_pp_seed(instance, k, rng_seed),
            SeedMethod::Gonzalez { first } => gonzalez_kcenter(instance, k, first),
            SeedMethod::LocalSearchKMedian => local_search_kmedian(instance, k, rng_seed),
        }
    }
}

/// Full record of one fair solve: the integral solution, its freshly
/// recomputed violations, cost against budget, POF when a color-blind
/// baseline is known, and observability counters.
#[derive(Debug, Clone)]
pub struct SolveReportOf<F> {
    pub centers: Vec<usize>,
    pub assignment: AssignmentOf<F>,
    pub deltas: ViolationVectorOf<F>,
    pub objective_kind: ObjectiveKind,
    pub objective_value: F,
    /// Pre-rounding value found by the LP search.
    pub search_value: F,
    pub cost: F,
    pub budget: F,
    pub pof: Option<F>,
    pub min_cluster: usize,
    pub lp_runs: usize,
    pub runtime_ms: u64,
}

/// Detect the symmetric two-color bound structure `α_h = (1+δ)r_h`,
/// `β_h = (1−δ)r_h` around the dataset proportions.
fn symmetric_slack<F: Real>(instance: &InstanceOf<F>) -> Option<(F, F, F)> {
    if instance.num_colors() != 2 {
        return None;
    }
    let tol = F::of(1e-9);
    let props = instance.proportions();
    let (r1, r2) = (props[0], props[1]);
    if r1 <= F::zero() || r2 <= F::zero() {
        return None;
    }
    let mut slack: Option<F> = None;
    for (h, &r) in [r1, r2].iter().enumerate() {
        let b = instance.bounds(h);
        let lambda = b.alpha - r;
        if lambda < -tol || (b.beta - (r - lambda)).abs() > tol {
            return None;
        }
        let delta = lambda / r;
        match slack {
            None => slack = Some(delta),
            Some(prev) if (prev - delta).abs() <= tol => {}
            _ => return None,
        }
    }
    slack.map(|d| (r1, r2, d))
}

/// Fair assignment under a bounded cost: search the violation grid for the
/// requested objective, round the accepting witness through the flow
/// network, and report the recomputed violations. The returned cost never
/// exceeds the budget.
pub fn solve_fabc<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    objective_kind: ObjectiveKind,
    grid: &Grid,
    rng_seed: u64,
) -> Result<SolveReportOf<F>> {
    let start = Instant::now();
    let (witness, search_value, lp_runs) = match objective_kind {
        ObjectiveKind::Utilitarian => {
            let result = match symmetric_slack(instance) {
                Some((r1, r2, delta)) => {
                    two_color_symmetric_search(instance, centers, budget, grid, r1, r2, delta)?
                }
                None => search_utilitarian(instance, centers, budget, grid)?,
            };
            (result.witness, result.objective, result.lp_runs)
        }
        ObjectiveKind::Egalitarian => {
            let result = search_egalitarian(instance, centers, budget, grid)?;
            (result.witness, result.objective, result.lp_runs)
        }
        ObjectiveKind::Leximin => {
            let l_est = min_cluster_size(&nearest_assignment(instance, centers)?)?;
            let result = search_leximin(instance, centers, budget, grid, l_est, rng_seed)?;
            let levels = result.levels(instance.num_colors());
            let value = objective_value(&levels, ObjectiveKind::Leximin);
            (result.witness, value, result.lp_runs)
        }
    };

    let assignment = round_assignment(&witness, instance)?;
    let deltas = compute_violations(&assignment, instance)?;
    let value = objective_value(&deltas, objective_kind);
    let cost = clustering_cost(&assignment, instance)?;
    if cost > budget * (F::one() + F::of(1e-9)) + F::of(1e-12) {
        return Err(Error::PropertyViolation(format!(
            "rounded cost {} exceeds budget {}",
            cost.as_f64(),
            budget.as_f64()
        )));
    }
    let min_cluster = min_cluster_size(&assignment)?;
    Ok(SolveReportOf {
        centers: centers.to_vec(),
        assignment,
        deltas,
        objective_kind,
        objective_value: value,
        search_value,
        cost,
        budget,
        pof: None,
        min_cluster,
        lp_runs,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Fair clustering under a bounded cost: seed centers color-blindly, then
/// solve the fair assignment stage. With `expand_budget` the assignment
/// budget becomes (2+α)·U where α is the seeder's declared ratio; without it
/// (the experimental protocol) U is passed through unchanged.
#[allow(clippy::too_many_arguments)]
pub fn solve_fcbc<F: Real>(
    instance: &InstanceOf<F>,
    k: usize,
    u: F,
    objective_kind: ObjectiveKind,
    grid: &Grid,
    seed_method: SeedMethod,
    rng_seed: u64,
    expand_budget: bool,
) -> Result<SolveReportOf<F>> {
    let seed = seed_method.run(instance, k, rng_seed)?;
    let budget = if expand_budget { (F::of(2.0) + seed.alpha) * u } else { u };
    let mut report = solve_fabc(instance, &seed.centers, budget, objective_kind, grid, rng_seed)?;
    report.pof = pof(report.cost, seed.cost).ok();
    Ok(report)
}

/// Price-of-fairness sweep: one color-blind solve, then one fair solve per
/// ratio at budget ρ·(color-blind cost). The first report is the color-blind
/// baseline itself.
pub fn pof_sweep<F: Real>(
    instance: &InstanceOf<F>,
    k: usize,
    objective_kind: ObjectiveKind,
    pof_levels: &[F],
    grid: &Grid,
    seed_method: SeedMethod,
    rng_seed: u64,
) -> Result<Vec<SolveReportOf<F>>> {
    if pof_levels.is_empty() {
        return Err(Error::Structural("pof_levels must be non-empty".into()));
    }
    if pof_levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Structural("pof_levels must be sorted ascending".into()));
    }
    if pof_levels[0] < F::one() {
        return Err(Error::Structural("pof_levels must be at least 1".into()));
    }

    let start = Instant::now();
    let seed = seed_method.run(instance, k, rng_seed)?;
    if seed.cost <= F::zero() {
        return Err(Error::Structural(
            "color-blind cost is zero; POF ratios are undefined".into(),
        ));
    }
    let deltas = compute_violations(&seed.nearest_assignment, instance)?;
    let baseline = SolveReportOf {
        centers: seed.centers.clone(),
        assignment: seed.nearest_assignment.clone(),
        deltas: deltas.clone(),
        objective_kind,
        objective_value: objective_value(&deltas, objective_kind),
        search_value: objective_value(&deltas, objective_kind),
        cost: seed.cost,
        budget: seed.cost,
        pof: Some(F::one()),
        min_cluster: min_cluster_size(&seed.nearest_assignment)?,
        lp_runs: 0,
        runtime_ms: start.elapsed().as_millis() as u64,
    };

    let mut reports = vec![baseline];
    for &ratio in pof_levels {
        let budget = ratio * seed.cost;
        let mut report =
            solve_fabc(instance, &seed.centers, budget, objective_kind, grid, rng_seed)?;
        report.pof = Some(pof(report.cost, seed.cost)?);
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bounds, Norm};

    type Inst = InstanceOf<f64>;

    fn half_bounds() -> Vec<Bounds<f64>> {
        vec![Bounds::new(0.5, 0.5).unwrap(); 2]
    }

    fn step_instance() -> Inst {
        Inst::euclidean(
            vec![vec![0.0], vec![1.0], vec![100.0], vec![101.0]],
            vec![0, 0, 1, 1],
            half_bounds(),
            Norm::Infinity,
        )
        .unwrap()
    }

    fn line_instance() -> Inst {
        let pos: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let colors: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        Inst::euclidean(pos, colors, half_bounds(), Norm::Infinity).unwrap()
    }

    #[test]
    fn fabc_step_instance_at_r() {
        let grid = Grid::new(4).unwrap();
        let report =
            solve_fabc(&step_instance(), &[0, 2], 100.0, ObjectiveKind::Egalitarian, &grid, 0)
                .unwrap();
        assert_eq!(report.objective_value, 0.0);
        assert!(report.cost <= 100.0);
        assert!(report.assignment.is_integral());
    }

    #[test]
    fn fabc_line_instance_u2() {
        let grid = Grid::new(10).unwrap();
        let report =
            solve_fabc(&line_instance(), &[2, 7], 2.0, ObjectiveKind::Egalitarian, &grid, 0)
                .unwrap();
        assert_eq!(report.objective_value, 0.5);
        assert!(report.cost <= 2.0);
    }

    #[test]
    fn fabc_t1_utilitarian_balanced() {
        let inst = Inst::euclidean(
            vec![vec![0.0], vec![10.0], vec![1.0], vec![11.0]],
            vec![0, 0, 1, 1],
            half_bounds(),
            Norm::Infinity,
        )
        .unwrap();
        let grid = Grid::new(4).unwrap();
        let report =
            solve_fabc(&inst, &[2, 1], 1.0, ObjectiveKind::Utilitarian, &grid, 0).unwrap();
        assert_eq!(report.objective_value, 0.0);
        // each cluster holds one red and one blue
        let deltas = &report.deltas.delta;
        assert!(deltas.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn fabc_leximin_step_instance() {
        let grid = Grid::new(4).unwrap();
        let report =
            solve_fabc(&step_instance(), &[0, 2], 100.0, ObjectiveKind::Leximin, &grid, 5)
                .unwrap();
        assert_eq!(report.objective_value, 0.0);
        assert!(report.cost <= 100.0);
    }

    #[test]
    fn fcbc_expand_budget_arithmetic() {
        // Gonzalez alpha = 2: U' = (2+2)·10 = 40
        let inst = line_instance();
        let grid = Grid::new(4).unwrap();
        let report = solve_fcbc(
            &inst,
            2,
            10.0,
            ObjectiveKind::Egalitarian,
            &grid,
            SeedMethod::Gonzalez { first: 0 },
            0,
            true,
        )
        .unwrap();
        assert_eq!(report.budget, 40.0);
    }

    #[test]
    fn fcbc_k_equals_n_zero_cost() {
        let inst = line_instance();
        let grid = Grid::new(4).unwrap();
        let report = solve_fcbc(
            &inst,
            10,
            0.5,
            ObjectiveKind::Egalitarian,
            &grid,
            SeedMethod::Gonzalez { first: 0 },
            0,
            false,
        )
        .unwrap();
        assert_eq!(report.cost, 0.0);
        // singleton clusters: every cluster is monochromatic
        assert_eq!(report.deltas.delta, vec![0.5, 0.5]);
    }

    #[test]
    fn sweep_single_level_on_fair_instance() {
        // T1-style: the nearest assignment is already balanced
        let inst = Inst::euclidean(
            vec![vec![0.0], vec![10.0], vec![1.0], vec![11.0]],
            vec![0, 0, 1, 1],
            half_bounds(),
            Norm::Infinity,
        )
        .unwrap();
        let grid = Grid::new(4).unwrap();
        let reports = pof_sweep(
            &inst,
            2,
            ObjectiveKind::Utilitarian,
            &[1.0],
            &grid,
            SeedMethod::Gonzalez { first: 0 },
            0,
        )
        .unwrap();
        assert_eq!(reports.len(), 2); // baseline + one level
        assert_eq!(reports[1].objective_value, 0.0);
        assert_eq!(reports[1].pof, Some(1.0));
    }

    #[test]
    fn sweep_validates_levels() {
        let inst = line_instance();
        let grid = Grid::new(4).unwrap();
        let bad = pof_sweep(
            &inst,
            2,
            ObjectiveKind::Egalitarian,
            &[1.5, 1.0],
            &grid,
            SeedMethod::Gonzalez { first: 0 },
            0,
        );
        assert!(bad.is_err());
        let below_one = pof_sweep(
            &inst,
            2,
            ObjectiveKind::Egalitarian,
            &[0.5],
            &grid,
            SeedMethod::Gonzalez { first: 0 },
            0,
        );
        assert!(below_one.is_err());
    }

    #[test]
    fn report_deltas_are_fresh() {
        let grid = Grid::new(4).unwrap();
        let report =
            solve_fabc(&step_instance(), &[0, 2], 150.0, ObjectiveKind::Egalitarian, &grid, 0)
                .unwrap();
        let recomputed = compute_violations(&report.assignment, &step_instance()).unwrap();
        assert_eq!(report.deltas.delta, recomputed.delta);
    }
}
