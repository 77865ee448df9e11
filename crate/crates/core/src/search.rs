//! Search for near-optimal violation vectors over the discretized grid
//! E = {0, ε, 2ε, …, 1}, counting LP runs.
//!
//! Feasibility is monotone in the violation vector (a feasible vector stays
//! feasible when any coordinate grows), which is what the diagonal walk and
//! the binary searches exploit.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::lpsolve::{
    build_feasibility_lp, check_feasibility_with, BuiltinSimplex, LpBackend, LpOutcomeOf,
};
use crate::model::{AssignmentOf, InstanceOf, ViolationVectorOf};
use crate::scalar::Real;
use crate::{Error, Result};

/// The violation grid E = {0, ε, …, 1} with ε = 1/r. Levels are addressed by
/// index `0..=r` so walks never accumulate floating-point drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    r: usize,
}

impl Grid {
    /// ε = 1/r; requires r >= 2 so that ε ∈ (0,1).
    pub fn new(r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::Structural(format!(
                "grid resolution must be at least 2, got {r}"
            )));
        }
        Ok(Self { r })
    }

    pub fn resolution(&self) -> usize {
        self.r
    }

    pub fn epsilon<F: Real>(&self) -> F {
        F::one() / F::from_usize(self.r).unwrap()
    }

    /// Number of levels |E| = r + 1.
    pub fn num_levels(&self) -> usize {
        self.r + 1
    }

    pub fn level<F: Real>(&self, index: usize) -> F {
        debug_assert!(index <= self.r);
        F::from_usize(index).unwrap() / F::from_usize(self.r).unwrap()
    }

    pub fn levels<F: Real>(&self) -> Vec<F> {
        (0..=self.r).map(|i| self.level(i)).collect()
    }
}

/// Result of a grid search: the accepting violation levels, the objective
/// value, the fractional witness of the accepting LP, and the number of
/// feasibility checks spent.
#[derive(Debug, Clone)]
pub struct SearchResultOf<F> {
    pub deltas: ViolationVectorOf<F>,
    pub objective: F,
    pub witness: AssignmentOf<F>,
    pub lp_runs: usize,
}

/// Context shared by the searches: instance, centers, budget, backend, and
/// the LP-run counter.
struct LpContext<'a, F: Real> {
    instance: &'a InstanceOf<F>,
    centers: &'a [usize],
    budget: F,
    backend: &'a dyn LpBackend<F>,
    runs: usize,
}

impl<'a, F: Real> LpContext<'a, F> {
    fn new(instance: &'a InstanceOf<F>, centers: &'a [usize], budget: F) -> Self {
        static DEFAULT_BACKEND: BuiltinSimplex = BuiltinSimplex;
        Self { instance, centers, budget, backend: &DEFAULT_BACKEND, runs: 0 }
    }

    /// One feasibility check; levels are clamped into [0,1] before the build.
    fn check(&mut self, levels: &[F]) -> Result<Option<(AssignmentOf<F>, F)>> {
        let clamped: Vec<F> = levels.iter().map(|&l| l.max(F::zero()).min(F::one())).collect();
        let lp = build_feasibility_lp(
            self.instance,
            self.centers,
            self.budget,
            &ViolationVectorOf::new(clamped),
        )?;
        self.runs += 1;
        match check_feasibility_with(&lp, self.backend)? {
            LpOutcomeOf::Feasible { solution, lp_cost } => Ok(Some((solution, lp_cost))),
            LpOutcomeOf::Infeasible => Ok(None),
        }
    }

    fn budget_infeasible(&self) -> Error {
        Error::BudgetInfeasible { budget: self.budget.as_f64() }
    }
}

/// Movement state of the diagonal walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkDirection {
    Start,
    Horizontal,
    Diagonal,
    Vertical,
}

/// One probed cell of the walk, for regression tests and trace inspection.
#[derive(Debug, Clone, Copy)]
pub struct WalkStep {
    pub cell: (usize, usize),
    pub direction: WalkDirection,
    pub feasible: bool,
}

#[derive(Debug)]
pub struct DiagonalWalkOutcome<W> {
    /// Best feasible cell (grid indices) and its witness; `None` when the
    /// top-right cell is already infeasible.
    pub best: Option<(usize, usize, W)>,
    pub steps: Vec<WalkStep>,
}

/// The two-color grid walk: starting from the top-right cell (1,1), sweep
/// horizontally left while feasible, then alternate diagonal exploration
/// (Δ1+ε, Δ2−ε) with vertical descent on feasibility. The probe returns a
/// witness when the cell is feasible. Runs at most 2r + 1 probes.
pub fn diagonal_walk<W>(
    r: usize,
    mut probe: impl FnMut(usize, usize) -> Result<Option<W>>,
) -> Result<DiagonalWalkOutcome<W>> {
    let mut steps = Vec::new();
    let mut check = |i1: usize, i2: usize, dir: WalkDirection, steps: &mut Vec<WalkStep>| {
        let w = probe(i1, i2)?;
        steps.push(WalkStep { cell: (i1, i2), direction: dir, feasible: w.is_some() });
        Ok::<_, Error>(w)
    };

    let Some(w) = check(r, r, WalkDirection::Start, &mut steps)? else {
        return Ok(DiagonalWalkOutcome { best: None, steps });
    };
    let mut best = (r, r, w);
    fn update<W>(best: &mut (usize, usize, W), i1: usize, i2: usize, w: W) {
        if i1 + i2 < best.0 + best.1 {
            *best = (i1, i2, w);
        }
    }

    let (mut i1, mut i2) = (r, r);
    let mut dir = WalkDirection::Horizontal;
    loop {
        match dir {
            WalkDirection::Horizontal => {
                if i1 == 0 {
                    dir = WalkDirection::Vertical;
                    continue;
                }
                i1 -= 1;
                match check(i1, i2, dir, &mut steps)? {
                    Some(w) => update(&mut best, i1, i2, w),
                    // No revert: the next diagonal step then lands directly
                    // below the last feasible column.
                    None => dir = WalkDirection::Diagonal,
                }
            }
            WalkDirection::Diagonal => {
                if i1 == r || i2 == 0 {
                    break;
                }
                i1 += 1;
                i2 -= 1;
                if let Some(w) = check(i1, i2, dir, &mut steps)? {
                    update(&mut best, i1, i2, w);
                    dir = WalkDirection::Vertical;
                }
            }
            WalkDirection::Vertical => {
                if i2 == 0 {
                    break;
                }
                i2 -= 1;
                match check(i1, i2, dir, &mut steps)? {
                    Some(w) => update(&mut best, i1, i2, w),
                    None => dir = WalkDirection::Diagonal,
                }
            }
            WalkDirection::Start => unreachable!(),
        }
    }
    Ok(DiagonalWalkOutcome { best: Some(best), steps })
}

fn walk_two_colors<F: Real>(
    ctx: &mut LpContext<'_, F>,
    grid: &Grid,
    fixed_suffix: &[F],
) -> Result<Option<SearchResultOf<F>>> {
    let r = grid.resolution();
    let runs_before = ctx.runs;
    let outcome = diagonal_walk(r, |i1, i2| {
        let mut levels = vec![grid.level(i1), grid.level(i2)];
        levels.extend_from_slice(fixed_suffix);
        ctx.check(&levels)
    })?;
    let lp_runs = ctx.runs - runs_before;
    Ok(outcome.best.map(|(i1, i2, (witness, _cost))| {
        let mut delta = vec![grid.level::<F>(i1), grid.level::<F>(i2)];
        delta.extend_from_slice(fixed_suffix);
        let objective = delta.iter().copied().sum();
        SearchResultOf { deltas: ViolationVectorOf::new(delta), objective, witness, lp_runs }
    }))
}

/// Two-color diagonal grid walk for the utilitarian objective, with fixed
/// violation levels for colors 3..|H|. At most 3/ε + 3 LP runs; the result is
/// within 2ε of the continuous two-color optimum for the given suffix.
pub fn two_color_diagonal<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    grid: &Grid,
    fixed_suffix: &[F],
) -> Result<SearchResultOf<F>> {
    if instance.num_colors() != fixed_suffix.len() + 2 {
        return Err(Error::Structural(format!(
            "suffix covers {} colors, instance has {} (two must stay free)",
            fixed_suffix.len(),
            instance.num_colors()
        )));
    }
    let mut ctx = LpContext::new(instance, centers, budget);
    walk_two_colors(&mut ctx, grid, fixed_suffix)?.ok_or_else(|| ctx.budget_infeasible())
}

/// Exhaustive utilitarian search: enumerate grid levels for colors 3..|H| and
/// run the two-color walk on the first two colors for each suffix. Total LP
/// runs are O((1/ε)^(|H|−1)); the LP-level result is within |H|·ε of the
/// continuous optimum.
pub fn search_utilitarian<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    grid: &Grid,
) -> Result<SearchResultOf<F>> {
    let h = instance.num_colors();
    if h < 2 {
        return Err(Error::Structural("utilitarian search needs at least two colors".into()));
    }
    let mut ctx = LpContext::new(instance, centers, budget);
    // Up-front budget check at Δ = 1 for every color.
    if ctx.check(&vec![F::one(); h])?.is_none() {
        return Err(ctx.budget_infeasible());
    }

    let suffix_colors = h - 2;
    let mut suffix_idx = vec![0usize; suffix_colors];
    let mut best: Option<SearchResultOf<F>> = None;
    loop {
        let suffix: Vec<F> = suffix_idx.iter().map(|&i| grid.level(i)).collect();
        if let Some(result) = walk_two_colors(&mut ctx, grid, &suffix)? {
            if best.as_ref().map_or(true, |b| result.objective < b.objective) {
                best = Some(result);
            }
        }
        if suffix_colors == 0 {
            break;
        }
        // next suffix combination (lexicographic)
        let mut pos = suffix_colors;
        let mut done = true;
        while pos > 0 {
            pos -= 1;
            if suffix_idx[pos] < grid.resolution() {
                suffix_idx[pos] += 1;
                for v in suffix_idx[pos + 1..].iter_mut() {
                    *v = 0;
                }
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }
    let mut result = best.ok_or_else(|| ctx.budget_infeasible())?;
    result.lp_runs = ctx.runs;
    Ok(result)
}

/// Δ2 implied by Δ1 under symmetric two-color bounds with λ gap
/// `lambda_gap = λ2 − λ1 >= 0`: zero below the gap, `Δ1 − gap` above it.
pub fn symmetric_partner_level<F: Real>(delta1: F, lambda_gap: F) -> F {
    if delta1 < lambda_gap {
        F::zero()
    } else {
        delta1 - lambda_gap
    }
}

/// Binary search for the utilitarian objective in the two-color case with
/// symmetric bounds `α_i = r_i + λ_i`, `β_i = r_i − λ_i`, `λ_i = delta_sym·r_i`.
/// The proportion of one color pins the other, so ⌈log2|E|⌉ + 2 LP runs
/// suffice for an additive approximation of 2ε.
pub fn two_color_symmetric_search<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    grid: &Grid,
    r1: F,
    r2: F,
    delta_sym: F,
) -> Result<SearchResultOf<F>> {
    let tol = F::of(1e-9);
    if instance.num_colors() != 2 {
        return Err(Error::Structural("symmetric search needs exactly two colors".into()));
    }
    if (r1 + r2 - F::one()).abs() > tol {
        return Err(Error::Structural(format!(
            "color proportions must be complementary, got {r1} + {r2}"
        )));
    }
    for (h, &r) in [r1, r2].iter().enumerate() {
        let b = instance.bounds(h);
        let lambda = delta_sym * r;
        if (b.alpha - (r + lambda)).abs() > tol || (b.beta - (r - lambda)).abs() > tol {
            return Err(Error::Structural(format!(
                "bounds of color {h} are not symmetric around {r} with slack {delta_sym}"
            )));
        }
    }
    // Binary search runs on the color with the smaller lambda; the other
    // color's level is derived.
    let (lead, follow) = if r1 <= r2 { (0usize, 1usize) } else { (1usize, 0usize) };
    let lambda_gap = delta_sym * r1.max(r2) - delta_sym * r1.min(r2);

    let levels_for = |idx: usize| -> Vec<F> {
        let d_lead: F = grid.level(idx);
        let d_follow = symmetric_partner_level(d_lead, lambda_gap);
        let mut levels = vec![F::zero(); 2];
        levels[lead] = d_lead;
        levels[follow] = d_follow;
        levels
    };

    let mut ctx = LpContext::new(instance, centers, budget);
    let r = grid.resolution();
    let top = ctx.check(&levels_for(r))?.ok_or_else(|| ctx.budget_infeasible())?;

    let (mut lo, mut hi) = (0usize, r);
    let mut witness = top;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match ctx.check(&levels_for(mid))? {
            Some(w) => {
                witness = w;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let deltas = levels_for(lo);
    let objective = deltas.iter().copied().sum();
    Ok(SearchResultOf {
        deltas: ViolationVectorOf::new(deltas),
        objective,
        witness: witness.0,
        lp_runs: ctx.runs,
    })
}

/// Egalitarian search: all colors share one violation level; binary search
/// for the smallest feasible level in E. At most ⌈log2|E|⌉ + 1 LP runs for an
/// additive approximation of ε.
pub fn search_egalitarian<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    grid: &Grid,
) -> Result<SearchResultOf<F>> {
    let h = instance.num_colors();
    let mut ctx = LpContext::new(instance, centers, budget);
    let r = grid.resolution();
    let top = ctx.check(&vec![F::one(); h])?.ok_or_else(|| ctx.budget_infeasible())?;

    let (mut lo, mut hi) = (0usize, r);
    let mut witness = top;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match ctx.check(&vec![grid.level(mid); h])? {
            Some(w) => {
                witness = w;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let level: F = grid.level(lo);
    Ok(SearchResultOf {
        deltas: ViolationVectorOf::uniform(level, h),
        objective: level,
        witness: witness.0,
        lp_runs: ctx.runs,
    })
}

/// Output of the leximin heuristic: per-color frozen violation levels in
/// freeze order, plus the witness of the final accepting LP.
#[derive(Debug, Clone)]
pub struct LeximinResultOf<F> {
    /// (color, frozen level) in the order colors were frozen.
    pub frozen: Vec<(usize, F)>,
    pub witness: AssignmentOf<F>,
    pub lp_runs: usize,
}

impl<F: Real> LeximinResultOf<F> {
    /// The frozen levels rearranged per color id.
    pub fn levels(&self, num_colors: usize) -> ViolationVectorOf<F> {
        let mut delta = vec![F::zero(); num_colors];
        for &(h, l) in &self.frozen {
            delta[h] = l;
        }
        ViolationVectorOf::new(delta)
    }
}

/// Leximin heuristic: repeatedly binary-search the minimal common level for
/// the active colors strictly below the previous freeze level, then freeze
/// the colors that cannot improve below it (tested with one LP per color);
/// when every active color could still improve, freeze one uniformly at
/// random. `l_est` estimates the minimum cluster size and sets the 2/L
/// offset. This is a heuristic; no optimality guarantee is claimed.
pub fn search_leximin<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
    budget: F,
    grid: &Grid,
    l_est: usize,
    rng_seed: u64,
) -> Result<LeximinResultOf<F>> {
    if l_est == 0 {
        return Err(Error::Structural("cluster-size estimate must be positive".into()));
    }
    let h = instance.num_colors();
    let mut ctx = LpContext::new(instance, centers, budget);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let two_over_l = F::of(2.0) / F::from_usize(l_est).unwrap();
    let eps: F = grid.epsilon();

    let (mut witness, _) =
        ctx.check(&vec![F::one(); h])?.ok_or_else(|| ctx.budget_infeasible())?;

    let mut active: Vec<usize> = (0..h).collect();
    let mut frozen_level: Vec<Option<F>> = vec![None; h];
    let mut freeze_order: Vec<(usize, F)> = Vec::new();
    let mut prev_min: Option<F> = None;

    let compose = |frozen_level: &[Option<F>], active_level: F, overrides: &[(usize, F)]| {
        let mut levels: Vec<F> =
            (0..h).map(|c| frozen_level[c].unwrap_or(active_level)).collect();
        for &(c, l) in overrides {
            levels[c] = l;
        }
        levels
    };

    while !active.is_empty() {
        // Step 1: minimal common level for the active colors, strictly below
        // the previous freeze level when one exists.
        let r = grid.resolution();
        let hi_idx = match prev_min {
            None => r,
            Some(pm) => (0..=r).rev().find(|&i| grid.level::<F>(i) < pm).unwrap_or(0),
        };
        let top = ctx.check(&compose(&frozen_level, grid.level(hi_idx), &[]))?;
        let Some(top) = top else {
            // Nothing below the previous freeze level is feasible: the
            // remaining colors are stuck there.
            let level = prev_min.unwrap_or_else(F::one).min(F::one());
            for c in active.drain(..) {
                frozen_level[c] = Some(level);
                freeze_order.push((c, level));
            }
            break;
        };
        let (mut lo, mut hi) = (0usize, hi_idx);
        let mut step_witness = top;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match ctx.check(&compose(&frozen_level, grid.level(mid), &[]))? {
                Some(w) => {
                    step_witness = w;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
        let found: F = grid.level(lo);
        let cur_min = (found + two_over_l).min(F::one());
        witness = step_witness.0;

        // Step 2: freeze the colors that cannot reach found − ε.
        let test_level = found - eps;
        let mut newly_frozen = Vec::new();
        for &c in &active {
            let improvable = if test_level < F::zero() {
                false
            } else {
                ctx.check(&compose(&frozen_level, cur_min, &[(c, test_level)]))?.is_some()
            };
            if !improvable {
                newly_frozen.push(c);
            }
        }
        // Step 3: every color could improve, so pick one at random.
        if newly_frozen.is_empty() {
            newly_frozen.push(active[rng.gen_range(0..active.len())]);
        }
        for c in newly_frozen {
            frozen_level[c] = Some(cur_min);
            freeze_order.push((c, cur_min));
            active.retain(|&a| a != c);
        }
        prev_min = Some(cur_min);
    }

    // The witness of the last accepting search LP realizes every frozen
    // level (active colors sat at the found level, below their freeze).
    Ok(LeximinResultOf { frozen: freeze_order, witness, lp_runs: ctx.runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compute_violations, Bounds, InstanceOf, Norm};

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

    /// Reds at 0..n'-1, blues at n'..2n'-1, unit spacing.
    fn line_instance(n_half: usize) -> Inst {
        let pos: Vec<Vec<f64>> = (0..2 * n_half).map(|i| vec![i as f64]).collect();
        let colors: Vec<usize> = (0..2 * n_half).map(|i| usize::from(i >= n_half)).collect();
        Inst::euclidean(pos, colors, half_bounds(), Norm::Infinity).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1).is_err());
        let g = Grid::new(4).unwrap();
        assert_eq!(g.num_levels(), 5);
        assert_eq!(g.levels::<f64>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.epsilon::<f64>(), 0.25);
    }

    /// Feasibility pattern reproducing the published walk run at ε = 1/6:
    /// horizontal along the top row, diagonal exploration switching to
    /// vertical descent on the first feasible cell, and a diagonal tail,
    /// ending at the cell Δ1 = Δ2 = 3ε.
    pub(crate) fn figure_pattern(i1: usize, i2: usize) -> bool {
        (i1 >= 2 && i2 >= 5) || (i1 >= 3 && i2 >= 3)
    }

    #[test]
    fn walk_reproduces_figure_run() {
        let outcome =
            diagonal_walk(6, |i1, i2| Ok(figure_pattern(i1, i2).then_some(()))).unwrap();
        let (i1, i2, ()) = outcome.best.unwrap();
        assert_eq!((i1, i2), (3, 3));
        assert!(outcome.steps.len() <= 2 * 6 + 1);
        // phase order per the published run: horizontal, then diagonal
        // switching to vertical on feasibility, then diagonal again
        let dirs: Vec<WalkDirection> = outcome.steps.iter().map(|s| s.direction).collect();
        assert_eq!(
            dirs,
            vec![
                WalkDirection::Start,
                WalkDirection::Horizontal,
                WalkDirection::Horizontal,
                WalkDirection::Horizontal,
                WalkDirection::Horizontal,
                WalkDirection::Horizontal,
                WalkDirection::Diagonal,
                WalkDirection::Vertical,
                WalkDirection::Diagonal,
                WalkDirection::Vertical,
                WalkDirection::Diagonal,
                WalkDirection::Diagonal,
            ]
        );
    }

    #[test]
    fn walk_top_right_objective_is_two() {
        // only the top-right cell feasible: the best cell stays (1,1), value 2
        let outcome = diagonal_walk(6, |i1, i2| Ok((i1 == 6 && i2 == 6).then_some(()))).unwrap();
        let (i1, i2, ()) = outcome.best.unwrap();
        assert_eq!((i1, i2), (6, 6));
    }

    #[test]
    fn walk_everywhere_feasible_reaches_origin() {
        // matches the exhaustive grid optimum (0,0)
        let outcome = diagonal_walk(6, |_, _| Ok(Some(()))).unwrap();
        let (i1, i2, ()) = outcome.best.unwrap();
        assert_eq!((i1, i2), (0, 0));
        assert_eq!(outcome.steps.len(), 2 * 6 + 1);
    }

    #[test]
    fn walk_infeasible_top_right_returns_none() {
        let outcome = diagonal_walk::<()>(4, |_, _| Ok(None)).unwrap();
        assert!(outcome.best.is_none());
        assert_eq!(outcome.steps.len(), 1);
    }

    #[test]
    fn walk_stays_on_antidiagonals() {
        // consecutive diagonal steps share the utilitarian value Δ1 + Δ2
        let outcome =
            diagonal_walk(6, |i1, i2| Ok(figure_pattern(i1, i2).then_some(()))).unwrap();
        let steps = outcome.steps;
        for w in steps.windows(2) {
            if w[0].direction == WalkDirection::Diagonal
                && w[1].direction == WalkDirection::Diagonal
            {
                assert_eq!(w[0].cell.0 + w[0].cell.1, w[1].cell.0 + w[1].cell.1);
            }
        }
    }

    #[test]
    fn symmetric_partner_mapping() {
        // r1 = 0.25, r2 = 0.75, delta = 0.1: gap = 0.075 - 0.025 = 0.05
        let gap = 0.05_f64;
        assert_eq!(symmetric_partner_level(0.025, gap), 0.0);
        assert!((symmetric_partner_level(0.125, gap) - 0.075_f64).abs() < 1e-12);
    }

    #[test]
    fn egalitarian_step_instance() {
        let inst = step_instance();
        let grid = Grid::new(4).unwrap();
        // U = R = 100: the perfectly fair split is affordable.
        let res = search_egalitarian(&inst, &[0, 2], 100.0, &grid).unwrap();
        assert_eq!(res.objective, 0.0);
        // U just below R with ε = 1/4: the optimum is the 0.5 level.
        let res = search_egalitarian(&inst, &[0, 2], 99.0, &grid).unwrap();
        assert_eq!(res.objective, 0.5);
        assert!(res.lp_runs <= (grid.num_levels() as f64).log2().ceil() as usize + 2);
    }

    #[test]
    fn egalitarian_budget_infeasible() {
        let inst = step_instance();
        let grid = Grid::new(4).unwrap();
        let err = search_egalitarian(&inst, &[0, 2], 0.5, &grid).unwrap_err();
        assert!(matches!(err, Error::BudgetInfeasible { .. }));
    }

    #[test]
    fn egalitarian_line_instance_with_shifted_centers() {
        // n' = 5 line: with centers {3,6} and U = 3 the optimum is exactly
        // 1/2 - 2/5 = 0.1 on the ε = 1/10 grid; with the color-middle centers
        // {2,7} no assignment does better than 0.3.
        let inst = line_instance(5);
        let grid = Grid::new(10).unwrap();
        let res = search_egalitarian(&inst, &[3, 6], 3.0, &grid).unwrap();
        assert!((res.objective - 0.1).abs() < 1e-12);
        let res = search_egalitarian(&inst, &[2, 7], 3.0, &grid).unwrap();
        assert!((res.objective - 0.3).abs() < 1e-12);
        // U = 2 (the color-blind optimum) cannot mix colors at all.
        let res = search_egalitarian(&inst, &[2, 7], 2.0, &grid).unwrap();
        assert_eq!(res.objective, 0.5);
    }

    #[test]
    fn utilitarian_t1_fixture_is_fair() {
        // reds at 0 and 10, blues at 1 and 11, centers {1, 10}, U = 1
        let inst = Inst::euclidean(
            vec![vec![0.0], vec![10.0], vec![1.0], vec![11.0]],
            vec![0, 0, 1, 1],
            half_bounds(),
            Norm::Infinity,
        )
        .unwrap();
        let grid = Grid::new(4).unwrap();
        let res = search_utilitarian(&inst, &[2, 1], 1.0, &grid).unwrap();
        assert_eq!(res.objective, 0.0);
        let v = compute_violations(&res.witness, &inst).unwrap();
        assert!(v.delta.iter().all(|&d| d <= 1e-7));
    }

    #[test]
    fn utilitarian_step_instance_below_r() {
        // U < R forces monochromatic clusters: Δ = 0.5 per color, so the
        // utilitarian objective is 1.0 (twice the egalitarian value).
        let inst = step_instance();
        let grid = Grid::new(4).unwrap();
        let res = search_utilitarian(&inst, &[0, 2], 99.0, &grid).unwrap();
        assert_eq!(res.objective, 1.0);
        assert_eq!(res.deltas.delta, vec![0.5, 0.5]);
    }

    #[test]
    fn symmetric_search_balanced_instance() {
        let inst = step_instance();
        let grid = Grid::new(8).unwrap();
        // alpha = beta = 0.5 = r_h: symmetric with slack 0
        let res =
            two_color_symmetric_search(&inst, &[0, 2], 100.0, &grid, 0.5, 0.5, 0.0).unwrap();
        assert_eq!(res.objective, 0.0);
        assert_eq!(res.deltas.delta, vec![0.0, 0.0]);
        let cap = (grid.num_levels() as f64).log2().ceil() as usize + 2;
        assert!(res.lp_runs <= cap, "{} > {}", res.lp_runs, cap);
    }

    #[test]
    fn symmetric_search_rejects_asymmetric_bounds() {
        let inst = Inst::euclidean(
            vec![vec![0.0], vec![1.0]],
            vec![0, 1],
            vec![Bounds::new(0.4, 0.5).unwrap(), Bounds::new(0.5, 0.6).unwrap()],
            Norm::Infinity,
        )
        .unwrap();
        let grid = Grid::new(4).unwrap();
        let err =
            two_color_symmetric_search(&inst, &[0, 1], 10.0, &grid, 0.5, 0.5, 0.1).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn leximin_all_frozen_when_egalitarian_zero() {
        let inst = step_instance();
        let grid = Grid::new(4).unwrap();
        let res = search_leximin(&inst, &[0, 2], 100.0, &grid, 2, 7).unwrap();
        assert_eq!(res.frozen.len(), 2);
        // both colors freeze in the first iteration at 0 + 2/L = 1
        for &(_, l) in &res.frozen {
            assert!((l - 1.0_f64).abs() < 1e-12, "frozen at {l}");
        }
        let v = compute_violations(&res.witness, &inst).unwrap();
        assert!(v.delta.iter().all(|&d| d <= 1e-7));
    }

    #[test]
    fn leximin_complementary_colors_freeze_equal() {
        let inst = step_instance();
        let grid = Grid::new(4).unwrap();
        let res = search_leximin(&inst, &[0, 2], 99.0, &grid, 2, 7).unwrap();
        assert_eq!(res.frozen.len(), 2);
        let l0 = res.frozen[0].1;
        let l1 = res.frozen[1].1;
        assert!((l0 - l1).abs() < 1e-12, "mirror identity: {l0} vs {l1}");
    }
}
