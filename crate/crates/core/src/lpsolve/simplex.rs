//! Self-contained LP feasibility solver: a phase-1 primal simplex over sparse
//! rows with an explicit dense basis inverse and an optional crash basis.
//!
//! The solver answers "does `Ax {=,<=} b, x >= 0` have a solution?" and
//! returns a primal witness when it does. It deliberately skips phase 2: the
//! feasibility LPs searched by this crate carry no objective.

use crate::scalar::Real;
use crate::{Error, Result};

/// One sparse constraint row.
#[derive(Debug, Clone)]
pub struct LpRow<F> {
    pub cols: Vec<u32>,
    pub coefs: Vec<F>,
    pub kind: RowKind,
    pub rhs: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Eq,
    Le,
}

/// A feasibility problem over non-negative variables.
#[derive(Debug, Clone)]
pub struct LpProblem<F> {
    pub num_vars: usize,
    pub rows: Vec<LpRow<F>>,
}

/// Solver verdict with a primal witness when feasible.
#[derive(Debug, Clone)]
pub enum LpStatus<F> {
    Feasible(Vec<F>),
    Infeasible,
}

/// Pluggable LP backend. Implementations must be safe to call from multiple
/// threads on independent problems (no shared mutable solver state), report
/// feasible/infeasible/numerical-failure distinctly, and return a primal
/// witness on feasibility.
pub trait LpBackend<F: Real>: Send + Sync {
    /// Decide feasibility. `crash`, when given, is a variable-value hint used
    /// to seed the starting basis (integral hints work best).
    fn solve(&self, problem: &LpProblem<F>, crash: Option<&[F]>) -> Result<LpStatus<F>>;
}

/// Default backend: two-phase simplex stopped after phase 1.
#[derive(Debug, Clone, Default)]
pub struct BuiltinSimplex;

impl<F: Real> LpBackend<F> for BuiltinSimplex {
    fn solve(&self, problem: &LpProblem<F>, crash: Option<&[F]>) -> Result<LpStatus<F>> {
        Solver::new(problem, crash)?.run()
    }
}

const FEAS_TOL: f64 = 1e-7;
const RC_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_LIMIT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

struct Solver<'a, F> {
    problem: &'a LpProblem<F>,
    m: usize,
    /// Scaled structural columns: for each variable, (row, coefficient).
    cols: Vec<Vec<(u32, F)>>,
    rhs: Vec<F>,
    /// Row index of each slack variable (Le rows in order).
    slack_rows: Vec<usize>,
    basis: Vec<Col>,
    var_basic: Vec<bool>,
    slack_basic: Vec<bool>,
    artificial_count: usize,
    binv: Vec<F>, // m x m row-major
    xb: Vec<F>,
    y: Vec<F>,
    dir: Vec<F>,
}

impl<'a, F: Real> Solver<'a, F> {
    fn new(problem: &'a LpProblem<F>, crash: Option<&[F]>) -> Result<Self> {
        let m = problem.rows.len();
        let n = problem.num_vars;
        // Row scaling: bring the largest coefficient of every row to 1.
        let mut scale = vec![F::one(); m];
        for (r, row) in problem.rows.iter().enumerate() {
            let mut mx = F::zero();
            for &c in &row.coefs {
                mx = mx.max(c.abs());
            }
            if mx > F::zero() {
                scale[r] = F::one() / mx;
            }
        }
        let mut cols = vec![Vec::new(); n];
        for (r, row) in problem.rows.iter().enumerate() {
            for (&j, &c) in row.cols.iter().zip(&row.coefs) {
                if j as usize >= n {
                    return Err(Error::Structural(format!(
                        "row {r} references variable {j} of {n}"
                    )));
                }
                if c != F::zero() {
                    cols[j as usize].push((r as u32, c * scale[r]));
                }
            }
        }
        let rhs: Vec<F> =
            problem.rows.iter().enumerate().map(|(r, row)| row.rhs * scale[r]).collect();
        let slack_rows: Vec<usize> = problem
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.kind == RowKind::Le)
            .map(|(r, _)| r)
            .collect();

        let mut solver = Self {
            problem,
            m,
            cols,
            rhs,
            slack_rows,
            basis: Vec::new(),
            var_basic: vec![false; n],
            slack_basic: Vec::new(),
            artificial_count: 0,
            binv: vec![F::zero(); m * m],
            xb: vec![F::zero(); m],
            y: vec![F::zero(); m],
            dir: vec![F::zero(); m],
        };
        solver.slack_basic = vec![false; solver.slack_rows.len()];
        solver.crash_basis(crash);
        Ok(solver)
    }

    /// Build the starting basis: for each equality row, the hinted column when
    /// it is usable; slacks on satisfied inequality rows; artificials on
    /// everything else. The resulting basis matrix is block-triangular, so
    /// its inverse is written down directly.
    fn crash_basis(&mut self, crash: Option<&[F]>) {
        let m = self.m;
        let n = self.problem.num_vars;
        // Only columns confined to a single equality row keep the crash basis
        // triangular.
        let mut eq_count = vec![0u32; n];
        for row in &self.problem.rows {
            if row.kind == RowKind::Eq {
                for &j in &row.cols {
                    eq_count[j as usize] += 1;
                }
            }
        }
        let mut chosen: Vec<Option<usize>> = vec![None; m];
        if let Some(hint) = crash {
            for (r, row) in self.problem.rows.iter().enumerate() {
                if row.kind != RowKind::Eq {
                    continue;
                }
                let mut best: Option<(usize, F)> = None;
                for (&j, &c) in row.cols.iter().zip(&row.coefs) {
                    let j = j as usize;
                    if self.var_basic[j] || eq_count[j] != 1 || c.abs() <= F::of(PIVOT_TOL) {
                        continue;
                    }
                    let v = hint.get(j).copied().unwrap_or(F::zero());
                    if v > F::of(1e-12) && best.map_or(true, |(_, bv)| v > bv) {
                        best = Some((j, v));
                    }
                }
                if let Some((j, _)) = best {
                    if self.rhs[r] / self.coef_in_row(j, r) >= F::zero() {
                        chosen[r] = Some(j);
                        self.var_basic[j] = true;
                    }
                }
            }
        }

        // Basic values for equality rows.
        let mut value = vec![F::zero(); m];
        for r in 0..m {
            if let Some(j) = chosen[r] {
                value[r] = self.rhs[r] / self.coef_in_row(j, r);
            }
        }
        // Residual rhs of the remaining rows after the chosen columns.
        let mut resid = self.rhs.clone();
        for r in 0..m {
            if let Some(j) = chosen[r] {
                for &(rr, c) in &self.cols[j] {
                    let rr = rr as usize;
                    if rr != r {
                        resid[rr] = resid[rr] - c * value[r];
                    }
                }
            }
        }

        self.basis = (0..m)
            .map(|r| match self.problem.rows[r].kind {
                RowKind::Eq => match chosen[r] {
                    Some(j) => Col::Structural(j),
                    None => Col::Artificial(r),
                },
                RowKind::Le => {
                    if resid[r] >= F::zero() {
                        let s = self.slack_index(r);
                        self.slack_basic[s] = true;
                        Col::Slack(s)
                    } else {
                        Col::Artificial(r)
                    }
                }
            })
            .collect();
        self.artificial_count =
            self.basis.iter().filter(|b| matches!(b, Col::Artificial(_))).count();

        // Diagonal of the inverse. Artificial columns are +e_r on equality
        // rows with non-negative rhs and -e_r on overfull inequality rows.
        for r in 0..m {
            self.binv[r * m + r] = match self.basis[r] {
                Col::Structural(j) => F::one() / self.coef_in_row(j, r),
                Col::Slack(_) => F::one(),
                Col::Artificial(_) => self.artificial_sign(r),
            };
        }
        // Off-diagonal entries: chosen equality columns reach into the other
        // rows of the block-triangular basis.
        for r in 0..m {
            if let Some(j) = chosen[r] {
                let inv_c = F::one() / self.coef_in_row(j, r);
                for &(rr, c) in &self.cols[j] {
                    let rr = rr as usize;
                    if rr != r {
                        let d = self.binv[rr * m + rr];
                        self.binv[rr * m + r] = -d * c * inv_c;
                    }
                }
            }
        }
        // Basic solution.
        for r in 0..m {
            self.xb[r] = match self.basis[r] {
                Col::Structural(_) => value[r],
                Col::Slack(_) => resid[r],
                Col::Artificial(_) => {
                    if self.problem.rows[r].kind == RowKind::Le {
                        -resid[r]
                    } else {
                        self.rhs[r].abs()
                    }
                }
            }
            .max(F::zero());
        }
    }

    fn artificial_sign(&self, r: usize) -> F {
        match self.problem.rows[r].kind {
            RowKind::Le => -F::one(),
            RowKind::Eq => {
                if self.rhs[r] < F::zero() {
                    -F::one()
                } else {
                    F::one()
                }
            }
        }
    }

    fn slack_index(&self, row: usize) -> usize {
        self.slack_rows.binary_search(&row).expect("row has a slack")
    }

    fn coef_in_row(&self, j: usize, r: usize) -> F {
        self.cols[j]
            .iter()
            .find(|&&(rr, _)| rr as usize == r)
            .map(|&(_, c)| c)
            .unwrap_or(F::zero())
    }

    fn run(mut self) -> Result<LpStatus<F>> {
        let m = self.m;
        let max_iter = 400 + 12 * m + self.problem.num_vars;
        let mut degenerate_streak = 0usize;
        let mut bland = false;

        for _ in 0..max_iter {
            // Phase-1 duals: y = (B^-1)^T c_B with unit cost on artificials.
            let mut obj = F::zero();
            for v in self.y.iter_mut() {
                *v = F::zero();
            }
            if self.artificial_count > 0 {
                for r in 0..m {
                    if let Col::Artificial(_) = self.basis[r] {
                        obj = obj + self.xb[r];
                        let row = &self.binv[r * m..(r + 1) * m];
                        for (v, &b) in self.y.iter_mut().zip(row) {
                            *v = *v + b;
                        }
                    }
                }
            }
            if obj <= F::of(FEAS_TOL) {
                return Ok(LpStatus::Feasible(self.extract()?));
            }

            let Some(q) = self.price(bland) else {
                // Phase-1 optimum with positive infeasibility.
                return Ok(LpStatus::Infeasible);
            };

            // Direction B^-1 a_q.
            for v in self.dir.iter_mut() {
                *v = F::zero();
            }
            match q {
                Col::Structural(j) => {
                    for &(r, c) in &self.cols[j] {
                        let r = r as usize;
                        for i in 0..m {
                            self.dir[i] = self.dir[i] + c * self.binv[i * m + r];
                        }
                    }
                }
                Col::Slack(s) => {
                    let r = self.slack_rows[s];
                    for i in 0..m {
                        self.dir[i] = self.binv[i * m + r];
                    }
                }
                Col::Artificial(_) => unreachable!("artificials never re-enter"),
            }

            let Some(leave) = self.ratio_test(bland) else {
                // Unbounded descent cannot happen in phase 1.
                return Err(Error::SolverFailure(
                    "phase-1 ratio test found no blocking row".into(),
                ));
            };

            let theta = (self.xb[leave].max(F::zero())) / self.dir[leave];
            if theta <= F::of(1e-12) {
                degenerate_streak += 1;
                if degenerate_streak > DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
            }

            // Pivot: update basic values, the basis bookkeeping, and the
            // explicit inverse.
            for i in 0..m {
                if i != leave {
                    self.xb[i] = (self.xb[i] - theta * self.dir[i]).max(F::zero());
                }
            }
            self.xb[leave] = theta;
            match self.basis[leave] {
                Col::Structural(j) => self.var_basic[j] = false,
                Col::Slack(s) => self.slack_basic[s] = false,
                Col::Artificial(_) => self.artificial_count -= 1,
            }
            match q {
                Col::Structural(j) => self.var_basic[j] = true,
                Col::Slack(s) => self.slack_basic[s] = true,
                Col::Artificial(_) => unreachable!(),
            }
            self.basis[leave] = q;

            let inv_piv = F::one() / self.dir[leave];
            let head = leave * m;
            for t in 0..m {
                self.binv[head + t] = self.binv[head + t] * inv_piv;
            }
            for i in 0..m {
                if i == leave {
                    continue;
                }
                let f = self.dir[i];
                if f == F::zero() {
                    continue;
                }
                let (row_i, row_leave) = if i < leave {
                    let (lo, hi) = self.binv.split_at_mut(head);
                    (&mut lo[i * m..(i + 1) * m], &hi[..m])
                } else {
                    let (lo, hi) = self.binv.split_at_mut(i * m);
                    (&mut hi[..m], &lo[head..head + m])
                };
                for (a, &b) in row_i.iter_mut().zip(row_leave.iter()) {
                    *a = *a - f * b;
                }
            }
        }
        Err(Error::SolverFailure(format!(
            "simplex exceeded {max_iter} iterations"
        )))
    }

    /// Most-negative-reduced-cost pricing over structural and slack columns;
    /// Bland's rule (first improving column) once cycling is suspected.
    fn price(&self, bland: bool) -> Option<Col> {
        let rc_tol = F::of(RC_TOL);
        let mut best: Option<(Col, F)> = None;
        for (j, col) in self.cols.iter().enumerate() {
            if self.var_basic[j] {
                continue;
            }
            let mut rc = F::zero();
            for &(r, c) in col {
                rc = rc - self.y[r as usize] * c;
            }
            if rc < -rc_tol {
                if bland {
                    return Some(Col::Structural(j));
                }
                if best.map_or(true, |(_, b)| rc < b) {
                    best = Some((Col::Structural(j), rc));
                }
            }
        }
        for (s, &r) in self.slack_rows.iter().enumerate() {
            if self.slack_basic[s] {
                continue;
            }
            let rc = -self.y[r];
            if rc < -rc_tol {
                if bland {
                    return Some(Col::Slack(s));
                }
                if best.map_or(true, |(_, b)| rc < b) {
                    best = Some((Col::Slack(s), rc));
                }
            }
        }
        best.map(|(c, _)| c)
    }

    fn ratio_test(&self, bland: bool) -> Option<usize> {
        let piv_tol = F::of(PIVOT_TOL);
        let mut best: Option<(usize, F)> = None;
        for i in 0..self.m {
            let d = self.dir[i];
            if d <= piv_tol {
                continue;
            }
            let ratio = self.xb[i].max(F::zero()) / d;
            let better = match best {
                None => true,
                Some((bi, br)) => {
                    if (ratio - br).abs() <= F::of(1e-12) {
                        if bland {
                            self.basis_order(i) < self.basis_order(bi)
                        } else {
                            // Prefer kicking artificials out, then stability.
                            let art_i = matches!(self.basis[i], Col::Artificial(_));
                            let art_b = matches!(self.basis[bi], Col::Artificial(_));
                            (art_i && !art_b) || (art_i == art_b && d > self.dir[bi])
                        }
                    } else {
                        ratio < br
                    }
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn basis_order(&self, i: usize) -> usize {
        match self.basis[i] {
            Col::Structural(j) => j,
            Col::Slack(s) => self.problem.num_vars + s,
            Col::Artificial(r) => self.problem.num_vars + self.slack_rows.len() + r,
        }
    }

    fn extract(&self) -> Result<Vec<F>> {
        let mut x = vec![F::zero(); self.problem.num_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if let Col::Structural(j) = b {
                x[j] = self.xb[r].max(F::zero());
            }
        }
        // Residual verification on the scaled system: a drifted inverse must
        // not surface as a bogus witness.
        let mut worst = F::zero();
        for row in &self.problem.rows {
            let mut lhs = F::zero();
            let mut mx = F::one();
            for (&j, &c) in row.cols.iter().zip(&row.coefs) {
                lhs = lhs + c * x[j as usize];
                mx = mx.max(c.abs());
            }
            let resid = match row.kind {
                RowKind::Eq => (lhs - row.rhs).abs(),
                RowKind::Le => (lhs - row.rhs).max(F::zero()),
            };
            worst = worst.max(resid / mx);
        }
        if worst > F::of(1e-6) {
            return Err(Error::SolverFailure(format!(
                "witness residual {} exceeds tolerance",
                worst.as_f64()
            )));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(cols: Vec<u32>, coefs: Vec<f64>, kind: RowKind, rhs: f64) -> LpRow<f64> {
        LpRow { cols, coefs, kind, rhs }
    }

    fn solve(p: &LpProblem<f64>) -> LpStatus<f64> {
        BuiltinSimplex.solve(p, None).unwrap()
    }

    #[test]
    fn trivially_feasible() {
        // x0 + x1 = 1, x0 <= 0.4
        let p = LpProblem {
            num_vars: 2,
            rows: vec![
                row(vec![0, 1], vec![1.0, 1.0], RowKind::Eq, 1.0),
                row(vec![0], vec![1.0], RowKind::Le, 0.4),
            ],
        };
        match solve(&p) {
            LpStatus::Feasible(x) => {
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
                assert!(x[0] <= 0.4 + 1e-9);
            }
            LpStatus::Infeasible => panic!("expected feasible"),
        }
    }

    #[test]
    fn infeasible_pair() {
        // x0 = 1 and x0 <= 0.3
        let p = LpProblem {
            num_vars: 1,
            rows: vec![
                row(vec![0], vec![1.0], RowKind::Eq, 1.0),
                row(vec![0], vec![1.0], RowKind::Le, 0.3),
            ],
        };
        assert!(matches!(solve(&p), LpStatus::Infeasible));
    }

    #[test]
    fn crash_hint_is_honored() {
        let p = LpProblem {
            num_vars: 4,
            rows: vec![
                row(vec![0, 1], vec![1.0, 1.0], RowKind::Eq, 1.0),
                row(vec![2, 3], vec![1.0, 1.0], RowKind::Eq, 1.0),
                row(vec![0, 2], vec![2.0, 1.0], RowKind::Le, 3.0),
            ],
        };
        let crash = vec![1.0, 0.0, 1.0, 0.0];
        match BuiltinSimplex.solve(&p, Some(&crash)).unwrap() {
            LpStatus::Feasible(x) => {
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
                assert!((x[2] + x[3] - 1.0).abs() < 1e-9);
            }
            LpStatus::Infeasible => panic!("expected feasible"),
        }
    }

    #[test]
    fn infeasible_with_violated_crash() {
        // crash satisfies the equality but violates the inequality; phase 1
        // must still prove infeasibility.
        let p = LpProblem {
            num_vars: 2,
            rows: vec![
                row(vec![0, 1], vec![1.0, 1.0], RowKind::Eq, 1.0),
                row(vec![0, 1], vec![1.0, 1.0], RowKind::Le, 0.5),
            ],
        };
        let crash = vec![1.0, 0.0];
        assert!(matches!(
            BuiltinSimplex.solve(&p, Some(&crash)).unwrap(),
            LpStatus::Infeasible
        ));
    }

    #[test]
    fn empty_row_infeasible() {
        let p = LpProblem {
            num_vars: 1,
            rows: vec![row(vec![], vec![], RowKind::Eq, 1.0)],
        };
        assert!(matches!(solve(&p), LpStatus::Infeasible));
    }

    #[test]
    fn negative_rhs_equality() {
        // -x0 = -0.5 with x0 <= 1
        let p = LpProblem {
            num_vars: 1,
            rows: vec![
                row(vec![0], vec![-1.0], RowKind::Eq, -0.5),
                row(vec![0], vec![1.0], RowKind::Le, 1.0),
            ],
        };
        match solve(&p) {
            LpStatus::Feasible(x) => assert!((x[0] - 0.5).abs() < 1e-9),
            LpStatus::Infeasible => panic!("expected feasible"),
        }
    }
}
