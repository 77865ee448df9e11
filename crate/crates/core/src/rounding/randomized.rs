//! Randomized dependent rounding: step the fractional matrix along null
//! vectors of the active constraint system until every entry is integral.
//!
//! Each iteration maintains five invariants with probability one over the
//! step: unit column sums (I1), cluster totals within floor/ceiling of their
//! previous values (I2), per-color totals likewise (I3), entries in [0,1]
//! (I5) — and preserves every entry in expectation (I4).

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::model::{AssignmentOf, InstanceOf};
use crate::scalar::{is_integral, Real};
use crate::{Error, Result};

const SNAP_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

/// In-progress randomized rounding state: the current matrix, the mask of
/// already-integral entries, and the iteration count.
#[derive(Debug, Clone)]
pub struct RandomRounding<'a, F: Real> {
    instance: &'a InstanceOf<F>,
    centers: Vec<usize>,
    y: Vec<F>, // k × n row-major
    fixed: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
}

impl<'a, F: Real> RandomRounding<'a, F> {
    pub fn new(x: &AssignmentOf<F>, instance: &'a InstanceOf<F>) -> Result<Self> {
        if x.n() != instance.n() {
            return Err(Error::Structural(format!(
                "assignment covers {} points, instance has {}",
                x.n(),
                instance.n()
            )));
        }
        let k = x.k();
        let n = x.n();
        let h = instance.num_colors();
        let mut state = Self {
            instance,
            centers: x.centers().to_vec(),
            y: x.weights().to_vec(),
            fixed: vec![false; k * n],
            iterations: 0,
            max_iterations: k * n + k * (h + 1) + 8,
        };
        state.snap();
        Ok(state)
    }

    pub fn y(&self) -> &[F] {
        self.y.as_slice()
    }

    pub fn fixed_mask(&self) -> &[bool] {
        &self.fixed
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_complete(&self) -> bool {
        self.fixed.iter().all(|&f| f)
    }

    fn k(&self) -> usize {
        self.centers.len()
    }

    fn n(&self) -> usize {
        self.instance.n()
    }

    /// Cluster masses A_i and per-color masses B_{i,h} of the current matrix.
    pub fn aggregates(&self) -> (Vec<F>, Vec<F>) {
        let (k, n, h) = (self.k(), self.n(), self.instance.num_colors());
        let mut a = vec![F::zero(); k];
        let mut b = vec![F::zero(); k * h];
        for c in 0..k {
            for j in 0..n {
                let w = self.y[c * n + j];
                a[c] = a[c] + w;
                b[c * h + self.instance.color(j)] = b[c * h + self.instance.color(j)] + w;
            }
        }
        (a, b)
    }

    fn snap(&mut self) {
        let tol = F::of(SNAP_TOL);
        for (v, f) in self.y.iter_mut().zip(self.fixed.iter_mut()) {
            if *f {
                continue;
            }
            if v.abs() <= tol {
                *v = F::zero();
                *f = true;
            } else if (*v - F::one()).abs() <= tol {
                *v = F::one();
                *f = true;
            }
        }
    }

    /// One null-space step. Returns true when every entry is integral.
    pub fn step(&mut self, rng: &mut impl Rng) -> Result<bool> {
        if self.is_complete() {
            return Ok(true);
        }
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::SolverFailure(format!(
                "randomized rounding exceeded {} iterations",
                self.max_iterations
            )));
        }
        let (k, n, h) = (self.k(), self.n(), self.instance.num_colors());
        let itol = F::of(SNAP_TOL);

        // Floating columns of this iteration.
        let floating: Vec<usize> =
            (0..k * n).filter(|&p| !self.fixed[p]).collect();
        let mut col_of = vec![usize::MAX; k * n];
        for (idx, &p) in floating.iter().enumerate() {
            col_of[p] = idx;
        }
        let (a, b) = self.aggregates();

        // Active constraint rows, after removing rows with no floating pairs
        // (R1) and center rows dependent on their color rows (R2). All
        // coefficients are 1, so rows are column lists.
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for j in 0..n {
            let cols: Vec<usize> = (0..k)
                .map(|c| c * n + j)
                .filter(|&p| !self.fixed[p])
                .map(|p| col_of[p])
                .collect();
            if !cols.is_empty() {
                rows.push(cols);
            }
        }
        let mut color_row_present = vec![false; k * h];
        for c in 0..k {
            for color in 0..h {
                if !is_integral(b[c * h + color], itol) {
                    continue;
                }
                let cols: Vec<usize> = (0..n)
                    .filter(|&j| self.instance.color(j) == color)
                    .map(|j| c * n + j)
                    .filter(|&p| !self.fixed[p])
                    .map(|p| col_of[p])
                    .collect();
                if !cols.is_empty() {
                    color_row_present[c * h + color] = true;
                    rows.push(cols);
                }
            }
        }
        for c in 0..k {
            if !is_integral(a[c], itol) {
                continue;
            }
            let mut floating_colors = vec![false; h];
            let cols: Vec<usize> = (0..n)
                .map(|j| (j, c * n + j))
                .filter(|&(_, p)| !self.fixed[p])
                .map(|(j, p)| {
                    floating_colors[self.instance.color(j)] = true;
                    col_of[p]
                })
                .collect();
            if cols.is_empty() {
                continue;
            }
            // (R2): the center row is the sum of its color rows when every
            // color with floating pairs already has its row in the system.
            let redundant = (0..h)
                .all(|color| !floating_colors[color] || color_row_present[c * h + color]);
            if !redundant {
                rows.push(cols);
            }
        }

        let r = null_vector::<F>(&rows, floating.len())?;

        // Largest steps in both directions keeping entries in [0,1] and
        // non-integral aggregates within their floor/ceiling interval.
        let tol = F::of(PIVOT_TOL);
        let mut u1 = F::infinity();
        let mut u2 = F::infinity();
        let mut bound = |value: F, lo: F, hi: F, rate: F| {
            if rate > tol {
                u1 = u1.min((hi - value) / rate);
                u2 = u2.min((value - lo) / rate);
            } else if rate < -tol {
                u1 = u1.min((value - lo) / -rate);
                u2 = u2.min((hi - value) / -rate);
            }
        };
        for (idx, &p) in floating.iter().enumerate() {
            bound(self.y[p], F::zero(), F::one(), r[idx]);
        }
        let mut center_rate = vec![F::zero(); k];
        let mut color_rate = vec![F::zero(); k * h];
        for (idx, &p) in floating.iter().enumerate() {
            let c = p / n;
            let j = p % n;
            center_rate[c] = center_rate[c] + r[idx];
            color_rate[c * h + self.instance.color(j)] =
                color_rate[c * h + self.instance.color(j)] + r[idx];
        }
        for c in 0..k {
            if !is_integral(a[c], itol) {
                bound(a[c], a[c].floor(), a[c].ceil(), center_rate[c]);
            }
            for color in 0..h {
                let v = b[c * h + color];
                if !is_integral(v, itol) {
                    bound(v, v.floor(), v.ceil(), color_rate[c * h + color]);
                }
            }
        }
        if !(u1 > F::zero()) || !(u2 > F::zero()) || u1.is_infinite() || u2.is_infinite() {
            return Err(Error::SolverFailure(format!(
                "degenerate step sizes u1={}, u2={}",
                u1.as_f64(),
                u2.as_f64()
            )));
        }

        // Probabilistic transition preserving expectations (I4).
        let p_up = (u2 / (u1 + u2)).as_f64();
        let scale = if rng.gen::<f64>() < p_up { u1 } else { -u2 };
        for (idx, &p) in floating.iter().enumerate() {
            self.y[p] = (self.y[p] + scale * r[idx]).max(F::zero()).min(F::one());
        }
        self.snap();
        Ok(self.is_complete())
    }

    /// Finish into an integral assignment (every entry must be fixed).
    pub fn into_assignment(self) -> Result<AssignmentOf<F>> {
        if !self.is_complete() {
            return Err(Error::Structural("rounding state is not integral yet".into()));
        }
        let n = self.n();
        let k = self.k();
        let mut labels = vec![usize::MAX; n];
        for j in 0..n {
            for c in 0..k {
                if self.y[c * n + j] > F::of(0.5) {
                    if labels[j] != usize::MAX {
                        return Err(Error::SolverFailure(format!(
                            "point {j} assigned twice after rounding"
                        )));
                    }
                    labels[j] = c;
                }
            }
        }
        if let Some(j) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::SolverFailure(format!(
                "point {j} unassigned after rounding"
            )));
        }
        AssignmentOf::from_labels(self.centers, &labels, n)
    }
}

/// A nonzero null vector of the (under-determined) unit-coefficient row
/// system, via Gaussian elimination with partial pivoting. The first free
/// column in elimination order gets value 1.
fn null_vector<F: Real>(rows: &[Vec<usize>], num_cols: usize) -> Result<Vec<F>> {
    let tol = F::of(PIVOT_TOL);
    let m = rows.len();
    let mut mat: Vec<Vec<F>> = rows
        .iter()
        .map(|cols| {
            let mut row = vec![F::zero(); num_cols];
            for &c in cols {
                row[c] = F::one();
            }
            row
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut pivot_row = 0usize;
    let mut free_col = None;
    for col in 0..num_cols {
        let best = (pivot_row..m).max_by(|&a, &b| {
            mat[a][col].abs().partial_cmp(&mat[b][col].abs()).unwrap()
        });
        let Some(best) = best.filter(|&b| mat[b][col].abs() > tol) else {
            if free_col.is_none() {
                free_col = Some(col);
            }
            continue;
        };
        mat.swap(pivot_row, best);
        let inv = F::one() / mat[pivot_row][col];
        for c in col..num_cols {
            mat[pivot_row][c] = mat[pivot_row][c] * inv;
        }
        for row in 0..m {
            if row != pivot_row {
                let f = mat[row][col];
                if f != F::zero() {
                    for c in col..num_cols {
                        mat[row][c] = mat[row][c] - f * mat[pivot_row][c];
                    }
                }
            }
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    let Some(free) = free_col else {
        return Err(Error::SolverFailure(
            "constraint system is not under-determined".into(),
        ));
    };
    let mut r = vec![F::zero(); num_cols];
    r[free] = F::one();
    // reduced row echelon: each pivot var reads directly off the free column
    for &(row, col) in &pivots {
        r[col] = -mat[row][free];
    }
    Ok(r)
}

/// Randomized rounding end to end: integral inputs return unchanged, others
/// are rounded null-space step by step with the seeded generator.
pub fn randomized_round<F: Real>(
    x: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
    rng_seed: u64,
) -> Result<AssignmentOf<F>> {
    if x.is_integral() {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut state = RandomRounding::new(x, instance)?;
    while !state.step(&mut rng)? {}
    state.into_assignment()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bounds, Norm};
    use crate::scalar::fuzzy_ceil;
    use crate::scalar::fuzzy_floor;

    type Inst = InstanceOf<f64>;

    fn inst(positions: &[f64], colors: &[usize], num_colors: usize) -> Inst {
        Inst::euclidean(
            positions.iter().map(|&x| vec![x]).collect(),
            colors.to_vec(),
            vec![Bounds::new(0.25, 0.75).unwrap(); num_colors],
            Norm::One,
        )
        .unwrap()
    }

    #[test]
    fn integral_input_unchanged() {
        let instance = inst(&[0.0, 1.0], &[0, 1], 2);
        let x = AssignmentOf::from_labels(vec![0, 1], &[0, 1], 2).unwrap();
        let out = randomized_round(&x, &instance, 3).unwrap();
        assert_eq!(out.weights(), x.weights());
    }

    #[test]
    fn half_split_hits_both_centers() {
        let instance = inst(&[0.0, 1.0, 2.0], &[0, 0, 0], 1);
        let x = AssignmentOf::fractional(
            vec![1, 2],
            vec![0.5, 1.0, 0.0, 0.5, 0.0, 1.0],
            3,
        )
        .unwrap();
        let mut ups = 0;
        for seed in 0..200 {
            let out = randomized_round(&x, &instance, seed).unwrap();
            if out.weight(0, 0) == 1.0 {
                ups += 1;
            }
        }
        // marginal 0.5: a 3-sigma band around 100 of 200
        assert!((79..=121).contains(&ups), "ups = {ups}");
    }

    #[test]
    fn invariants_hold_each_iteration() {
        let instance = inst(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[0, 1, 0, 1, 0, 1], 2);
        let w = vec![
            0.7, 0.3, 0.5, 0.25, 0.1, 0.6, //
            0.3, 0.7, 0.5, 0.75, 0.9, 0.4,
        ];
        let x = AssignmentOf::fractional(vec![0, 5], w, 6).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut state = RandomRounding::new(&x, &instance).unwrap();
            loop {
                let (a0, b0) = state.aggregates();
                let done = state.step(&mut rng).unwrap();
                let (a1, b1) = state.aggregates();
                // I1: unit column sums
                for j in 0..6 {
                    let s: f64 = (0..2).map(|c| state.y()[c * 6 + j]).sum();
                    assert!((s - 1.0).abs() < 1e-9, "column {j} sums to {s}");
                }
                // I5: entries within [0,1]
                assert!(state.y().iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
                // I2/I3: aggregates stay within floor/ceil of previous values
                for (prev, cur) in a0.iter().zip(&a1) {
                    assert!(*cur >= fuzzy_floor(*prev, 1e-9) - 1e-9);
                    assert!(*cur <= fuzzy_ceil(*prev, 1e-9) + 1e-9);
                }
                for (prev, cur) in b0.iter().zip(&b1) {
                    assert!(*cur >= fuzzy_floor(*prev, 1e-9) - 1e-9);
                    assert!(*cur <= fuzzy_ceil(*prev, 1e-9) + 1e-9);
                }
                if done {
                    break;
                }
            }
            let out = state.into_assignment().unwrap();
            assert!(out.is_integral());
        }
    }

    #[test]
    fn null_vector_found_while_floating() {
        let instance = inst(&[0.0, 1.0, 2.0, 3.0], &[0, 1, 0, 1], 2);
        let w = vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        let x = AssignmentOf::fractional(vec![0, 3], w, 4).unwrap();
        let mut state = RandomRounding::new(&x, &instance).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // every step until completion must find a null vector (no error)
        while !state.step(&mut rng).unwrap() {}
    }
}
