//! Domain model: instances, assignments, violations, and derived statistics.
//!
//! All types are immutable values after construction, so any operation may run
//! concurrently on shared instances.

use crate::scalar::{prop_tol, Real};
use crate::{Error, Result};

/// Dense color identifier, `0..num_colors`.
pub type ColorId = usize;

/// Point count above which pairwise distances are computed on demand instead
/// of being cached as a dense matrix.
const DENSE_METRIC_LIMIT: usize = 20_000;

/// Objective exponent selecting the clustering cost: k-median, k-means, or
/// k-center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// p = 1 (k-median).
    One,
    /// p = 2 (k-means).
    Two,
    /// p = ∞ (k-center).
    Infinity,
}

impl Norm {
    /// d^p for the finite exponents; identity for p = ∞ (where only the max
    /// matters).
    pub fn power<F: Real>(self, d: F) -> F {
        match self {
            Norm::One | Norm::Infinity => d,
            Norm::Two => d * d,
        }
    }

    /// Inverse of [`Norm::power`]: the 1/p-th root.
    pub fn root<F: Real>(self, v: F) -> F {
        match self {
            Norm::One | Norm::Infinity => v,
            Norm::Two => v.sqrt(),
        }
    }
}

/// Per-color proportion bounds `0 < beta <= alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<F> {
    /// Lower proportion bound β_h.
    pub beta: F,
    /// Upper proportion bound α_h.
    pub alpha: F,
}

impl<F: Real> Bounds<F> {
    pub fn new(beta: F, alpha: F) -> Result<Self> {
        if !(beta > F::zero() && beta <= alpha && alpha < F::one()) {
            return Err(Error::Structural(format!(
                "proportion bounds must satisfy 0 < beta <= alpha < 1, got beta={}, alpha={}",
                beta, alpha
            )));
        }
        Ok(Self { beta, alpha })
    }

    /// Symmetric bounds around a base proportion: `beta = (1-delta) r`,
    /// `alpha = (1+delta) r`.
    pub fn symmetric(r: F, delta: F) -> Result<Self> {
        Self::new((F::one() - delta) * r, (F::one() + delta) * r)
    }
}

#[derive(Debug, Clone)]
enum Metric<F> {
    Dense(Vec<F>),
    Euclidean,
}

/// A colored point set with a metric, an objective exponent, and per-color
/// proportion bounds.
#[derive(Debug, Clone)]
pub struct InstanceOf<F> {
    points: Vec<Vec<F>>,
    colors: Vec<ColorId>,
    bounds: Vec<Bounds<F>>,
    p: Norm,
    metric: Metric<F>,
}

impl<F: Real> InstanceOf<F> {
    /// Build an instance over coordinate tuples with the Euclidean metric.
    /// Distances are cached densely for small instances.
    pub fn euclidean(
        points: Vec<Vec<F>>,
        colors: Vec<ColorId>,
        bounds: Vec<Bounds<F>>,
        p: Norm,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Structural("instance has no points".into()));
        }
        let dim = points[0].len();
        if points.iter().any(|q| q.len() != dim) {
            return Err(Error::Structural("points have inconsistent dimensions".into()));
        }
        Self::validate_colors(&colors, n, &bounds)?;
        let metric = if n <= DENSE_METRIC_LIMIT {
            let mut d = vec![F::zero(); n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = euclidean_distance(&points[i], &points[j]);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            Metric::Dense(d)
        } else {
            Metric::Euclidean
        };
        Ok(Self { points, colors, bounds, p, metric })
    }

    /// Build an instance from a precomputed distance matrix (row-major,
    /// `n * n`). The matrix must be symmetric with a zero diagonal; the
    /// triangle inequality is the caller's contract.
    pub fn from_distance_matrix(
        matrix: Vec<F>,
        colors: Vec<ColorId>,
        bounds: Vec<Bounds<F>>,
        p: Norm,
    ) -> Result<Self> {
        let n = colors.len();
        if n == 0 {
            return Err(Error::Structural("instance has no points".into()));
        }
        if matrix.len() != n * n {
            return Err(Error::Structural(format!(
                "distance matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        for i in 0..n {
            if matrix[i * n + i] != F::zero() {
                return Err(Error::Structural(format!("distance({i},{i}) must be 0")));
            }
            for j in 0..n {
                let v = matrix[i * n + j];
                if v < F::zero() {
                    return Err(Error::Structural(format!("distance({i},{j}) is negative")));
                }
                if v != matrix[j * n + i] {
                    return Err(Error::Structural(format!("distance matrix asymmetric at ({i},{j})")));
                }
            }
        }
        Self::validate_colors(&colors, n, &bounds)?;
        Ok(Self { points: Vec::new(), colors, bounds, p, metric: Metric::Dense(matrix) })
    }

    fn validate_colors(colors: &[ColorId], n: usize, bounds: &[Bounds<F>]) -> Result<()> {
        if colors.len() != n {
            return Err(Error::Structural(format!(
                "{} colors for {} points",
                colors.len(),
                n
            )));
        }
        let num_colors = bounds.len();
        if num_colors == 0 {
            return Err(Error::Structural("no color bounds given".into()));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= num_colors) {
            return Err(Error::Structural(format!(
                "color id {c} out of range for {num_colors} colors"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn num_colors(&self) -> usize {
        self.bounds.len()
    }

    pub fn color(&self, j: usize) -> ColorId {
        self.colors[j]
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }

    pub fn bounds(&self, h: ColorId) -> Bounds<F> {
        self.bounds[h]
    }

    pub fn p(&self) -> Norm {
        self.p
    }

    pub fn points(&self) -> &[Vec<F>] {
        &self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> F {
        match &self.metric {
            Metric::Dense(d) => d[i * self.n() + j],
            Metric::Euclidean => euclidean_distance(&self.points[i], &self.points[j]),
        }
    }

    /// Number of points of each color.
    pub fn color_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_colors()];
        for &c in &self.colors {
            counts[c] += 1;
        }
        counts
    }

    /// Dataset proportion r_h of each color.
    pub fn proportions(&self) -> Vec<F> {
        let n = F::from_usize(self.n()).unwrap();
        self.color_counts()
            .into_iter()
            .map(|c| F::from_usize(c).unwrap() / n)
            .collect()
    }
}

fn euclidean_distance<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<F>()
        .sqrt()
}

/// An assignment of points to a center set `S`: weights `x_ij ∈ [0,1]` with
/// unit column sums. `integral` is true iff every weight is 0 or 1.
#[derive(Debug, Clone)]
pub struct AssignmentOf<F> {
    centers: Vec<usize>,
    weights: Vec<F>, // k × n, row-major by center position
    integral: bool,
}

impl<F: Real> AssignmentOf<F> {
    /// Integral assignment from per-point labels (`labels[j]` indexes into
    /// `centers`).
    pub fn from_labels(centers: Vec<usize>, labels: &[usize], n: usize) -> Result<Self> {
        if labels.len() != n {
            return Err(Error::Structural(format!("{} labels for {} points", labels.len(), n)));
        }
        let k = centers.len();
        let mut weights = vec![F::zero(); k * n];
        for (j, &c) in labels.iter().enumerate() {
            if c >= k {
                return Err(Error::Structural(format!("label {c} out of range for {k} centers")));
            }
            weights[c * n + j] = F::one();
        }
        Ok(Self { centers, weights, integral: true })
    }

    /// Fractional assignment from an explicit weight matrix (row-major,
    /// `centers.len() * n`). Column sums must be 1 within tolerance.
    pub fn fractional(centers: Vec<usize>, weights: Vec<F>, n: usize) -> Result<Self> {
        let k = centers.len();
        if weights.len() != k * n {
            return Err(Error::Structural(format!(
                "weight matrix has {} entries, expected {}",
                weights.len(),
                k * n
            )));
        }
        let tol = F::of(1e-6);
        let mut integral = true;
        for j in 0..n {
            let mut sum = F::zero();
            for c in 0..k {
                let w = weights[c * n + j];
                if w < -tol || w > F::one() + tol {
                    return Err(Error::Structural(format!(
                        "weight x[{c}][{j}] = {w} outside [0,1]"
                    )));
                }
                if (w - w.round()).abs() > prop_tol::<F>() {
                    integral = false;
                }
                sum = sum + w;
            }
            if (sum - F::one()).abs() > tol {
                return Err(Error::Structural(format!(
                    "column {j} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { centers, weights, integral })
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn n(&self) -> usize {
        if self.centers.is_empty() {
            0
        } else {
            self.weights.len() / self.centers.len()
        }
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// Weight of point `j` on the center at position `c` in `S`.
    pub fn weight(&self, c: usize, j: usize) -> F {
        self.weights[c * self.n() + j]
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// For an integral assignment, the center position each point maps to.
    pub fn labels(&self) -> Result<Vec<usize>> {
        if !self.integral {
            return Err(Error::Structural("labels requested on a fractional assignment".into()));
        }
        let n = self.n();
        let mut out = vec![0usize; n];
        for j in 0..n {
            let c = (0..self.k())
                .find(|&c| self.weight(c, j) > F::of(0.5))
                .ok_or_else(|| Error::Structural(format!("point {j} has no assigned center")))?;
            out[j] = c;
        }
        Ok(out)
    }
}

/// Per-color worst proportional violation, each entry in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationVectorOf<F> {
    pub delta: Vec<F>,
}

impl<F: Real> ViolationVectorOf<F> {
    pub fn new(delta: Vec<F>) -> Self {
        Self { delta }
    }

    /// Constant vector, one entry per color.
    pub fn uniform(level: F, num_colors: usize) -> Self {
        Self { delta: vec![level; num_colors] }
    }
}

/// Per-cluster masses and color masses of an assignment, plus the smallest
/// non-empty cluster size.
#[derive(Debug, Clone)]
pub struct ClusterStatsOf<F> {
    /// Per-cluster point mass |P_i| (fractional totals permitted).
    pub sizes: Vec<F>,
    /// Per-cluster, per-color mass |P_i^h|.
    pub color_counts: Vec<Vec<F>>,
    /// Smallest non-empty cluster size L.
    pub min_nonempty_size: F,
}

/// Aggregate cluster masses and per-color masses for an assignment.
pub fn cluster_stats<F: Real>(
    assignment: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<ClusterStatsOf<F>> {
    check_dims(assignment, instance)?;
    let k = assignment.k();
    let h = instance.num_colors();
    let mut sizes = vec![F::zero(); k];
    let mut color_counts = vec![vec![F::zero(); h]; k];
    for c in 0..k {
        for j in 0..assignment.n() {
            let w = assignment.weight(c, j);
            if w > F::zero() {
                sizes[c] = sizes[c] + w;
                color_counts[c][instance.color(j)] = color_counts[c][instance.color(j)] + w;
            }
        }
    }
    let min_nonempty_size = sizes
        .iter()
        .copied()
        .filter(|&s| s > prop_tol::<F>())
        .fold(F::infinity(), F::min);
    Ok(ClusterStatsOf { sizes, color_counts, min_nonempty_size })
}

fn check_dims<F: Real>(assignment: &AssignmentOf<F>, instance: &InstanceOf<F>) -> Result<()> {
    if assignment.n() != instance.n() {
        return Err(Error::Structural(format!(
            "assignment covers {} points, instance has {}",
            assignment.n(),
            instance.n()
        )));
    }
    if let Some(&c) = assignment.centers().iter().find(|&&c| c >= instance.n()) {
        return Err(Error::Structural(format!("center index {c} out of range")));
    }
    Ok(())
}

/// Clustering cost `(Σ_j d^p(j, φ(j)))^{1/p}`; for p = ∞ the largest distance
/// carrying positive weight. Fractional weights contribute linearly inside
/// the p-th power.
pub fn clustering_cost<F: Real>(
    assignment: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<F> {
    check_dims(assignment, instance)?;
    let p = instance.p();
    match p {
        Norm::Infinity => {
            let mut radius = F::zero();
            for (c, &center) in assignment.centers().iter().enumerate() {
                for j in 0..assignment.n() {
                    if assignment.weight(c, j) > prop_tol::<F>() {
                        radius = radius.max(instance.distance(center, j));
                    }
                }
            }
            Ok(radius)
        }
        _ => {
            let mut total = F::zero();
            for (c, &center) in assignment.centers().iter().enumerate() {
                for j in 0..assignment.n() {
                    let w = assignment.weight(c, j);
                    if w > F::zero() {
                        total = total + p.power(instance.distance(center, j)) * w;
                    }
                }
            }
            Ok(p.root(total))
        }
    }
}

/// Worst proportional violation per color: the smallest Δ_h such that every
/// non-empty cluster i satisfies
/// `(β_h − Δ_h)|P_i| ≤ |P_i^h| ≤ (α_h + Δ_h)|P_i|`, clamped to `[0,1]`.
/// Empty clusters contribute no violation.
pub fn compute_violations<F: Real>(
    assignment: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<ViolationVectorOf<F>> {
    let stats = cluster_stats(assignment, instance)?;
    let h = instance.num_colors();
    let mut delta = vec![F::zero(); h];
    for (i, &size) in stats.sizes.iter().enumerate() {
        if size <= prop_tol::<F>() {
            continue;
        }
        for (c, d) in delta.iter_mut().enumerate() {
            let share = stats.color_counts[i][c] / size;
            let b = instance.bounds(c);
            let over = share - b.alpha;
            let under = b.beta - share;
            *d = d.max(over).max(under);
        }
    }
    for d in delta.iter_mut() {
        *d = d.max(F::zero()).min(F::one());
    }
    Ok(ViolationVectorOf::new(delta))
}

/// Fairness objective over a violation vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// Σ_h Δ_h.
    Utilitarian,
    /// max_h Δ_h.
    Egalitarian,
    /// Iterated minimization of descending-sorted violations; scalar value
    /// reported as the maximum entry.
    Leximin,
}

/// Scalar objective value of a violation vector. Leximin reports the maximum
/// entry (the full vector carries the rest of the order).
pub fn objective_value<F: Real>(v: &ViolationVectorOf<F>, kind: ObjectiveKind) -> F {
    match kind {
        ObjectiveKind::Utilitarian => v.delta.iter().copied().sum(),
        ObjectiveKind::Egalitarian | ObjectiveKind::Leximin => {
            v.delta.iter().copied().fold(F::zero(), F::max)
        }
    }
}

/// Smallest non-empty cluster size L. Integral assignments take the minimum
/// point count; fractional ones the minimum `⌈Σ_j x_ij⌉` over clusters with
/// mass at least 1.
pub fn min_cluster_size<F: Real>(assignment: &AssignmentOf<F>) -> Result<usize> {
    let k = assignment.k();
    let n = assignment.n();
    let mut best: Option<usize> = None;
    for c in 0..k {
        let mut mass = F::zero();
        for j in 0..n {
            mass = mass + assignment.weight(c, j);
        }
        let mass = crate::scalar::snap_to_integer(mass, F::of(1e-6));
        if mass >= F::one() {
            let size = mass.ceil().to_usize().unwrap_or(usize::MAX);
            best = Some(best.map_or(size, |b| b.min(size)));
        }
    }
    best.ok_or_else(|| Error::Structural("assignment has no non-empty cluster".into()))
}

/// Price of fairness: fair cost over color-blind cost.
pub fn pof<F: Real>(fair_cost: F, colorblind_cost: F) -> Result<F> {
    if colorblind_cost <= F::zero() {
        return Err(Error::Structural(format!(
            "color-blind cost must be positive, got {colorblind_cost}"
        )));
    }
    Ok(fair_cost / colorblind_cost)
}
