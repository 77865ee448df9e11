//! Rounding fractional LP assignments to integral ones.
//!
//! The deterministic path builds the min-cost-flow network of the fractional
//! solution (per-center color nodes, per-center main nodes, point nodes, and
//! a sink; floors of the fractional masses as balances) and reads the optimal
//! integral flow back as an assignment. It guarantees
//!
//! * (i) the p-powered cost does not increase,
//! * (ii) every cluster total stays within floor/ceiling of its fractional
//!   mass,
//! * (iii) every per-cluster color count stays within floor/ceiling of its
//!   fractional mass,
//!
//! and therefore (Lemma-9-style) each color's violation grows by less than
//! 2/L, where L is the smallest rounded cluster.
//!
//! The randomized path (opt-in) rounds by null-space stepping and preserves
//! marginals in expectation; see [`randomized`].

mod mcmf;
pub mod randomized;

pub use randomized::{randomized_round, RandomRounding};

use crate::model::{
    compute_violations, min_cluster_size, AssignmentOf, InstanceOf, Norm,
};
use crate::scalar::{fuzzy_ceil, fuzzy_floor, prop_tol, Real};
use crate::{Error, Result};

use mcmf::MinCostFlow;

/// Mass snap tolerance: fractional sums this close to an integer are treated
/// as that integer when taking floors and ceilings.
const MASS_TOL: f64 = 1e-6;

/// What an arc of the rounding network carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    /// Unit arc from a point node to its center/color node.
    Point { center: usize, point: usize },
    /// Zero-cost aggregation arc (color node -> main node -> sink).
    Aggregate,
}

#[derive(Debug, Clone)]
pub struct FlowArc<F> {
    pub from: usize,
    pub to: usize,
    pub cost: F,
    pub cap: i64,
    pub kind: ArcKind,
}

/// Integral-balance min-cost-flow instance built from a fractional
/// assignment. Node layout: color nodes `v_i^h` at `i·|H|+h`, main nodes
/// `v_i^0` after them, then point nodes, then the sink.
#[derive(Debug, Clone)]
pub struct FlowNetworkOf<F> {
    pub num_nodes: usize,
    pub balances: Vec<i64>,
    pub arcs: Vec<FlowArc<F>>,
    num_centers: usize,
    num_colors: usize,
    num_points: usize,
}

impl<F: Real> FlowNetworkOf<F> {
    fn color_node(&self, center: usize, color: usize) -> usize {
        center * self.num_colors + color
    }

    fn main_node(&self, center: usize) -> usize {
        self.num_centers * self.num_colors + center
    }

    fn point_node(&self, point: usize) -> usize {
        self.num_centers * self.num_colors + self.num_centers + point
    }

    fn sink(&self) -> usize {
        self.num_nodes - 1
    }

    /// Plain-text edge list with a per-node balance header (debugging aid).
    pub fn write_edge_list(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (node, b) in self.balances.iter().enumerate() {
            let _ = writeln!(out, "# node {node} balance {b}");
        }
        for a in &self.arcs {
            let _ = writeln!(out, "{} {} {} {}", a.from, a.to, a.cost.as_f64(), a.cap);
        }
        out
    }
}

/// Build the rounding network of a fractional assignment. The fractional
/// weights translate to a feasible fractional flow of the same p-powered
/// cost, so the optimal integral flow costs no more.
pub fn build_flow_network<F: Real>(
    x: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<FlowNetworkOf<F>> {
    if x.n() != instance.n() {
        return Err(Error::Structural(format!(
            "assignment covers {} points, instance has {}",
            x.n(),
            instance.n()
        )));
    }
    let n = x.n();
    let k = x.k();
    let h = instance.num_colors();
    let tol = F::of(MASS_TOL);
    let p = instance.p();

    let num_nodes = k * h + k + n + 1;
    let mut net = FlowNetworkOf {
        num_nodes,
        balances: vec![0i64; num_nodes],
        arcs: Vec::new(),
        num_centers: k,
        num_colors: h,
        num_points: n,
    };

    let mut color_mass = vec![F::zero(); k * h];
    let mut center_mass = vec![F::zero(); k];
    for c in 0..k {
        for j in 0..n {
            let w = x.weight(c, j);
            if w > F::zero() {
                color_mass[c * h + instance.color(j)] =
                    color_mass[c * h + instance.color(j)] + w;
                center_mass[c] = center_mass[c] + w;
            }
        }
    }

    let color_node = |c: usize, color: usize| c * h + color;
    let main_node = |c: usize| k * h + c;
    let point_node = |j: usize| k * h + k + j;
    let sink = num_nodes - 1;

    let mut floor_sum_total = 0i64;
    for c in 0..k {
        let a_floor = fuzzy_floor(center_mass[c], tol).to_i64().unwrap();
        let a_ceil = fuzzy_ceil(center_mass[c], tol).to_i64().unwrap();
        let mut color_floor_sum = 0i64;
        for color in 0..h {
            let b = color_mass[c * h + color];
            let b_floor = fuzzy_floor(b, tol).to_i64().unwrap();
            let b_ceil = fuzzy_ceil(b, tol).to_i64().unwrap();
            net.balances[color_node(c, color)] = -b_floor;
            color_floor_sum += b_floor;
            net.arcs.push(FlowArc {
                from: color_node(c, color),
                to: main_node(c),
                cost: F::zero(),
                cap: b_ceil - b_floor,
                kind: ArcKind::Aggregate,
            });
        }
        net.balances[main_node(c)] = -(a_floor - color_floor_sum);
        net.arcs.push(FlowArc {
            from: main_node(c),
            to: sink,
            cost: F::zero(),
            cap: a_ceil - a_floor,
            kind: ArcKind::Aggregate,
        });
        floor_sum_total += a_floor;
    }
    for j in 0..n {
        net.balances[point_node(j)] = 1;
        for c in 0..k {
            if x.weight(c, j) > prop_tol::<F>() {
                net.arcs.push(FlowArc {
                    from: point_node(j),
                    to: color_node(c, instance.color(j)),
                    cost: p.power(instance.distance(x.centers()[c], j)),
                    cap: 1,
                    kind: ArcKind::Point { center: c, point: j },
                });
            }
        }
    }
    net.balances[sink] = -(n as i64 - floor_sum_total);
    debug_assert_eq!(net.balances.iter().sum::<i64>(), 0);
    Ok(net)
}

/// An integral minimum-cost flow over a rounding network.
#[derive(Debug, Clone)]
pub struct FlowSolution<F> {
    /// Flow on each arc, aligned with `FlowNetworkOf::arcs`.
    pub arc_flow: Vec<i64>,
    /// Total cost over point arcs.
    pub cost: F,
}

/// Solve the network exactly: successive shortest paths on integral balances
/// give an integral optimum with cost at most that of any fractional flow.
pub fn solve_mcmf<F: Real>(network: &FlowNetworkOf<F>) -> Result<FlowSolution<F>> {
    if network.balances.iter().sum::<i64>() != 0 {
        return Err(Error::Structural("flow network balances do not sum to 0".into()));
    }
    let n = network.num_nodes;
    let mut g = MinCostFlow::new(n + 2);
    let source = n;
    let sink = n + 1;
    let edge_ids: Vec<usize> = network
        .arcs
        .iter()
        .map(|a| g.add_edge(a.from, a.to, a.cap, a.cost))
        .collect();
    let mut supply = 0i64;
    for (node, &b) in network.balances.iter().enumerate() {
        if b > 0 {
            g.add_edge(source, node, b, F::zero());
            supply += b;
        } else if b < 0 {
            g.add_edge(node, sink, -b, F::zero());
        }
    }
    let (shipped, cost) = g.solve(source, sink, supply);
    if shipped < supply {
        return Err(Error::Structural(format!(
            "flow network is infeasible: shipped {shipped} of {supply}"
        )));
    }
    let arc_flow = edge_ids.iter().map(|&e| g.flow_on(e)).collect();
    Ok(FlowSolution { arc_flow, cost })
}

/// Deterministic network-flow rounding. Integral inputs are returned
/// unchanged; fractional ones are rounded so that the cost does not increase
/// and cluster totals and per-color counts stay within floor/ceiling of the
/// fractional masses.
pub fn round_assignment<F: Real>(
    x: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<AssignmentOf<F>> {
    if x.is_integral() {
        return Ok(x.clone());
    }
    let network = build_flow_network(x, instance)?;
    let solution = solve_mcmf(&network)?;
    let mut labels = vec![usize::MAX; x.n()];
    for (arc, &flow) in network.arcs.iter().zip(&solution.arc_flow) {
        if flow > 0 {
            if let ArcKind::Point { center, point } = arc.kind {
                labels[point] = center;
            }
        }
    }
    if let Some(j) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(Error::SolverFailure(format!(
            "flow rounding left point {j} unassigned"
        )));
    }
    AssignmentOf::from_labels(x.centers().to_vec(), &labels, x.n())
}

/// Measured per-color violation increases of a rounded assignment relative
/// to the fractional one it came from. Errors when any increase reaches the
/// 2/L bound (L = smallest rounded cluster).
pub fn violation_after_rounding<F: Real>(
    rounded: &AssignmentOf<F>,
    fractional: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<Vec<F>> {
    let before = compute_violations(fractional, instance)?;
    let after = compute_violations(rounded, instance)?;
    let l = min_cluster_size(rounded)?;
    let bound = F::of(2.0) / F::from_usize(l).unwrap();
    let mut increases = Vec::with_capacity(before.delta.len());
    for (h, (&a, &b)) in after.delta.iter().zip(&before.delta).enumerate() {
        let inc = a - b;
        if inc >= bound {
            return Err(Error::PropertyViolation(format!(
                "color {h}: violation grew by {} >= 2/L = {}",
                inc.as_f64(),
                bound.as_f64()
            )));
        }
        increases.push(inc);
    }
    Ok(increases)
}

/// The p-powered assignment cost (no final root), the quantity properties
/// (i) compares.
pub fn powered_cost<F: Real>(x: &AssignmentOf<F>, instance: &InstanceOf<F>) -> F {
    let p = instance.p();
    let mut total = F::zero();
    for c in 0..x.k() {
        for j in 0..x.n() {
            let w = x.weight(c, j);
            if w > F::zero() {
                total = total + p.power(instance.distance(x.centers()[c], j)) * w;
            }
        }
    }
    total
}

/// Check properties (i)-(iii) of a rounded assignment against its fractional
/// source; returns an error naming the first failed property. For p = ∞,
/// property (i) becomes radius preservation over the support.
pub fn check_rounding_properties<F: Real>(
    rounded: &AssignmentOf<F>,
    fractional: &AssignmentOf<F>,
    instance: &InstanceOf<F>,
) -> Result<()> {
    let tol = F::of(MASS_TOL);
    // (i) cost
    match instance.p() {
        Norm::Infinity => {
            let before = crate::model::clustering_cost(fractional, instance)?;
            let after = crate::model::clustering_cost(rounded, instance)?;
            if after > before + F::of(1e-9) {
                return Err(Error::PropertyViolation(format!(
                    "radius grew from {} to {}",
                    before.as_f64(),
                    after.as_f64()
                )));
            }
        }
        _ => {
            let before = powered_cost(fractional, instance);
            let after = powered_cost(rounded, instance);
            if after > before + F::of(1e-9) * (F::one() + before) {
                return Err(Error::PropertyViolation(format!(
                    "cost grew from {} to {}",
                    before.as_f64(),
                    after.as_f64()
                )));
            }
        }
    }
    // (ii) cluster totals and (iii) color counts within floor/ceil
    let h = instance.num_colors();
    for c in 0..rounded.k() {
        let mut frac_total = F::zero();
        let mut frac_color = vec![F::zero(); h];
        let mut int_total = 0i64;
        let mut int_color = vec![0i64; h];
        for j in 0..rounded.n() {
            let wf = fractional.weight(c, j);
            if wf > F::zero() {
                frac_total = frac_total + wf;
                frac_color[instance.color(j)] = frac_color[instance.color(j)] + wf;
            }
            if rounded.weight(c, j) > F::of(0.5) {
                int_total += 1;
                int_color[instance.color(j)] += 1;
            }
        }
        let lo = fuzzy_floor(frac_total, tol).to_i64().unwrap();
        let hi = fuzzy_ceil(frac_total, tol).to_i64().unwrap();
        if int_total < lo || int_total > hi {
            return Err(Error::PropertyViolation(format!(
                "cluster {c} total {int_total} outside [{lo},{hi}]"
            )));
        }
        for color in 0..h {
            let lo = fuzzy_floor(frac_color[color], tol).to_i64().unwrap();
            let hi = fuzzy_ceil(frac_color[color], tol).to_i64().unwrap();
            if int_color[color] < lo || int_color[color] > hi {
                return Err(Error::PropertyViolation(format!(
                    "cluster {c} color {color} count {} outside [{lo},{hi}]",
                    int_color[color]
                )));
            }
        }
    }
    Ok(())
}
