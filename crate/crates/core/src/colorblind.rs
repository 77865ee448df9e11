//! Color-blind seed clusterers: they produce the center set S that the fair
//! assignment stage works against, together with the method's declared
//! approximation ratio.
//!
//! Candidate centers are always data points; the search LP assumes discrete
//! centers from the point set.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::model::{clustering_cost, AssignmentOf, InstanceOf, Norm};
use crate::scalar::Real;
use crate::{Error, Result};

/// A seeded center set with its nearest assignment, cost, and the declared
/// approximation ratio of the method that produced it.
#[derive(Debug, Clone)]
pub struct SeedResultOf<F> {
    pub centers: Vec<usize>,
    pub nearest_assignment: AssignmentOf<F>,
    pub cost: F,
    /// Declared approximation ratio α. For k-means++ the O(log k) ratio is
    /// recorded as the surrogate 2·ln(k) + 2.
    pub alpha: F,
}

fn validate_k<F: Real>(instance: &InstanceOf<F>, k: usize) -> Result<()> {
    if k == 0 || k > instance.n() {
        return Err(Error::Structural(format!(
            "k = {k} must lie in 1..={}",
            instance.n()
        )));
    }
    Ok(())
}

/// Assign every point to its closest center, ties broken by the lowest
/// center index.
pub fn nearest_assignment<F: Real>(
    instance: &InstanceOf<F>,
    centers: &[usize],
) -> Result<AssignmentOf<F>> {
    if centers.is_empty() {
        return Err(Error::Structural("center set is empty".into()));
    }
    let labels: Vec<usize> = (0..instance.n())
        .map(|j| {
            let mut best = 0usize;
            for (c, &center) in centers.iter().enumerate() {
                if instance.distance(center, j) < instance.distance(centers[best], j) {
                    best = c;
                }
            }
            best
        })
        .collect();
    AssignmentOf::from_labels(centers.to_vec(), &labels, instance.n())
}

fn seed_result<F: Real>(
    instance: &InstanceOf<F>,
    centers: Vec<usize>,
    alpha: F,
) -> Result<SeedResultOf<F>> {
    let nearest = nearest_assignment(instance, &centers)?;
    let cost = clustering_cost(&nearest, instance)?;
    Ok(SeedResultOf { centers, nearest_assignment: nearest, cost, alpha })
}

/// Distance of every point to its nearest chosen center, raised to `power`.
fn min_dist_powers<F: Real>(instance: &InstanceOf<F>, centers: &[usize], power: Norm) -> Vec<F> {
    (0..instance.n())
        .map(|j| {
            let d = centers
                .iter()
                .map(|&c| instance.distance(c, j))
                .fold(F::infinity(), F::min);
            power.power(d)
        })
        .collect()
}

/// Sample an index proportionally to `weights` (uniform fallback when all
/// weights vanish, e.g. every point coincides with a center).
fn weighted_pick<F: Real>(weights: &[F], rng: &mut impl Rng) -> usize {
    let total: F = weights.iter().copied().sum();
    if total <= F::zero() {
        return rng.gen_range(0..weights.len());
    }
    let target = F::of(rng.gen::<f64>()) * total;
    let mut acc = F::zero();
    for (i, &w) in weights.iter().enumerate() {
        acc = acc + w;
        if acc >= target {
            return i;
        }
    }
    weights.len() - 1
}

/// k-means++: D²-weighted sequential seeding followed by Lloyd-style
/// refinement with centers restricted to data points (the medoid of each
/// cluster under squared distances). Deterministic given the seed.
pub fn kmeans_pp_seed<F: Real>(
    instance: &InstanceOf<F>,
    k: usize,
    rng_seed: u64,
) -> Result<SeedResultOf<F>> {
    validate_k(instance, k)?;
    if instance.p() != Norm::Two {
        return Err(Error::Structural("k-means++ seeding requires the p = 2 objective".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = instance.n();
    let mut centers = vec![rng.gen_range(0..n)];
    while centers.len() < k {
        let weights = min_dist_powers(instance, &centers, Norm::Two);
        centers.push(weighted_pick(&weights, &mut rng));
    }

    // Lloyd refinement over the discrete candidate set.
    for _ in 0..100 {
        let assignment = nearest_assignment(instance, &centers)?;
        let labels = assignment.labels()?;
        let mut next = centers.clone();
        for (c, center) in next.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == c).collect();
            if members.is_empty() {
                continue;
            }
            let mut best = *center;
            let mut best_cost = F::infinity();
            for &candidate in &members {
                let cost: F = members
                    .iter()
                    .map(|&j| {
                        let d = instance.distance(candidate, j);
                        d * d
                    })
                    .sum();
                if cost < best_cost {
                    best_cost = cost;
                    best = candidate;
                }
            }
            *center = best;
        }
        if next == centers {
            break;
        }
        centers = next;
    }

    let k_f = F::from_usize(k).unwrap();
    let alpha = F::of(2.0) * k_f.ln() + F::of(2.0);
    seed_result(instance, centers, alpha)
}

/// Farthest-point greedy for k-center: repeatedly add the point farthest
/// from the current centers, starting from `first`. A 2-approximation.
pub fn gonzalez_kcenter<F: Real>(
    instance: &InstanceOf<F>,
    k: usize,
    first: usize,
) -> Result<SeedResultOf<F>> {
    validate_k(instance, k)?;
    if first >= instance.n() {
        return Err(Error::Structural(format!("first center {first} out of range")));
    }
    let n = instance.n();
    let mut centers = vec![first];
    let mut dist: Vec<F> = (0..n).map(|j| instance.distance(first, j)).collect();
    while centers.len() < k {
        let mut far = 0usize;
        for j in 1..n {
            if dist[j] > dist[far] {
                far = j;
            }
        }
        centers.push(far);
        for j in 0..n {
            dist[j] = dist[j].min(instance.distance(far, j));
        }
    }
    seed_result(instance, centers, F::of(2.0))
}

/// Local-search k-median: D-sampling initialization, then single swaps
/// accepted while they improve the cost by more than the relative threshold
/// 1e-4. Declared ratio 5.
pub fn local_search_kmedian<F: Real>(
    instance: &InstanceOf<F>,
    k: usize,
    rng_seed: u64,
) -> Result<SeedResultOf<F>> {
    validate_k(instance, k)?;
    if instance.p() != Norm::One {
        return Err(Error::Structural(
            "k-median local search requires the p = 1 objective".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = instance.n();
    let mut centers = vec![rng.gen_range(0..n)];
    while centers.len() < k {
        let weights = min_dist_powers(instance, &centers, Norm::One);
        centers.push(weighted_pick(&weights, &mut rng));
    }

    // d1/d2: distance to the nearest and second-nearest center, with the
    // nearest center's position; enables O(n) swap evaluation.
    let recompute = |centers: &[usize]| {
        let mut d1 = vec![F::infinity(); n];
        let mut d2 = vec![F::infinity(); n];
        let mut c1 = vec![0usize; n];
        for j in 0..n {
            for (c, &center) in centers.iter().enumerate() {
                let d = instance.distance(center, j);
                if d < d1[j] {
                    d2[j] = d1[j];
                    d1[j] = d;
                    c1[j] = c;
                } else if d < d2[j] {
                    d2[j] = d;
                }
            }
        }
        (d1, d2, c1)
    };

    let mut cost: F = {
        let (d1, _, _) = recompute(&centers);
        d1.iter().copied().sum()
    };
    let threshold = F::one() - F::of(1e-4);
    loop {
        let (d1, d2, c1) = recompute(&centers);
        let mut best_swap: Option<(usize, usize, F)> = None;
        for q in 0..n {
            if centers.contains(&q) {
                continue;
            }
            for out in 0..centers.len() {
                let mut new_cost = F::zero();
                for j in 0..n {
                    let dq = instance.distance(q, j);
                    let base = if c1[j] == out { d2[j] } else { d1[j] };
                    new_cost = new_cost + base.min(dq);
                }
                if best_swap.map_or(true, |(_, _, c)| new_cost < c) {
                    best_swap = Some((out, q, new_cost));
                }
            }
        }
        match best_swap {
            Some((out, q, new_cost)) if new_cost < cost * threshold => {
                centers[out] = q;
                cost = new_cost;
            }
            _ => break,
        }
    }
    seed_result(instance, centers, F::of(5.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Bounds;

    type Inst = InstanceOf<f64>;

    fn inst(positions: &[f64], p: Norm) -> Inst {
        let colors: Vec<usize> = positions.iter().enumerate().map(|(i, _)| i % 2).collect();
        Inst::euclidean(
            positions.iter().map(|&x| vec![x]).collect(),
            colors,
            vec![Bounds::new(0.25, 0.75).unwrap(); 2],
            p,
        )
        .unwrap()
    }

    #[test]
    fn kmeans_zero_cost_on_coinciding_groups() {
        // two coinciding groups, k = 2 centers
        let inst = inst(&[1.0, 1.0, 1.0, 5.0, 5.0, 5.0], Norm::Two);
        let seed = kmeans_pp_seed(&inst, 2, 42).unwrap();
        assert_eq!(seed.cost, 0.0);
    }

    #[test]
    fn kmeans_single_point() {
        let inst = inst(&[3.0], Norm::Two);
        let seed = kmeans_pp_seed(&inst, 1, 0).unwrap();
        assert_eq!(seed.centers, vec![0]);
        assert_eq!(seed.cost, 0.0);
    }

    #[test]
    fn kmeans_deterministic_given_seed() {
        let positions: Vec<f64> = (0..60).map(|i| ((i * 37) % 101) as f64).collect();
        let inst = inst(&positions, Norm::Two);
        let a = kmeans_pp_seed(&inst, 5, 7).unwrap();
        let b = kmeans_pp_seed(&inst, 5, 7).unwrap();
        assert_eq!(a.centers, b.centers);
        assert_eq!(a.cost.to_bits(), b.cost.to_bits());
    }

    #[test]
    fn kmeans_requires_p_two() {
        let inst = inst(&[0.0, 1.0], Norm::One);
        assert!(kmeans_pp_seed(&inst, 1, 0).is_err());
    }

    #[test]
    fn gonzalez_collinear() {
        // {0,4,10}, k=2, first=0: farthest from 0 is 10; radius 4
        let inst = inst(&[0.0, 4.0, 10.0], Norm::Infinity);
        let seed = gonzalez_kcenter(&inst, 2, 0).unwrap();
        assert_eq!(seed.centers, vec![0, 2]);
        assert_eq!(seed.cost, 4.0);
    }

    #[test]
    fn gonzalez_all_points_centers() {
        let inst = inst(&[0.0, 1.0, 2.0, 5.0], Norm::Infinity);
        let seed = gonzalez_kcenter(&inst, 4, 0).unwrap();
        assert_eq!(seed.cost, 0.0);
    }

    #[test]
    fn gonzalez_duplicates_only() {
        let inst = inst(&[2.0, 2.0, 2.0], Norm::Infinity);
        let seed = gonzalez_kcenter(&inst, 1, 0).unwrap();
        assert_eq!(seed.cost, 0.0);
    }

    #[test]
    fn gonzalez_rejects_large_k() {
        let inst = inst(&[0.0, 1.0], Norm::Infinity);
        assert!(gonzalez_kcenter(&inst, 3, 0).is_err());
    }

    fn optimal_kcenter_radius(inst: &Inst, k: usize) -> f64 {
        fn search(
            inst: &Inst,
            subset: &mut Vec<usize>,
            pos: usize,
            start: usize,
            opt: &mut f64,
        ) {
            let n = inst.n();
            if pos == subset.len() {
                let radius = (0..n)
                    .map(|j| {
                        subset
                            .iter()
                            .map(|&c| inst.distance(c, j))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0, f64::max);
                *opt = opt.min(radius);
                return;
            }
            for c in start..n {
                subset[pos] = c;
                search(inst, subset, pos + 1, c + 1, opt);
            }
        }
        let mut opt = f64::INFINITY;
        search(inst, &mut vec![0usize; k], 0, 0, &mut opt);
        opt
    }

    #[test]
    fn gonzalez_within_factor_two_of_optimum() {
        let positions = [0.0, 1.5, 3.0, 7.0, 8.0, 13.0, 14.5, 20.0];
        let inst = inst(&positions, Norm::Infinity);
        for k in 1..=3usize {
            let opt = optimal_kcenter_radius(&inst, k);
            let seed = gonzalez_kcenter(&inst, k, 0).unwrap();
            assert!(seed.cost <= 2.0 * opt + 1e-12, "k={k}: {} > 2*{opt}", seed.cost);
        }
    }

    #[test]
    fn local_search_k_equals_n() {
        let inst = inst(&[0.0, 2.0, 5.0], Norm::One);
        let seed = local_search_kmedian(&inst, 3, 1).unwrap();
        assert_eq!(seed.cost, 0.0);
    }

    #[test]
    fn local_search_three_collinear() {
        // {0,1,10}, k=1: center 1 with cost 10 beats 0 (11) and 10 (19)
        let inst = inst(&[0.0, 1.0, 10.0], Norm::One);
        let seed = local_search_kmedian(&inst, 1, 3).unwrap();
        assert_eq!(seed.centers, vec![1]);
        assert_eq!(seed.cost, 10.0);
    }

    #[test]
    fn local_search_deterministic() {
        let positions: Vec<f64> = (0..40).map(|i| ((i * 53) % 89) as f64).collect();
        let inst = inst(&positions, Norm::One);
        let a = local_search_kmedian(&inst, 4, 9).unwrap();
        let b = local_search_kmedian(&inst, 4, 9).unwrap();
        assert_eq!(a.centers, b.centers);
        assert_eq!(a.cost.to_bits(), b.cost.to_bits());
    }

    #[test]
    fn seed_cost_matches_clustering_cost() {
        let positions: Vec<f64> = (0..20).map(|i| ((i * 13) % 31) as f64).collect();
        let inst = inst(&positions, Norm::Two);
        let seed = kmeans_pp_seed(&inst, 3, 11).unwrap();
        let recomputed = clustering_cost(&seed.nearest_assignment, &inst).unwrap();
        assert_eq!(seed.cost.to_bits(), recomputed.to_bits());
    }
}
