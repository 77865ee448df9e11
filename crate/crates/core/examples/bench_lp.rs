use fcbc::model::{Bounds, InstanceOf, Norm, ObjectiveKind};
use fcbc::pipeline::{pof_sweep, SeedMethod};
use fcbc::search::Grid;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::time::Instant;

fn main() {
    let n = 1000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // Adult-style: two colors at roughly 2:1, a few Gaussian blobs in 4D
    let blob_centers: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..4).map(|_| rng.gen_range(-10.0..10.0)).collect())
        .collect();
    let mut points = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for _ in 0..n {
        let bi = rng.gen_range(0..blob_centers.len());
        let b = &blob_centers[bi];
        let p: Vec<f64> = b.iter().map(|&c| c + rng.gen_range(-2.0..2.0)).collect();
        points.push(p);
        // color correlates with the blob: some blobs are mostly color 0
        let p0 = if bi % 2 == 0 { 0.78 } else { 0.42 };
        colors.push(usize::from(rng.gen::<f64>() >= p0));
    }
    let r1 = colors.iter().filter(|&&c| c == 0).count() as f64 / n as f64;
    let delta = 0.1;
    let bounds = vec![
        Bounds::new((1.0 - delta) * r1, (1.0 + delta) * r1).unwrap(),
        Bounds::new((1.0 - delta) * (1.0 - r1), (1.0 + delta) * (1.0 - r1)).unwrap(),
    ];
    let inst = InstanceOf::euclidean(points, colors, bounds, Norm::Two).unwrap();

    for k in [5usize, 10] {
        let t = Instant::now();
        let grid = Grid::new(128).unwrap();
        let reports = pof_sweep(
            &inst,
            k,
            ObjectiveKind::Utilitarian,
            &[1.0, 1.1, 1.25, 1.45, 1.7, 2.0],
            &grid,
            SeedMethod::KMeansPp,
            17,
        )
        .unwrap();
        println!("k={k}: {:?} total", t.elapsed());
        for r in &reports {
            println!(
                "  pof={:?} budget={:.2} cost={:.2} util={:.4} minclu={} lp_runs={} {}ms",
                r.pof, r.budget, r.cost, r.objective_value, r.min_cluster, r.lp_runs, r.runtime_ms
            );
        }
    }
}
