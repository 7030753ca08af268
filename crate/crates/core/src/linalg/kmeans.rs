use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::DenseMatrix;
use super::LinalgError;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centers: DenseMatrix,
    pub wcss: f64,
}

/// Best-of-`n_init` Lloyd runs with k-means++ seeding.
///
/// Each restart derives its own child seed, so results are deterministic for
/// a fixed `seed` regardless of scheduling. An empty cluster is re-seeded at
/// the point farthest from its assigned center.
pub fn kmeans(
    points: &DenseMatrix,
    k: usize,
    n_init: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<KMeansResult, LinalgError> {
    let n = points.rows();
    if n == 0 {
        return Err(LinalgError::InvalidArgument("empty input".into()));
    }
    if k == 0 || k > n {
        return Err(LinalgError::InvalidArgument(format!(
            "k={k} must be in 1..={n}"
        )));
    }
    let n_init = n_init.max(1);
    let mut best: Option<KMeansResult> = None;
    for restart in 0..n_init {
        let child = seed
            .wrapping_mul(0x9e3779b97f4a7c15)
            .wrapping_add(restart as u64);
        let run = lloyd_run(points, k, max_iter, tol, child);
        if best.as_ref().map_or(true, |b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lloyd_run(points: &DenseMatrix, k: usize, max_iter: usize, tol: f64, seed: u64) -> KMeansResult {
    let n = points.rows();
    let d = points.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centers.push(points.row(first).to_vec());
    let mut dists: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dists.iter().sum();
        let idx = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in dists.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(points.row(idx).to_vec());
        for i in 0..n {
            let dd = sq_dist(points.row(i), centers.last().unwrap());
            if dd < dists[i] {
                dists[i] = dd;
            }
        }
    }

    let mut labels = vec![0usize; n];
    let mut wcss = f64::INFINITY;
    for _ in 0..max_iter.max(1) {
        // assignment
        let mut new_wcss = 0.0;
        for i in 0..n {
            let row = points.row(i);
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, ctr) in centers.iter().enumerate() {
                let dd = sq_dist(row, ctr);
                if dd < best_d {
                    best_d = dd;
                    best_c = c;
                }
            }
            labels[i] = best_c;
            new_wcss += best_d;
        }

        // update
        let mut sums = vec![vec![0.0f64; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, &x) in sums[labels[i]].iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // re-seed at the point farthest from its current center
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(points.row(a), &centers[labels[a]])
                            .partial_cmp(&sq_dist(points.row(b), &centers[labels[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centers[c] = points.row(far).to_vec();
                labels[far] = c;
            } else {
                for (j, s) in sums[c].iter().enumerate() {
                    centers[c][j] = s / counts[c] as f64;
                }
            }
        }

        let rel = if wcss.is_finite() && wcss > 0.0 {
            (wcss - new_wcss) / wcss
        } else {
            f64::INFINITY
        };
        wcss = new_wcss;
        if rel.abs() <= tol {
            break;
        }
    }

    // final consistent assignment against the last centers
    let mut final_wcss = 0.0;
    for i in 0..n {
        let row = points.row(i);
        let mut best_c = 0;
        let mut best_d = f64::INFINITY;
        for (c, ctr) in centers.iter().enumerate() {
            let dd = sq_dist(row, ctr);
            if dd < best_d {
                best_d = dd;
                best_c = c;
            }
        }
        labels[i] = best_c;
        final_wcss += best_d;
    }

    KMeansResult {
        labels,
        centers: DenseMatrix::from_cols(
            k,
            &(0..d)
                .map(|j| centers.iter().map(|c| c[j]).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap(),
        wcss: final_wcss,
    }
}
