use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{GenError, NetworkModelSpec};
use crate::linalg::DenseMatrix;

/// Latent factor rows for n subjects, plus class labels where defined.
///
/// DCSBM: one-hot rows from uniform labels. DCMM: one-hot plus Unif(0, h)
/// noise, rows l1-normalized onto the simplex. RDPG: Gaussian rows with
/// block-diagonal covariance (no labels).
pub fn gen_latent(
    spec: &NetworkModelSpec,
    n: usize,
    seed: u64,
) -> Result<(DenseMatrix, Option<Vec<usize>>), GenError> {
    let k = spec.k();
    if n < k {
        return Err(GenError::InvalidArgument(format!("n={n} smaller than K={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        NetworkModelSpec::Dcsbm { .. } => {
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let mut y = DenseMatrix::zeros(n, k);
            for (i, &l) in labels.iter().enumerate() {
                y.set(i, l, 1.0);
            }
            Ok((y, Some(labels)))
        }
        NetworkModelSpec::Dcmm { mixture_h, .. } => {
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let mut y = DenseMatrix::zeros(n, k);
            for (i, &l) in labels.iter().enumerate() {
                let mut row: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * mixture_h).collect();
                row[l] += 1.0;
                let s: f64 = row.iter().sum();
                for (c, v) in row.into_iter().enumerate() {
                    y.set(i, c, v / s);
                }
            }
            Ok((y, Some(labels)))
        }
        NetworkModelSpec::Rdpg {
            k,
            latent_mean,
            n_blocks,
            ..
        } => {
            // block sizes as equal as possible
            let base = k / n_blocks;
            let extra = k % n_blocks;
            let mut block_sizes = vec![base; *n_blocks];
            for s in block_sizes.iter_mut().take(extra) {
                *s += 1;
            }
            // one within-block correlation per block, drawn up front
            let corrs: Vec<f64> = (0..*n_blocks).map(|_| rng.gen::<f64>()).collect();

            // Cholesky factor of each equicorrelation block
            let mut chols: Vec<DenseMatrix> = Vec::with_capacity(*n_blocks);
            for (bs, &r) in block_sizes.iter().zip(&corrs) {
                chols.push(equicorrelation_cholesky(*bs, r)?);
            }

            let mut y = DenseMatrix::zeros(n, *k);
            for i in 0..n {
                let mut col0 = 0usize;
                for chol in &chols {
                    let bs = chol.rows();
                    let gauss: Vec<f64> =
                        (0..bs).map(|_| StandardNormal.sample(&mut rng)).collect();
                    for r in 0..bs {
                        let mut v = *latent_mean;
                        for c in 0..=r {
                            v += chol.get(r, c) * gauss[c];
                        }
                        y.set(i, col0 + r, v);
                    }
                    col0 += bs;
                }
            }
            Ok((y, None))
        }
    }
}

/// Lower Cholesky of the m x m matrix with unit diagonal and off-diagonal r.
fn equicorrelation_cholesky(m: usize, r: f64) -> Result<DenseMatrix, GenError> {
    let mut a = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            a.set(i, j, if i == j { 1.0 } else { r });
        }
    }
    let mut l = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for t in 0..j {
                s -= l.get(i, t) * l.get(j, t);
            }
            if i == j {
                if s <= 0.0 {
                    return Err(GenError::InvalidArgument(format!(
                        "covariance block not positive definite (r={r})"
                    )));
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Ok(l)
}
