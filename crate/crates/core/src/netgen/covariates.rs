use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal, StandardNormal};

use super::{CovariateModelSpec, GenError, LoadingSampler, NoiseFamily, SignalSet};
use crate::linalg::DenseMatrix;

/// X = Y M + E with E drawn from the configured noise family.
///
/// Returns (X, M, S) where M is K x p with nonzero columns only on S.
/// The mixed family draws one distribution per column, then fills the column
/// i.i.d.; all families produce mean-0 variance-1 noise.
pub fn gen_covariates(
    spec: &CovariateModelSpec,
    y: &DenseMatrix,
    seed: u64,
) -> Result<(DenseMatrix, DenseMatrix, Vec<usize>), GenError> {
    let n = y.rows();
    let k = y.cols();
    let p = spec.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut s_set: Vec<usize> = match &spec.signal {
        SignalSet::Explicit { indices } => {
            if indices.iter().any(|&j| j >= p) {
                return Err(GenError::InvalidArgument(
                    "signal index out of range".into(),
                ));
            }
            indices.clone()
        }
        SignalSet::Count { .. } | SignalSet::FromBeta { .. } => {
            let size = spec.resolved_signal_size();
            if size > p {
                return Err(GenError::InvalidArgument(format!(
                    "|S|={size} exceeds p={p}"
                )));
            }
            let mut all: Vec<usize> = (0..p).collect();
            all.shuffle(&mut rng);
            all.truncate(size);
            all
        }
    };
    s_set.sort_unstable();
    s_set.dedup();

    // loading matrix
    let mut m = DenseMatrix::zeros(k, p);
    for &j in &s_set {
        for i in 0..k {
            m.set(i, j, sample_loading(&spec.loading, &mut rng));
        }
    }

    // noise, column by column so the mixed family picks one law per covariate
    let mut x = DenseMatrix::zeros(n, p);
    let mut col = vec![0.0f64; n];
    for j in 0..p {
        fill_noise_column(spec.noise, &mut col, &mut rng)?;
        for i in 0..n {
            x.set(i, j, col[i]);
        }
    }

    // add signal Y M on the informative columns
    for i in 0..n {
        for &j in &s_set {
            let mut s = 0.0;
            for c in 0..k {
                s += y.get(i, c) * m.get(c, j);
            }
            x.set(i, j, x.get(i, j) + s);
        }
    }

    Ok((x, m, s_set))
}

fn sample_loading(sampler: &LoadingSampler, rng: &mut ChaCha8Rng) -> f64 {
    match *sampler {
        LoadingSampler::GaussianMixture { mu, sd } => {
            let center = if rng.gen::<bool>() { mu } else { -mu };
            let g: f64 = StandardNormal.sample(rng);
            center + sd * g
        }
        LoadingSampler::UniformMixture { lo, mu } => {
            let v = lo + rng.gen::<f64>() * (mu - lo);
            if rng.gen::<bool>() {
                v
            } else {
                -v
            }
        }
    }
}

fn fill_noise_column(
    family: NoiseFamily,
    col: &mut [f64],
    rng: &mut ChaCha8Rng,
) -> Result<(), GenError> {
    match family {
        NoiseFamily::GaussianUnit => {
            for v in col.iter_mut() {
                *v = StandardNormal.sample(rng);
            }
        }
        NoiseFamily::WilsonHilfertyChi5 => {
            // cube-root normalizing transform of chi^2_5, then empirical
            // centering/scaling to unit variance
            let chi = ChiSquared::new(5.0)
                .map_err(|e| GenError::InvalidArgument(format!("chi-squared: {e}")))?;
            let c = 1.0 - 2.0 / 45.0;
            let s = (2.0f64 / 45.0).sqrt();
            for v in col.iter_mut() {
                let x: f64 = chi.sample(rng);
                *v = ((x / 5.0).powf(1.0 / 3.0) - c) / s;
            }
            standardize(col);
        }
        NoiseFamily::MixedSubGaussian => {
            let which = rng.gen_range(0..4u8);
            match which {
                0 => {
                    // Rademacher
                    for v in col.iter_mut() {
                        *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    }
                }
                1 => {
                    let half = 3.0f64.sqrt();
                    for v in col.iter_mut() {
                        *v = rng.gen::<f64>() * 2.0 * half - half;
                    }
                }
                2 => {
                    // Bernoulli(0.5) centered/scaled: values +-1
                    for v in col.iter_mut() {
                        let b = if rng.gen::<bool>() { 1.0 } else { 0.0 };
                        *v = (b - 0.5) / 0.5;
                    }
                }
                _ => {
                    // 0.02 delta_{-5} + 0.02 delta_5 + 0.96 delta_0
                    for v in col.iter_mut() {
                        let u = rng.gen::<f64>();
                        *v = if u < 0.02 {
                            -5.0
                        } else if u < 0.04 {
                            5.0
                        } else {
                            0.0
                        };
                    }
                }
            }
        }
    }
    Ok(())
}

fn standardize(col: &mut [f64]) {
    let n = col.len() as f64;
    let mean: f64 = col.iter().sum::<f64>() / n;
    let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd > 0.0 {
        for v in col.iter_mut() {
            *v = (*v - mean) / sd;
        }
    }
}

/// Column j has entries logistic(mu_j + sigma_j * N(0,1)) with mu_j and
/// sigma_j drawn uniformly from the given ranges. All entries lie in (0,1).
pub fn gen_logitnormal_noise(
    n: usize,
    p_noise: usize,
    mu_range: (f64, f64),
    sigma_range: (f64, f64),
    seed: u64,
) -> Result<DenseMatrix, GenError> {
    if mu_range.0 > mu_range.1 || sigma_range.0 > sigma_range.1 {
        return Err(GenError::InvalidArgument("invalid parameter range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DenseMatrix::zeros(n, p_noise);
    for j in 0..p_noise {
        let mu = mu_range.0 + rng.gen::<f64>() * (mu_range.1 - mu_range.0);
        let sigma = sigma_range.0 + rng.gen::<f64>() * (sigma_range.1 - sigma_range.0);
        let normal = Normal::new(mu, sigma.max(0.0))
            .map_err(|e| GenError::InvalidArgument(format!("normal: {e}")))?;
        for i in 0..n {
            let t: f64 = if sigma > 0.0 { normal.sample(&mut rng) } else { mu };
            x.set(i, j, 1.0 / (1.0 + (-t).exp()));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null_spec(p: usize, noise: NoiseFamily) -> CovariateModelSpec {
        CovariateModelSpec {
            p,
            signal: SignalSet::Explicit { indices: vec![] },
            loading: LoadingSampler::GaussianMixture { mu: 0.5, sd: 0.05 },
            noise,
        }
    }

    #[test]
    fn null_columns_centered() {
        let y = DenseMatrix::zeros(800, 3);
        let (x, m, s) = gen_covariates(&null_spec(20, NoiseFamily::GaussianUnit), &y, 5).unwrap();
        assert!(s.is_empty());
        assert_eq!(m.max_abs(), 0.0);
        for j in 0..20 {
            let col = x.col(j);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 5.0 / (800f64).sqrt());
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 800.0;
            assert!((var - 1.0).abs() < 0.2, "var {var}");
        }
    }

    #[test]
    fn wilson_hilferty_unit_variance() {
        let y = DenseMatrix::zeros(2000, 3);
        let (x, _, _) =
            gen_covariates(&null_spec(10, NoiseFamily::WilsonHilfertyChi5), &y, 6).unwrap();
        for j in 0..10 {
            let col = x.col(j);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 2000.0;
            assert!(mean.abs() < 1e-10);
            assert!((var - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn three_point_mixture_fourth_moment() {
        // E[X^4] = 0.04 * 625 = 25; aggregate over many columns
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut vals = Vec::new();
        let mut col = vec![0.0; 10_000];
        loop {
            fill_noise_column(NoiseFamily::MixedSubGaussian, &mut col, &mut rng).unwrap();
            if col.iter().any(|&v| v.abs() > 4.0) {
                vals.extend_from_slice(&col);
                break;
            }
        }
        let m4 = vals.iter().map(|v| v.powi(4)).sum::<f64>() / vals.len() as f64;
        assert!((m4 - 25.0).abs() < 5.0, "m4 {m4}");
    }

    #[test]
    fn logitnormal_in_unit_interval_with_correct_median() {
        let x = gen_logitnormal_noise(2000, 5, (-3.5, -3.3), (1.5, 2.2), 11).unwrap();
        for j in 0..5 {
            let mut col = x.col(j);
            assert!(col.iter().all(|&v| v > 0.0 && v < 1.0));
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = col[1000];
            // median of logit-normal is logistic(mu); mu in (-3.5, -3.3)
            let lo = 1.0 / (1.0 + 3.5f64.exp());
            let hi = 1.0 / (1.0 + 3.3f64.exp());
            assert!(median > lo - 0.05 && median < hi + 0.05, "median {median}");
        }
    }

    #[test]
    fn signal_columns_carry_loading() {
        let mut y = DenseMatrix::zeros(100, 2);
        for i in 0..100 {
            y.set(i, i % 2, 1.0);
        }
        let spec = CovariateModelSpec {
            p: 8,
            signal: SignalSet::Explicit {
                indices: vec![1, 4],
            },
            loading: LoadingSampler::GaussianMixture { mu: 10.0, sd: 0.01 },
            noise: NoiseFamily::GaussianUnit,
        };
        let (x, m, s) = gen_covariates(&spec, &y, 3).unwrap();
        assert_eq!(s, vec![1, 4]);
        for &j in &s {
            assert!(m.col(j).iter().any(|&v| v.abs() > 5.0));
            let energy: f64 = x.col(j).iter().map(|v| v * v).sum();
            assert!(energy > 100.0 * 25.0);
        }
        for j in [0usize, 2, 3, 5, 6, 7] {
            assert!(m.col(j).iter().all(|&v| v == 0.0));
        }
    }
}
