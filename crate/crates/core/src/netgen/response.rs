use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::GenError;
use crate::linalg::DenseMatrix;

/// z_i = beta^T y_i + delta_i with delta_i ~ N(0, sigma_delta^2).
pub fn gen_response(
    y2: &DenseMatrix,
    beta_coef: &[f64],
    sigma_delta: f64,
    seed: u64,
) -> Result<Vec<f64>, GenError> {
    if beta_coef.len() != y2.cols() {
        return Err(GenError::InvalidArgument(format!(
            "beta length {} does not match K={}",
            beta_coef.len(),
            y2.cols()
        )));
    }
    if sigma_delta < 0.0 {
        return Err(GenError::InvalidArgument("sigma_delta must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..y2.rows())
        .map(|i| {
            let mean = crate::linalg::dot(y2.row(i), beta_coef);
            let noise: f64 = StandardNormal.sample(&mut rng);
            mean + sigma_delta * noise
        })
        .collect())
}
