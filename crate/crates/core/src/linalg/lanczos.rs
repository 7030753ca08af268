use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::DenseMatrix;
use super::eigen::{EigenResult, SymOp};
use super::jacobi::jacobi_eigen;
use super::{canonical_sign, dot, norm2, LinalgError};

/// Lanczos with full reorthogonalization. Grows one Krylov basis until the
/// top-k Ritz pairs (by |theta|) have residuals below tol*(1+||A||_1), the
/// basis spans the whole space, or the matvec budget runs out.
pub(crate) fn lanczos_top_k<O: SymOp + ?Sized>(
    op: &O,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenResult, LinalgError> {
    let n = op.dim();
    let scale = 1.0 + op.norm_1();
    let thresh = tol * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new(); // beta[m] couples basis[m] and basis[m+1]

    let mut v = random_unit(n, &mut rng);
    let mut pending_beta = 0.0f64; // coupling between v and the previous basis vector

    let budget = max_iter.max(2 * k + 10).min(4 * n.max(1));
    let mut best_residual = f64::INFINITY;

    let mut w = vec![0.0; n];
    while basis.len() < n {
        if basis.len() >= budget {
            return Err(LinalgError::NoConvergence {
                iterations: basis.len(),
                best_residual,
            });
        }
        basis.push(v.clone());
        beta.push(pending_beta);
        let m = basis.len();

        op.apply(&v, &mut w);
        let a = dot(&v, &w);
        alpha.push(a);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let b_next = norm2(&w);
        if b_next <= 1e-12 * scale {
            if m == n {
                pending_beta = 0.0;
            } else {
                // invariant subspace found; restart with a fresh direction
                v = random_orthogonal(n, &basis, &mut rng);
                pending_beta = 0.0;
                if check_done(
                    op, &basis, &alpha, &beta, 0.0, k, thresh, &mut best_residual,
                ) {
                    break;
                }
                continue;
            }
        } else {
            v = w.iter().map(|x| x / b_next).collect();
            pending_beta = b_next;
        }

        let warmup = (2 * k + 8).min(n);
        if m == n
            || (m >= warmup
                && (m - warmup) % 8 == 0
                && check_done(
                    op,
                    &basis,
                    &alpha,
                    &beta,
                    pending_beta,
                    k,
                    thresh,
                    &mut best_residual,
                ))
        {
            break;
        }
        if m == n {
            break;
        }
    }

    extract(op, &basis, &alpha, &beta, k, thresh, best_residual)
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let nrm = norm2(&v);
        if nrm > 1e-8 {
            return v.iter().map(|x| x / nrm).collect();
        }
    }
}

fn random_orthogonal(n: usize, basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v = random_unit(n, rng);
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nrm = norm2(&v);
        if nrm > 1e-8 {
            return v.iter().map(|x| x / nrm).collect();
        }
    }
}

fn tridiag(alpha: &[f64], beta: &[f64]) -> DenseMatrix {
    let m = alpha.len();
    let mut t = DenseMatrix::zeros(m, m);
    for i in 0..m {
        t.set(i, i, alpha[i]);
        if i + 1 < m {
            t.set(i, i + 1, beta[i + 1]);
            t.set(i + 1, i, beta[i + 1]);
        }
    }
    t
}

/// Cheap convergence check via the beta * last-component residual estimate.
#[allow(clippy::too_many_arguments)]
fn check_done<O: SymOp + ?Sized>(
    _op: &O,
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    pending_beta: f64,
    k: usize,
    thresh: f64,
    best_residual: &mut f64,
) -> bool {
    let m = basis.len();
    if m < k {
        return false;
    }
    let (vals, vecs) = jacobi_eigen(&tridiag(alpha, beta));
    let mut worst = 0.0f64;
    for j in 0..k.min(vals.len()) {
        let est = pending_beta.abs() * vecs.get(m - 1, j).abs();
        worst = worst.max(est);
    }
    *best_residual = best_residual.min(worst);
    worst <= thresh
}

fn extract<O: SymOp + ?Sized>(
    op: &O,
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    k: usize,
    thresh: f64,
    best_residual: f64,
) -> Result<EigenResult, LinalgError> {
    let n = basis[0].len();
    let m = basis.len();
    let (vals, vecs) = jacobi_eigen(&tridiag(alpha, beta));
    if vals.len() < k {
        return Err(LinalgError::NoConvergence {
            iterations: m,
            best_residual,
        });
    }
    let mut values = Vec::with_capacity(k);
    let mut cols = Vec::with_capacity(k);
    let mut worst = 0.0f64;
    let mut av = vec![0.0; n];
    for j in 0..k {
        let theta = vals[j];
        let mut y = vec![0.0; n];
        for (i, b) in basis.iter().enumerate() {
            let s = vecs.get(i, j);
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += s * bi;
            }
        }
        let nrm = norm2(&y);
        for yi in y.iter_mut() {
            *yi /= nrm;
        }
        op.apply(&y, &mut av);
        let res = av
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
        canonical_sign(&mut y);
        values.push(theta);
        cols.push(y);
    }
    if worst > thresh && m < basis[0].len() {
        return Err(LinalgError::NoConvergence {
            iterations: m,
            best_residual: worst,
        });
    }
    Ok(EigenResult {
        values,
        vectors: DenseMatrix::from_cols(n, &cols)?,
    })
}
