use super::dense::DenseMatrix;
use super::eigen::top_k_eigen;
use super::{canonical_sign, dot, norm2, LinalgError};

/// Truncated SVD: X ~ U diag(S) V^T with S descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

/// Top-k singular triplets through an eigendecomposition of the smaller Gram
/// matrix. Signs are made deterministic on the U columns (largest-magnitude
/// entry positive) with V slaved to U.
pub fn truncated_svd(
    x: &DenseMatrix,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<SvdResult, LinalgError> {
    let (m, p) = (x.rows(), x.cols());
    if k > m.min(p) {
        return Err(LinalgError::InvalidArgument(format!(
            "k={k} exceeds min dimension {}",
            m.min(p)
        )));
    }
    if k == 0 {
        return Ok(SvdResult {
            u: DenseMatrix::zeros(m, 0),
            s: vec![],
            v: DenseMatrix::zeros(p, 0),
        });
    }

    let cols_side = p <= m;
    let gram = if cols_side {
        x.transpose().matmul(x)?
    } else {
        x.matmul(&x.transpose())?
    };
    let eig = top_k_eigen(&gram, k, tol, 50 * k.max(1) + 200, seed)?;

    let scale = gram.norm_1().sqrt().max(1.0);
    let cut = 1e-13 * scale;
    let mut s = Vec::with_capacity(k);
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut vcols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let sigma = eig.values[j].max(0.0).sqrt();
        let w = eig.vectors.col(j);
        let (mut ucol, mut vcol) = if cols_side {
            let xv = x.matvec(&w);
            let u = if sigma > cut {
                xv.iter().map(|t| t / sigma).collect()
            } else {
                ortho_fill(m, &ucols)
            };
            (u, w)
        } else {
            let xtu = x.matvec_t(&w);
            let v = if sigma > cut {
                xtu.iter().map(|t| t / sigma).collect()
            } else {
                ortho_fill(p, &vcols)
            };
            (w, v)
        };
        // tighten orthogonality of the derived side
        let derived = if cols_side { &mut ucol } else { &mut vcol };
        let against = if cols_side { &ucols } else { &vcols };
        for prev in against {
            let c = dot(prev, derived);
            for (d, q) in derived.iter_mut().zip(prev) {
                *d -= c * q;
            }
        }
        let nrm = norm2(derived);
        if nrm > 1e-12 {
            for d in derived.iter_mut() {
                *d /= nrm;
            }
        }

        let before = ucol.clone();
        canonical_sign(&mut ucol);
        if before.iter().zip(&ucol).any(|(a, b)| a != b) {
            for t in vcol.iter_mut() {
                *t = -*t;
            }
        }
        s.push(sigma);
        ucols.push(ucol);
        vcols.push(vcol);
    }

    Ok(SvdResult {
        u: DenseMatrix::from_cols(m, &ucols)?,
        s,
        v: DenseMatrix::from_cols(p, &vcols)?,
    })
}

/// Deterministic orthonormal completion: first coordinate vector with a
/// sizeable component outside span(existing).
fn ortho_fill(n: usize, existing: &[Vec<f64>]) -> Vec<f64> {
    for c in 0..n {
        let mut v = vec![0.0; n];
        v[c] = 1.0;
        for prev in existing {
            let cf = dot(prev, &v);
            for (vi, pi) in v.iter_mut().zip(prev) {
                *vi -= cf * pi;
            }
        }
        let nrm = norm2(&v);
        if nrm > 0.5 {
            return v.iter().map(|t| t / nrm).collect();
        }
    }
    // existing spans nearly everything; fall back to the last attempt
    let mut v = vec![0.0; n];
    if n > 0 {
        v[n - 1] = 1.0;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one() {
        // X = 7 u v^T
        let u = [0.6, 0.8];
        let v = [1.0 / 3f64.sqrt(); 3];
        let mut rows = Vec::new();
        for ui in u {
            rows.push(v.iter().map(|vj| 7.0 * ui * vj).collect::<Vec<_>>());
        }
        let x = DenseMatrix::from_rows(&rows).unwrap();
        let r = truncated_svd(&x, 1, 1e-12, 0).unwrap();
        assert!((r.s[0] - 7.0).abs() < 1e-10);
        for i in 0..2 {
            assert!((r.u.get(i, 0).abs() - u[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_matrix() {
        let x = DenseMatrix::zeros(4, 3);
        let r = truncated_svd(&x, 1, 1e-12, 0).unwrap();
        assert_eq!(r.s, vec![0.0]);
        // completed factors are still unit vectors
        assert!((norm2(&r.u.col(0)) - 1.0).abs() < 1e-12);
        assert!((norm2(&r.v.col(0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_too_large_rejected() {
        let x = DenseMatrix::zeros(4, 3);
        assert!(truncated_svd(&x, 4, 1e-10, 0).is_err());
    }
}
