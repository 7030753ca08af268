use super::dense::DenseMatrix;
use super::jacobi::jacobi_eigen;
use super::lanczos::lanczos_top_k;
use super::{canonical_sign, LinalgError};

/// A symmetric linear operator on R^n. Implemented by dense matrices, graph
/// adjacencies, regularized Laplacians and Gram operators.
pub trait SymOp {
    fn dim(&self) -> usize;
    /// out = A x
    fn apply(&self, x: &[f64], out: &mut [f64]);
    /// An upper bound on the maximum absolute column sum, used only to scale
    /// residual tolerances.
    fn norm_1(&self) -> f64;
}

impl SymOp for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matvec(x));
    }

    fn norm_1(&self) -> f64 {
        DenseMatrix::norm_1(self)
    }
}

/// Eigenpairs ordered by descending |lambda|; vectors are column-orthonormal
/// with the largest-magnitude entry of each made positive.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// n x k, column j is the eigenvector of values[j]
    pub vectors: DenseMatrix,
}

/// Top-k eigenpairs of a symmetric operator, by largest |lambda|.
///
/// Small problems (n <= 256) are densified and solved with Jacobi rotations;
/// larger ones use Lanczos with full reorthogonalization. Deterministic for a
/// fixed seed.
pub fn top_k_eigen<O: SymOp + ?Sized>(
    op: &O,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenResult, LinalgError> {
    let n = op.dim();
    if k > n {
        return Err(LinalgError::InvalidArgument(format!(
            "k={k} exceeds operator dimension n={n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(LinalgError::InvalidArgument("tol must be positive".into()));
    }
    if k == 0 {
        return Ok(EigenResult {
            values: vec![],
            vectors: DenseMatrix::zeros(n, 0),
        });
    }

    if n <= 256 {
        let dense = densify(op);
        if !dense.is_symmetric(1e-9 * (1.0 + dense.max_abs())) {
            return Err(LinalgError::InvalidArgument(
                "operator is not symmetric".into(),
            ));
        }
        let (vals, vecs) = jacobi_eigen(&dense);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
        for j in 0..k {
            let mut c = vecs.col(j);
            canonical_sign(&mut c);
            cols.push(c);
        }
        return Ok(EigenResult {
            values: vals[..k].to_vec(),
            vectors: DenseMatrix::from_cols(n, &cols)?,
        });
    }

    lanczos_top_k(op, k, tol, max_iter, seed)
}

fn densify<O: SymOp + ?Sized>(op: &O) -> DenseMatrix {
    let n = op.dim();
    let mut m = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            m.set(i, j, col[i]);
        }
    }
    m
}
