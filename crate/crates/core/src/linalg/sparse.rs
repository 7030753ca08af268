use super::eigen::SymOp;
use super::LinalgError;

/// Undirected graph stored as an edge list plus a CSR adjacency for matvecs.
///
/// Edges are kept with `i < j`; no self-loops, no duplicates.
#[derive(Debug, Clone)]
pub struct SparseSymGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    degree: Vec<usize>,
    // CSR over both directions
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl SparseSymGraph {
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, LinalgError> {
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a == b {
                return Err(LinalgError::InvalidArgument(format!(
                    "self-loop at node {a}"
                )));
            }
            if a >= n || b >= n {
                return Err(LinalgError::InvalidArgument(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            norm.push((lo as u32, hi as u32));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(LinalgError::InvalidArgument("duplicate edge".into()));
        }
        let mut degree = vec![0usize; n];
        for &(a, b) in &norm {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; 2 * norm.len()];
        for &(a, b) in &norm {
            neighbors[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
            neighbors[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        Ok(Self {
            n,
            edges: norm,
            degree,
            offsets,
            neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Regularized Laplacian D^{-1/2} A D^{-1/2}; zero-degree rows stay zero.
    pub fn laplacian(&self) -> Laplacian<'_> {
        let inv_sqrt_deg = self
            .degree
            .iter()
            .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
            .collect();
        Laplacian {
            graph: self,
            inv_sqrt_deg,
        }
    }
}

impl SymOp for SparseSymGraph {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for i in 0..self.n {
            let mut acc = 0.0;
            for &j in self.neighbors(i) {
                acc += x[j as usize];
            }
            out[i] = acc;
        }
    }

    fn norm_1(&self) -> f64 {
        self.degree.iter().copied().max().unwrap_or(0) as f64
    }
}

/// The operator D^{-1/2} A D^{-1/2} over a borrowed graph.
pub struct Laplacian<'a> {
    graph: &'a SparseSymGraph,
    inv_sqrt_deg: Vec<f64>,
}

impl Laplacian<'_> {
    pub fn entry_scale(&self, i: usize, j: usize) -> f64 {
        self.inv_sqrt_deg[i] * self.inv_sqrt_deg[j]
    }
}

impl SymOp for Laplacian<'_> {
    fn dim(&self) -> usize {
        self.graph.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.graph.n {
            let mut acc = 0.0;
            for &j in self.graph.neighbors(i) {
                acc += self.inv_sqrt_deg[j as usize] * x[j as usize];
            }
            out[i] = self.inv_sqrt_deg[i] * acc;
        }
    }

    fn norm_1(&self) -> f64 {
        // entries are at most 1 in magnitude per row pair; a safe bound
        let mut best = 0.0f64;
        for i in 0..self.graph.n {
            let mut s = 0.0;
            for &j in self.graph.neighbors(i) {
                s += self.entry_scale(i, j as usize);
            }
            best = best.max(s);
        }
        best
    }
}

/// Directed adjacency, CSR by source node. Used for the left-singular-vector
/// basis of directed networks.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl DirectedGraph {
    pub fn from_edges(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self, LinalgError> {
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(LinalgError::InvalidArgument(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut counts = vec![0usize; n];
        for &(a, _) in &edges {
            counts[a] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let targets = edges.iter().map(|&(_, b)| b as u32).collect();
        Ok(Self {
            n,
            offsets,
            targets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// y = A x
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for &j in self.out_neighbors(i) {
                acc += x[j as usize];
            }
            out[i] = acc;
        }
    }

    /// y = A^T x
    pub fn apply_t(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for i in 0..self.n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for &j in self.out_neighbors(i) {
                out[j as usize] += xi;
            }
        }
    }
}

/// The symmetric PSD operator A A^T of a directed graph; its eigenvectors are
/// the left singular vectors of A.
pub struct GramOfDirected<'a> {
    pub graph: &'a DirectedGraph,
}

impl SymOp for GramOfDirected<'_> {
    fn dim(&self) -> usize {
        self.graph.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; self.graph.n];
        self.graph.apply_t(x, &mut tmp);
        self.graph.apply(&tmp, out);
    }

    fn norm_1(&self) -> f64 {
        let max_out = (0..self.graph.n)
            .map(|i| self.graph.out_neighbors(i).len())
            .max()
            .unwrap_or(0);
        (max_out * max_out) as f64
    }
}
