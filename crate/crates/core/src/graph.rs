//! Observation graphs: which matrix entries were observed.
//!
//! Node `i` corresponds to row/column `i`; an edge `{i, j}` means entries
//! `(i, j)` and `(j, i)` are observed and a loop `{i, i}` means the diagonal
//! entry is observed. Degrees count observed entries per row, so a loop
//! contributes one. Loops cancel in the Laplacian `L = D − A`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{eigh, SymMatrix};
use crate::{Error, Result};

/// Laplacian eigenvalues below this are treated as zero.
pub const CONNECTIVITY_EPS: f64 = 1e-8;

/// Slack for the Δmax ≥ φ preconditions of the irregularity.
const IRREGULARITY_SLACK: f64 = 1e-9;

#[derive(Clone, PartialEq, Eq)]
pub struct ObservationGraph {
    n: usize,
    adj: Vec<bool>,
}

impl fmt::Debug for ObservationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObservationGraph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl ObservationGraph {
    pub fn empty(n: usize) -> Self {
        ObservationGraph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn complete(n: usize, loops: bool) -> Self {
        let mut g = ObservationGraph {
            n,
            adj: vec![true; n * n],
        };
        if !loops {
            for i in 0..n {
                g.adj[i * n + i] = false;
            }
        }
        g
    }

    /// Graph with the given unordered edges; repeated edges are merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            g.insert(i, j);
        }
        Ok(g)
    }

    /// Graph from a symmetric 0/1 mask.
    pub fn from_mask(mask: &SymMatrix) -> Result<Self> {
        let n = mask.dim();
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i..n {
                match mask[(i, j)] {
                    v if v == 1.0 => g.insert(i, j),
                    v if v == 0.0 => {}
                    v => {
                        return Err(Error::invalid(format!(
                            "mask entry ({i}, {j}) = {v} is not 0 or 1"
                        )))
                    }
                }
            }
        }
        Ok(g)
    }

    fn insert(&mut self, i: usize, j: usize) {
        self.adj[i * self.n + j] = true;
        self.adj[j * self.n + i] = true;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    /// Edges as `(i, j)` with `i <= j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Number of observed matrix entries: an off-diagonal edge counts twice.
    pub fn ordered_entry_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count()
    }

    /// 0/1 adjacency matrix `A_G` (diagonal set where loops are present).
    pub fn adjacency(&self) -> SymMatrix {
        SymMatrix::from_upper_fn(self.n, |i, j| if self.has_edge(i, j) { 1.0 } else { 0.0 })
    }

    /// Observed entries per row; a loop counts once.
    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| self.adj[i * self.n..(i + 1) * self.n].iter().filter(|&&b| b).count())
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// `L = D − A` of the loopless graph.
    pub fn laplacian(&self) -> SymMatrix {
        let n = self.n;
        let mut l = SymMatrix::zeros(n);
        for i in 0..n {
            let mut deg = 0.0;
            for j in 0..n {
                if j != i && self.has_edge(i, j) {
                    l.set(i, j, -1.0);
                    deg += 1.0;
                }
            }
            l.set(i, i, deg);
        }
        l
    }

    /// φ(G): second-smallest Laplacian eigenvalue; exactly 0 when disconnected.
    pub fn algebraic_connectivity(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::invalid(
                "algebraic connectivity needs at least two nodes",
            ));
        }
        Ok(self.connectivity_or_zero())
    }

    /// φ with the single-vertex convention φ(K₁) = 0.
    pub(crate) fn connectivity_or_zero(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let e = eigh(&self.laplacian()).expect("laplacian is finite");
        let phi = e.values[self.n - 2];
        if phi < CONNECTIVITY_EPS {
            0.0
        } else {
            phi
        }
    }

    /// `max xᵀA_G x` over unit vectors orthogonal to the all-ones vector.
    ///
    /// Computed as the top eigenvalue of `PAP − (n + 1)·11ᵀ/n` with
    /// `P = I − 11ᵀ/n`; the shift pushes the ones direction below every
    /// eigenvalue of the restricted form, whose magnitude is at most `n`.
    pub fn adjacency_form_max_perp_ones(&self) -> Result<f64> {
        let n = self.n;
        if n < 2 {
            return Err(Error::invalid("needs at least two nodes"));
        }
        let a = self.adjacency();
        let nf = n as f64;
        let row_mean: Vec<f64> = (0..n).map(|i| a.row(i).iter().sum::<f64>() / nf).collect();
        let total_mean = row_mean.iter().sum::<f64>() / nf;
        let shift = (nf + 1.0) / nf;
        let b = SymMatrix::from_upper_fn(n, |i, j| {
            a[(i, j)] - row_mean[i] - row_mean[j] + total_mean - shift
        });
        Ok(eigh(&b)?.values[0])
    }

    /// Connectivity of the loopless graph by breadth-first search.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..self.n {
                if !seen[j] && self.has_edge(i, j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Same vertex set, complementary edge set (loops included).
    pub fn complement(&self) -> Self {
        ObservationGraph {
            n: self.n,
            adj: self.adj.iter().map(|b| !b).collect(),
        }
    }

    /// ψ(G) = max{Δmax(G) − φ(G), Δmax(Ḡ) − φ(Ḡ)}.
    pub fn irregularity(&self) -> Result<f64> {
        let own = self.max_degree() as f64 - self.connectivity_or_zero();
        let comp = self.complement();
        let other = comp.max_degree() as f64 - comp.connectivity_or_zero();
        if own < -IRREGULARITY_SLACK || other < -IRREGULARITY_SLACK {
            return Err(Error::IrregularityUndefined(format!(
                "Δmax − φ = {own:.6} on the graph, {other:.6} on its complement"
            )));
        }
        Ok(own.max(other).max(0.0))
    }

    /// ψ(G)/φ(G), `+∞` when φ(G) = 0.
    pub fn irregularity_ratio(&self) -> Result<f64> {
        let psi = self.irregularity()?;
        let phi = self.connectivity_or_zero();
        Ok(if phi > 0.0 { psi / phi } else { f64::INFINITY })
    }

    /// Subgraph on `nodes` keeping internal edges; node `nodes[k]` becomes `k`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("induced_subgraph: empty node set"));
        }
        self.check_nodes(nodes)?;
        let k = nodes.len();
        let mut g = Self::empty(k);
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate() {
                g.adj[a * k + b] = self.has_edge(i, j);
            }
        }
        Ok(g)
    }

    /// Edges with exactly one endpoint in `left`; the other side is the
    /// complement of `left`.
    pub fn bipartite_block(&self, left: &[usize]) -> Result<BipartiteSubgraph> {
        if left.is_empty() || left.len() >= self.n {
            return Err(Error::invalid(
                "bipartite_block: left side must be a nonempty proper subset",
            ));
        }
        self.check_nodes(left)?;
        let mut in_left = vec![false; self.n];
        for &i in left {
            in_left[i] = true;
        }
        let right: Vec<usize> = (0..self.n).filter(|&i| !in_left[i]).collect();
        let mut edges = Vec::new();
        for &l in left {
            for &r in &right {
                if self.has_edge(l, r) {
                    edges.push((l, r));
                }
            }
        }
        BipartiteSubgraph::new(left.to_vec(), right, edges)
    }

    fn check_nodes(&self, nodes: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n];
        for &i in nodes {
            if i >= self.n {
                return Err(Error::invalid(format!(
                    "node {i} out of range for {} nodes",
                    self.n
                )));
            }
            if seen[i] {
                return Err(Error::invalid(format!("node {i} listed twice")));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Bipartite graph between two disjoint node sets, e.g. `G_{J,Jᶜ}` or the
/// sampling pattern of a rectangular random matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteSubgraph {
    left: Vec<usize>,
    right: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl BipartiteSubgraph {
    pub fn new(left: Vec<usize>, right: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if left.iter().any(|l| right.contains(l)) {
            return Err(Error::invalid("bipartite sides overlap"));
        }
        for &(l, r) in &edges {
            if !left.contains(&l) || !right.contains(&r) {
                return Err(Error::invalid(format!(
                    "edge ({l}, {r}) does not join left to right"
                )));
            }
        }
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        Ok(BipartiteSubgraph { left, right, edges })
    }

    /// Pattern of an `m × n` matrix: rows are nodes `0..m`, columns are nodes
    /// `m..m+n`, and entry `(i, j)` is the edge `(i, m + j)`.
    pub fn from_pattern(
        m: usize,
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, j) in entries {
            if i >= m || j >= n {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) outside a {m}x{n} pattern"
                )));
            }
            edges.push((i, m + j));
        }
        Self::new((0..m).collect(), (m..m + n).collect(), edges)
    }

    /// Fully observed `m × n` pattern.
    pub fn full_pattern(m: usize, n: usize) -> Self {
        Self::from_pattern(m, n, (0..m).flat_map(|i| (0..n).map(move |j| (i, j))))
            .expect("in range")
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges as (row position in `left`, column position in `right`).
    pub fn positions(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(l, r)| {
                let a = self.left.iter().position(|&x| x == l).expect("left endpoint");
                let b = self.right.iter().position(|&x| x == r).expect("right endpoint");
                (a, b)
            })
            .collect()
    }

    /// Maximum incident-edge count over the vertices of both sides.
    pub fn max_degree(&self) -> usize {
        let mut best = 0;
        for &v in self.left.iter().chain(&self.right) {
            let deg = self.edges.iter().filter(|&&(l, r)| l == v || r == v).count();
            best = best.max(deg);
        }
        best
    }
}

/// Uniform random observation graph with an entry budget, seeded.
pub fn random_graph(n: usize, budget: usize, rng_seed: u64) -> Result<ObservationGraph> {
    random_graph_with_rng(n, budget, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Draws unordered pairs (loops included) uniformly without replacement until
/// the ordered-entry count first reaches `budget`. An off-diagonal pair
/// consumes two units of budget and a loop one.
pub fn random_graph_with_rng<R: Rng + ?Sized>(
    n: usize,
    budget: usize,
    rng: &mut R,
) -> Result<ObservationGraph> {
    if budget > n * n {
        return Err(Error::invalid(format!(
            "budget {budget} exceeds the {} entries of a {n}x{n} matrix",
            n * n
        )));
    }
    let mut pool: Vec<(usize, usize)> = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            pool.push((i, j));
        }
    }
    let mut g = ObservationGraph::empty(n);
    let mut count = 0;
    let mut taken = 0;
    while count < budget {
        let k = rng.random_range(taken..pool.len());
        pool.swap(taken, k);
        let (i, j) = pool[taken];
        taken += 1;
        g.insert(i, j);
        count += if i == j { 1 } else { 2 };
    }
    Ok(g)
}

/// Rejection-samples [`random_graph`] until `ψ(G_JJ)/φ(G_JJ) ∈ [lo, hi)` with
/// `G_JJ` connected.
pub fn random_graph_bucketed(
    n: usize,
    budget: usize,
    support: &[usize],
    ratio_lo: f64,
    ratio_hi: f64,
    max_tries: usize,
    rng_seed: u64,
) -> Result<ObservationGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    random_graph_bucketed_with_rng(n, budget, support, ratio_lo, ratio_hi, max_tries, &mut rng)
        .map(|(g, _)| g)
}

/// As [`random_graph_bucketed`], returning the accepted ratio as well.
pub fn random_graph_bucketed_with_rng<R: Rng + ?Sized>(
    n: usize,
    budget: usize,
    support: &[usize],
    ratio_lo: f64,
    ratio_hi: f64,
    max_tries: usize,
    rng: &mut R,
) -> Result<(ObservationGraph, f64)> {
    if !(ratio_lo < ratio_hi) {
        return Err(Error::invalid(format!(
            "empty bucket [{ratio_lo}, {ratio_hi})"
        )));
    }
    if support.is_empty() {
        return Err(Error::invalid("support must be nonempty"));
    }
    if support.iter().any(|&i| i >= n) {
        return Err(Error::invalid("support index out of range"));
    }
    for _ in 0..max_tries {
        let g = random_graph_with_rng(n, budget, rng)?;
        let sub = g.induced_subgraph(support)?;
        if let Ok(ratio) = sub.irregularity_ratio() {
            if ratio.is_finite() && ratio >= ratio_lo && ratio < ratio_hi {
                return Ok((g, ratio));
            }
        }
    }
    Err(Error::BucketExhausted {
        lo: ratio_lo,
        hi: ratio_hi,
        tries: max_tries,
    })
}
