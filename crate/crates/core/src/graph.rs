//! Metric graphs, their Jacobians and balanced maps to tropical tori.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldScalar;
use crate::field_matrix::FieldMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: FieldScalar,
}

/// A finite connected multigraph (loops allowed) with edge lengths in
/// `Q(sqrt(D))`. Edge `e` is oriented from `u` to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    vertices: usize,
    d: u64,
    edges: Vec<Edge>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Advances `subset` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl MetricGraph {
    /// Builds a graph with positive edge lengths. Rational lengths are
    /// lifted to the discriminant of the irrational ones.
    pub fn new(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        let g = Self::with_lengths_unchecked(vertices, edges)?;
        if let Some(e) = g.edges.iter().find(|e| !e.len.is_positive()) {
            return Err(Error::InvalidGraph(format!(
                "edge length {} is not positive",
                e.len
            )));
        }
        Ok(g)
    }

    /// As [`MetricGraph::new`], but zero or negative lengths are kept. Used
    /// for degenerations.
    pub fn with_lengths_unchecked(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut d = 0;
        for e in &edges {
            if e.u >= vertices || e.v >= vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) on {vertices} vertices",
                    e.u, e.v
                )));
            }
            let ed = e.len.discriminant();
            if ed != 0 {
                if d != 0 && d != ed {
                    return Err(Error::MixedDiscriminant(d, ed));
                }
                d = ed;
            }
        }
        let edges = edges
            .into_iter()
            .map(|e| {
                Ok(Edge {
                    len: e.len.lift(d)?,
                    ..e
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { vertices, d, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    /// Valence of each vertex; a loop counts twice.
    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.vertices];
        for e in &self.edges {
            val[e.u] += 1;
            val[e.v] += 1;
        }
        val
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        let mut components = self.vertices;
        for e in &self.edges {
            if uf.union(e.u, e.v) {
                components -= 1;
            }
        }
        components == 1
    }

    /// Connected, and with `no_two_valent` also free of 2-valent vertices.
    pub fn validate(&self, no_two_valent: bool) -> Result<()> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        if no_two_valent {
            if let Some(v) = self.valences().iter().position(|&k| k == 2) {
                return Err(Error::InvalidGraph(format!("vertex {v} is 2-valent")));
            }
        }
        Ok(())
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn genus(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.edges.len() + 1 - self.vertices)
    }

    /// Whether deleting any `k < m` distinct open edges leaves the graph
    /// connected. Each cut edge keeps its two half-edges attached to the
    /// endpoints.
    pub fn is_m_edge_connected(&self, m: usize) -> Result<bool> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let ne = self.edges.len();
        for k in 1..m.min(ne + 1) {
            let mut subset: Vec<usize> = (0..k).collect();
            loop {
                if !self.connected_after_cuts(&subset) {
                    return Ok(false);
                }
                if !next_combination(&mut subset, ne) {
                    break;
                }
            }
        }
        Ok(true)
    }

    fn connected_after_cuts(&self, cut: &[usize]) -> bool {
        let n = self.vertices + 2 * cut.len();
        let mut uf = UnionFind::new(n);
        let mut components = n;
        let mut join = |a, b, uf: &mut UnionFind| {
            if uf.union(a, b) {
                components -= 1;
            }
        };
        for (i, e) in self.edges.iter().enumerate() {
            match cut.iter().position(|&c| c == i) {
                None => join(e.u, e.v, &mut uf),
                Some(k) => {
                    let a = self.vertices + 2 * k;
                    join(e.u, a, &mut uf);
                    join(a + 1, e.v, &mut uf);
                }
            }
        }
        components == 1
    }

    /// Fundamental cycles of the spanning tree grown greedily in edge order.
    /// Each cycle is a vector of signed edge multiplicities.
    pub fn cycle_basis(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let ne = self.edges.len();
        let mut uf = UnionFind::new(self.vertices);
        let mut in_tree = vec![false; ne];
        for (i, e) in self.edges.iter().enumerate() {
            in_tree[i] = uf.union(e.u, e.v);
        }
        // tree adjacency for path finding
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertices];
        for (i, e) in self.edges.iter().enumerate() {
            if in_tree[i] {
                adj[e.u].push((e.v, i));
                adj[e.v].push((e.u, i));
            }
        }
        // parent pointers from vertex 0
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.vertices];
        let mut depth = vec![0usize; self.vertices];
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &(y, ei) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, ei));
                    depth[y] = depth[x] + 1;
                    stack.push(y);
                }
            }
        }
        let step = |x: usize, cycle: &mut Vec<i64>, sign: i64| -> usize {
            // walk x -> parent(x), accumulating orientation
            let (p, ei) = parent[x].expect("non-root");
            let e = &self.edges[ei];
            cycle[ei] += if e.u == x && e.v == p { sign } else { -sign };
            p
        };
        let mut cycles = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if in_tree[i] {
                continue;
            }
            let mut cycle = vec![0i64; ne];
            cycle[i] = 1;
            // close u -> v along e with the tree path v -> u
            let (mut a, mut b) = (e.v, e.u);
            while depth[a] > depth[b] {
                a = step(a, &mut cycle, 1);
            }
            while depth[b] > depth[a] {
                b = step(b, &mut cycle, -1);
            }
            while a != b {
                a = step(a, &mut cycle, 1);
                b = step(b, &mut cycle, -1);
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }

    /// Gram matrix `Q(c, c') = sum_e l(e) c_e c'_e` on the cycle basis.
    pub fn jacobian_gram(&self) -> Result<FieldMatrix> {
        let lengths: Vec<FieldScalar> = self.edges.iter().map(|e| e.len.clone()).collect();
        self.gram_for_lengths(&lengths)
    }

    /// Gram matrix of this graph's cycle basis for arbitrary edge lengths,
    /// zero allowed.
    pub fn gram_for_lengths(&self, lengths: &[FieldScalar]) -> Result<FieldMatrix> {
        if lengths.len() != self.edges.len() {
            return Err(Error::DimensionMismatch("one length per edge".into()));
        }
        let d = lengths
            .iter()
            .map(FieldScalar::discriminant)
            .find(|&d| d != 0)
            .unwrap_or(self.d);
        let cycles = self.cycle_basis()?;
        let h = cycles.len();
        let mut entries = Vec::with_capacity(h * h);
        for a in &cycles {
            for b in &cycles {
                let mut acc = FieldScalar::zero_in(d);
                for ((&x, &y), l) in a.iter().zip(b).zip(lengths) {
                    if x != 0 && y != 0 {
                        let l = l.lift(d)?;
                        acc = acc.checked_add(
                            &l.scale(&num_rational::BigRational::from_integer((x * y).into())),
                        )?;
                    }
                }
                entries.push(acc);
            }
        }
        FieldMatrix::new(h, h, d, entries)
    }

    /// Contracts a non-loop edge, merging its endpoints.
    pub fn contract_edge(&self, index: usize) -> Result<MetricGraph> {
        let e = self
            .edges
            .get(index)
            .ok_or_else(|| Error::InvalidGraph(format!("no edge {index}")))?;
        if e.u == e.v {
            return Err(Error::InvalidGraph("cannot contract a loop".into()));
        }
        let (keep, gone) = (e.u.min(e.v), e.u.max(e.v));
        let relabel = |x: usize| {
            let x = if x == gone { keep } else { x };
            if x > gone {
                x - 1
            } else {
                x
            }
        };
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, e)| Edge {
                u: relabel(e.u),
                v: relabel(e.v),
                len: e.len.clone(),
            })
            .collect();
        Ok(MetricGraph {
            vertices: self.vertices - 1,
            d: self.d,
            edges,
        })
    }

    /// Contracts every zero-length edge. Fails if those edges contain a cycle.
    pub fn contract_zero_edges(&self) -> Result<MetricGraph> {
        let mut g = self.clone();
        while let Some(i) = g.edges.iter().position(|e| e.len.is_zero()) {
            g = g.contract_edge(i)?;
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeMap {
    /// Positive integer weight.
    pub weight: u64,
    /// Primitive slope in `Lambda`, for the edge oriented `u -> v`.
    pub slope: Vec<i64>,
}

/// A piecewise-linear map from a metric graph to a torus of rank `rank`,
/// linear of integral slope on each edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedMap {
    pub graph: MetricGraph,
    pub rank: usize,
    pub edges: Vec<EdgeMap>,
}

/// Checks that slopes are primitive, weights positive, and that the
/// weighted outgoing slopes cancel at every vertex.
pub fn validate_balanced_map(m: &BalancedMap) -> Result<bool> {
    let ne = m.graph.edges().len();
    if m.edges.len() != ne {
        return Err(Error::DimensionMismatch("one slope per edge".into()));
    }
    let mut sums = vec![vec![0i128; m.rank]; m.graph.vertex_count()];
    for (i, (e, data)) in m.graph.edges().iter().zip(&m.edges).enumerate() {
        if data.slope.len() != m.rank {
            return Err(Error::DimensionMismatch(format!("slope of edge {i}")));
        }
        if data.weight == 0 {
            return Err(Error::InvalidGraph(format!("edge {i} has weight 0")));
        }
        let g = data.slope.iter().fold(0u64, |acc, &x| {
            num_integer::Integer::gcd(&acc, &x.unsigned_abs())
        });
        if g != 1 {
            return Err(Error::NonPrimitiveSlope(i));
        }
        for k in 0..m.rank {
            let w = data.weight as i128 * data.slope[k] as i128;
            sums[e.u][k] += w;
            sums[e.v][k] -= w;
        }
    }
    Ok(sums.iter().all(|s| s.iter().all(Zero::is_zero)))
}
