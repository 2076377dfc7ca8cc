//! Connected undirected graphs with a precomputed all-pairs distance table.
//!
//! Vertices are the integers `0..n`. Hypercube vertex `i` stands for the
//! bit-tuple of `i`, so subcube cuts are mask tests. Cartesian products index
//! the pair `(u, x)` as `u * |H| + x`, which makes `Q^a □ Q^b` literally the
//! labelled `Q^(a+b)`.

mod cube;
mod parse;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cube::{cube_canonical, cube_group, is_cube_canonical, CubeCut, CubeSymmetry, MAX_CANONICAL_DIM};
pub use parse::{parse_edge_list, parse_graph_spec, read_edge_list};

/// Largest vertex count any builder will produce unless told otherwise.
pub const DEFAULT_VERTEX_BUDGET: usize = 4096;

/// Sentinel distance for vertices in different components (never stored in a
/// finished [`Graph`]).
const UNREACHABLE: u32 = u32::MAX;

/// How a graph was built. Used for labels and for recognising hypercubes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Path(usize),
    Complete(usize),
    Cube(u32),
    Product(Box<Family>, Box<Family>),
    File(String),
}

impl Family {
    /// Dimension `d` when the graph is, vertex for vertex, the labelled `Q^d`.
    pub fn cube_dimension(&self) -> Option<u32> {
        match self {
            Family::Cube(d) => Some(*d),
            Family::Path(1) | Family::Complete(1) => Some(0),
            Family::Path(2) | Family::Complete(2) => Some(1),
            Family::Product(a, b) => Some(a.cube_dimension()? + b.cube_dimension()?),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Cube(d) => write!(f, "cube:{d}"),
            Family::Product(a, b) => write!(f, "product:{a},{b}"),
            Family::File(p) => write!(f, "file:{p}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    distances: Vec<u32>,
    diameter: u32,
    family: Family,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, out-of-range
    /// endpoints and disconnected inputs. Duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], family: Family) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge {u}-{v} out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let distances = all_pairs_distances(&adjacency)?;
        Ok(Self::assemble(adjacency, distances, family))
    }

    fn assemble(adjacency: Vec<Vec<usize>>, distances: Vec<u32>, family: Family) -> Graph {
        let n = adjacency.len();
        let diameter = distances.iter().copied().max().unwrap_or(0);
        Graph { n, adjacency, distances, diameter, family }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> u32 {
        self.distances[u * self.n + v]
    }

    /// Row `u` of the distance table.
    #[inline]
    pub fn distances_from(&self, u: usize) -> &[u32] {
        &self.distances[u * self.n..(u + 1) * self.n]
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.distance(u, v) == 1
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn label(&self) -> String {
        self.family.to_string()
    }

    pub fn cube_dimension(&self) -> Option<u32> {
        self.family.cube_dimension()
    }

    /// Neighbor of `from` on a shortest path towards `to` (lowest index
    /// among the candidates). `None` when `from == to`.
    pub fn next_hop(&self, from: usize, to: usize) -> Option<usize> {
        let d = self.distance(from, to);
        if d == 0 {
            return None;
        }
        self.adjacency[from].iter().copied().find(|&w| self.distance(w, to) == d - 1)
    }

    /// Vertices of a shortest path from `from` to `to`, both ends included.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut path = vec![from];
        let mut cur = from;
        while let Some(next) = self.next_hop(cur, to) {
            path.push(next);
            cur = next;
        }
        path
    }
}

fn check_budget(n: usize, max_vertices: usize) -> Result<()> {
    if n > max_vertices {
        return Err(Error::ResourceLimit(format!(
            "{n} vertices exceeds the vertex budget of {max_vertices}"
        )));
    }
    Ok(())
}

pub fn build_path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("path needs n >= 1".into()));
    }
    check_budget(n, DEFAULT_VERTEX_BUDGET)?;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges, Family::Path(n))
}

pub fn build_complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("complete graph needs n >= 1".into()));
    }
    check_budget(n, DEFAULT_VERTEX_BUDGET)?;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges, Family::Complete(n))
}

pub fn build_hypercube(d: u32) -> Result<Graph> {
    build_hypercube_within(d, DEFAULT_VERTEX_BUDGET)
}

/// Hypercube on the integers `0..2^d`; distances are filled in directly as
/// the popcount of `u ^ v`.
pub fn build_hypercube_within(d: u32, max_vertices: usize) -> Result<Graph> {
    if d >= usize::BITS - 1 {
        return Err(Error::ResourceLimit(format!("dimension {d} is too large")));
    }
    let n = 1usize << d;
    check_budget(n, max_vertices)?;
    let adjacency = (0..n).map(|v| (0..d).map(|j| v ^ (1 << j)).collect::<Vec<_>>()).map(|mut l| {
        l.sort_unstable();
        l
    });
    let adjacency: Vec<Vec<usize>> = adjacency.collect();
    let mut distances = vec![0u32; n * n];
    for u in 0..n {
        for v in 0..n {
            distances[u * n + v] = (u ^ v).count_ones();
        }
    }
    Ok(Graph::assemble(adjacency, distances, Family::Cube(d)))
}

pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Graph> {
    cartesian_product_within(g, h, DEFAULT_VERTEX_BUDGET)
}

/// `G □ H` with `(u, x)` stored at index `u * |H| + x`. Distances are the
/// sums of the factor distances.
pub fn cartesian_product_within(g: &Graph, h: &Graph, max_vertices: usize) -> Result<Graph> {
    let (gn, hn) = (g.vertex_count(), h.vertex_count());
    let n = gn
        .checked_mul(hn)
        .ok_or_else(|| Error::ResourceLimit("product vertex count overflows".into()))?;
    check_budget(n, max_vertices)?;
    let index = |u: usize, x: usize| u * hn + x;
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..gn {
        for x in 0..hn {
            let list = &mut adjacency[index(u, x)];
            list.extend(h.neighbors(x).iter().map(|&y| index(u, y)));
            list.extend(g.neighbors(u).iter().map(|&v| index(v, x)));
            list.sort_unstable();
        }
    }
    let mut distances = vec![0u32; n * n];
    for u in 0..gn {
        for x in 0..hn {
            let row = index(u, x) * n;
            for v in 0..gn {
                for y in 0..hn {
                    distances[row + index(v, y)] = g.distance(u, v) + h.distance(x, y);
                }
            }
        }
    }
    let family = Family::Product(Box::new(g.family.clone()), Box::new(h.family.clone()));
    Ok(Graph::assemble(adjacency, distances, family))
}

/// BFS from every vertex. Returns a row-major `n * n` table.
pub fn all_pairs_distances(adjacency: &[Vec<usize>]) -> Result<Vec<u32>> {
    let n = adjacency.len();
    let mut table = vec![UNREACHABLE; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        let row = &mut table[s * n..(s + 1) * n];
        row[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let next = row[u] + 1;
            for &w in &adjacency[u] {
                if row[w] == UNREACHABLE {
                    row[w] = next;
                    queue.push_back(w);
                }
            }
        }
        if row.contains(&UNREACHABLE) {
            return Err(Error::Disconnected);
        }
    }
    Ok(table)
}
