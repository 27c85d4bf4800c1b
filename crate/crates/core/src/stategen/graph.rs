//! Simple undirected graphs, their graph states, local complementation and
//! the six-class partition of all 64 labeled graphs on four vertices.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::statevec::{Gate1Q, Gate2Q, StateVector};

const MAX_VERTICES: usize = 16;

/// Simple graph on vertices `0..n`, stored as adjacency bitmasks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n_vertices: usize,
    adj: Vec<u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; {:?})", self.n_vertices, self.edges())
    }
}

impl Graph {
    pub fn empty(n_vertices: usize) -> Result<Self> {
        if n_vertices == 0 || n_vertices > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!("vertex count {n_vertices} outside 1..={MAX_VERTICES}")));
        }
        Ok(Self { n_vertices, adj: vec![0; n_vertices] })
    }

    /// Rejects loops, duplicate edges and out-of-range endpoints.
    pub fn from_edges(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n_vertices)?;
        for &(a, b) in edges {
            g.check_vertex(a)?;
            g.check_vertex(b)?;
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if g.has_edge(a, b) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
            g.toggle_edge(a, b);
        }
        Ok(g)
    }

    /// Graph whose edge set is the bit pattern `mask` over the pairs
    /// `(0,1), (0,2), ..., (n-2,n-1)` in lexicographic order.
    pub fn from_edge_mask(n_vertices: usize, mask: u64) -> Result<Self> {
        let mut g = Self::empty(n_vertices)?;
        let pairs = vertex_pairs(n_vertices);
        if pairs.len() < 64 && mask >> pairs.len() != 0 {
            return Err(Error::InvalidGraph(format!("edge mask {mask:#b} has bits beyond {} pairs", pairs.len())));
        }
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                g.toggle_edge(a, b);
            }
        }
        Ok(g)
    }

    pub fn edge_mask(&self) -> u64 {
        vertex_pairs(self.n_vertices)
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| self.has_edge(a, b))
            .fold(0, |m, (bit, _)| m | 1 << bit)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        vertex_pairs(self.n_vertices).into_iter().filter(|&(a, b)| self.has_edge(a, b)).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n_vertices).filter(|&u| self.has_edge(v, u)).collect()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n_vertices {
            Err(Error::InvalidVertex { vertex: v, n_vertices: self.n_vertices })
        } else {
            Ok(())
        }
    }

    fn toggle_edge(&mut self, a: usize, b: usize) {
        self.adj[a] ^= 1 << b;
        self.adj[b] ^= 1 << a;
    }

    /// Toggles every edge between two neighbors of `v`.
    pub fn local_complement(&self, v: usize) -> Result<Self> {
        self.check_vertex(v)?;
        let mut out = self.clone();
        let nbrs = self.neighbors(v);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                out.toggle_edge(a, b);
            }
        }
        Ok(out)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_vertices {
            return Err(Error::InvalidGraph(format!("permutation of length {} for {} vertices", perm.len(), self.n_vertices)));
        }
        let mut seen = 0u32;
        for &p in perm {
            self.check_vertex(p)?;
            seen |= 1 << p;
        }
        if seen.count_ones() as usize != self.n_vertices {
            return Err(Error::InvalidGraph(format!("{perm:?} is not a permutation")));
        }
        let mut out = Self::empty(self.n_vertices)?;
        for (a, b) in self.edges() {
            out.toggle_edge(perm[a], perm[b]);
        }
        Ok(out)
    }

    /// `f_G(x) = Σ_{(i,j)∈E} x_i x_j mod 2` for the basis index `x`
    /// (vertex 0 is the most significant bit).
    pub fn quadratic_form(&self, x: usize) -> u32 {
        let n = self.n_vertices;
        let bit = |v: usize| (x >> (n - 1 - v)) & 1;
        self.edges().iter().map(|&(a, b)| (bit(a) & bit(b)) as u32).sum::<u32>() % 2
    }
}

fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// `Π_{e∈E} CZ_e |+>^n`.
pub fn graph_state(g: &Graph) -> StateVector {
    let n = g.n_vertices();
    let mut state = StateVector::zero(n).expect("graph has a valid vertex count");
    let hs = vec![Gate1Q::h(); n];
    state = state.apply_local_operator(&hs).expect("one operator per qubit");
    for (a, b) in g.edges() {
        state
            .apply_2q_mut(&Gate2Q::cz(a, b).expect("simple graphs have no loops"))
            .expect("edges are in range");
    }
    state
}

/// One equivalence class of four-vertex graphs.
#[derive(Debug, Clone)]
pub struct GraphClass {
    pub id: usize,
    pub representative: Graph,
    /// Monomials of the representative's `f_G`, using 1-based variable names.
    pub polynomial: String,
    pub members: Vec<Graph>,
}

impl GraphClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct GraphClassTable {
    classes: Vec<GraphClass>,
    class_of_mask: Vec<usize>,
}

/// Expected class sizes for four vertices, classes 1..=6.
pub const FOUR_QUBIT_CLASS_SIZES: [usize; 6] = [1, 6, 3, 16, 33, 5];

impl GraphClassTable {
    pub fn classes(&self) -> &[GraphClass] {
        &self.classes
    }

    /// Class with 1-based id.
    pub fn class(&self, id: usize) -> Result<&GraphClass> {
        if !(1..=self.classes.len()).contains(&id) {
            return Err(Error::InvalidClass(id));
        }
        Ok(&self.classes[id - 1])
    }

    pub fn class_of(&self, g: &Graph) -> Result<usize> {
        if g.n_vertices() != 4 {
            return Err(Error::InvalidGraph(format!("class table covers 4 vertices, got {}", g.n_vertices())));
        }
        Ok(self.class_of_mask[g.edge_mask() as usize])
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(GraphClass::len).collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Partitions all 64 four-vertex graphs by closing six representatives
/// under local complementation and vertex relabeling.
pub fn enumerate_four_qubit_classes() -> Result<GraphClassTable> {
    let reps: [(&[(usize, usize)], &str); 6] = [
        (&[], "0"),
        (&[(0, 1)], "x1x2"),
        (&[(0, 1), (2, 3)], "x1x2 + x3x4"),
        (&[(0, 1), (0, 2)], "x1x2 + x1x3"),
        (&[(0, 1), (1, 2), (2, 3)], "x1x2 + x2x3 + x3x4"),
        (&[(0, 1), (0, 2), (0, 3)], "x1x2 + x1x3 + x1x4"),
    ];
    let perms = permutations(4);
    const UNASSIGNED: usize = 0;
    let mut class_of_mask = vec![UNASSIGNED; 64];
    let mut classes = Vec::with_capacity(reps.len());

    for (idx, (edges, poly)) in reps.iter().enumerate() {
        let id = idx + 1;
        let rep = Graph::from_edges(4, edges)?;
        let mut members = Vec::new();
        let mut queue = VecDeque::from([rep.clone()]);
        while let Some(g) = queue.pop_front() {
            let mask = g.edge_mask() as usize;
            match class_of_mask[mask] {
                UNASSIGNED => {}
                c if c == id => continue,
                c => {
                    return Err(Error::Enumeration(format!(
                        "graph {g:?} reached from class {id} was already assigned to class {c}"
                    )))
                }
            }
            class_of_mask[mask] = id;
            for v in 0..4 {
                queue.push_back(g.local_complement(v)?);
            }
            for p in &perms {
                queue.push_back(g.permuted(p)?);
            }
            members.push(g);
        }
        members.sort_by_key(Graph::edge_mask);
        classes.push(GraphClass { id, representative: rep, polynomial: poly.to_string(), members });
    }

    if let Some(mask) = class_of_mask.iter().position(|&c| c == UNASSIGNED) {
        return Err(Error::Enumeration(format!("graph with edge mask {mask:#08b} belongs to no class")));
    }
    let table = GraphClassTable { classes, class_of_mask };
    if table.sizes() != FOUR_QUBIT_CLASS_SIZES {
        return Err(Error::Enumeration(format!(
            "class sizes {:?}, expected {:?}",
            table.sizes(),
            FOUR_QUBIT_CLASS_SIZES
        )));
    }
    Ok(table)
}

/// Shared, lazily computed four-vertex class table.
pub fn four_qubit_classes() -> &'static GraphClassTable {
    static TABLE: OnceLock<GraphClassTable> = OnceLock::new();
    TABLE.get_or_init(|| enumerate_four_qubit_classes().expect("four-vertex class enumeration is consistent"))
}
