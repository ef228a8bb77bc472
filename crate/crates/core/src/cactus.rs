//! The cactus of `P`: stars (branches) joined to colored vertices (cycles of the
//! local monodromy), the path between the vertices carrying `a` and `b`, and
//! the sign vectors read off that path.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monodromy::{loop_radius, MonodromyData};
use crate::perm::Permutation;
use crate::poly::ComplexPoly;
use crate::tol::Tolerances;
use crate::track::continue_branches;

/// A colored vertex: cycle `cycle` of the generator of color `color`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexRef {
    pub color: usize,
    pub cycle: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Node {
    Star(usize),
    Vertex(VertexRef),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cactus {
    pub n: usize,
    /// `cycles[s]` is the cycle decomposition of `g_s`, fixed points included.
    pub cycles: Vec<Vec<Vec<usize>>>,
    pub vertex_a: VertexRef,
    pub vertex_b: VertexRef,
    pub v_a: Vec<usize>,
    pub v_b: Vec<usize>,
}

/// Relative position of two index sets placed on the circle at `ε_n^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Separation {
    Disjointed,
    AlmostDisjointed,
    Interleaved,
}

pub fn separation(n: usize, x: &[usize], y: &[usize]) -> Separation {
    let mut label = vec![0u8; n];
    for &i in x {
        label[i] |= 1;
    }
    for &i in y {
        label[i] |= 2;
    }
    let shared: Vec<usize> = (0..n).filter(|&i| label[i] == 3).collect();
    match shared.len() {
        0 => {
            let seq: Vec<u8> = label.iter().copied().filter(|&l| l != 0).collect();
            let changes = (0..seq.len()).filter(|&i| seq[i] != seq[(i + 1) % seq.len()]).count();
            if changes <= 2 {
                Separation::Disjointed
            } else {
                Separation::Interleaved
            }
        }
        1 => {
            let p = shared[0];
            let seq: Vec<u8> = (1..n).map(|j| label[(p + j) % n]).filter(|&l| l != 0).collect();
            let changes = seq.windows(2).filter(|w| w[0] != w[1]).count();
            if changes <= 1 {
                Separation::AlmostDisjointed
            } else {
                Separation::Interleaved
            }
        }
        _ => Separation::Interleaved,
    }
}

impl Cactus {
    /// Builds the cactus from generators `g_1..g_k` and the endpoint branch sets.
    pub fn from_generators(
        generators: &[Permutation],
        (color_a, v_a): (usize, Vec<usize>),
        (color_b, v_b): (usize, Vec<usize>),
    ) -> Result<Self> {
        let n = generators.first().map(Permutation::degree).unwrap_or(0);
        let cycles: Vec<Vec<Vec<usize>>> = generators.iter().map(Permutation::cycles).collect();
        let k = cycles.len();
        let vertices = n + cycles.iter().map(Vec::len).sum::<usize>();
        let edges = n * k;
        if vertices != edges + 1 {
            return Err(Error::TreeViolation(format!("{vertices} vertices but {edges} edges")));
        }
        let find = |color: usize, set: &[usize]| -> Result<VertexRef> {
            let mut sorted = set.to_vec();
            sorted.sort_unstable();
            cycles
                .get(color)
                .and_then(|cs| {
                    cs.iter().position(|cyc| {
                        let mut c = cyc.clone();
                        c.sort_unstable();
                        c == sorted
                    })
                })
                .map(|cycle| VertexRef { color, cycle })
                .ok_or_else(|| {
                    Error::VertexMismatch(format!("{set:?} is not a cycle of generator {}", color + 1))
                })
        };
        let vertex_a = find(color_a, &v_a)?;
        let vertex_b = find(color_b, &v_b)?;
        let mut v_a = v_a;
        let mut v_b = v_b;
        v_a.sort_unstable();
        v_b.sort_unstable();
        let cactus = Cactus { n, cycles, vertex_a, vertex_b, v_a, v_b };
        if cactus.adjacency_bfs(Node::Star(0)).iter().any(Option::is_none) {
            return Err(Error::TreeViolation("incidence graph is disconnected".into()));
        }
        let sep = separation(n, &cactus.v_a, &cactus.v_b);
        let ok = if color_a == color_b {
            sep == Separation::Disjointed
        } else {
            sep != Separation::Interleaved
        };
        if !ok {
            return Err(Error::VertexMismatch(format!(
                "V(a) = {:?} and V(b) = {:?} interleave on the circle",
                cactus.v_a, cactus.v_b
            )));
        }
        Ok(cactus)
    }

    pub fn k(&self) -> usize {
        self.cycles.len()
    }

    /// All nodes: stars first, then colored vertices by color and cycle.
    pub fn nodes(&self) -> Vec<Node> {
        let mut out: Vec<Node> = (0..self.n).map(Node::Star).collect();
        for (color, cs) in self.cycles.iter().enumerate() {
            out.extend((0..cs.len()).map(|cycle| Node::Vertex(VertexRef { color, cycle })));
        }
        out
    }

    fn node_index(&self, node: Node) -> usize {
        match node {
            Node::Star(i) => i,
            Node::Vertex(v) => {
                self.n + self.cycles[..v.color].iter().map(Vec::len).sum::<usize>() + v.cycle
            }
        }
    }

    /// Vertex of color `s` adjacent to star `i`.
    pub fn vertex_at(&self, color: usize, star: usize) -> VertexRef {
        let cycle = self.cycles[color]
            .iter()
            .position(|c| c.contains(&star))
            .expect("cycles partition the stars");
        VertexRef { color, cycle }
    }

    /// Star-to-vertex edges, as indices into [`Cactus::nodes`].
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.k());
        for i in 0..self.n {
            for s in 0..self.k() {
                out.push((i, self.node_index(Node::Vertex(self.vertex_at(s, i)))));
            }
        }
        out
    }

    fn neighbors(&self, node: Node) -> Vec<Node> {
        match node {
            Node::Star(i) => (0..self.k()).map(|s| Node::Vertex(self.vertex_at(s, i))).collect(),
            Node::Vertex(v) => self.cycles[v.color][v.cycle].iter().map(|&i| Node::Star(i)).collect(),
        }
    }

    /// BFS parents from `root`, indexed like [`Cactus::nodes`]; the root maps to itself.
    fn adjacency_bfs(&self, root: Node) -> Vec<Option<Node>> {
        let total = self.nodes().len();
        let mut parent: Vec<Option<Node>> = vec![None; total];
        parent[self.node_index(root)] = Some(root);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                let iy = self.node_index(y);
                if parent[iy].is_none() {
                    parent[iy] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        parent
    }
}

/// The unique path from `vertex_a` to `vertex_b`, alternating vertices and stars.
pub fn tree_path(cactus: &Cactus) -> Result<Vec<Node>> {
    if cactus.vertex_a == cactus.vertex_b {
        return Err(Error::DegeneratePath);
    }
    let start = Node::Vertex(cactus.vertex_a);
    let parent = cactus.adjacency_bfs(start);
    let mut path = vec![Node::Vertex(cactus.vertex_b)];
    while let Some(&last) = path.last() {
        if last == start {
            break;
        }
        match parent[cactus.node_index(last)] {
            Some(p) => path.push(p),
            None => return Err(Error::TreeViolation("endpoint vertices are not connected".into())),
        }
    }
    path.reverse();
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FVectors {
    /// `vectors[s][i] = f_{s,i}`.
    pub vectors: Vec<Vec<i32>>,
}

impl FVectors {
    pub fn sum_is_zero(&self) -> bool {
        let n = self.vectors.first().map(Vec::len).unwrap_or(0);
        (0..n).all(|i| self.vectors.iter().map(|f| f[i]).sum::<i32>() == 0)
    }

    /// Every nonzero entry is ±1 and each touched star has exactly two opposite entries.
    pub fn is_well_formed(&self) -> bool {
        let n = self.vectors.first().map(Vec::len).unwrap_or(0);
        (0..n).all(|i| {
            let col: Vec<i32> = self.vectors.iter().map(|f| f[i]).filter(|&x| x != 0).collect();
            col.iter().all(|x| x.abs() == 1) && (col.is_empty() || (col.len() == 2 && col[0] == -col[1]))
        })
    }
}

/// Entering star `i` from its `s`-vertex sets `f_{s,i} = -1`; leaving through
/// its `s`-vertex sets `f_{s,i} = +1`.
pub fn f_vectors(cactus: &Cactus, path: &[Node]) -> FVectors {
    let mut vectors = vec![vec![0i32; cactus.n]; cactus.k()];
    for (pos, node) in path.iter().enumerate() {
        if let Node::Star(i) = *node {
            if let Some(Node::Vertex(v)) = pos.checked_sub(1).map(|p| path[p]) {
                vectors[v.color][i] = -1;
            }
            if let Some(Node::Vertex(v)) = path.get(pos + 1) {
                vectors[v.color][i] = 1;
            }
        }
    }
    FVectors { vectors }
}

/// Multiplicity of `z` as a root of `P - P(z)`.
pub fn local_valency(p: &ComplexPoly, z: Complex64, tol: &Tolerances) -> usize {
    let shifted = p - &ComplexPoly::constant(p.eval(z));
    shifted.root_multiplicity(z, tol.cluster).max(1)
}

/// Branches over the base point that continue into `z` along the arc to `P(z)`.
pub fn branches_at(md: &MonodromyData, p: &ComplexPoly, z: Complex64, tol: &Tolerances) -> Result<(usize, Vec<usize>)> {
    let color = md
        .color_of(p.eval(z), tol.cluster)
        .ok_or_else(|| Error::VertexMismatch(format!("P({z}) is not among the critical values")))?;
    let d = local_valency(p, z, tol);
    let target = md.critical_values[color];
    let c = md.base_point;
    let dir = (c - target) / (c - target).norm();
    let mut r = loop_radius(c, &md.critical_values, color);
    let mut branches = continue_branches(p, &[c, target + dir * r], &md.fiber, tol.track)?;
    for _ in 0..40 {
        let mut dist: Vec<(f64, usize)> = branches.iter().map(|w| (w - z).norm()).zip(0..).collect();
        dist.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let separated = d == md.n || dist[d - 1].0 < 0.25 * dist[d].0;
        if separated {
            let mut set: Vec<usize> = dist[..d].iter().map(|x| x.1).collect();
            set.sort_unstable();
            return Ok((color, set));
        }
        let r_next = r / 4.0;
        branches = continue_branches(p, &[target + dir * r, target + dir * r_next], &branches, tol.track)?;
        r = r_next;
    }
    Err(Error::VertexMismatch(format!("branches into {z} do not separate from the rest of the fiber")))
}

pub fn build_cactus(md: &MonodromyData, p: &ComplexPoly, a: Complex64, b: Complex64, tol: &Tolerances) -> Result<Cactus> {
    let va = branches_at(md, p, a, tol)?;
    let vb = branches_at(md, p, b, tol)?;
    Cactus::from_generators(&md.generators, va, vb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::monodromy;
    use crate::poly::chebyshev;

    fn worked_cactus() -> Cactus {
        let g = |s: &str| Permutation::parse_cycles(8, s).unwrap();
        let gens = [g("(3 7)"), g("(4 7)(5 6)"), g("(1 2 3 8)(5 7)")];
        Cactus::from_generators(&gens, (0, vec![1]), (2, vec![3])).unwrap()
    }

    #[test]
    fn worked_cactus_is_a_tree() {
        let c = worked_cactus();
        assert_eq!(c.nodes().len(), 25);
        assert_eq!(c.edges().len(), 24);
    }

    #[test]
    fn worked_cactus_path_and_f_vectors() {
        let c = worked_cactus();
        let path = tree_path(&c).unwrap();
        let stars: Vec<usize> = path
            .iter()
            .filter_map(|n| if let Node::Star(i) = n { Some(i + 1) } else { None })
            .collect();
        assert_eq!(stars, vec![2, 3, 7, 4]);
        let colors: Vec<usize> = path
            .iter()
            .filter_map(|n| if let Node::Vertex(v) = n { Some(v.color + 1) } else { None })
            .collect();
        assert_eq!(colors, vec![1, 3, 1, 2, 3]);
        let f = f_vectors(&c, &path);
        assert_eq!(f.vectors[0], vec![0, -1, 1, 0, 0, 0, -1, 0]);
        assert_eq!(f.vectors[1], vec![0, 0, 0, -1, 0, 0, 1, 0]);
        assert_eq!(f.vectors[2], vec![0, 1, -1, 1, 0, 0, 0, 0]);
        assert!(f.sum_is_zero() && f.is_well_formed());
    }

    #[test]
    fn single_star_path() {
        let gens = [Permutation::identity(2), Permutation::parse_cycles(2, "(1 2)").unwrap()];
        let c = Cactus::from_generators(&gens, (0, vec![0]), (1, vec![0, 1])).unwrap();
        let path = tree_path(&c).unwrap();
        assert_eq!(path.len(), 3);
        let f = f_vectors(&c, &path);
        assert_eq!(f.vectors, vec![vec![-1, 0], vec![1, 0]]);
    }

    #[test]
    fn degenerate_path_is_rejected() {
        let gens = [Permutation::identity(2), Permutation::parse_cycles(2, "(1 2)").unwrap()];
        let c = Cactus::from_generators(&gens, (0, vec![0]), (0, vec![1])).unwrap();
        let mut same = c.clone();
        same.vertex_b = same.vertex_a;
        assert_eq!(tree_path(&same), Err(Error::DegeneratePath));
    }

    #[test]
    fn tree_violation_detected() {
        let g = Permutation::parse_cycles(3, "(1 2)").unwrap();
        let r = Cactus::from_generators(&[g.clone(), g], (0, vec![2]), (1, vec![2]));
        assert!(matches!(r, Err(Error::TreeViolation(_))));
    }

    #[test]
    fn separation_predicate() {
        assert_eq!(separation(6, &[0, 1], &[3, 4]), Separation::Disjointed);
        assert_eq!(separation(6, &[0, 3], &[1, 4]), Separation::Interleaved);
        assert_eq!(separation(6, &[0, 1], &[1, 2]), Separation::AlmostDisjointed);
        assert_eq!(separation(6, &[0, 1, 3], &[1, 2]), Separation::AlmostDisjointed);
        assert_eq!(separation(6, &[0, 1, 3], &[1, 2, 4]), Separation::Interleaved);
        assert_eq!(separation(4, &[], &[1]), Separation::Disjointed);
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_map_cactus() {
        let p = ComplexPoly::monomial(c(1.0, 0.0), 2);
        let (a, b) = (c(1.0, 0.0), c(-1.0, 0.0));
        let md = monodromy(&p, a, b).unwrap();
        let cactus = build_cactus(&md, &p, a, b, &Tolerances::default()).unwrap();
        assert_eq!(cactus.v_a.len(), 1);
        assert_eq!(cactus.v_b.len(), 1);
        assert_ne!(cactus.v_a, cactus.v_b);
    }

    #[test]
    fn chebyshev_endpoints_at_critical_points() {
        let h = 3f64.sqrt() / 2.0;
        let (a, b) = (c(-h, 0.0), c(h, 0.0));
        let p = chebyshev(6);
        let md = monodromy(&p, a, b).unwrap();
        let cactus = build_cactus(&md, &p, a, b, &Tolerances::default()).unwrap();
        assert_eq!(cactus.v_a.len(), 2);
        assert_eq!(cactus.v_b.len(), 2);
        assert_eq!(separation(6, &cactus.v_a, &cactus.v_b), Separation::Disjointed);
        let path = tree_path(&cactus).unwrap();
        let f = f_vectors(&cactus, &path);
        assert!(f.sum_is_zero() && f.is_well_formed());
    }

    #[test]
    fn cubic_cactus_vectors() {
        let p = ComplexPoly::from_real(&[0.0, -3.0, 0.0, 1.0]);
        let (a, b) = (c(0.0, 0.0), c(3f64.sqrt(), 0.0));
        let md = monodromy(&p, a, b).unwrap();
        let cactus = build_cactus(&md, &p, a, b, &Tolerances::default()).unwrap();
        let f = f_vectors(&cactus, &tree_path(&cactus).unwrap());
        assert!(f.sum_is_zero() && f.is_well_formed());
    }
}
