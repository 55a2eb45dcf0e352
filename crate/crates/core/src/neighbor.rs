//! Neighbor maps `h = φ_u^{-1} φ_ω` and the graph of their transitions.
//!
//! An arrow labeled `(i, j)` runs from `h` to `φ_i^{-1} h φ_j`. Vertices whose
//! hull image misses the hull are dropped, then vertices without an outgoing
//! arrow are trimmed until none remain. The number of infinite paths leaving
//! a vertex gives its class.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::ifs::{Affine, Ifs, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborMap {
    pub map: Affine,
    pub u: Word,
    pub omega: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborEdge {
    pub from: usize,
    pub to: usize,
    /// zero-based letters `(i, j)`
    pub label: (u32, u32),
}

/// Trimmed neighbor graph. Vertex 0 is the identity root unless the graph
/// is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborGraph {
    pub vertices: Vec<NeighborMap>,
    pub edges: Vec<NeighborEdge>,
    pub complete: bool,
    /// BFS levels explored
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexClass {
    /// exactly one infinite path
    Terminal,
    /// finitely many, more than one
    Branching,
    /// countably infinitely many
    Intermediate,
    Uncountable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DbCardinality {
    Empty,
    Finite,
    CountablyInfinite,
    Uncountable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub classes: Vec<VertexClass>,
    pub db: DbCardinality,
}

pub fn neighbor_graph(ifs: &Ifs, vertex_cap: usize, depth_cap: usize) -> Result<NeighborGraph> {
    if vertex_cap == 0 {
        return Err(Error::NonPositive("vertex_cap"));
    }
    if depth_cap == 0 {
        return Err(Error::NonPositive("depth_cap"));
    }
    let hull = ifs.hull_interval();
    let maps: Vec<Affine> = ifs.maps().iter().map(|m| m.affine()).collect();
    let inverses: Vec<Affine> = maps.iter().map(Affine::inverse).collect();

    let mut vertices = vec![NeighborMap { map: Affine::identity(), u: Word::empty(), omega: Word::empty() }];
    let mut index: HashMap<Affine, usize> = HashMap::new();
    let mut edges: Vec<NeighborEdge> = Vec::new();
    let mut expanded = vec![false];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut complete = true;
    let mut depth = 0;

    while let Some((v, level)) = queue.pop_front() {
        if level >= depth_cap {
            complete = false;
            continue;
        }
        depth = depth.max(level + 1);
        expanded[v] = true;
        for (i, inv) in inverses.iter().enumerate() {
            for (j, phi) in maps.iter().enumerate() {
                if v == 0 && i == j {
                    continue;
                }
                let next = inv.compose(&vertices[v].map).compose(phi);
                if next.image(&hull).intersect(&hull).is_empty() {
                    continue;
                }
                let to = match index.get(&next) {
                    Some(&to) => to,
                    None => {
                        if vertices.len() > vertex_cap {
                            complete = false;
                            continue;
                        }
                        let to = vertices.len();
                        let src = &vertices[v];
                        vertices.push(NeighborMap {
                            map: next.clone(),
                            u: src.u.push(i as u32),
                            omega: src.omega.push(j as u32),
                        });
                        expanded.push(false);
                        index.insert(next, to);
                        queue.push_back((to, level + 1));
                        to
                    }
                };
                edges.push(NeighborEdge { from: v, to, label: (i as u32, j as u32) });
            }
        }
    }
    let alive = trim(vertices.len(), &edges, &expanded);
    Ok(reindex(vertices, edges, &alive, complete, depth))
}

/// Fixed point of "delete vertices without outgoing edges". Unexpanded
/// vertices are kept since their edges are unknown.
fn trim(n: usize, edges: &[NeighborEdge], expanded: &[bool]) -> Vec<bool> {
    let mut alive = vec![true; n];
    let mut out = vec![0usize; n];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        out[e.from] += 1;
        incoming[e.to].push(e.from);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| out[v] == 0 && expanded[v]).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &p in &incoming[v] {
            out[p] -= 1;
            if out[p] == 0 && alive[p] && expanded[p] {
                stack.push(p);
            }
        }
    }
    alive
}

fn reindex(vertices: Vec<NeighborMap>, edges: Vec<NeighborEdge>, alive: &[bool], complete: bool, depth: usize) -> NeighborGraph {
    let mut new_index = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for (v, vertex) in vertices.into_iter().enumerate() {
        if alive[v] {
            new_index[v] = kept.len();
            kept.push(vertex);
        }
    }
    let edges = edges
        .into_iter()
        .filter(|e| alive[e.from] && alive[e.to])
        .map(|e| NeighborEdge { from: new_index[e.from], to: new_index[e.to], label: e.label })
        .collect();
    NeighborGraph { vertices: kept, edges, complete, depth }
}

impl NeighborGraph {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn from_parts(vertices: Vec<NeighborMap>, edges: Vec<NeighborEdge>) -> NeighborGraph {
        let n = vertices.len();
        let alive = trim(n, &edges, &vec![true; n]);
        reindex(vertices, edges, &alive, true, 0)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.from == v).count()
    }

    /// Necessary condition for `F ∩ hF ≠ ∅`: `cover(δ) ∩ h(cover(δ))` is
    /// nonempty for every non-root vertex.
    pub fn spot_check(&self, ifs: &Ifs, delta: &crate::Rational) -> Result<bool> {
        let cover = ifs.cover(delta)?;
        Ok(self.vertices.iter().skip(1).all(|v| cover.meets(&v.map.image_set(&cover))))
    }
}

pub fn classify(g: &NeighborGraph) -> Result<Classification> {
    if !g.complete {
        return Err(Error::IncompleteGraph);
    }
    if g.is_empty() {
        return Ok(Classification { classes: Vec::new(), db: DbCardinality::Empty });
    }
    let mut pg: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = g.vertices.iter().map(|_| pg.add_node(())).collect();
    for e in &g.edges {
        pg.add_edge(nodes[e.from], nodes[e.to], ());
    }
    let mut component = vec![0usize; g.vertices.len()];
    // reverse topological order: successors come first
    let sccs = tarjan_scc(&pg);
    for (c, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[n.index()] = c;
        }
    }
    let mut classes = vec![VertexClass::Terminal; g.vertices.len()];
    for (c, scc) in sccs.iter().enumerate() {
        let members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
        let mut internal = vec![0usize; members.len()];
        let mut exits: Vec<usize> = Vec::new();
        for e in g.edges.iter().filter(|e| component[e.from] == c) {
            if component[e.to] == c {
                internal[members.iter().position(|&m| m == e.from).unwrap()] += 1;
            } else {
                exits.push(e.to);
            }
        }
        let cyclic = internal.iter().any(|&k| k > 0);
        let class = if cyclic {
            if internal.iter().any(|&k| k != 1) {
                VertexClass::Uncountable
            } else {
                let below = exits.iter().map(|&t| classes[t]).max();
                match below {
                    None => VertexClass::Terminal,
                    Some(VertexClass::Uncountable) => VertexClass::Uncountable,
                    Some(_) => VertexClass::Intermediate,
                }
            }
        } else {
            let below = exits.iter().map(|&t| classes[t]).max().unwrap_or(VertexClass::Terminal);
            if exits.len() > 1 && below == VertexClass::Terminal {
                VertexClass::Branching
            } else {
                below
            }
        };
        for &m in &members {
            classes[m] = class;
        }
    }
    let db = match classes[0] {
        VertexClass::Terminal | VertexClass::Branching => DbCardinality::Finite,
        VertexClass::Intermediate => DbCardinality::CountablyInfinite,
        VertexClass::Uncountable => DbCardinality::Uncountable,
    };
    Ok(Classification { classes, db })
}

pub fn to_dot(g: &NeighborGraph) -> String {
    let classes = classify(g).ok().map(|c| c.classes);
    let mut out = String::from("digraph neighbors {\n");
    for (v, vertex) in g.vertices.iter().enumerate() {
        let style = match classes.as_ref().map(|c| c[v]) {
            _ if v == 0 => "shape=box",
            Some(VertexClass::Terminal) => "style=filled, fillcolor=gray40, fontcolor=white",
            Some(VertexClass::Intermediate) => "style=filled, fillcolor=gray85",
            Some(VertexClass::Uncountable) => "shape=doublecircle",
            Some(VertexClass::Branching) | None => "shape=ellipse",
        };
        let _ = writeln!(out, "  v{v} [label=\"{}\", {style}];", vertex.map);
    }
    for e in &g.edges {
        let _ = writeln!(out, "  v{} -> v{} [label=\"{},{}\"];", e.from, e.to, e.label.0 + 1, e.label.1 + 1);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digit::example_system;
    use crate::numerics::rational::{int, rat};

    fn translation(t: i64) -> NeighborMap {
        NeighborMap { map: Affine::new(int(1), int(t)), u: Word::empty(), omega: Word::empty() }
    }

    #[test]
    fn separated_systems_are_empty() {
        let cantor = Ifs::from_pairs(&[(rat(1, 3), int(0)), (rat(1, 3), rat(2, 3))]).unwrap();
        let thirds = Ifs::from_pairs(&[(rat(1, 3), int(0)), (rat(1, 3), rat(1, 3))]).unwrap();
        for ifs in [cantor, thirds] {
            let g = neighbor_graph(&ifs, 100, 50).unwrap();
            assert!(g.is_empty() && g.complete);
            assert_eq!(classify(&g).unwrap().db, DbCardinality::Empty);
            assert_eq!(to_dot(&g), "digraph neighbors {\n}\n");
        }
    }

    #[test]
    fn example_graph_is_countable() {
        let ifs = example_system();
        let g = neighbor_graph(&ifs, 500, 100).unwrap();
        assert!(g.complete);
        let mut offsets: Vec<_> = g.vertices.iter().skip(1).map(|v| v.map.offset.clone()).collect();
        offsets.sort();
        assert_eq!(offsets, vec![int(-2), int(-1), int(1), int(2)]);
        let c = classify(&g).unwrap();
        assert_eq!(c.db, DbCardinality::CountablyInfinite);
        assert!(c.classes.contains(&VertexClass::Terminal));
        assert!(c.classes.contains(&VertexClass::Intermediate));
        for v in &g.vertices {
            assert_eq!(ifs.word_map(&v.u).inverse().compose(&ifs.word_map(&v.omega)), v.map);
        }
        assert!(g.spot_check(&ifs, &rat(1, 1000)).unwrap());
        let dot = to_dot(&g);
        assert_eq!(dot.matches(" [label=").count(), g.vertices.len() + g.edges.len());
    }

    #[test]
    fn synthetic_classes() {
        let self_loop = NeighborGraph::from_parts(vec![translation(0)], vec![NeighborEdge { from: 0, to: 0, label: (0, 1) }]);
        let c = classify(&self_loop).unwrap();
        assert_eq!((c.classes, c.db), (vec![VertexClass::Terminal], DbCardinality::Finite));

        let two_loops = NeighborGraph::from_parts(
            vec![translation(0)],
            vec![NeighborEdge { from: 0, to: 0, label: (0, 1) }, NeighborEdge { from: 0, to: 0, label: (1, 0) }],
        );
        assert_eq!(classify(&two_loops).unwrap().db, DbCardinality::Uncountable);

        let fork = NeighborGraph::from_parts(
            vec![translation(0), translation(1), translation(2)],
            vec![
                NeighborEdge { from: 0, to: 1, label: (0, 1) },
                NeighborEdge { from: 0, to: 2, label: (1, 0) },
                NeighborEdge { from: 1, to: 1, label: (0, 0) },
                NeighborEdge { from: 2, to: 2, label: (0, 0) },
            ],
        );
        let c = classify(&fork).unwrap();
        assert_eq!(c.classes[0], VertexClass::Branching);
        assert_eq!(c.db, DbCardinality::Finite);
        assert!(to_dot(&fork).contains("label=\"1,2\""));
    }

    #[test]
    fn trimming_removes_dead_ends() {
        let g = NeighborGraph::from_parts(
            vec![translation(0), translation(1), translation(2)],
            vec![NeighborEdge { from: 0, to: 1, label: (0, 1) }, NeighborEdge { from: 1, to: 2, label: (0, 0) }],
        );
        assert!(g.is_empty());
    }

    #[test]
    fn caps() {
        let ifs = example_system();
        let g = neighbor_graph(&ifs, 500, 1).unwrap();
        assert!(!g.complete);
        assert_eq!(classify(&g), Err(Error::IncompleteGraph));
        assert_eq!(neighbor_graph(&ifs, 0, 5), Err(Error::NonPositive("vertex_cap")));
    }
}
