//! Stable graphs: the dual graphs of stable nodal curves.
//!
//! A stable graph consists of vertices carrying genera, numbered legs
//! (markings) attached to vertices, and edges (nodes) given as unordered
//! pairs of vertices; self-loops and parallel edges are allowed. Stability
//! requires `2 g_v - 2 + val(v) > 0` at every vertex, where the valence
//! counts legs and edge half-ends (a self-loop counts twice).
//!
//! This module provides construction/validation, canonical forms under
//! isomorphism (shared with psi/kappa-decorated strata, see
//! [`canonical_decorated`]), automorphism counting, exhaustive enumeration
//! up to isomorphism, edge contraction, and the JSON wire format.

use crate::error::{Error, Result};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A leg (marking) attached to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Leg {
    /// Marking label (1-based, pairwise distinct within a graph).
    pub label: u32,
    /// Vertex carrying the leg.
    pub vertex: usize,
}

/// An edge as an unordered pair of (not necessarily distinct) vertices.
/// The stored order of endpoints designates half-edge side 0 and side 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    /// Endpoints; `v[0] == v[1]` for a self-loop.
    pub v: [usize; 2],
}

/// The dual graph of a stable nodal curve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<Leg>,
    edges: Vec<Edge>,
}

impl StableGraph {
    /// Construct and validate a stable graph.
    ///
    /// Checks: at least one vertex, endpoint indices in range, distinct leg
    /// labels, connectedness, and per-vertex stability.
    pub fn new(genera: Vec<u32>, mut legs: Vec<Leg>, edges: Vec<Edge>) -> Result<Self> {
        let nv = genera.len();
        if nv == 0 {
            return Err(Error::Validation("graph needs at least one vertex".into()));
        }
        for leg in &legs {
            if leg.vertex >= nv {
                return Err(Error::Validation(format!(
                    "leg {} attached to missing vertex {}",
                    leg.label, leg.vertex
                )));
            }
        }
        for e in &edges {
            if e.v[0] >= nv || e.v[1] >= nv {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) references a missing vertex",
                    e.v[0], e.v[1]
                )));
            }
        }
        legs.sort();
        if legs.windows(2).any(|w| w[0].label == w[1].label) {
            return Err(Error::Validation("duplicate leg labels".into()));
        }
        let graph = StableGraph { genera, legs, edges };
        if !graph.is_connected() {
            return Err(Error::Validation("graph is not connected".into()));
        }
        for v in 0..nv {
            if 2 * graph.genera[v] as i64 - 2 + graph.valence(v) as i64 <= 0 {
                return Err(Error::Validation(format!(
                    "vertex {v} violates stability: genus {}, valence {}",
                    graph.genera[v],
                    graph.valence(v)
                )));
            }
        }
        Ok(graph)
    }

    /// Convenience constructor from plain tuples.
    pub fn build(genera: &[u32], legs: &[(u32, usize)], edges: &[(usize, usize)]) -> Result<Self> {
        StableGraph::new(
            genera.to_vec(),
            legs.iter().map(|&(label, vertex)| Leg { label, vertex }).collect(),
            edges.iter().map(|&(a, b)| Edge { v: [a, b] }).collect(),
        )
    }

    /// The one-vertex, no-edge graph for the smooth locus of `Mbar_{g,n}`.
    pub fn trivial(g: u32, n: u32) -> Result<Self> {
        StableGraph::build(&[g], &(1..=n).map(|i| (i, 0)).collect::<Vec<_>>(), &[])
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    /// Number of edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of legs.
    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    /// Vertex genera.
    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    /// Legs, sorted by label.
    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// Edges in storage order (side 0 = `v[0]`, side 1 = `v[1]`).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// First Betti number `#E - #V + 1` of the (connected) graph.
    pub fn betti(&self) -> u32 {
        (self.edges.len() + 1 - self.genera.len()) as u32
    }

    /// Total (arithmetic) genus `sum g_v + b_1`.
    pub fn genus(&self) -> u32 {
        self.genera.iter().sum::<u32>() + self.betti()
    }

    /// Valence of a vertex: legs plus edge half-ends (loops count twice).
    pub fn valence(&self, v: usize) -> usize {
        let leg_count = self.legs.iter().filter(|l| l.vertex == v).count();
        let half_count: usize = self
            .edges
            .iter()
            .map(|e| (e.v[0] == v) as usize + (e.v[1] == v) as usize)
            .sum();
        leg_count + half_count
    }

    /// Legs attached to a vertex (label order).
    pub fn legs_at(&self, v: usize) -> Vec<Leg> {
        self.legs.iter().copied().filter(|l| l.vertex == v).collect()
    }

    /// Half-edges at a vertex as `(edge index, side)` pairs; a self-loop
    /// contributes both sides.
    pub fn half_edges_at(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for side in 0..2 {
                if e.v[side] == v {
                    out.push((i, side));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.v[0], e.v[1]), (e.v[1], e.v[0])] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Contract every edge except the one at `kept_edge`, producing a
    /// one-edge stable graph. Contracting a connected subgraph merges its
    /// vertices into one whose genus is the subgraph's total genus
    /// (component genera plus the subgraph's first Betti number).
    pub fn contract_except(&self, kept_edge: usize) -> Result<StableGraph> {
        if kept_edge >= self.edges.len() {
            return Err(Error::Validation(format!(
                "edge index {kept_edge} out of range (graph has {} edges)",
                self.edges.len()
            )));
        }
        let contracted: Vec<usize> =
            (0..self.edges.len()).filter(|&e| e != kept_edge).collect();
        self.contract_edges(&contracted)
    }

    /// Contract the given set of edges (indices into `edges()`).
    pub fn contract_edges(&self, contracted: &[usize]) -> Result<StableGraph> {
        let nv = self.genera.len();
        // Union-find over vertices joined by contracted edges.
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &ei in contracted {
            let e = &self.edges[ei];
            let (a, b) = (find(&mut parent, e.v[0]), find(&mut parent, e.v[1]));
            if a != b {
                parent[a] = b;
            }
        }
        // Component numbering and genus: component genera sum plus the Betti
        // number of the contracted subgraph restricted to the component.
        let mut index = vec![usize::MAX; nv];
        let mut new_genera: Vec<u32> = Vec::new();
        for v in 0..nv {
            let root = find(&mut parent, v);
            if index[root] == usize::MAX {
                index[root] = new_genera.len();
                new_genera.push(0);
            }
            index[v] = index[root];
            new_genera[index[root]] += self.genera[v];
        }
        // Betti contribution: contracted edges internal to a component minus
        // (component size - 1), summed per component.
        let mut comp_sizes = vec![0u32; new_genera.len()];
        for v in 0..nv {
            comp_sizes[index[v]] += 1;
        }
        let mut internal_edges = vec![0u32; new_genera.len()];
        for &ei in contracted {
            let e = &self.edges[ei];
            debug_assert_eq!(index[e.v[0]], index[e.v[1]]);
            internal_edges[index[e.v[0]]] += 1;
        }
        for c in 0..new_genera.len() {
            new_genera[c] += internal_edges[c] + 1 - comp_sizes[c];
        }
        let new_legs: Vec<Leg> = self
            .legs
            .iter()
            .map(|l| Leg { label: l.label, vertex: index[l.vertex] })
            .collect();
        let contracted_set: BTreeSet<usize> = contracted.iter().copied().collect();
        let new_edges: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !contracted_set.contains(i))
            .map(|(_, e)| Edge { v: [index[e.v[0]], index[e.v[1]]] })
            .collect();
        StableGraph::new(new_genera, new_legs, new_edges)
    }

    /// Canonical representative of the isomorphism class (no decorations).
    pub fn canonical(&self) -> CanonicalRep {
        canonical_decorated(self, &Decoration::empty(self))
    }

    /// Order of the automorphism group (vertex/edge/half-edge symmetries
    /// fixing genera and legs).
    pub fn automorphism_order(&self) -> u64 {
        automorphism_order_decorated(self, &Decoration::empty(self))
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "genera {:?}; legs", self.genera)?;
        for l in &self.legs {
            write!(f, " {}@v{}", l.label, l.vertex)?;
        }
        write!(f, "; edges")?;
        for e in &self.edges {
            write!(f, " ({},{})", e.v[0], e.v[1])?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Decorations and canonical forms
// ---------------------------------------------------------------------------

/// Psi/kappa decorations of a stable graph, used both by the canonical-form
/// machinery here and by decorated boundary strata.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    /// Per-vertex multiset of kappa indices (sorted ascending).
    pub kappa: Vec<Vec<u32>>,
    /// Psi exponent on each leg (aligned with `graph.legs()`).
    pub leg_psi: Vec<u32>,
    /// Psi exponents on the two half-edges of each edge (aligned with
    /// `graph.edges()`, `(side 0, side 1)`).
    pub edge_psi: Vec<(u32, u32)>,
}

impl Decoration {
    /// The empty decoration of a graph (all exponents zero).
    pub fn empty(graph: &StableGraph) -> Self {
        Decoration {
            kappa: vec![Vec::new(); graph.num_vertices()],
            leg_psi: vec![0; graph.num_legs()],
            edge_psi: vec![(0, 0); graph.num_edges()],
        }
    }

    /// Total codimension contributed by the decorations (psi plus kappa
    /// indices), not counting the edges themselves.
    pub fn decoration_degree(&self) -> u32 {
        let kappa: u32 = self.kappa.iter().flatten().sum();
        let legs: u32 = self.leg_psi.iter().sum();
        let halves: u32 = self.edge_psi.iter().map(|(a, b)| a + b).sum();
        kappa + legs + halves
    }
}

/// Per-vertex record entering the canonical form: genus, sorted kappa
/// multiset, sorted (label, psi) legs.
type VertexRecord = (u32, Vec<u32>, Vec<(u32, u32)>);

/// Normalized edge record: unordered pair of (vertex, psi) half-records,
/// stored with the smaller half first.
type EdgeRecord = ((usize, u32), (usize, u32));

/// Canonical representative of a decorated stratum: vertex records in
/// canonical order plus the sorted normalized edge records. Two decorated
/// strata are isomorphic exactly when their canonical reps are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalRep {
    /// Vertex records in canonical order.
    pub vertices: Vec<VertexRecord>,
    /// Sorted normalized edge records (vertex indices refer to the
    /// canonical vertex order).
    pub edges: Vec<EdgeRecord>,
}

fn vertex_record(graph: &StableGraph, decor: &Decoration, v: usize) -> VertexRecord {
    let mut kappa = decor.kappa[v].clone();
    kappa.sort_unstable();
    let mut legs: Vec<(u32, u32)> = graph
        .legs
        .iter()
        .enumerate()
        .filter(|(_, l)| l.vertex == v)
        .map(|(i, l)| (l.label, decor.leg_psi[i]))
        .collect();
    legs.sort_unstable();
    (graph.genera[v], kappa, legs)
}

/// All vertex permutations compatible with sorting vertex records; only
/// these can realize the lexicographic minimum or an automorphism. Returns
/// (sorted records, permutations as maps old-vertex -> new-position).
fn record_respecting_perms(
    graph: &StableGraph,
    decor: &Decoration,
) -> (Vec<VertexRecord>, Vec<Vec<usize>>) {
    let nv = graph.num_vertices();
    let records: Vec<VertexRecord> =
        (0..nv).map(|v| vertex_record(graph, decor, v)).collect();
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by(|&a, &b| records[a].cmp(&records[b]));
    let sorted: Vec<VertexRecord> = order.iter().map(|&v| records[v].clone()).collect();

    // Group positions with equal records; candidate permutations permute
    // vertices within each group.
    let mut groups: Vec<Vec<usize>> = Vec::new(); // vertices grouped by record
    let mut bounds: Vec<(usize, usize)> = Vec::new(); // position ranges
    let mut start = 0;
    while start < nv {
        let mut end = start + 1;
        while end < nv && sorted[end] == sorted[start] {
            end += 1;
        }
        groups.push(order[start..end].to_vec());
        bounds.push((start, end));
        start = end;
    }

    let mut perms: Vec<Vec<usize>> = Vec::new();
    let group_perms: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .map(|g| g.iter().copied().permutations(g.len()).collect())
        .collect();
    let mut chosen = vec![0usize; groups.len()];
    loop {
        let mut perm = vec![usize::MAX; nv];
        for (gi, (s, _)) in bounds.iter().enumerate() {
            for (offset, &v) in group_perms[gi][chosen[gi]].iter().enumerate() {
                perm[v] = s + offset;
            }
        }
        perms.push(perm);
        // Odometer increment.
        let mut gi = 0;
        loop {
            if gi == groups.len() {
                return (sorted, perms);
            }
            chosen[gi] += 1;
            if chosen[gi] < group_perms[gi].len() {
                break;
            }
            chosen[gi] = 0;
            gi += 1;
        }
    }
}

fn edge_records_under(
    graph: &StableGraph,
    decor: &Decoration,
    perm: &[usize],
) -> Vec<EdgeRecord> {
    let mut records: Vec<EdgeRecord> = graph
        .edges
        .iter()
        .zip(decor.edge_psi.iter())
        .map(|(e, &(p0, p1))| {
            let a = (perm[e.v[0]], p0);
            let b = (perm[e.v[1]], p1);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    records.sort_unstable();
    records
}

/// Canonical form of a decorated stratum (graph plus decorations), the
/// lexicographic minimum over all isomorphism-compatible relabellings.
pub fn canonical_decorated(graph: &StableGraph, decor: &Decoration) -> CanonicalRep {
    let (sorted_records, perms) = record_respecting_perms(graph, decor);
    let mut best: Option<Vec<EdgeRecord>> = None;
    for perm in &perms {
        let records = edge_records_under(graph, decor, perm);
        if best.as_ref().is_none_or(|b| records < *b) {
            best = Some(records);
        }
    }
    CanonicalRep {
        vertices: sorted_records,
        edges: best.unwrap_or_default(),
    }
}

/// Order of the automorphism group of a decorated stratum: pairs of a
/// vertex permutation preserving vertex records and a matching of edges
/// preserving normalized edge records, counting half-edge flips of
/// symmetric self-loops.
pub fn automorphism_order_decorated(graph: &StableGraph, decor: &Decoration) -> u64 {
    let (_, perms) = record_respecting_perms(graph, decor);
    // Fix one record-respecting relabelling as the reference frame; the
    // permutations matching its edge records are exactly the images of the
    // automorphism group's vertex part.
    let reference = edge_records_under(graph, decor, &perms[0]);

    let mut total: u64 = 0;
    for perm in &perms {
        let image = edge_records_under(graph, decor, perm);
        if image != reference {
            continue;
        }
        // Count edge matchings: product over distinct records of m! times a
        // flip factor 2 per symmetric record instance.
        let mut factor: u64 = 1;
        let mut i = 0;
        while i < reference.len() {
            let mut j = i + 1;
            while j < reference.len() && reference[j] == reference[i] {
                j += 1;
            }
            let mult = (j - i) as u64;
            factor *= (1..=mult).product::<u64>();
            let (a, b) = reference[i];
            if a == b {
                factor *= 2u64.pow(mult as u32);
            }
            i = j;
        }
        total += factor;
    }
    total
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Enumerate all stable graphs of genus `g` with `n` legs and at most
/// `max_edges` edges, up to isomorphism, sorted by canonical form.
///
/// Legs are labeled `1..=n`. The bound is additionally capped by the
/// dimension `3g - 3 + n` (no stable graph has more edges).
pub fn enumerate_stable_graphs(g: u32, n: u32, max_edges: usize) -> Vec<StableGraph> {
    let dim = 3 * g as i64 - 3 + n as i64;
    if dim < 0 {
        return Vec::new();
    }
    let max_edges = max_edges.min(dim.max(0) as usize);
    let mut seen: BTreeSet<CanonicalRep> = BTreeSet::new();
    let mut out: Vec<(CanonicalRep, StableGraph)> = Vec::new();

    for num_edges in 0..=max_edges {
        for num_vertices in 1..=(num_edges + 1) {
            let h1 = (num_edges + 1 - num_vertices) as u32;
            if h1 > g {
                continue;
            }
            let genus_sum = g - h1;
            // All ordered genus compositions.
            let compositions = compositions_of(genus_sum, num_vertices);
            // All unordered edge multisets over vertex pairs.
            let pairs: Vec<(usize, usize)> = (0..num_vertices)
                .flat_map(|a| (a..num_vertices).map(move |b| (a, b)))
                .collect();
            let edge_choices: Vec<Vec<(usize, usize)>> = (0..pairs.len())
                .combinations_with_replacement(num_edges)
                .map(|idxs| idxs.into_iter().map(|i| pairs[i]).collect())
                .collect();
            // All leg assignments.
            let leg_choices = leg_assignments(n, num_vertices);

            for genera in &compositions {
                for edges in &edge_choices {
                    for legs in &leg_choices {
                        let candidate = StableGraph::new(
                            genera.clone(),
                            legs.clone(),
                            edges.iter().map(|&(a, b)| Edge { v: [a, b] }).collect(),
                        );
                        let Ok(graph) = candidate else { continue };
                        let rep = graph.canonical();
                        if seen.insert(rep.clone()) {
                            out.push((rep, graph));
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, g)| g).collect()
}

fn compositions_of(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fn rec(total: u32, idx: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx + 1 == current.len() {
            current[idx] = total;
            out.push(current.clone());
            return;
        }
        for v in 0..=total {
            current[idx] = v;
            rec(total - v, idx + 1, current, out);
        }
    }
    if parts == 0 {
        return out;
    }
    rec(total, 0, &mut current, &mut out);
    out
}

fn leg_assignments(n: u32, num_vertices: usize) -> Vec<Vec<Leg>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n as usize];
    fn rec(
        n: u32,
        num_vertices: usize,
        idx: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<Leg>>,
    ) {
        if idx == n as usize {
            out.push(
                current
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| Leg { label: i as u32 + 1, vertex: v })
                    .collect(),
            );
            return;
        }
        for v in 0..num_vertices {
            current[idx] = v;
            rec(n, num_vertices, idx + 1, current, out);
        }
    }
    rec(n, num_vertices, 0, &mut current, &mut out);
    out
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct HalfEdgeJson {
    vertex: usize,
}

#[derive(Serialize, Deserialize)]
struct LegJson {
    label: u32,
    vertex: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    genera: Vec<u32>,
    legs: Vec<LegJson>,
    edges: Vec<[HalfEdgeJson; 2]>,
}

impl Serialize for StableGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            genera: self.genera.clone(),
            legs: self
                .legs
                .iter()
                .map(|l| LegJson { label: l.label, vertex: l.vertex })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| [HalfEdgeJson { vertex: e.v[0] }, HalfEdgeJson { vertex: e.v[1] }])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StableGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(deserializer)?;
        StableGraph::new(
            raw.genera,
            raw.legs
                .into_iter()
                .map(|l| Leg { label: l.label, vertex: l.vertex })
                .collect(),
            raw.edges
                .into_iter()
                .map(|[a, b]| Edge { v: [a.vertex, b.vertex] })
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
