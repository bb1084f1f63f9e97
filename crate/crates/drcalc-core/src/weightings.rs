//! Weightings modulo `r` on stable graphs: residue assignments to
//! half-edges that are opposite across each edge and balance a prescribed
//! integer on each vertex. This module enumerates them, sums residue
//! moments over them, and interpolates those sums into exact polynomials
//! in `r`.
//!
//! The enumeration runs over a spanning tree: residues on the `h^1(Γ)`
//! non-tree edges are free in `{0, …, r-1}` and determine the rest, so
//! there are exactly `r^{h^1}` weightings whenever the vertex values sum
//! to `0 mod r`, and none otherwise.

use crate::error::{Error, Result};
use crate::exactmath::{interpolate_r, pow_r, primes_above, rat_i, RPoly, Rational};
use crate::graphs::StableGraph;
use num_traits::Zero;

// ---------------------------------------------------------------------------
// Degree assignments
// ---------------------------------------------------------------------------

/// Per-vertex integers `delta(v)` that weightings must balance.
///
/// Derived from ramification data `(a_1, …, a_n; k)` by
/// `delta(v) = sum of a_i over legs at v + k (2 g_v - 2 + val(v))`,
/// where the valence counts both legs and half-edges. The values then sum
/// to `sum a_i + k (2g - 2 + n)` over the whole graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeAssignment {
    values: Vec<i64>,
}

impl DegreeAssignment {
    /// Build from ramification data; `a[i]` is the value at the leg with
    /// label `i + 1`, so every leg label must lie in `1..=a.len()`.
    pub fn from_inputs(graph: &StableGraph, a: &[i64], k: i64) -> Result<Self> {
        let n = a.len();
        if graph.num_legs() != n {
            return Err(Error::Validation(format!(
                "{} values for {} legs",
                n,
                graph.num_legs()
            )));
        }
        let mut values = vec![0i64; graph.num_vertices()];
        for leg in graph.legs() {
            if leg.label < 1 || leg.label as usize > n {
                return Err(Error::Validation(format!(
                    "leg label {} outside 1..={n}",
                    leg.label
                )));
            }
            values[leg.vertex] += a[(leg.label - 1) as usize];
        }
        for (v, value) in values.iter_mut().enumerate() {
            *value += k * (2 * graph.genera()[v] as i64 - 2 + graph.valence(v) as i64);
        }
        let assignment = DegreeAssignment { values };
        // The values always total sum(a) + k (2g - 2 + n); this cross-check
        // guards the valence bookkeeping above.
        let expected: i64 = a.iter().sum::<i64>()
            + k * (2 * graph.genus() as i64 - 2 + n as i64);
        debug_assert_eq!(assignment.total(), expected);
        Ok(assignment)
    }

    /// Build from explicit per-vertex values.
    pub fn from_values(graph: &StableGraph, values: Vec<i64>) -> Result<Self> {
        if values.len() != graph.num_vertices() {
            return Err(Error::Validation(format!(
                "{} values for {} vertices",
                values.len(),
                graph.num_vertices()
            )));
        }
        Ok(DegreeAssignment { values })
    }

    /// Per-vertex values.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Sum of the values.
    pub fn total(&self) -> i64 {
        self.values.iter().sum()
    }

    /// The assignment with every value negated.
    pub fn negated(&self) -> DegreeAssignment {
        DegreeAssignment {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Weightings
// ---------------------------------------------------------------------------

/// A weighting modulo `r`: one residue per half-edge, stored as the
/// residue on each edge's side-0 (designated) half; the opposite half
/// carries the negative residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weighting {
    r: u64,
    side0: Vec<u64>,
}

impl Weighting {
    /// The modulus.
    pub fn r(&self) -> u64 {
        self.r
    }

    /// Residue on the designated (side-0) half of an edge.
    pub fn designated(&self, e: usize) -> u64 {
        self.side0[e]
    }

    /// Residue on either half of an edge.
    pub fn residue(&self, e: usize, side: usize) -> u64 {
        let w = self.side0[e];
        if side == 0 {
            w
        } else {
            (self.r - w) % self.r
        }
    }

    /// All designated residues.
    pub fn designated_residues(&self) -> &[u64] {
        &self.side0
    }
}

/// Spanning-tree data for the weighting enumeration.
struct SpanningTree {
    /// BFS vertex order starting at the root 0.
    order: Vec<usize>,
    /// For each non-root vertex, the edge connecting it to its BFS parent.
    parent_edge: Vec<Option<usize>>,
    /// Edges not in the tree (exactly `h^1` of them).
    free_edges: Vec<usize>,
}

fn spanning_tree(graph: &StableGraph) -> SpanningTree {
    let nv = graph.num_vertices();
    let mut parent_edge = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut in_tree = vec![false; graph.num_edges()];
    let mut order = vec![0usize];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for (e, edge) in graph.edges().iter().enumerate() {
            for side in 0..2 {
                if edge.v[side] == v && !seen[edge.v[1 - side]] {
                    let u = edge.v[1 - side];
                    seen[u] = true;
                    parent_edge[u] = Some(e);
                    in_tree[e] = true;
                    order.push(u);
                }
            }
        }
    }
    let free_edges = (0..graph.num_edges()).filter(|&e| !in_tree[e]).collect();
    SpanningTree { order, parent_edge, free_edges }
}

fn modulus(x: i64, r: u64) -> u64 {
    x.rem_euclid(r as i64) as u64
}

/// Visit every weighting modulo `r` balancing `delta`, passing the slice
/// of designated (side-0) residues per edge. Visits nothing when the
/// values of `delta` do not sum to `0 mod r`.
pub fn each_weighting<F: FnMut(&[u64])>(
    graph: &StableGraph,
    delta: &DegreeAssignment,
    r: u64,
    mut f: F,
) {
    assert!(r >= 1, "modulus must be positive");
    assert_eq!(delta.values().len(), graph.num_vertices());
    if modulus(delta.total(), r) != 0 {
        return;
    }
    let tree = spanning_tree(graph);
    let ne = graph.num_edges();
    let mut side0 = vec![0u64; ne];
    let mut free = vec![0u64; tree.free_edges.len()];
    loop {
        for (j, &e) in tree.free_edges.iter().enumerate() {
            side0[e] = free[j];
        }
        // Solve tree edges from the leaves inward: when a vertex is
        // processed, every half-edge at it except the one toward its
        // parent already carries a residue.
        for &v in tree.order.iter().rev() {
            let Some(pe) = tree.parent_edge[v] else { continue };
            let side_at_v = if graph.edges()[pe].v[0] == v { 0 } else { 1 };
            let mut others: i64 = 0;
            for (e, edge) in graph.edges().iter().enumerate() {
                for side in 0..2 {
                    if edge.v[side] == v && !(e == pe && side == side_at_v) {
                        let w = if side == 0 { side0[e] } else { (r - side0[e]) % r };
                        others += w as i64;
                    }
                }
            }
            let at_v = modulus(delta.values()[v] - others, r);
            side0[pe] = if side_at_v == 0 { at_v } else { (r - at_v) % r };
        }
        f(&side0);
        // Odometer over the free residues.
        let mut pos = 0;
        loop {
            if pos == free.len() {
                return;
            }
            free[pos] += 1;
            if free[pos] < r {
                break;
            }
            free[pos] = 0;
            pos += 1;
        }
    }
}

/// All weightings modulo `r` balancing `delta`, in a deterministic order;
/// empty when none exist, of size `r^{h^1}` otherwise.
pub fn enumerate_weightings(
    graph: &StableGraph,
    delta: &DegreeAssignment,
    r: u64,
) -> Vec<Weighting> {
    let mut out = Vec::new();
    each_weighting(graph, delta, r, |side0| {
        out.push(Weighting { r, side0: side0.to_vec() });
    });
    out
}

// ---------------------------------------------------------------------------
// Weighting sums and their polynomial interpolation
// ---------------------------------------------------------------------------

/// The normalized moment sum
/// `r^{-h^1} * sum over weightings of prod_e (w(e)/r)^{2 m_e}`,
/// where `w(e)` is the designated (side-0) residue of edge `e`.
pub fn weighting_sum(
    graph: &StableGraph,
    delta: &DegreeAssignment,
    edge_exponents: &[u32],
    r: u64,
) -> Rational {
    assert_eq!(edge_exponents.len(), graph.num_edges());
    let mut total = Rational::zero();
    each_weighting(graph, delta, r, |side0| {
        let mut term = rat_i(1);
        for (e, &m) in edge_exponents.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let w = rat_i(side0[e] as i64) / rat_i(r as i64);
            for _ in 0..2 * m {
                term *= w.clone();
            }
        }
        total += term;
    });
    total / pow_r(r, graph.betti() as i64)
}

/// Sample moduli for interpolating weighting sums: the first `count`
/// primes above both the stabilization threshold `2 max |delta(v)|` and
/// the interpolation degree.
pub fn sample_moduli(delta: &DegreeAssignment, degree_bound: usize, count: usize) -> Vec<u64> {
    let max_abs = delta.values().iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let threshold = (2 * max_abs).max(degree_bound as u64).max(3);
    primes_above(threshold, count)
}

/// Interpolate `r^{2 sum(m_e)} * weighting_sum(…, r)` — the rescaling
/// clears the `1/r` powers and the result is a polynomial in `r` for all
/// large `r` — from samples at admissible prime moduli. `degree_bound`
/// caps the polynomial degree (the sums need at most `2 sum(m_e)`; the
/// extra samples verify the bound and stabilization).
pub fn weighting_sum_poly(
    graph: &StableGraph,
    delta: &DegreeAssignment,
    edge_exponents: &[u32],
    degree_bound: usize,
) -> Result<RPoly> {
    let rescale = 2 * edge_exponents.iter().map(|&m| m as i64).sum::<i64>();
    let moduli = sample_moduli(delta, degree_bound, degree_bound + 4);
    let samples: Vec<(u64, Rational)> = moduli
        .into_iter()
        .map(|r| {
            let value = weighting_sum(graph, delta, edge_exponents, r) * pow_r(r, rescale);
            (r, value)
        })
        .collect();
    interpolate_r(&samples, degree_bound)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use crate::graphs::enumerate_stable_graphs;

    fn self_loop() -> StableGraph {
        StableGraph::build(&[1], &[(1, 0)], &[(0, 0)]).unwrap()
    }

    fn banana() -> StableGraph {
        // Two genus-1 vertices joined by two edges.
        StableGraph::build(&[1, 1], &[], &[(0, 1), (0, 1)]).unwrap()
    }

    fn zero_delta(graph: &StableGraph) -> DegreeAssignment {
        DegreeAssignment::from_values(graph, vec![0; graph.num_vertices()]).unwrap()
    }

    #[test]
    fn degree_assignment_from_inputs() {
        // Legs contribute their values; k multiplies 2g_v - 2 + val(v)
        // with the valence counting legs and half-edges.
        let graph = StableGraph::build(&[1, 0], &[(1, 1), (2, 1)], &[(0, 1)]).unwrap();
        let d = DegreeAssignment::from_inputs(&graph, &[2, -2], 0).unwrap();
        assert_eq!(d.values(), &[0, 0]);
        let d = DegreeAssignment::from_inputs(&graph, &[2, -2], 1).unwrap();
        // v0: genus 1, valence 1 -> k*(2-2+1) = 1; v1: genus 0, valence 3 -> 1.
        assert_eq!(d.values(), &[1, 1]);
        assert_eq!(d.total(), 2); // k (2g - 2 + n) with sum(a) = 0
        // Wrong arity and out-of-range labels are rejected.
        assert!(DegreeAssignment::from_inputs(&graph, &[1], 0).is_err());
        let relabeled = StableGraph::build(&[1, 0], &[(1, 1), (7, 1)], &[(0, 1)]).unwrap();
        assert!(DegreeAssignment::from_inputs(&relabeled, &[1, -1], 0).is_err());
    }

    #[test]
    fn self_loop_weightings() {
        let graph = self_loop();
        let delta = zero_delta(&graph);
        let list = enumerate_weightings(&graph, &delta, 3);
        assert_eq!(list.len(), 3);
        let mut residues: Vec<u64> = list.iter().map(|w| w.designated(0)).collect();
        residues.sort_unstable();
        assert_eq!(residues, vec![0, 1, 2]);
        // Opposite halves carry complementary residues.
        for w in &list {
            assert_eq!((w.residue(0, 0) + w.residue(0, 1)) % 3, 0);
        }
    }

    #[test]
    fn tree_edge_forced_to_zero() {
        // Two genus-1 vertices, one edge, delta = (0,0), r = 5: the edge
        // residue is forced to 0 and the weighting is unique.
        let graph = StableGraph::build(&[1, 1], &[], &[(0, 1)]).unwrap();
        let delta = zero_delta(&graph);
        let list = enumerate_weightings(&graph, &delta, 5);
        assert_eq!(list.len(), 1);
        assert_eq!(list[0].designated(0), 0);
    }

    #[test]
    fn vertex_balance_determines_tree_residues() {
        // One-edge separating graph with leg values (2, -2) on opposite
        // vertices, r = 7: the half-edge at the value-2 vertex carries 2.
        let graph = StableGraph::build(&[1, 1], &[(1, 0), (2, 1)], &[(0, 1)]).unwrap();
        let delta = DegreeAssignment::from_inputs(&graph, &[2, -2], 0).unwrap();
        assert_eq!(delta.values(), &[2, -2]);
        let list = enumerate_weightings(&graph, &delta, 7);
        assert_eq!(list.len(), 1);
        // Side 0 of the edge sits at vertex 0, which holds the value 2.
        assert_eq!(list[0].residue(0, 0), 2);
        assert_eq!(list[0].residue(0, 1), 5);
    }

    #[test]
    fn no_weightings_when_total_not_divisible() {
        let graph = self_loop();
        let delta = DegreeAssignment::from_values(&graph, vec![1]).unwrap();
        assert!(enumerate_weightings(&graph, &delta, 3).is_empty());
        // But divisible totals admit weightings even when nonzero.
        let delta = DegreeAssignment::from_values(&graph, vec![3]).unwrap();
        assert_eq!(enumerate_weightings(&graph, &delta, 3).len(), 3);
    }

    #[test]
    fn count_is_r_to_the_betti_number() {
        // Exhaustive over the enumerated graphs with at most 3 edges for
        // small (g, n) and all r <= 11.
        for (g, n, max_e) in [(1u32, 2u32, 3usize), (2, 0, 3), (2, 1, 2), (0, 4, 2)] {
            for graph in enumerate_stable_graphs(g, n, max_e) {
                let delta = zero_delta(&graph);
                for r in 1..=11u64 {
                    let count = enumerate_weightings(&graph, &delta, r).len() as u64;
                    assert_eq!(
                        count,
                        r.pow(graph.betti()),
                        "count mismatch on {graph} at r = {r}"
                    );
                    // Every residue pair is opposite and every vertex
                    // balances (spot-check the constraints directly).
                    for w in enumerate_weightings(&graph, &delta, r) {
                        for v in 0..graph.num_vertices() {
                            let mut sum = 0i64;
                            for (e, edge) in graph.edges().iter().enumerate() {
                                for side in 0..2 {
                                    if edge.v[side] == v {
                                        sum += w.residue(e, side) as i64;
                                    }
                                }
                            }
                            assert_eq!(modulus(sum, r), 0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weighting_sum_basics() {
        // All exponents zero: normalized count, i.e. 1.
        let graph = banana();
        let delta = zero_delta(&graph);
        assert_eq!(weighting_sum(&graph, &delta, &[0, 0], 7), rat_i(1));
        // Tree graph: single weighting, product of its residue powers.
        let tree = StableGraph::build(&[1, 1], &[(1, 0), (2, 1)], &[(0, 1)]).unwrap();
        let dtree = DegreeAssignment::from_inputs(&tree, &[2, -2], 0).unwrap();
        assert_eq!(
            weighting_sum(&tree, &dtree, &[1], 7),
            rat(4, 49) // (2/7)^2 for the unique weighting
        );
        assert_eq!(weighting_sum(&tree, &dtree, &[3], 7), rat(64, 117_649));
    }

    #[test]
    fn self_loop_moment_matches_power_sum() {
        // (1/r) * sum_{w=0}^{r-1} (w/r)^2 against the closed form
        // (r-1)(2r-1)/(6 r^2).
        let graph = self_loop();
        let delta = zero_delta(&graph);
        for r in [3u64, 5, 7, 11, 13] {
            let expect = rat_i(((r - 1) * (2 * r - 1)) as i64) / rat_i((6 * r * r) as i64);
            assert_eq!(weighting_sum(&graph, &delta, &[1], r), expect);
        }
    }

    #[test]
    fn self_loop_poly_matches_faulhaber() {
        // r^2 * (1/r) sum (w/r)^2 = (1/r) sum w^2 = (r-1)(2r-1)/6
        //                        = 1/6 - r/2 + r^2/3.
        let graph = self_loop();
        let delta = zero_delta(&graph);
        let poly = weighting_sum_poly(&graph, &delta, &[1], 3).unwrap();
        assert_eq!(poly, RPoly::new(vec![rat(1, 6), rat(-1, 2), rat(1, 3)]));
        // A tree with zero exponents interpolates to the constant 1.
        let tree = StableGraph::build(&[1, 1], &[], &[(0, 1)]).unwrap();
        let dtree = zero_delta(&tree);
        let poly = weighting_sum_poly(&tree, &dtree, &[0], 1).unwrap();
        assert_eq!(poly, RPoly::constant(rat_i(1)));
    }

    #[test]
    fn poly_windows_agree_and_extrapolate() {
        // Interpolating the banana moment sum from 8 samples and from 12
        // samples (an enclosing window) gives the same polynomial, and the
        // polynomial reproduces the sum at a fresh prime outside both
        // windows.
        let graph = banana();
        let delta = zero_delta(&graph);
        let m = [1u32, 1];
        let bound = 5; // 2*(1+1) + h^1 = 5, conservative
        let collect = |count: usize| -> Vec<(u64, Rational)> {
            primes_above(5, count)
                .into_iter()
                .map(|r| (r, weighting_sum(&graph, &delta, &m, r) * pow_r(r, 4)))
                .collect()
        };
        let p8 = interpolate_r(&collect(8), bound).unwrap();
        let p12 = interpolate_r(&collect(12), bound).unwrap();
        assert_eq!(p8, p12);
        let via_policy = weighting_sum_poly(&graph, &delta, &m, bound).unwrap();
        assert_eq!(p8, via_policy);
        let fresh = 101u64;
        assert_eq!(
            p8.eval_u64(fresh),
            weighting_sum(&graph, &delta, &m, fresh) * pow_r(fresh, 4)
        );
    }

    #[test]
    fn designated_half_symmetries() {
        // Self-loop: swapping the designated half permutes the weightings
        // (t <-> r - t), so the moment sum is unchanged.
        let graph = self_loop();
        let delta = zero_delta(&graph);
        for r in [5u64, 7, 11] {
            let swapped: Rational = enumerate_weightings(&graph, &delta, r)
                .iter()
                .map(|w| {
                    let x = rat_i(w.residue(0, 1) as i64) / rat_i(r as i64);
                    x.clone() * x
                })
                .sum::<Rational>()
                / pow_r(r, 1);
            assert_eq!(swapped, weighting_sum(&graph, &delta, &[1], r));
        }

        // Global swap: reading side-1 residues everywhere equals the
        // side-0 sum for the negated assignment (w -> -w is a bijection
        // between the two weighting sets).
        let graph = StableGraph::build(&[1, 1], &[(1, 0), (2, 1)], &[(0, 1), (0, 1)]).unwrap();
        let delta = DegreeAssignment::from_inputs(&graph, &[3, -3], 0).unwrap();
        for r in [7u64, 11] {
            let side1: Rational = enumerate_weightings(&graph, &delta, r)
                .iter()
                .map(|w| {
                    let mut term = rat_i(1);
                    for e in 0..2 {
                        let x = rat_i(w.residue(e, 1) as i64) / rat_i(r as i64);
                        term *= x.clone() * x;
                    }
                    term
                })
                .sum::<Rational>()
                / pow_r(r, 1);
            assert_eq!(
                side1,
                weighting_sum(&graph, &delta.negated(), &[1, 1], r)
            );
        }

        // Swapping a single designated half on a banana genuinely changes
        // the raw moment sum (sum t^2 (r-t)^2 != sum t^4): only the
        // symmetries above hold, not per-edge swaps in products.
        let graph = banana();
        let delta = zero_delta(&graph);
        let r = 7u64;
        let mixed: Rational = enumerate_weightings(&graph, &delta, r)
            .iter()
            .map(|w| {
                let x = rat_i(w.residue(0, 0) as i64) / rat_i(r as i64);
                let y = rat_i(w.residue(1, 1) as i64) / rat_i(r as i64);
                x.clone() * x * y.clone() * y
            })
            .sum::<Rational>()
            / pow_r(r, 1);
        assert_ne!(mixed, weighting_sum(&graph, &delta, &[1, 1], r));
    }
}
