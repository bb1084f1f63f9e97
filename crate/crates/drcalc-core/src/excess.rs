//! Combinatorial bookkeeping for the excess-intersection argument that
//! forces smoothness: parasitic-subcurve configurations on a stable
//! graph, their excess dimension, the resulting lower bound on the power
//! of `r` they can donate, and an exhaustive scan of the inequalities
//! that make every nodal configuration donate a positive power.
//!
//! A configuration splits the vertex set (irreducible components) into
//! three layers: `cross` (the subcurve where the line bundle is trivial),
//! the rest of `tors` (torsion but nontrivial), and the complement `C_0`
//! (the parasitic subcurve, where a vanishing section lives). The genus
//! of a vertex subset counts both the vertex genera and the independent
//! cycles of the induced subgraph, so that for `tors = cross` the total
//! genus splits exactly as
//! `g = g(C_0) + g(cross) + b_1(contracted graph)`.

use crate::error::{Error, Result};
use crate::graphs::{enumerate_stable_graphs, StableGraph};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// A parasitic-subcurve configuration: a stable graph together with the
/// torsion layers `cross ⊆ tors` of its vertex set. `C_0` is the
/// complement of `tors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcurveConfig {
    graph: StableGraph,
    tors: BTreeSet<usize>,
    cross: BTreeSet<usize>,
}

impl SubcurveConfig {
    /// Build a configuration, checking `cross ⊆ tors ⊆ vertices`.
    pub fn new(
        graph: StableGraph,
        tors: impl IntoIterator<Item = usize>,
        cross: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let tors: BTreeSet<usize> = tors.into_iter().collect();
        let cross: BTreeSet<usize> = cross.into_iter().collect();
        let nv = graph.num_vertices();
        if let Some(&v) = tors.iter().find(|&&v| v >= nv) {
            return Err(Error::Validation(format!(
                "torsion vertex {v} out of range (graph has {nv} vertices)"
            )));
        }
        if !cross.is_subset(&tors) {
            return Err(Error::Validation(
                "trivializing subcurve must be contained in the torsion subcurve".into(),
            ));
        }
        Ok(SubcurveConfig { graph, tors, cross })
    }

    /// The underlying stable graph.
    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    /// Vertices of the parasitic subcurve `C_0` (complement of `tors`).
    pub fn c0_vertices(&self) -> BTreeSet<usize> {
        (0..self.graph.num_vertices())
            .filter(|v| !self.tors.contains(v))
            .collect()
    }

    /// Vertices of the trivializing subcurve.
    pub fn cross_vertices(&self) -> &BTreeSet<usize> {
        &self.cross
    }

    /// Vertices of the torsion subcurve.
    pub fn tors_vertices(&self) -> &BTreeSet<usize> {
        &self.tors
    }

    /// Number of edges of the induced subgraph on `w` (self-loops count).
    fn induced_edges(&self, w: &BTreeSet<usize>) -> usize {
        self.graph
            .edges()
            .iter()
            .filter(|e| w.contains(&e.v[0]) && w.contains(&e.v[1]))
            .count()
    }

    /// Number of connected components of the induced subgraph on `w`.
    fn induced_pi0(&self, w: &BTreeSet<usize>) -> usize {
        let verts: Vec<usize> = w.iter().copied().collect();
        let index = |v: usize| verts.binary_search(&v).unwrap();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.graph.edges() {
            if w.contains(&e.v[0]) && w.contains(&e.v[1]) {
                let (a, b) = (find(&mut parent, index(e.v[0])), find(&mut parent, index(e.v[1])));
                parent[a] = b;
            }
        }
        (0..verts.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }

    /// First Betti number of the induced subgraph on `w`.
    fn induced_betti(&self, w: &BTreeSet<usize>) -> i64 {
        self.induced_edges(w) as i64 - w.len() as i64 + self.induced_pi0(w) as i64
    }

    /// Genus of the subcurve on a vertex subset: vertex genera plus the
    /// independent cycles of the induced subgraph.
    pub fn subcurve_genus(&self, w: &BTreeSet<usize>) -> i64 {
        let vertex_genus: i64 = w.iter().map(|&v| self.graph.genera()[v] as i64).sum();
        vertex_genus + self.induced_betti(w)
    }

    /// Genus of the parasitic subcurve `C_0`.
    pub fn genus_c0(&self) -> i64 {
        self.subcurve_genus(&self.c0_vertices())
    }

    /// Genus of the trivializing subcurve.
    pub fn genus_cross(&self) -> i64 {
        self.subcurve_genus(&self.cross)
    }

    /// Number of connected components of the trivializing subcurve.
    pub fn pi0_cross(&self) -> usize {
        self.induced_pi0(&self.cross)
    }

    /// Total genus of the curve.
    pub fn total_genus(&self) -> i64 {
        self.graph.genus() as i64
    }

    /// Excess dimension `e = d - c`: how far the configuration's locus
    /// falls short of the expected codimension,
    /// `g - g(cross) - #E - 1 + pi_0(cross)`.
    pub fn excess(&self) -> i64 {
        self.total_genus() - self.genus_cross() - self.graph.num_edges() as i64 - 1
            + self.pi0_cross() as i64
    }

    /// Lower bound `2 (g(C_0) - e) - 1` on the order of `r` dividing the
    /// configuration's donation (before the extra leading `r`). The value
    /// `-1` therefore makes the `r`-rescaled donation order exactly zero.
    pub fn ord_r_bound(&self) -> i64 {
        2 * (self.genus_c0() - self.excess()) - 1
    }

    /// First Betti number of the graph obtained by contracting each
    /// connected component of `C_0` and of `cross` to a point.
    pub fn betti_contracted(&self) -> i64 {
        self.graph.betti() as i64
            - self.induced_betti(&self.c0_vertices())
            - self.induced_betti(&self.cross)
    }

    /// Whether this is a vine configuration: two vertices joined only by
    /// parallel edges (at least one, no self-loops), one vertex the
    /// trivializing subcurve (`tors = cross`), the other parasitic.
    pub fn is_vine(&self) -> bool {
        self.graph.num_vertices() == 2
            && self.graph.num_edges() >= 1
            && self.graph.edges().iter().all(|e| e.v[0] != e.v[1])
            && self.tors == self.cross
            && self.cross.len() == 1
    }
}

impl fmt::Display for SubcurveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} tors {:?} cross {:?}",
            self.graph,
            self.tors.iter().collect::<Vec<_>>(),
            self.cross.iter().collect::<Vec<_>>()
        )
    }
}

/// Excess dimension of a configuration at total genus `g` (`g` must match
/// the graph).
pub fn excess_dimension(cfg: &SubcurveConfig, g: u32) -> Result<i64> {
    if cfg.total_genus() != g as i64 {
        return Err(Error::Validation(format!(
            "genus mismatch: graph has total genus {}, got {g}",
            cfg.total_genus()
        )));
    }
    Ok(cfg.excess())
}

/// Lower bound on the `r`-order of a configuration's donation; see
/// [`SubcurveConfig::ord_r_bound`].
pub fn ord_r_bound(cfg: &SubcurveConfig) -> i64 {
    cfg.ord_r_bound()
}

/// One scanned configuration with its derived quantities and inequality
/// margins.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigRecord {
    /// Total genus of the curve.
    pub genus: i64,
    /// Vertex genera of the graph.
    pub vertex_genera: Vec<u32>,
    /// Edges as vertex pairs.
    pub edges: Vec<(usize, usize)>,
    /// Torsion vertices.
    pub tors: Vec<usize>,
    /// Trivializing vertices.
    pub cross: Vec<usize>,
    /// Genus of the parasitic subcurve.
    pub genus_c0: i64,
    /// Genus of the trivializing subcurve.
    pub genus_cross: i64,
    /// Components of the trivializing subcurve.
    pub pi0_cross: usize,
    /// Excess dimension.
    pub excess: i64,
    /// Donation order bound `2(g(C_0) - e) - 1`.
    pub ord_r_bound: i64,
    /// `(g(C_0) - e) - (#V - pi_0(cross))`, the smoothness-chain margin;
    /// recorded only for `tors = cross` configurations.
    pub chain_margin: Option<i64>,
    /// `g - g(C_0) - g(cross) - b_1(contracted)`, the genus-additivity
    /// margin (zero exactly when `tors = cross`).
    pub genus_margin: i64,
    /// Whether the configuration is a two-vertex vine.
    pub is_vine: bool,
}

/// Result of [`smoothness_scan`]: every configuration's record plus any
/// inequality violations (there must be none).
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    /// Scan bound: maximum total genus.
    pub g_max: u32,
    /// Scan bound: maximum number of vertices.
    pub vertex_max: usize,
    /// Scan bound: maximum number of edges.
    pub edge_max: usize,
    /// Number of stable graphs scanned.
    pub graphs_scanned: usize,
    /// Number of configurations scanned.
    pub configs_scanned: usize,
    /// Number of vine configurations seen.
    pub vine_configs: usize,
    /// Human-readable descriptions of any violated inequalities.
    pub violations: Vec<String>,
    /// Per-configuration records.
    pub records: Vec<ConfigRecord>,
}

impl ScanReport {
    /// Error with [`Error::Counterexample`] if the scan found violations.
    pub fn verify(&self) -> Result<()> {
        if self.violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Counterexample(format!(
                "{} violation(s): {}",
                self.violations.len(),
                self.violations.join("; ")
            )))
        }
    }
}

fn subsets(items: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new()];
    for &item in items {
        let with_item: Vec<BTreeSet<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.insert(item);
                t
            })
            .collect();
        out.extend(with_item);
    }
    out
}

/// Exhaustively scan parasitic-subcurve configurations on all stable
/// graphs of genus `2..=g_max` without markings, within the vertex and
/// edge bounds, verifying:
///
/// * genus additivity `g = g(C_0) + g(cross) + b_1(Γ')` exactly when
///   `tors = cross`, and as `≥` in general;
/// * `0 ≤ b_1(Γ') ≤ b_1(Γ)` for the contracted graph;
/// * for `tors = cross`: the smoothness chain
///   `g(C_0) - e ≥ #V - pi_0(cross) ≥ 0`, that the donation bound
///   `2(g(C_0) - e) - 1` equals `-1` only for the one-vertex smooth
///   configuration, and `g(C_0) > e` whenever `C_0` is nonempty;
/// * the vine identity `e = g(C_0) - 1` on every vine configuration.
pub fn smoothness_scan(g_max: u32, vertex_max: usize, edge_max: usize) -> ScanReport {
    let mut report = ScanReport {
        g_max,
        vertex_max,
        edge_max,
        graphs_scanned: 0,
        configs_scanned: 0,
        vine_configs: 0,
        violations: Vec::new(),
        records: Vec::new(),
    };
    for g in 2..=g_max {
        for graph in enumerate_stable_graphs(g, 0, edge_max) {
            if graph.num_vertices() > vertex_max {
                continue;
            }
            report.graphs_scanned += 1;
            let vertices: Vec<usize> = (0..graph.num_vertices()).collect();
            for tors in subsets(&vertices) {
                let tors_items: Vec<usize> = tors.iter().copied().collect();
                for cross in subsets(&tors_items) {
                    let cfg =
                        SubcurveConfig::new(graph.clone(), tors.clone(), cross.clone()).unwrap();
                    report.configs_scanned += 1;
                    scan_config(&cfg, &mut report);
                }
            }
        }
    }
    report
}

fn scan_config(cfg: &SubcurveConfig, report: &mut ScanReport) {
    let g = cfg.total_genus();
    let genus_c0 = cfg.genus_c0();
    let genus_cross = cfg.genus_cross();
    let pi0_cross = cfg.pi0_cross();
    let excess = cfg.excess();
    let ord = cfg.ord_r_bound();
    let b1_contracted = cfg.betti_contracted();
    let b1 = cfg.graph().betti() as i64;
    let nv = cfg.graph().num_vertices() as i64;
    let ne = cfg.graph().num_edges();
    let symmetric = cfg.tors_vertices() == cfg.cross_vertices();
    let genus_margin = g - genus_c0 - genus_cross - b1_contracted;

    let violate = |report: &mut ScanReport, what: &str| {
        report.violations.push(format!("{what} for {cfg}"));
    };

    if !(0..=b1).contains(&b1_contracted) {
        violate(report, "contracted Betti number outside [0, b_1]");
    }
    if genus_margin < 0 {
        violate(report, "genus additivity inequality failed");
    }
    if symmetric && genus_margin != 0 {
        violate(report, "genus additivity not an equality at tors = cross");
    }

    let chain_margin = if symmetric {
        let lower = nv - pi0_cross as i64;
        if lower < 0 {
            violate(report, "component count exceeds vertex count");
        }
        if genus_c0 - excess < lower {
            violate(report, "smoothness chain g(C_0) - e >= #V - pi_0 failed");
        }
        if ord == -1 && !(nv == 1 && ne == 0) {
            violate(report, "zero-donation bound away from the smooth configuration");
        }
        if !cfg.c0_vertices().is_empty() && genus_c0 <= excess {
            violate(report, "parasitic genus does not dominate the excess");
        }
        Some(genus_c0 - excess - lower)
    } else {
        None
    };

    let is_vine = cfg.is_vine();
    if is_vine {
        report.vine_configs += 1;
        if excess != genus_c0 - 1 {
            violate(report, "vine identity e = g(C_0) - 1 failed");
        }
    }

    report.records.push(ConfigRecord {
        genus: g,
        vertex_genera: cfg.graph().genera().to_vec(),
        edges: cfg.graph().edges().iter().map(|e| (e.v[0], e.v[1])).collect(),
        tors: cfg.tors_vertices().iter().copied().collect(),
        cross: cfg.cross_vertices().iter().copied().collect(),
        genus_c0,
        genus_cross,
        pi0_cross,
        excess,
        ord_r_bound: ord,
        chain_margin,
        genus_margin,
        is_vine,
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vine(g0: u32, gx: u32, edges: usize) -> SubcurveConfig {
        let edge_list: Vec<(usize, usize)> = (0..edges).map(|_| (0, 1)).collect();
        let graph = StableGraph::build(&[g0, gx], &[], &edge_list).unwrap();
        SubcurveConfig::new(graph, [1], [1]).unwrap()
    }

    #[test]
    fn vine_excess_is_parasitic_genus_minus_one() {
        for (g0, gx, ne) in [(2, 0, 3), (2, 1, 3), (3, 2, 2), (1, 1, 4), (2, 0, 4)] {
            let cfg = vine(g0, gx, ne);
            assert!(cfg.is_vine());
            let g = (g0 + gx) as i64 + ne as i64 - 1;
            assert_eq!(cfg.total_genus(), g);
            assert_eq!(cfg.excess(), g - gx as i64 - ne as i64);
            assert_eq!(cfg.excess(), g0 as i64 - 1);
        }
        // The worked case: g(C_0) = 2, g(cross) = 1, 3 edges, so g = 5 and
        // the excess is 1; the donation bound is 2(2 - 1) - 1 = 1.
        let cfg = vine(2, 1, 3);
        assert_eq!(cfg.total_genus(), 5);
        assert_eq!(excess_dimension(&cfg, 5).unwrap(), 1);
        assert!(excess_dimension(&cfg, 4).is_err());
        assert_eq!(ord_r_bound(&cfg), 1);
    }

    #[test]
    fn smooth_configuration_has_zero_excess() {
        let graph = StableGraph::trivial(2, 0).unwrap();
        let cfg = SubcurveConfig::new(graph, [0], [0]).unwrap();
        assert_eq!(cfg.excess(), 0);
        assert_eq!(cfg.genus_c0(), 0);
        assert_eq!(cfg.ord_r_bound(), -1);
    }

    #[test]
    fn single_vertex_nodal_configuration() {
        // One vertex of genus 1 with a self-loop (total genus 2), the
        // whole curve trivializing: g(C_0) - e equals the edge count.
        let graph = StableGraph::build(&[1], &[], &[(0, 0)]).unwrap();
        let cfg = SubcurveConfig::new(graph, [0], [0]).unwrap();
        assert_eq!(cfg.total_genus(), 2);
        assert_eq!(cfg.genus_cross(), 2);
        assert_eq!(cfg.excess(), -1);
        assert_eq!(cfg.genus_c0() - cfg.excess(), 1);
        assert_eq!(cfg.ord_r_bound(), 1);
    }

    #[test]
    fn empty_parasitic_subcurve_with_edges() {
        // C_0 empty, cross the whole (connected) curve: e = -#E, so the
        // donation bound is 2 #E - 1.
        let graph = StableGraph::build(&[1, 1], &[], &[(0, 1), (0, 1)]).unwrap();
        let cfg = SubcurveConfig::new(graph, [0, 1], [0, 1]).unwrap();
        assert_eq!(cfg.excess(), -2);
        assert_eq!(cfg.ord_r_bound(), 2 * 2 - 1);
    }

    #[test]
    fn subcurve_genus_counts_induced_cycles() {
        // Triangle of genus-1 vertices: total genus 4.
        let graph = StableGraph::build(&[1, 1, 1], &[], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let cfg = SubcurveConfig::new(graph.clone(), [0, 1], [0, 1]).unwrap();
        // Induced subgraph on {0, 1}: one edge, two vertices, no cycle.
        assert_eq!(cfg.genus_cross(), 2);
        assert_eq!(cfg.pi0_cross(), 1);
        let all = SubcurveConfig::new(graph.clone(), [0, 1, 2], [0, 1, 2]).unwrap();
        assert_eq!(all.genus_cross(), 4);
        let split = SubcurveConfig::new(graph, [0, 2], [0, 2]).unwrap();
        // {0, 2} keeps the direct edge only: connected, but no cycle, so
        // the subcurve genus is just the two vertex genera.
        assert_eq!(split.pi0_cross(), 1);
        assert_eq!(split.genus_cross(), 2);
    }

    #[test]
    fn validation_rejects_bad_layers() {
        let graph = StableGraph::trivial(2, 0).unwrap();
        assert!(SubcurveConfig::new(graph.clone(), [1], [1]).is_err()); // out of range
        assert!(SubcurveConfig::new(graph, [], [0]).is_err()); // cross not in tors
    }

    #[test]
    fn genus_margin_counts_skipped_torsion_genus() {
        // v0 (genus 3) torsion-but-not-trivial, v1 (genus 1) parasitic:
        // the additivity inequality has margin exactly g(v0) = 3.
        let graph = StableGraph::build(&[3, 1], &[], &[(0, 1)]).unwrap();
        let cfg = SubcurveConfig::new(graph, [0], []).unwrap();
        let margin = cfg.total_genus() - cfg.genus_c0() - cfg.genus_cross()
            - cfg.betti_contracted();
        assert_eq!(margin, 3);
    }

    #[test]
    fn scan_is_clean_within_desk_bounds() {
        let report = smoothness_scan(3, 4, 5);
        assert!(report.violations.is_empty(), "violations: {:?}", report.violations);
        report.verify().unwrap();
        assert!(report.graphs_scanned > 10);
        assert!(report.vine_configs > 5);
        assert_eq!(report.configs_scanned, report.records.len());
        // Every vine record satisfies the identity, and the chain margin
        // is present exactly for tors = cross records.
        for rec in &report.records {
            if rec.is_vine {
                assert_eq!(rec.excess, rec.genus_c0 - 1);
            }
            assert_eq!(rec.chain_margin.is_some(), rec.tors == rec.cross);
            if let Some(m) = rec.chain_margin {
                assert!(m >= 0);
            }
            assert!(rec.genus_margin >= 0);
        }
        // JSON round-trip of the report shape.
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"violations\":[]"));
    }

    #[test]
    fn scan_below_stability_is_empty() {
        let report = smoothness_scan(1, 4, 4);
        assert_eq!(report.graphs_scanned, 0);
        assert_eq!(report.configs_scanned, 0);
        report.verify().unwrap();
    }
}
