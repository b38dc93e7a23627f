//! Exhaustive generation of plane graphs with tame contact.
//!
//! The search grows a plane graph face by face. A state is a set of final
//! faces plus open faces, each a simple cycle with a consistent orientation
//! so that every directed edge lies on exactly one face. The search is
//! seeded with a polygon of size `k` (taken to be a largest face) and its
//! reverse as the single open face. Each step picks a directed edge
//! `v0 → v1` of an open face `F` and adds the final face `X` inside `F` that
//! contains this edge. Such an `X` meets the boundary of `F` in an
//! increasing sequence of its vertices, joined through zero or more new
//! vertices; whatever is left of `F` splits into new open faces.
//!
//! Completed graphs are turned into hypermaps, checked against the final
//! predicate, and deduplicated by canonical code with mirrors folded.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fan::{contact_hypermap, fcc_points, hcp_points};
use crate::hypermap::{CanonicalCode, Hypermap, OrbitKind};
use crate::tame::{self, NodeType, TGT_MILLI};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("search budget of {0} expansions exceeded")]
    SearchBudgetExceeded(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumConfig {
    pub nodes: usize,
    /// Allowed face sizes.
    pub face_sizes: BTreeSet<usize>,
    pub min_degree: usize,
    pub max_degree: usize,
    /// Prune with and require the contact weight bound.
    pub weights: bool,
    /// Prune with and require the admissible node types.
    pub geometric_prunes: bool,
    pub max_expansions: Option<u64>,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            nodes: 12,
            face_sizes: (3..=8).collect(),
            min_degree: 2,
            max_degree: 4,
            weights: true,
            geometric_prunes: true,
            max_expansions: None,
        }
    }
}

impl EnumConfig {
    fn validate(&self) -> Result<(), EnumError> {
        if self.nodes > 32 {
            return Err(EnumError::InvalidConfig("at most 32 nodes".into()));
        }
        if self.face_sizes.iter().any(|&k| k < 3) {
            return Err(EnumError::InvalidConfig("face sizes below 3".into()));
        }
        Ok(())
    }

    /// The final predicate: structural conditions with this configuration's
    /// parameters, plus the weight and node-type conditions when enabled.
    pub fn accepts(&self, h: &Hypermap) -> bool {
        let s = h.check_structure();
        if !(s.all() && h.faces_meet_nodes_once()) {
            return false;
        }
        let faces = h.orbits(OrbitKind::Face);
        let nodes = h.orbits(OrbitKind::Node);
        if faces.len() < 2 || nodes.len() != self.nodes {
            return false;
        }
        if !faces.classes.iter().all(|f| self.face_sizes.contains(&f.len())) {
            return false;
        }
        if !nodes.classes.iter().all(|v| (self.min_degree..=self.max_degree).contains(&v.len())) {
            return false;
        }
        if self.weights && tame::weight_feasible(h, tame::tables()).is_none() {
            return false;
        }
        if self.geometric_prunes {
            let ok = tame::admissible_node_types();
            return tame::node_types(h).is_ok_and(|ts| ts.iter().all(|t| ok.contains(t)));
        }
        true
    }
}

/// Counters over the whole search tree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchMetrics {
    pub expanded: u64,
    pub children: u64,
    pub pruned_weight: u64,
    pub pruned_node: u64,
    pub completed: u64,
    pub rejected: u64,
    pub duplicates: u64,
}

impl SearchMetrics {
    fn add(&mut self, o: &SearchMetrics) {
        self.expanded += o.expanded;
        self.children += o.children;
        self.pruned_weight += o.pruned_weight;
        self.pruned_node += o.pruned_node;
        self.completed += o.completed;
        self.rejected += o.rejected;
        self.duplicates += o.duplicates;
    }
}

/// A partial plane graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialGraph {
    pub final_faces: Vec<Vec<usize>>,
    pub open_faces: Vec<Vec<usize>>,
    adj: Vec<u32>,
    /// Largest face size allowed below the seed.
    cap: usize,
    /// Σ d₁ over final faces, in thousandths.
    d1_sum: i64,
}

impl PartialGraph {
    pub fn seed(k: usize) -> Self {
        let face: Vec<usize> = (0..k).collect();
        let mut adj = vec![0u32; k];
        for i in 0..k {
            let j = (i + 1) % k;
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        let open: Vec<usize> = face.iter().rev().copied().collect();
        PartialGraph {
            final_faces: vec![face],
            open_faces: vec![open],
            adj,
            cap: k,
            d1_sum: tame::tables().d1_milli(k),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn is_complete(&self) -> bool {
        self.open_faces.is_empty()
    }

    fn on_open_face(&self, v: usize) -> bool {
        self.open_faces.iter().any(|f| f.contains(&v))
    }

    fn node_type(&self, v: usize) -> NodeType {
        let mut t = NodeType::default();
        for f in self.final_faces.iter().filter(|f| f.contains(&v)) {
            t.add_face(f.len());
        }
        t
    }

    /// Σ d₁ plus the deficits `b(p,q) − Σ d₁` of a greedy set of complete
    /// `(p,q,0)` nodes with pairwise disjoint face sets. Any contact weight
    /// assignment extending this graph has at least this total.
    pub fn weight_lower_bound(&self) -> i64 {
        let t = tame::tables();
        let mut used = vec![false; self.final_faces.len()];
        let mut bound = self.d1_sum;
        for v in 0..self.vertex_count() {
            if self.on_open_face(v) {
                continue;
            }
            let fs: Vec<usize> = (0..self.final_faces.len()).filter(|&i| self.final_faces[i].contains(&v)).collect();
            let ty = self.node_type(v);
            if ty.r != 0 || fs.iter().any(|&i| used[i]) {
                continue;
            }
            let have: i64 = fs.iter().map(|&i| t.d1_milli(self.final_faces[i].len())).sum();
            let deficit = t.b_milli(ty.p, ty.q) - have;
            if deficit > 0 {
                bound += deficit;
                fs.iter().for_each(|&i| used[i] = true);
            }
        }
        bound
    }

    /// Open face and edge to fill next: the open-face vertex of largest
    /// degree, smallest label on ties, on the first open face carrying it.
    fn choose(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for (fi, f) in self.open_faces.iter().enumerate() {
            for (pos, &v) in f.iter().enumerate() {
                let better = match best {
                    None => true,
                    Some((_, _, bv)) => {
                        self.degree(v) > self.degree(bv) || (self.degree(v) == self.degree(bv) && v < bv)
                    }
                };
                if better {
                    best = Some((fi, pos, v));
                }
            }
        }
        best.map(|(fi, pos, _)| (fi, pos))
    }

    pub fn to_hypermap(&self) -> Hypermap {
        Hypermap::from_face_cycles(&self.final_faces).expect("final faces cover each directed edge once").0
    }
}

/// One way of closing a gap of the new face.
#[derive(Debug, Clone, Copy)]
struct Gap {
    /// Index into the open face (its length means the start vertex).
    to: usize,
    new_vertices: usize,
}

/// The open face being filled, rotated to start at the chosen edge.
struct Target {
    open: usize,
    face: Vec<usize>,
    max_size: usize,
}

struct Search<'a> {
    config: &'a EnumConfig,
    admissible: Vec<NodeType>,
    budget: Option<&'a AtomicU64>,
}

impl Search<'_> {
    /// All children of `g`, in a fixed order.
    fn extend(&self, g: &PartialGraph, metrics: &mut SearchMetrics) -> Vec<PartialGraph> {
        let Some((fi, start)) = g.choose() else { return Vec::new() };
        let f = &g.open_faces[fi];
        let len = f.len();
        let face: Vec<usize> = (0..len).map(|i| f[(start + i) % len]).collect();
        let max_size = g.cap.min(*self.config.face_sizes.last().unwrap_or(&0));
        let target = Target { open: fi, face, max_size };
        let mut out = Vec::new();
        let mut gaps = vec![Gap { to: 1, new_vertices: 0 }];
        let mut extra = vec![0usize; g.vertex_count()];
        self.gaps(g, &target, 1, 2, 0, &mut gaps, &mut extra, &mut out, metrics);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn gaps(
        &self,
        g: &PartialGraph,
        target: &Target,
        at: usize,
        size: usize,
        added: usize,
        gaps: &mut Vec<Gap>,
        extra: &mut [usize],
        out: &mut Vec<PartialGraph>,
        metrics: &mut SearchMetrics,
    ) {
        let face = &target.face;
        let len = face.len();
        let room_vertices = self.config.nodes - g.vertex_count() - added;
        for to in at + 1..=len {
            let b = face[to % len];
            let boundary = usize::from(to < len);
            for c in 0..=room_vertices {
                let new_size = size + boundary + c;
                if new_size > target.max_size {
                    break;
                }
                let reuse = to == at + 1 && c == 0;
                let a = face[at];
                if !reuse {
                    if c == 0 && (g.adj[a] >> b) & 1 == 1 {
                        continue;
                    }
                    let deg_ok = |v: usize, extra_v: usize| g.degree(v) + extra_v < self.config.max_degree;
                    if !deg_ok(a, extra[a]) || !deg_ok(b, extra[b]) {
                        continue;
                    }
                    extra[a] += 1;
                    extra[b] += 1;
                }
                gaps.push(Gap { to, new_vertices: c });
                if to == len {
                    if self.config.face_sizes.contains(&new_size) {
                        if let Some(child) = self.build_child(g, target, gaps, metrics) {
                            out.push(child);
                        }
                    }
                } else {
                    self.gaps(g, target, to, new_size, added + c, gaps, extra, out, metrics);
                }
                gaps.pop();
                if !reuse {
                    extra[a] -= 1;
                    extra[b] -= 1;
                }
            }
        }
    }

    fn build_child(
        &self,
        g: &PartialGraph,
        target: &Target,
        gaps: &[Gap],
        metrics: &mut SearchMetrics,
    ) -> Option<PartialGraph> {
        let face = &target.face;
        let len = face.len();
        let mut child = g.clone();
        child.open_faces.remove(target.open);
        let mut x = vec![face[0]];
        let mut from = 0;
        for gap in gaps {
            let a = face[from];
            let b = face[gap.to % len];
            let fresh: Vec<usize> = (0..gap.new_vertices).map(|_| child.add_vertex()).collect();
            x.extend(&fresh);
            if gap.to % len != 0 {
                x.push(b);
            }
            let reuse = gap.to == from + 1 && gap.new_vertices == 0;
            if !reuse {
                let mut path = vec![a];
                path.extend(&fresh);
                path.push(b);
                for w in path.windows(2) {
                    child.adj[w[0]] |= 1 << w[1];
                    child.adj[w[1]] |= 1 << w[0];
                }
                let mut piece: Vec<usize> = (from..=gap.to).map(|i| face[i % len]).collect();
                piece.extend(fresh.iter().rev());
                child.open_faces.push(piece);
            }
            from = gap.to;
        }
        child.d1_sum += tame::tables().d1_milli(x.len());
        let touched: BTreeSet<usize> = face.iter().copied().collect();
        child.final_faces.push(x);
        metrics.children += 1;

        for &v in &touched {
            if child.on_open_face(v) {
                continue;
            }
            let deg = child.degree(v);
            let ty = child.node_type(v);
            let bad_degree = deg < self.config.min_degree;
            let bad_type = self.config.geometric_prunes && !self.admissible.contains(&ty);
            if bad_degree || bad_type {
                metrics.pruned_node += 1;
                return None;
            }
        }
        if self.config.weights && child.weight_lower_bound() >= TGT_MILLI {
            metrics.pruned_weight += 1;
            return None;
        }
        Some(child)
    }

    fn charge(&self) -> Result<(), EnumError> {
        if let (Some(counter), Some(cap)) = (self.budget, self.config.max_expansions) {
            if counter.fetch_add(1, Ordering::Relaxed) >= cap {
                return Err(EnumError::SearchBudgetExceeded(cap));
            }
        }
        Ok(())
    }

    fn dfs(
        &self,
        g: PartialGraph,
        found: &mut Vec<PartialGraph>,
        metrics: &mut SearchMetrics,
    ) -> Result<(), EnumError> {
        if g.is_complete() {
            metrics.completed += 1;
            found.push(g);
            return Ok(());
        }
        self.charge()?;
        metrics.expanded += 1;
        for child in self.extend(&g, metrics) {
            self.dfs(child, found, metrics)?;
        }
        Ok(())
    }
}

impl PartialGraph {
    fn add_vertex(&mut self) -> usize {
        self.adj.push(0);
        self.adj.len() - 1
    }
}

/// Children of a partial graph under a configuration, in search order.
pub fn extend(g: &PartialGraph, config: &EnumConfig) -> Vec<PartialGraph> {
    let s = Search { config, admissible: tame::admissible_node_types(), budget: None };
    s.extend(g, &mut SearchMetrics::default())
}

/// One isomorphism-and-mirror class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateClass {
    pub code: String,
    pub hypermap: Hypermap,
    /// `face_sizes[k]` faces of size `k`.
    pub face_sizes: Vec<usize>,
    /// Node type counts.
    pub node_types: BTreeMap<String, usize>,
    /// Not isomorphic to its opposite.
    pub chiral: bool,
}

impl CandidateClass {
    fn new(code: CanonicalCode, h: Hypermap) -> Self {
        let face_sizes = h.orbits(OrbitKind::Face).size_histogram();
        let mut node_types = BTreeMap::new();
        for t in tame::node_types(&h).unwrap_or_default() {
            *node_types.entry(format!("({},{},{})", t.p, t.q, t.r)).or_insert(0) += 1;
        }
        let own = h.canonical_code(false).expect("plain");
        let mirror = h.opposite().and_then(|o| o.canonical_code(false)).expect("plain");
        CandidateClass { code: code.to_hex(), hypermap: h, face_sizes, node_types, chiral: own != mirror }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub config: EnumConfig,
    /// Sorted by canonical code.
    pub classes: Vec<CandidateClass>,
    /// Class count without mirror folding.
    pub unfolded_count: usize,
    pub metrics: SearchMetrics,
}

impl ClassificationResult {
    pub fn hypermaps(&self) -> Vec<Hypermap> {
        self.classes.iter().map(|c| c.hypermap.clone()).collect()
    }
}

/// Runs the search. With `parallel`, subtrees below the first two levels are
/// explored on the rayon pool; the output is identical either way.
pub fn enumerate_with(config: &EnumConfig, parallel: bool) -> Result<ClassificationResult, EnumError> {
    config.validate()?;
    let budget = AtomicU64::new(0);
    let search = Search { config, admissible: tame::admissible_node_types(), budget: Some(&budget) };
    let mut metrics = SearchMetrics::default();
    let mut found = Vec::new();

    let mut frontier: Vec<PartialGraph> =
        config.face_sizes.iter().filter(|&&k| k <= config.nodes).map(|&k| PartialGraph::seed(k)).collect();
    for _ in 0..2 {
        let mut next = Vec::new();
        for g in frontier {
            if g.is_complete() {
                metrics.completed += 1;
                found.push(g);
                continue;
            }
            search.charge()?;
            metrics.expanded += 1;
            next.extend(search.extend(&g, &mut metrics));
        }
        frontier = next;
    }
    let run = |g: PartialGraph| {
        let mut m = SearchMetrics::default();
        let mut f = Vec::new();
        search.dfs(g, &mut f, &mut m).map(|_| (f, m))
    };
    let parts: Vec<(Vec<PartialGraph>, SearchMetrics)> = if parallel {
        frontier.into_par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        frontier.into_iter().map(run).collect::<Result<_, _>>()?
    };
    for (f, m) in parts {
        found.extend(f);
        metrics.add(&m);
    }

    let accepted: Vec<(CanonicalCode, Hypermap)> = found
        .par_iter()
        .filter_map(|g| {
            if g.vertex_count() != config.nodes {
                return None;
            }
            let h = g.to_hypermap();
            config.accepts(&h).then(|| (h.canonical_code(true).expect("plain"), h))
        })
        .collect();
    metrics.rejected = found.len() as u64 - accepted.len() as u64;
    let mut classes: BTreeMap<CanonicalCode, Hypermap> = BTreeMap::new();
    for (code, h) in accepted {
        if let std::collections::btree_map::Entry::Vacant(e) = classes.entry(code) {
            e.insert(h);
        } else {
            metrics.duplicates += 1;
        }
    }
    let classes: Vec<CandidateClass> = classes.into_iter().map(|(c, h)| CandidateClass::new(c, h)).collect();
    let unfolded_count = classes.iter().map(|c| if c.chiral { 2 } else { 1 }).sum();
    Ok(ClassificationResult { config: config.clone(), classes, unfolded_count, metrics })
}

pub fn enumerate_tame_contact(config: &EnumConfig) -> Result<ClassificationResult, EnumError> {
    enumerate_with(config, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Fcc,
    Hcp,
}

/// The contact hypermap of a reference packing.
pub fn reference_hypermap(which: Reference) -> Hypermap {
    let cfg = match which {
        Reference::Fcc => fcc_points(),
        Reference::Hcp => hcp_points(),
    };
    contact_hypermap(&cfg).expect("reference configurations are fans").1.hypermap
}

pub fn reference_code(which: Reference) -> String {
    reference_hypermap(which).canonical_code(true).expect("plain").to_hex()
}

pub fn contains_reference(result: &ClassificationResult, which: Reference) -> bool {
    let code = reference_code(which);
    result.classes.iter().any(|c| c.code == code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_state() {
        let g = PartialGraph::seed(4);
        assert_eq!(g.final_faces, vec![vec![0, 1, 2, 3]]);
        assert_eq!(g.open_faces, vec![vec![3, 2, 1, 0]]);
        assert_eq!(g.weight_lower_bound(), 206);
        assert!((0..4).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn first_expansion_of_a_triangle() {
        let config = EnumConfig::default();
        let children = extend(&PartialGraph::seed(3), &config);
        assert!(!children.is_empty());
        for c in &children {
            assert_eq!(c.final_faces.len(), 2);
            let x = &c.final_faces[1];
            assert!((3..=3).contains(&x.len()));
            // every directed edge lies on exactly one face
            let mut darts: Vec<(usize, usize)> = c
                .final_faces
                .iter()
                .chain(&c.open_faces)
                .flat_map(|f| (0..f.len()).map(move |i| (f[i], f[(i + 1) % f.len()])))
                .collect();
            let n = darts.len();
            darts.sort_unstable();
            darts.dedup();
            assert_eq!(darts.len(), n);
        }
        // closing the triangle with its mirror leaves twelve-node search empty
        assert!(children.iter().all(|c| !c.is_complete()));
    }

    #[test]
    fn over_budget_state_has_no_children() {
        let config = EnumConfig::default();
        let mut g = PartialGraph::seed(8);
        g.d1_sum = TGT_MILLI;
        let s = Search { config: &config, admissible: tame::admissible_node_types(), budget: None };
        let mut m = SearchMetrics::default();
        assert!(s.extend(&g, &mut m).is_empty());
        assert!(m.pruned_weight > 0);
    }

    #[test]
    fn saturated_node_cannot_take_new_edges() {
        // node 0 at degree 4: the face filled next must use both of its open-face edges
        let config = EnumConfig { weights: false, geometric_prunes: false, ..EnumConfig::default() };
        let mut g = PartialGraph::seed(5);
        g.adj.extend([0, 0]);
        g.adj[0] |= 0b110_0000;
        for child in extend(&g, &config) {
            assert!(child.degree(0) <= 4);
        }
    }

    #[test]
    fn tiny_node_count_is_empty() {
        let config = EnumConfig { nodes: 3, ..EnumConfig::default() };
        let r = enumerate_with(&config, false).unwrap();
        assert!(r.classes.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let config = EnumConfig { max_expansions: Some(10), ..EnumConfig::default() };
        assert_eq!(enumerate_with(&config, false).unwrap_err(), EnumError::SearchBudgetExceeded(10));
    }

    #[test]
    fn reference_codes_differ() {
        assert_ne!(reference_code(Reference::Fcc), reference_code(Reference::Hcp));
    }
}
