//! Dart-based combinatorial maps.
//!
//! A [`Hypermap`] is a finite set of darts `0..dart_count` with three
//! permutations `e` (edge map), `n` (node map) and `f` (face map) such that
//! `e ∘ n ∘ f` is the identity. Only `e` and `n` are supplied by callers; `f`
//! is derived as `n⁻¹ ∘ e⁻¹`, so every value of this type satisfies the
//! composition law by construction.
//!
//! Edges, nodes and faces are the orbits of `e`, `n` and `f`. An isolated
//! dart is a common fixed point of all three maps.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypermapError {
    #[error("{map} map is not a permutation of 0..{dart_count}")]
    NonPermutation { map: &'static str, dart_count: usize },
    #[error("edge map is not an involution")]
    NotPlain,
    #[error("hypermap is not connected")]
    Disconnected,
}

/// Which structure permutation an orbit decomposition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    Edge,
    Node,
    Face,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypermap {
    e: Vec<usize>,
    n: Vec<usize>,
    f: Vec<usize>,
}

fn check_permutation(map: &'static str, p: &[usize], dart_count: usize) -> Result<(), HypermapError> {
    let err = HypermapError::NonPermutation { map, dart_count };
    if p.len() != dart_count {
        return Err(err);
    }
    let mut seen = vec![false; dart_count];
    for &x in p {
        if x >= dart_count || seen[x] {
            return Err(err);
        }
        seen[x] = true;
    }
    Ok(())
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

impl Hypermap {
    /// Builds a hypermap from its edge and node maps.
    pub fn new(e: Vec<usize>, n: Vec<usize>) -> Result<Self, HypermapError> {
        let dart_count = e.len();
        check_permutation("edge", &e, dart_count)?;
        check_permutation("node", &n, dart_count)?;
        // e n f = I  =>  f = n⁻¹ e⁻¹
        let e_inv = invert(&e);
        let n_inv = invert(&n);
        let f = (0..dart_count).map(|x| n_inv[e_inv[x]]).collect();
        Ok(Hypermap { e, n, f })
    }

    /// Builds the hypermap of a plane graph from its oriented face cycles.
    ///
    /// Every directed edge `(u, w)` must occur in exactly one cycle, and its
    /// reverse must occur too. The darts are the directed edges, indexed in
    /// lexicographic order; the returned vector maps dart index to `(u, w)`.
    pub fn from_face_cycles(cycles: &[Vec<usize>]) -> Result<(Self, Vec<(usize, usize)>), HypermapError> {
        let mut darts: Vec<(usize, usize)> =
            cycles.iter().flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()]))).collect();
        darts.sort_unstable();
        let count = darts.len();
        let dup = darts.windows(2).any(|w| w[0] == w[1]);
        let index = |d: (usize, usize)| darts.binary_search(&d).ok();
        let mut e = vec![usize::MAX; count];
        let mut f = vec![usize::MAX; count];
        for (x, &(u, w)) in darts.iter().enumerate() {
            e[x] = index((w, u)).unwrap_or(usize::MAX);
        }
        for c in cycles {
            let k = c.len();
            for i in 0..k {
                let x = index((c[i], c[(i + 1) % k])).unwrap();
                f[x] = index((c[(i + 1) % k], c[(i + 2) % k])).unwrap();
            }
        }
        if dup || e.contains(&usize::MAX) {
            return Err(HypermapError::NonPermutation { map: "edge", dart_count: count });
        }
        check_permutation("face", &f, count)?;
        // n = e⁻¹ f⁻¹
        let e_inv = invert(&e);
        let f_inv = invert(&f);
        let n = (0..count).map(|x| e_inv[f_inv[x]]).collect();
        let h = Hypermap::new(e, n)?;
        debug_assert_eq!(h.f, f);
        Ok((h, darts))
    }

    /// The dihedral hypermap `Dih_{2k}`: darts `x_i = fⁱx` for `i < k`
    /// followed by `y_i = n fⁱ x`.
    pub fn dihedral(k: usize) -> Self {
        assert!(k > 0, "dihedral hypermap needs k >= 1");
        let x = |i: usize| i % k;
        let y = |i: usize| k + i % k;
        let mut e = vec![0; 2 * k];
        let mut n = vec![0; 2 * k];
        for i in 0..k {
            n[x(i)] = y(i);
            n[y(i)] = x(i);
            e[x(i)] = y(i + 1);
            e[y(i + 1)] = x(i);
        }
        Hypermap::new(e, n).expect("dihedral data is valid")
    }

    pub fn dart_count(&self) -> usize {
        self.e.len()
    }

    pub fn e(&self) -> &[usize] {
        &self.e
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn f(&self) -> &[usize] {
        &self.f
    }

    fn map(&self, kind: OrbitKind) -> &[usize] {
        match kind {
            OrbitKind::Edge => &self.e,
            OrbitKind::Node => &self.n,
            OrbitKind::Face => &self.f,
        }
    }

    /// Orbits of one structure permutation, each listed in iteration order
    /// starting from its smallest dart, sorted by that dart.
    pub fn orbits(&self, kind: OrbitKind) -> OrbitPartition {
        let p = self.map(kind);
        let mut seen = vec![false; p.len()];
        let mut classes = Vec::new();
        for start in 0..p.len() {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                orbit.push(x);
                x = p[x];
            }
            classes.push(orbit);
        }
        OrbitPartition { kind, classes }
    }

    /// For each dart, the index of its orbit in `self.orbits(kind)`.
    pub fn orbit_index(&self, kind: OrbitKind) -> Vec<usize> {
        let mut idx = vec![0; self.dart_count()];
        for (i, class) in self.orbits(kind).classes.iter().enumerate() {
            for &x in class {
                idx[x] = i;
            }
        }
        idx
    }

    /// Whether the group generated by the structure maps acts transitively.
    /// The empty hypermap counts as connected.
    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    pub fn component_count(&self) -> usize {
        let d = self.dart_count();
        let mut seen = vec![false; d];
        let mut count = 0;
        for start in 0..d {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                for y in [self.e[x], self.n[x], self.f[x]] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    pub fn is_plain(&self) -> bool {
        (0..self.dart_count()).all(|x| self.e[self.e[x]] == x)
    }

    /// Node adjacency of the underlying graph (loops dropped, parallel edges
    /// collapsed).
    pub fn node_graph(&self) -> Vec<BTreeSet<usize>> {
        let node = self.orbit_index(OrbitKind::Node);
        let count = node.iter().copied().max().map_or(0, |m| m + 1);
        let mut adj = vec![BTreeSet::new(); count];
        for x in 0..self.dart_count() {
            let (a, b) = (node[x], node[self.e[x]]);
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj
    }

    pub fn check_structure(&self) -> StructureReport {
        let d = self.dart_count();
        let node = self.orbit_index(OrbitKind::Node);
        let plain = self.is_plain();
        let connected = self.is_connected();
        let counts = [OrbitKind::Node, OrbitKind::Edge, OrbitKind::Face].map(|k| self.orbits(k).len());
        let planar = connected && counts.iter().sum::<usize>() == d + 2;
        let biconnected = connected && articulation_nodes(&self.node_graph()).is_empty();
        let nondegenerate = (0..d).all(|x| self.e[x] != x);
        let no_loops = (0..d).all(|x| node[x] != node[self.e[x]]);
        let mut joins = BTreeSet::new();
        let mut no_double_join = true;
        for edge in &self.orbits(OrbitKind::Edge).classes {
            let nodes: BTreeSet<usize> = edge.iter().map(|&x| node[x]).collect();
            let nodes: Vec<usize> = nodes.into_iter().collect();
            for i in 0..nodes.len() {
                for j in i + 1..nodes.len() {
                    if !joins.insert((nodes[i], nodes[j])) {
                        no_double_join = false;
                    }
                }
            }
        }
        StructureReport { plain, planar, connected, biconnected, nondegenerate, no_loops, no_double_join }
    }

    /// Whether every face meets every node in at most one dart.
    pub fn faces_meet_nodes_once(&self) -> bool {
        let node = self.orbit_index(OrbitKind::Node);
        self.orbits(OrbitKind::Face).classes.iter().all(|face| {
            let mut nodes: Vec<usize> = face.iter().map(|&x| node[x]).collect();
            nodes.sort_unstable();
            nodes.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// The mirror image `(D, e, n⁻¹, n ∘ e)`.
    pub fn opposite(&self) -> Result<Self, HypermapError> {
        if !self.is_plain() {
            return Err(HypermapError::NotPlain);
        }
        let h = Hypermap::new(self.e.clone(), invert(&self.n))?;
        debug_assert!((0..self.dart_count()).all(|x| h.f[x] == self.n[self.e[x]]));
        Ok(h)
    }

    /// Relabels darts: dart `x` becomes `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, HypermapError> {
        check_permutation("relabeling", perm, self.dart_count())?;
        let mut e = vec![0; perm.len()];
        let mut n = vec![0; perm.len()];
        for x in 0..perm.len() {
            e[perm[x]] = perm[self.e[x]];
            n[perm[x]] = perm[self.n[x]];
        }
        Hypermap::new(e, n)
    }

    /// Disjoint union; the darts of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Hypermap) -> Hypermap {
        let shift = self.dart_count();
        let e = self.e.iter().copied().chain(other.e.iter().map(|x| x + shift)).collect();
        let n = self.n.iter().copied().chain(other.n.iter().map(|x| x + shift)).collect();
        Hypermap::new(e, n).expect("union of permutations is a permutation")
    }

    /// A labeling code invariant under dart relabeling. With `fold_mirror`,
    /// the code is also shared with the opposite hypermap.
    pub fn canonical_code(&self, fold_mirror: bool) -> Result<CanonicalCode, HypermapError> {
        if !self.is_connected() {
            return Err(HypermapError::Disconnected);
        }
        let mut best = min_traversal_code(&self.e, &self.n);
        if fold_mirror {
            let mirror = self.opposite()?;
            let other = min_traversal_code(&mirror.e, &mirror.n);
            if other < best {
                best = other;
            }
        }
        let mut bytes = Vec::with_capacity(4 + 4 * best.len());
        bytes.extend_from_slice(&(self.dart_count() as u32).to_be_bytes());
        for v in best {
            bytes.extend_from_slice(&(v as u16).to_be_bytes());
        }
        Ok(CanonicalCode { bytes, mirror_folded: fold_mirror })
    }

    pub fn is_isomorphic(&self, other: &Hypermap) -> bool {
        if self.dart_count() != other.dart_count() {
            return false;
        }
        match (self.canonical_code(false), other.canonical_code(false)) {
            (Ok(a), Ok(b)) => a == b,
            _ => isomorphic_by_search(self, other),
        }
    }

    /// Returns `k` when this hypermap is isomorphic to `Dih_{2k}`.
    pub fn is_dihedral(&self) -> Option<usize> {
        let d = self.dart_count();
        if d == 0 || !d.is_multiple_of(2) || !self.is_connected() {
            return None;
        }
        let k = d / 2;
        self.is_isomorphic(&Hypermap::dihedral(k)).then_some(k)
    }

    pub fn to_json(&self) -> HypermapJson {
        HypermapJson { dart_count: self.dart_count(), e: self.e.clone(), n: self.n.clone() }
    }

    /// Graphviz rendering of the node/edge graph; each edge is labeled with
    /// the faces on its two sides.
    pub fn to_dot(&self, name: &str) -> String {
        let node = self.orbit_index(OrbitKind::Node);
        let face = self.orbit_index(OrbitKind::Face);
        let faces = self.orbits(OrbitKind::Face);
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{name}\" {{");
        for (i, class) in self.orbits(OrbitKind::Node).classes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{i}\\ndeg {}\"];", class.len());
        }
        for edge in &self.orbits(OrbitKind::Edge).classes {
            let x = edge[0];
            let y = self.e[x];
            let _ = writeln!(out, "  n{} -- n{} [label=\"F{}|F{}\"];", node[x], node[y], face[x], face[y]);
        }
        for (i, class) in faces.classes.iter().enumerate() {
            let cycle: Vec<String> = class.iter().map(|&x| node[x].to_string()).collect();
            let _ = writeln!(out, "  // F{i} (size {}): {}", class.len(), cycle.join(" "));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for Hypermap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypermap")
            .field("dart_count", &self.dart_count())
            .field("e", &self.e)
            .field("n", &self.n)
            .finish()
    }
}

/// Breadth-first labeling from `start`, following `e` then `n`. Returns the
/// sequence `(label(e x), label(n x))` over darts in label order.
fn traversal_code(e: &[usize], n: &[usize], start: usize, label: &mut [usize]) -> Vec<usize> {
    label.fill(usize::MAX);
    let mut order = Vec::with_capacity(e.len());
    let mut queue = VecDeque::new();
    label[start] = 0;
    order.push(start);
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        for y in [e[x], n[x]] {
            if label[y] == usize::MAX {
                label[y] = order.len();
                order.push(y);
                queue.push_back(y);
            }
        }
    }
    order.iter().flat_map(|&x| [label[e[x]], label[n[x]]]).collect()
}

fn min_traversal_code(e: &[usize], n: &[usize]) -> Vec<usize> {
    let mut label = vec![usize::MAX; e.len()];
    let mut best: Option<Vec<usize>> = None;
    for start in 0..e.len() {
        let code = traversal_code(e, n, start, &mut label);
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    }
    best.unwrap_or_default()
}

/// Backtracking isomorphism test; used for disconnected inputs only.
fn isomorphic_by_search(a: &Hypermap, b: &Hypermap) -> bool {
    fn extend(a: &Hypermap, b: &Hypermap, map: &mut Vec<usize>, used: &mut Vec<bool>, x: usize) -> bool {
        if x == map.len() {
            return true;
        }
        if map[x] != usize::MAX {
            return extend(a, b, map, used, x + 1);
        }
        for y in 0..b.dart_count() {
            if used[y] {
                continue;
            }
            let saved = map.clone();
            let saved_used = used.clone();
            if propagate(a, b, map, used, x, y) && extend(a, b, map, used, x + 1) {
                return true;
            }
            *map = saved;
            *used = saved_used;
        }
        false
    }
    fn propagate(a: &Hypermap, b: &Hypermap, map: &mut [usize], used: &mut [bool], x: usize, y: usize) -> bool {
        let mut stack = vec![(x, y)];
        while let Some((x, y)) = stack.pop() {
            if map[x] != usize::MAX {
                if map[x] != y {
                    return false;
                }
                continue;
            }
            if used[y] {
                return false;
            }
            map[x] = y;
            used[y] = true;
            stack.push((a.e[x], b.e[y]));
            stack.push((a.n[x], b.n[y]));
        }
        true
    }
    let mut map = vec![usize::MAX; a.dart_count()];
    let mut used = vec![false; b.dart_count()];
    extend(a, b, &mut map, &mut used, 0)
}

/// Articulation nodes of a simple graph (Tarjan low-link).
pub fn articulation_nodes(adj: &[BTreeSet<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (node, parent, neighbor iterator position)
        let mut stack: Vec<(usize, usize, Vec<usize>, usize)> = Vec::new();
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, adj[root].iter().copied().collect(), 0));
        let mut root_children = 0;
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.3 < top.2.len() {
                let w = top.2[top.3];
                top.3 += 1;
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, adj[w].iter().copied().collect(), 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    pub kind: OrbitKind,
    pub classes: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Histogram of orbit sizes, indexed by size.
    pub fn size_histogram(&self) -> Vec<usize> {
        let max = self.classes.iter().map(Vec::len).max().unwrap_or(0);
        let mut hist = vec![0; max + 1];
        for c in &self.classes {
            hist[c.len()] += 1;
        }
        hist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub plain: bool,
    pub planar: bool,
    pub connected: bool,
    pub biconnected: bool,
    pub nondegenerate: bool,
    pub no_loops: bool,
    pub no_double_join: bool,
}

impl StructureReport {
    pub fn all(&self) -> bool {
        self.plain
            && self.planar
            && self.connected
            && self.biconnected
            && self.nondegenerate
            && self.no_loops
            && self.no_double_join
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    bytes: Vec<u8>,
    mirror_folded: bool,
}

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn mirror_folded(&self) -> bool {
        self.mirror_folded
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().fold(String::with_capacity(2 * self.bytes.len()), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// JSON interchange form. `f` is never stored; it is rederived on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypermapJson {
    pub dart_count: usize,
    pub e: Vec<usize>,
    pub n: Vec<usize>,
}

impl TryFrom<HypermapJson> for Hypermap {
    type Error = HypermapError;

    fn try_from(j: HypermapJson) -> Result<Self, Self::Error> {
        if j.e.len() != j.dart_count {
            return Err(HypermapError::NonPermutation { map: "edge", dart_count: j.dart_count });
        }
        if j.n.len() != j.dart_count {
            return Err(HypermapError::NonPermutation { map: "node", dart_count: j.dart_count });
        }
        Hypermap::new(j.e, j.n)
    }
}

impl Serialize for Hypermap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypermap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = HypermapJson::deserialize(d)?;
        Hypermap::try_from(j).map_err(serde::de::Error::custom)
    }
}
