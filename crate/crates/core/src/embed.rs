//! Spanning forest patterns, their copies in `K_n`, and the brute-force oracle.
//!
//! Copies are enumerated component by component. Isomorphic components are
//! placed in increasing order of their smallest host vertex, and each
//! component draws from its distinct labeled copies on the chosen vertex set
//! (paths fixed by smallest-endpoint-first, stars by their center), so every
//! automorphism-distinct copy is visited exactly once.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphcore::{norm, Edge, EdgeLabeling, SignMatrix};

/// Copy counts above this are refused by the exhaustive oracle.
pub const COPY_GUARD: f64 = 1e9;

/// Largest non-path, non-star tree component whose labeled copies are listed by brute force.
const GENERAL_COMPONENT_LIMIT: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Single,
    /// Local vertex `j` is the `j`-th vertex along the path.
    Path,
    /// Local vertex 0 is the center.
    Star,
    General,
}

#[derive(Clone, Debug)]
pub struct Component {
    /// Pattern vertices in local order.
    pub vertices: Vec<usize>,
    /// Edges in local indices.
    pub local_edges: Vec<(usize, usize)>,
    pub kind: ComponentKind,
    /// Isomorphism class key (AHU encoding around the tree center).
    pub key: String,
}

impl Component {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// An abstract spanning forest on `{0..n-1}`.
#[derive(Clone, Debug)]
pub struct ForestPattern {
    n: usize,
    edges: Vec<Edge>,
    degrees: Vec<usize>,
    max_degree: usize,
    adj: Vec<Vec<usize>>,
    components: Vec<Component>,
}

impl ForestPattern {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Spec("a pattern needs at least one vertex".into()));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        let mut normed = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidEdge(a, b, n));
            }
            let e = norm((a, b));
            if !seen.insert(e) {
                return Err(Error::Spec(format!("duplicate edge {}-{}", e.0, e.1)));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::Spec(format!("edge {a}-{b} closes a cycle")));
            }
            parent[ra] = rb;
            adj[a].push(b);
            adj[b].push(a);
            normed.push(e);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let components = split_components(n, &adj);
        Ok(ForestPattern { n, edges: normed, degrees, max_degree, adj, components })
    }

    /// `K_{1,n-1}` centered at vertex 0.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|v| (0, v)).collect())
    }

    /// `P_n` along `0, 1, …, n-1`.
    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    pub fn matching(n: usize) -> Result<Self> {
        Self::path_factor(n, 2)
    }

    /// `(n/k) P_k`, path `i` on vertices `k*i .. k*i + k - 1`.
    pub fn path_factor(n: usize, k: usize) -> Result<Self> {
        if k < 2 || n % k != 0 {
            return Err(Error::Divisibility(format!("a P{k}-factor needs {k} | n, got n={n}")));
        }
        let mut edges = Vec::new();
        for base in (0..n).step_by(k) {
            for j in 1..k {
                edges.push((base + j - 1, base + j));
            }
        }
        Self::new(n, edges)
    }

    /// `(n/k)` disjoint copies of the tree `tree` (which must be connected).
    pub fn tree_factor(n: usize, tree: &ForestPattern) -> Result<Self> {
        let k = tree.n;
        if tree.components.len() != 1 {
            return Err(Error::Spec("factor component must be a tree".into()));
        }
        if n % k != 0 {
            return Err(Error::Divisibility(format!("a T-factor with |T|={k} needs {k} | n, got n={n}")));
        }
        let mut edges = Vec::new();
        for base in (0..n).step_by(k) {
            edges.extend(tree.edges.iter().map(|&(a, b)| (base + a, base + b)));
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Number of automorphism-distinct copies in `K_n`, as a float.
    pub fn copy_count_estimate(&self) -> f64 {
        let mut ln = ln_factorial(self.n);
        let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.components {
            ln -= ln_factorial(c.size());
            ln += (local_copy_count(c) as f64).ln();
            *classes.entry(&c.key).or_default() += 1;
        }
        for &m in classes.values() {
            ln -= ln_factorial(m);
        }
        ln.exp()
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn local_copy_count(c: &Component) -> u64 {
    let k = c.size() as u64;
    match c.kind {
        ComponentKind::Single => 1,
        ComponentKind::Path => (1..=k).product::<u64>() / 2,
        ComponentKind::Star => k,
        ComponentKind::General => general_local_copies(c).map_or(u64::MAX, |v| v.len() as u64),
    }
}

fn split_components(n: usize, adj: &[Vec<usize>]) -> Vec<Component> {
    let mut comp_of = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp_of[s] != usize::MAX {
            continue;
        }
        let mut verts = vec![s];
        comp_of[s] = out.len();
        let mut head = 0;
        while head < verts.len() {
            let v = verts[head];
            head += 1;
            for &w in &adj[v] {
                if comp_of[w] == usize::MAX {
                    comp_of[w] = out.len();
                    verts.push(w);
                }
            }
        }
        verts.sort_unstable();
        out.push(build_component(verts, adj));
    }
    out
}

fn build_component(mut verts: Vec<usize>, adj: &[Vec<usize>]) -> Component {
    let k = verts.len();
    let deg = |v: usize| adj[v].len();
    let kind = if k == 1 {
        ComponentKind::Single
    } else if verts.iter().all(|&v| deg(v) <= 2) {
        // reorder along the path, starting from the smaller endpoint
        let start = *verts.iter().find(|&&v| deg(v) == 1).expect("a path has an endpoint");
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while order.len() < k {
            let next = *adj[cur].iter().find(|&&w| w != prev).expect("path continues");
            prev = cur;
            cur = next;
            order.push(cur);
        }
        verts = order;
        ComponentKind::Path
    } else if let Some(&center) = verts.iter().find(|&&v| deg(v) == k - 1) {
        verts.retain(|&v| v != center);
        verts.insert(0, center);
        ComponentKind::Star
    } else {
        ComponentKind::General
    };
    let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut local_edges = Vec::new();
    for &v in &verts {
        for &w in &adj[v] {
            if v < w {
                local_edges.push(norm((local[&v], local[&w])));
            }
        }
    }
    local_edges.sort_unstable();
    let key = format!("{k}:{}", tree_key(k, &local_edges));
    Component { vertices: verts, local_edges, kind, key }
}

/// AHU canonical string of a tree, rooted at its center (or bicenter).
fn tree_key(k: usize, edges: &[(usize, usize)]) -> String {
    if k == 1 {
        return "()".into();
    }
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..k).filter(|&v| deg[v] <= 1).collect();
    let mut left = k;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            deg[v] = 0;
            for &w in &adj[v] {
                if deg[w] > 0 {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    fn enc(v: usize, parent: usize, adj: &[Vec<usize>]) -> String {
        let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| enc(w, v, adj)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    match layer.as_slice() {
        [c] => enc(*c, usize::MAX, &adj),
        [a, b] => {
            let (x, y) = (enc(*a, *b, &adj), enc(*b, *a, &adj));
            if x <= y {
                format!("{x}{y}")
            } else {
                format!("{y}{x}")
            }
        }
        _ => unreachable!("a tree has one or two centers"),
    }
}

/// Distinct labeled copies of a general tree component on `0..k`, as
/// local-vertex → position maps. `None` when the component is too large.
fn general_local_copies(c: &Component) -> Option<Vec<Vec<u8>>> {
    let k = c.size();
    if k > GENERAL_COMPONENT_LIMIT {
        return None;
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut perm: Vec<u8> = (0..k as u8).collect();
    heap_permutations(&mut perm, k, &mut |p| {
        let mut es: Vec<(u8, u8)> = c
            .local_edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (p[a], p[b]);
                if x < y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        es.sort_unstable();
        if seen.insert(es) {
            out.push(p.to_vec());
        }
    });
    Some(out)
}

fn heap_permutations(p: &mut [u8], k: usize, f: &mut dyn FnMut(&[u8])) {
    if k <= 1 {
        f(p);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(p, k - 1, f);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
    heap_permutations(p, k - 1, f);
}

/// Parses `star`, `path`, `matching`, `factor:P<k>` or `edges:<i-j,…>`.
pub fn parse_pattern(spec: &str, n: usize) -> Result<ForestPattern> {
    let spec = spec.trim();
    match spec {
        "star" => ForestPattern::star(n),
        "path" => ForestPattern::path(n),
        "matching" => ForestPattern::matching(n),
        _ => {
            if let Some(k) = spec.strip_prefix("factor:P") {
                let k: usize = k.parse().map_err(|_| Error::Spec(format!("bad path length in {spec:?}")))?;
                if k < 2 {
                    return Err(Error::Spec(format!("path factor needs k >= 2 in {spec:?}")));
                }
                ForestPattern::path_factor(n, k)
            } else if let Some(list) = spec.strip_prefix("edges:") {
                ForestPattern::new(n, parse_edge_list(list)?)
            } else {
                Err(Error::Spec(format!("unknown pattern {spec:?}")))
            }
        }
    }
}

/// Comma-separated `i-j` pairs, 0-based.
pub fn parse_edge_list(list: &str) -> Result<Vec<Edge>> {
    let list = list.trim();
    if list.is_empty() {
        return Ok(Vec::new());
    }
    list.split(',')
        .map(|pair| {
            let (a, b) = pair.trim().split_once('-').ok_or_else(|| Error::Spec(format!("bad edge {pair:?}")))?;
            let a = a.trim().parse().map_err(|_| Error::Spec(format!("bad vertex in {pair:?}")))?;
            let b = b.trim().parse().map_err(|_| Error::Spec(format!("bad vertex in {pair:?}")))?;
            Ok((a, b))
        })
        .collect()
}

/// A copy of a pattern: pattern vertex `p` sits on host vertex `map[p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &h in &map {
            if h >= n || std::mem::replace(&mut seen[h], true) {
                return Err(Error::InvalidEmbedding(format!("{map:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Embedding { map })
    }

    pub fn identity(n: usize) -> Self {
        Embedding { map: (0..n).collect() }
    }

    pub(crate) fn from_vec_unchecked(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn host(&self, p: usize) -> usize {
        self.map[p]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.map.len()];
        for (p, &h) in self.map.iter().enumerate() {
            inv[h] = p;
        }
        inv
    }

    /// Host edges of the copy, normalized and sorted.
    pub fn image_edges(&self, f: &ForestPattern) -> Vec<Edge> {
        let mut es: Vec<Edge> = f.edges().iter().map(|&(a, b)| norm((self.map[a], self.map[b]))).collect();
        es.sort_unstable();
        es
    }

    /// Swaps which host vertices `a` and `b` play.
    pub fn swap_hosts(&mut self, a: usize, b: usize) {
        for h in &mut self.map {
            if *h == a {
                *h = b;
            } else if *h == b {
                *h = a;
            }
        }
    }
}

/// `c(E(F'))` for the copy `e` of `f`.
pub fn weight(l: &EdgeLabeling, f: &ForestPattern, e: &Embedding) -> Result<i64> {
    if l.n() != f.n() || e.n() != f.n() {
        return Err(Error::InvalidEmbedding(format!(
            "sizes differ: labeling n={}, pattern n={}, embedding n={}",
            l.n(),
            f.n(),
            e.n()
        )));
    }
    Embedding::new(e.map.clone())?;
    Ok(f.edges().iter().map(|&(a, b)| i64::from(l.label(e.host(a), e.host(b)))).sum())
}

/// Same as [`weight`] without validation, on a sign matrix.
#[inline]
pub fn weight_unchecked(s: &SignMatrix, f: &ForestPattern, map: &[usize]) -> i64 {
    f.edges().iter().map(|&(a, b)| i64::from(s.get(map[a], map[b]))).sum()
}

struct Plan<'a> {
    pattern: &'a ForestPattern,
    order: Vec<usize>,
    same_as_prev: Vec<bool>,
    tail_uniform: Vec<bool>,
    general: Vec<Option<Vec<Vec<u8>>>>,
}

impl<'a> Plan<'a> {
    fn new(f: &'a ForestPattern, n: usize) -> Result<Self> {
        if f.n() != n {
            return Err(Error::InvalidEmbedding(format!("pattern has {} vertices, host has {n}", f.n())));
        }
        if n > 64 {
            return Err(Error::TooLarge(format!("copy enumeration supports n <= 64, got {n}")));
        }
        let est = f.copy_count_estimate();
        if !(est <= COPY_GUARD) {
            return Err(Error::TooLarge(format!("about {est:.3e} copies exceeds the guard of {COPY_GUARD:e}")));
        }
        let comps = f.components();
        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_by(|&a, &b| comps[a].key.cmp(&comps[b].key).then(a.cmp(&b)));
        let same_as_prev: Vec<bool> =
            (0..order.len()).map(|i| i > 0 && comps[order[i]].key == comps[order[i - 1]].key).collect();
        let mut tail_uniform = vec![true; order.len()];
        for i in (0..order.len().saturating_sub(1)).rev() {
            tail_uniform[i] = tail_uniform[i + 1] && same_as_prev[i + 1];
        }
        let general = order
            .iter()
            .map(|&c| match comps[c].kind {
                ComponentKind::General => general_local_copies(&comps[c]),
                _ => None,
            })
            .collect();
        Ok(Plan { pattern: f, order, same_as_prev, tail_uniform, general })
    }
}

struct Dfs<'p, 'v> {
    plan: &'p Plan<'p>,
    signs: Option<&'p SignMatrix>,
    emb: Vec<usize>,
    visits: u64,
    visit: &'v mut dyn FnMut(&[usize], i64) -> ControlFlow<()>,
    /// Stop after placing this many components (used to split work).
    depth_limit: usize,
}

impl Dfs<'_, '_> {
    #[inline]
    fn sign(&self, a: usize, b: usize) -> i64 {
        self.signs.map_or(0, |s| i64::from(s.get(a, b)))
    }

    fn component(&mut self, pos: usize, remaining: u64, prev_min: usize, w: i64) -> ControlFlow<()> {
        if pos == self.depth_limit {
            self.visits += 1;
            return (self.visit)(&self.emb, w);
        }
        let k = self.plan.pattern.components()[self.plan.order[pos]].size();
        let same = self.plan.same_as_prev[pos];
        let mut firsts = remaining;
        if same {
            firsts &= !low_mask(prev_min + 1);
        }
        if self.plan.tail_uniform[pos] {
            let lowest = remaining & remaining.wrapping_neg();
            firsts &= lowest;
        }
        let mut picked = Vec::with_capacity(k);
        while firsts != 0 {
            let f = firsts.trailing_zeros() as usize;
            firsts &= firsts - 1;
            picked.clear();
            picked.push(f);
            let above = remaining & !low_mask(f + 1);
            self.choose(pos, above, &mut picked, k - 1, remaining & !(1 << f), w)?;
        }
        ControlFlow::Continue(())
    }

    fn choose(
        &mut self,
        pos: usize,
        avail: u64,
        picked: &mut Vec<usize>,
        need: usize,
        rest: u64,
        w: i64,
    ) -> ControlFlow<()> {
        if need == 0 {
            let set = picked.clone();
            return self.place(pos, &set, rest, w);
        }
        if (avail.count_ones() as usize) < need {
            return ControlFlow::Continue(());
        }
        let mut a = avail;
        while a != 0 {
            let v = a.trailing_zeros() as usize;
            a &= a - 1;
            picked.push(v);
            let r = self.choose(pos, a, picked, need - 1, rest & !(1 << v), w);
            picked.pop();
            r?;
        }
        ControlFlow::Continue(())
    }

    fn place(&mut self, pos: usize, set: &[usize], rest: u64, w: i64) -> ControlFlow<()> {
        let comp = &self.plan.pattern.components()[self.plan.order[pos]];
        let min = set[0];
        match comp.kind {
            ComponentKind::Single => {
                self.emb[comp.vertices[0]] = set[0];
                self.component(pos + 1, rest, min, w)
            }
            ComponentKind::Star => {
                for c in 0..set.len() {
                    self.emb[comp.vertices[0]] = set[c];
                    let mut wc = w;
                    let mut leaf = 1;
                    for (i, &h) in set.iter().enumerate() {
                        if i != c {
                            self.emb[comp.vertices[leaf]] = h;
                            wc += self.sign(set[c], h);
                            leaf += 1;
                        }
                    }
                    self.component(pos + 1, rest, min, wc)?;
                }
                ControlFlow::Continue(())
            }
            ComponentKind::Path => self.path_step(pos, set, 0, 0, 0, rest, w),
            ComponentKind::General => {
                let copies = self.plan.general[pos].as_ref().expect("checked by the copy guard");
                for sigma in copies {
                    let mut wc = w;
                    for (j, &p) in sigma.iter().enumerate() {
                        self.emb[comp.vertices[j]] = set[p as usize];
                    }
                    for &(a, b) in &comp.local_edges {
                        wc += self.sign(set[sigma[a] as usize], set[sigma[b] as usize]);
                    }
                    self.component(pos + 1, rest, min, wc)?;
                }
                ControlFlow::Continue(())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn path_step(
        &mut self,
        pos: usize,
        set: &[usize],
        j: usize,
        used: u32,
        first: usize,
        rest: u64,
        w: i64,
    ) -> ControlFlow<()> {
        let comp = &self.plan.pattern.components()[self.plan.order[pos]];
        let k = set.len();
        if j == k {
            return self.component(pos + 1, rest, set[0], w);
        }
        for p in 0..k {
            if used >> p & 1 == 1 || (j == k - 1 && p < first) {
                continue;
            }
            let h = set[p];
            let v = comp.vertices[j];
            self.emb[v] = h;
            let wj = if j == 0 { w } else { w + self.sign(self.emb[comp.vertices[j - 1]], h) };
            let first = if j == 0 { p } else { first };
            self.path_step(pos, set, j + 1, used | 1 << p, first, rest, wj)?;
        }
        ControlFlow::Continue(())
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn full_mask(n: usize) -> u64 {
    low_mask(n)
}

fn run_enumeration(
    f: &ForestPattern,
    n: usize,
    signs: Option<&SignMatrix>,
    visit: &mut dyn FnMut(&[usize], i64) -> ControlFlow<()>,
) -> Result<u64> {
    let plan = Plan::new(f, n)?;
    let depth_limit = plan.order.len();
    let mut dfs = Dfs { plan: &plan, signs, emb: vec![usize::MAX; n], visits: 0, visit, depth_limit };
    let _ = dfs.component(0, full_mask(n), 0, 0);
    Ok(dfs.visits)
}

/// Visits every automorphism-distinct copy of `f` in `K_n` once and returns the count.
///
/// The visitor receives the pattern → host map and may stop early with
/// `ControlFlow::Break`; the returned count then covers the copies visited.
pub fn enumerate_copies(
    f: &ForestPattern,
    n: usize,
    mut visitor: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<u64> {
    run_enumeration(f, n, None, &mut |m, _| visitor(m))
}

/// Like [`enumerate_copies`], also passing each copy's weight under `l`.
pub fn enumerate_weighted_copies(
    l: &EdgeLabeling,
    f: &ForestPattern,
    mut visitor: impl FnMut(&[usize], i64) -> ControlFlow<()>,
) -> Result<u64> {
    let s = l.sign_matrix();
    run_enumeration(f, l.n(), Some(&s), &mut visitor)
}

/// Parallel enumeration split on the first placed component.
///
/// Returns the per-branch fold results in a fixed branch order, so callers
/// merging them get a deterministic answer.
pub fn par_fold_copies<T, G, F>(l: &EdgeLabeling, f: &ForestPattern, init: G, fold: F) -> Result<(u64, Vec<T>)>
where
    T: Send,
    G: Fn() -> T + Sync,
    F: Fn(&mut T, &[usize], i64) + Sync,
{
    let n = l.n();
    let s = l.sign_matrix();
    let plan = Plan::new(f, n)?;
    if plan.order.is_empty() {
        return Ok((0, Vec::new()));
    }
    // collect top-level prefixes: partial embedding, remaining mask, min, weight
    let mut prefixes: Vec<(Vec<usize>, i64)> = Vec::new();
    {
        let mut collect = |m: &[usize], w: i64| {
            prefixes.push((m.to_vec(), w));
            ControlFlow::Continue(())
        };
        let mut dfs =
            Dfs { plan: &plan, signs: Some(&s), emb: vec![usize::MAX; n], visits: 0, visit: &mut collect, depth_limit: 1 };
        let _ = dfs.component(0, full_mask(n), 0, 0);
    }
    let first = &f.components()[plan.order[0]];
    let results: Vec<(u64, T)> = prefixes
        .into_par_iter()
        .map(|(emb, w)| {
            let used: u64 = first.vertices.iter().fold(0, |acc, &v| acc | 1 << emb[v]);
            let min = first.vertices.iter().map(|&v| emb[v]).min().unwrap_or(0);
            let mut acc = init();
            let mut visit = |m: &[usize], w: i64| {
                fold(&mut acc, m, w);
                ControlFlow::Continue(())
            };
            let depth_limit = plan.order.len();
            let mut dfs = Dfs { plan: &plan, signs: Some(&s), emb, visits: 0, visit: &mut visit, depth_limit };
            let _ = dfs.component(1, full_mask(n) & !used, min, w);
            (dfs.visits, acc)
        })
        .collect();
    let total = results.iter().map(|r| r.0).sum();
    Ok((total, results.into_iter().map(|r| r.1).collect()))
}

/// Exact `min |c(E(F'))|` over all copies, with a witness.
///
/// Stops as soon as the parity floor (`|E(F)| mod 2`) is reached.
pub fn min_abs_weight_exhaustive(l: &EdgeLabeling, f: &ForestPattern) -> Result<(u64, Embedding)> {
    let floor = (f.edges().len() % 2) as u64;
    let mut best = u64::MAX;
    let mut witness = Vec::new();
    enumerate_weighted_copies(l, f, |m, w| {
        let a = w.unsigned_abs();
        if a < best {
            best = a;
            witness = m.to_vec();
        }
        if best == floor {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok((best, Embedding::from_vec_unchecked(witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::{construct_star_extremal_0mod4, random_zero_sum};

    fn collect_edge_sets(f: &ForestPattern, n: usize) -> (u64, HashSet<Vec<Edge>>) {
        let mut sets = HashSet::new();
        let count = enumerate_copies(f, n, |m| {
            let e = Embedding::new(m.to_vec()).unwrap();
            sets.insert(e.image_edges(f));
            ControlFlow::Continue(())
        })
        .unwrap();
        (count, sets)
    }

    #[test]
    fn parse_examples() {
        let p3 = parse_pattern("factor:P3", 9).unwrap();
        assert_eq!(p3.components().len(), 3);
        assert_eq!(p3.edges().len(), 6);
        assert_eq!(p3.max_degree(), 2);
        let star = parse_pattern("star", 8).unwrap();
        assert_eq!(star.max_degree(), 7);
        assert_eq!(star.edges().len(), 7);
        assert!(matches!(parse_pattern("factor:P4", 10), Err(Error::Divisibility(_))));
        assert!(matches!(parse_pattern("wheel", 5), Err(Error::Spec(_))));
        assert!(matches!(parse_pattern("edges:0-1,1-2,2-0", 3), Err(Error::Spec(_))));
        assert!(matches!(parse_pattern("edges:0-5", 3), Err(Error::InvalidEdge(0, 5, 3))));
        let custom = parse_pattern("edges: 0-1, 1-2 ,3-4", 6).unwrap();
        assert_eq!(custom.components().len(), 3);
        assert_eq!(custom.degrees(), &[1, 2, 1, 1, 1, 0]);
    }

    #[test]
    fn weight_examples() {
        let l = EdgeLabeling::all_positive(4);
        let f = ForestPattern::path(3).unwrap();
        let f4 = ForestPattern::new(4, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(weight(&l, &f4, &Embedding::new(vec![3, 1, 0, 2]).unwrap()).unwrap(), 2);
        assert!(weight(&l, &f, &Embedding::identity(3)).is_err());
        let e8 = construct_star_extremal_0mod4(8).unwrap();
        let star = ForestPattern::star(8).unwrap();
        assert_eq!(weight(&e8, &star, &Embedding::identity(8)).unwrap().abs(), 3);
    }

    #[test]
    fn weight_matches_per_edge_sum() {
        let l = random_zero_sum(9, 7).unwrap();
        let f = parse_pattern("factor:P3", 9).unwrap();
        let mut by_hand = 0;
        for base in [0, 3, 6] {
            by_hand += i64::from(l.label(base, base + 1)) + i64::from(l.label(base + 1, base + 2));
        }
        assert_eq!(weight(&l, &f, &Embedding::identity(9)).unwrap(), by_hand);
    }

    #[test]
    fn embedding_rejects_non_permutations() {
        assert!(Embedding::new(vec![0, 0, 1]).is_err());
        assert!(Embedding::new(vec![0, 3, 1]).is_err());
        let e = Embedding::new(vec![2, 0, 1]).unwrap();
        assert_eq!(e.inverse(), vec![1, 2, 0]);
    }

    #[test]
    fn closed_form_copy_counts() {
        assert_eq!(collect_edge_sets(&ForestPattern::matching(4).unwrap(), 4).0, 3);
        let cases: [(&str, usize, u64); 7] = [
            ("factor:P3", 9, 7560),
            ("factor:P4", 8, 5040),
            ("star", 7, 7),
            ("path", 6, 360),
            ("matching", 8, 105),
            ("factor:P2", 6, 15),
            ("edges:0-1,0-2,0-3,3-4", 6, 6 * 5 * 4 / 2 * 3 * 2),
        ];
        for (spec, n, expected) in cases {
            let f = parse_pattern(spec, n).unwrap();
            let (count, sets) = collect_edge_sets(&f, n);
            assert_eq!(count, expected, "{spec} n={n}");
            assert_eq!(sets.len() as u64, expected, "{spec} n={n} has duplicates");
            assert!((f.copy_count_estimate() - expected as f64).abs() < 1e-6 * expected as f64);
        }
    }

    #[test]
    fn general_components_are_deduplicated() {
        // spider with legs 2,1,1 plus a disjoint edge and an isolated vertex
        let f = parse_pattern("edges:0-1,1-2,0-3,0-4,5-6", 8).unwrap();
        // closed form: C(8,5)·C(3,2)·(5!/|Aut spider| = 60)·1 = 56·3·60
        let (count, sets) = collect_edge_sets(&f, 8);
        assert_eq!(count, 56 * 3 * 60);
        assert_eq!(sets.len() as u64, count);
    }

    #[test]
    fn isomorphic_components_mixed_with_others() {
        // two P3s and two K2s on 10 vertices
        let f = parse_pattern("edges:0-1,1-2,3-4,4-5,6-7,8-9", 10).unwrap();
        let (count, sets) = collect_edge_sets(&f, 10);
        // 10!/(3!3!2!2!·2!2!) · 3·3
        let expected = 3628800 / (6 * 6 * 2 * 2 * 2 * 2) * 9;
        assert_eq!(count, expected);
        assert_eq!(sets.len() as u64, expected);
    }

    #[test]
    fn guard_refuses_huge_spaces() {
        let f = ForestPattern::path(20).unwrap();
        let l = EdgeLabeling::all_positive(20);
        assert!(matches!(min_abs_weight_exhaustive(&l, &f), Err(Error::TooLarge(_))));
    }

    #[test]
    fn exhaustive_minimum_examples() {
        let e8 = construct_star_extremal_0mod4(8).unwrap();
        assert_eq!(min_abs_weight_exhaustive(&e8, &ForestPattern::star(8).unwrap()).unwrap().0, 3);
        let p = EdgeLabeling::all_positive(4);
        assert_eq!(min_abs_weight_exhaustive(&p, &ForestPattern::matching(4).unwrap()).unwrap().0, 2);
        let l = random_zero_sum(9, 7).unwrap();
        let f = parse_pattern("factor:P3", 9).unwrap();
        let (min, witness) = min_abs_weight_exhaustive(&l, &f).unwrap();
        assert_eq!(min, 0);
        assert_eq!(weight(&l, &f, &witness).unwrap(), 0);
    }

    #[test]
    fn copy_weights_average_to_zero() {
        for seed in 0..5 {
            let l = random_zero_sum(8, seed).unwrap();
            for spec in ["star", "path", "matching", "factor:P4", "edges:0-1,1-2,1-3"] {
                let f = parse_pattern(spec, 8).unwrap();
                let mut sum = 0i64;
                let (mut pos, mut neg) = (false, false);
                enumerate_weighted_copies(&l, &f, |_, w| {
                    sum += w;
                    pos |= w >= 0;
                    neg |= w <= 0;
                    ControlFlow::Continue(())
                })
                .unwrap();
                assert_eq!(sum, 0, "{spec} seed={seed}");
                assert!(pos && neg);
            }
        }
    }

    #[test]
    fn parallel_fold_matches_sequential() {
        let l = random_zero_sum(9, 3).unwrap();
        let f = parse_pattern("factor:P3", 9).unwrap();
        let (count, parts) = par_fold_copies(&l, &f, || (0i64, 0u64), |acc, _, w| {
            acc.0 += w;
            acc.1 += 1;
        })
        .unwrap();
        assert_eq!(count, 7560);
        assert_eq!(parts.iter().map(|p| p.1).sum::<u64>(), 7560);
        assert_eq!(parts.iter().map(|p| p.0).sum::<i64>(), 0);
    }
}
