//! The solver pipeline: bounded copy, normalization, catalog exchanges,
//! re-partition of up to three paths, swings through weight `−w`, and the
//! exact fallback.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::blocks::{exact_search_signs, BlockDp, EXACT_GUARD};
use super::catalog::{catalog, Role, Template};
use super::{apply_exchange_signs, oriented_signs, EdgeExchange, PathFactor, PathType};
use crate::embed::ForestPattern;
use crate::error::{Error, Result};
use crate::graphcore::{norm, Edge, EdgeLabeling, SignMatrix};
use crate::swapwalk::{bounded_copy_with, WalkConfig};

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub seed: u64,
    /// Swings through weight `−w` allowed before giving up on local search.
    pub max_rounds: usize,
    pub use_templates: bool,
    /// Largest number of paths re-partitioned at once (1..=3).
    pub max_repartition: usize,
    /// Largest `n` for the exact fallback; 0 disables it.
    pub exact_guard: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { seed: 0, max_rounds: 32, use_templates: true, max_repartition: 3, exact_guard: EXACT_GUARD }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    Walk,
    Normalize,
    Template(String),
    Repartition(usize),
    Exact,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Walk => write!(f, "walk"),
            Stage::Normalize => write!(f, "normalize"),
            Stage::Template(name) => write!(f, "template:{name}"),
            Stage::Repartition(m) => write!(f, "repartition{m}"),
            Stage::Exact => write!(f, "exhaustive"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub factor: PathFactor,
    pub stage: Stage,
    /// Swings taken before the final stage.
    pub swings: usize,
}

#[derive(Clone, Debug)]
pub struct UnresolvedReport {
    pub best: PathFactor,
    pub best_weight: i64,
    pub census: BTreeMap<PathType, usize>,
    /// Template families whose slot types occur in `best` but none of whose preconditions held.
    pub idle_families: Vec<String>,
    pub diagnostics: Vec<String>,
    /// `Some(false)` when the exact search proved no zero-sum factor exists.
    pub zero_sum_exists: Option<bool>,
    pub swings: usize,
}

#[derive(Clone, Debug)]
pub enum FactorOutcome {
    Solved(Solution),
    Unresolved(Box<UnresolvedReport>),
}

impl FactorOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            FactorOutcome::Solved(s) => Some(s),
            FactorOutcome::Unresolved(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    /// A closing exchange reached weight 0.
    Zero(PathFactor),
    /// No path of type `(1,−1,1)` remains (relative to the sign of the weight).
    Rotated(PathFactor),
}

fn frame(l: &EdgeLabeling, w: i64) -> SignMatrix {
    if w < 0 {
        l.sign_matrix().negated()
    } else {
        l.sign_matrix()
    }
}

fn path_edges(p: &[usize]) -> impl Iterator<Item = Edge> + '_ {
    p.windows(2).map(|w| norm((w[0], w[1])))
}

/// Replaces the paths at `idx` by `new_paths` and returns the exchange.
fn exchange_for(s: &SignMatrix, factor: &PathFactor, idx: &[usize], new_paths: &[Vec<usize>]) -> EdgeExchange {
    let old: BTreeSet<Edge> = idx.iter().flat_map(|&i| path_edges(&factor.paths()[i])).collect();
    let new: BTreeSet<Edge> = new_paths.iter().flat_map(|p| path_edges(p)).collect();
    EdgeExchange::from_signs(s, old.difference(&new).copied().collect(), new.difference(&old).copied().collect())
}

fn p4_normalize_signs(s: &SignMatrix, factor: &PathFactor) -> Result<Normalized> {
    let mut cur = factor.clone();
    for i in 0..factor.paths().len() {
        let p = cur.paths()[i].clone();
        if oriented_signs(s, &p) != [1, -1, 1] {
            continue;
        }
        let (u1, u2, u3, u4) = (p[0], p[1], p[2], p[3]);
        if s.get(u1, u4) < 0 {
            let ex = EdgeExchange::from_signs(s, vec![(u1, u2)], vec![(u1, u4)]);
            return Ok(Normalized::Zero(apply_exchange_signs(s, &cur, &ex)?));
        }
        // −{u3u4}+{u1u4}: the same vertices as u4u1u2u3, of type (1,1,−1)
        let mut paths = cur.paths().to_vec();
        paths[i] = vec![u4, u1, u2, u3];
        cur = PathFactor { k: 4, paths };
    }
    Ok(Normalized::Rotated(cur))
}

/// Clears `(1,−1,1)` paths from a weight-`±2` P4-factor.
///
/// Types are read relative to the sign of the weight: on a weight `−2`
/// factor the labeling is negated first.
pub fn p4_normalize(l: &EdgeLabeling, factor: &PathFactor) -> Result<Normalized> {
    if factor.k() != 4 {
        return Err(Error::Spec("normalization applies to P4-factors".into()));
    }
    let s = frame(l, factor.weight(l));
    if factor.weight_signs(&s) == 0 {
        return Ok(Normalized::Rotated(factor.clone()));
    }
    p4_normalize_signs(&s, factor)
}

/// Vertex orderings of a path whose sign pattern has the path's own type.
fn orderings(s: &SignMatrix, path: &[usize]) -> Vec<(Vec<i8>, Vec<usize>)> {
    let ty = PathType::of_signs(s, path);
    let mut out = Vec::new();
    let mut perm = path.to_vec();
    fn rec(s: &SignMatrix, perm: &mut Vec<usize>, i: usize, ty: &PathType, out: &mut Vec<(Vec<i8>, Vec<usize>)>) {
        if i == perm.len() {
            let o = oriented_signs(s, perm);
            if PathType::canonical(o.clone()) == *ty {
                out.push((o, perm.clone()));
            }
            return;
        }
        for j in i..perm.len() {
            perm.swap(i, j);
            rec(s, perm, i + 1, ty, out);
            perm.swap(i, j);
        }
    }
    rec(s, &mut perm, 0, &ty, &mut out);
    out
}

struct TemplateScan<'a> {
    s: &'a SignMatrix,
    factor: &'a PathFactor,
    orders: Vec<Vec<(Vec<i8>, Vec<usize>)>>,
    types: Vec<PathType>,
}

impl<'a> TemplateScan<'a> {
    fn new(s: &'a SignMatrix, factor: &'a PathFactor) -> Self {
        let orders = factor.paths().iter().map(|p| orderings(s, p)).collect();
        let types = factor.paths().iter().map(|p| PathType::of_signs(s, p)).collect();
        TemplateScan { s, factor, orders, types }
    }

    /// First (tuple, template, ordering) hit with the given delta that `accept` allows.
    fn find(
        &self,
        delta: i64,
        accept: &mut dyn FnMut(&PathFactor) -> bool,
    ) -> Option<(EdgeExchange, PathFactor, &'static Template)> {
        let k = self.factor.k();
        let cat = catalog(k);
        let m = self.factor.paths().len();
        for arity in 1..=3.min(m) {
            let templates: Vec<&Template> = cat.iter().filter(|t| t.arity() == arity && t.delta == delta).collect();
            if templates.is_empty() {
                continue;
            }
            let mut tuple = Vec::with_capacity(arity);
            if let Some(hit) = self.tuples(&mut tuple, arity, m, &templates, accept) {
                return Some(hit);
            }
        }
        None
    }

    fn tuples(
        &self,
        tuple: &mut Vec<usize>,
        arity: usize,
        m: usize,
        templates: &[&'static Template],
        accept: &mut dyn FnMut(&PathFactor) -> bool,
    ) -> Option<(EdgeExchange, PathFactor, &'static Template)> {
        if tuple.len() == arity {
            for &t in templates {
                let fits = t.slots.iter().zip(tuple.iter()).all(|(st, &i)| PathType::canonical(st.clone()) == self.types[i]);
                if fits {
                    let mut chosen = Vec::with_capacity(arity);
                    if let Some(hit) = self.assign(t, tuple, &mut chosen, accept) {
                        return Some(hit);
                    }
                }
            }
            return None;
        }
        for i in 0..m {
            if !tuple.contains(&i) {
                tuple.push(i);
                let r = self.tuples(tuple, arity, m, templates, accept);
                tuple.pop();
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }

    fn assign<'s>(
        &'s self,
        t: &'static Template,
        tuple: &[usize],
        chosen: &mut Vec<&'s [usize]>,
        accept: &mut dyn FnMut(&PathFactor) -> bool,
    ) -> Option<(EdgeExchange, PathFactor, &'static Template)> {
        let slot = chosen.len();
        if slot == tuple.len() {
            return self.try_apply(t, tuple, chosen, accept);
        }
        for (signs, order) in &self.orders[tuple[slot]] {
            if *signs == t.slots[slot] {
                chosen.push(order);
                let r = self.assign(t, tuple, chosen, accept);
                chosen.pop();
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }

    fn try_apply(
        &self,
        t: &'static Template,
        tuple: &[usize],
        chosen: &[&[usize]],
        accept: &mut dyn FnMut(&PathFactor) -> bool,
    ) -> Option<(EdgeExchange, PathFactor, &'static Template)> {
        let host = |r: Role| chosen[r.slot as usize][r.pos as usize];
        if !t.pre.iter().all(|&(a, b, sign)| self.s.get(host(a), host(b)) == sign) {
            return None;
        }
        let mut new: BTreeSet<Edge> = chosen.iter().flat_map(|o| path_edges(o)).collect();
        for &(a, b) in &t.out {
            new.remove(&norm((host(a), host(b))));
        }
        for &(a, b) in &t.inn {
            new.insert(norm((host(a), host(b))));
        }
        let old: BTreeSet<Edge> = tuple.iter().flat_map(|&i| path_edges(&self.factor.paths()[i])).collect();
        let ex = EdgeExchange::from_signs(
            self.s,
            old.difference(&new).copied().collect(),
            new.difference(&old).copied().collect(),
        );
        if ex.delta != t.delta {
            return None;
        }
        let next = apply_exchange_signs(self.s, self.factor, &ex).ok()?;
        accept(&next).then_some((ex, next, t))
    }
}

/// A catalog exchange taking a weight-`±2` factor to weight 0, with its template name.
pub fn template_search(l: &EdgeLabeling, factor: &PathFactor) -> Option<(EdgeExchange, String)> {
    let w = factor.weight(l);
    if w.abs() != 2 {
        return None;
    }
    let s = frame(l, w);
    let scan = TemplateScan::new(&s, factor);
    scan.find(-2, &mut |_| true).map(|(ex, _, t)| (EdgeExchange::new(l, ex.removed, ex.added), t.name.clone()))
}

fn subsets(m: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(m: usize, size: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for i in start..m {
            cur.push(i);
            if rec(m, size, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(m, size, 0, &mut Vec::new(), f)
}

/// Best re-partition of exactly `size` paths moving the weight by `shift`.
fn repartition_exact_size(
    s: &SignMatrix,
    factor: &PathFactor,
    size: usize,
    shift: i64,
    accept: &mut dyn FnMut(&PathFactor) -> bool,
) -> Option<(EdgeExchange, PathFactor)> {
    let k = factor.k();
    let m = factor.paths().len();
    if size > m {
        return None;
    }
    let mut hit = None;
    subsets(m, size, &mut |idx| {
        let verts: Vec<usize> = idx.iter().flat_map(|&i| factor.paths()[i].iter().copied()).collect();
        let old: i64 = idx.iter().map(|&i| oriented_signs(s, &factor.paths()[i]).iter().map(|&x| i64::from(x)).sum::<i64>()).sum();
        let mut dp = BlockDp::new(s, verts, k);
        let full = dp.full();
        let Some(paths) = dp.witness(full, old + shift) else { return false };
        let ex = exchange_for(s, factor, idx, &paths);
        match apply_exchange_signs(s, factor, &ex) {
            Ok(next) if accept(&next) => {
                hit = Some((ex, next));
                true
            }
            _ => false,
        }
    });
    hit
}

/// An exchange reaching weight 0 by re-partitioning at most `max_paths` paths.
pub fn repartition_search(l: &EdgeLabeling, factor: &PathFactor, max_paths: usize) -> Option<EdgeExchange> {
    let w = factor.weight(l);
    if w == 0 {
        return None;
    }
    let s = l.sign_matrix();
    (1..=max_paths).find_map(|size| repartition_exact_size(&s, factor, size, -w, &mut |_| true).map(|r| r.0))
}

fn idle_families(s: &SignMatrix, factor: &PathFactor) -> Vec<String> {
    let census: BTreeMap<PathType, usize> = factor.paths().iter().fold(BTreeMap::new(), |mut m, p| {
        *m.entry(PathType::of_signs(s, p)).or_default() += 1;
        m
    });
    let mut out: Vec<String> = catalog(factor.k())
        .iter()
        .filter(|t| {
            let mut need: BTreeMap<PathType, usize> = BTreeMap::new();
            for st in &t.slots {
                *need.entry(PathType::canonical(st.clone())).or_default() += 1;
            }
            need.iter().all(|(ty, &c)| census.get(ty).copied().unwrap_or(0) >= c)
        })
        .map(|t| t.family.clone())
        .collect();
    out.dedup();
    out
}

fn diagnostics(s: &SignMatrix, factor: &PathFactor, swings: usize) -> Vec<String> {
    let mut out = vec![format!("swings_taken={swings}")];
    if factor.k() == 4 {
        let n = factor.n();
        let mixed = factor
            .paths()
            .iter()
            .filter(|p| {
                let t = PathType::of_signs(s, p);
                [[1, 1, -1], [-1, 1, -1], [1, -1, -1]].iter().any(|x| t.signs() == x)
            })
            .count();
        out.push(format!(
            "mixed_paths={mixed} (types (1,1,-1),(-1,1,-1),(1,-1,-1); the counting bound guaranteeing 3 needs n >= 84, n={n})"
        ));
        out.push(
            "mixed paths cannot survive into a weight -2 factor: the closing exchange -{u3u4}+{u1u4} would reach 0".into(),
        );
    }
    out
}

fn factor_from_embedding(n: usize, k: usize, map: &[usize]) -> PathFactor {
    let paths = (0..n / k).map(|i| map[k * i..k * i + k].to_vec()).collect();
    PathFactor { k, paths }
}

/// Searches for a zero-sum factor into paths on `k ∈ {2,3,4}` vertices.
pub fn solve_path_factor(l: &EdgeLabeling, k: usize, cfg: &SolveConfig) -> Result<FactorOutcome> {
    let n = l.n();
    if !(2..=4).contains(&k) {
        return Err(Error::Spec(format!("path factors on {k} vertices are not supported")));
    }
    if n % k != 0 || n < k {
        return Err(Error::Divisibility(format!("{k} does not divide n={n}")));
    }
    if (n * (n - 1) / 2) % 2 != 0 {
        return Err(Error::Divisibility(format!("n={n} has an odd number of edges")));
    }
    if k == 4 && n % 8 != 0 {
        return Err(Error::Divisibility(format!("a zero-sum P4-factor needs 8 | n, got n={n}")));
    }
    if !l.is_zero_sum() {
        return Err(Error::Precondition("labeling is not zero-sum".into()));
    }
    let pattern = ForestPattern::path_factor(n, k)?;
    let walk = bounded_copy_with(l, &pattern, &WalkConfig { seed: cfg.seed, ..Default::default() })?;
    let mut factor = factor_from_embedding(n, k, walk.embedding.as_slice());
    let solved = |factor: PathFactor, stage, swings| {
        debug_assert_eq!(factor.weight(l), 0);
        Ok(FactorOutcome::Solved(Solution { factor: factor.normalized(), stage, swings }))
    };
    if factor.weight(l) == 0 {
        return solved(factor, Stage::Walk, 0);
    }
    let mut visited: HashSet<PathFactor> = HashSet::new();
    visited.insert(factor.normalized());
    let mut swings = 0;
    loop {
        let w = factor.weight(l);
        let s = frame(l, w);
        if k == 4 {
            match p4_normalize_signs(&s, &factor)? {
                Normalized::Zero(f) => return solved(f, Stage::Normalize, swings),
                Normalized::Rotated(f) => factor = f,
            }
        }
        let wf = w.abs();
        if cfg.use_templates && wf == 2 {
            let scan = TemplateScan::new(&s, &factor);
            if let Some((_, next, t)) = scan.find(-2, &mut |_| true) {
                return solved(next, Stage::Template(t.name.clone()), swings);
            }
        }
        for size in 2..=cfg.max_repartition.max(1) {
            if let Some((_, next)) = repartition_exact_size(&s, &factor, size, -wf, &mut |_| true) {
                return solved(next, Stage::Repartition(size), swings);
            }
        }
        if swings >= cfg.max_rounds {
            break;
        }
        let mut fresh = |f: &PathFactor| !visited.contains(&f.normalized());
        let mut next = None;
        if cfg.use_templates && wf == 2 {
            next = TemplateScan::new(&s, &factor).find(-4, &mut fresh).map(|r| r.1);
        }
        if next.is_none() {
            next = (1..=cfg.max_repartition.clamp(1, 2))
                .find_map(|size| repartition_exact_size(&s, &factor, size, -2 * wf, &mut fresh).map(|r| r.1));
        }
        match next {
            Some(f) => {
                visited.insert(f.normalized());
                factor = f;
                swings += 1;
            }
            None => break,
        }
    }
    let s = frame(l, factor.weight(l));
    let mut zero_sum_exists = None;
    if n <= cfg.exact_guard.min(EXACT_GUARD) {
        match exact_search_signs(&s, k, 0)? {
            Some(f) => return solved(f, Stage::Exact, swings),
            None => zero_sum_exists = Some(false),
        }
    }
    let census = factor.paths().iter().fold(BTreeMap::new(), |mut m, p| {
        *m.entry(PathType::of(l, p)).or_default() += 1;
        m
    });
    Ok(FactorOutcome::Unresolved(Box::new(UnresolvedReport {
        best_weight: factor.weight(l),
        idle_families: idle_families(&s, &factor),
        diagnostics: diagnostics(&s, &factor, swings),
        best: factor.normalized(),
        census,
        zero_sum_exists,
        swings,
    })))
}

/// Zero-sum P3-factor.
pub fn solve_p3(l: &EdgeLabeling) -> Result<FactorOutcome> {
    solve_path_factor(l, 3, &SolveConfig::default())
}

/// Zero-sum P4-factor, or an Unresolved report.
pub fn solve_p4(l: &EdgeLabeling) -> Result<FactorOutcome> {
    solve_path_factor(l, 4, &SolveConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{min_abs_weight_exhaustive, parse_pattern};
    use crate::factorsolve::apply_exchange;
    use crate::graphcore::random_zero_sum;
    use crate::rng;

    fn expect_zero(l: &EdgeLabeling, out: &FactorOutcome) -> PathFactor {
        match out {
            FactorOutcome::Solved(s) => {
                assert_eq!(s.factor.weight(l), 0);
                s.factor.clone()
            }
            FactorOutcome::Unresolved(r) => panic!("unresolved: {r:?}"),
        }
    }

    /// A labeling on `slots × k` vertices realizing a template's preconditions, random elsewhere.
    fn synthetic(t: &Template, seed: u64) -> (EdgeLabeling, PathFactor) {
        let k = t.k;
        let n = k * t.arity();
        let mut g = rng::from_seed(seed);
        let mut l = EdgeLabeling::from_index_bits(n, |_| rng::below(&mut g, 2) == 1);
        let v = |r: Role| r.slot as usize * k + r.pos as usize;
        for (si, st) in t.slots.iter().enumerate() {
            for (j, &sign) in st.iter().enumerate() {
                l = l.with_label(si * k + j, si * k + j + 1, sign);
            }
        }
        for &(a, b, sign) in &t.pre {
            l = l.with_label(v(a), v(b), sign);
        }
        let paths = (0..t.arity()).map(|i| (i * k..i * k + k).collect()).collect();
        (l, PathFactor::new(n, k, paths).unwrap())
    }

    #[test]
    fn catalog_templates_are_sound() {
        for k in [3, 4] {
            for t in catalog(k) {
                for seed in 0..8 {
                    let (l, f) = synthetic(t, seed);
                    let v = |r: Role| r.slot as usize * k + r.pos as usize;
                    let out = t.out.iter().map(|&(a, b)| (v(a), v(b))).collect();
                    let inn = t.inn.iter().map(|&(a, b)| (v(a), v(b))).collect();
                    let ex = EdgeExchange::new(&l, out, inn);
                    assert_eq!(ex.delta, t.delta, "{}", t.name);
                    let g = apply_exchange(&l, &f, &ex).unwrap_or_else(|e| panic!("{}: {e}", t.name));
                    assert_eq!(g.weight(&l), f.weight(&l) + t.delta, "{}", t.name);
                }
            }
        }
    }

    #[test]
    fn catalog_scan_finds_each_template() {
        // on its own synthetic configuration the scan must fire with the same delta
        for k in [3, 4] {
            for t in catalog(k) {
                let (l, f) = synthetic(t, 99);
                let s = l.sign_matrix();
                let scan = TemplateScan::new(&s, &f);
                let hit = scan.find(t.delta, &mut |_| true);
                let (ex, next, _) = hit.unwrap_or_else(|| panic!("{} did not fire", t.name));
                assert_eq!(next.weight(&l), f.weight(&l) + t.delta);
                assert_eq!(ex.delta, t.delta);
            }
        }
    }

    #[test]
    fn claim_style_examples() {
        // two (1,1) paths with c(u1v1) = c(u3v3) = -1 lose 4
        let t = catalog(3).iter().find(|t| t.name == "p3:++/++/swing").unwrap();
        let (l, f) = synthetic(t, 1);
        let s = l.sign_matrix();
        let (ex, next, _) = TemplateScan::new(&s, &f).find(-4, &mut |_| true).unwrap();
        assert_eq!(ex.delta, -4);
        assert_eq!(next.weight(&l), f.weight(&l) - 4);
        // two (1,-1) paths with c(w1y1) = c(w3y3) = -1
        let t = catalog(3).iter().find(|t| t.name == "p3:+-/+-/1").unwrap();
        let (l, f) = synthetic(t, 2);
        let ex = EdgeExchange::new(&l, vec![(1, 2), (3, 4)], vec![(0, 3), (2, 5)]);
        assert_eq!(ex.delta, -2);
        assert_eq!(apply_exchange(&l, &f, &ex).unwrap().weight(&l), f.weight(&l) - 2);
    }

    #[test]
    fn nothing_to_do_at_weight_zero() {
        let l = random_zero_sum(9, 7).unwrap();
        let out = solve_p3(&l).unwrap();
        let f = expect_zero(&l, &out);
        assert!(template_search(&l, &f).is_none());
        assert!(repartition_search(&l, &f, 3).is_none());
    }

    #[test]
    fn p4_normalize_examples() {
        // path 0 1 2 3 of type (1,-1,1), plus a (1,1,1) path so the weight is 4 - …; build weight 2
        let mut l = EdgeLabeling::all_negative(8);
        for (a, b) in [(0, 1), (2, 3), (0, 3), (4, 5), (5, 6)] {
            l = l.with_label(a, b, 1);
        }
        let f = PathFactor::new(8, 4, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        assert_eq!(f.weight(&l), 2);
        match p4_normalize(&l, &f).unwrap() {
            Normalized::Rotated(g) => {
                assert_eq!(g.weight(&l), 2);
                assert!(g.paths().iter().all(|p| PathType::of(&l, p).signs() != [1, -1, 1]));
                assert!(g.paths().iter().any(|p| PathType::of(&l, p).signs() == [1, 1, -1]));
            }
            other => panic!("{other:?}"),
        }
        let l2 = l.with_label(0, 3, -1);
        let f2 = f.clone();
        assert_eq!(f2.weight(&l2), 2);
        match p4_normalize(&l2, &f2).unwrap() {
            Normalized::Zero(g) => assert_eq!(g.weight(&l2), 0),
            other => panic!("{other:?}"),
        }
        let l3 = EdgeLabeling::all_positive(8);
        let f3 = PathFactor::new(8, 4, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        assert_eq!(p4_normalize(&l3, &f3).unwrap(), Normalized::Rotated(f3));
    }

    #[test]
    fn divisibility_errors() {
        let l = random_zero_sum(9, 7).unwrap();
        assert!(matches!(solve_p4(&l), Err(Error::Divisibility(_))));
        assert!(matches!(solve_p3(&EdgeLabeling::all_positive(6)), Err(Error::Divisibility(_))));
        let l12 = random_zero_sum(12, 0).unwrap();
        assert!(matches!(solve_p4(&l12), Err(Error::Divisibility(_))));
    }

    #[test]
    fn p3_small_instances() {
        for seed in 0..300 {
            let l = random_zero_sum(9, seed).unwrap();
            expect_zero(&l, &solve_p3(&l).unwrap());
        }
        let l = random_zero_sum(12, 7).unwrap();
        expect_zero(&l, &solve_p3(&l).unwrap());
        assert_eq!(min_abs_weight_exhaustive(&l, &parse_pattern("factor:P3", 12).unwrap()).unwrap().0, 0);
    }

    #[test]
    fn p3_without_exact_fallback() {
        let cfg = SolveConfig { exact_guard: 0, ..Default::default() };
        for n in [12, 21, 24] {
            for seed in 0..40 {
                let l = random_zero_sum(n, seed).unwrap();
                expect_zero(&l, &solve_path_factor(&l, 3, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn p4_matches_exact_at_eight() {
        for seed in 0..60 {
            let l = random_zero_sum(8, seed).unwrap();
            let exists = super::super::exact_search(&l, 4, 0).unwrap().is_some();
            match solve_p4(&l).unwrap() {
                FactorOutcome::Solved(s) => {
                    assert!(exists);
                    assert_eq!(s.factor.weight(&l), 0);
                }
                FactorOutcome::Unresolved(r) => {
                    assert!(!exists);
                    assert_eq!(r.zero_sum_exists, Some(false));
                }
            }
        }
    }

    #[test]
    fn matchings_are_solved() {
        for seed in 0..50 {
            let l = random_zero_sum(12, seed).unwrap();
            expect_zero(&l, &solve_path_factor(&l, 2, &SolveConfig::default()).unwrap());
        }
    }

    #[test]
    fn neighborhood_dominance() {
        let mut fired = 0;
        for seed in 0..200 {
            let l = random_zero_sum(12, seed).unwrap();
            let pattern = ForestPattern::path_factor(12, 3).unwrap();
            let walk = bounded_copy_with(&l, &pattern, &WalkConfig { seed, ..Default::default() }).unwrap();
            let f = factor_from_embedding(12, 3, walk.embedding.as_slice());
            if let Some((ex, _)) = template_search(&l, &f) {
                fired += 1;
                assert_eq!(apply_exchange(&l, &f, &ex).unwrap().weight(&l), 0);
                let rp = repartition_search(&l, &f, 3).expect("re-partition covers templates");
                assert_eq!(apply_exchange(&l, &f, &rp).unwrap().weight(&l), 0);
            }
        }
        assert!(fired > 0);
    }
}
