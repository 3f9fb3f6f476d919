//! Zero-sum path factors: typing, edge exchanges, the exchange catalog, a
//! re-partition neighborhood, and an exact subset DP used as fallback.

mod blocks;
pub mod catalog;
mod solve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graphcore::{norm, Edge, EdgeLabeling, SignMatrix};

pub use blocks::{exact_search, for_each_repartition, EXACT_GUARD};
pub use solve::{
    p4_normalize, repartition_search, solve_p3, solve_p4, solve_path_factor, template_search, FactorOutcome,
    Normalized, SolveConfig, Solution, Stage, UnresolvedReport,
};

/// A partition of `0..n` into vertex-disjoint paths on `k` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathFactor {
    k: usize,
    paths: Vec<Vec<usize>>,
}

impl PathFactor {
    pub fn new(n: usize, k: usize, paths: Vec<Vec<usize>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::NotAFactor(format!("path length {k} is below 2")));
        }
        let mut seen = vec![false; n];
        let mut covered = 0;
        for p in &paths {
            if p.len() != k {
                return Err(Error::NotAFactor(format!("path {p:?} does not have {k} vertices")));
            }
            for &v in p {
                if v >= n {
                    return Err(Error::NotAFactor(format!("vertex {v} out of range for n={n}")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::NotAFactor(format!("vertex {v} appears twice")));
                }
                covered += 1;
            }
        }
        if covered != n {
            return Err(Error::NotAFactor(format!("{covered} of {n} vertices covered")));
        }
        Ok(PathFactor { k, paths })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.k * self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.paths.iter().flat_map(|p| p.windows(2).map(|w| norm((w[0], w[1]))))
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges().collect()
    }

    pub fn weight(&self, l: &EdgeLabeling) -> i64 {
        self.edges().map(|(a, b)| i64::from(l.label(a, b))).sum()
    }

    pub(crate) fn weight_signs(&self, s: &SignMatrix) -> i64 {
        self.edges().map(|(a, b)| i64::from(s.get(a, b))).sum()
    }

    /// Each path oriented smallest endpoint first, paths sorted by smallest vertex.
    pub fn normalized(&self) -> PathFactor {
        let mut paths: Vec<Vec<usize>> = self
            .paths
            .iter()
            .map(|p| {
                let mut p = p.clone();
                if p[0] > p[p.len() - 1] {
                    p.reverse();
                }
                p
            })
            .collect();
        paths.sort_by_key(|p| *p.iter().min().expect("non-empty"));
        PathFactor { k: self.k, paths }
    }

    /// The text block `factor k=<k> weight=<w>` followed by one path per line.
    pub fn to_text(&self, l: &EdgeLabeling) -> String {
        let norm = self.normalized();
        let mut out = format!("factor k={} weight={}\n", self.k, self.weight(l));
        for p in &norm.paths {
            let line: Vec<String> = p.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Labels along a path, stored in the lexicographically larger orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathType {
    signs: Vec<i8>,
}

impl PathType {
    pub fn canonical(mut signs: Vec<i8>) -> Self {
        let rev: Vec<i8> = signs.iter().rev().copied().collect();
        if rev > signs {
            signs = rev;
        }
        PathType { signs }
    }

    pub fn of(l: &EdgeLabeling, path: &[usize]) -> Self {
        Self::canonical(path.windows(2).map(|w| l.label(w[0], w[1])).collect())
    }

    pub(crate) fn of_signs(s: &SignMatrix, path: &[usize]) -> Self {
        Self::canonical(oriented_signs(s, path))
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn weight(&self) -> i64 {
        self.signs.iter().map(|&x| i64::from(x)).sum()
    }
}

pub(crate) fn oriented_signs(s: &SignMatrix, path: &[usize]) -> Vec<i8> {
    path.windows(2).map(|w| s.get(w[0], w[1])).collect()
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.signs.iter().map(i8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Path types with multiplicities.
pub fn classify(l: &EdgeLabeling, factor: &PathFactor) -> BTreeMap<PathType, usize> {
    let mut out = BTreeMap::new();
    for p in factor.paths() {
        *out.entry(PathType::of(l, p)).or_default() += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeExchange {
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
    pub delta: i64,
}

impl EdgeExchange {
    pub fn new(l: &EdgeLabeling, removed: Vec<Edge>, added: Vec<Edge>) -> Self {
        let s = l.sign_matrix();
        Self::from_signs(&s, removed, added)
    }

    pub(crate) fn from_signs(s: &SignMatrix, removed: Vec<Edge>, added: Vec<Edge>) -> Self {
        let mut removed: Vec<Edge> = removed.into_iter().map(norm).collect();
        let mut added: Vec<Edge> = added.into_iter().map(norm).collect();
        removed.sort_unstable();
        added.sort_unstable();
        let delta = s.sum_edges(&added) - s.sum_edges(&removed);
        EdgeExchange { removed, added, delta }
    }

    pub fn empty() -> Self {
        EdgeExchange { removed: Vec::new(), added: Vec::new(), delta: 0 }
    }
}

/// `(E(F) ∖ removed) ∪ added`, checked to be a factor into `k`-paths.
pub fn apply_exchange(l: &EdgeLabeling, factor: &PathFactor, ex: &EdgeExchange) -> Result<PathFactor> {
    let s = l.sign_matrix();
    apply_exchange_signs(&s, factor, ex)
}

pub(crate) fn apply_exchange_signs(s: &SignMatrix, factor: &PathFactor, ex: &EdgeExchange) -> Result<PathFactor> {
    let n = factor.n();
    let mut edges = factor.edge_set();
    for &e in &ex.removed {
        if !edges.remove(&norm(e)) {
            return Err(Error::NotAFactor(format!("removed edge {}-{} is not in the factor", e.0, e.1)));
        }
    }
    for &(a, b) in &ex.added {
        if a == b || a >= n || b >= n {
            return Err(Error::InvalidEdge(a, b, n));
        }
        if !edges.insert(norm((a, b))) {
            return Err(Error::NotAFactor(format!("added edge {a}-{b} is already present")));
        }
    }
    let result = decompose_paths(n, factor.k, &edges)?;
    let expected = s.sum_edges(&ex.added) - s.sum_edges(&ex.removed);
    if expected != ex.delta {
        return Err(Error::Internal(format!("exchange claims delta {} but labels give {expected}", ex.delta)));
    }
    debug_assert_eq!(result.weight_signs(s), factor.weight_signs(s) + ex.delta);
    Ok(result)
}

/// Splits an edge set into `k`-vertex paths covering `0..n`.
pub(crate) fn decompose_paths(n: usize, k: usize, edges: &BTreeSet<Edge>) -> Result<PathFactor> {
    let mut adj = vec![Vec::with_capacity(2); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
        if adj[a].len() > 2 || adj[b].len() > 2 {
            return Err(Error::NotAFactor(format!("a vertex of {a}-{b} has degree above 2")));
        }
    }
    let mut seen = vec![false; n];
    let mut paths = Vec::new();
    for start in 0..n {
        if seen[start] || adj[start].len() > 1 {
            continue;
        }
        let mut path = vec![start];
        seen[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
            prev = cur;
            cur = next;
            seen[cur] = true;
            path.push(cur);
        }
        if path.len() != k {
            return Err(Error::NotAFactor(format!("component {path:?} is not a path on {k} vertices")));
        }
        paths.push(path);
    }
    if seen.iter().any(|&x| !x) {
        return Err(Error::NotAFactor("the edge set contains a cycle".into()));
    }
    Ok(PathFactor { k, paths }.normalized())
}

/// Parses the text block written by [`PathFactor::to_text`].
///
/// Returns the factor and the weight stated in its header.
pub fn parse_factor(text: &str, n: usize) -> Result<(PathFactor, i64)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .find(|l| l.starts_with("factor "))
        .ok_or_else(|| Error::Parse("missing `factor k=… weight=…` header".into()))?;
    let mut k = None;
    let mut w = None;
    for tok in header.split_whitespace().skip(1) {
        match tok.split_once('=') {
            Some(("k", v)) => k = v.parse::<usize>().ok(),
            Some(("weight", v)) => w = v.parse::<i64>().ok(),
            _ => return Err(Error::Parse(format!("unexpected header token {tok:?}"))),
        }
    }
    let k = k.filter(|&k| k >= 2).ok_or_else(|| Error::Parse("bad or missing k in factor header".into()))?;
    let w = w.ok_or_else(|| Error::Parse("bad or missing weight in factor header".into()))?;
    if n % k != 0 {
        return Err(Error::Parse(format!("{k} does not divide n={n}")));
    }
    let mut paths = Vec::new();
    for _ in 0..n / k {
        let line = lines.next().ok_or_else(|| Error::Parse("factor ends early".into()))?;
        let p: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        paths.push(p.map_err(|_| Error::Parse(format!("bad path line {line:?}")))?);
    }
    Ok((PathFactor::new(n, k, paths)?, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::random_zero_sum;

    fn seq_factor(n: usize, k: usize) -> PathFactor {
        PathFactor::new(n, k, (0..n / k).map(|i| (k * i..k * i + k).collect()).collect()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let l = EdgeLabeling::all_positive(9);
        let f = seq_factor(9, 3);
        assert_eq!(f.weight(&l), 6);
        let c = classify(&l, &f);
        assert_eq!(c.len(), 1);
        assert_eq!(c[&PathType::canonical(vec![1, 1])], 3);

        let l = EdgeLabeling::all_negative(8);
        let c = classify(&l, &seq_factor(8, 4));
        assert_eq!(c[&PathType::canonical(vec![-1, -1, -1])], 2);

        let l = random_zero_sum(12, 3).unwrap();
        let f = seq_factor(12, 3);
        let total: i64 = classify(&l, &f).iter().map(|(t, &m)| t.weight() * m as i64).sum();
        assert_eq!(total, f.weight(&l));
    }

    #[test]
    fn canonical_orientation() {
        assert_eq!(PathType::canonical(vec![-1, 1]).signs(), &[1, -1]);
        assert_eq!(PathType::canonical(vec![-1, 1, 1]).signs(), &[1, 1, -1]);
        assert_eq!(PathType::canonical(vec![-1, -1, 1]).signs(), &[1, -1, -1]);
        assert_eq!(PathType::canonical(vec![1, -1, 1]).to_string(), "(1,-1,1)");
    }

    #[test]
    fn exchange_examples() {
        // first path u1u2u3 = 0 1 2 of type (1,1), second w1w2w3 = 3 4 5 of type (1,-1)
        let pos = [(0, 1), (1, 2), (3, 4)];
        let mut l = EdgeLabeling::from_positive_set(6, pos).unwrap();
        for (a, b) in [(0, 2), (1, 4), (2, 4), (0, 4)] {
            l = l.with_label(a, b, 1);
        }
        let f = PathFactor::new(6, 3, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(f.weight(&l), 2);
        let ex = EdgeExchange::new(&l, vec![(0, 1), (4, 5)], vec![(0, 3), (2, 5)]);
        assert_eq!(ex.delta, -2);
        let g = apply_exchange(&l, &f, &ex).unwrap();
        assert_eq!(g.weight(&l), 0);

        assert_eq!(apply_exchange(&l, &f, &EdgeExchange::empty()).unwrap(), f.normalized());
        let broken = EdgeExchange::new(&l, vec![(1, 2)], vec![]);
        assert!(matches!(apply_exchange(&l, &f, &broken), Err(Error::NotAFactor(_))));
        let missing = EdgeExchange::new(&l, vec![(0, 5)], vec![]);
        assert!(matches!(apply_exchange(&l, &f, &missing), Err(Error::NotAFactor(_))));
        let cycle = EdgeExchange::new(&l, vec![(3, 4)], vec![(0, 2)]);
        assert!(matches!(apply_exchange(&l, &f, &cycle), Err(Error::NotAFactor(_))));
    }

    #[test]
    fn text_round_trip() {
        let l = random_zero_sum(9, 7).unwrap();
        let f = PathFactor::new(9, 3, vec![vec![8, 2, 4], vec![7, 0, 1], vec![3, 6, 5]]).unwrap();
        let text = f.to_text(&l);
        assert!(text.starts_with("factor k=3 weight="));
        let mut lines = text.lines().skip(1);
        assert_eq!(lines.next(), Some("1 0 7"));
        assert_eq!(lines.next(), Some("4 2 8"));
        assert_eq!(lines.next(), Some("3 6 5"));
        let (g, w) = parse_factor(&text, 9).unwrap();
        assert_eq!(g, f.normalized());
        assert_eq!(w, f.weight(&l));
        assert!(parse_factor("factor k=3 weight=0\n0 1 2\n3 4 5\n6 7 7\n", 9).is_err());
    }

    #[test]
    fn validator_rejects_bad_partitions() {
        assert!(PathFactor::new(6, 3, vec![vec![0, 1, 2], vec![3, 4, 4]]).is_err());
        assert!(PathFactor::new(6, 3, vec![vec![0, 1, 2]]).is_err());
        assert!(PathFactor::new(6, 3, vec![vec![0, 1, 2], vec![3, 4, 6]]).is_err());
    }
}
