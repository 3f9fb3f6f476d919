//! Balanced star centers and the large-max-degree placement built on them.

use crate::embed::{weight_unchecked, Embedding, ForestPattern};
use crate::error::{Error, Result};
use crate::graphcore::{EdgeLabeling, SignMatrix};
use crate::swapwalk::swap_delta;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarResult {
    pub center: usize,
    pub abs_weight: u64,
    pub pos_degree: usize,
}

/// Weight of the spanning star at each vertex: `2·d⁺(u) − (n−1)`.
pub fn star_weights(l: &EdgeLabeling) -> Vec<i64> {
    let n = l.n() as i64;
    (0..l.n()).map(|u| 2 * l.pos_degree(u) as i64 - (n - 1)).collect()
}

/// The star center of least `|weight|`, smallest index on ties.
pub fn balanced_center(l: &EdgeLabeling) -> Result<StarResult> {
    if l.n() < 2 {
        return Err(Error::Precondition("a star needs n >= 2".into()));
    }
    if !l.is_zero_sum() {
        return Err(Error::Precondition("labeling is not zero-sum".into()));
    }
    let (center, w) = star_weights(l)
        .into_iter()
        .enumerate()
        .min_by_key(|&(u, w)| (w.unsigned_abs(), u))
        .expect("n >= 2");
    Ok(StarResult { center, abs_weight: w.unsigned_abs(), pos_degree: l.pos_degree(center) })
}

/// The star pattern placed with its center on `center`.
pub fn star_embedding(n: usize, center: usize) -> Embedding {
    let mut map: Vec<usize> = (0..n).collect();
    map.swap(0, center);
    Embedding::from_vec_unchecked(map)
}

/// A copy of `f` with `|weight| ≤ n/2 − 1`, for patterns with `Δ(F) ≥ n/2 + 1`.
///
/// The max-degree vertex goes to a balanced center `u`. Its incident edges
/// take every negative edge at `u` when `Δ ≥ 2d⁻` (working on the negation if
/// `u` has more negative than positive edges), and an even split otherwise.
/// The rest is then improved by swaps that keep the star part fixed.
pub fn corollary1_copy(l: &EdgeLabeling, f: &ForestPattern) -> Result<Embedding> {
    let n = l.n();
    if f.n() != n {
        return Err(Error::InvalidEmbedding(format!("pattern has {} vertices, labeling {n}", f.n())));
    }
    let delta = f.max_degree();
    if 2 * delta < n + 2 {
        return Err(Error::Precondition(format!("max degree {delta} is below n/2 + 1 for n={n}")));
    }
    let star = balanced_center(l)?;
    let u = star.center;
    let flip = 2 * star.pos_degree < n - 1;
    let signs: SignMatrix = if flip { l.sign_matrix().negated() } else { l.sign_matrix() };
    let (neg, pos): (Vec<usize>, Vec<usize>) = (0..n).filter(|&x| x != u).partition(|&x| signs.get(u, x) < 0);
    let d_neg = neg.len();
    let (take_neg, take_pos) = if delta >= 2 * d_neg { (d_neg, delta - d_neg) } else { (delta / 2, delta - delta / 2) };
    if take_pos > pos.len() {
        return Err(Error::Internal("balanced center lacks positive edges".into()));
    }
    let mut chosen: Vec<usize> = neg[..take_neg].iter().chain(&pos[..take_pos]).copied().collect();
    chosen.sort_unstable();
    let outside: Vec<usize> = (0..n).filter(|&x| x != u && chosen.binary_search(&x).is_err()).collect();

    let v = (0..n).find(|&p| f.degrees()[p] == delta).expect("max degree is attained");
    let mut map = vec![usize::MAX; n];
    map[v] = u;
    for (&p, &h) in f.neighbors(v).iter().zip(&chosen) {
        map[p] = h;
    }
    let mut rest = outside.iter();
    for p in 0..n {
        if map[p] == usize::MAX {
            map[p] = *rest.next().expect("host count matches");
        }
    }

    let mut inv = vec![0; n];
    for (p, &h) in map.iter().enumerate() {
        inv[h] = p;
    }
    let mut w = weight_unchecked(&signs, f, &map);
    loop {
        let mut best = (w.abs(), 0, 0, 0);
        for group in [&chosen, &outside] {
            for (i, &x) in group.iter().enumerate() {
                for &y in &group[i + 1..] {
                    let d = swap_delta(&signs, f, &map, &inv, x, y);
                    if (w + d).abs() < best.0 {
                        best = ((w + d).abs(), d, x, y);
                    }
                }
            }
        }
        if best.0 == w.abs() {
            break;
        }
        let (_, d, x, y) = best;
        let (px, py) = (inv[x], inv[y]);
        map[px] = y;
        map[py] = x;
        inv[x] = py;
        inv[y] = px;
        w += d;
    }
    if 2 * w.unsigned_abs() as usize > n.saturating_sub(2) {
        return Err(Error::Internal(format!("placement reached |weight| = {} above n/2 - 1", w.abs())));
    }
    Ok(Embedding::from_vec_unchecked(map))
}
