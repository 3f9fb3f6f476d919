//! Browser bindings: labeling generation, star scan, path-factor solving and
//! evaluation of the five-variable quadratic.

use wasm_bindgen::prelude::*;

use zsf::factorsolve::{solve_path_factor, FactorOutcome, SolveConfig};
use zsf::graphcore::{construct_star_extremal_0mod4, construct_star_extremal_1mod4, random_zero_sum, EdgeLabeling};
use zsf::quadmin::{f_eval, SimplexPoint};
use zsf::starsolve::{balanced_center, star_weights};

fn js(e: zsf::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// ZSG text of a random zero-sum labeling.
#[wasm_bindgen]
pub fn random_labeling(n: usize, seed: u64) -> Result<String, JsError> {
    random_zero_sum(n, seed).map(|l| l.to_zsg()).map_err(js)
}

/// ZSG text of the extremal star construction for `n ≡ 0` or `1 (mod 4)`.
#[wasm_bindgen]
pub fn extremal_labeling(n: usize) -> Result<String, JsError> {
    let l = if n % 4 == 0 { construct_star_extremal_0mod4(n) } else { construct_star_extremal_1mod4(n) };
    l.map(|l| l.to_zsg()).map_err(js)
}

/// Balanced center and the weight of every star.
#[wasm_bindgen]
pub fn star_scan(zsg: &str) -> Result<String, JsError> {
    let l = EdgeLabeling::from_zsg(zsg).map_err(js)?;
    let r = balanced_center(&l).map_err(js)?;
    let weights: Vec<String> = star_weights(&l).iter().map(i64::to_string).collect();
    Ok(format!(
        "center={}\nabs_weight={}\npos_degree={}\nbound={}\nweights={}\n",
        r.center,
        r.abs_weight,
        r.pos_degree,
        (l.n() / 2).saturating_sub(1),
        weights.join(",")
    ))
}

/// A zero-sum `P_k`-factor in the factor text format, or the best factor found.
#[wasm_bindgen]
pub fn solve_factor(zsg: &str, k: usize, seed: u64) -> Result<String, JsError> {
    let l = EdgeLabeling::from_zsg(zsg).map_err(js)?;
    let out = solve_path_factor(&l, k, &SolveConfig { seed, ..Default::default() }).map_err(js)?;
    Ok(match out {
        FactorOutcome::Solved(s) => format!("status=solved\nstage={}\n{}", s.stage, s.factor.to_text(&l)),
        FactorOutcome::Unresolved(u) => format!("status=unresolved\n{}", u.best.to_text(&l)),
    })
}

/// Value and constraint residuals of the quadratic at `x`.
#[wasm_bindgen]
pub fn quadratic(x1: f64, x2: f64, x3: f64, x4: f64, x5: f64) -> String {
    let x = [x1, x2, x3, x4, x5];
    let (sum, cut) = SimplexPoint { x }.residuals();
    let feasible = SimplexPoint::new(x).is_ok();
    format!(
        "value={:.9}\nfeasible={feasible}\nresidual_sum={sum:.3e}\nresidual_cut={cut:.3e}\ngap_to_5/256={:.3e}\n",
        f_eval(&x),
        f_eval(&x) - 5.0 / 256.0
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ops_round_trip() {
        let g = random_labeling(9, 7).unwrap();
        assert!(star_scan(&g).unwrap().contains("abs_weight="));
        assert!(solve_factor(&g, 3, 0).unwrap().contains("factor k=3 weight=0"));
        assert!(star_scan(&extremal_labeling(8).unwrap()).unwrap().contains("abs_weight=3\n"));
        assert!(quadratic(0.25, 0.0, 0.0, 0.75, 0.0).starts_with("value=0.019531250\nfeasible=true"));
    }
}
