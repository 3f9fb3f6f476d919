//! Minimizing the five-variable quadratic over the simplex cut by
//! `3x₁ + x₂ − x₃ − x₄ − 3x₅ ≥ 0`.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// The certified minimum.
pub const MIN_VALUE: f64 = 5.0 / 256.0;
/// Where it is attained.
pub const MINIMIZER: [f64; 5] = [0.25, 0.0, 0.0, 0.75, 0.0];

const GRID: i64 = 64;
const TOL: f64 = 1e-12;
const CUT: [f64; 5] = [3.0, 1.0, -1.0, -1.0, -3.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexPoint {
    pub x: [f64; 5],
}

impl SimplexPoint {
    pub fn new(x: [f64; 5]) -> Result<Self> {
        let p = SimplexPoint { x };
        if x.iter().any(|&v| !(-TOL..=1.0 + TOL).contains(&v)) {
            return Err(Error::Precondition(format!("{x:?} leaves the unit box")));
        }
        let (sum, cut) = p.residuals();
        if sum.abs() > TOL || cut < -TOL {
            return Err(Error::Precondition(format!("{x:?} is infeasible (sum residual {sum:e}, cut {cut:e})")));
        }
        Ok(p)
    }

    /// `(Σx − 1, 3x₁ + x₂ − x₃ − x₄ − 3x₅)`.
    pub fn residuals(&self) -> (f64, f64) {
        (self.x.iter().sum::<f64>() - 1.0, cut(&self.x))
    }

    pub fn is_feasible(&self) -> bool {
        Self::new(self.x).is_ok()
    }

    pub fn distance(&self, other: &[f64; 5]) -> f64 {
        self.x.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

fn cut(x: &[f64; 5]) -> f64 {
    x.iter().zip(CUT).map(|(v, a)| v * a).sum()
}

pub fn f_eval(x: &[f64; 5]) -> f64 {
    let [x1, x2, x3, x4, x5] = *x;
    x1 * x1 / 2.0 + x2 * x2 / 2.0 + x3 * x3 / 2.0 - 3.0 * x4 * x4 / 16.0 - x5 * x5 / 2.0
        + x1 * x2
        + x1 * x3
        + x2 * x3
        + x1 * x4 / 2.0
        + x1 * x5 / 2.0
        - x4 * x5 / 2.0
}

/// `f` in exact rational arithmetic.
pub fn f_exact(x: &[Ratio<i64>; 5]) -> Ratio<i64> {
    let h = Ratio::new(1, 2);
    let [x1, x2, x3, x4, x5] = *x;
    h * x1 * x1 + h * x2 * x2 + h * x3 * x3 - Ratio::new(3, 16) * x4 * x4 - h * x5 * x5
        + x1 * x2
        + x1 * x3
        + x2 * x3
        + h * x1 * x4
        + h * x1 * x5
        - h * x4 * x5
}

#[derive(Clone, Debug)]
pub struct MinimizeReport {
    pub point: SimplexPoint,
    pub value: f64,
    pub grid_points: usize,
    pub feasible_grid_points: usize,
    pub grid_value: f64,
    pub descent_steps: usize,
    /// Largest constraint violation over all accepted descent iterates.
    pub max_violation: f64,
}

/// Calls `f(x)` for every point of the 1/64 grid on the simplex whose
/// coordinates listed in `zero` vanish.
pub fn for_each_grid_point(zero: &[usize], mut f: impl FnMut([i64; 5])) {
    let mut x = [0i64; 5];
    fn rec(i: usize, left: i64, zero: &[usize], x: &mut [i64; 5], f: &mut dyn FnMut([i64; 5])) {
        if i == 4 {
            if zero.contains(&4) && left != 0 {
                return;
            }
            x[4] = left;
            f(*x);
            return;
        }
        let hi = if zero.contains(&i) { 0 } else { left };
        for v in 0..=hi {
            x[i] = v;
            rec(i + 1, left - v, zero, x, f);
        }
    }
    rec(0, GRID, zero, &mut x, &mut f);
}

fn descend(mut x: [f64; 5], free: &[usize]) -> ([f64; 5], usize, f64) {
    let mut fx = f_eval(&x);
    let mut step = 0.25f64;
    let mut steps = 0;
    let mut worst = 0.0f64;
    let d: [f64; 5] = {
        let mean = CUT.iter().sum::<f64>() / 5.0;
        let mut d = [0.0; 5];
        for i in 0..5 {
            d[i] = if free.contains(&i) { CUT[i] - mean } else { 0.0 };
        }
        d
    };
    let dd: f64 = d.iter().zip(CUT).map(|(a, b)| a * b).sum();
    while step >= 1e-9 {
        let mut improved = false;
        for &i in free {
            for &j in free {
                if i == j {
                    continue;
                }
                let t = step.min(x[i]);
                if t <= 0.0 {
                    continue;
                }
                let mut y = x;
                y[i] -= t;
                y[j] += t;
                let g = cut(&y);
                if g < 0.0 {
                    if dd <= 0.0 {
                        continue;
                    }
                    let s = -g / dd;
                    for k in 0..5 {
                        y[k] += s * d[k];
                    }
                    if y.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                        continue;
                    }
                }
                let fy = f_eval(&y);
                if fy < fx - 1e-15 {
                    x = y;
                    fx = fy;
                    improved = true;
                    steps += 1;
                    let (s, c) = (x.iter().sum::<f64>() - 1.0, cut(&x));
                    worst = worst.max(s.abs()).max(-c);
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (x, steps, worst)
}

fn minimize_on(zero: &[usize]) -> MinimizeReport {
    let mut grid_points = 0;
    let mut feasible = 0;
    let mut best = (f64::INFINITY, [0i64; 5]);
    for_each_grid_point(zero, |x| {
        grid_points += 1;
        if 3 * x[0] + x[1] - x[2] - x[3] - 3 * x[4] < 0 {
            return;
        }
        feasible += 1;
        let xf = x.map(|v| v as f64 / GRID as f64);
        let v = f_eval(&xf);
        if v < best.0 {
            best = (v, x);
        }
    });
    let start = best.1.map(|v| v as f64 / GRID as f64);
    let free: Vec<usize> = (0..5).filter(|i| !zero.contains(i)).collect();
    let (x, descent_steps, max_violation) = descend(start, &free);
    MinimizeReport {
        point: SimplexPoint { x },
        value: f_eval(&x),
        grid_points,
        feasible_grid_points: feasible,
        grid_value: best.0,
        descent_steps,
        max_violation,
    }
}

/// Grid sweep at resolution 1/64 followed by projected pairwise descent.
pub fn minimize() -> MinimizeReport {
    minimize_on(&[])
}

/// Same as [`minimize`] on the face where the coordinates in `zero` vanish.
pub fn minimize_restricted(zero: &[usize]) -> Result<MinimizeReport> {
    if zero.iter().any(|&i| i >= 5) || zero.len() >= 5 {
        return Err(Error::Spec(format!("bad face {zero:?}")));
    }
    Ok(minimize_on(zero))
}
