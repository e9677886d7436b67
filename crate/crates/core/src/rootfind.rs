//! Smallest fixed point of a non-decreasing map of `[0, 1]` into itself.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: u64 = 1_000_000;

/// `t = g(t)` on `[0, 1]` with `g` non-decreasing.
pub struct FixedPointProblem<F> {
    pub g: F,
    pub tol: f64,
    pub max_iter: u64,
    /// `g` is convex on `[0, 1]`. Enables a secant step that cannot overshoot the
    /// smallest root, which keeps tangent cases from crawling.
    pub convex: bool,
}

impl<F: Fn(f64) -> f64> FixedPointProblem<F> {
    pub fn new(g: F) -> Self {
        Self {
            g,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            convex: false,
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: u64) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn convex(mut self) -> Self {
        self.convex = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub value: f64,
    /// `|g(t*) − t*|`.
    pub residual: f64,
    pub iterations: u64,
    /// Steps taken by the secant rule rather than plain iteration.
    pub accelerated: u64,
}

fn checked<F: Fn(f64) -> f64>(g: &F, x: f64) -> Result<f64> {
    let v = g(x);
    if !(-1e-12..=1.0 + 1e-12).contains(&v) || v.is_nan() {
        return Err(Error::OutOfRange { at: x, value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Limit of `t_{k+1} = g(t_k)` from `t_0 = 0`.
///
/// Stops once a step is shorter than `tol`. Near a tangent root the residual `g(t) − t`
/// vanishes quadratically, so the returned point can sit `O(√tol)` below the root while
/// still meeting the residual bound; `iterations` flags such cases.
pub fn smallest_fixed_point<F: Fn(f64) -> f64>(p: &FixedPointProblem<F>) -> Result<FixedPoint> {
    let g = &p.g;
    let mut x = 0.0f64;
    let mut gx = checked(g, x)?;
    let mut prev: Option<(f64, f64)> = None;
    let mut accelerated = 0u64;
    for iter in 1..=p.max_iter {
        let h = gx - x;
        let mut next = gx;
        if p.convex {
            if let Some((xp, gp)) = prev {
                if x > xp {
                    let s = (gx - gp) / (x - xp);
                    if s > 0.0 && s < 1.0 {
                        // For convex g the chord slope below x bounds the slope toward the
                        // root, so x + h/(1 − s) stays at or below it.
                        let cand = (x + h / (1.0 - s)).min(1.0);
                        if cand > gx {
                            let gc = checked(g, cand)?;
                            if gc >= cand - p.tol {
                                prev = Some((x, gx));
                                accelerated += 1;
                                let step = cand - x;
                                x = cand;
                                gx = gc;
                                if step < p.tol {
                                    return Ok(done(x, gx, iter, accelerated));
                                }
                                continue;
                            }
                        }
                    }
                }
            }
        }
        debug_assert!(next >= x - 1e-12, "iterates must not decrease");
        next = next.max(x);
        let step = next - x;
        prev = Some((x, gx));
        x = next;
        gx = checked(g, x)?;
        if step < p.tol {
            return Ok(done(x, gx, iter, accelerated));
        }
    }
    Err(Error::NoConvergence {
        iterations: p.max_iter,
        last_step: gx - x,
    })
}

fn done(x: f64, gx: f64, iterations: u64, accelerated: u64) -> FixedPoint {
    FixedPoint {
        value: x,
        residual: (gx - x).abs(),
        iterations,
        accelerated,
    }
}

/// Test oracle: the first zero of `g(t) − t` on `[0, hi]` located by a grid scan and
/// bisection, independent of the iteration above.
pub fn first_root_by_bisection<F: Fn(f64) -> f64>(g: F, hi: f64, grid: usize) -> Option<f64> {
    let h = |t: f64| g(t) - t;
    if h(0.0) <= 0.0 {
        return Some(0.0);
    }
    let mut a = 0.0;
    for i in 1..=grid {
        let b = hi * i as f64 / grid as f64;
        if h(b) <= 0.0 {
            let (mut lo, mut up) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + up);
                if h(mid) > 0.0 {
                    lo = mid;
                } else {
                    up = mid;
                }
            }
            return Some(up);
        }
        a = b;
    }
    None
}
