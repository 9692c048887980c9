//! Success-probability ceiling for a marked pair pinned by its stationary
//! state.
//!
//! With both endpoints of the marked pair at degree `d` in a graph of `m`
//! edges and baseline `a = 1/sqrt(2m)`, the time-evolved state can differ
//! from the stationary state only inside a norm budget of `2a^2 d^2`.
//! Distributing that budget over the marked arcs as adversarially as
//! possible caps the success probability at
//!
//! ```text
//! p_M <= 2a^2 (2*sqrt((d-1) d^3) + d (2d - 1))
//! ```
//!
//! [`maximize_pm_bruteforce`] re-derives the cap numerically — a dense
//! sweep plus golden-section refinement over the constraint ellipse — so
//! the closed form and the optimizer can be cross-checked to six digits.
//! [`empirical_pm_max`] measures what a trajectory actually reaches.

use std::sync::Arc;

use thiserror::Error;

use crate::graphs::Graph;
use crate::marked::MarkedConfig;
use crate::walk::{Stepper, WalkError, WalkState};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Closed-form ceiling for a degree-`d` marked pair in an `m`-edge graph
/// (`a = 1/sqrt(2m)`), i.e. `(2*sqrt((d-1)d^3) + d(2d-1)) / m`.
pub fn pair_pm_bound(degree: usize, edges: usize) -> Result<f64, BoundsError> {
    if degree < 2 {
        return Err(BoundsError::InvalidParameter(format!(
            "pair bound needs degree >= 2, got {degree}"
        )));
    }
    if edges == 0 {
        return Err(BoundsError::InvalidParameter("graph has no edges".into()));
    }
    let d = degree as f64;
    let m = edges as f64;
    Ok((2.0 * ((d - 1.0) * d.powi(3)).sqrt() + d * (2.0 * d - 1.0)) / m)
}

/// Outcome of the numeric maximization.
#[derive(Clone, Copy, Debug)]
pub struct BoundResult {
    /// Numerically maximized `p_M` over the constraint set.
    pub max_probability: f64,
    /// Closed-form value `2a^2 (2*sqrt((d-1)d^3) + d(2d-1))`.
    pub closed_form: f64,
    /// `(x1, x2)` attaining the maximum: the per-arc deviation on the
    /// `d-1` outward arcs and on the facing arc of each marked vertex.
    pub optimizer: (f64, f64),
    /// The constraint level `2 a^2 d^2`.
    pub norm_budget: f64,
}

impl BoundResult {
    /// `|max_probability - closed_form| / closed_form`.
    pub fn relative_gap(&self) -> f64 {
        (self.max_probability - self.closed_form).abs() / self.closed_form
    }

    /// How far the optimizer drifts off the constraint ellipse.
    pub fn constraint_residual(&self, degree: usize) -> f64 {
        let d = degree as f64;
        let (x1, x2) = self.optimizer;
        (2.0 * (d - 1.0) * x1 * x1 + 2.0 * x2 * x2 - self.norm_budget).abs()
    }
}

const SWEEP_SAMPLES: usize = 1_000_000;

/// Maximize `p_M = 2(d-1)(a+x1)^2 + 2((d-1)a + x2)^2` subject to
/// `2(d-1)x1^2 + 2x2^2 = 2a^2d^2`, by sweeping the constraint ellipse
/// (`x1 = (ad/sqrt(d-1)) cos t`, `x2 = ad sin t`) with [`SWEEP_SAMPLES`]
/// samples and refining the best bracket by golden section.
pub fn maximize_pm_bruteforce(degree: usize, a: f64) -> Result<BoundResult, BoundsError> {
    if degree < 2 {
        return Err(BoundsError::InvalidParameter(format!(
            "maximization needs degree >= 2, got {degree}"
        )));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "baseline amplitude must be positive and finite, got {a}"
        )));
    }
    let d = degree as f64;
    let r1 = a * d / (d - 1.0).sqrt();
    let r2 = a * d;
    let p_of = |theta: f64| {
        let x1 = r1 * theta.cos();
        let x2 = r2 * theta.sin();
        let outward = a + x1;
        let facing = (d - 1.0) * a + x2;
        2.0 * (d - 1.0) * outward * outward + 2.0 * facing * facing
    };

    let tau = std::f64::consts::TAU;
    let dt = tau / SWEEP_SAMPLES as f64;
    let mut best_k = 0;
    let mut best_p = f64::NEG_INFINITY;
    for k in 0..SWEEP_SAMPLES {
        let p = p_of(k as f64 * dt);
        if p > best_p {
            best_p = p;
            best_k = k;
        }
    }
    let (theta, max_probability) =
        golden_section_max(&p_of, (best_k as f64 - 1.0) * dt, (best_k as f64 + 1.0) * dt, 1e-13);

    let closed_form = 2.0 * a * a * (2.0 * ((d - 1.0) * d.powi(3)).sqrt() + d * (2.0 * d - 1.0));
    Ok(BoundResult {
        max_probability,
        closed_form,
        optimizer: (r1 * theta.cos(), r2 * theta.sin()),
        norm_budget: 2.0 * a * a * d * d,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
fn golden_section_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Maximum marked probability over `t = 0..=steps`, starting from the
/// uniform state.
pub fn empirical_pm_max(
    graph: &Arc<Graph>,
    marked: &MarkedConfig,
    steps: usize,
) -> Result<f64, WalkError> {
    let mut stepper = Stepper::new(&WalkState::uniform(graph), marked)?;
    let mut max = stepper.marked_probability();
    for _ in 0..steps {
        stepper.advance();
        max = max.max(stepper.marked_probability());
    }
    Ok(max)
}
