//! Closed-form Hausdorff error certificates and probabilistic covering
//! guarantees, plus their inversions (required δ or M for a target accuracy
//! or confidence).
//!
//! The central estimate: if X is r-smooth, f is a C¹ submersion with
//! (f, df) Lipschitz constants (L̄, H̄), and the sample is a δ-cover of ∂X,
//! then the hull of the sampled images is within ε = ½(L̄/r + H̄)δ² of
//! hull(f(X)) in Hausdorff distance.

use serde::{Deserialize, Serialize};

use crate::covers::{self, SmoothSetDescriptor};
use crate::error::{Error, Result};

/// Smoothness data of the pair (X, f): Lipschitz constants of f and df, the
/// optional inverse constant, the rolling-ball radius of X, and the optional
/// neighborhood radius used by the reach-stability estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothnessConstants {
    /// Lipschitz constant of f.
    pub l_bar: f64,
    /// Lipschitz constant of df.
    pub h_bar: f64,
    /// Lipschitz constant of f⁻¹, when f is invertible.
    pub l_under: Option<f64>,
    /// Smoothness radius of X (a ball of radius r rolls freely).
    pub r: f64,
    /// Radius s of the neighborhood X + B(0, s) on which f is a
    /// diffeomorphism.
    pub s: Option<f64>,
    /// Whether the constants are analytically certified (false for sampled
    /// estimates); carried through every report built from them.
    pub certified: bool,
}

impl SmoothnessConstants {
    pub fn certified(l_bar: f64, h_bar: f64, r: f64) -> Self {
        SmoothnessConstants { l_bar, h_bar, l_under: None, r, s: None, certified: true }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |v: f64, allow_zero: bool| !v.is_finite() || v < 0.0 || (!allow_zero && v == 0.0);
        if bad(self.l_bar, false) || bad(self.h_bar, true) || bad(self.r, false) {
            return Err(Error::InvalidArgument(format!(
                "need l_bar > 0, h_bar >= 0, r > 0; got ({}, {}, {})",
                self.l_bar, self.h_bar, self.r
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    FirstOrder,
    SecondOrder,
    Diffeo,
    Dumbgen,
}

/// An evaluated error certificate: ε together with the bound family, the
/// covering radius it was evaluated at, and the constants used.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub kind: BoundKind,
    pub delta: f64,
    pub constants: SmoothnessConstants,
    /// False when either the constants or the covering radius are sampled
    /// estimates rather than certified values.
    pub certified: bool,
}

/// Second-order certificate ε = ½(L̄/r + H̄)δ².
pub fn bound_second_order(c: &SmoothnessConstants, delta: f64) -> f64 {
    0.5 * ((c.l_bar / c.r + c.h_bar) * (delta * delta))
}

/// First-order (Lipschitz-covering) certificate ε = L̄δ.
pub fn bound_first_order(c: &SmoothnessConstants, delta: f64) -> f64 {
    c.l_bar * delta
}

/// Certificate for diffeomorphisms: δ²/(2R) with
/// 1/R = (L̄/r + H̄)(L̲L̄)², i.e. the second-order value inflated by the
/// factor (L̲L̄)², written in that form so the ratio identity is exact in
/// floating point.
pub fn bound_diffeo(c: &SmoothnessConstants, delta: f64) -> Result<f64> {
    let l_under = c.l_under.ok_or(Error::MissingConstant("l_under"))?;
    let k = l_under * c.l_bar;
    Ok(bound_second_order(c, delta) * (k * k))
}

/// Classical convex-set certificate δ²/R for boundaries with 1/R-Lipschitz
/// normals.
pub fn bound_dumbgen(big_r: f64, delta: f64) -> f64 {
    (1.0 / big_r) * (delta * delta)
}

/// Reach of the image of X under a diffeomorphism defined on X + B(0, s):
/// min(s/L̲, 1/((L̄/r + H̄)L̲²)).
pub fn reach_diffeo(c: &SmoothnessConstants) -> Result<f64> {
    let l_under = c.l_under.ok_or(Error::MissingConstant("l_under"))?;
    let s = c.s.ok_or(Error::MissingConstant("s"))?;
    Ok((s / l_under).min(1.0 / ((c.l_bar / c.r + c.h_bar) * l_under * l_under)))
}

/// The covering failure probability β = N(1 − Λ)^M, computed in log space.
/// β may exceed 1, in which case the guarantee is vacuous; the raw value is
/// returned together with the flag rather than clamped.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FailureProb {
    pub beta: f64,
    pub vacuous: bool,
}

pub fn covering_failure_prob(n: u64, lambda: f64, m: u64) -> Result<FailureProb> {
    if lambda <= 0.0 {
        return Err(Error::InvalidLambda(format!(
            "Assumption violated: lambda must be positive, got {lambda}"
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("need N >= 1 and M >= 1".into()));
    }
    let lambda = lambda.min(1.0);
    // ln β = ln N + M·ln(1 − Λ); ln1p keeps small Λ accurate.
    let ln_beta = (n as f64).ln() + m as f64 * (-lambda).ln_1p();
    let beta = ln_beta.exp();
    Ok(FailureProb { beta, vacuous: beta >= 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundOrder {
    First,
    Second,
}

/// Success-probability curve: for each sample size M, invert the chosen
/// error bound for the δ achieving accuracy ε, evaluate Λ and the covering
/// number at δ/2, and return 1 − β clamped to [0, 1].
pub fn success_prob_curve(
    c: &SmoothnessConstants,
    set: &SmoothSetDescriptor,
    epsilon: f64,
    order: BoundOrder,
    m_list: &[u64],
) -> Result<Vec<(u64, f64)>> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    c.validate()?;
    let delta = delta_for_accuracy(c, epsilon, order);
    let lambda = covers::lambda_uniform(set, delta)?;
    let n = covers::covering_number(set, delta / 2.0)?;
    let mut out = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let fp = covering_failure_prob(n, lambda, m)?;
        out.push((m, (1.0 - fp.beta).clamp(0.0, 1.0)));
    }
    Ok(out)
}

/// The covering radius δ at which the chosen bound equals ε.
pub fn delta_for_accuracy(c: &SmoothnessConstants, epsilon: f64, order: BoundOrder) -> f64 {
    match order {
        BoundOrder::First => epsilon / c.l_bar,
        BoundOrder::Second => (2.0 * epsilon / (c.l_bar / c.r + c.h_bar)).sqrt(),
    }
}

/// Smallest M with N(1 − Λ)^M ≤ β_target. The closed form
/// ⌈ln(β/N)/ln(1 − Λ)⌉ can land one off at exact crossings, so the result is
/// adjusted by direct log-space checks.
pub fn min_samples(n: u64, lambda: f64, beta_target: f64) -> Result<u64> {
    if !(0.0 < beta_target && beta_target < 1.0) {
        return Err(Error::InvalidArgument("beta_target must be in (0,1)".into()));
    }
    if lambda <= 0.0 {
        return Err(Error::InvalidLambda(format!("lambda must be positive, got {lambda}")));
    }
    if lambda >= 1.0 {
        return Ok(1);
    }
    let ln1m = (-lambda).ln_1p();
    let satisfied = |m: u64| (n as f64).ln() + m as f64 * ln1m <= beta_target.ln();
    let guess = ((beta_target / n as f64).ln() / ln1m).ceil();
    let mut m = if guess.is_finite() && guess > 1.0 { guess as u64 } else { 1 };
    while m > 1 && satisfied(m - 1) {
        m -= 1;
    }
    while !satisfied(m) {
        m += 1;
    }
    Ok(m)
}
