//! One-dimensional building blocks and their closed-form transforms.

use num_complex::Complex;

use crate::error::{RatesError, Result};
use crate::real::Real;

/// A one-dimensional driving process.
///
/// CIR-type components follow `dX = -λ(X - θ)dt + 2η√X dW` (plus jumps), OU-type
/// components `dX = -λ(X - θ)dt + σ dW` (plus jumps of the background driving process).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component<T> {
    BrownianDrift {
        sigma: T,
        mu: T,
        x0: T,
    },
    GaussOu {
        lambda: T,
        theta: T,
        sigma: T,
        x0: T,
    },
    DoubleGammaOuBm {
        lambda: T,
        theta: T,
        sigma: T,
        alpha_plus: T,
        alpha_minus: T,
        beta_plus: T,
        beta_minus: T,
        x0: T,
    },
    Cir {
        lambda: T,
        theta: T,
        eta: T,
        x0: T,
    },
    CirJump {
        lambda: T,
        theta: T,
        eta: T,
        alpha: T,
        beta: T,
        x0: T,
    },
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(RatesError::InvalidParameter(what.to_string()))
    }
}

fn cx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `(e^{-λt}, 1 - e^{-λt})` with the second term computed without cancellation.
fn decay<T: Real>(lambda: T, t: T) -> (T, T) {
    let e = (-lambda * t).exp();
    (e, -(-lambda * t).exp_m1())
}

impl<T: Real> Component<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Component::BrownianDrift { .. } => "BrownianDrift",
            Component::GaussOu { .. } => "GaussOU",
            Component::DoubleGammaOuBm { .. } => "DoubleGammaOUBM",
            Component::Cir { .. } => "CIR",
            Component::CirJump { .. } => "CIRJump",
        }
    }

    pub fn x0(&self) -> T {
        match *self {
            Component::BrownianDrift { x0, .. }
            | Component::GaussOu { x0, .. }
            | Component::DoubleGammaOuBm { x0, .. }
            | Component::Cir { x0, .. }
            | Component::CirJump { x0, .. } => x0,
        }
    }

    pub fn with_x0(mut self, x: T) -> Self {
        match &mut self {
            Component::BrownianDrift { x0, .. }
            | Component::GaussOu { x0, .. }
            | Component::DoubleGammaOuBm { x0, .. }
            | Component::Cir { x0, .. }
            | Component::CirJump { x0, .. } => *x0 = x,
        }
        self
    }

    /// True for components living on `[0, ∞)`.
    pub fn is_nonnegative(&self) -> bool {
        matches!(self, Component::Cir { .. } | Component::CirJump { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        let fin = |v: T| v.is_finite();
        match *self {
            Component::BrownianDrift { sigma, mu, x0 } => {
                check(fin(sigma) && fin(mu) && fin(x0), "BrownianDrift: non-finite parameter")?;
                check(sigma >= z, "BrownianDrift: sigma must be >= 0")
            }
            Component::GaussOu {
                lambda,
                theta,
                sigma,
                x0,
            } => {
                check(fin(theta) && fin(x0) && fin(sigma), "GaussOU: non-finite parameter")?;
                check(lambda > z && fin(lambda), "GaussOU: lambda must be > 0")?;
                check(sigma >= z, "GaussOU: sigma must be >= 0")
            }
            Component::DoubleGammaOuBm {
                lambda,
                theta,
                sigma,
                alpha_plus,
                alpha_minus,
                beta_plus,
                beta_minus,
                x0,
            } => {
                check(
                    fin(theta) && fin(x0) && fin(sigma),
                    "DoubleGammaOUBM: non-finite parameter",
                )?;
                check(lambda > z && fin(lambda), "DoubleGammaOUBM: lambda must be > 0")?;
                check(sigma >= z, "DoubleGammaOUBM: sigma must be >= 0")?;
                check(
                    alpha_plus > z && fin(alpha_plus),
                    "DoubleGammaOUBM: alpha_plus must be > 0",
                )?;
                check(
                    alpha_minus > z && fin(alpha_minus),
                    "DoubleGammaOUBM: alpha_minus must be > 0",
                )?;
                check(
                    beta_plus >= z && fin(beta_plus),
                    "DoubleGammaOUBM: beta_plus must be >= 0",
                )?;
                check(
                    beta_minus >= z && fin(beta_minus),
                    "DoubleGammaOUBM: beta_minus must be >= 0",
                )
            }
            Component::Cir { lambda, theta, eta, x0 } => {
                check(lambda > z && fin(lambda), "CIR: lambda must be > 0")?;
                check(theta >= z && fin(theta), "CIR: theta must be >= 0")?;
                check(eta > z && fin(eta), "CIR: eta must be > 0")?;
                check(x0 >= z && fin(x0), "CIR: x0 must be >= 0")
            }
            Component::CirJump {
                lambda,
                theta,
                eta,
                alpha,
                beta,
                x0,
            } => {
                check(lambda > z && fin(lambda), "CIRJump: lambda must be > 0")?;
                check(theta >= z && fin(theta), "CIRJump: theta must be >= 0")?;
                check(eta > z && fin(eta), "CIRJump: eta must be > 0")?;
                check(alpha > z && fin(alpha), "CIRJump: alpha must be > 0")?;
                check(beta >= z && fin(beta), "CIRJump: beta must be >= 0")?;
                check(x0 >= z && fin(x0), "CIRJump: x0 must be >= 0")
            }
        }
    }

    /// Open interval of admissible real parts at horizon `t`.
    pub fn domain(&self, t: T) -> (T, T) {
        let inf = T::infinity();
        match *self {
            Component::BrownianDrift { .. } | Component::GaussOu { .. } => (-inf, inf),
            Component::DoubleGammaOuBm {
                alpha_plus,
                alpha_minus,
                ..
            } => {
                if t > T::zero() {
                    (-alpha_minus, alpha_plus)
                } else {
                    (-inf, inf)
                }
            }
            Component::Cir { lambda, eta, .. } => {
                if t > T::zero() {
                    let (_, om) = decay(lambda, t);
                    (-inf, lambda / (T::c(2.0) * eta * eta * om))
                } else {
                    (-inf, inf)
                }
            }
            Component::CirJump { lambda, eta, alpha, .. } => {
                if t > T::zero() {
                    let (_, om) = decay(lambda, t);
                    let two_eta2 = T::c(2.0) * eta * eta;
                    let cir = lambda / (two_eta2 * om);
                    let w = T::one() - om * (lambda - two_eta2 * alpha) / lambda;
                    (-inf, cir.min(alpha / w).min(alpha))
                } else {
                    (-inf, inf)
                }
            }
        }
    }

    /// Interval on which the generator functions `F`, `R` are finite.
    pub fn generator_domain(&self) -> (T, T) {
        let inf = T::infinity();
        match *self {
            Component::DoubleGammaOuBm {
                alpha_plus,
                alpha_minus,
                ..
            } => (-alpha_minus, alpha_plus),
            Component::CirJump { alpha, .. } => (-inf, alpha),
            _ => (-inf, inf),
        }
    }

    /// Closed-form `(φ_t(u), ψ_t(u))`.
    pub fn phi_psi(&self, t: T, u: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        let (lo, hi) = self.domain(t);
        if !(u.re > lo && u.re < hi) || !u.re.is_finite() || !u.im.is_finite() {
            return Err(RatesError::Domain(format!(
                "{}: Re(u) = {} outside ({}, {}) at t = {}",
                self.name(),
                u.re,
                lo,
                hi,
                t
            )));
        }
        if t == T::zero() {
            return Ok((Complex::new(T::zero(), T::zero()), u));
        }
        let two = T::c(2.0);
        Ok(match *self {
            Component::BrownianDrift { sigma, mu, .. } => {
                let phi = (u * u * (sigma * sigma / two) + u * mu) * t;
                (phi, u)
            }
            Component::GaussOu {
                lambda, theta, sigma, ..
            } => {
                let (e, om) = decay(lambda, t);
                (ou_phi(lambda, theta, sigma, t, om, u), u * e)
            }
            Component::DoubleGammaOuBm {
                lambda,
                theta,
                sigma,
                alpha_plus,
                alpha_minus,
                beta_plus,
                beta_minus,
                ..
            } => {
                let (e, om) = decay(lambda, t);
                let mut phi = ou_phi(lambda, theta, sigma, t, om, u);
                if beta_plus > T::zero() {
                    let a = cx(alpha_plus);
                    phi = phi + ((a - u * e).ln() - (a - u).ln()) * beta_plus;
                }
                if beta_minus > T::zero() {
                    let a = cx(alpha_minus);
                    phi = phi + ((a + u * e).ln() - (a + u).ln()) * beta_minus;
                }
                (phi, u * e)
            }
            Component::Cir { lambda, theta, eta, .. } => cir_phi_psi(lambda, theta, eta, t, u),
            Component::CirJump {
                lambda,
                theta,
                eta,
                alpha,
                beta,
                ..
            } => {
                let (phi, psi) = cir_phi_psi(lambda, theta, eta, t, u);
                if beta == T::zero() {
                    return Ok((phi, psi));
                }
                let (_, om) = decay(lambda, t);
                let eps = lambda - two * eta * eta * alpha;
                let d0 = cx(alpha) - u;
                let g = u * om / (d0 * lambda);
                let y = g * eps;
                let jump = if y.norm() < T::c(1e-4) {
                    let third = T::one() / T::c(3.0);
                    g * (cx(T::one()) - y / two + y * y * third - y * y * y / T::c(4.0)) * (lambda * beta)
                } else {
                    let d1 = d0 + u * (om * eps / lambda);
                    (d1.ln() - d0.ln()) * (lambda * beta / eps)
                };
                (phi + jump, psi)
            }
        })
    }

    /// Generator functions `(F(w), R(w))` at a real exponent.
    pub fn generator(&self, w: T) -> Result<(T, T)> {
        let (lo, hi) = self.generator_domain();
        if !(w > lo && w < hi) || !w.is_finite() {
            return Err(RatesError::Domain(format!(
                "{}: generator undefined at {}",
                self.name(),
                w
            )));
        }
        let half = T::c(0.5);
        Ok(match *self {
            Component::BrownianDrift { sigma, mu, .. } => (half * sigma * sigma * w * w + mu * w, T::zero()),
            Component::GaussOu {
                lambda, theta, sigma, ..
            } => (half * sigma * sigma * w * w + lambda * theta * w, -lambda * w),
            Component::DoubleGammaOuBm {
                lambda,
                theta,
                sigma,
                alpha_plus,
                alpha_minus,
                beta_plus,
                beta_minus,
                ..
            } => {
                let f = half * sigma * sigma * w * w + lambda * theta * w + lambda * beta_plus * w / (alpha_plus - w)
                    - lambda * beta_minus * w / (alpha_minus + w);
                (f, -lambda * w)
            }
            Component::Cir { lambda, theta, eta, .. } => {
                (lambda * theta * w, -lambda * w + T::c(2.0) * eta * eta * w * w)
            }
            Component::CirJump {
                lambda,
                theta,
                eta,
                alpha,
                beta,
                ..
            } => (
                lambda * theta * w + lambda * beta * w / (alpha - w),
                -lambda * w + T::c(2.0) * eta * eta * w * w,
            ),
        })
    }

    /// Point mass of `X_t` given `X_0 = x`: `(probability, location)` when present.
    pub fn atom(&self, t: T, x: T) -> Option<(T, T)> {
        match *self {
            Component::BrownianDrift { sigma, mu, .. } if sigma == T::zero() => Some((T::one(), x + mu * t)),
            Component::GaussOu {
                lambda, theta, sigma, ..
            } if sigma == T::zero() => Some((T::one(), theta + (x - theta) * (-lambda * t).exp())),
            Component::DoubleGammaOuBm {
                lambda,
                theta,
                sigma,
                beta_plus,
                beta_minus,
                ..
            } if sigma == T::zero() => {
                let p = (-lambda * (beta_plus + beta_minus) * t).exp();
                Some((p, theta + (x - theta) * (-lambda * t).exp()))
            }
            _ => None,
        }
    }
}

fn ou_phi<T: Real>(lambda: T, theta: T, sigma: T, t: T, om: T, u: Complex<T>) -> Complex<T> {
    let om2 = -(-T::c(2.0) * lambda * t).exp_m1();
    u * u * (sigma * sigma * om2 / (T::c(4.0) * lambda)) + u * (theta * om)
}

fn cir_phi_psi<T: Real>(lambda: T, theta: T, eta: T, t: T, u: Complex<T>) -> (Complex<T>, Complex<T>) {
    let (e, om) = decay(lambda, t);
    let two_eta2 = T::c(2.0) * eta * eta;
    let c = two_eta2 * om / lambda;
    let d = cx(T::one()) - u * c;
    let phi = -d.ln() * (lambda * theta / two_eta2);
    (phi, u * e / d)
}
