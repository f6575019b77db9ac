//! Process specifications, products of independent components, and transforms.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::component::Component;
use crate::error::{RatesError, Result};
use crate::numerics::{dopri5, OdeOptions};
use crate::real::Real;

/// A driving process on `[0, horizon]`: either a single component or a product of
/// independent components (nonnegative components first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProcessDocument", into = "ProcessDocument")]
#[serde(bound = "T: Real")]
pub struct ProcessSpec<T> {
    components: Vec<Component<T>>,
    horizon: T,
    product: bool,
}

/// `(φ, ψ)` of a possibly multi-dimensional process.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiPsi<T> {
    pub phi: Complex<T>,
    pub psi: Vec<Complex<T>>,
}

/// Per-component open intervals of admissible real parts.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentDomain<T> {
    pub intervals: Vec<(T, T)>,
}

impl<T: Real> MomentDomain<T> {
    pub fn contains(&self, re: &[T]) -> bool {
        re.len() == self.intervals.len() && re.iter().zip(&self.intervals).all(|(x, (lo, hi))| x > lo && x < hi)
    }
}

impl<T: Real> ProcessSpec<T> {
    pub fn single(component: Component<T>, horizon: T) -> Result<Self> {
        let s = ProcessSpec {
            components: vec![component],
            horizon,
            product: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// Product of independent processes; nested products are flattened.
    pub fn product(parts: Vec<ProcessSpec<T>>, horizon: T) -> Result<Self> {
        let components = parts.into_iter().flat_map(|p| p.components).collect();
        Self::from_components(components, horizon)
    }

    pub fn from_components(components: Vec<Component<T>>, horizon: T) -> Result<Self> {
        let s = ProcessSpec {
            components,
            horizon,
            product: true,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return Err(RatesError::InvalidParameter("horizon must be > 0".into()));
        }
        if self.components.is_empty() {
            return Err(RatesError::InvalidParameter("product without components".into()));
        }
        let mut seen_real = false;
        for c in &self.components {
            c.validate()?;
            if c.is_nonnegative() && seen_real {
                return Err(RatesError::InvalidParameter(
                    "nonnegative components must precede real-valued ones".into(),
                ));
            }
            seen_real |= !c.is_nonnegative();
        }
        Ok(())
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Component<T> {
        &self.components[i]
    }

    pub fn is_product(&self) -> bool {
        self.product
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn x0(&self) -> Vec<T> {
        self.components.iter().map(|c| c.x0()).collect()
    }

    /// Replaces component `i`, keeping the horizon.
    pub fn with_component(&self, i: usize, c: Component<T>) -> Result<Self> {
        let mut comps = self.components.clone();
        comps[i] = c;
        let s = ProcessSpec {
            components: comps,
            horizon: self.horizon,
            product: self.product,
        };
        s.validate()?;
        Ok(s)
    }

    fn check_time(&self, t: T) -> Result<()> {
        let slack = self.horizon * T::c(1e-12);
        if !(t >= T::zero() && t <= self.horizon + slack) {
            return Err(RatesError::InvalidTime {
                t: t.to_f64().unwrap_or(f64::NAN),
                horizon: self.horizon.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    pub fn domain(&self, t: T) -> MomentDomain<T> {
        MomentDomain {
            intervals: self.components.iter().map(|c| c.domain(t)).collect(),
        }
    }

    /// Time-uniform domain 𝒱 over `[0, horizon]`; every bound is monotone in `t`, so it
    /// is attained at the horizon.
    pub fn uniform_domain(&self) -> MomentDomain<T> {
        self.domain(self.horizon)
    }

    pub fn phi_psi(&self, t: T, u: &[Complex<T>]) -> Result<PhiPsi<T>> {
        self.check_time(t)?;
        if u.len() != self.dim() {
            return Err(RatesError::Domain(format!(
                "exponent has length {}, expected {}",
                u.len(),
                self.dim()
            )));
        }
        let mut phi = Complex::new(T::zero(), T::zero());
        let mut psi = Vec::with_capacity(u.len());
        for (c, &ui) in self.components.iter().zip(u) {
            // A zero exponent contributes nothing: φ_t(0) = ψ_t(0) = 0.
            if ui == Complex::new(T::zero(), T::zero()) {
                psi.push(ui);
                continue;
            }
            let (p, s) = c.phi_psi(t, ui)?;
            phi = phi + p;
            psi.push(s);
        }
        Ok(PhiPsi { phi, psi })
    }

    /// Scalar shortcut for one-dimensional specs.
    pub fn phi_psi_1d(&self, t: T, u: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        self.check_time(t)?;
        if self.dim() != 1 {
            return Err(RatesError::WrongSpec("one-dimensional process expected".into()));
        }
        self.components[0].phi_psi(t, u)
    }

    /// `E[exp(u·X_t) | X_s = x]`.
    pub fn mgf(&self, s: T, t: T, u: &[Complex<T>], x: &[T]) -> Result<Complex<T>> {
        if !(s <= t) {
            return Err(RatesError::InvalidTime {
                t: s.to_f64().unwrap_or(f64::NAN),
                horizon: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        self.check_time(t)?;
        let pp = self.phi_psi(t - s, u)?;
        let lin = pp
            .psi
            .iter()
            .zip(x)
            .fold(Complex::new(T::zero(), T::zero()), |a, (p, &xi)| a + p * xi);
        Ok((pp.phi + lin).exp())
    }

    /// `Var[X_t]` for a one-dimensional spec started at its `x0`, from a Richardson-extrapolated
    /// central second difference of the log-mgf.
    pub fn variance(&self, t: T) -> Result<T> {
        if self.dim() != 1 {
            return Err(RatesError::WrongSpec("variance needs a one-dimensional process".into()));
        }
        component_variance(&self.components[0], t)
    }

    /// Numerical solution of the Riccati system `φ' = Σ F_i(ψ_i)`, `ψ_i' = R_i(ψ_i)`.
    pub fn riccati_integrate(&self, t: T, u: &[T]) -> Result<(T, Vec<T>)> {
        self.check_time(t)?;
        if u.len() != self.dim() {
            return Err(RatesError::Domain("exponent length mismatch".into()));
        }
        if !self.uniform_domain().contains(u) {
            return Err(RatesError::Domain("u outside the time-uniform domain".into()));
        }
        let mut y0 = vec![T::zero()];
        y0.extend_from_slice(u);
        let comps = &self.components;
        let y = dopri5(
            |y: &[T], dy: &mut [T]| {
                let mut f = T::zero();
                for (i, c) in comps.iter().enumerate() {
                    let (fi, ri) = c.generator(y[i + 1])?;
                    f = f + fi;
                    dy[i + 1] = ri;
                }
                dy[0] = f;
                Ok(())
            },
            &y0,
            t,
            &OdeOptions::default(),
        )?;
        Ok((y[0], y[1..].to_vec()))
    }
}

/// Variance of a single component at horizon `t` from its own start value.
pub fn component_variance<T: Real>(c: &Component<T>, t: T) -> Result<T> {
    if t == T::zero() {
        return Ok(T::zero());
    }
    let (lo, hi) = c.domain(t);
    let radius = (-lo).min(hi);
    let h = T::c(1e-4) * radius.min(T::one());
    let x0 = c.x0();
    let f = |u: T| -> Result<T> {
        let (p, s) = c.phi_psi(t, Complex::new(u, T::zero()))?;
        Ok(p.re + s.re * x0)
    };
    let f0 = f(T::zero())?;
    let d2 = |h: T| -> Result<T> { Ok((f(h)? - f0 - f0 + f(-h)?) / (h * h)) };
    let coarse = d2(h)?;
    let fine = d2(h / T::c(2.0))?;
    Ok((T::c(4.0) * fine - coarse) / T::c(3.0))
}

/// JSON shape of a process spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessDocument {
    pub variant: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ProcessDocument>,
}

fn param(doc: &ProcessDocument, name: &str) -> Result<f64> {
    doc.params
        .get(name)
        .copied()
        .ok_or_else(|| RatesError::Parse(format!("{}: missing parameter '{}'", doc.variant, name)))
}

fn param_or(doc: &ProcessDocument, name: &str, default: f64) -> f64 {
    doc.params.get(name).copied().unwrap_or(default)
}

impl<T: Real> Component<T> {
    pub fn to_document(&self) -> ProcessDocument {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        let mut p = BTreeMap::new();
        match *self {
            Component::BrownianDrift { sigma, mu, x0 } => {
                p.insert("sigma".into(), f(sigma));
                p.insert("mu".into(), f(mu));
                p.insert("x0".into(), f(x0));
            }
            Component::GaussOu {
                lambda,
                theta,
                sigma,
                x0,
            } => {
                p.insert("lambda".into(), f(lambda));
                p.insert("theta".into(), f(theta));
                p.insert("sigma".into(), f(sigma));
                p.insert("x0".into(), f(x0));
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
                p.insert("lambda".into(), f(lambda));
                p.insert("theta".into(), f(theta));
                p.insert("sigma".into(), f(sigma));
                p.insert("alpha_plus".into(), f(alpha_plus));
                p.insert("alpha_minus".into(), f(alpha_minus));
                p.insert("beta_plus".into(), f(beta_plus));
                p.insert("beta_minus".into(), f(beta_minus));
                p.insert("x0".into(), f(x0));
            }
            Component::Cir { lambda, theta, eta, x0 } => {
                p.insert("lambda".into(), f(lambda));
                p.insert("theta".into(), f(theta));
                p.insert("eta".into(), f(eta));
                p.insert("x0".into(), f(x0));
            }
            Component::CirJump {
                lambda,
                theta,
                eta,
                alpha,
                beta,
                x0,
            } => {
                p.insert("lambda".into(), f(lambda));
                p.insert("theta".into(), f(theta));
                p.insert("eta".into(), f(eta));
                p.insert("alpha".into(), f(alpha));
                p.insert("beta".into(), f(beta));
                p.insert("x0".into(), f(x0));
            }
        }
        ProcessDocument {
            variant: self.name().to_string(),
            params: p,
            horizon: None,
            components: vec![],
        }
    }

    pub fn from_document(doc: &ProcessDocument) -> Result<Self> {
        let g = |name: &str| param(doc, name).map(T::c);
        let x0 = T::c(param_or(doc, "x0", 0.0));
        let c = match doc.variant.as_str() {
            "BrownianDrift" => Component::BrownianDrift {
                sigma: g("sigma")?,
                mu: T::c(param_or(doc, "mu", 0.0)),
                x0,
            },
            "GaussOU" => Component::GaussOu {
                lambda: g("lambda")?,
                theta: T::c(param_or(doc, "theta", 0.0)),
                sigma: g("sigma")?,
                x0,
            },
            "DoubleGammaOUBM" => Component::DoubleGammaOuBm {
                lambda: g("lambda")?,
                theta: T::c(param_or(doc, "theta", 0.0)),
                sigma: T::c(param_or(doc, "sigma", 0.0)),
                alpha_plus: g("alpha_plus")?,
                alpha_minus: g("alpha_minus")?,
                beta_plus: g("beta_plus")?,
                beta_minus: g("beta_minus")?,
                x0,
            },
            "CIR" => Component::Cir {
                lambda: g("lambda")?,
                theta: g("theta")?,
                eta: g("eta")?,
                x0,
            },
            "CIRJump" => Component::CirJump {
                lambda: g("lambda")?,
                theta: g("theta")?,
                eta: g("eta")?,
                alpha: g("alpha")?,
                beta: g("beta")?,
                x0,
            },
            other => return Err(RatesError::Parse(format!("unknown process variant '{other}'"))),
        };
        c.validate()?;
        Ok(c)
    }
}

impl<T: Real> From<ProcessSpec<T>> for ProcessDocument {
    fn from(s: ProcessSpec<T>) -> Self {
        let horizon = s.horizon.to_f64();
        if s.product {
            ProcessDocument {
                variant: "Product".into(),
                params: BTreeMap::new(),
                horizon,
                components: s.components.iter().map(|c| c.to_document()).collect(),
            }
        } else {
            let mut d = s.components[0].to_document();
            d.horizon = horizon;
            d
        }
    }
}

impl<T: Real> TryFrom<ProcessDocument> for ProcessSpec<T> {
    type Error = RatesError;

    fn try_from(doc: ProcessDocument) -> Result<Self> {
        let horizon = T::c(
            doc.horizon
                .ok_or_else(|| RatesError::Parse("missing 'horizon'".into()))?,
        );
        if doc.variant == "Product" {
            let mut comps = Vec::new();
            for c in &doc.components {
                if c.variant == "Product" {
                    let inner: ProcessSpec<T> = ProcessDocument {
                        horizon: Some(doc.horizon.unwrap_or(0.0)),
                        ..c.clone()
                    }
                    .try_into()?;
                    comps.extend(inner.components);
                } else {
                    comps.push(Component::from_document(c)?);
                }
            }
            ProcessSpec::from_components(comps, horizon)
        } else {
            ProcessSpec::single(Component::from_document(&doc)?, horizon)
        }
    }
}
