//! Map between a component's free parameters and the unconstrained search space.

use std::collections::BTreeMap;

use crate::affine::{Component, ProcessDocument};
use crate::error::{RatesError, Result};

/// Hard bounds per parameter name; parameters not listed stay at their initial value.
pub type Bounds = BTreeMap<String, [f64; 2]>;

/// Free parameters of one component. Parameters with a positive lower bound are searched
/// in log space, the others linearly in units of a hundredth of their bound width.
#[derive(Debug, Clone)]
pub(crate) struct Parameterisation {
    base: ProcessDocument,
    names: Vec<String>,
    bounds: Vec<[f64; 2]>,
    log: Vec<bool>,
}

impl Parameterisation {
    pub fn new(base: &Component<f64>, bounds: &Bounds) -> Result<Self> {
        let doc = base.to_document();
        let mut names = Vec::new();
        let mut bs = Vec::new();
        for (name, &[lo, hi]) in bounds {
            let v = *doc
                .params
                .get(name)
                .ok_or_else(|| RatesError::InvalidParameter(format!("{} has no parameter '{name}'", doc.variant)))?;
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(RatesError::InvalidParameter(format!(
                    "bounds for '{name}' must satisfy lo < hi"
                )));
            }
            if !(v >= lo && v <= hi) {
                return Err(RatesError::InvalidParameter(format!(
                    "initial {name} = {v} outside [{lo}, {hi}]"
                )));
            }
            names.push(name.clone());
            bs.push([lo, hi]);
        }
        let log = bs.iter().map(|b| b[0] > 0.0).collect();
        Ok(Parameterisation {
            base: doc,
            names,
            bounds: bs,
            log,
        })
    }

    pub fn encode(&self, c: &Component<f64>) -> Vec<f64> {
        let doc = c.to_document();
        (0..self.names.len())
            .map(|i| {
                let v = doc.params[&self.names[i]];
                if self.log[i] {
                    v.ln()
                } else {
                    v / linear_unit(self.bounds[i])
                }
            })
            .collect()
    }

    /// `None` outside the bounds or for an invalid component.
    pub fn decode(&self, x: &[f64]) -> Option<Component<f64>> {
        let mut doc = self.base.clone();
        for (i, name) in self.names.iter().enumerate() {
            let [lo, hi] = self.bounds[i];
            let v = if self.log[i] {
                x[i].exp()
            } else {
                x[i] * linear_unit([lo, hi])
            };
            if !(v >= lo && v <= hi) {
                return None;
            }
            doc.params.insert(name.clone(), v);
        }
        let c = Component::from_document(&doc).ok()?;
        c.validate().ok()?;
        Some(c)
    }
}

fn linear_unit([lo, hi]: [f64; 2]) -> f64 {
    (hi - lo) / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_bounds() {
        let c = Component::CirJump {
            lambda: 0.3,
            theta: 0.02,
            eta: 0.08,
            alpha: 20.0,
            beta: 0.4,
            x0: 0.02,
        };
        let mut b = Bounds::new();
        b.insert("alpha".into(), [1.0, 100.0]);
        b.insert("theta".into(), [0.0, 1.0]);
        let p = Parameterisation::new(&c, &b).unwrap();
        let x = p.encode(&c);
        assert_eq!(x, vec![20f64.ln(), 2.0]);
        let back = p.decode(&x).unwrap().to_document();
        assert!((back.params["alpha"] - 20.0).abs() < 1e-12 && (back.params["theta"] - 0.02).abs() < 1e-15);
        assert!(p.decode(&[200f64.ln(), 2.0]).is_none());
        assert!(p.decode(&[20f64.ln(), -1.0]).is_none());
        b.insert("gamma".into(), [0.0, 1.0]);
        assert!(Parameterisation::new(&c, &b).is_err());
    }
}
