use serde::{Deserialize, Serialize};

use crate::error::{RatesError, Result};
use crate::real::Real;

/// Tenor dates `T_1 < … < T_N` in years; `T_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound = "T: Real")]
pub struct TenorGrid<T> {
    dates: Vec<T>,
}

impl<T: Real> TenorGrid<T> {
    pub fn new(dates: Vec<T>) -> Result<Self> {
        if dates.is_empty() {
            return Err(RatesError::InvalidParameter("empty tenor grid".into()));
        }
        let mut prev = T::zero();
        for &d in &dates {
            if !(d > prev) || !d.is_finite() {
                return Err(RatesError::InvalidParameter(
                    "tenor dates must be strictly increasing and positive".into(),
                ));
            }
            prev = d;
        }
        Ok(TenorGrid { dates })
    }

    /// `n` dates spaced `step` apart.
    pub fn regular(n: usize, step: T) -> Result<Self> {
        Self::new((1..=n).map(|k| step * T::from_usize_(k)).collect())
    }

    pub fn semiannual(n: usize) -> Result<Self> {
        Self::regular(n, T::c(0.5))
    }

    /// Number of dates `N`.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// `T_k` for `0 ≤ k ≤ N`.
    pub fn date(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            self.dates[k - 1]
        }
    }

    /// `Δ_k = T_k - T_{k-1}` for `1 ≤ k ≤ N`.
    pub fn accrual(&self, k: usize) -> T {
        self.date(k) - self.date(k - 1)
    }

    pub fn last(&self) -> T {
        self.dates[self.dates.len() - 1]
    }

    pub fn dates(&self) -> &[T] {
        &self.dates
    }
}

impl<T: Real> TryFrom<Vec<T>> for TenorGrid<T> {
    type Error = RatesError;
    fn try_from(v: Vec<T>) -> Result<Self> {
        TenorGrid::new(v)
    }
}

impl<T> From<TenorGrid<T>> for Vec<T> {
    fn from(g: TenorGrid<T>) -> Self {
        g.dates
    }
}
