use crate::real::Real;

/// Standard normal distribution function.
pub fn norm_cdf<T: Real>(x: T) -> T {
    T::c(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()
}

pub fn norm_pdf<T: Real>(x: T) -> T {
    (-(x * x) / T::c(2.0)).exp() / (T::c(2.0) * T::PI()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert!((norm_cdf(0.0_f64) - 0.5).abs() < 1e-16);
        assert!((norm_cdf(1.0_f64) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((norm_cdf(-3.0_f64) - 0.001_349_898_031_630_094_6).abs() < 1e-17);
        assert!((norm_cdf(1.0_f32) - 0.841_344_7).abs() < 1e-6);
    }
}
