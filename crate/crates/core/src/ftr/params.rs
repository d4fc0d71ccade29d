use crate::error::{invalid, Result};

/// Fluctuating two-ray fading parameters of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtrParams {
    m: f64,
    k: f64,
    delta: f64,
    sigma: f64,
}

impl FtrParams {
    /// `m` Gamma shape of the specular fluctuation, `k` specular-to-diffuse power
    /// ratio, `delta` specular amplitude similarity, `sigma` diffuse component std.
    pub fn new(m: f64, k: f64, delta: f64, sigma: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid("m", format!("{m}; must be > 0")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(invalid("k", format!("{k}; must be >= 0")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(invalid("delta", format!("{delta}; must lie in [0, 1]")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("{sigma}; must be > 0")));
        }
        Ok(Self { m, k, delta, sigma })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// 2σ², the mean power of the diffuse part.
    pub fn diffuse_power(&self) -> f64 {
        2.0 * self.sigma * self.sigma
    }

    /// E[h] = 2σ²(1+K).
    pub fn mean_power(&self) -> f64 {
        self.diffuse_power() * (1.0 + self.k)
    }

    /// Specular amplitudes (V₁, V₂) with V₁² + V₂² = 2σ²K and 2V₁V₂/(V₁²+V₂²) = Δ.
    pub fn specular_amplitudes(&self) -> (f64, f64) {
        let root = (1.0 - self.delta * self.delta).sqrt();
        let v1 = self.sigma * (self.k * (1.0 + root)).sqrt();
        let v2 = self.sigma * (self.k * (1.0 - root)).max(0.0).sqrt();
        (v1, v2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FtrParams::new(1.0, 0.0, 0.0, 1.0).is_ok());
        assert!(FtrParams::new(0.0, 1.0, 0.5, 1.0).is_err());
        assert!(FtrParams::new(1.0, -1.0, 0.5, 1.0).is_err());
        assert!(FtrParams::new(1.0, 1.0, 1.01, 1.0).is_err());
        assert!(FtrParams::new(1.0, 1.0, 0.5, 0.0).is_err());
        assert!(FtrParams::new(f64::NAN, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn amplitudes_reproduce_k_and_delta() {
        let p = FtrParams::new(3.0, 7.0, 0.35, 0.4).unwrap();
        let (v1, v2) = p.specular_amplitudes();
        let power = v1 * v1 + v2 * v2;
        assert!((power - 2.0 * 0.16 * 7.0).abs() < 1e-12);
        assert!((2.0 * v1 * v2 / power - 0.35).abs() < 1e-12);
        let p = FtrParams::new(3.0, 7.0, 1.0, 0.4).unwrap();
        let (v1, v2) = p.specular_amplitudes();
        assert!((v1 - v2).abs() < 1e-12);
        let p = FtrParams::new(3.0, 7.0, 0.0, 0.4).unwrap();
        assert_eq!(p.specular_amplitudes().1, 0.0);
    }
}
