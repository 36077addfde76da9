use serde::{Deserialize, Serialize};

/// Coupling regime of an analytic single-plaquette limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `g → 0`: harmonic well around θ = 0.
    Weak,
    /// `g → ∞`: free particle on a ring.
    Strong,
}

impl Regime {
    /// Range of `g` in which the limit is a good approximation. Advisory only.
    pub fn is_consistent_with(self, g: f64) -> bool {
        match self {
            Regime::Weak => g <= 0.05,
            Regime::Strong => g >= 20.0,
        }
    }
}

/// Analytic approximation to the `n`-th single-plaquette level.
///
/// Weak coupling expands `1 − cos θ ≈ θ²/2`, turning `H_SP` into
/// `−A∂² + Bθ²` with `A = 2g²`, `B = 1/(2g²)`, whose levels are
/// `2√(AB)(n + ½)`. Strong coupling keeps only the kinetic term; the `±k`
/// plane waves fill the sorted spectrum pairwise, giving `2g²·⌈n/2⌉²`.
pub fn asymptotic_oracle(g: f64, regime: Regime, n: usize) -> f64 {
    match regime {
        Regime::Weak => {
            let kinetic = 2.0 * g * g;
            let curvature = 1.0 / (2.0 * g * g);
            2.0 * (kinetic * curvature).sqrt() * (n as f64 + 0.5)
        }
        Regime::Strong => {
            let k = n.div_ceil(2) as f64;
            2.0 * g * g * k * k
        }
    }
}
