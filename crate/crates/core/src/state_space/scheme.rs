use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plaquette::Parity;

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum ParitySector {
    Even,
    Odd,
    #[default]
    Both,
}

impl ParitySector {
    pub fn admits(self, parity: Parity) -> bool {
        match self {
            ParitySector::Even => parity == Parity::Even,
            ParitySector::Odd => parity == Parity::Odd,
            ParitySector::Both => true,
        }
    }
}

/// Occupation sector for matter models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FermionSector {
    /// Total staggered charge zero: half of the sites occupied.
    #[default]
    Neutral,
    All,
}

/// Local cut, optional global excitation cap and optional parity sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TruncationScheme {
    pub l_max: usize,
    pub n_max: Option<usize>,
    pub parity: ParitySector,
}

impl TruncationScheme {
    pub fn new(l_max: usize) -> Self {
        Self {
            l_max,
            n_max: None,
            parity: ParitySector::Both,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = Some(n_max);
        self
    }

    pub fn with_parity(mut self, parity: ParitySector) -> Self {
        self.parity = parity;
        self
    }

    pub fn levels(&self) -> usize {
        self.l_max + 1
    }

    pub fn validate(&self, n_slots: usize) -> Result<()> {
        if let Some(n) = self.n_max {
            if n > n_slots * self.l_max {
                return Err(Error::InvalidParameter(format!(
                    "n_max = {n} exceeds n_slots·l_max = {}",
                    n_slots * self.l_max
                )));
            }
        }
        if self.l_max >= u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("l_max = {} too large", self.l_max)));
        }
        Ok(())
    }

    /// `L_N(dim)`, or `L(dim)` without a global cap.
    pub fn label(&self, dim: usize) -> String {
        match self.n_max {
            Some(n) => format!("{}_{}({})", self.l_max, n, dim),
            None => format!("{}({})", self.l_max, dim),
        }
    }

    /// Label without the dimension, used as a CSV key.
    pub fn short_label(&self) -> String {
        let mut s = match self.n_max {
            Some(n) => format!("{}_{}", self.l_max, n),
            None => self.l_max.to_string(),
        };
        match self.parity {
            ParitySector::Even => s.push('e'),
            ParitySector::Odd => s.push('o'),
            ParitySector::Both => {}
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(TruncationScheme::new(6).with_n_max(8).label(86), "6_8(86)");
        assert_eq!(TruncationScheme::new(2).label(27), "2(27)");
        let s = TruncationScheme::new(7).with_n_max(6).with_parity(ParitySector::Even);
        assert_eq!(s.short_label(), "7_6e");
    }

    #[test]
    fn n_max_bound() {
        assert!(TruncationScheme::new(2).with_n_max(6).validate(3).is_ok());
        assert!(TruncationScheme::new(2).with_n_max(7).validate(3).is_err());
    }
}
