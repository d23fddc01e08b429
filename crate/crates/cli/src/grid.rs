use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Evenly spaced closed range written `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        catforge_core::phasespace::linspace(self.lo, self.hi, self.count)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("expected lo:hi:count, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count: usize = count.trim().parse().map_err(|_| format!("'{count}' is not a point count"))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if count == 0 {
            return Err("grid needs at least one point".into());
        }
        if count > 1 && lo > hi {
            return Err(format!("grid lower bound {lo} exceeds upper bound {hi}"));
        }
        Ok(Self { lo, hi, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let g: Grid = "0.5:6:12".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 12);
        assert_eq!(p[0], 0.5);
        assert_eq!(p[11], 6.0);
        let single: Grid = "0.1:0.1:1".parse().unwrap();
        assert_eq!(single.points(), vec![0.1]);
        let y: Grid = "-2:2:801".parse().unwrap();
        assert_eq!(y.points()[400], 0.0);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["1:2", "a:2:3", "1:2:0", "3:1:4", "1:2:x", "1:inf:3"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
