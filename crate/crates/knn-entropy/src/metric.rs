//! Distance functions on `R^d` and the unit-ball volumes that pair with them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Metric used for nearest-neighbor distances and ball volumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// The l2 norm; unit ball volume `pi^(d/2) / Gamma(d/2 + 1)`.
    Euclidean,
    /// The max (l-infinity) norm; unit ball volume `2^d`.
    Chebyshev,
}

impl Metric {
    /// Distance between two points of equal dimension.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        self.reduced_to_distance(self.reduced_distance(a, b))
    }

    /// Order-preserving surrogate: squared distance for euclidean, the max
    /// coordinate gap for chebyshev. Cheaper to compare than `distance` and
    /// the single source of truth for all neighbor searches, so brute-force
    /// and tree paths agree bit for bit.
    #[inline]
    pub fn reduced_distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Euclidean => {
                let mut acc = 0.0;
                for (x, y) in a.iter().zip(b) {
                    let diff = x - y;
                    acc += diff * diff;
                }
                acc
            }
            Metric::Chebyshev => {
                let mut acc = 0.0;
                for (x, y) in a.iter().zip(b) {
                    let diff = (x - y).abs();
                    if diff > acc {
                        acc = diff;
                    }
                }
                acc
            }
        }
    }

    /// Maps a reduced distance back to the metric distance.
    #[inline]
    pub fn reduced_to_distance(self, reduced: f64) -> f64 {
        match self {
            Metric::Euclidean => reduced.sqrt(),
            Metric::Chebyshev => reduced,
        }
    }

    /// Volume of the d-dimensional unit ball under this metric.
    pub fn unit_ball_volume(self, d: usize) -> f64 {
        assert!(d >= 1, "dimension must be at least 1");
        match self {
            // nu_1 = 2, nu_2 = pi, nu_d = nu_{d-2} * 2 pi / d.
            Metric::Euclidean => {
                let mut v = if d.is_multiple_of(2) { PI } else { 2.0 };
                let mut k = if d.is_multiple_of(2) { 2 } else { 1 };
                while k < d {
                    k += 2;
                    v *= 2.0 * PI / k as f64;
                }
                v
            }
            Metric::Chebyshev => (2.0f64).powi(d as i32),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => write!(f, "euclidean"),
            Metric::Chebyshev => write!(f, "chebyshev"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "chebyshev" => Ok(Metric::Chebyshev),
            other => Err(Error::Parse(format!(
                "unknown metric {other:?}; expected \"euclidean\" or \"chebyshev\""
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_ball_volumes_low_dim() {
        assert_eq!(Metric::Euclidean.unit_ball_volume(1), 2.0);
        assert_eq!(Metric::Euclidean.unit_ball_volume(2), PI);
        assert_eq!(Metric::Chebyshev.unit_ball_volume(3), 8.0);
        assert_eq!(Metric::Chebyshev.unit_ball_volume(1), 2.0);
    }

    #[test]
    #[allow(clippy::approx_constant)] // the d = 2 reference value is pi itself
    fn unit_ball_volume_matches_gamma_formula() {
        // pi^(d/2) / Gamma(d/2 + 1), evaluated with 50-digit arithmetic.
        let reference = [
            2.0,
            3.1415926535897932385,
            4.1887902047863909846,
            4.9348022005446793094,
            5.2637890139143245967,
            5.1677127800499700292,
            4.7247659703314011696,
            4.0587121264167682182,
            3.2985089027387068694,
            2.5501640398773454439,
        ];
        for (i, &want) in reference.iter().enumerate() {
            let got = Metric::Euclidean.unit_ball_volume(i + 1);
            assert!(
                (got - want).abs() <= 1e-14 * want,
                "nu_{}: got {got}, want {want}",
                i + 1
            );
        }
    }

    #[test]
    fn distance_basics() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(Metric::Euclidean.distance(&a, &b), 5.0);
        assert_eq!(Metric::Chebyshev.distance(&a, &b), 4.0);
    }

    #[test]
    fn metric_parses_round_trip() {
        for m in [Metric::Euclidean, Metric::Chebyshev] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert!("manhattan".parse::<Metric>().is_err());
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, dim)
    }

    proptest! {
        // Nonnegativity, symmetry, and the triangle inequality on random triples.
        #[test]
        fn is_a_true_metric(
            (a, b, c) in (1usize..=5).prop_flat_map(|d| (arb_point(d), arb_point(d), arb_point(d))),
        ) {
            for m in [Metric::Euclidean, Metric::Chebyshev] {
                let ab = m.distance(&a, &b);
                let ba = m.distance(&b, &a);
                let ac = m.distance(&a, &c);
                let cb = m.distance(&c, &b);
                prop_assert!(ab >= 0.0);
                prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
                prop_assert!(ab <= ac + cb + 1e-9);
            }
        }

        // Scaling every coordinate by c > 0 scales distances by c.
        #[test]
        fn scale_equivariance(
            (a, b) in (1usize..=4).prop_flat_map(|d| (arb_point(d), arb_point(d))),
            c in 0.01f64..100.0,
        ) {
            for m in [Metric::Euclidean, Metric::Chebyshev] {
                let d0 = m.distance(&a, &b);
                let sa: Vec<f64> = a.iter().map(|x| c * x).collect();
                let sb: Vec<f64> = b.iter().map(|x| c * x).collect();
                let d1 = m.distance(&sa, &sb);
                prop_assert!((d1 - c * d0).abs() <= 1e-12 * (c * d0).max(1e-300));
            }
        }
    }
}
