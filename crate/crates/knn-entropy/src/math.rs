//! Scalar special functions, closed-form entropies, and fitting utilities.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The Euler-Mascheroni constant; `digamma(1) == -EULER_MASCHERONI`.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Digamma function `psi(x)` for `x > 0`, absolute error below 1e-12.
///
/// Uses the recurrence `psi(x+1) = psi(x) + 1/x` to shift the argument above
/// 10, then an asymptotic series with 8 Bernoulli terms.
pub fn digamma(x: f64) -> Result<f64> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum_{n>=1} B_{2n} / (2n x^{2n})
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2
                                                * (691.0 / 32760.0
                                                    - inv2
                                                        * (1.0 / 12.0
                                                            - inv2 * 3617.0 / 8160.0)))))));
    Ok(shift + x.ln() - 0.5 * inv - series)
}

/// Determinant of the `d x d` tridiagonal Toeplitz matrix with unit diagonal
/// and `r` on the first off-diagonals, via the two-term recurrence
/// `det_d = det_{d-1} - r^2 det_{d-2}`.
pub fn tridiag_det(d: usize, r: f64) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    let r2 = r * r;
    let (mut prev, mut cur) = (1.0, 1.0);
    for _ in 2..=d {
        let next = cur - r2 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Entropy in nats of `N(0, Sigma_d)` where `Sigma_d` is the tridiagonal
/// banded covariance with unit diagonal and band `r`:
/// `d/2 + (d/2) log 2 pi + (1/2) log det`.
pub fn gaussian_entropy(d: usize, r: f64) -> Result<f64> {
    let det = tridiag_det(d, r);
    if det <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "covariance determinant {det} is not positive for d = {d}, r = {r}"
        )));
    }
    // Grouped so that independent coordinates (det = 1) add exactly.
    let per_dim = 0.5 * (1.0 + (2.0 * PI).ln());
    Ok(d as f64 * per_dim + 0.5 * det.ln())
}

/// Poisson lower tail `P(X < k) = sum_{j=0}^{k-1} e^{-lambda} lambda^j / j!`,
/// which is also the survival function of a Gamma(k, 1) variable at `lambda`.
pub fn gamma_tail(k: usize, lambda: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Arity("gamma_tail requires k >= 1".into()));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "gamma_tail requires lambda >= 0, got {lambda}"
        )));
    }
    let mut term = (-lambda).exp();
    let mut sum = term;
    for j in 1..k {
        term *= lambda / j as f64;
        sum += term;
    }
    Ok(sum.min(1.0))
}

/// A fitted line `y = slope * x + intercept` in transformed coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares on `(log x, log y)`.
///
/// Requires at least two points, strictly positive coordinates, and distinct
/// x values.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::Arity(format!(
            "loglog_fit requires at least 2 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!(
                "loglog_fit requires strictly positive coordinates, got ({x}, {y})"
            )));
        }
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain(
            "loglog_fit requires distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Parameters of the density regularity assumption: Hölder exponent `alpha`
/// in (0, 1] and norm bound `c_f`. Inputs to rate statements, never checked
/// against data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderProfile {
    pub alpha: f64,
    pub c_f: f64,
}

impl HolderProfile {
    pub fn new(alpha: f64, c_f: f64) -> Result<Self> {
        if alpha <= 0.0 || alpha > 1.0 || alpha.is_nan() {
            return Err(Error::Domain(format!(
                "Hölder exponent must lie in (0, 1], got {alpha}"
            )));
        }
        if c_f <= 0.0 || c_f.is_nan() {
            return Err(Error::Domain(format!(
                "Hölder norm bound must be positive, got {c_f}"
            )));
        }
        Ok(Self { alpha, c_f })
    }
}

/// Moment order `r_mom > 0` such that `E ||X||^(d + r_mom)` is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentProfile {
    pub r_mom: f64,
}

impl MomentProfile {
    pub fn new(r_mom: f64) -> Result<Self> {
        if r_mom <= 0.0 || r_mom.is_nan() {
            return Err(Error::Domain(format!(
                "moment order must be positive, got {r_mom}"
            )));
        }
        Ok(Self { r_mom })
    }
}

/// Mixing-rate parameters: `psi(z) <= k_mix / (1 + |z|^(1 + eps))` with
/// `l_mix` an upper bound on `sum_z psi(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingProfile {
    pub k_mix: f64,
    pub eps: f64,
    pub l_mix: f64,
}

impl MixingProfile {
    pub fn new(k_mix: f64, eps: f64, l_mix: f64) -> Result<Self> {
        if eps <= 0.0 || eps.is_nan() {
            return Err(Error::Domain(format!(
                "mixing decay exponent must be positive, got {eps}"
            )));
        }
        if k_mix < 0.0 || l_mix < 0.0 {
            return Err(Error::Domain(format!(
                "mixing constants must be nonnegative, got K = {k_mix}, L = {l_mix}"
            )));
        }
        Ok(Self { k_mix, eps, l_mix })
    }

    /// Profile with `l_mix` derived by summing the envelope
    /// `k_mix / (1 + |z|^(1 + eps))` over all integer lags. Lags beyond 10^5
    /// are covered by the integral bound `k_mix z^(-eps) / eps`, a slight
    /// overestimate, which keeps `l_mix` a valid upper bound.
    pub fn with_derived_l(k_mix: f64, eps: f64) -> Result<Self> {
        let mut probe = Self::new(k_mix, eps, 0.0)?;
        let mut l = k_mix; // lag 0
        let mut z = 1.0f64;
        while z <= 1e5 {
            l += 2.0 * k_mix / (1.0 + z.powf(1.0 + eps));
            z += 1.0;
        }
        l += 2.0 * k_mix * z.powf(-eps) / eps;
        probe.l_mix = l;
        Ok(probe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digamma_known_values() {
        // psi(1) = -gamma, psi(2) = 1 - gamma.
        assert!((digamma(1.0).unwrap() + EULER_MASCHERONI).abs() < 1e-13);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_MASCHERONI)).abs() < 1e-13);
        // Reference values from a 50-term series at x + 30 shifted down by
        // the recurrence, evaluated in 50-digit arithmetic.
        let cases = [
            (10.0, 2.2517525890667211076),
            (0.5, -1.9635100260214234794),
            (3.25, 1.0169909110681790364),
            (42.0, 3.7257176179372821503),
        ];
        for (x, want) in cases {
            let got = digamma(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-12,
                "digamma({x}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn digamma_rejects_nonpositive() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-3.0).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn tridiag_det_small_cases() {
        assert_eq!(tridiag_det(1, 0.25), 1.0);
        assert_eq!(tridiag_det(2, 0.25), 0.9375);
        // Direct 3x3 expansion: 1*(1 - r^2) - r*(r - 0) = 1 - 2 r^2.
        assert!((tridiag_det(3, 0.25) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn gaussian_entropy_values() {
        let h1 = gaussian_entropy(1, 0.9).unwrap();
        assert!((h1 - 1.4189385332046727).abs() < 1e-14);
        assert!((gaussian_entropy(3, 0.0).unwrap() - 4.2568155996140182).abs() < 1e-14);
        let h2 = gaussian_entropy(2, 0.25).unwrap();
        assert!((h2 - 2.8056078058405599).abs() < 1e-14);
    }

    #[test]
    fn gaussian_entropy_additivity_is_exact() {
        let h1 = gaussian_entropy(1, 0.0).unwrap();
        for d in 1..=10 {
            assert_eq!(gaussian_entropy(d, 0.0).unwrap(), d as f64 * h1);
        }
    }

    #[test]
    fn gaussian_entropy_rejects_nonpositive_determinant() {
        // r = 0.8 makes Sigma_d lose positive definiteness by d = 3.
        assert!(gaussian_entropy(3, 0.8).is_err());
    }

    #[test]
    fn gamma_tail_values() {
        assert_eq!(gamma_tail(1, 0.0).unwrap(), 1.0);
        assert!((gamma_tail(1, 1.0).unwrap() - 0.3678794411714423).abs() < 1e-15);
        // e^{-2} (1 + 2 + 2) = 5 e^{-2}
        assert!((gamma_tail(3, 2.0).unwrap() - 0.6766764161830635).abs() < 1e-15);
        assert!(gamma_tail(0, 1.0).is_err());
        assert!(gamma_tail(1, -0.5).is_err());
    }

    #[test]
    fn loglog_fit_hand_cases() {
        let fit = loglog_fit(&[(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);

        let fit = loglog_fit(&[(1.0, 3.0), (10.0, 3.0)]).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);

        let fit = loglog_fit(&[(2.0, 0.5), (8.0, 0.125)]).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn loglog_fit_error_paths() {
        assert!(matches!(
            loglog_fit(&[(1.0, 1.0)]),
            Err(Error::Arity(_))
        ));
        assert!(matches!(
            loglog_fit(&[(1.0, 1.0), (-2.0, 4.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            loglog_fit(&[(2.0, 1.0), (2.0, 4.0)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn profile_validation() {
        assert!(HolderProfile::new(1.0, 2.0).is_ok());
        assert!(HolderProfile::new(0.0, 2.0).is_err());
        assert!(HolderProfile::new(1.1, 2.0).is_err());
        assert!(MomentProfile::new(0.0).is_err());
        assert!(MixingProfile::new(0.0, 0.0, 0.0).is_err());
        assert!(MixingProfile::new(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn derived_l_bounds_the_envelope_sum() {
        // eps = 1: sum_z k / (1 + |z|^2) = k (1 + 2 sum_{z>=1} 1/(1+z^2)),
        // and sum_{z>=1} 1/(1+z^2) = (pi coth(pi) - 1)/2 = 1.07667...
        let m = MixingProfile::with_derived_l(1.0, 1.0).unwrap();
        let want = 1.0 + 2.0 * 1.0766740474685812;
        assert!(
            (m.l_mix - want).abs() < 1e-6,
            "derived L = {}, want about {want}",
            m.l_mix
        );
    }

    proptest! {
        // psi(x + 1) - psi(x) = 1/x
        #[test]
        fn digamma_recurrence(x in 1e-3f64..100.0) {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            prop_assert!((lhs - 1.0 / x).abs() <= 1e-12 * (1.0 / x).max(1.0));
        }

        // Nonincreasing in lambda, nondecreasing in k, always within [0, 1].
        #[test]
        fn gamma_tail_monotonicity(k in 1usize..20, lambda in 0.0f64..50.0, bump in 0.0f64..10.0) {
            let base = gamma_tail(k, lambda).unwrap();
            prop_assert!((0.0..=1.0).contains(&base));
            prop_assert!(gamma_tail(k, lambda + bump).unwrap() <= base + 1e-15);
            prop_assert!(gamma_tail(k + 1, lambda).unwrap() >= base - 1e-15);
        }

        // Recovers (a, b) from exact power-law data y = e^b x^a.
        #[test]
        fn loglog_fit_recovers_power_law(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let points: Vec<(f64, f64)> = [1.0f64, 2.5, 7.0, 31.0]
                .iter()
                .map(|&x| (x, (b + a * x.ln()).exp()))
                .collect();
            let fit = loglog_fit(&points).unwrap();
            prop_assert!((fit.slope - a).abs() <= 1e-12);
            prop_assert!((fit.intercept - b).abs() <= 1e-12);
        }
    }
}
