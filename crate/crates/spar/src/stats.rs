//! Special functions and estimators: the error function, the chi-squared
//! df=1 quantile, the Marcum Q-function of order 1/2, the eigenvector
//! inclusion probability, and the maximum-likelihood noise estimate.
//!
//! Everything here is pure and reentrant.

use std::f64::consts::SQRT_2;

use crate::data::{DataMatrix, Regressor, TargetVector};
use crate::error::{Error, Result};
use crate::spectral;

/// Rejection confidence in `[0, 1)`.
///
/// `alpha = 1` is excluded: the chi-squared quantile diverges there and the
/// projected regressor would collapse to zero along every direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..1.0).contains(&value) {
            return Err(Error::BadAlpha(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Alpha {
    /// The fixed confidence used throughout the experiments.
    fn default() -> Self {
        Alpha(0.999)
    }
}

// erf/erfc rational approximations. This is the classic Sun Microsystems
// (FreeBSD msun) evaluation also used by the Go standard library; relative
// error is within a few ulps across the whole representable range.

#[allow(clippy::excessive_precision)]
mod erf_coefficients {
    pub const ERX: f64 = 8.45062911510467529297e-01;

    pub const EFX: f64 = 1.28379167095512586316e-01;
    pub const EFX8: f64 = 1.02703333676410069053e+00;

    pub const PP0: f64 = 1.28379167095512558561e-01;
    pub const PP1: f64 = -3.25042107247001499370e-01;
    pub const PP2: f64 = -2.84817495755985104766e-02;
    pub const PP3: f64 = -5.77027029648944159157e-03;
    pub const PP4: f64 = -2.37630166566501626084e-05;
    pub const QQ1: f64 = 3.97917223959155352819e-01;
    pub const QQ2: f64 = 6.50222499887672944485e-02;
    pub const QQ3: f64 = 5.08130628187576562776e-03;
    pub const QQ4: f64 = 1.32494738004321644526e-04;
    pub const QQ5: f64 = -3.96022827877536812320e-06;

    pub const PA0: f64 = -2.36211856075265944077e-03;
    pub const PA1: f64 = 4.14856118683748331666e-01;
    pub const PA2: f64 = -3.72207876035701323847e-01;
    pub const PA3: f64 = 3.18346619901161753674e-01;
    pub const PA4: f64 = -1.10894694282396677476e-01;
    pub const PA5: f64 = 3.54783043256182359371e-02;
    pub const PA6: f64 = -2.16637559486879084300e-03;
    pub const QA1: f64 = 1.06420880400844228286e-01;
    pub const QA2: f64 = 5.40397917702171048937e-01;
    pub const QA3: f64 = 7.18286544141962662868e-02;
    pub const QA4: f64 = 1.26171219808761642112e-01;
    pub const QA5: f64 = 1.36370839120290507362e-02;
    pub const QA6: f64 = 1.19844998467991074170e-02;

    pub const RA0: f64 = -9.86494403484714822705e-03;
    pub const RA1: f64 = -6.93858572707181764372e-01;
    pub const RA2: f64 = -1.05586262253232909814e+01;
    pub const RA3: f64 = -6.23753324503260060396e+01;
    pub const RA4: f64 = -1.62396669462573470355e+02;
    pub const RA5: f64 = -1.84605092906711035994e+02;
    pub const RA6: f64 = -8.12874355063065934246e+01;
    pub const RA7: f64 = -9.81432934416914548592e+00;
    pub const SA1: f64 = 1.96512716674392571292e+01;
    pub const SA2: f64 = 1.37657754143519042600e+02;
    pub const SA3: f64 = 4.34565877475229228821e+02;
    pub const SA4: f64 = 6.45387271733267880336e+02;
    pub const SA5: f64 = 4.29008140027567833386e+02;
    pub const SA6: f64 = 1.08635005541779435134e+02;
    pub const SA7: f64 = 6.57024977031928170135e+00;
    pub const SA8: f64 = -6.04244152148580987438e-02;

    pub const RB0: f64 = -9.86494292470009928597e-03;
    pub const RB1: f64 = -7.99283237680523006574e-01;
    pub const RB2: f64 = -1.77579549177547519889e+01;
    pub const RB3: f64 = -1.60636384855821916062e+02;
    pub const RB4: f64 = -6.37566443368389627722e+02;
    pub const RB5: f64 = -1.02509513161107724954e+03;
    pub const RB6: f64 = -4.83519191608651397019e+02;
    pub const SB1: f64 = 3.03380607434824582924e+01;
    pub const SB2: f64 = 3.25792512996573918826e+02;
    pub const SB3: f64 = 1.53672958608443695994e+03;
    pub const SB4: f64 = 3.19985821950859553908e+03;
    pub const SB5: f64 = 2.55305040643316442583e+03;
    pub const SB6: f64 = 4.74528541206955367215e+02;
    pub const SB7: f64 = -2.24409524465858183362e+01;

    pub const TINY: f64 = 1.3877787807814457e-17; // 2^-56
    pub const SMALL: f64 = 3.725290298461914e-09; // 2^-28
    pub const VERY_TINY: f64 = 2.848094538889218e-306;
}

use erf_coefficients::*;

// Truncate x to pseudo-single precision for the exp(-x*x) split.
fn trunc_hi(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000)
}

/// The error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return -1.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < SMALL {
            if x < VERY_TINY {
                0.125 * (8.0 * x + EFX8 * x)
            } else {
                x + EFX * x
            }
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            x + x * (r / s)
        };
        return if sign { -temp } else { temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign { -ERX - p / q } else { ERX + p / q };
    }
    if x >= 6.0 {
        return if sign { -1.0 } else { 1.0 };
    }
    let s = 1.0 / (x * x);
    let (r, t) = if x < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2
                        + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s
                * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    let z = trunc_hi(x);
    let v = (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / t).exp();
    if sign {
        v / x - 1.0
    } else {
        1.0 - v / x
    }
}

/// The complementary error function `1 - erf(x)`, evaluated without the
/// cancellation that the naive difference would suffer for large `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign { 1.0 + ERX + p / q } else { 1.0 - ERX - p / q };
    }
    if x < 28.0 {
        let s = 1.0 / (x * x);
        let (r, t) = if x < 1.0 / 0.35 {
            (
                RA0 + s
                    * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
                1.0 + s
                    * (SA1
                        + s * (SA2
                            + s * (SA3
                                + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
            )
        } else {
            if sign && x > 6.0 {
                return 2.0;
            }
            (
                RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
                1.0 + s
                    * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
            )
        };
        let z = trunc_hi(x);
        let v = (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / t).exp();
        return if sign { 2.0 - v / x } else { v / x };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Upper tail of the standard normal law, `Pr(N(0,1) > x)`.
pub fn normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// CDF of the chi-squared distribution with one degree of freedom,
/// `erf(sqrt(x / 2))`.
pub fn chi2_df1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    erf((x / 2.0).sqrt())
}

/// Quantile of the chi-squared distribution with one degree of freedom.
///
/// Solves `erfc(s) = 1 - alpha` for `s` by bisection and returns `2 s²`.
/// Every representable `alpha < 1` keeps the root inside `[0, 10]` because
/// `erfc(10) ≈ 2.1e-45` is far below the smallest possible `1 - alpha`.
/// The result satisfies `|CDF(t) - alpha| <= 1e-10` with wide margin.
pub fn chi2_df1_inv_cdf(alpha: Alpha) -> f64 {
    let a = alpha.value();
    if a == 0.0 {
        return 0.0;
    }
    let q = 1.0 - a;
    let mut lo = 0.0f64;
    let mut hi = 10.0f64;
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if erfc(mid) > q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    2.0 * s * s
}

/// The Marcum Q-function of order 1/2: the probability that `|N(a, 1)| > b`,
/// equivalently the upper tail of the noncentral chi-squared law with one
/// degree of freedom and noncentrality `a²` evaluated at `b²`.
///
/// Computed through the exact half-order identity
/// `Q_{1/2}(a, b) = Pr(N(0,1) > b - a) + Pr(N(0,1) > b + a)`.
pub fn marcum_q_half(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::Domain(format!(
            "marcum_q_half requires a >= 0, got {a}"
        )));
    }
    if !b.is_finite() || b < 0.0 {
        return Err(Error::Domain(format!(
            "marcum_q_half requires b >= 0, got {b}"
        )));
    }
    Ok((normal_upper_tail(b - a) + normal_upper_tail(b + a)).clamp(0.0, 1.0))
}

/// Probability that a target eigenvector with the given true bias and
/// variance losses lands in the selected set at confidence `alpha`.
pub fn inclusion_probability(bias: f64, var: f64, alpha: Alpha) -> Result<f64> {
    if !bias.is_finite() || bias < 0.0 {
        return Err(Error::Domain(format!(
            "bias must be a nonnegative finite number, got {bias}"
        )));
    }
    if !var.is_finite() || var <= 0.0 {
        return Err(Error::Domain(format!(
            "variance must be positive, got {var}"
        )));
    }
    let a = (bias / var).sqrt();
    let b = chi2_df1_inv_cdf(alpha).sqrt();
    Ok((1.0 - marcum_q_half(a, b)?).clamp(0.0, 1.0))
}

/// Maximum-likelihood estimate of the training label noise variance,
/// `‖y - X w‖² / N`. The normalizer is N, not N - D.
pub fn mle_sigma2(x: &DataMatrix, y: &TargetVector, w_hat: &Regressor) -> Result<f64> {
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for {} rows",
            y.len(),
            x.n_rows()
        )));
    }
    let predicted = x.predict(w_hat)?;
    Ok(y.squared_error(&predicted)? / x.n_rows() as f64)
}

/// Convenience wrapper: fit the pseudoinverse regressor, then estimate the
/// noise variance from its residuals.
pub fn mle_sigma2_from_fit(
    x: &DataMatrix,
    y: &TargetVector,
    tol: spectral::RankTolerance,
) -> Result<f64> {
    let w = spectral::pinv_solve(x, y, tol)?;
    mle_sigma2(x, y, &w)
}
