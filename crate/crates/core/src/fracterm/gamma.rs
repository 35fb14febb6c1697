use std::f64::consts::PI;

use super::FracError;

const LANCZOS_G: f64 = 7.0;

// g = 7, n = 9 (the GSL / Numerical Recipes coefficient set).
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| {
            acc + c / (z + (i + 1) as f64)
        })
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Γ(x) by the Lanczos approximation, with reflection below 1/2.
pub fn gamma(x: f64) -> Result<f64, FracError> {
    if x.is_nan() || is_pole(x) {
        return Err(FracError::Pole(x));
    }
    if x.fract() == 0.0 && x <= 30.0 {
        // exact for the factorials representable in f64
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * f64::from(k)));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    // w^(z+1/2) split in two halves to postpone overflow.
    let half = w.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * ((-w).exp() * half) * lanczos_sum(z))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, FracError> {
    if x.is_nan() || x <= 0.0 {
        return Err(FracError::Pole(x));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * w.ln() - w + lanczos_sum(z).ln())
}

/// Γ(a) / Γ(b) for positive arguments, through logarithms once either
/// factor would overflow.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64, FracError> {
    if a < 160.0 && b < 160.0 {
        Ok(gamma(a)? / gamma(b)?)
    } else {
        Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
    }
}
