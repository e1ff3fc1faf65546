// SPDX-License-Identifier: Apache-2.0

//! Spherical Bessel functions of orders 0, 2 and 4 and the spherical Hankel
//! function of the second kind, h_n^(2)(x) = j_n(x) - i y_n(x).
//!
//! Only the three even orders entering the multipole kernels are provided,
//! each by its explicit trigonometric-rational closed form. For x < 2.5 the
//! closed forms of j_2 and j_4 cancel badly, so there j_n is summed
//! from its ascending series instead; y_n has no such cancellation.

use num_complex::Complex64;

use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 2.5;

fn check_order(order: u32) -> Result<()> {
    match order {
        0 | 2 | 4 => Ok(()),
        _ => Err(Error::Domain(format!(
            "spherical Bessel order {order} not available (supported: 0, 2, 4)"
        ))),
    }
}

fn check_argument(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "spherical Bessel argument must be positive and finite, got {x}"
        )))
    }
}

/// Ascending series for j_n, accurate for small x.
fn j_series(order: u32, x: f64) -> f64 {
    let n = order as f64;
    let mut double_factorial = 1.0;
    for m in 1..=order {
        double_factorial *= (2 * m + 1) as f64;
    }
    let z = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let k = k as f64;
        term *= z / (k * (2.0 * n + 2.0 * k + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    x.powi(order as i32) / double_factorial * sum
}

fn j_closed(order: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    match order {
        0 => s / x,
        2 => {
            let x2 = x * x;
            (3.0 / (x2 * x) - 1.0 / x) * s - 3.0 * c / x2
        }
        _ => {
            let x2 = x * x;
            let x3 = x2 * x;
            (105.0 / (x3 * x2) - 45.0 / x3 + 1.0 / x) * s - (105.0 / (x2 * x2) - 10.0 / x2) * c
        }
    }
}

fn y_closed(order: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    match order {
        0 => -c / x,
        2 => {
            let x2 = x * x;
            -(3.0 / (x2 * x) - 1.0 / x) * c - 3.0 * s / x2
        }
        _ => {
            let x2 = x * x;
            let x3 = x2 * x;
            -(105.0 / (x3 * x2) - 45.0 / x3 + 1.0 / x) * c - (105.0 / (x2 * x2) - 10.0 / x2) * s
        }
    }
}

/// Spherical Bessel function of the first kind, j_n(x), for n in {0, 2, 4}.
pub fn spherical_j(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    check_argument(x)?;
    if order > 0 && x < SERIES_CUTOFF {
        Ok(j_series(order, x))
    } else {
        Ok(j_closed(order, x))
    }
}

/// Spherical Bessel function of the second kind, y_n(x), for n in {0, 2, 4}.
pub fn spherical_y(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    check_argument(x)?;
    Ok(y_closed(order, x))
}

/// Spherical Hankel function of the second kind, h_n^(2)(x) = j_n(x) - i y_n(x).
pub fn hankel2(order: u32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(spherical_j(order, x)?, -spherical_y(order, x)?))
}
