//! Cylinder functions of order 0 and 1 needed by the clamped-film
//! eigenproblem.
//!
//! `J0`/`J1` use Miller's backward recurrence normalised by
//! `J0 + 2·ΣJ2k = 1`, accurate to a few ulp of the function scale for any
//! moderate argument. `I0`/`I1` use the ascending series below
//! [`I_ASYMPTOTIC_FROM`] and the Hankel expansion above it; both are
//! also offered scaled by `exp(-x)` so the ratio `I1/I0` never overflows.

use std::f64::consts::PI;

const I_ASYMPTOTIC_FROM: f64 = 50.0;
const RESCALE_ABOVE: f64 = 1e200;

/// Returns `(J0(x), J1(x))`.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    if x < 0.0 {
        let (j0, j1) = bessel_j01(-x);
        return (j0, -j1);
    }
    if x < 1e-5 {
        let q = 0.25 * x * x;
        return (1.0 - q, 0.5 * x * (1.0 - 0.5 * q));
    }

    // J_m(x) is far below the working precision once m exceeds x by a few
    // multiples of x^(1/3).
    let start = (x + 8.0 * x.cbrt() + 30.0).ceil() as usize;
    let start = start + start % 2;

    let mut above = 0.0_f64;
    let mut current = 1e-30_f64;
    let mut norm = if start.is_multiple_of(2) { 2.0 * current } else { 0.0 };
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        let order = k - 1;
        if order == 1 {
            j1 = current;
        }
        if order == 0 {
            norm += current;
        } else if order % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            current /= RESCALE_ABOVE;
            above /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            j1 /= RESCALE_ABOVE;
        }
    }
    (current / norm, j1 / norm)
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j01(x).0
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j01(x).1
}

fn i_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    let mut k = 1.0_f64;
    loop {
        term *= q / (k * (k + order as f64));
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

fn i_asymptotic_scaled(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `exp(-|x|)·I_order(|x|)` for order 0 or 1 (odd symmetry of I1 is the
/// caller's concern).
fn i_scaled(order: u32, x: f64) -> f64 {
    let x = x.abs();
    if x >= I_ASYMPTOTIC_FROM {
        i_asymptotic_scaled(order, x)
    } else {
        i_series(order, x) * (-x).exp()
    }
}

pub fn bessel_i0(x: f64) -> f64 {
    if x.abs() >= I_ASYMPTOTIC_FROM {
        i_scaled(0, x) * x.abs().exp()
    } else {
        i_series(0, x.abs())
    }
}

pub fn bessel_i1(x: f64) -> f64 {
    let magnitude = if x.abs() >= I_ASYMPTOTIC_FROM { i_scaled(1, x) * x.abs().exp() } else { i_series(1, x.abs()) };
    magnitude.copysign(x)
}

/// `I1(x)/I0(x)` for `x ≥ 0`, finite for arbitrarily large `x`.
pub fn bessel_i1_over_i0(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    i_scaled(1, x) / i_scaled(0, x)
}
