//! The two special functions the spacing laws need: the modified Bessel
//! function `I0` and the Gauss hypergeometric series.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Below this argument `I0` is summed from its power series; above it the
/// large-argument expansion of `e^{-x} I0(x)` is used.
const SERIES_CUTOFF: f64 = 30.0;

/// `Σ_k (x²/4)^k / (k!)²`, all terms positive.
fn i0_series<T: Real>(x: T) -> T {
    let q = x * x * T::lit(0.25);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1usize;
    loop {
        let kk = T::from_usize_lossy(k);
        term = term * q / (kk * kk);
        sum = sum + term;
        if term <= sum * T::epsilon() * T::lit(0.5) {
            return sum;
        }
        k += 1;
    }
}

/// `e^{-x} I0(x) ~ (2πx)^{-1/2} Σ_k [(2k-1)!!]² / (k! (8x)^k)`, summed until
/// the terms stop shrinking or drop below machine precision.
fn i0e_asymptotic<T: Real>(x: T) -> T {
    let eight_x = T::lit(8.0) * x;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..200usize {
        let odd = T::from_usize_lossy(2 * k - 1);
        let next = term * odd * odd / (T::from_usize_lossy(k) * eight_x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= sum * T::epsilon() * T::lit(0.5) {
            break;
        }
    }
    sum / (T::TAU() * x).sqrt()
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::domain(format!("bessel_i0 needs x >= 0, got {x}")));
    }
    if x <= T::lit(SERIES_CUTOFF) {
        Ok(i0_series(x))
    } else {
        Ok(i0e_asymptotic(x) * x.exp())
    }
}

/// Exponentially scaled `e^{-x} I0(x)`, finite for every `x >= 0`.
pub fn bessel_i0e<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::domain(format!("bessel_i0e needs x >= 0, got {x}")));
    }
    if x <= T::lit(SERIES_CUTOFF) {
        Ok(i0_series(x) * (-x).exp())
    } else {
        Ok(i0e_asymptotic(x))
    }
}

/// Partial sums `Σ_{k<=m} (a)_k (b)_k / ((c)_k k!) z^k` for `m = 0..terms`.
pub fn hyp2f1_partial_sums<T: Real>(a: T, b: T, c: T, z: T, terms: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(terms);
    let mut term = T::one();
    let mut sum = T::zero();
    for k in 0..terms {
        sum = sum + term;
        out.push(sum);
        let kk = T::from_usize_lossy(k);
        term = term * (a + kk) * (b + kk) / ((c + kk) * (kk + T::one())) * z;
    }
    out
}

/// Gauss series for `₂F₁(a, b; c; z)`, `|z| < 1`.
pub fn hyp2f1<T: Real>(a: T, b: T, c: T, z: T) -> Result<T> {
    if !(z.abs() < T::one()) {
        return Err(Error::domain(format!("hypergeometric series needs |z| < 1, got {z}")));
    }
    if c <= T::zero() && c == c.floor() {
        return Err(Error::domain(format!("c = {c} is a non-positive integer")));
    }
    let mut term = T::one();
    let mut sum = T::one();
    for k in 0..10_000usize {
        let kk = T::from_usize_lossy(k);
        term = term * (a + kk) * (b + kk) / ((c + kk) * (kk + T::one())) * z;
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() * T::lit(0.25) {
            return Ok(sum);
        }
    }
    Err(Error::domain("hypergeometric series did not converge"))
}

/// `₂F₁(3/4, 5/4; 1; 1/4)`, the constant fixing the real-complex mean spacing.
pub fn hyp2f1_c_constant<T: Real>() -> T {
    hyp2f1(T::lit(0.75), T::lit(1.25), T::one(), T::lit(0.25)).expect("argument 1/4 converges")
}
