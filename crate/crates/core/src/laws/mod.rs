//! Analytic spacing laws of the cyclic ensemble.
//!
//! | kind      | variable        | density                                                   |
//! |-----------|-----------------|-----------------------------------------------------------|
//! | `CcRaw`   | `S` (pair)      | `√(2A/π) exp(-A S²/2)`                                    |
//! | `CcNorm`  | `z = S / S̄`     | `(2/π) exp(-z²/π)`                                        |
//! | `RcRaw`   | `S` (real-cplx) | `(4A/√3) S exp(-(4A/3) S²) I0((2A/3) S²)`                 |
//! | `RcNorm`  | `z = S / S̄`     | `(3√3π/16) c² z exp(-(3π/16) c² z²) I0((3π/32) c² z²)`    |
//! | `Wigner`  | `s = S / S̄`     | `(π s/2) exp(-π s²/4)`                                    |
//!
//! `c = ₂F₁(3/4, 5/4; 1; 1/4)`. CDFs are tabulated once at construction by
//! adaptive quadrature and refined between nodes with one Kronrod panel.

pub mod quadrature;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use quadrature::{gauss_kronrod_15, integrate, Quadrature};
use special::{bessel_i0e, hyp2f1_c_constant};

pub use special::{bessel_i0, hyp2f1, hyp2f1_partial_sums};

const TABLE_PANELS: usize = 400;
const QUAD_ABS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    CcRaw,
    CcNorm,
    RcRaw,
    RcNorm,
    Wigner,
}

impl LawKind {
    pub const ALL: [LawKind; 5] = [
        LawKind::CcRaw,
        LawKind::CcNorm,
        LawKind::RcRaw,
        LawKind::RcNorm,
        LawKind::Wigner,
    ];

    pub fn is_normalized(self) -> bool {
        !matches!(self, LawKind::CcRaw | LawKind::RcRaw)
    }

    pub fn name(self) -> &'static str {
        match self {
            LawKind::CcRaw => "cc_raw",
            LawKind::CcNorm => "cc_norm",
            LawKind::RcRaw => "rc_raw",
            LawKind::RcNorm => "rc_norm",
            LawKind::Wigner => "wigner",
        }
    }
}

pub fn hyp2f1_c<T: Real>() -> T {
    hyp2f1_c_constant()
}

/// Mean real-complex spacing `(3/8) √(π/A) c`.
pub fn mean_spacing_rc<T: Real>(a: T) -> Result<T> {
    check_scale(a)?;
    Ok(T::lit(0.375) * (T::PI() / a).sqrt() * hyp2f1_c::<T>())
}

/// Mean conjugate-pair spacing `√(2/(πA))` (half-normal mean).
pub fn mean_spacing_cc<T: Real>(a: T) -> Result<T> {
    check_scale(a)?;
    Ok((T::lit(2.0) / (T::PI() * a)).sqrt())
}

fn check_scale<T: Real>(a: T) -> Result<()> {
    if a > T::zero() && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("scale A must be positive, got {a}")))
    }
}

fn check_argument<T: Real>(x: T) -> Result<()> {
    if x >= T::zero() {
        Ok(())
    } else {
        Err(Error::domain(format!("spacing must be nonnegative, got {x}")))
    }
}

/// Closed-form density of `kind` at `x`; `a` is ignored by normalized laws.
pub fn law_density<T: Real>(kind: LawKind, a: T, x: T) -> Result<T> {
    check_argument(x)?;
    if !kind.is_normalized() {
        check_scale(a)?;
    }
    let two = T::lit(2.0);
    let pi = T::PI();
    let sqrt3 = T::lit(3.0).sqrt();
    Ok(match kind {
        LawKind::CcRaw => (two * a / pi).sqrt() * (-a * x * x / two).exp(),
        LawKind::CcNorm => two / pi * (-x * x / pi).exp(),
        LawKind::RcRaw => {
            // exp(-(4A/3)S²) I0((2A/3)S²) = exp(-(2A/3)S²) · e^{-u} I0(u)
            let u = two * a * x * x / T::lit(3.0);
            T::lit(4.0) * a / sqrt3 * x * (-u).exp() * bessel_i0e(u)?
        }
        LawKind::RcNorm => {
            let c2 = hyp2f1_c::<T>().powi(2);
            let u = T::lit(3.0) * pi / T::lit(32.0) * c2 * x * x;
            T::lit(3.0) * sqrt3 * pi / T::lit(16.0) * c2 * x * (-u).exp() * bessel_i0e(u)?
        }
        LawKind::Wigner => pi * x / two * (-pi * x * x / T::lit(4.0)).exp(),
    })
}

/// The real-complex density with the exponent taken literally as
/// `exp(-(4/3) S²)`, independent of `A`. Not normalizable for `A >= 2`;
/// kept only to compare the two readings against simulated data.
pub fn rc_raw_density_literal_exponent<T: Real>(a: T, x: T) -> Result<T> {
    check_argument(x)?;
    check_scale(a)?;
    let three = T::lit(3.0);
    let u = T::lit(2.0) * a * x * x / three;
    let exponent = -T::lit(4.0) / three * x * x + u;
    Ok(T::lit(4.0) * a / three.sqrt() * x * exponent.exp() * bessel_i0e(u)?)
}

/// Cumulative integrals of a density on an equispaced grid over `[0, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable<T> {
    step: T,
    upper: T,
    cumulative: Vec<T>,
}

impl<T: Real> CdfTable<T> {
    pub fn build(density: &impl Fn(T) -> T, upper: T) -> Self {
        let step = upper / T::from_usize_lossy(TABLE_PANELS);
        let mut cumulative = Vec::with_capacity(TABLE_PANELS + 1);
        let mut acc = T::zero();
        cumulative.push(acc);
        for k in 0..TABLE_PANELS {
            let lo = step * T::from_usize_lossy(k);
            let hi = if k + 1 == TABLE_PANELS {
                upper
            } else {
                step * T::from_usize_lossy(k + 1)
            };
            acc = acc + integrate(density, lo, hi, T::lit(1e-14), T::zero()).value;
            cumulative.push(acc);
        }
        Self { step, upper, cumulative }
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn total(&self) -> T {
        *self.cumulative.last().expect("table is nonempty")
    }

    /// `∫_0^x density`, clamped to `[0, 1]`.
    pub fn eval(&self, density: &impl Fn(T) -> T, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        if x >= self.upper {
            return self.total().min(T::one());
        }
        let k = (x / self.step).floor().to_usize().unwrap_or(0).min(TABLE_PANELS - 1);
        let node = self.step * T::from_usize_lossy(k);
        let (piece, _) = gauss_kronrod_15(density, node, x);
        (self.cumulative[k] + piece).max(T::zero()).min(T::one())
    }
}

/// First point past the mode where `density < 1e-16 · peak`.
pub fn truncation_point<T: Real>(density: &impl Fn(T) -> T, typical_scale: T) -> T {
    let step = typical_scale / T::lit(64.0);
    let mut peak = T::zero();
    let mut x = T::zero();
    loop {
        let p = density(x);
        peak = peak.max(p);
        if x > T::lit(2.0) * typical_scale && p < T::lit(1e-16) * peak {
            return x;
        }
        if x > T::lit(1e3) * typical_scale {
            return x;
        }
        x = x + step;
    }
}

/// An analytic spacing law together with its tabulated CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct LawSpec<T> {
    kind: LawKind,
    scale: T,
    table: CdfTable<T>,
}

impl<T: Real> LawSpec<T> {
    /// Unit-mean law (`CcNorm`, `RcNorm` or `Wigner`).
    pub fn normalized(kind: LawKind) -> Result<Self> {
        if !kind.is_normalized() {
            return Err(Error::domain(format!("{} needs a scale A", kind.name())));
        }
        Ok(Self::build(kind, T::one()))
    }

    /// Raw law (`CcRaw` or `RcRaw`) at scale `a`.
    pub fn raw(kind: LawKind, a: T) -> Result<Self> {
        if kind.is_normalized() {
            return Err(Error::domain(format!("{} takes no scale", kind.name())));
        }
        check_scale(a)?;
        Ok(Self::build(kind, a))
    }

    /// Either constructor; `a` is ignored for normalized laws.
    pub fn new(kind: LawKind, a: T) -> Result<Self> {
        if kind.is_normalized() {
            Self::normalized(kind)
        } else {
            Self::raw(kind, a)
        }
    }

    fn build(kind: LawKind, scale: T) -> Self {
        let f = |x: T| law_density(kind, scale, x).unwrap_or(T::zero());
        let typical = analytic_mean(kind, scale);
        let upper = truncation_point(&f, typical);
        Self {
            kind,
            scale,
            table: CdfTable::build(&f, upper),
        }
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.kind.is_normalized()
    }

    /// `A` for raw laws, `None` for normalized ones.
    pub fn scale(&self) -> Option<T> {
        (!self.is_normalized()).then_some(self.scale)
    }

    pub fn upper_limit(&self) -> T {
        self.table.upper()
    }

    pub fn density(&self, x: T) -> Result<T> {
        law_density(self.kind, self.scale, x)
    }

    fn density_fn(&self) -> impl Fn(T) -> T + '_ {
        move |x| law_density(self.kind, self.scale, x).unwrap_or(T::zero())
    }

    pub fn cdf(&self, x: T) -> Result<T> {
        check_argument(x)?;
        Ok(self.table.eval(&self.density_fn(), x))
    }

    /// Inverse CDF, `p` in `[0, 1)`: Newton steps on the tabulated CDF,
    /// falling back to bisection whenever a step leaves the bracket.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p >= T::zero() && p < T::one()) {
            return Err(Error::domain(format!("probability must lie in [0, 1), got {p}")));
        }
        let f = self.density_fn();
        let (mut lo, mut hi) = (T::zero(), self.upper_limit());
        let mut x = self.analytic_mean().min(hi * T::lit(0.5));
        let tol = T::epsilon() * T::lit(16.0);
        for _ in 0..200 {
            let gap = self.table.eval(&f, x) - p;
            if gap.abs() <= tol {
                return Ok(x);
            }
            if gap < T::zero() {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= tol * hi.max(T::one()) {
                break;
            }
            let slope = f(x);
            let newton = x - gap / slope;
            x = if slope > T::zero() && newton > lo && newton < hi {
                newton
            } else {
                (lo + hi) * T::lit(0.5)
            };
        }
        Ok(x)
    }

    /// Mean implied by the closed form (1 for normalized laws).
    pub fn analytic_mean(&self) -> T {
        analytic_mean(self.kind, self.scale)
    }

    /// `∫ x^k p(x) dx` over `[0, upper]` by adaptive quadrature.
    pub fn moment(&self, k: i32) -> Quadrature<T> {
        let f = self.density_fn();
        integrate(
            |x| f(x) * x.powi(k),
            T::zero(),
            self.upper_limit(),
            T::lit(QUAD_ABS_TOL),
            T::zero(),
        )
    }

    /// Two-column `(x, p(x))` samples on `points` equispaced nodes of `[0, upper]`.
    pub fn density_table(&self, upper: T, points: usize) -> Vec<(T, T)> {
        let f = self.density_fn();
        let denom = T::from_usize_lossy(points.max(2) - 1);
        (0..points)
            .map(|i| {
                let x = upper * T::from_usize_lossy(i) / denom;
                (x, f(x))
            })
            .collect()
    }
}

fn analytic_mean<T: Real>(kind: LawKind, a: T) -> T {
    match kind {
        LawKind::CcRaw => mean_spacing_cc(a).expect("validated scale"),
        LawKind::RcRaw => mean_spacing_rc(a).expect("validated scale"),
        _ => T::one(),
    }
}
