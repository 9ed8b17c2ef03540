//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_SEGMENTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error_estimate: T,
    pub segments: usize,
    pub converged: bool,
}

/// One 15-point Kronrod panel on `[a, b]`: `(kronrod, |kronrod - gauss|)`.
pub fn gauss_kronrod_15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let centre = (a + b) * T::lit(0.5);
    let fc = f(centre);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * T::lit(x);
        let pair = f(centre - dx) + f(centre + dx);
        kronrod = kronrod + pair * T::lit(w);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate is below `max(abs_tol, rel_tol |I|)`.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, abs_tol: T, rel_tol: T) -> Quadrature<T> {
    if a == b {
        return Quadrature {
            value: T::zero(),
            error_estimate: T::zero(),
            segments: 0,
            converged: true,
        };
    }
    let (v, e) = gauss_kronrod_15(&f, a, b);
    let mut segments = vec![(a, b, v, e)];
    loop {
        let value: T = segments.iter().map(|s| s.2).sum();
        let error: T = segments.iter().map(|s| s.3).sum();
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target || segments.len() >= MAX_SEGMENTS {
            return Quadrature {
                value,
                error_estimate: error,
                segments: segments.len(),
                converged: error <= target,
            };
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            // interval exhausted at this precision
            return Quadrature {
                value,
                error_estimate: error,
                segments: segments.len() + 1,
                converged: false,
            };
        }
        let (v1, e1) = gauss_kronrod_15(&f, lo, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        // Kronrod-15 integrates degree-22 polynomials exactly
        let (v, _) = gauss_kronrod_15(&|x: f64| x.powi(10) - 3.0 * x.powi(3), 0.0, 2.0);
        let expected = 2f64.powi(11) / 11.0 - 3.0 * 2f64.powi(4) / 4.0;
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let q = integrate(|x: f64| (-x * x).exp(), 0.0, 10.0, 1e-13, 1e-14);
        assert!(q.converged);
        assert!((q.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn integrable_kink_and_sqrt_singularity() {
        let q = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 0.0);
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-11);
        let q = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 0.0);
        assert!((q.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn empty_interval() {
        let q = integrate(|x: f64| x, 1.0, 1.0, 1e-12, 0.0);
        assert_eq!(q.value, 0.0);
    }
}
