//! Spacing observables, unit-mean normalization, histograms and the
//! Kolmogorov-Smirnov distance to an analytic law.
//!
//! Three kinds of spacing are extracted from a spectrum:
//! - `Cc`: between the two members of a conjugate pair, `2 |Im E_l|`;
//! - `Rc`: between the real eigenvalue `E_0` and a complex one;
//! - `Generic`: between two complex eigenvalues that are not conjugates.
//!
//! Spacings among real eigenvalues are never extracted.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::LawSpec;
use crate::scalar::Real;
use crate::spectral::{partner_index, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingKind {
    Cc,
    Rc,
    Generic,
}

impl SpacingKind {
    pub fn name(self) -> &'static str {
        match self {
            SpacingKind::Cc => "cc",
            SpacingKind::Rc => "rc",
            SpacingKind::Generic => "generic",
        }
    }
}

/// Which spacings a realization contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingPolicy {
    /// One uniformly chosen admissible spacing, keeping the sample i.i.d.
    #[default]
    OnePerRealization,
    /// Every admissible spacing; the values are correlated.
    All,
}

/// `|E_l - E_{N-l}|` once per conjugate pair.
pub fn extract_cc<T: Real>(spec: &Spectrum<T>) -> Vec<T> {
    spec.conjugate_pairs()
        .into_iter()
        .map(|(l, p)| (spec.eigenvalue(l) - spec.eigenvalue(p)).norm())
        .collect()
}

/// Distances between real and complex eigenvalues.
///
/// `OnePerRealization` measures `|E_0 - E_l|` for one uniformly chosen
/// complex `l`; `All` measures every (real, complex) combination.
pub fn extract_rc<T: Real>(spec: &Spectrum<T>, policy: PairingPolicy, rng: &mut impl Rng) -> Vec<T> {
    let complex = spec.complex_indices();
    if complex.is_empty() {
        return Vec::new();
    }
    match policy {
        PairingPolicy::OnePerRealization => {
            let l = complex[rng.random_range(0..complex.len())];
            vec![(spec.eigenvalue(0) - spec.eigenvalue(l)).norm()]
        }
        PairingPolicy::All => spec
            .real_indices()
            .into_iter()
            .flat_map(|r| complex.iter().map(move |&l| (r, l)))
            .map(|(r, l)| (spec.eigenvalue(r) - spec.eigenvalue(l)).norm())
            .collect(),
    }
}

/// Distances between complex eigenvalues `E_j`, `E_k` with `k ∉ {j, N - j}`.
pub fn extract_generic<T: Real>(spec: &Spectrum<T>, policy: PairingPolicy, rng: &mut impl Rng) -> Vec<T> {
    let n = spec.dimension();
    let complex = spec.complex_indices();
    if complex.len() < 4 {
        return Vec::new();
    }
    match policy {
        PairingPolicy::OnePerRealization => {
            let j = complex[rng.random_range(0..complex.len())];
            let partner = partner_index(n, j);
            let admissible: Vec<usize> = complex
                .iter()
                .copied()
                .filter(|&k| k != j && k != partner)
                .collect();
            let k = admissible[rng.random_range(0..admissible.len())];
            vec![(spec.eigenvalue(j) - spec.eigenvalue(k)).norm()]
        }
        PairingPolicy::All => {
            let mut out = Vec::new();
            for (a, &j) in complex.iter().enumerate() {
                for &k in &complex[a + 1..] {
                    if k != partner_index(n, j) {
                        out.push((spec.eigenvalue(j) - spec.eigenvalue(k)).norm());
                    }
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSample<T> {
    kind: SpacingKind,
    values: Vec<T>,
    normalized: bool,
    empirical_mean: T,
}

fn mean<T: Real>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::from_usize_lossy(values.len())
}

impl<T: Real> SpacingSample<T> {
    /// Unnormalized spacings.
    pub fn raw(kind: SpacingKind, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empty spacing sample"));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= T::zero())) {
            return Err(Error::domain(format!("spacings must be nonnegative, got {bad}")));
        }
        Ok(Self {
            kind,
            empirical_mean: mean(&values),
            values,
            normalized: false,
        })
    }

    pub fn kind(&self) -> SpacingKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Mean of the spacings before any normalization.
    pub fn empirical_mean(&self) -> T {
        self.empirical_mean
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }
}

/// Divides every spacing by the sample mean.
pub fn normalize_to_unit_mean<T: Real>(kind: SpacingKind, values: Vec<T>) -> Result<SpacingSample<T>> {
    let raw = SpacingSample::raw(kind, values)?;
    let m = raw.empirical_mean;
    if !(m > T::zero()) {
        return Err(Error::DegenerateSample(format!(
            "{} sample of {} spacings has zero mean",
            kind.name(),
            raw.len()
        )));
    }
    Ok(SpacingSample {
        kind,
        values: raw.values.into_iter().map(|v| v / m).collect(),
        normalized: true,
        empirical_mean: m,
    })
}

impl<T: Real> SpacingSample<T> {
    pub fn normalize(self) -> Result<SpacingSample<T>> {
        if self.normalized {
            return Ok(self);
        }
        normalize_to_unit_mean(self.kind, self.values)
    }
}

/// `sup_x |F_n(x) - F(x)|` evaluated on both sides of every sample point.
pub fn ks_statistic<T: Real>(values: &[T], cdf: impl Fn(T) -> T) -> Result<T> {
    if values.is_empty() {
        return Err(Error::domain("KS distance of an empty sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("spacings are not NaN"));
    let n = T::from_usize_lossy(sorted.len());
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = T::from_usize_lossy(i + 1) / n - f;
            let below = f - T::from_usize_lossy(i) / n;
            above.max(below)
        })
        .fold(T::zero(), T::max))
}

pub fn ks_distance<T: Real>(sample: &SpacingSample<T>, law: &LawSpec<T>) -> Result<T> {
    if sample.is_normalized() != law.is_normalized() {
        return Err(Error::domain(format!(
            "cannot compare a {} sample with the {} law",
            if sample.is_normalized() { "normalized" } else { "raw" },
            law.kind().name()
        )));
    }
    ks_statistic(sample.values(), |x| law.cdf(x).unwrap_or(T::zero()))
}

/// Asymptotic Kolmogorov critical value `√(-ln(α/2)/2) / √n`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub bin_edges: Vec<T>,
    pub counts: Vec<u64>,
    pub density_values: Vec<T>,
}

impl<T: Real> Histogram<T> {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> T {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn centres(&self) -> Vec<T> {
        self.bin_edges
            .windows(2)
            .map(|w| (w[0] + w[1]) * T::lit(0.5))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Binomial standard error of each density value.
    pub fn density_standard_errors(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.total() as usize);
        let w = self.bin_width();
        self.counts
            .iter()
            .map(|&c| {
                let p = T::from_usize_lossy(c as usize) / n;
                (p * (T::one() - p) / n).sqrt() / w
            })
            .collect()
    }
}

/// Equal-width bins over `[0, max (1 + 1e-9)]`, density-normalized.
pub fn build_histogram<T: Real>(sample: &SpacingSample<T>, bin_count: usize) -> Result<Histogram<T>> {
    if sample.is_empty() {
        return Err(Error::domain("histogram of an empty sample"));
    }
    if bin_count == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    let mut upper = sample.max() * (T::one() + T::lit(1e-9));
    if !(upper > T::zero()) {
        upper = T::one();
    }
    let bins = T::from_usize_lossy(bin_count);
    let width = upper / bins;
    let bin_edges: Vec<T> = (0..=bin_count)
        .map(|i| upper * T::from_usize_lossy(i) / bins)
        .collect();
    let mut counts = vec![0u64; bin_count];
    for &v in sample.values() {
        let idx = (v / width).floor().to_usize().unwrap_or(0).min(bin_count - 1);
        counts[idx] += 1;
    }
    let norm = T::from_usize_lossy(sample.len()) * width;
    let density_values = counts
        .iter()
        .map(|&c| T::from_usize_lossy(c as usize) / norm)
        .collect();
    Ok(Histogram {
        bin_edges,
        counts,
        density_values,
    })
}

/// Ordinary least-squares line `y = intercept + slope x` with the standard
/// error of the slope for per-point errors `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_standard_error: f64,
}

pub fn weighted_line_fit(xs: &[f64], ys: &[f64], sigma: &[f64]) -> Option<LinearFit> {
    if xs.len() < 2 || xs.len() != ys.len() || xs.len() != sigma.len() {
        return None;
    }
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let var: f64 = xs
        .iter()
        .zip(sigma)
        .map(|(x, s)| ((x - xbar) / sxx).powi(2) * s * s)
        .sum();
    Some(LinearFit {
        intercept: ybar - slope * xbar,
        slope,
        slope_standard_error: var.sqrt(),
    })
}

/// Least-squares slope of a line through the origin, `Σ x y / Σ x²`.
pub fn slope_through_origin(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    if xs.len() != ys.len() || sxx == 0.0 {
        return None;
    }
    Some(xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::FirstRow;
    use crate::laws::LawKind;
    use crate::spectral::eigenvalues_dft;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spectrum(a: &[f64]) -> Spectrum<f64> {
        eigenvalues_dft(&FirstRow::from_f64(a).unwrap())
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    /// `E_l` straight from the defining sum with freshly evaluated exponentials.
    fn direct_eigenvalue(a: &[f64], l: usize) -> Complex<f64> {
        let n = a.len() as f64;
        a.iter()
            .enumerate()
            .map(|(p, &ap)| {
                let theta = 2.0 * std::f64::consts::PI * (p * l) as f64 / n;
                Complex::new(theta.cos(), theta.sin()) * ap
            })
            .sum()
    }

    #[test]
    fn cc_three_by_three_closed_form() {
        let a = [0.4, -1.3, 0.9];
        let cc = extract_cc(&spectrum(&a));
        assert_eq!(cc.len(), 1);
        assert!((cc[0] - 3f64.sqrt() * (a[2] - a[1]).abs()).abs() < 1e-12);
        assert_eq!(extract_cc(&spectrum(&[0.0, 1.0, 1.0])), vec![0.0]);
    }

    #[test]
    fn cc_five_matches_imaginary_parts() {
        let a = [0.2, 1.4, -0.6, 0.3, -1.1];
        let cc = extract_cc(&spectrum(&a));
        assert_eq!(cc.len(), 2);
        for (v, l) in cc.iter().zip([1, 2]) {
            assert!((v - 2.0 * direct_eigenvalue(&a, l).im.abs()).abs() < 1e-12);
        }
        assert!(extract_cc(&spectrum(&[1.0, 2.0])).is_empty());
    }

    #[test]
    fn rc_three_by_three_closed_form() {
        let (a2, a3) = (-0.7, 1.9);
        let s = spectrum(&[0.35, a2, a3]);
        let expected = Complex::new(1.5 * (a2 + a3), 3f64.sqrt() / 2.0 * (a2 - a3)).norm();
        let all = extract_rc(&s, PairingPolicy::All, &mut rng());
        assert_eq!(all.len(), 2);
        for v in &all {
            assert!((v - expected).abs() < 1e-12);
        }
        let one = extract_rc(&s, PairingPolicy::OnePerRealization, &mut rng());
        assert!((one[0] - expected).abs() < 1e-12);
        assert!(extract_rc(&spectrum(&[1.0, 0.0, 0.0]), PairingPolicy::All, &mut rng())
            .iter()
            .all(|&v| v == 0.0));
        assert!(extract_rc(&spectrum(&[1.0, 2.0]), PairingPolicy::All, &mut rng()).is_empty());
    }

    #[test]
    fn rc_all_for_even_dimension_uses_both_real_eigenvalues() {
        let s = spectrum(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert_eq!(extract_rc(&s, PairingPolicy::All, &mut rng()).len(), 2 * 4);
    }

    #[test]
    fn generic_exclusion_rule() {
        let a = [0.3, -0.2, 1.1, 0.5, -0.9, 0.05];
        let s = spectrum(&a);
        let all = extract_generic(&s, PairingPolicy::All, &mut rng());
        // complex indices 1, 2, 4, 5; pairs excluding (1, 5) and (2, 4)
        assert_eq!(all.len(), 4);
        let e23 = (s.eigenvalue(1) - s.eigenvalue(2)).norm();
        assert!(all.iter().any(|v| (v - e23).abs() < 1e-15));
        let e26 = (s.eigenvalue(1) - s.eigenvalue(5)).norm();
        assert!(all.iter().all(|v| (v - e26).abs() > 1e-9));
        let mut r = rng();
        for _ in 0..200 {
            let v = extract_generic(&s, PairingPolicy::OnePerRealization, &mut r);
            assert!(all.iter().any(|x| (x - v[0]).abs() < 1e-15));
        }
    }

    #[test]
    fn generic_needs_two_pairs() {
        assert!(extract_generic(&spectrum(&[1.0, 2.0, 3.0, 4.0]), PairingPolicy::All, &mut rng()).is_empty());
        assert!(extract_generic(&spectrum(&[1.0, 2.0, 3.0]), PairingPolicy::All, &mut rng()).is_empty());
        assert_eq!(extract_generic(&spectrum(&[1.0, 2.0, 3.0, 4.0, 5.0]), PairingPolicy::All, &mut rng()).len(), 4);
        let degenerate = extract_generic(&spectrum(&[0.7; 6]), PairingPolicy::All, &mut rng());
        assert!(degenerate.iter().all(|&v| v.abs() < 1e-15));
        assert_eq!(degenerate.len(), 4);
    }

    #[test]
    fn normalization() {
        let s = normalize_to_unit_mean(SpacingKind::Cc, vec![2.0, 4.0, 6.0]).unwrap();
        assert_eq!(s.values(), &[0.5, 1.0, 1.5]);
        assert_eq!(s.empirical_mean(), 4.0);
        assert!(s.is_normalized());
        let again = normalize_to_unit_mean(SpacingKind::Cc, vec![0.5, 1.0, 1.5]).unwrap();
        assert_eq!(again.values(), &[0.5, 1.0, 1.5]);
        assert!(matches!(
            normalize_to_unit_mean(SpacingKind::Rc, vec![0.0, 0.0]),
            Err(Error::DegenerateSample(_))
        ));
        assert!(normalize_to_unit_mean::<f64>(SpacingKind::Rc, vec![]).is_err());
        assert!(SpacingSample::raw(SpacingKind::Rc, vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn ks_on_exact_quantiles() {
        let law = LawSpec::<f64>::normalized(LawKind::Wigner).unwrap();
        let n = 500;
        let values: Vec<f64> = (0..n)
            .map(|i| law.quantile((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        let d = ks_statistic(&values, |x| law.cdf(x).unwrap()).unwrap();
        assert!(d <= 0.5 / n as f64 + 1e-9, "d = {d}");
    }

    #[test]
    fn ks_separates_wigner_from_gaussian() {
        let wigner = LawSpec::<f64>::normalized(LawKind::Wigner).unwrap();
        let cc = LawSpec::<f64>::normalized(LawKind::CcNorm).unwrap();
        let n = 2000;
        let values: Vec<f64> = (0..n)
            .map(|i| wigner.quantile((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        let d = ks_statistic(&values, |x| cc.cdf(x).unwrap()).unwrap();
        assert!(d > 0.1, "d = {d}");
    }

    #[test]
    fn ks_checks_normalization_and_emptiness() {
        let law = LawSpec::<f64>::normalized(LawKind::CcNorm).unwrap();
        let raw = SpacingSample::raw(SpacingKind::Cc, vec![1.0, 2.0]).unwrap();
        assert!(ks_distance(&raw, &law).is_err());
        assert!(ks_distance(&raw.normalize().unwrap(), &law).is_ok());
        assert!(ks_statistic::<f64>(&[], |x| x).is_err());
    }

    #[test]
    fn critical_values() {
        assert!((ks_critical_value(10_000, 0.05) - 0.01358).abs() < 1e-4);
        assert!((ks_critical_value(1, 0.01) - 1.6276).abs() < 1e-3);
    }

    #[test]
    fn histogram_basics() {
        let s = SpacingSample::<f64>::raw(SpacingKind::Cc, vec![1.0; 100]).unwrap();
        let h = build_histogram::<f64>(&s, 1).unwrap();
        assert_eq!(h.counts, vec![100]);
        assert!((h.density_values[0] - 1.0 / h.bin_width()).abs() < 1e-12);

        let grid: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let h = build_histogram(&SpacingSample::raw(SpacingKind::Rc, grid).unwrap(), 10).unwrap();
        for d in &h.density_values {
            assert!((d - 1.0).abs() < 0.02);
        }
        let mass: f64 = h.density_values.iter().map(|d| d * h.bin_width()).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(build_histogram(&s, 0).is_err());
    }

    #[test]
    fn histogram_of_zeros() {
        let s = SpacingSample::raw(SpacingKind::Generic, vec![0.0; 5]).unwrap();
        let h = build_histogram(&s, 4).unwrap();
        assert_eq!(h.counts, vec![5, 0, 0, 0]);
    }

    #[test]
    fn line_fits() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = weighted_line_fit(&xs, &ys, &[0.1; 4]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert!(fit.slope_standard_error > 0.0);
        assert!((slope_through_origin(&[1.0, 2.0], &[2.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(weighted_line_fit(&[1.0], &[1.0], &[1.0]).is_none());
    }
}
