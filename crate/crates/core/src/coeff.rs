//! Truncated Taylor series and the exact coefficient-level algebra.
//!
//! A [`CoeffSeq`] stores `a_0, ..., a_d` of `f(z) = sum a_n z^n`. Reads past the
//! stored degree return zero, matching the infinite-series semantics under
//! truncation.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::par::CompensatedSum;

/// Angular oversampling factor required by [`CircleGrid`].
pub const OVERSAMPLING: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    coeffs: Vec<Complex64>,
}

impl CoeffSeq {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a series from a closure over `0..=degree`.
    pub fn from_fn(degree: usize, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::new((0..=degree).map(f).collect())
    }

    /// Zero series of the given degree.
    pub fn zeros(degree: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); degree + 1],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `log 1/(1-z) = sum_{n>=1} z^n / n`, truncated at `degree`.
    pub fn log_kernel(degree: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = Complex64::new(1.0 / n as f64, 0.0);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// `sum |a_n|^2`, the squared H^2 norm.
    pub fn l2_norm_sq(&self) -> f64 {
        let terms: Vec<f64> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        crate::par::pairwise_sum(&terms)
    }

    /// Coefficientwise product; the result has the smaller degree.
    pub fn hadamard(&self, other: &CoeffSeq) -> CoeffSeq {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .collect();
        CoeffSeq { coeffs }
    }

    /// `f'`; a constant maps to the zero series of degree 0.
    pub fn derivative(&self) -> CoeffSeq {
        if self.coeffs.len() == 1 {
            return CoeffSeq::zeros(0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| a * n as f64)
            .collect();
        CoeffSeq { coeffs }
    }

    /// `z f(z)`.
    pub fn shift(&self) -> CoeffSeq {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        CoeffSeq { coeffs }
    }

    /// Coefficient `n` becomes `sum_{k<=n} a_k`, accumulated with compensation.
    pub fn prefix_sums(&self) -> CoeffSeq {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                re.add(a.re);
                im.add(a.im);
                Complex64::new(re.value(), im.value())
            })
            .collect();
        CoeffSeq { coeffs }
    }

    /// `S_{n,m} f`: keeps coefficients `n..=m` in place and zeroes the rest.
    pub fn slice(&self, start: usize, end: usize) -> Result<CoeffSeq> {
        if start > end {
            return Err(Error::IndexOrder { start, end });
        }
        let coeffs = (0..=end)
            .map(|k| {
                if k >= start {
                    self.coeff(k)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(CoeffSeq { coeffs })
    }

    /// Coefficients `start..=end` moved down to start at index 0. Integral means on
    /// the unit circle are unchanged by this.
    pub fn window(&self, start: usize, end: usize) -> Result<CoeffSeq> {
        if start > end {
            return Err(Error::IndexOrder { start, end });
        }
        Ok(CoeffSeq {
            coeffs: (start..=end).map(|k| self.coeff(k)).collect(),
        })
    }

    /// Dyadic block `Delta_N f = S_{N, 2N-1} f`.
    pub fn block(&self, n: usize) -> Result<CoeffSeq> {
        if n == 0 {
            return Err(Error::BlockIndex);
        }
        self.slice(n, 2 * n - 1)
    }

    /// `S_N f`.
    pub fn partial_sum(&self, n: usize) -> CoeffSeq {
        CoeffSeq {
            coeffs: (0..=n).map(|k| self.coeff(k)).collect(),
        }
    }

    /// Copy padded (or cut) to exactly `degree`.
    pub fn resized(&self, degree: usize) -> CoeffSeq {
        self.partial_sum(degree)
    }

    pub fn scale(&self, s: Complex64) -> CoeffSeq {
        CoeffSeq {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &CoeffSeq) -> CoeffSeq {
        let d = self.degree().max(other.degree());
        CoeffSeq {
            coeffs: (0..=d).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        }
    }

    pub fn sub(&self, other: &CoeffSeq) -> CoeffSeq {
        let d = self.degree().max(other.degree());
        CoeffSeq {
            coeffs: (0..=d).map(|k| self.coeff(k) - other.coeff(k)).collect(),
        }
    }

    /// Samples `f(r e^{i theta_j})`, `theta_j = 2 pi j / M`, by one inverse FFT of the
    /// radially damped coefficients.
    pub fn evaluate_on_circle(&self, grid: &CircleGrid) -> Result<Vec<Complex64>> {
        grid.check(self.degree())?;
        let m = grid.points;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut rn = 1.0;
        for (slot, a) in buf.iter_mut().zip(&self.coeffs) {
            *slot = a * rn;
            rn *= grid.radius;
        }
        inverse_fft(&mut buf);
        Ok(buf)
    }

    /// Horner evaluation at a single point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }
}

/// Equispaced angular grid of `points` nodes on the circle of `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleGrid {
    pub points: usize,
    pub radius: f64,
}

impl CircleGrid {
    pub fn new(points: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(Error::RadiusRange(radius));
        }
        Ok(Self { points, radius })
    }

    /// Smallest admissible point count for a series of `degree`.
    pub fn min_points(degree: usize) -> usize {
        OVERSAMPLING * (degree + 1)
    }

    pub(crate) fn check(&self, degree: usize) -> Result<()> {
        let required = Self::min_points(degree);
        if self.points < required {
            return Err(Error::OversamplingViolation {
                points: self.points,
                required,
            });
        }
        Ok(())
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.points as f64
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Unnormalized inverse DFT: `out_j = sum_n x_n e^{+2 pi i n j / len}`.
pub(crate) fn inverse_fft(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    plan_inverse(buf.len()).process(buf);
}

#[derive(Serialize, Deserialize)]
struct CoeffSeqRepr {
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for CoeffSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffSeqRepr {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoeffSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CoeffSeqRepr::deserialize(deserializer)?;
        CoeffSeq::new(
            repr.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(v: &[f64]) -> CoeffSeq {
        CoeffSeq::from_real(v).unwrap()
    }

    fn re_parts(f: &CoeffSeq) -> Vec<f64> {
        f.coeffs().iter().map(|z| z.re).collect()
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(matches!(CoeffSeq::new(vec![]), Err(Error::EmptySeries)));
        assert!(matches!(
            CoeffSeq::from_real(&[1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(
            re_parts(&real(&[1., 1., 1.]).hadamard(&real(&[0., 2., 0.]))),
            [0., 2., 0.]
        );
        assert_eq!(re_parts(&real(&[1., 2.]).hadamard(&real(&[3., 4.]))), [3., 8.]);
        let f = real(&[0.5, -2.0, 7.0]);
        assert_eq!(f.hadamard(&real(&[1., 1., 1.])), f);
        // degree is the minimum
        assert_eq!(real(&[1., 2., 3.]).hadamard(&real(&[1.])).degree(), 0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(re_parts(&real(&[5.]).derivative()), [0.]);
        assert_eq!(re_parts(&real(&[0., 1., 1.]).derivative()), [1., 2.]);
        assert_eq!(re_parts(&real(&[1., 1., 1., 1.]).derivative()), [1., 2., 3.]);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(re_parts(&real(&[1.]).shift()), [0., 1.]);
        assert_eq!(re_parts(&real(&[3., 4.]).shift()), [0., 3., 4.]);
        assert_eq!(re_parts(&real(&[0., 0., 1.]).derivative().shift()), [0., 0., 2.]);
    }

    #[test]
    fn prefix_sum_examples() {
        assert_eq!(re_parts(&real(&[1., 0., 0., 0.]).prefix_sums()), [1., 1., 1., 1.]);
        assert_eq!(
            re_parts(&real(&[1., -1., 1., -1.]).prefix_sums()),
            [1., 0., 1., 0.]
        );
        assert_eq!(re_parts(&real(&[1., 2., 3.]).prefix_sums()), [1., 3., 6.]);
    }

    #[test]
    fn prefix_sums_survive_cancellation() {
        let f = real(&[1e16, 1.0, -1e16, 1.0]);
        assert_eq!(f.prefix_sums().coeff(3).re, 2.0);
    }

    #[test]
    fn slicing() {
        let ones = real(&[1.; 6]);
        assert_eq!(re_parts(&ones.block(2).unwrap()), [0., 0., 1., 1.]);
        let f = real(&[1., 2., 3., 4.]);
        assert_eq!(f.partial_sum(f.degree()), f);
        let h = CoeffSeq::log_kernel(7);
        let s = h.slice(4, 7).unwrap();
        let expect = [0., 0., 0., 0., 1. / 4., 1. / 5., 1. / 6., 1. / 7.];
        for (a, b) in re_parts(&s).iter().zip(expect) {
            assert_relative_eq!(*a, b);
        }
        assert!(matches!(f.slice(3, 1), Err(Error::IndexOrder { .. })));
        assert!(matches!(f.block(0), Err(Error::BlockIndex)));
        // reads past the degree are zero
        assert_eq!(re_parts(&f.slice(3, 5).unwrap()), [0., 0., 0., 4., 0., 0.]);
    }

    #[test]
    fn circle_evaluation_examples() {
        let g = CircleGrid::new(8, 0.7).unwrap();
        for v in real(&[2.5]).evaluate_on_circle(&g).unwrap() {
            assert_relative_eq!(v.re, 2.5);
            assert_relative_eq!(v.im, 0.0);
        }
        let z = real(&[0., 1.])
            .evaluate_on_circle(&CircleGrid::new(8, 1.0).unwrap())
            .unwrap();
        let expect = [(1., 0.), (0., 1.), (-1., 0.), (0., -1.)];
        for (v, (re, im)) in z.iter().step_by(2).zip(expect) {
            assert!((v.re - re).abs() < 1e-15 && (v.im - im).abs() < 1e-15);
        }
        let w = real(&[1., 1.])
            .evaluate_on_circle(&CircleGrid::new(8, 0.5).unwrap())
            .unwrap();
        assert_relative_eq!(w[0].re, 1.5);
    }

    #[test]
    fn oversampling_is_enforced() {
        let f = real(&[0., 1.]);
        assert!(matches!(
            f.evaluate_on_circle(&CircleGrid::new(4, 1.0).unwrap()),
            Err(Error::OversamplingViolation {
                points: 4,
                required: 8
            })
        ));
        assert!(CircleGrid::new(8, 0.0).is_err());
        assert!(CircleGrid::new(8, 1.5).is_err());
    }

    #[test]
    fn evaluation_matches_horner_to_degree_256() {
        let f = CoeffSeq::from_fn(256, |n| {
            Complex64::new(
                ((n * 7919) % 101) as f64 / 50.0 - 1.0,
                ((n * 104729) % 37) as f64 / 18.0 - 1.0,
            )
        })
        .unwrap();
        let grid = CircleGrid::new(1028, 0.93).unwrap();
        let fast = f.evaluate_on_circle(&grid).unwrap();
        for j in (0..grid.points).step_by(13) {
            let z = Complex64::from_polar(grid.radius, grid.angle(j));
            let direct = f.eval(z);
            assert!((fast[j] - direct).norm() <= 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = CoeffSeq::new(vec![
            Complex64::new(0.1, -1.0 / 3.0),
            Complex64::new(1e-300, 2.0_f64.sqrt()),
        ])
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with("{\"coeffs\":[["));
        let g: CoeffSeq = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<CoeffSeq>("{\"coeffs\":[]}").is_err());
    }

    fn arb_seq(max_deg: usize) -> impl Strategy<Value = CoeffSeq> {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..=max_deg + 1)
            .prop_map(|v| CoeffSeq::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
    }

    fn arb_int_seq() -> impl Strategy<Value = CoeffSeq> {
        prop::collection::vec(-50i32..50, 1..40)
            .prop_map(|v| CoeffSeq::new(v.into_iter().map(|a| c(a as f64)).collect()).unwrap())
    }

    fn close(a: &CoeffSeq, b: &CoeffSeq, tol: f64) -> bool {
        a.degree() == b.degree()
            && a.coeffs()
                .iter()
                .zip(b.coeffs())
                .all(|(x, y)| (x - y).norm() <= tol * x.norm().max(y.norm()).max(1.0))
    }

    proptest! {
        #[test]
        fn hadamard_algebra(f in arb_seq(64), g in arb_seq(64), h in arb_seq(64),
                            s in -3.0f64..3.0) {
            prop_assert!(close(&f.hadamard(&g), &g.hadamard(&f), 1e-12));
            prop_assert!(close(&f.hadamard(&g).hadamard(&h), &f.hadamard(&g.hadamard(&h)), 1e-12));
            // linear in the first argument over the common degree
            let d = f.degree().min(g.degree()).min(h.degree());
            let (f, g, h) = (f.resized(d), g.resized(d), h.resized(d));
            let lhs = f.scale(c(s)).add(&g).hadamard(&h);
            let rhs = f.hadamard(&h).scale(c(s)).add(&g.hadamard(&h));
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn product_rule_witness(f in arb_int_seq()) {
            let lhs = f.shift().derivative().sub(&f.derivative().shift());
            for n in 0..=f.degree() {
                prop_assert_eq!(lhs.coeff(n), f.coeff(n));
            }
        }

        #[test]
        fn partial_sum_plus_tail(f in arb_seq(64), k in 0usize..70) {
            let n = k.min(f.degree());
            let tail = if n < f.degree() { f.slice(n + 1, f.degree()).unwrap() } else { CoeffSeq::zeros(0) };
            let sum = f.partial_sum(n).add(&tail);
            prop_assert_eq!(sum.resized(f.degree()), f);
        }
    }
}
