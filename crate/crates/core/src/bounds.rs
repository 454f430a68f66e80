//! Closed-form reference quantities for the coding gain.
//!
//! Asymptotic expressions are instantiated with unit constants and the
//! `o(1)` terms dropped. They are reference values for trend checks, not
//! sharp predictions.

use crate::error::{invalid, Result};
use crate::num::Scalar;
use crate::zipf::{check_epsilon, edge_prob_floor, harmonic, popular_head};

/// Shared inputs of the bounds: `n` terminals, `m` contents, Zipf exponent
/// `s > 1` and confidence parameter `epsilon` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams<T> {
    pub n: u64,
    pub m: u64,
    pub s: T,
    pub epsilon: T,
}

impl<T: Scalar> BoundParams<T> {
    pub fn new(n: u64, m: u64, s: T, epsilon: T) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(s > T::one()) {
            return Err(invalid("s", format!("bounds need s > 1, got {s}")));
        }
        if m == 0 {
            return Err(invalid("m", "catalog must hold at least one content"));
        }
        Ok(Self { n, m, s, epsilon })
    }

    /// `p_eps` for these parameters.
    pub fn edge_prob(&self) -> Result<T> {
        edge_prob_floor(self.epsilon, self.s, self.m)
    }
}

/// `f(v, d) = (2d - 1) v - 2d^2 + d`, the edge count above which a graph on
/// `v` vertices has `d` disjoint cycles or `2d - 1` full-degree vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeThreshold {
    pub v: u64,
    pub d: u64,
    pub value: i64,
    /// `v >= 24 d`; the value is still reported when this fails.
    pub size_hypothesis_holds: bool,
}

/// Rejects `d <= 1`; flags `v < 24 d` without rejecting.
pub fn erdos_edge_threshold(v: u64, d: u64) -> Result<EdgeThreshold> {
    if d <= 1 {
        return Err(invalid("d", format!("cycle count must exceed 1, got {d}")));
    }
    let (vi, di) = (v as i64, d as i64);
    Ok(EdgeThreshold {
        v,
        d,
        value: (2 * di - 1) * vi - 2 * di * di + di,
        size_hypothesis_holds: v >= 24 * d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleFloor<T> {
    pub n: u64,
    pub p: T,
    /// `d* = floor(n p^2 / 24)`.
    pub d_star: u64,
    /// `n (n - 1) p^2`.
    pub edge_budget: T,
    /// `f(n, d*)`, only defined for `d* >= 2`.
    pub threshold: Option<EdgeThreshold>,
    /// `n (n - 1) p^2 >= f(n, d*)`, when the threshold is defined.
    pub budget_exceeds_threshold: Option<bool>,
    /// `24 d* <= n`.
    pub size_condition_holds: bool,
}

impl<T: Scalar> CycleFloor<T> {
    /// Every applicable check passed.
    pub fn verified(&self) -> bool {
        self.size_condition_holds && self.budget_exceeds_threshold.unwrap_or(true)
    }
}

/// Disjoint-cycle floor with an explicit edge probability `p`.
pub fn disjoint_cycle_floor_for_p<T: Scalar>(n: u64, p: T) -> CycleFloor<T> {
    let nt = T::count(n);
    let p2 = p * p;
    let d_star = (nt * p2 / T::lit(24.0)).floor().to_u64().unwrap_or(0);
    let edge_budget = nt * (nt - T::one()) * p2;
    let threshold = erdos_edge_threshold(n, d_star).ok();
    CycleFloor {
        n,
        p,
        d_star,
        edge_budget,
        threshold,
        budget_exceeds_threshold: threshold.map(|t| edge_budget >= T::lit(t.value as f64)),
        size_condition_holds: 24 * d_star <= n,
    }
}

/// Disjoint-cycle floor with `p = p_eps`.
pub fn disjoint_cycle_floor<T: Scalar>(params: &BoundParams<T>) -> Result<CycleFloor<T>> {
    Ok(disjoint_cycle_floor_for_p(params.n, params.edge_prob()?))
}

const ZETA_TERMS: u64 = 10_000_000;

/// Riemann zeta for `s > 1`: ten million harmonic terms plus the integral
/// tail `N^(1-s) / (s - 1)`.
pub fn zeta<T: Scalar>(s: T) -> Result<T> {
    if !(s > T::one()) {
        return Err(invalid("s", format!("zeta needs s > 1, got {s}")));
    }
    let n = T::count(ZETA_TERMS);
    Ok(harmonic(ZETA_TERMS, s)? + n.powf(T::one() - s) / (s - T::one()))
}

/// Binomial coefficient as a float, zero when `k > n`.
pub fn binomial<T: Scalar>(n: u64, k: u64) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| acc * T::count(n - i) / T::count(i + 1))
}

/// Lower bound on the expected number of `k`-cliques in the dependency graph,
/// `C(n, k) (h_eps^(-k s) / zeta(s))^(k - 1)`. It is a count and may exceed one.
pub fn clique_count_floor<T: Scalar>(n: u64, k: u64, s: T, epsilon: T) -> Result<T> {
    if k < 2 {
        return Err(invalid(
            "k",
            format!("clique size must be at least 2, got {k}"),
        ));
    }
    let head = T::count(popular_head(epsilon, s)?);
    if k > n {
        return Ok(T::zero());
    }
    let kt = T::count(k);
    let per_pair = head.powf(-kt * s) / zeta(s)?;
    Ok(binomial::<T>(n, k) * per_pair.powf(kt - T::one()))
}

/// Chromatic number of `G(n, p)`: `-(1/2) log(1 - p) n / log n`.
///
/// The ratio of logarithms is base-free; base 2 keeps powers of two exact.
pub fn chromatic_estimate<T: Scalar>(n: u64, p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(invalid(
            "p",
            format!("edge probability must lie in (0, 1), got {p}"),
        ));
    }
    if n < 2 {
        return Err(invalid("n", "needs at least two vertices"));
    }
    let nt = T::count(n);
    let half = T::lit(0.5);
    Ok(-half * (T::one() - p).log2() * nt / nt.log2())
}

/// Coding-length reference `n + (1/2) (n / ln n) ln(p^2)` for edge floor `p`.
pub fn gain_estimate_for_p<T: Scalar>(n: u64, p: T) -> Result<T> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(invalid(
            "p",
            format!("edge probability must lie in (0, 1], got {p}"),
        ));
    }
    if n < 2 {
        return Err(invalid("n", "needs at least two vertices"));
    }
    let nt = T::count(n);
    Ok(nt + T::lit(0.5) * (nt / nt.ln()) * (p * p).ln())
}

/// [`gain_estimate_for_p`] with `p = p_eps(epsilon, s, m)`.
pub fn gain_estimate<T: Scalar>(n: u64, epsilon: T, s: T, m: u64) -> Result<T> {
    gain_estimate_for_p(n, edge_prob_floor(epsilon, s, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

    #[test]
    fn edge_threshold_examples() {
        let t = erdos_edge_threshold(48, 2).unwrap();
        assert_eq!(t.value, 138);
        assert!(t.size_hypothesis_holds);
        assert_eq!(erdos_edge_threshold(1000, 3).unwrap().value, 4985);
        assert!(erdos_edge_threshold(24, 1).is_err());
        assert!(!erdos_edge_threshold(40, 2).unwrap().size_hypothesis_holds);
    }

    #[test]
    fn cycle_floor_examples() {
        let f = disjoint_cycle_floor_for_p(1000, 0.3f64);
        assert_eq!(f.d_star, 3);
        assert!((f.edge_budget - 89_910.0).abs() < 1e-6);
        assert_eq!(f.threshold.unwrap().value, 4985);
        assert_eq!(f.budget_exceeds_threshold, Some(true));
        assert!(f.verified());
        assert_eq!(disjoint_cycle_floor_for_p(1000, 0.0).d_star, 0);
        assert_eq!(disjoint_cycle_floor_for_p(96, 0.5).d_star, 1);
    }

    #[test]
    fn cycle_floor_from_params() {
        let params = BoundParams::new(1000, 1000, 2.0, 0.01).unwrap();
        let f = disjoint_cycle_floor(&params).unwrap();
        assert_eq!(f.d_star, 0);
        assert!(BoundParams::new(10, 10, 1.0, 0.1).is_err());
    }

    #[test]
    fn eq11_holds_whenever_d_star_at_least_two() {
        for n in [100u64, 500, 1000, 5000] {
            for p in [0.3, 0.5, 0.8, 1.0] {
                let f = disjoint_cycle_floor_for_p(n, p);
                if f.d_star >= 2 {
                    assert!(f.verified(), "n={n} p={p}: {f:?}");
                }
            }
        }
    }

    #[test]
    fn zeta_accuracy() {
        assert!((zeta(2.0).unwrap() - ZETA2).abs() < 1e-8);
        let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
        assert!((zeta(4.0).unwrap() - zeta4).abs() < 1e-8);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn clique_count_examples() {
        let near_one = 1.0 - f64::EPSILON;
        let single = clique_count_floor(2, 2, 2.0, near_one).unwrap();
        assert!((single - 1.0 / ZETA2).abs() < 1e-8);
        // A head of two at s = 2 needs ε = 1/2.
        let ten = clique_count_floor(10, 2, 2.0, 0.5).unwrap();
        assert!((ten - 45.0 * 0.0625 / ZETA2).abs() < 1e-6);
        assert_eq!(format!("{ten:.3}"), "1.710");
        // ε = 1/4 gives a head of four.
        let quarter = clique_count_floor(10, 2, 2.0, 0.25).unwrap();
        assert!((quarter - 45.0 * 4f64.powi(-4) / ZETA2).abs() < 1e-9);
        assert_eq!(clique_count_floor(3, 5, 2.0, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn clique_count_nondecreasing_in_n() {
        let mut prev = 0.0;
        for n in 2..40 {
            let v = clique_count_floor(n, 3, 2.0, 0.5).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn chromatic_examples() {
        assert_eq!(chromatic_estimate(1024, 0.5).unwrap(), 51.2);
        assert!(chromatic_estimate(1024, 1e-12).unwrap() < 1e-8);
        assert!(chromatic_estimate(1024, 1.0).is_err());
    }

    #[test]
    fn gain_examples() {
        assert_eq!(gain_estimate_for_p(5000, 1.0).unwrap(), 5000.0);
        let n = 10f64.exp().round() as u64;
        let g = gain_estimate_for_p(n, (-1.0f64).exp()).unwrap();
        let nt = n as f64;
        assert!((g - (nt - nt / nt.ln())).abs() < 1e-9);
        assert!((g / nt - 0.9).abs() < 1e-4);
        let mut prev = 0.0;
        for n in [100u64, 1_000, 10_000, 100_000, 1_000_000, 100_000_000] {
            let r = gain_estimate_for_p(n, 0.3).unwrap() / n as f64;
            assert!(r > prev && r < 1.0);
            prev = r;
        }
        assert!(gain_estimate(1000, 0.01, 2.0, 1000).is_ok());
    }

    #[test]
    fn generic_over_f32() {
        let c: f32 = chromatic_estimate(1024, 0.5f32).unwrap();
        assert_eq!(c, 51.2f32);
        let f = disjoint_cycle_floor_for_p(1000u64, 0.3f32);
        assert_eq!(f.d_star, 3);
    }
}
