//! Content catalog with Zipf popularity.
//!
//! Ranks start at 1 (most popular). The catalog keeps the generalized harmonic
//! normalizer and a cumulative table for inverse-CDF sampling.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::num::Scalar;

/// Content popularity rank, 1-based.
pub type Rank = u32;

/// Generalized harmonic number `H_{m,s} = sum_{j=1..m} j^-s`.
///
/// Terms are accumulated from `j = m` down to 1 so the small tail terms are
/// added before the large head terms.
pub fn harmonic<T: Scalar>(m: u64, s: T) -> Result<T> {
    if m == 0 {
        return Err(invalid("m", "catalog must hold at least one content"));
    }
    if !(s > T::zero()) {
        return Err(invalid("s", format!("Zipf exponent must be > 0, got {s}")));
    }
    let neg = -s;
    Ok((1..=m)
        .rev()
        .fold(T::zero(), |acc, j| acc + T::count(j).powf(neg)))
}

/// Smallest popularity head `h_eps` with `Pr[rank <= h_eps] >= 1 - eps` for every
/// catalog size: the ceiling of `eps^(1/(1-s))`.
///
/// Values within a few ulps (of `T`) of an integer are snapped to it so that
/// exact cases such as `eps = 0.01, s = 2` give 100 rather than 101.
pub fn popular_head<T: Scalar>(epsilon: T, s: T) -> Result<u64> {
    check_epsilon(epsilon)?;
    if !(s > T::one()) {
        return Err(invalid(
            "s",
            format!("popularity head needs a non-heavy-tailed Zipf law (s > 1), got {s}"),
        ));
    }
    let raw = epsilon.as_f64().powf(1.0 / (1.0 - s.as_f64()));
    if !raw.is_finite() || raw > (1u64 << 53) as f64 {
        return Err(invalid(
            "s",
            format!("popularity head overflows for epsilon={epsilon}, s={s}"),
        ));
    }
    let nearest = raw.round();
    let tol = 64.0 * T::epsilon().as_f64() * nearest.max(1.0);
    let head = if (raw - nearest).abs() <= tol {
        nearest
    } else {
        raw.ceil()
    };
    Ok(head.max(1.0) as u64)
}

/// Edge probability floor `p_eps = h_eps^-s / H_{m,s}`.
pub fn edge_prob_floor<T: Scalar>(epsilon: T, s: T, m: u64) -> Result<T> {
    let head = popular_head(epsilon, s)?;
    Ok(T::count(head).powf(-s) / harmonic(m, s)?)
}

pub(crate) fn check_epsilon<T: Scalar>(epsilon: T) -> Result<()> {
    if epsilon > T::zero() && epsilon < T::one() {
        Ok(())
    } else {
        Err(invalid(
            "epsilon",
            format!("must lie in (0, 1), got {epsilon}"),
        ))
    }
}

/// Immutable content universe: `m` contents with Zipf exponent `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog<T> {
    m: u32,
    s: T,
    h_norm: T,
    // cdf[r - 1] = Pr[rank <= r]; the last entry is exactly one.
    cdf: Vec<T>,
}

impl<T: Scalar> Catalog<T> {
    pub fn new(m: u32, s: T) -> Result<Self> {
        if m == 0 {
            return Err(invalid("m", "catalog must hold at least one content"));
        }
        if !(s > T::zero()) {
            return Err(invalid("s", format!("Zipf exponent must be > 0, got {s}")));
        }
        // Suffix sums tail[r] = sum_{j > r} j^-s, accumulated from the small end.
        let mut tail = vec![T::zero(); m as usize + 1];
        for j in (1..=m as usize).rev() {
            tail[j - 1] = tail[j] + T::count(j as u64).powf(-s);
        }
        let h_norm = tail[0];
        let cdf = (1..=m as usize)
            .map(|r| T::one() - tail[r] / h_norm)
            .collect();
        Ok(Self { m, s, h_norm, cdf })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn s(&self) -> T {
        self.s
    }

    /// The cached normalizer `H_{m,s}`.
    pub fn h_norm(&self) -> T {
        self.h_norm
    }

    pub fn pmf(&self, rank: Rank) -> Result<T> {
        self.check_rank(rank)?;
        Ok(T::count(rank as u64).powf(-self.s) / self.h_norm)
    }

    /// `Pr[rank <= r]`.
    pub fn cdf(&self, rank: Rank) -> Result<T> {
        self.check_rank(rank)?;
        Ok(self.cdf[rank as usize - 1])
    }

    /// Draws one request by inverse-CDF lookup, `O(log m)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rank {
        let u = T::lit(rng.random::<f64>());
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.m as usize - 1) as Rank + 1
    }

    fn check_rank(&self, rank: Rank) -> Result<()> {
        if rank == 0 || rank > self.m {
            Err(Error::RankOutOfRange {
                rank: rank as u64,
                m: self.m as u64,
            })
        } else {
            Ok(())
        }
    }
}

/// Free-function form of [`Catalog::pmf`].
pub fn zipf_pmf<T: Scalar>(rank: Rank, cat: &Catalog<T>) -> Result<T> {
    cat.pmf(rank)
}
