//! Exact limit quantities for random rules.
//!
//! The number of simple periodic solutions with periods `(tau, sigma)` is
//! asymptotically Poisson with mean
//!
//! ```text
//! lambda(tau, sigma) = 1/(tau*sigma) * sum_{d | gcd(tau, sigma)} phi(d) * d
//! ```
//!
//! so `P(a solution exists) -> 1 - exp(-lambda)`. All counts and means are
//! computed with big integers and exact rationals; floating point enters
//! only at the final `exp`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tile::Tile;
use crate::word::{divisors, State};

pub type Rational = BigRational;

/// Finite sets of temporal and spatial periods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodSet {
    taus: BTreeSet<u64>,
    sigmas: BTreeSet<u64>,
}

impl PeriodSet {
    pub fn new(
        taus: impl IntoIterator<Item = u64>,
        sigmas: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let taus: BTreeSet<u64> = taus.into_iter().collect();
        let sigmas: BTreeSet<u64> = sigmas.into_iter().collect();
        if taus.is_empty() || sigmas.is_empty() {
            return Err(Error::InvalidArgument(
                "period sets must be nonempty".into(),
            ));
        }
        if taus.contains(&0) || sigmas.contains(&0) {
            return Err(Error::InvalidArgument("periods must be positive".into()));
        }
        Ok(PeriodSet { taus, sigmas })
    }

    pub fn taus(&self) -> &BTreeSet<u64> {
        &self.taus
    }

    pub fn sigmas(&self) -> &BTreeSet<u64> {
        &self.sigmas
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.taus
            .iter()
            .flat_map(move |&t| self.sigmas.iter().map(move |&s| (t, s)))
    }
}

pub fn euler_phi(d: u64) -> u64 {
    assert!(d >= 1, "phi is defined for d >= 1");
    let mut m = d;
    let mut phi = d;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn check_periods(tau: u64, sigma: u64) {
    assert!(tau >= 1 && sigma >= 1, "periods must be positive");
}

pub fn lambda(tau: u64, sigma: u64) -> Rational {
    check_periods(tau, sigma);
    let g = tau.gcd(&sigma);
    let sum: u64 = divisors(g as usize)
        .into_iter()
        .map(|d| euler_phi(d as u64) * d as u64)
        .sum();
    ratio(sum, tau * sigma)
}

pub fn lambda_set(ps: &PeriodSet) -> Rational {
    ps.pairs()
        .map(|(t, s)| lambda(t, s))
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// Closed forms for `sigma` in `1..=4`, written out case by case.
pub fn lambda_piecewise(sigma: u64, tau: u64) -> Result<Rational> {
    if tau == 0 {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    let num = match sigma {
        1 => 1,
        2 if tau.is_multiple_of(2) => 3,
        2 => 1,
        3 if tau.is_multiple_of(3) => 7,
        3 => 1,
        4 => match tau % 4 {
            0 => 11,
            2 => 3,
            _ => 1,
        },
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no closed form tabulated for sigma = {sigma}"
            )))
        }
    };
    Ok(ratio(num, sigma * tau))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

fn limit_from_lambda(l: &Rational) -> f64 {
    1.0 - (-to_f64(l)).exp()
}

pub fn limit_existence_prob(tau: u64, sigma: u64) -> f64 {
    limit_from_lambda(&lambda(tau, sigma))
}

pub fn limit_existence_prob_set(ps: &PeriodSet) -> f64 {
    limit_from_lambda(&lambda_set(ps))
}

/// Limit of `P(Y_sigma <= y)` where `Y_sigma` is the least temporal period.
pub fn limit_cdf_y(sigma: u64, y: u64) -> f64 {
    if y == 0 {
        return 0.0;
    }
    let ps = PeriodSet::new(1..=y, [sigma]).expect("nonempty");
    limit_existence_prob_set(&ps)
}

/// Limit of `P(Y'_tau <= y)`, the least spatial period for temporal `tau`.
pub fn limit_cdf_y_prime(tau: u64, y: u64) -> f64 {
    if y == 0 {
        return 0.0;
    }
    let ps = PeriodSet::new([tau], 1..=y).expect("nonempty");
    limit_existence_prob_set(&ps)
}

/// Possible state counts of a simple tile: `tau*sigma/d` for `d | gcd`,
/// restricted to `s <= n`.
pub fn simple_sizes(tau: u64, sigma: u64, n: u64) -> BTreeSet<u64> {
    check_periods(tau, sigma);
    divisors(tau.gcd(&sigma) as usize)
        .into_iter()
        .map(|d| tau * sigma / d as u64)
        .filter(|&s| s <= n)
        .collect()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn falling_factorial_over_s(n: u64, s: u64) -> BigUint {
    // C(n, s) * (s - 1)!
    let mut acc = BigUint::one();
    for i in 0..s {
        acc *= BigUint::from(n - i);
    }
    acc / BigUint::from(s)
}

/// Number of simple tiles with periods `(tau, sigma)` and `s` states:
/// `phi(d) * C(n, s) * (s - 1)!` with `d = tau*sigma/s`.
pub fn simple_tile_count(n: u64, tau: u64, sigma: u64, s: u64) -> Result<BigUint> {
    if !simple_sizes(tau, sigma, n).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "{s} is not a simple tile size for ({tau}, {sigma}) with n = {n}"
        )));
    }
    let d = tau * sigma / s;
    Ok(BigUint::from(euler_phi(d)) * falling_factorial_over_s(n, s))
}

/// Expected number of simple solutions with periods `(tau, sigma)` for a
/// uniform `n`-state rule; tends to `lambda(tau, sigma)`.
pub fn finite_n_mean(n: u64, tau: u64, sigma: u64) -> Rational {
    simple_sizes(tau, sigma, n)
        .into_iter()
        .map(|s| {
            let count = simple_tile_count(n, tau, sigma, s).expect("valid size");
            let den = BigUint::from(n).pow(s as u32);
            Rational::new(BigInt::from(count), BigInt::from(den))
        })
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// Upper limit on enumerated matrices for the census.
pub const CENSUS_LIMIT: u64 = 100_000_000;

/// Counts tiles with periods `(tau, sigma)` over `Z_n`, bucketed by
/// `(states, lag)`, by scanning every `n^(tau*sigma)` matrix and keeping
/// valid ones in canonical position.
pub fn brute_force_tile_census(
    n: u32,
    tau: usize,
    sigma: usize,
) -> Result<BTreeMap<(usize, usize), u64>> {
    if n == 0 {
        return Err(Error::ZeroStates);
    }
    if tau == 0 || sigma == 0 {
        return Err(Error::InvalidArgument("periods must be positive".into()));
    }
    let cells = tau * sigma;
    let total = (n as u64)
        .checked_pow(cells as u32)
        .filter(|&t| t <= CENSUS_LIMIT)
        .ok_or(Error::IndexOverflow {
            n,
            len: cells,
            limit: CENSUS_LIMIT,
        })?;
    let mut census = BTreeMap::new();
    let mut digits: Vec<State> = vec![0; cells];
    for k in 0..total {
        if k > 0 {
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < n {
                    break;
                }
                *d = 0;
            }
        }
        let rows = digits.chunks(sigma).map(<[State]>::to_vec).collect();
        let tile = Tile::from_rows(rows).expect("rectangular");
        if tile.is_valid() && tile.is_canonical() {
            let m = tile.metrics();
            *census.entry((m.states, m.lag)).or_insert(0) += 1;
        }
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn totient() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(4), 2);
        assert_eq!(euler_phi(12), 4);
        for d in 1..200u64 {
            let brute = (1..=d).filter(|k| k.gcd(&d) == 1).count() as u64;
            assert_eq!(euler_phi(d), brute, "phi({d})");
        }
    }

    #[test]
    fn lambda_values() {
        assert_eq!(lambda(1, 1), q(1, 1));
        assert_eq!(lambda(2, 2), q(3, 4));
        assert_eq!(lambda(4, 4), q(11, 16));
        assert_eq!(lambda(6, 4), lambda(4, 6));
    }

    #[test]
    fn lambda_sets() {
        let ps = |t: &[u64], s: &[u64]| PeriodSet::new(t.to_vec(), s.to_vec()).unwrap();
        assert_eq!(lambda_set(&ps(&[1], &[1])), q(1, 1));
        assert_eq!(lambda_set(&ps(&[1, 2], &[2])), q(5, 4));
        assert_eq!(lambda_set(&ps(&[1, 2, 3], &[1])), q(11, 6));
        assert!(PeriodSet::new(Vec::new(), vec![1]).is_err());
        assert!(PeriodSet::new(vec![0], vec![1]).is_err());
    }

    #[test]
    fn limits() {
        assert!((limit_existence_prob(1, 1) - 0.632_120_558_8).abs() < 1e-9);
        assert!((limit_existence_prob(2, 2) - 0.527_633_447_3).abs() < 1e-9);
        assert!((limit_cdf_y(1, 1) - 0.632_120_558_8).abs() < 1e-9);
        assert!((limit_cdf_y(2, 2) - 0.713_495_203_0).abs() < 1e-9);
        let ps = PeriodSet::new(1..=5, [3]).unwrap();
        assert_eq!(limit_existence_prob_set(&ps), limit_cdf_y(3, 5));
        let mut prev = 0.0;
        for y in 1..200 {
            let c = limit_cdf_y(4, y);
            assert!(c >= prev && c < 1.0);
            prev = c;
        }
    }

    #[test]
    fn piecewise_cases() {
        assert_eq!(lambda_piecewise(3, 6).unwrap(), q(7, 18));
        assert_eq!(lambda_piecewise(4, 2).unwrap(), q(3, 8));
        assert_eq!(lambda_piecewise(4, 3).unwrap(), q(1, 12));
        assert!(lambda_piecewise(5, 1).is_err());
        assert!(lambda_piecewise(0, 1).is_err());
    }

    #[test]
    fn simple_size_sets() {
        assert_eq!(simple_sizes(2, 2, 4), BTreeSet::from([2, 4]));
        assert_eq!(simple_sizes(2, 3, 6), BTreeSet::from([6]));
        assert_eq!(simple_sizes(2, 2, 3), BTreeSet::from([2]));
    }

    #[test]
    fn simple_counts() {
        assert_eq!(simple_tile_count(3, 1, 1, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(simple_tile_count(4, 2, 2, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(simple_tile_count(4, 2, 2, 4).unwrap(), BigUint::from(6u32));
        assert!(simple_tile_count(4, 2, 2, 3).is_err());
        assert_eq!(binomial(100, 4), BigUint::from(3_921_225u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn finite_means() {
        for n in 1..30 {
            assert_eq!(finite_n_mean(n, 1, 1), q(1, 1));
        }
        let m = to_f64(&finite_n_mean(100, 2, 2));
        assert!((m - 0.730_273_5).abs() < 1e-9, "{m}");
        let m = to_f64(&finite_n_mean(1000, 2, 2));
        assert!((m - 0.75).abs() < 3e-3, "{m}");
    }

    #[test]
    fn small_censuses() {
        assert_eq!(
            brute_force_tile_census(2, 1, 1).unwrap(),
            BTreeMap::from([((1, 0), 2)])
        );
        let c = brute_force_tile_census(3, 2, 1).unwrap();
        assert_eq!(c.get(&(2, 0)), Some(&3));
        let c = brute_force_tile_census(4, 2, 2).unwrap();
        assert_eq!(c.get(&(2, 0)), Some(&6));
        assert_eq!(c.get(&(4, 0)), Some(&6));
        assert!(brute_force_tile_census(10, 3, 3).is_err());
    }
}
