//! Splitting prices into coins of fixed denominations.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest price the DP oracle accepts.
pub const ORACLE_MAX: u64 = 100_000;

const EURO: [u64; 15] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominationSet(Vec<u64>);

impl DenominationSet {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.first() != Some(&1) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadDenominations);
        }
        Ok(DenominationSet(values))
    }

    /// Euro cents from 1 to 50000.
    pub fn euro() -> Self {
        DenominationSet(EURO.to_vec())
    }

    /// The first `n` euro denominations.
    pub fn euro_prefix(n: usize) -> Result<Self> {
        if n == 0 || n > EURO.len() {
            return Err(Error::BadDenominations);
        }
        Ok(DenominationSet(EURO[..n].to_vec()))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpendPlan {
    /// `(denomination, count)`, largest denomination first.
    pub parts: Vec<(u64, u32)>,
}

impl SpendPlan {
    pub fn total(&self) -> u64 {
        self.parts.iter().map(|&(d, c)| d * c as u64).sum()
    }

    pub fn coins(&self) -> u64 {
        self.parts.iter().map(|&(_, c)| c as u64).sum()
    }

    pub fn count_of(&self, denomination: u64) -> u32 {
        self.parts.iter().find(|p| p.0 == denomination).map_or(0, |p| p.1)
    }

    /// Runs one spend per part with `V = count`, stopping at the first error.
    pub fn execute<T, E, F>(&self, mut spend: F) -> core::result::Result<Vec<T>, E>
    where
        F: FnMut(u64, u32) -> core::result::Result<T, E>,
    {
        self.parts.iter().map(|&(d, c)| spend(d, c)).collect()
    }
}

pub fn greedy_decompose(price: u64, denoms: &DenominationSet) -> Result<SpendPlan> {
    if price == 0 {
        return Err(Error::ZeroPrice);
    }
    let mut rest = price;
    let mut parts = Vec::new();
    for &d in denoms.0.iter().rev() {
        let c = rest / d;
        if c > 0 {
            parts.push((d, u32::try_from(c).map_err(|_| Error::OracleRange(price))?));
            rest -= c * d;
        }
    }
    Ok(SpendPlan { parts })
}

fn greedy_count(mut price: u64, denoms: &[u64]) -> u64 {
    let mut n = 0;
    for &d in denoms.iter().rev() {
        n += price / d;
        price %= d;
    }
    n
}

/// Exact mean `coins / prices`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Average {
    pub coins: u64,
    pub prices: u64,
}

impl Average {
    pub fn as_f64(self) -> f64 {
        self.coins as f64 / self.prices as f64
    }

    /// Rounded to one decimal, half up, as an integer count of tenths.
    pub fn tenths(self) -> u64 {
        (self.coins * 20 + self.prices) / (self.prices * 2)
    }
}

impl core::fmt::Display for Average {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let t = self.tenths();
        write!(f, "{}.{}", t / 10, t % 10)
    }
}

/// Mean greedy coin count over prices `1..=p_max`.
pub fn average_coins(denoms: &DenominationSet, p_max: u64) -> Result<Average> {
    if p_max == 0 {
        return Err(Error::ZeroPrice);
    }
    let coins = (1..=p_max).map(|p| greedy_count(p, &denoms.0)).sum();
    Ok(Average { coins, prices: p_max })
}

/// Fewest coins that sum to `price`, by dynamic programming.
pub fn optimal_decompose_oracle(price: u64, denoms: &DenominationSet) -> Result<u32> {
    if price == 0 {
        return Err(Error::ZeroPrice);
    }
    if price > ORACLE_MAX {
        return Err(Error::OracleRange(price));
    }
    Ok(optimal_table(price, denoms)[price as usize])
}

/// `best[p]` for every `p ≤ max`.
pub fn optimal_table(max: u64, denoms: &DenominationSet) -> Vec<u32> {
    let mut best = vec![0u32; max as usize + 1];
    for p in 1..=max as usize {
        best[p] = denoms
            .0
            .iter()
            .take_while(|&&d| d as usize <= p)
            .map(|&d| best[p - d as usize] + 1)
            .min()
            .unwrap_or(u32::MAX);
    }
    best
}
