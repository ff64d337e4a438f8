//! Exact binomial coefficients.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)` by the multiplicative formula. Each partial product is itself a
/// binomial coefficient, so every division is exact.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Walks the row `C(n, 0), C(n, 1), ...` one entry at a time.
#[derive(Clone, Debug)]
pub struct BinomialRow {
    n: u64,
    k: u64,
    current: BigUint,
}

impl BinomialRow {
    pub fn new(n: u64) -> Self {
        BinomialRow {
            n,
            k: 0,
            current: BigUint::one(),
        }
    }

    /// `C(n, k)` for the current `k`.
    pub fn value(&self) -> &BigUint {
        &self.current
    }

    pub fn advance(&mut self) {
        if self.k >= self.n {
            self.current = BigUint::zero();
        } else {
            self.current *= self.n - self.k;
            self.current /= self.k + 1;
        }
        self.k += 1;
    }
}

/// `sum_{x=0}^{upto} C(n, x)`.
pub fn partial_row_sum(n: u64, upto: u64) -> BigUint {
    let upto = upto.min(n);
    if upto == n {
        return BigUint::one() << n;
    }
    let mut row = BinomialRow::new(n);
    let mut sum = BigUint::zero();
    for _ in 0..=upto {
        sum += row.value();
        row.advance();
    }
    sum
}
