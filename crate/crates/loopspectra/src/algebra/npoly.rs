use num_rational::Ratio;
use std::fmt;
use std::ops::{Add, Mul};

/// A polynomial in the loop fugacity `n` with exact rational coefficients.
///
/// Generator actions of the diagram algebras have coefficients in
/// `ℤ[n]·z^k`; with the seam phase specialized to `z ∈ {+1, −1}` every
/// relation check can therefore be run in exact arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct NPoly(Vec<Ratio<i64>>);

impl NPoly {
    pub fn zero() -> Self {
        NPoly(Vec::new())
    }

    pub fn one() -> Self {
        NPoly(vec![Ratio::new(1, 1)])
    }

    pub fn constant(c: Ratio<i64>) -> Self {
        if c == Ratio::new(0, 1) {
            Self::zero()
        } else {
            NPoly(vec![c])
        }
    }

    /// The monomial `c·n^k`.
    pub fn monomial(c: Ratio<i64>, k: usize) -> Self {
        if c == Ratio::new(0, 1) {
            return Self::zero();
        }
        let mut v = vec![Ratio::new(0, 1); k + 1];
        v[k] = c;
        NPoly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == Ratio::new(0, 1))
    }

    /// Multiply by `n^k`.
    pub fn mul_n_pow(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Ratio::new(0, 1); k];
        v.extend_from_slice(&self.0);
        NPoly(v)
    }

    pub fn scale(&self, c: Ratio<i64>) -> Self {
        NPoly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * n + (*c.numer() as f64) / (*c.denom() as f64))
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&Ratio::new(0, 1)) {
            self.0.pop();
        }
        self
    }
}

impl Add for NPoly {
    type Output = NPoly;
    fn add(self, rhs: NPoly) -> NPoly {
        let len = self.0.len().max(rhs.0.len());
        let mut v = vec![Ratio::new(0, 1); len];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in rhs.0.iter().enumerate() {
            v[i] += c;
        }
        NPoly(v).trimmed()
    }
}

impl Mul for NPoly {
    type Output = NPoly;
    fn mul(self, rhs: NPoly) -> NPoly {
        if self.is_zero() || rhs.is_zero() {
            return NPoly::zero();
        }
        let mut v = vec![Ratio::new(0, 1); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        NPoly(v).trimmed()
    }
}

impl fmt::Debug for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Ratio::new(0, 1))
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*n"),
                _ => format!("{c}*n^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
