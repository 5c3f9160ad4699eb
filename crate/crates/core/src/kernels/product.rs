use crate::error::{Error, Result};

use super::univariate::UnivariateKernel;

/// `χ(u) = ∏ χ_i(u_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductKernel {
    factors: Vec<UnivariateKernel>,
}

impl ProductKernel {
    pub fn new(factors: Vec<UnivariateKernel>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product kernel needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    /// The same factor on every axis.
    pub fn replicate(factor: UnivariateKernel, n: usize) -> Result<Self> {
        Self::new(vec![factor; n])
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[UnivariateKernel] {
        &self.factors
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.factors.len());
        let mut acc = 1.0;
        for (k, &x) in self.factors.iter().zip(u) {
            acc *= k.eval(x);
            if acc == 0.0 {
                break;
            }
        }
        acc
    }

    pub fn is_compact(&self) -> bool {
        self.factors.iter().all(|k| k.support().is_some())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.factors.iter().all(UnivariateKernel::is_nonnegative)
    }

    pub fn id(&self) -> String {
        let first = self.factors[0].id();
        if self.factors.iter().all(|k| k.id() == first) {
            first
        } else {
            self.factors.iter().map(UnivariateKernel::id).collect::<Vec<_>>().join("*")
        }
    }
}
