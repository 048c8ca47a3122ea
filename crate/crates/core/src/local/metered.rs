use std::cell::Cell;
use std::fmt;

use crate::error::{Error, Result};

/// Objective wrapper that counts every scalar evaluation and enforces an
/// optional hard cap.
pub struct MeteredObjective<'a> {
    target: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    used: Cell<usize>,
    cap: Option<usize>,
}

impl fmt::Debug for MeteredObjective<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeteredObjective")
            .field("used", &self.used.get())
            .field("cap", &self.cap)
            .finish()
    }
}

impl<'a> MeteredObjective<'a> {
    pub fn new(target: impl Fn(&[f64]) -> f64 + 'a) -> Self {
        Self {
            target: Box::new(target),
            used: Cell::new(0),
            cap: None,
        }
    }

    pub fn with_cap(target: impl Fn(&[f64]) -> f64 + 'a, cap: usize) -> Self {
        Self {
            cap: Some(cap),
            ..Self::new(target)
        }
    }

    /// Evaluates the target, or fails with [`Error::BudgetExhausted`] once the
    /// cap has been reached.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if self.remaining() == Some(0) {
            return Err(Error::BudgetExhausted);
        }
        self.used.set(self.used.get() + 1);
        Ok((self.target)(x))
    }

    pub fn evaluations_used(&self) -> usize {
        self.used.get()
    }

    pub fn evaluation_cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn remaining(&self) -> Option<usize> {
        self.cap.map(|c| c.saturating_sub(self.used.get()))
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == Some(0)
    }

    /// A view that additionally stops after `limit` further evaluations.
    pub(crate) fn scoped(&self, limit: Option<usize>) -> Scoped<'_, 'a> {
        Scoped {
            obj: self,
            start: self.used.get(),
            limit: limit.unwrap_or(usize::MAX),
        }
    }
}

/// Anything that evaluates the objective under a budget.
pub(crate) trait Oracle {
    fn eval(&self, x: &[f64]) -> Result<f64>;
    fn remaining(&self) -> usize;
}

impl Oracle for MeteredObjective<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        MeteredObjective::eval(self, x)
    }

    fn remaining(&self) -> usize {
        MeteredObjective::remaining(self).unwrap_or(usize::MAX)
    }
}

/// Per-run budget on top of the global one.
pub(crate) struct Scoped<'m, 'a> {
    obj: &'m MeteredObjective<'a>,
    start: usize,
    limit: usize,
}

impl Scoped<'_, '_> {
    pub(crate) fn spent(&self) -> usize {
        self.obj.evaluations_used() - self.start
    }

    /// The global budget, not the per-run limit, is the tighter one.
    pub(crate) fn global_binding(&self) -> bool {
        let local = self.limit.saturating_sub(self.spent());
        Oracle::remaining(self.obj) < local
    }
}

impl Oracle for Scoped<'_, '_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        if self.spent() >= self.limit {
            return Err(Error::BudgetExhausted);
        }
        self.obj.eval(x)
    }

    fn remaining(&self) -> usize {
        let local = self.limit.saturating_sub(self.spent());
        local.min(Oracle::remaining(self.obj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_caps() {
        let f = MeteredObjective::with_cap(|x: &[f64]| x[0] * 2.0, 3);
        assert_eq!(f.eval(&[1.0]).unwrap(), 2.0);
        f.eval(&[1.0]).unwrap();
        f.eval(&[1.0]).unwrap();
        assert!(f.is_exhausted());
        assert!(matches!(f.eval(&[1.0]), Err(Error::BudgetExhausted)));
        assert_eq!(f.evaluations_used(), 3);
    }

    #[test]
    fn scoped_limit_is_independent() {
        let f = MeteredObjective::with_cap(|_: &[f64]| 0.0, 10);
        f.eval(&[0.0]).unwrap();
        let s = f.scoped(Some(2));
        assert_eq!(s.remaining(), 2);
        s.eval(&[0.0]).unwrap();
        s.eval(&[0.0]).unwrap();
        assert!(s.eval(&[0.0]).is_err());
        assert_eq!(f.evaluations_used(), 3);
        let s = f.scoped(None);
        assert_eq!(s.remaining(), 7);
    }
}
