//! Index rules of the form `c · n^p · bⁿ · (ln n)^q`.
//!
//! Every tail family is a pair of such rules (value and weight), which keeps
//! convergence of every series we need decidable by the classical
//! ratio/Cauchy-condensation comparisons.

/// `coef · n^n_pow · base^n · (ln n)^ln_pow`, with `coef > 0`, `base > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub n_pow: f64,
    pub base: f64,
    pub ln_pow: f64,
}

/// Behaviour of a positive sequence as n → ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Zero,
    Infinity,
    Constant(f64),
}

/// Convergence class of Σ of a positive sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesClass {
    /// Terms decay at least geometrically.
    Geometric,
    /// Converges, but only polynomially (or slower).
    Convergent,
    Divergent,
}

impl SeriesClass {
    pub fn converges(self) -> bool {
        !matches!(self, SeriesClass::Divergent)
    }
}

/// Which factor of `ln x(n)` dominates as n → ∞, with its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogGrowth {
    /// `n · ln b`, b ≠ 1.
    Linear(f64),
    /// `p · ln n`.
    Log(f64),
    /// `q · ln ln n`.
    LogLog(f64),
    /// `ln c`; the sequence is constant.
    Constant(f64),
}

impl LogGrowth {
    /// Sign of ln x(n) for large n (0 only for the constant sequence 1).
    pub fn sign(self) -> f64 {
        let v = match self {
            LogGrowth::Linear(v) | LogGrowth::Log(v) | LogGrowth::LogLog(v) | LogGrowth::Constant(v) => v,
        };
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        coef: 1.0,
        n_pow: 0.0,
        base: 1.0,
        ln_pow: 0.0,
    };

    pub fn new(coef: f64, n_pow: f64, base: f64, ln_pow: f64) -> Self {
        Self {
            coef,
            n_pow,
            base,
            ln_pow,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self { coef: c, ..Self::ONE }
    }

    pub fn is_well_formed(&self) -> bool {
        self.coef.is_finite()
            && self.coef > 0.0
            && self.base.is_finite()
            && self.base > 0.0
            && self.n_pow.is_finite()
            && self.ln_pow.is_finite()
    }

    /// Smallest admissible index (the log factor needs n ≥ 2).
    pub fn min_index(&self) -> u64 {
        if self.ln_pow != 0.0 {
            2
        } else {
            1
        }
    }

    /// ln of the rule evaluated at `x = exp(ln_x)`. Works for `x` far beyond the
    /// f64 range, which the remainder integrals need.
    pub fn ln_at_ln(&self, ln_x: f64) -> f64 {
        let mut v = self.coef.ln();
        if self.n_pow != 0.0 {
            v += self.n_pow * ln_x;
        }
        if self.base != 1.0 {
            v += ln_x.exp() * self.base.ln();
        }
        if self.ln_pow != 0.0 {
            v += self.ln_pow * ln_x.ln();
        }
        v
    }

    pub fn ln_at(&self, x: f64) -> f64 {
        self.ln_at_ln(x.ln())
    }

    pub fn at(&self, x: f64) -> f64 {
        self.ln_at(x).exp()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            coef: self.coef * other.coef,
            n_pow: self.n_pow + other.n_pow,
            base: self.base * other.base,
            ln_pow: self.ln_pow + other.ln_pow,
        }
    }

    pub fn powf(&self, p: f64) -> Monomial {
        Monomial {
            coef: self.coef.powf(p),
            n_pow: self.n_pow * p,
            base: self.base.powf(p),
            ln_pow: self.ln_pow * p,
        }
    }

    pub fn scaled(&self, factor: f64) -> Monomial {
        Monomial {
            coef: self.coef * factor,
            ..*self
        }
    }

    pub fn is_constant(&self) -> bool {
        self.n_pow == 0.0 && self.base == 1.0 && self.ln_pow == 0.0
    }

    pub fn growth(&self) -> LogGrowth {
        if self.base != 1.0 {
            LogGrowth::Linear(self.base.ln())
        } else if self.n_pow != 0.0 {
            LogGrowth::Log(self.n_pow)
        } else if self.ln_pow != 0.0 {
            LogGrowth::LogLog(self.ln_pow)
        } else {
            LogGrowth::Constant(self.coef.ln())
        }
    }

    pub fn limit(&self) -> Limit {
        match self.growth() {
            LogGrowth::Constant(_) => Limit::Constant(self.coef),
            g if g.sign() > 0.0 => Limit::Infinity,
            _ => Limit::Zero,
        }
    }

    /// Convergence of Σₙ of this rule.
    pub fn series(&self) -> SeriesClass {
        if self.base < 1.0 {
            return SeriesClass::Geometric;
        }
        if self.base > 1.0 {
            return SeriesClass::Divergent;
        }
        if self.n_pow < -1.0 {
            SeriesClass::Convergent
        } else if self.n_pow > -1.0 {
            SeriesClass::Divergent
        } else if self.ln_pow < -1.0 {
            SeriesClass::Convergent
        } else {
            SeriesClass::Divergent
        }
    }

    /// Convergence of Σ rule(n) · |ln x(n)| where `x` has the given log growth.
    /// A `ln ln n` factor never changes the verdict of a series whose terms
    /// carry a polynomial or geometric factor, and at the boundary
    /// `1/(n ln^q n)` the extra `ln ln n` keeps convergence for q > 1 and
    /// divergence for q ≤ 1.
    pub fn series_times_log(&self, growth: LogGrowth) -> SeriesClass {
        match growth {
            LogGrowth::Linear(_) => Monomial {
                n_pow: self.n_pow + 1.0,
                ..*self
            }
            .series(),
            LogGrowth::Log(_) => Monomial {
                ln_pow: self.ln_pow + 1.0,
                ..*self
            }
            .series(),
            LogGrowth::LogLog(_) => self.series(),
            LogGrowth::Constant(0.0) => SeriesClass::Geometric,
            LogGrowth::Constant(_) => self.series(),
        }
    }

    /// An index beyond which `n ↦ rule(n)` is monotone (or constant).
    /// Derived from d/dx ln rule = p/x + ln b + q/(x ln x).
    pub fn monotone_from(&self) -> u64 {
        let p = self.n_pow.abs();
        let q = self.ln_pow.abs();
        let lb = self.base.ln().abs();
        let bound = if self.base != 1.0 {
            (p + q) / lb
        } else if self.n_pow != 0.0 {
            (q / p).min(40.0).exp()
        } else {
            0.0
        };
        (bound.ceil().min(1e12) as u64 + 3).max(self.min_index())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(Monomial::new(1.0, -2.0, 1.0, 0.0).series(), SeriesClass::Convergent);
        assert_eq!(Monomial::new(1.0, -1.0, 1.0, 0.0).series(), SeriesClass::Divergent);
        assert_eq!(Monomial::new(1.0, -1.0, 1.0, -2.0).series(), SeriesClass::Convergent);
        assert_eq!(Monomial::new(1.0, -1.0, 1.0, -1.0).series(), SeriesClass::Divergent);
        assert_eq!(Monomial::new(1.0, 5.0, 0.5, 0.0).series(), SeriesClass::Geometric);
        assert_eq!(Monomial::new(1.0, -5.0, 2.0, 0.0).series(), SeriesClass::Divergent);
    }

    #[test]
    fn growth_order() {
        let t = Monomial::new(1.0, -2.0, 2.0, 0.0);
        assert_eq!(t.growth(), LogGrowth::Linear(2f64.ln()));
        assert_eq!(t.limit(), Limit::Infinity);
        let t = Monomial::new(1.0, -1.0, 1.0, -2.0);
        assert_eq!(t.growth(), LogGrowth::Log(-1.0));
        assert_eq!(t.limit(), Limit::Zero);
        assert_eq!(Monomial::constant(3.0).limit(), Limit::Constant(3.0));
    }

    #[test]
    fn entropy_summand_of_inverse_log_square() {
        // t = 1/(n ln² n), w = 1: Σ t w |ln t| ~ Σ 1/(n ln n) diverges.
        let t = Monomial::new(1.0, -1.0, 1.0, -2.0);
        assert_eq!(t.series_times_log(t.growth()), SeriesClass::Divergent);
        assert_eq!(t.series(), SeriesClass::Convergent);
    }

    #[test]
    fn evaluation_in_log_space() {
        let m = Monomial::new(2.0, -2.0, 0.5, 1.0);
        let n: f64 = 7.0;
        let direct = 2.0 * n.powi(-2) * 0.5f64.powi(7) * n.ln();
        assert!((m.at(n) - direct).abs() < 1e-15);
        // Far beyond f64 range of n itself.
        let huge = Monomial::new(1.0, -1.0, 1.0, -2.0).ln_at_ln(1e6);
        assert!((huge - (-1e6 - 2.0 * 1e6f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn monotone_index_is_valid() {
        let m = Monomial::new(1.0, -2.0, 2.0, 0.0); // 2ⁿ/n² decreases until n = 2
        let k = m.monotone_from();
        for n in k..k + 50 {
            assert!(m.at(n as f64 + 1.0) > m.at(n as f64));
        }
    }
}
