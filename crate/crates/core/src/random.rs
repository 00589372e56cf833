//! Seeded sampling for random sweeps.
//!
//! The bit stream is xoshiro256** seeded from a `u64` through SplitMix64,
//! exactly as published by Blackman and Vigna. Everything layered on top is
//! implemented here rather than delegated to a distribution library, so the
//! samples for a given seed do not drift when dependencies are upgraded:
//!
//! | distribution          | algorithm                                                    |
//! |-----------------------|--------------------------------------------------------------|
//! | unit real `u`         | top 53 bits of one draw, times 2^-53, giving `[0, 1)`          |
//! | `Uniform(a, b)`       | `a + (b - a) * u`, redrawn if rounding lands on `b`            |
//! | `LogUniform(a, b)`    | `exp(ln a + (ln b - ln a) * u)`, redrawn if outside `[a, b)`   |
//! | `Normal(m, s)`        | Box–Muller cosine branch with `u1 = 1 - u`, `u2 = u` (two draws) |
//! | `IntegerUniform(a, b)` | rejection of draws below `2^64 mod n`, then `a + draw mod n`  |
//! | `Choice(options)`     | `IntegerUniform(0, len - 1)` as index                         |
//!
//! Transcendental functions come from `libm` (a port of musl's libm), not
//! the platform C library, so results are identical across targets.
//!
//! Within a sweep, sets are drawn in order and each set draws its
//! parameters in declaration order from a single stream.

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::error::{Error, Result};
use crate::value::ParameterValue;

/// Per-parameter sampling distribution for random sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Uniform {
        low: f64,
        high: f64,
    },
    LogUniform {
        low: f64,
        high: f64,
    },
    Normal {
        mean: f64,
        stddev: f64,
    },
    /// Both bounds inclusive.
    IntegerUniform {
        low: i64,
        high: i64,
    },
    Choice {
        options: Vec<ParameterValue>,
    },
}

impl Distribution {
    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        let d = Distribution::Uniform { low, high };
        d.validate()?;
        Ok(d)
    }

    pub fn log_uniform(low: f64, high: f64) -> Result<Self> {
        let d = Distribution::LogUniform { low, high };
        d.validate()?;
        Ok(d)
    }

    pub fn normal(mean: f64, stddev: f64) -> Result<Self> {
        let d = Distribution::Normal { mean, stddev };
        d.validate()?;
        Ok(d)
    }

    pub fn integer_uniform(low: i64, high: i64) -> Result<Self> {
        let d = Distribution::IntegerUniform { low, high };
        d.validate()?;
        Ok(d)
    }

    pub fn choice(options: Vec<ParameterValue>) -> Result<Self> {
        let d = Distribution::Choice { options };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        match *self {
            Distribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high && (high - low).is_finite())
                {
                    return bad(format!("uniform({low}, {high}) needs finite low < high"));
                }
            }
            Distribution::LogUniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && 0.0 < low && low < high) {
                    return bad(format!("log_uniform({low}, {high}) needs 0 < low < high"));
                }
            }
            Distribution::Normal { mean, stddev } => {
                if !(mean.is_finite() && stddev.is_finite() && stddev > 0.0) {
                    return bad(format!(
                        "normal({mean}, {stddev}) needs finite mean and stddev > 0"
                    ));
                }
            }
            Distribution::IntegerUniform { low, high } => {
                if low > high {
                    return bad(format!("int_uniform({low}, {high}) needs low <= high"));
                }
            }
            Distribution::Choice { ref options } => {
                if options.is_empty() {
                    return bad("choice needs at least one option".into());
                }
                if !options.iter().all(ParameterValue::is_finite) {
                    return bad("choice options must be finite".into());
                }
            }
        }
        Ok(())
    }
}

/// Deterministic generator behind random sweeps.
#[derive(Debug, Clone)]
pub struct SweepRng {
    inner: Xoshiro256StarStar,
}

impl SweepRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        SweepRng {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform real in `[0, 1)` with 53 bits of resolution.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        // Draws below 2^64 mod n would bias the low residues.
        let threshold = n.wrapping_neg() % n;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % n;
            }
        }
    }

    pub fn sample(&mut self, dist: &Distribution) -> ParameterValue {
        match *dist {
            Distribution::Uniform { low, high } => loop {
                let x = low + (high - low) * self.next_unit();
                if x < high {
                    return ParameterValue::Real(x);
                }
            },
            Distribution::LogUniform { low, high } => {
                let (ll, lh) = (libm::log(low), libm::log(high));
                loop {
                    let x = libm::exp(ll + (lh - ll) * self.next_unit());
                    if (low..high).contains(&x) {
                        return ParameterValue::Real(x);
                    }
                }
            }
            Distribution::Normal { mean, stddev } => {
                let u1 = 1.0 - self.next_unit();
                let u2 = self.next_unit();
                let z = libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(std::f64::consts::TAU * u2);
                ParameterValue::Real(mean + stddev * z)
            }
            Distribution::IntegerUniform { low, high } => {
                let span = (high as i128 - low as i128) as u128 + 1;
                let offset = if span > u64::MAX as u128 {
                    self.next_u64()
                } else {
                    self.below(span as u64)
                };
                ParameterValue::Integer(low.wrapping_add(offset as i64))
            }
            Distribution::Choice { ref options } => {
                let idx = self.below(options.len() as u64) as usize;
                options[idx].clone()
            }
        }
    }
}
