//! Exact rational amounts for valuations, prices and transfers.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::Error;

/// Most fractional digits accepted when parsing a decimal literal.
pub const MAX_FRACTION_DIGITS: usize = 12;

/// An exact rational number.
///
/// Every equality test in the checkers (common price, zero transfer, constant
/// price per trader set) is exact, so money and valuations never go through
/// binary floating point.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Amount(Ratio<i128>);

impl Amount {
    pub const ZERO: Amount = Amount(Ratio::new_raw(0, 1));
    pub const ONE: Amount = Amount(Ratio::new_raw(1, 1));
    pub const HALF: Amount = Amount(Ratio::new_raw(1, 2));

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: i128, denom: i128) -> Self {
        Amount(Ratio::new(numer, denom))
    }

    pub fn from_int(value: i64) -> Self {
        Amount(Ratio::from_integer(value as i128))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Amount(self.0.abs())
    }

    /// True for values in the closed unit interval.
    pub fn is_unit(&self) -> bool {
        *self >= Amount::ZERO && *self <= Amount::ONE
    }

    pub fn midpoint(self, other: Amount) -> Amount {
        Amount((self.0 + other.0) / 2)
    }

    /// Multiplies by a non-negative integer.
    pub fn times(self, k: usize) -> Amount {
        Amount(self.0 * k as i128)
    }

    /// Lossy conversion for display and benchmarks only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Terminating decimal expansion, if the denominator has no prime factors
    /// other than 2 and 5.
    fn decimal_digits(&self) -> Option<String> {
        let mut den = self.denom();
        let (mut twos, mut fives) = (0u32, 0u32);
        while den % 2 == 0 {
            den /= 2;
            twos += 1;
        }
        while den % 5 == 0 {
            den /= 5;
            fives += 1;
        }
        if den != 1 {
            return None;
        }
        let scale = twos.max(fives);
        let factor = 10i128.checked_pow(scale)?;
        let scaled = self.numer().checked_mul(factor / self.denom())?;
        let negative = scaled < 0;
        let digits = scaled.unsigned_abs().to_string();
        let scale = scale as usize;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if scale == 0 {
            out.push_str(&digits);
        } else if digits.len() <= scale {
            out.push_str("0.");
            out.push_str(&"0".repeat(scale - digits.len()));
            out.push_str(&digits);
        } else {
            let (int, frac) = digits.split_at(digits.len() - scale);
            out.push_str(int);
            out.push('.');
            out.push_str(frac);
        }
        Some(out)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_digits() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.numer(), self.denom()),
        }
    }
}

impl fmt::Debug for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Amount {
    type Err = Error;

    /// Accepts decimal literals (`0.35`, `-1`, `.5`) and fractions (`1/3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(format!("invalid number `{s}`"));
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Amount::new(n, d));
        }
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > MAX_FRACTION_DIGITS || int.len() > 18 {
            return Err(Error::Parse(format!(
                "`{s}` exceeds the supported precision ({MAX_FRACTION_DIGITS} fractional digits)"
            )));
        }
        let digits = format!("{int}{frac}");
        let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        let denom = 10i128.pow(frac.len() as u32);
        let value = Amount::new(numer, denom);
        Ok(if negative { -value } else { value })
    }
}

impl Add for Amount {
    type Output = Amount;
    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0 + rhs.0)
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        self.0 += rhs.0;
    }
}

impl Sub for Amount {
    type Output = Amount;
    fn sub(self, rhs: Amount) -> Amount {
        Amount(self.0 - rhs.0)
    }
}

impl Mul for Amount {
    type Output = Amount;
    fn mul(self, rhs: Amount) -> Amount {
        Amount(self.0 * rhs.0)
    }
}

impl Neg for Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount(-self.0)
    }
}

impl Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        iter.fold(Amount::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Amount> for Amount {
    fn sum<I: Iterator<Item = &'a Amount>>(iter: I) -> Amount {
        iter.copied().sum()
    }
}

/// Parses a decimal literal, panicking on malformed input. Intended for
/// constants in tests and examples.
pub fn dec(s: &str) -> Amount {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}
