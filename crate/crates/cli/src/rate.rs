//! Classical data-rate arithmetic, exact: bits_per_cell × cells of one
//! cross-section divided by the time to consume one cell layer. Inputs
//! arrive as decimal strings ("1e9", "30e-9", "0.5") and are carried as
//! u128 rationals so the headline numbers come out exact, not rounded.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateError {
    /// Inputs must be positive.
    NonPositive,
    /// Not a decimal number (digits, optional '.', optional e±exp).
    Malformed,
    /// Magnitude exceeds u128 bookkeeping.
    Overflow,
}

impl fmt::Display for RateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateError::NonPositive => write!(f, "value must be positive"),
            RateError::Malformed => write!(f, "not a decimal number"),
            RateError::Overflow => write!(f, "value too large for exact arithmetic"),
        }
    }
}

impl std::error::Error for RateError {}

/// Exact nonnegative rational, always kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Rational {
    pub fn new(num: u128, den: u128) -> Result<Self, RateError> {
        if den == 0 {
            return Err(RateError::NonPositive);
        }
        let g = gcd(num, den);
        Ok(Rational { num: num / g, den: den / g })
    }

    pub fn from_integer(n: u128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn checked_mul(self, other: Rational) -> Result<Rational, RateError> {
        // Cross-reduce before multiplying to keep intermediates small.
        let g1 = gcd(self.num, other.den);
        let g2 = gcd(other.num, self.den);
        let num = (self.num / g1).checked_mul(other.num / g2).ok_or(RateError::Overflow)?;
        let den = (self.den / g2).checked_mul(other.den / g1).ok_or(RateError::Overflow)?;
        Rational::new(num, den)
    }

    pub fn reciprocal(self) -> Result<Rational, RateError> {
        if self.num == 0 {
            return Err(RateError::NonPositive);
        }
        Ok(Rational { num: self.den, den: self.num })
    }

    /// Exact integer value, if the rational is one.
    pub fn as_integer(&self) -> Option<u128> {
        (self.den == 1).then_some(self.num)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            // Exact decimal expansion when the denominator is 2^a·5^b,
            // otherwise the reduced fraction.
            let (mut d, mut twos, mut fives) = (self.den, 0u32, 0u32);
            while d % 2 == 0 {
                d /= 2;
                twos += 1;
            }
            while d % 5 == 0 {
                d /= 5;
                fives += 1;
            }
            if d == 1 {
                let digits = twos.max(fives);
                let scale = 10u128.pow(digits);
                if let Some(scaled) = self.num.checked_mul(scale / self.den) {
                    let (int, frac) = (scaled / scale, scaled % scale);
                    let frac = format!("{frac:0width$}", width = digits as usize);
                    return write!(f, "{int}.{}", frac.trim_end_matches('0'));
                }
            }
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Parse a positive decimal like "30e-9", "1e9", "0.5", "6".
pub fn parse_decimal(s: &str) -> Result<Rational, RateError> {
    let s = s.trim();
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| RateError::Malformed)?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(RateError::Malformed);
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(RateError::Malformed);
    }
    let digits = format!("{int_part}{frac_part}");
    let num: u128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| RateError::Overflow)?
    };
    let exp = exp - frac_part.len() as i32;
    let pow = 10u128
        .checked_pow(exp.unsigned_abs())
        .ok_or(RateError::Overflow)?;
    if exp >= 0 {
        Rational::new(num.checked_mul(pow).ok_or(RateError::Overflow)?, 1)
    } else {
        Rational::new(num, pow)
    }
}

/// bits/second = bits_per_cell × cells_per_cross_section / seconds_per_cell_layer.
pub fn data_rate(
    cells_per_cross_section: Rational,
    bits_per_cell: Rational,
    seconds_per_cell_layer: Rational,
) -> Result<Rational, RateError> {
    for v in [cells_per_cross_section, bits_per_cell, seconds_per_cell_layer] {
        if v.is_zero() {
            return Err(RateError::NonPositive);
        }
    }
    cells_per_cross_section
        .checked_mul(bits_per_cell)?
        .checked_mul(seconds_per_cell_layer.reciprocal()?)
}
