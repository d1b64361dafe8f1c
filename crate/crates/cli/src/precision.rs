//! Fixed-point evaluation of `m(q) = θ₃(π/2, q)` where the double-precision
//! series cancels to nothing.

use num_bigint::{BigInt, Sign};
use serde::Serialize;

use crate::CliError;

/// Environment variable overriding the working precision in bits.
pub const PRECISION_ENV: &str = "MEANREFINE_PRECISION_BITS";
pub const DEFAULT_BITS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedMin {
    pub q: String,
    pub log10_min: f64,
    pub precision_bits: u64,
    pub terms: usize,
    /// Bits of the fixed-point result above the rounding floor.
    pub significant_bits: u64,
}

/// Working precision: [`PRECISION_ENV`] if set, else [`DEFAULT_BITS`].
pub fn precision_bits() -> Result<u64, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&b| b >= 64)
            .ok_or_else(|| CliError::Usage(format!("{PRECISION_ENV} must be an integer ≥ 64, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BITS),
    }
}

/// `q` as an exact fraction from its decimal text.
fn decimal_fraction(text: &str) -> Result<(BigInt, BigInt), CliError> {
    let bad = || CliError::Usage(format!("q must be a plain decimal in (0, 1), got {text:?}"));
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    if num.sign() != Sign::Plus || num >= den {
        return Err(bad());
    }
    Ok((num, den))
}

/// `log₁₀ m(q)` from `1 + 2Σ(-1)^k q^{k²}` summed in fixed point with
/// `bits` fractional bits. `q_text` is read as an exact decimal.
pub fn theta_min_log10(q_text: &str, bits: u64) -> Result<ExtendedMin, CliError> {
    let (num, den) = decimal_fraction(q_text)?;
    let one = BigInt::from(1u32) << bits;
    let q = (&num << bits) / &den;
    let q2 = (&q * &q) >> bits;
    // t = q^{k²}, r = q^{2k+1}, both scaled by 2^bits
    let mut t = one.clone();
    let mut r = q.clone();
    let mut sum = one.clone();
    let mut k = 0usize;
    loop {
        t = (&t * &r) >> bits;
        r = (&r * &q2) >> bits;
        k += 1;
        if t.sign() == Sign::NoSign {
            break;
        }
        if k % 2 == 1 {
            sum -= &t << 1;
        } else {
            sum += &t << 1;
        }
    }
    // each truncation costs at most one unit in the last place
    let noise_bits = (3 * k as u64).ilog2() as u64 + 1;
    if sum.sign() != Sign::Plus || sum.bits() < noise_bits + 64 {
        return Err(CliError::Domain(format!(
            "{bits} bits are not enough to resolve m({q_text}); raise {PRECISION_ENV}"
        )));
    }
    let top = sum.bits();
    let shift = top - 64;
    let mant = u64::try_from(&sum >> shift).expect("64 leading bits") as f64;
    let log10 = mant.log10() + (shift as f64 - bits as f64) * std::f64::consts::LOG10_2;
    Ok(ExtendedMin {
        q: q_text.into(),
        log10_min: log10,
        precision_bits: bits,
        terms: k,
        significant_bits: top - noise_bits,
    })
}
