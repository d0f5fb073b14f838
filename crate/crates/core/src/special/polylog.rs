use super::NeumaierSum;
use crate::error::{Error, Result};

const MAX_TERMS: u64 = 100_000_000;

/// Riemann zeta for s > 1: direct sum up to N-1 plus an Euler-Maclaurin tail.
pub fn zeta(s: u32) -> Result<f64> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!("zeta({s}) diverges")));
    }
    const N: u32 = 64;
    let sf = f64::from(s);
    let mut acc = NeumaierSum::new();
    // Smallest terms first.
    for n in (1..N).rev() {
        acc += f64::from(n).powf(-sf);
    }
    let nf = f64::from(N);
    let p = nf.powf(-sf);
    // Bernoulli corrections B2/2!, B4/4!, B6/6! applied to derivatives of n^-s.
    let d1 = sf / nf;
    let d3 = sf * (sf + 1.0) * (sf + 2.0) / nf.powi(3);
    let d5 = d3 * (sf + 3.0) * (sf + 4.0) / (nf * nf);
    acc += p * (nf / (sf - 1.0) + 0.5 + d1 / 12.0 - d3 / 720.0 + d5 / 30240.0);
    Ok(acc.value())
}

/// Polylogarithm Li_s(z) for real z in [0, 1].
pub fn li(s: u32, z: f64) -> Result<f64> {
    if s < 1 {
        return Err(Error::InvalidArgument(format!("Li_{s} needs s >= 1")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidArgument(format!("Li_s argument {z} outside [0, 1]")));
    }
    if z == 1.0 {
        return zeta(s);
    }
    if s == 1 {
        return Ok(-(-z).ln_1p());
    }
    let sf = f64::from(s);
    let mut acc = NeumaierSum::new();
    let mut zn = 1.0;
    for n in 1..=MAX_TERMS {
        zn *= z;
        let term = zn / (n as f64).powf(sf);
        acc += term;
        if term <= 1e-17 * acc.value() {
            return Ok(acc.value());
        }
    }
    Err(Error::SeriesNotConverged {
        terms: MAX_TERMS,
        partial_sum: acc.value(),
    })
}
