//! Hard-decision BI-AWGN channel family and Monte-Carlo transmission.
//!
//! BPSK over AWGN with a hard decision at the receiver is a BSC with
//! crossover `p_ch = Q(sqrt(zeta * P_T / sigma_z^2))`. A BSC(p) is also a
//! stochastically degraded BEC(2p): erase with probability `2p` and fill
//! erasures with a fair coin. Both channels are provided, plus the block
//! error estimator used to confront coders with the lower bounds.
//!
//! All entropies and logarithms are base 2. Every Monte-Carlo path is
//! deterministic given its seed: per-trial generators derive from
//! `(master seed, trial index)`, so parallel execution is bit-identical to
//! sequential.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("crossover probability must lie in [0, 1/2], got {0}")]
    InvalidCrossover(f64),
    #[error("invalid channel parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("code parameters must satisfy 1 <= k <= n, got k={k}, n={n}")]
    InvalidCode { k: usize, n: usize },
    #[error("at least one trial is required")]
    NoTrials,
}

/// Gaussian tail probability `Q(x)`, via the complementary error function.
///
/// `Q(x) = erfc(x / sqrt(2)) / 2`. The libm `erfc` is accurate to about
/// 1 ulp, so the absolute error is far below 1e-12 anywhere on `|x| <= 8`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// AWGN channel description: path loss, noise variance, transmit power,
/// and channel uses per second.
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams {
    pub zeta: f64,
    pub sigma2: f64,
    pub p_t: f64,
    pub w: f64,
}

impl ChannelParams {
    pub fn new(zeta: f64, sigma2: f64, p_t: f64, w: f64) -> Result<Self, ChannelError> {
        let check = |name: &'static str, value: f64, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(ChannelError::InvalidParameter { name, value })
            }
        };
        check("zeta", zeta, zeta > 0.0 && zeta.is_finite())?;
        check("sigma2", sigma2, sigma2 > 0.0 && sigma2.is_finite())?;
        check("p_t", p_t, p_t >= 0.0 && p_t.is_finite())?;
        check("w", w, w > 0.0 && w.is_finite())?;
        Ok(Self {
            zeta,
            sigma2,
            p_t,
            w,
        })
    }

    /// Hard-decision crossover probability `Q(sqrt(zeta P_T / sigma^2))`,
    /// in `(0, 1/2]` for `P_T >= 0`.
    pub fn p_ch(&self) -> f64 {
        q_function((self.zeta * self.p_t / self.sigma2).sqrt())
    }
}

/// Block code dimensions: `k` information bits in blocks of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    pub k: usize,
    pub n: usize,
}

impl CodeParams {
    pub fn new(k: usize, n: usize) -> Result<Self, ChannelError> {
        if k < 1 || k > n {
            return Err(ChannelError::InvalidCode { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// BSC capacity `1 - h_b(p)` in bits per use.
pub fn bsc_capacity(p: f64) -> f64 {
    1.0 - binary_entropy(p)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed for a derived stream: `hash(master_seed, stream)`.
pub fn derive_seed(master_seed: u64, stream: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream))
}

/// Deterministic per-trial generator: `hash(master_seed, trial_index)`.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master_seed, trial_index))
}

fn check_crossover(p: f64) -> Result<(), ChannelError> {
    if !(0.0..=0.5).contains(&p) {
        return Err(ChannelError::InvalidCrossover(p));
    }
    Ok(())
}

pub(crate) fn flip_with_rng(bits: &[u8], p: f64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    bits.iter()
        .map(|&b| if rng.random::<f64>() < p { b ^ 1 } else { b })
        .collect()
}

/// BSC(p): flips each bit independently with probability `p`.
pub fn transmit_bsc(codeword: &[u8], p: f64, seed: u64) -> Result<Vec<u8>, ChannelError> {
    check_crossover(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(flip_with_rng(codeword, p, &mut rng))
}

/// BEC(2p) followed by a fair-coin fill of every erasure.
///
/// The returned mask marks the erased positions. The marginal law of the
/// output equals BSC(p): each bit is erased with probability `2p` and the
/// fill disagrees with it half the time.
pub fn transmit_bec_then_fill(
    codeword: &[u8],
    p: f64,
    seed: u64,
) -> Result<(Vec<u8>, Vec<bool>), ChannelError> {
    check_crossover(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(codeword.len());
    let mut mask = Vec::with_capacity(codeword.len());
    for &b in codeword {
        let erased = rng.random::<f64>() < 2.0 * p;
        mask.push(erased);
        if erased {
            out.push(rng.random::<bool>() as u8);
        } else {
            out.push(b);
        }
    }
    Ok((out, mask))
}

/// Result of a Monte-Carlo block-error run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub trials: u64,
    pub errors: u64,
    pub eps_hat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// 95% two-sided normal quantile used for the Wilson interval.
pub const WILSON_Z95: f64 = 1.959963984540054;

/// Wilson score interval for a binomial proportion. Valid at small counts,
/// which dominate at low block-error rates.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p_hat = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The endpoints are exact at the degenerate counts; rounding in the
    // square root must not move them off 0 or 1.
    let lo = if errors == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if errors == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// A block encoder/decoder pair that the channel can drive.
///
/// Decoding is deterministic in the received word; all randomness lives in
/// the per-trial generators.
pub trait BlockCoder: Sync {
    fn code(&self) -> CodeParams;
    fn encode(&self, info: &[u8]) -> Vec<u8>;
    fn decode(&self, received: &[u8]) -> Vec<u8>;
}

/// Estimates the average block-error probability of `coder` over BSC(p).
///
/// Each trial draws `k` fair information bits, transmits the codeword, and
/// counts a block error if any decoded bit mismatches. Trials run in
/// parallel with per-trial seeds, bit-identical to a sequential run.
pub fn estimate_block_error<C: BlockCoder>(
    coder: &C,
    p: f64,
    trials: u64,
    master_seed: u64,
) -> Result<BerEstimate, ChannelError> {
    check_crossover(p)?;
    if trials == 0 {
        return Err(ChannelError::NoTrials);
    }
    let k = coder.code().k;
    let errors = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            let info: Vec<u8> = (0..k).map(|_| rng.random::<bool>() as u8).collect();
            let codeword = coder.encode(&info);
            let received = flip_with_rng(&codeword, p, &mut rng);
            let decoded = coder.decode(&received);
            u64::from(decoded != info)
        })
        .sum();
    let (wilson_lo, wilson_hi) = wilson_interval(errors, trials, WILSON_Z95);
    Ok(BerEstimate {
        trials,
        errors,
        eps_hat: errors as f64 / trials as f64,
        wilson_lo,
        wilson_hi,
    })
}
