//! Shared helpers for the integration suites, deliberately independent of
//! the library's own numerics: a different RNG family and a different
//! normal transform, so cross-checks cannot inherit a library bug.
#![allow(dead_code)] // each integration binary compiles its own copy

/// xorshift64* — unrelated to the library's generator on purpose.
pub struct XorShiftStream {
    state: u64,
}

impl XorShiftStream {
    pub fn new(seed: u64) -> Self {
        XorShiftStream {
            state: seed | 1, // never all-zero
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Box–Muller via the sine branch (the library uses cosine).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).sin()
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Exact posterior draws of `(theta_true, g)` by rejection: propose from
/// the priors, accept with probability `exp(-z^2/2)` — the likelihood
/// over its maximum, a valid envelope.
pub fn rejection_sample(
    theta_obs: f64,
    s: f64,
    sigma_theta: f64,
    sigma_gamma: f64,
    accepted: usize,
    rng: &mut XorShiftStream,
) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(accepted);
    while out.len() < accepted {
        let t = sigma_theta * rng.next_normal();
        let g = sigma_gamma * rng.next_normal().abs();
        let z = (theta_obs - t - g) / s;
        if rng.next_f64() < (-0.5 * z * z).exp() {
            out.push((t, g));
        }
    }
    out
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0; // average rank over ties
        for &k in &order[i..=j] {
            out[k] = shared;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&ranks(xs), &ranks(ys))
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}
