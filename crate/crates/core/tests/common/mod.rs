//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use circlewalk_core::lattice_dist::StepDistribution;

/// Law of `S_k p/q mod 1` on `Z_q` by direct cyclic convolution, `O(q^2 k)`.
pub fn direct_law(sd: &StepDistribution, p: i128, q: i128, k: u64) -> Vec<f64> {
    let qs = q as usize;
    let mut law = vec![0.0; qs];
    law[0] = 1.0;
    let shifts: Vec<(usize, f64)> = sd
        .atoms()
        .iter()
        .map(|&(v, w)| (((v as i128 * p).rem_euclid(q)) as usize, w))
        .collect();
    for _ in 0..k {
        let mut next = vec![0.0; qs];
        for (a, &m) in law.iter().enumerate() {
            for &(s, w) in &shifts {
                next[(a + s) % qs] += m * w;
            }
        }
        law = next;
    }
    law
}

/// `max_a |CDF(a) - (a+1)/q|` straight from a probability vector.
pub fn direct_psi_disc(probs: &[f64]) -> f64 {
    let q = probs.len() as f64;
    let mut cdf = 0.0;
    let mut best: f64 = 0.0;
    for (a, p) in probs.iter().enumerate() {
        cdf += p;
        best = best.max((cdf - (a as f64 + 1.0) / q).abs());
    }
    best
}

/// Maximal discrepancy over all `q^2` cyclic intervals by enumeration.
pub fn direct_psi_disc_star(probs: &[f64]) -> f64 {
    let q = probs.len();
    let mut best: f64 = 0.0;
    for start in 0..q {
        let mut mass = 0.0;
        for len in 1..=q {
            mass += probs[(start + len - 1) % q];
            best = best.max((mass - len as f64 / q as f64).abs());
        }
    }
    best
}
