//! Discrete Fourier transforms for the spectral problems.
//!
//! In-place iterative radix-2 FFT for power-of-two lengths with a naive
//! O(N²) DFT fallback for everything else. The forward transform is
//! unnormalized with the negative-exponent convention
//! `X_k = Σ_j x_j·e^{−2πi jk/N}`; the inverse applies the `1/N` factor.
//! Desk-scale grids (N ≤ a few thousand) are the target, so twiddles are
//! computed on the fly and no plan object is needed.

use crate::error::{Error, Result};
use num_complex::Complex64;

fn check_nonempty(len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::Config("transform of an empty vector".into()));
    }
    Ok(())
}

/// Unnormalized forward transform, in place.
pub fn fft(x: &mut [Complex64]) -> Result<()> {
    check_nonempty(x.len())?;
    if x.len().is_power_of_two() {
        radix2(x);
    } else {
        naive_dft(x, -1.0);
    }
    Ok(())
}

/// Inverse transform (with the `1/N` factor), in place.
pub fn ifft(x: &mut [Complex64]) -> Result<()> {
    check_nonempty(x.len())?;
    let n = x.len();
    if n.is_power_of_two() {
        // Inverse = conjugate → forward → conjugate, then scale.
        for v in x.iter_mut() {
            *v = v.conj();
        }
        radix2(x);
        let scale = 1.0 / n as f64;
        for v in x.iter_mut() {
            *v = v.conj() * scale;
        }
    } else {
        naive_dft(x, 1.0);
        let scale = 1.0 / n as f64;
        for v in x.iter_mut() {
            *v *= scale;
        }
    }
    Ok(())
}

/// Iterative radix-2 with bit-reversal reordering; `x.len()` is a power
/// of two.
fn radix2(x: &mut [Complex64]) {
    let n = x.len();
    if n < 2 {
        return;
    }
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 0..n - 1 {
        if i < j {
            x.swap(i, j);
        }
        let mut mask = n >> 1;
        while j & mask != 0 {
            j &= !mask;
            mask >>= 1;
        }
        j |= mask;
    }
    // Butterfly passes; the stage twiddle comes straight from sin/cos so
    // no error accumulates across stages.
    let mut len = 2;
    while len <= n {
        let step = -2.0 * std::f64::consts::PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = Complex64::from_polar(1.0, step * k as f64);
                let a = x[start + k];
                let b = x[start + k + len / 2] * w;
                x[start + k] = a + b;
                x[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Direct O(N²) transform with exponent sign `sign`; any length.
fn naive_dft(x: &mut [Complex64], sign: f64) {
    let n = x.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let step = sign * 2.0 * std::f64::consts::PI / n as f64;
    for (k, o) in out.iter_mut().enumerate() {
        for (j, &v) in x.iter().enumerate() {
            // Reduce j·k mod n before the trig call to keep the argument
            // small and the evaluation accurate for large n.
            let phase = step * ((j * k) % n) as f64;
            *o += v * Complex64::from_polar(1.0, phase);
        }
    }
    x.copy_from_slice(&out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_point_transform() {
        let mut x = [c(1.0, 0.0), c(0.0, 0.0)];
        fft(&mut x).unwrap();
        assert_eq!(x, [c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn four_point_sine_transform() {
        let mut x = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        fft(&mut x).unwrap();
        let expected = [c(0.0, 0.0), c(0.0, -2.0), c(0.0, 0.0), c(0.0, 2.0)];
        for (got, want) in x.iter().zip(expected) {
            assert!((got - want).norm() <= 1e-15, "{x:?}");
        }
    }

    #[test]
    fn inverse_undoes_forward_for_large_power_of_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let original: Vec<Complex64> = (0..4096)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut x = original.clone();
        fft(&mut x).unwrap();
        ifft(&mut x).unwrap();
        let scale = original.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (got, want) in x.iter().zip(&original) {
            assert!((got - want).norm() <= 1e-13 * scale, "mismatch");
        }
    }

    #[test]
    fn non_power_of_two_uses_the_fallback_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let original: Vec<Complex64> = (0..24)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut x = original.clone();
        fft(&mut x).unwrap();
        ifft(&mut x).unwrap();
        for (got, want) in x.iter().zip(&original) {
            assert!((got - want).norm() <= 1e-13, "mismatch");
        }
    }

    #[test]
    fn radix2_agrees_with_the_naive_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let original: Vec<Complex64> = (0..32)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut fast = original.clone();
        fft(&mut fast).unwrap();
        let mut slow = original.clone();
        naive_dft(&mut slow, -1.0);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-13, "radix-2 vs naive mismatch");
        }
    }

    #[test]
    fn parseval_holds_for_the_forward_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let original: Vec<Complex64> = (0..256)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let time_energy: f64 = original.iter().map(|v| v.norm_sqr()).sum();
        let mut x = original;
        fft(&mut x).unwrap();
        let freq_energy: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / 256.0;
        assert!((time_energy - freq_energy).abs() <= 1e-11 * time_energy);
    }

    #[test]
    fn empty_input_is_rejected() {
        let mut x: [Complex64; 0] = [];
        assert!(fft(&mut x).is_err());
        assert!(ifft(&mut x).is_err());
    }
}
