//! Seeded, labelled random streams.
//!
//! Every random number in a run comes from an [`RngStream`] identified by the
//! run seed and a slash-separated label path such as `point/7/threshold/d0`.
//! A child stream is derived from the seed and its full path only, so the
//! parent's position never leaks into it and two workers can never end up
//! sharing state.
//!
//! Stream plan for one sweep point (all below `point/<index>`):
//!
//! | label              | consumer                                   |
//! |--------------------|--------------------------------------------|
//! | `source/phase`     | phase blocks `(δ0, δ1)`                    |
//! | `source/frequency` | pair frequencies and member assignment     |
//! | `routing`          | which detector each messenger travels to   |
//! | `init/d0`, `init/d1` | initial register contents of D0, D1      |
//! | `threshold/d0`, `threshold/d1` | click thresholds of D0, D1     |
//! | `delay/d0`, `delay/d1` | click delay draws of D0, D1            |

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    label: String,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Root stream of a run. Its label path is empty.
    pub fn new(seed: u64) -> Self {
        Self::with_path(seed, String::new())
    }

    fn with_path(seed: u64, label: String) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(label.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        RngStream {
            seed,
            label,
            counter: 0,
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// Derives the child stream `<this path>/<label>`. The parent is not advanced.
    pub fn split(&self, label: &str) -> Result<RngStream> {
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        let path = if self.label.is_empty() {
            label.to_string()
        } else {
            format!("{}/{}", self.label, label)
        };
        Ok(Self::with_path(self.seed, path))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of 64-bit words drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair coin.
    #[inline]
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.fill_bytes(dest);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_label_repeat() {
        let mut a = RngStream::new(1).split("a").unwrap();
        let mut b = RngStream::new(1).split("a").unwrap();
        let ta: Vec<f64> = (0..3).map(|_| a.uniform01()).collect();
        let tb: Vec<f64> = (0..3).map(|_| b.uniform01()).collect();
        assert_eq!(ta, tb);
        assert_eq!(a.counter(), 3);
    }

    #[test]
    fn draws_stay_in_unit_interval() {
        let mut s = RngStream::new(99);
        for _ in 0..100_000 {
            let u = s.uniform01();
            assert!((0.0..1.0).contains(&u));
            let v = s.open01();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn uniform_mean() {
        let mut s = RngStream::new(2024).split("mean").unwrap();
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.uniform01()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn split_is_deterministic_and_label_sensitive() {
        let root = RngStream::new(5);
        let mut c1 = root.split("d0").unwrap();
        let mut c2 = root.split("d0").unwrap();
        let mut c3 = root.split("d1").unwrap();
        let s1: Vec<u64> = (0..8).map(|_| c1.next_u64()).collect();
        let s2: Vec<u64> = (0..8).map(|_| c2.next_u64()).collect();
        let s3: Vec<u64> = (0..8).map(|_| c3.next_u64()).collect();
        assert_eq!(s1, s2);
        assert_ne!(s1, s3);
        assert_eq!(c1.label(), "d0");
    }

    #[test]
    fn split_does_not_advance_parent() {
        let mut parent = RngStream::new(8).split("p").unwrap();
        let mut twin = parent.clone();
        let _ = parent.split("x").unwrap();
        assert_eq!(parent.next_u64(), twin.next_u64());
        assert_eq!(parent.split("x").unwrap().label(), "p/x");
    }

    #[test]
    fn child_depends_on_path_not_parent_position() {
        let mut parent = RngStream::new(8).split("p").unwrap();
        let mut before = parent.split("x").unwrap();
        parent.uniform01();
        let mut after = parent.split("x").unwrap();
        assert_eq!(before.next_u64(), after.next_u64());
    }

    #[test]
    fn empty_label_rejected() {
        assert!(matches!(RngStream::new(0).split(""), Err(Error::EmptyLabel)));
    }

    #[test]
    fn sibling_streams_uncorrelated() {
        let root = RngStream::new(77);
        let mut a = root.split("d0").unwrap();
        let mut b = root.split("d1").unwrap();
        let n = 100_000;
        let pairs: Vec<(f64, f64)> = (0..n).map(|_| (a.uniform01(), b.uniform01())).collect();
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for &(x, y) in &pairs {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        let rho = sxy / (sxx * syy).sqrt();
        assert!(rho.abs() < 0.01, "rho {rho}");
    }
}
