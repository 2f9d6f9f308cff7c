//! Seeded random bit interleaver over a whole frame.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A uniform random permutation fixed by its seed, with its inverse.
#[derive(Clone, Debug)]
pub struct Interleaver {
    perm: Vec<usize>,
    inv: Vec<usize>,
    pub seed: u64,
}

impl Interleaver {
    pub fn new(len: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        let mut inv = vec![0usize; len];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        Interleaver { perm, inv, seed }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Applies the permutation: output position `i` takes input `perm[i]`.
    pub fn interleave<T: Copy>(&self, xs: &[T]) -> Result<Vec<T>> {
        self.check(xs.len())?;
        Ok(self.perm.iter().map(|&p| xs[p]).collect())
    }

    /// Inverse permutation; `deinterleave(interleave(x)) == x`.
    pub fn deinterleave<T: Copy>(&self, xs: &[T]) -> Result<Vec<T>> {
        self.check(xs.len())?;
        Ok(self.inv.iter().map(|&p| xs[p]).collect())
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.perm.len() {
            return Err(Error::DimensionMismatch(format!(
                "interleaver length {} vs input length {len}",
                self.perm.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn length_one_is_identity() {
        let il = Interleaver::new(1, 123);
        assert_eq!(il.interleave(&[42u8]).unwrap(), vec![42u8]);
    }

    #[test]
    fn round_trip_identity_on_random_frames() {
        let mut rng = crate::numerics::RngStream::new(40, 0).rng();
        for seed in 0..20u64 {
            let len = 1 + rng.random_range(0..500usize);
            let il = Interleaver::new(len, seed);
            let bits: Vec<u8> = (0..len).map(|_| rng.random_range(0..2u8)).collect();
            let inter = il.interleave(&bits).unwrap();
            let back = il.deinterleave(&inter).unwrap();
            assert_eq!(back, bits);
            // interleaved really is a permutation of the input
            let mut a = bits.clone();
            let mut b = inter.clone();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_permutations() {
        let len = 64;
        let perms: Vec<Vec<usize>> = (0..100u64)
            .map(|s| Interleaver::new(len, s).perm.clone())
            .collect();
        let mut collisions = 0;
        for i in 0..perms.len() {
            for j in (i + 1)..perms.len() {
                if perms[i] == perms[j] {
                    collisions += 1;
                }
            }
        }
        assert_eq!(collisions, 0);
    }

    #[test]
    fn rejects_wrong_length() {
        let il = Interleaver::new(8, 1);
        assert!(il.interleave(&[0u8; 7]).is_err());
        assert!(il.deinterleave(&[0u8; 9]).is_err());
    }
}
