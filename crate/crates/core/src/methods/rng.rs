/// Deterministic 64-bit linear congruential generator.
///
/// The state advances as `state = state * 6364136223846793005 +
/// 1442695040888963407 (mod 2^64)` and starts at the seed (two's
/// complement for negative seeds). Each draw advances once, then:
///
/// * [`below`](Lcg64::below)`(n)` returns `((state >> 32) * n) >> 32`, an
///   integer in `[0, n)`;
/// * [`unit`](Lcg64::unit) returns `(state >> 11) * 2^-53`, in `[0, 1)`.
///
/// Only the high bits are read; the low bits of an LCG have short periods.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

impl Lcg64 {
    pub fn new(seed: i64) -> Self {
        Lcg64 { state: seed as u64 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// `n` must fit in 32 bits.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0 && n <= u32::MAX as usize);
        let high = self.next_u64() >> 32;
        ((high * n as u64) >> 32) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher–Yates, walking from the last index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_states_from_zero() {
        let mut r = Lcg64::new(0);
        assert_eq!(r.next_u64(), LCG_INCREMENT);
        assert_eq!(
            r.next_u64(),
            LCG_INCREMENT.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT)
        );
    }

    #[test]
    fn ranges() {
        let mut r = Lcg64::new(-7);
        for n in 1..200 {
            assert!(r.below(n) < n);
            let u = r.unit();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut v: Vec<usize> = (0..50).collect();
        Lcg64::new(9).shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}
