//! Order-insensitive, exactly rounded floating-point accumulation.
//!
//! Every register-index reduction in this crate (row sums, column sums,
//! overlaps with the uniform state) runs through [`ExactSum`]. The
//! accumulator keeps the exact value of the running sum, so the final
//! rounded `f64` depends only on the *multiset* of addends, never on
//! their order. That property is load-bearing: simulations whose states
//! are related by a basis permutation (e.g. the same good noise on a
//! different set of sites) then produce bit-identical success
//! probabilities, which is how the site-invariance results manifest in
//! emitted CSV files.
//!
//! The accumulator is a positional superaccumulator: one `i128` bucket
//! per 32-wide exponent window. Each addend touches exactly one bucket,
//! and an `i128` holds more than 2^40 raw mantissa contributions before
//! it could overflow, far beyond any reduction size used here.

use num_complex::Complex64;

const BUCKETS: usize = 64;
const FRAC_MASK: u64 = (1u64 << 52) - 1;

/// Exact accumulator for `f64` addends. Finite inputs only.
#[derive(Clone)]
pub struct ExactSum {
    buckets: [i128; BUCKETS],
    lo: usize,
    hi: usize,
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum {
            buckets: [0i128; BUCKETS],
            lo: BUCKETS,
            hi: 0,
        }
    }

    /// Add one finite value. NaN and infinities are rejected in debug
    /// builds and would poison the result in release builds.
    #[inline]
    pub fn add(&mut self, x: f64) {
        debug_assert!(x.is_finite(), "ExactSum::add requires finite input");
        let bits = x.to_bits();
        let e = ((bits >> 52) & 0x7ff) as usize;
        let frac = bits & FRAC_MASK;
        // Subnormals use the same scale as exponent field 1, without the
        // implicit bit.
        let implicit = ((e != 0) as u64) << 52;
        let mant = frac | implicit;
        if mant == 0 {
            return; // signed zero
        }
        let e_eff = e + (e == 0) as usize;
        // e_eff <= 2046, so idx <= 63; the mask makes that visible to
        // the compiler and drops the bounds check from the hot loop.
        let idx = (e_eff >> 5) & (BUCKETS - 1);
        let off = e_eff & 31;
        let wide = (mant as i128) << off;
        let sign = ((bits as i64) >> 63) as i128; // 0 or -1
        self.buckets[idx] += (wide ^ sign) - sign;
        if idx < self.lo {
            self.lo = idx;
        }
        if idx > self.hi {
            self.hi = idx;
        }
    }

    /// Clear the accumulator for reuse without reallocating.
    pub fn reset(&mut self) {
        if self.lo <= self.hi {
            for b in &mut self.buckets[self.lo..=self.hi] {
                *b = 0;
            }
        }
        self.lo = BUCKETS;
        self.hi = 0;
    }

    /// Fold another accumulator into this one. Bucket sums are exact
    /// integers, so splitting a reduction across accumulators and
    /// merging cannot change the result.
    pub fn merge(&mut self, other: &ExactSum) {
        if other.lo > other.hi {
            return;
        }
        for k in other.lo..=other.hi {
            self.buckets[k] += other.buckets[k];
        }
        self.lo = self.lo.min(other.lo);
        self.hi = self.hi.max(other.hi);
    }

    /// Round the exact sum to the nearest `f64` (ties to even).
    pub fn total(&self) -> f64 {
        if self.lo > self.hi {
            return 0.0;
        }
        // Normalize the touched buckets into base-2^32 limbs. Limb k has
        // weight 2^(32k - 1075).
        let n_limbs = self.hi + 3;
        let mut limbs = vec![0i128; n_limbs];
        limbs[self.lo..=self.hi].copy_from_slice(&self.buckets[self.lo..=self.hi]);
        for k in 0..n_limbs - 1 {
            let r = limbs[k].rem_euclid(1i128 << 32);
            let carry = (limbs[k] - r) >> 32;
            limbs[k] = r;
            limbs[k + 1] += carry;
        }
        let negative = limbs[n_limbs - 1] < 0;
        if negative {
            // Negate: two's-complement style borrow chain over limbs.
            let mut borrow = 0i128;
            for limb in limbs.iter_mut() {
                let v = -*limb + borrow;
                let r = v.rem_euclid(1i128 << 32);
                borrow = (v - r) >> 32;
                *limb = r;
            }
            debug_assert_eq!(borrow, 0);
        }
        // Find the most significant bit of the magnitude.
        let mut top = n_limbs;
        while top > 0 && limbs[top - 1] == 0 {
            top -= 1;
        }
        if top == 0 {
            return 0.0;
        }
        let msb_in_top = 127 - (limbs[top - 1] as u128).leading_zeros() as usize;
        let bit_len = (top - 1) * 32 + msb_in_top + 1;

        // Round the magnitude at bit `shift` (value = mant * 2^(shift-1075)).
        // shift >= 1 keeps the result on the representable grid down to the
        // smallest subnormal, giving a single correct rounding.
        let shift = if bit_len > 54 { bit_len - 53 } else { 1 };
        let bit_at = |pos: usize| -> bool {
            let limb = pos / 32;
            limb < n_limbs && (limbs[limb] >> (pos % 32)) & 1 == 1
        };
        let mut mant: u64 = 0;
        for pos in (shift..bit_len).rev() {
            mant = (mant << 1) | bit_at(pos) as u64;
        }
        let round_bit = bit_at(shift - 1);
        let sticky = (0..shift.saturating_sub(1)).any(bit_at);
        if round_bit && (sticky || mant & 1 == 1) {
            mant += 1;
        }
        let mut k = shift as i64 - 1075;
        if mant == 1 << 53 {
            mant = 1 << 52;
            k += 1;
        }
        let bits = if mant >= 1 << 52 {
            let biased = k + 52 + 1023;
            if biased >= 2047 {
                return if negative {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
            }
            debug_assert!(biased >= 1);
            ((biased as u64) << 52) | (mant & FRAC_MASK)
        } else {
            // Subnormal: by construction shift == 1, so the grid is 2^-1074.
            debug_assert_eq!(k, -1074);
            mant
        };
        let value = f64::from_bits(bits);
        if negative {
            -value
        } else {
            value
        }
    }
}

/// Exact accumulator for complex addends.
#[derive(Clone)]
pub struct ExactSumC {
    pub re: ExactSum,
    pub im: ExactSum,
}

impl Default for ExactSumC {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSumC {
    pub fn new() -> Self {
        ExactSumC {
            re: ExactSum::new(),
            im: ExactSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn reset(&mut self) {
        self.re.reset();
        self.im.reset();
    }

    pub fn merge(&mut self, other: &ExactSumC) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Four-lane complex accumulator: interleaving addends across lanes
/// breaks the store-to-load dependency chain of repeated same-bucket
/// updates. The lane assignment does not affect the result.
pub struct ExactSumLanes {
    lanes: [ExactSumC; 4],
}

impl Default for ExactSumLanes {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSumLanes {
    pub fn new() -> Self {
        ExactSumLanes {
            lanes: [
                ExactSumC::new(),
                ExactSumC::new(),
                ExactSumC::new(),
                ExactSumC::new(),
            ],
        }
    }

    #[inline]
    pub fn add(&mut self, slot: usize, z: Complex64) {
        self.lanes[slot & 3].add(z);
    }

    pub fn reset(&mut self) {
        for lane in &mut self.lanes {
            lane.reset();
        }
    }

    /// Merge the lanes, return the exact total, and leave the
    /// accumulator empty for the next reduction.
    pub fn total_and_reset(&mut self) -> Complex64 {
        let (first, rest) = self.lanes.split_at_mut(1);
        for lane in rest.iter_mut() {
            first[0].merge(lane);
            lane.reset();
        }
        let total = first[0].total();
        first[0].reset();
        total
    }
}

/// Exactly rounded sum of a slice.
pub fn sum_exact(values: &[f64]) -> f64 {
    let mut acc = ExactSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Exactly rounded sum of a complex slice.
pub fn sum_exact_c(values: &[Complex64]) -> Complex64 {
    let mut acc = ExactSumC::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}
