//! Fast path for `u·A + v·B`.
//!
//! Both operands are translated to nonnegative offsets and the common factor
//! `g = gcd(u, v)` is pulled out, so the work happens on
//! `T = u'·A₀ + v'·B₀ ⊆ [0, span]` with `gcd(u', v') = 1`. If `span + 1` fits
//! the window, `T` is built in a packed bit array by one of two kernels:
//!
//! * **shift-or**: split `B₀` by residue `r` mod `u'` (`b = u'y + r`), so that
//!   `u'a + v'b = u'(a + v'y) + v'r`. Each class is the plain sumset
//!   `A₀ + v'·Y_r`, computed by OR-ing word-aligned copies of the bit array of
//!   `A₀` (one pre-shifted copy per bit offset). Blocks of the target that have
//!   become all ones are skipped from then on.
//! * **pairwise**: mark `u'a + v'b` for every pair, tiled over chunks of `B₀`
//!   so the touched part of the target stays cache resident.
//!
//! Above the window the result is a k-way merge of the sorted runs
//! `u'a + v'·B₀`.
//!
//! Everything here must agree exactly with [`crate::oracle`].

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::intset::IntSet;

/// Default bit-array window: results spanning more than 2²⁸ values use the merge path.
pub const DEFAULT_WINDOW_BITS: u64 = 1 << 28;

// Relative cost of one random bit write versus one word-OR.
const PAIR_WEIGHT: u64 = 3;
// Below this many pairs a sort of the raw sums beats any bit array.
const TINY_PAIRS: usize = 512;
// Saturation tracking granularity, in words.
const BLOCK_WORDS: usize = 32;
// Chunk of the split operand processed per pass in the pairwise kernel.
const PAIR_TILE: usize = 64;

/// Which kernel to run. `Auto` picks by estimated cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Auto,
    Pairwise,
    ShiftOr,
    Merge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelConfig {
    /// Largest result span, in bits, that may be materialized as a bit array.
    pub window_bits: u64,
    pub strategy: Strategy,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            window_bits: DEFAULT_WINDOW_BITS,
            strategy: Strategy::Auto,
        }
    }
}

impl KernelConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        KernelConfig {
            strategy,
            ..Self::default()
        }
    }
}

/// `u·A + v·B`, materialized.
pub fn dilated_sum(
    a: &IntSet,
    u: i64,
    b: &IntSet,
    v: i64,
    config: &KernelConfig,
) -> Result<IntSet> {
    match prepare(a, u, b, v)? {
        Prepared::Done(set) => Ok(set),
        Prepared::Work(job) => {
            let raw = job.run(config);
            Ok(raw.into_intset(job.lo, job.g))
        }
    }
}

/// `|u·A + v·B|` without materializing the sorted result.
pub fn dilated_sum_len(
    a: &IntSet,
    u: i64,
    b: &IntSet,
    v: i64,
    config: &KernelConfig,
) -> Result<usize> {
    match prepare(a, u, b, v)? {
        Prepared::Done(set) => Ok(set.len()),
        Prepared::Work(job) => Ok(job.run(config).len()),
    }
}

enum Prepared {
    Done(IntSet),
    Work(Job),
}

/// `T = ca·a_off + cb·b_off`, result element `lo + g·t`.
struct Job {
    a_off: Vec<u64>,
    ca: u64,
    b_off: Vec<u64>,
    cb: u64,
    span: u64,
    lo: i128,
    g: u64,
}

fn extremes(set: &IntSet, u: i64) -> Result<(i128, i128)> {
    let (min, max) = (set.min().unwrap() as i128, set.max().unwrap() as i128);
    let (x, y) = (min * u as i128, max * u as i128);
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if lo < i64::MIN as i128 || hi > i64::MAX as i128 {
        return Err(Error::overflow("dilate"));
    }
    Ok((lo, hi))
}

/// Offsets of `u·set` from its minimum, divided by `|u|`; ascending.
fn offsets(set: &IntSet, u: i64) -> Vec<u64> {
    let s = set.as_slice();
    if u > 0 {
        let m = s[0];
        s.iter().map(|&x| x.wrapping_sub(m) as u64).collect()
    } else {
        let m = s[s.len() - 1];
        s.iter().rev().map(|&x| m.wrapping_sub(x) as u64).collect()
    }
}

fn prepare(a: &IntSet, u: i64, b: &IntSet, v: i64) -> Result<Prepared> {
    if a.is_empty() || b.is_empty() {
        return Ok(Prepared::Done(IntSet::new()));
    }
    if u == 0 {
        return b.dilate(v).map(Prepared::Done);
    }
    if v == 0 {
        return a.dilate(u).map(Prepared::Done);
    }
    let (alo, ahi) = extremes(a, u)?;
    let (blo, bhi) = extremes(b, v)?;
    let (lo, hi) = (alo + blo, ahi + bhi);
    if lo < i64::MIN as i128 || hi > i64::MAX as i128 {
        return Err(Error::overflow("sum"));
    }
    let (ua, ub) = (u.unsigned_abs(), v.unsigned_abs());
    let g = ua.gcd(&ub);
    let span = ((hi - lo) as u128 / g as u128) as u64;
    Ok(Prepared::Work(Job {
        a_off: offsets(a, u),
        ca: ua / g,
        b_off: offsets(b, v),
        cb: ub / g,
        span,
        lo,
        g,
    }))
}

impl Job {
    fn run(&self, config: &KernelConfig) -> Raw {
        let (na, nb) = (self.a_off.len(), self.b_off.len());
        let bits = self.span as u128 + 1;
        if bits > config.window_bits as u128 || config.strategy == Strategy::Merge {
            return Raw::Sorted(self.merge());
        }
        let strategy = match config.strategy {
            Strategy::Auto if na.saturating_mul(nb) <= TINY_PAIRS => {
                return Raw::Sorted(self.tiny())
            }
            Strategy::Auto => self.choose(),
            s => s,
        };
        match strategy {
            Strategy::Pairwise => Raw::Bits(self.pairwise()),
            _ => Raw::Bits(self.shift_or_cheapest()),
        }
    }

    fn span_of(off: &[u64]) -> u64 {
        *off.last().unwrap()
    }

    // Word-ORs for shifting the bit array of `native` once per element of `split`.
    fn shift_cost(native: &[u64], split: &[u64]) -> u64 {
        let words = Self::span_of(native) / 64 + 2;
        (split.len() as u64).saturating_mul(words)
    }

    fn choose(&self) -> Strategy {
        let pair = (self.a_off.len() as u64)
            .saturating_mul(self.b_off.len() as u64)
            .saturating_mul(PAIR_WEIGHT);
        let shift = Self::shift_cost(&self.a_off, &self.b_off)
            .min(Self::shift_cost(&self.b_off, &self.a_off));
        if pair <= shift {
            Strategy::Pairwise
        } else {
            Strategy::ShiftOr
        }
    }

    fn tiny(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.a_off.len() * self.b_off.len());
        for &x in &self.a_off {
            let base = self.ca * x;
            out.extend(self.b_off.iter().map(|&y| base + self.cb * y));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn merge(&self) -> Vec<u64> {
        // runs over the smaller operand, each run walks the larger one
        let (runs, rc, walk, wc) = if self.a_off.len() <= self.b_off.len() {
            (&self.a_off, self.ca, &self.b_off, self.cb)
        } else {
            (&self.b_off, self.cb, &self.a_off, self.ca)
        };
        let mut heap: BinaryHeap<Reverse<(u64, usize, usize)>> = runs
            .iter()
            .enumerate()
            .map(|(r, &x)| Reverse((rc * x + wc * walk[0], r, 0)))
            .collect();
        let mut out: Vec<u64> = Vec::new();
        while let Some(Reverse((val, r, pos))) = heap.pop() {
            if out.last() != Some(&val) {
                out.push(val);
            }
            if pos + 1 < walk.len() {
                heap.push(Reverse((rc * runs[r] + wc * walk[pos + 1], r, pos + 1)));
            }
        }
        out
    }

    fn pairwise(&self) -> Bitmap {
        let mut out = Bitmap::zeros(self.span + 1);
        for tile in self.b_off.chunks(PAIR_TILE) {
            for &x in &self.a_off {
                let base = self.ca * x;
                for &y in tile {
                    out.set(base + self.cb * y);
                }
            }
        }
        out
    }

    fn shift_or_cheapest(&self) -> Bitmap {
        if Self::shift_cost(&self.a_off, &self.b_off) <= Self::shift_cost(&self.b_off, &self.a_off)
        {
            split_shift_or(&self.a_off, self.ca, &self.b_off, self.cb, self.span)
        } else {
            split_shift_or(&self.b_off, self.cb, &self.a_off, self.ca, self.span)
        }
    }
}

/// `u·P + v·Q` over `[0, span]`, splitting `Q` by residue mod `u`.
fn split_shift_or(p: &[u64], u: u64, q: &[u64], v: u64, span: u64) -> Bitmap {
    let native = Bitmap::from_offsets(p);
    if u == 1 {
        let shifts: Vec<u64> = q.iter().map(|&y| v * y).collect();
        return saturating_shift_or(&native, &shifts, span + 1);
    }
    let mut keyed: Vec<(u64, u64)> = q.iter().map(|&y| (y % u, y / u)).collect();
    keyed.sort_unstable();
    let mut groups: Vec<(u64, Vec<u64>)> = Vec::new();
    for (r, yq) in keyed {
        match groups.last_mut() {
            Some((lr, ys)) if *lr == r => ys.push(yq),
            _ => groups.push((r, vec![yq])),
        }
    }
    let mut out = Bitmap::zeros(span + 1);
    for (r, ys) in groups {
        let shifts: Vec<u64> = ys.iter().map(|&y| v * y).collect();
        let class_bits = native.bits + shifts.last().unwrap();
        let t = saturating_shift_or(&native, &shifts, class_bits);
        let base = v * r;
        for x in t.ones() {
            out.set(u * x + base);
        }
    }
    out
}

/// `P + S` for a bit array `P` and shift set `S`, into `bits` bits.
fn saturating_shift_or(p: &Bitmap, shifts: &[u64], bits: u64) -> Bitmap {
    let pw = &p.words;
    let mut out = Bitmap::zeros(bits);
    // bits past the end start as ones so the last block can saturate
    let tail = bits % 64;
    if tail != 0 {
        *out.words.last_mut().unwrap() = !0u64 << tail;
    }
    let padded = (out.words.len() + pw.len() + 1).next_multiple_of(BLOCK_WORDS);
    out.words.resize(padded, !0);
    let nblocks = out.words.len() / BLOCK_WORDS;
    let mut full = vec![false; nblocks];

    let mut order: Vec<(u32, u64)> = shifts.iter().map(|&s| ((s & 63) as u32, s >> 6)).collect();
    order.sort_unstable();
    let mut shifted = vec![0u64; pw.len() + 1];
    let mut current = u32::MAX;
    for (off, w) in order {
        if off != current {
            current = off;
            shift_words(pw, off, &mut shifted);
        }
        or_saturating(&mut out.words, &mut full, w as usize, &shifted);
    }
    out.words.truncate(bits.div_ceil(64) as usize);
    if tail != 0 {
        *out.words.last_mut().unwrap() &= (1u64 << tail) - 1;
    }
    out.bits = bits;
    out
}

fn shift_words(src: &[u64], off: u32, dst: &mut [u64]) {
    if off == 0 {
        dst[..src.len()].copy_from_slice(src);
        dst[src.len()] = 0;
        return;
    }
    let back = 64 - off;
    dst[0] = src[0] << off;
    for i in 1..src.len() {
        dst[i] = (src[i] << off) | (src[i - 1] >> back);
    }
    dst[src.len()] = src[src.len() - 1] >> back;
}

fn or_saturating(out: &mut [u64], full: &mut [bool], start: usize, src: &[u64]) {
    let end = start + src.len();
    let mut blk = start / BLOCK_WORDS;
    while blk * BLOCK_WORDS < end {
        let (b0, b1) = (blk * BLOCK_WORDS, (blk + 1) * BLOCK_WORDS);
        if !full[blk] {
            let (lo, hi) = (b0.max(start), b1.min(end));
            let mut acc = !0u64;
            for (d, s) in out[lo..hi].iter_mut().zip(&src[lo - start..hi - start]) {
                *d |= *s;
                acc &= *d;
            }
            if acc == !0 && (lo > b0 || hi < b1) {
                acc = out[b0..b1].iter().fold(!0, |x, &y| x & y);
            }
            full[blk] = acc == !0;
        }
        blk += 1;
    }
}

enum Raw {
    Bits(Bitmap),
    Sorted(Vec<u64>),
}

impl Raw {
    fn len(&self) -> usize {
        match self {
            Raw::Bits(b) => b.count_ones(),
            Raw::Sorted(v) => v.len(),
        }
    }

    fn into_intset(self, lo: i128, g: u64) -> IntSet {
        let map = |t: u64| (lo + g as i128 * t as i128) as i64;
        let elems: Vec<i64> = match self {
            Raw::Bits(b) => {
                let mut out = Vec::with_capacity(b.count_ones());
                out.extend(b.ones().map(map));
                out
            }
            Raw::Sorted(v) => v.into_iter().map(map).collect(),
        };
        IntSet::from_sorted_unchecked(elems)
    }
}

/// Packed bit array over `[0, bits)`.
#[derive(Clone, Debug)]
struct Bitmap {
    words: Vec<u64>,
    bits: u64,
}

impl Bitmap {
    fn zeros(bits: u64) -> Self {
        Bitmap {
            words: vec![0; bits.div_ceil(64) as usize],
            bits,
        }
    }

    fn from_offsets(off: &[u64]) -> Self {
        let mut b = Bitmap::zeros(off.last().unwrap() + 1);
        for &x in off {
            b.set(x);
        }
        b
    }

    #[inline]
    fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
    }

    fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(((i as u64) << 6) | tz)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn all_strategies() -> [KernelConfig; 4] {
        [
            Strategy::Auto,
            Strategy::Pairwise,
            Strategy::ShiftOr,
            Strategy::Merge,
        ]
        .map(KernelConfig::with_strategy)
    }

    fn check(a: &[i64], u: i64, b: &[i64], v: i64) {
        let (a, b) = (IntSet::from_vec(a.to_vec()), IntSet::from_vec(b.to_vec()));
        let expect = oracle::dilated_sum(&a, u, &b, v).unwrap();
        for cfg in all_strategies() {
            let got = dilated_sum(&a, u, &b, v, &cfg).unwrap();
            assert_eq!(got, expect, "{:?} u={u} v={v}", cfg.strategy);
            assert_eq!(dilated_sum_len(&a, u, &b, v, &cfg).unwrap(), expect.len());
        }
    }

    #[test]
    fn strategies_agree_on_small_cases() {
        check(&[0, 1, 2, 3], 2, &[0, 1, 2, 3], 3);
        check(&[-7, 0, 5, 130], -3, &[2, 9, 64, 65, 200], 5);
        check(&[1], 4, &[1, 2, 3], 6);
        check(&[-100, -1], 7, &[3, 1000], -7);
        check(&[0, 63, 64, 127, 128], 1, &[0, 1, 64, 65], 1);
    }

    #[test]
    fn large_coefficient_splits_sparsely() {
        // u' much larger than |Q| exercises the keyed class grouping
        check(&(0..300).collect::<Vec<_>>(), 1000, &[0, 3, 7000], 3);
        check(
            &[0, 5, 9],
            3,
            &(0..400).map(|x| x * 3 + 1).collect::<Vec<_>>(),
            1001,
        );
    }

    #[test]
    fn dense_sets_saturate() {
        let a: Vec<i64> = (0..5000).filter(|x| x % 3 != 1).collect();
        check(&a, 2, &a, 5);
        check(&a, 1, &a, 1);
    }

    #[test]
    fn window_fallback_matches() {
        let a = IntSet::from_vec(vec![0, 1, 1 << 40]);
        let b = IntSet::from_vec(vec![-3, 1 << 35]);
        let cfg = KernelConfig {
            window_bits: 1 << 20,
            strategy: Strategy::ShiftOr,
        };
        let got = dilated_sum(&a, 2, &b, 3, &cfg).unwrap();
        assert_eq!(got, oracle::dilated_sum(&a, 2, &b, 3).unwrap());
    }

    #[test]
    fn extreme_values() {
        let a = IntSet::from_vec(vec![i64::MIN, 0]);
        let b = IntSet::from_vec(vec![0, i64::MAX]);
        let got = dilated_sum(&a, 1, &b, 1, &KernelConfig::default()).unwrap();
        assert_eq!(got.as_slice(), &[i64::MIN, -1, 0, i64::MAX]);
        assert!(dilated_sum(&a, -1, &b, 1, &KernelConfig::default()).is_err());
        assert!(dilated_sum(&b, 1, &b, 1, &KernelConfig::default()).is_err());
    }
}
