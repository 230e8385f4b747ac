//! Binary strings and the subsequence-embedding combinatorics underlying
//! every deletion-channel computation.
//!
//! A [`BitString`] is a length/value pair packed into a `u32`, leftmost bit
//! first (the paper convention `x_1 x_2 … x_n` maps to `bit(0) … bit(n-1)`
//! here). Lengths are capped at [`MAX_N`] so that every embedding count fits
//! comfortably in a `u64`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard cap on string length. C(24,12) ≈ 2.7e6, so all embedding counts fit
/// in 64 bits with vast headroom.
pub const MAX_N: usize = 24;

/// Maximum length for which the flat count table (2^{n+1} entries) is used.
const TABLE_MAX_LEN: usize = 16;

/// A finite binary string of length at most [`MAX_N`].
///
/// Ordering is by length first, then numerically with the leftmost bit most
/// significant; this is the global column order used for all output spaces
/// (`{0,1}^{≤n}` sorted by length then lexicographically).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u8,
    bits: u32,
}

impl BitString {
    /// The empty string.
    pub const fn empty() -> Self {
        BitString { len: 0, bits: 0 }
    }

    /// Builds a string of `len` bits from the low `len` bits of `bits`,
    /// leftmost bit most significant.
    pub fn from_bits(len: usize, bits: u32) -> Result<Self> {
        if len > MAX_N {
            return Err(Error::TooLong { len, max: MAX_N });
        }
        if len < 32 && bits >> len != 0 {
            return Err(Error::InvalidInput(format!(
                "value {bits:#b} does not fit in {len} bits"
            )));
        }
        Ok(BitString {
            len: len as u8,
            bits,
        })
    }

    pub(crate) fn from_raw(len: usize, bits: u32) -> Self {
        debug_assert!(len <= MAX_N && (len == 32 || bits >> len == 0));
        BitString {
            len: len as u8,
            bits,
        }
    }

    /// All strings of length `n` in lexicographic order.
    pub fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n <= MAX_N, "blocklength {n} exceeds MAX_N = {MAX_N}");
        (0..1u64 << n).map(move |b| BitString::from_raw(n, b as u32))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Raw packed value; bit `i` (0-based from the left) sits at position
    /// `len-1-i`.
    pub fn raw_bits(&self) -> u32 {
        self.bits
    }

    /// Bit at 0-based position `i` counted from the left (the paper's
    /// `x_{i+1}`).
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    /// Bits left to right.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.bit(i))
    }

    /// Appends a bit on the right.
    pub fn push(&self, bit: bool) -> Result<Self> {
        let len = self.len() + 1;
        if len > MAX_N {
            return Err(Error::TooLong { len, max: MAX_N });
        }
        Ok(BitString::from_raw(len, self.bits << 1 | bit as u32))
    }

    /// Number of ones.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// All bits toggled (translation by the all-ones string).
    pub fn flipped(&self) -> Self {
        let mask = if self.len == 0 {
            0
        } else {
            u32::MAX >> (32 - self.len())
        };
        BitString::from_raw(self.len(), self.bits ^ mask)
    }

    /// Rotation about the center: `x_1 x_2 … x_n ↦ x_n x_{n-1} … x_1`.
    pub fn reversed(&self) -> Self {
        if self.len == 0 {
            return *self;
        }
        BitString::from_raw(self.len(), self.bits.reverse_bits() >> (32 - self.len()))
    }

    /// Elementwise XOR of equal-length strings.
    pub fn xor(&self, other: &BitString) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::BlocklengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(BitString::from_raw(self.len(), self.bits ^ other.bits))
    }

    /// Hamming distance to an equal-length string.
    pub fn hamming(&self, other: &BitString) -> Result<u32> {
        Ok(self.xor(other)?.weight())
    }

    /// Keeps exactly the positions whose mask bit (0-based from the left) is
    /// set, preserving order.
    #[cfg(test)]
    pub(crate) fn keep_by_mask(&self, keep: u32) -> Self {
        let mut out = 0u32;
        let mut len = 0usize;
        for i in 0..self.len() {
            if keep >> i & 1 == 1 {
                out = out << 1 | self.bit(i) as u32;
                len += 1;
            }
        }
        BitString::from_raw(len, out)
    }

    /// Inverse of the flat-table key `(1 << len) | bits`. Distinct strings
    /// of any length get distinct keys, appending a bit `c` maps a key to
    /// `key << 1 | c`, and key order is length-then-lexicographic order.
    pub(crate) fn from_table_key(key: usize) -> Self {
        debug_assert!(key >= 1);
        let len = usize::BITS as usize - 1 - key.leading_zeros() as usize;
        BitString::from_raw(len, (key ^ (1 << len)) as u32)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse(text)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Parses a string of '0'/'1' characters.
pub fn parse(text: &str) -> Result<BitString> {
    if text.len() > MAX_N {
        return Err(Error::TooLong {
            len: text.len(),
            max: MAX_N,
        });
    }
    let mut bits = 0u32;
    for c in text.chars() {
        match c {
            '0' => bits <<= 1,
            '1' => bits = bits << 1 | 1,
            other => return Err(Error::InvalidBit(other)),
        }
    }
    Ok(BitString::from_raw(text.len(), bits))
}

/// Binomial coefficient C(n, k) for n ≤ MAX_N.
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(n <= 64);
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of strictly increasing index tuples embedding `y` in `x`; the
/// multiplicity N(x, y) of `y` as a subsequence of `x`.
pub fn count_embeddings(x: &BitString, y: &BitString) -> Result<u64> {
    // Lengths are already ≤ MAX_N by construction; the checks exist for the
    // documented contract.
    if x.len() > MAX_N || y.len() > MAX_N {
        return Err(Error::TooLong {
            len: x.len().max(y.len()),
            max: MAX_N,
        });
    }
    let m = y.len();
    // dp[j] = embeddings of y[..j] in the processed prefix of x.
    let mut dp = vec![0u64; m + 1];
    dp[0] = 1;
    for xc in x.iter() {
        for j in (1..=m).rev() {
            if y.bit(j - 1) == xc {
                dp[j] += dp[j - 1];
            }
        }
    }
    Ok(dp[m])
}

/// Fills `table` (indexed by [`BitString::table_key`], length `2^{n+1}`) with
/// the embedding count of every subsequence of `x`. Entry 0 is unused; entry
/// at key k is N(x, y_k), zero when y_k is not a subsequence.
///
/// Appending character `c` of `x` sends every existing key `k` to `k<<1|c`,
/// which is strictly larger, so a single in-place descending sweep per
/// character suffices.
pub(crate) fn subsequence_count_table_into(x: &BitString, table: &mut Vec<u64>) {
    let n = x.len();
    assert!(n <= TABLE_MAX_LEN, "count table limited to n ≤ {TABLE_MAX_LEN}");
    table.clear();
    table.resize(1 << (n + 1), 0);
    table[1] = 1;
    let mut hi = 1usize;
    for c in x.iter() {
        let c = c as usize;
        for k in (1..=hi).rev() {
            let v = table[k];
            if v != 0 {
                table[(k << 1) | c] += v;
            }
        }
        hi = (hi << 1) | 1;
    }
}

fn counts_by_map(x: &BitString) -> BTreeMap<BitString, u64> {
    let mut counts: BTreeMap<BitString, u64> = BTreeMap::new();
    counts.insert(BitString::empty(), 1);
    for c in x.iter() {
        let snapshot: Vec<(BitString, u64)> = counts.iter().map(|(k, v)| (*k, *v)).collect();
        for (y, v) in snapshot {
            *counts.entry(y.push(c).expect("within MAX_N")).or_insert(0) += v;
        }
    }
    counts
}

/// Map from every distinct subsequence of `x` (including the empty string
/// and `x` itself) to its embedding count.
pub fn all_subsequence_counts(x: &BitString) -> Result<BTreeMap<BitString, u64>> {
    if x.len() > MAX_N {
        return Err(Error::TooLong {
            len: x.len(),
            max: MAX_N,
        });
    }
    if x.len() <= TABLE_MAX_LEN {
        let mut table = Vec::new();
        subsequence_count_table_into(x, &mut table);
        let mut map = BTreeMap::new();
        for (key, &v) in table.iter().enumerate().skip(1) {
            if v != 0 {
                map.insert(BitString::from_table_key(key), v);
            }
        }
        Ok(map)
    } else {
        Ok(counts_by_map(x))
    }
}

/// Number of distinct length-`k` subsequences of `x`.
pub fn distinct_outputs_of_length(x: &BitString, k: usize) -> Result<u64> {
    if k > x.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            min: 0,
            max: x.len(),
        });
    }
    if x.len() <= TABLE_MAX_LEN {
        let mut table = Vec::new();
        subsequence_count_table_into(x, &mut table);
        Ok(table[1 << k..1 << (k + 1)].iter().filter(|&&v| v != 0).count() as u64)
    } else {
        Ok(all_subsequence_counts(x)?
            .keys()
            .filter(|y| y.len() == k)
            .count() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        parse(s).unwrap()
    }

    /// Brute-force embedding counter: enumerate all index subsets of x.
    fn count_embeddings_brute(x: &BitString, y: &BitString) -> u64 {
        let mut total = 0;
        for mask in 0..1u32 << x.len() {
            if mask.count_ones() as usize == y.len() && x.keep_by_mask(mask) == *y {
                total += 1;
            }
        }
        total
    }

    #[test]
    fn parse_examples() {
        let x = bs("01010");
        assert_eq!(x.len(), 5);
        assert_eq!(
            x.iter().collect::<Vec<_>>(),
            vec![false, true, false, true, false]
        );
        assert_eq!(bs(""), BitString::empty());
        assert!(matches!(parse("2"), Err(Error::InvalidBit('2'))));
        assert!(matches!(
            parse(&"0".repeat(25)),
            Err(Error::TooLong { len: 25, max: 24 })
        ));
    }

    #[test]
    fn render_roundtrip() {
        for s in ["", "0", "1", "01010", "111000111000"] {
            assert_eq!(bs(s).to_string(), s);
        }
    }

    #[test]
    fn column_order_is_length_then_lex() {
        let mut v = vec![bs("1"), bs("00"), bs(""), bs("0"), bs("11"), bs("01")];
        v.sort();
        assert_eq!(
            v.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            vec!["", "0", "1", "00", "01", "11"]
        );
    }

    #[test]
    fn flip_reverse() {
        assert_eq!(bs("0010").flipped(), bs("1101"));
        assert_eq!(bs("0010").reversed(), bs("0100"));
        assert_eq!(BitString::empty().reversed(), BitString::empty());
    }

    #[test]
    fn embedding_examples() {
        // C(5,4) deletions of one position from a constant string.
        assert_eq!(count_embeddings(&bs("00000"), &bs("0000")).unwrap(), 5);
        // Frozen from the brute-force enumerator below.
        assert_eq!(count_embeddings_brute(&bs("0101"), &bs("01")), 3);
        assert_eq!(count_embeddings(&bs("0101"), &bs("01")).unwrap(), 3);
        assert_eq!(count_embeddings_brute(&bs("01010"), &bs("1010")), 1);
        assert_eq!(count_embeddings(&bs("01010"), &bs("1010")).unwrap(), 1);
        // Empty subsequence embeds exactly once.
        assert_eq!(count_embeddings(&bs("01101"), &bs("")).unwrap(), 1);
        assert_eq!(count_embeddings(&bs(""), &bs("")).unwrap(), 1);
        assert_eq!(count_embeddings(&bs(""), &bs("1")).unwrap(), 0);
    }

    #[test]
    fn embedding_matches_brute_force() {
        for xb in 0..1u32 << 6 {
            let x = BitString::from_raw(6, xb);
            for ylen in 0..=4usize {
                for yb in 0..1u32 << ylen {
                    let y = BitString::from_raw(ylen, yb);
                    assert_eq!(
                        count_embeddings(&x, &y).unwrap(),
                        count_embeddings_brute(&x, &y),
                        "x={x} y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn subsequence_count_examples() {
        let m = all_subsequence_counts(&bs("00")).unwrap();
        let want: Vec<(BitString, u64)> = vec![(bs(""), 1), (bs("0"), 2), (bs("00"), 1)];
        assert_eq!(m.into_iter().collect::<Vec<_>>(), want);

        let m = all_subsequence_counts(&bs("01")).unwrap();
        let want: Vec<(BitString, u64)> =
            vec![(bs(""), 1), (bs("0"), 1), (bs("1"), 1), (bs("01"), 1)];
        assert_eq!(m.into_iter().collect::<Vec<_>>(), want);

        let m = all_subsequence_counts(&BitString::empty()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[&BitString::empty()], 1);
    }

    #[test]
    fn subsequence_counts_row_sums() {
        let x = bs("0110100101");
        let m = all_subsequence_counts(&x).unwrap();
        for k in 0..=x.len() {
            let sum: u64 = m.iter().filter(|(y, _)| y.len() == k).map(|(_, c)| c).sum();
            assert_eq!(sum, binomial(x.len(), k), "k={k}");
        }
    }

    #[test]
    fn map_and_table_paths_agree() {
        let x = bs("110100110");
        assert_eq!(all_subsequence_counts(&x).unwrap(), counts_by_map(&x));
    }

    #[test]
    fn distinct_outputs_intro_example() {
        assert_eq!(distinct_outputs_of_length(&bs("00000"), 4).unwrap(), 1);
        assert_eq!(distinct_outputs_of_length(&bs("01010"), 4).unwrap(), 5);
        assert_eq!(distinct_outputs_of_length(&bs("01010"), 5).unwrap(), 1);
        assert!(distinct_outputs_of_length(&bs("01010"), 6).is_err());
    }

    #[test]
    fn constant_strings_have_minimal_key_count() {
        for n in 1..=8usize {
            let zeros = BitString::from_raw(n, 0);
            assert_eq!(all_subsequence_counts(&zeros).unwrap().len(), n + 1);
        }
        assert_eq!(all_subsequence_counts(&bs("0100")).unwrap().len() > 5, true);
    }
}
