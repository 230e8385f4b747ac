//! Group elements acting on binary strings, orbit machinery, and the
//! combinatorial lemmas behind the deletion-channel symmetry searches.
//!
//! The represented closure is the Klein four-group
//! `G̃ = {identity, bit-flip, reversal, flip∘reversal}` plus blocklength-
//! specific index permutations. Flip and reversal are their own inverses and
//! commute; the four-element table is verified by [`klein_table_check`].

use itertools::Itertools;

use crate::bitstring::BitString;
use crate::channel::{ChannelKind, ChannelParam};
use crate::classify::{Partition, PartitionLabel};
use crate::error::{Error, Result};

/// An index permutation of `[n]`, stored 0-based: applying it yields the
/// string whose position `j` holds `x_{images[j]}` (the paper writes
/// `h(x) = x_{π(1)} x_{π(2)} … x_{π(n)}`, 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|i| i as u8).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    pub fn reversal(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).rev().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of position `j` (0-based).
    pub fn image(&self, j: usize) -> usize {
        self.images[j] as usize
    }

    /// 1-based one-line notation `[π(1), …, π(n)]`, for display.
    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| j == i as usize)
    }

    pub fn is_reversal(&self) -> bool {
        let n = self.n();
        self.images
            .iter()
            .enumerate()
            .all(|(j, &i)| i as usize == n - 1 - j)
    }

    /// First `other`, then `self`: `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::BlocklengthMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        // Position j of self(y) holds y_{self[j]}; with y = other(x) that
        // is x_{other[self[j]]}.
        Ok(Permutation {
            images: (0..self.n())
                .map(|j| other.images[self.images[j] as usize])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i as usize] = j as u8;
        }
        Permutation { images: inv }
    }

    /// All of S_n in lexicographic order of one-line notation.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(|images| Permutation {
            images: images.into_iter().map(|i| i as u8).collect(),
        })
    }

    pub fn apply(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n() {
            return Err(Error::BlocklengthMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        let mut out = BitString::empty();
        for j in 0..self.n() {
            out = out.push(x.bit(self.images[j] as usize))?;
        }
        Ok(out)
    }
}

/// A candidate or known symmetry of the input space.
///
/// The four named elements are blocklength-generic; an index permutation is
/// pinned to its blocklength.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Identity,
    BitFlip,
    Reversal,
    FlipReversal,
    IndexPermutation(Permutation),
}

impl GroupElement {
    fn name(&self) -> &'static str {
        match self {
            GroupElement::Identity => "identity",
            GroupElement::BitFlip => "bit-flip",
            GroupElement::Reversal => "reversal",
            GroupElement::FlipReversal => "flip-reversal",
            GroupElement::IndexPermutation(_) => "index-permutation",
        }
    }
}

/// Applies `g` to `x`; always length-preserving and, for fixed `g` and
/// length, a bijection.
pub fn apply(g: &GroupElement, x: &BitString) -> Result<BitString> {
    match g {
        GroupElement::Identity => Ok(*x),
        GroupElement::BitFlip => Ok(x.flipped()),
        GroupElement::Reversal => Ok(x.reversed()),
        GroupElement::FlipReversal => Ok(x.reversed().flipped()),
        GroupElement::IndexPermutation(p) => p.apply(x),
    }
}

/// `apply(compose(g1, g2), x) = apply(g1, apply(g2, x))`.
///
/// The four named elements compose among themselves (Klein table); index
/// permutations compose with matching blocklength; identity composes with
/// anything. Other mixed compositions are outside the represented closure.
pub fn compose(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    use GroupElement::*;
    Ok(match (g1, g2) {
        (Identity, g) | (g, Identity) => g.clone(),
        (BitFlip, BitFlip) | (Reversal, Reversal) | (FlipReversal, FlipReversal) => Identity,
        (BitFlip, Reversal) | (Reversal, BitFlip) => FlipReversal,
        (BitFlip, FlipReversal) | (FlipReversal, BitFlip) => Reversal,
        (Reversal, FlipReversal) | (FlipReversal, Reversal) => BitFlip,
        (IndexPermutation(p1), IndexPermutation(p2)) => IndexPermutation(p1.compose(p2)?),
        (a, b) => return Err(Error::UnsupportedComposition(a.name(), b.name())),
    })
}

/// Every represented element has order 1 or 2 except general permutations.
pub fn inverse(g: &GroupElement) -> GroupElement {
    match g {
        GroupElement::IndexPermutation(p) => GroupElement::IndexPermutation(p.inverse()),
        other => other.clone(),
    }
}

/// True iff `{identity, bit-flip, reversal, flip∘reversal}` forms the Klein
/// four-group under [`compose`]: closed, abelian, associative, every element
/// its own inverse.
pub fn klein_table_check() -> bool {
    use GroupElement::*;
    let elems = [Identity, BitFlip, Reversal, FlipReversal];
    let in_set = |g: &GroupElement| elems.contains(g);
    for a in &elems {
        match compose(a, a) {
            Ok(Identity) => {}
            _ => return false,
        }
        if inverse(a) != *a {
            return false;
        }
        for b in &elems {
            let ab = match compose(a, b) {
                Ok(g) if in_set(&g) => g,
                _ => return false,
            };
            let ba = match compose(b, a) {
                Ok(g) => g,
                _ => return false,
            };
            if ab != ba {
                return false;
            }
            for c in &elems {
                let bc = compose(b, c).unwrap();
                if compose(&ab, c).unwrap() != compose(a, &bc).unwrap() {
                    return false;
                }
            }
        }
    }
    true
}

/// Orbit of a string under `G̃`; sizes are always 2 or 4 because bit-flip
/// has no fixed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    members: Vec<BitString>,
    representative: BitString,
}

impl Orbit {
    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn representative(&self) -> &BitString {
        &self.representative
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.members.binary_search(x).is_ok()
    }
}

/// Orbit of `x` under `G̃ = {identity, bit-flip, reversal, flip∘reversal}`.
pub fn orbit(x: &BitString) -> Orbit {
    let mut members = vec![*x, x.flipped(), x.reversed(), x.reversed().flipped()];
    members.sort();
    members.dedup();
    Orbit {
        representative: members[0],
        members,
    }
}

/// Partition of `{0,1}^n` into `G̃`-orbits, classes in canonical order.
pub fn orbit_partition(n: usize) -> Result<Partition> {
    let mut classes = Vec::new();
    for x in BitString::all_strings(n) {
        let orb = orbit(&x);
        if *orb.representative() == x {
            classes.push(orb.members().to_vec());
        }
    }
    Partition::new(n, PartitionLabel::Orbit, classes)
}

/// Orbit count by Burnside's lemma: flip fixes nothing, reversal fixes the
/// `2^{⌈n/2⌉}` palindromes, flip∘reversal fixes the `2^{n/2}` anti-palindromes
/// (none for odd `n`).
pub fn orbit_count_burnside(n: usize) -> u64 {
    assert!(n >= 1, "burnside count needs n >= 1");
    let fixed_id = 1u64 << n;
    let fixed_rev = 1u64 << n.div_ceil(2);
    let fixed_fliprev = if n % 2 == 0 { 1u64 << (n / 2) } else { 0 };
    (fixed_id + fixed_rev + fixed_fliprev) / 4
}

/// The local property (LP): adjacency of indices is preserved in both
/// directions, `|i-j| = 1 ⟺ |π(i)-π(j)| = 1` for all `i ≠ j`.
pub fn satisfies_local_property(p: &Permutation) -> bool {
    let n = p.n();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let adj = i.abs_diff(j) == 1;
            let img_adj = p.image(i).abs_diff(p.image(j)) == 1;
            if adj != img_adj {
                return false;
            }
        }
    }
    true
}

/// Maximum blocklength for the n! enumeration of [`lp_permutations`].
pub const LP_ENUM_MAX_N: usize = 9;

/// All permutations of `[n]` satisfying the local property; exactly the
/// identity and the reversal (which coincide at `n = 1`).
pub fn lp_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n < 1 || n > LP_ENUM_MAX_N {
        return Err(Error::BlocklengthOutOfRange {
            what: "lp_permutations",
            n,
            min: 1,
            max: LP_ENUM_MAX_N,
        });
    }
    Ok(Permutation::all(n).filter(satisfies_local_property).collect())
}

/// The proof gadget `1^{i+1} 0^{n-i-1}`: all-ones up to index `i+1`
/// inclusive (1-based), all-zeros afterwards.
pub fn step_string(n: usize, i: usize) -> Result<BitString> {
    if n > crate::bitstring::MAX_N {
        return Err(Error::TooLong {
            len: n,
            max: crate::bitstring::MAX_N,
        });
    }
    if i < 1 || i > n - 1 {
        return Err(Error::IndexOutOfRange {
            index: i,
            min: 1,
            max: n - 1,
        });
    }
    let ones = i + 1;
    let bits = ((1u32 << ones) - 1) << (n - ones);
    BitString::from_bits(n, bits)
}

/// Support size of `BDC_d` on the step string: the number of distinct
/// subsequences, which is `(i+2)(n-i)` and independent of `d ∈ (0,1)`.
pub fn step_support_size(n: usize, i: usize, param: &ChannelParam) -> Result<u64> {
    if param.kind() != ChannelKind::Bdc {
        return Err(Error::InvalidParam(
            "step-string support is a deletion-channel quantity".into(),
        ));
    }
    let x = step_string(n, i)?;
    Ok(crate::bitstring::all_subsequence_counts(&x)?.len() as u64)
}

/// Maximum blocklength for the exact 4^n translation check.
pub const TRANSLATION_CHECK_MAX_N: usize = 8;

/// Exact check that translation by `t` commutes with the BSC:
/// `P(BSC_p(x+t) = y) = P(BSC_p x = y+t)` for all `x, y ∈ {0,1}^n`
/// (here `h = g⁻¹` is translation by `t` itself).
pub fn bsc_translation_check(t: &BitString, n: usize, param: &ChannelParam) -> Result<bool> {
    if param.kind() != ChannelKind::Bsc {
        return Err(Error::InvalidParam(
            "translation symmetry is a BSC property".into(),
        ));
    }
    if t.len() != n {
        return Err(Error::BlocklengthMismatch {
            expected: n,
            got: t.len(),
        });
    }
    if n > TRANSLATION_CHECK_MAX_N {
        return Err(Error::BlocklengthOutOfRange {
            what: "bsc_translation_check",
            n,
            min: 1,
            max: TRANSLATION_CHECK_MAX_N,
        });
    }
    let weights = param.mass_rationals(n);
    for x in BitString::all_strings(n) {
        let xt = x.xor(t)?;
        for y in BitString::all_strings(n) {
            let lhs = &weights[xt.hamming(&y)? as usize];
            let rhs = &weights[x.hamming(&y.xor(t)?)? as usize];
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn perm(images: &[usize]) -> Permutation {
        // 1-based input for readability, matching the paper.
        Permutation::new(images.iter().map(|&i| i - 1).collect()).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&GroupElement::Reversal, &bs("0010")).unwrap(), bs("0100"));
        assert_eq!(apply(&GroupElement::BitFlip, &bs("0010")).unwrap(), bs("1101"));
        assert_eq!(apply(&GroupElement::FlipReversal, &bs("01")).unwrap(), bs("01"));
    }

    #[test]
    fn compose_examples() {
        use GroupElement::*;
        assert_eq!(compose(&BitFlip, &BitFlip).unwrap(), Identity);
        assert_eq!(compose(&BitFlip, &Reversal).unwrap(), FlipReversal);
        assert_eq!(inverse(&Reversal), Reversal);
        assert!(compose(
            &BitFlip,
            &IndexPermutation(Permutation::identity(3))
        )
        .is_err());
    }

    #[test]
    fn compose_agrees_with_apply_pointwise() {
        use GroupElement::*;
        let elems = [Identity, BitFlip, Reversal, FlipReversal];
        for a in &elems {
            for b in &elems {
                let ab = compose(a, b).unwrap();
                for xb in 0..1u32 << 5 {
                    let x = BitString::from_bits(5, xb).unwrap();
                    assert_eq!(
                        apply(&ab, &x).unwrap(),
                        apply(a, &apply(b, &x).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn permutation_compose_inverse() {
        let p1 = perm(&[2, 3, 1]);
        let p2 = perm(&[1, 3, 2]);
        let c = p1.compose(&p2).unwrap();
        for xb in 0..8u32 {
            let x = BitString::from_bits(3, xb).unwrap();
            assert_eq!(c.apply(&x).unwrap(), p1.apply(&p2.apply(&x).unwrap()).unwrap());
            assert_eq!(
                p1.inverse().apply(&p1.apply(&x).unwrap()).unwrap(),
                x
            );
        }
    }

    #[test]
    fn klein_group() {
        assert!(klein_table_check());
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&bs("000"));
        assert_eq!(o.members(), &[bs("000"), bs("111")]);
        let o = orbit(&bs("0010"));
        assert_eq!(o.members(), &[bs("0010"), bs("0100"), bs("1011"), bs("1101")]);
        assert_eq!(o.representative(), &bs("0010"));
    }

    #[test]
    fn orbit_partition_n3() {
        let p = orbit_partition(3).unwrap();
        assert_eq!(p.classes().len(), 3);
        assert_eq!(p.classes()[0], vec![bs("000"), bs("111")]);
        assert_eq!(
            p.classes()[1],
            vec![bs("001"), bs("011"), bs("100"), bs("110")]
        );
        assert_eq!(p.classes()[2], vec![bs("010"), bs("101")]);
    }

    #[test]
    fn burnside_formula() {
        assert_eq!(orbit_count_burnside(1), 1);
        assert_eq!(orbit_count_burnside(2), 2);
        assert_eq!(orbit_count_burnside(3), 3);
        for n in 1..=12 {
            assert_eq!(
                orbit_count_burnside(n),
                orbit_partition(n).unwrap().classes().len() as u64,
                "n={n}"
            );
        }
    }

    #[test]
    fn local_property_examples() {
        assert!(satisfies_local_property(&perm(&[1, 2, 3])));
        assert!(satisfies_local_property(&perm(&[3, 2, 1])));
        assert!(!satisfies_local_property(&perm(&[2, 1, 3])));
    }

    #[test]
    fn lp_enumeration() {
        let got = lp_permutations(1).unwrap();
        assert_eq!(got, vec![Permutation::identity(1)]);
        let got = lp_permutations(4).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&Permutation::identity(4)));
        assert!(got.contains(&Permutation::reversal(4)));
    }

    #[test]
    fn step_string_examples() {
        assert_eq!(step_string(5, 2).unwrap(), bs("11100"));
        assert_eq!(step_string(5, 4).unwrap(), bs("11111"));
        assert_eq!(step_string(2, 1).unwrap(), bs("11"));
        assert!(step_string(5, 0).is_err());
        assert!(step_string(5, 5).is_err());
    }

    #[test]
    fn step_support_examples() {
        let d = ChannelParam::bdc(parse_rational("1/2").unwrap()).unwrap();
        assert_eq!(step_support_size(5, 2, &d).unwrap(), 12);
        assert_eq!(step_support_size(5, 4, &d).unwrap(), 6);
        assert_eq!(step_support_size(2, 1, &d).unwrap(), 3);
    }

    #[test]
    fn translation_commutes_with_bsc() {
        let p = ChannelParam::bsc(parse_rational("1/3").unwrap()).unwrap();
        assert!(bsc_translation_check(&bs("0000"), 4, &p).unwrap());
        assert!(bsc_translation_check(&bs("1111"), 4, &p).unwrap());
        assert!(bsc_translation_check(&bs("0110"), 4, &p).unwrap());
    }
}
