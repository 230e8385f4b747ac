//! The commutation decision procedure and brute-force symmetry searches.
//!
//! A length-preserving input bijection `g` commutes with the channel at
//! blocklength `n` iff some output bijection `h` makes the conjugated
//! channel equal in distribution to the original on every input. With
//! `A[x][z] = P(Ch(gx) = z)` and `B[x][y] = P(Ch x = y)`, such an `h`
//! exists iff the multisets of columns of `A` and `B` coincide (`h` then
//! maps each output to a matched column). Since `A`'s rows are `B`'s rows
//! permuted by `g`, the test reduces to comparing each column of `B`
//! against its entry-permuted self, in exact arithmetic.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bitstring::{self, BitString};
use crate::channel::{ChannelKind, ChannelParam};
use crate::error::{Error, Result};
use crate::symmetry::{apply, GroupElement, Permutation};

/// Blocklength caps for the commutation test.
pub const COMMUTE_ELEMENT_MAX_N: usize = 10;
pub const COMMUTE_TABLE_MAX_N: usize = 4;
/// n! candidates, each checked by the column-multiset criterion.
pub const PERM_SEARCH_MAX_N: usize = 7;
pub const PERM_SEARCH_MIN_N: usize = 2;
/// (2^n)! candidates.
pub const EXHAUSTIVE_SEARCH_MAX_N: usize = 3;

/// A candidate input bijection of `{0,1}^n`: either a represented group
/// element or an explicit image table over lexicographic inputs.
#[derive(Debug, Clone)]
pub enum InputBijection {
    Element(GroupElement),
    Table(Vec<BitString>),
}

impl InputBijection {
    /// Row-permutation table: entry `i` is the lexicographic index of the
    /// image of the `i`th input string.
    fn row_table(&self, n: usize) -> Result<Vec<u32>> {
        match self {
            InputBijection::Element(g) => {
                if n > COMMUTE_ELEMENT_MAX_N {
                    return Err(Error::BlocklengthOutOfRange {
                        what: "commutes_with_channel (group element)",
                        n,
                        min: 1,
                        max: COMMUTE_ELEMENT_MAX_N,
                    });
                }
                BitString::all_strings(n)
                    .map(|x| Ok(apply(g, &x)?.raw_bits()))
                    .collect()
            }
            InputBijection::Table(images) => {
                if n > COMMUTE_TABLE_MAX_N {
                    return Err(Error::BlocklengthOutOfRange {
                        what: "commutes_with_channel (explicit table)",
                        n,
                        min: 1,
                        max: COMMUTE_TABLE_MAX_N,
                    });
                }
                if images.len() != 1 << n {
                    return Err(Error::NotABijection(n));
                }
                let mut seen = vec![false; 1 << n];
                for y in images {
                    if y.len() != n || seen[y.raw_bits() as usize] {
                        return Err(Error::NotABijection(n));
                    }
                    seen[y.raw_bits() as usize] = true;
                }
                Ok(images.iter().map(|y| y.raw_bits()).collect())
            }
        }
    }
}

/// Precomputed exact column structure of the transition matrix at one
/// (channel, n) pair. Each distinct mass (a numerator over the common
/// denominator `b^n`) is interned to an id, so a column is a vector of ids
/// over inputs in lexicographic order and multiset comparison is exact.
pub(crate) struct CommuteContext {
    cols: Vec<Vec<u32>>,
    sorted_cols: Vec<Vec<u32>>,
}

impl CommuteContext {
    pub(crate) fn new(n: usize, param: &ChannelParam) -> CommuteContext {
        let nrows = 1usize << n;
        let weights = param.mass_numerators(n);
        let mut intern: HashMap<BigUint, u32> = HashMap::new();
        let mut id_of = |v: BigUint| -> u32 {
            let next = intern.len() as u32;
            *intern.entry(v).or_insert(next)
        };
        let zero_id = id_of(BigUint::ZERO);

        let cols: Vec<Vec<u32>> = match param.kind() {
            ChannelKind::Bdc => {
                let ncols = (1usize << (n + 1)) - 1;
                // counts[row][key-1] = N(x_row, z_key)
                let mut cols = vec![vec![zero_id; nrows]; ncols];
                let mut table = Vec::new();
                for (row, x) in BitString::all_strings(n).enumerate() {
                    bitstring::subsequence_count_table_into(&x, &mut table);
                    for (key, &count) in table.iter().enumerate().skip(1) {
                        if count != 0 {
                            let len = key.ilog2() as usize;
                            cols[key - 1][row] = id_of(&weights[len] * count);
                        }
                    }
                }
                cols
            }
            ChannelKind::Bsc => {
                let weight_ids: Vec<u32> =
                    weights.iter().map(|w| id_of(w.clone())).collect();
                BitString::all_strings(n)
                    .map(|z| {
                        BitString::all_strings(n)
                            .map(|x| weight_ids[x.hamming(&z).unwrap() as usize])
                            .collect()
                    })
                    .collect()
            }
        };
        let mut sorted_cols = cols.clone();
        sorted_cols.sort_unstable();
        CommuteContext { cols, sorted_cols }
    }

    /// Decides the column-multiset criterion for the row permutation
    /// `table` (input index → index of its image).
    pub(crate) fn passes(&self, table: &[u32]) -> bool {
        let mut permuted: Vec<Vec<u32>> = self
            .cols
            .iter()
            .map(|col| table.iter().map(|&t| col[t as usize]).collect())
            .collect();
        permuted.sort_unstable();
        permuted == self.sorted_cols
    }
}

/// Decides whether `g` commutes with the channel at blocklength `n`:
/// whether some output bijection `h` makes `h ∘ Ch ∘ g` equal in
/// distribution to `Ch` on every length-`n` input. Exact arithmetic
/// throughout.
pub fn commutes_with_channel(
    g: &InputBijection,
    n: usize,
    param: &ChannelParam,
) -> Result<bool> {
    if n < 1 {
        return Err(Error::BlocklengthOutOfRange {
            what: "commutes_with_channel",
            n,
            min: 1,
            max: COMMUTE_ELEMENT_MAX_N,
        });
    }
    let table = g.row_table(n)?;
    Ok(CommuteContext::new(n, param).passes(&table))
}

fn perm_row_table(p: &Permutation, n: usize) -> Vec<u32> {
    BitString::all_strings(n)
        .map(|x| p.apply(&x).expect("matching blocklength").raw_bits())
        .collect()
}

/// All index permutations commuting with the channel at blocklength `n`;
/// for the BDC this is expected to be exactly {identity, reversal}.
/// Candidates are tested in parallel and returned in canonical order.
pub fn perm_symmetry_search(n: usize, param: &ChannelParam) -> Result<Vec<Permutation>> {
    if n < PERM_SEARCH_MIN_N || n > PERM_SEARCH_MAX_N {
        return Err(Error::BlocklengthOutOfRange {
            what: "perm_symmetry_search",
            n,
            min: PERM_SEARCH_MIN_N,
            max: PERM_SEARCH_MAX_N,
        });
    }
    let ctx = CommuteContext::new(n, param);
    let candidates: Vec<Permutation> = Permutation::all(n).collect();
    let mut passing: Vec<Permutation> = candidates
        .into_par_iter()
        .filter(|p| ctx.passes(&perm_row_table(p, n)))
        .collect();
    passing.sort();
    Ok(passing)
}

/// Result of the exhaustive blocklength-local search over all `(2^n)!`
/// input bijections.
///
/// A bijection passing at one blocklength need not extend to a full channel
/// group element, so the passing set is reported, not asserted against the
/// conjecture.
#[derive(Debug, Clone)]
pub struct ExhaustiveSearch {
    pub n: usize,
    /// Image tables over lexicographic inputs, canonically ordered.
    pub passing: Vec<Vec<BitString>>,
    pub candidates_tested: u64,
    /// True iff the four G̃ restrictions all pass.
    pub contains_klein_restrictions: bool,
    /// Orbit sizes of {0,1}^n under the group generated by the passing set.
    pub orbit_histogram: BTreeMap<usize, u64>,
}

/// Tests every bijection of `{0,1}^n` and reports the passing set together
/// with the orbit-size histogram of the group it generates.
pub fn exhaustive_symmetry_search(n: usize, param: &ChannelParam) -> Result<ExhaustiveSearch> {
    if n < 1 || n > EXHAUSTIVE_SEARCH_MAX_N {
        return Err(Error::BlocklengthOutOfRange {
            what: "exhaustive_symmetry_search",
            n,
            min: 1,
            max: EXHAUSTIVE_SEARCH_MAX_N,
        });
    }
    let ctx = CommuteContext::new(n, param);
    let size = 1usize << n;
    use itertools::Itertools;
    let candidates: Vec<Vec<u32>> = (0..size as u32).permutations(size).collect();
    let mut passing_tables: Vec<Vec<u32>> = candidates
        .into_par_iter()
        .filter(|table| ctx.passes(table))
        .collect();
    passing_tables.sort_unstable();

    let klein_tables: Vec<Vec<u32>> = [
        GroupElement::Identity,
        GroupElement::BitFlip,
        GroupElement::Reversal,
        GroupElement::FlipReversal,
    ]
    .iter()
    .map(|g| {
        BitString::all_strings(n)
            .map(|x| apply(g, &x).unwrap().raw_bits())
            .collect()
    })
    .collect();
    let contains_klein = klein_tables
        .iter()
        .all(|t| passing_tables.binary_search(t).is_ok());

    let orbit_histogram = orbit_size_histogram(size, &generate_closure(size, &passing_tables));
    let passing = passing_tables
        .iter()
        .map(|t| {
            t.iter()
                .map(|&b| BitString::from_raw(n, b))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(ExhaustiveSearch {
        n,
        passing,
        candidates_tested: factorial(size),
        contains_klein_restrictions: contains_klein,
        orbit_histogram,
    })
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Closure of a set of permutation tables under composition (they act on a
/// finite set, so closure under composition implies closure under inverse).
fn generate_closure(size: usize, generators: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let identity: Vec<u32> = (0..size as u32).collect();
    let mut group: Vec<Vec<u32>> = vec![identity.clone()];
    let mut frontier = vec![identity];
    while let Some(t) = frontier.pop() {
        for g in generators {
            let composed: Vec<u32> = (0..size).map(|i| g[t[i] as usize]).collect();
            if group.binary_search(&composed).is_err() {
                let pos = group.binary_search(&composed).unwrap_err();
                group.insert(pos, composed.clone());
                frontier.push(composed);
            }
        }
    }
    group
}

fn orbit_size_histogram(size: usize, group: &[Vec<u32>]) -> BTreeMap<usize, u64> {
    let mut seen = vec![false; size];
    let mut hist = BTreeMap::new();
    for start in 0..size {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for t in group {
                let y = t[x] as usize;
                if !seen[y] {
                    seen[y] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        *hist.entry(members.len()).or_insert(0) += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn bdc(d: &str) -> ChannelParam {
        ChannelParam::bdc(parse_rational(d).unwrap()).unwrap()
    }

    fn bsc(p: &str) -> ChannelParam {
        ChannelParam::bsc(parse_rational(p).unwrap()).unwrap()
    }

    fn element(g: GroupElement) -> InputBijection {
        InputBijection::Element(g)
    }

    #[test]
    fn known_bdc_symmetries_commute() {
        let param = bdc("1/2");
        for g in [
            GroupElement::Identity,
            GroupElement::BitFlip,
            GroupElement::Reversal,
            GroupElement::FlipReversal,
        ] {
            assert!(commutes_with_channel(&element(g), 4, &param).unwrap());
        }
    }

    #[test]
    fn transposition_fails_for_bdc() {
        // Swapping positions 1 and 2 is not a BDC symmetry (Proposition 1).
        let p = Permutation::new(vec![1, 0, 2]).unwrap();
        let g = element(GroupElement::IndexPermutation(p));
        assert!(!commutes_with_channel(&g, 3, &bdc("1/2")).unwrap());
    }

    #[test]
    fn any_permutation_commutes_with_bsc() {
        let param = bsc("1/3");
        for p in Permutation::all(4) {
            let g = element(GroupElement::IndexPermutation(p));
            assert!(commutes_with_channel(&g, 4, &param).unwrap());
        }
    }

    #[test]
    fn explicit_table_path() {
        let param = bdc("1/2");
        // The bit-flip as an explicit table.
        let table: Vec<BitString> = BitString::all_strings(2).map(|x| x.flipped()).collect();
        assert!(commutes_with_channel(&InputBijection::Table(table), 2, &param).unwrap());
        // A non-bijection is rejected.
        let bad = vec!["00", "00", "01", "10"]
            .into_iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert!(matches!(
            commutes_with_channel(&InputBijection::Table(bad), 2, &param),
            Err(Error::NotABijection(2))
        ));
    }

    #[test]
    fn perm_search_bdc_finds_identity_and_reversal() {
        for n in [3usize, 4] {
            let got = perm_symmetry_search(n, &bdc("1/2")).unwrap();
            assert_eq!(got.len(), 2, "n={n}");
            assert!(got.contains(&Permutation::identity(n)));
            assert!(got.contains(&Permutation::reversal(n)));
        }
    }

    #[test]
    fn perm_search_bsc_finds_all() {
        let got = perm_symmetry_search(3, &bsc("1/3")).unwrap();
        assert_eq!(got.len(), 6);
    }

    #[test]
    fn exhaustive_n1_identity_and_flip() {
        let r = exhaustive_symmetry_search(1, &bdc("1/2")).unwrap();
        assert_eq!(r.candidates_tested, 2);
        assert_eq!(r.passing.len(), 2);
        assert!(r.contains_klein_restrictions);
    }

    #[test]
    fn exhaustive_n2_contains_klein() {
        let r = exhaustive_symmetry_search(2, &bdc("1/2")).unwrap();
        assert_eq!(r.candidates_tested, 24);
        assert!(r.contains_klein_restrictions);
        assert!(r.passing.len() >= 4);
    }

    #[test]
    fn passing_set_closed_under_composition_and_inverse() {
        let r = exhaustive_symmetry_search(2, &bdc("1/3")).unwrap();
        let param = bdc("1/3");
        let tables: Vec<Vec<u32>> = r
            .passing
            .iter()
            .map(|images| images.iter().map(|y| y.raw_bits()).collect())
            .collect();
        for t1 in &tables {
            // inverse
            let mut inv = vec![0u32; t1.len()];
            for (i, &j) in t1.iter().enumerate() {
                inv[j as usize] = i as u32;
            }
            let inv_images: Vec<BitString> =
                inv.iter().map(|&b| BitString::from_raw(2, b)).collect();
            assert!(
                commutes_with_channel(&InputBijection::Table(inv_images), 2, &param).unwrap()
            );
            for t2 in &tables {
                let composed: Vec<BitString> = (0..t1.len())
                    .map(|i| BitString::from_raw(2, t1[t2[i] as usize]))
                    .collect();
                assert!(
                    commutes_with_channel(&InputBijection::Table(composed), 2, &param).unwrap()
                );
            }
        }
    }
}
