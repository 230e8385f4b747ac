//! Partitions of `{0,1}^n` by exact output-law fingerprints and by float
//! entropy, compared against the orbit partition.
//!
//! The primary classifier is the exact multiset of output probabilities of
//! `BDC_d` on an input: a bijection-invariant of the output law, strictly
//! finer than output entropy and exactly decidable. The float entropy
//! partition mirrors the numerical experiment but is tolerance-based.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::json;

use crate::bitstring::{self, BitString};
use crate::channel::{ChannelKind, ChannelParam};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::symmetry;

/// Default gap tolerance (bits) for grouping float entropies.
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-9;

/// Largest blocklength for the full 2^n classification experiments.
pub const CLASSIFY_MAX_N: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionLabel {
    Orbit,
    Fingerprint,
    Entropy,
}

/// A disjoint cover of `{0,1}^n` in canonical order: members sorted within
/// each class, classes sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    label: PartitionLabel,
    classes: Vec<Vec<BitString>>,
}

impl Partition {
    /// Canonicalizes and validates the disjoint-cover invariant.
    pub fn new(n: usize, label: PartitionLabel, mut classes: Vec<Vec<BitString>>) -> Result<Self> {
        let mut total = 0usize;
        for class in &mut classes {
            class.sort();
            class.dedup();
            total += class.len();
        }
        classes.sort_by(|a, b| a[0].cmp(&b[0]));
        if total != 1usize << n {
            return Err(Error::InvalidInput(format!(
                "partition of {{0,1}}^{n} covers {total} strings, expected {}",
                1usize << n
            )));
        }
        let mut seen = vec![false; 1 << n];
        for class in &classes {
            for x in class {
                if x.len() != n {
                    return Err(Error::BlocklengthMismatch {
                        expected: n,
                        got: x.len(),
                    });
                }
                let idx = x.raw_bits() as usize;
                if seen[idx] {
                    return Err(Error::InvalidInput(format!("string {x} appears twice")));
                }
                seen[idx] = true;
            }
        }
        Ok(Partition { n, label, classes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> PartitionLabel {
        self.label
    }

    pub fn classes(&self) -> &[Vec<BitString>] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Class index of every string, indexed by its raw bits.
    pub fn class_ids(&self) -> Vec<usize> {
        let mut ids = vec![0usize; 1 << self.n];
        for (ci, class) in self.classes.iter().enumerate() {
            for x in class {
                ids[x.raw_bits() as usize] = ci;
            }
        }
        ids
    }

    pub fn class_size_histogram(&self) -> BTreeMap<usize, u64> {
        let mut hist = BTreeMap::new();
        for class in &self.classes {
            *hist.entry(class.len()).or_insert(0) += 1;
        }
        hist
    }

    /// True iff every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> Result<bool> {
        if self.n != coarser.n {
            return Err(Error::BlocklengthMismatch {
                expected: self.n,
                got: coarser.n,
            });
        }
        let coarse_ids = coarser.class_ids();
        Ok(self.classes.iter().all(|class| {
            let id = coarse_ids[class[0].raw_bits() as usize];
            class
                .iter()
                .all(|x| coarse_ids[x.raw_bits() as usize] == id)
        }))
    }
}

/// Identical set-of-sets (labels are ignored).
pub fn partitions_equal(p1: &Partition, p2: &Partition) -> Result<bool> {
    if p1.n() != p2.n() {
        return Err(Error::BlocklengthMismatch {
            expected: p1.n(),
            got: p2.n(),
        });
    }
    Ok(p1.classes == p2.classes)
}

/// Canonical multiset of the exact output probabilities of `BDC_d` on an
/// input: numerators over the common denominator `b^n`, sorted, with
/// multiplicities. Equal fingerprints imply equal output entropies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    denominator: BigUint,
    entries: Vec<(BigUint, u64)>,
}

impl Fingerprint {
    /// The multiset as reduced rationals with multiplicities, ascending.
    pub fn mass_multiset(&self) -> Vec<(Rational, u64)> {
        self.entries
            .iter()
            .map(|(num, mult)| {
                (
                    Rational::new(num.clone().into(), self.denominator.clone().into()),
                    *mult,
                )
            })
            .collect()
    }

    pub fn support_size(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }
}

fn require_bdc(param: &ChannelParam, what: &str) -> Result<()> {
    if param.kind() != ChannelKind::Bdc {
        return Err(Error::InvalidParam(format!(
            "{what} classifies deletion-channel output laws; got a BSC parameter"
        )));
    }
    Ok(())
}

/// Sorted (numerator, multiplicity) pairs of the output-law multiset of `x`,
/// computed from a reusable flat count table.
fn fingerprint_entries(
    x: &BitString,
    weight_nums: &[BigUint],
    table: &mut Vec<u64>,
) -> Vec<(BigUint, u64)> {
    bitstring::subsequence_count_table_into(x, table);
    // Multiplicity of each (output length, embedding count) pair.
    let mut by_len_count: HashMap<(u32, u64), u64> = HashMap::new();
    for (key, &count) in table.iter().enumerate().skip(1) {
        if count != 0 {
            let len = key.ilog2();
            *by_len_count.entry((len, count)).or_insert(0) += 1;
        }
    }
    let mut merged: BTreeMap<BigUint, u64> = BTreeMap::new();
    for ((len, count), mult) in by_len_count {
        let numerator = &weight_nums[len as usize] * count;
        *merged.entry(numerator).or_insert(0) += mult;
    }
    merged.into_iter().collect()
}

/// Exact output-probability multiset of `BDC_d` on `x`.
pub fn fingerprint(x: &BitString, param: &ChannelParam) -> Result<Fingerprint> {
    require_bdc(param, "fingerprint")?;
    let n = x.len();
    let weight_nums = param.mass_numerators(n);
    let denominator = param.common_denominator(n);
    let entries = if n <= 16 {
        fingerprint_entries(x, &weight_nums, &mut Vec::new())
    } else {
        let mut merged: BTreeMap<BigUint, u64> = BTreeMap::new();
        for (y, count) in bitstring::all_subsequence_counts(x)? {
            *merged
                .entry(&weight_nums[y.len()] * count)
                .or_insert(0) += 1;
        }
        merged.into_iter().collect()
    };
    let total: BigUint = entries.iter().map(|(num, mult)| num * mult).sum();
    assert_eq!(total, denominator, "fingerprint masses must sum to 1");
    Ok(Fingerprint {
        denominator,
        entries,
    })
}

fn check_classify_n(n: usize, what: &'static str) -> Result<()> {
    if n < 1 || n > CLASSIFY_MAX_N {
        return Err(Error::BlocklengthOutOfRange {
            what,
            n,
            min: 1,
            max: CLASSIFY_MAX_N,
        });
    }
    Ok(())
}

/// Fingerprints of all of `{0,1}^n`, in parallel, indexed by raw bits.
fn all_fingerprint_entries(n: usize, param: &ChannelParam) -> Vec<Vec<(BigUint, u64)>> {
    let weight_nums = param.mass_numerators(n);
    (0..1u32 << n)
        .into_par_iter()
        .map_init(Vec::new, |table, bits| {
            fingerprint_entries(&BitString::from_raw(n, bits), &weight_nums, table)
        })
        .collect()
}

/// Partition of `{0,1}^n` by exact fingerprint.
pub fn fingerprint_partition(n: usize, param: &ChannelParam) -> Result<Partition> {
    require_bdc(param, "fingerprint_partition")?;
    check_classify_n(n, "fingerprint_partition")?;
    let mut groups: HashMap<Vec<(BigUint, u64)>, Vec<BitString>> = HashMap::new();
    for (bits, fp) in all_fingerprint_entries(n, param).into_iter().enumerate() {
        groups
            .entry(fp)
            .or_default()
            .push(BitString::from_raw(n, bits as u32));
    }
    Partition::new(
        n,
        PartitionLabel::Fingerprint,
        groups.into_values().collect(),
    )
}

/// Output entropies (bits) of all of `{0,1}^n`, indexed by raw bits; each
/// accumulated in ascending column order from the exact law.
fn all_entropies(n: usize, param: &ChannelParam) -> Vec<f64> {
    let w: Vec<f64> = param.mass_f64(n);
    (0..1u32 << n)
        .into_par_iter()
        .map_init(Vec::new, |table, bits| {
            bitstring::subsequence_count_table_into(&BitString::from_raw(n, bits), table);
            let mut h = 0f64;
            for (key, &count) in table.iter().enumerate().skip(1) {
                if count != 0 {
                    let p = count as f64 * w[key.ilog2() as usize];
                    h -= p * p.log2();
                }
            }
            h
        })
        .collect()
}

/// Partition of `{0,1}^n` by single-linkage grouping of sorted output
/// entropies with gap ≤ `tol`. Warns when an inter-class gap comes within
/// `100·tol` of the threshold (resolution hazard).
pub fn entropy_partition(n: usize, param: &ChannelParam, tol: f64) -> Result<Partition> {
    require_bdc(param, "entropy_partition")?;
    check_classify_n(n, "entropy_partition")?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "entropy tolerance must be positive, got {tol}"
        )));
    }
    let mut order: Vec<(f64, u32)> = all_entropies(n, param)
        .into_iter()
        .enumerate()
        .map(|(bits, h)| (h, bits as u32))
        .collect();
    order.sort_by(|a, b| a.partial_cmp(b).expect("entropies are finite"));

    let mut classes: Vec<Vec<BitString>> = Vec::new();
    let mut current = vec![BitString::from_raw(n, order[0].1)];
    let mut prev_h = order[0].0;
    for &(h, bits) in &order[1..] {
        let gap = h - prev_h;
        if gap <= tol {
            current.push(BitString::from_raw(n, bits));
        } else {
            if gap < 100.0 * tol {
                log::warn!(
                    "entropy partition at n={n}: inter-class gap {gap:.3e} is within \
                     100x of tolerance {tol:.1e}"
                );
            }
            classes.push(std::mem::take(&mut current));
            current.push(BitString::from_raw(n, bits));
        }
        prev_h = h;
    }
    classes.push(current);
    Partition::new(n, PartitionLabel::Entropy, classes)
}

/// Everything the conjecture experiment produces at one blocklength.
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub n: usize,
    pub param: ChannelParam,
    pub orbit: Partition,
    pub fingerprint: Partition,
    pub entropy: Partition,
    pub equal_orbit_fingerprint: bool,
    pub equal_fingerprint_entropy: bool,
    pub orbit_refines_fingerprint: bool,
    pub class_size_histogram: BTreeMap<usize, u64>,
    pub elapsed_ms: u64,
}

impl ConjectureReport {
    pub fn all_equal(&self) -> bool {
        self.equal_orbit_fingerprint && self.equal_fingerprint_entropy
    }

    pub fn to_json(&self) -> serde_json::Value {
        let hist: BTreeMap<String, u64> = self
            .class_size_histogram
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        json!({
            "n": self.n,
            "d": self.param.value().to_string(),
            "orbit_classes": self.orbit.class_count(),
            "fingerprint_classes": self.fingerprint.class_count(),
            "entropy_classes": self.entropy.class_count(),
            "equal_orbit_fingerprint": self.equal_orbit_fingerprint,
            "equal_fingerprint_entropy": self.equal_fingerprint_entropy,
            "orbit_refines_fingerprint": self.orbit_refines_fingerprint,
            "class_size_histogram": hist,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

/// Runs the full experiment at one blocklength: orbit, fingerprint and
/// entropy partitions, equality verdicts, and the unconditional refinement
/// check (orbits must refine fingerprints; equality is the conjecture's
/// evidence).
pub fn verify_conjecture(n: usize, param: &ChannelParam) -> Result<ConjectureReport> {
    require_bdc(param, "verify_conjecture")?;
    check_classify_n(n, "verify_conjecture")?;
    let start = Instant::now();
    let orbit = symmetry::orbit_partition(n)?;
    let fp = fingerprint_partition(n, param)?;
    let ent = entropy_partition(n, param, DEFAULT_ENTROPY_TOL)?;
    let equal_orbit_fingerprint = partitions_equal(&orbit, &fp)?;
    let equal_fingerprint_entropy = partitions_equal(&fp, &ent)?;
    let orbit_refines_fingerprint = orbit.refines(&fp)?;
    let class_size_histogram = orbit.class_size_histogram();
    Ok(ConjectureReport {
        n,
        param: param.clone(),
        orbit,
        fingerprint: fp,
        entropy: ent,
        equal_orbit_fingerprint,
        equal_fingerprint_entropy,
        orbit_refines_fingerprint,
        class_size_histogram,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Per-string classification CSV: `n,input,orbit_id,fingerprint_class_id,
/// entropy_bits` with twelve decimal digits, LF endings, canonical row order.
pub fn write_entropy_classes_csv(
    n: usize,
    param: &ChannelParam,
    out: &mut impl Write,
) -> Result<()> {
    require_bdc(param, "entropy-classes export")?;
    check_classify_n(n, "entropy-classes export")?;
    let orbit_ids = symmetry::orbit_partition(n)?.class_ids();
    let fp_ids = fingerprint_partition(n, param)?.class_ids();
    let entropies = all_entropies(n, param);
    let write = |out: &mut dyn Write| -> io::Result<()> {
        out.write_all(b"n,input,orbit_id,fingerprint_class_id,entropy_bits\n")?;
        for bits in 0..1u32 << n {
            let x = BitString::from_raw(n, bits);
            writeln!(
                out,
                "{n},{x},{},{},{:.12}",
                orbit_ids[bits as usize], fp_ids[bits as usize], entropies[bits as usize]
            )?;
        }
        Ok(())
    };
    write(out).map_err(|e| Error::InvalidInput(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn bdc(d: &str) -> ChannelParam {
        ChannelParam::bdc(parse_rational(d).unwrap()).unwrap()
    }

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn fingerprint_examples() {
        // Frozen from the exact n=2 distributions at d = 1/2.
        let fp = fingerprint(&bs("01"), &bdc("1/2")).unwrap();
        assert_eq!(fp.mass_multiset(), vec![(rat("1/4"), 4)]);
        let fp = fingerprint(&bs("00"), &bdc("1/2")).unwrap();
        assert_eq!(fp.mass_multiset(), vec![(rat("1/4"), 2), (rat("1/2"), 1)]);
    }

    #[test]
    fn fingerprint_invariant_under_group() {
        let param = bdc("1/3");
        for xb in 0..1u32 << 8 {
            let x = BitString::from_raw(8, xb);
            let fp = fingerprint(&x, &param).unwrap();
            assert_eq!(fingerprint(&x.reversed(), &param).unwrap(), fp);
            assert_eq!(fingerprint(&x.flipped(), &param).unwrap(), fp);
        }
    }

    #[test]
    fn fingerprint_matches_output_distribution_multiset() {
        let param = bdc("2/5");
        for xb in 0..1u32 << 5 {
            let x = BitString::from_raw(5, xb);
            let fp = fingerprint(&x, &param).unwrap();
            let mut from_dist: BTreeMap<Rational, u64> = BTreeMap::new();
            for (_, mass) in crate::channel::output_distribution(&x, &param)
                .unwrap()
                .mass()
            {
                *from_dist.entry(mass.clone()).or_insert(0) += 1;
            }
            assert_eq!(fp.mass_multiset(), from_dist.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn fingerprint_partition_n2() {
        let p = fingerprint_partition(2, &bdc("1/2")).unwrap();
        assert_eq!(p.classes(), &[vec![bs("00"), bs("11")], vec![bs("01"), bs("10")]]);
    }

    #[test]
    fn partitions_n3_all_agree() {
        let param = bdc("1/2");
        let orbit = symmetry::orbit_partition(3).unwrap();
        let fp = fingerprint_partition(3, &param).unwrap();
        let ent = entropy_partition(3, &param, DEFAULT_ENTROPY_TOL).unwrap();
        assert!(partitions_equal(&orbit, &fp).unwrap());
        assert!(partitions_equal(&fp, &ent).unwrap());
        assert_eq!(fp.class_count(), 3);
    }

    #[test]
    fn intro_strings_in_different_classes() {
        let p = fingerprint_partition(5, &bdc("1/2")).unwrap();
        let ids = p.class_ids();
        assert_ne!(
            ids[bs("00000").raw_bits() as usize],
            ids[bs("01010").raw_bits() as usize]
        );
        let e = entropy_partition(5, &bdc("1/2"), DEFAULT_ENTROPY_TOL).unwrap();
        let ids = e.class_ids();
        assert_ne!(
            ids[bs("00000").raw_bits() as usize],
            ids[bs("01010").raw_bits() as usize]
        );
    }

    #[test]
    fn entropy_partition_n1_single_class() {
        let p = entropy_partition(1, &bdc("1/2"), DEFAULT_ENTROPY_TOL).unwrap();
        assert_eq!(p.class_count(), 1);
    }

    #[test]
    fn partitions_equal_examples() {
        let param = bdc("1/2");
        let p = fingerprint_partition(2, &param).unwrap();
        assert!(partitions_equal(&p, &p).unwrap());
        let singletons = Partition::new(
            2,
            PartitionLabel::Entropy,
            (0..4u32).map(|b| vec![BitString::from_raw(2, b)]).collect(),
        )
        .unwrap();
        let orbit = symmetry::orbit_partition(2).unwrap();
        assert!(!partitions_equal(&singletons, &orbit).unwrap());
        let p3 = fingerprint_partition(3, &param).unwrap();
        assert!(partitions_equal(&p, &p3).is_err());
    }

    #[test]
    fn conjecture_report_n3() {
        let report = verify_conjecture(3, &bdc("1/2")).unwrap();
        assert!(report.all_equal());
        assert!(report.orbit_refines_fingerprint);
        let hist: Vec<(usize, u64)> = report.class_size_histogram.into_iter().collect();
        assert_eq!(hist, vec![(2, 2), (4, 1)]);
    }

    #[test]
    fn refinement_is_unconditional() {
        for d in ["1/3", "1/2", "2/3"] {
            let param = bdc(d);
            for n in 1..=7 {
                let orbit = symmetry::orbit_partition(n).unwrap();
                let fp = fingerprint_partition(n, &param).unwrap();
                assert!(orbit.refines(&fp).unwrap(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn csv_shape() {
        let mut buf = Vec::new();
        write_entropy_classes_csv(2, &bdc("1/2"), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,input,orbit_id,fingerprint_class_id,entropy_bits");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("2,00,0,0,"));
        let entropy_field = lines[1].split(',').next_back().unwrap();
        assert_eq!(entropy_field.split('.').next_back().unwrap().len(), 12);
    }
}
