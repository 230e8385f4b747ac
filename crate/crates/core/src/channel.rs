//! Exact output distributions and transition matrices for the binary
//! deletion channel (BDC) and binary symmetric channel (BSC).
//!
//! Every probability is an exact rational. The BDC law on input `x` puts
//! mass `N(x,y) · d^{n-|y|} (1-d)^{|y|}` on each distinct subsequence `y`,
//! where `N` is the embedding count; the BSC law puts
//! `p^h (1-p)^{n-h}` on each `y` at Hamming distance `h`. All outputs share
//! the common denominator `b^n` for a parameter `a/b`, which keeps the hot
//! paths in integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bitstring::{self, BitString, MAX_N};
use crate::error::{Error, Result};
use crate::rational::{in_open_unit_interval, rational_to_f64, unit_fraction_parts, Rational};

/// Largest blocklength for which a transition matrix is materialized
/// (2^n rows by 2^{n+1}-1 columns for the BDC).
pub const MATRIX_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bdc,
    Bsc,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Bdc => "bdc",
            ChannelKind::Bsc => "bsc",
        })
    }
}

/// Channel kind plus its exact rational parameter in (0, 1): deletion
/// probability `d` for the BDC, crossover probability `p` for the BSC.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelParam {
    kind: ChannelKind,
    value: Rational,
}

impl ChannelParam {
    pub fn new(kind: ChannelKind, value: Rational) -> Result<Self> {
        if !in_open_unit_interval(&value) {
            return Err(Error::InvalidParam(format!(
                "channel parameter must lie strictly between 0 and 1, got {value}"
            )));
        }
        Ok(ChannelParam { kind, value })
    }

    pub fn bdc(d: Rational) -> Result<Self> {
        Self::new(ChannelKind::Bdc, d)
    }

    pub fn bsc(p: Rational) -> Result<Self> {
        Self::new(ChannelKind::Bsc, p)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    /// `b^n` for parameter `a/b`: the common denominator of all masses at
    /// blocklength `n`.
    pub(crate) fn common_denominator(&self, n: usize) -> BigUint {
        let (_, b) = unit_fraction_parts(&self.value);
        b.pow(n as u32)
    }

    /// Mass numerators over [`Self::common_denominator`], indexed by output
    /// length `k` for the BDC (`a^{n-k} (b-a)^k`) and by Hamming distance
    /// `h` for the BSC (`a^h (b-a)^{n-h}`).
    pub(crate) fn mass_numerators(&self, n: usize) -> Vec<BigUint> {
        let (a, b) = unit_fraction_parts(&self.value);
        let c = &b - &a;
        let pow = |base: &BigUint, e: usize| base.pow(e as u32);
        (0..=n)
            .map(|j| match self.kind {
                ChannelKind::Bdc => pow(&a, n - j) * pow(&c, j),
                ChannelKind::Bsc => pow(&a, j) * pow(&c, n - j),
            })
            .collect()
    }

    /// Exact mass factors as rationals (numerators over `b^n`).
    pub(crate) fn mass_rationals(&self, n: usize) -> Vec<Rational> {
        let den = BigInt::from(self.common_denominator(n));
        self.mass_numerators(n)
            .into_iter()
            .map(|num| Rational::new(BigInt::from(num), den.clone()))
            .collect()
    }

    /// The exact mass factors rounded once to f64, for the entropy layer.
    pub(crate) fn mass_f64(&self, n: usize) -> Vec<f64> {
        self.mass_rationals(n).iter().map(rational_to_f64).collect()
    }
}

impl fmt::Display for ChannelParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind, self.value)
    }
}

/// Exact law of `Ch x` for a fixed input `x`: strictly positive rational
/// masses summing to exactly 1, keyed in global column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputDistribution {
    input: BitString,
    param: ChannelParam,
    mass: BTreeMap<BitString, Rational>,
}

impl OutputDistribution {
    pub fn input(&self) -> &BitString {
        &self.input
    }

    pub fn param(&self) -> &ChannelParam {
        &self.param
    }

    pub fn mass(&self) -> &BTreeMap<BitString, Rational> {
        &self.mass
    }

    pub fn prob(&self, y: &BitString) -> Rational {
        self.mass.get(y).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Computes the exact output law of the channel on `x`.
pub fn output_distribution(x: &BitString, param: &ChannelParam) -> Result<OutputDistribution> {
    let n = x.len();
    let numerators = param.mass_numerators(n);
    let den = BigInt::from(param.common_denominator(n));
    let mut mass = BTreeMap::new();
    match param.kind() {
        ChannelKind::Bdc => {
            for (y, count) in bitstring::all_subsequence_counts(x)? {
                let num = BigInt::from(&numerators[y.len()] * count);
                mass.insert(y, Rational::new(num, den.clone()));
            }
        }
        ChannelKind::Bsc => {
            for y in BitString::all_strings(n) {
                let h = x.hamming(&y)? as usize;
                let num = BigInt::from(numerators[h].clone());
                mass.insert(y, Rational::new(num, den.clone()));
            }
        }
    }
    let total: Rational = mass.values().sum();
    assert!(total.is_one(), "output masses must sum to exactly 1");
    Ok(OutputDistribution {
        input: *x,
        param: param.clone(),
        mass,
    })
}

enum Repr {
    /// Row-major embedding counts; entry = count * weight(len(col)).
    Bdc { counts: Vec<u32> },
    /// Entry = weight(hamming(row, col)); nothing materialized.
    Bsc,
}

/// Exact row-stochastic matrix of `Ch` restricted to length-`n` inputs.
///
/// Rows are `{0,1}^n` in lexicographic order. Columns are `{0,1}^{≤n}` in
/// length-then-lexicographic order for the BDC (2^{n+1}-1 of them) and
/// `{0,1}^n` for the BSC.
pub struct TransitionMatrix {
    n: usize,
    param: ChannelParam,
    cols: Vec<BitString>,
    weight_nums: Vec<BigUint>,
    denominator: BigUint,
    repr: Repr,
}

/// Builds the `n`th transition matrix. For the BDC the embedding counts of
/// every row are materialized (2^n × (2^{n+1}-1) of them), so `n` is capped
/// at [`MATRIX_MAX_N`].
pub fn transition_matrix(n: usize, param: &ChannelParam) -> Result<TransitionMatrix> {
    if n < 1 || n > MATRIX_MAX_N {
        return Err(Error::BlocklengthOutOfRange {
            what: "transition_matrix",
            n,
            min: 1,
            max: MATRIX_MAX_N,
        });
    }
    let weight_nums = param.mass_numerators(n);
    let denominator = param.common_denominator(n);
    match param.kind() {
        ChannelKind::Bdc => {
            let ncols = (1usize << (n + 1)) - 1;
            let mut counts = vec![0u32; (1 << n) * ncols];
            counts
                .par_chunks_mut(ncols)
                .enumerate()
                .for_each_init(Vec::new, |table, (row, out)| {
                    let x = BitString::from_raw(n, row as u32);
                    bitstring::subsequence_count_table_into(&x, table);
                    for (k, v) in table.iter().enumerate().skip(1) {
                        out[k - 1] = u32::try_from(*v).expect("count fits u32 for n <= 24");
                    }
                });
            let cols: Vec<BitString> = (1..=ncols).map(BitString::from_table_key).collect();
            let m = TransitionMatrix {
                n,
                param: param.clone(),
                cols,
                weight_nums,
                denominator,
                repr: Repr::Bdc { counts },
            };
            m.check_bdc_row_sums()?;
            Ok(m)
        }
        ChannelKind::Bsc => {
            let cols: Vec<BitString> = BitString::all_strings(n).collect();
            let m = TransitionMatrix {
                n,
                param: param.clone(),
                cols,
                weight_nums,
                denominator,
                repr: Repr::Bsc,
            };
            m.check_bsc_weight_sum()?;
            Ok(m)
        }
    }
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn param(&self) -> &ChannelParam {
        &self.param
    }

    pub fn num_rows(&self) -> usize {
        1 << self.n
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col_labels(&self) -> &[BitString] {
        &self.cols
    }

    pub fn row_label(&self, r: usize) -> BitString {
        BitString::from_raw(self.n, r as u32)
    }

    /// Integer numerator of entry (r, c) over the common denominator `b^n`.
    pub(crate) fn entry_numerator(&self, r: usize, c: usize) -> BigUint {
        match &self.repr {
            Repr::Bdc { counts } => {
                let count = counts[r * self.num_cols() + c];
                if count == 0 {
                    BigUint::zero()
                } else {
                    &self.weight_nums[self.cols[c].len()] * count
                }
            }
            Repr::Bsc => {
                let h = self
                    .row_label(r)
                    .hamming(&self.cols[c])
                    .expect("equal lengths") as usize;
                self.weight_nums[h].clone()
            }
        }
    }

    /// Exact entry (r, c) as a reduced rational.
    pub fn entry(&self, r: usize, c: usize) -> Rational {
        Rational::new(
            BigInt::from(self.entry_numerator(r, c)),
            BigInt::from(self.denominator.clone()),
        )
    }

    /// One row as exact rationals in column order.
    pub fn row(&self, r: usize) -> Vec<Rational> {
        (0..self.num_cols()).map(|c| self.entry(r, c)).collect()
    }

    /// Row-major f64 view (exact rationals rounded once per distinct value).
    pub(crate) fn to_f64_rows(&self) -> Vec<f64> {
        let w: Vec<f64> = self.param.mass_f64(self.n);
        let ncols = self.num_cols();
        let mut out = vec![0f64; self.num_rows() * ncols];
        match &self.repr {
            Repr::Bdc { counts } => {
                for (o, (&cnt, c)) in out
                    .iter_mut()
                    .zip(counts.iter().zip((0..ncols).cycle()))
                {
                    *o = cnt as f64 * w[self.cols[c].len()];
                }
            }
            Repr::Bsc => {
                for r in 0..self.num_rows() {
                    let x = self.row_label(r);
                    for c in 0..ncols {
                        out[r * ncols + c] = w[x.hamming(&self.cols[c]).unwrap() as usize];
                    }
                }
            }
        }
        out
    }

    /// Σ_{|z|=k} N(x,z) = C(n,k) per row implies exact row sums of 1.
    fn check_bdc_row_sums(&self) -> Result<()> {
        let Repr::Bdc { counts } = &self.repr else {
            return Ok(());
        };
        let ncols = self.num_cols();
        let want: Vec<u64> = (0..=self.n).map(|k| bitstring::binomial(self.n, k)).collect();
        for r in 0..self.num_rows() {
            let mut by_len = vec![0u64; self.n + 1];
            for c in 0..ncols {
                by_len[self.cols[c].len()] += counts[r * ncols + c] as u64;
            }
            if by_len != want {
                return Err(Error::InvalidInput(format!(
                    "row {r} of the transition matrix does not sum to 1"
                )));
            }
        }
        Ok(())
    }

    /// Σ_h C(n,h) a^h (b-a)^{n-h} = b^n; every BSC row is a permutation of
    /// the same multiset of weights.
    fn check_bsc_weight_sum(&self) -> Result<()> {
        let total: BigUint = self
            .weight_nums
            .iter()
            .enumerate()
            .map(|(h, w)| w * BigUint::from(bitstring::binomial(self.n, h)))
            .sum();
        if total != self.denominator {
            return Err(Error::InvalidInput(
                "BSC weights do not sum to 1".to_string(),
            ));
        }
        Ok(())
    }

    /// CSV export: header of column labels ("" rendered as "-"), one row per
    /// input, exact "num/den" entries, LF line endings.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let mut header = String::from("input");
        for c in &self.cols {
            header.push(',');
            header.push_str(&render_output_label(c));
        }
        out.write_all(header.as_bytes())?;
        out.write_all(b"\n")?;
        for r in 0..self.num_rows() {
            let mut line = self.row_label(r).to_string();
            for c in 0..self.num_cols() {
                line.push(',');
                line.push_str(&self.entry(r, c).to_string());
            }
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let columns: Vec<String> = self.cols.iter().map(|c| c.to_string()).collect();
        let mut rows = serde_json::Map::new();
        for r in 0..self.num_rows() {
            let entries: Vec<String> = (0..self.num_cols())
                .map(|c| self.entry(r, c).to_string())
                .collect();
            rows.insert(self.row_label(r).to_string(), json!(entries));
        }
        json!({
            "n": self.n,
            "kind": self.param.kind(),
            "param": self.param.value().to_string(),
            "columns": columns,
            "rows": rows,
        })
    }
}

/// The empty output string renders as "-" in CSV files.
pub fn render_output_label(y: &BitString) -> String {
    if y.is_empty() {
        "-".to_string()
    } else {
        y.to_string()
    }
}

/// Shannon entropy (bits) of the exact output law of `Ch x`, accumulated in
/// f64 in ascending column order.
pub fn output_entropy(x: &BitString, param: &ChannelParam) -> Result<f64> {
    let n = x.len();
    let w = param.mass_f64(n);
    let mut h = 0f64;
    match param.kind() {
        ChannelKind::Bdc => {
            for (y, count) in bitstring::all_subsequence_counts(x)? {
                let p = count as f64 * w[y.len()];
                h -= p * p.log2();
            }
        }
        ChannelKind::Bsc => {
            for y in BitString::all_strings(n) {
                let p = w[x.hamming(&y)? as usize];
                h -= p * p.log2();
            }
        }
    }
    Ok(h)
}

/// One draw from `Ch x` under a seed-stable generator (ChaCha8, one uniform
/// draw per input bit, left to right).
pub fn sample_output(x: &BitString, param: &ChannelParam, seed: u64) -> Result<BitString> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BitString::empty();
    for bit in x.iter() {
        let hit = bernoulli(&mut rng, param.value());
        out = match param.kind() {
            ChannelKind::Bdc => {
                if hit {
                    out
                } else {
                    out.push(bit)?
                }
            }
            ChannelKind::Bsc => out.push(bit ^ hit)?,
        };
    }
    Ok(out)
}

/// Streaming sampler over one generator; draws are consumed bit by bit so a
/// run of `trials` draws is reproducible from a single seed.
pub struct ChannelSampler {
    param: ChannelParam,
    rng: ChaCha8Rng,
}

impl ChannelSampler {
    pub fn new(param: &ChannelParam, seed: u64) -> Self {
        ChannelSampler {
            param: param.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn draw(&mut self, x: &BitString) -> BitString {
        let mut out = BitString::empty();
        for bit in x.iter() {
            let hit = bernoulli(&mut self.rng, self.param.value());
            out = match self.param.kind() {
                ChannelKind::Bdc => {
                    if hit {
                        out
                    } else {
                        out.push(bit).expect("output no longer than input")
                    }
                }
                ChannelKind::Bsc => out.push(bit ^ hit).expect("length preserved"),
            };
        }
        out
    }
}

/// Exact Bernoulli(a/b) when a, b fit in u64 (one uniform draw below b);
/// f64 threshold otherwise.
fn bernoulli(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    let (a, b) = unit_fraction_parts(p);
    match (a.to_u64(), b.to_u64()) {
        (Some(a), Some(b)) => rng.random_range(0..b) < a,
        _ => rng.random::<f64>() < rational_to_f64(p),
    }
}
