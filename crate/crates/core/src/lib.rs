//! Exact-arithmetic toolkit for the symmetry structure of the binary
//! deletion channel (BDC) and binary symmetric channel (BSC).
//!
//! The crate computes exact output distributions and transition matrices,
//! exact matrix ranks, orbits of `{0,1}^n` under the four-element group
//! generated by bit-flip and reversal, output-law fingerprints and entropy
//! classes, brute-force symmetry searches over index permutations and over
//! all input bijections, and Blahut–Arimoto capacity optimization with
//! symmetry-invariance checks on the maximizer.
//!
//! Everything combinatorial is exact (big rationals / big integers);
//! floating point appears only in entropies and the capacity solver.

pub mod bitstring;
pub mod capacity;
pub mod channel;
pub mod classify;
pub mod error;
pub mod rank;
pub mod rational;
pub mod search;
pub mod symmetry;

pub use bitstring::{
    all_subsequence_counts, binomial, count_embeddings, distinct_outputs_of_length, parse,
    BitString, MAX_N,
};
pub use capacity::{
    blahut_arimoto, blahut_arimoto_with_init, bsc_capacity_closed_form, invariance_gap,
    mutual_information, orbit_symmetrize, random_distribution, InputDistribution, MiResult,
};
pub use channel::{
    output_distribution, output_entropy, sample_output, transition_matrix, ChannelKind,
    ChannelParam, ChannelSampler, OutputDistribution, TransitionMatrix, MATRIX_MAX_N,
};
pub use classify::{
    entropy_partition, fingerprint, fingerprint_partition, partitions_equal, verify_conjecture,
    ConjectureReport, Fingerprint, Partition, PartitionLabel, DEFAULT_ENTROPY_TOL,
};
pub use error::{Error, Result};
pub use rank::rank_exact;
pub use rational::{parse_rational, Rational};
pub use search::{
    commutes_with_channel, exhaustive_symmetry_search, perm_symmetry_search, ExhaustiveSearch,
    InputBijection,
};
pub use symmetry::{
    apply, bsc_translation_check, compose, inverse, klein_table_check, lp_permutations, orbit,
    orbit_count_burnside, orbit_partition, satisfies_local_property, step_string,
    step_support_size, GroupElement, Orbit, Permutation,
};
