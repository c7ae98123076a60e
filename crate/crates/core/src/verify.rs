//! Self-verification: replays the library's central identities against the
//! brute-force oracle and reports one result per check. Used by the CLI
//! `verify` subcommand.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::counting::{
    count_chains, count_fixed_trees, PartitionWeightTable, SinglePartWeight,
};
use crate::error::{Error, Result};
use crate::oracle;
use crate::perm::Permutation;
use crate::sampler::{insert_cycle, remove_largest_cycle};

/// Largest `n` accepted by [`run_verification`].
pub const MAX_VERIFY_N: usize = 8;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &str, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            detail,
        }
    }

    fn fail(name: &str, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            detail,
        }
    }
}

/// Runs every self-check up to size `max_n` and returns one line per check.
pub fn run_verification(max_n: usize) -> Result<Vec<CheckResult>> {
    if max_n == 0 || max_n > MAX_VERIFY_N {
        return Err(Error::GuardExceeded {
            what: "verification",
            given: max_n,
            max: MAX_VERIFY_N,
        });
    }
    Ok(vec![
        check_product_formula(max_n),
        check_chain_counts(max_n.min(oracle::MAX_CHAIN_N)),
        check_bijection(max_n.min(7)),
        check_weight_table(),
    ])
}

/// Closed-form fixed-tree counts against exhaustive enumeration, for every
/// cycle type of every size up to `max_n` (zero for non-binary types).
fn check_product_formula(max_n: usize) -> CheckResult {
    const NAME: &str = "fixed-tree count: product formula vs exhaustive enumeration";
    let mut checked = 0usize;
    for n in 1..=max_n as u64 {
        for lambda in oracle::all_partitions(n) {
            let sigma = oracle::canonical_sigma(&lambda);
            let enumerated = match oracle::enumerate_fixed_trees(&sigma) {
                Ok(trees) => BigUint::from(trees.len()),
                Err(e) => return CheckResult::fail(NAME, format!("oracle error: {e}")),
            };
            let formula = count_fixed_trees(&lambda);
            if formula != enumerated {
                return CheckResult::fail(
                    NAME,
                    format!("cycle type {lambda}: formula {formula}, enumeration {enumerated}"),
                );
            }
            checked += 1;
        }
    }
    CheckResult::pass(NAME, format!("{checked} cycle types up to n={max_n}"))
}

/// Burnside chain counts against explicit orbit enumeration.
fn check_chain_counts(max_n: usize) -> CheckResult {
    const NAME: &str = "chain count: cycle-type sum vs orbit enumeration";
    let mut checked = 0usize;
    for n in 1..=max_n {
        for k in 1..=oracle::MAX_CHAIN_K {
            let orbits = match oracle::count_chains_bruteforce(n, k) {
                Ok(c) => BigUint::from(c),
                Err(e) => return CheckResult::fail(NAME, format!("oracle error: {e}")),
            };
            let formula = count_chains(n as u64, k as u32);
            if formula != orbits {
                return CheckResult::fail(
                    NAME,
                    format!("n={n} k={k}: formula {formula}, orbits {orbits}"),
                );
            }
            checked += 1;
        }
    }
    CheckResult::pass(NAME, format!("{checked} pairs (n,k), n<={max_n}, k<=3"))
}

/// Cycle removal and insertion are mutually inverse on every fixed tree of
/// every binary-type permutation with at least two cycles, and the removal
/// map is a bijection onto (reduced tree, edge) pairs.
fn check_bijection(max_n: usize) -> CheckResult {
    const NAME: &str = "cycle removal/insertion: round trip and pair count";
    let mut round_trips = 0usize;
    for n in 2..=max_n {
        for sigma in binary_type_permutations(n) {
            if sigma.cycles().len() < 2 {
                continue;
            }
            let fixed = match oracle::enumerate_fixed_trees(&sigma) {
                Ok(f) => f,
                Err(e) => return CheckResult::fail(NAME, format!("oracle error: {e}")),
            };
            let cycle = sigma.largest_cycle().to_vec();
            let sigma_prime = match sigma.without_cycle(&cycle) {
                Ok(p) => p,
                Err(e) => return CheckResult::fail(NAME, format!("restriction error: {e}")),
            };
            let mut images = std::collections::BTreeSet::new();
            for tree in &fixed {
                let (reduced, edge) = match remove_largest_cycle(tree, &sigma) {
                    Ok(pair) => pair,
                    Err(e) => {
                        return CheckResult::fail(
                            NAME,
                            format!("remove failed on {tree} under ({sigma}): {e}"),
                        )
                    }
                };
                let back = match insert_cycle(&reduced, edge, &cycle, &sigma_prime) {
                    Ok(t) => t,
                    Err(e) => {
                        return CheckResult::fail(
                            NAME,
                            format!("insert failed on {reduced} edge {edge:?}: {e}"),
                        )
                    }
                };
                if back != *tree {
                    return CheckResult::fail(
                        NAME,
                        format!("round trip changed {tree} into {back} under ({sigma})"),
                    );
                }
                images.insert((reduced.to_string(), edge));
                round_trips += 1;
            }
            // Injective, and the image size matches the pair count
            // (2n' - 1) * |fixed trees of the restriction|.
            let reduced_count = match oracle::enumerate_fixed_trees(&sigma_prime) {
                Ok(f) => f.len(),
                Err(e) => return CheckResult::fail(NAME, format!("oracle error: {e}")),
            };
            let n_prime = sigma_prime.domain_size();
            let expected = (2 * n_prime - 1) * reduced_count;
            if images.len() != fixed.len() || images.len() != expected {
                return CheckResult::fail(
                    NAME,
                    format!(
                        "({sigma}): {} fixed trees, {} distinct images, {} pairs expected",
                        fixed.len(),
                        images.len(),
                        expected
                    ),
                );
            }
        }
    }
    CheckResult::pass(NAME, format!("{round_trips} round trips up to n={max_n}"))
}

/// Weight-table row sums reproduce chain counts for every size up to 30 and
/// k up to 3, and the wrong single-part normalization provably breaks the
/// identity at size 4.
fn check_weight_table() -> CheckResult {
    const NAME: &str = "weight table: row sums vs chain counts";
    for k in 1..=3u32 {
        let table = PartitionWeightTable::build(30, k);
        for m in 1..=30usize {
            let row = table.row_sum(m);
            if !row.is_integer() {
                return CheckResult::fail(NAME, format!("m={m} k={k}: row sum {row} not integral"));
            }
            let expected = count_chains(m as u64, k);
            let got = row.to_integer().to_biguint().unwrap_or_else(Zero::zero);
            if got != expected {
                return CheckResult::fail(
                    NAME,
                    format!("m={m} k={k}: row sum {got}, chain count {expected}"),
                );
            }
        }
    }
    let wrong = PartitionWeightTable::build_with(4, 2, SinglePartWeight::ReciprocalFactorial);
    let bad_row = wrong.row_sum(4);
    if bad_row == table_value(13) {
        return CheckResult::fail(
            NAME,
            "the 1/(n-1)! single-part weight unexpectedly satisfies the identity".to_string(),
        );
    }
    CheckResult::pass(
        NAME,
        format!(
            "rows 1..=30 for k<=3 match; 1/(n-1)! variant gives {bad_row} instead of 13 at m=4,k=2"
        ),
    )
}

fn table_value(v: u64) -> crate::counting::ExactRational {
    use num_bigint::BigInt;
    crate::counting::ExactRational::from_integer(BigInt::from(v))
}

/// All permutations of `{1..n}` whose cycle type is a binary partition.
pub fn binary_type_permutations(n: usize) -> Vec<Permutation> {
    oracle::all_permutations(n)
        .into_iter()
        .filter(|p| p.cycle_type().is_binary())
        .collect()
}

/// Convenience for tests: canonical permutations of each binary type.
pub fn binary_type_representatives(n: u64) -> Vec<Permutation> {
    crate::counting::binary_partitions(n)
        .iter()
        .map(oracle::canonical_sigma)
        .collect()
}
