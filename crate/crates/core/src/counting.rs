//! Exact counting in big-integer / big-rational arithmetic.
//!
//! - [`count_fixed_trees`]: number of trees fixed by any permutation of a
//!   given cycle type; zero unless the type is a binary partition, one for a
//!   single cycle, otherwise the product of `2*(suffix sum) - 1` over the
//!   parts after the first.
//! - [`centralizer_size`]: `z = 1^m1 m1! ... r^mr mr!`, so that `n!/z` counts
//!   the permutations of that cycle type.
//! - [`count_chains`]: number of tangled chains of length `k` and size `n`,
//!   the Burnside average `sum over binary partitions of r^k / z`. The sum is
//!   an integer; the accumulator is checked for an exact cancellation.
//! - [`PartitionWeightTable`]: the per-size weights, grouped by (largest
//!   part, multiplicity), that drive the polynomial-time cycle-type sampler.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::partition::Partition;

/// Arbitrary-precision rational, always normalized: positive denominator,
/// numerator and denominator coprime. Arithmetic never rounds.
pub type ExactRational = BigRational;

fn rational(numer: u64, denom: u64) -> ExactRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Number of trees with leaf set of size `sum(parts)` fixed by any
/// permutation whose cycle type is `partition`.
pub fn count_fixed_trees(partition: &Partition) -> BigUint {
    if !partition.is_binary() {
        return BigUint::zero();
    }
    let parts = partition.parts();
    let mut suffix: u64 = parts.iter().skip(1).sum();
    let mut product = BigUint::one();
    for &part in &parts[1..] {
        product *= BigUint::from(2 * suffix - 1);
        suffix -= part;
    }
    product
}

/// Centralizer size `z` of a permutation with the given cycle type.
pub fn centralizer_size(partition: &Partition) -> BigUint {
    let mut z = BigUint::one();
    for (size, mult) in partition.multiplicities() {
        z *= BigUint::from(size).pow(mult as u32) * factorial(mult as usize);
    }
    z
}

/// Number of tangled chains of length `k` and size `n` (orbits of k-tuples
/// of trees on `{1..n}` under simultaneous relabelling).
pub fn count_chains(n: u64, k: u32) -> BigUint {
    assert!(n >= 1 && k >= 1, "need n >= 1 and k >= 1");
    let mut sum = ExactRational::zero();
    for lambda in binary_partitions(n) {
        let r = BigInt::from(count_fixed_trees(&lambda));
        let z = BigInt::from(centralizer_size(&lambda));
        sum += BigRational::new(r.pow(k), z);
    }
    // Burnside averages over a group action are integers; anything else
    // means the arithmetic above is broken.
    assert!(sum.is_integer(), "chain count reduced to {sum}, not an integer");
    sum.to_integer().to_biguint().expect("nonnegative")
}

/// All binary partitions of `n`, in lexicographically decreasing order.
pub fn binary_partitions(n: u64) -> Vec<Partition> {
    fn gen(remaining: u64, max_part: u64, current: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::from_sorted(current.clone()));
            return;
        }
        let mut part = largest_power_of_two_at_most(max_part.min(remaining));
        loop {
            current.push(part);
            gen(remaining - part, part, current, out);
            current.pop();
            if part == 1 {
                break;
            }
            part /= 2;
        }
    }
    assert!(n >= 1, "need n >= 1");
    let mut out = Vec::new();
    gen(n, n, &mut Vec::new(), &mut out);
    out
}

fn largest_power_of_two_at_most(x: u64) -> u64 {
    debug_assert!(x >= 1);
    1 << (63 - x.leading_zeros() as u64)
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// Weight used for the single-part row of the table, i.e. for sizes that are
/// themselves powers of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinglePartWeight {
    /// `1/n`: an `n`-cycle has centralizer size `n`, so its Burnside weight
    /// is `r^k / z = 1/n` for every `k`. This is the correct value.
    Reciprocal,
    /// `1/(n-1)!`: a frequently quoted but wrong normalization. It breaks
    /// the row-sum identity (already at size 4, length 2) and is retained
    /// only so that tests can demonstrate the failure.
    ReciprocalFactorial,
}

/// Exact weights `W[m][(i, j)]`, for all sizes `m <= n`: the sum of
/// `r^k / z` over the binary partitions of `m` whose largest part is `2^i`
/// with multiplicity `j`. Pairs with `j * 2^i > m` carry weight zero and are
/// not stored. Row `m` sums to the number of tangled chains of size `m`.
///
/// Built by the recurrence
/// `W[m][(i, j)] = (2(m - 2^i) - 1)^k / (2^i j) * W[m - 2^i][(i, j-1)]`,
/// where `(i, 0)` denotes the sum of all pairs with a strictly smaller `i`,
/// and the single-part rows use [`SinglePartWeight::Reciprocal`].
#[derive(Debug, Clone)]
pub struct PartitionWeightTable {
    n_max: usize,
    k: u32,
    rows: Vec<Row>,
    factorials: Vec<BigUint>,
}

#[derive(Debug, Clone, Default)]
struct Row {
    /// `entries[i][j - 1]` is the weight of the pair `(i, j)`.
    entries: Vec<Vec<ExactRational>>,
    /// The same weights scaled by `m!`; always integers, used for exact
    /// discrete sampling.
    scaled: Vec<Vec<BigUint>>,
    /// `prefix[i]` is the sum of all entries with first coordinate `< i`;
    /// the final element is the full row sum.
    prefix: Vec<ExactRational>,
}

impl PartitionWeightTable {
    /// Builds the table for all sizes up to `n` with chain length `k`.
    pub fn build(n: usize, k: u32) -> Self {
        Self::build_with(n, k, SinglePartWeight::Reciprocal)
    }

    /// Builds the table with an explicit single-part weight; use
    /// [`SinglePartWeight::Reciprocal`] for correct results.
    pub fn build_with(n: usize, k: u32, single_part: SinglePartWeight) -> Self {
        assert!(n >= 1 && k >= 1, "need n >= 1 and k >= 1");
        let mut factorials = Vec::with_capacity(n + 1);
        factorials.push(BigUint::one());
        for m in 1..=n {
            let next = factorials.last().unwrap() * BigUint::from(m as u64);
            factorials.push(next);
        }

        let mut rows: Vec<Row> = vec![Row::default()];
        for m in 1..=n {
            let imax = (m as u64).ilog2();
            let mut entries: Vec<Vec<ExactRational>> = Vec::with_capacity(imax as usize + 1);
            for i in 0..=imax {
                let block = 1u64 << i;
                let jmax = m as u64 / block;
                let mut row_i = Vec::with_capacity(jmax as usize);
                for j in 1..=jmax {
                    let value = if block == m as u64 {
                        debug_assert_eq!(j, 1);
                        match single_part {
                            SinglePartWeight::Reciprocal => rational(1, m as u64),
                            SinglePartWeight::ReciprocalFactorial => BigRational::new(
                                BigInt::one(),
                                BigInt::from(factorials[m - 1].clone()),
                            ),
                        }
                    } else {
                        let m_prev = m - block as usize;
                        let prev = if j == 1 {
                            Self::prefix_of(&rows[m_prev], i)
                        } else {
                            rows[m_prev].entries[i as usize][j as usize - 2].clone()
                        };
                        let base = BigInt::from(2 * (m as u64 - block) - 1);
                        prev * BigRational::new(base.pow(k), BigInt::from(block * j))
                    };
                    row_i.push(value);
                }
                entries.push(row_i);
            }

            let mut prefix = Vec::with_capacity(imax as usize + 2);
            prefix.push(ExactRational::zero());
            for row_i in &entries {
                let total: ExactRational =
                    prefix.last().unwrap() + row_i.iter().sum::<ExactRational>();
                prefix.push(total);
            }

            let m_fact = BigRational::from_integer(BigInt::from(factorials[m].clone()));
            let scaled = entries
                .iter()
                .map(|row_i| {
                    row_i
                        .iter()
                        .map(|w| {
                            let s = w * &m_fact;
                            // Every weight, put over denominator m!, has an
                            // integer numerator.
                            assert!(s.is_integer(), "weight {w} times {m}! is not an integer");
                            s.to_integer().to_biguint().expect("nonnegative weight")
                        })
                        .collect()
                })
                .collect();

            rows.push(Row {
                entries,
                scaled,
                prefix,
            });
        }

        Self {
            n_max: n,
            k,
            rows,
            factorials,
        }
    }

    fn prefix_of(row: &Row, i: u32) -> ExactRational {
        let idx = (i as usize).min(row.prefix.len() - 1);
        row.prefix[idx].clone()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// True iff the pair `(i, j)` is in the support set for size `m`.
    pub fn in_support(&self, m: usize, i: u32, j: u64) -> bool {
        j >= 1 && j.checked_shl(i).map(|v| v <= m as u64).unwrap_or(false)
    }

    /// All support pairs `(i, j)` for size `m`, by decreasing `i` then
    /// increasing `j`.
    pub fn pairs(&self, m: usize) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        if m == 0 {
            return out;
        }
        for i in (0..=(m as u64).ilog2()).rev() {
            for j in 1..=(m as u64 >> i) {
                out.push((i, j));
            }
        }
        out
    }

    /// The weight of pair `(i, j)` at size `m`; zero outside the support.
    pub fn weight(&self, m: usize, i: u32, j: u64) -> ExactRational {
        assert!(m <= self.n_max, "size {m} beyond table maximum {}", self.n_max);
        if !self.in_support(m, i, j) {
            return ExactRational::zero();
        }
        self.rows[m].entries[i as usize][j as usize - 1].clone()
    }

    /// The weight of pair `(i, j)` at size `m`, scaled by `m!`.
    pub fn scaled_weight(&self, m: usize, i: u32, j: u64) -> &BigUint {
        &self.rows[m].scaled[i as usize][j as usize - 1]
    }

    /// Sum of all weights with first coordinate `< i` at size `m`.
    pub fn weight_below(&self, m: usize, i: u32) -> ExactRational {
        Self::prefix_of(&self.rows[m], i)
    }

    /// Full row sum at size `m`; equals the chain count of size `m`.
    pub fn row_sum(&self, m: usize) -> ExactRational {
        self.rows[m].prefix.last().expect("nonempty prefix").clone()
    }

    pub fn factorial(&self, m: usize) -> &BigUint {
        &self.factorials[m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(p: &[u64]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn single_part_counts_one() {
        for k in 0..5 {
            assert_eq!(count_fixed_trees(&parts(&[1 << k])), BigUint::one());
        }
    }

    #[test]
    fn non_binary_counts_zero() {
        assert_eq!(count_fixed_trees(&parts(&[3, 1])), BigUint::zero());
        assert_eq!(count_fixed_trees(&parts(&[6, 2])), BigUint::zero());
    }

    #[test]
    fn product_formula_values() {
        assert_eq!(count_fixed_trees(&parts(&[2, 2])), BigUint::from(3u32));
        // (2*6-1) * (2*2-1)
        assert_eq!(count_fixed_trees(&parts(&[8, 4, 2])), BigUint::from(33u32));
        // (2*4-3)!! = 15, the number of all trees on 4 leaves.
        assert_eq!(
            count_fixed_trees(&parts(&[1, 1, 1, 1])),
            BigUint::from(15u32)
        );
    }

    #[test]
    fn removal_recursion_is_consistent() {
        // r(lambda) = (2 * |rest| - 1) * r(rest) after removing one largest part.
        for lambda in binary_partitions(8) {
            if lambda.len() < 2 {
                continue;
            }
            let rest = Partition::from_sorted(lambda.parts()[1..].to_vec());
            let expected =
                BigUint::from(2 * rest.total() - 1) * count_fixed_trees(&rest);
            assert_eq!(count_fixed_trees(&lambda), expected, "lambda={lambda}");
        }
    }

    #[test]
    fn centralizer_sizes() {
        assert_eq!(centralizer_size(&parts(&[1, 1, 1])), BigUint::from(6u32));
        assert_eq!(centralizer_size(&parts(&[2, 1])), BigUint::from(2u32));
        for n in 1..=8u64 {
            assert_eq!(centralizer_size(&parts(&[n])), BigUint::from(n));
        }
        assert_eq!(centralizer_size(&parts(&[8, 4, 2])), BigUint::from(64u32));
    }

    #[test]
    fn chain_counts_small() {
        assert_eq!(count_chains(3, 2), BigUint::from(2u32));
        assert_eq!(count_chains(4, 2), BigUint::from(13u32));
        assert_eq!(count_chains(5, 2), BigUint::from(114u32));
        assert_eq!(count_chains(4, 1), BigUint::from(2u32));
    }

    #[test]
    fn binary_partition_enumeration() {
        assert_eq!(binary_partitions(1), vec![parts(&[1])]);
        let four = binary_partitions(4);
        assert_eq!(
            four,
            vec![
                parts(&[4]),
                parts(&[2, 2]),
                parts(&[2, 1, 1]),
                parts(&[1, 1, 1, 1]),
            ]
        );
        assert_eq!(binary_partitions(6).len(), 6);
        for lambda in binary_partitions(9) {
            assert!(lambda.is_binary());
            assert_eq!(lambda.total(), 9);
        }
    }

    #[test]
    fn table_matches_definitions_at_size_four() {
        let table = PartitionWeightTable::build(4, 2);
        // Single part 4 = 2^2: weight 1/4.
        assert_eq!(table.weight(4, 2, 1), rational(1, 4));
        // Largest part 2 with multiplicity 2, i.e. (2,2): 3^2 / 8.
        assert_eq!(table.weight(4, 1, 2), rational(9, 8));
        // Largest part 2 with multiplicity 1, i.e. (2,1,1): 3^2 / 4.
        assert_eq!(table.weight(4, 1, 1), rational(9, 4));
        // All parts 1: 15^2 / 24.
        assert_eq!(table.weight(4, 0, 4), rational(225, 24));
        assert_eq!(table.weight(4, 0, 1), ExactRational::zero());
        assert_eq!(table.row_sum(4), rational(13, 1));
    }

    #[test]
    fn table_row_sums_match_chain_counts() {
        for k in 1..=3 {
            let table = PartitionWeightTable::build(12, k);
            for m in 1..=12 {
                let expected = BigRational::from_integer(BigInt::from(count_chains(m as u64, k)));
                assert_eq!(table.row_sum(m), expected, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn table_entries_match_definition_sums() {
        for k in 1..=3u32 {
            let table = PartitionWeightTable::build(8, k);
            for m in 1..=8usize {
                for (i, j) in table.pairs(m) {
                    let mut expected = ExactRational::zero();
                    for lambda in binary_partitions(m as u64) {
                        if lambda.parts()[0] == 1 << i
                            && lambda.parts().iter().filter(|&&p| p == 1 << i).count() as u64 == j
                        {
                            let r = BigInt::from(count_fixed_trees(&lambda));
                            let z = BigInt::from(centralizer_size(&lambda));
                            expected += BigRational::new(r.pow(k), z);
                        }
                    }
                    assert_eq!(table.weight(m, i, j), expected, "m={m} i={i} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn factorial_variant_breaks_row_sums() {
        // The wrong normalization leaks into every power-of-two row: at
        // k = 2 the size-4 sum becomes 1/6 + 9/4 + 9/4 + 225/24 = 337/24.
        let wrong = PartitionWeightTable::build_with(4, 2, SinglePartWeight::ReciprocalFactorial);
        assert_ne!(wrong.row_sum(4), rational(13, 1));
        assert_eq!(wrong.row_sum(4), rational(337, 24));
    }

    #[test]
    fn scaled_weights_are_exact() {
        let table = PartitionWeightTable::build(10, 2);
        for m in 1..=10usize {
            for (i, j) in table.pairs(m) {
                let scaled = BigRational::from_integer(BigInt::from(
                    table.scaled_weight(m, i, j).clone(),
                ));
                let direct = table.weight(m, i, j)
                    * BigRational::from_integer(BigInt::from(table.factorial(m).clone()));
                assert_eq!(scaled, direct);
            }
        }
    }
}
