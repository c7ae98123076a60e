//! Brute-force ground truth at desk scale: exhaustive enumeration of trees,
//! of fixed trees, and of chain orbits, plus distribution-distance helpers.
//! Hard size guards reject anything super-exponential; this module is a test
//! instrument, not a production path.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::counting::ExactRational;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::perm::Permutation;
use crate::tree::{EdgeRef, Label, PhyloTree};

/// Largest label-set size accepted by the tree enumerations.
pub const MAX_ENUM_LABELS: usize = 9;

/// Guards for the chain-orbit enumeration.
pub const MAX_CHAIN_N: usize = 5;
pub const MAX_CHAIN_K: usize = 3;

/// Every tree on the given label set, canonical and without duplicates.
/// Grows one leaf at a time into every edge, so each tree is produced
/// exactly once; the count is the double factorial `(2n-3)!!`.
pub fn enumerate_all_trees(labels: &BTreeSet<Label>) -> Result<Vec<PhyloTree>> {
    if labels.is_empty() || labels.len() > MAX_ENUM_LABELS {
        return Err(Error::GuardExceeded {
            what: "tree enumeration",
            given: labels.len(),
            max: MAX_ENUM_LABELS,
        });
    }
    let ordered: Vec<Label> = labels.iter().copied().collect();
    let mut trees = vec![PhyloTree::leaf(ordered[0])?];
    for &label in &ordered[1..] {
        let mut grown = Vec::with_capacity(trees.len() * (2 * trees[0].n_leaves() - 1));
        for tree in &trees {
            for edge in tree.edges() {
                grown.push(tree.insert_leaf(edge, label)?);
            }
        }
        trees = grown;
    }
    Ok(trees)
}

/// Every tree on the permutation's domain that the permutation fixes.
pub fn enumerate_fixed_trees(sigma: &Permutation) -> Result<Vec<PhyloTree>> {
    let labels: BTreeSet<Label> = sigma.domain().iter().copied().collect();
    let mut fixed = Vec::new();
    for tree in enumerate_all_trees(&labels)? {
        if tree.is_fixed(sigma)? {
            fixed.push(tree);
        }
    }
    Ok(fixed)
}

/// Number of orbits of k-tuples of trees on `{1..n}` under simultaneous
/// relabelling, counted by explicit orbit traversal.
pub fn count_chains_bruteforce(n: usize, k: usize) -> Result<u64> {
    if n == 0 || n > MAX_CHAIN_N {
        return Err(Error::GuardExceeded {
            what: "chain orbit enumeration (n)",
            given: n,
            max: MAX_CHAIN_N,
        });
    }
    if k == 0 || k > MAX_CHAIN_K {
        return Err(Error::GuardExceeded {
            what: "chain orbit enumeration (k)",
            given: k,
            max: MAX_CHAIN_K,
        });
    }

    let labels: BTreeSet<Label> = (1..=n as Label).collect();
    let trees = enumerate_all_trees(&labels)?;
    let index: HashMap<PhyloTree, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let perms = all_permutations(n);

    // action[t][p] = index of the relabelling of tree t by permutation p.
    let action: Vec<Vec<usize>> = trees
        .iter()
        .map(|t| {
            perms
                .iter()
                .map(|p| index[&t.apply(p).expect("domain matches")])
                .collect()
        })
        .collect();

    let b = trees.len();
    let total: usize = b.pow(k as u32);
    let mut visited = vec![false; total];
    let mut orbits = 0u64;
    let mut tuple = vec![0usize; k];
    for start in 0..total {
        if visited[start] {
            continue;
        }
        orbits += 1;
        // Decode the tuple once, then sweep its whole orbit.
        let mut rest = start;
        for slot in tuple.iter_mut().rev() {
            *slot = rest % b;
            rest /= b;
        }
        for p in 0..perms.len() {
            let mut flat = 0usize;
            for &t in &tuple {
                flat = flat * b + action[t][p];
            }
            visited[flat] = true;
        }
    }
    Ok(orbits)
}

/// A canonical representative of the orbit of a tuple of trees under
/// simultaneous relabelling: the lexicographically smallest serialized
/// tuple over all relabellings. Two tuples are in the same orbit iff their
/// representatives coincide.
pub fn chain_orbit_key(trees: &[PhyloTree]) -> Result<String> {
    let first = trees.first().ok_or(Error::EmptySupportDistribution)?;
    let labels = first.label_set();
    if labels.len() > MAX_CHAIN_N {
        return Err(Error::GuardExceeded {
            what: "chain orbit key",
            given: labels.len(),
            max: MAX_CHAIN_N,
        });
    }
    let n = labels.len();
    let mut best: Option<String> = None;
    for p in all_permutations_of(&labels.iter().copied().collect::<Vec<_>>()) {
        let relabelled: Vec<String> = trees
            .iter()
            .map(|t| t.apply(&p).map(|t| t.to_string()))
            .collect::<Result<_>>()?;
        let key = relabelled.join("|");
        if best.as_ref().map(|b| key < *b).unwrap_or(true) {
            best = Some(key);
        }
    }
    debug_assert!(n >= 1);
    Ok(best.expect("at least the identity relabelling"))
}

/// All `n!` permutations of `{1..n}`.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    all_permutations_of(&(1..=n as Label).collect::<Vec<_>>())
}

fn all_permutations_of(domain: &[Label]) -> Vec<Permutation> {
    let ground: BTreeSet<Label> = domain.iter().copied().collect();
    let mut images: Vec<Vec<Label>> = Vec::new();
    let mut current = domain.to_vec();
    permute_rec(&mut current, 0, &mut images);
    images
        .into_iter()
        .map(|img| {
            let cycles = cycles_of_map(domain, &img);
            Permutation::from_cycles_on(cycles, ground.clone()).expect("valid image")
        })
        .collect()
}

fn permute_rec(items: &mut Vec<Label>, at: usize, out: &mut Vec<Vec<Label>>) {
    if at == items.len() {
        out.push(items.clone());
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute_rec(items, at + 1, out);
        items.swap(at, i);
    }
}

fn cycles_of_map(domain: &[Label], image: &[Label]) -> Vec<Vec<Label>> {
    let pos: BTreeMap<Label, usize> = domain.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut visited = vec![false; domain.len()];
    let mut cycles = Vec::new();
    for start in 0..domain.len() {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            cycle.push(domain[cur]);
            cur = pos[&image[cur]];
            if cur == start {
                break;
            }
        }
        cycles.push(cycle);
    }
    cycles
}

/// All integer partitions of `n`, lexicographically decreasing.
pub fn all_partitions(n: u64) -> Vec<Partition> {
    fn gen(remaining: u64, max_part: u64, current: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::new(current.clone()).expect("positive parts"));
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            current.push(part);
            gen(remaining - part, part, current, out);
            current.pop();
        }
    }
    assert!(n >= 1);
    let mut out = Vec::new();
    gen(n, n, &mut Vec::new(), &mut out);
    out
}

/// A probability distribution over serialized objects; exact weights,
/// normalized to sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    weights: BTreeMap<String, ExactRational>,
}

impl Distribution {
    /// Uniform distribution over a support.
    pub fn uniform<I, S>(support: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let keys: BTreeSet<String> = support.into_iter().map(Into::into).collect();
        if keys.is_empty() {
            return Err(Error::EmptySupportDistribution);
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(keys.len()));
        Ok(Self {
            weights: keys.into_iter().map(|k| (k, w.clone())).collect(),
        })
    }

    /// Empirical distribution from observation counts.
    pub fn from_counts(counts: &BTreeMap<String, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::EmptySupportDistribution);
        }
        Ok(Self {
            weights: counts
                .iter()
                .map(|(k, &c)| {
                    (
                        k.clone(),
                        BigRational::new(BigInt::from(c), BigInt::from(total)),
                    )
                })
                .collect(),
        })
    }

    /// Distribution from explicit nonnegative weights, normalized.
    pub fn from_weights(weights: BTreeMap<String, ExactRational>) -> Result<Self> {
        if weights.values().any(|w| w.is_negative()) {
            return Err(Error::InvalidPartition("negative weight".into()));
        }
        let total: ExactRational = weights.values().sum();
        if total.is_zero() || weights.is_empty() {
            return Err(Error::EmptySupportDistribution);
        }
        Ok(Self {
            weights: weights.into_iter().map(|(k, w)| (k, w / &total)).collect(),
        })
    }

    pub fn probability(&self, key: &str) -> ExactRational {
        self.weights.get(key).cloned().unwrap_or_else(Zero::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &String> {
        self.weights.keys()
    }
}

/// Total variation distance: half the L1 distance between the two
/// probability vectors over the union of supports. Always in `[0, 1]`.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> ExactRational {
    let keys: BTreeSet<&String> = a.weights.keys().chain(b.weights.keys()).collect();
    let mut sum = ExactRational::zero();
    for key in keys {
        sum += (a.probability(key) - b.probability(key)).abs();
    }
    sum / BigRational::from_integer(BigInt::from(2))
}

/// `(2n-3)!!` with the convention `(-1)!! = 1`: the number of trees on `n`
/// labelled leaves.
pub fn double_factorial_tree_count(n: u64) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    let mut product = BigUint::one();
    let mut factor = 3i64;
    while factor <= 2 * n as i64 - 3 {
        product *= BigUint::from(factor as u64);
        factor += 2;
    }
    product
}

/// Convenience: the canonical block permutation of a cycle type, over
/// `{1..n}` — the representative used when a count depends only on the type.
pub fn canonical_sigma(lambda: &Partition) -> Permutation {
    crate::sampler::canonical_permutation(lambda)
}

/// Pairs `(tree, edge)` over all fixed trees of `sigma`: the target set of
/// the cycle-removal map.
pub fn enumerate_fixed_tree_edge_pairs(
    sigma: &Permutation,
) -> Result<Vec<(PhyloTree, EdgeRef)>> {
    let mut pairs = Vec::new();
    for tree in enumerate_fixed_trees(sigma)? {
        for edge in tree.edges() {
            pairs.push((tree.clone(), edge));
        }
    }
    Ok(pairs)
}
