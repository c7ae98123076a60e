//! Uniform random generation of trees fixed by a permutation, of binary
//! cycle types, and of tangled chains.
//!
//! The tree sampler is constructive. A permutation with a single cycle of
//! size `2^k` fixes exactly one tree; splitting the cycle through its square
//! builds it. For more cycles, trees fixed by an extended permutation
//! correspond bijectively to (tree, edge) pairs of the smaller one: the
//! inserted cycle is spread over the edge orbit of the marked edge as a
//! forest of single-cycle trees hanging from new midpoints. Growing a tree
//! cycle by cycle, with a uniformly chosen edge before each insertion, is
//! therefore uniform over the fixed trees, runs in time linear in the label
//! count, and needs no precomputed coefficients.
//!
//! Cycle types are drawn from a [`PartitionWeightTable`] by repeatedly
//! choosing the (largest part, multiplicity) pair with probability
//! proportional to its exact weight, then recursing on the remainder with
//! the largest part bounded. All discrete draws scale the rational weights
//! by a common factorial to big integers and pick a uniform big integer
//! below the total, so no floating point is involved anywhere.

use std::collections::BTreeSet;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::counting::PartitionWeightTable;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::perm::Permutation;
use crate::tree::{EdgeRef, Label, Node, PhyloTree};

/// Seeded deterministic randomness for the samplers. The same seed always
/// produces the same draw sequence; draws below a bound are unbiased
/// (rejection sampling underneath).
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha12Rng,
    seed: u64,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
            seed,
        }
    }

    /// An independent stream derived from the same seed, for fan-out whose
    /// output must not depend on scheduling.
    pub fn from_seed_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    /// Uniform big integer in `[0, bound)`; `bound` must be positive.
    pub fn below_big(&mut self, bound: &BigUint) -> BigUint {
        self.rng.gen_biguint_below(bound)
    }
}

/// The unique tree fixed by a permutation consisting of one cycle whose
/// size is a power of two.
pub fn unique_single_cycle_tree(cycle: &Permutation) -> Result<PhyloTree> {
    if cycle.cycles().len() != 1 {
        return Err(Error::NotSingleCycle);
    }
    let elems = &cycle.cycles()[0];
    if !elems.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(elems.len() as u64));
    }
    Ok(tree_of_cycle_order(elems))
}

/// Builds the unique fixed tree from a cycle given in cyclic order. The two
/// root subtrees carry the two cycles of the square of the permutation, and
/// so on recursively; the result does not depend on the rotation chosen.
fn tree_of_cycle_order(elems: &[Label]) -> PhyloTree {
    if elems.len() == 1 {
        return PhyloTree::leaf(elems[0]).expect("positive label");
    }
    let evens: Vec<Label> = elems.iter().copied().step_by(2).collect();
    let odds: Vec<Label> = elems.iter().copied().skip(1).step_by(2).collect();
    PhyloTree::join(tree_of_cycle_order(&evens), tree_of_cycle_order(&odds))
        .expect("cycle labels are distinct")
}

/// Extends a tree fixed by `sigma_prime` into a tree fixed by `sigma_prime`
/// plus the new `cycle`, hanging the cycle's leaves around the edge orbit
/// of `edge`. Preconditions: the cycle size is a power of two at least as
/// large as every cycle of `sigma_prime`, its labels are fresh, and `edge`
/// is an edge of `tree`.
pub fn insert_cycle(
    tree: &PhyloTree,
    edge: EdgeRef,
    cycle: &[Label],
    sigma_prime: &Permutation,
) -> Result<PhyloTree> {
    if !cycle.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(cycle.len() as u64));
    }
    let mut fresh = BTreeSet::new();
    for &l in cycle {
        if l == 0 {
            return Err(Error::InvalidLabel(0));
        }
        if !fresh.insert(l) {
            return Err(Error::DuplicateLabel(l));
        }
    }
    let existing = tree.label_set();
    if let Some(&l) = cycle.iter().find(|l| existing.contains(l)) {
        return Err(Error::LabelCollision(l));
    }
    if let Some(big) = sigma_prime.cycles().iter().find(|c| c.len() > cycle.len()) {
        return Err(Error::CycleTooSmall {
            cycle: cycle.len() as u64,
            existing: big.len() as u64,
        });
    }
    if !tree.is_valid_edge(edge) {
        return Err(Error::InvalidEdge(edge.0));
    }
    let induced = tree.induced_edge_permutation(sigma_prime)?;
    let mut arena = Arena::from_tree(tree, &induced);
    arena.insert_cycle(&min_first(cycle), edge.0 as u32);
    Ok(arena.into_tree())
}

fn min_first(cycle: &[Label]) -> Vec<Label> {
    let pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &l)| l)
        .map(|(i, _)| i)
        .expect("nonempty cycle");
    let mut out = Vec::with_capacity(cycle.len());
    out.extend_from_slice(&cycle[pos..]);
    out.extend_from_slice(&cycle[..pos]);
    out
}

/// Removes the largest cycle of `sigma` (ties broken towards the smallest
/// minimal element) from a fixed tree, returning the reduced tree and the
/// marked edge. Exact inverse of [`insert_cycle`].
pub fn remove_largest_cycle(
    tree: &PhyloTree,
    sigma: &Permutation,
) -> Result<(PhyloTree, EdgeRef)> {
    if !tree.is_fixed(sigma)? {
        return Err(Error::NotFixed);
    }
    if sigma.cycles().len() < 2 {
        return Err(Error::SingleCycle);
    }
    let cycle = sigma.largest_cycle();
    let cset: BTreeSet<Label> = cycle.iter().copied().collect();
    let n = tree.n_edges();

    // Parents, and the c-vertices (vertices all of whose descendant leaves
    // belong to the removed cycle). In preorder children follow parents, so
    // a reverse scan is bottom-up.
    let mut parent = vec![usize::MAX; n];
    let mut is_c = vec![false; n];
    for id in (0..n).rev() {
        match tree.node(id) {
            Node::Leaf(l) => is_c[id] = cset.contains(&l),
            Node::Internal(a, b) => {
                let (a, b) = (a as usize, b as usize);
                parent[a] = id;
                parent[b] = id;
                is_c[id] = is_c[a] && is_c[b];
            }
        }
    }
    debug_assert!(!is_c[0], "the root cannot be a c-vertex when other cycles remain");

    // The maximal c-vertex whose subtree contains the cycle's smallest
    // label, and its sibling: the merged edge in the reduced tree is the
    // one above the sibling.
    let min_label = *cset.iter().next().expect("nonempty cycle");
    let leaf_of_min = (0..n)
        .find(|&id| matches!(tree.node(id), Node::Leaf(l) if l == min_label))
        .expect("fixed tree contains the cycle labels");
    let mut w = leaf_of_min;
    while is_c[parent[w]] {
        w = parent[w];
    }
    let p = parent[w];
    let sibling = match tree.node(p) {
        Node::Internal(a, b) => {
            if a as usize == w {
                b as usize
            } else {
                a as usize
            }
        }
        Node::Leaf(_) => unreachable!("parent is internal"),
    };

    // Rebuild bottom-up, erasing every c-tree and splicing out each parent
    // of a maximal c-vertex (the parent keeps exactly one surviving child).
    let mut out: Vec<Node> = Vec::with_capacity(n);
    let mut rebuilt: Vec<Option<usize>> = vec![None; n];
    for id in (0..n).rev() {
        if is_c[id] {
            continue;
        }
        let new_id = match tree.node(id) {
            Node::Leaf(l) => {
                out.push(Node::Leaf(l));
                Some(out.len() - 1)
            }
            Node::Internal(a, b) => match (rebuilt[a as usize], rebuilt[b as usize]) {
                (Some(x), Some(y)) => {
                    out.push(Node::Internal(x as u32, y as u32));
                    Some(out.len() - 1)
                }
                (Some(x), None) => Some(x),
                (None, Some(y)) => Some(y),
                (None, None) => unreachable!("both children erased at a non-c-vertex"),
            },
        };
        rebuilt[id] = new_id;
    }
    let root = rebuilt[0].expect("root survives");
    let (reduced, map) = PhyloTree::canonical_from_with_map(&out, root);
    let marked = EdgeRef(map[rebuilt[sibling].expect("sibling survives")]);

    debug_assert!({
        let sigma_prime = sigma.without_cycle(cycle)?;
        reduced.is_fixed(&sigma_prime)?
    });
    Ok((reduced, marked))
}

/// Draws a uniformly random tree fixed by `sigma`; the cycle type must be a
/// binary partition (otherwise no tree is fixed and the support is empty).
/// Runs in time linear in the number of labels.
pub fn sample_fixed_tree(sigma: &Permutation, rng: &mut RandomSource) -> Result<PhyloTree> {
    if !sigma.cycle_type().is_binary() {
        return Err(Error::EmptySupport(sigma.cycle_type().to_string()));
    }
    let mut cycles: Vec<&Vec<Label>> = sigma.cycles().iter().collect();
    cycles.sort_by_key(|c| (c.len(), c[0]));

    let mut arena = Arena::with_capacity(2 * sigma.domain_size());
    arena.init_cycle_tree(cycles[0]);
    for cycle in &cycles[1..] {
        // Any fixed indexing of the current edges works; the arena's
        // insertion order is deterministic, so seeds reproduce exactly.
        let edge = rng.below(arena.len()) as u32;
        arena.insert_cycle(cycle, edge);
    }
    Ok(arena.into_tree())
}

/// Permutation with cycle type `lambda` on `{1..n}`, cycles on consecutive
/// blocks: `(1..lambda_1)(lambda_1+1..)...`.
pub fn canonical_permutation(lambda: &Partition) -> Permutation {
    let n = lambda.total();
    let mut cycles = Vec::with_capacity(lambda.len());
    let mut next = 1u64;
    for &p in lambda.parts() {
        cycles.push((next..next + p).collect());
        next += p;
    }
    Permutation::from_cycles_on(cycles, (1..=n).collect()).expect("fresh labels")
}

/// Draws a binary partition of `n` with probability proportional to its
/// chain weight `r^k / z`, using the precomputed table. Expected
/// `O(n log n)` comparisons per draw.
pub fn sample_partition(
    n: usize,
    k: u32,
    table: &PartitionWeightTable,
    rng: &mut RandomSource,
) -> Result<Partition> {
    if table.n_max() < n || table.k() != k {
        return Err(Error::TableMismatch {
            n: table.n_max(),
            k: table.k(),
            want_n: n,
            want_k: k,
        });
    }
    assert!(n >= 1, "need n >= 1");

    let mut parts = Vec::new();
    let mut m = n;
    let mut i_limit: Option<u32> = None;
    while m > 0 {
        let candidates: Vec<(u32, u64)> = table
            .pairs(m)
            .into_iter()
            .filter(|&(i, _)| i_limit.map(|lim| i < lim).unwrap_or(true))
            .collect();
        let total: BigUint = candidates
            .iter()
            .map(|&(i, j)| table.scaled_weight(m, i, j))
            .sum();
        debug_assert!(!total.is_zero(), "reachable states always have mass");
        let draw = rng.below_big(&total);
        let mut acc = BigUint::zero();
        let mut chosen = None;
        for &(i, j) in &candidates {
            acc += table.scaled_weight(m, i, j);
            if draw < acc {
                chosen = Some((i, j));
                break;
            }
        }
        let (i, j) = chosen.expect("draw is below the total");
        parts.extend(std::iter::repeat(1u64 << i).take(j as usize));
        m -= (j as usize) << i;
        i_limit = Some(i);
    }
    Ok(Partition::from_sorted(parts))
}

/// A tangled chain: a list of trees over one common label set, representing
/// the orbit of the tuple under simultaneous relabelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TangledChain {
    trees: Vec<PhyloTree>,
}

impl TangledChain {
    pub fn new(trees: Vec<PhyloTree>) -> Result<Self> {
        let first = trees
            .first()
            .ok_or(Error::EmptySupportDistribution)?
            .label_set();
        for t in &trees[1..] {
            if t.label_set() != first {
                return Err(Error::InvalidPartition(
                    "chain trees must share one label set".into(),
                ));
            }
        }
        Ok(Self { trees })
    }

    pub fn trees(&self) -> &[PhyloTree] {
        &self.trees
    }

    /// Chain length `k`.
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Number of leaves `n` of each tree.
    pub fn size(&self) -> usize {
        self.trees[0].n_leaves()
    }
}

/// Draws a uniformly random tangled chain of length `k` and size `n`:
/// a cycle type, then `k` independent fixed trees of a permutation with
/// that type.
pub fn sample_chain(
    n: usize,
    k: u32,
    table: &PartitionWeightTable,
    rng: &mut RandomSource,
) -> Result<TangledChain> {
    let lambda = sample_partition(n, k, table, rng)?;
    let sigma = canonical_permutation(&lambda);
    let trees = (0..k)
        .map(|_| sample_fixed_tree(&sigma, rng))
        .collect::<Result<Vec<_>>>()?;
    TangledChain::new(trees)
}

const NONE: u32 = u32::MAX;

/// Mutable tree under construction. Every vertex doubles as the edge above
/// it, so uniform-edge choice is uniform-index choice; `sigma` is the vertex
/// permutation induced by the permutation fixing the tree so far, updated
/// incrementally on every insertion. A zero label marks an internal node
/// (leaf labels are always positive).
struct Arena {
    label: Vec<Label>,
    child: Vec<[u32; 2]>,
    parent: Vec<u32>,
    sigma: Vec<u32>,
    root: u32,
}

impl Arena {
    fn with_capacity(cap: usize) -> Self {
        Self {
            label: Vec::with_capacity(cap),
            child: Vec::with_capacity(cap),
            parent: Vec::with_capacity(cap),
            sigma: Vec::with_capacity(cap),
            root: NONE,
        }
    }

    fn len(&self) -> usize {
        self.label.len()
    }

    fn push_leaf(&mut self, label: Label) -> u32 {
        debug_assert!(label > 0);
        let id = self.len() as u32;
        self.label.push(label);
        self.child.push([NONE, NONE]);
        self.parent.push(NONE);
        self.sigma.push(NONE);
        id
    }

    fn push_internal(&mut self, a: u32, b: u32) -> u32 {
        let id = self.len() as u32;
        self.label.push(0);
        self.child.push([a, b]);
        self.parent.push(NONE);
        self.sigma.push(NONE);
        self.parent[a as usize] = id;
        self.parent[b as usize] = id;
        id
    }

    /// Loads a canonical tree; `sigma` comes from the induced edge
    /// permutation, whose indices coincide with node ids.
    fn from_tree(tree: &PhyloTree, induced: &[EdgeRef]) -> Self {
        let n = tree.n_edges();
        assert!(n < NONE as usize);
        let mut arena = Self::with_capacity(2 * n);
        for id in 0..n {
            match tree.node(id) {
                Node::Leaf(l) => {
                    arena.label.push(l);
                    arena.child.push([NONE, NONE]);
                }
                Node::Internal(a, b) => {
                    arena.label.push(0);
                    arena.child.push([a, b]);
                }
            }
            arena.parent.push(NONE);
            arena.sigma.push(induced[id].0 as u32);
        }
        for id in 0..n {
            let [a, b] = arena.child[id];
            if a != NONE {
                arena.parent[a as usize] = id as u32;
                arena.parent[b as usize] = id as u32;
            }
        }
        arena.root = 0;
        arena
    }

    /// Starts the arena with the unique tree fixed by one cycle.
    fn init_cycle_tree(&mut self, elems: &[Label]) {
        debug_assert_eq!(self.len(), 0);
        let roots = self.build_forest(elems, 1);
        self.root = roots[0];
    }

    /// Builds `q` single-cycle trees for the cycle `elems` (minimum first):
    /// tree `r` carries the elements at positions congruent to `r` mod `q`,
    /// which form one cycle of the `q`-th power of the permutation. Wires
    /// `sigma` across the forest: tree `r` maps onto tree `r+1`, and the
    /// last tree maps back onto tree 0 shifted one class forward.
    fn build_forest(&mut self, elems: &[Label], q: usize) -> Vec<u32> {
        let m = elems.len();
        debug_assert!(m.is_power_of_two() && q.is_power_of_two() && m % q == 0);
        let per = m / q;

        let mut forests: Vec<Vec<Vec<u32>>> = Vec::with_capacity(q);
        for r in 0..q {
            let mut levels = Vec::new();
            let leaves: Vec<u32> = (0..per).map(|u| self.push_leaf(elems[r + u * q])).collect();
            levels.push(leaves);
            let mut width = per / 2;
            while width >= 1 {
                let prev = levels.last().expect("at least the leaf level");
                let next: Vec<u32> = (0..width)
                    .map(|u| self.push_internal(prev[u], prev[u + width]))
                    .collect();
                levels.push(next);
                width /= 2;
            }
            forests.push(levels);
        }

        for r in 0..q {
            let target = &forests[(r + 1) % q];
            for (j, level) in forests[r].iter().enumerate() {
                let width = level.len();
                for (u, &id) in level.iter().enumerate() {
                    let tu = if r == q - 1 { (u + 1) % width } else { u };
                    self.sigma[id as usize] = target[j][tu];
                }
            }
        }

        forests
            .iter()
            .map(|levels| levels.last().expect("nonempty")[0])
            .collect()
    }

    /// Subdivides the edge above `v` and hangs `hang` from the new midpoint.
    fn subdivide(&mut self, v: u32, hang: u32) -> u32 {
        let p = self.parent[v as usize];
        let mid = self.push_internal(v, hang);
        self.parent[mid as usize] = p;
        if p == NONE {
            self.root = mid;
        } else {
            let slots = &mut self.child[p as usize];
            if slots[0] == v {
                slots[0] = mid;
            } else {
                slots[1] = mid;
            }
        }
        mid
    }

    /// The bijection's forward direction: subdivides every edge in the
    /// orbit of `edge` and hangs one tree of the new cycle's forest from
    /// each midpoint.
    fn insert_cycle(&mut self, elems: &[Label], edge: u32) {
        if let [label] = elems {
            // Inserting a fixed point: the permutation so far is the
            // identity, every edge is its own orbit, and the new leaf and
            // midpoint are fixed vertices. Allocation-free hot path.
            debug_assert_eq!(self.sigma[edge as usize], edge);
            let leaf = self.push_leaf(*label);
            self.sigma[leaf as usize] = leaf;
            let mid = self.subdivide(edge, leaf);
            self.sigma[mid as usize] = mid;
            return;
        }

        let mut orbit = vec![edge];
        let mut v = self.sigma[edge as usize];
        while v != edge {
            orbit.push(v);
            v = self.sigma[v as usize];
        }
        let q = orbit.len();
        assert!(
            q.is_power_of_two() && elems.len() % q == 0,
            "edge orbit of size {q} cannot host a cycle of size {}",
            elems.len()
        );

        let roots = self.build_forest(elems, q);
        let mut midpoints = Vec::with_capacity(q);
        for (&v, &t) in orbit.iter().zip(&roots) {
            midpoints.push(self.subdivide(v, t));
        }
        for r in 0..q {
            self.sigma[midpoints[r] as usize] = midpoints[(r + 1) % q];
        }
    }

    fn into_tree(mut self) -> PhyloTree {
        // Subtree minima and sizes, computed bottom-up: leaves seed a
        // worklist, and an internal node joins it once both children are
        // done. Insertion rewires child slots in arbitrary directions, so
        // no single scan order is safe. Leaf labels already are their own
        // subtree minima, so `label` doubles as the minimum array, and the
        // no-longer-needed `sigma` is reused for sizes.
        let n = self.len();
        let mut size = std::mem::take(&mut self.sigma);
        let mut pending = vec![0u8; n];
        let mut order: Vec<u32> = Vec::with_capacity(n);
        for id in 0..n {
            if self.label[id] != 0 {
                size[id] = 1;
                order.push(id as u32);
            } else {
                pending[id] = 2;
            }
        }
        let mut head = 0;
        while head < order.len() {
            let id = order[head] as usize;
            head += 1;
            let p = self.parent[id];
            if p != NONE {
                let p = p as usize;
                pending[p] -= 1;
                if pending[p] == 0 {
                    let [a, b] = self.child[p];
                    self.label[p] = self.label[a as usize].min(self.label[b as usize]);
                    size[p] = size[a as usize] + size[b as usize] + 1;
                    order.push(p as u32);
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        drop(order);
        drop(pending);

        // `pending` is zero everywhere now, and `label` holds subtree
        // minima; internal nodes are the ones with children.
        let mut out = vec![Node::Leaf(0); n];
        let mut stack: Vec<(u32, u32)> = Vec::with_capacity(128);
        stack.push((self.root, 0));
        while let Some((id, at)) = stack.pop() {
            let [a, b] = self.child[id as usize];
            if a == NONE {
                out[at as usize] = Node::Leaf(self.label[id as usize]);
            } else {
                let (first, second) = if self.label[a as usize] < self.label[b as usize] {
                    (a, b)
                } else {
                    (b, a)
                };
                let first_at = at + 1;
                let second_at = at + 1 + size[first as usize];
                out[at as usize] = Node::Internal(first_at, second_at);
                stack.push((second, second_at));
                stack.push((first, first_at));
            }
        }
        PhyloTree::from_preorder(out)
    }
}
