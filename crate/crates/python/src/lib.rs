//! Python bindings: the main types (trees, permutations, weight tables,
//! seeded randomness) and operations (exact counting, uniform sampling,
//! exhaustive enumeration) exposed as the `tanglegen_py` module.
//!
//! Build with `cargo build --release -p tanglegen-py` and import the
//! resulting `libtanglegen_py.so` as `tanglegen_py.so`; see
//! `python/smoke_test.py` at the repository root.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyType;

use tanglegen::sampler as ts;
use tanglegen::{counting, oracle, Label, Partition, PhyloTree};

fn to_py_err(err: tanglegen::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn partition_from_parts(parts: Vec<u64>) -> PyResult<Partition> {
    Partition::new(parts).map_err(to_py_err)
}

/// A rooted non-embedded binary tree with distinct positive leaf labels,
/// kept in canonical form.
#[pyclass(frozen, eq, hash)]
#[derive(PartialEq, Eq, Hash, Clone)]
struct Tree {
    inner: PhyloTree,
}

#[pymethods]
impl Tree {
    /// Parses a Newick string such as `((1,2),3);`.
    #[new]
    fn new(newick: &str) -> PyResult<Self> {
        Ok(Self {
            inner: tanglegen::from_newick(newick).map_err(to_py_err)?,
        })
    }

    /// Canonical Newick serialization.
    fn newick(&self) -> String {
        self.inner.to_string()
    }

    fn n_leaves(&self) -> usize {
        self.inner.n_leaves()
    }

    /// Number of edges including the root-edge (always `2n - 1`).
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    /// Sorted leaf labels.
    fn labels(&self) -> Vec<Label> {
        self.inner.label_set().into_iter().collect()
    }

    /// Relabels every leaf through the permutation.
    fn apply(&self, sigma: &Permutation) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.apply(&sigma.inner).map_err(to_py_err)?,
        })
    }

    /// True iff the permutation maps the tree to itself.
    fn is_fixed(&self, sigma: &Permutation) -> PyResult<bool> {
        self.inner.is_fixed(&sigma.inner).map_err(to_py_err)
    }

    fn __str__(&self) -> String {
        self.newick()
    }

    fn __repr__(&self) -> String {
        format!("Tree({:?})", self.newick())
    }
}

/// A permutation of a finite set of positive integer labels.
#[pyclass(frozen, eq, hash)]
#[derive(PartialEq, Eq, Hash, Clone)]
struct Permutation {
    inner: tanglegen::Permutation,
}

#[pymethods]
impl Permutation {
    /// Parses cycle notation such as `(1,4,3)(2,6)`. With `n` given the
    /// ground set is `{1..n}` (unmentioned labels are fixed points);
    /// otherwise it is the set of mentioned labels.
    #[new]
    #[pyo3(signature = (text, n=None))]
    fn new(text: &str, n: Option<u64>) -> PyResult<Self> {
        let ground: BTreeSet<Label> = match n {
            Some(n) => (1..=n).collect(),
            None => text
                .split(|c: char| !c.is_ascii_digit())
                .filter(|chunk| !chunk.is_empty())
                .map(|chunk| {
                    chunk
                        .parse::<Label>()
                        .map_err(|_| PyValueError::new_err("label out of range"))
                })
                .collect::<PyResult<_>>()?,
        };
        Ok(Self {
            inner: tanglegen::Permutation::parse(text, &ground).map_err(to_py_err)?,
        })
    }

    /// The identity permutation on `{1..n}`.
    #[classmethod]
    fn identity(_cls: &Bound<'_, PyType>, n: u64) -> PyResult<Self> {
        Ok(Self {
            inner: tanglegen::Permutation::identity(1..=n).map_err(to_py_err)?,
        })
    }

    /// Image of one label.
    fn apply(&self, label: Label) -> PyResult<Label> {
        self.inner.apply(label).map_err(to_py_err)
    }

    /// Sorted domain labels.
    fn domain(&self) -> Vec<Label> {
        self.inner.domain().to_vec()
    }

    /// Cycle sizes in non-increasing order.
    fn cycle_type(&self) -> Vec<u64> {
        self.inner.cycle_type().parts().to_vec()
    }

    /// Cycles, each starting at its minimal element, ordered by minimum.
    fn cycles(&self) -> Vec<Vec<Label>> {
        self.inner.cycles().to_vec()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.inner.to_string())
    }
}

/// Seeded deterministic randomness; the same seed reproduces every draw.
#[pyclass]
struct RandomSource {
    inner: ts::RandomSource,
}

#[pymethods]
impl RandomSource {
    #[new]
    fn new(seed: u64) -> Self {
        Self {
            inner: ts::RandomSource::from_seed(seed),
        }
    }

    fn seed(&self) -> u64 {
        self.inner.seed()
    }
}

/// Exact per-size weights for drawing the cycle type of a uniform tangled
/// chain of length `k`, for all sizes up to `n`.
#[pyclass(frozen)]
struct WeightTable {
    inner: counting::PartitionWeightTable,
}

#[pymethods]
impl WeightTable {
    #[new]
    fn new(n: usize, k: u32) -> PyResult<Self> {
        if n < 1 || k < 1 {
            return Err(PyValueError::new_err("need n >= 1 and k >= 1"));
        }
        Ok(Self {
            inner: counting::PartitionWeightTable::build(n, k),
        })
    }

    fn n(&self) -> usize {
        self.inner.n_max()
    }

    fn k(&self) -> u32 {
        self.inner.k()
    }

    /// Number of tangled chains of size `m` (the row sum), as an int.
    fn chain_count(&self, m: usize) -> PyResult<BigUint> {
        if m < 1 || m > self.inner.n_max() {
            return Err(PyValueError::new_err("size out of table range"));
        }
        let row = self.inner.row_sum(m);
        row.to_integer()
            .to_biguint()
            .ok_or_else(|| PyValueError::new_err("row sum not a nonnegative integer"))
    }

    /// Draws a binary cycle type of size `n` under the chain weight.
    fn sample_partition(&self, n: usize, rng: &mut RandomSource) -> PyResult<Vec<u64>> {
        let lambda = ts::sample_partition(n, self.inner.k(), &self.inner, &mut rng.inner)
            .map_err(to_py_err)?;
        Ok(lambda.parts().to_vec())
    }

    /// Draws a uniformly random tangled chain of size `n` as `k` trees.
    fn sample_chain(&self, n: usize, rng: &mut RandomSource) -> PyResult<Vec<Tree>> {
        let chain = ts::sample_chain(n, self.inner.k(), &self.inner, &mut rng.inner)
            .map_err(to_py_err)?;
        Ok(chain
            .trees()
            .iter()
            .map(|t| Tree { inner: t.clone() })
            .collect())
    }
}

/// Number of trees fixed by any permutation with the given cycle type.
#[pyfunction]
fn count_fixed_trees(parts: Vec<u64>) -> PyResult<BigUint> {
    Ok(counting::count_fixed_trees(&partition_from_parts(parts)?))
}

/// Centralizer size of a permutation with the given cycle type.
#[pyfunction]
fn centralizer_size(parts: Vec<u64>) -> PyResult<BigUint> {
    Ok(counting::centralizer_size(&partition_from_parts(parts)?))
}

/// Number of tangled chains of length `k` and size `n`.
#[pyfunction]
fn count_chains(n: u64, k: u32) -> PyResult<BigUint> {
    if n < 1 || k < 1 {
        return Err(PyValueError::new_err("need n >= 1 and k >= 1"));
    }
    Ok(counting::count_chains(n, k))
}

/// All binary partitions of `n`, lexicographically decreasing.
#[pyfunction]
fn binary_partitions(n: u64) -> PyResult<Vec<Vec<u64>>> {
    if n < 1 {
        return Err(PyValueError::new_err("need n >= 1"));
    }
    Ok(counting::binary_partitions(n)
        .iter()
        .map(|p| p.parts().to_vec())
        .collect())
}

/// The unique tree fixed by a single-cycle permutation of power-of-two size.
#[pyfunction]
fn unique_single_cycle_tree(sigma: &Permutation) -> PyResult<Tree> {
    Ok(Tree {
        inner: ts::unique_single_cycle_tree(&sigma.inner).map_err(to_py_err)?,
    })
}

/// Draws a uniformly random tree fixed by `sigma` (binary cycle type).
#[pyfunction]
fn sample_fixed_tree(sigma: &Permutation, rng: &mut RandomSource) -> PyResult<Tree> {
    Ok(Tree {
        inner: ts::sample_fixed_tree(&sigma.inner, &mut rng.inner).map_err(to_py_err)?,
    })
}

/// Every tree on `{1..n}` (guarded; n <= 9).
#[pyfunction]
fn enumerate_trees(n: u64) -> PyResult<Vec<Tree>> {
    let labels: BTreeSet<Label> = (1..=n).collect();
    Ok(oracle::enumerate_all_trees(&labels)
        .map_err(to_py_err)?
        .into_iter()
        .map(|t| Tree { inner: t })
        .collect())
}

/// Every tree on the permutation's domain fixed by it (guarded; n <= 9).
#[pyfunction]
fn enumerate_fixed_trees(sigma: &Permutation) -> PyResult<Vec<Tree>> {
    Ok(oracle::enumerate_fixed_trees(&sigma.inner)
        .map_err(to_py_err)?
        .into_iter()
        .map(|t| Tree { inner: t })
        .collect())
}

#[pymodule]
fn tanglegen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Tree>()?;
    m.add_class::<Permutation>()?;
    m.add_class::<RandomSource>()?;
    m.add_class::<WeightTable>()?;
    m.add_function(wrap_pyfunction!(count_fixed_trees, m)?)?;
    m.add_function(wrap_pyfunction!(centralizer_size, m)?)?;
    m.add_function(wrap_pyfunction!(count_chains, m)?)?;
    m.add_function(wrap_pyfunction!(binary_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(unique_single_cycle_tree, m)?)?;
    m.add_function(wrap_pyfunction!(sample_fixed_tree, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_trees, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_fixed_trees, m)?)?;
    Ok(())
}
