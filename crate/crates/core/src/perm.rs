//! Permutations of a finite label set, with cached cycle decomposition.
//!
//! Cycle notation follows the grammar `perm := cycle*`,
//! `cycle := "(" label ("," label)* ")"`; elements of the ground set that are
//! not mentioned are fixed points. Cycles are stored rotated so the minimal
//! element comes first and are ordered by minimal element.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::tree::Label;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// Sorted, distinct labels.
    domain: Vec<Label>,
    /// `image[i]` is the index in `domain` of the image of `domain[i]`.
    image: Vec<u32>,
    /// Cycles, each minimal-element-first, ordered by minimal element.
    /// Fixed points appear as singleton cycles.
    cycles: Vec<Vec<Label>>,
    cycle_type: Partition,
}

impl Permutation {
    /// The identity permutation on the given labels.
    pub fn identity<I: IntoIterator<Item = Label>>(domain: I) -> Result<Self> {
        let set: BTreeSet<Label> = domain.into_iter().collect();
        Self::from_map(set, &[])
    }

    /// Parses cycle notation over an explicit ground set.
    ///
    /// The empty string denotes the identity. Every mentioned element must
    /// belong to the ground set and may appear at most once.
    pub fn parse(text: &str, ground_set: &BTreeSet<Label>) -> Result<Self> {
        let text = text.trim();
        let mut cycles: Vec<Vec<Label>> = Vec::new();
        let bytes = text.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                return Err(Error::CycleParse(format!(
                    "expected '(' at byte {pos}, found {:?}",
                    text[pos..].chars().next().unwrap()
                )));
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(Error::CycleParse(format!("expected a label at byte {start}")));
                }
                let label: Label = text[start..pos]
                    .parse()
                    .map_err(|_| Error::CycleParse(format!("label overflow at byte {start}")))?;
                if label == 0 {
                    return Err(Error::InvalidLabel(0));
                }
                cycle.push(label);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    _ => {
                        return Err(Error::CycleParse(format!(
                            "expected ',' or ')' at byte {pos}"
                        )))
                    }
                }
            }
            cycles.push(cycle);
        }
        Self::from_cycles_on(cycles, ground_set.clone())
    }

    /// Builds a permutation from explicit cycles over a ground set.
    /// Unmentioned ground-set elements become fixed points.
    pub fn from_cycles_on(cycles: Vec<Vec<Label>>, ground_set: BTreeSet<Label>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for cycle in &cycles {
            for &l in cycle {
                if !ground_set.contains(&l) {
                    return Err(Error::OutsideGroundSet(l));
                }
                if !seen.insert(l) {
                    return Err(Error::DuplicateLabel(l));
                }
            }
        }
        Self::from_map(ground_set, &cycles)
    }

    fn from_map(ground_set: BTreeSet<Label>, cycles: &[Vec<Label>]) -> Result<Self> {
        if ground_set.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if ground_set.contains(&0) {
            return Err(Error::InvalidLabel(0));
        }
        let domain: Vec<Label> = ground_set.into_iter().collect();
        let index_of = |l: Label| -> usize { domain.binary_search(&l).expect("label in domain") };
        let mut image: Vec<u32> = (0..domain.len() as u32).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let next = cycle[(w + 1) % cycle.len()];
                image[index_of(cycle[w])] = index_of(next) as u32;
            }
        }

        // Recompute the cycle decomposition in canonical order: walking from
        // the smallest unvisited label starts every cycle at its minimum.
        let mut visited = vec![false; domain.len()];
        let mut canon_cycles = Vec::new();
        for start in 0..domain.len() {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                visited[cur] = true;
                cycle.push(domain[cur]);
                cur = image[cur] as usize;
                if cur == start {
                    break;
                }
            }
            canon_cycles.push(cycle);
        }
        let cycle_type = Partition::new(canon_cycles.iter().map(|c| c.len() as u64).collect())?;
        Ok(Self {
            domain,
            image,
            cycles: canon_cycles,
            cycle_type,
        })
    }

    pub fn domain(&self) -> &[Label] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    /// Image of a label under the permutation.
    pub fn apply(&self, label: Label) -> Result<Label> {
        let idx = self
            .domain
            .binary_search(&label)
            .map_err(|_| Error::OutsideDomain(label))?;
        Ok(self.domain[self.image[idx] as usize])
    }

    pub fn contains(&self, label: Label) -> bool {
        self.domain.binary_search(&label).is_ok()
    }

    /// Cycles, each starting at its minimal element, ordered by minimum.
    pub fn cycles(&self) -> &[Vec<Label>] {
        &self.cycles
    }

    pub fn cycle_type(&self) -> &Partition {
        &self.cycle_type
    }

    pub fn is_identity(&self) -> bool {
        self.cycles.iter().all(|c| c.len() == 1)
    }

    /// The largest cycle; ties are broken by the smallest minimal element.
    pub fn largest_cycle(&self) -> &[Label] {
        self.cycles
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
            .expect("nonempty domain")
    }

    /// The permutation restricted to the complement of one of its cycles.
    pub fn without_cycle(&self, cycle: &[Label]) -> Result<Self> {
        let removed: BTreeSet<Label> = cycle.iter().copied().collect();
        let keep: Vec<Vec<Label>> = self
            .cycles
            .iter()
            .filter(|c| !removed.contains(&c[0]))
            .cloned()
            .collect();
        let ground: BTreeSet<Label> = keep.iter().flatten().copied().collect();
        Self::from_cycles_on(keep, ground)
    }

    /// Extends the permutation with a new cycle on fresh labels.
    pub fn with_cycle(&self, cycle: &[Label]) -> Result<Self> {
        for &l in cycle {
            if self.contains(l) {
                return Err(Error::DuplicateLabel(l));
            }
        }
        let mut cycles = self.cycles.clone();
        cycles.push(cycle.to_vec());
        let ground: BTreeSet<Label> = cycles.iter().flatten().copied().collect();
        Self::from_cycles_on(cycles, ground)
    }

    /// Composition `self ∘ other` (apply `other` first). Domains must agree.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::CycleParse("domain mismatch in composition".into()));
        }
        let mut image = vec![0u32; self.domain.len()];
        for i in 0..self.domain.len() {
            image[i] = self.image[other.image[i] as usize];
        }
        let mut out = Self {
            domain: self.domain.clone(),
            image,
            cycles: Vec::new(),
            cycle_type: Partition::from_sorted(vec![1]),
        };
        out.recompute_cycles();
        Ok(out)
    }

    fn recompute_cycles(&mut self) {
        let mut visited = vec![false; self.domain.len()];
        let mut cycles = Vec::new();
        for start in 0..self.domain.len() {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                visited[cur] = true;
                cycle.push(self.domain[cur]);
                cur = self.image[cur] as usize;
                if cur == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        self.cycle_type =
            Partition::new(cycles.iter().map(|c| c.len() as u64).collect()).expect("positive");
        self.cycles = cycles;
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in &self.cycles {
            write!(f, "(")?;
            for (i, l) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
