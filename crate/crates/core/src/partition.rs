//! Integer partitions with non-increasing parts.

use std::fmt;

use crate::error::{Error, Result};

/// An integer partition: positive parts stored in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Builds a partition from parts given in any order; rejects zero parts
    /// and the empty partition.
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition("parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// Builds a partition from parts already in non-increasing order.
    pub(crate) fn from_sorted(parts: Vec<u64>) -> Self {
        debug_assert!(!parts.is_empty());
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        Self { parts }
    }

    /// Parses a comma-separated list of parts such as `8,4,2`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidPartition(format!("bad part {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Sum of the parts (the integer being partitioned).
    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// True iff every part is a power of two.
    pub fn is_binary(&self) -> bool {
        self.parts.iter().all(|&p| p.is_power_of_two())
    }

    /// Distinct part sizes with multiplicities, largest part first.
    pub fn multiplicities(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((size, mult)) if *size == p => *mult += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.parts {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}
