use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count supported by the dense lattice tables.
pub const MAX_VARIABLES: usize = 25;

/// A subset `S ⊆ N` of input variables, stored as a bitmask.
///
/// Bit `i` set means variable `i` (zero-based) belongs to the set. The
/// variable count travels with the mask so that sets from different
/// universes are never silently compared.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariableSet {
    bits: u32,
    n: u8,
}

impl VariableSet {
    pub fn new(bits: u32, n: usize) -> Result<Self> {
        check_n(n)?;
        if u64::from(bits) >= 1u64 << n {
            return Err(Error::MaskOutOfRange {
                bits: bits.into(),
                n,
            });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            bits: full_mask(n) as u32,
            n: n as u8,
        })
    }

    pub fn singleton(i: usize, n: usize) -> Result<Self> {
        Self::from_indices(&[i], n)
    }

    /// Builds a set from zero-based variable indices.
    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u32;
        for &i in indices {
            if i >= n {
                return Err(Error::MaskOutOfRange {
                    bits: 1u64 << i.min(63),
                    n,
                });
            }
            bits |= 1 << i;
        }
        Ok(Self { bits, n: n as u8 })
    }

    // Callers guarantee `bits < 2^n` and `n` in range.
    pub(crate) fn from_raw(bits: usize, n: usize) -> Self {
        debug_assert!(n <= MAX_VARIABLES && bits < 1 << n);
        Self {
            bits: bits as u32,
            n: n as u8,
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn n(self) -> usize {
        usize::from(self.n)
    }

    /// Cardinality `|S|`.
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < self.n() && self.bits & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: VariableSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(self, other: VariableSet) -> VariableSet {
        debug_assert_eq!(self.n, other.n);
        Self {
            bits: self.bits | other.bits,
            n: self.n,
        }
    }

    pub fn intersection(self, other: VariableSet) -> VariableSet {
        Self {
            bits: self.bits & other.bits,
            n: self.n,
        }
    }

    pub fn complement(self) -> VariableSet {
        Self {
            bits: !self.bits & full_mask(self.n()) as u32,
            n: self.n,
        }
    }

    /// Zero-based indices of the member variables, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.n()).filter(move |i| bits & (1 << i) != 0)
    }

    /// All subsets `T ⊆ S`, in descending mask order, ending with `∅`.
    pub fn subsets(self) -> impl Iterator<Item = VariableSet> {
        let n = self.n;
        let top = self.bits;
        let mut next = Some(top);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & top) };
            Some(VariableSet { bits: cur, n })
        })
    }

    /// Binary rendering, most significant variable first, `n` digits wide.
    pub fn to_binary_string(self) -> String {
        format!("{:0width$b}", self.bits, width = self.n())
    }

    pub fn parse_binary(s: &str) -> Result<Self> {
        let n = s.len();
        let bits = u32::from_str_radix(s, 2)
            .map_err(|e| Error::InvalidParameter(format!("mask {s:?}: {e}")))?;
        Self::new(bits, n)
    }
}

impl fmt::Debug for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders with one-based variable names, e.g. `{1,3}`.
impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARIABLES {
        return Err(Error::VariableCount {
            n,
            max: MAX_VARIABLES,
        });
    }
    Ok(())
}

pub(crate) fn full_mask(n: usize) -> usize {
    (1usize << n) - 1
}
