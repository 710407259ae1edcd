use serde::{Deserialize, Serialize};

use super::basis::{level_elements, BasisElement};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    /// Full orthogonal group, any `d ≥ 2`.
    O,
    /// Rotations of the plane.
    SO,
}

/// One `(d, ℓ)` cell: the increment `dim Γ_{d,ℓ}`, the cumulative
/// `dim Ω_{d,ℓ}`, and the enumerated basis of the increment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEntry {
    pub d: usize,
    pub ell: u32,
    pub increment: usize,
    pub cumulative: usize,
    pub enumerated: usize,
    pub basis: Vec<BasisElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub group: Group,
    pub entries: Vec<DimensionEntry>,
}

impl DimensionTable {
    pub fn get(&self, d: usize, ell: u32) -> Option<&DimensionEntry> {
        self.entries.iter().find(|e| e.d == d && e.ell == ell)
    }

    /// Closed form and enumeration agree everywhere, and cumulative counts
    /// never decrease.
    pub fn consistent(&self) -> bool {
        let counts = self.entries.iter().all(|e| e.increment == e.enumerated);
        let monotone = self
            .entries
            .windows(2)
            .all(|w| w[0].d != w[1].d || w[0].cumulative <= w[1].cumulative);
        counts && monotone
    }
}

/// `dim Γ'_{d,ℓ} = (d − 1)⌊ℓ/2⌋ + (d + 1 if ℓ even)`.
pub fn o_increment(d: usize, ell: u32) -> usize {
    (d - 1) * (ell / 2) as usize + if ell % 2 == 0 { d + 1 } else { 0 }
}

/// Increment of `dim Ω_{2,ℓ}`: 3 at `ℓ = 0`, then `ℓ + 3` for even and
/// `ℓ − 1` for odd `ℓ`.
pub fn so_increment(ell: u32) -> usize {
    match ell {
        0 => 3,
        l if l % 2 == 0 => l as usize + 3,
        l => l as usize - 1,
    }
}

/// Closed-form dimensions side by side with an explicit enumeration of
/// basis indices.
///
/// ```
/// use rotval::verify::{dimension_table, Group};
/// let t = dimension_table(3, 2, Group::O).unwrap();
/// assert_eq!(t.get(3, 2).unwrap().cumulative, 10);
/// assert!(t.consistent());
/// ```
pub fn dimension_table(d_max: usize, ell_max: u32, group: Group) -> Result<DimensionTable> {
    let dims: Vec<usize> = match group {
        Group::O => {
            if d_max < 2 {
                return Err(Error::InvalidArgument("the O table needs d_max >= 2".into()));
            }
            (2..=d_max).collect()
        }
        Group::SO => vec![2],
    };
    let mut entries = Vec::new();
    for d in dims {
        let mut cumulative = 0;
        for ell in 0..=ell_max {
            let increment = match group {
                Group::O => o_increment(d, ell),
                Group::SO => so_increment(ell),
            };
            cumulative += increment;
            let basis = level_elements(d, ell, group);
            entries.push(DimensionEntry {
                d,
                ell,
                increment,
                cumulative,
                enumerated: basis.len(),
                basis,
            });
        }
    }
    Ok(DimensionTable { group, entries })
}
