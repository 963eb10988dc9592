//! Fixed excitation-number occupation bases.
//!
//! States are ordered descending-lexicographically over their occupation
//! tuples, so `|M,0,…,0⟩` is always index 0 and `|0,…,0,M⟩` is last. Bosonic
//! sectors allow up to `M` quanta per site; hardcore sectors at most one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sector dimension handled with dense matrices.
pub const MAX_DIM: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bosonic,
    Hardcore,
}

impl Statistics {
    fn max_occupation(self, excitations: usize) -> u32 {
        match self {
            Statistics::Bosonic => excitations as u32,
            Statistics::Hardcore => 1,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Bosonic => f.write_str("bosonic"),
            Statistics::Hardcore => f.write_str("hardcore"),
        }
    }
}

/// An `(L, M, statistics)` number-conserving subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sector {
    sites: usize,
    excitations: usize,
    statistics: Statistics,
}

impl Sector {
    pub fn new(sites: usize, excitations: usize, statistics: Statistics) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidParameter("a chain needs at least one site".into()));
        }
        if statistics == Statistics::Hardcore && excitations > sites {
            return Err(Error::EmptySector { sites, excitations });
        }
        let dim = sector_dim(sites, excitations, statistics);
        if dim > MAX_DIM as u128 {
            return Err(Error::SectorTooLarge { dim, limit: MAX_DIM });
        }
        Ok(Self {
            sites,
            excitations,
            statistics,
        })
    }

    pub fn bosonic(sites: usize, excitations: usize) -> Result<Self> {
        Self::new(sites, excitations, Statistics::Bosonic)
    }

    pub fn hardcore(sites: usize, excitations: usize) -> Result<Self> {
        Self::new(sites, excitations, Statistics::Hardcore)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn excitations(&self) -> usize {
        self.excitations
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Basis cardinality: `C(M+L-1, M)` for bosons, `C(L, M)` for hardcore bosons.
    pub fn dim(&self) -> usize {
        sector_dim(self.sites, self.excitations, self.statistics) as usize
    }

    /// Same chain and statistics with a different excitation number.
    pub fn with_excitations(&self, excitations: usize) -> Result<Self> {
        Self::new(self.sites, excitations, self.statistics)
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L={} M={} {}",
            self.sites, self.excitations, self.statistics
        )
    }
}

fn sector_dim(sites: usize, excitations: usize, statistics: Statistics) -> u128 {
    match statistics {
        Statistics::Bosonic => binomial((excitations + sites - 1) as u128, excitations as u128),
        Statistics::Hardcore if excitations > sites => 0,
        Statistics::Hardcore => binomial(sites as u128, excitations as u128),
    }
}

/// Saturating binomial coefficient.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Per-site excitation numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(pub Vec<u32>);

impl Occupation {
    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    /// Site indices (0-based) holding at least one excitation, ascending.
    pub fn occupied_sites(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("⟩")
    }
}

/// Ordered occupation basis of a sector with reverse lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    sector: Sector,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl Basis {
    pub fn new(sector: Sector) -> Self {
        let states = enumerate_states(&sector);
        debug_assert_eq!(states.len(), sector.dim());
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            sector,
            states,
            index,
        }
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &Occupation {
        &self.states[index]
    }

    pub fn index_of(&self, state: &Occupation) -> Result<usize> {
        self.index
            .get(state)
            .copied()
            .ok_or_else(|| Error::NotInSector(state.0.clone()))
    }

    /// Lookup that treats "not in sector" as absence, for operator builders.
    pub(crate) fn find(&self, state: &Occupation) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Occupation> {
        self.states.iter()
    }
}

fn enumerate_states(sector: &Sector) -> Vec<Occupation> {
    let cap = sector.statistics.max_occupation(sector.excitations);
    let mut out = Vec::with_capacity(sector.dim());
    let mut current = vec![0u32; sector.sites];
    fill(&mut current, 0, sector.excitations as u32, cap, &mut out);
    out
}

fn fill(current: &mut [u32], site: usize, remaining: u32, cap: u32, out: &mut Vec<Occupation>) {
    let last = current.len() - 1;
    if site == last {
        if remaining <= cap {
            current[site] = remaining;
            out.push(Occupation(current.to_vec()));
        }
        return;
    }
    for n in (0..=remaining.min(cap)).rev() {
        current[site] = n;
        fill(current, site + 1, remaining - n, cap, out);
    }
    current[site] = 0;
}

/// Free-function form of [`Sector::dim`].
pub fn dim(sector: &Sector) -> usize {
    sector.dim()
}

/// Free-function form of [`Basis::new`], returning just the ordered states.
pub fn enumerate_basis(sector: &Sector) -> Vec<Occupation> {
    enumerate_states(sector)
}

/// Position of `state` in the ordered basis of `sector`.
pub fn index_of(sector: &Sector, state: &Occupation) -> Result<usize> {
    Basis::new(*sector).index_of(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(v: &[u32]) -> Occupation {
        Occupation(v.to_vec())
    }

    #[test]
    fn reported_dimensions() {
        assert_eq!(Sector::bosonic(9, 1).unwrap().dim(), 9);
        assert_eq!(Sector::bosonic(8, 2).unwrap().dim(), 36);
        assert_eq!(Sector::bosonic(1, 0).unwrap().dim(), 1);
        // 8-bit strings with three set bits
        assert_eq!(Sector::hardcore(8, 3).unwrap().dim(), 56);
        assert_eq!(Sector::hardcore(16, 1).unwrap().dim(), 16);
    }

    #[test]
    fn hardcore_overfill_is_rejected() {
        assert!(matches!(
            Sector::hardcore(3, 4),
            Err(Error::EmptySector { sites: 3, excitations: 4 })
        ));
        assert!(Sector::bosonic(3, 4).is_ok());
    }

    #[test]
    fn dimension_guard() {
        // C(40, 20) is far beyond the dense limit
        assert!(matches!(
            Sector::hardcore(40, 20),
            Err(Error::SectorTooLarge { .. })
        ));
        assert!(Sector::new(0, 0, Statistics::Bosonic).is_err());
    }

    #[test]
    fn small_enumerations() {
        let b = enumerate_basis(&Sector::bosonic(2, 1).unwrap());
        assert_eq!(b, vec![occ(&[1, 0]), occ(&[0, 1])]);
        let b = enumerate_basis(&Sector::bosonic(2, 2).unwrap());
        assert_eq!(b, vec![occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
        let b = enumerate_basis(&Sector::hardcore(3, 2).unwrap());
        assert_eq!(b, vec![occ(&[1, 1, 0]), occ(&[1, 0, 1]), occ(&[0, 1, 1])]);
        let b = enumerate_basis(&Sector::bosonic(1, 0).unwrap());
        assert_eq!(b, vec![occ(&[0])]);
    }

    #[test]
    fn lookup() {
        let s = Sector::bosonic(2, 1).unwrap();
        assert_eq!(index_of(&s, &occ(&[1, 0])).unwrap(), 0);
        let s = Sector::bosonic(2, 2).unwrap();
        assert_eq!(index_of(&s, &occ(&[0, 2])).unwrap(), 2);
        let s = Sector::hardcore(3, 2).unwrap();
        assert_eq!(index_of(&s, &occ(&[1, 0, 1])).unwrap(), 1);
        assert!(matches!(
            index_of(&s, &occ(&[2, 0, 0])),
            Err(Error::NotInSector(_))
        ));
        assert!(index_of(&s, &occ(&[1, 0, 0])).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(9, 1), 9);
    }
}
