//! Monomial matrices whose nonzero entries are roots of unity.
//!
//! A monomial matrix factors uniquely as (diagonal) x (permutation). We store
//! the permutation `perm` and one phase per column: column `j` holds
//! `e^{2πi·phases[j]}` in row `perm[j]`, so `e_j ↦ e^{2πi·phases[j]} e_{perm[j]}`.

use std::fmt::Write as _;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::phase::Phase;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MonomialMatrix<const D: usize> {
    perm: [u8; D],
    phases: [Phase; D],
}

/// The 6-dimensional case used throughout the crate.
pub type Monomial = MonomialMatrix<6>;

/// Dense view: `None` is a zero entry.
pub type Dense<const D: usize> = [[Option<Phase>; D]; D];

impl<const D: usize> MonomialMatrix<D> {
    pub fn identity() -> Self {
        Self {
            perm: std::array::from_fn(|i| i as u8),
            phases: [Phase::ZERO; D],
        }
    }

    /// Panics if `perm` is not a permutation of `0..D`.
    pub fn new(perm: [u8; D], phases: [Phase; D]) -> Self {
        let mut seen = [false; D];
        for &p in &perm {
            assert!((p as usize) < D && !seen[p as usize], "not a permutation: {perm:?}");
            seen[p as usize] = true;
        }
        Self { perm, phases }
    }

    pub fn diagonal(phases: [Phase; D]) -> Self {
        Self {
            phases,
            ..Self::identity()
        }
    }

    pub fn permutation(perm: [u8; D]) -> Self {
        Self::new(perm, [Phase::ZERO; D])
    }

    pub fn perm(&self) -> &[u8; D] {
        &self.perm
    }

    pub fn phases(&self) -> &[Phase; D] {
        &self.phases
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    /// The permutation part, i.e. the same matrix with every phase set to zero.
    pub fn weyl_part(&self) -> Self {
        Self::permutation(self.perm)
    }

    /// Row-indexed phases: entry `i` is the phase of the nonzero entry in row `i`.
    pub fn row_phases(&self) -> [Phase; D] {
        let mut out = [Phase::ZERO; D];
        for j in 0..D {
            out[self.perm[j] as usize] = self.phases[j];
        }
        out
    }

    /// `(π¹,φ¹)·(π²,φ²) = (π¹∘π², j ↦ φ²_j + φ¹_{π²(j)})`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut perm = [0u8; D];
        let mut phases = [Phase::ZERO; D];
        for j in 0..D {
            let mid = rhs.perm[j] as usize;
            perm[j] = self.perm[mid];
            phases[j] = rhs.phases[j] + self.phases[mid];
        }
        Self { perm, phases }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = [0u8; D];
        let mut phases = [Phase::ZERO; D];
        for j in 0..D {
            let i = self.perm[j] as usize;
            perm[i] = j as u8;
            phases[i] = -self.phases[j];
        }
        Self { perm, phases }
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Least `n >= 1` with `selfⁿ = Id`: the lcm over cycles of
    /// (cycle length) x (order of the phase sum along the cycle).
    pub fn order(&self) -> u64 {
        let mut seen = [false; D];
        let mut acc = 1u64;
        for start in 0..D {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut total = Phase::ZERO;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                total = total + self.phases[j];
                len += 1;
                j = self.perm[j] as usize;
            }
            acc = acc.lcm(&(len * total.order()));
        }
        acc
    }

    pub fn to_dense(&self) -> Dense<D> {
        let mut out = [[None; D]; D];
        for j in 0..D {
            out[self.perm[j] as usize][j] = Some(self.phases[j]);
        }
        out
    }

    /// Inverse of [`to_dense`](Self::to_dense); `None` unless exactly one
    /// nonzero entry sits in every row and column.
    pub fn from_dense(dense: &Dense<D>) -> Option<Self> {
        let mut perm = [0u8; D];
        let mut phases = [Phase::ZERO; D];
        let mut row_used = [false; D];
        for j in 0..D {
            let mut hits = (0..D).filter(|&i| dense[i][j].is_some());
            let i = hits.next()?;
            if hits.next().is_some() || row_used[i] {
                return None;
            }
            row_used[i] = true;
            perm[j] = i as u8;
            phases[j] = dense[i][j]?;
        }
        Some(Self { perm, phases })
    }

    /// Grid of `0` and `e(k/m)` entries, one row per line.
    pub fn render_dense(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .to_dense()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        None => "0".to_string(),
                        Some(p) => format!("e({p})"),
                    })
                    .collect()
            })
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        out
    }
}

impl<const D: usize> Default for MonomialMatrix<D> {
    fn default() -> Self {
        Self::identity()
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialJson {
    perm: Vec<usize>,
    phases: Vec<Phase>,
}

/// `{"perm":[...], "phases":[...]}` with 1-based permutation images.
impl<const D: usize> Serialize for MonomialMatrix<D> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MonomialJson {
            perm: self.perm.iter().map(|&p| p as usize + 1).collect(),
            phases: self.phases.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de, const D: usize> Deserialize<'de> for MonomialMatrix<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        use serde::de::Error as _;
        let raw = MonomialJson::deserialize(deserializer)?;
        if raw.perm.len() != D || raw.phases.len() != D {
            return Err(De::Error::custom(format!("expected {D} entries")));
        }
        let mut perm = [0u8; D];
        let mut seen = [false; D];
        for (slot, &p) in perm.iter_mut().zip(&raw.perm) {
            if p == 0 || p > D || seen[p - 1] {
                return Err(De::Error::custom("perm is not a permutation of 1..=D"));
            }
            seen[p - 1] = true;
            *slot = (p - 1) as u8;
        }
        let phases: [Phase; D] = raw.phases.try_into().expect("length checked");
        Ok(Self { perm, phases })
    }
}
