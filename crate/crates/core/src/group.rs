//! Finite groups given by Cayley tables, and length functions on them.

use crate::error::{Error, Result};

/// Slack allowed in the subadditivity and symmetry checks of a length function.
pub const LENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a Cayley table `table[x][y] = x y` with the given identity index.
    pub fn new(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        if identity >= n {
            return Err(Error::InvalidGroup(format!("identity {identity} out of range")));
        }
        for (x, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {x} has length {}", row.len())));
            }
            let mut seen = vec![false; n];
            for &y in row {
                if y >= n || seen[y] {
                    return Err(Error::InvalidGroup(format!("row {x} is not a permutation")));
                }
                seen[y] = true;
            }
        }
        for y in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if seen[row[y]] {
                    return Err(Error::InvalidGroup(format!("column {y} is not a permutation")));
                }
                seen[row[y]] = true;
            }
        }
        for x in 0..n {
            if table[identity][x] != x || table[x][identity] != x {
                return Err(Error::InvalidGroup(format!("{identity} is not an identity")));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|x| (0..n).find(|&y| table[x][y] == identity).unwrap())
            .collect();
        Ok(Self {
            table,
            identity,
            inverse,
        })
    }

    /// The cyclic group `Z_m` with elements `0..m` and identity `0`.
    pub fn cyclic(m: usize) -> Self {
        let table = (0..m).map(|x| (0..m).map(|y| (x + y) % m).collect()).collect();
        Self::new(table, 0).expect("cyclic table is valid")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Checks `l(e) = 0`, `l(x) > 0` otherwise, `l(x⁻¹) = l(x)` and `l(xy) ≤ l(x) + l(y)`.
    pub fn validate_length(&self, l: &[f64]) -> Result<()> {
        let n = self.order();
        if l.len() != n {
            return Err(Error::InvalidLength(format!(
                "{} values for a group of order {n}",
                l.len()
            )));
        }
        if l.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidLength("values must be finite and nonnegative".into()));
        }
        if l[self.identity] != 0.0 {
            return Err(Error::InvalidLength("nonzero at the identity".into()));
        }
        for x in 0..n {
            if x != self.identity && l[x] <= 0.0 {
                return Err(Error::InvalidLength(format!("vanishes at non-identity {x}")));
            }
            if (l[x] - l[self.inv(x)]).abs() > LENGTH_TOL {
                return Err(Error::InvalidLength(format!("l({x}) differs from its inverse")));
            }
            for y in 0..n {
                if l[self.mul(x, y)] > l[x] + l[y] + LENGTH_TOL {
                    return Err(Error::InvalidLength(format!("not subadditive at ({x}, {y})")));
                }
            }
        }
        Ok(())
    }

    /// Word length for the symmetric generating set `{g, g⁻¹}` over `generators`.
    pub fn word_length(&self, generators: &[usize]) -> Vec<f64> {
        let n = self.order();
        let mut dist = vec![usize::MAX; n];
        dist[self.identity] = 0;
        let mut frontier = vec![self.identity];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for &g in generators {
                    for h in [g, self.inv(g)] {
                        let y = self.mul(x, h);
                        if dist[y] == usize::MAX {
                            dist[y] = dist[x] + 1;
                            next.push(y);
                        }
                    }
                }
            }
            frontier = next;
        }
        dist.into_iter()
            .map(|v| if v == usize::MAX { f64::INFINITY } else { v as f64 })
            .collect()
    }
}
