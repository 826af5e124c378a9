//! Finite groups given either as products of cyclic groups or by a Cayley table.
//!
//! Elements are always addressed by an index in `0..order()`. For abelian
//! products the index is the mixed-radix encoding of the tuple, first factor
//! most significant, so index order is lexicographic tuple order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteGroupSpec {
    /// Z_{d_1} × … × Z_{d_m}.
    Abelian(Vec<usize>),
    /// `table[a][b]` is the index of a·b.
    Table(Vec<Vec<usize>>),
}

impl FiniteGroupSpec {
    pub fn cyclic(d: usize) -> Self {
        FiniteGroupSpec::Abelian(vec![d])
    }

    /// Checks group axioms. Associativity is checked exhaustively up to 64 elements.
    pub fn validate(&self) -> Result<()> {
        match self {
            FiniteGroupSpec::Abelian(f) => {
                if f.is_empty() || f.contains(&0) {
                    return Err(Error::InvalidGroup(format!("invalid cyclic factors {f:?}")));
                }
                Ok(())
            }
            FiniteGroupSpec::Table(t) => validate_table(t),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            FiniteGroupSpec::Abelian(f) => f.iter().product(),
            FiniteGroupSpec::Table(t) => t.len(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            FiniteGroupSpec::Abelian(_) => true,
            FiniteGroupSpec::Table(t) => (0..t.len()).all(|a| (0..t.len()).all(|b| t[a][b] == t[b][a])),
        }
    }

    pub fn identity(&self) -> usize {
        match self {
            FiniteGroupSpec::Abelian(_) => 0,
            FiniteGroupSpec::Table(t) => table_identity(t).unwrap_or(0),
        }
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        match self {
            FiniteGroupSpec::Abelian(f) => {
                let (x, y) = (self.tuple(a), self.tuple(b));
                let sum: Vec<usize> = x.iter().zip(&y).zip(f).map(|((p, q), d)| (p + q) % d).collect();
                self.index_of(&sum)
            }
            FiniteGroupSpec::Table(t) => t[a][b],
        }
    }

    pub fn inverse(&self, a: usize) -> usize {
        let e = self.identity();
        (0..self.order()).find(|&b| self.multiply(a, b) == e).expect("validated group has inverses")
    }

    /// Tuple coordinates of an abelian element; for table groups, `[index]`.
    pub fn tuple(&self, index: usize) -> Vec<usize> {
        match self {
            FiniteGroupSpec::Abelian(f) => {
                let mut out = vec![0; f.len()];
                let mut r = index;
                for k in (0..f.len()).rev() {
                    out[k] = r % f[k];
                    r /= f[k];
                }
                out
            }
            FiniteGroupSpec::Table(_) => vec![index],
        }
    }

    pub fn index_of(&self, tuple: &[usize]) -> usize {
        match self {
            FiniteGroupSpec::Abelian(f) => tuple.iter().zip(f).fold(0, |acc, (&x, &d)| acc * d + (x % d)),
            FiniteGroupSpec::Table(_) => tuple[0],
        }
    }

    /// Serialized element key, e.g. `"1,0"` or `"3"`.
    pub fn label(&self, index: usize) -> String {
        self.tuple(index).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_label(&self, s: &str) -> Result<usize> {
        let parts: std::result::Result<Vec<usize>, _> =
            s.split(',').map(|p| p.trim().parse::<usize>()).collect();
        let parts = parts.map_err(|_| Error::Parse(format!("bad group element key {s:?}")))?;
        let ok = match self {
            FiniteGroupSpec::Abelian(f) => parts.len() == f.len() && parts.iter().zip(f).all(|(x, d)| x < d),
            FiniteGroupSpec::Table(t) => parts.len() == 1 && parts[0] < t.len(),
        };
        if !ok {
            return Err(Error::Parse(format!("group element key {s:?} out of range")));
        }
        Ok(self.index_of(&parts))
    }

    /// The symmetric group on three letters. Elements 0..3 are the rotations
    /// (e, r, r²), 3..6 the reflections s·r^k.
    pub fn symmetric3() -> Self {
        let elem = |refl: usize, rot: usize| refl * 3 + rot;
        let mut t = vec![vec![0; 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                let (fa, ra) = (a / 3, a % 3);
                let (fb, rb) = (b / 3, b % 3);
                // s^fa r^ra · s^fb r^rb = s^(fa+fb) r^(±ra + rb)
                let r = if fb == 1 { (3 - ra + rb) % 3 } else { (ra + rb) % 3 };
                t[a][b] = elem((fa + fb) % 2, r);
            }
        }
        FiniteGroupSpec::Table(t)
    }
}

fn table_identity(t: &[Vec<usize>]) -> Option<usize> {
    let n = t.len();
    let ids: Vec<usize> = (0..n).filter(|&e| (0..n).all(|a| t[e][a] == a && t[a][e] == a)).collect();
    if ids.len() == 1 {
        Some(ids[0])
    } else {
        None
    }
}

fn validate_table(t: &[Vec<usize>]) -> Result<()> {
    let n = t.len();
    if n == 0 {
        return Err(Error::InvalidGroup("empty Cayley table".into()));
    }
    if t.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return Err(Error::InvalidGroup("Cayley table is not closed".into()));
    }
    let e = table_identity(t).ok_or_else(|| Error::InvalidGroup("no unique identity".into()))?;
    for a in 0..n {
        if !(0..n).any(|b| t[a][b] == e && t[b][a] == e) {
            return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
        }
    }
    if n <= 64 {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
    }
    Ok(())
}
