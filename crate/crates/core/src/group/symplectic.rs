//! Isotropic subspaces of the symplectic space F_p^{2n}, i.e. commutative
//! subgroups of the Weyl–Heisenberg group over F_p^n × F_p^n.
//!
//! Vectors are (x_1..x_n, z_1..z_n) with ⟨(x,z),(x',z')⟩ = x·z' − z·x' mod p.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymplecticSubspaceSpec {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    /// Reduced row echelon generators, one row per dimension.
    pub generators: Vec<Vec<u64>>,
}

/// Upper bound on partial echelon forms visited by [`enumerate_commutative_subgroups`].
const ENUMERATION_BUDGET: u64 = 50_000_000;

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_args(p: u64, n: usize, m: usize) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if m < 1 || m > n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ m ≤ n, got m={m}, n={n}")));
    }
    Ok(())
}

pub fn symplectic_product(p: u64, u: &[u64], v: &[u64]) -> u64 {
    let n = u.len() / 2;
    let mut s = 0u64;
    for i in 0..n {
        s = (s + u[i] * v[n + i]) % p;
        s = (s + (p - (u[n + i] * v[i]) % p)) % p;
    }
    s
}

/// ∏_{i<m} (p^{2(n−i)} − 1) / ∏_{i=1..m} (p^i − 1).
pub fn count_commutative_subgroups(p: u64, n: usize, m: usize) -> Result<BigUint> {
    check_args(p, n, m)?;
    let pb = BigUint::from(p);
    let one = BigUint::one();
    let mut num = BigUint::one();
    for i in 0..m {
        num *= pb.pow(2 * (n - i) as u32) - &one;
    }
    let mut den = BigUint::one();
    for i in 1..=m {
        den *= pb.pow(i as u32) - &one;
    }
    if !(&num % &den).is_zero() {
        return Err(Error::Numerical("subgroup count is not an integer".into()));
    }
    Ok(num / den)
}

/// ∏_{i=1..n} (p^i + 1), the count of maximal isotropic subspaces.
pub fn count_maximal_simplified(p: u64, n: usize) -> Result<BigUint> {
    check_args(p, n, n)?;
    let pb = BigUint::from(p);
    Ok((1..=n).fold(BigUint::one(), |acc, i| acc * (pb.pow(i as u32) + BigUint::one())))
}

/// Every m-dimensional isotropic subspace, each given once by its reduced row
/// echelon basis, sorted.
pub fn enumerate_commutative_subgroups(p: u64, n: usize, m: usize) -> Result<Vec<SymplecticSubspaceSpec>> {
    check_args(p, n, m)?;
    let len = 2 * n;
    if (len as f64) * (p as f64).log2() > 16.0 + 1e-9 {
        return Err(Error::InvalidArgument(format!("p^(2n) = {p}^{len} exceeds the enumeration limit 2^16")));
    }
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(m);
    let mut visits = 0u64;
    extend_echelon(p, len, m, 0, &mut rows, &mut out, &mut visits)?;
    let mut specs: Vec<SymplecticSubspaceSpec> =
        out.into_iter().map(|generators| SymplecticSubspaceSpec { p, n, m, generators }).collect();
    specs.sort();
    Ok(specs)
}

/// Adds rows to a partial RREF. Each new row has its pivot right of the previous
/// pivot; entries in earlier pivot columns are zero, earlier rows get zero in the
/// new pivot column. Free entries of the new row are enumerated; earlier rows'
/// entries in the new pivot column are fixed to zero by construction of RREF,
/// so a subspace is generated exactly once.
fn extend_echelon(
    p: u64,
    len: usize,
    m: usize,
    min_pivot: usize,
    rows: &mut Vec<Vec<u64>>,
    out: &mut Vec<Vec<Vec<u64>>>,
    visits: &mut u64,
) -> Result<()> {
    *visits += 1;
    if *visits > ENUMERATION_BUDGET {
        return Err(Error::InvalidArgument("enumeration too large for desk scale".into()));
    }
    if rows.len() == m {
        out.push(rows.clone());
        return Ok(());
    }
    let remaining = m - rows.len();
    let pivots: Vec<usize> = rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
    for pivot in min_pivot..=(len - remaining) {
        // Earlier rows must vanish in this pivot column for RREF.
        if rows.iter().any(|r| r[pivot] != 0) {
            continue;
        }
        let free: Vec<usize> = ((pivot + 1)..len).filter(|c| !pivots.contains(c)).collect();
        let combos = (p as u128).pow(free.len() as u32);
        for code in 0..combos {
            let mut row = vec![0u64; len];
            row[pivot] = 1;
            let mut c = code;
            for &f in &free {
                row[f] = (c % p as u128) as u64;
                c /= p as u128;
            }
            if rows.iter().any(|r| symplectic_product(p, r, &row) != 0) {
                continue;
            }
            rows.push(row);
            extend_echelon(p, len, m, pivot + 1, rows, out, visits)?;
            rows.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: all m-subsets of nonzero vectors that are independent and
    /// pairwise orthogonal, deduplicated by the span they generate.
    fn brute_force_count(p: u64, n: usize, m: usize) -> usize {
        let len = 2 * n;
        let total = p.pow(len as u32);
        let vec_of = |mut c: u64| -> Vec<u64> {
            (0..len)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        };
        let all: Vec<Vec<u64>> = (1..total).map(vec_of).collect();
        let span = |gens: &[Vec<u64>]| -> Vec<Vec<u64>> {
            let mut s: Vec<Vec<u64>> = vec![vec![0; len]];
            for g in gens {
                let mut next = Vec::new();
                for v in &s {
                    for a in 0..p {
                        next.push(v.iter().zip(g).map(|(x, y)| (x + a * y) % p).collect());
                    }
                }
                next.sort();
                next.dedup();
                s = next;
            }
            s
        };
        let mut seen = std::collections::BTreeSet::new();
        let mut stack: Vec<Vec<Vec<u64>>> = all.iter().map(|v| vec![v.clone()]).collect();
        while let Some(gens) = stack.pop() {
            let sp = span(&gens);
            if sp.len() as u64 != p.pow(gens.len() as u32) {
                continue;
            }
            if gens.len() == m {
                seen.insert(sp);
                continue;
            }
            for v in &all {
                if gens.iter().all(|g| symplectic_product(p, g, v) == 0) && !sp.contains(v) {
                    let mut g2 = gens.clone();
                    g2.push(v.clone());
                    stack.push(g2);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn counts_match_brute_force() {
        for (p, n, m, expect) in [(2, 1, 1, 3u32), (2, 2, 1, 15), (2, 2, 2, 15), (3, 1, 1, 4)] {
            let formula = count_commutative_subgroups(p, n, m).unwrap();
            assert_eq!(formula, BigUint::from(expect));
            assert_eq!(brute_force_count(p, n, m), expect as usize);
            assert_eq!(enumerate_commutative_subgroups(p, n, m).unwrap().len(), expect as usize);
        }
    }

    #[test]
    fn single_qubit_generators() {
        let subs = enumerate_commutative_subgroups(2, 1, 1).unwrap();
        let gens: Vec<Vec<u64>> = subs.iter().map(|s| s.generators[0].clone()).collect();
        for expect in [vec![1, 0], vec![0, 1], vec![1, 1]] {
            assert!(gens.contains(&expect));
        }
    }

    #[test]
    fn generators_are_isotropic_and_distinct() {
        let subs = enumerate_commutative_subgroups(3, 2, 2).unwrap();
        assert_eq!(BigUint::from(subs.len()), count_commutative_subgroups(3, 2, 2).unwrap());
        for s in &subs {
            for a in &s.generators {
                for b in &s.generators {
                    assert_eq!(symplectic_product(3, a, b), 0);
                }
            }
        }
        let mut dedup = subs.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), subs.len());
    }

    #[test]
    fn maximal_simplification_agrees() {
        for p in [2, 3, 5, 7] {
            for n in 1..=6 {
                assert_eq!(count_commutative_subgroups(p, n, n).unwrap(), count_maximal_simplified(p, n).unwrap());
            }
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(count_commutative_subgroups(4, 2, 1).is_err());
        assert!(count_commutative_subgroups(2, 2, 3).is_err());
        assert!(enumerate_commutative_subgroups(2, 9, 1).is_err());
    }
}
