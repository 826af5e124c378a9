//! (Projective) unitary representations and their block decompositions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::finite::FiniteGroupSpec;
use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, HermitianOperator, ONE, ZERO};
use crate::random::{rng_from_seed, Rng};
use rand::Rng as _;

/// Phases c(g, h) with U_g U_h = c(g, h) U_{gh}.
#[derive(Clone, Debug, PartialEq)]
pub enum Cocycle {
    Trivial,
    /// `table[g][h]`, indexed by element index.
    Table(Vec<Vec<C64>>),
}

#[derive(Clone, Debug)]
pub struct ProjectiveUnitaryRep {
    group: FiniteGroupSpec,
    dim: usize,
    matrices: Vec<CMatrix>,
    cocycle: Cocycle,
}

impl ProjectiveUnitaryRep {
    /// Validates unitarity and the multiplication rule within `tol` (Frobenius).
    pub fn new(group: FiniteGroupSpec, matrices: Vec<CMatrix>, cocycle: Cocycle, tol: f64) -> Result<Self> {
        group.validate()?;
        let n = group.order();
        if matrices.len() != n {
            return Err(Error::InvalidRepresentation(format!("{} matrices for a group of order {n}", matrices.len())));
        }
        let dim = matrices.first().map(|m| m.rows()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidRepresentation("zero-dimensional representation".into()));
        }
        for (g, u) in matrices.iter().enumerate() {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::Dimension(format!("U_{} is {}x{}, expected {dim}x{dim}", group.label(g), u.rows(), u.cols())));
            }
            let defect = (&(&u.adjoint() * u) - &CMatrix::identity(dim)).frobenius_norm();
            if defect > tol {
                return Err(Error::InvalidRepresentation(format!("U_{} is not unitary (defect {defect:.3e})", group.label(g))));
            }
        }
        if let Cocycle::Table(t) = &cocycle {
            if t.len() != n || t.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidRepresentation("cocycle table has wrong shape".into()));
            }
        }
        let rep = ProjectiveUnitaryRep { group, dim, matrices, cocycle };
        let residual = rep.multiplication_residual();
        if residual > tol {
            return Err(Error::InvalidRepresentation(format!("multiplication rule violated (residual {residual:.3e})")));
        }
        Ok(rep)
    }

    /// Reads the cocycle off the matrices, c(g,h) = tr(U_{gh}† U_g U_h)/d, then validates.
    pub fn with_inferred_cocycle(group: FiniteGroupSpec, matrices: Vec<CMatrix>, tol: f64) -> Result<Self> {
        group.validate()?;
        let n = group.order();
        if matrices.len() != n {
            return Err(Error::InvalidRepresentation(format!("{} matrices for a group of order {n}", matrices.len())));
        }
        let d = matrices[0].rows() as f64;
        let mut table = vec![vec![ONE; n]; n];
        let mut trivial = true;
        for g in 0..n {
            for h in 0..n {
                let gh = group.multiply(g, h);
                let c = (&matrices[gh].adjoint() * &(&matrices[g] * &matrices[h])).trace() / d;
                let c = if c.norm() > 0.0 { c / c.norm() } else { ONE };
                if (c - ONE).norm() > tol {
                    trivial = false;
                }
                table[g][h] = c;
            }
        }
        let cocycle = if trivial { Cocycle::Trivial } else { Cocycle::Table(table) };
        Self::new(group, matrices, cocycle, tol)
    }

    pub fn group(&self) -> &FiniteGroupSpec {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn cocycle_value(&self, g: usize, h: usize) -> C64 {
        match &self.cocycle {
            Cocycle::Trivial => ONE,
            Cocycle::Table(t) => t[g][h],
        }
    }

    pub fn has_trivial_cocycle(&self) -> bool {
        matches!(self.cocycle, Cocycle::Trivial)
    }

    /// max over (g,h) of ‖U_g U_h − c(g,h) U_{gh}‖_F, also covering |c| = 1.
    pub fn multiplication_residual(&self) -> f64 {
        let n = self.order();
        let mut worst: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                let c = self.cocycle_value(g, h);
                worst = worst.max((c.norm() - 1.0).abs());
                let gh = self.group.multiply(g, h);
                let lhs = &self.matrices[g] * &self.matrices[h];
                worst = worst.max((&lhs - &self.matrices[gh].scale(c)).frobenius_norm());
            }
        }
        worst
    }

    /// Multiplies every U_g by a phase; the twirl is unchanged.
    pub fn rephased(&self, phases: &[f64]) -> Result<Self> {
        let m: Vec<CMatrix> = self.matrices.iter().zip(phases).map(|(u, &t)| u.scale(cis(t))).collect();
        Self::with_inferred_cocycle(self.group.clone(), m, 1e-9)
    }

    /// g ↦ U_g ⊗ V_g on the tensor product space.
    pub fn tensor(&self, other: &ProjectiveUnitaryRep) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidRepresentation("tensor product of representations of different groups".into()));
        }
        let m = self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.kron(b)).collect();
        Self::with_inferred_cocycle(self.group.clone(), m, 1e-9)
    }
}

/// Cyclic shift representation of Z_d: U_g |t⟩ = |t + g mod d⟩.
pub fn build_cyclic_shift_rep(d: usize) -> Result<ProjectiveUnitaryRep> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("cyclic shift needs d ≥ 2, got {d}")));
    }
    let m = (0..d).map(|g| CMatrix::from_fn(d, d, |i, j| if i == (j + g) % d { ONE } else { ZERO })).collect();
    ProjectiveUnitaryRep::new(FiniteGroupSpec::cyclic(d), m, Cocycle::Trivial, 1e-12)
}

/// Diagonal representation U_g = diag(exp(2πi Σ_i w_{j,i} g_i / d_i)), one weight tuple per slot.
pub fn build_diagonal_character_rep(factors: &[usize], weights: &[Vec<usize>]) -> Result<ProjectiveUnitaryRep> {
    let group = FiniteGroupSpec::Abelian(factors.to_vec());
    group.validate()?;
    if weights.is_empty() || weights.iter().any(|w| w.len() != factors.len()) {
        return Err(Error::InvalidArgument("each weight tuple must have one entry per cyclic factor".into()));
    }
    let m = (0..group.order())
        .map(|g| {
            let gt = group.tuple(g);
            let diag: Vec<C64> = weights.iter().map(|w| character_value(factors, w, &gt)).collect();
            CMatrix::from_diag(&diag)
        })
        .collect();
    ProjectiveUnitaryRep::new(group, m, Cocycle::Trivial, 1e-12)
}

pub(crate) fn character_value(factors: &[usize], weight: &[usize], g: &[usize]) -> C64 {
    let phase: f64 = weight
        .iter()
        .zip(g)
        .zip(factors)
        .map(|((&w, &x), &d)| ((w * x) % d) as f64 / d as f64)
        .sum();
    cis(std::f64::consts::TAU * phase)
}

/// Weyl–Heisenberg representation of Z_d × Z_d: U_{(a,b)} = X^a Z^b.
pub fn build_weyl_heisenberg(d: usize) -> Result<(ProjectiveUnitaryRep, IrrepDecomposition)> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("Weyl–Heisenberg needs d ≥ 2, got {d}")));
    }
    let group = FiniteGroupSpec::Abelian(vec![d, d]);
    let x = CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO });
    let z = CMatrix::from_diag(&(0..d).map(|j| cis(std::f64::consts::TAU * j as f64 / d as f64)).collect::<Vec<_>>());
    let pow = |m: &CMatrix, k: usize| (0..k).fold(CMatrix::identity(d), |acc, _| &acc * m);
    let m: Vec<CMatrix> = (0..d * d)
        .map(|g| {
            let t = group.tuple(g);
            &pow(&x, t[0]) * &pow(&z, t[1])
        })
        .collect();
    let rep = ProjectiveUnitaryRep::with_inferred_cocycle(group, m.clone(), 1e-10)?;
    let dec = IrrepDecomposition::new(
        vec![IrrepBlock { label: "wh".into(), irrep_dim: d, multiplicity: 1, matrices: m }],
        CMatrix::identity(d),
    )?;
    Ok((rep, dec))
}

/// One isotypic block H_λ ⊗ M_λ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepBlock {
    pub label: String,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    /// U_{λ,g} for every group element, in element-index order.
    pub matrices: Vec<CMatrix>,
}

/// U_g = W (⊕_λ U_{λ,g} ⊗ I_{n_λ}) W†. Within block λ the columns of W are
/// ordered irrep-index major: column a·n_λ + m spans |a⟩_{H_λ}|m⟩_{M_λ}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepDecomposition {
    pub blocks: Vec<IrrepBlock>,
    pub basis_change: CMatrix,
}

impl IrrepDecomposition {
    pub fn new(blocks: Vec<IrrepBlock>, basis_change: CMatrix) -> Result<Self> {
        let total: usize = blocks.iter().map(|b| b.irrep_dim * b.multiplicity).sum();
        if !basis_change.is_square() || basis_change.rows() != total {
            return Err(Error::Dimension(format!(
                "blocks span dimension {total} but the basis change is {}x{}",
                basis_change.rows(),
                basis_change.cols()
            )));
        }
        for b in &blocks {
            if b.multiplicity == 0 || b.irrep_dim == 0 {
                return Err(Error::InvalidRepresentation(format!("block {} has zero dimension", b.label)));
            }
            if b.matrices.iter().any(|m| m.rows() != b.irrep_dim || m.cols() != b.irrep_dim) {
                return Err(Error::Dimension(format!("irrep matrices of block {} have the wrong size", b.label)));
            }
        }
        let defect = (&(&basis_change.adjoint() * &basis_change) - &CMatrix::identity(total)).frobenius_norm();
        if defect > 1e-8 {
            return Err(Error::InvalidRepresentation(format!("basis change is not unitary (defect {defect:.3e})")));
        }
        Ok(IrrepDecomposition { blocks, basis_change })
    }

    pub fn dim(&self) -> usize {
        self.basis_change.rows()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.blocks.iter().all(|b| b.multiplicity == 1)
    }

    pub fn block_index(&self, label: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.label == label)
    }

    pub fn block_offset(&self, idx: usize) -> usize {
        self.blocks[..idx].iter().map(|b| b.irrep_dim * b.multiplicity).sum()
    }

    pub fn block_size(&self, idx: usize) -> usize {
        self.blocks[idx].irrep_dim * self.blocks[idx].multiplicity
    }

    /// Columns of W spanning block `idx` (d_A × d_λ n_λ).
    pub fn block_columns(&self, idx: usize) -> CMatrix {
        let off = self.block_offset(idx);
        let idxs: Vec<usize> = (off..off + self.block_size(idx)).collect();
        self.basis_change.select_columns(&idxs)
    }

    /// Vector of A for |a⟩_{H_λ}|m⟩_{M_λ}.
    pub fn block_vector(&self, idx: usize, a: usize, m: usize) -> Vec<C64> {
        let n = self.blocks[idx].multiplicity;
        self.basis_change.column(self.block_offset(idx) + a * n + m)
    }

    /// Π_λ = W_λ W_λ†.
    pub fn projector(&self, idx: usize) -> HermitianOperator {
        let w = self.block_columns(idx);
        HermitianOperator::symmetrized(&w * &w.adjoint())
    }

    /// ⊕_λ U_{λ,g} ⊗ I_{n_λ}.
    pub fn block_form(&self, g: usize) -> CMatrix {
        let parts: Vec<CMatrix> = self
            .blocks
            .iter()
            .map(|b| b.matrices[g].kron(&CMatrix::identity(b.multiplicity)))
            .collect();
        CMatrix::direct_sum(&parts)
    }

    /// True iff n_λ ≥ d_λ for every block present.
    pub fn multiplicity_dominates_dimension(&self) -> bool {
        self.blocks.iter().all(|b| b.multiplicity >= b.irrep_dim)
    }
}

/// max over g of ‖W† U_g W − ⊕_λ (U_{λ,g} ⊗ I)‖_F.
pub fn verify_decomposition(rep: &ProjectiveUnitaryRep, dec: &IrrepDecomposition) -> Result<f64> {
    if dec.dim() != rep.dim() {
        return Err(Error::Dimension(format!("decomposition of dimension {} for a {}-dim representation", dec.dim(), rep.dim())));
    }
    if dec.blocks.iter().any(|b| b.matrices.len() != rep.order()) {
        return Err(Error::Dimension("irrep matrices missing for some group elements".into()));
    }
    let w = &dec.basis_change;
    let mut worst: f64 = 0.0;
    for g in 0..rep.order() {
        let lhs = &(&w.adjoint() * rep.matrix(g)) * w;
        worst = worst.max((&lhs - &dec.block_form(g)).frobenius_norm());
    }
    Ok(worst)
}

/// Representation with W = I built from explicit irreducible blocks.
pub fn build_block_rep(group: FiniteGroupSpec, blocks: Vec<IrrepBlock>) -> Result<(ProjectiveUnitaryRep, IrrepDecomposition)> {
    let dim: usize = blocks.iter().map(|b| b.irrep_dim * b.multiplicity).sum();
    let dec = IrrepDecomposition::new(blocks, CMatrix::identity(dim))?;
    let m = (0..group.order()).map(|g| dec.block_form(g)).collect();
    let rep = ProjectiveUnitaryRep::with_inferred_cocycle(group, m, 1e-10)?;
    Ok((rep, dec))
}

/// Trivial and two-dimensional standard irreps of the symmetric group on three
/// letters, in the element order of [`FiniteGroupSpec::symmetric3`].
pub fn symmetric3_irreps() -> (Vec<CMatrix>, Vec<CMatrix>) {
    let trivial = vec![CMatrix::identity(1); 6];
    let (c, s) = ((std::f64::consts::TAU / 3.0).cos(), (std::f64::consts::TAU / 3.0).sin());
    let r = CMatrix::from_rows(&[vec![C64::new(c, 0.0), C64::new(-s, 0.0)], vec![C64::new(s, 0.0), C64::new(c, 0.0)]]).unwrap();
    let f = CMatrix::from_real_diag(&[1.0, -1.0]);
    let std: Vec<CMatrix> = (0..6)
        .map(|e| {
            let rot = (0..e % 3).fold(CMatrix::identity(2), |acc, _| &acc * &r);
            if e / 3 == 1 {
                &f * &rot
            } else {
                rot
            }
        })
        .collect();
    (trivial, std)
}

/// Simultaneous diagonalisation of an ordinary abelian representation.
///
/// A random Hermitian combination of the U_g is diagonalised; eigenspaces on
/// which some U_g is not scalar are split again with a fresh combination.
/// Eigenvectors with equal characters are then merged into one block.
pub fn decompose_abelian(rep: &ProjectiveUnitaryRep, seed: u64) -> Result<IrrepDecomposition> {
    if !rep.has_trivial_cocycle() {
        return Err(Error::ProjectiveDecomposition);
    }
    if !rep.group().is_abelian() {
        return Err(Error::InvalidGroup("automatic decomposition needs an abelian group".into()));
    }
    let n = rep.order();
    let d = rep.dim();
    for g in 0..n {
        for h in (g + 1)..n {
            let c = (&(rep.matrix(g) * rep.matrix(h)) - &(rep.matrix(h) * rep.matrix(g))).frobenius_norm();
            if c > 1e-9 * d as f64 {
                return Err(Error::NonCommuting(c));
            }
        }
    }

    let mut rng = rng_from_seed(seed);
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(d);
    split(rep, CMatrix::identity(d), &mut rng, &mut vectors, 0)?;

    // Character of each joint eigenvector.
    let chars: Vec<Vec<C64>> = vectors
        .iter()
        .map(|v| (0..n).map(|g| crate::linalg::inner(v, &rep.matrix(g).mul_vec(v))).collect())
        .collect();

    let mut groups: Vec<(Vec<C64>, Vec<usize>)> = Vec::new();
    for (i, ch) in chars.iter().enumerate() {
        match groups.iter_mut().find(|(c, _)| c.iter().zip(ch).all(|(a, b)| (a - b).norm() < 1e-6)) {
            Some((_, members)) => members.push(i),
            None => groups.push((ch.clone(), vec![i])),
        }
    }

    let mut blocks: Vec<(Vec<usize>, IrrepBlock, Vec<usize>)> = groups
        .into_iter()
        .map(|(ch, members)| {
            let key = character_key(rep.group(), &ch);
            let label = key.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let matrices = ch.iter().map(|z| CMatrix::from_diag(&[z / z.norm()])).collect();
            (key, IrrepBlock { label, irrep_dim: 1, multiplicity: members.len(), matrices }, members)
        })
        .collect();
    blocks.sort_by(|a, b| a.0.cmp(&b.0));

    let mut cols = Vec::with_capacity(d);
    for (_, _, members) in &blocks {
        cols.extend(members.iter().map(|&i| vectors[i].clone()));
    }
    let w = CMatrix::from_columns(&cols)?;
    IrrepDecomposition::new(blocks.into_iter().map(|(_, b, _)| b).collect(), w)
}

/// Sort key and label for a one-dimensional character: the weight tuple for
/// products of cyclic groups, otherwise the rounded phases in units of 1/|G|.
fn character_key(group: &FiniteGroupSpec, ch: &[C64]) -> Vec<usize> {
    match group {
        FiniteGroupSpec::Abelian(f) => (0..f.len())
            .map(|i| {
                let mut t = vec![0; f.len()];
                t[i] = 1 % f[i];
                let z = ch[group.index_of(&t)];
                let w = (z.arg() / std::f64::consts::TAU * f[i] as f64).round() as i64;
                w.rem_euclid(f[i] as i64) as usize
            })
            .collect(),
        FiniteGroupSpec::Table(_) => {
            let n = ch.len() as f64;
            ch.iter()
                .map(|z| ((z.arg() / std::f64::consts::TAU * n).round() as i64).rem_euclid(ch.len() as i64) as usize)
                .collect()
        }
    }
}

fn split(rep: &ProjectiveUnitaryRep, basis: CMatrix, rng: &mut Rng, out: &mut Vec<Vec<C64>>, depth: usize) -> Result<()> {
    let k = basis.cols();
    if k == 1 {
        out.push(basis.column(0));
        return Ok(());
    }
    if depth > 16 {
        return Err(Error::Numerical("simultaneous diagonalisation did not separate characters".into()));
    }
    // Restrictions W_c† U_g W_c.
    let restricted: Vec<CMatrix> = rep.matrices().iter().map(|u| &(&basis.adjoint() * u) * &basis).collect();
    let scalar = restricted.iter().all(|m| {
        let t = m.trace() / k as f64;
        (m - &CMatrix::identity(k).scale(t)).frobenius_norm() < 1e-8
    });
    if scalar {
        for j in 0..k {
            out.push(basis.column(j));
        }
        return Ok(());
    }
    let mut h = CMatrix::zeros(k, k);
    for m in &restricted {
        let (a, b): (f64, f64) = (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let herm = m + &m.adjoint();
        let anti = (m - &m.adjoint()).scale(C64::new(0.0, 1.0));
        h = &h + &(&herm.scale_real(a) + &anti.scale_real(b));
    }
    let sd = HermitianOperator::symmetrized(h).eig()?;
    let scale = sd.eigenvalues.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && (sd.eigenvalues[end - 1] - sd.eigenvalues[end]).abs() < 1e-8 * scale {
            end += 1;
        }
        let idx: Vec<usize> = (start..end).collect();
        let sub = &basis * &sd.eigenvectors.select_columns(&idx);
        split(rep, sub, rng, out, depth + 1)?;
        start = end;
    }
    Ok(())
}
