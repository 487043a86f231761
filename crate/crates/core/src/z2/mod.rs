//! Linear algebra over the two-element field: simplicial chains and
//! cochains, boundary operators, (co)homology bases and cup products.
//!
//! Homology is reduced throughout, so a connected complex has `b0 = 0`.

mod bits;
mod matrix;

pub use bits::BitVec;
pub use matrix::{quotient_basis, Echelon, Z2Matrix};

use std::collections::VecDeque;

use thiserror::Error;

use crate::complex::Complex2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("vector has {got} entries but the complex has {expected} simplices of degree {degree}")]
    LengthMismatch { degree: usize, expected: usize, got: usize },
    #[error("simplex index {index} out of range for degree {degree}")]
    IndexOutOfRange { degree: usize, index: usize },
    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),
}

/// A chain or cochain: one bit per simplex of the given degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Z2Vector {
    degree: usize,
    bits: BitVec,
}

impl Z2Vector {
    pub fn zero(complex: &Complex2, degree: usize) -> Self {
        Self { degree, bits: BitVec::zeros(complex.simplex_count(degree)) }
    }

    pub fn from_bits(degree: usize, bits: BitVec) -> Self {
        Self { degree, bits }
    }

    /// Vector supported on the listed simplex indices (repeats cancel).
    pub fn from_support(
        complex: &Complex2,
        degree: usize,
        support: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AlgebraError> {
        if degree > 2 {
            return Err(AlgebraError::UnsupportedDegree(degree));
        }
        let n = complex.simplex_count(degree);
        let mut bits = BitVec::zeros(n);
        for i in support {
            if i >= n {
                return Err(AlgebraError::IndexOutOfRange { degree, index: i });
            }
            bits.toggle(i);
        }
        Ok(Self { degree, bits })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    /// Sorted indices of supported simplices.
    pub fn support(&self) -> Vec<usize> {
        self.bits.ones().collect()
    }

    pub fn add(&self, other: &Z2Vector) -> Result<Z2Vector, AlgebraError> {
        check_degree(other, self.degree)?;
        let mut bits = self.bits.clone();
        bits.xor_assign(&other.bits);
        Ok(Self { degree: self.degree, bits })
    }

    pub fn check_on(&self, complex: &Complex2) -> Result<(), AlgebraError> {
        let expected = complex.simplex_count(self.degree);
        if self.degree > 2 {
            return Err(AlgebraError::UnsupportedDegree(self.degree));
        }
        if expected != self.bits.len() {
            return Err(AlgebraError::LengthMismatch { degree: self.degree, expected, got: self.bits.len() });
        }
        Ok(())
    }
}

fn check_degree(v: &Z2Vector, expected: usize) -> Result<(), AlgebraError> {
    if v.degree != expected {
        return Err(AlgebraError::DegreeMismatch { expected, got: v.degree });
    }
    Ok(())
}

/// The boundary operator `∂_k : C_k → C_{k-1}` for `k ∈ {1, 2}`.
pub fn boundary_matrix(complex: &Complex2, k: usize) -> Result<Z2Matrix, AlgebraError> {
    Ok(coboundary_matrix(complex, k - 1)?.transpose())
}

/// The coboundary operator `δ_k : C^k → C^{k+1}` for `k ∈ {0, 1}`.
pub fn coboundary_matrix(complex: &Complex2, k: usize) -> Result<Z2Matrix, AlgebraError> {
    match k {
        0 => Ok(Z2Matrix::from_rows(
            complex.vertex_count(),
            complex
                .edges()
                .iter()
                .map(|&[u, v]| BitVec::from_indices(complex.vertex_count(), [u, v]))
                .collect(),
        )),
        1 => Ok(Z2Matrix::from_rows(
            complex.edge_count(),
            (0..complex.triangle_count())
                .map(|t| BitVec::from_indices(complex.edge_count(), complex.triangle_edges(t)))
                .collect(),
        )),
        _ => Err(AlgebraError::UnsupportedDegree(k)),
    }
}

/// Boundary of a 1- or 2-chain.
pub fn boundary(complex: &Complex2, chain: &Z2Vector) -> Result<Z2Vector, AlgebraError> {
    chain.check_on(complex)?;
    let mut out = Z2Vector::zero(complex, chain.degree.saturating_sub(1));
    match chain.degree {
        1 => {
            for e in chain.bits.ones() {
                let [u, v] = complex.edge(e);
                out.bits.toggle(u);
                out.bits.toggle(v);
            }
        }
        2 => {
            for t in chain.bits.ones() {
                for e in complex.triangle_edges(t) {
                    out.bits.toggle(e);
                }
            }
        }
        d => return Err(AlgebraError::UnsupportedDegree(d)),
    }
    Ok(out)
}

/// Coboundary of a 0- or 1-cochain.
pub fn coboundary(complex: &Complex2, cochain: &Z2Vector) -> Result<Z2Vector, AlgebraError> {
    cochain.check_on(complex)?;
    let mut out = Z2Vector::zero(complex, cochain.degree + 1);
    match cochain.degree {
        0 => {
            for (e, &[u, v]) in complex.edges().iter().enumerate() {
                if cochain.get(u) != cochain.get(v) {
                    out.bits.set(e, true);
                }
            }
        }
        1 => {
            for t in 0..complex.triangle_count() {
                let [a, b, c] = complex.triangle_edges(t);
                if cochain.get(a) ^ cochain.get(b) ^ cochain.get(c) {
                    out.bits.set(t, true);
                }
            }
        }
        2 => {}
        d => return Err(AlgebraError::UnsupportedDegree(d)),
    }
    Ok(out)
}

pub fn is_cocycle(complex: &Complex2, cochain: &Z2Vector) -> Result<bool, AlgebraError> {
    Ok(coboundary(complex, cochain)?.is_zero())
}

pub fn is_cycle(complex: &Complex2, chain: &Z2Vector) -> Result<bool, AlgebraError> {
    if chain.degree == 0 {
        chain.check_on(complex)?;
        return Ok(true);
    }
    Ok(boundary(complex, chain)?.is_zero())
}

/// Whether a 1-cochain is `δf` for some 0-cochain `f`, decided by
/// integrating it along a spanning forest.
pub fn is_coboundary(complex: &Complex2, cochain: &Z2Vector) -> Result<bool, AlgebraError> {
    check_degree(cochain, 1)?;
    cochain.check_on(complex)?;
    Ok(integrate(complex, cochain).is_some())
}

/// A potential `f` with `δf = cochain`, if one exists.
pub fn integrate(complex: &Complex2, cochain: &Z2Vector) -> Option<Vec<bool>> {
    let adj = complex.vertex_edges();
    let mut pot: Vec<Option<bool>> = vec![None; complex.vertex_count()];
    let mut queue = VecDeque::new();
    for root in 0..complex.vertex_count() {
        if pot[root].is_some() {
            continue;
        }
        pot[root] = Some(false);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let pu = pot[u].unwrap();
            for &(w, e) in &adj[u] {
                let want = pu ^ cochain.get(e);
                match pot[w] {
                    None => {
                        pot[w] = Some(want);
                        queue.push_back(w);
                    }
                    Some(pw) if pw != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(pot.into_iter().map(Option::unwrap).collect())
}

/// Representatives of a basis of reduced homology in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyBasis {
    pub degree: usize,
    pub representatives: Vec<Z2Vector>,
}

impl HomologyBasis {
    pub fn rank(&self) -> usize {
        self.representatives.len()
    }
}

/// Representative cocycles of a basis of reduced cohomology in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyBasis {
    pub degree: usize,
    pub representatives: Vec<Z2Vector>,
}

impl CohomologyBasis {
    pub fn rank(&self) -> usize {
        self.representatives.len()
    }

    /// The class `Σ coeffs[i]·αᵢ`.
    pub fn combination(&self, complex: &Complex2, coeffs: &[bool]) -> Z2Vector {
        let mut out = Z2Vector::zero(complex, self.degree);
        for (rep, _) in self.representatives.iter().zip(coeffs).filter(|(_, &c)| c) {
            out.bits.xor_assign(&rep.bits);
        }
        out
    }
}

fn component_roots(complex: &Complex2) -> (Vec<usize>, Vec<usize>) {
    let labels = complex.component_labels();
    let mut roots = Vec::new();
    for (v, &l) in labels.iter().enumerate() {
        if l == roots.len() {
            roots.push(v);
        }
    }
    (labels, roots)
}

pub fn homology_basis(complex: &Complex2, k: usize) -> Result<HomologyBasis, AlgebraError> {
    let representatives = match k {
        0 => {
            let (_, roots) = component_roots(complex);
            roots
                .iter()
                .skip(1)
                .map(|&r| Z2Vector::from_support(complex, 0, [roots[0], r]))
                .collect::<Result<_, _>>()?
        }
        1 => {
            let cycles = boundary_matrix(complex, 1)?.kernel();
            let boundaries = coboundary_matrix(complex, 1)?;
            let bdry_rows: Vec<BitVec> = (0..boundaries.rows()).map(|i| boundaries.row(i).clone()).collect();
            quotient_basis(complex.edge_count(), &bdry_rows, &cycles)
                .into_iter()
                .map(|b| Z2Vector::from_bits(1, b))
                .collect()
        }
        2 => boundary_matrix(complex, 2)?
            .kernel()
            .into_iter()
            .map(|b| Z2Vector::from_bits(2, b))
            .collect(),
        _ => return Err(AlgebraError::UnsupportedDegree(k)),
    };
    Ok(HomologyBasis { degree: k, representatives })
}

pub fn cohomology_basis(complex: &Complex2, k: usize) -> Result<CohomologyBasis, AlgebraError> {
    let representatives = match k {
        0 => {
            let (labels, roots) = component_roots(complex);
            (1..roots.len())
                .map(|c| {
                    Z2Vector::from_support(
                        complex,
                        0,
                        labels.iter().enumerate().filter(|(_, &l)| l == c).map(|(v, _)| v),
                    )
                })
                .collect::<Result<_, _>>()?
        }
        1 => {
            let cocycles = coboundary_matrix(complex, 1)?.kernel();
            let d0 = coboundary_matrix(complex, 0)?.transpose();
            let cobdry: Vec<BitVec> = (0..d0.rows()).map(|i| d0.row(i).clone()).collect();
            quotient_basis(complex.edge_count(), &cobdry, &cocycles)
                .into_iter()
                .map(|b| Z2Vector::from_bits(1, b))
                .collect()
        }
        2 => {
            let d1 = coboundary_matrix(complex, 1)?.transpose();
            let cobdry: Vec<BitVec> = (0..d1.rows()).map(|i| d1.row(i).clone()).collect();
            let units: Vec<BitVec> =
                (0..complex.triangle_count()).map(|t| BitVec::unit(complex.triangle_count(), t)).collect();
            quotient_basis(complex.triangle_count(), &cobdry, &units)
                .into_iter()
                .map(|b| Z2Vector::from_bits(2, b))
                .collect()
        }
        _ => return Err(AlgebraError::UnsupportedDegree(k)),
    };
    Ok(CohomologyBasis { degree: k, representatives })
}

/// Reduced Betti numbers `[b0, b1, b2]` by rank computation.
pub fn betti_numbers(complex: &Complex2) -> [usize; 3] {
    let r1 = coboundary_matrix(complex, 0).map(|m| m.rank()).unwrap_or(0);
    let r2 = coboundary_matrix(complex, 1).map(|m| m.rank()).unwrap_or(0);
    let b0 = (complex.vertex_count() - r1).saturating_sub(1);
    [b0, complex.edge_count() - r1 - r2, complex.triangle_count() - r2]
}

/// Mod-2 pairing of a cochain with a chain of the same degree.
pub fn evaluate(cochain: &Z2Vector, chain: &Z2Vector) -> Result<bool, AlgebraError> {
    check_degree(chain, cochain.degree)?;
    if cochain.len() != chain.len() {
        return Err(AlgebraError::LengthMismatch { degree: chain.degree, expected: cochain.len(), got: chain.len() });
    }
    Ok(cochain.bits.dot(&chain.bits))
}

/// Ordered simplicial cup product of two 1-cochains: on `[v0<v1<v2]` the
/// value is `α([v0,v1])·β([v1,v2])`.
pub fn cup_product(complex: &Complex2, alpha: &Z2Vector, beta: &Z2Vector) -> Result<Z2Vector, AlgebraError> {
    check_degree(alpha, 1)?;
    check_degree(beta, 1)?;
    alpha.check_on(complex)?;
    beta.check_on(complex)?;
    let mut out = Z2Vector::zero(complex, 2);
    for t in 0..complex.triangle_count() {
        let [front, back, _] = complex.triangle_edges(t);
        if alpha.get(front) && beta.get(back) {
            out.bits.set(t, true);
        }
    }
    Ok(out)
}

/// A pair of degree-1 basis classes whose cup product pairs non-trivially
/// with a degree-2 homology class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CupWitness {
    pub alpha_index: usize,
    pub beta_index: usize,
    pub alpha: Z2Vector,
    pub beta: Z2Vector,
    pub cycle_index: usize,
    pub cycle: Z2Vector,
}

/// `M[i][j] = ⟨αᵢ ∪ αⱼ, cycle⟩` over a cohomology basis.
pub fn cup_pairing_matrix(
    complex: &Complex2,
    h1: &CohomologyBasis,
    cycle: &Z2Vector,
) -> Result<Vec<Vec<bool>>, AlgebraError> {
    h1.representatives
        .iter()
        .map(|a| {
            h1.representatives
                .iter()
                .map(|b| evaluate(&cup_product(complex, a, b)?, cycle))
                .collect()
        })
        .collect()
}

/// Every basis pair `i <= j` with `[αᵢ ∪ αⱼ] ≠ 0`, tested against a basis of
/// `H_2`. Over a field `H² ≅ Hom(H_2, Z₂)`, so a class is non-zero exactly
/// when it pairs non-trivially with some basis cycle.
pub fn cup_witness_pairs_with(
    complex: &Complex2,
    h1: &CohomologyBasis,
    h2: &HomologyBasis,
) -> Result<Vec<CupWitness>, AlgebraError> {
    let mut out = Vec::new();
    for (i, a) in h1.representatives.iter().enumerate() {
        for (j, b) in h1.representatives.iter().enumerate().skip(i) {
            let cup = cup_product(complex, a, b)?;
            for (k, z) in h2.representatives.iter().enumerate() {
                if evaluate(&cup, z)? {
                    out.push(CupWitness {
                        alpha_index: i,
                        beta_index: j,
                        alpha: a.clone(),
                        beta: b.clone(),
                        cycle_index: k,
                        cycle: z.clone(),
                    });
                    break;
                }
            }
        }
    }
    Ok(out)
}

pub fn cup_witness_pairs(complex: &Complex2) -> Result<Vec<CupWitness>, AlgebraError> {
    let h1 = cohomology_basis(complex, 1)?;
    let h2 = homology_basis(complex, 2)?;
    cup_witness_pairs_with(complex, &h1, &h2)
}

/// Some pair of 1-cocycles with non-zero cup product in `H²`, if any.
pub fn cup_length_witness(complex: &Complex2) -> Result<Option<CupWitness>, AlgebraError> {
    Ok(cup_witness_pairs(complex)?.into_iter().next())
}

/// Cohomologous cocycle with locally minimal support, found by greedily
/// adding vertex coboundaries that shrink the support.
pub fn minimize_support(complex: &Complex2, cochain: &Z2Vector) -> Result<Z2Vector, AlgebraError> {
    check_degree(cochain, 1)?;
    cochain.check_on(complex)?;
    let adj = complex.vertex_edges();
    let mut out = cochain.clone();
    loop {
        let mut improved = false;
        for star in &adj {
            let hits = star.iter().filter(|(_, e)| out.get(*e)).count();
            if 2 * hits > star.len() {
                for &(_, e) in star {
                    out.bits.toggle(e);
                }
                improved = true;
            }
        }
        if !improved {
            return Ok(out);
        }
    }
}
