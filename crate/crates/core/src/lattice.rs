//! Integral quadratic lattices given by Gram matrices.
//!
//! A lattice carries a list of [`Block`]s recording how it was assembled from
//! named summands. Constructors and [`QuadLattice::direct_sum`] maintain that
//! lineage; it is how a hyperbolic-plane summand gets certified later on.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{LatticeError, Result};
use crate::matrix::{integer_kernel, IntMatrix};

/// The frozen E8 Gram matrix: minus the Cartan matrix in Bourbaki numbering
/// (chain 1-3-4-5-6-7-8, node 2 attached to node 4).
const E8_CARTAN_EDGES: [(usize, usize); 7] =
    [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// `[[0,1],[1,0]]`
    Hyperbolic,
    /// negative definite E8 in the frozen basis
    E8,
    /// `[[m]]`
    Rank1 { m: BigInt },
    /// anything else, identified only by its size
    Other { rank: usize },
}

impl Block {
    pub fn rank(&self) -> usize {
        match self {
            Block::Hyperbolic => 2,
            Block::E8 => 8,
            Block::Rank1 { .. } => 1,
            Block::Other { rank } => *rank,
        }
    }

    fn gram(&self) -> Option<IntMatrix> {
        match self {
            Block::Hyperbolic => Some(hyperbolic_gram()),
            Block::E8 => Some(e8_gram()),
            Block::Rank1 { m } => Some(IntMatrix::from_rows(vec![vec![m.clone()]]).unwrap()),
            Block::Other { .. } => None,
        }
    }
}

fn hyperbolic_gram() -> IntMatrix {
    IntMatrix::from_i64(&[&[0, 1], &[1, 0]])
}

fn e8_gram() -> IntMatrix {
    let mut g = IntMatrix::zeros(8, 8);
    for i in 0..8 {
        g[(i, i)] = BigInt::from(-2);
    }
    for &(a, b) in &E8_CARTAN_EDGES {
        g[(a, b)] = BigInt::one();
        g[(b, a)] = BigInt::one();
    }
    g
}

/// A nondegenerate integral quadratic lattice.
///
/// Equality compares Gram matrices only; the block lineage is metadata.
#[derive(Clone)]
pub struct QuadLattice {
    gram: IntMatrix,
    blocks: Vec<Block>,
}

impl PartialEq for QuadLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for QuadLattice {}

impl fmt::Debug for QuadLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadLattice")
            .field("gram", &self.gram)
            .field("blocks", &self.blocks)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(len: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); len])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &LatticeVector) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }
}

impl From<Vec<BigInt>> for LatticeVector {
    fn from(v: Vec<BigInt>) -> Self {
        LatticeVector(v)
    }
}

/// Orthogonal complement of a vector together with its embedding.
#[derive(Clone, Debug)]
pub struct Complement {
    pub lattice: QuadLattice,
    /// Columns are the complement basis written in the ambient basis.
    pub embedding: IntMatrix,
}

impl QuadLattice {
    /// Validates squareness, symmetry and nondegeneracy.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(LatticeError::invalid("Gram matrix is not square"));
        }
        if gram.rows() == 0 {
            return Err(LatticeError::invalid("Gram matrix is empty"));
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::invalid("Gram matrix is not symmetric"));
        }
        if gram.det().is_zero() {
            return Err(LatticeError::Degenerate("determinant is zero".into()));
        }
        let rank = gram.rows();
        Ok(QuadLattice {
            gram,
            blocks: vec![Block::Other { rank }],
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    /// Rebuilds a lattice from a block lineage, checking every named block
    /// against the corresponding diagonal piece of `gram` and that the
    /// off-diagonal blocks vanish.
    pub fn with_blocks(gram: IntMatrix, blocks: Vec<Block>) -> Result<Self> {
        let mut lat = Self::new(gram)?;
        let total: usize = blocks.iter().map(Block::rank).sum();
        if total != lat.rank() {
            return Err(LatticeError::invalid(format!(
                "provenance blocks cover rank {total}, Gram has rank {}",
                lat.rank()
            )));
        }
        let mut offset = 0;
        for b in &blocks {
            let r = b.rank();
            for i in offset..offset + r {
                for j in 0..lat.rank() {
                    if (j < offset || j >= offset + r) && !lat.gram[(i, j)].is_zero() {
                        return Err(LatticeError::invalid(
                            "provenance blocks are not orthogonal in the Gram matrix",
                        ));
                    }
                }
            }
            if let Some(expected) = b.gram() {
                let idx: Vec<usize> = (offset..offset + r).collect();
                if lat.gram.submatrix(&idx) != expected {
                    return Err(LatticeError::invalid(format!(
                        "provenance block {b:?} at offset {offset} does not match the Gram matrix"
                    )));
                }
            }
            offset += r;
        }
        lat.blocks = blocks;
        Ok(lat)
    }

    /// The hyperbolic plane `U`.
    pub fn hyperbolic_plane() -> Self {
        QuadLattice {
            gram: hyperbolic_gram(),
            blocks: vec![Block::Hyperbolic],
        }
    }

    /// Negative definite E8.
    pub fn e8() -> Self {
        QuadLattice {
            gram: e8_gram(),
            blocks: vec![Block::E8],
        }
    }

    /// The rank-one lattice `⟨m⟩`.
    pub fn rank1(m: impl Into<BigInt>) -> Result<Self> {
        let m = m.into();
        if m.is_zero() {
            return Err(LatticeError::Degenerate("rank-one lattice ⟨0⟩".into()));
        }
        Ok(QuadLattice {
            gram: IntMatrix::from_rows(vec![vec![m.clone()]])?,
            blocks: vec![Block::Rank1 { m }],
        })
    }

    /// `U³ ⊕ E8² ⊕ ⟨2 − 2n⟩`, without the last summand when `n = 1`.
    pub fn lambda(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(LatticeError::domain(format!("Λ_n needs n ≥ 1, got {n}")));
        }
        let u = Self::hyperbolic_plane();
        let e8 = Self::e8();
        let mut lat = u
            .direct_sum(&u)
            .direct_sum(&u)
            .direct_sum(&e8)
            .direct_sum(&e8);
        if n > 1 {
            lat = lat.direct_sum(&Self::rank1(2 - 2 * n)?);
        }
        Ok(lat)
    }

    pub fn direct_sum(&self, other: &QuadLattice) -> QuadLattice {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        QuadLattice {
            gram: self.gram.block_diag(&other.gram),
            blocks,
        }
    }

    /// `L(k)`: the same module with the form multiplied by `k ≠ 0`.
    pub fn scaled(&self, k: impl Into<BigInt>) -> Result<QuadLattice> {
        let k = k.into();
        if k.is_zero() {
            return Err(LatticeError::Degenerate("scaling by zero".into()));
        }
        if k.is_one() {
            return Ok(self.clone());
        }
        Ok(QuadLattice {
            gram: self.gram.scale(&k),
            blocks: vec![Block::Other { rank: self.rank() }],
        })
    }

    pub fn negated(&self) -> QuadLattice {
        self.scaled(-1).expect("nonzero scale")
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[(i, j)]
    }

    /// Number of hyperbolic planes certified by the block lineage.
    pub fn certified_hyperbolic_summands(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| **b == Block::Hyperbolic)
            .count()
    }

    fn check_len(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                actual: v.len(),
            });
        }
        Ok(())
    }

    /// `xᵀ · G · y`
    pub fn inner_product(&self, x: &LatticeVector, y: &LatticeVector) -> Result<BigInt> {
        self.check_len(x)?;
        self.check_len(y)?;
        let gy = self.gram.mul_vec(&y.0)?;
        Ok(x.0.iter().zip(&gy).map(|(a, b)| a * b).sum())
    }

    /// `x²`
    pub fn norm(&self, x: &LatticeVector) -> Result<BigInt> {
        self.inner_product(x, x)
    }

    /// The vector `G · x`, i.e. the linear form `⟨x, ·⟩` in dual coordinates.
    pub fn pairing_vector(&self, x: &LatticeVector) -> Result<Vec<BigInt>> {
        self.check_len(x)?;
        self.gram.mul_vec(&x.0)
    }

    pub fn is_primitive(&self, v: &LatticeVector) -> Result<bool> {
        self.check_len(v)?;
        if v.is_zero() {
            return Err(LatticeError::invalid("primitivity of the zero vector"));
        }
        Ok(v.content().is_one())
    }

    /// Divisibility of `v`: the positive generator of `⟨v, L⟩ ⊆ Z`.
    pub fn divisibility(&self, v: &LatticeVector) -> Result<BigInt> {
        let gv = self.pairing_vector(v)?;
        Ok(gv.iter().fold(BigInt::zero(), |g, x| g.gcd(x)))
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    /// `(positive, negative)` counts of a rational diagonalization.
    pub fn signature(&self) -> (usize, usize) {
        let pivots = rational_diagonal(&self.gram);
        let pos = pivots.iter().filter(|p| p.is_positive()).count();
        let neg = pivots.iter().filter(|p| p.is_negative()).count();
        (pos, neg)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().1 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().0 == 0
    }

    pub fn is_definite(&self) -> bool {
        let (p, n) = self.signature();
        p == 0 || n == 0
    }

    /// Saturated sublattice `{x : ⟨x, v⟩ = 0}` with its induced form.
    pub fn orthogonal_complement(&self, v: &LatticeVector) -> Result<Complement> {
        self.check_len(v)?;
        if v.is_zero() {
            return Err(LatticeError::invalid("complement of the zero vector"));
        }
        let form = IntMatrix::from_rows(vec![self.pairing_vector(v)?])?;
        let basis = integer_kernel(&form);
        let embedding = IntMatrix::from_columns(&basis)?;
        let gram = embedding.congruence(&self.gram)?;
        if gram.det().is_zero() {
            return Err(LatticeError::Degenerate(
                "orthogonal complement is degenerate (isotropic vector)".into(),
            ));
        }
        let rank = gram.rows();
        Ok(Complement {
            lattice: QuadLattice {
                gram,
                blocks: vec![Block::Other { rank }],
            },
            embedding,
        })
    }

    /// Gram matrix in a new basis given by the columns of a unimodular `g`.
    pub fn change_basis(&self, g: &IntMatrix) -> Result<QuadLattice> {
        if g.rows() != self.rank() || !g.is_square() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                actual: g.rows(),
            });
        }
        if !g.det().abs().is_one() {
            return Err(LatticeError::invalid("change of basis is not unimodular"));
        }
        QuadLattice::new(g.congruence(&self.gram)?)
    }

    /// Is `g` an isometry of this lattice, `gᵀ G g = G`?
    pub fn is_isometry(&self, g: &IntMatrix) -> bool {
        g.rows() == self.rank()
            && g.is_square()
            && g.congruence(&self.gram).is_ok_and(|h| h == self.gram)
    }
}

/// Pivots of a symmetric congruence diagonalization over Q.
pub(crate) fn rational_diagonal(gram: &IntMatrix) -> Vec<BigRational> {
    let n = gram.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(gram[(i, j)].clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let k = match active.iter().find(|&&i| !a[i][i].is_zero()) {
            Some(&k) => k,
            None => {
                // all remaining diagonal entries vanish: e_i ← e_i + e_j makes a_ii = 2a_ij
                let pair = active.iter().find_map(|&i| {
                    active
                        .iter()
                        .find(|&&j| j != i && !a[i][j].is_zero())
                        .map(|&j| (i, j))
                });
                match pair {
                    Some((i, j)) => {
                        for t in 0..n {
                            let v = a[j][t].clone();
                            a[i][t] += v;
                        }
                        for t in 0..n {
                            let v = a[t][j].clone();
                            a[t][i] += v;
                        }
                        i
                    }
                    None => {
                        // the remaining block is zero
                        pivots.extend(active.iter().map(|_| BigRational::zero()));
                        break;
                    }
                }
            }
        };
        let p = a[k][k].clone();
        active.retain(|&i| i != k);
        for &i in &active {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for &j in &active {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for &i in &active {
            a[i][k] = BigRational::zero();
            a[k][i] = BigRational::zero();
        }
        pivots.push(p);
    }
    pivots
}

pub fn make_u() -> QuadLattice {
    QuadLattice::hyperbolic_plane()
}

pub fn make_e8() -> QuadLattice {
    QuadLattice::e8()
}

pub fn make_rank1(m: impl Into<BigInt>) -> Result<QuadLattice> {
    QuadLattice::rank1(m)
}

pub fn direct_sum(a: &QuadLattice, b: &QuadLattice) -> QuadLattice {
    a.direct_sum(b)
}

pub fn lambda_lattice(n: i64) -> Result<QuadLattice> {
    QuadLattice::lambda(n)
}

/// A lattice with a distinguished nonzero vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedLattice {
    lattice: QuadLattice,
    point: LatticeVector,
}

impl PointedLattice {
    pub fn new(lattice: QuadLattice, point: LatticeVector) -> Result<Self> {
        lattice.check_len(&point)?;
        if point.is_zero() {
            return Err(LatticeError::invalid("pointed lattice with zero point"));
        }
        Ok(PointedLattice { lattice, point })
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    pub fn point(&self) -> &LatticeVector {
        &self.point
    }

    pub fn point_norm(&self) -> BigInt {
        self.lattice
            .norm(&self.point)
            .expect("length checked on construction")
    }

    pub fn is_primitive(&self) -> bool {
        self.point.content().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn hyperbolic_plane_basics() {
        let u = make_u();
        assert_eq!(u.gram(), &IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        assert_eq!(u.signature(), (1, 1));
        assert_eq!(u.det(), big(-1));
        assert!(u.is_even());
        let e = LatticeVector::from_i64(&[1, 0]);
        let f = LatticeVector::from_i64(&[0, 1]);
        assert_eq!(u.inner_product(&e, &f).unwrap(), big(1));
        assert_eq!(u.norm(&e.add(&f)).unwrap(), big(2));
    }

    #[test]
    fn e8_basics() {
        let e8 = make_e8();
        assert_eq!(e8.det(), big(1));
        assert_eq!(e8.signature(), (0, 8));
        assert!(e8.is_even());
        let e0 = LatticeVector::unit(8, 0);
        assert_eq!(e8.norm(&e0).unwrap(), big(-2));
    }

    #[test]
    fn rank_one_lattices() {
        assert_eq!(
            make_rank1(-2).unwrap().gram(),
            &IntMatrix::from_i64(&[&[-2]])
        );
        assert_eq!(
            make_rank1(2 - 2 * 5).unwrap().gram(),
            &IntMatrix::from_i64(&[&[-8]])
        );
        assert!(matches!(make_rank1(0), Err(LatticeError::Degenerate(_))));
        assert_eq!(make_rank1(-8).unwrap().signature(), (0, 1));
        assert!(!QuadLattice::from_i64(&[&[1]]).unwrap().is_even());
    }

    #[test]
    fn direct_sums_and_lambda() {
        let u = make_u();
        assert_eq!(direct_sum(&u, &u).det(), big(1));
        let l2 = lambda_lattice(2).unwrap();
        assert_eq!(l2.rank(), 23);
        assert_eq!(l2.signature(), (3, 20));
        assert_eq!(lambda_lattice(1).unwrap().rank(), 22);
        assert!(lambda_lattice(3).unwrap().is_even());
        assert!(matches!(lambda_lattice(0), Err(LatticeError::Domain(_))));
        assert_eq!(l2.certified_hyperbolic_summands(), 3);
    }

    #[test]
    fn primitivity() {
        let u = make_u();
        assert!(u.is_primitive(&LatticeVector::from_i64(&[1, 0])).unwrap());
        assert!(!u.is_primitive(&LatticeVector::from_i64(&[2, 4])).unwrap());
        assert!(u.is_primitive(&LatticeVector::from_i64(&[3, 5])).unwrap());
        assert!(u.is_primitive(&LatticeVector::from_i64(&[0, 0])).is_err());
    }

    #[test]
    fn complement_in_u() {
        let u = make_u();
        let c = u
            .orthogonal_complement(&LatticeVector::from_i64(&[1, 1]))
            .unwrap();
        assert_eq!(c.lattice.gram(), &IntMatrix::from_i64(&[&[-2]]));
        let err = u.orthogonal_complement(&LatticeVector::from_i64(&[1, 0]));
        assert!(matches!(err, Err(LatticeError::Degenerate(_))));
    }

    #[test]
    fn complement_in_lambda_one() {
        let l1 = lambda_lattice(1).unwrap();
        // e + f in the first U has norm 2
        let mut v = LatticeVector::zero(22);
        v.0[0] = big(1);
        v.0[1] = big(1);
        let c = l1.orthogonal_complement(&v).unwrap();
        assert_eq!(c.lattice.rank(), 21);
        assert_eq!(c.lattice.signature(), (2, 19));
        for j in 0..c.embedding.cols() {
            let col = LatticeVector(c.embedding.column(j));
            assert!(l1.inner_product(&col, &v).unwrap().is_zero());
        }
    }

    #[test]
    fn provenance_is_checked() {
        let l = make_u().direct_sum(&make_rank1(4).unwrap());
        let ok = QuadLattice::with_blocks(
            l.gram().clone(),
            vec![Block::Hyperbolic, Block::Rank1 { m: big(4) }],
        );
        assert!(ok.is_ok());
        let bad = QuadLattice::with_blocks(
            l.gram().clone(),
            vec![Block::Rank1 { m: big(4) }, Block::Hyperbolic],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_bad_grams() {
        assert!(matches!(
            QuadLattice::from_i64(&[&[1, 2], &[3, 4]]),
            Err(LatticeError::InvalidInput(_))
        ));
        assert!(matches!(
            QuadLattice::from_i64(&[&[1, 1], &[1, 1]]),
            Err(LatticeError::Degenerate(_))
        ));
    }
}
