//! Brute-force oracles: short vectors and isometries of definite lattices,
//! bounded witness searches for indefinite ones.
//!
//! Definite enumeration is exact. The Gram matrix is written as
//! `Q(x) = Σ dᵢ (xᵢ + Σ_{j>i} μᵢⱼ xⱼ)²` over Q and coordinates are fixed from the
//! last one down, each constrained to the interval its remaining budget allows.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LatticeError, Result};
use crate::lattice::{LatticeVector, QuadLattice};
use crate::matrix::IntMatrix;

/// Largest rank accepted by [`is_isometric_definite`] unless overridden.
pub const DEFAULT_ISOMETRY_RANK: usize = 8;

/// Lattice vectors of a fixed norm, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorSet {
    pub norm: BigInt,
    pub vectors: Vec<LatticeVector>,
}

impl VectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `x ↦ (±x normalized to a positive leading entry, sign)`, the canonical sort key.
fn canonical_key(v: &LatticeVector) -> (Vec<BigInt>, bool) {
    let negated =
        v.0.iter()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_negative());
    let normalized = if negated { v.neg().0 } else { v.0.clone() };
    (normalized, negated)
}

pub fn sort_canonical(vectors: &mut [LatticeVector]) {
    vectors.sort_by_cached_key(canonical_key);
}

struct Cholesky {
    diag: Vec<BigRational>,
    /// `mu[i][j]` for `j > i`
    mu: Vec<Vec<BigRational>>,
}

fn cholesky(gram: &IntMatrix) -> Cholesky {
    let n = gram.rows();
    let g = |i: usize, j: usize| BigRational::from_integer(gram[(i, j)].clone());
    let mut diag = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut d = g(i, i);
        for k in 0..i {
            d -= &diag[k] * &mu[k][i] * &mu[k][i];
        }
        diag[i] = d;
        for j in i + 1..n {
            let mut s = g(i, j);
            for k in 0..i {
                s -= &diag[k] * &mu[k][i] * &mu[k][j];
            }
            mu[i][j] = s / &diag[i];
        }
    }
    Cholesky { diag, mu }
}

/// `floor(sqrt(r))` for a nonnegative rational.
fn floor_sqrt(r: &BigRational) -> BigInt {
    let (a, b) = (r.numer(), r.denom());
    (a * b).sqrt() / b
}

/// Every `x` with `xᵀ G x = m` for a positive definite `G` (`m ≥ 0`).
fn enumerate_positive(
    gram: &IntMatrix,
    m: &BigInt,
    coeff_bound: &BigInt,
) -> Result<Vec<LatticeVector>> {
    let n = gram.rows();
    if m.is_negative() {
        return Ok(Vec::new());
    }
    if m.is_zero() {
        return Ok(vec![LatticeVector::zero(n)]);
    }
    let chol = cholesky(gram);
    let target = BigRational::from_integer(m.clone());
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    descend(&chol, n, &target, &mut x, coeff_bound, &mut out)?;
    Ok(out)
}

fn descend(
    chol: &Cholesky,
    level: usize,
    budget: &BigRational,
    x: &mut Vec<BigInt>,
    coeff_bound: &BigInt,
    out: &mut Vec<LatticeVector>,
) -> Result<()> {
    if level == 0 {
        if budget.is_zero() {
            out.push(LatticeVector(x.clone()));
        }
        return Ok(());
    }
    let i = level - 1;
    let n = x.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        if !x[j].is_zero() {
            center += &chol.mu[i][j] * BigRational::from_integer(x[j].clone());
        }
    }
    let d = &chol.diag[i];
    let s = floor_sqrt(&(budget / d));
    let lo = (-&center - BigRational::from_integer(&s + 1))
        .ceil()
        .to_integer();
    let hi = (-&center + BigRational::from_integer(&s + 1))
        .floor()
        .to_integer();
    let mut xi = lo;
    while xi <= hi {
        let t = BigRational::from_integer(xi.clone()) + &center;
        let used = d * &t * &t;
        if &used <= budget {
            if xi.abs() > *coeff_bound {
                return Err(LatticeError::Capacity(format!(
                    "a coordinate of size {xi} exceeds the coefficient bound {coeff_bound}"
                )));
            }
            x[i] = xi.clone();
            descend(chol, i, &(budget - used), x, coeff_bound, out)?;
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
    Ok(())
}

/// All vectors of norm `m` in a definite lattice. The search is complete;
/// `coeff_bound` only caps the coordinates the caller is willing to see, and
/// exceeding it is an error rather than a silent truncation.
pub fn vectors_of_norm(
    lattice: &QuadLattice,
    m: &BigInt,
    coeff_bound: &BigInt,
) -> Result<VectorSet> {
    let (pos, neg) = lattice.signature();
    let mut vectors = if neg == 0 {
        enumerate_positive(lattice.gram(), m, coeff_bound)?
    } else if pos == 0 {
        enumerate_positive(&lattice.gram().neg(), &-m, coeff_bound)?
    } else {
        return Err(LatticeError::domain(
            "vectors_of_norm needs a definite lattice",
        ));
    };
    sort_canonical(&mut vectors);
    Ok(VectorSet {
        norm: m.clone(),
        vectors,
    })
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Candidate {
    coords: Vec<BigInt>,
    /// `G₂ · coords`
    paired: Vec<BigInt>,
}

/// Backtracking over columns: column `j` of `g` is drawn from `candidates[j]`
/// and must pair with earlier columns as `G₁` prescribes.
fn column_search(
    target: &IntMatrix,
    candidates: &[&[Candidate]],
    chosen: &mut Vec<usize>,
    accept: &mut dyn FnMut(&[Vec<BigInt>]) -> bool,
) -> Option<Vec<Vec<BigInt>>> {
    let j = chosen.len();
    if j == target.rows() {
        let cols: Vec<Vec<BigInt>> = chosen
            .iter()
            .enumerate()
            .map(|(c, &k)| candidates[c][k].coords.clone())
            .collect();
        return accept(&cols).then_some(cols);
    }
    for (k, cand) in candidates[j].iter().enumerate() {
        let ok = chosen
            .iter()
            .enumerate()
            .all(|(i, &ki)| dot(&candidates[i][ki].coords, &cand.paired) == target[(i, j)]);
        if !ok {
            continue;
        }
        chosen.push(k);
        if let Some(found) = column_search(target, candidates, chosen, accept) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

fn as_candidates(l2: &QuadLattice, vectors: Vec<LatticeVector>) -> Result<Vec<Candidate>> {
    vectors
        .into_iter()
        .map(|v| {
            Ok(Candidate {
                paired: l2.pairing_vector(&v)?,
                coords: v.0,
            })
        })
        .collect()
}

fn verified_isometry(
    l1: &QuadLattice,
    l2: &QuadLattice,
    cols: Vec<Vec<BigInt>>,
) -> Result<IntMatrix> {
    let g = IntMatrix::from_columns(&cols)?;
    let pulled = g.congruence(l2.gram())?;
    assert_eq!(
        &pulled,
        l1.gram(),
        "isometry search returned a non-isometry"
    );
    Ok(g)
}

/// An isometry `g` with `gᵀ · G₂ · g = G₁` between definite lattices, or `None`
/// when none exists.
pub fn is_isometric_definite(
    l1: &QuadLattice,
    l2: &QuadLattice,
    max_rank: usize,
) -> Result<Option<IntMatrix>> {
    if !l1.is_definite() || !l2.is_definite() {
        return Err(LatticeError::domain(
            "isometry search needs definite lattices",
        ));
    }
    let n = l1.rank();
    if n > max_rank {
        return Err(LatticeError::Capacity(format!(
            "rank {n} exceeds the isometry search bound {max_rank}"
        )));
    }
    if l2.rank() != n || l1.signature() != l2.signature() || l1.det() != l2.det() {
        return Ok(None);
    }
    let no_cap = vector_cap(l1);
    let mut by_norm: BTreeMap<BigInt, Vec<Candidate>> = BTreeMap::new();
    for j in 0..n {
        let m = l1.entry(j, j).clone();
        if let std::collections::btree_map::Entry::Vacant(slot) = by_norm.entry(m) {
            let vs = vectors_of_norm(l2, slot.key(), &no_cap)?;
            slot.insert(as_candidates(l2, vs.vectors)?);
        }
    }
    let candidates: Vec<&[Candidate]> =
        (0..n).map(|j| by_norm[l1.entry(j, j)].as_slice()).collect();
    let found = column_search(l1.gram(), &candidates, &mut Vec::new(), &mut |_| true);
    found
        .map(|cols| verified_isometry(l1, l2, cols))
        .transpose()
}

/// A coefficient cap large enough never to trigger for definite searches.
fn vector_cap(l: &QuadLattice) -> BigInt {
    let mut s = BigInt::one();
    for i in 0..l.rank() {
        s += l.entry(i, i).abs();
    }
    s * l.det().abs() * 1000
}

/// Bounded search for an isometry `g: L₁ → L₂` with `g · λ₁ = λ₂`, using
/// columns with entries in `[−bound, bound]`. Works for indefinite lattices;
/// `None` is inconclusive there.
pub fn pointed_isometry_in_box(
    l1: &QuadLattice,
    point1: &LatticeVector,
    l2: &QuadLattice,
    point2: &LatticeVector,
    bound: i64,
) -> Result<Option<IntMatrix>> {
    let n = l1.rank();
    if l2.rank() != n {
        return Ok(None);
    }
    let side = (2 * bound + 1) as u64;
    let size = side.checked_pow(n as u32).filter(|&s| s <= 2_000_000);
    let Some(size) = size else {
        return Err(LatticeError::Capacity(format!(
            "box of side {side} in rank {n} is too large"
        )));
    };
    let mut by_norm: BTreeMap<BigInt, Vec<LatticeVector>> = BTreeMap::new();
    for j in 0..n {
        by_norm.entry(l1.entry(j, j).clone()).or_default();
    }
    for idx in 0..size {
        let mut rest = idx;
        let coords: Vec<BigInt> = (0..n)
            .map(|_| {
                let c = (rest % side) as i64 - bound;
                rest /= side;
                BigInt::from(c)
            })
            .collect();
        let v = LatticeVector(coords);
        let norm = l2.norm(&v)?;
        if let Some(bucket) = by_norm.get_mut(&norm) {
            bucket.push(v);
        }
    }
    let by_norm: BTreeMap<BigInt, Vec<Candidate>> = by_norm
        .into_iter()
        .map(|(k, mut vs)| {
            sort_canonical(&mut vs);
            as_candidates(l2, vs).map(|c| (k, c))
        })
        .collect::<Result<_>>()?;
    let candidates: Vec<&[Candidate]> =
        (0..n).map(|j| by_norm[l1.entry(j, j)].as_slice()).collect();
    let mut accept = |cols: &[Vec<BigInt>]| {
        let image: Vec<BigInt> = (0..n)
            .map(|r| (0..n).map(|c| &cols[c][r] * &point1.0[c]).sum())
            .collect();
        if image != point2.0 {
            return false;
        }
        IntMatrix::from_columns(cols).is_ok_and(|g| g.det().abs().is_one())
    };
    let found = column_search(l1.gram(), &candidates, &mut Vec::new(), &mut accept);
    found
        .map(|cols| verified_isometry(l1, l2, cols))
        .transpose()
}

/// Outcome of [`find_vector_norm_prime_to_p`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeToPSearch {
    Found {
        vector: LatticeVector,
        norm: BigInt,
    },
    /// Every vector has norm divisible by `p`.
    Absent,
}

/// A vector `w` with `p ∤ w²`.
///
/// The search is decisive: for odd `p` the form mod p vanishes identically
/// iff `G ≡ 0 (mod p)`, and otherwise some `eᵢ` or `eᵢ + eⱼ` works; for `p = 2`,
/// `x² ≡ Σ Gᵢᵢ xᵢ² (mod 2)`. Witnesses therefore have coordinates in `{0, 1}`,
/// well inside any `search_bound ≥ 1`.
pub fn find_vector_norm_prime_to_p(
    lattice: &QuadLattice,
    p: &BigInt,
    search_bound: u64,
) -> Result<PrimeToPSearch> {
    crate::arith::require_prime(p)?;
    if search_bound == 0 {
        return Err(LatticeError::invalid("search bound must be at least 1"));
    }
    let n = lattice.rank();
    let divisible = |x: &BigInt| (x % p).is_zero();
    let found = |v: LatticeVector| -> Result<PrimeToPSearch> {
        let norm = lattice.norm(&v)?;
        debug_assert!(!divisible(&norm));
        Ok(PrimeToPSearch::Found { vector: v, norm })
    };
    for i in 0..n {
        if !divisible(lattice.entry(i, i)) {
            return found(LatticeVector::unit(n, i));
        }
    }
    if p.to_u32() == Some(2) {
        return Ok(PrimeToPSearch::Absent);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !divisible(lattice.entry(i, j)) {
                return found(LatticeVector::unit(n, i).add(&LatticeVector::unit(n, j)));
            }
        }
    }
    Ok(PrimeToPSearch::Absent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big;
    use crate::lattice::{make_e8, make_rank1, make_u};

    fn cap() -> BigInt {
        big(1000)
    }

    #[test]
    fn e8_roots() {
        let roots = vectors_of_norm(&make_e8(), &big(-2), &cap()).unwrap();
        assert_eq!(roots.len(), 240);
        let e8 = make_e8();
        for v in &roots.vectors {
            assert_eq!(e8.norm(v).unwrap(), big(-2));
        }
        assert!(vectors_of_norm(&make_e8(), &big(2), &cap())
            .unwrap()
            .is_empty());
        assert_eq!(
            vectors_of_norm(&make_e8(), &big(0), &cap()).unwrap().len(),
            1
        );
    }

    #[test]
    fn rank_one() {
        let l = make_rank1(2).unwrap();
        let vs = vectors_of_norm(&l, &big(2), &cap()).unwrap();
        assert_eq!(
            vs.vectors,
            vec![
                LatticeVector::from_i64(&[1]),
                LatticeVector::from_i64(&[-1])
            ]
        );
        assert!(vectors_of_norm(&l, &big(3), &cap()).unwrap().is_empty());
        assert!(vectors_of_norm(&make_u(), &big(2), &cap()).is_err());
    }

    #[test]
    fn coefficient_cap_is_an_error() {
        let l = make_rank1(1).unwrap();
        assert!(matches!(
            vectors_of_norm(&l, &big(100), &big(5)),
            Err(LatticeError::Capacity(_))
        ));
        assert_eq!(vectors_of_norm(&l, &big(100), &big(10)).unwrap().len(), 2);
    }

    #[test]
    fn isometry_examples() {
        let a = QuadLattice::from_i64(&[&[2, 0], &[0, 2]]).unwrap();
        let b = QuadLattice::from_i64(&[&[2, 0], &[0, 8]]).unwrap();
        assert!(is_isometric_definite(&a, &b, 8).unwrap().is_none());
        // ⟨2⟩ ⊕ ⟨8⟩ vs [[4,2],[2,5]]: both det 16, but the second has no vector of norm 2
        let c = QuadLattice::from_i64(&[&[4, 2], &[2, 5]]).unwrap();
        assert!(is_isometric_definite(&b, &c, 8).unwrap().is_none());
        // a base change of ⟨2⟩ ⊕ ⟨8⟩ is found again
        let h = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let d = b.change_basis(&h).unwrap();
        let g = is_isometric_definite(&b, &d, 8).unwrap().unwrap();
        assert_eq!(&g.congruence(d.gram()).unwrap(), b.gram());
    }

    #[test]
    fn prime_to_p_search() {
        match find_vector_norm_prime_to_p(&make_u(), &big(5), 1).unwrap() {
            PrimeToPSearch::Found { norm, .. } => assert!(!(norm % big(5)).is_zero()),
            PrimeToPSearch::Absent => panic!("U has norm-2 vectors"),
        }
        let scaled = make_rank1(7).unwrap();
        assert_eq!(
            find_vector_norm_prime_to_p(&scaled, &big(7), 10).unwrap(),
            PrimeToPSearch::Absent
        );
        assert_eq!(
            find_vector_norm_prime_to_p(&make_u(), &big(2), 10).unwrap(),
            PrimeToPSearch::Absent
        );
        assert!(find_vector_norm_prime_to_p(&make_u(), &big(5), 0).is_err());
    }

    #[test]
    fn pointed_box_search() {
        let uu = make_u().direct_sum(&make_u());
        let a = LatticeVector::from_i64(&[1, 1, 0, 0]);
        let b = LatticeVector::from_i64(&[0, 0, 1, 1]);
        let g = pointed_isometry_in_box(&uu, &a, &uu, &b, 1)
            .unwrap()
            .unwrap();
        assert!(uu.is_isometry(&g));
        assert_eq!(g.mul_vec(&a.0).unwrap(), b.0);
        // different norms can never be matched
        let c = LatticeVector::from_i64(&[1, 2, 0, 0]);
        assert!(pointed_isometry_in_box(&uu, &a, &uu, &c, 1)
            .unwrap()
            .is_none());
    }
}
