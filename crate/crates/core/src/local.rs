//! p-adic invariants: odd-p Jordan decompositions, self-duality, pointed
//! lattice invariants and Artin invariants of supersingular Tate lattices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{legendre, prime_divisors, require_prime, valuation};
use crate::disc::{
    discriminant_group, forms_isomorphic, FiniteQuadraticForm, DEFAULT_ENUMERATION_LIMIT,
};
use crate::error::{LatticeError, Result};
use crate::lattice::{LatticeVector, QuadLattice};
use crate::matrix::{smith_normal_form, IntMatrix};

/// Extra p-adic digits carried beyond `v_p(det)` when no precision is given.
pub const DEFAULT_EXTRA_PRECISION: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JordanBlock {
    /// the block is `p^scale` times a unimodular form
    pub scale: u32,
    pub rank: usize,
    /// Legendre symbol of the unit part of the block determinant
    pub det_class: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JordanDecomposition {
    pub prime: BigInt,
    /// ascending by scale
    pub blocks: Vec<JordanBlock>,
}

impl JordanDecomposition {
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank).sum()
    }

    /// `Σ scale · rank`, which equals `v_p(det)`.
    pub fn det_valuation(&self) -> u64 {
        self.blocks
            .iter()
            .map(|b| b.scale as u64 * b.rank as u64)
            .sum()
    }
}

fn val_mod(x: &BigInt, p: &BigInt, cap: u32) -> u32 {
    if x.is_zero() {
        cap
    } else {
        valuation(x, p).min(cap)
    }
}

fn mod_inverse(u: &BigInt, m: &BigInt) -> BigInt {
    let e = u.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Diagonalizes over `Z/p^precision` into `p^k`-scaled unimodular blocks.
/// `precision` defaults to `v_p(det) + 4` and must be at least `v_p(det) + 2`.
pub fn jordan_decomposition(
    lattice: &QuadLattice,
    prime: &BigInt,
    precision: Option<u32>,
) -> Result<JordanDecomposition> {
    require_prime(prime)?;
    if prime == &BigInt::from(2) {
        return Err(LatticeError::UnsupportedPrime(
            "2 (dyadic Jordan decompositions are not supported)".into(),
        ));
    }
    let det_val = valuation(&lattice.det(), prime);
    let precision = precision.unwrap_or(det_val + DEFAULT_EXTRA_PRECISION);
    if precision < det_val + 2 {
        return Err(LatticeError::invalid(format!(
            "precision {precision} is below v_p(det) + 2 = {}",
            det_val + 2
        )));
    }
    let modulus = prime.pow(precision);
    let n = lattice.rank();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| lattice.entry(i, j).mod_floor(&modulus))
                .collect()
        })
        .collect();

    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<(u32, BigInt)> = Vec::with_capacity(n);
    while !active.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for &i in &active {
            for &j in &active {
                let v = val_mod(&a[i][j], prime, precision);
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best.expect("active set is nonempty");
        if v >= precision {
            return Err(LatticeError::invalid(format!(
                "precision {precision} exhausted during diagonalization"
            )));
        }
        let k = if i == j {
            i
        } else {
            // e_i ← e_i + e_j; p odd so the new diagonal entry has valuation v
            for t in 0..n {
                let s = (&a[i][t] + &a[j][t]).mod_floor(&modulus);
                a[i][t] = s;
            }
            for t in 0..n {
                let s = (&a[t][i] + &a[t][j]).mod_floor(&modulus);
                a[t][i] = s;
            }
            i
        };
        let pv = prime.pow(v);
        let unit = (&a[k][k] / &pv).mod_floor(&modulus);
        let inv = mod_inverse(&unit, &modulus);
        active.retain(|&t| t != k);
        for &r in &active {
            if a[r][k].is_zero() {
                continue;
            }
            let f = ((&a[r][k] / &pv) * &inv).mod_floor(&modulus);
            for &c in &active {
                let s = (&a[r][c] - &f * &a[k][c]).mod_floor(&modulus);
                a[r][c] = s;
            }
        }
        for &r in &active {
            a[r][k] = BigInt::zero();
            a[k][r] = BigInt::zero();
        }
        pivots.push((v, unit));
    }

    let mut grouped: BTreeMap<u32, (usize, BigInt)> = BTreeMap::new();
    for (v, u) in pivots {
        let e = grouped.entry(v).or_insert((0, BigInt::one()));
        e.0 += 1;
        e.1 = (&e.1 * u).mod_floor(prime);
    }
    Ok(JordanDecomposition {
        prime: prime.clone(),
        blocks: grouped
            .into_iter()
            .map(|(scale, (rank, unit))| JordanBlock {
                scale,
                rank,
                det_class: legendre(&unit, prime),
            })
            .collect(),
    })
}

pub fn is_selfdual_at_p(lattice: &QuadLattice, prime: &BigInt) -> Result<bool> {
    require_prime(prime)?;
    Ok(valuation(&lattice.det(), prime) == 0)
}

/// Whether a verdict rests on a certified hyperbolic summand or on the caller's word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// at least two hyperbolic planes are recorded in the lattice's block lineage
    Certified,
    /// the `U ⊕ U` summand could not be verified from the lineage
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualifiedVerdict {
    pub equivalent: bool,
    pub certification: Certification,
}

fn certification(lattice: &QuadLattice) -> Certification {
    if lattice.certified_hyperbolic_summands() >= 2 {
        Certification::Certified
    } else {
        Certification::Assumed
    }
}

/// `(Λ, λ) ≅ (Λ, λ′)` over `Z_p` for primitive vectors, given `U ⊕ U ⊆ Λ`:
/// decided by `λ² = λ′²`.
pub fn zp_pointed_equivalent(
    lattice: &QuadLattice,
    point: &LatticeVector,
    other: &LatticeVector,
    prime: &BigInt,
) -> Result<QualifiedVerdict> {
    require_prime(prime)?;
    if !lattice.is_primitive(point)? || !lattice.is_primitive(other)? {
        return Err(LatticeError::domain("pointed vectors must be primitive"));
    }
    if prime == &BigInt::from(2) && !lattice.is_even() {
        return Err(LatticeError::domain("p = 2 requires an even lattice"));
    }
    Ok(QualifiedVerdict {
        equivalent: lattice.norm(point)? == lattice.norm(other)?,
        certification: certification(lattice),
    })
}

/// Local data of one lattice: odd-prime Jordan decompositions where it is
/// not unimodular, plus its 2-primary discriminant form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub det: BigInt,
    pub odd: BTreeMap<BigInt, JordanDecomposition>,
    pub two_part: FiniteQuadraticForm,
}

impl LocalData {
    pub fn of(lattice: &QuadLattice) -> Result<Self> {
        let det = lattice.det();
        let mut odd = BTreeMap::new();
        for p in prime_divisors(&det) {
            if p != BigInt::from(2) {
                odd.insert(p.clone(), jordan_decomposition(lattice, &p, None)?);
            }
        }
        let two_part = discriminant_group(lattice).local_part(&BigInt::from(2))?;
        Ok(LocalData { det, odd, two_part })
    }

    pub fn matches(&self, other: &LocalData) -> Result<bool> {
        Ok(self.det == other.det
            && self.odd == other.odd
            && forms_isomorphic(&self.two_part, &other.two_part, DEFAULT_ENUMERATION_LIMIT)?)
    }
}

/// Invariants of a primitively pointed lattice.
///
/// Besides the complement `λ⊥` this also records the ambient lattice's local
/// data and the divisibility of `λ`, both of which are isomorphism invariants
/// of the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedInvariants {
    pub signature: (usize, usize),
    pub point_norm: BigInt,
    pub divisibility: BigInt,
    pub complement: LocalData,
    pub ambient: LocalData,
    pub certification: Certification,
}

impl PointedInvariants {
    /// Equality of invariant tuples; 2-parts are compared up to isomorphism.
    pub fn matches(&self, other: &PointedInvariants) -> Result<bool> {
        Ok(self.signature == other.signature
            && self.point_norm == other.point_norm
            && self.divisibility == other.divisibility
            && self.ambient.matches(&other.ambient)?
            && self.complement.matches(&other.complement)?)
    }
}

pub fn pointed_invariants(
    lattice: &QuadLattice,
    point: &LatticeVector,
) -> Result<PointedInvariants> {
    if !lattice.is_primitive(point)? {
        return Err(LatticeError::domain("pointed vector must be primitive"));
    }
    let point_norm = lattice.norm(point)?;
    let complement = lattice.orthogonal_complement(point)?;
    Ok(PointedInvariants {
        signature: lattice.signature(),
        point_norm,
        divisibility: lattice.divisibility(point)?,
        complement: LocalData::of(&complement.lattice)?,
        ambient: LocalData::of(lattice)?,
        certification: certification(lattice),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinResult {
    pub prime: BigInt,
    pub sigma: usize,
    pub superspecial: bool,
    /// Basis of the radical of the form mod p (the `p T₀` part), `2σ` vectors.
    pub t0_basis: Vec<LatticeVector>,
    /// Completion to a basis mod p (the `T₁` part), where the form is perfect mod p.
    pub t1_basis: Vec<LatticeVector>,
    pub lints: Vec<String>,
}

/// Bound on σ for a rank-23 lattice that is self-dual at p after embedding.
const RANK23_SIGMA_BOUND: usize = 11;

pub fn artin_invariant(lattice: &QuadLattice, prime: &BigInt) -> Result<ArtinResult> {
    require_prime(prime)?;
    let snf = smith_normal_form(lattice.gram());
    let mut count = 0usize;
    for d in &snf.diagonal {
        if d.is_multiple_of(prime) {
            if valuation(d, prime) > 1 {
                return Err(LatticeError::Structure(format!(
                    "discriminant at {prime} is not elementary abelian (invariant factor {d})"
                )));
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(LatticeError::Structure(format!(
            "discriminant at {prime} is trivial; the Artin invariant needs σ ≥ 1"
        )));
    }
    if count % 2 == 1 {
        return Err(LatticeError::Structure(format!(
            "discriminant at {prime} has odd rank {count}"
        )));
    }
    let sigma = count / 2;

    let t0 = fp_kernel(lattice.gram(), prime);
    if t0.len() != count {
        return Err(LatticeError::Inconsistent(format!(
            "radical mod {prime} has dimension {}, expected {count}",
            t0.len()
        )));
    }
    let t1 = complete_basis(&t0, lattice.rank(), prime);
    let t1_cols: Vec<Vec<BigInt>> = t1.iter().map(|v| v.0.clone()).collect();
    if !t1_cols.is_empty() {
        let restricted = IntMatrix::from_columns(&t1_cols)?.congruence(lattice.gram())?;
        if restricted.det().is_multiple_of(prime) {
            return Err(LatticeError::Inconsistent(
                "complement of the radical is not perfect mod p".into(),
            ));
        }
    }

    let mut lints = Vec::new();
    if lattice.rank() == 23 && sigma > RANK23_SIGMA_BOUND {
        lints.push(format!(
            "σ = {sigma} exceeds {RANK23_SIGMA_BOUND}, impossible for a rank-23 lattice that is self-dual at {prime} after embedding"
        ));
    }
    Ok(ArtinResult {
        prime: prime.clone(),
        sigma,
        superspecial: sigma == 1,
        t0_basis: t0,
        t1_basis: t1,
        lints,
    })
}

/// Kernel of a square matrix over `F_p`, lifted to integer vectors in `[0, p)`.
pub(crate) fn fp_kernel(m: &IntMatrix, prime: &BigInt) -> Vec<LatticeVector> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..cols).map(|j| m[(i, j)].mod_floor(prime)).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = mod_inverse(&a[r][c], prime);
        for x in a[r].iter_mut() {
            *x = (&*x * &inv).mod_floor(prime);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = (&a[i][j] - &f * &a[r][j]).mod_floor(prime);
                    a[i][j] = v;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigInt::zero(); cols];
            v[f] = BigInt::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (-&a[row][f]).mod_floor(prime);
            }
            LatticeVector(v)
        })
        .collect()
}

fn fp_rank(vectors: &[Vec<BigInt>], prime: &BigInt) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = IntMatrix::from_columns(vectors).expect("equal-length vectors");
    m.cols() - fp_kernel(&m, prime).len()
}

/// Standard basis vectors extending `basis` to a basis of `F_p^n`.
fn complete_basis(basis: &[LatticeVector], n: usize, prime: &BigInt) -> Vec<LatticeVector> {
    let mut current: Vec<Vec<BigInt>> = basis.iter().map(|v| v.0.clone()).collect();
    let mut added = Vec::new();
    for i in 0..n {
        if current.len() == n {
            break;
        }
        let e = LatticeVector::unit(n, i);
        current.push(e.0.clone());
        if fp_rank(&current, prime) == current.len() {
            added.push(e);
        } else {
            current.pop();
        }
    }
    added
}
