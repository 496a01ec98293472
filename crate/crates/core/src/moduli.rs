//! Concrete lattices and constants attached to moduli problems: Mukai lattices
//! of K3 surfaces, the primitive cohomology lattice of a cubic fourfold, the
//! Fermat cubic's transcendental lattice, and the Frobenius pairing identity
//! `F(x)·F(y) = p² (x·y)` on a K3 crystal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{require_prime, valuation};
use crate::bb::{degree_to_bb, lambda_n};
use crate::disc::discriminant_group;
use crate::error::{LatticeError, Result};
use crate::lattice::{LatticeVector, QuadLattice};
use crate::matrix::IntMatrix;

/// A Mukai vector `(r, c₁, s)` in `Z ⊕ NS ⊕ Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c1: LatticeVector,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: impl Into<BigInt>, c1: LatticeVector, s: impl Into<BigInt>) -> Self {
        MukaiVector {
            r: r.into(),
            c1,
            s: s.into(),
        }
    }

    /// The vector `(1, 0, 1 − n)` of the Hilbert scheme of `n` points.
    pub fn hilbert_scheme(ns_rank: usize, n: i64) -> Self {
        MukaiVector::new(1, LatticeVector::zero(ns_rank), 1 - n)
    }

    /// Coordinates in the basis `(r, NS, s)` of [`mukai_lattice`].
    pub fn coordinates(&self) -> LatticeVector {
        let mut v = Vec::with_capacity(self.c1.len() + 2);
        v.push(self.r.clone());
        v.extend(self.c1.0.iter().cloned());
        v.push(self.s.clone());
        LatticeVector(v)
    }
}

/// `⟨(a,b,c), (a′,b′,c′)⟩ = b·b′ − a c′ − a′ c`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector, ns: &QuadLattice) -> Result<BigInt> {
    let bb = ns.inner_product(&v.c1, &w.c1)?;
    Ok(bb - &v.r * &w.s - &w.r * &v.s)
}

/// Gram matrix of `Z ⊕ NS ⊕ Z` in the basis `(r, NS, s)`; the outer pair
/// spans a copy of `U(−1)`.
pub fn mukai_lattice(ns: &QuadLattice) -> QuadLattice {
    let n = ns.rank() + 2;
    let mut g = IntMatrix::zeros(n, n).to_rows();
    g[0][n - 1] = BigInt::from(-1);
    g[n - 1][0] = BigInt::from(-1);
    for i in 0..ns.rank() {
        for j in 0..ns.rank() {
            g[i + 1][j + 1] = ns.entry(i, j).clone();
        }
    }
    QuadLattice::new(IntMatrix::from_rows(g).expect("square")).expect("det is −det(NS)")
}

/// Result of [`mukai_perp_disc_check`]. Orders are those of the `p`-parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiPerpReport {
    pub prime: BigInt,
    pub v_squared: BigInt,
    pub perp_rank: usize,
    pub perp_det: BigInt,
    pub perp_disc_p_order: BigInt,
    pub ns_disc_p_order: BigInt,
    pub lints: Vec<String>,
}

fn p_part(det: &BigInt, p: &BigInt) -> BigInt {
    p.pow(valuation(det, p))
}

/// Compares the `p`-part of `disc(v⊥)` with that of `disc(NS)` for `p ∤ v²`.
///
/// Away from `v²` the sum `v⊥ ⊕ Zv` has full index in `N(S)` and `⟨v²⟩` is a
/// `p`-adic unit, so the two orders agree; a mismatch is reported as
/// [`LatticeError::Inconsistent`].
pub fn mukai_perp_disc_check(
    v: &MukaiVector,
    ns: &QuadLattice,
    p: &BigInt,
) -> Result<MukaiPerpReport> {
    require_prime(p)?;
    if v.c1.len() != ns.rank() {
        return Err(LatticeError::DimensionMismatch {
            expected: ns.rank(),
            actual: v.c1.len(),
        });
    }
    let v2 = mukai_pairing(v, v, ns)?;
    if (&v2 % p).is_zero() {
        return Err(LatticeError::domain(format!("{p} divides v² = {v2}")));
    }
    let mukai = mukai_lattice(ns);
    let perp = mukai.orthogonal_complement(&v.coordinates())?.lattice;
    let perp_det = perp.det();
    let report = MukaiPerpReport {
        prime: p.clone(),
        v_squared: v2,
        perp_rank: perp.rank(),
        perp_disc_p_order: p_part(&perp_det, p),
        ns_disc_p_order: p_part(&ns.det(), p),
        perp_det,
        lints: Vec::new(),
    };
    if report.perp_disc_p_order != report.ns_disc_p_order {
        return Err(LatticeError::Inconsistent(format!(
            "|disc(v⊥)_{p}| = {} but |disc(NS)_{p}| = {}",
            report.perp_disc_p_order, report.ns_disc_p_order
        )));
    }
    let mut report = report;
    if mukai.rank() == 24 {
        let bound = p.pow(20u32);
        let verdict = if report.perp_disc_p_order <= bound {
            "holds"
        } else {
            "fails"
        };
        report
            .lints
            .push(format!("rank 24: |disc((v⊥)_{p})| ≤ {p}^20 {verdict}"));
    }
    Ok(report)
}

/// `−A₂`, the rank-two summand with discriminant `Z/3`.
fn negative_a2() -> QuadLattice {
    QuadLattice::from_i64(&[&[-2, -1], &[-1, -2]]).expect("det 3")
}

/// Primitive middle cohomology of a cubic fourfold, `U² ⊕ E8² ⊕ A₂(−1)`,
/// signature `(2, 20)`.
pub fn cubic_primitive_lattice() -> QuadLattice {
    let u = QuadLattice::hyperbolic_plane();
    let e8 = QuadLattice::e8();
    u.direct_sum(&u)
        .direct_sum(&e8)
        .direct_sum(&e8)
        .direct_sum(&negative_a2())
}

/// `−[[6,3],[3,6]]`
pub fn fermat_transcendental_lattice() -> QuadLattice {
    QuadLattice::from_i64(&[&[-6, -3], &[-3, -6]]).expect("det 27")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelJacobiConstants {
    /// `h⁴` on the cubic fourfold
    pub h4: BigInt,
    /// `q(g)` on the Fano variety of lines
    pub g_bb: BigInt,
    /// `g⁴`
    pub g4: BigInt,
}

/// The degrees `h⁴ = 3`, `q(g) = 6`, `g⁴ = 108`, with `g⁴ = λ₂ q(g)²` and the
/// inverse `degree_to_bb(108, 2) = 6` both checked.
pub fn abel_jacobi_constants() -> Result<AbelJacobiConstants> {
    let c = AbelJacobiConstants {
        h4: BigInt::from(3),
        g_bb: BigInt::from(6),
        g4: BigInt::from(108),
    };
    if lambda_n(2) * &c.g_bb * &c.g_bb != c.g4 {
        return Err(LatticeError::Inconsistent("g⁴ ≠ λ₂ q(g)²".into()));
    }
    let recovered = degree_to_bb(&c.g4, 2)?;
    if recovered.exact() != Some(&BigRational::from_integer(c.g_bb.clone())) {
        return Err(LatticeError::Inconsistent(format!(
            "degree 108 recovers {recovered:?}, not 6"
        )));
    }
    Ok(c)
}

/// Where the degree-6 polarization of `Λ₂` sits relative to the cubic lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicComparison {
    pub point: LatticeVector,
    pub point_norm: BigInt,
    pub divisibility: BigInt,
    pub complement_signature: (usize, usize),
    pub complement_det: BigInt,
    pub complement_invariant_factors: Vec<BigInt>,
    pub cubic_signature: (usize, usize),
    pub cubic_invariant_factors: Vec<BigInt>,
}

/// Computes `g⊥ ⊂ Λ₂` for `g = 2e + 2f + δ` (norm 6, divisibility 2) next to
/// the cubic lattice. No isometry between the two is claimed.
pub fn cubic_lambda2_comparison() -> Result<CubicComparison> {
    let lambda2 = QuadLattice::lambda(2)?;
    let mut coords = vec![BigInt::zero(); lambda2.rank()];
    coords[0] = BigInt::from(2);
    coords[1] = BigInt::from(2);
    coords[lambda2.rank() - 1] = BigInt::one();
    let point = LatticeVector(coords);
    let complement = lambda2.orthogonal_complement(&point)?.lattice;
    let cubic = cubic_primitive_lattice();
    Ok(CubicComparison {
        point_norm: lambda2.norm(&point)?,
        divisibility: lambda2.divisibility(&point)?,
        point,
        complement_signature: complement.signature(),
        complement_det: complement.det(),
        complement_invariant_factors: discriminant_group(&complement).invariant_factors().to_vec(),
        cubic_signature: cubic.signature(),
        cubic_invariant_factors: discriminant_group(&cubic).invariant_factors().to_vec(),
    })
}

/// Frobenius `F` on a free module over `Z_p` with pairing `G`, base field `F_p`
/// (so the semilinear twist is the identity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusPairingInstance {
    pub frobenius: IntMatrix,
    pub gram: IntMatrix,
    pub prime: BigInt,
}

/// Checks `Fᵀ G F = p² G`.
pub fn check_k3_crystal_pairing(inst: &FrobeniusPairingInstance) -> Result<bool> {
    require_prime(&inst.prime)?;
    let lattice = QuadLattice::new(inst.gram.clone())?;
    let f = &inst.frobenius;
    if !f.is_square() || f.rows() != lattice.rank() {
        return Err(LatticeError::DimensionMismatch {
            expected: lattice.rank(),
            actual: f.rows(),
        });
    }
    let pulled = f.congruence(&inst.gram)?;
    let p2 = &inst.prime * &inst.prime;
    Ok(pulled == inst.gram.scale(&p2))
}
