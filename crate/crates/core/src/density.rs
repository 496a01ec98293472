//! Splitting of primes in imaginary quadratic fields and prime densities.
//!
//! Dirichlet densities of the Chebotarev sets involved here agree with natural
//! densities, so they are estimated by sieving and counting.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::arith::is_prime_u64;
use crate::error::{LatticeError, Result};

/// Smallest sieve bound accepted by [`empirical_density`].
pub const MIN_DENSITY_BOUND: u64 = 100;

/// Kronecker symbol `(a | n)`, `n ≠ 0`.
pub fn kronecker_symbol(a: i64, n: i64) -> Result<i8> {
    if n == 0 {
        return Err(LatticeError::invalid(
            "Kronecker symbol (a | 0) is not supported",
        ));
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut sign: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        n >>= twos;
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol for odd n > 0
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Squarefree kernel of `d > 0`.
fn squarefree_part(mut d: u64) -> u64 {
    let mut out = 1;
    let mut f = 2;
    while f * f <= d {
        let mut e = 0;
        while d.is_multiple_of(f) {
            d /= f;
            e += 1;
        }
        if e % 2 == 1 {
            out *= f;
        }
        f += 1;
    }
    out * d
}

/// Discriminant of `Q(√−d)`: `−d₀` if `−d₀ ≡ 1 (mod 4)`, else `−4d₀`, with `d₀`
/// the squarefree part of `d`.
pub fn field_discriminant(d: u64) -> Result<i64> {
    if d == 0 {
        return Err(LatticeError::invalid("Q(√−d) needs d > 0"));
    }
    let d0 = squarefree_part(d) as i64;
    Ok(if (-d0).rem_euclid(4) == 1 {
        -d0
    } else {
        -4 * d0
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl Splitting {
    pub fn as_str(self) -> &'static str {
        match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
        }
    }
}

/// Decomposition of `p` in `Q(√−d)`.
pub fn splitting_type(p: u64, d: u64) -> Result<Splitting> {
    if !is_prime_u64(p) {
        return Err(LatticeError::invalid(format!("{p} is not prime")));
    }
    let disc = field_discriminant(d)?;
    Ok(splitting_with_disc(p, disc))
}

fn splitting_with_disc(p: u64, disc: i64) -> Splitting {
    match kronecker_symbol(disc, p as i64).expect("p ≠ 0") {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

/// `p` inert in `Q(√−d)`; ramified primes give `false` (see [`splitting_type`]).
pub fn is_inert(p: u64, d: u64) -> Result<bool> {
    Ok(splitting_type(p, d)? == Splitting::Inert)
}

/// The Fermat cubic fourfold has supersingular reduction at `p ≠ 3` iff
/// `p ≡ 2 (mod 3)`, equivalently iff `p` is inert in `Q(√−3)`.
pub fn fermat_cubic_supersingular(p: u64) -> Result<bool> {
    if !is_prime_u64(p) {
        return Err(LatticeError::invalid(format!("{p} is not prime")));
    }
    if p == 3 {
        return Err(LatticeError::domain(
            "the Fermat cubic has bad reduction at 3",
        ));
    }
    let by_residue = p % 3 == 2;
    debug_assert_eq!(by_residue, is_inert(p, 3).unwrap());
    Ok(by_residue)
}

/// Density `1 − 2^{−r}` of primes inert in at least one of `Q(√−d)`, `d ∈ Π`,
/// for `r` distinct primes `d`.
pub fn union_inert_density(primes: &[u64]) -> Result<BigRational> {
    if primes.is_empty() {
        return Err(LatticeError::invalid("empty prime set"));
    }
    let distinct: BTreeSet<u64> = primes.iter().copied().collect();
    if distinct.len() != primes.len() {
        return Err(LatticeError::invalid("prime set has repeated entries"));
    }
    if let Some(bad) = primes.iter().find(|&&p| !is_prime_u64(p)) {
        return Err(LatticeError::invalid(format!("{bad} is not prime")));
    }
    let r = primes.len();
    let denom = BigInt::one() << r;
    Ok(BigRational::new(&denom - 1, denom))
}

fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Density of primes inert in at least one of the fields `Q(√−d)`, `d ∈ ds`,
/// for arbitrary positive `d`.
///
/// A prime avoids inertness in every field iff it splits completely in the
/// compositum, of degree `2^k` where `k` is the rank of the classes `−d` in
/// `Q*/Q*²`; hence `1 − 2^{−k}`. For distinct primes this is
/// [`union_inert_density`].
pub fn inert_union_theoretical(ds: &[u64]) -> Result<BigRational> {
    if ds.is_empty() {
        return Err(LatticeError::invalid("empty list of fields"));
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut rows: Vec<BTreeSet<usize>> = Vec::new();
    for &d in ds {
        field_discriminant(d)?;
        // coordinate 0 is the sign, coordinate i > 0 the i-th prime seen
        let mut row = BTreeSet::from([0usize]);
        for q in prime_factors_u64(squarefree_part(d)) {
            let idx = match primes.iter().position(|&x| x == q) {
                Some(i) => i,
                None => {
                    primes.push(q);
                    primes.len() - 1
                }
            };
            row.insert(idx + 1);
        }
        rows.push(row);
    }
    // Gaussian elimination over F2 on sparse rows
    let mut pivots: Vec<BTreeSet<usize>> = Vec::new();
    for mut row in rows {
        for pivot in &pivots {
            let lead = *pivot.iter().next().expect("nonempty pivot");
            if row.contains(&lead) {
                row = row.symmetric_difference(pivot).copied().collect();
            }
        }
        if !row.is_empty() {
            pivots.push(row);
            pivots.sort_by_key(|r| *r.iter().next().expect("nonempty"));
        }
    }
    let denom = BigInt::one() << pivots.len();
    Ok(BigRational::new(&denom - 1, denom))
}

/// Predicate "inert in some `Q(√−d)`, `d ∈ ds`", with the discriminants
/// computed once up front.
pub fn inert_in_any(ds: &[u64]) -> Result<impl Fn(u64) -> bool + Sync> {
    let discs: Vec<i64> = ds
        .iter()
        .map(|&d| field_discriminant(d))
        .collect::<Result<_>>()?;
    Ok(move |p: u64| {
        discs
            .iter()
            .any(|&disc| splitting_with_disc(p, disc) == Splitting::Inert)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePredicateReport {
    pub bound: u64,
    pub total_primes: u64,
    pub hits: u64,
    pub empirical_density: BigRational,
    pub theoretical_density: Option<BigRational>,
}

impl PrimePredicateReport {
    pub fn deviation(&self) -> Option<f64> {
        use num_traits::ToPrimitive;
        let t = self.theoretical_density.as_ref()?;
        (&self.empirical_density - t).to_f64().map(f64::abs)
    }
}

/// Primes `≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

/// Fraction of primes `p ≤ bound` satisfying `predicate`.
pub fn empirical_density<F>(
    predicate: F,
    bound: u64,
    theoretical: Option<BigRational>,
) -> Result<PrimePredicateReport>
where
    F: Fn(u64) -> bool + Sync,
{
    if bound < MIN_DENSITY_BOUND {
        return Err(LatticeError::invalid(format!(
            "density bound must be at least {MIN_DENSITY_BOUND}, got {bound}"
        )));
    }
    let primes = primes_up_to(bound);
    let hits = primes.par_iter().filter(|&&p| predicate(p)).count() as u64;
    let total = primes.len() as u64;
    Ok(PrimePredicateReport {
        bound,
        total_primes: total,
        hits,
        empirical_density: BigRational::new(hits.into(), total.into()),
        theoretical_density: theoretical,
    })
}
