//! The Beauville–Bogomolov form and the `2n`-fold symmetric form it generates.
//!
//! A symmetric bilinear `q` determines a symmetric `2n`-linear `w` by averaging
//! over all `(2n)!` orderings; each perfect matching of the slots is hit
//! `n!·2ⁿ` times, so `w` is the sum over the `λₙ = (2n)!/(2ⁿ n!)` perfect
//! matchings of the product of paired `q`-values. Conversely `q` is recovered
//! from `w` and a vector `ξ` with `q(ξ,ξ) ≠ 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{LatticeError, Result};

pub type RatVector = Vec<BigRational>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// `λₙ = (2n)!/(2ⁿ n!) = 1·3·5·…·(2n−1)`.
pub fn lambda_n(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(2 * k - 1))
}

/// Evaluates a symmetric bilinear form given by a rational Gram matrix.
pub fn bilinear(q: &RatMatrix, x: &[BigRational], y: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                acc += xi * &q[i][j] * yj;
            }
        }
    }
    acc
}

fn check_form(q: &RatMatrix) -> Result<usize> {
    let r = q.len();
    for (i, row) in q.iter().enumerate() {
        if row.len() != r {
            return Err(LatticeError::DimensionMismatch {
                expected: r,
                actual: row.len(),
            });
        }
        for j in 0..i {
            if q[i][j] != q[j][i] {
                return Err(LatticeError::invalid("bilinear form is not symmetric"));
            }
        }
    }
    Ok(r)
}

/// `w` generated by a symmetric form `q` in `2n` slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricPowerForm {
    base: RatMatrix,
    degree: u32,
}

impl SymmetricPowerForm {
    pub fn new(base: RatMatrix, degree: u32) -> Result<Self> {
        check_form(&base)?;
        if degree == 0 {
            return Err(LatticeError::domain("degree n must be at least 1"));
        }
        Ok(SymmetricPowerForm { base, degree })
    }

    pub fn base(&self) -> &RatMatrix {
        &self.base
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn evaluate(&self, args: &[RatVector]) -> Result<BigRational> {
        w_from_q(&self.base, self.degree, args)
    }
}

/// `w(α₁, …, α₂ₙ)` as a sum over perfect matchings of the slots.
pub fn w_from_q(q: &RatMatrix, n: u32, args: &[RatVector]) -> Result<BigRational> {
    let r = check_form(q)?;
    if args.len() != 2 * n as usize {
        return Err(LatticeError::invalid(format!(
            "w of degree {n} takes {} arguments, got {}",
            2 * n,
            args.len()
        )));
    }
    for a in args {
        if a.len() != r {
            return Err(LatticeError::DimensionMismatch {
                expected: r,
                actual: a.len(),
            });
        }
    }
    let k = args.len();
    let mut pairs = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = bilinear(q, &args[i], &args[j]);
            pairs[j][i] = v.clone();
            pairs[i][j] = v;
        }
    }
    let mut used = vec![false; k];
    Ok(matching_sum(&pairs, &mut used))
}

fn matching_sum(pairs: &[Vec<BigRational>], used: &mut [bool]) -> BigRational {
    let Some(first) = used.iter().position(|u| !u) else {
        return BigRational::one();
    };
    used[first] = true;
    let mut total = BigRational::zero();
    for j in first + 1..used.len() {
        if used[j] || pairs[first][j].is_zero() {
            continue;
        }
        used[j] = true;
        total += &pairs[first][j] * matching_sum(pairs, used);
        used[j] = false;
    }
    used[first] = false;
    total
}

/// Recovers the Gram matrix of `q` on `basis` from evaluations of `w`.
///
/// `w` is only ever called on tuples made of copies of `ξ` and basis vectors.
/// The cross terms come from `w(ξ^{2n−1}, α) = λₙ q(ξ,ξ)^{n−1} q(ξ,α)`; the
/// `ξ`-orthogonal block from `w(ξ^{2n−2}, α′, β′) = λ_{n−1} q(α′,β′) q(ξ,ξ)^{n−1}`,
/// expanded multilinearly. The result is then checked against `w` on the
/// tuples `(bᵢⁿ, bⱼⁿ)`; any disagreement is reported as inconsistent.
pub fn q_from_w<F>(
    mut w: F,
    n: u32,
    xi: &[BigRational],
    q_xi: &BigRational,
    basis: &[RatVector],
) -> Result<RatMatrix>
where
    F: FnMut(&[RatVector]) -> Result<BigRational>,
{
    if n == 0 {
        return Err(LatticeError::domain("degree n must be at least 1"));
    }
    if q_xi.is_zero() {
        return Err(LatticeError::Inconsistent(
            "q(ξ, ξ) = 0: the form cannot be recovered from ξ".into(),
        ));
    }
    for b in basis {
        if b.len() != xi.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: xi.len(),
                actual: b.len(),
            });
        }
    }
    let n_us = n as usize;
    let xi_v: RatVector = xi.to_vec();
    let with_xi = |count: usize, tail: &[&RatVector]| -> Vec<RatVector> {
        let mut t = vec![xi_v.clone(); count];
        t.extend(tail.iter().map(|v| (*v).clone()));
        t
    };

    let lam_n = BigRational::from_integer(lambda_n(n));
    let lam_n1 = BigRational::from_integer(lambda_n(n - 1));
    let qxi_pow = |e: u32| -> BigRational { num_traits::pow(q_xi.clone(), e as usize) };

    let w_xi = w(&with_xi(2 * n_us, &[]))?;
    if w_xi != &lam_n * qxi_pow(n) {
        return Err(LatticeError::Inconsistent(format!(
            "w(ξ, …, ξ) = {w_xi} but λₙ q(ξ,ξ)ⁿ = {}",
            &lam_n * qxi_pow(n)
        )));
    }

    let r = basis.len();
    let mut q = vec![vec![BigRational::zero(); r]; r];
    if n == 1 {
        for i in 0..r {
            for j in i..r {
                let v = w(&[basis[i].clone(), basis[j].clone()])?;
                q[i][j] = v.clone();
                q[j][i] = v;
            }
        }
    } else {
        // w(ξ^{2n−1}, bᵢ) and the cross terms cᵢ = q(ξ, bᵢ)
        let w_cross: Vec<BigRational> = basis
            .iter()
            .map(|b| w(&with_xi(2 * n_us - 1, &[b])))
            .collect::<Result<_>>()?;
        let cross_scale = &lam_n * qxi_pow(n - 1);
        let c: Vec<BigRational> = w_cross.iter().map(|v| v / &cross_scale).collect();

        let orth_scale = &lam_n1 * qxi_pow(n - 1);
        for i in 0..r {
            for j in i..r {
                let w_ij = w(&with_xi(2 * n_us - 2, &[&basis[i], &basis[j]]))?;
                // α′ = bᵢ − (cᵢ/q(ξ,ξ)) ξ, β′ = bⱼ − (cⱼ/q(ξ,ξ)) ξ
                let ti = &c[i] / q_xi;
                let tj = &c[j] / q_xi;
                let w_proj = w_ij - &tj * &w_cross[i] - &ti * &w_cross[j] + &ti * &tj * &w_xi;
                let v = w_proj / &orth_scale + &c[i] * &c[j] / q_xi;
                q[i][j] = v.clone();
                q[j][i] = v;
            }
        }
    }

    // consistency: tuples (bᵢⁿ, bⱼⁿ) are not used by the reconstruction above
    let units: Vec<RatVector> = (0..r)
        .map(|i| {
            let mut e = vec![BigRational::zero(); r];
            e[i] = BigRational::one();
            e
        })
        .collect();
    for i in 0..r {
        for j in i..r {
            let mut t = vec![basis[i].clone(); n_us];
            t.extend(std::iter::repeat_n(basis[j].clone(), n_us));
            let observed = w(&t)?;
            let mut tu = vec![units[i].clone(); n_us];
            tu.extend(std::iter::repeat_n(units[j].clone(), n_us));
            let predicted = w_from_q(&q, n, &tu)?;
            if observed != predicted {
                return Err(LatticeError::Inconsistent(format!(
                    "recovered form predicts w(b{i}ⁿ, b{j}ⁿ) = {predicted}, observed {observed}"
                )));
            }
        }
    }
    Ok(q)
}

/// Positive root `x` of `λₙ xⁿ = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BbNorm {
    Exact {
        value: BigRational,
        integral: bool,
    },
    /// `lower < x < upper`, both exact, width `2^-precision_bits`.
    Irrational {
        lower: BigRational,
        upper: BigRational,
    },
}

impl BbNorm {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            BbNorm::Exact { value, .. } => Some(value),
            BbNorm::Irrational { .. } => None,
        }
    }
}

const ISOLATION_BITS: u32 = 64;

pub fn degree_to_bb(d: &BigInt, n: u32) -> Result<BbNorm> {
    if !d.is_positive() {
        return Err(LatticeError::domain(format!(
            "degree must be positive, got {d}"
        )));
    }
    if n == 0 {
        return Err(LatticeError::domain("n must be at least 1"));
    }
    let target = BigRational::new(d.clone(), lambda_n(n));
    let (num, den) = (target.numer(), target.denom());
    let (rn, rd) = (num.nth_root(n), den.nth_root(n));
    if num_traits::pow(rn.clone(), n as usize) == *num
        && num_traits::pow(rd.clone(), n as usize) == *den
    {
        let value = BigRational::new(rn, rd);
        let integral = value.is_integer();
        return Ok(BbNorm::Exact { value, integral });
    }
    let scale = BigInt::one() << (ISOLATION_BITS as usize * n as usize);
    let t = (num * scale) / den;
    let s = t.nth_root(n);
    let unit = BigInt::one() << ISOLATION_BITS as usize;
    Ok(BbNorm::Irrational {
        lower: BigRational::new(s.clone(), unit.clone()),
        upper: BigRational::new(s + 1, unit),
    })
}

/// `λₙ xⁿ`, the degree of a class of BB-norm `x`.
pub fn bb_to_degree(x: &BigRational, n: u32) -> BigRational {
    BigRational::from_integer(lambda_n(n)) * num_traits::pow(x.clone(), n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(x: i64) -> BigRational {
        BigRational::from_integer(big(x))
    }

    /// Brute-force oracle: full permutation sum divided by n!·2ⁿ.
    fn w_by_permutations(q: &RatMatrix, n: u32, args: &[RatVector]) -> BigRational {
        let k = args.len();
        let mut idx: Vec<usize> = (0..k).collect();
        let mut total = BigRational::zero();
        permute(&mut idx, 0, &mut |p| {
            let mut prod = BigRational::one();
            for s in 0..n as usize {
                prod *= bilinear(q, &args[p[2 * s]], &args[p[2 * s + 1]]);
            }
            total += prod;
        });
        let norm: u64 = (1..=n as u64).product::<u64>() * (1u64 << n);
        total / BigRational::from_integer(BigInt::from(norm))
    }

    fn permute(idx: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == idx.len() {
            f(idx);
            return;
        }
        for i in k..idx.len() {
            idx.swap(k, i);
            permute(idx, k + 1, f);
            idx.swap(k, i);
        }
    }

    fn random_form(rng: &mut ChaCha8Rng, r: usize) -> RatMatrix {
        let mut q = vec![vec![BigRational::zero(); r]; r];
        for i in 0..r {
            for j in i..r {
                let v = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
                q[i][j] = v.clone();
                q[j][i] = v;
            }
        }
        q
    }

    fn random_vec(rng: &mut ChaCha8Rng, r: usize) -> RatVector {
        (0..r)
            .map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)))
            .collect()
    }

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_n(0), big(1));
        assert_eq!(lambda_n(1), big(1));
        assert_eq!(lambda_n(2), big(3));
        assert_eq!(lambda_n(3), big(15));
        assert_eq!(lambda_n(4), big(105));
    }

    #[test]
    fn lambda_counts_matchings() {
        for n in 0..6u32 {
            let k = 2 * n as usize;
            let pairs = vec![vec![BigRational::one(); k]; k];
            let mut used = vec![false; k];
            assert_eq!(
                matching_sum(&pairs, &mut used),
                BigRational::from_integer(lambda_n(n))
            );
        }
    }

    #[test]
    fn w_special_values() {
        let q = vec![vec![r(2), r(1)], vec![r(1), r(-3)]];
        let a = vec![r(1), r(2)];
        let qa = bilinear(&q, &a, &a);
        assert_eq!(w_from_q(&q, 1, &[a.clone(), a.clone()]).unwrap(), qa);
        assert_eq!(
            w_from_q(&q, 2, &vec![a.clone(); 4]).unwrap(),
            r(3) * &qa * &qa
        );
        let z = vec![r(0), r(1)];
        let args = vec![a.clone(), a.clone(), a.clone(), z.clone()];
        let expect = r(3) * &qa * bilinear(&q, &a, &z);
        assert_eq!(w_from_q(&q, 2, &args).unwrap(), expect);
        assert_eq!(w_by_permutations(&q, 2, &args), expect);
        assert!(w_from_q(&q, 2, &args[..3]).is_err());
    }

    #[test]
    fn matching_sum_matches_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3u32 {
            for _ in 0..4 {
                let r = rng.gen_range(1..=4);
                let q = random_form(&mut rng, r);
                let args: Vec<RatVector> = (0..2 * n).map(|_| random_vec(&mut rng, r)).collect();
                assert_eq!(
                    w_from_q(&q, n, &args).unwrap(),
                    w_by_permutations(&q, n, &args)
                );
            }
        }
    }

    #[test]
    fn roundtrip_recovers_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3u32 {
            for _ in 0..5 {
                let r = rng.gen_range(1..=5);
                let q = random_form(&mut rng, r);
                let xi = loop {
                    let v = random_vec(&mut rng, r);
                    if !bilinear(&q, &v, &v).is_zero() {
                        break v;
                    }
                };
                let q_xi = bilinear(&q, &xi, &xi);
                let basis: Vec<RatVector> = (0..r)
                    .map(|i| {
                        (0..r)
                            .map(|j| if i == j { r_one() } else { BigRational::zero() })
                            .collect()
                    })
                    .collect();
                let got = q_from_w(|a| w_from_q(&q, n, a), n, &xi, &q_xi, &basis).unwrap();
                assert_eq!(got, q);
            }
        }
    }

    fn r_one() -> BigRational {
        BigRational::one()
    }

    #[test]
    fn recovery_rejects_bad_input() {
        let q = vec![vec![r(2), r(0)], vec![r(0), r(1)]];
        let basis = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        let xi = vec![r(1), r(0)];
        let zero = q_from_w(|a| w_from_q(&q, 2, a), 2, &xi, &r(0), &basis);
        assert!(matches!(zero, Err(LatticeError::Inconsistent(_))));
        let wrong_norm = q_from_w(|a| w_from_q(&q, 2, a), 2, &xi, &r(3), &basis);
        assert!(matches!(wrong_norm, Err(LatticeError::Inconsistent(_))));
        // a 4-linear w that is not generated by any q: add a perturbation off the ξ-tuples
        let bad = |a: &[RatVector]| -> Result<BigRational> {
            let base = w_from_q(&q, 2, a)?;
            let all_e1 = a.iter().all(|v| v == &basis[1]);
            Ok(if all_e1 { base + r(1) } else { base })
        };
        assert!(matches!(
            q_from_w(bad, 2, &xi, &r(2), &basis),
            Err(LatticeError::Inconsistent(_))
        ));
    }

    #[test]
    fn orthogonality_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_form(&mut rng, 3);
            let xi = random_vec(&mut rng, 3);
            let alpha = random_vec(&mut rng, 3);
            for n in 1..=3u32 {
                let mut args = vec![xi.clone(); 2 * n as usize - 1];
                args.push(alpha.clone());
                let w = w_from_q(&q, n, &args).unwrap();
                let qxa = bilinear(&q, &xi, &alpha);
                if !bilinear(&q, &xi, &xi).is_zero() {
                    assert_eq!(w.is_zero(), qxa.is_zero());
                }
            }
        }
        // an explicit orthogonal pair
        let q = vec![vec![r(2), r(0)], vec![r(0), r(-1)]];
        let args = vec![
            vec![r(1), r(0)],
            vec![r(1), r(0)],
            vec![r(1), r(0)],
            vec![r(0), r(1)],
        ];
        assert!(w_from_q(&q, 2, &args).unwrap().is_zero());
    }

    #[test]
    fn degree_conversion() {
        assert_eq!(
            degree_to_bb(&big(108), 2).unwrap(),
            BbNorm::Exact {
                value: r(6),
                integral: true
            }
        );
        assert_eq!(
            degree_to_bb(&big(2), 1).unwrap(),
            BbNorm::Exact {
                value: r(2),
                integral: true
            }
        );
        assert_eq!(bb_to_degree(&r(6), 2), r(108));
        // 3x² = 6 has root √2
        match degree_to_bb(&big(6), 2).unwrap() {
            BbNorm::Irrational { lower, upper } => {
                assert!(&lower * &lower < r(2) && &upper * &upper > r(2));
                assert!(
                    upper - lower
                        == rat(1, 1) / BigRational::from_integer(BigInt::one() << 64usize)
                );
            }
            other => panic!("expected irrational, got {other:?}"),
        }
        assert_eq!(degree_to_bb(&big(120), 3).unwrap().exact(), Some(&r(2)));
        assert!(degree_to_bb(&big(1), 2).unwrap().exact().is_none());
        assert!(degree_to_bb(&big(0), 2).is_err());
    }
}
