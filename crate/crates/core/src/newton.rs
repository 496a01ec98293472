//! p-adic Newton polygons of integer polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{require_prime, valuation};
use crate::error::{LatticeError, Result};

/// Root valuations with multiplicities, ascending by valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub slopes: Vec<(BigRational, usize)>,
}

impl NewtonPolygon {
    pub fn degree(&self) -> usize {
        self.slopes.iter().map(|(_, m)| m).sum()
    }

    /// Multiset union of root valuations: the polygon of a product.
    pub fn union(&self, other: &NewtonPolygon) -> NewtonPolygon {
        let mut all = self.slopes.clone();
        all.extend(other.slopes.iter().cloned());
        NewtonPolygon::from_valuations(all)
    }

    fn from_valuations(mut pairs: Vec<(BigRational, usize)>) -> NewtonPolygon {
        pairs.sort();
        let mut slopes: Vec<(BigRational, usize)> = Vec::new();
        for (s, m) in pairs {
            match slopes.last_mut() {
                Some((last, count)) if *last == s => *count += m,
                _ => slopes.push((s, m)),
            }
        }
        NewtonPolygon { slopes }
    }
}

/// Newton polygon of `Σ aᵢ tⁱ` (coefficients ascending) at `p`.
///
/// Trailing zero coefficients are dropped. The lower convex hull of the points
/// `(i, v_p(aᵢ))` has segments of slope `−v` and horizontal length `m` for each
/// root valuation `v` of multiplicity `m`. A zero constant term means a root
/// of infinite valuation and is rejected.
pub fn newton_polygon(coeffs: &[BigInt], p: &BigInt) -> Result<NewtonPolygon> {
    require_prime(p)?;
    let Some(top) = coeffs.iter().rposition(|c| !c.is_zero()) else {
        return Err(LatticeError::invalid("zero polynomial"));
    };
    let coeffs = &coeffs[..=top];
    if coeffs[0].is_zero() {
        return Err(LatticeError::domain(
            "constant term is zero (a root of infinite valuation)",
        ));
    }
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, valuation(c, p) as i64))
        .collect();
    // monotone chain, keeping only strict turns
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let pairs = hull
        .windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            (BigRational::new((-dy).into(), dx.into()), dx as usize)
        })
        .collect();
    Ok(NewtonPolygon::from_valuations(pairs))
}

/// A single slope equal to `weight / 2`.
pub fn is_supersingular_newton(np: &NewtonPolygon, weight: u32) -> bool {
    let half = BigRational::new(weight.into(), 2.into());
    matches!(np.slopes.as_slice(), [(s, _)] if *s == half)
}

/// Product of polynomials, coefficients ascending.
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(t − r)^k`, ascending.
pub fn linear_power(r: &BigInt, k: usize) -> Vec<BigInt> {
    let factor = [-r.clone(), BigInt::from(1)];
    (0..k).fold(vec![BigInt::from(1)], |acc, _| poly_mul(&acc, &factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, rat};

    fn np(coeffs: &[i64], p: i64) -> Vec<(BigRational, usize)> {
        let c: Vec<BigInt> = coeffs.iter().map(|&x| big(x)).collect();
        newton_polygon(&c, &big(p)).unwrap().slopes
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(np(&[25, -10, 1], 5), vec![(rat(1, 1), 2)]);
        assert_eq!(np(&[25, 5, 1], 5), vec![(rat(1, 1), 2)]);
        assert_eq!(np(&[5, -1, 1], 5), vec![(rat(0, 1), 1), (rat(1, 1), 1)]);
        // t² − p: both roots have valuation 1/2
        assert_eq!(np(&[-7, 0, 1], 7), vec![(rat(1, 2), 2)]);
    }

    #[test]
    fn trailing_zeros_and_errors() {
        assert_eq!(np(&[3, 1, 0, 0], 3), vec![(rat(1, 1), 1)]);
        let p = big(3);
        assert!(newton_polygon(&[big(0), big(0)], &p).is_err());
        assert!(newton_polygon(&[big(0), big(1)], &p).is_err());
        assert!(newton_polygon(&[big(1), big(1)], &big(4)).is_err());
    }

    #[test]
    fn supersingular_line() {
        for p in [2, 5, 13] {
            let poly = linear_power(&big(p), 22);
            let polygon = newton_polygon(&poly, &big(p)).unwrap();
            assert_eq!(polygon.degree(), 22);
            assert!(is_supersingular_newton(&polygon, 2));
            assert!(!is_supersingular_newton(&polygon, 4));
        }
        let h4 = newton_polygon(&linear_power(&big(25), 3), &big(5)).unwrap();
        assert!(is_supersingular_newton(&h4, 4));
        let mixed = newton_polygon(&[big(5), big(-1), big(1)], &big(5)).unwrap();
        assert!(!is_supersingular_newton(&mixed, 2));
    }

    #[test]
    fn product_is_union() {
        let p = big(3);
        let f = [big(9), big(3), big(1)];
        let g = [big(3), big(-1), big(1)];
        let lhs = newton_polygon(&poly_mul(&f, &g), &p).unwrap();
        let rhs = newton_polygon(&f, &p)
            .unwrap()
            .union(&newton_polygon(&g, &p).unwrap());
        assert_eq!(lhs, rhs);
    }
}
