//! Reference implementations used to cross-check the library. They are
//! deliberately naive and share no code with it beyond the integer types.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use k3lattice::{IntMatrix, QuadLattice};

pub type Mat = Vec<Vec<BigInt>>;
pub type RMat = Vec<Vec<BigRational>>;

pub fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn r(x: i64) -> BigRational {
    BigRational::from_integer(b(x))
}

pub fn mat(rows: &[&[i64]]) -> Mat {
    rows.iter()
        .map(|r| r.iter().map(|&x| b(x)).collect())
        .collect()
}

pub fn to_rows(m: &IntMatrix) -> Mat {
    m.to_rows()
}

pub fn from_rows(m: &Mat) -> IntMatrix {
    IntMatrix::from_rows(m.clone()).unwrap()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| b((i == j) as i64)).collect())
        .collect()
}

pub fn mul(a: &Mat, c: &Mat) -> Mat {
    let (n, k, m) = (a.len(), c.len(), c[0].len());
    assert_eq!(a[0].len(), k);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| &a[i][t] * &c[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// `gᵀ a g`
pub fn congruence(g: &Mat, a: &Mat) -> Mat {
    mul(&transpose(g), &mul(a, g))
}

pub fn block_diag(a: &Mat, c: &Mat) -> Mat {
    let (n, m) = (a.len(), c.len());
    let mut out = vec![vec![BigInt::zero(); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[n + i][n + j] = c[i][j].clone();
        }
    }
    out
}

fn rational(a: &Mat) -> RMat {
    a.iter()
        .map(|row| {
            row.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect()
}

/// Determinant by plain Gaussian elimination over Q.
pub fn det(a: &Mat) -> BigInt {
    let n = a.len();
    let mut m = rational(a);
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let v = &f * &m[c][j];
                m[i][j] -= v;
            }
        }
    }
    assert!(d.is_integer());
    d.to_integer()
}

/// Inverse over Q by Gauss–Jordan.
pub fn inverse(a: &Mat) -> RMat {
    let n = a.len();
    let mut m = rational(a);
    let mut inv = rational(&identity(n));
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).expect("invertible");
        m.swap(p, c);
        inv.swap(p, c);
        let piv = m[c][c].clone();
        for j in 0..n {
            m[c][j] /= &piv;
            inv[c][j] /= &piv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..n {
                let v = &f * &m[c][j];
                m[i][j] -= v;
                let w = &f * &inv[c][j];
                inv[i][j] -= w;
            }
        }
    }
    inv
}

/// Signature by symmetric elimination over Q, counting pivot signs.
pub fn signature(a: &Mat) -> (usize, usize) {
    let mut m = rational(a);
    let (mut pos, mut neg) = (0, 0);
    loop {
        let n = m.len();
        if n == 0 {
            return (pos, neg);
        }
        let k = match (0..n).find(|&i| !m[i][i].is_zero()) {
            Some(k) => k,
            None => {
                // all diagonal entries vanish: add row/column j to i for a nonzero m[i][j]
                let Some((i, j)) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[i][j].is_zero())
                else {
                    panic!("degenerate form");
                };
                for t in 0..n {
                    let v = m[j][t].clone();
                    m[i][t] += v;
                }
                for t in 0..n {
                    let v = m[t][j].clone();
                    m[t][i] += v;
                }
                i
            }
        };
        let piv = m[k][k].clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let mut next = Vec::new();
        for i in (0..n).filter(|&i| i != k) {
            let row: Vec<BigRational> = (0..n)
                .filter(|&j| j != k)
                .map(|j| &m[i][j] - &m[i][k] * &m[k][j] / &piv)
                .collect();
            next.push(row);
        }
        m = next;
    }
}

/// Rank of an integer matrix modulo a prime.
pub fn rank_mod_p(a: &Mat, p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = a
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.mod_floor(&b(p)).to_i64().unwrap())
                .collect()
        })
        .collect();
    let (rows, cols) = (m.len(), m[0].len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = b(m[rank][c]).modpow(&b(p - 2), &b(p)).to_i64().unwrap();
        for i in 0..rows {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c] * inv % p;
                for j in 0..cols {
                    m[i][j] = (m[i][j] - f * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn is_even(a: &Mat) -> bool {
    (0..a.len()).all(|i| a[i][i].is_even())
}

pub fn hyperbolic() -> Mat {
    mat(&[&[0, 1], &[1, 0]])
}

/// Random unimodular matrix together with its inverse, as a product of
/// elementary operations with small multipliers and random swaps/sign flips.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (Mat, Mat) {
    let mut g = identity(n);
    let mut ginv = identity(n);
    for _ in 0..steps {
        if n == 1 {
            break;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            0 => {
                // columns i and j swap; inverse swaps rows
                for row in g.iter_mut() {
                    row.swap(i, j);
                }
                ginv.swap(i, j);
            }
            1 => {
                for row in g.iter_mut() {
                    row[i] = -row[i].clone();
                }
                for x in ginv[i].iter_mut() {
                    *x = -x.clone();
                }
            }
            _ => {
                // column_i += k column_j; inverse: row_j −= k row_i
                let k = b(rng.gen_range(-2..=2));
                for row in g.iter_mut() {
                    let v = &row[j] * &k;
                    row[i] += v;
                }
                let ri = ginv[i].clone();
                for (x, y) in ginv[j].iter_mut().zip(ri) {
                    *x -= &k * y;
                }
            }
        }
    }
    debug_assert_eq!(mul(&g, &ginv), identity(n));
    (g, ginv)
}

/// Random nondegenerate even symmetric matrix of rank `n` with small entries.
pub fn random_even_gram<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Mat {
    loop {
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            g[i][i] = b(2 * rng.gen_range(-bound..=bound));
            for j in i + 1..n {
                let v = b(rng.gen_range(-bound..=bound));
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        if !det(&g).is_zero() {
            return g;
        }
    }
}

pub fn lattice(m: &Mat) -> QuadLattice {
    QuadLattice::new(from_rows(m)).unwrap()
}

/// `Σ_{σ ∈ S_{2n}} Π q(α_{σ(2i−1)}, α_{σ(2i)}) / (n! 2ⁿ)`, literally.
pub fn w_by_permutations(q: &RMat, args: &[Vec<BigRational>]) -> BigRational {
    let k = args.len();
    assert!(k.is_multiple_of(2));
    let n = k / 2;
    let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..x.len() {
            for j in 0..y.len() {
                acc += &x[i] * &q[i][j] * &y[j];
            }
        }
        acc
    };
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = BigRational::zero();
    // Heap's algorithm over all k! orderings
    let mut c = vec![0usize; k];
    let term = |perm: &[usize]| -> BigRational {
        (0..n).fold(BigRational::one(), |acc, i| {
            acc * pair(&args[perm[2 * i]], &args[perm[2 * i + 1]])
        })
    };
    total += term(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let norm: BigInt = (1..=n as i64).map(b).product::<BigInt>() << n;
    total / BigRational::from_integer(norm)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as i64).map(b).product()
}

/// Root valuations of `Σ aᵢ tⁱ` with multiplicity, by gift wrapping: from the
/// current vertex take the next point of least slope, farthest on ties.
pub fn newton_valuations(coeffs: &[BigInt], p: &BigInt) -> Vec<BigRational> {
    let pts: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let mut c = c.abs();
            let mut v = 0;
            while (&c % p).is_zero() {
                c /= p;
                v += 1;
            }
            (i as i64, v)
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = 0;
    while cur + 1 < pts.len() {
        let (x0, y0) = pts[cur];
        let mut best = cur + 1;
        for k in cur + 1..pts.len() {
            let (xb, yb) = pts[best];
            let (xk, yk) = pts[k];
            // slope_k <= slope_best  ⇔  (yk−y0)(xb−x0) <= (yb−y0)(xk−x0)
            let lhs = (yk - y0) * (xb - x0);
            let rhs = (yb - y0) * (xk - x0);
            if lhs < rhs || (lhs == rhs && xk > xb) {
                best = k;
            }
        }
        let (x1, y1) = pts[best];
        let slope = BigRational::new(b(y1 - y0), b(x1 - x0));
        for _ in 0..(x1 - x0) {
            out.push(-slope.clone());
        }
        cur = best;
    }
    out.sort();
    out
}

pub fn poly_mul(a: &[BigInt], c: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + c.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in c.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn sieve(n: usize) -> Vec<u64> {
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| is[k]).map(|k| k as u64).collect()
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Inertness of `p` in `Q(√−q)` for a prime `q`, from Euler's criterion and
/// the classical rule at 2 (inert iff the discriminant is ≡ 5 mod 8).
pub fn inert_by_euler(p: u64, q: u64) -> bool {
    let disc: i64 = if q % 4 == 3 {
        -(q as i64)
    } else {
        -4 * q as i64
    };
    if p == 2 {
        return disc.rem_euclid(8) == 5;
    }
    if disc.rem_euclid(p as i64) == 0 {
        return false;
    }
    let a = disc.rem_euclid(p as i64) as u64;
    pow_mod(a, (p - 1) / 2, p) == p - 1
}
