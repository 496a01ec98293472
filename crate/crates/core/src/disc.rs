//! Discriminant groups `L∨/L` with their finite quadratic forms, and the
//! correspondence between isotropic subgroups and overlattices.
//!
//! Elements are coordinate vectors modulo the invariant factors. The `i`-th
//! generator is the dual vector `V eᵢ / dᵢ`, where `U G V = diag(d)` is the Smith
//! form of the Gram matrix. Quadratic values live in `Q/2Z` for even lattices
//! and `Q/Z` otherwise, with representatives in `[0, 2)` resp. `[0, 1)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{lcm_of_denominators, rational_mod, require_prime, valuation};
use crate::error::{LatticeError, Result};
use crate::lattice::QuadLattice;
use crate::matrix::{row_span_basis, smith_normal_form, IntMatrix};

/// Default cap on the number of group elements visited by brute-force routines.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscElement(pub Vec<BigInt>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    invariant_factors: Vec<BigInt>,
    /// Rational lifts in `L ⊗ Q`, one per invariant factor.
    generators: Vec<Vec<BigRational>>,
    /// Exact pairings `yᵢᵀ G yⱼ` of the lifts.
    gen_gram: Vec<Vec<BigRational>>,
    ambient: IntMatrix,
    even: bool,
}

pub fn discriminant_group(lattice: &QuadLattice) -> FiniteQuadraticForm {
    let gram = lattice.gram();
    let snf = smith_normal_form(gram);
    let mut factors = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in snf.diagonal.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let col = snf.right.column(i);
        generators.push(
            col.into_iter()
                .map(|x| BigRational::new(x, d.clone()))
                .collect::<Vec<_>>(),
        );
        factors.push(d.clone());
    }
    FiniteQuadraticForm::from_parts(factors, generators, gram.clone(), lattice.is_even())
}

fn pair(gram: &IntMatrix, x: &[BigRational], y: &[BigRational]) -> BigRational {
    let n = gram.rows();
    let mut acc = BigRational::zero();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let mut row = BigRational::zero();
        for j in 0..n {
            if !y[j].is_zero() && !gram[(i, j)].is_zero() {
                row += &y[j] * BigRational::from_integer(gram[(i, j)].clone());
            }
        }
        acc += &x[i] * row;
    }
    acc
}

impl FiniteQuadraticForm {
    fn from_parts(
        invariant_factors: Vec<BigInt>,
        generators: Vec<Vec<BigRational>>,
        ambient: IntMatrix,
        even: bool,
    ) -> Self {
        let gen_gram = generators
            .iter()
            .map(|x| generators.iter().map(|y| pair(&ambient, x, y)).collect())
            .collect();
        FiniteQuadraticForm {
            invariant_factors,
            generators,
            gen_gram,
            ambient,
            even,
        }
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn generators(&self) -> &[Vec<BigRational>] {
        &self.generators
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn ambient_gram(&self) -> &IntMatrix {
        &self.ambient
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn exponent(&self) -> BigInt {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(BigInt::one)
    }

    /// 2 for `Q/2Z`-valued forms, 1 for `Q/Z`.
    pub fn value_modulus(&self) -> BigInt {
        if self.even {
            BigInt::from(2)
        } else {
            BigInt::one()
        }
    }

    pub fn identity(&self) -> DiscElement {
        DiscElement(vec![BigInt::zero(); self.invariant_factors.len()])
    }

    pub fn generator(&self, i: usize) -> DiscElement {
        let mut e = self.identity();
        e.0[i] = BigInt::one();
        e
    }

    pub fn normalize(&self, x: &DiscElement) -> DiscElement {
        DiscElement(
            x.0.iter()
                .zip(&self.invariant_factors)
                .map(|(a, d)| a.mod_floor(d))
                .collect(),
        )
    }

    pub fn add(&self, x: &DiscElement, y: &DiscElement) -> DiscElement {
        self.normalize(&DiscElement(
            x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn scale(&self, k: &BigInt, x: &DiscElement) -> DiscElement {
        self.normalize(&DiscElement(x.0.iter().map(|a| a * k).collect()))
    }

    pub fn neg(&self, x: &DiscElement) -> DiscElement {
        self.scale(&BigInt::from(-1), x)
    }

    pub fn element_order(&self, x: &DiscElement) -> BigInt {
        x.0.iter()
            .zip(&self.invariant_factors)
            .fold(BigInt::one(), |acc, (a, d)| acc.lcm(&(d / a.gcd(d))))
    }

    /// A rational lift of `x` in `L ⊗ Q`.
    pub fn lift(&self, x: &DiscElement) -> Vec<BigRational> {
        let n = self.ambient.rows();
        let mut out = vec![BigRational::zero(); n];
        for (a, y) in x.0.iter().zip(&self.generators) {
            if a.is_zero() {
                continue;
            }
            let a = BigRational::from_integer(a.clone());
            for (o, yi) in out.iter_mut().zip(y) {
                *o += &a * yi;
            }
        }
        out
    }

    fn raw_pairing(&self, x: &DiscElement, y: &DiscElement) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, a) in x.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.0.iter().enumerate() {
                if !b.is_zero() {
                    acc += &self.gen_gram[i][j] * BigRational::from_integer(a * b);
                }
            }
        }
        acc
    }

    /// `q(x) = x̃²` reduced into the value group.
    pub fn quadratic_value(&self, x: &DiscElement) -> BigRational {
        rational_mod(&self.raw_pairing(x, x), &self.value_modulus())
    }

    /// `b(x, y) = x̃ · ỹ` modulo `Z`.
    pub fn bilinear_value(&self, x: &DiscElement, y: &DiscElement) -> BigRational {
        rational_mod(&self.raw_pairing(x, y), &BigInt::one())
    }

    /// `q` on each generator, in order.
    pub fn generator_values(&self) -> Vec<BigRational> {
        (0..self.invariant_factors.len())
            .map(|i| self.quadratic_value(&self.generator(i)))
            .collect()
    }

    fn check_size(&self, limit: usize) -> Result<usize> {
        let order = self.order();
        match order.to_usize() {
            Some(n) if n <= limit => Ok(n),
            _ => Err(LatticeError::Capacity(format!(
                "discriminant group of order {order} exceeds the enumeration limit {limit}"
            ))),
        }
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self, limit: usize) -> Result<Vec<DiscElement>> {
        let n = self.check_size(limit)?;
        let mut out = Vec::with_capacity(n);
        let mut cur = self.identity();
        loop {
            out.push(cur.clone());
            // odometer, last coordinate fastest
            let mut i = cur.0.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur.0[i] += 1;
                if cur.0[i] < self.invariant_factors[i] {
                    break;
                }
                cur.0[i] = BigInt::zero();
            }
        }
    }

    /// The ℓ-primary component with the restricted form.
    pub fn local_part(&self, prime: &BigInt) -> Result<FiniteQuadraticForm> {
        require_prime(prime)?;
        let mut factors = Vec::new();
        let mut gens = Vec::new();
        for (d, y) in self.invariant_factors.iter().zip(&self.generators) {
            let k = valuation(d, prime);
            if k == 0 {
                continue;
            }
            let pk = prime.pow(k);
            let cofactor = BigRational::from_integer(d / &pk);
            gens.push(y.iter().map(|c| c * &cofactor).collect());
            factors.push(pk);
        }
        Ok(FiniteQuadraticForm::from_parts(
            factors,
            gens,
            self.ambient.clone(),
            self.even,
        ))
    }
}

pub fn disc_quadratic_value(form: &FiniteQuadraticForm, x: &DiscElement) -> BigRational {
    form.quadratic_value(x)
}

pub fn disc_local_part(form: &FiniteQuadraticForm, prime: &BigInt) -> Result<FiniteQuadraticForm> {
    form.local_part(prime)
}

/// A subgroup on which the discriminant form vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicSubgroup {
    /// Greedy canonical generating set: smallest elements not already spanned.
    pub generators: Vec<DiscElement>,
    /// Every element, sorted.
    pub elements: Vec<DiscElement>,
}

impl IsotropicSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

fn span_with(
    form: &FiniteQuadraticForm,
    h: &BTreeSet<DiscElement>,
    x: &DiscElement,
) -> BTreeSet<DiscElement> {
    let mut out = h.clone();
    let mut mult = x.clone();
    while !h.contains(&mult) {
        for e in h {
            out.insert(form.add(e, &mult));
        }
        mult = form.add(&mult, x);
    }
    out
}

fn canonical_generators(
    form: &FiniteQuadraticForm,
    elements: &BTreeSet<DiscElement>,
) -> Vec<DiscElement> {
    let mut gens = Vec::new();
    let mut span: BTreeSet<DiscElement> = std::iter::once(form.identity()).collect();
    for e in elements {
        if !span.contains(e) {
            span = span_with(form, &span, e);
            gens.push(e.clone());
        }
    }
    gens
}

fn is_totally_isotropic(
    form: &FiniteQuadraticForm,
    elements: &BTreeSet<DiscElement>,
    gens: &[DiscElement],
) -> bool {
    let zero = BigRational::zero();
    elements.iter().all(|e| form.quadratic_value(e) == zero)
        && gens
            .iter()
            .all(|a| gens.iter().all(|b| form.bilinear_value(a, b) == zero))
}

/// Every isotropic subgroup, ordered by canonical generator tuple (trivial first).
pub fn isotropic_subgroups(
    form: &FiniteQuadraticForm,
    limit: usize,
) -> Result<Vec<IsotropicSubgroup>> {
    let elements = form.elements(limit)?;
    let zero = BigRational::zero();
    let isotropic: Vec<DiscElement> = elements
        .into_iter()
        .filter(|e| form.quadratic_value(e) == zero)
        .collect();

    let trivial: BTreeSet<DiscElement> = std::iter::once(form.identity()).collect();
    let mut seen: BTreeSet<Vec<DiscElement>> = BTreeSet::new();
    seen.insert(trivial.iter().cloned().collect());
    let mut found = vec![trivial.clone()];
    let mut frontier = vec![trivial];
    while let Some(h) = frontier.pop() {
        for x in &isotropic {
            if h.contains(x) {
                continue;
            }
            let k = span_with(form, &h, x);
            let key: Vec<DiscElement> = k.iter().cloned().collect();
            if seen.contains(&key) {
                continue;
            }
            let gens = canonical_generators(form, &k);
            seen.insert(key);
            if is_totally_isotropic(form, &k, &gens) {
                found.push(k.clone());
                frontier.push(k);
            }
        }
    }

    let mut out: Vec<IsotropicSubgroup> = found
        .into_iter()
        .map(|k| IsotropicSubgroup {
            generators: canonical_generators(form, &k),
            elements: k.into_iter().collect(),
        })
        .collect();
    out.sort_by(|a, b| a.generators.cmp(&b.generators));
    Ok(out)
}

/// The overlattice `L ⊆ M ⊆ L∨` with `M/L` equal to the given subgroup.
pub fn overlattice_from_isotropic(
    lattice: &QuadLattice,
    form: &FiniteQuadraticForm,
    subgroup: &IsotropicSubgroup,
) -> Result<QuadLattice> {
    if form.ambient_gram() != lattice.gram() {
        return Err(LatticeError::invalid(
            "discriminant form does not belong to this lattice",
        ));
    }
    let elements: BTreeSet<DiscElement> = subgroup
        .elements
        .iter()
        .map(|e| form.normalize(e))
        .collect();
    if !is_totally_isotropic(form, &elements, &subgroup.generators) {
        return Err(LatticeError::domain("subgroup is not isotropic"));
    }
    let n = lattice.rank();
    let lifts: Vec<Vec<BigRational>> = subgroup.generators.iter().map(|g| form.lift(g)).collect();
    let denom = lcm_of_denominators(lifts.iter().flatten());
    let scale = BigRational::from_integer(denom.clone());
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = denom.clone();
            r
        })
        .collect();
    for y in &lifts {
        rows.push(y.iter().map(|c| (c * &scale).to_integer()).collect());
    }
    let basis = row_span_basis(&rows, n);
    let basis: Vec<Vec<BigRational>> = basis
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| BigRational::new(x, denom.clone()))
                .collect()
        })
        .collect();
    let mut gram = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = pair(lattice.gram(), &basis[i], &basis[j]);
            if !v.is_integer() {
                return Err(LatticeError::Inconsistent(
                    "overlattice Gram matrix is not integral".into(),
                ));
            }
            gram[(i, j)] = v.to_integer();
        }
    }
    QuadLattice::new(gram)
}

/// Does the isometry `g` (columns = images of basis vectors) fix `L∨/L` pointwise?
/// `m` must kill the discriminant group.
pub fn acts_trivially_on_disc(lattice: &QuadLattice, g: &IntMatrix, m: &BigInt) -> Result<bool> {
    if !lattice.is_isometry(g) {
        return Err(LatticeError::domain(
            "matrix is not an isometry of the lattice",
        ));
    }
    let form = discriminant_group(lattice);
    if m.is_zero() || !m.is_multiple_of(&form.exponent()) {
        return Err(LatticeError::invalid(format!(
            "m = {m} does not kill the discriminant group (exponent {})",
            form.exponent()
        )));
    }
    let n = lattice.rank();
    for y in form.generators() {
        for i in 0..n {
            let mut image = BigRational::zero();
            for j in 0..n {
                if !g[(i, j)].is_zero() {
                    image += &y[j] * BigRational::from_integer(g[(i, j)].clone());
                }
            }
            if !(image - &y[i]).is_integer() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Brute-force isomorphism test for two finite quadratic forms.
pub fn forms_isomorphic(
    a: &FiniteQuadraticForm,
    b: &FiniteQuadraticForm,
    limit: usize,
) -> Result<bool> {
    if a.invariant_factors != b.invariant_factors || a.even != b.even {
        return Ok(false);
    }
    if a.is_trivial() {
        return Ok(true);
    }
    let targets = b.elements(limit)?;
    let k = a.invariant_factors.len();
    let mut images: Vec<DiscElement> = Vec::with_capacity(k);

    fn search(
        a: &FiniteQuadraticForm,
        b: &FiniteQuadraticForm,
        targets: &[DiscElement],
        images: &mut Vec<DiscElement>,
    ) -> bool {
        let i = images.len();
        if i == a.invariant_factors.len() {
            // equal orders, so injective means bijective
            let mut span: BTreeSet<DiscElement> = std::iter::once(b.identity()).collect();
            for x in images.iter() {
                span = span_with(b, &span, x);
            }
            return BigInt::from(span.len()) == b.order();
        }
        let gi = a.generator(i);
        let order = &a.invariant_factors[i];
        let q = a.quadratic_value(&gi);
        for t in targets {
            if &b.element_order(t) != order || b.quadratic_value(t) != q {
                continue;
            }
            let compatible = (0..i)
                .all(|j| a.bilinear_value(&gi, &a.generator(j)) == b.bilinear_value(t, &images[j]));
            if !compatible {
                continue;
            }
            images.push(t.clone());
            if search(a, b, targets, images) {
                return true;
            }
            images.pop();
        }
        false
    }

    Ok(search(a, b, &targets, &mut images))
}
