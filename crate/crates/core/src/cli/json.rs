//! JSON documents read and written by the command-line tool. Integers travel
//! as decimal strings (plain JSON integers are accepted on input), rationals
//! as `"a/b"` strings.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::disc::FiniteQuadraticForm;
use crate::error::{LatticeError, Result};
use crate::lattice::{Block, LatticeVector, QuadLattice};
use crate::local::{Certification, JordanDecomposition, LocalData};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntText(pub BigInt);

impl Serialize for IntText {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = IntText;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<IntText, E> {
        Ok(IntText(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<IntText, E> {
        Ok(IntText(v.into()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<IntText, E> {
        BigInt::from_str(v.trim())
            .map(IntText)
            .map_err(|_| E::custom(format!("not an integer: {v:?}")))
    }
}

impl<'de> Deserialize<'de> for IntText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatText(pub BigRational);

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = RatText;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a rational string \"a/b\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RatText, E> {
        Ok(RatText(BigRational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RatText, E> {
        Ok(RatText(BigRational::from_integer(v.into())))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RatText, E> {
        parse_rational(v).map(RatText).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for RatText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(RatVisitor)
    }
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok();
            let d = BigInt::from_str(d.trim())
                .ok()
                .filter(|d| d != &BigInt::from(0));
            n.zip(d).map(|(n, d)| BigRational::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    };
    parsed.ok_or_else(|| format!("not a rational number: {s:?}"))
}

pub fn ints(v: &[IntText]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn rats(v: &[RatText]) -> Vec<BigRational> {
    v.iter().map(|x| x.0.clone()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProvenanceBlock {
    Hyperbolic,
    E8,
    Rank1 { m: IntText },
    Other { rank: usize },
}

impl From<&Block> for ProvenanceBlock {
    fn from(b: &Block) -> Self {
        match b {
            Block::Hyperbolic => ProvenanceBlock::Hyperbolic,
            Block::E8 => ProvenanceBlock::E8,
            Block::Rank1 { m } => ProvenanceBlock::Rank1 {
                m: IntText(m.clone()),
            },
            Block::Other { rank } => ProvenanceBlock::Other { rank: *rank },
        }
    }
}

impl From<ProvenanceBlock> for Block {
    fn from(b: ProvenanceBlock) -> Self {
        match b {
            ProvenanceBlock::Hyperbolic => Block::Hyperbolic,
            ProvenanceBlock::E8 => Block::E8,
            ProvenanceBlock::Rank1 { m } => Block::Rank1 { m: m.0 },
            ProvenanceBlock::Other { rank } => Block::Other { rank },
        }
    }
}

/// A lattice on the wire: its Gram matrix, an optional name, and optionally
/// the block lineage that certifies hyperbolic summands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub gram: Vec<Vec<IntText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Vec<ProvenanceBlock>>,
}

impl LatticeDocument {
    pub fn from_lattice(lattice: &QuadLattice, name: Option<String>) -> Self {
        let informative = lattice
            .blocks()
            .iter()
            .any(|b| !matches!(b, Block::Other { .. }));
        LatticeDocument {
            name,
            gram: lattice
                .gram()
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(IntText).collect())
                .collect(),
            provenance: informative
                .then(|| lattice.blocks().iter().map(ProvenanceBlock::from).collect()),
        }
    }

    pub fn to_lattice(&self) -> Result<QuadLattice> {
        let gram = int_matrix(&self.gram)?;
        match &self.provenance {
            Some(blocks) => {
                QuadLattice::with_blocks(gram, blocks.iter().cloned().map(Block::from).collect())
            }
            None => QuadLattice::new(gram),
        }
    }
}

pub fn int_matrix(rows: &[Vec<IntText>]) -> Result<IntMatrix> {
    if rows.is_empty() {
        return Err(LatticeError::invalid("matrix is empty"));
    }
    IntMatrix::from_rows(rows.iter().map(|r| ints(r)).collect())
}

pub fn rat_matrix(rows: &[Vec<RatText>]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| rats(r)).collect()
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| LatticeError::invalid(format!("malformed JSON input: {e}")))
}

pub fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn rat(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

pub fn int_list(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn vector(v: &LatticeVector) -> Value {
    int_list(&v.0)
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| int_list(r)).collect())
}

pub fn rat_rows(m: &[Vec<BigRational>]) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(rat).collect()))
            .collect(),
    )
}

pub fn signature(s: (usize, usize)) -> Value {
    json!([s.0, s.1])
}

pub fn finite_form(f: &FiniteQuadraticForm) -> Value {
    json!({
        "invariant_factors": int_list(f.invariant_factors()),
        "order": int(&f.order()),
        "q_values": Value::Array(f.generator_values().iter().map(rat).collect()),
        "value_modulus": int(&f.value_modulus()),
    })
}

pub fn jordan(j: &JordanDecomposition) -> Value {
    json!({
        "prime": int(&j.prime),
        "blocks": j.blocks.iter().map(|b| json!({
            "scale": b.scale,
            "rank": b.rank,
            "det_class": b.det_class,
        })).collect::<Vec<_>>(),
        "det_valuation": j.det_valuation(),
    })
}

pub fn local_data(d: &LocalData) -> Value {
    json!({
        "det": int(&d.det),
        "odd": d.odd.values().map(jordan).collect::<Vec<_>>(),
        "two_part": finite_form(&d.two_part),
    })
}

pub fn certification(c: Certification) -> Value {
    Value::String(
        match c {
            Certification::Certified => "certified",
            Certification::Assumed => "assumed",
        }
        .into(),
    )
}
