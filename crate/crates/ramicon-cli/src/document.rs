// SPDX-License-Identifier: MIT OR Apache-2.0
//! The on-disk document format.
//!
//! Every file is a JSON envelope `{schema_version, kind, body}`. Rationals are
//! strings such as `"-3/4"`. An element of `Q(ζ_R)` is written as an array of
//! rational strings giving its coordinates in the power basis `1, ζ, ζ², …`;
//! on input a bare rational string is also accepted. Field order in every
//! record is fixed by the struct declarations below, so rendering is
//! deterministic.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ramicon_core::algebra::{
    parse_rational, render_rational, CycField, CycNum, EpsRing, Field, FieldExt, Mat, SeriesMatrix, Var,
};
use ramicon_core::connection::{Connection, Gauge};
use ramicon_core::exponent::{DeformationDirection, RamifiedExponent};
use ramicon_core::isomonodromy::HorizontalLift;

use crate::failure::CliError;

/// The only schema version this build reads and writes.
pub const SCHEMA_VERSION: &str = "1";

/// What a document body holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// A ramified exponent.
    Exponent,
    /// A deformation direction.
    Direction,
    /// A connection matrix.
    Connection,
    /// A horizontal lift.
    Lift,
    /// A computed report.
    Report,
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: String,
    kind: Kind,
    body: T,
}

/// Renders a body inside an envelope, with a trailing newline.
pub fn render<T: Serialize>(kind: Kind, body: &T) -> Result<String, CliError> {
    let env = Envelope { schema_version: SCHEMA_VERSION.to_string(), kind, body };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses an envelope of the expected kind and returns its body.
pub fn parse<T: DeserializeOwned>(text: &str, expected: Kind) -> Result<T, CliError> {
    let (kind, body) = parse_any(text)?;
    if kind != expected {
        return Err(CliError::Parse(format!("expected a {expected:?} document, found {kind:?}")));
    }
    serde_json::from_value(body).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parses an envelope of any kind.
pub fn parse_any(text: &str) -> Result<(Kind, serde_json::Value), CliError> {
    let env: Envelope<serde_json::Value> = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(CliError::Parse(format!("unsupported schema_version {:?}", env.schema_version)));
    }
    Ok((env.kind, env.body))
}

/// A field element: a coordinate array, or a bare rational string on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumDoc {
    /// A rational number.
    Rational(String),
    /// Power-basis coordinates.
    Coordinates(Vec<String>),
}

impl NumDoc {
    /// Encodes an element as its power-basis coordinates.
    pub fn encode(x: &CycNum) -> NumDoc {
        NumDoc::Coordinates(x.coeffs().iter().map(render_rational).collect())
    }

    /// Decodes into `field`.
    pub fn decode(&self, field: &Field) -> Result<CycNum, CliError> {
        match self {
            NumDoc::Rational(s) => Ok(field.rational(parse_rational(s)?)),
            NumDoc::Coordinates(v) => {
                let coeffs = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
                Ok(field.from_coeffs(coeffs)?)
            }
        }
    }
}

fn encode_table(t: &[Vec<CycNum>]) -> Vec<Vec<NumDoc>> {
    t.iter().map(|row| row.iter().map(NumDoc::encode).collect()).collect()
}

fn decode_table(t: &[Vec<NumDoc>], field: &Field) -> Result<Vec<Vec<CycNum>>, CliError> {
    t.iter().map(|row| row.iter().map(|x| x.decode(field)).collect()).collect()
}

/// Builds the field of the given order after checking it is supported.
pub fn field_of_order(order: u32) -> Result<Field, CliError> {
    if order == 0 || order > 64 {
        return Err(CliError::Parse(format!("field_order {order} is outside 1..=64")));
    }
    Ok(CycField::new(order))
}

/// A ramified exponent: `a[k][l]` is the coefficient `a_{k,l}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentDoc {
    /// Order `R` of the coefficient field `Q(ζ_R)`.
    #[serde(default = "default_order")]
    pub field_order: u32,
    /// Ramification index.
    pub r: usize,
    /// Pole order.
    pub m: usize,
    /// The `r × m` coefficient table.
    #[serde(alias = "coefficients")]
    pub a: Vec<Vec<NumDoc>>,
}

fn default_order() -> u32 {
    1
}

impl ExponentDoc {
    /// Encodes an exponent.
    pub fn encode(nu: &RamifiedExponent) -> ExponentDoc {
        ExponentDoc {
            field_order: nu.field().order(),
            r: nu.r(),
            m: nu.m(),
            a: encode_table(nu.table()),
        }
    }

    /// Decodes into `Q(ζ_R)` for the declared order `R`.
    pub fn decode(&self) -> Result<RamifiedExponent, CliError> {
        self.decode_in(&field_of_order(self.field_order)?)
    }

    /// Decodes into a field whose order is a multiple of the declared one.
    pub fn decode_in(&self, field: &Field) -> Result<RamifiedExponent, CliError> {
        let own = field_of_order(self.field_order)?;
        check_table_shape(&self.a, self.r, self.m, "exponent")?;
        let table = embed_table(&decode_table(&self.a, &own)?, field)?;
        Ok(RamifiedExponent::new(field, self.r, self.m, table)?)
    }
}

fn check_table_shape(t: &[Vec<NumDoc>], rows: usize, cols: usize, what: &str) -> Result<(), CliError> {
    if t.len() != rows || t.iter().any(|row| row.len() != cols) {
        return Err(CliError::Parse(format!("{what} table must be {rows} × {cols}")));
    }
    Ok(())
}

fn embed_table(t: &[Vec<CycNum>], field: &Field) -> Result<Vec<Vec<CycNum>>, CliError> {
    t.iter().map(|row| row.iter().map(|x| Ok(x.embed(field)?)).collect()).collect()
}

/// A deformation direction: `b[k][l]` is the coefficient `b_{k,l}` for `l < m − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionDoc {
    /// Order `R` of the coefficient field.
    #[serde(default = "default_order")]
    pub field_order: u32,
    /// Ramification index.
    pub r: usize,
    /// Pole order.
    pub m: usize,
    /// The `r × (m − 1)` coefficient table.
    #[serde(alias = "coefficients")]
    pub b: Vec<Vec<NumDoc>>,
}

impl DirectionDoc {
    /// Encodes a direction.
    pub fn encode(d: &DeformationDirection) -> DirectionDoc {
        DirectionDoc { field_order: d.field().order(), r: d.r(), m: d.m(), b: encode_table(d.table()) }
    }

    /// Decodes into a field whose order is a multiple of the declared one.
    pub fn decode_in(&self, field: &Field) -> Result<DeformationDirection, CliError> {
        let own = field_of_order(self.field_order)?;
        if self.m < 2 {
            return Err(CliError::Parse("direction needs m ≥ 2".into()));
        }
        check_table_shape(&self.b, self.r, self.m - 1, "direction")?;
        let table = embed_table(&decode_table(&self.b, &own)?, field)?;
        Ok(DeformationDirection::new(field, self.r, self.m, table)?)
    }
}

/// A matrix of truncated series: `coeffs[e]` is the matrix of `x^{ord+e}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    /// Variable name, `z` or `w`.
    pub var: String,
    /// Lowest stored exponent.
    pub ord: i64,
    /// Exponents `≥ prec` are unknown.
    pub prec: i64,
    /// Number of rows.
    pub rows: usize,
    /// Number of columns.
    pub cols: usize,
    /// Coefficient matrices, row major.
    pub coeffs: Vec<Vec<Vec<NumDoc>>>,
}

impl SeriesDoc {
    /// Encodes a series matrix.
    pub fn encode(s: &SeriesMatrix) -> SeriesDoc {
        SeriesDoc {
            var: s.var().to_string(),
            ord: s.ord(),
            prec: s.prec(),
            rows: s.rows(),
            cols: s.cols(),
            coeffs: s
                .coeff_mats()
                .iter()
                .map(|m| (0..m.rows()).map(|i| m.row(i).iter().map(NumDoc::encode).collect()).collect())
                .collect(),
        }
    }

    /// Decodes into `field`, embedding from the field of order `own`.
    pub fn decode_in(&self, own: &Field, field: &Field) -> Result<SeriesMatrix, CliError> {
        let var = match self.var.as_str() {
            "z" => Var::Z,
            "w" => Var::W,
            other => return Err(CliError::Parse(format!("unknown variable {other:?}"))),
        };
        let mut mats = Vec::new();
        for m in &self.coeffs {
            if m.len() != self.rows || m.iter().any(|row| row.len() != self.cols) {
                return Err(CliError::Parse(format!("coefficient matrix must be {} × {}", self.rows, self.cols)));
            }
            let table = embed_table(&decode_table(m, own)?, field)?;
            mats.push(Mat::from_fn(field, self.rows, self.cols, |i, j| table[i][j].clone()));
        }
        Ok(SeriesMatrix::new(field, var, self.rows, self.cols, self.ord, self.prec, mats)?)
    }
}

/// A connection `d + A dx/x^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionDoc {
    /// Order `R` of the coefficient field.
    #[serde(default = "default_order")]
    pub field_order: u32,
    /// Pole order `m`.
    pub pole_order: usize,
    /// The matrix `A`.
    pub matrix: SeriesDoc,
}

impl ConnectionDoc {
    /// Encodes a connection.
    pub fn encode(c: &Connection) -> ConnectionDoc {
        ConnectionDoc {
            field_order: c.field().order(),
            pole_order: c.pole_order(),
            matrix: SeriesDoc::encode(c.matrix()),
        }
    }

    /// Decodes into a field whose order is a multiple of the declared one.
    pub fn decode_in(&self, field: &Field) -> Result<Connection, CliError> {
        let own = field_of_order(self.field_order)?;
        Ok(Connection::new(self.matrix.decode_in(&own, field)?, self.pole_order)?)
    }
}

/// A gauge with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeDoc {
    /// Order `R` of the coefficient field.
    pub field_order: u32,
    /// The matrix `P`.
    pub matrix: SeriesDoc,
    /// The matrix `P⁻¹`.
    pub inverse: SeriesDoc,
}

impl GaugeDoc {
    /// Encodes a gauge.
    pub fn encode(g: &Gauge) -> GaugeDoc {
        GaugeDoc {
            field_order: g.matrix().field().order(),
            matrix: SeriesDoc::encode(g.matrix()),
            inverse: SeriesDoc::encode(g.inverse_matrix()),
        }
    }
}

/// A horizontal lift: the base connection with its `C_j` and `B_j` matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftDoc {
    /// Order `R` of the coefficient field.
    pub field_order: u32,
    /// Parameter ring name.
    pub ring: String,
    /// The base connection.
    pub base: ConnectionDoc,
    /// `B_j` keyed by parameter index.
    pub b: BTreeMap<String, SeriesDoc>,
    /// `C_j` keyed by parameter index.
    pub c: BTreeMap<String, SeriesDoc>,
    /// The mixed `B₁₂`, if any.
    pub b12: Option<SeriesDoc>,
    /// The mixed `C₁₂`, if any.
    pub c12: Option<SeriesDoc>,
    /// Exponent below which each `C_j` agrees with its target, when tracked.
    pub certified_window: Option<i64>,
}

const RINGS: [EpsRing; 4] = [EpsRing::None, EpsRing::Dual, EpsRing::Bidual, EpsRing::BidualTruncated];

impl LiftDoc {
    /// Encodes a lift.
    pub fn encode(l: &HorizontalLift) -> LiftDoc {
        let encode_map = |m: &BTreeMap<u8, SeriesMatrix>| -> BTreeMap<String, SeriesDoc> {
            m.iter().map(|(k, v)| (k.to_string(), SeriesDoc::encode(v))).collect()
        };
        LiftDoc {
            field_order: l.base.field().order(),
            ring: l.ring.name().to_string(),
            base: ConnectionDoc::encode(&l.base),
            b: encode_map(&l.b),
            c: encode_map(&l.c),
            b12: l.b12.as_ref().map(SeriesDoc::encode),
            c12: l.c12.as_ref().map(SeriesDoc::encode),
            certified_window: l.certified_window,
        }
    }

    /// Decodes a lift in its own field.
    pub fn decode(&self) -> Result<HorizontalLift, CliError> {
        let field = field_of_order(self.field_order)?;
        let ring = RINGS
            .into_iter()
            .find(|r| r.name() == self.ring)
            .ok_or_else(|| CliError::Parse(format!("unknown parameter ring {:?}", self.ring)))?;
        let decode_map = |m: &BTreeMap<String, SeriesDoc>| -> Result<BTreeMap<u8, SeriesMatrix>, CliError> {
            m.iter()
                .map(|(k, v)| {
                    let key: u8 = k.parse().map_err(|_| CliError::Parse(format!("bad parameter index {k:?}")))?;
                    if !ring.params().contains(&ramicon_core::algebra::forms::param_bit(key)) {
                        return Err(CliError::Parse(format!("parameter {key} is not in ring {}", ring.name())));
                    }
                    Ok((key, v.decode_in(&field, &field)?))
                })
                .collect()
        };
        let decode_opt = |s: &Option<SeriesDoc>| s.as_ref().map(|s| s.decode_in(&field, &field)).transpose();
        Ok(HorizontalLift {
            base: self.base.decode_in(&field)?,
            ring,
            b: decode_map(&self.b)?,
            c: decode_map(&self.c)?,
            b12: decode_opt(&self.b12)?,
            c12: decode_opt(&self.c12)?,
            certified_window: self.certified_window,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        let f = CycField::new(3);
        for x in [f.frac(-3, 4), f.zeta_pow(1), &f.int(2) + &f.zeta_pow(2)] {
            assert_eq!(NumDoc::encode(&x).decode(&f).unwrap(), x);
        }
        assert_eq!(NumDoc::encode(&f.frac(5, 2)), NumDoc::Coordinates(vec!["5/2".into(), "0".into()]));
        assert_eq!(NumDoc::Rational("5/2".into()).decode(&f).unwrap(), f.frac(5, 2));
    }

    #[test]
    fn exponent_documents_round_trip() {
        let f = CycField::new(1);
        let nu = RamifiedExponent::simple(&f, 3, 2).unwrap();
        let text = render(Kind::Exponent, &ExponentDoc::encode(&nu)).unwrap();
        let back: ExponentDoc = parse(&text, Kind::Exponent).unwrap();
        assert_eq!(back.decode().unwrap(), nu);
        assert_eq!(render(Kind::Exponent, &back).unwrap(), text);
        assert!(parse::<ExponentDoc>(&text, Kind::Lift).is_err());
    }

    #[test]
    fn bad_rational_is_a_parse_error() {
        let f = CycField::new(1);
        assert!(matches!(NumDoc::Rational("1/0".into()).decode(&f), Err(CliError::Core(_))));
    }
}
