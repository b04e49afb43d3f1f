//! JSON readers and writers for every externally visible structure.
//!
//! Conventions used repo-wide: multi-indexes serialize as the string
//! "i1,i2,...,id", rationals as "p/q" (or "p" when the denominator is 1),
//! polynomials as a bare map from exponent-vector strings to rational
//! strings, and matrices as row-major nested lists of rational strings.

use serde_json::{json, Map, Value};

use crate::combinat::{AugmentedPartition, MultiIndex, MultiIndexPartition};
use crate::cumulant::{SequenceTable, TableKind};
use crate::error::{Error, Result};
use crate::mc::{
    CompareReport, FiniteSupport, MatrixSpec, ModelSpec, MomentEstimate, RandomSumSpec,
    SampleSpec,
};
use crate::models::{GaussianSpec, MertonSpec, VgSpec};
use crate::ring::{parse_rational, rational_string, Rational, SparsePoly};
use crate::series::TruncatedSeries;
use crate::symfunc::TraceMomentTable;

fn parse_err(what: &str) -> Error {
    Error::Parse(what.to_string())
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| parse_err(&format!("{what}: expected object")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| parse_err(&format!("{what}: expected array")))
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    v.as_str()
        .ok_or_else(|| parse_err(&format!("{what}: expected string")))
}

fn field<'v>(obj: &'v Map<String, Value>, name: &str) -> Result<&'v Value> {
    obj.get(name)
        .ok_or_else(|| parse_err(&format!("missing field {name:?}")))
}

fn parse_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| parse_err(&format!("{what}: expected non-negative integer")))
}

fn rational_field(v: &Value, what: &str) -> Result<Rational> {
    parse_rational(as_str(v, what)?)
}

fn rational_vec(v: &Value, what: &str) -> Result<Vec<Rational>> {
    as_array(v, what)?
        .iter()
        .map(|x| rational_field(x, what))
        .collect()
}

fn rational_matrix(v: &Value, what: &str) -> Result<Vec<Vec<Rational>>> {
    as_array(v, what)?
        .iter()
        .map(|row| rational_vec(row, what))
        .collect()
}

/// Parses a JSON list of rational strings.
pub fn rationals_from_json(v: &Value) -> Result<Vec<Rational>> {
    rational_vec(v, "rationals")
}

/// Parses a row-major JSON matrix of rational strings.
pub fn matrix_from_json(v: &Value) -> Result<Vec<Vec<Rational>>> {
    rational_matrix(v, "matrix")
}

fn rational_vec_json(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(|x| json!(rational_string(x))).collect())
}

fn rational_matrix_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|row| rational_vec_json(row)).collect())
}

// --- sequence tables ---

pub fn table_to_json(t: &SequenceTable<Rational>) -> Value {
    let mut entries = Map::new();
    for (i, c) in t.iter() {
        entries.insert(i.to_string(), json!(rational_string(c)));
    }
    json!({
        "d": t.dim(),
        "order": t.order(),
        "kind": t.kind().name(),
        "entries": entries,
    })
}

pub fn table_from_json(v: &Value) -> Result<SequenceTable<Rational>> {
    let obj = as_object(v, "table")?;
    let d = parse_u64(field(obj, "d")?, "d")? as usize;
    let order = parse_u64(field(obj, "order")?, "order")? as u32;
    let kind = match as_str(field(obj, "kind")?, "kind")? {
        "cumulant" => TableKind::Cumulant,
        "moment" => TableKind::Moment,
        other => return Err(parse_err(&format!("unknown table kind {other:?}"))),
    };
    let mut t = SequenceTable::new(kind, d, order)?;
    for (key, value) in as_object(field(obj, "entries")?, "entries")? {
        let index: MultiIndex = key.parse()?;
        t.set(index, rational_field(value, "entry")?)?;
    }
    Ok(t)
}

// --- truncated series ---

pub fn series_to_json(s: &TruncatedSeries<Rational>) -> Value {
    let mut coeffs = Map::new();
    for (i, c) in s.iter() {
        coeffs.insert(i.to_string(), json!(rational_string(c)));
    }
    json!({
        "d": s.dim(),
        "order": s.order(),
        "coeffs": coeffs,
    })
}

pub fn series_from_json(v: &Value) -> Result<TruncatedSeries<Rational>> {
    let obj = as_object(v, "series")?;
    let d = parse_u64(field(obj, "d")?, "d")? as usize;
    let order = parse_u64(field(obj, "order")?, "order")? as u32;
    let mut s = TruncatedSeries::new(d, order)?;
    for (key, value) in as_object(field(obj, "coeffs")?, "coeffs")? {
        let index: MultiIndex = key.parse()?;
        s.set(index, rational_field(value, "coefficient")?)?;
    }
    Ok(s)
}

// --- polynomials ---

/// The bare-map polynomial format: exponent-vector string -> rational
/// string. Variable names travel alongside, not inside.
pub fn poly_to_json(p: &SparsePoly<Rational>) -> Value {
    let mut terms = Map::new();
    for (exps, coeff) in p.terms() {
        terms.insert(exps.to_string(), json!(rational_string(coeff)));
    }
    Value::Object(terms)
}

pub fn poly_from_json(vars: Vec<String>, v: &Value) -> Result<SparsePoly<Rational>> {
    let mut p = SparsePoly::zero_in(vars);
    for (key, value) in as_object(v, "polynomial")? {
        let exps: MultiIndex = key.parse()?;
        if exps.dim() != p.nvars() {
            return Err(Error::DimensionMismatch {
                expected: p.nvars(),
                found: exps.dim(),
            });
        }
        p.add_term(exps, rational_field(value, "coefficient")?);
    }
    Ok(p)
}

/// A polynomial wrapped with its variable names, for outputs where the
/// names matter.
pub fn named_poly_to_json(p: &SparsePoly<Rational>) -> Value {
    json!({
        "vars": p.vars(),
        "terms": poly_to_json(p),
    })
}

pub fn named_poly_from_json(v: &Value) -> Result<SparsePoly<Rational>> {
    let obj = as_object(v, "polynomial")?;
    let vars: Vec<String> = as_array(field(obj, "vars")?, "vars")?
        .iter()
        .map(|x| as_str(x, "variable name").map(str::to_string))
        .collect::<Result<_>>()?;
    poly_from_json(vars, field(obj, "terms")?)
}

// --- partitions ---

pub fn partition_to_json(p: &MultiIndexPartition) -> Value {
    let columns: Vec<Value> = p
        .parts()
        .iter()
        .map(|(col, mult)| json!([col.to_string(), mult]))
        .collect();
    let coefficient = crate::combinat::partition_coefficient(p.target(), p)
        .map(|c| rational_string(&c))
        .unwrap_or_default();
    json!({
        "target": p.target().to_string(),
        "columns": columns,
        "length": p.length(),
        "coefficient": coefficient,
    })
}

pub fn partition_from_json(v: &Value) -> Result<MultiIndexPartition> {
    let obj = as_object(v, "partition")?;
    let target: MultiIndex = as_str(field(obj, "target")?, "target")?.parse()?;
    let mut parts = Vec::new();
    for col in as_array(field(obj, "columns")?, "columns")? {
        let pair = as_array(col, "column")?;
        if pair.len() != 2 {
            return Err(parse_err("column: expected [index, multiplicity]"));
        }
        let index: MultiIndex = as_str(&pair[0], "column index")?.parse()?;
        let mult = parse_u64(&pair[1], "multiplicity")? as u32;
        parts.push((index, mult));
    }
    MultiIndexPartition::new(target, parts)
}

pub fn partitions_to_json(ps: &[MultiIndexPartition]) -> Value {
    Value::Array(ps.iter().map(partition_to_json).collect())
}

pub fn augmented_partition_to_json(a: &AugmentedPartition) -> Value {
    let columns: Vec<Value> = a
        .grouped_columns()
        .iter()
        .map(|(col, total, origins)| {
            json!({
                "column": col.to_string(),
                "multiplicity": total,
                "origins": origins
                    .iter()
                    .map(|(slot, m)| json!([slot + 1, m]))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "target": a.target().to_string(),
        "block_lengths": a.block_lengths(),
        "columns": columns,
        "weight": rational_string(&a.weight()),
    })
}

// --- trace moments ---

pub fn trace_table_to_json(tm: &TraceMomentTable) -> Value {
    json!({
        "n": tm.n(),
        "moments": rational_vec_json(tm.moments()),
    })
}

pub fn trace_table_from_json(v: &Value) -> Result<TraceMomentTable> {
    let obj = as_object(v, "trace moments")?;
    let n = parse_u64(field(obj, "n")?, "n")? as usize;
    let moments = rational_vec(field(obj, "moments")?, "moments")?;
    TraceMomentTable::new(n, moments)
}

// --- model specs ---

pub fn gaussian_spec_to_json(g: &GaussianSpec) -> Value {
    json!({
        "mean": rational_vec_json(g.mean()),
        "cov": rational_matrix_json(g.cov()),
    })
}

pub fn gaussian_spec_from_json(v: &Value) -> Result<GaussianSpec> {
    let obj = as_object(v, "gaussian spec")?;
    GaussianSpec::new(
        rational_vec(field(obj, "mean")?, "mean")?,
        rational_matrix(field(obj, "cov")?, "cov")?,
    )
}

pub fn merton_spec_to_json(m: &MertonSpec) -> Value {
    json!({
        "drift": rational_vec_json(m.drift()),
        "cov": rational_matrix_json(m.cov()),
        "jump_intensity": rational_string(m.jump_intensity()),
        "jump": gaussian_spec_to_json(m.jump()),
        "horizon": rational_string(m.horizon()),
    })
}

pub fn merton_spec_from_json(v: &Value) -> Result<MertonSpec> {
    let obj = as_object(v, "merton spec")?;
    MertonSpec::new(
        rational_vec(field(obj, "drift")?, "drift")?,
        rational_matrix(field(obj, "cov")?, "cov")?,
        rational_field(field(obj, "jump_intensity")?, "jump_intensity")?,
        gaussian_spec_from_json(field(obj, "jump")?)?,
        rational_field(field(obj, "horizon")?, "horizon")?,
    )
}

pub fn vg_spec_to_json(s: &VgSpec) -> Value {
    json!({
        "t": rational_string(s.t()),
        "nu": rational_string(s.nu()),
        "theta": rational_vec_json(s.theta()),
        "cov": rational_matrix_json(s.cov()),
    })
}

pub fn vg_spec_from_json(v: &Value) -> Result<VgSpec> {
    let obj = as_object(v, "vg spec")?;
    VgSpec::new(
        rational_field(field(obj, "t")?, "t")?,
        rational_field(field(obj, "nu")?, "nu")?,
        rational_vec(field(obj, "theta")?, "theta")?,
        rational_matrix(field(obj, "cov")?, "cov")?,
    )
}

fn support_to_json(s: &FiniteSupport) -> Value {
    Value::Array(
        s.points()
            .iter()
            .map(|(v, p)| json!([rational_string(v), rational_string(p)]))
            .collect(),
    )
}

fn support_from_json(v: &Value) -> Result<FiniteSupport> {
    let mut points = Vec::new();
    for pair in as_array(v, "support")? {
        let pair = as_array(pair, "support point")?;
        if pair.len() != 2 {
            return Err(parse_err("support point: expected [value, probability]"));
        }
        points.push((
            rational_field(&pair[0], "support value")?,
            rational_field(&pair[1], "support probability")?,
        ));
    }
    FiniteSupport::new(points)
}

pub fn sample_spec_to_json(s: &SampleSpec) -> Value {
    let (model, params) = match &s.model {
        ModelSpec::Merton(m) => ("merton", merton_spec_to_json(m)),
        ModelSpec::VarianceGamma(v) => ("vg", vg_spec_to_json(v)),
        ModelSpec::RandomSum(rs) => (
            "random-sum",
            json!({
                "intensity": rational_string(&rs.intensity),
                "support": support_to_json(&rs.jump),
            }),
        ),
        ModelSpec::Matrix(m) => (
            "matrix",
            json!({
                "n": m.n,
                "support": support_to_json(&m.eigenvalues),
            }),
        ),
    };
    json!({
        "model": model,
        "params": params,
        "samples": s.samples,
        "seed": s.seed,
        "max_order": s.max_order,
    })
}

pub fn sample_spec_from_json(v: &Value) -> Result<SampleSpec> {
    let obj = as_object(v, "sample spec")?;
    let params = field(obj, "params")?;
    let model = match as_str(field(obj, "model")?, "model")? {
        "merton" => ModelSpec::Merton(merton_spec_from_json(params)?),
        "vg" => ModelSpec::VarianceGamma(vg_spec_from_json(params)?),
        "random-sum" => {
            let p = as_object(params, "random-sum params")?;
            ModelSpec::RandomSum(RandomSumSpec {
                intensity: rational_field(field(p, "intensity")?, "intensity")?,
                jump: support_from_json(field(p, "support")?)?,
            })
        }
        "matrix" => {
            let p = as_object(params, "matrix params")?;
            ModelSpec::Matrix(MatrixSpec {
                n: parse_u64(field(p, "n")?, "n")? as usize,
                eigenvalues: support_from_json(field(p, "support")?)?,
            })
        }
        other => return Err(parse_err(&format!("unknown model {other:?}"))),
    };
    Ok(SampleSpec {
        model,
        samples: parse_u64(field(obj, "samples")?, "samples")?,
        seed: parse_u64(field(obj, "seed")?, "seed")?,
        max_order: parse_u64(field(obj, "max_order")?, "max_order")? as u32,
    })
}

// --- estimates and comparison reports ---

pub fn estimates_to_json(estimates: &[MomentEstimate]) -> Value {
    Value::Array(
        estimates
            .iter()
            .map(|e| {
                json!({
                    "index": e.index.to_string(),
                    "estimate": e.estimate,
                    "se": e.std_error,
                    "samples": e.samples,
                })
            })
            .collect(),
    )
}

/// The machine-readable validation report.
pub fn validation_report_to_json(spec: &SampleSpec, report: &CompareReport) -> Value {
    json!({
        "spec": sample_spec_to_json(spec),
        "seed": spec.seed,
        "k": report.threshold,
        "all_pass": report.all_pass,
        "results": report
            .rows
            .iter()
            .map(|r| {
                json!({
                    "index": r.index.to_string(),
                    "symbolic": rational_string(&r.symbolic),
                    "estimate": r.estimate,
                    "se": r.std_error,
                    "pass": r.pass,
                })
            })
            .collect::<Vec<_>>(),
    })
}
