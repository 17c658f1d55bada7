//! JSON views of verdicts and classifications, and plain-text summaries of
//! the campaign reports.
//!
//! Matrices inside a report are written as rows of scalar strings; the
//! field is stated once at the top level.

use serde_json::{json, Map, Value};

use crate::division::{DivisionVerdict, NonSingularityCertificate};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::matrix::{rows_to_docs, Matrix};
use crate::preserver::{ClassificationReport, PinchData, PreservationVerdict, PreserverClassification};
use crate::subspace::{FullNonsingularVerdict, MaximalSingularType, Refutation, SingularityVerdict};

fn rows(m: &Matrix) -> Value {
    json!(rows_to_docs(m))
}

fn column(m: &Matrix) -> Value {
    json!((0..m.rows()).map(|i| m.get(i, 0).to_string()).collect::<Vec<_>>())
}

fn scalars(v: &[Scalar]) -> Value {
    json!(v.iter().map(Scalar::to_string).collect::<Vec<_>>())
}

pub fn certificate(c: &NonSingularityCertificate) -> Value {
    serde_json::to_value(c).unwrap_or(Value::Null)
}

pub fn preservation(v: &PreservationVerdict) -> Value {
    match v {
        PreservationVerdict::ExhaustivePass(k) => json!({"verdict": "exhaustive_pass", "checked": k}),
        PreservationVerdict::SampledPass(k) => json!({"verdict": "sampled_pass", "checked": k}),
        PreservationVerdict::Refuted(m) => json!({"verdict": "refuted", "witness": rows(m)}),
    }
}

pub fn refutation(r: &Refutation) -> Value {
    match r {
        Refutation::WrongDimension { dim, n } => json!({"reason": "wrong_dimension", "dim": dim, "n": n}),
        Refutation::Singular(m) => json!({"reason": "singular_member", "witness": rows(m)}),
    }
}

pub fn full_nonsingular(v: &FullNonsingularVerdict) -> Value {
    match v {
        FullNonsingularVerdict::Verified(c) => json!({"verdict": "verified", "certificate": certificate(c)}),
        FullNonsingularVerdict::Refuted(r) => json!({"verdict": "refuted", "refutation": refutation(r)}),
        FullNonsingularVerdict::Unknown { samples_tested } => {
            json!({"verdict": "unknown", "samples_tested": samples_tested})
        }
    }
}

pub fn singularity(v: &SingularityVerdict) -> Value {
    match v {
        SingularityVerdict::Singular => json!({"verdict": "singular"}),
        SingularityVerdict::ContainsInvertible(m) => json!({"verdict": "contains_invertible", "witness": rows(m)}),
    }
}

pub fn maximal_singular(t: &MaximalSingularType) -> Value {
    match t {
        MaximalSingularType::KernelType(x) => json!({"type": "kernel", "vector": column(x)}),
        MaximalSingularType::ImageType(y) => json!({"type": "image", "vector": column(y)}),
    }
}

pub fn division(v: &DivisionVerdict) -> Value {
    match v {
        DivisionVerdict::Division(c) => json!({"verdict": "division", "certificate": certificate(c)}),
        DivisionVerdict::NotDivision { witness, annihilated } => json!({
            "verdict": "not_division",
            "witness": scalars(witness),
            "annihilated": scalars(annihilated),
        }),
        DivisionVerdict::Unknown { samples_tested } => json!({"verdict": "unknown", "samples_tested": samples_tested}),
    }
}

fn pinch(d: &PinchData) -> Value {
    json!({
        "x": column(&d.x),
        "a": rows(&d.a),
        "subspace": d.v.canonical_basis().iter().map(rows).collect::<Vec<_>>(),
        "subspace_status": full_nonsingular(&d.vstatus),
    })
}

pub fn classification(c: &PreserverClassification) -> Value {
    let mut out = Map::new();
    out.insert("class".into(), json!(c.tag()));
    match c {
        PreserverClassification::FrobeniusDirect { p, q } | PreserverClassification::FrobeniusTwisted { p, q } => {
            out.insert("p".into(), rows(p));
            out.insert("q".into(), rows(q));
        }
        PreserverClassification::PinchDirect(d) | PreserverClassification::PinchTwisted(d) => {
            out.insert("pinch".into(), pinch(d));
        }
        PreserverClassification::Unverified { twisted, pinch: d } => {
            out.insert("twisted".into(), json!(twisted));
            out.insert("pinch".into(), pinch(d));
        }
        PreserverClassification::NotPreserver { witness } => {
            out.insert("witness".into(), rows(witness));
        }
    }
    Value::Object(out)
}

pub fn classification_report(r: &ClassificationReport) -> Value {
    let mut v = classification(&r.classification);
    if let Value::Object(m) = &mut v {
        m.insert("preservation".into(), preservation(&r.preservation));
    }
    v
}

/// The JSON document written on failure when machine-readable errors are on.
pub fn error(e: &Error) -> Value {
    json!({"error": {"kind": e.kind(), "message": e.to_string()}})
}

fn field_of<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.as_object().and_then(|m| m.get(key))
}

fn num(v: &Value, key: &str) -> String {
    field_of(v, key).map(|x| x.to_string().trim_matches('"').to_string()).unwrap_or_else(|| "?".into())
}

fn anomalies(v: &Value, out: &mut String) {
    let list = field_of(v, "anomalies").and_then(Value::as_array).cloned().unwrap_or_default();
    if list.is_empty() {
        out.push_str("anomalies: none\n");
    } else {
        out.push_str(&format!("anomalies: {}\n", list.len()));
        for a in list {
            out.push_str(&format!("  - {}\n", a.as_str().unwrap_or(&a.to_string())));
        }
    }
}

/// Renders any campaign or audit report as a short text summary.
pub fn render(v: &Value) -> Result<String> {
    let has = |k: &str| field_of(v, k).is_some();
    let mut out = String::new();
    if has("preserver_count") {
        out.push_str(&format!("enumeration over {} with n = {}\n", num(v, "field"), num(v, "n")));
        out.push_str(&format!("  maps scanned:        {}\n", num(v, "total_maps")));
        out.push_str(&format!(
            "  preservers:          {} ({} bijective, {} singular)\n",
            num(v, "preserver_count"),
            num(v, "bijective_count"),
            num(v, "singular_count")
        ));
        out.push_str(&format!(
            "  constructive set:    {} Frobenius, {} pinch\n",
            num(v, "frobenius_expected"),
            num(v, "pinch_expected")
        ));
        out.push_str(&format!("  full non-singular subspaces: {}\n", num(v, "full_nonsingular_subspaces")));
        if let Some(h) = field_of(v, "class_histogram").and_then(Value::as_object) {
            for (tag, count) in h {
                out.push_str(&format!("    {tag:<18}{count}\n"));
            }
        }
        out.push_str(&format!("  partitions: {}, seed: {}, wall time: {} s\n", num(v, "partitions"), num(v, "seed"), num(v, "wall_time_secs")));
    } else if has("image_equals_gl") {
        out.push_str(&format!("invertibility equivalences over {} with n = {} ({})\n", num(v, "field"), num(v, "n"), num(v, "mode")));
        out.push_str(&format!("  maps checked:        {}\n", num(v, "maps_checked")));
        out.push_str(&format!("  f(GL) = GL:          {}\n", num(v, "image_equals_gl")));
        out.push_str(&format!("  f^-1(GL) = GL:       {}\n", num(v, "preimage_equals_gl")));
        out.push_str(&format!("  bijective preservers: {}\n", num(v, "bijective_preservers")));
        out.push_str(&format!("  sets coincide:       {}\n", num(v, "sets_coincide")));
    } else if has("maximal_singular") {
        out.push_str(&format!("singular subspaces of M_{} over {} ({})\n", num(v, "n"), num(v, "field"), num(v, "mode")));
        out.push_str(&format!("  subspaces examined:  {}\n", num(v, "total_subspaces")));
        out.push_str(&format!("  largest singular dim: {} (bound {})\n", num(v, "max_singular_dim"), num(v, "bound")));
        out.push_str(&format!(
            "  maximal singular:    {} ({} kernel-type, {} image-type)\n",
            num(v, "maximal_singular"),
            num(v, "kernel_type"),
            num(v, "image_type")
        ));
    } else if has("vectors") && has("checks") {
        out.push_str(&format!("column surjectivity over {} with n = {}\n", num(v, "field"), num(v, "n")));
        out.push_str(&format!(
            "  {} preservers x {} vectors = {} checks, {} failures\n",
            num(v, "preservers"),
            num(v, "vectors"),
            num(v, "checks"),
            num(v, "failures")
        ));
    } else if let Some(cases) = field_of(v, "cases").and_then(Value::as_array) {
        out.push_str("span of invertible matrices\n");
        for c in cases {
            out.push_str(&format!("  n = {} over {}: {}\n", num(c, "n"), num(c, "field"), if c["spans"] == json!(true) { "spans" } else { "does not span" }));
        }
    } else {
        return Err(Error::Parse { what: "report", input: "unrecognized report kind".into() });
    }
    anomalies(v, &mut out);
    Ok(out)
}
