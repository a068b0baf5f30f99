use std::time::Instant;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::bundle::{FiberClass, SingularFiber};
use crate::census::{
    a_const, compare_table, k_bar_profile, k_const, leading_coeff, number_field_leading, predict,
    CompareRow, SingularProfile,
};
use crate::curve::{zeta_truncated_fixed, zeta_value};
use crate::decimal::{rational_string, Fixed};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf::FieldDesc;
use crate::linsys::{prime_count, threshold_scan, ScanOptions};

use super::config::{Context, RunConfig, Task, DEFAULT_TRUNCATION};

/// A finished or partially finished run.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub error: Option<Error>,
    pub rows: Vec<CompareRow>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            None => 0,
            Some(e) => exit_code(e),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EnumerationBudgetExceeded { .. } => 3,
        Error::CrossCheck(_) => 1,
        _ => 2,
    }
}

struct Timer {
    on: bool,
    marks: Map<String, Value>,
}

impl Timer {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        if self.on {
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            self.marks.insert(name.to_string(), json!(ms));
        }
        out
    }
}

fn rational_json(r: &BigRational, digits: u32) -> Value {
    json!({
        "exact": rational_string(r),
        "decimal": Fixed::from_rational(r, digits).to_string(),
        "precision": digits,
    })
}

fn res_json(field: &FieldDesc, x: &[crate::gf::FieldElem]) -> Value {
    json!(x.iter().map(|&c| field.digits(c)).collect::<Vec<_>>())
}

fn fiber_json(field: &FieldDesc, s: &SingularFiber) -> Value {
    let mut v = s.point.to_json(field);
    let m = v.as_object_mut().expect("point json is an object");
    m.insert("class".into(), json!(s.class));
    m.insert("vanishing".into(), json!(["a", "b", "c"][s.vanishing]));
    if let Some((e, ep)) = s.line_forms() {
        let line = |l: &[Vec<crate::gf::FieldElem>; 3]| {
            json!(l.iter().map(|x| res_json(field, x)).collect::<Vec<_>>())
        };
        m.insert("lines".into(), json!({"E": line(&e), "E'": line(&ep)}));
    }
    v
}

fn classify(ctx: &Context) -> Value {
    let b = &ctx.bundle;
    let fibers: Vec<Value> = b
        .singular_fibers()
        .iter()
        .map(|s| fiber_json(&ctx.field, s))
        .collect();
    let count = |c: FiberClass| b.singular_fibers().iter().filter(|s| s.class == c).count();
    json!({
        "bundle": b.bundle_json(),
        "singular_fibers": fibers,
        "total_degree": b.singular_fibers().iter().map(|s| s.degree()).sum::<usize>(),
        "split": count(FiberClass::SplitPair),
        "non_split": count(FiberClass::NonSplitPair),
        "trivial_generic_fiber": b.has_trivial_generic_fiber(),
    })
}

fn k_terms(profile: &SingularProfile, d: i64, digits: u32) -> Vec<Value> {
    let dp = d / 2;
    let bounds: Vec<i64> = profile.c2.iter().map(|&m| dp / m as i64).collect();
    let total: i64 = bounds.iter().map(|b| 2 * b + 1).product();
    if total > 4096 {
        return Vec::new();
    }
    let mut b: Vec<i64> = bounds.iter().map(|x| -x).collect();
    let mut out = Vec::new();
    loop {
        let k = k_bar_profile(profile, d, &b).expect("tuple within bounds");
        out.push(json!({"b": b.clone(), "K_bar": rational_json(&k, digits)}));
        let mut i = 0;
        loop {
            if i == b.len() {
                return out;
            }
            if b[i] < bounds[i] {
                b[i] += 1;
                break;
            }
            b[i] = -bounds[i];
            i += 1;
        }
    }
}

fn predict_task(cfg: &RunConfig, ctx: &Context, digits: u32) -> Result<Value> {
    let d = cfg.params.d.expect("validated");
    let q = ctx.bundle.q();
    let zeta = zeta_value(&ctx.curve, q, d + 1)?;
    let profile = SingularProfile::of(&ctx.bundle);
    let mut out = json!({
        "d": d,
        "q": q,
        "zeta": rational_json(&zeta, digits),
        "a": a_const(q, ctx.curve.genus as i64, ctx.bundle.l() as i64, d).to_json(digits),
        "K": k_const(&ctx.bundle, d).to_json(digits),
        "K_terms": k_terms(&profile, d, digits),
        "leading_coeff": leading_coeff(&ctx.bundle, &ctx.curve, d)?.to_json(digits),
    });
    let m = out.as_object_mut().expect("object");
    let preds: Vec<Value> = cfg
        .heights()
        .into_iter()
        .map(|e| {
            let p = predict(&ctx.bundle, &ctx.curve, d, e)?;
            Ok(json!({
                "e": e,
                "main": p.main.to_json(digits),
                "error_scale": p.error_scale.to_json(digits),
            }))
        })
        .collect::<Result<_>>()?;
    if !preds.is_empty() {
        m.insert("predictions".into(), json!(preds));
    }
    if let Some(nf) = &cfg.params.number_field {
        let s = number_field_leading(nf, d, digits)?;
        m.insert("number_field_leading".into(), json!({"decimal": s, "precision": digits}));
    }
    Ok(out)
}

fn n_emp_json(ctx: &Context, d: i64, e_max: i64) -> Result<(Value, Vec<crate::linsys::DimRecord>)> {
    let t = threshold_scan(&ctx.bundle, &ctx.curve, d, 0, e_max)?;
    let v = json!({
        "value": t.n_emp,
        "e_min": t.e_min,
        "e_max": t.e_max,
        "dimension_failures": t.dims.iter().filter(|r| r.dim as i64 != r.chi).count(),
        "surjectivity_failures": t.surjectivity_failures.len(),
    });
    Ok((v, t.dims))
}

fn zeta_task(cfg: &RunConfig, ctx: &Context, digits: u32) -> Result<Value> {
    let q = ctx.bundle.q();
    let b = cfg.params.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let s_list = cfg
        .params
        .s
        .as_ref()
        .map(|s| s.to_vec())
        .unwrap_or_else(|| vec![2, 3, 5]);
    let mut out = Vec::new();
    for s in s_list {
        let exact = zeta_value(&ctx.curve, q, s)?;
        let mut entry = json!({"s": s, "closed_form": rational_json(&exact, digits)});
        if ctx.curve.genus == 0 {
            let trunc: Vec<Value> = (1..=b)
                .map(|k| {
                    let t = zeta_truncated_fixed(q, s, k, digits)?;
                    Ok(json!({"B": k, "decimal": t}))
                })
                .collect::<Result<_>>()?;
            let last = zeta_truncated_fixed(q, s, b, digits)?;
            let gap = Fixed::from_rational(&exact, digits).sub(&last).abs();
            let m = entry.as_object_mut().expect("object");
            m.insert("truncations".into(), json!(trunc));
            m.insert("gap".into(), json!(gap));
        }
        out.push(entry);
    }
    Ok(json!({"q": q, "genus": ctx.curve.genus, "values": out}))
}

/// Run the configured task and assemble the report. Budget failures still
/// produce a report, flagged `"complete": false`.
pub fn run_report(cfg: &RunConfig, exec: Exec, timings: bool) -> Outcome {
    let resolved = cfg.resolved();
    let mut timer = Timer { on: timings, marks: Map::new() };
    let mut rows = Vec::new();
    let mut results = Map::new();
    let digits = cfg.precision();
    let opts = ScanOptions { budget: cfg.budget(), exec };
    let error = match timer.time("validate", || cfg.validate()) {
        Err(e) => Some(e),
        Ok(ctx) => {
            let r: Result<()> = (|| {
                match cfg.task {
                    Task::Classify => {
                        results = as_map(timer.time("classify", || classify(&ctx)));
                    }
                    Task::Predict => {
                        results = as_map(timer.time("predict", || predict_task(cfg, &ctx, digits))?);
                    }
                    Task::Zeta => {
                        results = as_map(timer.time("zeta", || zeta_task(cfg, &ctx, digits))?);
                    }
                    Task::Enumerate => {
                        let d = cfg.params.d.expect("validated");
                        let e = cfg.heights()[0];
                        results.insert("d".into(), json!(d));
                        results.insert("e".into(), json!(e));
                        let (n_emp, dims) = timer.time("threshold", || n_emp_json(&ctx, d, e))?;
                        results.insert("n_emp".into(), n_emp);
                        let dims: Vec<_> = dims.into_iter().filter(|r| r.e == e).collect();
                        results.insert("dims".into(), json!(dims));
                        let count = timer.time("enumerate", || prime_count(&ctx.bundle, d, e, &opts))?;
                        results.insert("model".into(), json!(count.model));
                        results.insert("M_f".into(), json!(count.fiberfree.to_string()));
                        results.insert("M".into(), json!(count.prime.to_string()));
                        results.insert("classes".into(), json!(count.classes));
                    }
                    Task::Compare => {
                        let d = cfg.params.d.expect("validated");
                        let hs = cfg.heights();
                        results.insert("d".into(), json!(d));
                        let e_max = hs.iter().copied().max().unwrap_or(0);
                        let (n_emp, _) = timer.time("threshold", || n_emp_json(&ctx, d, e_max))?;
                        results.insert("n_emp".into(), n_emp);
                        let res = timer.time("compare", || {
                            for &e in &hs {
                                let row = compare_table(&ctx.bundle, &ctx.curve, d, &[e], &opts, digits)?;
                                rows.extend(row);
                            }
                            Ok(())
                        });
                        results.insert("rows".into(), json!(rows));
                        res?;
                    }
                }
                Ok(())
            })();
            r.err()
        }
    };
    let mut report = Map::new();
    report.insert("config".into(), serde_json::to_value(&resolved).expect("config serializes"));
    report.insert("task".into(), json!(cfg.task.name()));
    report.insert("complete".into(), json!(error.is_none()));
    if let Some(e) = &error {
        report.insert("error".into(), json!(e.to_string()));
    }
    report.insert("results".into(), Value::Object(results));
    if timings {
        report.insert("timings".into(), Value::Object(timer.marks));
    }
    Outcome { report: Value::Object(report), error, rows }
}

fn as_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

/// Compare rows as CSV.
pub fn rows_csv(rows: &[CompareRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Unsupported(e.to_string());
    w.write_record(["d", "e", "predicted", "predicted_decimal", "enumerated_Mf", "enumerated_M", "ratio"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.d.to_string(),
            r.e.to_string(),
            r.predicted["exact"].as_str().unwrap_or_default().to_string(),
            r.predicted["decimal"].as_str().unwrap_or_default().to_string(),
            r.enumerated_mf.to_string(),
            r.enumerated_m.to_string(),
            r.ratio.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Unsupported(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Render an outcome in the configured format.
pub fn render(cfg: &RunConfig, outcome: &Outcome) -> Result<String> {
    match cfg.format() {
        super::config::Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            s.push('\n');
            Ok(s)
        }
        super::config::Format::Csv => rows_csv(&outcome.rows),
    }
}
