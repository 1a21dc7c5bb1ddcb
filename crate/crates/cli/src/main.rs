//! `dessin-mm`: command-line front end for dessin-core.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dessin_core::characters::CharacterTable;
use dessin_core::dessin::{parse_faces, CyclicWord, DessinModel, SourceAssignment};
use dessin_core::expectation::{
    mixed_expectation, power_expectation, schur_det_expectation, schur_expectation, theorem_series,
    trace_product_expectation, ClosedFormResult, EnsembleSpec, Formula, Side,
};
use dessin_core::hurwitz::{hurwitz, hurwitz_bruteforce, hurwitz_weighted};
use dessin_core::mc::suites::{cases, run, Suite, SuiteParams};
use dessin_core::mc::{Check, McConfig};
use dessin_core::partitions::enumerate_partitions;
use dessin_core::scalar::{fmt_f64, fmt_rational, int, parse_rational, rational_to_f64, Field, Rational};
use dessin_core::symfunc::PowerSumPoint;
use dessin_core::tau::{hciz, morozov_series, tau_pp, tau_scalar, tau_xp, tau_xy, RFunction, TauPair};
use dessin_core::Partition;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

mod out;

#[derive(Parser)]
#[command(name = "dessin-mm", version, about = "Matrix models on dessins: combinatorics, closed forms, Monte Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Faces, vertices and duals of maps
    Dessin {
        #[command(subcommand)]
        op: DessinOp,
    },
    /// Hurwitz numbers H_E(Δ¹,…,Δᵏ)
    Hurwitz(HurwitzArgs),
    /// Character table of S_d
    Characters {
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Closed-form expectation values
    Expect(ExpectArgs),
    /// Tau functions: series and determinant routes
    Tau(TauArgs),
    /// Closed forms against Monte Carlo
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FacesInput {
    /// Faces inline: words separated by '|' or ';', letters by spaces
    #[arg(long, conflicts_with = "faces_file")]
    faces: Option<String>,
    /// Text (one face per line), a JSON list of words, or a JSON object with "faces"
    #[arg(long)]
    faces_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DessinOp {
    /// The dual map: faces become vertices
    Dual(FacesInput),
    /// Validate and summarize a map
    Check(FacesInput),
}

#[derive(Args)]
struct HurwitzArgs {
    #[arg(long, allow_hyphen_values = true)]
    euler: i64,
    /// Profiles separated by '|', parts by ','
    #[arg(long, conflicts_with = "degree")]
    profiles: Option<String>,
    /// Tabulate every multiset of --count profiles of this degree
    #[arg(long, requires = "count")]
    degree: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    /// Weight ((N)_λ)^{−M}
    #[arg(long, requires = "n")]
    weight_m: Option<u32>,
    #[arg(long = "N")]
    n: Option<i64>,
    /// Count permutation tuples instead of summing characters
    #[arg(long, conflicts_with = "weight_m")]
    oracle: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaArg {
    Trace,
    Schur,
    SchurDet,
    Mixed,
    Power,
    Theorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Faces,
    Vertices,
}

#[derive(Args)]
struct ExpectArgs {
    #[arg(long, value_enum)]
    formula: FormulaArg,
    #[command(flatten)]
    faces: FacesInput,
    /// JSON object: signed letter ("1", "-2", …) -> matrix of "p/q" strings or numbers; missing letters are the identity
    #[arg(long)]
    sources_file: Option<PathBuf>,
    /// Edge kinds, e.g. "G,G,U"; all Ginibre when absent
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Defaults to 1/N
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long, value_enum, default_value = "faces")]
    side: SideArg,
    /// One partition per observed cycle ('|'-separated); power-sum part for mixed
    #[arg(long)]
    partitions: Option<String>,
    /// Schur partitions of the remaining cycles (mixed)
    #[arg(long)]
    schur: Option<String>,
    /// Determinant exponents, ','-separated (schur-det)
    #[arg(long)]
    alphas: Option<String>,
    /// r functions for the theorem series ('/'-separated, or one for all cycles)
    #[arg(long)]
    r: Option<String>,
    /// Power-sum points for the theorem series ('/'-separated, or one for all)
    #[arg(long)]
    point: Option<String>,
    #[arg(long, default_value_t = 4)]
    dmax: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauWhich {
    Scalar,
    Xy,
    Pp,
    Xp,
    Hciz,
    Morozov,
}

#[derive(Args)]
struct TauArgs {
    #[arg(long, value_enum)]
    which: TauWhich,
    /// "p:a1,a2;q:b1" (hypergeometric), "ratio;p:..;q:..", "one", "const:c", "linear:a"
    #[arg(long, default_value = "one")]
    r: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n: i64,
    /// Scalar argument, or eigenvalues of X (','-separated)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Eigenvalues of Y
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Power-sum point: "inf", "const:a", "qt:q,t", "list:p1,p2,…"
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pbar: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// HCIZ: eigenvalues of A and B
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Matrix size for morozov
    #[arg(long = "N")]
    size: Option<usize>,
    #[arg(long, default_value_t = 12)]
    cap: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Defaults to 1/N
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, env = "DESSIN_WORKERS")]
    workers: Option<usize>,
    /// Pass iff |closed − mean| ≤ threshold · stderr per component
    #[arg(long, default_value_t = dessin_core::mc::Z_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

struct InputError(String);

impl From<dessin_core::Error> for InputError {
    fn from(e: dessin_core::Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

fn bad<T>(msg: impl Into<String>) -> Res<T> {
    Err(InputError(msg.into()))
}

fn read_faces(input: &FacesInput) -> Res<Vec<CyclicWord>> {
    let text = match (&input.faces, &input.faces_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => fs::read_to_string(path)?,
        (None, None) => return bad("give --faces or --faces-file"),
    };
    let t = text.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| InputError(e.to_string()))?;
        let faces = v.get("faces").ok_or_else(|| InputError("JSON object has no \"faces\"".into()))?;
        return Ok(parse_faces(&faces.to_string())?);
    }
    Ok(parse_faces(t)?)
}

fn letters(words: &[Vec<i32>]) -> Value {
    json!(words)
}

fn model_json(m: &DessinModel) -> Value {
    json!({
        "n": m.n,
        "faces": letters(&m.canonical_faces()),
        "vertices": letters(&m.canonical_vertices()),
        "F": m.face_count(),
        "V": m.vertex_count(),
        "euler": m.euler,
    })
}

fn run_dessin(op: DessinOp) -> Res<i32> {
    match op {
        DessinOp::Dual(input) => {
            let m = DessinModel::from_words(read_faces(&input)?)?;
            let d = m.dual();
            let mut v = model_json(&d);
            v["params"] = json!({ "op": "dual", "input_faces": letters(&m.canonical_faces()) });
            out::print_json(&v);
        }
        DessinOp::Check(input) => {
            let m = DessinModel::from_words(read_faces(&input)?)?;
            let mut v = model_json(&m);
            v["graph_comb"] = json!(m.graph_comb_holds());
            v["params"] = json!({ "op": "check" });
            out::print_json(&v);
        }
    }
    Ok(0)
}

fn parse_profiles(s: &str) -> Res<Vec<Partition>> {
    s.split('|').map(|t| Partition::from_str(t).map_err(InputError::from)).collect()
}

/// Multisets of `k` partitions of `d`, in a fixed order.
fn multisets(d: usize, k: usize) -> Vec<Vec<Partition>> {
    fn rec(ps: &[Partition], from: usize, k: usize, cur: &mut Vec<Partition>, out: &mut Vec<Vec<Partition>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..ps.len() {
            cur.push(ps[i].clone());
            rec(ps, i, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&enumerate_partitions(d), 0, k, &mut Vec::new(), &mut out);
    out
}

fn hurwitz_value(a: &HurwitzArgs, profiles: &[Partition]) -> Res<Rational> {
    if a.oracle {
        // E = 2 − 2h − m with m ∈ {0, 1}
        if a.euler > 2 {
            return bad("the permutation count needs E ≤ 2");
        }
        let m = ((2 - a.euler) % 2) as u32;
        let h = ((2 - a.euler - m as i64) / 2) as u32;
        let d = profiles.first().map(|p| p.weight()).unwrap_or(0);
        return Ok(hurwitz_bruteforce(h, m, d, profiles)?);
    }
    match (a.weight_m, a.n) {
        (Some(m), Some(n)) => Ok(hurwitz_weighted(a.euler, profiles, m, &int(n))?),
        _ => Ok(hurwitz(a.euler, profiles)?),
    }
}

fn join_profiles(ps: &[Partition]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("|")
}

fn run_hurwitz(a: HurwitzArgs) -> Res<i32> {
    let params = json!({
        "euler": a.euler,
        "weight_m": a.weight_m,
        "N": a.n,
        "oracle": a.oracle,
    });
    if let Some(d) = a.degree {
        let k = a.count.unwrap_or(1);
        let mut rows = Vec::new();
        for ps in multisets(d, k) {
            rows.push((join_profiles(&ps), hurwitz_value(&a, &ps)?));
        }
        match a.format {
            Format::Json => out::print_json(&json!({
                "params": params,
                "degree": d,
                "table": rows.iter().map(|(p, v)| json!({ "profiles": p, "value": out::exact(v) })).collect::<Vec<_>>(),
            })),
            Format::Csv => {
                let rows: Vec<Vec<String>> = rows
                    .iter()
                    .map(|(p, v)| vec![p.clone(), fmt_rational(v), fmt_f64(rational_to_f64(v))])
                    .collect();
                out::print_csv(&["profiles", "value", "decimal"], &rows)?;
            }
        }
        return Ok(0);
    }
    let Some(s) = &a.profiles else {
        return bad("give --profiles or --degree with --count");
    };
    let profiles = parse_profiles(s)?;
    let v = hurwitz_value(&a, &profiles)?;
    match a.format {
        Format::Json => out::print_json(&json!({
            "params": params,
            "profiles": join_profiles(&profiles),
            "value": out::exact(&v),
            "decimal": out::real(rational_to_f64(&v)),
        })),
        Format::Csv => out::print_csv(
            &["profiles", "value", "decimal"],
            &[vec![join_profiles(&profiles), fmt_rational(&v), fmt_f64(rational_to_f64(&v))]],
        )?,
    }
    Ok(0)
}

fn run_characters(degree: usize, format: Format) -> Res<i32> {
    let table = CharacterTable::new(degree);
    let ps = enumerate_partitions(degree);
    let rows = table.rows();
    match format {
        Format::Json => out::print_json(&json!({
            "params": { "degree": degree },
            "partitions": ps.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "table": rows.iter().map(|r| r.iter().map(out::exact).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut header = vec!["lambda".to_string()];
            header.extend(ps.iter().map(|p| p.to_string()));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let body: Vec<Vec<String>> = ps
                .iter()
                .zip(&rows)
                .map(|(l, r)| std::iter::once(l.to_string()).chain(r.iter().map(fmt_rational)).collect())
                .collect();
            out::print_csv(&header, &body)?;
        }
    }
    Ok(0)
}

fn parse_list<F>(s: &str, parse: impl Fn(&str) -> Option<F>) -> Res<Vec<F>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(t).ok_or_else(|| InputError(format!("bad number '{}'", t))))
        .collect()
}

fn parse_complex(s: &str) -> Option<Complex64> {
    Complex64::from_str(s.trim()).ok()
}

fn parse_r<F: Field>(s: &str, num: impl Fn(&str) -> Option<F> + Copy) -> Res<RFunction<F>> {
    let s = s.trim();
    if s == "one" {
        return Ok(RFunction::one());
    }
    if let Some(c) = s.strip_prefix("const:") {
        return Ok(RFunction::constant(num(c).ok_or_else(|| InputError(format!("bad constant '{}'", c)))?));
    }
    if let Some(a) = s.strip_prefix("linear:") {
        return Ok(RFunction::linear(num(a).ok_or_else(|| InputError(format!("bad shift '{}'", a)))?));
    }
    let (ratio, body) = match s.strip_prefix("ratio;") {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for item in body.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        match item.split_once(':') {
            Some(("p", v)) => a = parse_list(v, num)?,
            Some(("q", v)) => b = parse_list(v, num)?,
            _ => return bad(format!("bad r item '{}'", item)),
        }
    }
    Ok(if ratio { RFunction::ratio(a, b) } else { RFunction::hypergeometric(a, b) })
}

fn parse_point<F: Field>(s: &str, num: impl Fn(&str) -> Option<F> + Copy) -> Res<PowerSumPoint<F>> {
    let s = s.trim();
    if s == "inf" {
        return Ok(PowerSumPoint::Infinity);
    }
    let err = || InputError(format!("bad point '{}'", s));
    if let Some(a) = s.strip_prefix("const:") {
        return Ok(PowerSumPoint::Constant(num(a).ok_or_else(err)?));
    }
    if let Some(v) = s.strip_prefix("qt:") {
        let v = parse_list(v, num)?;
        if v.len() != 2 {
            return Err(err());
        }
        return Ok(PowerSumPoint::qt(v[0].clone(), v[1].clone())?);
    }
    if let Some(v) = s.strip_prefix("list:") {
        return Ok(PowerSumPoint::Explicit(parse_list(v, num)?));
    }
    Err(err())
}

fn read_sources(path: &Option<PathBuf>, n: usize, size: usize) -> Res<SourceAssignment<Rational>> {
    let Some(path) = path else {
        return Ok(SourceAssignment::identity(n, size));
    };
    let v: BTreeMap<String, Vec<Vec<Value>>> =
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| InputError(format!("sources: {}", e)))?;
    let mut sources = SourceAssignment::identity(n, size);
    for (k, rows) in v {
        let l: i32 = k.trim().parse().map_err(|_| InputError(format!("bad letter '{}'", k)))?;
        let flat: Vec<Rational> = rows
            .iter()
            .flatten()
            .map(|x| {
                let t = match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                parse_rational(&t).ok_or_else(|| InputError(format!("bad entry '{}'", t)))
            })
            .collect::<Res<_>>()?;
        let r = rows.len();
        if rows.iter().any(|row| row.len() != r) {
            return bad(format!("source {} is not square", l));
        }
        if l == 0 {
            return bad("letter 0 is not allowed");
        }
        if r != size {
            return bad(format!("source {} is {}x{}, expected {}x{}", l, r, r, size, size));
        }
        sources.set(l, DMatrix::from_row_slice(r, r, &flat))?;
    }
    Ok(sources)
}

fn per_cycle<T: Clone>(spec: &str, k: usize, parse: impl Fn(&str) -> Res<T>) -> Res<Vec<T>> {
    let items: Vec<T> = spec.split('/').map(&parse).collect::<Res<_>>()?;
    match items.len() {
        1 => Ok(vec![items[0].clone(); k]),
        len if len == k => Ok(items),
        len => bad(format!("{} entries for {} observed cycles", len, k)),
    }
}

fn closed_json(r: &ClosedFormResult<Rational>) -> Value {
    json!({
        "value": out::exact(&r.value),
        "decimal": out::real(rational_to_f64(&r.value)),
        "series": r.series.iter().map(|(l, v)| json!({ "partition": l.to_string(), "value": out::exact(v) })).collect::<Vec<_>>(),
        "formula": r.formula.to_string(),
        "side": r.side,
        "truncation": r.truncation,
        "note": r.note,
    })
}

fn run_expect(a: ExpectArgs) -> Res<i32> {
    let model = DessinModel::from_words(read_faces(&a.faces)?)?;
    let kinds = match &a.ensemble {
        Some(s) => EnsembleSpec::parse_kinds(s)?,
        None => vec![dessin_core::EdgeKind::Ginibre; model.n],
    };
    let mut ens = EnsembleSpec::new(kinds, a.n)?;
    if let Some(h) = &a.hbar {
        ens = ens.with_hbar(parse_rational(h).ok_or_else(|| InputError(format!("bad hbar '{}'", h)))?)?;
    }
    let sources = read_sources(&a.sources_file, model.n, a.n)?;
    let side = match a.side {
        SideArg::Faces => Side::Faces,
        SideArg::Vertices => Side::Vertices,
    };
    let observed = match side {
        Side::Faces => model.face_count(),
        Side::Vertices => model.vertex_count(),
    };
    let need = |s: &Option<String>, flag: &str| s.clone().ok_or_else(|| InputError(format!("this formula needs --{}", flag)));
    let result = match a.formula {
        FormulaArg::Trace => trace_product_expectation(&model, &sources, &ens, side)?,
        FormulaArg::Schur => schur_expectation(&model, &sources, &ens, &parse_profiles(&need(&a.partitions, "partitions")?)?, side)?,
        FormulaArg::SchurDet => {
            let ls = parse_profiles(&need(&a.partitions, "partitions")?)?;
            let alphas = parse_list(&need(&a.alphas, "alphas")?, |t| t.parse::<u32>().ok())?;
            schur_det_expectation(&model, &sources, &ens, &ls, &alphas, side)?
        }
        FormulaArg::Mixed => {
            let deltas = parse_profiles(&need(&a.partitions, "partitions")?)?;
            let mus = parse_profiles(&need(&a.schur, "schur")?)?;
            mixed_expectation(&model, &sources, &ens, &deltas, &mus, side)?
        }
        FormulaArg::Power => power_expectation(&model, &sources, &ens, &parse_profiles(&need(&a.partitions, "partitions")?)?, side)?,
        FormulaArg::Theorem => {
            let rs = per_cycle(&a.r.clone().unwrap_or_else(|| "one".into()), observed, |t| parse_r(t, parse_rational))?;
            let pts = per_cycle(&a.point.clone().unwrap_or_else(|| "inf".into()), observed, |t| parse_point(t, parse_rational))?;
            theorem_series(&model, &sources, &ens, &rs, &pts, side, a.dmax)?
        }
    };
    let formula: Formula = result.formula;
    let mut v = closed_json(&result);
    v["model"] = model_json(&model);
    v["params"] = json!({
        "formula": formula.to_string(),
        "N": ens.size,
        "hbar": out::exact(&ens.hbar),
        "ensemble": ens.kinds,
        "side": side,
        "partitions": a.partitions,
        "schur": a.schur,
        "alphas": a.alphas,
        "r": a.r,
        "point": a.point,
        "dmax": a.dmax,
        "sources": a.sources_file.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "identity".into()),
    });
    out::print_json(&v);
    Ok(0)
}

fn diag(v: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_vec(v.to_vec()))
}

fn run_tau(a: TauArgs) -> Res<i32> {
    let need = |s: &Option<String>, flag: &str| s.clone().ok_or_else(|| InputError(format!("--which needs --{}", flag)));
    let r = parse_r(&a.r, parse_complex)?;
    let list = |s: &Option<String>, flag: &str| parse_list(&need(s, flag)?, parse_complex);
    let point = |s: &Option<String>, flag: &str| parse_point(&need(s, flag)?, parse_complex);
    let pair: TauPair = match a.which {
        TauWhich::Scalar => {
            let x = parse_complex(&need(&a.x, "x")?).ok_or_else(|| InputError("bad --x".into()))?;
            let v = tau_scalar(&r, a.n, x, a.cap)?;
            TauPair { series: v, determinant: None, note: Some("scalar series only".into()) }
        }
        TauWhich::Xy => tau_xy(&r, a.n, &diag(&list(&a.x, "x")?), &diag(&list(&a.y, "y")?), a.cap)?,
        TauWhich::Pp => {
            if a.n < 1 {
                return bad("pp needs --n ≥ 1");
            }
            tau_pp(&r, a.n as usize, &point(&a.p, "p")?, &point(&a.pbar, "pbar")?, a.cap)?
        }
        TauWhich::Xp => tau_xp(&r, a.n, &diag(&list(&a.x, "x")?), &point(&a.p, "p")?, a.cap)?,
        TauWhich::Hciz => {
            let alpha = parse_complex(&need(&a.alpha, "alpha")?).ok_or_else(|| InputError("bad --alpha".into()))?;
            hciz(alpha, &diag(&list(&a.a, "a")?), &diag(&list(&a.b, "b")?), a.cap)?
        }
        TauWhich::Morozov => {
            let size = a.size.ok_or_else(|| InputError("morozov needs --N".into()))?;
            let v = morozov_series(&point(&a.p, "p")?, &point(&a.pbar, "pbar")?, size, a.cap);
            TauPair { series: v, determinant: None, note: Some("series only; compare with verify --suite morozov".into()) }
        }
    };
    out::print_json(&json!({
        "params": {
            "which": a.which.to_possible_value().expect("listed").get_name(),
            "r": a.r, "n": a.n, "x": a.x, "y": a.y, "p": a.p, "pbar": a.pbar,
            "alpha": a.alpha, "a": a.a, "b": a.b, "N": a.size, "cap": a.cap,
        },
        "series": out::complex(pair.series),
        "determinant": out::opt_complex(pair.determinant),
        "discrepancy": pair.discrepancy().map(out::real),
        "note": pair.note,
    }));
    Ok(0)
}

fn check_json(c: &Check) -> Value {
    json!({
        "name": c.name,
        "closed": out::complex(c.closed),
        "mean": out::complex(c.estimate.mean),
        "stderr": { "re": fmt_f64(c.estimate.stderr_re), "im": fmt_f64(c.estimate.stderr_im) },
        "z": { "re": fmt_f64(c.z_re), "im": fmt_f64(c.z_im) },
        "samples": c.estimate.samples,
        "pass": c.pass,
    })
}

fn run_verify(a: VerifyArgs) -> Res<i32> {
    let suite: Suite = a.suite.parse()?;
    let hbar = match &a.hbar {
        Some(h) => Some(parse_rational(h).ok_or_else(|| InputError(format!("bad hbar '{}'", h)))?),
        None => None,
    };
    let params = SuiteParams { n: a.n, hbar: hbar.clone(), seed: a.seed };
    let mut cfg = McConfig::new(a.samples, a.seed);
    if let Some(w) = a.workers {
        cfg = cfg.with_workers(w);
    }
    let cs = cases(suite, &params)?;
    let checks = run(&cs, &cfg, a.threshold)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    match a.format {
        Format::Json => out::print_json(&json!({
            "params": {
                "suite": suite.to_string(),
                "N": a.n,
                "hbar": hbar.map(|h| fmt_rational(&h)).unwrap_or_else(|| format!("1/{}", a.n)),
                "samples": a.samples,
                "seed": a.seed,
                "workers": cfg.workers,
                "threshold": a.threshold,
            },
            "checks": checks.iter().map(check_json).collect::<Vec<_>>(),
            "passed": checks.len() - failed,
            "failed": failed,
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        fmt_f64(c.closed.re),
                        fmt_f64(c.closed.im),
                        fmt_f64(c.estimate.mean.re),
                        fmt_f64(c.estimate.mean.im),
                        fmt_f64(c.estimate.stderr_re),
                        fmt_f64(c.estimate.stderr_im),
                        fmt_f64(c.z_re),
                        fmt_f64(c.z_im),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            out::print_csv(
                &["name", "closed_re", "closed_im", "mean_re", "mean_im", "stderr_re", "stderr_im", "z_re", "z_im", "pass"],
                &rows,
            )?;
        }
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dessin { op } => run_dessin(op),
        Command::Hurwitz(a) => run_hurwitz(a),
        Command::Characters { degree, format } => run_characters(degree, format),
        Command::Expect(a) => run_expect(a),
        Command::Tau(a) => run_tau(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
