use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ringcodes::code::{duality_audit, verify_gray_generator, WeightOptions};
use ringcodes::cyclic::{
    qc_from_generators, qc_invariance_check, tau_build, QcTarget, QuotientPoly, QuotientPolyWire,
    TauChoice, QC_PROVENANCE,
};
use ringcodes::families::{
    family_length_audit, weight_stats, DivisorSet, FamilyType, LazyGenerator, StatsOptions,
};
use ringcodes::verify::{default_spec, verify_all, VerifyOptions};
use ringcodes::{AuditReport, ComponentSpec, KappaSystem, RCode, RingParams, Status};

use crate::error::CliError;
use crate::io::{csv_string, join, print, read_json, to_json, write_file};
use crate::ring::parse_ring;
use crate::{
    BuildArgs, CodeInput, FamilyArgs, FamilyKind, FamilyTypeArg, Format, Global, LengthArgs,
    QcArgs, VerifyArgs,
};

const CODE_SCHEMA: &str = "ringcodes/code/v1";

/// Serialized name of a unit enum variant.
/// Stdout JSON, stamped with the time when `--timestamps` is given.
fn print_json<T: Serialize>(g: &Global, doc: &T) -> Result<(), CliError> {
    let mut value = serde_json::to_value(doc)?;
    if let (true, Value::Object(map)) = (g.timestamps, &mut value) {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        map.insert("generated_at_unix".into(), secs.into());
    }
    print(&to_json(&value)?)
}

fn label<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn report_csv(report: &AuditReport) -> Result<String, CliError> {
    csv_string(
        &["claim", "anchor", "status", "evidence"],
        report.entries.iter().map(|e| {
            vec![
                e.claim.clone(),
                e.anchor.clone(),
                label(&e.status),
                e.evidence.to_string(),
            ]
        }),
    )
}

fn summary(report: &AuditReport) -> Value {
    json!({
        "pass": report.count(Status::Pass),
        "fail": report.count(Status::Fail),
        "measured_discrepancy": report.count(Status::MeasuredDiscrepancy),
    })
}

pub fn verify(g: &Global, a: &VerifyArgs) -> Result<(), CliError> {
    let params = RingParams::new(a.m, a.s)?;
    let spec = match &a.spec {
        Some(path) => read_json::<ComponentSpec>(path)?,
        None => default_spec(params, a.n),
    };
    if spec.m != a.m || spec.s != a.s {
        return Err(CliError::Usage(format!(
            "spec is over (m, s) = ({}, {}) but --m {} --s {} was given",
            spec.m, spec.s, a.m, a.s
        )));
    }
    let opts = VerifyOptions {
        seed: g.seed,
        lemma_random: a.lemma_random,
        length_k: a.k,
        length_u: (a.u < a.k).then_some(a.u),
        ..VerifyOptions::default()
    };
    let report = verify_all(params, Some(&spec), &opts)?;
    match g.format {
        Format::Csv => print(&report_csv(&report)?),
        Format::Json => print_json(
            g,
            &json!({
                "schema": "ringcodes/audit-report/v1",
                "m": a.m,
                "s": a.s,
                "n": spec.n,
                "seed": g.seed,
                "summary": summary(&report),
                "entries": report.entries,
            }),
        ),
    }
}

/// The file written by `build` and `dual`. Only `spec` is read back; the
/// other fields are derived.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    schema: String,
    spec: ComponentSpec,
    #[serde(default)]
    cardinality: Option<Value>,
    #[serde(default)]
    blocks: Option<Value>,
    #[serde(default)]
    stacked_generator: Option<Value>,
    #[serde(default)]
    digit_generator: Option<Value>,
    #[serde(default)]
    weights: Option<Value>,
}

fn code_file(code: &RCode, weights: Option<Value>) -> Result<CodeFile, CliError> {
    let blocks: Vec<Value> = code
        .blocks()
        .iter()
        .map(|b| {
            json!({
                "l": b.l,
                "subset": b.subset,
                "zero_block": b.is_zero_block(),
                "marker": b.marker.map(|m| json!({"subset": m.subset, "degree": m.degree, "unit": m.unit.value()})),
            })
        })
        .collect();
    let stacked: Vec<Value> = code
        .stacked_generator()
        .iter()
        .map(|r| {
            json!({
                "l": r.l,
                "subset": r.subset,
                "degenerate": r.degenerate,
                "row": r.row.iter().map(|x| x.digits().iter().map(|d| d.value()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let digits: Vec<Vec<u64>> = code
        .digit_span()
        .rows()
        .iter()
        .map(|r| r.iter().map(|d| d.value()).collect())
        .collect();
    Ok(CodeFile {
        schema: CODE_SCHEMA.into(),
        spec: code.spec(),
        cardinality: Some(serde_json::to_value(code.cardinality_report())?),
        blocks: Some(Value::Array(blocks)),
        stacked_generator: Some(Value::Array(stacked)),
        digit_generator: Some(json!(digits)),
        weights,
    })
}

fn load_code(
    code: Option<&std::path::Path>,
    spec: Option<&std::path::Path>,
) -> Result<RCode, CliError> {
    let spec = match (code, spec) {
        (Some(path), _) => {
            let f: CodeFile = read_json(path)?;
            if f.schema != CODE_SCHEMA {
                return Err(CliError::Schema {
                    file: path.to_path_buf(),
                    path: "schema".into(),
                    message: format!("expected {CODE_SCHEMA:?}, found {:?}", f.schema),
                });
            }
            f.spec
        }
        (None, Some(path)) => read_json(path)?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --code or --spec is required".into(),
            ))
        }
    };
    Ok(RCode::build(&spec)?)
}

fn stacked_csv(file: &CodeFile) -> Result<String, CliError> {
    let rows = file
        .stacked_generator
        .as_ref()
        .and_then(Value::as_array)
        .map(|rows| {
            rows.iter()
                .map(|r| {
                    let row = r["row"]
                        .as_array()
                        .map(|pos| {
                            pos.iter()
                                .map(|p| {
                                    p.as_array()
                                        .map(|ds| {
                                            ds.iter()
                                                .map(|d| d.to_string())
                                                .collect::<Vec<_>>()
                                                .join(" ")
                                        })
                                        .unwrap_or_default()
                                })
                                .collect::<Vec<_>>()
                                .join(";")
                        })
                        .unwrap_or_default();
                    vec![
                        r["l"].to_string(),
                        r["subset"].to_string(),
                        r["degenerate"].to_string(),
                        row,
                    ]
                })
                .collect::<Vec<_>>()
        })
        .unwrap_or_default();
    csv_string(&["l", "subset", "degenerate", "row"], rows)
}

fn emit_code(
    g: &Global,
    file: &CodeFile,
    out: Option<&std::path::Path>,
    extra: Value,
) -> Result<(), CliError> {
    if let Some(path) = out {
        write_file(path, &to_json(file)?)?;
    }
    match g.format {
        Format::Csv => print(&stacked_csv(file)?),
        Format::Json => {
            let mut doc = json!({
                "schema": "ringcodes/code-summary/v1",
                "m": file.spec.m,
                "s": file.spec.s,
                "n": file.spec.n,
                "cardinality": file.cardinality,
                "weights": file.weights,
                "written_to": out.map(|p| p.display().to_string()),
            });
            if out.is_none() {
                doc["code"] = serde_json::to_value(file)?;
            }
            if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
                d.extend(e);
            }
            print_json(g, &doc)
        }
    }
}

pub fn build(g: &Global, a: &BuildArgs) -> Result<(), CliError> {
    let spec: ComponentSpec = read_json(&a.spec)?;
    let code = RCode::build(&spec)?;
    let weights = a
        .weights
        .then(|| {
            serde_json::to_value(code.min_weight_report(&WeightOptions {
                budget: a.budget,
                samples: a.samples,
                seed: g.seed,
                workers: g.workers,
            }))
        })
        .transpose()?;
    let file = code_file(&code, weights)?;
    emit_code(g, &file, a.out.as_deref(), json!({}))
}

pub fn dual(g: &Global, a: &CodeInput) -> Result<(), CliError> {
    let code = load_code(a.code.as_deref(), a.spec.as_deref())?;
    let dual = code.dual_code()?;
    let audit = duality_audit(&code, a.samples, g.seed)?;
    let file = code_file(&dual, None)?;
    emit_code(
        g,
        &file,
        a.out.as_deref(),
        json!({ "duality": audit.entries }),
    )
}

pub fn gray(g: &Global, a: &CodeInput) -> Result<(), CliError> {
    let code = load_code(a.code.as_deref(), a.spec.as_deref())?;
    let matrix = code.gray_generator_matrix();
    let audit = verify_gray_generator(&code);
    let rows = matrix.to_u64_rows();
    let doc = json!({
        "schema": "ringcodes/gray/v1",
        "m": code.params().m(),
        "s": code.params().s(),
        "n": code.n(),
        "order": ringcodes::gray::GRAY_ORDER,
        "cols": matrix.cols(),
        "rows": rows,
        "image_size": code.gray_image_span().cardinality().to_string(),
        "audit": audit.entries,
    });
    if let Some(path) = &a.out {
        write_file(path, &to_json(&doc)?)?;
    }
    match g.format {
        Format::Json => print_json(g, &doc),
        Format::Csv => {
            let header: Vec<String> = (0..matrix.cols()).map(|c| format!("c{c}")).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            print(&csv_string(
                &header,
                rows.iter().map(|r| r.iter().map(u64::to_string).collect()),
            )?)
        }
    }
}

pub fn family(g: &Global, a: &FamilyArgs) -> Result<(), CliError> {
    let ring = parse_ring(&a.ring)?;
    let kind = match a.kind_type {
        FamilyTypeArg::Alpha => FamilyType::Alpha,
        FamilyTypeArg::Beta => FamilyType::Beta,
    };
    let gen = match (a.kind, kind, a.u) {
        (FamilyKind::Simplex, _, Some(_)) => {
            return Err(CliError::Usage(
                "--u applies to MacDonald codes only".into(),
            ))
        }
        (FamilyKind::Simplex, FamilyType::Alpha, None) => LazyGenerator::simplex_alpha(ring, a.k)?,
        (FamilyKind::Simplex, FamilyType::Beta, None) => {
            LazyGenerator::simplex_beta(ring, a.k, DivisorSet::NonUnits)?
        }
        (FamilyKind::Macdonald, _, None) => {
            return Err(CliError::Usage("MacDonald codes need --u".into()))
        }
        (FamilyKind::Macdonald, kind, Some(u)) => LazyGenerator::macdonald(ring, a.k, u, kind)?,
    };
    let shown = BigUint::from(a.columns).min(gen.column_count().clone());
    let columns: Vec<Vec<Vec<u64>>> = num_iter(&shown)
        .map(|j| {
            gen.column(&j).map(|col| {
                col.iter()
                    .map(|e| e.iter().map(|d| d.value()).collect())
                    .collect()
            })
        })
        .collect::<Result<_, _>>()?;
    let stats = a.stats.then(|| {
        weight_stats(
            &gen,
            &StatsOptions {
                seed: g.seed,
                budget: a.budget,
                ..StatsOptions::default()
            },
        )
    });
    match g.format {
        Format::Json => print_json(
            g,
            &json!({
                "schema": "ringcodes/family/v1",
                "ring": ring,
                "ring_label": ring.label(),
                "family": gen.family(),
                "k": gen.k(),
                "u": gen.u(),
                "length": gen.column_count().to_string(),
                "divisor_count": gen.divisor_count().to_string(),
                "columns": columns,
                "stats": stats,
            }),
        ),
        Format::Csv if a.columns > 0 => print(&csv_string(
            &["index", "column"],
            columns.iter().enumerate().map(|(j, col)| {
                vec![
                    j.to_string(),
                    col.iter().map(|e| join(e)).collect::<Vec<_>>().join(";"),
                ]
            }),
        )?),
        Format::Csv => {
            let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
            let row = match &stats {
                Some(st) => vec![
                    ring.label(),
                    label(&st.family),
                    st.k.to_string(),
                    st.u.map(|u| u.to_string()).unwrap_or_default(),
                    st.length.to_string(),
                    st.exhaustive.to_string(),
                    st.seed.map(|s| s.to_string()).unwrap_or_default(),
                    opt(st.min_hamming),
                    opt(st.max_hamming),
                    opt(st.min_lee),
                    opt(st.max_lee),
                    opt(st.constant_lee_weight),
                ],
                None => {
                    let mut r = vec![
                        ring.label(),
                        label(&gen.family()),
                        gen.k().to_string(),
                        gen.u().map(|u| u.to_string()).unwrap_or_default(),
                        gen.column_count().to_string(),
                    ];
                    r.extend(std::iter::repeat_n(String::new(), 7));
                    r
                }
            };
            print(&csv_string(
                &[
                    "ring",
                    "family",
                    "k",
                    "u",
                    "length",
                    "exhaustive",
                    "seed",
                    "min_hamming",
                    "max_hamming",
                    "min_lee",
                    "max_lee",
                    "constant_lee_weight",
                ],
                [row],
            )?)
        }
    }
}

fn num_iter(n: &BigUint) -> impl Iterator<Item = BigUint> {
    let n = n.clone();
    std::iter::successors(Some(BigUint::default()), |j| Some(j + 1u8)).take_while(move |j| *j < n)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QcInput {
    m: usize,
    s: u32,
    n: usize,
    generators: Vec<GeneratorInput>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum GeneratorInput {
    /// Tower digits of each coefficient.
    Coeffs(Vec<Vec<u64>>),
    /// `τ = κ₁e₁ + κ₂e₂ + κ₃e₃`.
    Tau([TauChoice; 3]),
}

pub fn qc_check(g: &Global, a: &QcArgs) -> Result<(), CliError> {
    let (report, mode, cardinality) = if let Some(path) = &a.code {
        let code = load_code(Some(path), None)?;
        let report = qc_invariance_check(QcTarget::Code(&code), a.d, a.enumerate_limit)?;
        (report, "code", code.cardinality())
    } else {
        let path = a.input.as_ref().expect("clap requires --input or --code");
        let input: QcInput = read_json(path)?;
        let params = RingParams::new(input.m, input.s)?;
        let gens = generators(&input, params, a.allow_custom_tau)?;
        if a.orbit {
            let code = qc_from_generators(&gens, a.d)?;
            (
                code.invariance(a.d, a.enumerate_limit)?,
                "orbit",
                code.cardinality(),
            )
        } else {
            let words: Vec<_> = gens.iter().map(|p| p.coeffs().to_vec()).collect();
            let span = ringcodes::cyclic::r_span(params, &words)?;
            let report = qc_invariance_check(
                QcTarget::Generators {
                    params,
                    words: &words,
                },
                a.d,
                a.enumerate_limit,
            )?;
            (report, "span", span.cardinality())
        }
    };
    match g.format {
        Format::Csv => print(&report_csv(&report)?),
        Format::Json => print_json(
            g,
            &json!({
                "schema": "ringcodes/qc/v1",
                "mode": mode,
                "d": a.d,
                "cardinality": cardinality.to_string(),
                "note": (mode == "orbit").then_some(QC_PROVENANCE),
                "entries": report.entries,
            }),
        ),
    }
}

fn generators(
    input: &QcInput,
    params: RingParams,
    allow_custom: bool,
) -> Result<Vec<QuotientPoly>, CliError> {
    let kappa = KappaSystem::new(params)?;
    input
        .generators
        .iter()
        .enumerate()
        .map(|(i, gen)| match gen {
            GeneratorInput::Coeffs(coeffs) => Ok(QuotientPoly::try_from(QuotientPolyWire {
                m: input.m,
                s: input.s,
                n: input.n,
                coeffs: coeffs.clone(),
            })?),
            GeneratorInput::Tau(choices) => {
                if !allow_custom && choices.iter().any(TauChoice::is_custom) {
                    return Err(CliError::Usage(format!(
                        "generators[{i}]: custom τ inputs need --allow-custom-tau"
                    )));
                }
                let es = choices
                    .iter()
                    .map(|c| c.to_poly(params, input.n))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(tau_build(&kappa, &es[0], &es[1], &es[2])?)
            }
        })
        .collect()
}

pub fn audit_lengths(g: &Global, a: &LengthArgs) -> Result<(), CliError> {
    let params = RingParams::new(a.m, a.s)?;
    let audit = family_length_audit(params, a.k, a.u)?;
    match g.format {
        Format::Json => {
            let mut doc = serde_json::to_value(&audit)?;
            doc["schema"] = json!("ringcodes/length-audit/v1");
            print_json(g, &doc)
        }
        Format::Csv => print(&csv_string(
            &[
                "id",
                "formula",
                "paper_value",
                "measured_value",
                "measured_from",
                "verdict",
            ],
            audit.entries.iter().map(|e| {
                vec![
                    e.id.clone(),
                    e.formula.clone(),
                    e.paper_value.clone(),
                    e.measured_value.clone(),
                    e.measured_from.clone(),
                    label(&e.verdict),
                ]
            }),
        )?),
    }
}
