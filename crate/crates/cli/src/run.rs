use fusionforge_core::engine::{
    modular_idempotents, modular_spec, recover_fusion, GradedAlgebraSpec, IdempotentBasis, RecoveryOutput,
};
use fusionforge_core::modular::{catalog, catalog_entries, verlinde};
use fusionforge_core::permutation::{cyclic_fusion, permutation_idempotent_basis, permutation_spec, product_lines};
use fusionforge_core::pointed::{pointed_fusion, pointed_idempotents, pointed_spec, PointedInput};
use fusionforge_core::{Error, FusionRing, GradedFusionRing, Violation, SCHEMA_VERSION, VERSION};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, EngineArgs, Format, GenusArgs, PermutationArgs, PointedArgs};
use crate::doc::{inputs_hash, load, load_category, resolve_label, CliError, CliResult, ResultDocument};

pub struct Outcome {
    pub doc: ResultDocument,
    /// Human-readable rendering for the text formats.
    pub text: Vec<String>,
    pub exit: i32,
}

struct Produced {
    command: &'static str,
    inputs: Value,
    result: Value,
    text: Vec<String>,
    coefficients: Option<RecoveryOutput>,
    exit: i32,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn ring_lines(ring: &FusionRing) -> Vec<String> {
    let l = ring.labels();
    let r = ring.rank();
    (0..r)
        .flat_map(|x| (0..r).map(move |y| (x, y)))
        .map(|(x, y)| format!("{} ⊗ {} = {}", l[x], l[y], ring.format_product(x, y)))
        .collect()
}

fn graded_lines(ring: &GradedFusionRing, format: Format) -> Vec<String> {
    match format {
        Format::AppendixStyle => product_lines(ring),
        _ => ring_lines(ring.ring()),
    }
}

fn tolerance_ok(t: f64) -> CliResult<()> {
    if t > 0.0 && t <= 1e-2 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("tolerance {t} outside (0, 1e-2]")))
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    tolerance_ok(g.tolerance)?;
    let p = match &cli.command {
        Command::Verlinde(c) => {
            let (md, canon) = load_category(&c.category, g.tolerance)?;
            let ring = verlinde(&md)?;
            let fp = ring.fp_dims()?;
            Produced {
                command: "verlinde",
                inputs: json!({ "category": canon }),
                result: json!({ "ring": ring, "fp_dims": fp }),
                text: ring_lines(&ring),
                coefficients: None,
                exit: 0,
            }
        }
        Command::Genus(a) => genus(a, g.tolerance)?,
        Command::Pointed(a) => pointed(a, g.tolerance, g.seed, g.format)?,
        Command::Permutation(a) => permutation(a, g.tolerance, g.seed, g.format)?,
        Command::EngineRun(a) => engine_run(a, g.tolerance, g.seed, g.format)?,
        Command::Verify(a) => verify(&a.ring, g.tolerance)?,
        Command::Catalog(a) => match &a.name {
            None => {
                let rows: Vec<Value> = catalog_entries()
                    .iter()
                    .map(|name| {
                        let md = catalog(name).expect("catalog entries resolve");
                        json!({ "name": name, "rank": md.rank(), "global_dim": md.global_dim(), "labels": md.labels() })
                    })
                    .collect();
                let text = rows
                    .iter()
                    .map(|r| {
                        let (name, rank, dim) = (r["name"].as_str(), r["rank"].as_u64(), r["global_dim"].as_f64());
                        format!("{:<12} rank {:>3}  dim {:>9.4}", name.unwrap(), rank.unwrap(), dim.unwrap())
                    })
                    .collect();
                Produced {
                    command: "catalog",
                    inputs: json!({}),
                    result: Value::Array(rows),
                    text,
                    coefficients: None,
                    exit: 0,
                }
            }
            Some(name) => {
                let (md, canon) = load_category(name, g.tolerance)?;
                let dims = md.real_dims();
                let text = md.labels().iter().zip(&dims).map(|(l, d)| format!("{l}  d = {d:.6}")).collect();
                Produced {
                    command: "catalog",
                    inputs: json!({ "category": canon }),
                    result: to_value(&md),
                    text,
                    coefficients: None,
                    exit: 0,
                }
            }
        },
    };
    let inputs = json!({
        "command": p.command,
        "inputs": p.inputs,
        "tolerance": g.tolerance,
        "seed": g.seed,
    });
    let doc = ResultDocument {
        schema_version: SCHEMA_VERSION,
        tool: "fusionforge".into(),
        version: VERSION.into(),
        command: p.command.into(),
        inputs_hash: inputs_hash(&inputs),
        tolerance: g.tolerance,
        seed: g.seed,
        result: p.result,
        c_coefficients: p.coefficients.map(|o| o.coefficient_list()),
    };
    Ok(Outcome { doc, text: p.text, exit: p.exit })
}

fn genus(a: &GenusArgs, tol: f64) -> CliResult<Produced> {
    let (md, canon) = load_category(&a.category.category, tol)?;
    let ins_in: Vec<usize> = a.insertions.iter().filter(|s| !s.is_empty()).map(|s| resolve_label(&md, s)).collect::<CliResult<_>>()?;
    let ins_out: Vec<usize> = a.outgoing.iter().filter(|s| !s.is_empty()).map(|s| resolve_label(&md, s)).collect::<CliResult<_>>()?;
    let mut all = ins_in.clone();
    all.extend(ins_out.iter().map(|&x| md.dual(x)));
    let value = md.genus_value(a.g, &all)?;
    let coefficient = md.genus_coefficient(a.g, &all)?;
    let names = |v: &[usize]| -> Vec<String> { v.iter().map(|&i| md.labels()[i].clone()).collect() };
    Ok(Produced {
        command: "genus",
        inputs: json!({ "category": canon, "g": a.g, "insertions": names(&ins_in), "outgoing": names(&ins_out) }),
        result: json!({
            "g": a.g,
            "insertions": names(&ins_in),
            "outgoing": names(&ins_out),
            "coefficient": coefficient,
            "value": [value.re, value.im],
        }),
        text: vec![coefficient.to_string()],
        coefficients: None,
        exit: 0,
    })
}

/// Runs the engine on `spec`, relabels against the closed-form idempotents and
/// fails unless the fusion rules coincide with `closed`.
fn cross_check(
    spec: &GradedAlgebraSpec,
    reference: &IdempotentBasis,
    closed: &GradedFusionRing,
    seed: u64,
    tol: f64,
) -> CliResult<RecoveryOutput> {
    let labels: Vec<Vec<String>> = (0..closed.group().order()).map(|g| closed.sector_labels(g)).collect();
    let out = recover_fusion(spec, seed, tol)?.relabel(spec, reference, &labels, tol)?;
    if let Some(detail) = out.graded.first_difference(closed) {
        return Err(Error::SelfConsistency { detail, residual: out.idempotents.residual(spec) }.into());
    }
    Ok(out)
}

fn pointed(a: &PointedArgs, tol: f64, seed: u64, format: Format) -> CliResult<Produced> {
    let input: PointedInput = load(&a.input)?;
    let (m, l, act) = input.build()?;
    let ring = pointed_fusion(&m, &l, &act, tol)?;
    let coefficients = if a.check {
        let spec = pointed_spec(&m, &l, &act, tol)?;
        Some(cross_check(&spec, &pointed_idempotents(&m, &l, &act)?, &ring, seed, tol)?)
    } else {
        None
    };
    Ok(Produced {
        command: "extension-pointed",
        inputs: json!({ "pointed": input, "check": a.check }),
        result: json!({ "ring": ring, "checked": a.check }),
        text: graded_lines(&ring, format),
        coefficients,
        exit: 0,
    })
}

fn permutation(a: &PermutationArgs, tol: f64, seed: u64, format: Format) -> CliResult<Produced> {
    let (md, canon) = load_category(&a.category.category, tol)?;
    let ring = cyclic_fusion(&md, a.n, a.sector_cap)?;
    let coefficients = if a.check {
        let spec = permutation_spec(&md, a.n, a.sector_cap)?;
        let reference = permutation_idempotent_basis(&md, a.n, a.sector_cap)?;
        Some(cross_check(&spec, &reference, &ring, seed, tol)?)
    } else {
        None
    };
    Ok(Produced {
        command: "extension-permutation",
        inputs: json!({ "category": canon, "n": a.n, "sector_cap": a.sector_cap, "check": a.check }),
        result: json!({ "ring": ring, "checked": a.check }),
        text: graded_lines(&ring, format),
        coefficients,
        exit: 0,
    })
}

fn engine_run(a: &EngineArgs, tol: f64, seed: u64, format: Format) -> CliResult<Produced> {
    let src = &a.source;
    let (spec, reference, inputs): (GradedAlgebraSpec, Option<(IdempotentBasis, Vec<Vec<String>>)>, Value) =
        if let Some(path) = &src.spec {
            let spec: GradedAlgebraSpec = load(path)?;
            let canon = to_value(&spec);
            (spec, None, json!({ "spec": canon }))
        } else if let Some(path) = &src.pointed {
            let input: PointedInput = load(path)?;
            let (m, l, act) = input.build()?;
            let closed = pointed_fusion(&m, &l, &act, tol)?;
            let labels = (0..closed.group().order()).map(|g| closed.sector_labels(g)).collect();
            let spec = pointed_spec(&m, &l, &act, tol)?;
            (spec, Some((pointed_idempotents(&m, &l, &act)?, labels)), json!({ "pointed": input }))
        } else {
            let cat = src.category.as_deref().expect("clap requires one source");
            let (md, canon) = load_category(cat, tol)?;
            match a.n {
                Some(n) => {
                    let closed = cyclic_fusion(&md, n, a.sector_cap)?;
                    let labels = (0..n).map(|g| closed.sector_labels(g)).collect();
                    let spec = permutation_spec(&md, n, a.sector_cap)?;
                    let reference = permutation_idempotent_basis(&md, n, a.sector_cap)?;
                    (spec, Some((reference, labels)), json!({ "category": canon, "n": n, "sector_cap": a.sector_cap }))
                }
                None => {
                    let spec = modular_spec(&md)?;
                    let labels = vec![md.labels().to_vec()];
                    (spec, Some((modular_idempotents(&md), labels)), json!({ "category": canon }))
                }
            }
        };
    let mut out = recover_fusion(&spec, seed, tol)?;
    if let Some((reference, labels)) = reference {
        out = out.relabel(&spec, &reference, &labels, tol)?;
    }
    let residual = out.idempotents.residual(&spec);
    Ok(Produced {
        command: "engine-run",
        inputs,
        result: json!({ "ring": out.graded, "dplus": out.dplus, "idempotent_residual": residual }),
        text: graded_lines(&out.graded, format),
        coefficients: Some(out),
        exit: 0,
    })
}

fn verify(path: &str, tol: f64) -> CliResult<Produced> {
    let raw: Value = load(path)?;
    let graded = raw.get("sectors").is_some();
    let json_err = |source| CliError::Json { path: path.into(), source };
    let (violations, canon, lines): (Vec<Violation>, Value, Vec<String>) = if graded {
        let ring: GradedFusionRing = serde_json::from_value(raw).map_err(json_err)?;
        (ring.verify(tol), to_value(&ring), Vec::new())
    } else {
        let ring: FusionRing = serde_json::from_value(raw).map_err(json_err)?;
        (ring.verify(), to_value(&ring), Vec::new())
    };
    let mut text = lines;
    if violations.is_empty() {
        text.push("ok: all axioms hold".into());
    } else {
        text.extend(violations.iter().map(|v| v.to_string()));
    }
    Ok(Produced {
        command: "verify",
        inputs: json!({ "ring": canon }),
        result: json!({ "graded": graded, "passed": violations.is_empty(), "violations": violations }),
        text,
        coefficients: None,
        exit: if violations.is_empty() { 0 } else { 2 },
    })
}
