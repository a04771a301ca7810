//! Command-line entry point: ingestion, verification sweeps, and report
//! serialization tying the modules together. Reports are deterministic for
//! fixed inputs up to the embedded timestamp field.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::congruence::{
    cusp_fiber_count, cusp_set, index, negligibility_sums, parabolic_index, sl2_order_mod,
    CongruenceLevel, CuspRep,
};
use crate::growth::{growth_lower_bound, measured_torsion_sum, AcyclicMode};
use crate::integral::{
    build_rep_external, cheeger_torsion, pm_split_integral, smith_cohomology, total_complex,
    DegreeData, IntegralCohomologyTable,
};
use crate::kostant::{
    boundary_cohomology, verify_signature, Signature, Weight, DEFAULT_DIMENSION_CAP,
};
use crate::numberfield::{load_field, IdealHnf, NumberFieldData, StrInt};
use crate::report::{approx_decimal, int_value, rat_f64, rat_value, rat_with_float};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser)]
#[command(name = "cusptor", about = "Exact cusp combinatorics, boundary complexes, and integral torsion tables for SL(2) over number fields", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// residue rings larger than this are rejected
    #[arg(long, default_value_t = crate::numberfield::DEFAULT_ENUMERATION_BOUND, global = true)]
    enumeration_bound: u64,
    /// significant bits for decimal renderings of exact values
    #[arg(long, default_value_t = 64, global = true)]
    precision_bits: u32,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a number field document
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
    /// Enumerate cusps of a principal congruence level
    Cusps(CuspsArgs),
    /// Index of nested principal congruence subgroups
    Index(IndexArgs),
    /// Negligibility sums along an ideal sequence
    Negligibility(NegligibilityArgs),
    /// Boundary-complex verification and reports
    Kostant {
        #[command(subcommand)]
        action: KostantAction,
    },
    /// Integral cohomology of cusp cross-sections
    Integral {
        #[command(subcommand)]
        action: IntegralAction,
    },
    /// Torsion growth reports
    Growth {
        #[command(subcommand)]
        action: GrowthAction,
    },
}

#[derive(Subcommand)]
enum FieldAction {
    Validate {
        #[arg(long)]
        field: PathBuf,
    },
}

#[derive(Args)]
struct CuspsArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    level: PathBuf,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    level1: PathBuf,
    #[arg(long)]
    level2: PathBuf,
}

#[derive(Args)]
struct NegligibilityArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    level1: PathBuf,
    #[arg(long)]
    ideals: PathBuf,
}

#[derive(Subcommand)]
enum KostantAction {
    /// Sweep all weights up to a bound and report per-check pass counts
    Verify {
        #[arg(long)]
        r1: usize,
        #[arg(long)]
        r2: usize,
        #[arg(long, default_value_t = 3)]
        max_weight: u32,
    },
    /// Boundary cohomology of one weight
    Boundary {
        #[arg(long)]
        weight: PathBuf,
    },
}

#[derive(Subcommand)]
enum IntegralAction {
    /// Cohomology table of a lattice representation
    Cohom {
        #[arg(long)]
        rep: PathBuf,
        /// split the free part by fiber degree for this signature
        #[arg(long)]
        r1: Option<usize>,
        #[arg(long)]
        r2: Option<usize>,
    },
    /// Torsion quantity of a cohomology table
    Cheeger {
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Subcommand)]
enum GrowthAction {
    Report {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        ideals: PathBuf,
        /// base level of the sequence (defaults to the first sequence entry)
        #[arg(long)]
        level1: Option<PathBuf>,
        /// ingested L2-torsion constant, rational p/q
        #[arg(long, allow_hyphen_values = true)]
        t2: String,
        /// ingested volume, rational p/q
        #[arg(long, allow_hyphen_values = true)]
        vol: String,
        /// optional JSON array of cohomology tables, one per level, for
        /// measured torsion sums
        #[arg(long)]
        tables: Option<PathBuf>,
        #[arg(long, value_parser = ["acyclic", "selfdual"])]
        mode: String,
        #[arg(long, default_value = "ingested")]
        t2_provenance: String,
        #[arg(long, default_value = "ingested")]
        vol_provenance: String,
    },
}

#[derive(Debug)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl RunError {
    fn input(message: impl Into<String>) -> RunError {
        RunError { code: EXIT_INPUT, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> RunError {
        RunError { code: EXIT_VERIFICATION, message: message.into() }
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            let rendered = serde_json::to_string_pretty(&report).expect("serializable report");
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, rendered + "\n") {
                        eprintln!("cusptor: cannot write output: {e}");
                        return EXIT_INPUT;
                    }
                }
                None => println!("{rendered}"),
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("cusptor: {}", e.message);
            e.code
        }
    }
}

fn envelope(command: &str, result: Value) -> Value {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "command": command,
        "timestamp": timestamp,
        "result": result,
        "status": "ok",
    })
}

fn execute(cli: &Cli) -> Result<Value, RunError> {
    let bound = cli.enumeration_bound;
    let bits = cli.precision_bits;
    match &cli.command {
        Command::Field { action: FieldAction::Validate { field } } => {
            let f = read_field(field)?;
            Ok(envelope(
                "field validate",
                json!({
                    "degree": f.degree,
                    "signature": [f.signature.0, f.signature.1],
                    "dirichlet_rank": f.dirichlet_rank(),
                    "torsion_order": f.torsion_unit_order,
                    "class_number": f.class_group_ideals.len(),
                    "discriminant": f.discriminant.as_ref().map(int_value),
                }),
            ))
        }
        Command::Cusps(args) => {
            let f = read_field(&args.field)?;
            let level = read_level(&f, &args.level)?;
            let cusps = cusp_set(&f, &level, bound).map_err(input_err)?;
            let listed: Vec<Value> = cusps
                .iter()
                .map(|c| {
                    json!({
                        "eta": [c.eta.0, c.eta.1],
                        "ideal_class_index": c.ideal_class_index,
                        "stabilizer_size": c.stabilizer_size,
                    })
                })
                .collect();
            Ok(envelope(
                "cusps",
                json!({
                    "level_norm": int_value(&level.ideal.norm()),
                    "count": cusps.len(),
                    "cusps": listed,
                }),
            ))
        }
        Command::Index(args) => {
            let f = read_field(&args.field)?;
            let l1 = read_level(&f, &args.level1)?;
            let l2 = read_level(&f, &args.level2)?;
            let idx = index(&f, &l1, &l2, bound).map_err(input_err)?;
            let cusp = principal_cusp();
            let par = parabolic_index(&f, &l1, &l2, &cusp, bound).map_err(input_err)?;
            let fiber = cusp_fiber_count(&f, &l1, &l2, &cusp, bound).map_err(input_err)?;
            let enumerable = |l: &CongruenceLevel| {
                l.ideal.norm().to_u64().map_or(false, |n| n <= bound.min(1024))
            };
            Ok(envelope(
                "index",
                json!({
                    "enumeration_path": [enumerable(&l1), enumerable(&l2)],
                    "order_mod_level1": int_value(&sl2_order_mod(&f, &l1, bound).map_err(input_err)?),
                    "order_mod_level2": int_value(&sl2_order_mod(&f, &l2, bound).map_err(input_err)?),
                    "index": int_value(&idx),
                    "parabolic_index": int_value(&par),
                    "cusp_fiber_count": int_value(&fiber),
                }),
            ))
        }
        Command::Negligibility(args) => {
            let f = read_field(&args.field)?;
            let l1 = read_level(&f, &args.level1)?;
            let seq = read_level_sequence(&f, &args.ideals)?;
            let rows = negligibility_sums(&f, &l1, &seq, bound).map_err(input_err)?;
            let rendered: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "level_norm": int_value(&r.level_norm),
                        "index": int_value(&r.index),
                        "sum28": rat_with_float(&r.sum28, bits),
                        "sum29_terms": r
                            .sum29_terms
                            .iter()
                            .map(|(t, mult)| json!({"parabolic_index": int_value(t), "count": mult}))
                            .collect::<Vec<_>>(),
                        "sum29": r.sum29_float,
                    })
                })
                .collect();
            Ok(envelope("negligibility", json!({ "rows": rendered })))
        }
        Command::Kostant { action } => match action {
            KostantAction::Verify { r1, r2, max_weight } => {
                if r1 + r2 == 0 {
                    return Err(RunError::input("signature must be nonzero"));
                }
                let report = verify_signature(Signature::new(*r1, *r2), *max_weight);
                let value = json!({
                    "signature": [r1, r2],
                    "max_weight": max_weight,
                    "weights_checked": report.weights_checked,
                    "unsupported_skipped": report.unsupported_skipped,
                    "not_fredholm_count": report.not_fredholm_count,
                    "checks": {
                        "hodge_kernel": check_line(report.weights_checked, &report.hodge_failures),
                        "horizontal_kernel": check_line(report.weights_checked, &report.horizontal_failures),
                        "fredholm_gate": check_line(report.weights_checked, &report.fredholm_failures),
                        "boundary_duality": check_line(report.weights_checked, &report.duality_failures),
                        "weight_commutation": check_line(report.weights_checked, &report.differential_failures),
                    },
                    "pass": report.pass(),
                });
                if report.pass() {
                    Ok(envelope("kostant verify", value))
                } else {
                    Err(RunError::verification(format!(
                        "verification failed: {}",
                        serde_json::to_string(&value).unwrap_or_default()
                    )))
                }
            }
            KostantAction::Boundary { weight } => {
                let (sig, w) = read_weight(weight)?;
                let b = boundary_cohomology(sig, &w).map_err(input_err)?;
                Ok(envelope(
                    "kostant boundary",
                    json!({
                        "signature": [sig.r1, sig.r2],
                        "weight": {"m": w.m, "n": w.n, "nbar": w.nbar},
                        "nontrivial": b.nontrivial,
                        "condition": b.condition,
                        "dims": b.dims,
                        "plus": b.plus,
                        "minus": b.minus,
                        "plus_generators": b.plus_generators,
                        "minus_generators": b.minus_generators,
                    }),
                ))
            }
        },
        Command::Integral { action } => match action {
            IntegralAction::Cohom { rep, r1, r2 } => {
                let doc = read_to_string(rep)?;
                let rep = build_rep_external(&doc).map_err(input_err)?;
                let complex = total_complex(&rep).map_err(input_err)?;
                let table = smith_cohomology(&complex);
                let mut value = json!({
                    "term_ranks": complex.dims,
                    "euler_characteristic": table.euler_characteristic,
                    "degrees": table_value(&table),
                });
                if let (Some(r1), Some(r2)) = (r1, r2) {
                    let split = pm_split_integral(&table, *r1, *r2).map_err(input_err)?;
                    value["pm_split"] = json!({"plus": split.plus, "minus": split.minus});
                }
                Ok(envelope("integral cohom", value))
            }
            IntegralAction::Cheeger { table } => {
                let t = read_table(table)?;
                let tau2 = cheeger_torsion(&t);
                Ok(envelope(
                    "integral cheeger",
                    json!({
                        "tau_squared": rat_value(&tau2),
                        "tau_squared_approx": approx_decimal(&tau2, bits),
                    }),
                ))
            }
        },
        Command::Growth { action } => match action {
            GrowthAction::Report {
                field,
                ideals,
                level1,
                t2,
                vol,
                tables,
                mode,
                t2_provenance,
                vol_provenance,
            } => {
                let f = read_field(field)?;
                let seq = read_level_sequence(&f, ideals)?;
                if seq.is_empty() {
                    return Err(RunError::input("ideal sequence is empty"));
                }
                let l1 = match level1 {
                    Some(p) => read_level(&f, p)?,
                    None => seq[0].clone(),
                };
                let t2 = parse_rational(t2)?;
                let vol = parse_rational(vol)?;
                let mode = if mode == "acyclic" {
                    AcyclicMode::Acyclic
                } else {
                    AcyclicMode::SelfDualLattice
                };
                let sig = Signature::new(f.signature.0, f.signature.1);
                let measured_tables = match tables {
                    Some(p) => Some(read_tables(p, seq.len())?),
                    None => None,
                };
                let mut levels = Vec::new();
                for (i, level) in seq.iter().enumerate() {
                    let idx = index(&f, &l1, level, bound).map_err(input_err)?;
                    let cusps = cusp_set(&f, level, bound).map_err(input_err)?.len() as u64;
                    let measured = measured_tables
                        .as_ref()
                        .map(|ts| measured_torsion_sum(&ts[i], sig.r1, &idx));
                    levels.push((level.ideal.norm(), idx, cusps, measured));
                }
                let rows = negligibility_sums(&f, &l1, &seq, bound).map_err(input_err)?;
                let report = growth_lower_bound(
                    sig,
                    mode,
                    t2,
                    vol,
                    t2_provenance,
                    vol_provenance,
                    levels,
                    rows,
                )
                .map_err(|e| RunError::input(e.to_string()))?;
                let levels_value: Vec<Value> = report
                    .levels
                    .iter()
                    .map(|row| {
                        json!({
                            "level_norm": int_value(&row.level_norm),
                            "index": int_value(&row.index),
                            "cusp_count": row.cusp_count,
                            "predicted_partial": rat_with_float(&row.predicted_partial, bits),
                            "measured": row.measured,
                        })
                    })
                    .collect();
                let neg_value: Vec<Value> = report
                    .negligibility
                    .iter()
                    .map(|r| {
                        json!({
                            "level_norm": int_value(&r.level_norm),
                            "sum28": rat_with_float(&r.sum28, bits),
                            "sum29": r.sum29_float,
                        })
                    })
                    .collect();
                let mut table = String::new();
                table.push_str(&format!(
                    "growth report: mode {}, bound {} ({})\n",
                    match report.mode {
                        AcyclicMode::Acyclic => "acyclic",
                        AcyclicMode::SelfDualLattice => "selfdual",
                    },
                    report.bound,
                    approx_decimal(&report.bound, bits),
                ));
                table.push_str("  norm        index       cusps  predicted     sum28        sum29\n");
                for (row, neg) in report.levels.iter().zip(&report.negligibility) {
                    table.push_str(&format!(
                        "  {:<10}  {:<10}  {:<5}  {:<11}  {:<11}  {:.6}\n",
                        row.level_norm,
                        row.index,
                        row.cusp_count,
                        approx_decimal(&row.predicted_partial, 20),
                        approx_decimal(&neg.sum28, 20),
                        neg.sum29_float,
                    ));
                }
                eprint!("{table}");
                Ok(envelope(
                    "growth report",
                    json!({
                        "signature": [report.r1, report.r2],
                        "mode": match report.mode {
                            AcyclicMode::Acyclic => "acyclic",
                            AcyclicMode::SelfDualLattice => "selfdual",
                        },
                        "t2": rat_with_float(&report.t2, bits),
                        "t2_provenance": report.t2_provenance,
                        "vol1": rat_with_float(&report.vol1, bits),
                        "vol_provenance": report.vol_provenance,
                        "fundamental_rank_ok": report.fundamental_rank_ok,
                        "bound": rat_with_float(&report.bound, bits),
                        "bound_float": rat_f64(&report.bound),
                        "levels": levels_value,
                        "negligibility": neg_value,
                    }),
                ))
            }
        },
    }
}

fn check_line(total: u64, failures: &[String]) -> Value {
    json!({
        "pass": failures.is_empty(),
        "checked": total,
        "failures": failures,
    })
}

fn principal_cusp() -> CuspRep {
    CuspRep { eta: (vec![1], vec![0]), ideal_class_index: 0, stabilizer_size: 1 }
}

fn input_err(e: impl std::fmt::Display) -> RunError {
    RunError::input(e.to_string())
}

fn read_to_string(path: &PathBuf) -> Result<String, RunError> {
    fs::read_to_string(path)
        .map_err(|e| RunError::input(format!("cannot read {}: {e}", path.display())))
}

fn read_field(path: &PathBuf) -> Result<NumberFieldData, RunError> {
    let text = read_to_string(path)?;
    load_field(&text).map_err(input_err)
}

#[derive(Deserialize)]
struct IdealDoc {
    #[serde(default)]
    hnf: Option<Vec<Vec<StrInt>>>,
    #[serde(default)]
    principal: Option<Vec<StrInt>>,
    #[serde(default)]
    power: Option<u32>,
    #[serde(default)]
    torsion_free: Option<bool>,
}

fn level_from_doc(field: &NumberFieldData, doc: &IdealDoc) -> Result<CongruenceLevel, RunError> {
    let base = if let Some(hnf) = &doc.hnf {
        let m: Vec<Vec<BigInt>> = hnf
            .iter()
            .map(|row| row.iter().map(|x| x.to_bigint().map_err(input_err)).collect())
            .collect::<Result<_, _>>()?;
        field.validate_ideal(&m).map_err(input_err)?
    } else if let Some(coords) = &doc.principal {
        let v: Vec<BigInt> = coords
            .iter()
            .map(|x| x.to_bigint().map_err(input_err))
            .collect::<Result<_, _>>()?;
        if v.len() != field.degree {
            return Err(RunError::input("principal generator has wrong length"));
        }
        field.principal_ideal(&v)
    } else {
        return Err(RunError::input("ideal document needs 'hnf' or 'principal'"));
    };
    let ideal = match doc.power {
        Some(e) => field.ideal_pow(&base, e),
        None => base,
    };
    if doc.torsion_free.unwrap_or(false) {
        CongruenceLevel::with_torsion_free_flag(ideal).map_err(input_err)
    } else {
        Ok(CongruenceLevel::new(ideal))
    }
}

fn read_level(field: &NumberFieldData, path: &PathBuf) -> Result<CongruenceLevel, RunError> {
    let text = read_to_string(path)?;
    let doc: IdealDoc = serde_json::from_str(&text).map_err(input_err)?;
    level_from_doc(field, &doc)
}

fn read_level_sequence(
    field: &NumberFieldData,
    path: &PathBuf,
) -> Result<Vec<CongruenceLevel>, RunError> {
    let text = read_to_string(path)?;
    let docs: Vec<IdealDoc> = serde_json::from_str(&text).map_err(input_err)?;
    docs.iter().map(|d| level_from_doc(field, d)).collect()
}

#[derive(Deserialize)]
struct WeightDoc {
    r1: usize,
    r2: usize,
    m: Vec<u32>,
    n: Vec<u32>,
    nbar: Vec<u32>,
}

fn read_weight(path: &PathBuf) -> Result<(Signature, Weight), RunError> {
    let text = read_to_string(path)?;
    let doc: WeightDoc = serde_json::from_str(&text).map_err(input_err)?;
    if doc.r1 + doc.r2 == 0 {
        return Err(RunError::input("signature must be nonzero"));
    }
    let sig = Signature::new(doc.r1, doc.r2);
    let w = Weight::new(doc.m, doc.n, doc.nbar);
    if !w.matches(sig) {
        return Err(RunError::input("weight does not match the signature"));
    }
    let _ = crate::kostant::build_dc(sig, &w, DEFAULT_DIMENSION_CAP).map_err(input_err)?;
    Ok((sig, w))
}

fn table_value(table: &IntegralCohomologyTable) -> Value {
    let degrees: Vec<Value> = table
        .degrees
        .iter()
        .enumerate()
        .map(|(q, d)| {
            json!({
                "q": q,
                "free_rank": d.free_rank,
                "invariant_factors": d.invariant_factors.iter().map(int_value).collect::<Vec<_>>(),
                "fiber_ranks": d.fiber_ranks,
            })
        })
        .collect();
    Value::Array(degrees)
}

#[derive(Deserialize)]
struct TableDoc {
    degrees: Vec<TableDegreeDoc>,
}

#[derive(Deserialize)]
struct TableDegreeDoc {
    #[allow(dead_code)]
    #[serde(default)]
    q: usize,
    free_rank: usize,
    invariant_factors: Vec<StrInt>,
    #[serde(default)]
    fiber_ranks: Vec<usize>,
}

fn read_tables(path: &PathBuf, expected: usize) -> Result<Vec<IntegralCohomologyTable>, RunError> {
    let text = read_to_string(path)?;
    let docs: Vec<TableDoc> = serde_json::from_str(&text).map_err(input_err)?;
    if docs.len() != expected {
        return Err(RunError::input(format!(
            "expected {expected} tables, found {}",
            docs.len()
        )));
    }
    docs.iter().map(table_from_doc).collect()
}

fn read_table(path: &PathBuf) -> Result<IntegralCohomologyTable, RunError> {
    let text = read_to_string(path)?;
    let doc: TableDoc = serde_json::from_str(&text).map_err(input_err)?;
    table_from_doc(&doc)
}

fn table_from_doc(doc: &TableDoc) -> Result<IntegralCohomologyTable, RunError> {
    let degrees: Vec<DegreeData> = doc
        .degrees
        .iter()
        .map(|d| {
            let factors: Result<Vec<BigInt>, RunError> = d
                .invariant_factors
                .iter()
                .map(|x| x.to_bigint().map_err(input_err))
                .collect();
            Ok(DegreeData {
                free_rank: d.free_rank,
                invariant_factors: factors?,
                fiber_ranks: d.fiber_ranks.clone(),
            })
        })
        .collect::<Result<_, RunError>>()?;
    let euler = degrees
        .iter()
        .enumerate()
        .map(|(q, d)| if q % 2 == 0 { d.free_rank as i64 } else { -(d.free_rank as i64) })
        .sum();
    Ok(IntegralCohomologyTable { degrees, euler_characteristic: euler })
}

/// Parse "p/q", an integer, or a plain decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, RunError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| RunError::input(format!("bad rational {s}")))?;
        let d: BigInt = den.trim().parse().map_err(|_| RunError::input(format!("bad rational {s}")))?;
        if d.is_zero() {
            return Err(RunError::input("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let w: BigInt = if whole == "-" || whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| RunError::input(format!("bad decimal {s}")))?
        };
        let digits = frac.len() as u32;
        let f: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| RunError::input(format!("bad decimal {s}")))?
        };
        let scale = BigInt::from(10).pow(digits);
        let abs = BigRational::new(w.magnitude().clone().into(), BigInt::one())
            + BigRational::new(f, scale);
        return Ok(if neg { -abs } else { abs });
    }
    let n: BigInt = s.parse().map_err(|_| RunError::input(format!("bad rational {s}")))?;
    Ok(BigRational::from(n))
}

/// Build an HNF ideal from raw integer rows (used by integration tests).
pub fn ideal_from_rows(field: &NumberFieldData, rows: &[Vec<i64>]) -> Result<IdealHnf, RunError> {
    let m = crate::linalg::mat_from_i64(rows);
    field.validate_ideal(&m).map_err(input_err)
}
