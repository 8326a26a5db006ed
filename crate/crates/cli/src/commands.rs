use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use qfhm::curvature::{curvature_form, FdScheme};
use qfhm::domain::Domain;
use qfhm::equivalence::{decide_rank_one_with_scheme, grammian_equality, verify_factorization, Verdict};
use qfhm::grid::domain_grid;
use qfhm::holomorphic::ComplexPoint;
use qfhm::kernels::KernelSpec;
use qfhm::linalg::hermitian_eigenvalues;
use qfhm::localization::localized_modulus;
use qfhm::mapanalysis::{rank_profile as profile, singular_sets};
use qfhm::suite::{run_suite, CheckRecord, SuiteKind};

use crate::input::{parse_kernel_spec, parse_map_spec, MapSpec};
use crate::output::{csv, sci, table_json, to_json, Cell, Metadata, Sci, SciPoint, Table};
use crate::{
    CheckArgs, CliError, CurvatureArgs, EquivArgs, EquivTest, Format, GridOut, GridSize, ModulusArgs, Outcome,
    RankProfileArgs, SchemeArgs,
};

pub const CONVENTION: &str = "per-proof";

struct Loaded<T> {
    value: T,
    sha256: String,
}

fn read(path: &Path) -> Result<(String, String), CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let sha = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        source: crate::input::InputError::Parse {
            line: 0,
            column: 0,
            message: e.to_string(),
        },
    })?;
    Ok((text, sha))
}

fn load_kernel(path: &Path) -> Result<Loaded<KernelSpec>, CliError> {
    let (text, sha256) = read(path)?;
    let value = parse_kernel_spec(&text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Loaded { value, sha256 })
}

fn load_map(path: &Path) -> Result<Loaded<MapSpec>, CliError> {
    let (text, sha256) = read(path)?;
    let value = parse_map_spec(&text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Loaded { value, sha256 })
}

fn scheme(args: &SchemeArgs) -> Result<FdScheme, CliError> {
    Ok(FdScheme::new(args.step, !args.no_richardson)?)
}

fn grid(domain: &Domain, size: GridSize) -> Result<Vec<ComplexPoint>, CliError> {
    let g = domain_grid(domain, size.rows, size.cols)?;
    if g.is_empty() {
        return Err(CliError::Usage(format!(
            "grid {} has no points inside the domain",
            size
        )));
    }
    Ok(g)
}

fn metadata(command: &str, inputs: &[(&str, &str)], size: GridSize, points: usize) -> Metadata {
    let mut m = Metadata::default();
    m.push("command", command);
    m.push("qfhm_version", env!("CARGO_PKG_VERSION"));
    for (name, sha) in inputs {
        m.push(&format!("{}_sha256", name), sha);
    }
    m.push("grid", size);
    m.push("grid_points", points);
    m
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn coordinate_columns(dim: usize) -> Vec<String> {
    if dim == 1 {
        return vec!["x".into(), "y".into()];
    }
    (1..=dim).flat_map(|k| [format!("x{}", k), format!("y{}", k)]).collect()
}

fn coordinate_cells(z: &ComplexPoint) -> Vec<Cell> {
    z.real_coords().into_iter().map(Cell::Float).collect()
}

fn write_table(io: &GridOut, meta: &Metadata, table: &Table) -> Result<(), CliError> {
    let text = match io.format {
        Format::Csv => csv(meta, table),
        Format::Json => table_json(meta, table),
    };
    emit(io.out.as_deref(), &text)
}

pub fn curvature(args: &CurvatureArgs) -> Result<Outcome, CliError> {
    let spec = load_kernel(&args.kernel)?;
    let scheme = scheme(&args.scheme)?;
    let domain = spec.value.domain();
    let points = grid(domain, args.io.grid)?;
    let forms = points
        .par_iter()
        .map(|z| curvature_form(&spec.value, z, &scheme))
        .collect::<qfhm::Result<Vec<_>>>()?;

    let n = domain.dim();
    let mut columns = coordinate_columns(n);
    for i in 1..=n {
        for j in 1..=n {
            columns.push(format!("re_c{}{}", i, j));
            columns.push(format!("im_c{}{}", i, j));
        }
    }
    let rows = points
        .iter()
        .zip(&forms)
        .map(|(z, f)| {
            let mut row = coordinate_cells(z);
            for i in 0..n {
                for j in 0..n {
                    let c = f.coeff(i, j);
                    row.push(Cell::Float(c.re));
                    row.push(Cell::Float(c.im));
                }
            }
            row
        })
        .collect();

    let mut meta = metadata("curvature", &[("kernel", &spec.sha256)], args.io.grid, points.len());
    meta.push("scheme", scheme);
    meta.push("kind", format!("{:?}", forms[0].kind()).to_lowercase());
    meta.push("convention", CONVENTION);
    write_table(&args.io, &meta, &Table { columns, rows })?;
    Ok(Outcome::Success)
}

pub fn modulus(args: &ModulusArgs) -> Result<Outcome, CliError> {
    let a = load_kernel(&args.kernel_a)?;
    let b = load_kernel(&args.kernel_b)?;
    let points = grid(a.value.domain(), args.io.grid)?;
    let spectra = points
        .par_iter()
        .map(|z| {
            Ok(hermitian_eigenvalues(
                &localized_modulus(&a.value, &b.value, z)?.modulus,
            ))
        })
        .collect::<qfhm::Result<Vec<Vec<f64>>>>()?;

    let mut columns = coordinate_columns(a.value.domain().dim());
    columns.extend((1..=a.value.rank()).map(|k| format!("mu{}", k)));
    let rows = points
        .iter()
        .zip(&spectra)
        .map(|(z, ev)| {
            let mut row = coordinate_cells(z);
            row.extend(ev.iter().map(|&x| Cell::Float(x)));
            row
        })
        .collect();

    let mut meta = metadata(
        "modulus",
        &[("kernel_a", &a.sha256), ("kernel_b", &b.sha256)],
        args.io.grid,
        points.len(),
    );
    meta.push("convention", CONVENTION);
    write_table(&args.io, &meta, &Table { columns, rows })?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct VerdictDoc<'a> {
    metadata: &'a Metadata,
    test: &'static str,
    verdict: Verdict,
    max_residual: Sci,
    witness_point: Option<SciPoint<'a>>,
    witness_residual: Option<Sci>,
    grid_size: usize,
    tolerance: Sci,
}

#[derive(Serialize)]
struct FactorizationDoc<'a> {
    metadata: &'a Metadata,
    test: &'static str,
    pass: bool,
    max_residual: Sci,
    worst_point: SciPoint<'a>,
    grid_size: usize,
    tolerance: Sci,
}

pub fn equiv(args: &EquivArgs) -> Result<Outcome, CliError> {
    let a = load_kernel(&args.kernel_a)?;
    let b = load_kernel(&args.kernel_b)?;
    let scheme = scheme(&args.scheme)?;
    let points = grid(a.value.domain(), args.grid)?;
    let mut inputs = vec![("kernel_a", a.sha256.as_str()), ("kernel_b", b.sha256.as_str())];

    let psi = match (args.test, &args.psi) {
        (EquivTest::Factorization, Some(path)) => Some(load_map(path)?),
        (EquivTest::Factorization, None) => {
            return Err(CliError::Usage("--test factorization needs --psi".into()));
        }
        (_, Some(_)) => return Err(CliError::Usage("--psi is only used with --test factorization".into())),
        (_, None) => None,
    };
    if let Some(p) = &psi {
        if &p.value.domain != a.value.domain() {
            return Err(CliError::Usage(
                "the domain of --psi differs from the kernels' domain".into(),
            ));
        }
        inputs.push(("psi", p.sha256.as_str()));
    }

    let mut meta = metadata("equiv", &inputs, args.grid, points.len());
    meta.push("tol", sci(args.tol));
    meta.push("scheme", scheme);
    meta.push("convention", CONVENTION);

    let (text, outcome, summary) = match args.test {
        EquivTest::Curvature | EquivTest::Grammian => {
            let (name, v) = if args.test == EquivTest::Curvature {
                (
                    "curvature",
                    decide_rank_one_with_scheme(&a.value, &b.value, &points, args.tol, &scheme)?,
                )
            } else {
                ("grammian", grammian_equality(&a.value, &b.value, &points, args.tol)?)
            };
            let doc = VerdictDoc {
                metadata: &meta,
                test: name,
                verdict: v.verdict,
                max_residual: Sci(v.max_residual),
                witness_point: v.witness_point.as_ref().map(SciPoint),
                witness_residual: v.witness_residual.map(Sci),
                grid_size: v.grid_size,
                tolerance: Sci(v.tolerance),
            };
            let outcome = match v.verdict {
                Verdict::Equivalent => Outcome::Success,
                Verdict::Inequivalent => Outcome::Inequivalent,
                Verdict::Inconclusive => Outcome::Inconclusive,
            };
            let mut summary = format!("verdict: {} (max residual {})", v.verdict, sci(v.max_residual));
            if let (Some(p), Some(r)) = (&v.witness_point, v.witness_residual) {
                summary.push_str(&format!(", witness {} with residual {}", p, sci(r)));
            }
            (to_json(&doc), outcome, summary)
        }
        EquivTest::Factorization => {
            let map = &psi.as_ref().expect("loaded above").value.map;
            let r = verify_factorization(&a.value, &b.value, map, &points, args.tol)?;
            let doc = FactorizationDoc {
                metadata: &meta,
                test: "factorization",
                pass: r.pass,
                max_residual: Sci(r.max_residual),
                worst_point: SciPoint(&r.worst_point),
                grid_size: r.grid_size,
                tolerance: Sci(r.tolerance),
            };
            // A failing candidate says nothing about other multipliers.
            let outcome = if r.pass {
                Outcome::Success
            } else {
                Outcome::Inconclusive
            };
            let summary = format!(
                "factorization: {} (max residual {} at {})",
                if r.pass { "pass" } else { "fail" },
                sci(r.max_residual),
                r.worst_point
            );
            (to_json(&doc), outcome, summary)
        }
    };

    match &args.out {
        Some(path) => {
            emit(Some(path), &text)?;
            println!("{}", summary);
        }
        None => emit(None, &text)?,
    }
    Ok(outcome)
}

pub fn rank_profile(args: &RankProfileArgs) -> Result<Outcome, CliError> {
    let map = load_map(&args.map)?;
    let points = grid(&map.value.domain, args.io.grid)?;
    let p = profile(&map.value.map, &points, args.tol)?;

    let mut columns = coordinate_columns(map.value.domain.dim());
    columns.push("rank".into());
    columns.push("smallest_singular_value".into());
    let rows = p
        .grid
        .iter()
        .zip(p.ranks.iter().zip(&p.smallest_singular))
        .map(|(z, (&k, &s))| {
            let mut row = coordinate_cells(z);
            row.push(Cell::Int(k as i64));
            row.push(Cell::Float(s));
            row
        })
        .collect();

    let mut meta = metadata("rank-profile", &[("map", &map.sha256)], args.io.grid, points.len());
    meta.push("tol", sci(args.tol));
    meta.push("convention", CONVENTION);
    write_table(&args.io, &meta, &Table { columns, rows })?;

    // The summary goes to stderr when the data itself is on stdout.
    let mut lines = Vec::new();
    for (k, set) in singular_sets(&p).into_iter().filter(|(_, s)| s.count > 0) {
        lines.push(format!(
            "rank {}: {} of {} points{}",
            k,
            set.count,
            p.grid.len(),
            if set.has_interior { ", has interior" } else { "" }
        ));
    }
    if lines.is_empty() {
        lines.push(format!("full rank {} at all {} points", p.m, p.grid.len()));
    }
    for l in lines {
        if args.io.out.is_some() {
            println!("{}", l);
        } else {
            eprintln!("{}", l);
        }
    }
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct RecordDoc<'a> {
    test: &'a str,
    residual: Sci,
    tolerance: Sci,
    pass: bool,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    flags: &'a [String],
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    metadata: &'a Metadata,
    passed: usize,
    failed: usize,
    records: Vec<RecordDoc<'a>>,
}

fn report(records: &[CheckRecord], suite: &str) -> String {
    let mut meta = Metadata::default();
    meta.push("command", "check");
    meta.push("qfhm_version", env!("CARGO_PKG_VERSION"));
    meta.push("suite", suite);
    meta.push("scheme", FdScheme::default());
    meta.push("convention", CONVENTION);
    let passed = records.iter().filter(|r| r.pass).count();
    let doc = ReportDoc {
        metadata: &meta,
        passed,
        failed: records.len() - passed,
        records: records
            .iter()
            .map(|r| RecordDoc {
                test: &r.test,
                residual: Sci(r.residual),
                tolerance: Sci(r.tolerance),
                pass: r.pass,
                flags: &r.flags,
            })
            .collect(),
    };
    to_json(&doc)
}

fn table(records: &[CheckRecord]) -> String {
    let width = records.iter().map(|r| r.test.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<6}{:<width$}  {:>19}  {:>19}\n",
        "",
        "test",
        "residual",
        "tolerance",
        width = width
    );
    for r in records {
        out.push_str(&format!(
            "{:<6}{:<width$}  {:>19}  {:>19}",
            if r.pass { "PASS" } else { "FAIL" },
            r.test,
            sci(r.residual),
            sci(r.tolerance),
            width = width
        ));
        if !r.flags.is_empty() {
            out.push_str("  [");
            out.push_str(&r.flags.join("; "));
            out.push(']');
        }
        out.push('\n');
    }
    let passed = records.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{} passed, {} failed\n", passed, records.len() - passed));
    out
}

pub fn check(args: &CheckArgs) -> Result<Outcome, CliError> {
    let (kind, name) = if args.oracle {
        (SuiteKind::Oracle, "oracle")
    } else {
        (SuiteKind::Full, "full")
    };
    let records = run_suite(kind);
    let json = report(&records, name);
    if let Some(path) = &args.out {
        emit(Some(path), &json)?;
    }
    if args.json {
        print!("{}", json);
    } else {
        print!("{}", table(&records));
    }
    Ok(if records.iter().all(|r| r.pass) {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}
