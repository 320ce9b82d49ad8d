//! One function per subcommand. Each prints its result and returns the exit
//! code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use shift_equiv_core::decide::{decide as decide_pair, decide_mod, DecideOptions, Decision, Route, Timings};
use shift_equiv_core::finite::{classify_single_eigenvalue, enumerate_classes, FiniteTriangularModule};
use shift_equiv_core::forms::{self, cjj_row, fundamental_solution_pell, BinaryQuadraticForm};
use shift_equiv_core::intlin::bowen_franks as cokernel;
use shift_equiv_core::order::{class_count, classify_conductor2, classify_irreducible, order_from_charpoly, ClassCount};
use shift_equiv_core::split::{classify_split, descent_canonicalize, SplitClasses};
use shift_equiv_core::verdict::Certificate;
use shift_equiv_core::{search_witness, IntMatrix, IntPoly, SEVerdict, SEWitness};

use crate::input::{collect_matrices, parse_int, parse_poly};
use crate::{CliError, Config, Format};

type Res = Result<u8, CliError>;

/// `println!` that stays quiet when stdout is closed early (e.g. `| head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn exit_code(v: &SEVerdict) -> u8 {
    match v {
        SEVerdict::Equivalent { .. } => 0,
        SEVerdict::NotEquivalent { .. } => 3,
        SEVerdict::Unknown { .. } => 4,
    }
}

fn print_json<T: Serialize>(v: &T) {
    out!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn print_witness(w: &SEWitness) {
    out!("lag {}", w.lag);
    out!("R = {}", w.r);
    out!("S = {}", w.s);
}

fn print_decision(cfg: &Config, d: &Decision) {
    match cfg.format {
        Format::Json => print_json(&json!({
            "verdict": d.verdict.status(),
            "certificate": Certificate::from(&d.verdict),
            "route": d.route,
            "timings": d.timings,
        })),
        Format::Text | Format::Tsv => {
            out!("{} (route {})", d.verdict.status(), d.route);
            match &d.verdict {
                SEVerdict::Equivalent { witness } => print_witness(witness),
                SEVerdict::NotEquivalent { certificate } => {
                    out!("invariant: {}", certificate.invariant);
                    out!("  first:  {}", certificate.left);
                    out!("  second: {}", certificate.right);
                }
                SEVerdict::Unknown { reason } => out!("reason: {reason}"),
            }
        }
    }
}

pub fn decide(cfg: &Config, inline: &[String], files: &[PathBuf]) -> Res {
    let ms = collect_matrices(inline, files, 2)?;
    let opts = DecideOptions {
        entry_bound: cfg.entry_bound,
        max_lag: cfg.max_lag,
    };
    let d = decide_pair(&ms[0], &ms[1], &opts)?;
    print_decision(cfg, &d);
    Ok(exit_code(&d.verdict))
}

pub fn witness(cfg: &Config, inline: &[String], files: &[PathBuf]) -> Res {
    let ms = collect_matrices(inline, files, 2)?;
    let start = Instant::now();
    let verdict = match search_witness(&ms[0], &ms[1], cfg.entry_bound, cfg.max_lag) {
        Some(w) => SEVerdict::equivalent(w),
        None => SEVerdict::unknown(format!(
            "no witness with entries ≤ {} and lag ≤ {}",
            cfg.entry_bound, cfg.max_lag
        )),
    };
    let total = start.elapsed().as_secs_f64() * 1e3;
    let d = Decision {
        verdict,
        route: Route::Oracle,
        timings: Timings {
            dispatch_ms: total,
            total_ms: total,
            ..Timings::default()
        },
    };
    print_decision(cfg, &d);
    Ok(exit_code(&d.verdict))
}

#[derive(Serialize)]
struct ClassRow {
    matrix: IntMatrix,
    se_class: usize,
    label: String,
}

#[derive(Serialize)]
struct ClassTable {
    polynomial: String,
    route: Route,
    iso_count: Option<usize>,
    se_count: Option<usize>,
    description: Option<String>,
    classes: Vec<ClassRow>,
}

fn monic(p: &IntPoly) -> Result<(), CliError> {
    if !p.is_monic() {
        return Err(CliError::Usage(format!("{p} is not monic")));
    }
    Ok(())
}

fn split_table(chi: &IntPoly, roots: &[BigInt]) -> Result<ClassTable, CliError> {
    let polynomial = chi.to_string();
    let big = |x: i64| BigInt::from(x);
    // A zero root contributes a nilpotent part, which is invisible.
    if roots.iter().any(Zero::is_zero) {
        let other = roots.iter().find(|r| !r.is_zero()).cloned().unwrap_or_default();
        let matrix = IntMatrix::diagonal(&[other.clone(), big(0)]);
        return Ok(ClassTable {
            polynomial,
            route: Route::Split,
            iso_count: None,
            se_count: Some(1),
            description: Some(format!("every such matrix is shift equivalent to [[{other}]]")),
            classes: vec![ClassRow { matrix, se_class: 0, label: format!("[[{other}]]") }],
        });
    }
    let (l1, l2) = (roots[0].clone(), roots.get(1).cloned().unwrap_or_else(|| roots[0].clone()));
    Ok(match classify_split(&l1, &l2)? {
        SplitClasses::Representatives { values } => {
            let classes = values
                .iter()
                .enumerate()
                .map(|(k, a)| {
                    let matrix = IntMatrix::new(2, 2, vec![l1.clone(), big(0), a.clone(), l2.clone()]).expect("2x2");
                    let label = match descent_canonicalize(&matrix) {
                        Ok((tag, _)) => format!("{tag:?} = {}", tag.matrix()),
                        Err(_) => format!("M_{a}"),
                    };
                    ClassRow { matrix, se_class: k, label }
                })
                .collect::<Vec<_>>();
            ClassTable {
                polynomial,
                route: Route::Split,
                iso_count: None,
                se_count: Some(classes.len()),
                description: None,
                classes,
            }
        }
        SplitClasses::Symbolic { description, .. } => ClassTable {
            polynomial,
            route: Route::Split,
            iso_count: None,
            se_count: None,
            description: Some(description),
            classes: vec![
                ClassRow {
                    matrix: IntMatrix::diagonal(&[l1.clone(), l1.clone()]),
                    se_class: 0,
                    label: "M_0".into(),
                },
                ClassRow {
                    matrix: IntMatrix::new(2, 2, vec![l1.clone(), big(0), big(1), l1.clone()]).expect("2x2"),
                    se_class: 1,
                    label: "M_1".into(),
                },
            ],
        },
    })
}

fn quadratic_table(chi: &IntPoly) -> Result<ClassTable, CliError> {
    let polynomial = chi.to_string();
    let order = order_from_charpoly(chi)?;
    let classes: Vec<ClassRow> = if order.conductor == BigInt::from(2) {
        classify_conductor2(chi)?
            .into_iter()
            .map(|c| {
                let mut label = c.descriptor.to_string();
                if !c.aliases.is_empty() {
                    let aliases: Vec<String> = c.aliases.iter().map(|a| a.to_string()).collect();
                    label = format!("{label} (≅ {})", aliases.join(", "));
                }
                ClassRow { matrix: c.matrix, se_class: c.se_class, label }
            })
            .collect()
    } else {
        classify_irreducible(chi)?
            .into_iter()
            .map(|c| ClassRow {
                label: format!("conductor {}, class of {}", c.conductor, c.form),
                matrix: c.matrix,
                se_class: c.se_class,
            })
            .collect()
    };
    let se = classes.iter().map(|c| c.se_class + 1).max().unwrap_or(0);
    Ok(ClassTable {
        polynomial,
        route: Route::Quadratic,
        iso_count: Some(classes.len()),
        se_count: Some(se),
        description: None,
        classes,
    })
}

pub fn classify(cfg: &Config, text: &str) -> Res {
    let chi = parse_poly(text)?;
    monic(&chi)?;
    let table = match chi.degree() {
        Some(1) => {
            let l = -chi.coeff(0);
            ClassTable {
                polynomial: chi.to_string(),
                route: Route::Split,
                iso_count: Some(1),
                se_count: Some(1),
                description: None,
                classes: vec![ClassRow { matrix: IntMatrix::diagonal(std::slice::from_ref(&l)), se_class: 0, label: format!("[[{l}]]") }],
            }
        }
        Some(2) => {
            let roots = chi.integer_roots();
            if roots.is_empty() {
                quadratic_table(&chi)?
            } else {
                split_table(&chi, &roots)?
            }
        }
        _ => {
            return Err(shift_equiv_core::Error::Unsupported(format!(
                "{chi}: classification is implemented for degree at most 2"
            ))
            .into())
        }
    };
    match cfg.format {
        Format::Json => print_json(&table),
        Format::Text | Format::Tsv => {
            out!("{} (route {})", table.polynomial, table.route);
            if let (Some(i), Some(s)) = (table.iso_count, table.se_count) {
                out!("isomorphism classes: {i}, shift equivalence classes: {s}");
            } else if let Some(s) = table.se_count {
                out!("shift equivalence classes: {s}");
            }
            if let Some(d) = &table.description {
                out!("{d}");
            }
            for c in &table.classes {
                out!("  [{}] {}  {}", c.se_class, c.matrix, c.label);
            }
        }
    }
    Ok(0)
}

pub fn scan_cjj(cfg: &Config, c_min: i64, c_max: i64) -> Res {
    if c_min > c_max {
        return Err(CliError::Usage(format!("empty range [{c_min}, {c_max}]")));
    }
    // Rows are computed in parallel; `collect` keeps them ordered by c.
    let rows: Vec<_> = (c_min..=c_max).into_par_iter().map(|c| cjj_row(&BigInt::from(c))).collect();
    match cfg.format {
        Format::Json => print_json(&rows),
        Format::Text | Format::Tsv => {
            out!("c\tR~J0\tR~J1\tJ0~J1");
            for r in &rows {
                out!("{}\t{}\t{}\t{}", r.c, r.r_j0, r.r_j1, r.j0_j1);
            }
        }
    }
    Ok(0)
}

pub fn picard(cfg: &Config, text: &str) -> Res {
    let chi = parse_poly(text)?;
    monic(&chi)?;
    if chi.degree() != Some(2) || !chi.integer_roots().is_empty() {
        return Err(CliError::Usage(format!("{chi} is not an irreducible quadratic")));
    }
    let order = order_from_charpoly(&chi)?;
    let wide = forms::class_representatives(&order.disc, true)?;
    let narrow = forms::class_number(&order.disc)?;
    let unit = if order.disc > BigInt::zero() {
        Some(fundamental_solution_pell(&order.disc)?)
    } else {
        None
    };
    let se = match class_count(&chi)? {
        ClassCount::Finite { se_count, .. } => Some(se_count),
        ClassCount::Symbolic { .. } => None,
    };
    let out = json!({
        "polynomial": chi.to_string(),
        "order": order,
        "picard_order": wide.len(),
        "narrow_class_number": narrow,
        "classes": wide.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "fundamental_unit": unit.as_ref().map(|u| u.to_string()),
        "fundamental_unit_norm": unit.as_ref().map(|u| u.norm),
        "shift_equivalence_classes": se,
    });
    match cfg.format {
        Format::Json => print_json(&out),
        Format::Text | Format::Tsv => {
            out!("{chi}: order of discriminant {} (conductor {})", order.disc, order.conductor);
            out!("|Pic| = {} (narrow: {narrow})", wide.len());
            for f in &wide {
                out!("  {f}");
            }
            if let Some(u) = &unit {
                out!("fundamental unit {u} of norm {}", u.norm);
            }
            if let Some(s) = se {
                out!("shift equivalence classes with this characteristic polynomial: {s}");
            }
        }
    }
    Ok(0)
}

pub fn solve_form(cfg: &Config, args: [&String; 4]) -> Res {
    let [a, b, c, n] = args.map(|s| parse_int(s));
    let (a, b, c, n) = (a?, b?, c?, n?);
    let f = BinaryQuadraticForm::new(a, b, c);
    let sol = forms::represent(&f, &n)?;
    match cfg.format {
        Format::Json => print_json(&json!({ "form": f, "n": shift_equiv_core::bigser::Entry(&n), "solution": sol })),
        Format::Text | Format::Tsv => match &sol {
            Some(s) => out!("{f} = {n} at (x, y) = ({}, {})", s.x, s.y),
            None => out!("{f} does not represent {n}"),
        },
    }
    Ok(0)
}

pub fn bowen_franks(cfg: &Config, inline: Option<&str>, file: Option<&Path>, polys: &[String]) -> Res {
    let inline: Vec<String> = inline.map(str::to_string).into_iter().collect();
    let files: Vec<PathBuf> = file.map(Path::to_path_buf).into_iter().collect();
    let t = collect_matrices(&inline, &files, 1)?.remove(0);
    let mut rows = Vec::new();
    for p in polys {
        let f = parse_poly(p)?;
        let g = cokernel(&t, &f);
        let unit_constant = f.coeff(0).to_i64().is_some_and(|c| c == 1 || c == -1);
        rows.push(json!({
            "polynomial": f.to_string(),
            "group": g.to_string(),
            "free_rank": g.free_rank,
            "torsion": g.torsion.iter().map(shift_equiv_core::bigser::Entry).collect::<Vec<_>>(),
            "shift_invariant": unit_constant,
        }));
    }
    match cfg.format {
        Format::Json => print_json(&rows),
        Format::Text | Format::Tsv => {
            for r in &rows {
                out!("coker f(T), f = {}: {}", r["polynomial"].as_str().unwrap_or(""), r["group"].as_str().unwrap_or(""));
            }
        }
    }
    Ok(0)
}

pub fn finite(
    cfg: &Config,
    inline: &[String],
    files: &[PathBuf],
    p: &str,
    n: u32,
    lambda1: Option<&str>,
    lambda2: Option<&str>,
) -> Res {
    let p = parse_int(p)?;
    if inline.is_empty() && files.is_empty() {
        let (Some(l1), Some(l2)) = (lambda1, lambda2) else {
            return Err(CliError::Usage("give two matrices, or --lambda1 and --lambda2 to list classes".into()));
        };
        let (l1, l2) = (parse_int(l1)?, parse_int(l2)?);
        let reps = enumerate_classes(&p, n, &l1, &l2)?;
        let mut classes: Vec<Value> = Vec::new();
        for a in &reps {
            let m = FiniteTriangularModule::new(p.clone(), n, l1.clone(), l2.clone(), a.clone())?;
            let tag = if l1 == l2 { Some(classify_single_eigenvalue(&m)?.to_string()) } else { None };
            classes.push(json!({ "a": shift_equiv_core::bigser::Entry(a), "matrix": m.matrix(), "tag": tag }));
        }
        let out = json!({
            "p": shift_equiv_core::bigser::Entry(&p),
            "n": n,
            "lambda1": shift_equiv_core::bigser::Entry(&l1),
            "lambda2": shift_equiv_core::bigser::Entry(&l2),
            "route": Route::Finite,
            "classes": classes,
        });
        match cfg.format {
            Format::Json => print_json(&out),
            Format::Text | Format::Tsv => {
                out!("{} classes over Z/{}^{n}", reps.len(), p);
                for c in out["classes"].as_array().into_iter().flatten() {
                    out!("  a = {}  {}", c["a"], c["tag"].as_str().unwrap_or(""));
                }
            }
        }
        return Ok(0);
    }
    let ms = collect_matrices(inline, files, 2)?;
    let d = decide_mod(&ms[0], &ms[1], &p, n)?;
    print_decision(cfg, &d);
    Ok(exit_code(&d.verdict))
}

