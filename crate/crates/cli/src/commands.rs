use std::fmt::Write as _;

use kissbound_core::asymptotics::{
    self, boundary_onset, crossover, euclid_exponent, large_p_exponents, max_g, shell_exponents,
};
use kissbound_core::certificate;
use kissbound_core::constructor::{build_certificate, verify_certificate};
use kissbound_core::exactbounds::{
    best_bound, best_bound_in, euclidean_comparison, large_p_bound, total_bound, MAX_EXHAUSTIVE_N,
};
use kissbound_core::{BigCount, BoundReport, ExponentResult, ShellSystem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{self, exp4, exp4_list, input, json, sig12, CliError, KeyValueCsv};
use crate::ranges::Weight;
use crate::{
    BoundArgs, CompareArgs, ConstructArgs, CurveArgs, ExponentArgs, Format, Quantity, SweepArgs,
    VerifyArgs,
};

type Out = Result<String, CliError>;

fn in_comparison_range(p: f64) -> bool {
    p > 1.0 && p <= 2.0
}

pub fn bound(a: &BoundArgs, format: Format) -> Out {
    let report = if a.large_p {
        if !matches!(a.m, Weight::Full | Weight::Sweep) || a.window.is_some() {
            return input("--large-p fixes m = n; drop --m and --window");
        }
        large_p_bound(a.p, a.n, a.jv_factor)?
    } else {
        match (a.m, a.window) {
            (Weight::Fixed(m), None) => total_bound(a.p, a.n, m)?,
            (Weight::Full, None) => total_bound(a.p, a.n, a.n)?,
            (Weight::Sweep, None) => best_bound(a.p, a.n)?,
            (Weight::Sweep, Some((lo, hi))) => best_bound_in(a.p, a.n, lo..=hi)?,
            (_, Some(_)) => return input("--window applies only to --m sweep"),
        }
    };
    Ok(match format {
        Format::Json => json(&report),
        Format::Csv => bound_csv(&report),
        Format::Text => bound_text(&report),
    })
}

fn bound_csv(r: &BoundReport) -> String {
    let mut s = String::from("shell,level,shell_size,ball_size,gv_term\n");
    for t in &r.per_shell {
        writeln!(
            s,
            "{},{},{},{},{}",
            t.shell, t.level, t.shell_size, t.ball_size, t.gv_term
        )
        .unwrap();
    }
    writeln!(s, "total,,,,{}", r.total).unwrap();
    s
}

fn bound_text(r: &BoundReport) -> String {
    let method = serde_json::to_value(r.method).unwrap();
    let mut s = String::new();
    writeln!(
        s,
        "p {}  n {}  m* {}  method {}",
        r.p,
        r.n,
        r.m_star,
        method.as_str().unwrap()
    )
    .unwrap();
    let levels: Vec<String> = r.levels.iter().map(u64::to_string).collect();
    writeln!(s, "levels {}", levels.join(" ")).unwrap();
    writeln!(
        s,
        "{:>5} {:>6} {:>24} {:>24} {:>24}",
        "shell", "level", "|J_i|", "B_i", "ceil(|J_i|/B_i)"
    )
    .unwrap();
    for t in &r.per_shell {
        writeln!(
            s,
            "{:>5} {:>6} {:>24} {:>24} {:>24}",
            t.shell, t.level, t.shell_size, t.ball_size, t.gv_term
        )
        .unwrap();
    }
    if let Some(f) = r.jv_factor {
        writeln!(s, "log factor {f} on shell 1").unwrap();
    }
    if let Some(note) = &r.note {
        writeln!(s, "note: {note}").unwrap();
    }
    writeln!(s, "total {}  (log2 {:.4})", r.total, r.total_log2()).unwrap();
    s
}

#[derive(Serialize, Deserialize)]
struct ExponentReport {
    #[serde(flatten)]
    result: ExponentResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    euclid_exponent: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ExponentList {
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    exponents: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct OnsetReport {
    p_lo: f64,
    p_hi: f64,
    margin: f64,
    onset: f64,
}

pub fn exponent(a: &ExponentArgs, format: Format) -> Out {
    if let Some(bracket) = &a.onset {
        let (lo, hi) = (bracket[0], bracket[1]);
        let onset = boundary_onset(lo, hi, a.margin)?;
        let r = OnsetReport {
            p_lo: lo,
            p_hi: hi,
            margin: a.margin,
            onset,
        };
        return Ok(match format {
            Format::Json => json(&r),
            Format::Csv => KeyValueCsv::new().real("onset", onset).finish(),
            Format::Text => format!(
                "sigma* first within {} of 1 at p = {}  (searched [{lo}, {hi}])\n",
                a.margin,
                exp4(onset)
            ),
        });
    }
    let p = a.p.expect("clap requires --p without --onset");
    if a.large_p || a.sigma.is_some() {
        let exponents = match a.sigma {
            Some(s) => shell_exponents(p, s)?,
            None => large_p_exponents(p)?,
        };
        let r = ExponentList {
            p,
            sigma: a.sigma,
            exponents,
        };
        return Ok(match format {
            Format::Json => json(&r),
            Format::Csv => KeyValueCsv::new().reals("shell", &r.exponents).finish(),
            Format::Text => {
                let at = match a.sigma {
                    Some(s) => format!("sigma {s}"),
                    None => "m = n".to_string(),
                };
                format!("p {p}  {at}\nshell exponents {}\n", exp4_list(&r.exponents))
            }
        });
    }
    let result = max_g(p)?;
    let euclid = in_comparison_range(p)
        .then(|| euclid_exponent(p))
        .transpose()?;
    let r = ExponentReport {
        result,
        euclid_exponent: euclid,
    };
    Ok(match format {
        Format::Json => json(&r),
        Format::Csv => {
            let e = &r.result;
            let mut csv = KeyValueCsv::new();
            csv.real("sigma_star", e.sigma_star)
                .real("y_star", e.y_star)
                .real("g_star", e.g_value)
                .reals("shell", &e.shell_exponents)
                .real("series_start", e.series_start)
                .reals("series", &e.series_exponents);
            if let Some(v) = euclid {
                csv.real("euclid_exponent", v);
            }
            csv.finish()
        }
        Format::Text => exponent_text(&r),
    })
}

fn exponent_text(r: &ExponentReport) -> String {
    let e = &r.result;
    let mut s = String::new();
    writeln!(s, "p {}", e.p).unwrap();
    writeln!(
        s,
        "sigma* {}  y* {}  g* {}",
        exp4(e.sigma_star),
        exp4(e.y_star),
        exp4(e.g_value)
    )
    .unwrap();
    writeln!(
        s,
        "shell exponents at sigma*: {}",
        exp4_list(&e.shell_exponents)
    )
    .unwrap();
    if e.series_start != e.sigma_star {
        writeln!(
            s,
            "shell exponents at {}: {}",
            exp4(e.series_start),
            exp4_list(&e.series_exponents)
        )
        .unwrap();
    }
    if let Some(v) = r.euclid_exponent {
        let larger = if v > e.g_value {
            "comparison"
        } else {
            "multi-shell"
        };
        writeln!(s, "comparison exponent {}  ({larger} is larger)", exp4(v)).unwrap();
    }
    s
}

pub fn curve(a: &CurveArgs, format: Format) -> Out {
    let grid = asymptotics::uniform_grid(a.step)?;
    let samples = asymptotics::curve(a.p, &grid)?;
    Ok(match format {
        Format::Json => json(&samples),
        Format::Csv | Format::Text => {
            let mut s = String::from("sigma,g\n");
            for c in &samples {
                writeln!(s, "{},{}", sig12(c.sigma), sig12(c.g)).unwrap();
            }
            s
        }
    })
}

#[derive(Serialize, Deserialize)]
struct CodeSummary {
    p: f64,
    n: u64,
    m: u64,
    levels: Vec<u64>,
    sizes_per_shell: Vec<usize>,
    points: usize,
    guarantee: BigCount,
    min_dist_p_pow: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<String>,
}

fn summary_text(s: &CodeSummary, verb: &str) -> String {
    let sizes: Vec<String> = s.sizes_per_shell.iter().map(usize::to_string).collect();
    let mut out = String::new();
    writeln!(out, "p {}  n {}  m {}", s.p, s.n, s.m).unwrap();
    writeln!(
        out,
        "points {} (per shell {})  guarantee {}",
        s.points,
        sizes.join(" "),
        s.guarantee
    )
    .unwrap();
    writeln!(
        out,
        "{verb} min d_p^p {}  (needs >= {})",
        sig12(s.min_dist_p_pow),
        s.m
    )
    .unwrap();
    if let Some(path) = &s.certificate {
        writeln!(out, "certificate {path}").unwrap();
    }
    out
}

fn summary_csv(s: &CodeSummary) -> String {
    KeyValueCsv::new()
        .row("points", s.points)
        .row("guarantee", &s.guarantee)
        .real("min_dist_p_pow", s.min_dist_p_pow)
        .finish()
}

pub fn construct(a: &ConstructArgs, format: Format) -> Out {
    if let Some(path) = &a.cert {
        output::check_writable(path)?;
    }
    let sys = ShellSystem::new(a.p, a.n, a.m)?;
    let cert = build_certificate(&sys, a.cap)?;
    if let Some(path) = &a.cert {
        output::write_atomic(path, &certificate::to_text(&cert))?;
    }
    let summary = CodeSummary {
        p: a.p,
        n: a.n,
        m: a.m,
        levels: sys.levels().to_vec(),
        sizes_per_shell: cert.sizes_per_shell.clone(),
        points: cert.len(),
        guarantee: cert.guarantee.clone(),
        min_dist_p_pow: cert.min_dist_p_pow,
        certificate: a.cert.as_ref().map(|p| p.display().to_string()),
    };
    Ok(match format {
        Format::Json => json(&summary),
        Format::Csv => summary_csv(&summary),
        Format::Text => summary_text(&summary, "certified"),
    })
}

pub fn verify(a: &VerifyArgs, format: Format) -> Out {
    let text = std::fs::read_to_string(&a.certificate)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.certificate.display())))?;
    let cert = certificate::parse(&text)?;
    let min = verify_certificate(&cert)?;
    let sys = &cert.sys;
    let summary = CodeSummary {
        p: sys.p(),
        n: sys.n(),
        m: sys.m(),
        levels: sys.levels().to_vec(),
        sizes_per_shell: cert.sizes_per_shell.clone(),
        points: cert.len(),
        guarantee: cert.guarantee.clone(),
        min_dist_p_pow: min,
        certificate: Some(a.certificate.display().to_string()),
    };
    Ok(match format {
        Format::Json => json(&summary),
        Format::Csv => summary_csv(&summary),
        Format::Text => summary_text(&summary, "verified"),
    })
}

#[derive(Serialize, Deserialize)]
struct FiniteComparison {
    n: u64,
    comparison_log2: f64,
    multi_shell_log2: f64,
}

#[derive(Serialize, Deserialize)]
struct CompareReport {
    p: f64,
    comparison_exponent: f64,
    multi_shell_exponent: f64,
    sigma_star: f64,
    comparison_is_larger: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    finite: Option<FiniteComparison>,
}

#[derive(Serialize, Deserialize)]
struct CrossoverReport {
    p_lo: f64,
    p_hi: f64,
    crossover: f64,
}

pub fn compare(a: &CompareArgs, format: Format) -> Out {
    if let Some(bracket) = &a.crossover {
        let (lo, hi) = (bracket[0], bracket[1]);
        let p = crossover(lo, hi)?;
        let r = CrossoverReport {
            p_lo: lo,
            p_hi: hi,
            crossover: p,
        };
        return Ok(match format {
            Format::Json => json(&r),
            Format::Csv => KeyValueCsv::new().real("crossover", p).finish(),
            Format::Text => format!(
                "exponents cross at p = {}  (bracket [{lo}, {hi}])\n",
                exp4(p)
            ),
        });
    }
    let p = a.p.expect("clap requires --p without --crossover");
    if !in_comparison_range(p) {
        return input(format!("compare requires 1 < p <= 2, got {p}"));
    }
    if let Some(n) = a.n {
        if !(2..=MAX_EXHAUSTIVE_N).contains(&n) {
            return input(format!(
                "compare --n must lie in [2, {MAX_EXHAUSTIVE_N}], got {n}"
            ));
        }
    }
    let comparison_exponent = euclid_exponent(p)?;
    let best = max_g(p)?;
    let finite = match a.n {
        Some(n) => Some(FiniteComparison {
            n,
            comparison_log2: euclidean_comparison(p, n)?.value_log2,
            multi_shell_log2: best_bound(p, n)?.total_log2(),
        }),
        None => None,
    };
    let r = CompareReport {
        p,
        comparison_exponent,
        multi_shell_exponent: best.g_value,
        sigma_star: best.sigma_star,
        comparison_is_larger: comparison_exponent > best.g_value,
        finite,
    };
    Ok(match format {
        Format::Json => json(&r),
        Format::Csv => {
            let mut csv = KeyValueCsv::new();
            csv.real("comparison_exponent", r.comparison_exponent)
                .real("multi_shell_exponent", r.multi_shell_exponent);
            if let Some(f) = &r.finite {
                csv.real("comparison_log2", f.comparison_log2)
                    .real("multi_shell_log2", f.multi_shell_log2);
            }
            csv.finish()
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "p {p}").unwrap();
            writeln!(s, "comparison exponent   {}", exp4(r.comparison_exponent)).unwrap();
            writeln!(
                s,
                "multi-shell exponent  {}  (sigma* {})",
                exp4(r.multi_shell_exponent),
                exp4(r.sigma_star)
            )
            .unwrap();
            let winner = if r.comparison_is_larger {
                "comparison"
            } else {
                "multi-shell"
            };
            writeln!(s, "larger: {winner}").unwrap();
            if let Some(f) = &r.finite {
                writeln!(
                    s,
                    "n {}: log2 comparison {:.4}, log2 multi-shell {:.4}",
                    f.n, f.comparison_log2, f.multi_shell_log2
                )
                .unwrap();
            }
            s
        }
    })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SweepValue {
    Real(f64),
    Count(BigCount),
}

#[derive(Serialize, Deserialize)]
struct SweepRow {
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    value: SweepValue,
}

fn check_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let quantity = a.quantity;
    if let Some(range) = &a.n_range {
        if quantity != Quantity::Bound {
            return input("--n-range supports only --quantity bound");
        }
        if a.n.is_some() {
            return input("--n conflicts with --n-range");
        }
        if let Some(&n) = range.values.iter().find(|&&n| n > MAX_EXHAUSTIVE_N) {
            return input(format!("n = {n} exceeds {MAX_EXHAUSTIVE_N}"));
        }
        return Ok(());
    }
    let Some(range) = &a.p_range else {
        return input("sweep needs --p-range or --n-range");
    };
    if a.p.is_some() {
        return input("--p conflicts with --p-range");
    }
    if let Some(&p) = range.values.iter().find(|&&p| p < 1.0) {
        return input(format!("p must be >= 1, range contains {p}"));
    }
    match quantity {
        Quantity::Euclid => {
            if let Some(&p) = range.values.iter().find(|&&p| !in_comparison_range(p)) {
                return input(format!(
                    "--quantity euclid needs 1 < p <= 2, range contains {p}"
                ));
            }
        }
        Quantity::Bound => match a.n {
            None => return input("--quantity bound over p needs --n"),
            Some(n) if !(1..=MAX_EXHAUSTIVE_N).contains(&n) => {
                return input(format!("--n must lie in [1, {MAX_EXHAUSTIVE_N}], got {n}"))
            }
            Some(_) => {}
        },
        _ => {
            if a.n.is_some() {
                return input("--n applies only to --quantity bound");
            }
        }
    }
    Ok(())
}

fn sweep_point(quantity: Quantity, p: f64, n: Option<u64>) -> Result<SweepValue, CliError> {
    Ok(match quantity {
        Quantity::Gstar => SweepValue::Real(max_g(p)?.g_value),
        Quantity::SigmaStar => SweepValue::Real(max_g(p)?.sigma_star),
        Quantity::Leading => SweepValue::Real(large_p_exponents(p)?[0]),
        Quantity::Euclid => SweepValue::Real(euclid_exponent(p)?),
        Quantity::Bound => {
            SweepValue::Count(best_bound(p, n.expect("checked before sweeping"))?.total)
        }
    })
}

pub fn sweep(a: &SweepArgs, format: Format) -> Out {
    check_sweep(a)?;
    let points: Vec<(f64, Option<u64>)> = match (&a.p_range, &a.n_range) {
        (_, Some(range)) => {
            let p = a.p.expect("clap requires --p with --n-range");
            range.values.iter().map(|&n| (p, Some(n))).collect()
        }
        (Some(range), None) => range.values.iter().map(|&p| (p, a.n)).collect(),
        (None, None) => unreachable!("checked above"),
    };
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(p, n)| sweep_point(a.quantity, p, n).map(|value| SweepRow { p, n, value }))
        .collect::<Result<_, _>>()?;
    Ok(match format {
        Format::Json => json(&rows),
        Format::Csv | Format::Text => {
            let by_n = a.n_range.is_some();
            let mut s = if by_n {
                format!("n,{}\n", a.quantity.column())
            } else {
                format!("p,{}\n", a.quantity.column())
            };
            for row in &rows {
                let value = match &row.value {
                    SweepValue::Real(v) => sig12(*v),
                    SweepValue::Count(c) => c.to_string(),
                };
                if by_n {
                    writeln!(s, "{},{value}", row.n.unwrap()).unwrap();
                } else {
                    writeln!(s, "{},{value}", row.p).unwrap();
                }
            }
            s
        }
    })
}
