//! Human-readable report.txt.

use std::fmt::Write;

use crate::run::Document;

const CHECKS: [&str; 6] = ["ssa", "condition1", "condition2", "positivity", "certificate", "product_gap"];

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

/// Left-aligned columns separated by two spaces; widths count chars, not bytes.
fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn render_text(doc: &Document) -> String {
    let s = &doc.scenario;
    let mut out = String::new();
    write!(out, "model {} (rank {}, K = {}", s.model.as_str(), s.rank, s.window).unwrap();
    if let Some(n) = s.grid {
        write!(out, ", N = {n}").unwrap();
    }
    writeln!(out, ", refinements {})", s.refinements).unwrap();
    if let (Some(k), Some(m), Some(p)) = (s.k_lift, s.margin, s.poles) {
        writeln!(out, "k_lift = {k}, margin = {m}, poles = {p}").unwrap();
    }
    if let Some(p) = &s.profile {
        writeln!(out, "profile {}", p.label()).unwrap();
    }
    if let Some(t) = &s.theta_matrix {
        let rows: Vec<String> = t.iter().map(|r| format!("[{}]", r.join(", "))).collect();
        writeln!(out, "theta {}", rows.join(" ")).unwrap();
    }
    writeln!(out, "checks {}", s.checks.join(", ")).unwrap();
    writeln!(out).unwrap();

    let sphere = doc.scan.iter().any(|r| r.k_minus_ell.is_some());
    let mut header: Vec<String> = vec!["ℓ".into()];
    if sphere {
        header.extend(["k−ℓ".into(), "parity".into()]);
    }
    header.extend(CHECKS.iter().map(|c| c.to_string()));
    header.push("factorises".into());
    if sphere {
        header.push("p_min".into());
    }
    header.push("inf λ".into());
    let rows: Vec<Vec<String>> = doc
        .scan
        .iter()
        .map(|r| {
            let mut row = vec![r.ell.to_string()];
            if sphere {
                row.push(r.k_minus_ell.map_or("-".into(), |d| d.to_string()));
                row.push(r.parity.unwrap_or("-").into());
            }
            row.extend(CHECKS.iter().map(|c| r.verdicts.get(*c).map_or("-", |v| v.as_str()).to_string()));
            row.push(r.factorises.as_str().into());
            if sphere {
                row.push(r.p_min.map_or("-".into(), sci));
            }
            row.push(r.inf_lambda.map_or("-".into(), sci));
            row
        })
        .collect();
    out.push_str(&aligned(&header, &rows));

    for report in &doc.reports {
        if let Some(gap) = &report.product_gap {
            writeln!(out).unwrap();
            write!(out, "product gap at ℓ = {}: slope {}", report.ell, sci(gap.slope)).unwrap();
            if let Some(o) = gap.oracle_slope {
                write!(out, ", oracle slope {}", sci(o)).unwrap();
            }
            writeln!(out, ", {}", if gap.unbounded { "unbounded (nonzero slope)" } else { "bounded" }).unwrap();
            let header: Vec<String> = ["k", "|k|", "gap", "oracle"].iter().map(|h| h.to_string()).collect();
            let rows: Vec<Vec<String>> = gap
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.character.to_string(),
                        format!("{:.4}", r.character.euclidean()),
                        sci(r.gap),
                        r.oracle.map_or("-".into(), sci),
                    ]
                })
                .collect();
            out.push_str(&aligned(&header, &rows));
        }
    }

    if let Some(rel) = &doc.relations {
        writeln!(out).unwrap();
        for r in rel {
            writeln!(
                out,
                "U{}U{} = e(θ)U{}U{}: {} on {} sectors ({}), max deviation {}",
                r.pair.0 + 1,
                r.pair.1 + 1,
                r.pair.1 + 1,
                r.pair.0 + 1,
                if r.holds { "holds" } else { "violated" },
                r.sectors_checked,
                if r.exact { "exact" } else { "floating point" },
                sci(r.max_deviation)
            )
            .unwrap();
        }
    }
    writeln!(out).unwrap();
    writeln!(out, "{}", if doc.conclusive { "all requested checks conclusive" } else { "some checks inconclusive" }).unwrap();
    out
}
