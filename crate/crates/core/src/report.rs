// SPDX-License-Identifier: Apache-2.0

//! Serialized forms of Selmer groups, theorem reports, audits and search hits.
//!
//! CSV outputs start with a `# twin-selmer <table> csv v1` comment row.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::AuditReport;
use crate::family::{DescentKind, FamilyParams, Place};
use crate::json::JsonInt;
use crate::localsolve::{LocalPlace, LocalVerdict, Witness};
use crate::search::LargeSelmer;
use crate::selmer::{f2_basis, SelmerGroup};
use crate::theorems::TheoremReport;

pub const CSV_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?}, expected json, csv or text")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub d: JsonInt,
    pub member: bool,
    pub verdicts: Vec<LocalVerdict>,
}

/// JSON document for a Selmer group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerDoc {
    pub params: FamilyParams,
    pub kind: DescentKind,
    pub dim2: usize,
    pub basis: Vec<JsonInt>,
    pub elements: Vec<JsonInt>,
    /// Every class of Q(S,2) with its verdicts when the full table is requested,
    /// otherwise only the elements.
    pub classes: Vec<ClassEntry>,
}

impl SelmerDoc {
    pub fn new(g: &SelmerGroup, full_table: bool) -> Self {
        let f = &g.params;
        let classes = g
            .verdict_table
            .iter()
            .filter(|(c, _)| full_table || g.contains(**c))
            .map(|(&c, vs)| ClassEntry {
                d: f.class_value(c).into(),
                member: g.contains(c),
                verdicts: vs.iter().map(|(_, v)| v.clone()).collect(),
            })
            .collect();
        SelmerDoc {
            params: f.clone(),
            kind: g.kind,
            dim2: g.dim2,
            basis: g.basis.iter().map(|&c| f.class_value(c).into()).collect(),
            elements: g.element_values().into_iter().map(JsonInt).collect(),
            classes,
        }
    }

    /// Rebuild the group; needs a document carrying the full table.
    pub fn into_group(self) -> Result<SelmerGroup, String> {
        let f = self.params;
        let mut verdict_table = BTreeMap::new();
        let mut elements = std::collections::BTreeSet::new();
        for entry in self.classes {
            let c = f.class_of_integer(&entry.d.0).map_err(|e| e.to_string())?;
            if entry.member {
                elements.insert(c);
            }
            let mut vs = Vec::new();
            for v in entry.verdicts {
                let place = match &v.place {
                    LocalPlace::Real => Place::Infinity,
                    LocalPlace::Prime(l) => f.place_of_prime(l).ok_or_else(|| format!("{l} is not in S"))?,
                };
                vs.push((place, v));
            }
            verdict_table.insert(c, vs);
        }
        if verdict_table.len() != 1usize << f.rank() {
            return Err("document does not carry the full verdict table".into());
        }
        let basis = f2_basis(&elements);
        Ok(SelmerGroup {
            kind: self.kind,
            params: f,
            dim2: basis.len(),
            basis,
            elements,
            verdict_table,
        })
    }
}

fn params_cells(f: &FamilyParams) -> [String; 4] {
    let ds: Vec<String> = f.d_primes().map(|d| d.to_string()).collect();
    [f.epsilon().to_string(), f.p().to_string(), f.q().to_string(), ds.join(";")]
}

fn witness_kind(w: &Option<Witness>) -> &'static str {
    match w {
        None => "",
        Some(Witness::Rational { .. }) => "rational",
        Some(Witness::Real { .. }) => "real",
        Some(Witness::UnitSquare { .. }) => "unit_square",
        Some(Witness::HenselRoot { .. }) => "hensel_root",
    }
}

fn csv_string(header: &str, columns: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf8");
    format!("# twin-selmer {header} csv {CSV_VERSION}\n{body}")
}

pub fn selmer_json(g: &SelmerGroup, full_table: bool) -> String {
    serde_json::to_string_pretty(&SelmerDoc::new(g, full_table)).expect("serializable")
}

pub fn selmer_csv(g: &SelmerGroup, full_table: bool) -> String {
    let doc = SelmerDoc::new(g, full_table);
    let pc = params_cells(&doc.params);
    let mut rows = Vec::new();
    for c in &doc.classes {
        for v in &c.verdicts {
            let mut r: Vec<String> = pc.to_vec();
            r.extend([
                doc.kind.to_string(),
                c.d.0.to_string(),
                c.member.to_string(),
                v.place.to_string(),
                v.solvable.to_string(),
                witness_kind(&v.witness).to_string(),
                v.search_depth.to_string(),
            ]);
            rows.push(r);
        }
    }
    csv_string(
        "selmer",
        &["epsilon", "p", "q", "D", "kind", "d", "member", "place", "solvable", "witness", "search_depth"],
        rows,
    )
}

pub fn selmer_text(g: &SelmerGroup, full_table: bool) -> String {
    let vals: Vec<String> = g.element_values().iter().map(|v| v.to_string()).collect();
    let basis: Vec<String> = g.basis.iter().map(|&c| g.params.render(c)).collect();
    let mut out = format!(
        "{} {}\ndim2={}, elements={{{}}}\nbasis=[{}]\n",
        g.params,
        g.kind,
        g.dim2,
        vals.join(", "),
        basis.join(", ")
    );
    if full_table {
        for (&c, vs) in &g.verdict_table {
            let cells: Vec<String> = vs
                .iter()
                .map(|(p, v)| format!("{}:{}", p, if v.solvable { "ok" } else { "no" }))
                .collect();
            out.push_str(&format!("  {:>12}  {}\n", g.params.render(c), cells.join(" ")));
        }
    }
    out
}

pub fn theorem_json(reports: &[TheoremReport]) -> String {
    serde_json::to_string_pretty(reports).expect("serializable")
}

pub fn theorem_csv(reports: &[TheoremReport]) -> String {
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    let rows = reports
        .iter()
        .map(|r| {
            let mut row: Vec<String> = vec![r.theorem_id.to_string()];
            row.extend(params_cells(&r.params));
            row.extend([
                r.hypotheses_hold.to_string(),
                r.verdict.to_string(),
                opt(r.observed.dim_phi),
                opt(r.observed.dim_phi_hat),
                r.observed.rank_sha_sum.map(|v| v.to_string()).unwrap_or_default(),
                r.observed.branch.clone().unwrap_or_default(),
                r.claimed.clone(),
                r.failures.join("; "),
            ]);
            row
        })
        .collect();
    csv_string(
        "theorem",
        &[
            "theorem", "epsilon", "p", "q", "D", "hypotheses_hold", "verdict", "dim_phi", "dim_phi_hat",
            "rank_sha_sum", "branch", "claimed", "failures",
        ],
        rows,
    )
}

pub fn theorem_text(reports: &[TheoremReport]) -> String {
    let mut out = format!("{:<7} {:<28} {:<15} {}\n", "theorem", "params", "verdict", "details");
    for r in reports {
        let mut details = Vec::new();
        if let Some(d) = r.observed.dim_phi {
            details.push(format!("dim_phi={d} size={}", 1u128 << d));
        }
        if let Some(d) = r.observed.dim_phi_hat {
            details.push(format!("dim_phi_hat={d} size={}", 1u128 << d));
        }
        if let Some(s) = r.observed.rank_sha_sum {
            details.push(format!("sum={s}"));
        }
        if let Some(b) = &r.observed.branch {
            details.push(format!("branch={b}"));
        }
        if !r.failures.is_empty() {
            details.push(format!("failed: {}", r.failures.join("; ")));
        }
        let line = format!(
            "{:<7} {:<28} {:<15} {}",
            r.theorem_id.as_str(),
            r.params.to_string(),
            r.verdict.to_string(),
            details.join(" ")
        );
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn audit_json(report: &AuditReport) -> String {
    serde_json::to_string_pretty(report).expect("serializable")
}

pub fn audit_csv(report: &AuditReport) -> String {
    let rows = report
        .discrepancies
        .iter()
        .map(|d| {
            let mut row: Vec<String> = params_cells(&d.params).to_vec();
            row.extend([
                d.kind.to_string(),
                d.d.0.to_string(),
                d.place.clone(),
                d.rule_id.clone(),
                d.closed_form.to_string(),
                d.oracle.to_string(),
            ]);
            row
        })
        .collect();
    csv_string(
        "audit",
        &["epsilon", "p", "q", "D", "kind", "d", "place", "rule", "closed_form", "oracle"],
        rows,
    )
}

pub fn audit_text(report: &AuditReport) -> String {
    let mut out = format!(
        "checked {} local and {} membership verdicts; {} discrepancies\n",
        report.local_checks,
        report.membership_checks,
        report.discrepancies.len()
    );
    for d in &report.discrepancies {
        out.push_str(&format!(
            "  {} {} d={} place={} rule={} closed_form={} oracle={}\n",
            d.params, d.kind, d.d.0, d.place, d.rule_id, d.closed_form, d.oracle
        ));
    }
    out
}

pub fn families_json(found: &[FamilyParams]) -> String {
    serde_json::to_string_pretty(found).expect("serializable")
}

pub fn families_csv(found: &[FamilyParams]) -> String {
    let rows = found.iter().map(|f| params_cells(f).to_vec()).collect();
    csv_string("families", &["epsilon", "p", "q", "D"], rows)
}

pub fn families_text(found: &[FamilyParams]) -> String {
    if found.is_empty() {
        return "none\n".into();
    }
    found.iter().map(|f| format!("{f}\n")).collect()
}

pub fn large_selmer_json(hit: &Option<LargeSelmer>) -> String {
    serde_json::to_string_pretty(hit).expect("serializable")
}

pub fn large_selmer_csv(hit: &Option<LargeSelmer>) -> String {
    let rows = hit
        .iter()
        .map(|h| {
            let mut row = params_cells(&h.params).to_vec();
            row.extend([
                h.kind.to_string(),
                h.target.to_string(),
                h.dim2.to_string(),
                h.candidates_tested.to_string(),
            ]);
            row
        })
        .collect();
    csv_string(
        "large_selmer",
        &["epsilon", "p", "q", "D", "kind", "target", "dim2", "candidates_tested"],
        rows,
    )
}

pub fn large_selmer_text(hit: &Option<LargeSelmer>) -> String {
    match hit {
        None => "none\n".into(),
        Some(h) => format!(
            "{} {} dim2={} (target {}, {} candidates tested)\n",
            h.params, h.kind, h.dim2, h.target, h.candidates_tested
        ),
    }
}
