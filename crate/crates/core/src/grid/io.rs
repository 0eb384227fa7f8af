//! Case file formats.
//!
//! Two formats are read: the native JSON document and the numeric-table
//! subset of MATPOWER `.m` files. Only the columns the DC model needs are
//! consumed.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::case::{Branch, Bus, BusId, GridCase};
use crate::reduction::Provenance;
use crate::{Error, Result};

/// Source of the bundled 30-bus, 6-generator test system.
pub const IEEE30_MATPOWER: &str = include_str!("../../data/case30.m");

/// The bundled 30-bus, 6-generator, 41-branch test system.
pub fn ieee30() -> GridCase {
    parse_matpower(IEEE30_MATPOWER).expect("bundled case30 parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseDocument {
    pub name: String,
    pub base_mva: f64,
    pub buses: Vec<BusRecord>,
    pub branches: Vec<BranchRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusRecord {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_mw: Option<f64>,
    #[serde(default)]
    pub load_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub from: u32,
    pub to: u32,
    pub x_pu: f64,
    pub rate_mw: f64,
    #[serde(default = "default_status")]
    pub status: u8,
}

fn default_status() -> u8 {
    1
}

impl CaseDocument {
    pub fn from_case(case: &GridCase) -> Self {
        let buses = case
            .buses()
            .iter()
            .map(|b| BusRecord {
                id: b.id.0,
                gen_mw: b.generation,
                load_mw: b.load,
            })
            .collect();
        let branches = case
            .branches()
            .iter()
            .map(|br| BranchRecord {
                from: case.bus(br.from).id.0,
                to: case.bus(br.to).id.0,
                x_pu: br.reactance,
                rate_mw: br.capacity,
                status: u8::from(br.in_service),
            })
            .collect();
        Self {
            name: case.name().to_string(),
            base_mva: case.base_mva(),
            buses,
            branches,
            provenance: None,
        }
    }

    /// Converts to a validated case. Buses are ordered by id.
    pub fn to_case(&self) -> Result<GridCase> {
        let raw: Vec<(u32, Option<f64>, f64)> = self
            .buses
            .iter()
            .map(|b| (b.id, b.gen_mw, b.load_mw))
            .collect();
        let branches: Vec<RawBranch> = self
            .branches
            .iter()
            .enumerate()
            .map(|(i, b)| RawBranch {
                label: format!("branch {}", i + 1),
                from: b.from,
                to: b.to,
                x: b.x_pu,
                rate: b.rate_mw,
                in_service: b.status != 0,
            })
            .collect();
        assemble(&self.name, self.base_mva, raw, branches)
    }
}

struct RawBranch {
    label: String,
    from: u32,
    to: u32,
    x: f64,
    rate: f64,
    in_service: bool,
}

fn assemble(
    name: &str,
    base_mva: f64,
    mut buses: Vec<(u32, Option<f64>, f64)>,
    branches: Vec<RawBranch>,
) -> Result<GridCase> {
    buses.sort_by_key(|b| b.0);
    let index: HashMap<u32, usize> = buses.iter().enumerate().map(|(i, b)| (b.0, i)).collect();
    let lookup = |id: u32, label: &str| {
        index
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Validation(format!("{label} references unknown bus {id}")))
    };
    let branches = branches
        .iter()
        .map(|b| {
            Ok(Branch {
                from: lookup(b.from, &b.label)?,
                to: lookup(b.to, &b.label)?,
                reactance: b.x,
                capacity: b.rate,
                in_service: b.in_service,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let buses = buses
        .into_iter()
        .map(|(id, g, l)| Bus {
            id: BusId(id),
            generation: g,
            load: l,
        })
        .collect();
    GridCase::new(name, base_mva, buses, branches)
}

/// Parses either format, detected from the first non-blank character.
pub fn parse_case(source: &str) -> Result<GridCase> {
    if source.trim_start().starts_with('{') {
        parse_native(source).map(|(case, _)| case)
    } else {
        parse_matpower(source)
    }
}

/// Parses a native JSON document, returning the case and any reduction
/// provenance it carries.
pub fn parse_native(source: &str) -> Result<(GridCase, Option<Provenance>)> {
    let doc: CaseDocument = serde_json::from_str(source).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let case = doc.to_case()?;
    Ok((case, doc.provenance))
}

pub fn to_json(case: &GridCase) -> String {
    document_json(&CaseDocument::from_case(case))
}

pub(crate) fn document_json(doc: &CaseDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("case document serializes");
    s.push('\n');
    s
}

/// Reads the `mpc.baseMVA`, `mpc.bus`, `mpc.gen` and `mpc.branch` tables.
///
/// Bus columns: id, type, Pd. Gen columns: bus, Pg (several generators on
/// one bus are summed; status column 8 is honoured when present). Branch
/// columns: from, to, r, x, b, rateA, ..., status (column 11).
pub fn parse_matpower(source: &str) -> Result<GridCase> {
    let mut name = String::from("case");
    let mut base_mva = None;
    let mut tables: HashMap<String, Vec<(usize, Vec<f64>)>> = HashMap::new();
    let mut open: Option<(String, usize)> = None;

    for (lineno, raw_line) in source.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw_line.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((table, _)) = &open {
            let table = table.clone();
            let (body, closes) = match line.find(']') {
                Some(pos) => (&line[..pos], true),
                None => (line, false),
            };
            push_rows(tables.entry(table).or_default(), body, line_no)?;
            if closes {
                open = None;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("function") {
            if let Some((_, n)) = rest.split_once('=') {
                name = n.trim().trim_end_matches(';').to_string();
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("mpc.") else {
            continue;
        };
        let Some((key, value)) = rest.split_once('=') else {
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim();
        if key == "baseMVA" {
            let v = value.trim_end_matches(';').trim();
            base_mva = Some(v.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("malformed baseMVA value '{v}'"),
            })?);
        } else if let Some(body) = value.strip_prefix('[') {
            let (body, closes) = match body.find(']') {
                Some(pos) => (&body[..pos], true),
                None => (body, false),
            };
            let rows = tables.entry(key.clone()).or_default();
            push_rows(rows, body, line_no)?;
            if !closes {
                open = Some((key, line_no));
            }
        }
    }
    if let Some((table, line)) = open {
        return Err(Error::Parse {
            line,
            message: format!("table mpc.{table} is not closed"),
        });
    }

    let base_mva = base_mva.unwrap_or(100.0);
    let mut take = |key: &str| {
        tables.remove(key).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing table mpc.{key}"),
        })
    };
    let bus_rows = take("bus")?;
    let gen_rows = take("gen")?;
    let branch_rows = take("branch")?;

    let mut buses = Vec::with_capacity(bus_rows.len());
    for (line, row) in &bus_rows {
        need_columns(row, 3, *line, "bus")?;
        buses.push((as_id(row[0], *line)?, None::<f64>, row[2]));
    }
    let mut gen_at: BTreeMap<u32, f64> = BTreeMap::new();
    for (line, row) in &gen_rows {
        need_columns(row, 2, *line, "gen")?;
        if row.get(7).is_some_and(|&status| status <= 0.0) {
            continue;
        }
        let id = as_id(row[0], *line)?;
        *gen_at.entry(id).or_insert(0.0) += row[1];
    }
    for (id, pg) in gen_at {
        match buses.iter_mut().find(|b| b.0 == id) {
            Some(bus) => bus.1 = Some(pg),
            None => {
                return Err(Error::Validation(format!(
                    "generator references unknown bus {id}"
                )))
            }
        }
    }
    let mut branches = Vec::with_capacity(branch_rows.len());
    for (line, row) in &branch_rows {
        need_columns(row, 6, *line, "branch")?;
        branches.push(RawBranch {
            label: format!("branch on line {line}"),
            from: as_id(row[0], *line)?,
            to: as_id(row[1], *line)?,
            x: row[3],
            rate: row[5],
            in_service: row.get(10).is_none_or(|&s| s > 0.0),
        });
    }
    assemble(&name, base_mva, buses, branches)
}

fn push_rows(rows: &mut Vec<(usize, Vec<f64>)>, body: &str, line: usize) -> Result<()> {
    for chunk in body.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let values = chunk
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("malformed number '{t}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    Ok(())
}

fn need_columns(row: &[f64], n: usize, line: usize, table: &str) -> Result<()> {
    if row.len() < n {
        return Err(Error::Parse {
            line,
            message: format!("{table} row has {} columns, need at least {n}", row.len()),
        });
    }
    Ok(())
}

fn as_id(v: f64, line: usize) -> Result<u32> {
    if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(Error::Parse {
            line,
            message: format!("bus number {v} is not a non-negative integer"),
        })
    }
}

/// Writes the MATPOWER table subset that [`parse_matpower`] reads back.
/// Only DC data is meaningful; the remaining columns carry neutral values.
pub fn to_matpower(case: &GridCase) -> String {
    let slack = case.default_slack();
    let mut out = String::new();
    let fname: String = case
        .name()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    let _ = writeln!(out, "function mpc = {fname}");
    let _ = writeln!(out, "mpc.version = '2';");
    let _ = writeln!(out, "mpc.baseMVA = {};", case.base_mva());
    let _ = writeln!(out);
    let _ = writeln!(out, "%% bus data");
    let _ = writeln!(out, "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin");
    let _ = writeln!(out, "mpc.bus = [");
    for (i, bus) in case.buses().iter().enumerate() {
        let kind = if i == slack {
            3
        } else if bus.is_generator() {
            2
        } else {
            1
        };
        let _ = writeln!(out, "\t{}\t{kind}\t{}\t0\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;", bus.id, bus.load);
    }
    let _ = writeln!(out, "];");
    let _ = writeln!(out);
    let _ = writeln!(out, "%% generator data");
    let _ = writeln!(out, "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin");
    let _ = writeln!(out, "mpc.gen = [");
    for bus in case.buses().iter().filter(|b| b.is_generator()) {
        let pg = bus.generation_mw();
        let _ = writeln!(out, "\t{}\t{pg}\t0\t0\t0\t1\t{}\t1\t{pg}\t0;", bus.id, case.base_mva());
    }
    let _ = writeln!(out, "];");
    let _ = writeln!(out);
    let _ = writeln!(out, "%% branch data");
    let _ = writeln!(out, "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax");
    let _ = writeln!(out, "mpc.branch = [");
    for br in case.branches() {
        let _ = writeln!(
            out,
            "\t{}\t{}\t0\t{}\t0\t{}\t{}\t{}\t0\t0\t{}\t-360\t360;",
            case.bus(br.from).id,
            case.bus(br.to).id,
            br.reactance,
            br.capacity,
            br.capacity,
            br.capacity,
            u8::from(br.in_service)
        );
    }
    let _ = writeln!(out, "];");
    out
}
