//! Exhaustive enumeration and voltage-transfer sweeps.

use crate::netlist::{FlatCircuit, NodeId};
use crate::ternary::{Trit, TritHz};

use super::solve::{solve_raw, InputDrive};
use super::{SimError, SolveConfig, ENUMERATION_CAP};

/// One enumerated row: the applied input tuple and the classified outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRow {
    pub inputs: Vec<Trit>,
    pub outputs: Vec<TritHz>,
}

/// Exhaustive truth table of a flat circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    /// CSV form with trit symbols `0,1,2,Z`, one row per tuple.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self
            .input_names
            .iter()
            .chain(self.output_names.iter())
            .map(String::as_str)
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .inputs
                .iter()
                .map(|t| t.to_string())
                .chain(row.outputs.iter().map(|t| t.to_string()))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Iterates every tuple of the per-input domains in lexicographic order
/// (first input varies slowest), invoking `f` with each tuple.
pub fn for_each_tuple<E>(
    domains: &[Vec<Trit>],
    mut f: impl FnMut(&[Trit]) -> Result<(), E>,
) -> Result<(), E> {
    let mut idx = vec![0usize; domains.len()];
    loop {
        let tuple: Vec<Trit> = idx.iter().zip(domains).map(|(&i, d)| d[i]).collect();
        f(&tuple)?;
        let mut pos = domains.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domains[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Enumerates the circuit exhaustively over the given per-input domains.
/// Solve failures carry the offending tuple.
pub fn truth_table_over(
    flat: &FlatCircuit,
    domains: &[Vec<Trit>],
    cfg: &SolveConfig,
) -> Result<TruthTable, SimError> {
    assert_eq!(domains.len(), flat.inputs.len());
    if flat.inputs.len() > ENUMERATION_CAP {
        return Err(SimError::EnumerationCap {
            inputs: flat.inputs.len(),
            cap: ENUMERATION_CAP,
        });
    }
    let mut rows = Vec::new();
    for_each_tuple(domains, |tuple| {
        let drives: Vec<(NodeId, InputDrive)> = flat
            .inputs
            .iter()
            .zip(tuple)
            .map(|(&id, &t)| (id, InputDrive::Level(t)))
            .collect();
        let result = solve_raw(flat, &drives, cfg).map_err(|e| e.at_tuple(tuple))?;
        rows.push(TruthRow { inputs: tuple.to_vec(), outputs: result.outputs });
        Ok(())
    })?;
    Ok(TruthTable {
        input_names: flat.inputs.iter().map(|&i| flat.node_name(i).to_string()).collect(),
        output_names: flat.outputs.iter().map(|&o| flat.node_name(o).to_string()).collect(),
        rows,
    })
}

/// Exhaustive truth table over all 3^k input tuples.
pub fn truth_table(flat: &FlatCircuit, cfg: &SolveConfig) -> Result<TruthTable, SimError> {
    let domains = vec![Trit::ALL.to_vec(); flat.inputs.len()];
    truth_table_over(flat, &domains, cfg)
}

/// Sweeps one input pin from 0 to vdd while the remaining inputs hold fixed
/// trit levels; returns the `(v_in, v_out)` series for the first output.
///
/// The output of a switch-level model is a staircase: levels change only
/// where the swept voltage crosses a device threshold.
pub fn vtc_sweep(
    flat: &FlatCircuit,
    pin: &str,
    fixed: &[(String, Trit)],
    steps: usize,
    cfg: &SolveConfig,
) -> Result<Vec<(f64, f64)>, SimError> {
    if steps < 2 {
        return Err(SimError::BadSweep { steps });
    }
    let pin_id = flat
        .find_node(pin)
        .filter(|id| flat.inputs.contains(id))
        .ok_or_else(|| SimError::UnknownInput { node: pin.to_string() })?;
    let mut base: Vec<(NodeId, InputDrive)> = Vec::with_capacity(flat.inputs.len());
    for (name, t) in fixed {
        let id = flat
            .find_node(name)
            .filter(|id| flat.inputs.contains(id))
            .ok_or_else(|| SimError::UnknownInput { node: name.clone() })?;
        base.push((id, InputDrive::Level(*t)));
    }
    let out = *flat
        .outputs
        .first()
        .ok_or_else(|| SimError::UnknownInput { node: "<no output>".to_string() })?;

    let mut series = Vec::with_capacity(steps);
    for i in 0..steps {
        let v_in = cfg.vdd * (i as f64) / ((steps - 1) as f64);
        let mut drives = base.clone();
        drives.push((pin_id, InputDrive::Volts(v_in)));
        let result = solve_raw(flat, &drives, cfg)?;
        let v_out = result
            .node_volts(out)
            .ok_or(SimError::SweepOutputFloating { v_in })?;
        series.push((v_in, v_out));
    }
    Ok(series)
}

/// Renders a sweep series as `v_in,v_out` CSV.
pub fn series_to_csv(series: &[(f64, f64)]) -> String {
    let mut out = String::from("v_in,v_out\n");
    for (v_in, v_out) in series {
        out.push_str(&format!("{v_in},{v_out}\n"));
    }
    out
}
