//! Switch-level steady-state solver and the analyses built on it:
//! exhaustive truth tables, VTC sweeps, and Monte-Carlo variation runs.

mod mc;
mod solve;
mod table;

pub use mc::{monte_carlo, McCell, McCellReport, McFailure, McReport};
pub use solve::{solve, solve_raw, Drive, InputDrive, NodeState, SolveResult};
pub use table::{truth_table, vtc_sweep, TruthRow, TruthTable};

use thiserror::Error;

use crate::ternary::{Trit, TritHz};

/// Hard cap on exhaustive enumeration: at most 6 ternary inputs (729 rows).
pub const ENUMERATION_CAP: usize = 6;

/// Solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Supply voltage.
    pub vdd: f64,
    /// Pass limit before declaring oscillation.
    pub max_iterations: usize,
    /// Half-width of each logic-level band, as a fraction of vdd.
    pub level_tolerance: f64,
    /// Reject high-impedance values feeding transistor gates.
    pub strict_hz_inputs: bool,
}

impl Default for SolveConfig {
    fn default() -> SolveConfig {
        SolveConfig {
            vdd: 0.9,
            max_iterations: 100,
            level_tolerance: 0.05,
            strict_hz_inputs: true,
        }
    }
}

impl SolveConfig {
    /// Config with the supply taken from a circuit's `.supply`.
    pub fn for_supply(vdd: f64) -> SolveConfig {
        SolveConfig { vdd, ..SolveConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("input '{node}' not assigned")]
    MissingInput { node: String },
    #[error("'{node}' is not an input of the circuit")]
    UnknownInput { node: String },
    #[error("high-impedance value on gate input '{node}'")]
    HzOnGateInput { node: String },
    #[error("no steady state after {iterations} iterations (oscillation)")]
    Oscillation { iterations: usize },
    #[error("contention on node '{node}': drivers at {a} V and {b} V")]
    Contention { node: String, a: f64, b: f64 },
    #[error("bus contention: conflicting strong values {a} and {b}")]
    BusContention { a: Trit, b: Trit },
    #[error("node '{node}' at {volts} V is outside every logic-level band")]
    InvalidLevel { node: String, volts: f64 },
    #[error("transistor gate on floating node '{node}'")]
    FloatingGate { node: String },
    #[error("macro '{name}' input '{node}' is floating")]
    MacroInputFloating { name: String, node: String },
    #[error("macro '{name}': {message}")]
    MacroDomain { name: String, message: String },
    #[error("circuit has {inputs} ternary inputs, enumeration cap is {cap}")]
    EnumerationCap { inputs: usize, cap: usize },
    #[error("sweep needs at least 2 steps, got {steps}")]
    BadSweep { steps: usize },
    #[error("sweep output floating at v_in = {v_in} V")]
    SweepOutputFloating { v_in: f64 },
    #[error("monte carlo needs at least 1 trial")]
    NoTrials,
    #[error("input tuple ({tuple}): {source}")]
    AtTuple {
        tuple: String,
        #[source]
        source: Box<SimError>,
    },
}

impl SimError {
    pub(crate) fn at_tuple(self, tuple: &[Trit]) -> SimError {
        let tuple = tuple.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        SimError::AtTuple { tuple, source: Box::new(self) }
    }
}

/// Maps a driven voltage to the nearest logic level, if it falls within
/// `level_tolerance * vdd` of one.
pub fn classify_voltage(v: f64, cfg: &SolveConfig) -> Result<Trit, SimError> {
    classify_loose(v, cfg).ok_or(SimError::InvalidLevel { node: String::new(), volts: v })
}

pub(crate) fn classify_loose(v: f64, cfg: &SolveConfig) -> Option<Trit> {
    let band = cfg.level_tolerance * cfg.vdd;
    Trit::ALL.into_iter().find(|&t| (v - t.voltage(cfg.vdd)).abs() <= band)
}

/// Resolves a multi-driver bus: all floating stays floating, agreeing
/// drivers win, conflicting strong values are contention.
pub fn resolve_bus(drivers: &[TritHz]) -> Result<TritHz, SimError> {
    let mut resolved: Option<Trit> = None;
    for d in drivers {
        if let TritHz::Value(t) = d {
            match resolved {
                None => resolved = Some(*t),
                Some(prev) if prev == *t => {}
                Some(prev) => return Err(SimError::BusContention { a: prev, b: *t }),
            }
        }
    }
    Ok(resolved.map_or(TritHz::Hz, TritHz::Value))
}

/// Number of simultaneously conducting VDD-to-GND paths in a solved state.
/// Zero exactly when the state dissipates no static power in this model.
pub fn static_power_proxy(result: &SolveResult) -> usize {
    result.static_path_count
}
