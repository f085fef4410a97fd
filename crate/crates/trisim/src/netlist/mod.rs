//! Hierarchical netlist model, text format, parser, and elaboration.
//!
//! The text format is line-oriented with `#` comments:
//!
//! ```text
//! .supply <volts>                          # once, before cells; default 0.9
//! .subckt <name> <port>...                 # cell bracket
//! M<id> <drain> <gate> <source> <P|N> (<n>,<m>)
//! X<id> <subckt-name> <node>...            # positional port binding
//! B<id> <function> <node>...               # behavioral macro
//! .ends
//! .top <name>
//! ```
//!
//! Node names are case-sensitive identifiers; `VDD` and `GND` are the
//! reserved rail names.

mod flatten;
mod parse;

pub use flatten::{elaborate, validate, Diagnostic, FlatCircuit, FlatDevice, FlatMacro, NodeId};
pub use parse::parse_netlist;

use std::fmt;

use thiserror::Error;

use crate::device::{Chirality, DeviceKind};

/// Default supply voltage when a netlist has no `.supply` line.
pub const DEFAULT_SUPPLY: f64 = 0.9;

/// Reserved rail node names.
pub const VDD_NAME: &str = "VDD";
pub const GND_NAME: &str = "GND";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: duplicate subcircuit '{name}'")]
    DuplicateSubcircuit { name: String, line: usize },
    #[error("line {line}: metallic nanotube {chirality} cannot be a FET channel")]
    MetallicChirality { chirality: Chirality, line: usize },
    #[error("no top cell")]
    NoTopCell,
    #[error("unresolved reference to subcircuit '{name}'")]
    UnresolvedReference { name: String },
    #[error("instantiation cycle through subcircuit '{name}'")]
    InstantiationCycle { name: String },
    #[error("instance '{instance}' of '{subckt}' binds {got} nodes, expected {expected}")]
    PortCountMismatch {
        instance: String,
        subckt: String,
        got: usize,
        expected: usize,
    },
}

/// Behavioral macro functions available in the `B` statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MacroFunction {
    /// Ternary full adder: inputs a, b, cin; outputs sum, cout.
    Tfa,
    /// Binary buffer: maps input 0 -> 0 and 2 -> 1.
    BinBuf,
    /// Control decoders producing C1..C4 from (s0, s1).
    Ctrl1,
    Ctrl2,
    Ctrl3,
    Ctrl4,
    /// Ternary multiplexer: inputs sel, in0, in1, in2; output the selected input.
    Mux3,
}

impl MacroFunction {
    pub fn keyword(self) -> &'static str {
        match self {
            MacroFunction::Tfa => "TFA",
            MacroFunction::BinBuf => "BINBUF",
            MacroFunction::Ctrl1 => "CTRL1",
            MacroFunction::Ctrl2 => "CTRL2",
            MacroFunction::Ctrl3 => "CTRL3",
            MacroFunction::Ctrl4 => "CTRL4",
            MacroFunction::Mux3 => "MUX3",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<MacroFunction> {
        match kw {
            "TFA" => Some(MacroFunction::Tfa),
            "BINBUF" => Some(MacroFunction::BinBuf),
            "CTRL1" => Some(MacroFunction::Ctrl1),
            "CTRL2" => Some(MacroFunction::Ctrl2),
            "CTRL3" => Some(MacroFunction::Ctrl3),
            "CTRL4" => Some(MacroFunction::Ctrl4),
            "MUX3" => Some(MacroFunction::Mux3),
            _ => None,
        }
    }

    /// Number of input ports, before the outputs in the port list.
    pub fn input_count(self) -> usize {
        match self {
            MacroFunction::Tfa => 3,
            MacroFunction::BinBuf => 1,
            MacroFunction::Ctrl1 | MacroFunction::Ctrl2 => 2,
            MacroFunction::Ctrl3 | MacroFunction::Ctrl4 => 2,
            MacroFunction::Mux3 => 4,
        }
    }

    /// Number of output ports, after the inputs in the port list.
    pub fn output_count(self) -> usize {
        match self {
            MacroFunction::Tfa => 2,
            _ => 1,
        }
    }

    pub fn arity(self) -> usize {
        self.input_count() + self.output_count()
    }
}

impl fmt::Display for MacroFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.keyword())
    }
}

/// `M` statement: one transistor.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceStatement {
    pub id: String,
    pub kind: DeviceKind,
    pub drain: String,
    pub gate: String,
    pub source: String,
    pub chirality: Chirality,
}

/// `X` statement: one subcircuit instance with positional port bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceStatement {
    pub id: String,
    pub subckt: String,
    pub bindings: Vec<String>,
}

/// `B` statement: one behavioral macro instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroStatement {
    pub id: String,
    pub function: MacroFunction,
    pub ports: Vec<String>,
}

/// One cell definition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Subcircuit {
    pub name: String,
    pub ports: Vec<String>,
    pub devices: Vec<DeviceStatement>,
    pub instances: Vec<InstanceStatement>,
    pub macros: Vec<MacroStatement>,
}

impl Subcircuit {
    /// Statement count, used by elaboration bookkeeping and tests.
    pub fn device_count(&self) -> usize {
        self.devices.len()
    }
}

/// A parsed netlist: cell definitions in file order plus the top selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub supply: f64,
    pub subcircuits: Vec<Subcircuit>,
    pub top: String,
}

impl Netlist {
    pub fn subcircuit(&self, name: &str) -> Option<&Subcircuit> {
        self.subcircuits.iter().find(|s| s.name == name)
    }

    pub fn top_subcircuit(&self) -> &Subcircuit {
        self.subcircuit(&self.top).expect("validated at construction")
    }

    /// Canonical text form. Emitting and re-parsing is a fixpoint.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(".supply {}\n", self.supply));
        for sub in &self.subcircuits {
            out.push_str(&format!(".subckt {}", sub.name));
            for p in &sub.ports {
                out.push(' ');
                out.push_str(p);
            }
            out.push('\n');
            for d in &sub.devices {
                out.push_str(&format!(
                    "{} {} {} {} {} {}\n",
                    d.id, d.drain, d.gate, d.source, d.kind, d.chirality
                ));
            }
            for i in &sub.instances {
                out.push_str(&format!("{} {}", i.id, i.subckt));
                for b in &i.bindings {
                    out.push(' ');
                    out.push_str(b);
                }
                out.push('\n');
            }
            for m in &sub.macros {
                out.push_str(&format!("{} {}", m.id, m.function.keyword()));
                for p in &m.ports {
                    out.push(' ');
                    out.push_str(p);
                }
                out.push('\n');
            }
            out.push_str(".ends\n");
        }
        out.push_str(&format!(".top {}\n", self.top));
        out
    }
}
