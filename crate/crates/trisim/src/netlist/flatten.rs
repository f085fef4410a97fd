//! Hierarchy elaboration: a [`Netlist`] becomes a [`FlatCircuit`] of
//! transistors and macros over a flat node table.

use std::collections::HashMap;
use std::fmt;

use crate::device::{CnfetParams, DeviceKind};

use super::{MacroFunction, Netlist, NetlistError, Subcircuit, GND_NAME, VDD_NAME};

/// Index into a [`FlatCircuit`]'s node table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// One transistor of the flattened design. The name carries the full
/// instance path, e.g. `Xg1.Xns.M2`.
#[derive(Debug, Clone)]
pub struct FlatDevice {
    pub name: String,
    pub drain: NodeId,
    pub gate: NodeId,
    pub source: NodeId,
    pub params: CnfetParams,
}

/// One behavioral macro of the flattened design.
#[derive(Debug, Clone)]
pub struct FlatMacro {
    pub name: String,
    pub function: MacroFunction,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<NodeId>,
}

/// Elaborated circuit: flat node table (VDD at 0, GND at 1), flat device and
/// macro lists, and the top cell's ports split into inputs and outputs.
///
/// A port counts as an output when something can drive it (a device channel
/// terminal or a macro output touches it); ports that only feed device gates
/// and macro inputs are the circuit's inputs.
#[derive(Debug, Clone)]
pub struct FlatCircuit {
    pub vdd: f64,
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    pub ports: Vec<NodeId>,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<NodeId>,
    pub devices: Vec<FlatDevice>,
    pub macros: Vec<FlatMacro>,
}

pub const VDD_NODE: NodeId = NodeId(0);
pub const GND_NODE: NodeId = NodeId(1);

impl FlatCircuit {
    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.node_names[id.0]
    }

    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn is_rail(&self, id: NodeId) -> bool {
        id == VDD_NODE || id == GND_NODE
    }

    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.node_index.get(name) {
            return id;
        }
        let id = NodeId(self.node_names.len());
        self.node_names.push(name.to_string());
        self.node_index.insert(name.to_string(), id);
        id
    }
}

fn resolve(
    flat: &mut FlatCircuit,
    prefix: &str,
    port_map: &HashMap<&str, NodeId>,
    name: &str,
) -> NodeId {
    if name == VDD_NAME {
        return VDD_NODE;
    }
    if name == GND_NAME {
        return GND_NODE;
    }
    if let Some(&id) = port_map.get(name) {
        return id;
    }
    let full = if prefix.is_empty() { name.to_string() } else { format!("{prefix}{name}") };
    flat.intern(&full)
}

fn instantiate(
    netlist: &Netlist,
    sub: &Subcircuit,
    flat: &mut FlatCircuit,
    prefix: &str,
    port_map: &HashMap<&str, NodeId>,
    stack: &mut Vec<String>,
) -> Result<(), NetlistError> {
    if stack.iter().any(|s| s == &sub.name) {
        return Err(NetlistError::InstantiationCycle { name: sub.name.clone() });
    }
    stack.push(sub.name.clone());
    for d in &sub.devices {
        let drain = resolve(flat, prefix, port_map, &d.drain);
        let gate = resolve(flat, prefix, port_map, &d.gate);
        let source = resolve(flat, prefix, port_map, &d.source);
        flat.devices.push(FlatDevice {
            name: format!("{prefix}{}", d.id),
            drain,
            gate,
            source,
            params: CnfetParams::new(d.kind, d.chirality),
        });
    }
    for m in &sub.macros {
        let ids: Vec<NodeId> =
            m.ports.iter().map(|p| resolve(flat, prefix, port_map, p)).collect();
        let (ins, outs) = ids.split_at(m.function.input_count());
        flat.macros.push(FlatMacro {
            name: format!("{prefix}{}", m.id),
            function: m.function,
            inputs: ins.to_vec(),
            outputs: outs.to_vec(),
        });
    }
    for inst in &sub.instances {
        let child = netlist
            .subcircuit(&inst.subckt)
            .ok_or_else(|| NetlistError::UnresolvedReference { name: inst.subckt.clone() })?;
        if child.ports.len() != inst.bindings.len() {
            return Err(NetlistError::PortCountMismatch {
                instance: inst.id.clone(),
                subckt: inst.subckt.clone(),
                got: inst.bindings.len(),
                expected: child.ports.len(),
            });
        }
        let bound: Vec<NodeId> =
            inst.bindings.iter().map(|b| resolve(flat, prefix, port_map, b)).collect();
        let child_map: HashMap<&str, NodeId> =
            child.ports.iter().map(String::as_str).zip(bound).collect();
        let child_prefix = format!("{prefix}{}.", inst.id);
        instantiate(netlist, child, flat, &child_prefix, &child_map, stack)?;
    }
    stack.pop();
    Ok(())
}

/// Flattens the hierarchy under the netlist's top cell.
pub fn elaborate(netlist: &Netlist) -> Result<FlatCircuit, NetlistError> {
    let top = netlist
        .subcircuit(&netlist.top)
        .ok_or_else(|| NetlistError::UnresolvedReference { name: netlist.top.clone() })?;
    let mut flat = FlatCircuit {
        vdd: netlist.supply,
        node_names: Vec::new(),
        node_index: HashMap::new(),
        ports: Vec::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        devices: Vec::new(),
        macros: Vec::new(),
    };
    flat.intern(VDD_NAME);
    flat.intern(GND_NAME);
    let ports: Vec<NodeId> = top.ports.iter().map(|p| flat.intern(p)).collect();
    flat.ports = ports.clone();
    let port_map: HashMap<&str, NodeId> =
        top.ports.iter().map(String::as_str).zip(ports).collect();
    let mut stack = Vec::new();
    instantiate(netlist, top, &mut flat, "", &port_map, &mut stack)?;

    let mut driven = vec![false; flat.node_count()];
    for d in &flat.devices {
        driven[d.drain.0] = true;
        driven[d.source.0] = true;
    }
    for m in &flat.macros {
        for out in &m.outputs {
            driven[out.0] = true;
        }
    }
    for &port in &flat.ports {
        if driven[port.0] {
            flat.outputs.push(port);
        } else {
            flat.inputs.push(port);
        }
    }
    Ok(flat)
}

/// Static-lint findings on a flat circuit. These are observations, not
/// errors: a circuit with diagnostics still simulates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// A device gate (or macro input) hangs on a node nothing can drive.
    FloatingGate { node: String },
    /// A top-level port that should be driven has no potential driver.
    UndrivenOutput { node: String },
    /// A single device bridges VDD and GND and its gate can turn it on.
    PotentialRailShort { device: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::FloatingGate { node } => write!(f, "floating gate: node '{node}'"),
            Diagnostic::UndrivenOutput { node } => {
                write!(f, "output '{node}' has no potential driver")
            }
            Diagnostic::PotentialRailShort { device } => {
                write!(f, "potential rail short through device '{device}'")
            }
        }
    }
}

/// Scans a flat circuit for structural problems.
pub fn validate(flat: &FlatCircuit) -> Vec<Diagnostic> {
    let mut driven = vec![false; flat.node_count()];
    driven[VDD_NODE.0] = true;
    driven[GND_NODE.0] = true;
    for d in &flat.devices {
        driven[d.drain.0] = true;
        driven[d.source.0] = true;
    }
    for m in &flat.macros {
        for out in &m.outputs {
            driven[out.0] = true;
        }
    }
    for &input in &flat.inputs {
        driven[input.0] = true;
    }

    let mut diags = Vec::new();
    let mut seen_floating = vec![false; flat.node_count()];
    let mut flag_floating = |node: NodeId, diags: &mut Vec<Diagnostic>, seen: &mut Vec<bool>| {
        if !driven[node.0] && !seen[node.0] {
            seen[node.0] = true;
            diags.push(Diagnostic::FloatingGate { node: flat.node_name(node).to_string() });
        }
    };
    for d in &flat.devices {
        flag_floating(d.gate, &mut diags, &mut seen_floating);
    }
    for m in &flat.macros {
        for &input in &m.inputs {
            flag_floating(input, &mut diags, &mut seen_floating);
        }
    }
    for &port in &flat.outputs {
        let has_driver = flat.devices.iter().any(|d| d.drain == port || d.source == port)
            || flat.macros.iter().any(|m| m.outputs.contains(&port));
        if !has_driver {
            diags.push(Diagnostic::UndrivenOutput { node: flat.node_name(port).to_string() });
        }
    }
    for d in &flat.devices {
        let bridges_rails = (d.drain == VDD_NODE && d.source == GND_NODE)
            || (d.drain == GND_NODE && d.source == VDD_NODE);
        if !bridges_rails {
            continue;
        }
        // Gate tied to the rail that keeps the device off is harmless.
        let held_off = match d.params.kind {
            DeviceKind::N => d.gate == GND_NODE,
            DeviceKind::P => d.gate == VDD_NODE,
        };
        if !held_off {
            diags.push(Diagnostic::PotentialRailShort { device: d.name.clone() });
        }
    }
    diags
}
