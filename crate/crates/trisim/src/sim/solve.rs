//! The steady-state fixpoint solver.
//!
//! Each pass recomputes, from the previous pass's node estimates:
//! (1) every device's conduction from its gate voltage, (2) every macro's
//! output from its input levels, (3) every node's voltage from the rails and
//! ideal drivers reachable through conducting channels. Nodes reaching only
//! VDD go to vdd, only GND to 0, both to vdd/2 (equal-strength resistive
//! division), and none float. Unknown gate voltages do not conduct, so
//! feed-forward circuits settle in a handful of passes.

use std::collections::BTreeMap;

use crate::device::{device_conducts, DeviceKind};
use crate::netlist::{FlatCircuit, FlatMacro, MacroFunction, NodeId};
use crate::ternary::{control_signals, full_add, Trit, TritHz};

use super::{classify_loose, SimError, SolveConfig};

/// Externally applied value for one input node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputDrive {
    Level(Trit),
    /// Raw voltage, used by VTC sweeps.
    Volts(f64),
    Hz,
}

impl From<Trit> for InputDrive {
    fn from(t: Trit) -> Self {
        InputDrive::Level(t)
    }
}

impl From<TritHz> for InputDrive {
    fn from(t: TritHz) -> Self {
        match t {
            TritHz::Value(t) => InputDrive::Level(t),
            TritHz::Hz => InputDrive::Hz,
        }
    }
}

/// How a node ended up at its final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Drive {
    Driven,
    Floating,
    Contention,
}

/// Final state of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub volts: Option<f64>,
    pub drive: Drive,
}

/// Steady state of the whole circuit.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub nodes: Vec<NodeState>,
    /// Passes executed until the state stopped changing.
    pub iterations: usize,
    /// Count of distinct conducting VDD-to-GND simple paths.
    pub static_path_count: usize,
    /// The device indices of each such path.
    pub static_paths: Vec<Vec<usize>>,
    /// Classification of each output port, in `FlatCircuit::outputs` order.
    pub outputs: Vec<TritHz>,
}

impl SolveResult {
    pub fn node_volts(&self, id: NodeId) -> Option<f64> {
        self.nodes[id.0].volts
    }

    /// Static paths running entirely through devices whose hierarchical
    /// name starts with `prefix`.
    pub fn static_paths_within<'a>(
        &'a self,
        flat: &'a FlatCircuit,
        prefix: &'a str,
    ) -> impl Iterator<Item = &'a Vec<usize>> + 'a {
        self.static_paths
            .iter()
            .filter(move |path| path.iter().all(|&d| flat.devices[d].name.starts_with(prefix)))
    }
}

/// Solves with inputs keyed by node name.
pub fn solve(
    flat: &FlatCircuit,
    inputs: &BTreeMap<String, InputDrive>,
    cfg: &SolveConfig,
) -> Result<SolveResult, SimError> {
    let mut drives = Vec::with_capacity(inputs.len());
    for (name, &drive) in inputs {
        let id = flat
            .find_node(name)
            .filter(|id| flat.inputs.contains(id))
            .ok_or_else(|| SimError::UnknownInput { node: name.clone() })?;
        drives.push((id, drive));
    }
    solve_raw(flat, &drives, cfg)
}

/// Solves with inputs keyed by node id. Every input must appear exactly once.
pub fn solve_raw(
    flat: &FlatCircuit,
    inputs: &[(NodeId, InputDrive)],
    cfg: &SolveConfig,
) -> Result<SolveResult, SimError> {
    for &input in &flat.inputs {
        if !inputs.iter().any(|&(id, _)| id == input) {
            return Err(SimError::MissingInput { node: flat.node_name(input).to_string() });
        }
    }

    let n = flat.node_count();
    let mut volts: Vec<Option<f64>> = vec![None; n];
    let mut fixed = vec![false; n];
    volts[0] = Some(cfg.vdd); // VDD
    volts[1] = Some(0.0); // GND
    fixed[0] = true;
    fixed[1] = true;

    let mut gate_fed = vec![false; n];
    for d in &flat.devices {
        gate_fed[d.gate.0] = true;
    }

    for &(id, drive) in inputs {
        if !flat.inputs.contains(&id) {
            return Err(SimError::UnknownInput { node: flat.node_name(id).to_string() });
        }
        match drive {
            InputDrive::Level(t) => volts[id.0] = Some(t.voltage(cfg.vdd)),
            InputDrive::Volts(v) => volts[id.0] = Some(v),
            InputDrive::Hz => {
                if cfg.strict_hz_inputs && gate_fed[id.0] {
                    return Err(SimError::HzOnGateInput {
                        node: flat.node_name(id).to_string(),
                    });
                }
                volts[id.0] = None;
            }
        }
        fixed[id.0] = true;
    }

    let mut iterations = 0;
    let mut conducting = vec![false; flat.devices.len()];
    loop {
        if iterations >= cfg.max_iterations {
            return Err(SimError::Oscillation { iterations });
        }
        iterations += 1;

        for (i, d) in flat.devices.iter().enumerate() {
            let rail = match d.params.kind {
                DeviceKind::P => cfg.vdd,
                DeviceKind::N => 0.0,
            };
            conducting[i] =
                volts[d.gate.0].is_some_and(|vg| device_conducts(&d.params, vg, rail));
        }
        let macro_values: Vec<Option<Vec<f64>>> =
            flat.macros.iter().map(|m| eval_macro(m, &volts, cfg).ok().flatten()).collect();

        let mut uf = UnionFind::new(n);
        for (i, d) in flat.devices.iter().enumerate() {
            if conducting[i] {
                uf.union(d.drain.0, d.source.0);
            }
        }

        // Collect the candidate drive per component: rails first, then
        // ideal drivers (macro outputs and fixed inputs).
        let mut candidate: Vec<Option<f64>> = vec![None; n];
        let mut conflict: Option<(usize, f64, f64)> = None;
        let mut offer = |root: usize, v: f64, conflict: &mut Option<(usize, f64, f64)>| {
            match candidate[root] {
                None => candidate[root] = Some(v),
                Some(prev) if prev == v => {}
                Some(prev) => {
                    if conflict.is_none() {
                        *conflict = Some((root, prev, v));
                    }
                }
            }
        };
        let vdd_root = uf.find(0);
        let gnd_root = uf.find(1);
        if vdd_root == gnd_root {
            offer(vdd_root, cfg.vdd / 2.0, &mut conflict);
        } else {
            offer(vdd_root, cfg.vdd, &mut conflict);
            offer(gnd_root, 0.0, &mut conflict);
        }
        for (m, value) in flat.macros.iter().zip(&macro_values) {
            if let Some(outs) = value {
                for (out, &v) in m.outputs.iter().zip(outs) {
                    let root = uf.find(out.0);
                    offer(root, v, &mut conflict);
                }
            }
        }
        for (id, is_fixed) in fixed.iter().enumerate() {
            if *is_fixed && id > 1 {
                if let Some(v) = volts[id] {
                    let root = uf.find(id);
                    offer(root, v, &mut conflict);
                }
            }
        }
        if let Some((root, a, b)) = conflict {
            let node = (0..n)
                .find(|&i| uf.find(i) == root)
                .map(|i| flat.node_name(NodeId(i)).to_string())
                .unwrap_or_default();
            return Err(SimError::Contention { node, a, b });
        }

        let mut changed = false;
        for id in 0..n {
            if fixed[id] {
                continue;
            }
            let new = candidate[uf.find(id)];
            if new != volts[id] {
                volts[id] = new;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Fixpoint reached; validate what the iteration tolerated silently.
    if cfg.strict_hz_inputs {
        for d in &flat.devices {
            if volts[d.gate.0].is_none() {
                return Err(SimError::FloatingGate {
                    node: flat.node_name(d.gate).to_string(),
                });
            }
        }
    }
    for m in &flat.macros {
        match eval_macro(m, &volts, cfg) {
            Ok(_) => {}
            Err(e) => {
                if cfg.strict_hz_inputs || !matches!(e, SimError::MacroInputFloating { .. }) {
                    return Err(e);
                }
            }
        }
    }

    let static_paths = enumerate_static_paths(flat, &conducting);
    let mut outputs = Vec::with_capacity(flat.outputs.len());
    for &out in &flat.outputs {
        match volts[out.0] {
            None => outputs.push(TritHz::Hz),
            Some(v) => {
                let trit = classify_loose(v, cfg).ok_or(SimError::InvalidLevel {
                    node: flat.node_name(out).to_string(),
                    volts: v,
                })?;
                outputs.push(TritHz::Value(trit));
            }
        }
    }

    let nodes = volts
        .iter()
        .map(|&v| NodeState {
            volts: v,
            drive: if v.is_some() { Drive::Driven } else { Drive::Floating },
        })
        .collect();
    Ok(SolveResult {
        nodes,
        iterations,
        static_path_count: static_paths.len(),
        static_paths,
        outputs,
    })
}

/// Evaluates one macro against current node estimates.
///
/// While iterating, the caller discards errors (an input that is still
/// unknown simply means "no drive yet"); after convergence the same call
/// surfaces [`SimError::MacroInputFloating`] for inputs that never settled
/// and [`SimError::MacroDomain`] for off-level or out-of-domain inputs.
/// `Ok(None)` is a valid quiet state: a BINBUF driven outside its binary
/// domain {0, 2} leaves its output undriven.
fn eval_macro(
    m: &FlatMacro,
    volts: &[Option<f64>],
    cfg: &SolveConfig,
) -> Result<Option<Vec<f64>>, SimError> {
    let read = |idx: usize| -> Result<Trit, SimError> {
        let node = m.inputs[idx];
        match volts[node.0] {
            None => Err(SimError::MacroInputFloating {
                name: m.name.clone(),
                node: format!("input {idx}"),
            }),
            Some(v) => classify_loose(v, cfg).ok_or_else(|| SimError::MacroDomain {
                name: m.name.clone(),
                message: format!("input at {v} V is not a logic level"),
            }),
        }
    };
    let one = |t: Trit| Ok(Some(vec![t.voltage(cfg.vdd)]));
    match m.function {
        MacroFunction::Tfa => {
            let (a, b, cin) = (read(0)?, read(1)?, read(2)?);
            let (sum, cout) = full_add(a, b, cin).map_err(|e| SimError::MacroDomain {
                name: m.name.clone(),
                message: e.to_string(),
            })?;
            Ok(Some(vec![sum.voltage(cfg.vdd), cout.voltage(cfg.vdd)]))
        }
        MacroFunction::BinBuf => match read(0)? {
            Trit::Zero => one(Trit::Zero),
            Trit::Two => one(Trit::One),
            Trit::One => Ok(None),
        },
        MacroFunction::Ctrl1 | MacroFunction::Ctrl2 | MacroFunction::Ctrl3
        | MacroFunction::Ctrl4 => {
            let w = control_signals(read(0)?, read(1)?);
            one(match m.function {
                MacroFunction::Ctrl1 => w.c1,
                MacroFunction::Ctrl2 => w.c2,
                MacroFunction::Ctrl3 => w.c3,
                _ => w.c4,
            })
        }
        MacroFunction::Mux3 => {
            // Only the selected data input is required.
            let sel = read(0)?;
            one(read(1 + sel.as_u8() as usize)?)
        }
    }
}

/// Depth-first enumeration of node-simple conducting paths VDD -> GND.
fn enumerate_static_paths(flat: &FlatCircuit, conducting: &[bool]) -> Vec<Vec<usize>> {
    // Adjacency over conducting channels only.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); flat.node_count()];
    for (i, d) in flat.devices.iter().enumerate() {
        if conducting[i] && d.drain != d.source {
            adj[d.drain.0].push((d.source.0, i));
            adj[d.source.0].push((d.drain.0, i));
        }
    }
    const PATH_CAP: usize = 4096;
    let mut paths = Vec::new();
    let mut visited = vec![false; flat.node_count()];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        node: usize,
        adj: &[Vec<(usize, usize)>],
        visited: &mut [bool],
        stack: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
    ) {
        if paths.len() >= PATH_CAP {
            return;
        }
        if node == 1 {
            paths.push(stack.clone());
            return;
        }
        visited[node] = true;
        for &(next, dev) in &adj[node] {
            if next == 0 || visited[next] {
                continue; // never re-enter VDD or revisit a node
            }
            stack.push(dev);
            dfs(next, adj, visited, stack, paths);
            stack.pop();
        }
        visited[node] = false;
    }
    dfs(0, &adj, &mut visited, &mut stack, &mut paths);
    paths
}

/// Disjoint sets over node indices, rebuilt once per pass.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so VDD/GND stay their own representatives
            // when possible; only determinism matters here.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{elaborate, parse_netlist};
    use Trit::{One, Two, Zero};

    fn circuit(text: &str) -> FlatCircuit {
        elaborate(&parse_netlist(text).unwrap()).unwrap()
    }

    const STI: &str = "\
.subckt sti in out
M1 out in VDD P (19,0)
M2 out in GND N (19,0)
.ends
.top sti
";

    fn solve_one(flat: &FlatCircuit, t: Trit) -> SolveResult {
        let cfg = SolveConfig::default();
        solve_raw(flat, &[(flat.inputs[0], t.into())], &cfg).unwrap()
    }

    #[test]
    fn sti_inverts_with_division_at_mid() {
        let flat = circuit(STI);
        let r = solve_one(&flat, Zero);
        assert_eq!(r.outputs, vec![TritHz::Value(Two)]);
        assert_eq!(r.static_path_count, 0);

        let r = solve_one(&flat, One);
        assert_eq!(r.outputs, vec![TritHz::Value(One)]);
        assert_eq!(r.node_volts(flat.outputs[0]), Some(0.45));
        assert_eq!(r.static_path_count, 1, "mid level comes from a divider");

        let r = solve_one(&flat, Two);
        assert_eq!(r.outputs, vec![TritHz::Value(Zero)]);
        assert_eq!(r.static_path_count, 0);
    }

    #[test]
    fn missing_and_unknown_inputs() {
        let flat = circuit(STI);
        let cfg = SolveConfig::default();
        assert!(matches!(
            solve_raw(&flat, &[], &cfg),
            Err(SimError::MissingInput { .. })
        ));
        let mut by_name = BTreeMap::new();
        by_name.insert("bogus".to_string(), InputDrive::Level(Zero));
        assert!(matches!(
            solve(&flat, &by_name, &cfg),
            Err(SimError::UnknownInput { .. })
        ));
    }

    #[test]
    fn hz_input_rejected_in_strict_mode() {
        let flat = circuit(STI);
        let cfg = SolveConfig::default();
        assert!(matches!(
            solve_raw(&flat, &[(flat.inputs[0], InputDrive::Hz)], &cfg),
            Err(SimError::HzOnGateInput { .. })
        ));
        let lenient = SolveConfig { strict_hz_inputs: false, ..cfg };
        let r = solve_raw(&flat, &[(flat.inputs[0], InputDrive::Hz)], &lenient).unwrap();
        assert_eq!(r.outputs, vec![TritHz::Hz]);
    }

    #[test]
    fn pass_transistor_chain_converges() {
        // Two inverters through an always-on N pass transistor.
        let text = "\
.subckt cell in out
M1 mid in VDD P (19,0)
M2 mid in GND N (19,0)
M3 mid2 VDD mid N (19,0)
M4 out mid2 VDD P (19,0)
M5 out mid2 GND N (19,0)
.ends
.top cell
";
        let flat = circuit(text);
        let r = solve_one(&flat, Two);
        assert_eq!(r.outputs, vec![TritHz::Value(Two)]);
        assert!(r.iterations <= 10);
    }

    #[test]
    fn tfa_macro_adds() {
        let text = "\
.subckt cell a b cin sum cout
B1 TFA a b cin sum cout
.ends
.top cell
";
        let flat = circuit(text);
        let cfg = SolveConfig::default();
        let inputs: Vec<(NodeId, InputDrive)> = flat
            .inputs
            .iter()
            .zip([Two, Two, One])
            .map(|(&id, t)| (id, t.into()))
            .collect();
        let r = solve_raw(&flat, &inputs, &cfg).unwrap();
        // 2 + 2 + 1 = 5 = 2 + 3
        assert_eq!(r.outputs, vec![TritHz::Value(Two), TritHz::Value(One)]);

        // carry-in 2 violates the adder domain
        let inputs: Vec<(NodeId, InputDrive)> =
            flat.inputs.iter().zip([Zero, Zero, Two]).map(|(&id, t)| (id, t.into())).collect();
        assert!(matches!(
            solve_raw(&flat, &inputs, &cfg),
            Err(SimError::MacroDomain { .. })
        ));
    }

    #[test]
    fn macro_chain_through_mux() {
        let text = "\
.subckt cell sel a b out
B1 MUX3 sel a b a out
.ends
.top cell
";
        let flat = circuit(text);
        let cfg = SolveConfig::default();
        let run = |sel: Trit, a: Trit, b: Trit| {
            let inputs: Vec<(NodeId, InputDrive)> =
                flat.inputs.iter().zip([sel, a, b]).map(|(&id, t)| (id, t.into())).collect();
            solve_raw(&flat, &inputs, &cfg).unwrap().outputs[0]
        };
        assert_eq!(run(Zero, One, Two), TritHz::Value(One));
        assert_eq!(run(One, One, Two), TritHz::Value(Two));
        assert_eq!(run(Two, Zero, Two), TritHz::Value(Zero));
    }

    #[test]
    fn contention_between_macros() {
        let text = "\
.subckt cell s0 s1 out
B1 CTRL4 s0 s1 out
B2 CTRL1 s0 s1 out
.ends
.top cell
";
        let flat = circuit(text);
        let cfg = SolveConfig::default();
        // (0,0): C4 = 1 but C1 = 0 -> conflicting ideal drivers on one node
        let inputs: Vec<(NodeId, InputDrive)> =
            flat.inputs.iter().zip([Zero, Zero]).map(|(&id, t)| (id, t.into())).collect();
        assert!(matches!(
            solve_raw(&flat, &inputs, &cfg),
            Err(SimError::Contention { .. })
        ));
        // (2,1): both decoders emit 1, agreeing drivers are fine
        let inputs: Vec<(NodeId, InputDrive)> =
            flat.inputs.iter().zip([Two, One]).map(|(&id, t)| (id, t.into())).collect();
        let r = solve_raw(&flat, &inputs, &cfg).unwrap();
        assert_eq!(r.outputs, vec![TritHz::Value(One)]);
    }

    #[test]
    fn oscillation_detected() {
        // Always-on pull-up fights a high-threshold pull-down gated by the
        // node itself: 0.9 V turns the pull-down on (divide to 0.45 V),
        // 0.45 V turns it back off, and so on.
        let text = "\
.subckt cell out
M1 out GND VDD P (19,0)
M2 out out GND N (10,0)
.ends
.top cell
";
        let flat = circuit(text);
        let cfg = SolveConfig::default();
        assert!(matches!(
            solve_raw(&flat, &[], &cfg),
            Err(SimError::Oscillation { .. })
        ));
    }

    #[test]
    fn undriven_loop_floats() {
        // A gate loop with no driver settles at the all-floating fixpoint;
        // strict mode reports the floating gate instead of guessing.
        let text = "\
.subckt cell out
M1 out out VDD P (19,0)
M2 out out GND N (19,0)
.ends
.top cell
";
        let flat = circuit(text);
        assert!(matches!(
            solve_raw(&flat, &[], &SolveConfig::default()),
            Err(SimError::FloatingGate { .. })
        ));
        let lenient = SolveConfig { strict_hz_inputs: false, ..SolveConfig::default() };
        let r = solve_raw(&flat, &[], &lenient).unwrap();
        assert_eq!(r.outputs, vec![TritHz::Hz]);
    }
}
