//! Line-oriented parser for the netlist text format.

use std::collections::{HashMap, HashSet};

use crate::device::{cnt_is_metallic, Chirality, DeviceKind};

use super::{
    DeviceStatement, InstanceStatement, MacroFunction, MacroStatement, Netlist, NetlistError,
    Subcircuit, DEFAULT_SUPPLY, GND_NAME, VDD_NAME,
};

/// A token with its 1-based column.
struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token { col: s + 1, text: &body[s..i] });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token { col: s + 1, text: &body[s..] });
    }
    tokens
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax { line, col, message: message.into() }
}

fn parse_chirality(tok: &Token<'_>, line: usize) -> Result<Chirality, NetlistError> {
    let bad = || syntax(line, tok.col, format!("expected chirality '(n,m)', got '{}'", tok.text));
    let inner = tok
        .text
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (n_str, m_str) = inner.split_once(',').ok_or_else(bad)?;
    let n: u32 = n_str.parse().map_err(|_| bad())?;
    let m: u32 = m_str.parse().map_err(|_| bad())?;
    Chirality::new(n, m).map_err(|e| syntax(line, tok.col, e.to_string()))
}

fn node_name(tok: &Token<'_>, line: usize) -> Result<String, NetlistError> {
    if is_identifier(tok.text) {
        Ok(tok.text.to_string())
    } else {
        Err(syntax(line, tok.col, format!("invalid node name '{}'", tok.text)))
    }
}

struct Parser {
    supply: Option<f64>,
    subcircuits: Vec<Subcircuit>,
    names: HashSet<String>,
    current: Option<Subcircuit>,
    top: Option<String>,
}

impl Parser {
    fn new() -> Parser {
        Parser {
            supply: None,
            subcircuits: Vec::new(),
            names: HashSet::new(),
            current: None,
            top: None,
        }
    }

    fn cell_mut(&mut self, line: usize, col: usize) -> Result<&mut Subcircuit, NetlistError> {
        self.current
            .as_mut()
            .ok_or_else(|| syntax(line, col, "statement outside .subckt/.ends"))
    }

    fn directive(&mut self, tokens: &[Token<'_>], line: usize) -> Result<(), NetlistError> {
        let head = tokens[0].text;
        match head {
            ".supply" => {
                if self.supply.is_some() {
                    return Err(syntax(line, tokens[0].col, ".supply given twice"));
                }
                if !self.subcircuits.is_empty() || self.current.is_some() {
                    return Err(syntax(line, tokens[0].col, ".supply must come before cells"));
                }
                let tok = tokens
                    .get(1)
                    .ok_or_else(|| syntax(line, tokens[0].col, ".supply needs a voltage"))?;
                let volts: f64 = tok
                    .text
                    .parse()
                    .map_err(|_| syntax(line, tok.col, format!("bad voltage '{}'", tok.text)))?;
                if !(volts > 0.0) {
                    return Err(syntax(line, tok.col, "supply voltage must be positive"));
                }
                self.supply = Some(volts);
            }
            ".subckt" => {
                if self.current.is_some() {
                    return Err(syntax(line, tokens[0].col, "nested .subckt"));
                }
                let name_tok = tokens
                    .get(1)
                    .ok_or_else(|| syntax(line, tokens[0].col, ".subckt needs a name"))?;
                let name = node_name(name_tok, line)?;
                if !self.names.insert(name.clone()) {
                    return Err(NetlistError::DuplicateSubcircuit { name, line });
                }
                let mut ports = Vec::new();
                let mut seen = HashSet::new();
                for tok in &tokens[2..] {
                    let port = node_name(tok, line)?;
                    if port == VDD_NAME || port == GND_NAME {
                        return Err(syntax(line, tok.col, "rail names cannot be ports"));
                    }
                    if !seen.insert(port.clone()) {
                        return Err(syntax(line, tok.col, format!("duplicate port '{port}'")));
                    }
                    ports.push(port);
                }
                self.current = Some(Subcircuit { name, ports, ..Subcircuit::default() });
            }
            ".ends" => {
                let cell = self
                    .current
                    .take()
                    .ok_or_else(|| syntax(line, tokens[0].col, ".ends without .subckt"))?;
                self.subcircuits.push(cell);
            }
            ".top" => {
                if self.top.is_some() {
                    return Err(syntax(line, tokens[0].col, ".top given twice"));
                }
                let tok = tokens
                    .get(1)
                    .ok_or_else(|| syntax(line, tokens[0].col, ".top needs a cell name"))?;
                self.top = Some(node_name(tok, line)?);
            }
            _ => return Err(syntax(line, tokens[0].col, format!("unknown directive '{head}'"))),
        }
        Ok(())
    }

    fn device(&mut self, tokens: &[Token<'_>], line: usize) -> Result<(), NetlistError> {
        if tokens.len() != 6 {
            return Err(syntax(
                line,
                tokens[0].col,
                "transistor needs: M<id> <drain> <gate> <source> <P|N> (<n>,<m>)",
            ));
        }
        let id = tokens[0].text.to_string();
        let drain = node_name(&tokens[1], line)?;
        let gate = node_name(&tokens[2], line)?;
        let source = node_name(&tokens[3], line)?;
        let kind = match tokens[4].text {
            "P" => DeviceKind::P,
            "N" => DeviceKind::N,
            other => {
                return Err(syntax(line, tokens[4].col, format!("device kind must be P or N, got '{other}'")))
            }
        };
        let chirality = parse_chirality(&tokens[5], line)?;
        if cnt_is_metallic(chirality) {
            return Err(NetlistError::MetallicChirality { chirality, line });
        }
        self.cell_mut(line, tokens[0].col)?.devices.push(DeviceStatement {
            id,
            kind,
            drain,
            gate,
            source,
            chirality,
        });
        Ok(())
    }

    fn instance(&mut self, tokens: &[Token<'_>], line: usize) -> Result<(), NetlistError> {
        if tokens.len() < 2 {
            return Err(syntax(line, tokens[0].col, "instance needs: X<id> <subckt> <node>..."));
        }
        let id = tokens[0].text.to_string();
        let subckt = node_name(&tokens[1], line)?;
        let mut bindings = Vec::new();
        for tok in &tokens[2..] {
            bindings.push(node_name(tok, line)?);
        }
        self.cell_mut(line, tokens[0].col)?.instances.push(InstanceStatement {
            id,
            subckt,
            bindings,
        });
        Ok(())
    }

    fn behavioral(&mut self, tokens: &[Token<'_>], line: usize) -> Result<(), NetlistError> {
        if tokens.len() < 2 {
            return Err(syntax(line, tokens[0].col, "macro needs: B<id> <function> <node>..."));
        }
        let id = tokens[0].text.to_string();
        let function = MacroFunction::from_keyword(tokens[1].text).ok_or_else(|| {
            syntax(line, tokens[1].col, format!("unknown macro function '{}'", tokens[1].text))
        })?;
        if tokens.len() - 2 != function.arity() {
            return Err(syntax(
                line,
                tokens[0].col,
                format!(
                    "{} takes {} nodes, got {}",
                    function.keyword(),
                    function.arity(),
                    tokens.len() - 2
                ),
            ));
        }
        let mut ports = Vec::new();
        for tok in &tokens[2..] {
            ports.push(node_name(tok, line)?);
        }
        self.cell_mut(line, tokens[0].col)?.macros.push(MacroStatement { id, function, ports });
        Ok(())
    }

    fn finish(self) -> Result<Netlist, NetlistError> {
        if let Some(cell) = &self.current {
            return Err(syntax(0, 0, format!(".subckt '{}' not closed by .ends", cell.name)));
        }
        let top = self.top.ok_or(NetlistError::NoTopCell)?;
        let netlist = Netlist {
            supply: self.supply.unwrap_or(DEFAULT_SUPPLY),
            subcircuits: self.subcircuits,
            top,
        };
        check_references(&netlist)?;
        Ok(netlist)
    }
}

/// Structural validation: every reference resolves, port counts match,
/// and the instantiation graph is acyclic.
fn check_references(netlist: &Netlist) -> Result<(), NetlistError> {
    let index: HashMap<&str, &Subcircuit> =
        netlist.subcircuits.iter().map(|s| (s.name.as_str(), s)).collect();
    if !index.contains_key(netlist.top.as_str()) {
        return Err(NetlistError::UnresolvedReference { name: netlist.top.clone() });
    }
    for sub in &netlist.subcircuits {
        for inst in &sub.instances {
            let target = index.get(inst.subckt.as_str()).ok_or_else(|| {
                NetlistError::UnresolvedReference { name: inst.subckt.clone() }
            })?;
            if target.ports.len() != inst.bindings.len() {
                return Err(NetlistError::PortCountMismatch {
                    instance: inst.id.clone(),
                    subckt: inst.subckt.clone(),
                    got: inst.bindings.len(),
                    expected: target.ports.len(),
                });
            }
        }
    }
    // DFS over the instantiation graph; 0 = unvisited, 1 = on stack, 2 = done.
    let mut state: HashMap<&str, u8> = HashMap::new();
    fn visit<'a>(
        name: &'a str,
        index: &HashMap<&'a str, &'a Subcircuit>,
        state: &mut HashMap<&'a str, u8>,
    ) -> Result<(), NetlistError> {
        match state.get(name) {
            Some(1) => return Err(NetlistError::InstantiationCycle { name: name.to_string() }),
            Some(2) => return Ok(()),
            _ => {}
        }
        state.insert(name, 1);
        for inst in &index[name].instances {
            visit(inst.subckt.as_str(), index, state)?;
        }
        state.insert(name, 2);
        Ok(())
    }
    for sub in &netlist.subcircuits {
        visit(sub.name.as_str(), &index, &mut state)?;
    }
    Ok(())
}

/// Parses netlist text into a structurally valid [`Netlist`].
pub fn parse_netlist(text: &str) -> Result<Netlist, NetlistError> {
    let mut parser = Parser::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let head = tokens[0].text;
        if head.starts_with('.') {
            parser.directive(&tokens, line)?;
        } else if head.starts_with('M') {
            parser.device(&tokens, line)?;
        } else if head.starts_with('X') {
            parser.instance(&tokens, line)?;
        } else if head.starts_with('B') {
            parser.behavioral(&tokens, line)?;
        } else {
            return Err(syntax(line, tokens[0].col, format!("unrecognized statement '{head}'")));
        }
    }
    parser.finish()
}
