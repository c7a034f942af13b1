//! The line-oriented scenario specification language.
//!
//! A scenario names a ring construction, one derivation per indeterminate,
//! a command, and optional bounds:
//!
//! ```text
//! ring triangular 2 (gf 2)
//! derivation inner e12
//! command maxideals dmax=2
//! ```
//!
//! Parsing either yields a [`ScenarioSpec`] or a positioned diagnostic with
//! the expected-token set. Semantic checks (label resolution, derivation
//! laws) happen when the scenario is built against the constructed ring.

use qduo_core::derivation::{inner_derivation, validate_derivation, zero_derivation, Derivation};
use qduo_core::multivar::ComplementConvention;
use qduo_core::ring::{make_ring, Elem, FiniteRing, RingRecipe};
use qduo_core::Limits;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Radical,
    MaxIdeals,
    Verify,
    Multivar,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Analyze => "analyze",
            Command::Radical => "radical",
            Command::MaxIdeals => "maxideals",
            Command::Verify => "verify",
            Command::Multivar => "multivar",
        };
        write!(f, "{name}")
    }
}

/// How a derivation is specified before the ring exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivSpec {
    Zero,
    Inner(String),
    Table(Vec<(String, String)>),
}

impl fmt::Display for DerivSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivSpec::Zero => write!(f, "zero"),
            DerivSpec::Inner(label) => write!(f, "inner {label}"),
            DerivSpec::Table(pairs) => {
                let body: Vec<String> =
                    pairs.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
                write!(f, "table ({})", body.join(", "))
            }
        }
    }
}

/// A parsed scenario document.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub ring: RingRecipe,
    pub derivations: Vec<DerivSpec>,
    pub vars: Option<usize>,
    pub command: Command,
    pub dmax: Option<usize>,
    pub order_cap: Option<usize>,
    pub corner: Option<Vec<usize>>,
    pub convention: ComplementConvention,
}

/// A syntax diagnostic with position and expectation set.
#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, col {}: expected {}, found {}",
            self.line,
            self.col,
            self.expected.join(" | "),
            self.found
        )
    }
}

// ---- tokenizer ----

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Eq,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("'{a}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::Eq => "'='".into(),
            Tok::Arrow => "'->'".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    col: usize,
}

fn tokenize_line(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push(Spanned { tok: Tok::LParen, col }),
            ')' => out.push(Spanned { tok: Tok::RParen, col }),
            '[' => out.push(Spanned { tok: Tok::LBracket, col }),
            ']' => out.push(Spanned { tok: Tok::RBracket, col }),
            '{' => out.push(Spanned { tok: Tok::LBrace, col }),
            '}' => out.push(Spanned { tok: Tok::RBrace, col }),
            ',' => out.push(Spanned { tok: Tok::Comma, col }),
            '=' => out.push(Spanned { tok: Tok::Eq, col }),
            '-' if bytes.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::Arrow, col });
                i += 2;
                continue;
            }
            _ => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i];
                    if c.is_whitespace() || "()[]{},=#".contains(c) {
                        break;
                    }
                    if c == '-' && bytes.get(i + 1) == Some(&'>') {
                        break;
                    }
                    i += 1;
                }
                let atom: String = bytes[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Atom(atom), col: start + 1 });
                continue;
            }
        }
        i += 1;
    }
    out
}

// ---- recursive-descent parser over one line ----

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    fn new(toks: Vec<Spanned>, line: usize, end_col: usize) -> Cursor {
        Cursor { toks, pos: 0, line, end_col }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let (col, found) = match self.toks.get(self.pos) {
            Some(s) => (s.col, s.tok.describe()),
            None => (self.end_col, "end of line".into()),
        };
        ParseError {
            line: self.line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn next(&mut self, expected: &[&str]) -> Result<Tok, ParseError> {
        match self.toks.get(self.pos) {
            Some(s) => {
                let t = s.tok.clone();
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.err(expected)),
        }
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), ParseError> {
        let t = self.next(&[expected])?;
        if t == want {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(&[expected]))
        }
    }

    fn atom(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.next(&[expected])? {
            Tok::Atom(a) => Ok(a),
            _ => {
                self.pos -= 1;
                Err(self.err(&[expected]))
            }
        }
    }

    fn int(&mut self, expected: &str) -> Result<u64, ParseError> {
        let a = self.atom(expected)?;
        a.parse::<u64>().map_err(|_| {
            self.pos -= 1;
            self.err(&[expected])
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err(&["end of line"]))
        }
    }
}

fn parse_ring_expr(c: &mut Cursor) -> Result<RingRecipe, ParseError> {
    const HEADS: &[&str] = &["zmod", "gf", "matrix", "triangular", "product", "quotient", "table"];
    let head = c.atom("ring constructor")?;
    match head.as_str() {
        "zmod" => Ok(RingRecipe::ZMod(c.int("modulus")?)),
        "gf" => {
            let p = c.int("prime")?;
            // optional extension degree, then optional explicit modulus
            let mut k = 1u32;
            if let Some(Tok::Atom(a)) = c.peek() {
                if a.parse::<u64>().is_ok() {
                    k = c.int("extension degree")? as u32;
                }
            }
            let modulus = if c.peek() == Some(&Tok::LBracket) {
                c.expect(Tok::LBracket, "'['")?;
                let mut coeffs = vec![c.int("coefficient")?];
                while c.peek() == Some(&Tok::Comma) {
                    c.expect(Tok::Comma, "','")?;
                    coeffs.push(c.int("coefficient")?);
                }
                c.expect(Tok::RBracket, "']'")?;
                Some(coeffs)
            } else {
                None
            };
            match modulus {
                Some(m) => {
                    let k = (m.len().max(1) - 1) as u32;
                    Ok(RingRecipe::PolyQuot { p, k, modulus: Some(m) })
                }
                None => Ok(RingRecipe::PolyQuot { p, k, modulus: None }),
            }
        }
        "matrix" | "triangular" => {
            let n = c.int("dimension")? as u32;
            c.expect(Tok::LParen, "'('")?;
            let base = parse_ring_expr(c)?;
            c.expect(Tok::RParen, "')'")?;
            if head == "matrix" {
                Ok(RingRecipe::matrix(n, base))
            } else {
                Ok(RingRecipe::triangular(n, base))
            }
        }
        "product" => {
            c.expect(Tok::LParen, "'('")?;
            let a = parse_ring_expr(c)?;
            c.expect(Tok::RParen, "')'")?;
            c.expect(Tok::LParen, "'('")?;
            let b = parse_ring_expr(c)?;
            c.expect(Tok::RParen, "')'")?;
            Ok(RingRecipe::product(a, b))
        }
        "quotient" => {
            c.expect(Tok::LParen, "'('")?;
            let base = parse_ring_expr(c)?;
            c.expect(Tok::RParen, "')'")?;
            c.expect(Tok::LBrace, "'{'")?;
            let mut gens = vec![c.atom("generator label")?];
            while c.peek() == Some(&Tok::Comma) {
                c.expect(Tok::Comma, "','")?;
                gens.push(c.atom("generator label")?);
            }
            c.expect(Tok::RBrace, "'}'")?;
            Ok(RingRecipe::quotient(base, gens))
        }
        "table" => {
            let order = c.int("order")? as usize;
            c.expect(Tok::Atom("add".into()), "'add'")?;
            let add = parse_rows(c, order)?;
            c.expect(Tok::Atom("mul".into()), "'mul'")?;
            let mul = parse_rows(c, order)?;
            Ok(RingRecipe::RawTables { order, add, mul })
        }
        _ => {
            c.pos -= 1;
            Err(c.err(HEADS))
        }
    }
}

fn parse_rows(c: &mut Cursor, order: usize) -> Result<Vec<u16>, ParseError> {
    c.expect(Tok::LBracket, "'['")?;
    let mut out = Vec::with_capacity(order * order);
    for r in 0..order {
        if r > 0 {
            c.expect(Tok::Comma, "','")?;
        }
        c.expect(Tok::LBracket, "'['")?;
        for j in 0..order {
            if j > 0 {
                c.expect(Tok::Comma, "','")?;
            }
            out.push(c.int("table entry")? as u16);
        }
        c.expect(Tok::RBracket, "']'")?;
    }
    c.expect(Tok::RBracket, "']'")?;
    Ok(out)
}

fn parse_deriv_expr(c: &mut Cursor) -> Result<DerivSpec, ParseError> {
    let head = c.atom("derivation kind")?;
    match head.as_str() {
        "zero" => Ok(DerivSpec::Zero),
        "inner" => Ok(DerivSpec::Inner(c.atom("element label")?)),
        "table" => {
            c.expect(Tok::LParen, "'('")?;
            let mut pairs = Vec::new();
            loop {
                let from = c.atom("element label")?;
                c.expect(Tok::Arrow, "'->'")?;
                let to = c.atom("element label")?;
                pairs.push((from, to));
                if c.peek() == Some(&Tok::Comma) {
                    c.expect(Tok::Comma, "','")?;
                } else {
                    break;
                }
            }
            c.expect(Tok::RParen, "')'")?;
            Ok(DerivSpec::Table(pairs))
        }
        _ => {
            c.pos -= 1;
            Err(c.err(&["zero", "inner", "table"]))
        }
    }
}

#[derive(Debug, Default)]
struct Opts {
    dmax: Option<usize>,
    order_cap: Option<usize>,
    corner: Option<Vec<usize>>,
    convention: Option<ComplementConvention>,
}

fn parse_opts(c: &mut Cursor, opts: &mut Opts) -> Result<(), ParseError> {
    while !c.at_end() {
        let key = c.atom("option name")?;
        c.expect(Tok::Eq, "'='")?;
        match key.as_str() {
            "dmax" => opts.dmax = Some(c.int("degree bound")? as usize),
            "order_cap" => opts.order_cap = Some(c.int("order cap")? as usize),
            "corner" => {
                let mut list = vec![c.int("variable index")? as usize];
                while c.peek() == Some(&Tok::Comma) {
                    c.expect(Tok::Comma, "','")?;
                    list.push(c.int("variable index")? as usize);
                }
                opts.corner = Some(list);
            }
            "convention" => {
                let v = c.atom("'corrected' | 'literal'")?;
                opts.convention = Some(match v.as_str() {
                    "corrected" => ComplementConvention::ConstantsInSubring,
                    "literal" => ComplementConvention::Literal,
                    _ => {
                        c.pos -= 1;
                        return Err(c.err(&["corrected", "literal"]));
                    }
                });
            }
            _ => {
                c.pos -= 2;
                return Err(c.err(&["dmax", "order_cap", "corner", "convention"]));
            }
        }
    }
    Ok(())
}

/// Parses a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ParseError> {
    let mut ring: Option<RingRecipe> = None;
    let mut derivations: Vec<DerivSpec> = Vec::new();
    let mut vars: Option<usize> = None;
    let mut command: Option<Command> = None;
    let mut opts = Opts::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize_line(raw);
        if toks.is_empty() {
            continue;
        }
        let end_col = raw.chars().count() + 1;
        let mut c = Cursor::new(toks, line_no, end_col);
        let head = c.atom("'ring' | 'vars' | 'derivation' | 'command' | 'bounds'")?;
        match head.as_str() {
            "ring" => {
                if ring.is_some() {
                    c.pos -= 1;
                    return Err(c.err(&["a single ring declaration"]));
                }
                ring = Some(parse_ring_expr(&mut c)?);
            }
            "vars" => {
                let m = c.int("indeterminate count")? as usize;
                if m == 0 {
                    c.pos -= 1;
                    return Err(c.err(&["a positive indeterminate count"]));
                }
                vars = Some(m);
            }
            "derivation" => derivations.push(parse_deriv_expr(&mut c)?),
            "command" => {
                let name = c.atom("command name")?;
                command = Some(match name.as_str() {
                    "analyze" => Command::Analyze,
                    "radical" => Command::Radical,
                    "maxideals" => Command::MaxIdeals,
                    "verify" => Command::Verify,
                    "multivar" => Command::Multivar,
                    _ => {
                        c.pos -= 1;
                        return Err(c.err(&[
                            "analyze",
                            "radical",
                            "maxideals",
                            "verify",
                            "multivar",
                        ]));
                    }
                });
                parse_opts(&mut c, &mut opts)?;
            }
            "bounds" => parse_opts(&mut c, &mut opts)?,
            _ => {
                c.pos -= 1;
                return Err(c.err(&["ring", "vars", "derivation", "command", "bounds"]));
            }
        }
        c.expect_end()?;
    }

    let last_line = text.lines().count().max(1);
    let missing = |what: &str| ParseError {
        line: last_line,
        col: 1,
        expected: vec![what.to_string()],
        found: "end of document".into(),
    };
    let ring = ring.ok_or_else(|| missing("a 'ring' declaration"))?;
    if derivations.is_empty() {
        return Err(missing("a 'derivation' declaration"));
    }
    let command = command.ok_or_else(|| missing("a 'command' declaration"))?;

    Ok(ScenarioSpec {
        ring,
        derivations,
        vars,
        command,
        dmax: opts.dmax,
        order_cap: opts.order_cap,
        corner: opts.corner,
        convention: opts.convention.unwrap_or_default(),
    })
}

/// A scenario resolved against a constructed ring.
#[derive(Debug)]
pub struct BuiltScenario {
    pub spec: ScenarioSpec,
    pub ring: Arc<FiniteRing>,
    pub derivations: Vec<Derivation>,
    pub limits: Limits,
    pub dmax: usize,
}

/// Semantic errors carry plain messages (the parser owns positions).
pub fn build_scenario(
    spec: ScenarioSpec,
    default_dmax: usize,
    default_order_cap: usize,
) -> Result<BuiltScenario, String> {
    let mut limits = Limits::with_order_cap(spec.order_cap.unwrap_or(default_order_cap));
    let dmax = spec.dmax.unwrap_or(default_dmax);
    if dmax > limits.degree_cap {
        limits.degree_cap = dmax;
    }
    if dmax > limits.corner_degree_cap {
        limits.corner_degree_cap = dmax;
    }

    let ring = make_ring(&spec.ring, &limits).map_err(|e| e.to_string())?;

    let vars = spec.vars.unwrap_or(1);
    if spec.command != Command::Multivar && vars != 1 {
        return Err(format!(
            "command {} requires a single indeterminate, but vars {vars} was given",
            spec.command
        ));
    }
    if spec.derivations.len() != 1 && spec.derivations.len() != vars {
        return Err(format!(
            "expected 1 or {vars} derivation declarations, found {}",
            spec.derivations.len()
        ));
    }
    if let Some(corner) = &spec.corner {
        for &i in corner {
            if i == 0 || i > vars {
                return Err(format!(
                    "corner index {i} out of range 1..={vars} (indices name x1, x2, ...)"
                ));
            }
        }
    }

    let mut derivations = Vec::new();
    for d in &spec.derivations {
        derivations.push(build_derivation(&ring, d)?);
    }
    if derivations.len() == 1 && vars > 1 {
        let d = derivations[0].clone();
        derivations = (0..vars).map(|_| d.clone()).collect();
    }

    Ok(BuiltScenario { spec, ring, derivations, limits, dmax })
}

fn build_derivation(ring: &Arc<FiniteRing>, spec: &DerivSpec) -> Result<Derivation, String> {
    match spec {
        DerivSpec::Zero => Ok(zero_derivation(ring)),
        DerivSpec::Inner(label) => {
            let a = ring.resolve(label).map_err(|e| e.to_string())?;
            Ok(inner_derivation(ring, a))
        }
        DerivSpec::Table(pairs) => {
            let mut image: Vec<Elem> = ring.elements().map(|_| ring.zero()).collect();
            for (from, to) in pairs {
                let f = ring.resolve(from).map_err(|e| e.to_string())?;
                let t = ring.resolve(to).map_err(|e| e.to_string())?;
                image[f.index()] = t;
            }
            validate_derivation(ring, image).map_err(|e| match e {
                qduo_core::Error::DerivationViolation { law, a, b } => format!(
                    "derivation table is not a derivation: {law} fails at ({}, {})",
                    ring.label(ring.element(a)),
                    ring.label(ring.element(b))
                ),
                other => other.to_string(),
            })
        }
    }
}
