//! Reader for the discrete subset of the BIF interchange format.
//!
//! Supported: `network` blocks (contents ignored), `variable` blocks with
//! `type discrete [ k ] { s1, ..., sk };` and `property` lines, and `probability`
//! blocks using either `table` rows or `(parent values) p1, ..., pk;` entries.
//! A `table` for a variable with parents lists child values outermost, following
//! the JavaBayes convention.

use std::collections::HashMap;

use super::network::{Network, Variable};
use super::params::{FamilyTable, Parameterization};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Punct(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::parse("<bif>", line, msg)
}

impl Lexer {
    fn new(text: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let mut line = 1;
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '\n' => line += 1,
                c if c.is_whitespace() => {}
                '/' if chars.peek() == Some(&'/') => {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            line += 1;
                            break;
                        }
                    }
                }
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    let start = line;
                    let mut prev = ' ';
                    let mut closed = false;
                    for c in chars.by_ref() {
                        if c == '\n' {
                            line += 1;
                        }
                        if prev == '*' && c == '/' {
                            closed = true;
                            break;
                        }
                        prev = c;
                    }
                    if !closed {
                        return Err(perr(start, "unterminated comment"));
                    }
                }
                '{' | '}' | '(' | ')' | '[' | ']' | ';' | ',' | '|' => toks.push((Tok::Punct(c), line)),
                '"' => {
                    let mut s = String::new();
                    let start = line;
                    let mut closed = false;
                    for c in chars.by_ref() {
                        if c == '"' {
                            closed = true;
                            break;
                        }
                        if c == '\n' {
                            line += 1;
                        }
                        s.push(c);
                    }
                    if !closed {
                        return Err(perr(start, "unterminated string"));
                    }
                    toks.push((Tok::Word(s), start));
                }
                _ => {
                    let mut s = String::from(c);
                    while let Some(&n) = chars.peek() {
                        if n.is_whitespace() || "{}()[];,|\"".contains(n) {
                            break;
                        }
                        s.push(n);
                        chars.next();
                    }
                    toks.push((Tok::Word(s), line));
                }
            }
        }
        Ok(Lexer { toks, pos: 0 })
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.1)
            .unwrap_or(1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Result<Tok> {
        let line = self.line();
        let t = self
            .toks
            .get(self.pos)
            .ok_or_else(|| perr(line, "unexpected end of file"))?;
        self.pos += 1;
        Ok(t.0.clone())
    }

    fn word(&mut self) -> Result<String> {
        let line = self.line();
        match self.next()? {
            Tok::Word(w) => Ok(w),
            Tok::Punct(p) => Err(perr(line, format!("expected a name, found '{p}'"))),
        }
    }

    fn expect(&mut self, p: char) -> Result<()> {
        let line = self.line();
        match self.next()? {
            Tok::Punct(q) if q == p => Ok(()),
            other => Err(perr(line, format!("expected '{p}', found {other:?}"))),
        }
    }

    fn eat(&mut self, p: char) -> bool {
        if self.peek() == Some(&Tok::Punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        let line = self.line();
        let w = self.word()?;
        w.parse()
            .map_err(|_| perr(line, format!("expected a number, found {w}")))
    }

    /// Skips a balanced `{ ... }` block.
    fn skip_block(&mut self) -> Result<()> {
        self.expect('{')?;
        let mut depth = 1;
        while depth > 0 {
            match self.next()? {
                Tok::Punct('{') => depth += 1,
                Tok::Punct('}') => depth -= 1,
                _ => {}
            }
        }
        Ok(())
    }

    /// Skips tokens up to and including the next `;`.
    fn skip_statement(&mut self) -> Result<()> {
        while self.next()? != Tok::Punct(';') {}
        Ok(())
    }
}

struct Block {
    child: String,
    parents: Vec<String>,
    line: usize,
    table: Option<Vec<f64>>,
    rows: Vec<(Vec<String>, Vec<f64>, usize)>,
}

fn parse_numbers(lx: &mut Lexer) -> Result<Vec<f64>> {
    let mut values = vec![lx.number()?];
    while lx.eat(',') {
        values.push(lx.number()?);
    }
    lx.expect(';')?;
    Ok(values)
}

pub fn parse_bif(text: &str) -> Result<(Network, Parameterization)> {
    let mut lx = Lexer::new(text)?;
    let mut name = String::new();
    let mut variables: Vec<(Variable, usize)> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();

    while lx.peek().is_some() {
        let line = lx.line();
        let kw = lx.word()?;
        match kw.as_str() {
            "network" => {
                name = lx.word()?;
                lx.skip_block()?;
            }
            "variable" => {
                let var_name = lx.word()?;
                lx.expect('{')?;
                let mut states = None;
                while !lx.eat('}') {
                    let inner_line = lx.line();
                    match lx.word()?.as_str() {
                        "type" => {
                            let kind = lx.word()?;
                            if kind != "discrete" {
                                return Err(perr(inner_line, format!("unsupported variable type {kind}")));
                            }
                            lx.expect('[')?;
                            let k = lx.number()?;
                            lx.expect(']')?;
                            lx.expect('{')?;
                            let mut labels = vec![lx.word()?];
                            while lx.eat(',') {
                                labels.push(lx.word()?);
                            }
                            lx.expect('}')?;
                            lx.expect(';')?;
                            if k != labels.len() as f64 {
                                return Err(perr(
                                    inner_line,
                                    format!("{var_name} declares {k} states but lists {}", labels.len()),
                                ));
                            }
                            states = Some(labels);
                        }
                        _ => lx.skip_statement()?,
                    }
                }
                let states = states.ok_or_else(|| perr(line, format!("variable {var_name} has no type")))?;
                let var = Variable::new(var_name, states).map_err(|e| perr(line, e.to_string()))?;
                variables.push((var, line));
            }
            "probability" => {
                lx.expect('(')?;
                let child = lx.word()?;
                let mut parents = Vec::new();
                if lx.eat('|') {
                    parents.push(lx.word()?);
                    while lx.eat(',') {
                        parents.push(lx.word()?);
                    }
                }
                lx.expect(')')?;
                lx.expect('{')?;
                let mut block = Block {
                    child,
                    parents,
                    line,
                    table: None,
                    rows: Vec::new(),
                };
                while !lx.eat('}') {
                    let entry_line = lx.line();
                    if lx.eat('(') {
                        let mut config = vec![lx.word()?];
                        while lx.eat(',') {
                            config.push(lx.word()?);
                        }
                        lx.expect(')')?;
                        block.rows.push((config, parse_numbers(&mut lx)?, entry_line));
                    } else {
                        match lx.word()?.as_str() {
                            "table" => block.table = Some(parse_numbers(&mut lx)?),
                            "default" => return Err(perr(entry_line, "'default' entries are not supported")),
                            _ => lx.skip_statement()?,
                        }
                    }
                }
                blocks.push(block);
            }
            other => return Err(perr(line, format!("unexpected keyword {other}"))),
        }
    }

    let index: HashMap<String, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v.name().to_string(), i))
        .collect();
    let mut parents: Vec<Option<Vec<usize>>> = vec![None; variables.len()];
    let mut block_of = vec![None; variables.len()];
    for (b, block) in blocks.iter().enumerate() {
        let child = *index
            .get(&block.child)
            .ok_or_else(|| perr(block.line, format!("unknown variable {}", block.child)))?;
        if parents[child].is_some() {
            return Err(perr(
                block.line,
                format!("second probability block for {}", block.child),
            ));
        }
        let ps = block
            .parents
            .iter()
            .map(|p| {
                index
                    .get(p)
                    .copied()
                    .ok_or_else(|| perr(block.line, format!("unknown parent {p}")))
            })
            .collect::<Result<Vec<_>>>()?;
        parents[child] = Some(ps);
        block_of[child] = Some(b);
    }
    let parents: Vec<Vec<usize>> = parents
        .into_iter()
        .zip(&variables)
        .map(|(p, (v, line))| p.ok_or_else(|| perr(*line, format!("no probability block for {}", v.name()))))
        .collect::<Result<_>>()?;
    let network = Network::new(name, variables.into_iter().map(|(v, _)| v).collect(), parents)?;

    let mut tables = Vec::with_capacity(network.len());
    for v in 0..network.len() {
        let block = &blocks[block_of[v].expect("every variable has a block")];
        let k = network.cardinality(v);
        let rows = network.num_parent_configs(v);
        let mut table = FamilyTable::filled(rows, k, f64::NAN);
        if let Some(values) = &block.table {
            if values.len() != rows * k {
                return Err(perr(
                    block.line,
                    format!(
                        "table for {} has {} entries, expected {}",
                        block.child,
                        values.len(),
                        rows * k
                    ),
                ));
            }
            for x in 0..k {
                for u in 0..rows {
                    table.row_mut(u)[x] = values[x * rows + u];
                }
            }
        }
        for (config, values, line) in &block.rows {
            let ps = network.parents(v);
            if config.len() != ps.len() || values.len() != k {
                return Err(perr(*line, format!("malformed entry for {}", block.child)));
            }
            let mut u = 0;
            for (label, &p) in config.iter().zip(ps) {
                let s = network.variable(p).state_index(label).ok_or_else(|| {
                    perr(
                        *line,
                        format!("unknown state {label} of {}", network.variable(p).name()),
                    )
                })?;
                u = u * network.cardinality(p) + s;
            }
            table.row_mut(u).copy_from_slice(values);
        }
        if let Some(u) = table.rows().position(|r| r.iter().any(|p| p.is_nan())) {
            return Err(perr(
                block.line,
                format!("{} has no entry for parent instantiation #{u}", block.child),
            ));
        }
        tables.push(table);
    }
    Ok((network, Parameterization::from_tables(tables)))
}
