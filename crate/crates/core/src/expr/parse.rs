use std::collections::BTreeSet;

use super::{Comp, Expr};
use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::formula::{Formula, Rel, Term, Var};
use crate::theory::Backend;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Bar,
    Plus,
    Dot,
    Eq,
    Neq,
    Lt,
    Le,
    Arrow,
    Ident(String),
    Atom(Atom),
    End,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

const KEYWORDS: &[&str] = &["atoms", "empty", "in", "and", "or", "not", "exists", "forall", "true", "false"];

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' && !next.is_some_and(|d| d.is_ascii_digit()) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let simple = match (c, next) {
            ('-', Some('>')) => Some((Tok::Arrow, 2)),
            ('!', Some('=')) => Some((Tok::Neq, 2)),
            ('<', Some('=')) => Some((Tok::Le, 2)),
            ('<', _) => Some((Tok::Lt, 1)),
            ('=', _) => Some((Tok::Eq, 1)),
            ('{', _) => Some((Tok::LBrace, 1)),
            ('}', _) => Some((Tok::RBrace, 1)),
            ('(', _) => Some((Tok::LParen, 1)),
            (')', _) => Some((Tok::RParen, 1)),
            (',', _) => Some((Tok::Comma, 1)),
            ('|', _) => Some((Tok::Bar, 1)),
            ('+', _) => Some((Tok::Plus, 1)),
            ('.', _) => Some((Tok::Dot, 1)),
            _ => None,
        };
        if let Some((tok, n)) = simple {
            out.push((tok, pos));
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        let start = i;
        if c == '#' || c == '-' || c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '/') {
                j += 1;
            }
            let lit: String = chars[start..j].iter().collect();
            let atom = lit.parse::<Atom>().map_err(|_| syntax(pos, format!("invalid atom literal `{lit}`")))?;
            out.push((Tok::Atom(atom), pos));
            advance(&mut i, &mut line, &mut col, j - start);
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            out.push((Tok::Ident(chars[start..j].iter().collect()), pos));
            advance(&mut i, &mut line, &mut col, j - start);
            continue;
        }
        return Err(syntax(pos, format!("unexpected character `{c}`")));
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

enum Raw {
    Atom(Atom),
    Var(Var),
    Atoms,
    Union(Vec<RawComp>),
    Tuple(Vec<Raw>),
}

struct RawComp {
    elem: Raw,
    /// `None` for `{ e | formula }`, whose binders are the variables not
    /// bound by an enclosing comprehension.
    binders: Option<Vec<(Var, Pos)>>,
    guard: Formula,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<(Var, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((Var::new(&s), pos))
            }
            t => Err(syntax(pos, format!("expected a variable, found {}", describe(&t)))),
        }
    }

    fn expr(&mut self) -> Result<Raw> {
        let pos = self.pos();
        let first = self.primary()?;
        if *self.peek() != Tok::Plus {
            return Ok(first);
        }
        let mut comps = Vec::new();
        let mut operand = first;
        let mut operand_pos = pos;
        loop {
            match operand {
                Raw::Union(cs) => comps.extend(cs),
                Raw::Atoms => {
                    let a = Var::fresh();
                    comps.push(RawComp {
                        elem: Raw::Var(a.clone()),
                        binders: Some(vec![(a, operand_pos)]),
                        guard: Formula::True,
                    });
                }
                _ => return Err(syntax(operand_pos, "operands of `+` must be sets")),
            }
            if !self.eat(&Tok::Plus) {
                break;
            }
            operand_pos = self.pos();
            operand = self.primary()?;
        }
        Ok(Raw::Union(comps))
    }

    fn primary(&mut self) -> Result<Raw> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Atom(a) => {
                self.bump();
                Ok(Raw::Atom(a))
            }
            Tok::Ident(s) if s == "atoms" => {
                self.bump();
                Ok(Raw::Atoms)
            }
            Tok::Ident(s) if s == "empty" => {
                self.bump();
                Ok(Raw::Union(Vec::new()))
            }
            Tok::Ident(_) => {
                Ok(Raw::Var(self.ident()?.0))
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(Raw::Tuple(items))
                }
            }
            Tok::LBrace => {
                self.bump();
                if self.eat(&Tok::RBrace) {
                    return Ok(Raw::Union(Vec::new()));
                }
                let elem = self.expr()?;
                if self.eat(&Tok::Bar) {
                    return self.comp_tail(elem);
                }
                let mut comps = vec![RawComp { elem, binders: Some(Vec::new()), guard: Formula::True }];
                while self.eat(&Tok::Comma) {
                    comps.push(RawComp { elem: self.expr()?, binders: Some(Vec::new()), guard: Formula::True });
                }
                self.expect(Tok::RBrace, "`,` or `}`")?;
                Ok(Raw::Union(comps))
            }
            t => Err(syntax(pos, format!("expected an expression, found {}", describe(&t)))),
        }
    }

    fn has_binder_list(&self) -> bool {
        let mut k = 0;
        loop {
            if !matches!(self.peek_at(k), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
                return false;
            }
            match self.peek_at(k + 1) {
                Tok::Comma => k += 2,
                Tok::Ident(s) => return s == "in",
                _ => return false,
            }
        }
    }

    fn comp_tail(&mut self, elem: Raw) -> Result<Raw> {
        let (binders, guard) = if self.has_binder_list() {
            let mut binders = vec![self.ident()?];
            while self.eat(&Tok::Comma) {
                binders.push(self.ident()?);
            }
            self.bump();
            if !self.is_keyword("atoms") {
                return Err(syntax(self.pos(), "expected `atoms` after `in`"));
            }
            self.bump();
            let guard = if self.eat(&Tok::Comma) { self.formula()? } else { Formula::True };
            (Some(binders), guard)
        } else {
            (None, self.formula()?)
        };
        self.expect(Tok::RBrace, "`}`")?;
        Ok(Raw::Union(vec![RawComp { elem, binders, guard }]))
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut items = vec![self.conjunction()?];
        while self.is_keyword("or") {
            self.bump();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::Or(items) })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut items = vec![self.unary()?];
        while self.is_keyword("and") {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Formula::And(items) })
    }

    fn unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if s == "not" => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::Ident(s) if s == "exists" || s == "forall" => {
                self.bump();
                let mut vars = vec![self.ident()?.0];
                while self.eat(&Tok::Comma) {
                    vars.push(self.ident()?.0);
                }
                self.expect(Tok::Dot, "`.`")?;
                let mut body = self.formula()?;
                for v in vars.into_iter().rev() {
                    body = if s == "exists" {
                        Formula::Exists(v, Box::new(body))
                    } else {
                        Formula::Forall(v, Box::new(body))
                    };
                }
                Ok(body)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(s) if s == "R" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let a = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let c = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Rel(Rel::Cyc, vec![a, b, c]))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(_) | Tok::Atom(_) => {
                let a = self.term()?;
                let pos = self.pos();
                let (rel, negated) = match self.bump() {
                    Tok::Eq => (Rel::Eq, false),
                    Tok::Neq => (Rel::Eq, true),
                    Tok::Lt => (Rel::Lt, false),
                    Tok::Le => (Rel::Le, false),
                    t => return Err(syntax(pos, format!("expected a relation, found {}", describe(&t)))),
                };
                let b = self.term()?;
                let f = Formula::Rel(rel, vec![a, b]);
                Ok(if negated { Formula::Not(Box::new(f)) } else { f })
            }
            t => Err(syntax(pos, format!("expected a formula, found {}", describe(&t)))),
        }
    }

    fn term(&mut self) -> Result<Term> {
        if let Tok::Atom(a) = self.peek().clone() {
            self.bump();
            return Ok(Term::Atom(a));
        }
        Ok(Term::Var(self.ident()?.0))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Neq => "`!=`".into(),
        Tok::Lt => "`<`".into(),
        Tok::Le => "`<=`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Atom(a) => format!("`{a}`"),
        Tok::End => "end of input".into(),
    }
}

fn push_free(f: &Formula, scope: &[Var], out: &mut Vec<Var>) {
    for v in f.free_vars() {
        if !scope.contains(&v) && !out.contains(&v) {
            out.push(v);
        }
    }
}

fn raw_free(r: &Raw, scope: &mut Vec<Var>, out: &mut Vec<Var>) {
    match r {
        Raw::Var(v) => {
            if !scope.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        Raw::Atom(_) | Raw::Atoms => {}
        Raw::Tuple(items) => items.iter().for_each(|e| raw_free(e, scope, out)),
        Raw::Union(cs) => {
            for c in cs {
                let n = scope.len();
                match &c.binders {
                    Some(bs) => scope.extend(bs.iter().map(|(v, _)| v.clone())),
                    None => {
                        // implicit binders bind everything free inside
                        let mut inner = Vec::new();
                        raw_free(&c.elem, scope, &mut inner);
                        push_free(&c.guard, scope, &mut inner);
                        scope.extend(inner);
                    }
                }
                raw_free(&c.elem, scope, out);
                push_free(&c.guard, scope, out);
                scope.truncate(n);
            }
        }
    }
}

fn resolve(r: Raw, scope: &mut Vec<Var>) -> Result<Expr> {
    Ok(match r {
        Raw::Atom(a) => Expr::Atom(a),
        Raw::Atoms => Expr::Atoms,
        Raw::Var(v) => {
            if !scope.contains(&v) {
                return Err(Error::UnboundVariable(v.name().into()));
            }
            Expr::Var(v)
        }
        Raw::Tuple(items) => Expr::Tuple(items.into_iter().map(|e| resolve(e, scope)).collect::<Result<_>>()?),
        Raw::Union(cs) => {
            let mut out = Vec::with_capacity(cs.len());
            for c in cs {
                let binders: Vec<Var> = match c.binders {
                    Some(bs) => {
                        let mut seen = BTreeSet::new();
                        for (v, _) in &bs {
                            if !seen.insert(v.clone()) {
                                return Err(Error::DuplicateBinder(v.name().into()));
                            }
                        }
                        bs.into_iter().map(|(v, _)| v).collect()
                    }
                    None => {
                        let mut inner = Vec::new();
                        raw_free(&c.elem, scope, &mut inner);
                        push_free(&c.guard, scope, &mut inner);
                        inner
                    }
                };
                let n = scope.len();
                scope.extend(binders.iter().cloned());
                let elem = resolve(c.elem, scope);
                let unbound = c.guard.free_vars().into_iter().find(|v| !scope.contains(v));
                scope.truncate(n);
                if let Some(v) = unbound {
                    return Err(Error::UnboundVariable(v.name().into()));
                }
                out.push(Comp { elem: elem?, binders, guard: c.guard });
            }
            Expr::Union(out)
        }
    })
}

/// Parses a closed expression.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let raw = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), format!("unexpected {}", describe(p.peek()))));
    }
    resolve(raw, &mut Vec::new())
}

/// Parses a closed expression and checks it against the vocabulary and atom
/// domain of `backend`.
pub fn parse_for(backend: Backend, text: &str) -> Result<Expr> {
    let e = parse(text)?;
    e.check_backend(backend)?;
    Ok(e)
}

/// Parses a guard-style formula.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(f)
}
