//! Decides first-order formulas over a homogeneous atom structure.
//!
//! A quantifier `Q v. body` only needs to range over one atom per 1-type over
//! the atoms the body can see (the values of its free variables and its
//! parameters); [`AtomStructure::extension_candidates`] supplies exactly such
//! a set. Formulas are miniscoped first, and a quantified variable that a
//! guarding conjunct equates with an already known term is not enumerated.

use std::collections::BTreeSet;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::formula::{miniscope, Formula, Rel, Term, Var};

use super::AtomStructure;

#[derive(Debug, Clone)]
enum Arg {
    Slot(usize),
    Atom(Atom),
}

#[derive(Debug)]
enum Node {
    Const(bool),
    Rel(Rel, Vec<Arg>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Quant {
        exists: bool,
        slot: usize,
        forced: Option<Arg>,
        deps: Vec<usize>,
        consts: Vec<Atom>,
        body: Box<Node>,
    },
}

struct Compiler {
    scope: Vec<(Var, usize)>,
    slots: usize,
}

struct Compiled {
    node: Node,
    free: BTreeSet<usize>,
    consts: BTreeSet<Atom>,
}

impl Compiler {
    fn lookup(&self, v: &Var) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| Error::Valuation(v.name().to_string()))
    }

    fn arg(&self, t: &Term) -> Result<Arg> {
        Ok(match t {
            Term::Var(v) => Arg::Slot(self.lookup(v)?),
            Term::Atom(a) => Arg::Atom(*a),
        })
    }

    fn forced_arg(&self, v: &Var, guard: &Formula) -> Option<Arg> {
        for c in guard.conjuncts() {
            if let Formula::Rel(Rel::Eq, args) = c {
                let other = match (&args[0], &args[1]) {
                    (Term::Var(x), t) if x == v => t,
                    (t, Term::Var(x)) if x == v => t,
                    _ => continue,
                };
                if let Ok(arg) = self.arg(other) {
                    return Some(arg);
                }
            }
        }
        None
    }

    fn compile(&mut self, f: &Formula) -> Result<Compiled> {
        let leaf = |node| Compiled {
            node,
            free: BTreeSet::new(),
            consts: BTreeSet::new(),
        };
        Ok(match f {
            Formula::True => leaf(Node::Const(true)),
            Formula::False => leaf(Node::Const(false)),
            Formula::Rel(r, terms) => {
                let mut free = BTreeSet::new();
                let mut consts = BTreeSet::new();
                let mut args = Vec::with_capacity(terms.len());
                for t in terms {
                    let a = self.arg(t)?;
                    match &a {
                        Arg::Slot(s) => {
                            free.insert(*s);
                        }
                        Arg::Atom(x) => {
                            consts.insert(*x);
                        }
                    }
                    args.push(a);
                }
                Compiled {
                    node: Node::Rel(*r, args),
                    free,
                    consts,
                }
            }
            Formula::Not(g) => {
                let c = self.compile(g)?;
                Compiled {
                    node: Node::Not(Box::new(c.node)),
                    ..c
                }
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let mut free = BTreeSet::new();
                let mut consts = BTreeSet::new();
                let mut nodes = Vec::with_capacity(gs.len());
                for g in gs {
                    let c = self.compile(g)?;
                    free.extend(c.free);
                    consts.extend(c.consts);
                    nodes.push(c.node);
                }
                let node = if matches!(f, Formula::And(_)) {
                    Node::And(nodes)
                } else {
                    Node::Or(nodes)
                };
                Compiled { node, free, consts }
            }
            Formula::Implies(a, b) => {
                let a = self.compile(a)?;
                let b = self.compile(b)?;
                let mut free = a.free;
                free.extend(b.free);
                let mut consts = a.consts;
                consts.extend(b.consts);
                Compiled {
                    node: Node::Implies(Box::new(a.node), Box::new(b.node)),
                    free,
                    consts,
                }
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let exists = matches!(f, Formula::Exists(..));
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), slot));
                let guard = match (exists, body.as_ref()) {
                    (true, b) => Some(b),
                    (false, Formula::Implies(a, _)) => Some(a.as_ref()),
                    _ => None,
                };
                let forced = guard.and_then(|g| {
                    // Only terms bound outside this quantifier can force it.
                    let saved = self.scope.pop();
                    let r = self.forced_arg(v, g);
                    self.scope.extend(saved);
                    r
                });
                let c = self.compile(body)?;
                self.scope.pop();
                let mut free = c.free;
                free.remove(&slot);
                Compiled {
                    node: Node::Quant {
                        exists,
                        slot,
                        forced,
                        deps: free.iter().copied().collect(),
                        consts: c.consts.iter().copied().collect(),
                        body: Box::new(c.node),
                    },
                    free,
                    consts: c.consts,
                }
            }
        })
    }
}

/// A formula prepared for repeated evaluation under different valuations of
/// the listed free variables.
pub(crate) struct Prepared {
    node: Node,
    slots: usize,
}

impl Prepared {
    pub(crate) fn new(f: &Formula, free: &[Var]) -> Result<Prepared> {
        let f = miniscope(f);
        let mut c = Compiler {
            scope: free.iter().cloned().zip(0..).collect(),
            slots: free.len(),
        };
        let compiled = c.compile(&f)?;
        Ok(Prepared {
            node: compiled.node,
            slots: c.slots,
        })
    }

    /// `values[i]` is the value of the i-th variable given to [`Prepared::new`].
    pub(crate) fn eval(&self, st: &dyn AtomStructure, values: &[Atom]) -> bool {
        let mut env = vec![Atom::Id(u64::MAX); self.slots];
        env[..values.len()].copy_from_slice(values);
        eval(st, &self.node, &mut env)
    }
}

fn value(arg: &Arg, env: &[Atom]) -> Atom {
    match arg {
        Arg::Slot(s) => env[*s],
        Arg::Atom(a) => *a,
    }
}

fn eval(st: &dyn AtomStructure, node: &Node, env: &mut Vec<Atom>) -> bool {
    match node {
        Node::Const(b) => *b,
        Node::Rel(r, args) => {
            let vals: Vec<Atom> = args.iter().map(|a| value(a, env)).collect();
            st.holds(*r, &vals)
        }
        Node::Not(n) => !eval(st, n, env),
        Node::And(ns) => ns.iter().all(|n| eval(st, n, env)),
        Node::Or(ns) => ns.iter().any(|n| eval(st, n, env)),
        Node::Implies(a, b) => !eval(st, a, env) || eval(st, b, env),
        Node::Quant {
            exists,
            slot,
            forced,
            deps,
            consts,
            body,
        } => {
            if let Some(arg) = forced {
                env[*slot] = value(arg, env);
                return eval(st, body, env);
            }
            let mut known: Vec<Atom> = deps.iter().map(|s| env[*s]).chain(consts.iter().copied()).collect();
            known.sort();
            known.dedup();
            for c in st.extension_candidates(&known) {
                env[*slot] = c;
                if eval(st, body, env) == *exists {
                    return *exists;
                }
            }
            !*exists
        }
    }
}
