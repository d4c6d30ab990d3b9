use std::fmt;

use super::{Comp, Expr};
use crate::formula::Formula;

fn is_plain(c: &Comp) -> bool {
    c.binders.is_empty() && c.guard == Formula::True
}

pub(super) fn fmt_comp(c: &Comp, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_plain(c) {
        return write!(f, "{{{}}}", c.elem);
    }
    write!(f, "{{{} | ", c.elem)?;
    if !c.binders.is_empty() {
        for (i, b) in c.binders.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(" in atoms")?;
        if c.guard != Formula::True {
            f.write_str(", ")?;
        }
    }
    if c.guard != Formula::True || c.binders.is_empty() {
        write!(f, "{}", c.guard)?;
    }
    f.write_str("}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Atoms => f.write_str("atoms"),
            Expr::Tuple(items) => {
                f.write_str("(")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            Expr::Union(cs) if cs.is_empty() => f.write_str("empty"),
            Expr::Union(cs) => {
                let mut i = 0;
                let mut first = true;
                while i < cs.len() {
                    if !first {
                        f.write_str(" + ")?;
                    }
                    first = false;
                    if is_plain(&cs[i]) {
                        let mut j = i;
                        f.write_str("{")?;
                        while j < cs.len() && is_plain(&cs[j]) {
                            if j > i {
                                f.write_str(", ")?;
                            }
                            write!(f, "{}", cs[j].elem)?;
                            j += 1;
                        }
                        f.write_str("}")?;
                        i = j;
                    } else {
                        fmt_comp(&cs[i], f)?;
                        i += 1;
                    }
                }
                Ok(())
            }
        }
    }
}
