use super::*;
use crate::formula::Formula;

fn p(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn equal(b: Backend, x: &Expr, y: &Expr) -> bool {
    b.holds(&eq_formula(x, y)).unwrap()
}

#[test]
fn parses_two_subsets() {
    let e = p("{ {a,b} | a,b in atoms, a != b }");
    let Expr::Union(cs) = &e else { panic!() };
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].binders, vec![Var::new("a"), Var::new("b")]);
    assert_eq!(cs[0].elem, Expr::set([Expr::var("a"), Expr::var("b")]));
    assert_eq!(e.to_string(), "{{a, b} | a, b in atoms, a != b}");
}

#[test]
fn parse_errors() {
    assert_eq!(parse("{ a | a,a in atoms }"), Err(Error::DuplicateBinder("a".into())));
    assert_eq!(parse("{ b | a in atoms }"), Err(Error::UnboundVariable("b".into())));
    assert!(matches!(parse("{ a | a in atoms, a ! b }"), Err(Error::Syntax { .. })));
    assert!(matches!(parse("#1 + atoms"), Err(Error::Syntax { line: 1, column: 1, .. })));
    assert!(matches!(parse("{a | a in atoms}\n  )"), Err(Error::Syntax { line: 2, column: 3, .. })));
    assert!(matches!(parse_for(Backend::Equality, "{a | a in atoms, a < #2}"), Err(Error::Vocabulary(_))));
    assert!(matches!(parse_for(Backend::Dlo, "#3"), Err(Error::Vocabulary(_))));
}

#[test]
fn union_of_atoms_is_atoms() {
    let e = p("atoms + atoms");
    assert_eq!(e.comps().unwrap().len(), 2);
    assert!(equal(Backend::Equality, &e, &Expr::Atoms));
}

#[test]
fn implicit_binders() {
    let e = p("{a | a != #1}");
    assert_eq!(e, p("{a | a in atoms, a != #1}"));
    let e = p("{ {b | b != a} | a in atoms }");
    let Expr::Union(cs) = &e else { panic!() };
    let Expr::Union(inner) = &cs[0].elem else { panic!() };
    assert_eq!(inner[0].binders, vec![Var::new("b")]);
    // closed guard-only comprehension has no binders
    assert_eq!(p("{#1 | #1 = #2}").to_string(), "{#1 | #1 = #2}");
}

#[test]
fn comments_and_literals() {
    let e = p("# the pair\n(#1, -3/6) # trailing");
    assert_eq!(e, Expr::Tuple(vec![Expr::Atom(Atom::Id(1)), Expr::Atom(Atom::rat(-1, 2))]));
    assert_eq!(e.to_string(), "(#1, -1/2)");
    assert_eq!(p("{}"), Expr::empty());
    assert_eq!(p("empty").to_string(), "empty");
}

#[test]
fn print_parse_round_trip() {
    for s in [
        "atoms",
        "{#1, #2} + {a | a in atoms, a != #1 and a != #2}",
        "{(a, {b | b in atoms, b != a}) | a in atoms}",
        "{a | a in atoms, exists b. a != b -> (forall c. c = a or c = b)}",
        "{(a, b) | a, b in atoms, a < b and not (b <= 1/2)}",
        "{a | a in atoms, R(a, 0, 1)}",
        "({#1} + {#2}, #3)",
        "{{a} | a in atoms} + {empty}",
    ] {
        let e = p(s);
        assert_eq!(p(&e.to_string()), e, "{s}");
    }
}

#[test]
fn cofinite_sets_equal_iff_excluded_atoms_equal() {
    let pv = Var::new("p");
    let qv = Var::new("q");
    let ex = |v: &Var| {
        Expr::Union(vec![Comp {
            elem: Expr::var("a"),
            binders: vec![Var::new("a")],
            guard: Formula::neq(Var::new("a"), v.clone()),
        }])
    };
    let f = equality_formula(Backend::Equality, &ex(&pv), &ex(&qv)).unwrap();
    assert_eq!(f, Formula::eq(qv.clone(), pv.clone()));
    let f = equality_formula(Backend::Dlo, &ex(&pv), &ex(&qv)).unwrap();
    for (a, b) in [(0, 0), (0, 1), (1, 0)] {
        let val = [(pv.clone(), Atom::int(a)), (qv.clone(), Atom::int(b))].into_iter().collect();
        assert_eq!(Backend::Dlo.sat(&f, &val).unwrap(), a == b);
    }
}

#[test]
fn equality_examples() {
    assert_eq!(
        equality_formula(Backend::Equality, &Expr::Atoms, &p("{a | a in atoms}")).unwrap(),
        Formula::True
    );
    let (pv, qv) = (Expr::var("p"), Expr::var("q"));
    let f = equality_formula(
        Backend::Equality,
        &Expr::pair(pv.clone(), qv.clone()),
        &Expr::pair(qv.clone(), pv.clone()),
    )
    .unwrap();
    for (a, b) in [(1, 1), (1, 2)] {
        let val = [(Var::new("p"), Atom::Id(a)), (Var::new("q"), Atom::Id(b))].into_iter().collect();
        assert_eq!(Backend::Equality.sat(&f, &val).unwrap(), a == b);
    }
    assert!(!equal(Backend::Equality, &p("{a | a != #1}"), &p("{a | a != #2}")));
    assert!(!equal(Backend::Equality, &p("#1"), &p("{#1}")));
    assert!(!equal(Backend::Equality, &p("(#1, #2)"), &p("{#1, #2}")));
    assert!(equal(Backend::Equality, &p("{#1, #2, #1}"), &p("{#2, #1}")));
    assert!(equal(Backend::Equality, &p("{a | a = #1 or a != #1}"), &Expr::Atoms));
    assert!(equal(Backend::Dlo, &p("{a | a < 0} + {a | 0 <= a}"), &Expr::Atoms));
    assert!(!equal(Backend::Dlo, &p("{a | a < 0} + {a | 0 < a}"), &Expr::Atoms));
}

#[test]
fn membership() {
    let v = p("{ {a,b} | a,b in atoms, a != b }");
    assert!(Backend::Equality.holds(&member_formula(&p("{#1, #2}"), &v)).unwrap());
    assert!(!Backend::Equality.holds(&member_formula(&p("{#1}"), &v)).unwrap());
    assert!(!Backend::Equality.holds(&member_formula(&p("#1"), &v)).unwrap());
    assert!(Backend::Equality.holds(&member_formula(&p("#1"), &Expr::Atoms)).unwrap());
}

#[test]
fn action_examples() {
    let pi = AtomMap::from_pairs([
        (Atom::Id(0), Atom::Id(1)),
        (Atom::Id(1), Atom::Id(0)),
        (Atom::Id(3), Atom::Id(4)),
        (Atom::Id(4), Atom::Id(3)),
        (Atom::Id(2), Atom::Id(2)),
    ])
    .unwrap();
    let e = p("{a | a in atoms, a != #1 and a != #2}");
    assert_eq!(e.act(&pi).unwrap(), p("{a | a in atoms, a != #0 and a != #2}"));
    let e = p("{#0, #1, #2}");
    let moved = e.act(&pi).unwrap();
    assert_eq!(moved, p("{#1, #0, #2}"));
    assert!(equal(Backend::Equality, &moved, &e));
    let id = AtomMap::identity(e.params());
    assert_eq!(e.act(&id).unwrap(), e);
    assert_eq!(p("{#7}").act(&pi), Err(Error::Domain(Atom::Id(7))));
}

#[test]
fn canonical_renaming() {
    let e = p("{(x, {y | y in atoms, exists z. z != x}) | x in atoms} + {u | u in atoms}");
    assert_eq!(
        e.canonical().to_string(),
        "{(a, {b | b in atoms, exists c. c != a}) | a in atoms} + {a | a in atoms}"
    );
    assert!(equal(Backend::Equality, &e, &e.canonical()));
}

#[test]
fn canonical_is_idempotent_on_trivial_quantifiers() {
    let e = p("{x | x in atoms, (exists w. w = w) and x != #1}");
    let c = e.canonical();
    assert_eq!(c.canonical(), c);
    assert_eq!(c.to_string(), "{a | a in atoms, a != #1}");
}

#[test]
fn substitution_avoids_capture() {
    let inner = Expr::Union(vec![Comp {
        elem: Expr::Tuple(vec![Expr::var("b"), Expr::var("a")]),
        binders: vec![Var::new("b")],
        guard: Formula::True,
    }]);
    let s = inner.substitute(&BTreeMap::from([(Var::new("a"), Term::Var(Var::new("b")))]));
    let Expr::Union(cs) = &s else { panic!() };
    assert_ne!(cs[0].binders[0], Var::new("b"));
    assert_eq!(s.free_vars(), vec![Var::new("b")]);
}

#[test]
fn simplify_removes_forced_binders() {
    let e = parse("{((a, b), (c, d)) | a, b, c, d in atoms, b != a and c = b and d = a}").unwrap();
    assert_eq!(e.simplify().canonical().to_string(), "{((a, b), (b, a)) | a, b in atoms, b != a}");
    let e = parse("{(a, {c | c in atoms, c = b}) | a, b in atoms, b = #1}").unwrap();
    assert_eq!(e.simplify().canonical().to_string(), "{(a, {b}) | a in atoms}".replace("{b}", "{#1}"));
    for b in Backend::ALL {
        let e = parse("{(a, b) | a, b in atoms, a = b}").unwrap();
        assert!(crate::algebra::set_equal(b, &e, &e.simplify()).unwrap());
    }
}
