use super::*;
use crate::semantics::satisfies_sentence;
use crate::syntax::parse_formula_file;

fn two(text: &str) -> (Formula, Formula) {
    let mut fs = parse_formula_file(text).unwrap().formulas;
    let psi = fs.pop().unwrap();
    (fs.pop().unwrap(), psi)
}

fn one(text: &str) -> Formula {
    parse_formula_file(text).unwrap().formulas.pop().unwrap()
}

fn bounds4() -> InterpolationBounds {
    InterpolationBounds {
        entail_bound: 4,
        ..Default::default()
    }
}

fn theta(r: InterpolationResult) -> (Formula, Formula, InterpolantReport) {
    match r {
        InterpolationResult::Interpolant { theta, extracted, report } => (theta, extracted, *report),
        other => panic!("expected an interpolant, got {other:?}"),
    }
}

#[test]
fn verification_clauses() {
    let b = bounds4();
    let (phi, psi) = two("rel P: 0\nrel Q: 0\nrel R: 0\nconst c: 0\nAnd[P(c), Q(c)]; Or[P(c), R(c)]");
    let t = one("rel P: 0\nconst c: 0\nP(c)");
    let r = verify_interpolant(&phi, &t, &psi, &b);
    assert!(r.passes(), "{r:?}");
    let r = verify_interpolant(&phi, &phi, &phi, &b);
    assert!(r.passes());
    let (p, q) = two("rel P: 0\nrel Q: 0\nconst c: 0\nP(c); Q(c)");
    let r = verify_interpolant(&p, &q, &q, &b);
    assert_eq!(r.foreign, vec!["Q".to_string()]);
    assert!(r.left.failed());
}

#[test]
fn propositional_letter() {
    let (phi, psi) = two("prop p q r\nAnd[p, q]; Or[p, r]");
    let (t, _, report) = theta(craig(&phi, &psi, &bounds4()).unwrap());
    assert_eq!(t, Formula::prop("p"));
    assert!(report.passes());
}

#[test]
fn unsatisfiable_left_gives_bottom() {
    let (phi, psi) = two("prop p q\nAnd[p, not p]; q");
    let (t, _, _) = theta(craig(&phi, &psi, &bounds4()).unwrap());
    assert_eq!(t, Formula::Bottom);
    let (phi, psi) = two("rel P: 0\nrel Q: 1\nexists x:0. And[P(x), not P(x)]; forall y:1. Q(y)");
    let (t, _, report) = theta(craig_sorted(&phi, &psi, &bounds4()).unwrap());
    assert_eq!(t, Formula::Bottom);
    assert!(report.sorts.un_theta.is_empty() && report.sorts.ex_theta.is_empty());
}

#[test]
fn failed_entailment_gives_countermodel() {
    let (phi, psi) = two("rel P: 0\nrel Q: 0\nexists x:0. P(x); exists x:0. Q(x)");
    match craig(&phi, &psi, &bounds4()).unwrap() {
        InterpolationResult::NotEntailed(m) => {
            assert!(satisfies_sentence(&m, &phi).unwrap());
            assert!(!satisfies_sentence(&m, &psi).unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn first_order_extraction() {
    let (phi, psi) = two(
        "rel P: 0\nrel Q: 0\nrel R: 0\n\
         And[forall x:0. (P(x) -> Q(x)), exists x:0. P(x)]; Or[exists x:0. Q(x), exists x:0. R(x)]",
    );
    let (t, extracted, report) = theta(craig(&phi, &psi, &bounds4()).unwrap());
    assert!(report.passes(), "{t}");
    let r = verify_interpolant(&phi, &simplify(&extracted), &psi, &bounds4());
    assert!(r.passes(), "extracted {extracted}");
    assert!(t.vocabulary().symbol_names().iter().all(|s| s == "Q"));
}

#[test]
fn equality_crosses_sides() {
    // The left side knows c = d, the right side speaks about d only.
    let (phi, psi) = two("rel P: 0\nconst c: 0\nconst d: 0\nconst e: 0\nAnd[P(c), c = d, e = c]; P(d)");
    let (_, extracted, _) = theta(craig(&phi, &psi, &bounds4()).unwrap());
    let r = verify_interpolant(&phi, &simplify(&extracted), &psi, &bounds4());
    assert!(r.passes(), "extracted {extracted}");
}

#[test]
fn reflexive_sorted_instance() {
    let phi = one("rel R: 0 1\nforall x:0. exists y:1. R(x, y)");
    let (t, extracted, report) = theta(craig_sorted(&phi, &phi, &bounds4()).unwrap());
    assert_eq!(t, phi);
    assert!(report.sorts.holds());
    let r = verify_interpolant(&phi, &simplify(&extracted), &phi, &bounds4());
    assert!(r.passes() && r.sorts.holds(), "extracted {extracted}");
}

#[test]
fn rejects_aleph() {
    let (phi, psi) = two("rel P: 0\nQaleph 0 x:0. P(x); top");
    assert!(matches!(craig(&phi, &psi, &bounds4()), Err(InterpolationError::UnsupportedConnective(_))));
}

#[test]
fn beth_conjunction() {
    let phi = one("rel P: 0\nrel Q: 0\nrel R: 0\nforall x:0. (P(x) <-> And[Q(x), R(x)])");
    match beth(&phi, "P", &Vocabulary::new(), &bounds4()).unwrap() {
        BethResult::Defined { theta, constants, check, .. } => {
            assert!(!theta.vocabulary().contains_symbol("P"));
            assert!(!check.failed());
            let c = &constants[0];
            let expected = Formula::And(vec![
                Formula::atom("Q", vec![c.clone()]),
                Formula::atom("R", vec![c.clone()]),
            ]);
            let eq = check_entailment(std::slice::from_ref(&phi), &Formula::iff(theta.clone(), expected), &bounds4());
            assert!(!eq.failed(), "{theta}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn beth_identity() {
    let phi = one("rel P: 0 0\nforall x:0. forall y:0. (P(x, y) <-> x = y)");
    match beth(&phi, "P", &Vocabulary::new(), &bounds4()).unwrap() {
        BethResult::Defined { theta, constants, .. } => {
            let expected = Formula::eq(constants[0].clone(), constants[1].clone());
            let eq = check_entailment(&[], &Formula::iff(theta.clone(), expected), &bounds4());
            assert!(eq.proved() || matches!(eq, Check::HoldsUpToBound(_)), "{theta}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn beth_unconstrained() {
    let voc = Vocabulary::new().with_relation("P", &[0]);
    match beth(&Formula::Top, "P", &voc, &bounds4()).unwrap() {
        BethResult::NotImplicit(m) => {
            let c = m.voc.constants.keys().next().unwrap().clone();
            let e = m.constants[&c];
            let copies: Vec<&String> = m.voc.relations.keys().collect();
            assert_eq!(copies.len(), 2);
            assert_ne!(m.holds(copies[0], &[e]), m.holds(copies[1], &[e]));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        beth(&Formula::Top, "P", &Vocabulary::new(), &bounds4()),
        Err(InterpolationError::SymbolNotPresent(_))
    ));
}

fn props(names: &[&str]) -> Vocabulary {
    names.iter().fold(Vocabulary::new(), |v, p| v.with_relation(p, &[]))
}

fn theory(text: &str) -> Vec<Formula> {
    parse_formula_file(&format!("prop p q r\n{text}")).unwrap().formulas
}

#[test]
fn robinson_examples() {
    let input = RobinsonInput {
        sigma0: theory("p"),
        sigma1: theory("p; q"),
        sigma2: theory("p; r"),
        vocab0: props(&["p"]),
        vocab1: props(&["p", "q"]),
        vocab2: props(&["p", "r"]),
    };
    match robinson_join(&input, &bounds4()).unwrap() {
        RobinsonResult::Joint(m) => {
            for p in ["p", "q", "r"] {
                assert!(m.holds(p, &[]));
            }
        }
        other => panic!("{other:?}"),
    }
    let overlap = RobinsonInput {
        sigma0: vec![],
        sigma1: theory("q"),
        sigma2: theory("not q"),
        vocab0: Vocabulary::new(),
        vocab1: props(&["q"]),
        vocab2: props(&["q"]),
    };
    assert!(matches!(
        robinson_join(&overlap, &bounds4()),
        Err(InterpolationError::VocabularyOverlapViolation(_))
    ));
    let incomplete = RobinsonInput {
        sigma0: theory("Or[p, not p]"),
        sigma1: theory("p; q"),
        sigma2: theory("not p; r"),
        vocab0: props(&["p"]),
        vocab1: props(&["p", "q"]),
        vocab2: props(&["p", "r"]),
    };
    assert_eq!(
        robinson_join(&incomplete, &bounds4()),
        Err(InterpolationError::IncompleteSigma0("p".into()))
    );
}

#[test]
fn interpolant_from_joint_consistency() {
    let (phi, psi) = two("prop p q r\nAnd[p, q]; Or[p, r]");
    let (t, _, report) = theta(craig_via_robinson(&phi, &psi, &bounds4()).unwrap());
    assert!(report.passes(), "{t}");
}

fn class(text: &str, visible: &[&str]) -> PcClass {
    PcClass {
        matrix: one(&format!("prop p q r\n{text}")),
        visible: props(visible),
    }
}

#[test]
fn separation_examples() {
    let b = bounds4();
    let r = separate(&class("And[p, q]", &["p"]), &class("And[not p, r]", &["p"]), &b).unwrap();
    assert_eq!(
        r,
        SeparationResult::Separated {
            theta: Formula::prop("p"),
            defines: Some(true)
        }
    );
    let r = separate(&class("And[p, q]", &["p", "q"]), &class("And[not p, r]", &["p", "q"]), &b).unwrap();
    assert_eq!(
        r,
        SeparationResult::Separated {
            theta: Formula::prop("p"),
            defines: Some(false)
        }
    );
    let r = separate(&class("p", &["p"]), &class("Or[p, q]", &["p"]), &b).unwrap();
    assert!(matches!(r, SeparationResult::Overlap(m) if m.holds("p", &[])));
    let r = separate(&class("And[p <-> q, q]", &["p"]), &class("And[not p, q]", &["p"]), &b).unwrap();
    match r {
        SeparationResult::Separated { theta, defines } => {
            assert_eq!(defines, Some(true));
            assert!(prop::entails(std::slice::from_ref(&theta), &Formula::prop("p")).is_ok());
            assert!(prop::entails(&[Formula::prop("p")], &theta).is_ok());
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(
        separate(&class("p", &["p"]), &class("q", &["q"]), &b),
        Err(InterpolationError::VisibleVocabularyMismatch)
    );
}

const THRESHOLD: &str = "rel E: 0 0\nrel S: 0\nrel T: 0\n\
    And[forall x:0. E(x, x), forall x:0. forall y:0. (E(x, y) -> E(y, x)), \
    forall x:0. forall y:0. forall z:0. (And[E(x, y), E(y, z)] -> E(x, z)), \
    forall x:0. exists y:0. And[E(x, y), S(y)], \
    forall x:0. forall y:0. (And[S(x), S(y), E(x, y)] -> x = y), Qge 2 x:0. S(x)];\n\
    (forall x:0. exists y:0. And[T(y), E(x, y)]) -> Qge 2 x:0. T(x)";

#[test]
fn threshold_interpolant_over_equivalence() {
    let (phi, psi) = two(THRESHOLD);
    let (t, _, report) = theta(craig(&phi, &psi, &bounds4()).unwrap());
    let names = t.vocabulary().symbol_names();
    assert!(names.iter().all(|s| s == "E"), "{names:?}");
    assert!(report.consistent());
}

const PRESERVATION: &str = "rel R: 0 0\nrel R1: 1 1\n\
    And[forall x:1. exists y:0. y == x, \
    forall x:1. forall y:1. exists u:0. exists v:0. And[u == x, v == y, R1(x, y) <-> R(u, v)], \
    not forall x:1. not R1(x, x)];\n\
    not forall x:0. not R(x, x)";

#[test]
fn preservation_demo() {
    let (left, right) = two(PRESERVATION);
    let (t, extracted, report) = theta(craig_sorted(&left, &right, &bounds4()).unwrap());
    assert!(t.vocabulary().symbol_names().iter().all(|s| s == "R"), "{t}");
    assert!(report.sorts.holds());
    let r = verify_interpolant(&left, &simplify(&extracted), &right, &bounds4());
    assert!(r.consistent() && r.sorts.holds(), "extracted {extracted}");
}
