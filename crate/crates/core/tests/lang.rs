mod common;

use common::TermGen;
use proptest::prelude::*;
use tapework::corpus::{self, Params};
use tapework::exec::reachable;
use tapework::lang::{
    decompose, erase, load, parse_expr, parse_type, plug, subst, typecheck, typecheck_closed, BinOp, Binder,
    Decomposition, Expr, Frame, Label, StoreTyping, Type, TypeCtx, TypeError,
};
use tapework::semantics::Config;
use tapework::Prob;

fn parse(src: &str) -> Expr {
    parse_expr(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

#[test]
fn eager_coin_parses_with_flip_sugar() {
    let e = parse("let b = flip () in fun _ -> b");
    let expected = Expr::let_(
        Binder::named("b"),
        Expr::flip(Expr::Unit),
        Expr::lam(Binder::Anon, Expr::var("b")),
    );
    assert_eq!(e, expected);
}

#[test]
fn unit_literal() {
    assert_eq!(parse("()"), Expr::Unit);
    assert_eq!(parse("  () # trailing comment"), Expr::Unit);
}

#[test]
fn rand_with_label_variable_round_trips() {
    let e = parse("rand(3, t)");
    assert_eq!(e, Expr::rand(Expr::int(3), Expr::var("t")));
    assert_eq!(parse(&e.to_string()), e);
    assert_eq!(parse("rand(3)"), Expr::rand(Expr::int(3), Expr::Unit));
}

#[test]
fn syntax_errors_carry_positions_and_expectations() {
    let err = parse_expr("let x = in x").unwrap_err();
    assert_eq!((err.line, err.col), (1, 9));
    assert!(!err.expected.is_empty());
    let err = parse_expr("fun (x: int) ->\n  x +").unwrap_err();
    assert_eq!(err.line, 2);
    assert!(parse_expr("1 $ 2").is_err());
}

#[test]
fn precedence() {
    assert_eq!(
        parse("1 + 2 * 3"),
        Expr::binop(BinOp::Add, Expr::int(1), Expr::binop(BinOp::Mul, Expr::int(2), Expr::int(3)))
    );
    assert_eq!(
        parse("a < b && c"),
        Expr::binop(BinOp::And, Expr::binop(BinOp::Lt, Expr::var("a"), Expr::var("b")), Expr::var("c"))
    );
    assert_eq!(
        parse("1 - 2 - 3"),
        Expr::binop(BinOp::Sub, Expr::binop(BinOp::Sub, Expr::int(1), Expr::int(2)), Expr::int(3))
    );
}

#[test]
fn typing_tapes_and_samples() {
    assert_eq!(typecheck_closed(&parse("alloctape 1")).unwrap(), Type::Tape);
    assert_eq!(typecheck_closed(&parse("()")).unwrap(), Type::Unit);
    let ctx = TypeCtx::default().with_var("t", Type::Tape);
    assert_eq!(typecheck(&ctx, &parse("rand(3, t)")).unwrap(), Type::Nat);
    assert_eq!(typecheck_closed(&parse("rand(3)")).unwrap(), Type::Nat);
    let bad = typecheck(&TypeCtx::default().with_var("t", Type::Int), &parse("rand(3, t)"));
    assert!(bad.is_err());
    assert!(typecheck_closed(&parse("alloctape true")).is_err());
}

#[test]
fn type_errors() {
    assert!(matches!(typecheck_closed(&parse("y")), Err(TypeError::UnboundVariable(_))));
    assert!(typecheck_closed(&parse("1 + true")).is_err());
    assert!(typecheck_closed(&parse("unfold 3")).is_err());
    assert!(typecheck_closed(&parse("fold[mu 'l. unit + int * 'l] 3")).is_err());
    assert!(typecheck_closed(&parse("if 1 then 2 else 3")).is_err());
}

#[test]
fn store_typing_covers_runtime_literals() {
    let store = StoreTyping {
        locs: [(tapework::lang::Loc(0), Type::Int)].into(),
        labels: [Label(0)].into(),
    };
    let ctx = TypeCtx::default().with_store(store);
    assert_eq!(typecheck(&ctx, &parse("!loc(0) + rand(1, label(0))")).unwrap(), Type::Int);
}

#[test]
fn erase_strips_annotations() {
    let e = parse("fold[mu 'a. 'a -> 'a] (fun (x: mu 'a. 'a -> 'a) -> x)");
    let Expr::Fold(None, body) = erase(&e) else { panic!("annotation kept") };
    assert!(matches!(*body, Expr::Rec(ref r) if r.param.is_none()));
    assert_eq!(erase(&parse("pack[int, exists 'a. 'a] 3")), Expr::Pack(None, Box::new(Expr::int(3))));

    let lazy = corpus::build("lazy-eager", &Params::new()).unwrap();
    let hand = parse(
        "let r = ref (inl ()) in \
         fun _ -> match !r with inl _ -> let b = flip () in r <- inr b; b | inr b -> b end",
    );
    assert_eq!(erase(&lazy.left), erase(&hand));
}

#[test]
fn substitution() {
    let five = Expr::int(5);
    assert_eq!(subst(&Expr::var("x"), "x", &five), five);
    assert_eq!(
        subst(&Expr::lam(Binder::named("y"), Expr::var("x")), "x", &five),
        Expr::lam(Binder::named("y"), five.clone())
    );
    let shadow = Expr::lam(Binder::named("x"), Expr::var("x"));
    assert_eq!(subst(&shadow, "x", &five), shadow);
}

#[test]
fn decomposition_examples() {
    let beta = parse("(fun x -> x) 3");
    assert_eq!(
        decompose(&beta),
        Decomposition::Redex {
            frames: vec![],
            redex: beta.clone()
        }
    );
    assert_eq!(
        decompose(&parse("(1 + 2, 4)")),
        Decomposition::Redex {
            frames: vec![Frame::PairLeft(Expr::int(4))],
            redex: parse("1 + 2")
        }
    );
    assert_eq!(decompose(&parse("fst true")), Decomposition::Stuck);
    assert_eq!(decompose(&parse("1 + true")), Decomposition::Stuck);
    assert_eq!(decompose(&Expr::int(3)), Decomposition::Value);
    let Decomposition::Redex { frames, redex } = decompose(&parse("(1 + 2) (3 + 4)")) else {
        panic!("expected redex")
    };
    assert_eq!(redex, parse("3 + 4"), "argument is evaluated first");
    assert_eq!(frames.len(), 1);
}

#[test]
fn type_syntax() {
    let t = parse_type("mu 'l. unit + int * 'l").unwrap();
    assert!(matches!(t, Type::Mu(..)));
    assert_eq!(parse_type(&t.to_string()).unwrap(), t);
}

#[test]
fn corpus_programs_round_trip_through_the_printer() {
    for e in corpus::entries() {
        let built = e.build(&Params::new()).unwrap();
        for (src, ast) in [(&built.left_source, &built.left), (&built.right_source, &built.right)] {
            let parsed = parse(src);
            let again = parse(&parsed.to_string());
            assert_eq!(parsed, again, "{}", e.name);
            let printed_elab = ast.to_string();
            assert_eq!(parse(&printed_elab), *ast, "{}: elaborated form", e.name);
        }
    }
}

fn check_decomposition(e: &Expr) {
    match decompose(e) {
        Decomposition::Value => assert!(e.is_value()),
        Decomposition::Stuck => assert!(!e.is_value()),
        Decomposition::Redex { frames, redex } => {
            assert!(!e.is_value());
            assert_eq!(plug(frames.clone(), redex.clone()), *e);
            if !frames.is_empty() {
                assert_eq!(decompose(&redex), Decomposition::Redex { frames: vec![], redex });
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_terms_typecheck_and_decompose_uniquely(seed in any::<u64>()) {
        let mut g = TermGen::new(seed);
        let ty = g.random_type(2);
        let e = g.term(&ty, 4);
        let (elab, got) = tapework::lang::elaborate(&TypeCtx::default(), &e)
            .unwrap_or_else(|err| panic!("{e}: {err}"));
        prop_assert!(tapework::lang::is_subtype(&got, &ty), "{} : {} not {}", e, got, ty);
        check_decomposition(&erase(&elab));
        for c in reachable::<Prob>(&Config::initial(erase(&elab)), 12) {
            check_decomposition(&c.expr);
        }
    }

    #[test]
    fn generated_terms_round_trip(seed in any::<u64>()) {
        let mut g = TermGen::new(seed);
        let ty = g.random_type(2);
        let e = g.term(&ty, 4);
        let printed = e.to_string();
        let again = parse_expr(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
        prop_assert_eq!(again, e);
    }

    #[test]
    fn integer_literals_round_trip(n in any::<i64>()) {
        let e = Expr::int(n);
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }
}

#[test]
fn load_reports_both_error_kinds() {
    assert!(matches!(load("let"), Err(tapework::lang::LoadError::Syntax(_))));
    assert!(matches!(load("1 + ()"), Err(tapework::lang::LoadError::Type(_))));
    let (_, t) = load("fun (x: int) -> x + 1").unwrap();
    assert_eq!(t, Type::arrow(Type::Int, Type::Int));
}
