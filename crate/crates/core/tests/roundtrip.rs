use num_bigint::BigUint;
use proptest::prelude::*;

use heapsmt::elaborator::elaborate_script;
use heapsmt::frontend::{parse_sexpr, parse_str, print_script, SExpr, SExprKind, Span};
use heapsmt::redgen::fixture_files;
use heapsmt::solver::fuzz::{random_script, FuzzConfig};

fn atom() -> impl Strategy<Value = SExpr> {
    let kind = prop_oneof![
        "[a-z][a-z0-9_.!-]{0,6}".prop_map(SExprKind::Symbol),
        "[a-z ()#;|]{1,6}"
            .prop_filter("quotable", |s| !s.contains('|'))
            .prop_map(SExprKind::Symbol),
        "[a-z][a-z0-9-]{0,5}".prop_map(SExprKind::Keyword),
        any::<u64>().prop_map(|n| SExprKind::Numeral(BigUint::from(n))),
        "[1-9][0-9]{0,3}\\.[0-9]{1,3}".prop_map(SExprKind::Decimal),
        "[0-9A-F]{1,4}".prop_map(SExprKind::Hexadecimal),
        "[01]{1,8}".prop_map(SExprKind::Binary),
        "[a-z \"()]{0,8}".prop_map(SExprKind::Str),
    ];
    kind.prop_map(|k| SExpr::new(k, Span::default()))
}

fn sexpr() -> impl Strategy<Value = SExpr> {
    atom().prop_recursive(4, 40, 6, |inner| {
        prop::collection::vec(inner, 0..6).prop_map(SExpr::list)
    })
}

proptest! {
    #[test]
    fn printed_sexprs_reparse(e in sexpr()) {
        prop_assert_eq!(parse_sexpr(&e.to_string()).unwrap(), e.clone());
        prop_assert_eq!(parse_sexpr(&e.pretty(20)).unwrap(), e);
    }

    #[test]
    fn printed_fuzz_scripts_reparse(seed in 0u64..1000, index in 0u64..1000) {
        let src = random_script(seed, index, FuzzConfig::default());
        let cmds = parse_str(&src).unwrap();
        let again = parse_str(&print_script(&cmds)).unwrap();
        prop_assert_eq!(&again, &cmds);
        prop_assert!(elaborate_script(&again).is_ok());
    }
}

#[test]
fn fixtures_reparse_to_the_same_commands() {
    for (name, text) in fixture_files() {
        if name.contains("transpiled") {
            continue;
        }
        let cmds = parse_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_str(&print_script(&cmds)).unwrap(), cmds, "{name}");
    }
}

#[test]
fn committed_fixtures_are_current() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (name, text) in fixture_files() {
        let on_disk = std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk, text, "{name} is stale; regenerate with `heapsmt gen fixtures`");
    }
}
