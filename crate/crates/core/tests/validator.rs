mod support;

use asm_check_core::frontend::parse_source;
use asm_check_core::validate;
use support::fixture_text;

const FIXTURES: [&str; 9] = [
    "checkAxiomAndProperty.asm",
    "collatz.asm",
    "criticalSectionProblem.asm",
    "diningPhilosophers.asm",
    "ferryman.asm",
    "oneWayTrafficLightControl.asm",
    "sluiceGateControl.asm",
    "subsetDomain.asm",
    "ticTacToe_simulator.asm",
];

fn codes(src: &str) -> (bool, Vec<&'static str>) {
    let r = validate(&parse_source(src).unwrap());
    (r.ok, r.errors().map(|f| f.code).collect())
}

#[test]
fn fixtures_validate() {
    for name in FIXTURES {
        let r = validate(&parse_source(&fixture_text(name)).unwrap());
        assert!(r.ok, "{name}: {}", r.to_text());
    }
}

#[test]
fn removing_the_subset_extension_flips_ok() {
    let src = fixture_text("subsetDomain.asm");
    assert!(codes(&src).0);
    let cut = src.replace("  domain SubInt = {1..3}\n", "");
    assert_ne!(cut, src);
    assert_eq!(codes(&cut), (false, vec!["missing-subset-extension"]));
}

#[test]
fn quantifying_over_integers_is_rejected() {
    let src = "asm Q\nimport StandardLibrary\nsignature:\n  dynamic controlled b: Boolean\ndefinitions:\nmain rule r_Main =\n  forall $i in Integer with $i > 0 do b := true\ndefault init s0:\n  function b = false\n";
    assert_eq!(codes(src), (false, vec!["infinite-quantification"]));
}

#[test]
fn unbounded_monitored_functions_are_rejected() {
    let src = "asm M\nimport StandardLibrary\nsignature:\n  dynamic monitored n: Integer\n  dynamic controlled b: Boolean\ndefinitions:\nmain rule r_Main = b := n > 0\ndefault init s0:\n  function b = false\n";
    assert_eq!(codes(src), (false, vec!["unbounded-monitored-codomain"]));
    let src = src.replace("dynamic monitored n: Integer", "dynamic controlled f: Integer -> Boolean\n  dynamic monitored n: Boolean").replace("n > 0", "n");
    assert_eq!(codes(&src), (false, vec!["unbounded-argument-domain"]));
}

#[test]
fn uninitialized_locations_only_warn() {
    let r = validate(&parse_source(&fixture_text("sluiceGateControl.asm")).unwrap());
    assert!(r.ok);
    let w: Vec<_> = r.warnings().collect();
    assert_eq!(w.len(), 1);
    assert_eq!(w[0].code, "uninitialized-controlled-location");
    assert!(w[0].message.contains("`dir`"));
}

#[test]
fn validation_is_deterministic() {
    for name in FIXTURES {
        let m = parse_source(&fixture_text(name)).unwrap();
        assert_eq!(validate(&m), validate(&m), "{name}");
    }
}
