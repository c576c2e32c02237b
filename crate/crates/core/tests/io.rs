use cive::fixtures::{four_causes, three_causes_two_effects};
use cive::io::{parse_evidence, parse_network, parse_ordering, serialize_network, ParseErrorKind};
use cive::model::VarKind;
use cive::oracle::{random_network, RandomNetworkConfig};
use cive::transforms::depute;

const GOLDEN: &str = include_str!("data/four_causes.net");

#[test]
fn minimal_document() {
    let net = parse_network("network 1\nvariable x {lo, hi}\nnode x { cpt [0.25, 0.75] }\n").unwrap();
    assert_eq!(net.len(), 1);
    let x = net.by_name("x").unwrap();
    assert_eq!(net.variable(x).frame.values(), ["lo", "hi"]);
}

#[test]
fn three_cause_document_has_three_convergent_variables() {
    let net = parse_network(include_str!("data/three_causes_two_effects.net")).unwrap();
    assert_eq!(net.len(), 6);
    let convergent = net.nodes().filter(|n| n.variable.kind == VarKind::Convergent).count();
    assert_eq!(convergent, 3);
    assert_eq!(net, three_causes_two_effects());
}

#[test]
fn golden_file_matches_fixture() {
    assert_eq!(serialize_network(&four_causes()), GOLDEN);
    assert_eq!(parse_network(GOLDEN).unwrap(), four_causes());
}

#[test]
fn random_networks_round_trip() {
    let config = RandomNetworkConfig { nodes: 7, max_cardinality: 4, ..Default::default() };
    for seed in 0..100 {
        let net = random_network(seed, &config);
        let text = serialize_network(&net);
        let back = parse_network(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        assert_eq!(back, net, "seed {seed}");
        assert_eq!(serialize_network(&back), text);
    }
}

#[test]
fn deputation_round_trips_with_kind_annotations() {
    let dep = depute(&three_causes_two_effects()).unwrap().network;
    let text = serialize_network(&dep);
    assert!(text.contains("variable e1′ {0, 1} deputy"));
    assert!(text.contains("variable e1 {0, 1} new-regular"));
    assert!(text.contains("node e1 | e1′ {\n  deputing\n}"));
    assert_eq!(parse_network(&text).unwrap(), dep);
}

#[test]
fn custom_operator_and_leak_round_trip() {
    let text = "network 1
variable c {0, 1}
variable e {0, 1, 2, 3}
node c { cpt [0.5, 0.5] }
node e | c {
  ci custom [0, 0, 0, 0; 0, 1, 2, 3; 0, 2, 3, 3; 0, 3, 3, 3]
  contribution c [0, 1, 0, 0; 0, 0.5, 0.5, 0]
  leak [0, 0.75, 0.25, 0]
}
";
    let net = parse_network(text).unwrap();
    let back = parse_network(&serialize_network(&net)).unwrap();
    assert_eq!(back, net);
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_network("network 1\nvariable x {0, 1}\nnode x { cpt [0.5 0.5] }\n").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Syntax);
    assert_eq!((err.position.line, err.position.column), (3, 19));
    let err = parse_network("network 2\n").unwrap_err();
    assert_eq!((err.position.line, err.position.column), (1, 9));
    let err = parse_network("network 1\nvariable x {0, 1}\nnode x { cpt [0.5, 0.5]").unwrap_err();
    assert!(err.message.contains("end of input"), "{err}");
}

#[test]
fn semantic_errors_point_at_the_node() {
    let text = "network 1\nvariable x {0, 1}\n\nnode x {\n  cpt [0.5, 0.6]\n}\n";
    let err = parse_network(text).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Semantic);
    assert_eq!(err.position.line, 4);
    assert!(err.message.contains("sums to"), "{err}");

    let err = parse_network("network 1\nvariable x {0, 1}\nnode x | y { cpt [] }\n").unwrap_err();
    assert!(err.message.contains("undeclared variable `y`"));
    assert_eq!((err.position.line, err.position.column), (3, 10));

    let err = parse_network("network 1\nvariable x {0, 1}\n").unwrap_err();
    assert!(err.message.contains("no node block"));
}

#[test]
fn evidence_and_ordering_syntax() {
    let net = four_causes();
    let ev = parse_evidence(&net, "c1=1, c3 = 0").unwrap();
    assert_eq!(ev.len(), 2);
    assert_eq!(ev[&net.by_name("c1").unwrap()], 1);
    assert!(parse_evidence(&net, "c1=2").is_err());
    assert!(parse_evidence(&net, "zz=0").is_err());
    assert_eq!(parse_ordering("c1, c2 # first\nc3\tc4\n"), ["c1", "c2", "c3", "c4"]);
}
