use pcoupling::calculus::jacobiator;
use pcoupling::ring::parse_expr;
use pcoupling::Error;
use pcoupling_cli::defs::parse;

const PI: &str = "[chart]\nbase = p q\nfiber = x1 x2 x3\n[tensor PI]\n(x1,x2) = x3\n";

fn parse_error(src: &str) -> (usize, usize, String) {
    match parse(src) {
        Err(Error::Parse { line, col, msg }) => (line, col, msg),
        other => panic!("expected a parse error, got {:?}", other.map(|f| f.to_string())),
    }
}

#[test]
fn single_component_tensor() {
    let f = parse(PI).unwrap();
    let pi = f.tensor("PI").unwrap();
    assert_eq!(pi.degree(), 2);
    assert_eq!(pi.terms().len(), 1);
    let ch = &f.chart;
    let (x1, x2) = (ch.require("x1").unwrap(), ch.require("x2").unwrap());
    assert_eq!(pi.component(&[x1, x2]), parse_expr("x3", ch).unwrap());
}

#[test]
fn swapped_indices_are_normalized_with_sign() {
    let f = parse("[chart]\nfiber = x1 x2 x3\n[tensor PI]\n(x2,x1) = x3\n").unwrap();
    let pi = f.tensor("PI").unwrap();
    let (k, v) = pi.terms().iter().next().unwrap();
    assert_eq!(k.as_slice(), &[0, 1]);
    assert_eq!(v, &parse_expr("-x3", &f.chart).unwrap());
}

#[test]
fn repeated_index_is_rejected() {
    let (line, col, msg) = parse_error("[chart]\nfiber = x1 x2\n[tensor PI]\n(x1,x1) = 1\n");
    assert_eq!((line, col), (4, 5));
    assert!(msg.contains("repeated index"));
}

#[test]
fn undefined_variable_reports_position() {
    let (line, col, _) = parse_error("[chart]\nfiber = x1 x2\n[tensor PI]\n(x1,x2) = x1 + y\n");
    assert_eq!((line, col), (4, 16));
    let (line, col, msg) = parse_error("[chart]\nfiber = x1 x2\n[tensor PI]\n(x1,z) = 1\n");
    assert_eq!((line, col), (4, 5));
    assert!(msg.contains("unknown variable"));
}

#[test]
fn semantic_errors() {
    let dup = "[chart]\nfiber = x1 x2\n[tensor A]\n(x1) = 1\n[tensor A]\n(x2) = 1\n";
    assert!(parse_error(dup).2.contains("duplicate section"));
    let arity = "[chart]\nfiber = x1 x2\n[tensor A]\n(x1,x2) = 1\n(x1) = 1\n";
    assert!(parse_error(arity).2.contains("arity mismatch"));
    let declared = "[chart]\nfiber = x1 x2\n[tensor A]\ndegree = 1\n(x1,x2) = 1\n";
    assert!(parse_error(declared).2.contains("arity mismatch"));
    let twice = "[chart]\nbase = x\nfiber = x\n";
    assert!(parse_error(twice).2.contains("declared twice"));
    assert!(parse_error("[tensor A]\n").2.contains("[chart] must come first"));
    assert!(parse_error("[chart]\nfiber = x\n[matrix A]\n").2.contains("unknown section kind"));
    let conn = "[chart]\nbase = u\nfiber = x\n[connection G]\n(x, u) = 1\n";
    assert!(parse_error(conn).2.contains("not a base variable"));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let src = "# header\n[chart]  # coords\nfiber = x1 x2 x3   # three\n\n[tensor PI]\n(x1,x2) = x3 # note\n";
    assert_eq!(parse(src).unwrap().to_string(), parse(PI.replace("base = p q\n", "").as_str()).unwrap().to_string());
}

#[test]
fn print_then_parse_is_a_fixed_point() {
    let src = "\
[chart]
fiber = x3 x1 x2
base = t
periodic = phi
constant = c

[tensor PI]
(x2, x1) = -x3*c + 1/2
(x3,x1) = x2/(1 + x1^2)

[connection G]
(phi, x1) = cos(phi)*x2
(t, x3) = 0

[form S]
(phi, t) = 2
";
    let once = parse(src).unwrap().to_string();
    let twice = parse(&once).unwrap().to_string();
    assert_eq!(once, twice);
    assert!(once.starts_with("[chart]\nbase = t\nperiodic = phi\nfiber = x3 x1 x2\nconstant = c\n"));
    let f = parse(&once).unwrap();
    let ch = &f.chart;
    let pi = f.tensor("PI").unwrap();
    let (x1, x2) = (ch.require("x1").unwrap(), ch.require("x2").unwrap());
    assert_eq!(pi.component(&[x1, x2]), parse_expr("x3*c - 1/2", ch).unwrap());
    let g = f.connection("G").unwrap();
    assert_eq!(g.hor(ch.require("phi").unwrap()).component(&[x1]), parse_expr("cos(phi)*x2", ch).unwrap());
    let s = f.form("S").unwrap();
    assert_eq!(s.component(&[ch.require("t").unwrap(), ch.require("phi").unwrap()]), parse_expr("-2", ch).unwrap());
}

#[test]
fn substitution_removes_constants() {
    let f = parse("[chart]\nfiber = x y z\nconstant = c\n[tensor PI]\n(y,z) = c*z\n(x,y) = y\n").unwrap();
    let g = f.substitute(&[("c".into(), pcoupling::ring::poly::q_int(0))]).unwrap();
    assert_eq!(g.chart.len(), 3);
    assert!(jacobiator(&g.tensor("PI").unwrap()).unwrap().is_zero());
    assert!(!jacobiator(&f.tensor("PI").unwrap()).unwrap().is_zero());
}
