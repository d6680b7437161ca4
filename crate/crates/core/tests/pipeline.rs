use polymaj_core::circuit::{parse_netlist, unfold_to_formula};
use polymaj_core::compiler::compile_formula;
use polymaj_core::synth::{plan, synth, Overrides, DEFAULT_MAX_WIDTH};
use polymaj_core::verify::{agreement, certify_approx_majority, AgreementMode, Majority};
use polymaj_core::{SparsePolyF2, TruthTable};

const NETLIST: &str = "\
input a
input b
input c
input d
g1 = AND a b
g2 = OR g1 c
g3 = XOR g1 d
g4 = AND g2 g3
output g4
";

#[test]
fn netlist_to_polynomial_samples() {
    let c = parse_netlist(NETLIST).unwrap();
    let f = unfold_to_formula(&c).unwrap();
    let want = c.truth_table(0).unwrap();
    assert_eq!(f.truth_table(4).unwrap(), want);
    let recipe = compile_formula(&f).unwrap();
    let prof = recipe.error_profile(&want, 7, 0, 400).unwrap();
    assert_eq!(prof.degree_violations, 0);
    assert!(prof.max_error() <= 0.125 + 4.0 * (0.125f64 * 0.875 / 400.0).sqrt());
    let p = recipe.sample(polymaj_core::rng::derive_seed(7, 0)).unwrap();
    assert!(p.degree() as u64 <= recipe.degree_bound);
    assert_eq!(SparsePolyF2::from_truth_table(&p.to_truth_table().unwrap()).unwrap(), p);
}

#[test]
fn small_synthesized_circuit_beats_the_constant() {
    let o = Overrides { a: Some(2), width: Some(512), ..Default::default() };
    let p = plan(15, 3, 0.25, &o, DEFAULT_MAX_WIDTH).unwrap();
    let sc = synth(&p, 1).unwrap();
    let cert = certify_approx_majority(&sc.circuit, 0.5, AgreementMode::Exact).unwrap();
    let zero = agreement(&TruthTable::zeros(15), &Majority(15), AgreementMode::Exact).unwrap();
    assert_eq!(zero.estimate, 0.5);
    assert!(cert.disagreement.estimate < 0.5, "{cert:?}");
}
