use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pzkpcp::dimacs;
use pzkpcp::pcp::format::{read_proof, write_proof};
use pzkpcp::pcp::simulator::simulate_verifier;
use pzkpcp::pcp::{arithmetize, model_count, prove, sample_coins, sharp_sat_params, verify};
use pzkpcp::Elem;

const CNF: &str = "c x1 or x2, not x3\np cnf 3 2\n1 2 0\n-3 0\n";

#[test]
fn sharp_sat_round_trip() {
    let cnf = dimacs::parse(CNF).unwrap();
    assert_eq!(model_count(&cnf), 3);
    let pp = sharp_sat_params(&cnf, 3, None).unwrap();
    assert!(pp.soundness_precondition());
    let f = pp.field();
    let fpoly = arithmetize(&f, &cnf);
    let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let proof = prove(&pp, &fpoly, &mut rng, 1 << 24).unwrap();

    let mut bytes = Vec::new();
    write_proof(&mut bytes, &proof).unwrap();
    let back = read_proof(&mut bytes.as_slice(), pp.gamma, 1 << 24).unwrap();
    assert_eq!(back, proof);
    for seed in 0..20 {
        assert!(verify(&pp, &fe, &back, &mut ChaCha8Rng::seed_from_u64(seed)).accept);
    }

    let wrong = sharp_sat_params(&cnf, 2, None).unwrap();
    let wrong_proof = read_proof(&mut bytes.as_slice(), wrong.gamma, 1 << 24).unwrap();
    let rejected = (0..100).filter(|&s| !verify(&wrong, &fe, &wrong_proof, &mut ChaCha8Rng::seed_from_u64(s)).accept).count();
    assert!(rejected >= 50);
}

#[test]
fn simulated_view_passes_honest_verifier() {
    let cnf = dimacs::parse("p cnf 2 1\n1 2 0\n").unwrap();
    let pp = sharp_sat_params(&cnf, 3, Some(11)).unwrap();
    let f = pp.field();
    let fpoly = arithmetize(&f, &cnf);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2 {
        let coins = sample_coins(&pp, &mut rng);
        let (view, verdict) = simulate_verifier(&pp, &fpoly, &coins, &mut rng).unwrap();
        assert!(verdict.accept, "{:?}", verdict.failures);
        assert_eq!(view.transcript[0].answer, 3);
    }
    let wrong = sharp_sat_params(&cnf, 4, Some(11)).unwrap();
    let coins = sample_coins(&wrong, &mut rng);
    assert!(simulate_verifier(&wrong, &fpoly, &coins, &mut rng).is_err());
}
