use std::collections::{BTreeMap, HashSet};

use fixpoint::goedel::{
    code, code_of_symbols, decode_formula, delta, diagonalize, matryoshka_family, numeral,
    parse_formula, Formula, Syntax, Term,
};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod support;
use support::{occurrences, spliced, theta};

#[test]
fn diagonal_certificates_over_generated_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let t = theta(&mut rng, 5);
        let cert = diagonalize(&t).unwrap();
        assert!(cert.check(), "{t}");
        assert_eq!(delta(&cert.beta_code.0), cert.psi_code.0);
        assert_eq!(
            code_of_symbols(&spliced(&t.symbols(), &cert.beta_code.0)),
            cert.psi_code
        );
        let k = occurrences(&t.symbols());
        assert!(cert.psi.size() <= t.size() + 7 * k * cert.beta.size());
    }
}

#[test]
fn theta_examples() {
    for text in ["x = x", "~Prov(x)", "forall y. y = x -> Prov(D(y))"] {
        let t = parse_formula(text).unwrap();
        let cert = diagonalize(&t).unwrap();
        assert!(cert.check());
        assert!(decode_formula(&cert.psi_code)
            .unwrap()
            .free_vars()
            .is_empty());
    }
    assert!(diagonalize(&parse_formula("Prov(0)").unwrap()).is_err());
    assert!(diagonalize(&parse_formula("x = y").unwrap()).is_err());
}

#[test]
fn matryoshka_fifty() {
    let family = matryoshka_family(50);
    assert_eq!(family.len(), 50);
    let codes: HashSet<_> = family
        .iter()
        .map(|m| m.certificate.psi_code.clone())
        .collect();
    assert_eq!(codes.len(), 50);
    for m in &family {
        assert!(m.certificate.check());
        let offset = numeral(&BigUint::from(m.n));
        let Formula::Not(inner) = m.sentence() else {
            panic!("not a negation")
        };
        let Formula::Prov(Term::Plus(_, rhs)) = inner.as_ref() else {
            panic!("no offset")
        };
        assert_eq!(**rhs, offset);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn numerals_denote_their_values(n in any::<u64>()) {
        let t = numeral(&BigUint::from(n));
        prop_assert_eq!(fixpoint::goedel::denote(&t, &BTreeMap::new()).unwrap(), BigUint::from(n));
        prop_assert!(t.size() as u64 <= 65);
    }
}

#[test]
fn code_of_zero_regression() {
    assert_eq!(code(&Term::Zero).0, BigUint::from(1u32));
}
