use std::path::PathBuf;

use fixpoint::cnf::{write_dimacs, VerdictTag};
use fixpoint::diagonal::{
    build_diagonal_program, finite_fixed_point, forge, parse_certificate, verify_certificate,
    Check, ClassifierTable, DiagonalError, FiniteSpace, ForgeOptions, Measurement,
    MisclassificationCertificate,
};
use fixpoint::machine::{parse_assembly, run, Program, RunTag};

fn classifier(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("classifiers")
        .join(format!("{name}.asm"));
    parse_assembly(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn forged(name: &str) -> MisclassificationCertificate {
    forge(&classifier(name), ForgeOptions::with_cap(1 << 16)).unwrap()
}

#[test]
fn constant_classifiers_flip_in_constant_time() {
    for (name, tag) in [
        ("const_unsat", RunTag::Accept),
        ("const_sat", RunTag::Reject),
    ] {
        let d = build_diagonal_program(&classifier(name)).unwrap();
        for input in [&b""[..], b"p cnf 1 1\n1 0\n", &[0xff; 300]] {
            let out = run(&d, input, 1000).unwrap();
            assert_eq!((out.tag, out.steps_used), (tag, 5), "{name}");
        }
    }
}

#[test]
fn const_unsat_certificate() {
    let cert = forged("const_unsat");
    assert_eq!(cert.classifier_verdict, VerdictTag::Unsat);
    assert_eq!(cert.oracle_verdict.tag(), VerdictTag::Sat);
    verify_certificate(&cert).unwrap();
}

#[test]
fn const_sat_certificate() {
    let cert = forged("const_sat");
    assert_eq!(cert.classifier_verdict, VerdictTag::Sat);
    assert_eq!(cert.oracle_verdict.tag(), VerdictTag::Unsat);
    verify_certificate(&cert).unwrap();
}

#[test]
fn parity_classifiers_are_beaten_on_their_own_reading() {
    for name in ["first_byte_parity", "header_digit_parity"] {
        let c = classifier(name);
        let cert = forged(name);
        verify_certificate(&cert).unwrap();
        let bytes = write_dimacs(&cert.forged).into_bytes();
        let byte = if name == "first_byte_parity" {
            bytes[0]
        } else {
            bytes[6]
        };
        let expected = if byte % 2 == 1 {
            VerdictTag::Sat
        } else {
            VerdictTag::Unsat
        };
        assert_eq!(cert.classifier_verdict, expected);
        let d_out = run(&cert.diagonal_program, &bytes, cert.bound_t as u64).unwrap();
        let c_out = run(&c, &bytes, cert.bound_t as u64).unwrap();
        assert_eq!(d_out.steps_used, c_out.steps_used + 3);
        assert_ne!(d_out.tag, c_out.tag);
        assert_ne!(cert.classifier_verdict, cert.oracle_verdict.tag());
        assert!(cert.diagonal_runtime <= cert.bound_t as u64);
    }
}

#[test]
fn certificate_text_round_trips_and_is_deterministic() {
    for name in ["const_sat", "first_byte_parity"] {
        let a = forged(name);
        let b = forged(name);
        assert_eq!(a.to_text(), b.to_text());
        let parsed = parse_certificate(&a.to_text()).unwrap();
        assert_eq!(parsed, a);
        verify_certificate(&parsed).unwrap();
    }
}

#[test]
fn tampering_is_caught_by_the_named_check() {
    let cert = forged("const_unsat");

    let mut flipped = cert.clone();
    flipped.classifier_verdict = flipped.classifier_verdict.negate();
    assert_eq!(
        verify_certificate(&flipped).unwrap_err().check,
        Check::ClassifierSimulation
    );

    let mut cut = cert.clone();
    let clauses: Vec<_> = cut.forged.clauses()[1..].to_vec();
    cut.forged = fixpoint::cnf::CnfFormula::new(cut.forged.num_vars(), clauses).unwrap();
    assert_eq!(
        verify_certificate(&cut).unwrap_err().check,
        Check::Rederivation
    );

    let mut hash = cert.clone();
    hash.classifier_hash = "00".repeat(32);
    assert_eq!(
        verify_certificate(&hash).unwrap_err().check,
        Check::ClassifierHash
    );

    let mut other = cert.clone();
    other.diagonal_program = build_diagonal_program(&classifier("const_sat")).unwrap();
    assert_eq!(
        verify_certificate(&other).unwrap_err().check,
        Check::DiagonalProgram
    );

    let mut bound = cert.clone();
    bound.bound_t *= 2;
    assert_eq!(
        verify_certificate(&bound).unwrap_err().check,
        Check::Rederivation
    );

    let mut oracle = cert;
    oracle.oracle_verdict = fixpoint::cnf::Verdict::Unsat;
    assert_eq!(
        verify_certificate(&oracle).unwrap_err().check,
        Check::Oracle
    );
}

#[test]
fn bad_certificate_text_is_rejected() {
    let text = forged("const_sat").to_text();
    assert!(parse_certificate(&text.replacen("v1", "v2", 1)).is_err());
    assert!(parse_certificate(&text[..text.len() / 2]).is_err());
    assert!(parse_certificate(&format!("{text}extra\n")).is_err());
}

#[test]
fn scanning_classifier_never_fits_its_bound() {
    let err = forge(&classifier("scan_all"), ForgeOptions::with_cap(1 << 10)).unwrap_err();
    let DiagonalError::BoundNotFound { transcript } = err else {
        panic!("expected BoundNotFound")
    };
    let ts: Vec<usize> = transcript.iter().map(|e| e.t).collect();
    assert_eq!(ts, [4, 8, 16, 32, 64, 128, 256, 512, 1024]);
    assert!(transcript
        .iter()
        .all(|e| e.measurement == Measurement::Exceeded));
}

#[test]
fn slow_classifier_reports_the_gap() {
    // Halts, but only after a countdown longer than every bound tried.
    let c = parse_assembly(
        ".word_bits 24\n.memory 16777216\n.input\nLOADI r0, 100000\nLOADI r1, 1\nloop:\nJZ r0, out\nSUB r0, r1\nJMP loop\nout:\nHALT_ACCEPT\n",
    )
    .unwrap();
    let err = forge(&c, ForgeOptions::with_cap(64)).unwrap_err();
    assert!(matches!(err, DiagonalError::BoundNotFound { .. }));
}

#[test]
fn unusable_classifier_is_a_construction_error() {
    let c = parse_assembly("HALT_ACCEPT\n").unwrap();
    assert!(matches!(
        forge(&c, ForgeOptions::with_cap(64)),
        Err(DiagonalError::Construction(_))
    ));
}

#[test]
fn finite_spaces_up_to_three_are_exhausted() {
    for k in 2..=3 {
        let space = FiniteSpace::self_describing(k);
        let tables = ClassifierTable::all(k);
        assert_eq!(tables.len(), 1 << k);
        for table in &tables {
            let r = finite_fixed_point(&space, table).unwrap();
            assert!(r.misclassified);
            assert!(r.branches.unwrap().iter().all(|b| b.fails));
        }
    }
}
