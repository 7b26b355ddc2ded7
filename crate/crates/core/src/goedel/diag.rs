use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::{code, decode_formula, Formula, GoedelCode, GoedelError, Term};

/// Binary numeral with the least significant digit outermost:
/// `numeral(6) = b0(b1(b1(0)))`.
pub fn numeral(n: &BigUint) -> Term {
    let mut t = Term::Zero;
    for i in (0..n.bits()).rev() {
        t = if n.bit(i) {
            Term::B1(Box::new(t))
        } else {
            Term::B0(Box::new(t))
        };
    }
    t
}

/// Standard-model value of `t`, with `D` read as [`delta`].
pub fn denote(t: &Term, env: &BTreeMap<String, BigUint>) -> Result<BigUint, GoedelError> {
    Ok(match t {
        Term::Zero => BigUint::zero(),
        Term::B0(t) => denote(t, env)? << 1u32,
        Term::B1(t) => (denote(t, env)? << 1u32) + 1u32,
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| GoedelError::UnboundVariable(v.clone()))?,
        Term::Succ(t) => denote(t, env)? + 1u32,
        Term::Plus(a, b) => denote(a, env)? + denote(b, env)?,
        Term::Times(a, b) => denote(a, env)? * denote(b, env)?,
        Term::Diag(t) => delta(&denote(t, env)?),
    })
}

/// Code of `decode(n)` with its free variable replaced by `numeral(n)`.
pub fn self_subst(n: &GoedelCode) -> Result<GoedelCode, GoedelError> {
    let f = decode_formula(n)?;
    let v = f.sole_free_var()?;
    Ok(code(&f.substitute(&v, &numeral(&n.0))))
}

/// [`self_subst`] made total: zero wherever it is undefined.
pub fn delta(n: &BigUint) -> BigUint {
    self_subst(&GoedelCode(n.clone()))
        .map(|g| g.0)
        .unwrap_or_default()
}

/// Evidence that `psi` is a fixed point of `theta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalCertificate {
    pub theta: Formula,
    pub var: String,
    /// `theta` with its variable replaced by `D(var)`.
    pub beta: Formula,
    pub beta_code: GoedelCode,
    pub psi: Formula,
    pub psi_code: GoedelCode,
    /// Value of the term `D(numeral(beta_code))` occurring in `psi`.
    pub delta_value: BigUint,
}

impl DiagonalCertificate {
    /// Recomputes every recorded value and checks `δ(code(β)) = code(ψ)`.
    pub fn check(&self) -> bool {
        let Ok(var) = self.theta.sole_free_var() else {
            return false;
        };
        let beta = self
            .theta
            .substitute(&var, &Term::Diag(Box::new(Term::Var(var.clone()))));
        let diag_term = Term::Diag(Box::new(numeral(&self.beta_code.0)));
        var == self.var
            && beta == self.beta
            && code(&beta) == self.beta_code
            && self.beta.substitute(&var, &numeral(&self.beta_code.0)) == self.psi
            && self.psi.free_vars().is_empty()
            && code(&self.psi) == self.psi_code
            && denote(&diag_term, &BTreeMap::new()).as_ref() == Ok(&self.delta_value)
            && self.delta_value == self.psi_code.0
    }
}

/// Builds `ψ = θ[x := D(⌜β⌝)]` where `β = θ[x := D(x)]`, so the term inside
/// `ψ` denotes `ψ`'s own code.
pub fn diagonalize(theta: &Formula) -> Result<DiagonalCertificate, GoedelError> {
    let var = theta.sole_free_var()?;
    let beta = theta.substitute(&var, &Term::Diag(Box::new(Term::Var(var.clone()))));
    let beta_code = code(&beta);
    let psi = beta.substitute(&var, &numeral(&beta_code.0));
    let psi_code = code(&psi);
    let delta_value = denote(
        &Term::Diag(Box::new(numeral(&beta_code.0))),
        &BTreeMap::new(),
    )?;
    Ok(DiagonalCertificate {
        theta: theta.clone(),
        var,
        beta,
        beta_code,
        psi,
        psi_code,
        delta_value,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatryoshkaMember {
    pub n: usize,
    pub certificate: DiagonalCertificate,
}

impl MatryoshkaMember {
    pub fn sentence(&self) -> &Formula {
        &self.certificate.psi
    }
}

/// Fixed points of `~Prov(x + n)` for `n < n_max`.
pub fn matryoshka_family(n_max: usize) -> Vec<MatryoshkaMember> {
    (0..n_max)
        .map(|n| {
            let offset = numeral(&BigUint::from(n));
            let theta = Formula::Not(Box::new(Formula::Prov(Term::Plus(
                Box::new(Term::Var("x".into())),
                Box::new(offset),
            ))));
            MatryoshkaMember {
                n,
                certificate: diagonalize(&theta).expect("one free variable"),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::tests::arb_formula;
    use super::super::Syntax;
    use super::*;
    use proptest::prelude::*;

    fn x() -> Term {
        Term::Var("x".into())
    }

    #[test]
    fn numerals() {
        assert_eq!(numeral(&BigUint::zero()), Term::Zero);
        let five = Term::B1(Box::new(Term::B0(Box::new(Term::B1(Box::new(Term::Zero))))));
        assert_eq!(numeral(&BigUint::from(5u32)), five);
        let six = Term::B0(Box::new(Term::B1(Box::new(Term::B1(Box::new(Term::Zero))))));
        assert_eq!(numeral(&BigUint::from(6u32)), six);
    }

    #[test]
    fn self_subst_of_x_equals_x() {
        let f = Formula::Eq(x(), x());
        let n = code(&f);
        let m = numeral(&n.0);
        assert_eq!(self_subst(&n).unwrap(), code(&Formula::Eq(m.clone(), m)));
        assert!(self_subst(&code(&Formula::Prov(Term::Zero))).is_err());
        assert!(self_subst(&code(&Formula::Eq(x(), Term::Var("y".into())))).is_err());
        assert!(self_subst(&GoedelCode(BigUint::zero())).is_err());
    }

    #[test]
    fn diagonal_examples() {
        for theta in [
            Formula::Eq(x(), x()),
            Formula::Not(Box::new(Formula::Prov(x()))),
        ] {
            let c = diagonalize(&theta).unwrap();
            assert!(c.check());
            assert_eq!(c.delta_value, c.psi_code.0);
        }
        assert!(
            matches!(diagonalize(&Formula::Prov(Term::Zero)), Err(GoedelError::Arity(v)) if v.is_empty())
        );
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut c = diagonalize(&Formula::Prov(x())).unwrap();
        c.delta_value += 1u32;
        assert!(!c.check());
    }

    #[test]
    fn matryoshka_codes_distinct() {
        let fam = matryoshka_family(2);
        assert_ne!(fam[0].certificate.psi_code, fam[1].certificate.psi_code);
    }

    proptest! {
        #[test]
        fn numeral_denotes_its_value(n in any::<u64>()) {
            prop_assert_eq!(denote(&numeral(&BigUint::from(n)), &BTreeMap::new()).unwrap(), BigUint::from(n));
        }

        #[test]
        fn substitution_grows_the_code(f in arb_formula(3)) {
            let closed = f.free_vars().into_iter().fold(f.clone(), |g, v| g.substitute(&v, &Term::Zero));
            let theta = Formula::And(Box::new(closed), Box::new(Formula::Prov(x())));
            let n = code(&theta);
            let m = self_subst(&n).unwrap();
            prop_assert!(m.0 > n.0);
            prop_assert!(decode_formula(&m).unwrap().size() > theta.size());
        }
    }
}
