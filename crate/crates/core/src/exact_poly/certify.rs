use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{rat, RationalPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ShiftExpansion,
    Sturm,
    DerivativeChain,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ProvenNonneg,
    ProvenIdentity,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_expected: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Coefficients of p(1 + s): how many, how many negative, lowest degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_coefficients: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_negative: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_lowest_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_multiplicity_at_one: Option<usize>,
    /// Distinct roots of p/(t−1)^m in (1, ∞).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sturm_roots_on_ray: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sturm_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_at_two: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<NamedCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<NamedValue>,
    /// Names of computed values that differ from their expected closed forms.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub closed_form_mismatches: Vec<String>,
}

impl Witness {
    pub fn check(&mut self, name: impl Into<String>, holds: bool) -> bool {
        self.checks.push(NamedCheck {
            name: name.into(),
            holds,
        });
        holds
    }

    pub fn value(&mut self, name: impl Into<String>, value: &BigRational) {
        self.values.push(NamedValue {
            name: name.into(),
            value: value.to_string(),
            expected: None,
            matches_expected: None,
        });
    }

    pub fn value_vs_expected(&mut self, name: impl Into<String>, value: &BigRational, expected: &BigRational) {
        let name = name.into();
        let ok = value == expected;
        if !ok {
            self.closed_form_mismatches.push(name.clone());
        }
        self.values.push(NamedValue {
            name,
            value: value.to_string(),
            expected: Some(expected.to_string()),
            matches_expected: Some(ok),
        });
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub target: String,
    pub method: Method,
    pub status: Status,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
}

impl Certificate {
    pub fn proven(&self) -> bool {
        self.status != Status::Failed
    }
}

/// Expands p(1 + s); proven when every coefficient is ≥ 0 (and p ≠ 0).
pub fn shift_expansion(n: usize, target: &str, p: &RationalPoly) -> Certificate {
    let shifted = p.taylor_shift(&BigRational::one());
    let negative = shifted.coeffs().iter().filter(|c| c.is_negative()).count();
    let witness = Witness {
        shift_coefficients: Some(shifted.coeffs().len()),
        shift_negative: Some(negative),
        shift_lowest_degree: shifted.lowest_degree(),
        ..Witness::default()
    };
    let ok = negative == 0 && !p.is_zero();
    Certificate {
        n,
        target: target.to_string(),
        method: Method::ShiftExpansion,
        status: if ok { Status::ProvenNonneg } else { Status::Failed },
        witness,
        failed_stage: (!ok).then(|| "shift-expansion has negative coefficients".to_string()),
    }
}

/// Sturm chain with every member scaled to a primitive integer polynomial;
/// positive scaling keeps the sign pattern.
pub fn sturm_sequence(p: &RationalPoly) -> Vec<RationalPoly> {
    let mut seq = vec![p.primitive()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d.primitive());
    loop {
        let k = seq.len();
        let r = seq[k - 2].div_rem(&seq[k - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push((-&r).primitive());
    }
    seq
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign(c: &BigRational) -> i8 {
    if c.is_zero() {
        0
    } else if c.is_negative() {
        -1
    } else {
        1
    }
}

/// Number of distinct real roots of `p` in (a, ∞); requires p(a) ≠ 0.
pub fn roots_above(seq: &[RationalPoly], a: &BigRational) -> usize {
    let at_a = variations(seq.iter().map(|q| sign(&q.evaluate(a))));
    let at_inf = variations(seq.iter().map(|q| sign(&q.leading())));
    at_a - at_inf
}

/// Sturm certificate for p ≥ 0 on [1, ∞): after removing the root at 1,
/// no root remains in (1, ∞) and p(2) > 0.
pub fn sturm_certificate(n: usize, target: &str, p: &RationalPoly) -> Certificate {
    let (q, m) = p.deflate_at_one();
    let mut witness = Witness {
        root_multiplicity_at_one: Some(m),
        ..Witness::default()
    };
    let fail = |witness: Witness, why: &str| Certificate {
        n,
        target: target.to_string(),
        method: Method::Sturm,
        status: Status::Failed,
        witness,
        failed_stage: Some(why.to_string()),
    };
    if p.is_zero() {
        return fail(witness, "zero polynomial");
    }
    let seq = sturm_sequence(&q);
    let roots = roots_above(&seq, &BigRational::one());
    let at_two = p.evaluate(&rat(2));
    witness.sturm_roots_on_ray = Some(roots);
    witness.sturm_length = Some(seq.len());
    witness.value_at_two = Some(at_two.to_string());
    if roots != 0 {
        return fail(witness, "root in (1, inf)");
    }
    if !at_two.is_positive() {
        return fail(witness, "p(2) is not positive");
    }
    Certificate {
        n,
        target: target.to_string(),
        method: Method::Sturm,
        status: Status::ProvenNonneg,
        witness,
        failed_stage: None,
    }
}

/// p ≥ 0 on [1, ∞): shift expansion first, Sturm as fallback.
pub fn certify_nonneg_on_ray(n: usize, target: &str, p: &RationalPoly) -> Certificate {
    let fast = shift_expansion(n, target, p);
    if fast.proven() {
        return fast;
    }
    let mut slow = sturm_certificate(n, target, p);
    slow.witness.shift_coefficients = fast.witness.shift_coefficients;
    slow.witness.shift_negative = fast.witness.shift_negative;
    slow.witness.shift_lowest_degree = fast.witness.shift_lowest_degree;
    slow
}

/// Proven identity iff `p` is the zero polynomial.
pub fn identity_certificate(n: usize, target: &str, p: &RationalPoly) -> Certificate {
    let mut witness = Witness::default();
    let ok = witness.check(format!("{target} is the zero polynomial"), p.is_zero());
    Certificate {
        n,
        target: target.to_string(),
        method: Method::Identity,
        status: if ok { Status::ProvenIdentity } else { Status::Failed },
        witness,
        failed_stage: (!ok).then(|| format!("{target} has degree {:?}", p.degree())),
    }
}
