use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::certify::{certify_nonneg_on_ray, identity_certificate, shift_expansion, Certificate, Method, Status, Witness};
use super::poly::{rat, ratio, RationalPoly};
use crate::error::{GeomError, Result};

fn ni(n: usize) -> i64 {
    n as i64
}

/// c·tᵉ with integer c.
fn term(c: i64, e: usize) -> (BigRational, usize) {
    (rat(c), e)
}

/// tⁿ − 1
fn t_pow_minus_one(n: usize) -> RationalPoly {
    RationalPoly::from_terms(&[term(1, n), term(-1, 0)])
}

/// g₀ = t^{2n} − n t^{n+1} + n t^{n−1} − 1
fn g0(n: usize) -> RationalPoly {
    let n_ = ni(n);
    RationalPoly::from_terms(&[term(1, 2 * n), term(-n_, n + 1), term(n_, n - 1), term(-1, 0)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Polys {
    pub f1: RationalPoly,
    pub f2: RationalPoly,
    pub g: RationalPoly,
    pub h: RationalPoly,
}

pub fn lemma1_polys(n: usize) -> Result<Lemma1Polys> {
    if n < 2 {
        return Err(GeomError::Input(format!("dimension must be at least 2, got {n}")));
    }
    let n_ = ni(n);
    let sq = n_ * n_;
    Ok(Lemma1Polys {
        f1: RationalPoly::from_terms(&[term(1, n), term(-n_, 1), term(n_ - 1, 0)]),
        f2: RationalPoly::from_terms(&[term(n_ - 1, n), term(-n_, n - 1), term(1, 0)]),
        g: RationalPoly::from_terms(&[
            term(1, 2 * n),
            term(-sq, n + 1),
            term(2 * sq - 2, n),
            term(-sq, n - 1),
            term(1, 0),
        ]),
        h: RationalPoly::from_terms(&[
            term(2, n + 1),
            term(-n_ * (n_ + 1), 2),
            term(2 * sq - 2, 1),
            term(-n_ * (n_ - 1), 0),
        ]),
    })
}

/// Numerators of x and y over (n+1)(tⁿ−1)² for the truncated cone of ratio t.
fn xy_numerators(n: usize) -> (RationalPoly, RationalPoly) {
    let n_ = ni(n);
    let x = RationalPoly::from_terms(&[term(1, 2 * n), term(-(n_ + 1), n), term(n_, n - 1)]);
    let y = RationalPoly::from_terms(&[term(n_, n + 1), term(-(n_ + 1), n), term(1, 0)]);
    (x, y)
}

fn chain_certificate(n: usize, target: &str, witness: Witness) -> Certificate {
    let failed: Vec<String> = witness.failed_checks().into_iter().map(String::from).collect();
    Certificate {
        n,
        target: target.to_string(),
        method: Method::DerivativeChain,
        status: if failed.is_empty() { Status::ProvenNonneg } else { Status::Failed },
        failed_stage: (!failed.is_empty()).then(|| format!("{target} chain: {}", failed.join("; "))),
        witness,
    }
}

fn tk(k: usize) -> RationalPoly {
    RationalPoly::monomial(BigRational::one(), k)
}

/// Derivative-chain certificates for f₁, f₂, h, g, each with the identity
/// tying it to the corresponding range bound.
pub fn lemma1_chain(n: usize) -> Result<Vec<Certificate>> {
    let Lemma1Polys { f1, f2, g, h } = lemma1_polys(n)?;
    let n_ = ni(n);
    let one = BigRational::one();
    let d = t_pow_minus_one(n).pow(2);
    let (num_x, num_y) = xy_numerators(n);

    let mut w = Witness::default();
    w.check("f1(1) = 0", f1.evaluate(&one).is_zero());
    let f1d = f1.derivative();
    w.check("f1' = n(t^(n-1) - 1)", f1d == (&tk(n - 1) - &RationalPoly::one()).scale(&rat(n_)));
    w.check("f1'(1+s) has nonnegative coefficients", shift_expansion(n, "f1'", &f1d).proven());
    w.check("(t^n-1)^2 - num_y = t^n f1", &d - &num_y == &tk(n) * &f1);
    let c_f1 = chain_certificate(n, "f1", w);

    let mut w = Witness::default();
    w.check("f2(1) = 0", f2.evaluate(&one).is_zero());
    let expected = (&tk(n - 2) * &RationalPoly::from_ints(&[-1, 1])).scale(&rat(n_ * (n_ - 1)));
    w.check("f2' = n(n-1) t^(n-2) (t-1)", f2.derivative() == expected);
    w.check("(t^n-1)^2 - num_x = f2", &d - &num_x == f2);
    let c_f2 = chain_certificate(n, "f2", w);

    let mut w = Witness::default();
    w.check("h(1) = 0", h.evaluate(&one).is_zero());
    w.check("h'(1) = 0", h.derivative().evaluate(&one).is_zero());
    w.check("h' = 2(n+1) f1", h.derivative() == f1.scale(&rat(2 * (n_ + 1))));
    w.check(
        "h'' = 2n(n+1)(t^(n-1) - 1)",
        h.nth_derivative(2) == (&tk(n - 1) - &RationalPoly::one()).scale(&rat(2 * n_ * (n_ + 1))),
    );
    w.check("f1 >= 0", c_f1.proven());
    let c_h = chain_certificate(n, "h", w);

    let mut w = Witness::default();
    w.check("g(1) = 0", g.evaluate(&one).is_zero());
    w.check("g'(1) = 0", g.derivative().evaluate(&one).is_zero());
    w.check("g' = n t^(n-2) h", g.derivative() == (&tk(n - 2) * &h).scale(&rat(n_)));
    let printed = RationalPoly::from_terms(&[
        term(2 * n_, 2 * n - 1),
        term(-n_ * n_ * (n_ + 1), n),
        term(n_ * (2 * n_ * n_ - 2), n - 1),
        term(-n_ * n_ * (n_ - 1), n - 2),
    ]);
    w.check("g' equals its expanded form", g.derivative() == printed);
    let lhs = &d.scale(&rat(n_ + 1)) - &(&num_x + &num_y).scale(&rat(n_));
    w.check("(n+1)(t^n-1)^2 - n(num_x + num_y) = g", lhs == g);
    w.check("h >= 0", c_h.proven());
    let c_g = chain_certificate(n, "g", w);

    Ok(vec![c_f1, c_f2, c_g, c_h])
}

/// Direct nonnegativity certificates for f₁, f₂, g, h.
pub fn lemma1_direct(n: usize) -> Result<Vec<Certificate>> {
    let Lemma1Polys { f1, f2, g, h } = lemma1_polys(n)?;
    Ok(vec![
        certify_nonneg_on_ray(n, "f1", &f1),
        certify_nonneg_on_ray(n, "f2", &f2),
        certify_nonneg_on_ray(n, "g", &g),
        certify_nonneg_on_ray(n, "h", &h),
    ])
}

/// The fourteen-term polynomial whose nonnegativity on [1, ∞) is
/// equivalent to F/G being nonincreasing.
pub fn build_p1(n: usize) -> Result<RationalPoly> {
    if n < 3 {
        return Err(GeomError::Input(format!("p1 is defined for n >= 3, got {n}")));
    }
    let n_ = ni(n);
    let (n2, n3) = (n_ * n_, n_ * n_ * n_);
    let c = [
        2 * n_ - 2,
        2 * n3 - 2 * n2 - 2 * n_ + 2,
        n3 - n_,
        2 * n3 - 2 * n2 - 4,
        2 * n2 - 4 * n_ - 6,
        n3 - 2 * n2 + n_,
        2 * n_ + 2,
    ];
    let plus = [3 * n, 2 * n + 1, 2 * n - 2, n + 1, n, n - 2, 1];
    let minus = [0, n - 1, n + 2, 2 * n - 1, 2 * n, 2 * n + 2, 3 * n - 1];
    let mut terms = Vec::with_capacity(14);
    for k in 0..7 {
        terms.push(term(c[k], plus[k]));
        terms.push(term(-c[k], minus[k]));
    }
    Ok(RationalPoly::from_terms(&terms))
}

/// F = (tⁿ−1)^{2n} − n² t^{n−1}(t−1)²(tⁿ−1)^{2n−2}, G = g₀ⁿ.
pub fn build_fg(n: usize) -> Result<(RationalPoly, RationalPoly)> {
    if n < 2 {
        return Err(GeomError::Input(format!("dimension must be at least 2, got {n}")));
    }
    let base = t_pow_minus_one(n);
    let low = base.pow(2 * n - 2);
    let inner = &base.pow(2) - &(&tk(n - 1) * &RationalPoly::from_ints(&[-1, 1]).pow(2)).scale(&rat(ni(n * n)));
    let f = &low * &inner;
    let g = g0(n).pow(n);
    Ok((f, g))
}

/// Exact check of G′F − F′G = n² t^{n−1} (tⁿ−1)^{2n−3} g₀^{n−1} · p₁, the
/// positive factor that turns F′/F ≤ G′/G into p₁ ≥ 0.
pub fn p1_factor_identity(n: usize, f: &RationalPoly, g: &RationalPoly, p1: &RationalPoly) -> bool {
    let lhs = &(&g.derivative() * f) - &(&f.derivative() * g);
    let factor = &(&tk(n - 1) * &t_pow_minus_one(n).pow(2 * n - 3)) * &g0(n).pow(n - 1);
    lhs == (&factor * p1).scale(&rat(ni(n * n)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub p2: RationalPoly,
    pub p3: RationalPoly,
    pub p4: RationalPoly,
    /// p₂^{(m)}(1), m = 0..4.
    pub p2_values: Vec<BigRational>,
    /// p₃^{(m)}(1), m = 0..5.
    pub p3_values: Vec<BigRational>,
    /// p₄′ (a constant polynomial when the chain is consistent).
    pub p4_derivative: RationalPoly,
}

/// p₂ = p₁″/t^{n−4}, p₃ = p₂⁽⁵⁾/t^{n−5}, p₄ = p₃⁽⁵⁾/t^{n−4}; negative
/// exponents multiply.
pub fn chain_p2_p3_p4(n: usize, p1: &RationalPoly) -> Result<Chain> {
    if n < 3 {
        return Err(GeomError::Input(format!("the p-chain is defined for n >= 3, got {n}")));
    }
    let n_ = ni(n);
    let step = |p: &RationalPoly, k: i64, name: &str| {
        p.shift_by_monomial(k)
            .map_err(|e| GeomError::Invariant(format!("{name} is not a polynomial: {e}")))
    };
    let p2 = step(&p1.nth_derivative(2), 4 - n_, "p2")?;
    let p3 = step(&p2.nth_derivative(5), 5 - n_, "p3")?;
    let p4 = step(&p3.nth_derivative(5), 4 - n_, "p4")?;
    let one = BigRational::one();
    let p2_values = (0..=4).map(|m| p2.nth_derivative(m).evaluate(&one)).collect();
    let p3_values = (0..=5).map(|m| p3.nth_derivative(m).evaluate(&one)).collect();
    let p4_derivative = p4.derivative();
    Ok(Chain {
        p2,
        p3,
        p4,
        p2_values,
        p3_values,
        p4_derivative,
    })
}

/// Expected closed forms of p₃^{(m)}(1), m = 0..5.
pub fn p3_closed_forms(n: usize) -> Vec<BigRational> {
    let x = rat(ni(n));
    let poly = |c: &[i64]| c.iter().rev().fold(BigRational::zero(), |acc, &k| acc * &x + rat(k));
    let base = poly(&[0, 1]).pow(2) * poly(&[-1, 1]).pow(2) * poly(&[1, 1]).pow(2) * poly(&[-2, 1]);
    let half_up = &x + ratio(1, 2);
    let half_down = &x - ratio(1, 2);
    let third_down = &x - ratio(1, 3);
    vec![
        rat(140) * &base,
        rat(140) * &base * poly(&[1, 5]),
        &base * poly(&[336, 1344, 1568]),
        &base * &half_up * poly(&[1344, 1456, 2352]),
        &base * &half_up * poly(&[1056, 2608, -848, 2976]),
        &base * &half_up * half_down * third_down * poly(&[-1728, -5742, 3552]),
    ]
}

/// Expected value of the constant p₄′.
pub fn p4_closed_form(n: usize) -> BigRational {
    let n_ = ni(n);
    let factors = [
        2 * n_ - 2,
        3 * n_,
        3 * n_ - 1,
        2 * n_ + 2,
        2 * n_ + 1,
        2 * n_,
        2 * n_ - 1,
        2 * n_ - 2,
        n_ + 2,
        n_ + 1,
        n_,
        n_ - 1,
        n_ - 2,
    ];
    factors.iter().fold(BigRational::one(), |acc, &f| acc * rat(f))
}

/// Which routes `verify_lemma2` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Chain,
    Sturm,
    Both,
}

impl Route {
    fn chain(self) -> bool {
        matches!(self, Route::Chain | Route::Both)
    }

    fn direct(self) -> bool {
        matches!(self, Route::Sturm | Route::Both)
    }
}

/// The derivative-chain certificate for p₁ ≥ 0 on [1, ∞).
pub fn p1_chain_certificate(n: usize, p1: &RationalPoly, fg: Option<&(RationalPoly, RationalPoly)>) -> Certificate {
    let mut w = Witness::default();
    if let Some((f, g)) = fg {
        w.check(
            "G'F - F'G = n^2 t^(n-1) (t^n-1)^(2n-3) g0^(n-1) p1",
            p1_factor_identity(n, f, g, p1),
        );
    }
    let one = BigRational::one();
    for m in 0..=2 {
        let v = p1.nth_derivative(m).evaluate(&one);
        w.value(format!("p1^({m})(1)"), &v);
        w.check(format!("p1^({m})(1) = 0"), v.is_zero());
    }
    let chain = match chain_p2_p3_p4(n, p1) {
        Ok(c) => c,
        Err(e) => {
            w.check(format!("chain divisibility: {e}"), false);
            return chain_certificate(n, "p1", w);
        }
    };
    for (m, v) in chain.p2_values.iter().enumerate() {
        w.value(format!("p2^({m})(1)"), v);
        w.check(format!("p2^({m})(1) = 0"), v.is_zero());
    }
    let expected = p3_closed_forms(n);
    for (m, v) in chain.p3_values.iter().enumerate() {
        w.value_vs_expected(format!("p3^({m})(1)"), v, &expected[m]);
        w.check(format!("p3^({m})(1) > 0"), v.is_positive());
    }
    let constant = chain.p4_derivative.degree().unwrap_or(0) == 0;
    w.check("p4' is constant", constant);
    let c = chain.p4_derivative.coeff(0);
    w.value_vs_expected("p4'", &c, &p4_closed_form(n));
    w.check("p4' > 0", c.is_positive());
    chain_certificate(n, "p1", w)
}

/// The key-ratio inequality for one n: certificates for the routes requested, followed by
/// a summary certificate with target "lemma2".
pub fn verify_lemma2(n: usize, route: Route) -> Result<Vec<Certificate>> {
    let p1 = build_p1(n)?;
    verify_lemma2_with(n, &p1, route)
}

/// As [`verify_lemma2`] with a caller-supplied p₁ (fault injection).
pub fn verify_lemma2_with(n: usize, p1: &RationalPoly, route: Route) -> Result<Vec<Certificate>> {
    if n < 3 {
        return Err(GeomError::Input(format!("the key inequality is stated for n >= 3, got {n}")));
    }
    let fg = build_fg(n)?;
    let mut out = Vec::new();
    if route.chain() {
        out.push(p1_chain_certificate(n, p1, Some(&fg)));
    }
    if route.direct() {
        let diff = &fg.0 - &fg.1;
        let mut c = certify_nonneg_on_ray(n, "F-G", &diff);
        c.witness.value("(F-G)(2)", &diff.evaluate(&rat(2)));
        out.push(c);
    }
    let failed: Vec<String> = out
        .iter()
        .filter(|c| !c.proven())
        .map(|c| c.failed_stage.clone().unwrap_or_else(|| c.target.clone()))
        .collect();
    let mut w = Witness::default();
    for c in &out {
        w.check(format!("{} certificate", c.target), c.proven());
        w.closed_form_mismatches.extend(c.witness.closed_form_mismatches.iter().cloned());
    }
    let summary = Certificate {
        n,
        target: "lemma2".into(),
        method: if route.chain() { Method::DerivativeChain } else { out[0].method },
        status: if failed.is_empty() { Status::ProvenNonneg } else { Status::Failed },
        witness: w,
        failed_stage: (!failed.is_empty()).then(|| failed.join("; ")),
    };
    out.push(summary);
    Ok(out)
}

/// F − G ≡ 0 in dimension two.
pub fn n2_identity() -> Certificate {
    let (f, g) = build_fg(2).expect("n = 2 is valid");
    identity_certificate(2, "F-G", &(&f - &g))
}
