use crate::error::{Error, Result};

/// Coordinate axes of the ansatz, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    T,
    Q,
    P,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::T => 0,
            Axis::Q => 1,
            Axis::P => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::T => "t",
            Axis::Q => "q",
            Axis::P => "p",
        }
    }
}

/// `c · t^a q^b p^c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: [u32; 3],
}

impl Monomial {
    pub fn constant(c: f64) -> Self {
        Self { coeff: c, powers: [0; 3] }
    }

    pub fn new(coeff: f64, t: u32, q: u32, p: u32) -> Self {
        Self { coeff, powers: [t, q, p] }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        (0..3).fold(self.coeff, |acc, i| acc * x[i].powi(self.powers[i] as i32))
    }
}

/// Polynomial coefficient function of `(t, q, p)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly3 {
    pub monomials: Vec<Monomial>,
}

impl Poly3 {
    pub fn constant(c: f64) -> Self {
        Self { monomials: vec![Monomial::constant(c)] }
    }

    pub fn monomial(coeff: f64, t: u32, q: u32, p: u32) -> Self {
        Self { monomials: vec![Monomial::new(coeff, t, q, p)] }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.monomials.iter().map(|m| m.eval(x)).sum()
    }

    pub fn mul(&self, other: &Poly3) -> Poly3 {
        let mut out = Vec::with_capacity(self.monomials.len() * other.monomials.len());
        for a in &self.monomials {
            for b in &other.monomials {
                let powers = [a.powers[0] + b.powers[0], a.powers[1] + b.powers[1], a.powers[2] + b.powers[2]];
                match out.iter_mut().find(|m: &&mut Monomial| m.powers == powers) {
                    Some(m) => m.coeff += a.coeff * b.coeff,
                    None => out.push(Monomial { coeff: a.coeff * b.coeff, powers }),
                }
            }
        }
        out.retain(|m| m.coeff != 0.0);
        Poly3 { monomials: out }
    }
}

/// `(∂_t^{o0} ∂_q^{o1} ∂_p^{o2} u_component)^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub component: usize,
    pub orders: [usize; 3],
    /// Must be a non-negative integer; anything else is outside the polynomial class.
    pub power: f64,
}

impl Factor {
    pub fn new(component: usize, orders: [usize; 3]) -> Self {
        Self { component, orders, power: 1.0 }
    }

    pub fn unknown(component: usize) -> Self {
        Self::new(component, [0; 3])
    }
}

/// One summand of equation `equation`: coefficient times a product of unknown factors.
/// An empty factor list is a source term.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub equation: usize,
    pub coefficient: Poly3,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn linear(equation: usize, coefficient: Poly3, component: usize, orders: [usize; 3]) -> Self {
        Self { equation, coefficient, factors: vec![Factor::new(component, orders)] }
    }

    pub fn source(equation: usize, coefficient: Poly3) -> Self {
        Self { equation, coefficient, factors: Vec::new() }
    }

    /// Factor list with integer powers expanded into repeated factors.
    pub(crate) fn expanded_factors(&self) -> Result<Vec<Factor>> {
        let mut out = Vec::new();
        for f in &self.factors {
            if !(f.power >= 0.0 && f.power.fract() == 0.0 && f.power <= 16.0) {
                return Err(Error::UnsupportedNonlinearity(format!(
                    "power {} of u{} is not a non-negative integer",
                    f.power, f.component
                )));
            }
            for _ in 0..f.power as usize {
                out.push(Factor { power: 1.0, ..*f });
            }
        }
        Ok(out)
    }
}

/// `N(u) / Q(u)` added to one equation; both parts are term lists.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPart {
    pub equation: usize,
    pub numerator: Vec<Term>,
    pub denominator: Vec<Term>,
}

/// `L(u) = Σ terms + Σ rational parts = 0` for a `components`-vector of unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub components: usize,
    pub terms: Vec<Term>,
    pub rational: Vec<RationalPart>,
}

impl OperatorSpec {
    pub fn new(components: usize, terms: Vec<Term>) -> Self {
        Self { components, terms, rational: Vec::new() }
    }

    /// Polynomial degree in the unknowns (after clearing denominators).
    pub fn degree(&self) -> Result<usize> {
        let (cleared, _) = clear_denominator(self);
        let mut d = 0;
        for t in &cleared.terms {
            d = d.max(t.expanded_factors()?.len());
        }
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components == 0 {
            return Err(Error::InvalidArgument("operator needs at least one component".into()));
        }
        let rational_terms = self.rational.iter().flat_map(|r| r.numerator.iter().chain(&r.denominator));
        for t in self.terms.iter().chain(rational_terms) {
            if t.factors.iter().any(|f| f.component >= self.components) {
                return Err(Error::InvalidArgument(format!(
                    "term references a component outside 0..{}",
                    self.components
                )));
            }
            if t.coefficient.monomials.iter().any(|m| !m.coeff.is_finite()) {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
            t.expanded_factors()?;
        }
        let eq_ok = self.terms.iter().map(|t| t.equation).chain(self.rational.iter().map(|r| r.equation));
        if eq_ok.clone().any(|e| e >= self.components) {
            return Err(Error::InvalidArgument(format!("equation index outside 0..{}", self.components)));
        }
        if self.rational.iter().any(|r| r.denominator.is_empty()) {
            return Err(Error::InvalidArgument("empty denominator".into()));
        }
        Ok(())
    }

    /// Harmonic Liouville flow `∂_t W = −(p/m) ∂_q W + m ω² q ∂_p W`.
    pub fn harmonic_liouville(mass: f64, omega: f64) -> Self {
        Self::new(
            1,
            vec![
                Term::linear(0, Poly3::constant(1.0), 0, [1, 0, 0]),
                Term::linear(0, Poly3::monomial(1.0 / mass, 0, 0, 1), 0, [0, 1, 0]),
                Term::linear(0, Poly3::monomial(-mass * omega * omega, 0, 1, 0), 0, [0, 0, 1]),
            ],
        )
    }
}

fn product(a: &Term, b: &Term, equation: usize) -> Term {
    let mut factors = a.factors.clone();
    factors.extend_from_slice(&b.factors);
    Term { equation, coefficient: a.coefficient.mul(&b.coefficient), factors }
}

/// Multiplies each equation through by the denominators of its rational parts, giving a
/// purely polynomial operator with the same zero set away from poles.
///
/// Also returns, per equation, the product of the denominators that are free of unknowns;
/// those are the ones that can be checked for poles before solving.
pub fn clear_denominator(op: &OperatorSpec) -> (OperatorSpec, Vec<Option<Poly3>>) {
    let mut terms = op.terms.clone();
    let mut checkable: Vec<Option<Poly3>> = vec![None; op.components];
    for part in &op.rational {
        let e = part.equation;
        // P + N/Q = 0  becomes  P·Q + N = 0
        let mut next: Vec<Term> = terms.iter().filter(|t| t.equation != e).cloned().collect();
        for t in terms.iter().filter(|t| t.equation == e) {
            for q in &part.denominator {
                next.push(product(t, q, e));
            }
        }
        next.extend(part.numerator.iter().map(|t| Term { equation: e, ..t.clone() }));
        terms = next;
        if part.denominator.iter().all(|t| t.factors.is_empty()) {
            let q = Poly3 { monomials: part.denominator.iter().flat_map(|t| t.coefficient.monomials.clone()).collect() };
            checkable[e] = Some(match checkable[e].take() {
                Some(prev) => prev.mul(&q),
                None => q,
            });
        }
    }
    (OperatorSpec { components: op.components, terms, rational: Vec::new() }, checkable)
}
