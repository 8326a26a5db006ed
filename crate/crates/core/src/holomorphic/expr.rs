use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::ComplexPoint;
use crate::domain::Domain;
use crate::error::{Error, Result};

/// Below this modulus a denominator counts as zero during evaluation.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// Below this modulus a denominator counts as vanishing on the validation net.
pub const NONVANISHING_FLOOR: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(Complex64),
    Var(usize),
    Sum(Box<Node>, Box<Node>),
    Product(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Quotient(Box<Node>, Box<Node>),
}

impl Node {
    fn as_const(&self) -> Option<Complex64> {
        match self {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn add(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::Const(x + y),
            (Some(x), _) if x == ZERO => b,
            (_, Some(y)) if y == ZERO => a,
            _ => Node::Sum(Box::new(a), Box::new(b)),
        }
    }

    fn mul(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == ZERO => Node::Const(ZERO),
            (Some(x), _) if x == ONE => b,
            (_, Some(y)) if y == ONE => a,
            _ => Node::Product(Box::new(a), Box::new(b)),
        }
    }

    fn pow(base: Node, e: u32) -> Node {
        match (e, base.as_const()) {
            (0, _) => Node::Const(ONE),
            (1, _) => base,
            (_, Some(c)) => Node::Const(c.powu(e)),
            _ => Node::Pow(Box::new(base), e),
        }
    }

    fn quot(n: Node, d: Node) -> Node {
        match (n.as_const(), d.as_const()) {
            (Some(x), _) if x == ZERO => Node::Const(ZERO),
            (_, Some(y)) if y == ONE => n,
            _ => Node::Quotient(Box::new(n), Box::new(d)),
        }
    }

    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var(k) => z[*k],
            Node::Sum(a, b) => a.eval(z)? + b.eval(z)?,
            Node::Product(a, b) => a.eval(z)? * b.eval(z)?,
            Node::Pow(b, e) => b.eval(z)?.powu(*e),
            Node::Quotient(n, d) => {
                let den = d.eval(z)?;
                if den.norm() < POLE_THRESHOLD {
                    return Err(Error::PoleAtPoint {
                        at: format!("{:?}", z),
                        modulus: den.norm(),
                    });
                }
                n.eval(z)? / den
            }
        })
    }

    fn derivative(&self, var: usize) -> Node {
        match self {
            Node::Const(_) => Node::Const(ZERO),
            Node::Var(k) => Node::Const(if *k == var { ONE } else { ZERO }),
            Node::Sum(a, b) => Node::add(a.derivative(var), b.derivative(var)),
            Node::Product(a, b) => Node::add(
                Node::mul(a.derivative(var), (**b).clone()),
                Node::mul((**a).clone(), b.derivative(var)),
            ),
            Node::Pow(b, e) => Node::mul(
                Node::mul(
                    Node::Const(Complex64::new(*e as f64, 0.0)),
                    Node::pow((**b).clone(), e - 1),
                ),
                b.derivative(var),
            ),
            Node::Quotient(n, d) => {
                let top = Node::add(
                    Node::mul(n.derivative(var), (**d).clone()),
                    Node::mul(Node::Const(-ONE), Node::mul((**n).clone(), d.derivative(var))),
                );
                Node::quot(top, Node::pow((**d).clone(), 2))
            }
        }
    }

    fn substitute_scaled(&self, t: Complex64) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Var(k) => Node::mul(Node::Const(t), Node::Var(*k)),
            Node::Sum(a, b) => Node::add(a.substitute_scaled(t), b.substitute_scaled(t)),
            Node::Product(a, b) => Node::mul(a.substitute_scaled(t), b.substitute_scaled(t)),
            Node::Pow(b, e) => Node::pow(b.substitute_scaled(t), *e),
            Node::Quotient(n, d) => Node::quot(n.substitute_scaled(t), d.substitute_scaled(t)),
        }
    }

    fn collect_denominators<'a>(&'a self, out: &mut Vec<&'a Node>) {
        match self {
            Node::Const(_) | Node::Var(_) => {}
            Node::Sum(a, b) | Node::Product(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Node::Pow(b, _) => b.collect_denominators(out),
            Node::Quotient(n, d) => {
                out.push(d);
                n.collect_denominators(out);
                d.collect_denominators(out);
            }
        }
    }

    fn to_rational(&self, dim: usize) -> (Polynomial, Polynomial) {
        match self {
            Node::Const(c) => (Polynomial::constant(dim, *c), Polynomial::one(dim)),
            Node::Var(k) => (Polynomial::var(dim, *k), Polynomial::one(dim)),
            Node::Sum(a, b) => {
                let (an, ad) = a.to_rational(dim);
                let (bn, bd) = b.to_rational(dim);
                if ad == bd {
                    (an.add(&bn), ad)
                } else {
                    (an.mul(&bd).add(&bn.mul(&ad)), ad.mul(&bd))
                }
            }
            Node::Product(a, b) => {
                let (an, ad) = a.to_rational(dim);
                let (bn, bd) = b.to_rational(dim);
                (an.mul(&bn), ad.mul(&bd))
            }
            Node::Pow(b, e) => {
                let (bn, bd) = b.to_rational(dim);
                (bn.pow(*e), bd.pow(*e))
            }
            Node::Quotient(n, d) => {
                let (nn, nd) = n.to_rational(dim);
                let (dn, dd) = d.to_rational(dim);
                (nn.mul(&dd), nd.mul(&dn))
            }
        }
    }

    fn fmt_into(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Node::Const(c) => write!(f, "({}{:+}i)", c.re, c.im),
            Node::Var(k) => write!(f, "z{}", k + 1),
            Node::Sum(a, b) => {
                write!(f, "(")?;
                a.fmt_into(f)?;
                write!(f, " + ")?;
                b.fmt_into(f)?;
                write!(f, ")")
            }
            Node::Product(a, b) => {
                a.fmt_into(f)?;
                write!(f, "*")?;
                b.fmt_into(f)
            }
            Node::Pow(b, e) => {
                b.fmt_into(f)?;
                write!(f, "^{}", e)
            }
            Node::Quotient(n, d) => {
                write!(f, "(")?;
                n.fmt_into(f)?;
                write!(f, ")/(")?;
                d.fmt_into(f)?;
                write!(f, ")")
            }
        }
    }
}

/// A polynomial or rational function of `dim` complex variables, stored as an
/// expression tree so that derivatives and dilations stay exact.
///
/// Variables are 0-based: `HoloExpr::var(2, 0)` is `z₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloExpr {
    dim: usize,
    node: Node,
}

impl HoloExpr {
    pub fn constant(dim: usize, c: Complex64) -> Self {
        assert!(dim >= 1, "expressions need at least one variable");
        HoloExpr {
            dim,
            node: Node::Const(c),
        }
    }

    pub fn real(dim: usize, x: f64) -> Self {
        Self::constant(dim, Complex64::new(x, 0.0))
    }

    pub fn zero(dim: usize) -> Self {
        Self::real(dim, 0.0)
    }

    pub fn one(dim: usize) -> Self {
        Self::real(dim, 1.0)
    }

    pub fn var(dim: usize, k: usize) -> Self {
        assert!(k < dim, "variable z{} out of range for dimension {}", k + 1, dim);
        HoloExpr {
            dim,
            node: Node::Var(k),
        }
    }

    /// `Σ c·z^powers` with one exponent vector per term.
    pub fn polynomial(dim: usize, terms: &[(Complex64, Vec<u32>)]) -> Result<Self> {
        let mut node = Node::Const(ZERO);
        for (c, powers) in terms {
            if powers.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: powers.len(),
                });
            }
            let mut mono = Node::Const(*c);
            for (k, &e) in powers.iter().enumerate() {
                mono = Node::mul(mono, Node::pow(Node::Var(k), e));
            }
            node = Node::add(node, mono);
        }
        Ok(HoloExpr { dim, node })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pow(self, e: u32) -> Self {
        HoloExpr {
            dim: self.dim,
            node: Node::pow(self.node, e),
        }
    }

    pub fn recip(self) -> Self {
        HoloExpr::one(self.dim) / self
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.node, Node::Const(_))
    }

    pub fn eval(&self, z: &ComplexPoint) -> Result<Complex64> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.dim(),
            });
        }
        self.node.eval(z.coords()).map_err(|e| match e {
            Error::PoleAtPoint { modulus, .. } => Error::PoleAtPoint {
                at: z.to_string(),
                modulus,
            },
            other => other,
        })
    }

    /// Symbolic `∂/∂z_var`.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.dim);
        HoloExpr {
            dim: self.dim,
            node: self.node.derivative(var),
        }
    }

    /// `z ↦ f(t·z)`, by substitution of every variable.
    pub fn dilate(&self, t: Complex64) -> Self {
        HoloExpr {
            dim: self.dim,
            node: self.node.substitute_scaled(t),
        }
    }

    /// Every quotient denominator in the tree, outermost first.
    pub fn denominators(&self) -> Vec<HoloExpr> {
        let mut out = Vec::new();
        self.node.collect_denominators(&mut out);
        out.into_iter()
            .map(|n| HoloExpr {
                dim: self.dim,
                node: n.clone(),
            })
            .collect()
    }

    /// Checks that no denominator comes within [`NONVANISHING_FLOOR`] of zero
    /// on the validation net of the closed domain.
    pub fn check_denominators(&self, domain: &Domain) -> Result<()> {
        let dens = self.denominators();
        if dens.is_empty() {
            return Ok(());
        }
        if domain.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: self.dim,
            });
        }
        let net = domain.closed_net();
        for d in &dens {
            ensure_nonvanishing(d, &net, domain.net_covering_radius(), "denominator")?;
        }
        Ok(())
    }

    /// Numerator and denominator polynomials of an equivalent rational form.
    pub fn to_rational(&self) -> (Polynomial, Polynomial) {
        self.node.to_rational(self.dim)
    }

    fn zip(self, rhs: HoloExpr, f: impl FnOnce(Node, Node) -> Node) -> HoloExpr {
        assert_eq!(self.dim, rhs.dim, "expressions over different numbers of variables");
        HoloExpr {
            dim: self.dim,
            node: f(self.node, rhs.node),
        }
    }
}

/// Fails unless `expr` provably stays away from zero on the region covered by
/// `net`.
///
/// Every point of the region lies within `covering_radius` of some net point,
/// so a zero would force `|expr(p)| ≤ covering_radius · sup‖∇expr‖` at that
/// net point, the supremum taken near `p`. Slopes come from the symbolic
/// derivatives sampled on the net.
pub(crate) fn ensure_nonvanishing(
    expr: &HoloExpr,
    net: &[ComplexPoint],
    covering_radius: f64,
    what: &str,
) -> Result<()> {
    let fail = |p: &ComplexPoint| {
        Error::invalid(
            "holomorphic",
            format!("{} {} vanishes on the closed domain near {}", what, expr, p),
        )
    };
    let grads: Vec<HoloExpr> = (0..expr.dim).map(|k| expr.derivative(k)).collect();
    let mut values = Vec::with_capacity(net.len());
    let mut slopes = Vec::with_capacity(net.len());
    for p in net {
        let v = match expr.eval(p) {
            Ok(v) if v.norm() > NONVANISHING_FLOOR => v.norm(),
            _ => return Err(fail(p)),
        };
        let g2: f64 = grads
            .iter()
            .map(|g| g.eval(p).map(|d| d.norm_sqr()))
            .sum::<Result<f64>>()
            .map_err(|_| fail(p))?;
        values.push(v);
        slopes.push(g2.sqrt());
    }
    // Each point of the closed domain is within `covering_radius` of a net
    // point p; the slope there is bounded by the largest sampled slope
    // within twice that radius of p.
    let global = slopes.iter().copied().fold(0.0, f64::max);
    for (i, p) in net.iter().enumerate() {
        if values[i] > covering_radius * global {
            continue;
        }
        let local = net
            .iter()
            .zip(&slopes)
            .filter(|(q, _)| p.distance(q) <= 2.0 * covering_radius)
            .map(|(_, &s)| s)
            .fold(0.0, f64::max);
        if values[i] <= covering_radius * local {
            return Err(fail(p));
        }
    }
    Ok(())
}

impl fmt::Display for HoloExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node.fmt_into(f)
    }
}

impl Add for HoloExpr {
    type Output = HoloExpr;
    fn add(self, rhs: HoloExpr) -> HoloExpr {
        self.zip(rhs, Node::add)
    }
}

impl Sub for HoloExpr {
    type Output = HoloExpr;
    fn sub(self, rhs: HoloExpr) -> HoloExpr {
        self + (-rhs)
    }
}

impl Mul for HoloExpr {
    type Output = HoloExpr;
    fn mul(self, rhs: HoloExpr) -> HoloExpr {
        self.zip(rhs, Node::mul)
    }
}

impl Div for HoloExpr {
    type Output = HoloExpr;
    fn div(self, rhs: HoloExpr) -> HoloExpr {
        self.zip(rhs, Node::quot)
    }
}

impl Neg for HoloExpr {
    type Output = HoloExpr;
    fn neg(self) -> HoloExpr {
        HoloExpr {
            dim: self.dim,
            node: Node::mul(Node::Const(-ONE), self.node),
        }
    }
}

impl Mul<HoloExpr> for Complex64 {
    type Output = HoloExpr;
    fn mul(self, rhs: HoloExpr) -> HoloExpr {
        HoloExpr::constant(rhs.dim, self) * rhs
    }
}

impl Mul<HoloExpr> for f64 {
    type Output = HoloExpr;
    fn mul(self, rhs: HoloExpr) -> HoloExpr {
        HoloExpr::real(rhs.dim, self) * rhs
    }
}

impl Add<HoloExpr> for f64 {
    type Output = HoloExpr;
    fn add(self, rhs: HoloExpr) -> HoloExpr {
        HoloExpr::real(rhs.dim, self) + rhs
    }
}

impl Sub<HoloExpr> for f64 {
    type Output = HoloExpr;
    fn sub(self, rhs: HoloExpr) -> HoloExpr {
        HoloExpr::real(rhs.dim, self) - rhs
    }
}

impl Div<HoloExpr> for f64 {
    type Output = HoloExpr;
    fn div(self, rhs: HoloExpr) -> HoloExpr {
        HoloExpr::real(rhs.dim, self) / rhs
    }
}

/// Sparse polynomial in `dim` variables, keyed by exponent vector. Used as
/// the normal form behind the JSON representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl Polynomial {
    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != ZERO {
            terms.insert(vec![0; dim], c);
        }
        Polynomial { dim, terms }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, ONE)
    }

    pub fn var(dim: usize, k: usize) -> Self {
        let mut e = vec![0; dim];
        e[k] = 1;
        Polynomial {
            dim,
            terms: BTreeMap::from([(e, ONE)]),
        }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Self {
        let mut p = Polynomial {
            dim,
            terms: BTreeMap::new(),
        };
        for (e, c) in terms {
            p.accumulate(e, c);
        }
        p
    }

    fn accumulate(&mut self, e: Vec<u32>, c: Complex64) {
        let v = self.terms.get(&e).copied().unwrap_or(ZERO) + c;
        if v == ZERO {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&vec![0; self.dim]) == Some(&ONE)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), *c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.accumulate(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(Polynomial::one(self.dim), |acc, _| acc.mul(self))
    }

    pub fn to_expr(&self) -> HoloExpr {
        let terms: Vec<(Complex64, Vec<u32>)> = self.terms.iter().map(|(e, c)| (*c, e.clone())).collect();
        HoloExpr::polynomial(self.dim, &terms).expect("exponent vectors match dimension")
    }
}
