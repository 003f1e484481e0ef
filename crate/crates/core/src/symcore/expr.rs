use super::jet::Jet;
use num_complex::Complex64 as C64;
use std::fmt;

/// Expression tree for a symbol p(σ, ξ).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Sigma,
    Xi,
    Const(C64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    /// (σ² + ξ²)^a
    Abs2Pow(C64),
    /// (σ + iξ)^ν
    ChiPlus(C64),
    /// (σ − iξ)^ν
    ChiMinus(C64),
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn cpow(base: C64, e: C64) -> C64 {
    if base.re == 0.0 && base.im == 0.0 {
        if e.re > 0.0 {
            return C64::new(0.0, 0.0);
        }
        if e == C64::new(0.0, 0.0) {
            return C64::new(1.0, 0.0);
        }
        return C64::new(f64::INFINITY, 0.0);
    }
    (e * base.ln()).exp()
}

impl Expr {
    pub fn eval(&self, sigma: f64, xi: f64) -> C64 {
        match self {
            Expr::Sigma => C64::new(sigma, 0.0),
            Expr::Xi => C64::new(xi, 0.0),
            Expr::Const(c) => *c,
            Expr::Neg(a) => -a.eval(sigma, xi),
            Expr::Add(a, b) => a.eval(sigma, xi) + b.eval(sigma, xi),
            Expr::Sub(a, b) => a.eval(sigma, xi) - b.eval(sigma, xi),
            Expr::Mul(a, b) => a.eval(sigma, xi) * b.eval(sigma, xi),
            Expr::Div(a, b) => a.eval(sigma, xi) / b.eval(sigma, xi),
            Expr::Pow(a, b) => {
                let base = a.eval(sigma, xi);
                let e = b.eval(sigma, xi);
                if e.im == 0.0 && e.re == e.re.round() && e.re.abs() <= 64.0 {
                    base.powi(e.re as i32)
                } else {
                    cpow(base, e)
                }
            }
            Expr::Abs2Pow(a) => cpow(C64::new(sigma * sigma + xi * xi, 0.0), *a),
            Expr::ChiPlus(nu) => cpow(C64::new(sigma, xi), *nu),
            Expr::ChiMinus(nu) => cpow(C64::new(sigma, -xi), *nu),
        }
    }

    /// Evaluate on jets for σ and ξ.
    pub fn eval_jet(&self, sigma: &Jet, xi: &Jet) -> Jet {
        let n = sigma.len();
        match self {
            Expr::Sigma => sigma.clone(),
            Expr::Xi => xi.clone(),
            Expr::Const(c) => Jet::constant(*c, n),
            Expr::Neg(a) => a.eval_jet(sigma, xi).neg(),
            Expr::Add(a, b) => a.eval_jet(sigma, xi).add(&b.eval_jet(sigma, xi)),
            Expr::Sub(a, b) => a.eval_jet(sigma, xi).sub(&b.eval_jet(sigma, xi)),
            Expr::Mul(a, b) => a.eval_jet(sigma, xi).mul(&b.eval_jet(sigma, xi)),
            Expr::Div(a, b) => a.eval_jet(sigma, xi).div(&b.eval_jet(sigma, xi)),
            Expr::Pow(a, b) => {
                let base = a.eval_jet(sigma, xi);
                if let Expr::Const(e) = **b {
                    if e.im == 0.0 && e.re == e.re.round() && (0.0..=16.0).contains(&e.re) {
                        let mut out = Jet::constant(C64::new(1.0, 0.0), n);
                        for _ in 0..e.re as usize {
                            out = out.mul(&base);
                        }
                        return out;
                    }
                }
                base.pow(&b.eval_jet(sigma, xi))
            }
            Expr::Abs2Pow(a) => sigma.mul(sigma).add(&xi.mul(xi)).pow(&Jet::constant(*a, n)),
            Expr::ChiPlus(nu) => sigma.add(&xi.scale(I)).pow(&Jet::constant(*nu, n)),
            Expr::ChiMinus(nu) => sigma.sub(&xi.scale(I)).pow(&Jet::constant(*nu, n)),
        }
    }

    /// Degree of homogeneity when it can be read off the tree.
    pub fn order(&self) -> Option<C64> {
        let zero = C64::new(0.0, 0.0);
        match self {
            Expr::Sigma | Expr::Xi => Some(C64::new(1.0, 0.0)),
            Expr::Const(_) => Some(zero),
            Expr::Neg(a) => a.order(),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (oa, ob) = (a.order()?, b.order()?);
                if (oa - ob).norm() < 1e-14 {
                    Some(oa)
                } else {
                    None
                }
            }
            Expr::Mul(a, b) => Some(a.order()? + b.order()?),
            Expr::Div(a, b) => Some(a.order()? - b.order()?),
            Expr::Pow(a, b) => match **b {
                Expr::Const(e) => Some(a.order()? * e),
                _ => None,
            },
            Expr::Abs2Pow(a) => Some(2.0 * a),
            Expr::ChiPlus(nu) | Expr::ChiMinus(nu) => Some(*nu),
        }
    }

    pub fn mul(self, other: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(other))
    }
}

fn fmt_c(c: &C64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{}i", c.im)
    } else if c.im < 0.0 {
        write!(f, "({}-{}i)", c.re, -c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Sigma => write!(f, "sigma"),
            Expr::Xi => write!(f, "xi"),
            Expr::Const(c) => fmt_c(c, f),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, b) => write!(f, "({a})^({b})"),
            Expr::Abs2Pow(a) => {
                write!(f, "abs2pow(")?;
                fmt_c(a, f)?;
                write!(f, ")")
            }
            Expr::ChiPlus(a) => {
                write!(f, "chiplus(")?;
                fmt_c(a, f)?;
                write!(f, ")")
            }
            Expr::ChiMinus(a) => {
                write!(f, "chiminus(")?;
                fmt_c(a, f)?;
                write!(f, ")")
            }
        }
    }
}
