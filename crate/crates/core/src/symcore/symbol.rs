use super::expr::Expr;
use super::jet::Jet;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

pub type EvalFn = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;
pub type DerivFn = Arc<dyn Fn(usize, f64, f64) -> C64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Expr(Expr),
    Closure { eval: EvalFn, deriv_xi: Option<DerivFn> },
}

/// Principal model symbol p(σ, ξ) at a boundary point, homogeneous of degree `order_m`.
#[derive(Clone)]
pub struct BoundarySymbol {
    pub order_m: C64,
    pub label: String,
    source: Source,
}

impl fmt::Debug for BoundarySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundarySymbol({}, m = {})", self.label, self.order_m)
    }
}

impl BoundarySymbol {
    /// Wraps an expression. The order is read off the tree unless supplied.
    pub fn from_expr(expr: Expr, order: Option<C64>) -> Result<Self> {
        let order_m = match order.or_else(|| expr.order()) {
            Some(m) => m,
            None => {
                return Err(Error::invalid(
                    "symcore",
                    "from_expr",
                    format!("cannot infer the order of `{expr}`; supply order="),
                ))
            }
        };
        Ok(BoundarySymbol { order_m, label: expr.to_string(), source: Source::Expr(expr) })
    }

    pub fn from_fn(order_m: C64, label: impl Into<String>, eval: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        BoundarySymbol {
            order_m,
            label: label.into(),
            source: Source::Closure { eval: Arc::new(eval), deriv_xi: None },
        }
    }

    /// Attaches a closed-form ξ-derivative evaluator to a closure symbol.
    pub fn with_deriv_xi(mut self, d: impl Fn(usize, f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        if let Source::Closure { deriv_xi, .. } = &mut self.source {
            *deriv_xi = Some(Arc::new(d));
        }
        self
    }

    pub fn abs2pow(a: f64) -> Self {
        Self::from_expr(Expr::Abs2Pow(C64::new(a, 0.0)), None).unwrap()
    }

    pub fn chiplus(nu: C64) -> Self {
        Self::from_expr(Expr::ChiPlus(nu), None).unwrap()
    }

    pub fn chiminus(nu: C64) -> Self {
        Self::from_expr(Expr::ChiMinus(nu), None).unwrap()
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.source {
            Source::Expr(e) => Some(e),
            Source::Closure { .. } => None,
        }
    }

    /// Product symbol p·q of order m_p + m_q.
    pub fn mul(&self, other: &BoundarySymbol) -> BoundarySymbol {
        let order_m = self.order_m + other.order_m;
        if let (Some(a), Some(b)) = (self.expr(), other.expr()) {
            return BoundarySymbol {
                order_m,
                label: format!("{}*{}", self.label, other.label),
                source: Source::Expr(a.clone().mul(b.clone())),
            };
        }
        let (p, q) = (self.clone(), other.clone());
        BoundarySymbol::from_fn(order_m, format!("{}*{}", self.label, other.label), move |s, x| {
            p.eval(s, x) * q.eval(s, x)
        })
    }

    pub fn eval(&self, sigma: f64, xi: f64) -> C64 {
        match &self.source {
            Source::Expr(e) => e.eval(sigma, xi),
            Source::Closure { eval, .. } => eval(sigma, xi),
        }
    }

    /// Evaluation that reports the failing point.
    pub fn try_eval(&self, sigma: f64, xi: f64) -> Result<C64> {
        let v = self.eval(sigma, xi);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::new(
                "symcore",
                "eval",
                crate::ErrorKind::Evaluation,
                format!("non-finite value of {} at (sigma, xi) = ({sigma}, {xi})", self.label),
            ))
        }
    }

    /// True when ξ-derivatives are available in closed form.
    pub fn has_closed_form_derivatives(&self) -> bool {
        match &self.source {
            Source::Expr(_) => true,
            Source::Closure { deriv_xi, .. } => deriv_xi.is_some(),
        }
    }

    /// ∂^k_ξ p(σ, ξ) from the closed form, if available.
    pub fn deriv_xi(&self, k: usize, sigma: f64, xi: f64) -> Option<C64> {
        match &self.source {
            Source::Expr(e) => {
                let j = e.eval_jet(&Jet::constant(C64::new(sigma, 0.0), k + 1), &Jet::variable(xi, k + 1));
                Some(j.derivative(k))
            }
            Source::Closure { deriv_xi, .. } => deriv_xi.as_ref().map(|d| d(k, sigma, xi)),
        }
    }

    /// Taylor coefficients of σ ↦ p(σ, ξ) at σ = 0, up to degree `kmax`.
    ///
    /// By homogeneity these are the coefficients of the expansion
    /// p(σ, ξ) = |ξ|^m Σ_k c_k (σ/|ξ|)^k for ξ = ±1.
    pub fn sigma_taylor(&self, xi: f64, kmax: usize) -> Option<Vec<C64>> {
        match &self.source {
            Source::Expr(e) => {
                let j = e.eval_jet(&Jet::variable(0.0, kmax + 1), &Jet::constant(C64::new(xi, 0.0), kmax + 1));
                if j.0.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                    Some(j.0)
                } else {
                    None
                }
            }
            Source::Closure { .. } => None,
        }
    }
}

impl serde::Serialize for BoundarySymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundarySymbol", 2)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("order_m", &[self.order_m.re, self.order_m.im])?;
        st.end()
    }
}
