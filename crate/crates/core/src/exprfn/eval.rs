use super::ast::{BinOp, Expr, Func};
use super::dual::Dual;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("non-finite result in `{node}`")]
    NonFinite { node: String },
    #[error("argument R = {0} is not finite")]
    NonFiniteInput(f64),
}

fn domain(node: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain {
        node: node.to_string(),
        reason,
    }
}

impl Expr {
    /// Evaluates the expression and its derivative with respect to `R`.
    pub fn eval_dual<T: Scalar>(&self, r: T, k: T) -> Result<Dual<T>, EvalError> {
        if !r.is_finite() || !k.is_finite() {
            return Err(EvalError::NonFiniteInput(r.to_f64_lossy()));
        }
        self.eval_node(Dual::variable(r), k)
    }

    /// Value only; still checks every domain the dual evaluation checks.
    pub fn eval<T: Scalar>(&self, r: T, k: T) -> Result<T, EvalError> {
        self.eval_dual(r, k).map(|d| d.value)
    }

    fn eval_node<T: Scalar>(&self, r: Dual<T>, k: T) -> Result<Dual<T>, EvalError> {
        let out = match self {
            Expr::Num(x) => Dual::constant(T::lit(*x)),
            Expr::Var => r,
            Expr::Param => Dual::constant(k),
            Expr::Pi => Dual::constant(T::PI()),
            Expr::Neg(e) => -e.eval_node(r, k)?,
            Expr::Call(func, arg) => {
                let a = arg.eval_node(r, k)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Tanh => a.tanh(),
                    Func::Log => {
                        if a.value <= T::zero() {
                            return Err(domain(self, "logarithm of a non-positive number"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a.value < T::zero() {
                            return Err(domain(self, "square root of a negative number"));
                        }
                        if a.value == T::zero() {
                            return Err(domain(self, "square root has no derivative at 0"));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, rhs) => {
                let a = l.eval_node(r, k)?;
                let b = rhs.eval_node(r, k)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.value == T::zero() {
                            return Err(domain(self, "division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => pow(self, a, b)?,
                }
            }
        };
        if !out.is_finite() {
            return Err(EvalError::NonFinite { node: self.to_string() });
        }
        Ok(out)
    }
}

fn pow<T: Scalar>(node: &Expr, a: Dual<T>, b: Dual<T>) -> Result<Dual<T>, EvalError> {
    let zero = T::zero();
    if b.deriv != zero {
        if a.value <= zero {
            return Err(domain(node, "power with R-dependent exponent needs a positive base"));
        }
        return Ok(a.pow_dual(b));
    }
    let p = b.value;
    if a.value == zero {
        if p < zero {
            return Err(domain(node, "zero raised to a negative power"));
        }
        if p > zero && p < T::one() && a.deriv != zero {
            return Err(domain(node, "fractional power has no derivative at 0"));
        }
    } else if a.value < zero && p.fract() != zero {
        return Err(domain(node, "negative base with non-integer exponent"));
    }
    Ok(a.powf(p))
}
