use std::fmt;

/// Binary operators of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Unary functions recognised by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Tanh];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree for an infection rate `f(R)`.
///
/// Literals are kept in `f64` regardless of the evaluation scalar so a tree
/// parsed once can be evaluated at any precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The recovered fraction `R`.
    Var,
    /// The dimensionless parameter `k`.
    Param,
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(x: f64) -> Self {
        Expr::Num(x)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Self {
        Expr::Neg(Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::Call(f, Box::new(arg))
    }

    /// True when the tree mentions `R` anywhere.
    pub fn depends_on_r(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Num(_) | Expr::Param | Expr::Pi => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_r(),
            Expr::Binary(_, l, r) => l.depends_on_r() || r.depends_on_r(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var | Expr::Param | Expr::Pi => 1,
            Expr::Neg(e) | Expr::Call(_, e) => 1 + e.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

// Printing parenthesizes every binary node, so the output re-parses to the
// same tree. The only other case needing parentheses is a negation directly
// under a negation, which the grammar does not allow unbracketed.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var => f.write_str("R"),
            Expr::Param => f.write_str("k"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => match **e {
                Expr::Neg(_) => write!(f, "-({e})"),
                _ => write!(f, "-{e}"),
            },
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_is_fully_bracketed() {
        let e = Expr::binary(
            BinOp::Add,
            Expr::binary(
                BinOp::Mul,
                Expr::num(5.0),
                Expr::binary(BinOp::Pow, Expr::Var, Expr::num(2.0)),
            ),
            Expr::num(10.0),
        );
        assert_eq!(e.to_string(), "((5.0 * (R ^ 2.0)) + 10.0)");
        assert_eq!(e.depth(), 4);
        assert!(e.depends_on_r());
    }

    #[test]
    fn nested_negation_is_bracketed() {
        let e = Expr::neg(Expr::neg(Expr::Param));
        assert_eq!(e.to_string(), "-(-k)");
        assert!(!e.depends_on_r());
    }
}
