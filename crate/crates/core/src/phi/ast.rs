use std::fmt;

use num_bigint::BigUint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Pow,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul => 2,
            BinOp::Pow => 3,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Pow => "^",
        }
    }
}

/// Expression tree of a φ rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigUint),
    /// The current index `n`.
    Index,
    /// `x(e)`: the digit at 1-based position `e`.
    Digit(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            _ => u8::MAX,
        }
    }

    /// True when the expression never reads `n` or a digit.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Int(_) => true,
            Expr::Index | Expr::Digit(_) => false,
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }
}

/// Canonical text: the minimal parenthesization that parses back to the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Index => f.write_str("n"),
            Expr::Digit(e) => write!(f, "x({e})"),
            Expr::Binary(op, lhs, rhs) => {
                let p = op.precedence();
                let (wrap_l, wrap_r) = if *op == BinOp::Pow {
                    (lhs.precedence() <= p, rhs.precedence() <= p)
                } else {
                    (lhs.precedence() < p, rhs.precedence() <= p)
                };
                write_operand(f, lhs, wrap_l)?;
                f.write_str(op.symbol())?;
                write_operand(f, rhs, wrap_r)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}
