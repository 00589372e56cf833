//! Predicate language for filtered Cartesian sweeps.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! expr    := or
//! or      := and ("or" and)*
//! and     := not ("and" not)*
//! not     := "not" not | cmp
//! cmp     := add (("<" | "<=" | ">" | ">=" | "==" | "!=") add)?
//! add     := mul (("+" | "-") mul)*
//! mul     := unary (("*" | "/") unary)*
//! unary   := "-" unary | atom
//! atom    := number | 'text' | identifier | "(" expr ")"
//! ```
//!
//! Comparisons do not chain. Integer literals (no `.` or exponent) stay
//! integers; mixing with reals promotes to real.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{evaluate, Value};
pub use parse::parse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Integer(i64),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne
        )
    }
}

/// Filter expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterExpr {
    Number(Number),
    Text(String),
    Var(String),
    Unary {
        op: UnaryOp,
        operand: Box<FilterExpr>,
    },
    Binary {
        op: BinaryOp,
        left: Box<FilterExpr>,
        right: Box<FilterExpr>,
    },
}

impl FilterExpr {
    pub fn var(name: &str) -> Self {
        FilterExpr::Var(name.to_owned())
    }

    pub fn int(v: i64) -> Self {
        FilterExpr::Number(Number::Integer(v))
    }

    pub fn real(v: f64) -> Self {
        FilterExpr::Number(Number::Real(v))
    }

    pub fn unary(op: UnaryOp, operand: FilterExpr) -> Self {
        FilterExpr::Unary {
            op,
            operand: Box::new(operand),
        }
    }

    pub fn binary(op: BinaryOp, left: FilterExpr, right: FilterExpr) -> Self {
        FilterExpr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Names of every variable referenced in the tree.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            FilterExpr::Var(name) => {
                out.insert(name.clone());
            }
            FilterExpr::Unary { operand, .. } => operand.collect_vars(out),
            FilterExpr::Binary { left, right, .. } => {
                left.collect_vars(out);
                right.collect_vars(out);
            }
            FilterExpr::Number(_) | FilterExpr::Text(_) => {}
        }
    }
}

/// Free function form of [`FilterExpr::free_variables`].
pub fn free_variables(expr: &FilterExpr) -> BTreeSet<String> {
    expr.free_variables()
}

/// Fully parenthesized source that parses back to the same tree.
impl fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterExpr::Number(Number::Integer(i)) => write!(f, "{i}"),
            FilterExpr::Number(Number::Real(r)) => write!(f, "{r:?}"),
            FilterExpr::Text(t) => write!(f, "'{t}'"),
            FilterExpr::Var(name) => f.write_str(name),
            FilterExpr::Unary {
                op: UnaryOp::Neg,
                operand,
            } => write!(f, "(-{operand})"),
            FilterExpr::Unary {
                op: UnaryOp::Not,
                operand,
            } => write!(f, "(not {operand})"),
            FilterExpr::Binary { op, left, right } => {
                write!(f, "({left} {} {right})", op.symbol())
            }
        }
    }
}
