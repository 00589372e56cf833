use std::cmp::Ordering;

use super::{BinaryOp, FilterExpr, Number, UnaryOp};
use crate::error::{Error, Result};
use crate::value::{ParameterSet, ParameterValue};

/// Intermediate value during evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Integer(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Integer(_) => "integer",
            Value::Real(_) => "real",
            Value::Text(_) => "text",
            Value::Bool(_) => "boolean",
        }
    }

    fn as_real(&self) -> Option<f64> {
        match *self {
            Value::Integer(i) => Some(i as f64),
            Value::Real(r) => Some(r),
            _ => None,
        }
    }
}

impl From<&ParameterValue> for Value {
    fn from(v: &ParameterValue) -> Self {
        match v {
            ParameterValue::Integer(i) => Value::Integer(*i),
            ParameterValue::Real(r) => Value::Real(*r),
            ParameterValue::Text(t) => Value::Text(t.clone()),
        }
    }
}

/// Evaluates a predicate against one parameter set.
///
/// The root must produce a boolean; `and`/`or` short-circuit left to right.
pub fn evaluate(expr: &FilterExpr, env: &ParameterSet) -> Result<bool> {
    match eval(expr, env)? {
        Value::Bool(b) => Ok(b),
        other => Err(Error::FilterType(format!(
            "filter must yield a boolean, got {}",
            other.kind()
        ))),
    }
}

fn eval(expr: &FilterExpr, env: &ParameterSet) -> Result<Value> {
    match expr {
        FilterExpr::Number(Number::Integer(i)) => Ok(Value::Integer(*i)),
        FilterExpr::Number(Number::Real(r)) => Ok(Value::Real(*r)),
        FilterExpr::Text(t) => Ok(Value::Text(t.clone())),
        FilterExpr::Var(name) => env
            .get(name)
            .map(Value::from)
            .ok_or_else(|| Error::UnboundVariable(name.clone())),
        FilterExpr::Unary { op, operand } => {
            let v = eval(operand, env)?;
            match (op, v) {
                (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (UnaryOp::Neg, Value::Integer(i)) => i
                    .checked_neg()
                    .map(Value::Integer)
                    .ok_or_else(|| Error::Arithmetic("integer overflow in negation".into())),
                (UnaryOp::Neg, Value::Real(r)) => Ok(Value::Real(-r)),
                (UnaryOp::Not, v) => {
                    Err(Error::FilterType(format!("`not` applied to {}", v.kind())))
                }
                (UnaryOp::Neg, v) => Err(Error::FilterType(format!("`-` applied to {}", v.kind()))),
            }
        }
        FilterExpr::Binary { op, left, right } => match op {
            BinaryOp::And | BinaryOp::Or => {
                let lhs = expect_bool(eval(left, env)?, *op)?;
                match (op, lhs) {
                    (BinaryOp::And, false) => Ok(Value::Bool(false)),
                    (BinaryOp::Or, true) => Ok(Value::Bool(true)),
                    _ => Ok(Value::Bool(expect_bool(eval(right, env)?, *op)?)),
                }
            }
            _ => {
                let lhs = eval(left, env)?;
                let rhs = eval(right, env)?;
                if op.is_comparison() {
                    compare(*op, &lhs, &rhs).map(Value::Bool)
                } else {
                    arithmetic(*op, &lhs, &rhs)
                }
            }
        },
    }
}

fn expect_bool(v: Value, op: BinaryOp) -> Result<bool> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(Error::FilterType(format!(
            "`{}` needs boolean operands, got {}",
            op.symbol(),
            other.kind()
        ))),
    }
}

fn arithmetic(op: BinaryOp, lhs: &Value, rhs: &Value) -> Result<Value> {
    let type_err = || {
        Error::FilterType(format!(
            "cannot apply `{}` to {} and {}",
            op.symbol(),
            lhs.kind(),
            rhs.kind()
        ))
    };
    let overflow = || Error::Arithmetic(format!("integer overflow in `{}`", op.symbol()));

    if let (Value::Integer(a), Value::Integer(b)) = (lhs, rhs) {
        let (a, b) = (*a, *b);
        return match op {
            BinaryOp::Add => a.checked_add(b).map(Value::Integer).ok_or_else(overflow),
            BinaryOp::Sub => a.checked_sub(b).map(Value::Integer).ok_or_else(overflow),
            BinaryOp::Mul => a.checked_mul(b).map(Value::Integer).ok_or_else(overflow),
            // Division is always real-valued: `1 / 2` is 0.5.
            BinaryOp::Div if b == 0 => Err(Error::Arithmetic("division by zero".into())),
            BinaryOp::Div => Ok(Value::Real(a as f64 / b as f64)),
            _ => unreachable!("not an arithmetic operator"),
        };
    }

    let (a, b) = match (lhs.as_real(), rhs.as_real()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(type_err()),
    };
    let result = match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div if b == 0.0 => return Err(Error::Arithmetic("division by zero".into())),
        BinaryOp::Div => a / b,
        _ => unreachable!("not an arithmetic operator"),
    };
    if result.is_finite() {
        Ok(Value::Real(result))
    } else {
        Err(Error::Arithmetic(format!(
            "non-finite result in `{}`",
            op.symbol()
        )))
    }
}

fn compare(op: BinaryOp, lhs: &Value, rhs: &Value) -> Result<bool> {
    let ordering = match (lhs, rhs) {
        (Value::Integer(a), Value::Integer(b)) => a.cmp(b),
        (Value::Text(a), Value::Text(b)) => a.as_bytes().cmp(b.as_bytes()),
        _ => match (lhs.as_real(), rhs.as_real()) {
            // Both finite, so partial_cmp always succeeds.
            (Some(a), Some(b)) => a.partial_cmp(&b).unwrap_or(Ordering::Equal),
            _ => {
                return Err(Error::FilterType(format!(
                    "cannot compare {} with {} using `{}`",
                    lhs.kind(),
                    rhs.kind(),
                    op.symbol()
                )))
            }
        },
    };
    Ok(match op {
        BinaryOp::Lt => ordering == Ordering::Less,
        BinaryOp::Le => ordering != Ordering::Greater,
        BinaryOp::Gt => ordering == Ordering::Greater,
        BinaryOp::Ge => ordering != Ordering::Less,
        BinaryOp::Eq => ordering == Ordering::Equal,
        BinaryOp::Ne => ordering != Ordering::Equal,
        _ => unreachable!("not a comparison operator"),
    })
}
