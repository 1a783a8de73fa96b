//! Evaluation of parsed expressions into scalars or algebra elements.

use bosonext::bosonic::HatElem;
use bosonext::scalars::RatFunc;
use bosonext::uqneg::Algebra;

use crate::parse::Expr;
use crate::CliError;

#[derive(Debug, Clone)]
pub enum Value {
    Scalar(RatFunc),
    Elem(HatElem),
}

impl Value {
    pub fn into_elem(self) -> HatElem {
        match self {
            Value::Scalar(c) => HatElem::scalar(c),
            Value::Elem(e) => e,
        }
    }
}

pub fn eval(alg: &Algebra, expr: &Expr) -> Result<Value, CliError> {
    match expr {
        Expr::Int(n) => Ok(Value::Scalar(RatFunc::int(*n))),
        Expr::QHalfPow(h) => Ok(Value::Scalar(RatFunc::v_pow(*h))),
        Expr::Gen { index, level } => {
            let i = check_index(alg, *index)?;
            let level = i32::try_from(*level)
                .map_err(|_| CliError::computation("level out of range"))?;
            Ok(Value::Elem(alg.hat_gen(i, level)?))
        }
        Expr::DividedPower(inner, n) => {
            let v = eval(alg, inner)?;
            let Value::Elem(e) = &v else {
                return Err(CliError::computation("dp expects a generator"));
            };
            let letter = single_letter(e)
                .ok_or_else(|| CliError::computation("dp expects a generator"))?;
            let mut acc = HatElem::one();
            let g = alg.hat_gen(letter.index, letter.level)?;
            for _ in 0..*n {
                acc = alg.hat_mul(&acc, &g)?;
            }
            let fact = alg.cartan().q_factorial_i(*n, letter.index).inv()?;
            Ok(Value::Elem(acc.scale(&fact)))
        }
        Expr::Add(a, b) => binop(alg, a, b, |x, y| Ok(&x + &y), |_alg, x, y| Ok(x.add(&y)), false),
        Expr::Sub(a, b) => binop(
            alg,
            a,
            b,
            |x, y| Ok(&x - &y),
            |alg, x, y| {
                let _ = alg;
                Ok(x.add(&y.scale(&-&RatFunc::one())))
            },
            false,
        ),
        Expr::Mul(a, b) => binop(
            alg,
            a,
            b,
            |x, y| Ok(&x * &y),
            |alg, x, y| Ok(alg.hat_mul(&x, &y)?),
            true,
        ),
        Expr::Pow(base, e) => {
            let v = eval(alg, base)?;
            match v {
                Value::Scalar(c) => {
                    let mut acc = RatFunc::one();
                    let p = if *e >= 0 { c } else { c.inv()? };
                    for _ in 0..e.unsigned_abs() {
                        acc = &acc * &p;
                    }
                    Ok(Value::Scalar(acc))
                }
                Value::Elem(x) => {
                    if *e < 0 {
                        return Err(CliError::computation(
                            "negative powers are only defined for scalars",
                        ));
                    }
                    let mut acc = HatElem::one();
                    for _ in 0..*e {
                        acc = alg.hat_mul(&acc, &x)?;
                    }
                    Ok(Value::Elem(acc))
                }
            }
        }
    }
}

fn check_index(alg: &Algebra, index: i64) -> Result<usize, CliError> {
    if index < 1 || index as usize > alg.rank() {
        return Err(CliError::computation(format!(
            "generator index {index} out of range 1..={}",
            alg.rank()
        )));
    }
    Ok(index as usize - 1)
}

fn single_letter(e: &HatElem) -> Option<bosonext::bosonic::LevelLetter> {
    let mut terms = e.terms().iter();
    let (w, c) = terms.next()?;
    if terms.next().is_some() || w.len() != 1 || !c.is_one() {
        return None;
    }
    Some(w[0])
}

fn binop(
    alg: &Algebra,
    a: &Expr,
    b: &Expr,
    scalar_op: impl Fn(RatFunc, RatFunc) -> Result<RatFunc, CliError>,
    elem_op: impl Fn(&Algebra, HatElem, HatElem) -> Result<HatElem, CliError>,
    scalar_mul_shortcut: bool,
) -> Result<Value, CliError> {
    let x = eval(alg, a)?;
    let y = eval(alg, b)?;
    match (x, y) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(scalar_op(x, y)?)),
        (Value::Scalar(c), Value::Elem(e)) if scalar_mul_shortcut => {
            Ok(Value::Elem(e.scale(&c)))
        }
        (Value::Elem(e), Value::Scalar(c)) if scalar_mul_shortcut => {
            Ok(Value::Elem(e.scale(&c)))
        }
        (x, y) => Ok(Value::Elem(elem_op(alg, x.into_elem(), y.into_elem())?)),
    }
}
