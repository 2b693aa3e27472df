pub mod expr;
pub mod parse;
pub mod poly;
pub mod ratfn;
pub mod solve;

pub use expr::{make_add, make_mul, make_pow, q, q_frac, EvalError, Expr, Symbol, Q};
pub use parse::{parse_expr, ExprParseError};
pub use poly::{Monomial, Poly};
pub use ratfn::{rational_equal, RatFn};
pub use solve::{linear_split, solve_for, vanishes};
