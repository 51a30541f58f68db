use std::collections::HashMap;

use super::{Expr, Func, Node, NodeKey};

pub(super) fn differentiate(e: &Expr, var: &str) -> Expr {
    let mut deps = HashMap::new();
    let mut memo = HashMap::new();
    diff_rec(e, var, &mut deps, &mut memo)
}

fn depends(e: &Expr, var: &str, deps: &mut HashMap<NodeKey, bool>) -> bool {
    if let Some(&d) = deps.get(&e.key()) {
        return d;
    }
    let d = match e.kind() {
        Node::Const(_) => false,
        Node::Var(v) => &**v == var,
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => depends(a, var, deps),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            depends(a, var, deps) || depends(b, var, deps)
        }
    };
    deps.insert(e.key(), d);
    d
}

fn diff_rec(
    e: &Expr,
    var: &str,
    deps: &mut HashMap<NodeKey, bool>,
    memo: &mut HashMap<NodeKey, (Expr, Expr)>,
) -> Expr {
    if !depends(e, var, deps) {
        return Expr::zero();
    }
    if let Some((_, d)) = memo.get(&e.key()) {
        return d.clone();
    }
    let out = match e.kind() {
        Node::Const(_) => Expr::zero(),
        Node::Var(_) => Expr::one(),
        Node::Neg(a) => diff_rec(a, var, deps, memo).neg(),
        Node::Add(a, b) => diff_rec(a, var, deps, memo).add(&diff_rec(b, var, deps, memo)),
        Node::Sub(a, b) => diff_rec(a, var, deps, memo).sub(&diff_rec(b, var, deps, memo)),
        Node::Mul(a, b) => {
            let da = diff_rec(a, var, deps, memo);
            let db = diff_rec(b, var, deps, memo);
            da.mul(b).add(&a.mul(&db))
        }
        Node::Div(a, b) => {
            let da = diff_rec(a, var, deps, memo);
            let db = diff_rec(b, var, deps, memo);
            if db.is_zero() {
                da.div(b)
            } else {
                da.mul(b).sub(&a.mul(&db)).div(&b.powi(2))
            }
        }
        Node::Pow(a, k) => {
            let da = diff_rec(a, var, deps, memo);
            Expr::int(i64::from(*k)).mul(&a.powi(k - 1)).mul(&da)
        }
        Node::Call(f, a) => {
            let da = diff_rec(a, var, deps, memo);
            let outer = match f {
                Func::Sin => a.cos(),
                Func::Cos => a.sin().neg(),
                Func::Tan => Expr::one().add(&Expr::call(Func::Tan, a).powi(2)),
                Func::Exp => e.clone(),
                Func::Log => Expr::one().div(a),
                Func::Sqrt => Expr::one().div(&Expr::int(2).mul(e)),
            };
            outer.mul(&da)
        }
    };
    memo.insert(e.key(), (e.clone(), out.clone()));
    out
}
