//! The syntactic expression tree views are built from.
//!
//! A `ViewNode` is pure data: model builders assemble it bottom-up, and the
//! build step turns it into a live view under the chosen dispatch mode. The
//! canonical prefix form is what `--dump-views` prints and what golden tests
//! compare against.

use crate::engine::VarId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViewNode {
    Var(VarId),
    Const(i64),
    Add(Box<ViewNode>, Box<ViewNode>),
    Sub(Box<ViewNode>, Box<ViewNode>),
    Neg(Box<ViewNode>),
    Mul(Box<ViewNode>, Box<ViewNode>),
    Abs(Box<ViewNode>),
    Sqr(Box<ViewNode>),
    Min2(Box<ViewNode>, Box<ViewNode>),
    Max2(Box<ViewNode>, Box<ViewNode>),
    /// `coeff * child` with a non-zero coefficient.
    Linear(i64, Box<ViewNode>),
    Sum(Vec<ViewNode>),
    /// 1 if the children are equal, else 0.
    ReifEq(Box<ViewNode>, Box<ViewNode>),
    ReifNeq(Box<ViewNode>, Box<ViewNode>),
    ReifLeq(Box<ViewNode>, Box<ViewNode>),
    /// Condition (0/1 valued), then-branch, else-branch.
    Ite(Box<ViewNode>, Box<ViewNode>, Box<ViewNode>),
}

impl ViewNode {
    pub fn var(v: VarId) -> ViewNode {
        ViewNode::Var(v)
    }

    pub fn constant(k: i64) -> ViewNode {
        ViewNode::Const(k)
    }

    pub fn add(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::Sub(Box::new(a), Box::new(b))
    }

    pub fn neg(a: ViewNode) -> ViewNode {
        ViewNode::Neg(Box::new(a))
    }

    pub fn mul(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::Mul(Box::new(a), Box::new(b))
    }

    pub fn abs(a: ViewNode) -> ViewNode {
        ViewNode::Abs(Box::new(a))
    }

    pub fn sqr(a: ViewNode) -> ViewNode {
        ViewNode::Sqr(Box::new(a))
    }

    pub fn min2(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::Min2(Box::new(a), Box::new(b))
    }

    pub fn max2(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::Max2(Box::new(a), Box::new(b))
    }

    pub fn linear(coeff: i64, a: ViewNode) -> ViewNode {
        ViewNode::Linear(coeff, Box::new(a))
    }

    pub fn sum(terms: Vec<ViewNode>) -> ViewNode {
        ViewNode::Sum(terms)
    }

    pub fn reif_eq(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::ReifEq(Box::new(a), Box::new(b))
    }

    pub fn reif_neq(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::ReifNeq(Box::new(a), Box::new(b))
    }

    pub fn reif_leq(a: ViewNode, b: ViewNode) -> ViewNode {
        ViewNode::ReifLeq(Box::new(a), Box::new(b))
    }

    pub fn ite(c: ViewNode, t: ViewNode, f: ViewNode) -> ViewNode {
        ViewNode::Ite(Box::new(c), Box::new(t), Box::new(f))
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        match self {
            ViewNode::Var(_) | ViewNode::Const(_) => 1,
            ViewNode::Add(a, b)
            | ViewNode::Sub(a, b)
            | ViewNode::Mul(a, b)
            | ViewNode::Min2(a, b)
            | ViewNode::Max2(a, b)
            | ViewNode::ReifEq(a, b)
            | ViewNode::ReifNeq(a, b)
            | ViewNode::ReifLeq(a, b) => 1 + a.size() + b.size(),
            ViewNode::Neg(a) | ViewNode::Abs(a) | ViewNode::Sqr(a) | ViewNode::Linear(_, a) => {
                1 + a.size()
            }
            ViewNode::Sum(ts) => 1 + ts.iter().map(ViewNode::size).sum::<usize>(),
            ViewNode::Ite(c, t, f) => 1 + c.size() + t.size() + f.size(),
        }
    }

    /// All variables referenced by the expression, in first-occurrence order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            ViewNode::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            ViewNode::Const(_) => {}
            ViewNode::Add(a, b)
            | ViewNode::Sub(a, b)
            | ViewNode::Mul(a, b)
            | ViewNode::Min2(a, b)
            | ViewNode::Max2(a, b)
            | ViewNode::ReifEq(a, b)
            | ViewNode::ReifNeq(a, b)
            | ViewNode::ReifLeq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ViewNode::Neg(a) | ViewNode::Abs(a) | ViewNode::Sqr(a) | ViewNode::Linear(_, a) => {
                a.collect_vars(out);
            }
            ViewNode::Sum(ts) => {
                for t in ts {
                    t.collect_vars(out);
                }
            }
            ViewNode::Ite(c, t, f) => {
                c.collect_vars(out);
                t.collect_vars(out);
                f.collect_vars(out);
            }
        }
    }

    /// Direct integer evaluation of the expression under an assignment.
    /// This is the reference semantics views are validated against.
    pub fn eval(&self, assign: &dyn Fn(VarId) -> i64) -> i64 {
        match self {
            ViewNode::Var(v) => assign(*v),
            ViewNode::Const(k) => *k,
            ViewNode::Add(a, b) => a.eval(assign) + b.eval(assign),
            ViewNode::Sub(a, b) => a.eval(assign) - b.eval(assign),
            ViewNode::Neg(a) => -a.eval(assign),
            ViewNode::Mul(a, b) => a.eval(assign) * b.eval(assign),
            ViewNode::Abs(a) => a.eval(assign).abs(),
            ViewNode::Sqr(a) => {
                let v = a.eval(assign);
                v * v
            }
            ViewNode::Min2(a, b) => a.eval(assign).min(b.eval(assign)),
            ViewNode::Max2(a, b) => a.eval(assign).max(b.eval(assign)),
            ViewNode::Linear(c, a) => c * a.eval(assign),
            ViewNode::Sum(ts) => ts.iter().map(|t| t.eval(assign)).sum(),
            ViewNode::ReifEq(a, b) => (a.eval(assign) == b.eval(assign)) as i64,
            ViewNode::ReifNeq(a, b) => (a.eval(assign) != b.eval(assign)) as i64,
            ViewNode::ReifLeq(a, b) => (a.eval(assign) <= b.eval(assign)) as i64,
            ViewNode::Ite(c, t, f) => {
                if c.eval(assign) != 0 {
                    t.eval(assign)
                } else {
                    f.eval(assign)
                }
            }
        }
    }

    /// Canonical prefix form, e.g. `(add (var x1) (mul (var x2) (var x3)))`.
    pub fn to_prefix(&self, name: &dyn Fn(VarId) -> String) -> String {
        let mut out = String::new();
        self.write_prefix(name, &mut out);
        out
    }

    fn write_prefix(&self, name: &dyn Fn(VarId) -> String, out: &mut String) {
        use std::fmt::Write;
        match self {
            ViewNode::Var(v) => {
                let _ = write!(out, "(var {})", name(*v));
            }
            ViewNode::Const(k) => {
                let _ = write!(out, "(const {k})");
            }
            ViewNode::Add(a, b) => Self::write_nary("add", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::Sub(a, b) => Self::write_nary("sub", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::Neg(a) => Self::write_nary("neg", &[a.as_ref()], name, out),
            ViewNode::Mul(a, b) => Self::write_nary("mul", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::Abs(a) => Self::write_nary("abs", &[a.as_ref()], name, out),
            ViewNode::Sqr(a) => Self::write_nary("sqr", &[a.as_ref()], name, out),
            ViewNode::Min2(a, b) => Self::write_nary("min2", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::Max2(a, b) => Self::write_nary("max2", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::Linear(c, a) => {
                let _ = write!(out, "(lin {c} ");
                a.write_prefix(name, out);
                out.push(')');
            }
            ViewNode::Sum(ts) => {
                let refs: Vec<&ViewNode> = ts.iter().collect();
                Self::write_nary("sum", &refs, name, out);
            }
            ViewNode::ReifEq(a, b) => Self::write_nary("reif-eq", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::ReifNeq(a, b) => Self::write_nary("reif-neq", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::ReifLeq(a, b) => Self::write_nary("reif-leq", &[a.as_ref(), b.as_ref()], name, out),
            ViewNode::Ite(c, t, f) => Self::write_nary("ite", &[c.as_ref(), t.as_ref(), f.as_ref()], name, out),
        }
    }

    fn write_nary(
        tag: &str,
        children: &[&ViewNode],
        name: &dyn Fn(VarId) -> String,
        out: &mut String,
    ) {
        out.push('(');
        out.push_str(tag);
        for c in children {
            out.push(' ');
            c.write_prefix(name, out);
        }
        out.push(')');
    }
}
