#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tapework::dist::SubDistr;
use tapework::lang::{BinOp, Binder, Expr, RecFn, Type};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random finite sub-distribution over a random subset of `0..outcomes`
/// with total mass at most one. With `full`, the mass is exactly one.
pub fn random_distr(rng: &mut impl Rng, outcomes: u32, full: bool) -> SubDistr<u32> {
    let mut keys: Vec<u32> = (0..outcomes).collect();
    keys.shuffle(rng);
    let k = rng.random_range(outcomes / 2..=outcomes) as usize;
    let weights: Vec<(u32, i64)> = keys[..k].iter().map(|&key| (key, rng.random_range(1..=6))).collect();
    normalized(rng, weights, full)
}

/// Scales positive integer weights to a sub-distribution, leaving a random
/// deficit unless `full`.
fn normalized<K: Ord + Clone + std::fmt::Debug>(rng: &mut impl Rng, weights: Vec<(K, i64)>, full: bool) -> SubDistr<K> {
    let total: i64 = weights.iter().map(|(_, w)| w).sum();
    let denom = if full || total == 0 { total.max(1) } else { total + rng.random_range(0..=total) };
    SubDistr::from_weights(weights.into_iter().filter(|(_, w)| *w > 0).map(|(k, w)| (k, q(w, denom))))
        .expect("mass at most one")
}

/// Type-directed generator of closed, well-typed annotated terms.
pub struct TermGen {
    rng: ChaCha8Rng,
    fresh: usize,
}

fn int_ty() -> Type {
    Type::Int
}

fn base_types() -> Vec<Type> {
    vec![Type::Int, Type::Bool, Type::Unit]
}

impl TermGen {
    pub fn new(seed: u64) -> TermGen {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
        }
    }

    fn name(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    pub fn random_type(&mut self, depth: u32) -> Type {
        let k = if depth == 0 { 3 } else { 8 };
        match self.rng.random_range(0..k) {
            0 => Type::Int,
            1 => Type::Bool,
            2 => Type::Unit,
            3 => Type::prod(self.random_type(depth - 1), self.random_type(depth - 1)),
            4 => Type::sum(Type::Int, Type::Bool),
            5 => Type::arrow(Type::Int, self.random_type(depth - 1)),
            6 => Type::reference(Type::Int),
            _ => Type::prod(Type::Int, Type::Bool),
        }
    }

    fn pick_base(&mut self) -> Type {
        let b = base_types();
        b[self.rng.random_range(0..b.len())].clone()
    }

    fn literal(&mut self, ty: &Type) -> Option<Expr> {
        Some(match ty {
            Type::Int => Expr::int(self.rng.random_range(-3..=5)),
            Type::Bool => Expr::Bool(self.rng.random()),
            Type::Unit => Expr::Unit,
            _ => return None,
        })
    }

    pub fn term(&mut self, ty: &Type, depth: u32) -> Expr {
        self.gen(ty, depth, &mut Vec::new())
    }

    fn gen(&mut self, ty: &Type, depth: u32, env: &mut Vec<(String, Type)>) -> Expr {
        let vars: Vec<String> = env.iter().filter(|(_, t)| t == ty).map(|(x, _)| x.clone()).collect();
        if depth == 0 || self.rng.random_range(0..4) == 0 {
            if !vars.is_empty() && self.rng.random() {
                return Expr::var(&vars[self.rng.random_range(0..vars.len())]);
            }
            if let Some(l) = self.literal(ty) {
                return l;
            }
        }
        let d = depth.saturating_sub(1);
        let generic = if depth == 0 { 5 } else { 0 };
        match self.rng.random_range(generic..10) {
            0 => {
                let c = self.gen(&Type::Bool, d, env);
                let t = self.gen(ty, d, env);
                let e = self.gen(ty, d, env);
                return Expr::if_(c, t, e);
            }
            1 => {
                let t = self.pick_base();
                let bound = self.gen(&t, d, env);
                let x = self.name();
                env.push((x.clone(), t));
                let body = self.gen(ty, d, env);
                env.pop();
                return Expr::let_(Binder::named(&x), bound, body);
            }
            2 => {
                let other = self.pick_base();
                let p = self.gen(&Type::prod(ty.clone(), other), d, env);
                return Expr::Fst(Box::new(p));
            }
            3 => {
                let a = self.pick_base();
                let f = self.gen(&Type::arrow(a.clone(), ty.clone()), d, env);
                let arg = self.gen(&a, d, env);
                return Expr::app(f, arg);
            }
            4 => {
                let sum = Type::sum(Type::Int, Type::Bool);
                let s = self.gen(&sum, d, env);
                let (x, y) = (self.name(), self.name());
                env.push((x.clone(), Type::Int));
                let l = self.gen(ty, d, env);
                env.pop();
                env.push((y.clone(), Type::Bool));
                let r = self.gen(ty, d, env);
                env.pop();
                return Expr::Match(Box::new(s), Binder::named(&x), Box::new(l), Binder::named(&y), Box::new(r));
            }
            _ => {}
        }
        match ty {
            Type::Int => match self.rng.random_range(0..6) {
                0 => Expr::binop(BinOp::Add, self.gen(ty, d, env), self.gen(ty, d, env)),
                1 => Expr::binop(BinOp::Sub, self.gen(ty, d, env), self.gen(ty, d, env)),
                2 => Expr::binop(BinOp::Mul, self.gen(ty, d, env), self.gen(ty, d, env)),
                3 => Expr::binop(BinOp::Mod, self.gen(ty, d, env), self.gen(ty, d, env)),
                4 => Expr::rand(Expr::int(self.rng.random_range(0..3)), Expr::Unit),
                _ if depth == 0 => Expr::int(0),
                _ => Expr::Load(Box::new(self.gen(&Type::reference(int_ty()), d, env))),
            },
            Type::Bool => match self.rng.random_range(0..5) {
                0 => Expr::binop(BinOp::Eq, self.gen(&Type::Int, d, env), self.gen(&Type::Int, d, env)),
                1 => Expr::binop(BinOp::Lt, self.gen(&Type::Int, d, env), self.gen(&Type::Int, d, env)),
                2 => Expr::binop(BinOp::Le, self.gen(&Type::Int, d, env), self.gen(&Type::Int, d, env)),
                3 => Expr::binop(BinOp::And, self.gen(ty, d, env), self.gen(ty, d, env)),
                _ => Expr::flip(Expr::Unit),
            },
            Type::Unit if depth == 0 => Expr::Unit,
            Type::Unit => {
                let r = self.gen(&Type::reference(int_ty()), d, env);
                let v = self.gen(&Type::Int, d, env);
                Expr::Store(Box::new(r), Box::new(v))
            }
            Type::Prod(a, b) => Expr::pair(self.gen(a, d, env), self.gen(b, d, env)),
            Type::Sum(a, b) => {
                if self.rng.random() {
                    Expr::Inl(Some(ty.clone()), Box::new(self.gen(a, d, env)))
                } else {
                    Expr::Inr(Some(ty.clone()), Box::new(self.gen(b, d, env)))
                }
            }
            Type::Arrow(a, b) => {
                let x = self.name();
                env.push((x.clone(), (**a).clone()));
                let body = self.gen(b, d, env);
                env.pop();
                Expr::Rec(Box::new(RecFn {
                    f: Binder::Anon,
                    x: Binder::named(&x),
                    param: Some((**a).clone()),
                    ret: None,
                    body,
                }))
            }
            Type::Ref(a) => Expr::Alloc(Some((**a).clone()), Box::new(self.gen(a, d, env))),
            other => self.literal(other).expect("generator only produces supported types"),
        }
    }
}

/// Programs for the erasure suite, each paired with the tape bounds it
/// expects to find allocated before it runs (labels `0..`). Programs refer
/// to tapes through `label(i)` literals.
pub fn erasure_suite() -> Vec<(&'static str, &'static str, Vec<u64>)> {
    vec![
        ("read-once", "rand(1, label(0))", vec![1]),
        ("read-twice", "(rand(1, label(0)), rand(1, label(0)))", vec![1]),
        ("read-bound-two", "rand(2, label(0))", vec![2]),
        ("bound-mismatch", "rand(3, label(0))", vec![1]),
        ("flip-tape", "if rand(1, label(0)) = 0 then false else true", vec![1]),
        ("value", "5", vec![1]),
        ("unit-value", "()", vec![0]),
        ("unlabeled", "rand(1, ())", vec![1]),
        ("never-reads", "let r = ref 0 in r <- !r + 1; !r", vec![1]),
        ("other-tape", "rand(1, label(1))", vec![1, 1]),
        ("both-tapes", "rand(1, label(0)) + rand(1, label(1))", vec![1, 1]),
        ("sum-of-reads", "rand(1, label(0)) + rand(1, label(0)) + rand(1, label(0))", vec![1]),
        ("lazy-thunk", "let r = ref (inl[unit + bool] ()) in \
            let f = fun (u: unit) -> match !r with \
              inl _ -> let b = (if rand(1, label(0)) = 0 then false else true) in r <- inr[unit + bool] b; b \
            | inr b -> b end in (f (), f ())", vec![1]),
        ("alloc-then-read", "let t = alloctape 1 in (rand(1, t), rand(1, label(0)))", vec![1]),
        ("conditional-read", "if rand(1, ()) = 0 then rand(1, label(0)) else 7", vec![1]),
        ("loop-reads", "let go = rec go (n: int) : int -> if n <= 0 then 0 else rand(1, label(0)) + go (n - 1) in go 3", vec![1]),
        ("zero-bound", "rand(0, label(0))", vec![0]),
        ("diverges", "(rec omega (u: unit) : int -> omega u) ()", vec![1]),
        ("read-compare", "rand(2, label(0)) < rand(2, label(0))", vec![2]),
        ("mixed-bounds", "(rand(1, label(0)), rand(2, label(1)))", vec![1, 2]),
    ]
}

/// A random coupling problem with supports of at most `max` outcomes.
/// Half of the instances are built from a joint distribution over the
/// relation, so that a coupling exists before the optional perturbation.
pub fn random_instance(
    rng: &mut impl Rng,
    max: u32,
) -> (SubDistr<u32>, SubDistr<u32>, tapework::coupling::Relation<u32, u32>) {
    use tapework::coupling::Relation;
    let (n1, n2) = (rng.random_range(0..=max), rng.random_range(0..=max));
    let density: f64 = rng.random_range(0.1..0.9);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for a in 0..n1 {
        for b in 0..n2 {
            if rng.random_bool(density) {
                pairs.push((a, b));
            }
        }
    }
    let (mu1, mu2) = if rng.random_bool(0.5) && !pairs.is_empty() {
        let joint: Vec<((u32, u32), i64)> = pairs.iter().map(|p| (*p, rng.random_range(0..=4))).collect();
        let full = rng.random_bool(0.5);
        let joint = normalized(rng, joint, full);
        let mu1 = joint.map(|(a, _)| *a);
        let mut mu2 = joint.map(|(_, b)| *b);
        if rng.random_bool(0.3) && !mu2.is_empty() {
            let support: Vec<u32> = mu2.support().copied().collect();
            let from = support[rng.random_range(0..support.len())];
            let to = rng.random_range(0..n2);
            let moved = mu2.weight(&from) / q(2, 1);
            let rest = mu2.restrict(|b| *b != from);
            let shifted = SubDistr::from_weights([(from, moved.clone())]).unwrap();
            mu2 = rest.plus(&shifted).plus(&SubDistr::from_weights([(to, moved)]).unwrap());
        }
        if rng.random_bool(0.2) {
            pairs.pop();
        }
        (mu1, mu2)
    } else {
        (random_distr_on(rng, n1), random_distr_on(rng, n2))
    };
    let left: Vec<u32> = (0..n1).collect();
    let right: Vec<u32> = (0..n2).collect();
    let rel = Relation::from_pairs(left, right, pairs).expect("pairs within supports");
    (mu1, mu2, rel)
}

fn random_distr_on(rng: &mut impl Rng, n: u32) -> SubDistr<u32> {
    if n == 0 {
        return SubDistr::zero();
    }
    let full = rng.random_bool(0.5);
    random_distr(rng, n, full)
}
