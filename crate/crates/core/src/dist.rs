//! Finite-support sub-distributions and their monad structure.

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weight::{format_ratio, parse_ratio, Weight};

/// A finite map from outcomes to strictly positive weights of total mass at
/// most one.
#[derive(Clone, Debug, PartialEq)]
pub struct SubDistr<A: Ord, W = BigRational> {
    weights: BTreeMap<A, W>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DistrError {
    #[error("weight for outcome {0} is not positive")]
    NonPositive(String),
    #[error("total mass {0} exceeds 1")]
    MassExceeded(String),
    #[error("malformed weight `{0}`")]
    BadWeight(String),
    #[error("outcome {0} listed twice")]
    Duplicate(String),
    #[error("malformed distribution JSON: {0}")]
    Json(String),
}

impl<A: Ord + Clone, W: Weight> SubDistr<A, W> {
    pub fn zero() -> Self {
        SubDistr {
            weights: BTreeMap::new(),
        }
    }

    pub fn dret(a: A) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(a, W::one());
        SubDistr { weights }
    }

    /// Uniform over the given outcomes, which must be distinct.
    pub fn uniform(items: impl IntoIterator<Item = A>) -> Self {
        let items: Vec<A> = items.into_iter().collect();
        if items.is_empty() {
            return Self::zero();
        }
        let w = W::uniform(&num_bigint::BigUint::from(items.len()));
        Self::from_disjoint(items.into_iter().map(|a| (a, w.clone())))
    }

    /// Builds a distribution from weighted outcomes, merging duplicates and
    /// dropping zero weights. Mass is not checked.
    pub(crate) fn from_disjoint(items: impl IntoIterator<Item = (A, W)>) -> Self {
        let mut d = Self::zero();
        for (a, w) in items {
            d.add(a, w);
        }
        d
    }

    /// Validating constructor: every weight positive, duplicates rejected,
    /// total mass at most one.
    pub fn from_weights(items: impl IntoIterator<Item = (A, W)>) -> Result<Self, DistrError>
    where
        A: fmt::Debug,
    {
        let mut weights = BTreeMap::new();
        let mut mass = W::zero();
        for (a, w) in items {
            if w <= W::zero() {
                return Err(DistrError::NonPositive(format!("{a:?}")));
            }
            mass = mass + w.clone();
            if weights.contains_key(&a) {
                return Err(DistrError::Duplicate(format!("{a:?}")));
            }
            weights.insert(a, w);
        }
        if mass > W::one() {
            return Err(DistrError::MassExceeded(format!("{mass:?}")));
        }
        Ok(SubDistr { weights })
    }

    pub(crate) fn add(&mut self, a: A, w: W) {
        if w == W::zero() {
            return;
        }
        match self.weights.get_mut(&a) {
            Some(old) => *old = old.clone() + w,
            None => {
                self.weights.insert(a, w);
            }
        }
    }

    pub fn weight(&self, a: &A) -> W {
        self.weights.get(a).cloned().unwrap_or_else(W::zero)
    }

    pub fn mass(&self) -> W {
        self.weights.values().fold(W::zero(), |acc, w| acc + w.clone())
    }

    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &W)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn bind<B: Ord + Clone>(&self, mut f: impl FnMut(&A) -> SubDistr<B, W>) -> SubDistr<B, W> {
        let mut out = SubDistr::zero();
        for (a, w) in &self.weights {
            for (b, v) in f(a).weights {
                out.add(b, w.clone() * v);
            }
        }
        out
    }

    /// Pushforward along `f`.
    pub fn map<B: Ord + Clone>(&self, mut f: impl FnMut(&A) -> B) -> SubDistr<B, W> {
        SubDistr::from_disjoint(self.weights.iter().map(|(a, w)| (f(a), w.clone())))
    }

    /// Keeps the outcomes satisfying `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&A) -> bool) -> SubDistr<A, W> {
        SubDistr {
            weights: self
                .weights
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, w)| (a.clone(), w.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, by: &W) -> SubDistr<A, W> {
        SubDistr::from_disjoint(self.weights.iter().map(|(a, w)| (a.clone(), w.clone() * by.clone())))
    }

    /// Pointwise sum; the caller is responsible for the mass bound.
    pub fn plus(&self, other: &SubDistr<A, W>) -> SubDistr<A, W> {
        let mut out = self.clone();
        for (a, w) in &other.weights {
            out.add(a.clone(), w.clone());
        }
        out
    }

    /// `self(a) <= other(a)` for every `a`.
    pub fn pointwise_le(&self, other: &SubDistr<A, W>) -> bool {
        self.weights.iter().all(|(a, w)| *w <= other.weight(a))
    }
}

impl<A: Ord + Clone, W: Weight> FromIterator<(A, W)> for SubDistr<A, W> {
    fn from_iter<I: IntoIterator<Item = (A, W)>>(iter: I) -> Self {
        Self::from_disjoint(iter)
    }
}

pub fn dret<A: Ord + Clone, W: Weight>(a: A) -> SubDistr<A, W> {
    SubDistr::dret(a)
}

pub fn dzero<A: Ord + Clone, W: Weight>() -> SubDistr<A, W> {
    SubDistr::zero()
}

pub fn dbind<A: Ord + Clone, B: Ord + Clone, W: Weight>(
    f: impl FnMut(&A) -> SubDistr<B, W>,
    mu: &SubDistr<A, W>,
) -> SubDistr<B, W> {
    mu.bind(f)
}

/// JSON form: outcomes sorted by their printed form, weights as `num/den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistrJson {
    pub outcomes: Vec<OutcomeJson>,
    pub mass: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub value: String,
    pub weight: String,
}

impl<A: Ord + Clone + Display> SubDistr<A, BigRational> {
    /// Outcomes with their printed forms, in printed-form order.
    pub fn rendered(&self) -> Vec<(String, &A, &BigRational)> {
        let mut rows: Vec<_> = self.weights.iter().map(|(a, w)| (a.to_string(), a, w)).collect();
        rows.sort_by(|x, y| x.0.cmp(&y.0));
        rows
    }

    pub fn to_json(&self) -> DistrJson {
        DistrJson {
            outcomes: self
                .rendered()
                .into_iter()
                .map(|(value, _, w)| OutcomeJson {
                    value,
                    weight: format_ratio(w),
                })
                .collect(),
            mass: format_ratio(&self.mass()),
        }
    }
}

impl DistrJson {
    /// Reads back a distribution keyed by printed outcomes.
    pub fn to_distr(&self) -> Result<SubDistr<String, BigRational>, DistrError> {
        let mut items = Vec::new();
        for o in &self.outcomes {
            let w = parse_ratio(&o.weight).ok_or_else(|| DistrError::BadWeight(o.weight.clone()))?;
            items.push((o.value.clone(), w));
        }
        SubDistr::from_weights(items)
    }

    pub fn parse(text: &str) -> Result<DistrJson, DistrError> {
        serde_json::from_str(text).map_err(|e| DistrError::Json(e.to_string()))
    }
}

impl<A: Ord + Clone + Display> Display for SubDistr<A, BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (s, _, w)) in self.rendered().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}: {}", format_ratio(w))?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn coin() -> SubDistr<bool> {
        SubDistr::uniform([true, false])
    }

    #[test]
    fn dret_is_point_mass() {
        let d: SubDistr<i32> = dret(7);
        assert_eq!(d.weight(&7), BigRational::one());
        assert_eq!(d.mass(), BigRational::one());
        let u: SubDistr<()> = dret(());
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn coin_kernel() {
        let out = coin().bind(|&b| SubDistr::uniform([b, !b]));
        assert_eq!(out, coin());
        assert_eq!(out.weight(&true), q(1, 2));
    }

    #[test]
    fn zero_absorbs() {
        let z: SubDistr<bool> = dzero();
        assert!(z.mass().is_zero());
        assert!(z.bind(|&b| dret(!b)).is_zero());
    }

    #[test]
    fn validation() {
        assert!(SubDistr::from_weights([(1, q(1, 2)), (2, q(2, 3))]).is_err());
        assert!(SubDistr::from_weights([(1, q(0, 1))]).is_err());
        assert!(SubDistr::from_weights([(1, q(1, 2)), (1, q(1, 4))]).is_err());
        assert!(SubDistr::from_weights([(1, q(1, 2))]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let d: SubDistr<i64> = SubDistr::from_weights([(10, q(1, 3)), (2, q(1, 6))]).unwrap();
        let j = d.to_json();
        assert_eq!(j.outcomes[0].value, "10");
        assert_eq!(j.mass, "1/2");
        let text = serde_json::to_string(&j).unwrap();
        let back = DistrJson::parse(&text).unwrap().to_distr().unwrap();
        assert_eq!(back.to_json(), j);
        assert_eq!(d.to_string(), "{10: 1/3, 2: 1/6}");
    }
}
