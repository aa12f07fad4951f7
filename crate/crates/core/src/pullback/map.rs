use super::{int, PullbackError, Turn};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Power(i64),
    PiecewiseLinear,
}

/// A local homeomorphism of the circle, given by a piecewise linear lift
/// `F` of `[0, 1]` with `F(x + 1) = F(x) + degree`. Positions are in turns.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    kind: MapKind,
    nodes: Vec<(Turn, Turn)>,
    degree: i64,
}

impl CircleMap {
    /// `θ ↦ kθ`.
    pub fn power(k: i64) -> Result<Self, PullbackError> {
        if k == 0 {
            return Err(PullbackError::ZeroDegree);
        }
        Ok(Self {
            kind: MapKind::Power(k),
            nodes: vec![(Turn::zero(), Turn::zero()), (Turn::one(), int(k))],
            degree: k,
        })
    }

    pub fn identity() -> Self {
        Self::power(1).expect("degree 1")
    }

    /// Lift through `nodes`: `x` runs from 0 to 1, `y` is strictly monotone
    /// and `y_last - y_first` is the nonzero integer degree.
    pub fn piecewise_linear(nodes: Vec<(Turn, Turn)>) -> Result<Self, PullbackError> {
        let bad = |msg: &str| PullbackError::NotMonotone(msg.to_string());
        if nodes.len() < 2 {
            return Err(bad("a lift needs at least two nodes"));
        }
        if !nodes[0].0.is_zero() || !nodes[nodes.len() - 1].0.is_one() {
            return Err(bad("node positions must run from 0 to 1"));
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(bad("node positions must increase"));
        }
        let rise = &nodes[nodes.len() - 1].1 - &nodes[0].1;
        if !rise.is_integer() || rise.is_zero() {
            return Err(PullbackError::ZeroDegree);
        }
        let up = rise.is_positive();
        if nodes.windows(2).any(|w| (w[1].1 > w[0].1) != up || w[1].1 == w[0].1) {
            return Err(bad("node values must be strictly monotone"));
        }
        let degree = rise
            .to_integer()
            .to_i64()
            .ok_or_else(|| bad("degree out of range"))?;
        Ok(Self {
            kind: MapKind::PiecewiseLinear,
            nodes,
            degree,
        })
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn nodes(&self) -> &[(Turn, Turn)] {
        &self.nodes
    }

    fn slope(&self, i: usize) -> Turn {
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        (&b.1 - &a.1) / (&b.0 - &a.0)
    }

    /// Largest `|F'|`.
    pub fn max_slope(&self) -> Turn {
        (0..self.nodes.len() - 1)
            .map(|i| self.slope(i).abs())
            .max()
            .expect("at least one segment")
    }

    /// The lift `F` at any real `x`.
    pub fn lift(&self, x: &Turn) -> Turn {
        let n = x.floor();
        let r = x - &n;
        let i = self
            .nodes
            .windows(2)
            .position(|w| r < w[1].0)
            .unwrap_or(self.nodes.len() - 2);
        &self.nodes[i].1 + (&r - &self.nodes[i].0) * self.slope(i) + n * int(self.degree)
    }

    pub fn eval(&self, t: &Turn) -> Turn {
        frac(&self.lift(t))
    }

    /// All `x` in `[0, 1)` with `f(x) = t`, in increasing order; there are
    /// `|degree|` of them.
    pub fn preimages(&self, t: &Turn) -> Vec<Turn> {
        let mut out = Vec::with_capacity(self.degree.unsigned_abs() as usize);
        for i in 0..self.nodes.len() - 1 {
            let (x0, y0) = &self.nodes[i];
            let y1 = &self.nodes[i + 1].1;
            let up = y1 > y0;
            let (lo, hi) = if up { (y0, y1) } else { (y1, y0) };
            let mut s = (lo - t).ceil();
            loop {
                let y = t + &s;
                if &y > hi {
                    break;
                }
                // x ranges over [x0, x1), so y over [y0, y1) going up and
                // (y1, y0] going down.
                let inside = if up { &y < y1 } else { &y > y1 };
                if inside {
                    out.push(x0 + (&y - y0) / self.slope(i));
                }
                s += Turn::one();
            }
        }
        out.sort();
        out
    }

    /// `g ∘ self`: first `self`, then `g`.
    pub fn then(&self, g: &CircleMap) -> CircleMap {
        if let (MapKind::Power(a), MapKind::Power(b)) = (self.kind, g.kind) {
            return CircleMap::power(a * b).expect("nonzero product");
        }
        let mut xs: Vec<Turn> = self.nodes.iter().map(|(x, _)| x.clone()).collect();
        for (gx, _) in &g.nodes {
            xs.extend(self.preimages(&frac(gx)));
        }
        xs.retain(|x| x < &Turn::one());
        xs.push(Turn::one());
        xs.sort();
        xs.dedup();
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = g.lift(&self.lift(&x));
                (x, y)
            })
            .collect();
        CircleMap::piecewise_linear(nodes).expect("composition of local homeomorphisms")
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pullback::turn;

    #[test]
    fn power_map_preimages() {
        let f = CircleMap::power(3).unwrap();
        assert_eq!(
            f.preimages(&Turn::zero()),
            vec![turn(0, 1), turn(1, 3), turn(2, 3)]
        );
        let g = CircleMap::power(-2).unwrap();
        assert_eq!(g.preimages(&turn(1, 4)), vec![turn(3, 8), turn(7, 8)]);
        for p in g.preimages(&turn(1, 4)) {
            assert_eq!(g.eval(&p), turn(1, 4));
        }
        assert!(CircleMap::power(0).is_err());
    }

    #[test]
    fn piecewise_linear_lift() {
        let f = CircleMap::piecewise_linear(vec![
            (turn(0, 1), turn(0, 1)),
            (turn(1, 2), turn(1, 4)),
            (turn(1, 1), turn(2, 1)),
        ])
        .unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.max_slope(), turn(7, 2));
        assert_eq!(f.lift(&turn(5, 4)), turn(17, 8));
        let pre = f.preimages(&turn(1, 8));
        assert_eq!(pre.len(), 2);
        for p in &pre {
            assert_eq!(f.eval(p), turn(1, 8));
        }
        assert!(CircleMap::piecewise_linear(vec![(turn(0, 1), turn(0, 1)), (turn(1, 1), turn(1, 2))]).is_err());
        assert!(CircleMap::piecewise_linear(vec![
            (turn(0, 1), turn(0, 1)),
            (turn(1, 2), turn(2, 1)),
            (turn(1, 1), turn(1, 1)),
        ])
        .is_err());
    }

    #[test]
    fn composition_matches_nested_evaluation() {
        let f = CircleMap::piecewise_linear(vec![
            (turn(0, 1), turn(0, 1)),
            (turn(1, 3), turn(1, 2)),
            (turn(1, 1), turn(1, 1)),
        ])
        .unwrap();
        let g = CircleMap::power(3).unwrap();
        let h = f.then(&g);
        assert_eq!(h.degree(), 3);
        for x in [turn(0, 1), turn(1, 7), turn(2, 5), turn(9, 10)] {
            assert_eq!(h.eval(&x), g.eval(&f.eval(&x)));
        }
        assert_eq!(g.then(&CircleMap::power(-2).unwrap()).kind(), MapKind::Power(-6));
    }
}
