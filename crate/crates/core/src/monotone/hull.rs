//! Least concave majorant of `ln F` and its concave Legendre data.

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::monotone::curve::{Piece, PiecewiseCurve, Tail};
use crate::monotone::step::MonotoneStep;

/// `(ln F)^c` for a step function `F`, together with
/// `m(t) = sup_λ (ln F(λ) − tλ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHull {
    /// `(b_k, ln v_k)` for every plateau with positive value.
    points: Vec<(f64, f64)>,
    /// Upper hull vertices, ascending in `λ`.
    vertices: Vec<(f64, f64)>,
    /// `ln v_0` when `F` is positive on a left half-line; the majorant is
    /// then the constant `ln sup F`.
    base: Option<f64>,
}

impl LogHull {
    pub fn new(f: &MonotoneStep) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::InvalidStep("ln F is identically -inf".into()));
        }
        let points: Vec<(f64, f64)> = f
            .breakpoints()
            .iter()
            .zip(&f.values()[1..])
            .filter(|(_, &v)| v > 0.0)
            .map(|(&b, &v)| (b, v.ln()))
            .collect();
        let base = (f.base() > 0.0).then(|| f.base().ln());
        let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for &p in &points {
            while vertices.len() >= 2 {
                let o = vertices[vertices.len() - 2];
                let a = vertices[vertices.len() - 1];
                let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
                if cross >= 0.0 {
                    vertices.pop();
                } else {
                    break;
                }
            }
            vertices.push(p);
        }
        Ok(LogHull {
            points,
            vertices,
            base,
        })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// `ln sup F`.
    pub fn top(&self) -> f64 {
        match self.vertices.last() {
            Some(v) => v.1,
            None => self.base.expect("nonzero F has a positive value"),
        }
    }

    /// Left end of the domain where the majorant is finite.
    pub fn domain_start(&self) -> f64 {
        if self.base.is_some() {
            f64::NEG_INFINITY
        } else {
            self.vertices[0].0
        }
    }

    /// Slopes of the hull segments, decreasing and positive.
    pub fn slopes(&self) -> Vec<f64> {
        if self.base.is_some() {
            return Vec::new();
        }
        self.vertices
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// `(ln F)^c(λ)`.
    pub fn eval(&self, lambda: f64) -> Ext {
        if self.base.is_some() {
            return Ext::Finite(self.top());
        }
        let v = &self.vertices;
        if lambda < v[0].0 {
            return Ext::NegInf;
        }
        if lambda >= v[v.len() - 1].0 {
            return Ext::Finite(self.top());
        }
        let i = v.partition_point(|p| p.0 <= lambda);
        let (a, b) = (v[i - 1], v[i]);
        let s = (lambda - a.0) / (b.0 - a.0);
        Ext::Finite(a.1 + s * (b.1 - a.1))
    }

    /// The majorant as a curve: affine between vertices, flat after the
    /// last one, `−∞` before the first.
    pub fn curve(&self) -> PiecewiseCurve {
        if self.base.is_some() {
            return PiecewiseCurve::new(
                vec![f64::NEG_INFINITY, f64::INFINITY],
                vec![Piece::affine(self.top(), 0.0)],
                Tail::Extend,
                Tail::Extend,
            )
            .expect("constant curve");
        }
        let v = &self.vertices;
        let mut knots: Vec<f64> = v.iter().map(|p| p.0).collect();
        let mut pieces: Vec<Piece> = v
            .windows(2)
            .map(|w| {
                let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                Piece::affine(w[0].1 - s * w[0].0, s)
            })
            .collect();
        knots.push(f64::INFINITY);
        pieces.push(Piece::affine(self.top(), 0.0));
        PiecewiseCurve::new(knots, pieces, Tail::NegInf, Tail::Extend).expect("hull knots ascend")
    }

    /// `m(t) = sup_λ (ln F(λ) − tλ)` for `t ≥ 0`, taken over the plateau
    /// left ends (the sup is approached just right of each breakpoint).
    pub fn m(&self, t: f64) -> Result<Ext> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("m(t) needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(Ext::Finite(self.top()));
        }
        if self.base.is_some() {
            return Ok(Ext::PosInf);
        }
        Ok(Ext::Finite(
            self.points
                .iter()
                .map(|&(b, l)| l - t * b)
                .fold(f64::NEG_INFINITY, f64::max),
        ))
    }

    /// `m` as a convex piecewise-affine curve on `[0, ∞)`.
    pub fn m_curve(&self) -> PiecewiseCurve {
        if self.base.is_some() {
            return PiecewiseCurve::new(
                vec![0.0, 0.0],
                vec![Piece::affine(self.top(), 0.0)],
                Tail::PosInf,
                Tail::PosInf,
            )
            .expect("degenerate curve");
        }
        let v = &self.vertices;
        let s = self.slopes();
        let mut knots = vec![0.0];
        let mut pieces = Vec::new();
        for j in (0..v.len()).rev() {
            pieces.push(Piece::affine(v[j].1, -v[j].0));
            knots.push(if j == 0 { f64::INFINITY } else { s[j - 1] });
        }
        PiecewiseCurve::new(knots, pieces, Tail::PosInf, Tail::Extend).expect("slopes descend")
    }

    /// `inf_{t ≥ 0} (m(t) + tE)`, attained at a hull slope (or in the
    /// limit `t → 0` past the last vertex, `t → ∞` before the first).
    pub fn legendre_bound(&self, energy: f64) -> Ext {
        if self.base.is_none() && energy < self.vertices[0].0 {
            return Ext::NegInf;
        }
        let mut best = Ext::Finite(self.top());
        for t in self.slopes() {
            let cand = self.m(t).expect("slopes are positive") + t * energy;
            best = best.min(cand);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_plateaus_interpolate_across_the_gap() {
        let f = MonotoneStep::new(vec![1.0, 3.0], vec![0.0, 1.0, 2.0]).unwrap();
        let h = LogHull::new(&f).unwrap();
        assert_eq!(h.vertices(), &[(1.0, 0.0), (3.0, 2f64.ln())]);
        assert!((h.eval(2.0).to_f64() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(h.eval(0.5), Ext::NegInf);
        assert_eq!(h.eval(10.0), Ext::Finite(2f64.ln()));
        let c = h.curve();
        for x in [0.0, 1.0, 1.7, 3.0, 9.0] {
            assert_eq!(c.eval(x), h.eval(x));
        }
        assert!(c.is_concave(0.0));
    }

    #[test]
    fn concave_samples_are_all_vertices() {
        // F(λ) = C λ^{n/2} sampled at λ = 1..20
        let (c, n) = (0.3, 3.0);
        let bs: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let mut vs = vec![0.0];
        vs.extend(bs.iter().map(|&l| c * l.powf(n / 2.0)));
        let f = MonotoneStep::new(bs.clone(), vs).unwrap();
        let h = LogHull::new(&f).unwrap();
        assert_eq!(h.vertices().len(), 20);
        for &l in &bs {
            assert!((h.eval(l).to_f64() - (c * l.powf(n / 2.0)).ln()).abs() < 1e-10);
        }
        // m(t) at t = n/(2λ*) with λ* on the grid
        let t = n / (2.0 * 6.0);
        let expect = c.ln() + (n / 2.0) * ((n / (2.0 * t)).ln() - 1.0);
        assert!((h.m(t).unwrap().to_f64() - expect).abs() < 1e-12);
    }

    #[test]
    fn legendre_consistency_at_touching_points() {
        let f = MonotoneStep::new(vec![-2.0, 0.5, 1.0, 4.0], vec![0.0, 0.1, 0.2, 1.5, 1.6]).unwrap();
        let h = LogHull::new(&f).unwrap();
        let m = h.m_curve();
        for (i, t) in h.slopes().into_iter().enumerate() {
            for &(l, hv) in &h.vertices()[i..=i + 1] {
                let lhs = h.m(t).unwrap().to_f64() + t * l;
                assert!((lhs - hv).abs() < 1e-12);
                assert!((m.eval(t).to_f64() - h.m(t).unwrap().to_f64()).abs() < 1e-12);
            }
        }
        for e in [-2.0, -1.0, 0.7, 2.0, 4.0, 8.0] {
            let a = h.legendre_bound(e).to_f64();
            let b = h.eval(e).to_f64();
            assert!((a - b).abs() < 1e-12, "{e}: {a} vs {b}");
        }
        assert_eq!(h.legendre_bound(-3.0), Ext::NegInf);
    }

    #[test]
    fn zero_function_is_rejected() {
        assert!(LogHull::new(&MonotoneStep::zero()).is_err());
    }
}
