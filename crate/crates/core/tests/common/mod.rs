#![allow(dead_code)]

use std::f64::consts::TAU;

use pade_core::universal::Geometry;
use pade_core::{make_region, Complex, Demand, PadeIndex, PadeIndexFamily, Polynomial, RegionSpec, SampledCompact};

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// {0} plus 9 points on |z| = 0.15 and 16 on |z| = 0.3.
pub fn l_points() -> SampledCompact {
    let pts: Vec<Complex> = std::iter::once(c(0.0, 0.0))
        .chain((0..9).map(|k| Complex::from_polar(0.15, k as f64 * TAU / 9.0)))
        .chain((0..16).map(|k| Complex::from_polar(0.3, k as f64 * TAU / 16.0)))
        .collect();
    make_region(&RegionSpec::points("L", &pts)).unwrap()
}

pub fn geometry() -> Geometry {
    Geometry {
        l: l_points(),
        l_prime: make_region(&RegionSpec::disc("L'", c(0.0, 0.0), 0.5, 0.02)).unwrap(),
    }
}

pub fn segment_k() -> SampledCompact {
    make_region(&RegionSpec::segment("K", c(2.0, 0.0), c(3.0, 0.0), 51).outside_omega(true)).unwrap()
}

pub fn witness_family() -> PadeIndexFamily {
    let mut w: Vec<PadeIndex> = (1..=12).map(|k| PadeIndex::new(5 * k, 1)).collect();
    w.extend((1..=10).map(|k| PadeIndex::new(6 * k, 2)));
    PadeIndexFamily::from_members(w).unwrap()
}

/// h_1 = 1 then h_2 = z^2 on K, s = 100.
pub fn demands() -> Vec<Demand> {
    vec![
        Demand::new(Polynomial::from_real(&[1.0]).unwrap(), segment_k(), 100).unwrap(),
        Demand::new(Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap(), segment_k(), 100).unwrap(),
    ]
}

/// Series coefficients of `num / den` at the origin by long division.
pub fn series_of_quotient(num: &[Complex], den: &[Complex], order: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(order + 1);
    for v in 0..=order {
        let mut acc = num.get(v).copied().unwrap_or_default();
        for j in 1..=v.min(den.len().saturating_sub(1)) {
            acc -= den[j] * out[v - j];
        }
        out.push(acc / den[0]);
    }
    out
}

/// Monic polynomial with the given roots, ascending coefficients.
pub fn from_roots(roots: &[Complex]) -> Vec<Complex> {
    let mut p = vec![c(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![c(0.0, 0.0); p.len() + 1];
        for (k, &a) in p.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        p = next;
    }
    p
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        Self::renorm(s, e + self.lo + o.lo)
    }

    pub fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexDd {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDd {
    pub fn from_c(z: Complex) -> Self {
        Self { re: DoubleDouble::from_f64(z.re), im: DoubleDouble::from_f64(z.im) }
    }

    pub fn to_c(self) -> Complex {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn sub(self, o: Self) -> Self {
        Self { re: self.re.add(o.re.neg()), im: self.im.add(o.im.neg()) }
    }

    pub fn mul(self, o: Self) -> Self {
        Self {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }
}

/// Taylor coefficients of `num / den` at the origin, accumulated in
/// double-double; `den[0]` must be exactly 1.
pub fn series_of_quotient_dd(num: &[Complex], den: &[Complex], order: usize) -> Vec<Complex> {
    assert_eq!(den[0], c(1.0, 0.0), "normalized denominator expected");
    let den: Vec<ComplexDd> = den.iter().map(|&z| ComplexDd::from_c(z)).collect();
    let mut out: Vec<ComplexDd> = Vec::with_capacity(order + 1);
    for v in 0..=order {
        let mut acc = ComplexDd::from_c(num.get(v).copied().unwrap_or_default());
        for j in 1..=v.min(den.len() - 1) {
            acc = acc.sub(den[j].mul(out[v - j]));
        }
        out.push(acc);
    }
    out.into_iter().map(ComplexDd::to_c).collect()
}
