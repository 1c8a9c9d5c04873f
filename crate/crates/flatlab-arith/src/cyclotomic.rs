//! `ℚ(ζ_m)` modulo the cyclotomic polynomial, and the real subfield `ℚ(2cos(π/n))`.

use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::QPoly;

/// `Φ_m`, by dividing `x^m - 1` by `Φ_d` for the proper divisors `d` of `m`.
pub fn cyclotomic_poly(m: usize) -> QPoly {
    assert!(m >= 1);
    let mut p = QPoly::monomial(m).sub(&QPoly::one());
    for d in 1..m {
        if m % d == 0 {
            let (quo, r) = p.div_rem(&cyclotomic_poly(d));
            debug_assert!(r.is_zero());
            p = quo;
        }
    }
    p
}

/// An element of a cyclotomic field, reduced modulo the defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloElem(pub QPoly);

impl CycloElem {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct CycloField {
    m: usize,
    phi: QPoly,
}

impl CycloField {
    pub fn new(m: usize) -> Self {
        CycloField { m, phi: cyclotomic_poly(m) }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi.degree().unwrap_or(0)
    }

    pub fn modulus(&self) -> &QPoly {
        &self.phi
    }

    pub fn elem(&self, p: QPoly) -> CycloElem {
        CycloElem(p.rem(&self.phi))
    }

    pub fn zero(&self) -> CycloElem {
        CycloElem(QPoly::zero())
    }

    pub fn one(&self) -> CycloElem {
        self.elem(QPoly::one())
    }

    pub fn rational(&self, r: BigRational) -> CycloElem {
        self.elem(QPoly::new(vec![r]))
    }

    /// `ζ_m^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> CycloElem {
        let e = k.rem_euclid(self.m as i64) as usize;
        self.elem(QPoly::monomial(e))
    }

    pub fn add(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        CycloElem(a.0.add(&b.0))
    }

    pub fn sub(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        CycloElem(a.0.sub(&b.0))
    }

    pub fn neg(&self, a: &CycloElem) -> CycloElem {
        CycloElem(a.0.neg())
    }

    pub fn mul(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.elem(a.0.mul(&b.0))
    }

    pub fn pow(&self, a: &CycloElem, mut e: u64) -> CycloElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Image under `ζ ↦ ζ^k` (a field automorphism when `gcd(k, m) = 1`).
    pub fn galois(&self, a: &CycloElem, k: i64) -> CycloElem {
        let mut acc = self.zero();
        for (i, c) in a.0.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = self.zeta_pow(k * i as i64);
            acc = self.add(&acc, &CycloElem(t.0.scale(c)));
        }
        acc
    }

    /// Complex conjugation, `ζ ↦ ζ⁻¹`.
    pub fn conj(&self, a: &CycloElem) -> CycloElem {
        self.galois(a, -1)
    }

    /// Value under the embedding `ζ ↦ exp(2πi/m)`, as `(re, im)`.
    pub fn to_complex(&self, a: &CycloElem) -> (f64, f64) {
        let w = std::f64::consts::TAU / self.m as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in a.0.coeffs().iter().enumerate() {
            let x = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
            re += x * (w * i as f64).cos();
            im += x * (w * i as f64).sin();
        }
        (re, im)
    }
}

/// `[[a, b], [c, d]]` over a cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloMat2 {
    pub a: CycloElem,
    pub b: CycloElem,
    pub c: CycloElem,
    pub d: CycloElem,
}

impl CycloField {
    pub fn mat_identity(&self) -> CycloMat2 {
        CycloMat2 { a: self.one(), b: self.zero(), c: self.zero(), d: self.one() }
    }

    pub fn mat_mul(&self, x: &CycloMat2, y: &CycloMat2) -> CycloMat2 {
        let f = |p: &CycloElem, q: &CycloElem, r: &CycloElem, s: &CycloElem| {
            self.add(&self.mul(p, q), &self.mul(r, s))
        };
        CycloMat2 {
            a: f(&x.a, &y.a, &x.b, &y.c),
            b: f(&x.a, &y.b, &x.b, &y.d),
            c: f(&x.c, &y.a, &x.d, &y.c),
            d: f(&x.c, &y.b, &x.d, &y.d),
        }
    }

    pub fn mat_pow(&self, x: &CycloMat2, mut e: u64) -> CycloMat2 {
        let mut base = x.clone();
        let mut acc = self.mat_identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            base = self.mat_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn mat_trace(&self, x: &CycloMat2) -> CycloElem {
        self.add(&x.a, &x.d)
    }

    pub fn mat_det(&self, x: &CycloMat2) -> CycloElem {
        self.sub(&self.mul(&x.a, &x.d), &self.mul(&x.b, &x.c))
    }
}

/// `ℚ(2cos(π/n))`, the maximal real subfield of `ℚ(ζ_{2n})`, on the power basis of
/// `x = 2cos(π/n)`.
#[derive(Clone, Debug)]
pub struct RealCycloField {
    n: usize,
    minpoly: QPoly,
}

/// Minimal polynomial of `ζ_N + ζ_N⁻¹`, from the palindromic `Φ_N` and
/// `z^j + z^{-j} = D_j(z + z⁻¹)` with `D_0 = 2`, `D_1 = x`, `D_j = x D_{j-1} - D_{j-2}`.
pub fn real_cyclotomic_minpoly(big_n: usize) -> QPoly {
    let phi = cyclotomic_poly(big_n);
    let deg = phi.degree().unwrap_or(0);
    if big_n <= 2 {
        // ζ + ζ⁻¹ = ±2
        return QPoly::from_ints(&[if big_n == 1 { -2 } else { 2 }, 1]);
    }
    let k = deg / 2;
    let mut dickson = vec![QPoly::from_ints(&[2]), QPoly::x()];
    for j in 2..=k {
        let next = QPoly::x().mul(&dickson[j - 1]).sub(&dickson[j - 2]);
        dickson.push(next);
    }
    let mut psi = QPoly::new(vec![phi.coeff(k)]);
    for (j, d) in dickson.iter().enumerate().take(k + 1).skip(1) {
        psi = psi.add(&d.scale(&phi.coeff(k + j)));
    }
    psi
}

impl RealCycloField {
    pub fn new(n: usize) -> Self {
        RealCycloField { n, minpoly: real_cyclotomic_minpoly(2 * n) }
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn minimal_polynomial(&self) -> &QPoly {
        &self.minpoly
    }

    pub fn generator_value(&self) -> f64 {
        2.0 * (std::f64::consts::PI / self.n as f64).cos()
    }

    pub fn elem(&self, p: QPoly) -> QPoly {
        p.rem(&self.minpoly)
    }

    pub fn mul(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a.mul(b).rem(&self.minpoly)
    }

    /// `α_n = 1 + 2cos(π/n)`.
    pub fn alpha(&self) -> QPoly {
        self.elem(QPoly::from_ints(&[1, 1]))
    }

    pub fn to_f64(&self, a: &QPoly) -> f64 {
        a.eval_f64(self.generator_value())
    }

    /// Substitutes `x = ζ_{2n} + ζ_{2n}⁻¹` into the minimal polynomial inside `ℚ(ζ_{2n})`; the
    /// result is exactly zero.
    pub fn minpoly_vanishes_exactly(&self) -> bool {
        let f = CycloField::new(2 * self.n);
        let x = f.add(&f.zeta_pow(1), &f.zeta_pow(-1));
        let mut acc = f.zero();
        for c in self.minpoly.coeffs().iter().rev() {
            acc = f.add(&f.mul(&acc, &x), &f.rational(c.clone()));
        }
        acc.is_zero()
    }
}

impl Default for CycloElem {
    fn default() -> Self {
        CycloElem(QPoly::zero())
    }
}
