//! A common home for quadratic p-adic root computations at odd p.
//!
//! For odd p every quadratic extension of Q_p embeds into E = U(pi), where U
//! is the unramified quadratic extension and pi^2 = p: the unramified one by
//! definition, Q_p(sqrt(p)) visibly, and Q_p(sqrt(up)) because every unit u
//! of Z_p becomes a square in U (the residue field F_{p^2} contains square
//! roots of all of F_p). Working in E once therefore accommodates the roots
//! of every integer polynomial factor of degree at most 2, and differences of
//! roots from different factors can be compared directly.
//!
//! Elements are pairs a + b*pi with a, b in the truncated U; the valuation is
//! min(v(a), v(b) + 1/2), a half-integer.

use crate::unram::{UnramElem, UnramRing};
use crate::val::Val;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

/// Failures when placing roots into the arena.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("factor of degree {0} exceeds the quadratic scope")]
    DegreeTooLarge(usize),
    #[error("leading coefficient is divisible by p, roots are not integral")]
    LeadingCoeffNotUnit,
}

/// The arena E at a fixed odd prime and precision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arena {
    ring: UnramRing,
}

/// Element a + b*pi of the arena, pi^2 = p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArenaElem {
    a: UnramElem,
    b: UnramElem,
}

impl Arena {
    pub fn new(p: u64, precision: u32) -> Arena {
        assert!(p % 2 == 1 && p > 2, "arena requires an odd prime");
        Arena { ring: UnramRing::new(p, 2, precision) }
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    /// The unramified quadratic coefficient ring U.
    pub fn ring(&self) -> &UnramRing {
        &self.ring
    }

    pub fn zero(&self) -> ArenaElem {
        ArenaElem { a: self.ring.zero(), b: self.ring.zero() }
    }

    pub fn from_bigint(&self, x: &BigInt) -> ArenaElem {
        ArenaElem { a: self.ring.from_bigint(x), b: self.ring.zero() }
    }

    /// Square root of a unit of U, Newton-lifted from the deterministic
    /// residue-field root.
    fn unit_sqrt(&self, x: &UnramElem) -> UnramElem {
        assert_eq!(x.valuation(), Some(0), "unit square root of a non-unit");
        let seed = x
            .reduce()
            .sqrt()
            .expect("every unit of the base is a square in the quadratic extension");
        let mut z = self.ring.lift(&seed);
        let iters = 33 - (self.ring.precision().max(2) - 1).leading_zeros();
        for _ in 0..iters {
            let num = z.square().sub(x);
            let den = z.scale(&BigUint::from(2u32)).invert().expect("2z is a unit");
            z = z.sub(&num.mul(&den));
        }
        assert!(z.square() == *x, "square root iteration failed to converge");
        z
    }

    /// Exact square root of a rational integer, as p^(v/2) * sqrt(unit),
    /// landing in the pi-component when v is odd.
    pub fn sqrt_integer(&self, d: &BigInt) -> ArenaElem {
        if d.is_zero() {
            return self.zero();
        }
        let p = BigInt::from(self.p());
        let mut v = 0u32;
        let mut u = d.clone();
        loop {
            let (q, r) = u.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            v += 1;
            u = q;
        }
        let root = self.unit_sqrt(&self.ring.from_bigint(&u));
        let shift = BigUint::from(self.p()).pow(v / 2);
        if v % 2 == 0 {
            ArenaElem { a: root.scale(&shift), b: self.ring.zero() }
        } else {
            ArenaElem { a: self.ring.zero(), b: root.scale(&shift) }
        }
    }

    /// All roots of an integer polynomial factor of degree 1 or 2, inside the
    /// arena. The leading coefficient must be a p-adic unit.
    pub fn roots_of_factor(&self, coeffs: &[BigInt]) -> Result<Vec<ArenaElem>, ArenaError> {
        let mut c: Vec<BigInt> = coeffs.to_vec();
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        let deg = c.len().saturating_sub(1);
        if deg == 0 || deg > 2 {
            return Err(ArenaError::DegreeTooLarge(deg));
        }
        let p = BigInt::from(self.p());
        if c[deg].mod_floor(&p).is_zero() {
            return Err(ArenaError::LeadingCoeffNotUnit);
        }
        let lead_inv = self.ring.from_bigint(&c[deg]).invert().unwrap();
        if deg == 1 {
            let root = self.ring.from_bigint(&-&c[0]).mul(&lead_inv);
            return Ok(vec![ArenaElem { a: root, b: self.ring.zero() }]);
        }
        // quadratic formula; p odd makes 2a a unit
        let disc = &c[1] * &c[1] - BigInt::from(4) * &c[2] * &c[0];
        let s = self.sqrt_integer(&disc);
        let inv_2a = self
            .ring
            .from_bigint(&(BigInt::from(2) * &c[2]))
            .invert()
            .expect("2 * leading coefficient is a unit");
        let minus_b = self.from_bigint(&-&c[1]);
        let r1 = minus_b.add(&s).scale_u(&inv_2a);
        let r2 = minus_b.sub(&s).scale_u(&inv_2a);
        Ok(vec![r1, r2])
    }
}

impl ArenaElem {
    pub fn add(&self, other: &ArenaElem) -> ArenaElem {
        ArenaElem { a: self.a.add(&other.a), b: self.b.add(&other.b) }
    }

    pub fn sub(&self, other: &ArenaElem) -> ArenaElem {
        ArenaElem { a: self.a.sub(&other.a), b: self.b.sub(&other.b) }
    }

    pub fn neg(&self) -> ArenaElem {
        ArenaElem { a: self.a.neg(), b: self.b.neg() }
    }

    pub fn mul(&self, other: &ArenaElem) -> ArenaElem {
        let p = BigUint::from(self.a.ring().p());
        let a = self.a.mul(&other.a).add(&self.b.mul(&other.b).scale(&p));
        let b = self.a.mul(&other.b).add(&self.b.mul(&other.a));
        ArenaElem { a, b }
    }

    /// Scale by an element of the coefficient ring U.
    pub fn scale_u(&self, u: &UnramElem) -> ArenaElem {
        ArenaElem { a: self.a.mul(u), b: self.b.mul(u) }
    }

    /// Valuation in (1/2)Z, or None when indistinguishable from zero at the
    /// working precision.
    pub fn valuation(&self) -> Option<Val> {
        let n = self.a.ring().precision();
        let sat = 2 * n as i64;
        let va = self.a.valuation().map_or(sat, |v| 2 * v as i64);
        let vb = self.b.valuation().map_or(sat, |v| 2 * v as i64 + 1);
        let v = va.min(vb);
        if v >= sat {
            None
        } else {
            Some(Val::half(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_square_roots() {
        let arena = Arena::new(7, 12);
        let s = arena.sqrt_integer(&BigInt::from(53));
        assert_eq!(s.mul(&s), arena.from_bigint(&BigInt::from(53)));
        assert_eq!(s.valuation(), Some(Val::ZERO));

        // v odd lands in the ramified component
        let t = arena.sqrt_integer(&BigInt::from(7));
        assert_eq!(t.valuation(), Some(Val::half(1)));
        assert_eq!(t.mul(&t), arena.from_bigint(&BigInt::from(7)));

        let arena53 = Arena::new(53, 10);
        let u = arena53.sqrt_integer(&BigInt::from(53));
        assert_eq!(u.valuation(), Some(Val::half(1)));

        // nonsquare unit: sqrt lives in U but not in Q_5
        let arena5 = Arena::new(5, 10);
        let v = arena5.sqrt_integer(&BigInt::from(8));
        assert_eq!(v.mul(&v), arena5.from_bigint(&BigInt::from(8)));
        assert_eq!(v.valuation(), Some(Val::ZERO));
    }

    #[test]
    fn quadratic_roots_and_cross_valuations() {
        // the p = 7 picture: one root of x^2-9x+7 meets the root 2 of x^2-4
        let arena = Arena::new(7, 12);
        let a_roots = arena
            .roots_of_factor(&[BigInt::from(-4), BigInt::from(0), BigInt::from(1)])
            .unwrap();
        let c_roots = arena
            .roots_of_factor(&[BigInt::from(7), BigInt::from(-9), BigInt::from(1)])
            .unwrap();
        assert_eq!(a_roots.len(), 2);
        assert_eq!(c_roots.len(), 2);
        let mut close = 0;
        let mut total = Val::ZERO;
        for x in &a_roots {
            for y in &c_roots {
                let v = x.sub(y).valuation().unwrap();
                total = total + v;
                if v > Val::ZERO {
                    close += 1;
                }
            }
        }
        assert_eq!(close, 1);
        assert_eq!(total, Val::int(1)); // = v_7(Res) = v_7(-203)
    }

    #[test]
    fn ramified_twin_depth() {
        // disc(x^2+7x-1) = 53: at p = 53 the two roots differ by sqrt(53)
        let arena = Arena::new(53, 10);
        let roots = arena
            .roots_of_factor(&[BigInt::from(-1), BigInt::from(7), BigInt::from(1)])
            .unwrap();
        let d = roots[0].sub(&roots[1]).valuation().unwrap();
        assert_eq!(d, Val::half(1));
        // and the polynomial really vanishes on them
        for r in &roots {
            let val = r
                .mul(r)
                .add(&r.scale_u(&arena.ring().from_i64(7)))
                .sub(&arena.from_bigint(&BigInt::from(1)));
            assert_eq!(val.valuation(), None);
        }
    }

    #[test]
    fn factor_rejection() {
        let arena = Arena::new(7, 8);
        let cubic: Vec<BigInt> = (0..4).map(|_| BigInt::from(1)).collect();
        assert_eq!(arena.roots_of_factor(&cubic).unwrap_err(), ArenaError::DegreeTooLarge(3));
        assert_eq!(
            arena
                .roots_of_factor(&[BigInt::from(1), BigInt::from(7)])
                .unwrap_err(),
            ArenaError::LeadingCoeffNotUnit
        );
    }
}
