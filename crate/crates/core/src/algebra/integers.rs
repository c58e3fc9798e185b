//! The integers as a coefficient ring, for integral cocycle lattices.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ring::Ring;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_int(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        (a.abs() == BigInt::one()).then(|| a.clone())
    }

    fn is_field(&self) -> bool {
        false
    }

    fn name(&self) -> String {
        "Z".into()
    }

    fn render(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_are_plus_minus_one() {
        let z = Integers;
        assert_eq!(z.inv(&z.from_int(-1)), Some(z.from_int(-1)));
        assert_eq!(z.inv(&z.from_int(2)), None);
        assert_eq!(z.pow(&z.from_int(3), 4), z.from_int(81));
        assert_eq!(z.render(&z.from_int(-7)), "-7");
    }
}
