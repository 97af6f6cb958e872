//! Exact scalar fields and rank computation.
//!
//! Two fields are provided: arbitrary-precision rationals ([`BigRational`],
//! ranked by fraction-free Bareiss elimination) and prime fields [`Zp`]
//! (plain Gaussian elimination). Nothing here rounds.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// The Mersenne prime 2^61 - 1.
pub const P61: u64 = (1 << 61) - 1;
/// The largest prime below 2^61 - 1, for cross-checking unlucky reductions.
pub const P61_ALT: u64 = 2_305_843_009_213_693_921;

pub type Fp61 = Zp<P61>;
pub type Fp61Alt = Zp<P61_ALT>;

pub trait Scalar: Clone + Eq + Hash + Debug + Display + Send + Sync + 'static {
    /// Short tag used in serialized realizations.
    const FIELD: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    /// A uniformly random nonzero element (rationals: a bounded random integer).
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// `(numerator, denominator)` as decimal strings.
    fn to_pair(&self) -> (String, String);
    fn from_pair(num: &str, den: &str) -> Option<Self>;

    /// Modulus for prime fields, `None` for rationals.
    fn modulus() -> Option<u64> {
        None
    }

    fn rank(rows: Vec<Vec<Self>>) -> usize {
        gaussian_rank(rows)
    }
}

/// Rank by Gaussian elimination with division. Exact in any field.
pub fn gaussian_rank<F: Scalar>(mut rows: Vec<Vec<F>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][c].inv().expect("nonzero pivot is invertible");
        let pivot_row: Vec<F> = rows[rank].iter().map(|x| x.mul(&inv)).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = x.sub(&factor.mul(p));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
///
/// Every intermediate entry is a minor of the input, so each division is exact.
pub fn bareiss_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            for j in (c + 1)..cols {
                let v = &prow[c] * &row[j] - &row[c] * &prow[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = rows[rank][c].clone();
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Clears denominators row by row; row scaling preserves rank.
pub fn integer_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * BigRational::from(lcm.clone())).to_integer()).collect()
        })
        .collect()
}

/// Reduction of a rational into `Zp`; `None` when `p` divides the denominator.
pub fn reduce<const P: u64>(x: &BigRational) -> Option<Zp<P>> {
    let p = BigInt::from(P);
    let num = x.numer().mod_floor(&p);
    let den = x.denom().mod_floor(&p);
    let to_u64 = |v: BigInt| -> u64 { v.try_into().expect("reduced below modulus") };
    Zp::new(to_u64(num)).div(&Zp::new(to_u64(den)))
}

/// An element of the prime field `Z/PZ`. `P` must be an odd prime below 2^63.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Zp<const P: u64>(u64);

impl<const P: u64> Zp<P> {
    pub fn new(v: u64) -> Self {
        Self(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> Debug for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Display for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Scalar for Zp<P> {
    const FIELD: &'static str = "zp";

    fn zero() -> Self {
        Self(0)
    }
    fn one() -> Self {
        Self(1)
    }
    fn from_i64(v: i64) -> Self {
        Self(v.rem_euclid(P as i64) as u64)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, rhs: &Self) -> Self {
        let s = self.0 + rhs.0;
        Self(if s >= P { s - P } else { s })
    }
    fn sub(&self, rhs: &Self) -> Self {
        Self(if self.0 >= rhs.0 { self.0 - rhs.0 } else { self.0 + P - rhs.0 })
    }
    fn mul(&self, rhs: &Self) -> Self {
        Self(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
    fn neg(&self) -> Self {
        Self(if self.0 == 0 { 0 } else { P - self.0 })
    }
    fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.pow(P - 2))
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.gen_range(1..P))
    }
    fn to_pair(&self) -> (String, String) {
        (self.0.to_string(), "1".to_string())
    }
    fn from_pair(num: &str, den: &str) -> Option<Self> {
        let parse = |s: &str| -> Option<Self> {
            let v: BigInt = s.parse().ok()?;
            let r: u64 = v.mod_floor(&BigInt::from(P)).try_into().ok()?;
            Some(Self(r))
        };
        parse(num)?.div(&parse(den)?)
    }
    fn modulus() -> Option<u64> {
        Some(P)
    }
}

/// Magnitude bound for random rational samples.
const RATIONAL_SAMPLE_BOUND: i64 = 1 << 16;

impl Scalar for BigRational {
    const FIELD: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = rng.gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND);
            if v != 0 {
                return Self::from_i64(v);
            }
        }
    }
    fn to_pair(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
    fn from_pair(num: &str, den: &str) -> Option<Self> {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        (!d.is_zero()).then(|| BigRational::new(n, d))
    }
    fn rank(rows: Vec<Vec<Self>>) -> usize {
        bareiss_rank(integer_rows(&rows))
    }
}

/// Lossy conversion for drawing only.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| if x.is_negative() { f64::MIN } else { f64::MAX })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zp_arithmetic() {
        let a = Fp61::from_i64(-3);
        assert_eq!(a.add(&Fp61::from_i64(3)), Fp61::zero());
        assert_eq!(a.mul(&a.inv().unwrap()), Fp61::one());
        assert_eq!(Fp61::zero().inv(), None);
        assert_eq!(Fp61::from_pair("1", "2").unwrap().mul(&Fp61::from_i64(2)), Fp61::one());
        assert_eq!(Fp61::from_i64(5).neg().add(&Fp61::from_i64(5)), Fp61::zero());
    }

    #[test]
    fn reduce_matches_field_ops() {
        let x = q(-7, 3);
        let z: Fp61 = reduce(&x).unwrap();
        assert_eq!(z.mul(&Fp61::from_i64(3)), Fp61::from_i64(-7));
    }

    #[test]
    fn ranks_of_small_matrices() {
        let zero = vec![vec![<BigRational as Scalar>::zero(); 3]; 2];
        assert_eq!(BigRational::rank(zero), 0);
        let m = vec![
            vec![q(1, 2), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(2, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(3, 7)],
        ];
        assert_eq!(BigRational::rank(m.clone()), 2);
        assert_eq!(gaussian_rank(m), 2);
        assert_eq!(Fp61::rank(vec![vec![Fp61::from_i64(2), Fp61::from_i64(4)], vec![Fp61::one(), Fp61::from_i64(2)]]), 1);
        assert_eq!(BigRational::rank(Vec::new()), 0);
    }

    #[test]
    fn bareiss_agrees_with_gaussian_on_random_integer_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let r = rng.gen_range(1..7);
            let c = rng.gen_range(1..7);
            let mut rows: Vec<Vec<BigRational>> = (0..r)
                .map(|_| (0..c).map(|_| BigRational::from_i64(rng.gen_range(-3..=3))).collect())
                .collect();
            if r > 1 && rng.gen_bool(0.5) {
                // force a dependency
                let combo: Vec<_> = rows[0].iter().zip(&rows[1]).map(|(a, b)| a.mul(&BigRational::from_i64(2)).sub(b)).collect();
                rows.push(combo);
            }
            let g = gaussian_rank(rows.clone());
            assert_eq!(BigRational::rank(rows.clone()), g);
            let zp: Vec<Vec<Fp61>> = rows.iter().map(|row| row.iter().map(|x| reduce(x).unwrap()).collect()).collect();
            assert_eq!(Fp61::rank(zp), g);
        }
    }

    #[test]
    fn pair_round_trip() {
        let x = q(-22, 6);
        let (n, d) = x.to_pair();
        assert_eq!((n.as_str(), d.as_str()), ("-11", "3"));
        assert_eq!(BigRational::from_pair(&n, &d), Some(x));
        assert_eq!(BigRational::from_pair("1", "0"), None);
    }
}
