//! Finite-set model of mereology and the weighted Tarski algebra.
//!
//! A term is a subset of a finite atom set. Non-empty terms are the things
//! of the mereological universe; the empty term `e` exists only so that the
//! weight function and algebraic products are total. In this model
//!
//! - proper part is strict inclusion,
//! - component is inclusion,
//! - overlap is non-empty intersection, exterior its negation,
//! - the class of a collection is its union,
//!
//! and the Tarski operations are union, intersection and complement. All
//! weights and degrees are exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Upper bound on the number of atoms a term can address.
pub const MAX_ATOMS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    bits: u64,
    atoms: u8,
}

impl Term {
    fn full_mask(atoms: usize) -> u64 {
        if atoms == 64 {
            u64::MAX
        } else {
            (1u64 << atoms) - 1
        }
    }

    /// A term from a bitmask over `atoms` atoms.
    pub fn from_bits(atoms: usize, bits: u64) -> Result<Self> {
        if atoms > MAX_ATOMS {
            return Err(Error::domain(format!(
                "at most {MAX_ATOMS} atoms are supported"
            )));
        }
        if bits & !Self::full_mask(atoms) != 0 {
            return Err(Error::domain("term names atoms outside its universe"));
        }
        Ok(Term {
            bits,
            atoms: atoms as u8,
        })
    }

    /// A term from 0-based atom indices.
    pub fn from_atoms(atoms: usize, members: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &a in members {
            if a >= atoms {
                return Err(Error::domain(format!(
                    "atom {a} is outside a {atoms}-atom universe"
                )));
            }
            bits |= 1 << a;
        }
        Term::from_bits(atoms, bits)
    }

    pub fn empty(atoms: usize) -> Self {
        Term {
            bits: 0,
            atoms: atoms as u8,
        }
    }

    pub fn full(atoms: usize) -> Self {
        Term {
            bits: Self::full_mask(atoms),
            atoms: atoms as u8,
        }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn universe_size(self) -> usize {
        self.atoms as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(self, atom: usize) -> bool {
        atom < 64 && self.bits & (1 << atom) != 0
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        (0..self.atoms as usize).filter(move |&a| self.bits & (1 << a) != 0)
    }

    pub fn is_subset(self, other: Term) -> bool {
        self.bits & !other.bits == 0
    }

    fn check(self, other: Term) {
        assert_eq!(
            self.atoms, other.atoms,
            "terms from universes of different size"
        );
    }

    /// `x + y`.
    pub fn sum(self, other: Term) -> Term {
        self.check(other);
        Term {
            bits: self.bits | other.bits,
            ..self
        }
    }

    /// `x · y`; may be `e`.
    pub fn product(self, other: Term) -> Term {
        self.check(other);
        Term {
            bits: self.bits & other.bits,
            ..self
        }
    }

    /// `-x`, relative to all atoms.
    pub fn complement(self) -> Term {
        Term {
            bits: !self.bits & Self::full_mask(self.atoms as usize),
            ..self
        }
    }

    /// `x ↪ y = -x + y`.
    pub fn implies(self, other: Term) -> Term {
        self.complement().sum(other)
    }

    /// Valid terms are those equal to the universe `V`.
    pub fn is_valid(self) -> bool {
        self.bits == Self::full_mask(self.atoms as usize)
    }

    /// All `2^n` terms of an `n`-atom universe, `e` first.
    pub fn all(atoms: usize) -> impl Iterator<Item = Term> {
        assert!(atoms < 64, "cannot enumerate 2^64 terms");
        (0..1u64 << atoms).map(move |bits| Term {
            bits,
            atoms: atoms as u8,
        })
    }

    /// All non-empty subterms of `self`.
    pub fn subterms(self) -> impl Iterator<Item = Term> {
        // walk submasks in decreasing order
        let full = self.bits;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            if cur == 0 {
                return None;
            }
            next = Some((cur - 1) & full);
            Some(Term { bits: cur, ..self })
        })
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        write!(f, "{{")?;
        for (i, a) in self.atoms().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

fn same_universe(x: Term, y: Term) -> Result<()> {
    if x.atoms != y.atoms {
        return Err(Error::domain(format!(
            "terms come from universes of {} and {} atoms",
            x.atoms, y.atoms
        )));
    }
    Ok(())
}

fn non_empty(x: Term) -> Result<()> {
    if x.is_empty() {
        return Err(Error::domain("the empty term has no existential import"));
    }
    Ok(())
}

/// `Pxy`: strict inclusion of a non-empty term.
pub fn proper_part(x: Term, y: Term) -> Result<bool> {
    same_universe(x, y)?;
    Ok(!x.is_empty() && x.is_subset(y) && x != y)
}

/// `Cxy`: proper part or identity.
pub fn component(x: Term, y: Term) -> Result<bool> {
    same_universe(x, y)?;
    Ok(!x.is_empty() && x.is_subset(y))
}

pub fn overlap(x: Term, y: Term) -> Result<bool> {
    same_universe(x, y)?;
    non_empty(x)?;
    non_empty(y)?;
    Ok(!x.product(y).is_empty())
}

pub fn exterior(x: Term, y: Term) -> Result<bool> {
    overlap(x, y).map(|o| !o)
}

/// `Re_b a m`: `a` and `m` are exterior proper parts of `b`.
pub fn relative_exterior(a: Term, m: Term, b: Term) -> Result<bool> {
    same_universe(a, b)?;
    Ok(proper_part(a, b)? && proper_part(m, b)? && exterior(a, m)?)
}

/// The class of a non-empty collection of things: their union.
pub fn class_of(collection: &[Term]) -> Result<Term> {
    let first = *collection
        .first()
        .ok_or_else(|| Error::domain("the class of an empty collection does not exist"))?;
    let mut acc = Term::empty(first.universe_size());
    for &b in collection {
        same_universe(first, b)?;
        non_empty(b)?;
        acc = acc.sum(b);
    }
    Ok(acc)
}

/// A rational in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(BigRational);

impl Degree {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::domain(format!("degree {value} is outside [0, 1]")));
        }
        Ok(Degree(value))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("zero denominator"));
        }
        Degree::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Degree(BigRational::zero())
    }

    pub fn one() -> Self {
        Degree(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// A finite atom set with strictly positive rational weights summing to one.
///
/// Weights are stored as integer masses over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedUniverse {
    masses: Vec<BigInt>,
    total: BigInt,
}

impl WeightedUniverse {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() || weights.len() > MAX_ATOMS {
            return Err(Error::domain(format!(
                "a universe needs between 1 and {MAX_ATOMS} atoms"
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::domain(format!("atom weight {w} is not positive")));
        }
        let sum: BigRational = weights.iter().sum();
        if !sum.is_one() {
            return Err(Error::domain(format!("atom weights sum to {sum}, not 1")));
        }
        let total = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let masses = weights
            .iter()
            .map(|w| w.numer() * (&total / w.denom()))
            .collect();
        Ok(WeightedUniverse { masses, total })
    }

    /// Each atom weighs `1/n`.
    pub fn uniform(atoms: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::domain("a universe needs at least one atom"));
        }
        Self::from_masses(&vec![1; atoms])
    }

    /// Normalizes positive integer masses into weights.
    pub fn from_masses(masses: &[u64]) -> Result<Self> {
        if masses.contains(&0) {
            return Err(Error::domain("masses must be positive"));
        }
        let total: u64 = masses.iter().sum();
        WeightedUniverse::new(
            masses
                .iter()
                .map(|&m| BigRational::new(m.into(), total.into()))
                .collect(),
        )
    }

    pub fn atoms(&self) -> usize {
        self.masses.len()
    }

    pub fn atom_weight(&self, atom: usize) -> BigRational {
        BigRational::new(self.masses[atom].clone(), self.total.clone())
    }

    /// The universe term `V`.
    pub fn universe(&self) -> Term {
        Term::full(self.atoms())
    }

    pub fn empty(&self) -> Term {
        Term::empty(self.atoms())
    }

    pub fn term(&self, members: &[usize]) -> Result<Term> {
        Term::from_atoms(self.atoms(), members)
    }

    fn owns(&self, x: Term) -> Result<()> {
        if x.universe_size() != self.atoms() {
            return Err(Error::domain(format!(
                "term from a {}-atom universe used with a {}-atom universe",
                x.universe_size(),
                self.atoms()
            )));
        }
        Ok(())
    }

    /// `m(x)`: the total weight of the atoms of `x`; `m(e) = 0`.
    pub fn weight(&self, x: Term) -> Result<BigRational> {
        self.owns(x)?;
        let mass: BigInt = x.atoms().map(|a| &self.masses[a]).sum();
        Ok(BigRational::new(mass, self.total.clone()))
    }

    /// `r` such that `x` is a part of `y` to degree `r`: `m(x·y) / m(x)`.
    pub fn degree_of_part(&self, x: Term, y: Term) -> Result<Degree> {
        same_universe(x, y)?;
        if x.is_empty() {
            return Err(Error::UndefinedDegree);
        }
        let num = self.weight(x.product(y))?;
        let den = self.weight(x)?;
        Degree::new(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(u: &WeightedUniverse, atoms: &[usize]) -> Term {
        // fixtures use 1-based atom names
        u.term(&atoms.iter().map(|a| a - 1).collect::<Vec<_>>())
            .unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn part_and_component_examples() {
        let u = WeightedUniverse::uniform(4).unwrap();
        let x = t(&u, &[1]);
        let xy = t(&u, &[1, 2]);
        assert!(proper_part(x, xy).unwrap());
        assert!(!proper_part(xy, xy).unwrap());
        assert!(!proper_part(xy, x).unwrap());
        assert!(component(xy, xy).unwrap());
        assert!(component(x, xy).unwrap());
        assert!(!component(t(&u, &[1, 3]), xy).unwrap());
        assert!(!component(u.empty(), xy).unwrap());
    }

    #[test]
    fn overlap_and_exterior() {
        let u = WeightedUniverse::uniform(4).unwrap();
        assert!(overlap(t(&u, &[1, 2]), t(&u, &[2, 3])).unwrap());
        assert!(!exterior(t(&u, &[1, 2]), t(&u, &[2, 3])).unwrap());
        assert!(!overlap(t(&u, &[1]), t(&u, &[2])).unwrap());
        assert!(exterior(t(&u, &[1]), t(&u, &[2])).unwrap());
        assert!(overlap(u.empty(), t(&u, &[1])).is_err());
        assert!(exterior(t(&u, &[1]), u.empty()).is_err());
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let a = Term::from_atoms(3, &[0]).unwrap();
        let b = Term::from_atoms(4, &[0]).unwrap();
        assert!(matches!(proper_part(a, b), Err(Error::Domain(_))));
        assert!(component(a, b).is_err());
        assert!(Term::from_atoms(3, &[3]).is_err());
    }

    #[test]
    fn relative_exterior_examples() {
        let u = WeightedUniverse::uniform(4).unwrap();
        assert!(relative_exterior(t(&u, &[1]), t(&u, &[2]), t(&u, &[1, 2, 3])).unwrap());
        assert!(!relative_exterior(t(&u, &[1]), t(&u, &[1]), t(&u, &[1, 2])).unwrap());
    }

    #[test]
    fn class_examples() {
        let u = WeightedUniverse::uniform(4).unwrap();
        let b = [t(&u, &[1]), t(&u, &[2, 3])];
        let cl = class_of(&b).unwrap();
        assert_eq!(cl, t(&u, &[1, 2, 3]));
        assert_eq!(class_of(&[t(&u, &[2])]).unwrap(), t(&u, &[2]));
        assert!(class_of(&[]).is_err());
        assert!(class_of(&[u.empty()]).is_err());
        // every component of the class overlaps some member
        for c in cl.subterms() {
            assert!(b.iter().any(|&m| overlap(c, m).unwrap()), "{c}");
        }
        for &m in &b {
            assert!(component(m, cl).unwrap());
        }
    }

    #[test]
    fn algebra_examples() {
        let u = WeightedUniverse::uniform(4).unwrap();
        assert_eq!(t(&u, &[1]).sum(t(&u, &[2])), t(&u, &[1, 2]));
        assert_eq!(t(&u, &[1, 2]).product(t(&u, &[2, 3])), t(&u, &[2]));
        assert_eq!(u.universe().complement(), u.empty());
        for x in Term::all(4) {
            assert_eq!(x.sum(x.complement()), u.universe());
            assert!(x.implies(x).is_valid());
        }
        let imp = t(&u, &[1]).implies(t(&u, &[1, 2]));
        assert_eq!(imp, t(&u, &[1, 2, 3, 4]));
        assert!(imp.is_valid());
    }

    #[test]
    fn weight_examples() {
        let u = WeightedUniverse::uniform(4).unwrap();
        assert_eq!(u.weight(t(&u, &[1, 2])).unwrap(), q(1, 2));
        assert_eq!(u.weight(u.empty()).unwrap(), q(0, 1));
        for x in Term::all(4) {
            assert_eq!(u.weight(x).unwrap().is_one(), x == u.universe());
        }
        let w = WeightedUniverse::from_masses(&[1, 2, 3]).unwrap();
        assert_eq!(w.weight(w.term(&[1, 2]).unwrap()).unwrap(), q(5, 6));
    }

    #[test]
    fn universe_validation() {
        assert!(WeightedUniverse::new(vec![q(1, 2), q(1, 3)]).is_err());
        assert!(WeightedUniverse::new(vec![q(1, 1), q(0, 1)]).is_err());
        assert!(WeightedUniverse::uniform(0).is_err());
    }

    #[test]
    fn degree_examples() {
        let u = WeightedUniverse::uniform(4).unwrap();
        assert_eq!(
            u.degree_of_part(t(&u, &[1, 2]), t(&u, &[2, 3])).unwrap(),
            Degree::from_ratio(1, 2).unwrap()
        );
        for x in Term::all(4).filter(|x| !x.is_empty()) {
            assert_eq!(u.degree_of_part(x, x).unwrap(), Degree::one());
        }
        assert_eq!(
            u.degree_of_part(t(&u, &[1]), t(&u, &[2])).unwrap(),
            Degree::zero()
        );
        assert!(matches!(
            u.degree_of_part(u.empty(), t(&u, &[1])),
            Err(Error::UndefinedDegree)
        ));
    }

    #[test]
    fn subterms_enumerates_all_non_empty_submasks() {
        let x = Term::from_atoms(5, &[0, 2, 4]).unwrap();
        let subs: Vec<_> = x.subterms().collect();
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|s| s.is_subset(x) && !s.is_empty()));
    }
}
