//! Executable law suite for the weighted Tarski algebra.
//!
//! Every law is a predicate over one to three terms of a
//! [`WeightedUniverse`]. A suite run evaluates each law either on every
//! tuple of terms or on a random sample of tuples, and records how many
//! tuples were checked together with the first counterexample.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::mereology::{
    class_of, component, exterior, overlap, proper_part, ratio_to_f64, relative_exterior, Term,
    WeightedUniverse,
};
use crate::tnorm::{self, TruthValue};

type Check = fn(&WeightedUniverse, &[Term]) -> bool;

/// One law of the suite.
pub struct Law {
    pub name: &'static str,
    pub arity: usize,
    /// Whether the empty term is among the quantified arguments.
    pub with_empty: bool,
    check: Check,
}

impl Law {
    pub fn holds(&self, u: &WeightedUniverse, args: &[Term]) -> bool {
        (self.check)(u, args)
    }
}

macro_rules! law {
    ($name:expr, $arity:expr, $empty:expr, |$u:ident, $a:ident| $body:expr) => {
        Law {
            name: $name,
            arity: $arity,
            with_empty: $empty,
            check: |$u: &WeightedUniverse, $a: &[Term]| $body,
        }
    };
}

fn m(u: &WeightedUniverse, x: Term) -> BigRational {
    u.weight(x).expect("term from this universe")
}

fn c(x: Term, y: Term) -> bool {
    component(x, y).expect("same universe")
}

fn p(x: Term, y: Term) -> bool {
    proper_part(x, y).expect("same universe")
}

fn ov(x: Term, y: Term) -> bool {
    overlap(x, y).expect("non-empty terms")
}

fn implies(a: bool, b: bool) -> bool {
    !a || b
}

/// The literal reading of Axiom A: if every component of `a` overlaps some
/// component of `b`, then `a` is a component of `b`.
fn axiom_a(a: Term, b: Term) -> bool {
    let antecedent = a.subterms().all(|ma| b.subterms().any(|nb| ov(ma, nb)));
    implies(antecedent, c(a, b))
}

/// The two defining requirements of the class of `collection`.
fn class_requirements(collection: &[Term]) -> (bool, bool) {
    let cl = class_of(collection).expect("non-empty collection of things");
    let first = collection.iter().all(|&b| c(b, cl));
    let second = cl
        .subterms()
        .all(|part| collection.iter().any(|&b| ov(part, b)));
    (first, second)
}

/// All laws, in report order.
pub fn laws() -> Vec<Law> {
    vec![
        // proper part
        law!("parts.irreflexive", 1, false, |_u, a| !p(a[0], a[0])),
        law!("parts.transitive", 3, false, |_u, a| implies(
            p(a[0], a[1]) && p(a[1], a[2]),
            p(a[0], a[2])
        )),
        law!("parts.asymmetric", 2, false, |_u, a| implies(
            p(a[0], a[1]),
            !p(a[1], a[0])
        )),
        // component
        law!("components.reflexive", 1, false, |_u, a| c(a[0], a[0])),
        law!("components.antisymmetric", 2, false, |_u, a| implies(
            c(a[0], a[1]) && c(a[1], a[0]),
            a[0] == a[1]
        )),
        law!("components.transitive", 3, false, |_u, a| implies(
            c(a[0], a[1]) && c(a[1], a[2]),
            c(a[0], a[2])
        )),
        law!("overlap.symmetric", 2, false, |_u, a| ov(a[0], a[1])
            == ov(a[1], a[0])),
        law!("exterior.symmetric", 2, false, |_u, a| exterior(a[0], a[1])
            .unwrap()
            == exterior(a[1], a[0]).unwrap()),
        law!(
            "relative_exterior.symmetric",
            3,
            false,
            |_u, a| relative_exterior(a[0], a[1], a[2]).unwrap()
                == relative_exterior(a[1], a[0], a[2]).unwrap()
        ),
        law!("axiom_a", 2, false, |_u, a| axiom_a(a[0], a[1])),
        law!("class.requirement_1", 3, false, |_u, a| class_requirements(
            a
        )
        .0),
        law!("class.requirement_2", 3, false, |_u, a| class_requirements(
            a
        )
        .1),
        // Boolean algebra
        law!("algebra.sum_complement", 1, true, |u, a| a[0]
            .sum(a[0].complement())
            == u.universe()),
        law!("algebra.product_complement", 1, true, |u, a| a[0]
            .product(a[0].complement())
            == u.empty()),
        // implication laws
        law!("implication.1", 3, true, |_u, a| {
            let (x, y, z) = (a[0], a[1], a[2]);
            x.implies(y)
                .implies(y.implies(z).implies(x.implies(z)))
                .is_valid()
        }),
        law!("implication.2", 2, true, |_u, a| a[0]
            .product(a[1])
            .implies(a[0])
            .is_valid()),
        law!("implication.3", 2, true, |_u, a| a[0]
            .product(a[1])
            .implies(a[1].product(a[0]))
            .is_valid()),
        law!("implication.4", 2, true, |_u, a| {
            let (x, y) = (a[0], a[1]);
            x.product(x.implies(y))
                .implies(y.product(y.implies(x)))
                .is_valid()
        }),
        law!("implication.5", 3, true, |_u, a| {
            let (x, y, z) = (a[0], a[1], a[2]);
            x.implies(y.implies(z))
                .implies(x.product(y).implies(z))
                .is_valid()
        }),
        law!("implication.6", 3, true, |_u, a| {
            let (x, y, z) = (a[0], a[1], a[2]);
            x.product(y)
                .implies(z)
                .implies(x.implies(y.implies(z)))
                .is_valid()
        }),
        // prelinearity: ((x↪y)↪z)↪(((y↪x)↪z)↪z)
        law!("implication.7", 3, true, |_u, a| {
            let (x, y, z) = (a[0], a[1], a[2]);
            x.implies(y)
                .implies(z)
                .implies(y.implies(x).implies(z).implies(z))
                .is_valid()
        }),
        // weight axioms
        law!("weight.axiom_1", 1, true, |u, a| m(u, a[0]).is_one()
            == (a[0] == u.universe())),
        law!("weight.axiom_2", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            implies(
                x.implies(y).is_valid(),
                m(u, y) == m(u, x) + m(u, x.complement().product(y)),
            )
        }),
        law!("weight.axiom_3", 1, false, |u, a| m(u, a[0])
            > BigRational::zero()),
        law!("weight.axiom_4", 1, true, |u, _a| m(u, u.empty()).is_zero()),
        // derived weight properties
        law!("m1", 2, false, |_u, a| c(a[0], a[1])
            == a[0].implies(a[1]).is_valid()),
        law!("m2", 2, false, |_u, a| c(a[0], a[1])
            == (a[0].product(a[1]) == a[0])),
        law!("m3", 2, true, |u, a| implies(
            a[0] == a[1],
            m(u, a[0]) == m(u, a[1])
        )),
        law!("m4", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            m(u, x.sum(y)) == m(u, x) + m(u, x.complement().product(y))
        }),
        law!("m5", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            implies(x.product(y).is_empty(), m(u, x.sum(y)) == m(u, x) + m(u, y))
        }),
        law!("m6", 1, true, |u, a| (m(u, a[0]) + m(u, a[0].complement()))
            .is_one()),
        law!("m7", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            m(u, y) == m(u, y.product(x)) + m(u, y.product(x.complement()))
        }),
        law!("m8", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            m(u, x.sum(y)) == m(u, x) + m(u, y) - m(u, x.product(y))
        }),
        law!("m9", 2, false, |u, a| implies(
            c(a[0], a[1]),
            m(u, a[0]) <= m(u, a[1])
        )),
        law!("m10", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            implies(m(u, x) + m(u, y) == m(u, x.sum(y)), x.product(y).is_empty())
        }),
        law!("m11", 2, false, |_u, a| implies(
            c(a[0], a[1]),
            a[0].implies(a[1]).is_valid()
        )),
        law!("m12", 2, false, |_u, a| implies(
            c(a[0], a[1]),
            a[0].product(a[1].complement()).is_empty()
        )),
        law!("m13", 2, false, |u, a| {
            let (x, y) = (a[0], a[1]);
            implies(
                c(y, x),
                m(u, x.implies(y)) == BigRational::one() - m(u, x) + m(u, y),
            )
        }),
        law!("m13.lukasiewicz", 2, false, |u, a| {
            let (x, y) = (a[0], a[1]);
            if !c(y, x) {
                return true;
            }
            let mx = TruthValue::new(ratio_to_f64(&m(u, x))).unwrap();
            let my = TruthValue::new(ratio_to_f64(&m(u, y))).unwrap();
            let luk = tnorm::impl_l(mx, my).get();
            (ratio_to_f64(&m(u, x.implies(y))) - luk).abs() <= tnorm::TOLERANCE
        }),
        law!("m14", 2, true, |u, a| {
            let (x, y) = (a[0], a[1]);
            m(u, x.implies(y)) == BigRational::one() - m(u, x.product(y.complement()))
        }),
        // rough inclusion
        law!("rough_inclusion.1", 2, false, |u, a| u
            .degree_of_part(a[0], a[1])
            .unwrap()
            .value()
            .is_one()
            == c(a[0], a[1])),
        law!("rough_inclusion.2", 3, false, |u, a| {
            let (x, y, z) = (a[0], a[1], a[2]);
            let full = u.degree_of_part(x, y).unwrap().value().is_one();
            implies(
                full,
                u.degree_of_part(z, y).unwrap() >= u.degree_of_part(z, x).unwrap(),
            )
        }),
    ]
}

/// Outcome of one law over a suite run.
#[derive(Clone, Debug, Serialize)]
pub struct LawOutcome {
    pub law: &'static str,
    pub checked: u64,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.counterexample.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawOutcome> {
        self.outcomes.iter().filter(|o| o.counterexample.is_some())
    }

    pub fn total_checks(&self) -> u64 {
        self.outcomes.iter().map(|o| o.checked).sum()
    }

    /// Adds `other`'s counts law-by-law, keeping the first counterexample.
    pub fn absorb(&mut self, other: LawReport) {
        if self.outcomes.is_empty() {
            *self = other;
            return;
        }
        for (mine, theirs) in self.outcomes.iter_mut().zip(other.outcomes) {
            debug_assert_eq!(mine.law, theirs.law);
            mine.checked += theirs.checked;
            if mine.counterexample.is_none() {
                mine.counterexample = theirs.counterexample;
            }
        }
    }
}

fn describe(u: &WeightedUniverse, args: &[Term]) -> String {
    let terms: Vec<String> = args.iter().map(|t| t.to_string()).collect();
    format!("{} atoms, args ({})", u.atoms(), terms.join(", "))
}

/// Evaluates every law on every tuple of terms of `u`.
///
/// Practical up to about five atoms (`32^3` triples).
pub fn check_exhaustive(u: &WeightedUniverse) -> LawReport {
    let all: Vec<Term> = Term::all(u.atoms()).collect();
    let things: Vec<Term> = all.iter().copied().filter(|t| !t.is_empty()).collect();
    let outcomes = laws()
        .iter()
        .map(|law| {
            let domain = if law.with_empty { &all } else { &things };
            let mut checked = 0;
            let mut counterexample = None;
            let mut args = vec![domain[0]; law.arity];
            let mut idx = vec![0usize; law.arity];
            'tuples: loop {
                for (slot, &i) in args.iter_mut().zip(&idx) {
                    *slot = domain[i];
                }
                checked += 1;
                if !law.holds(u, &args) {
                    counterexample = Some(describe(u, &args));
                    break;
                }
                // odometer increment
                for k in (0..law.arity).rev() {
                    idx[k] += 1;
                    if idx[k] < domain.len() {
                        continue 'tuples;
                    }
                    idx[k] = 0;
                }
                break;
            }
            LawOutcome {
                law: law.name,
                checked,
                counterexample,
            }
        })
        .collect();
    LawReport { outcomes }
}

fn random_term<R: Rng>(rng: &mut R, atoms: usize, with_empty: bool) -> Term {
    let full = if atoms == 64 {
        u64::MAX
    } else {
        (1u64 << atoms) - 1
    };
    loop {
        let t = Term::from_bits(atoms, rng.gen::<u64>() & full).unwrap();
        if with_empty || !t.is_empty() {
            return t;
        }
    }
}

/// Evaluates every law on `samples` random tuples of terms of `u`.
pub fn check_sampled<R: Rng>(u: &WeightedUniverse, samples: usize, rng: &mut R) -> LawReport {
    let outcomes = laws()
        .iter()
        .map(|law| {
            let mut checked = 0;
            let mut counterexample = None;
            for _ in 0..samples {
                let args: Vec<Term> = (0..law.arity)
                    .map(|_| random_term(rng, u.atoms(), law.with_empty))
                    .collect();
                checked += 1;
                if !law.holds(u, &args) {
                    counterexample = Some(describe(u, &args));
                    break;
                }
            }
            LawOutcome {
                law: law.name,
                checked,
                counterexample,
            }
        })
        .collect();
    LawReport { outcomes }
}

/// A universe of `1..=max_atoms` atoms with masses drawn from `1..=20`.
pub fn random_universe<R: Rng>(rng: &mut R, max_atoms: usize) -> WeightedUniverse {
    let n = rng.gen_range(1..=max_atoms);
    let masses: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
    WeightedUniverse::from_masses(&masses).expect("positive masses")
}

/// Parameters of a full self-test run.
#[derive(Clone, Debug, Serialize)]
pub struct SelftestConfig {
    /// Size of the uniform universe checked exhaustively.
    pub atoms: usize,
    pub random_universes: usize,
    pub max_random_atoms: usize,
    pub samples_per_law: usize,
    pub seed: u64,
    /// t-norm grid resolution, `1/n`.
    pub grid: u32,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            atoms: 4,
            random_universes: 1000,
            max_random_atoms: 10,
            samples_per_law: 16,
            seed: 0,
            grid: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub config: SelftestConfig,
    pub exhaustive: LawReport,
    pub sampled: LawReport,
    /// `(check, first failure)` for the t-norm contract and identities.
    pub tnorm: Vec<(String, Option<String>)>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.exhaustive.passed()
            && self.sampled.passed()
            && self.tnorm.iter().all(|t| t.1.is_none())
    }
}

/// Runs the algebra law suite exhaustively on a uniform universe, sampled on
/// random weighted universes, and the t-norm suite on a grid.
pub fn selftest(config: &SelftestConfig) -> crate::Result<SelftestReport> {
    if config.atoms > 6 {
        return Err(crate::Error::domain(
            "exhaustive checks are limited to 6 atoms",
        ));
    }
    if config.max_random_atoms == 0 || config.max_random_atoms > 63 {
        return Err(crate::Error::domain("random universes need 1..=63 atoms"));
    }
    let exhaustive = check_exhaustive(&WeightedUniverse::uniform(config.atoms)?);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sampled = LawReport::default();
    for _ in 0..config.random_universes {
        let u = random_universe(&mut rng, config.max_random_atoms);
        sampled.absorb(check_sampled(&u, config.samples_per_law, &mut rng));
    }

    let mut tnorm_checks = Vec::new();
    let t_l = |x: f64, y: f64| {
        tnorm::t_norm_l(TruthValue::new(x).unwrap(), TruthValue::new(y).unwrap()).get()
    };
    tnorm_checks.push((
        "t_norm_l is a t-norm".to_string(),
        tnorm::check_t_norm(t_l, config.grid)
            .err()
            .map(|v| v.to_string()),
    ));
    for (name, outcome) in tnorm::check_operator_identities(config.grid) {
        tnorm_checks.push((
            name.to_string(),
            outcome
                .err()
                .map(|f| format!("p={}, q={}: {} vs {}", f.p, f.q, f.derived, f.expected)),
        ));
    }
    Ok(SelftestReport {
        config: config.clone(),
        exhaustive,
        sampled,
        tnorm: tnorm_checks,
    })
}
