//! t-norms and the Łukasiewicz operator family on `[0, 1]`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mereology::Degree;

/// Comparison tolerance for truth values.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct TruthValue(f64);

impl TruthValue {
    pub const ZERO: TruthValue = TruthValue(0.0);
    pub const ONE: TruthValue = TruthValue(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::domain(format!(
                "truth value {value} is outside [0, 1]"
            )));
        }
        Ok(TruthValue(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    // operator results stay in [0,1] up to rounding
    fn clamped(value: f64) -> Self {
        TruthValue(value.clamp(0.0, 1.0))
    }
}

impl From<&Degree> for TruthValue {
    fn from(d: &Degree) -> Self {
        TruthValue::clamped(d.to_f64())
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `T_L(x, y) = max{0, x + y - 1}`, the strong conjunction.
pub fn t_norm_l(x: TruthValue, y: TruthValue) -> TruthValue {
    TruthValue::clamped((x.0 + y.0 - 1.0).max(0.0))
}

/// `S_L(x, y) = min{1, x + y}`, the strong disjunction.
pub fn s_norm_l(x: TruthValue, y: TruthValue) -> TruthValue {
    TruthValue::clamped((x.0 + y.0).min(1.0))
}

/// `x ⊃_L y = min{1, 1 - x + y}`.
pub fn impl_l(x: TruthValue, y: TruthValue) -> TruthValue {
    TruthValue::clamped((1.0 - x.0 + y.0).min(1.0))
}

pub fn neg_l(x: TruthValue) -> TruthValue {
    TruthValue::clamped(1.0 - x.0)
}

pub fn weak_and(x: TruthValue, y: TruthValue) -> TruthValue {
    TruthValue(x.0.min(y.0))
}

pub fn weak_or(x: TruthValue, y: TruthValue) -> TruthValue {
    TruthValue(x.0.max(y.0))
}

/// Which t-norm condition failed, and where.
#[derive(Clone, Debug, PartialEq)]
pub enum TNormViolation {
    Commutativity { x: f64, y: f64 },
    Associativity { x: f64, y: f64, z: f64 },
    Monotonicity { x1: f64, x2: f64, y: f64 },
    ZeroBoundary { x: f64 },
    UnitBoundary { x: f64 },
}

impl fmt::Display for TNormViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Commutativity { x, y } => write!(f, "T({x},{y}) != T({y},{x})"),
            Self::Associativity { x, y, z } => {
                write!(f, "T({x},T({y},{z})) != T(T({x},{y}),{z})")
            }
            Self::Monotonicity { x1, x2, y } => {
                write!(f, "{x1} <= {x2} but T({x1},{y}) > T({x2},{y})")
            }
            Self::ZeroBoundary { x } => write!(f, "T({x},0) != 0"),
            Self::UnitBoundary { x } => write!(f, "T({x},1) != {x}"),
        }
    }
}

/// Checks the four t-norm conditions for `op` on the grid `{0, 1/n, …, 1}`.
///
/// Conditions are checked in the order commutativity, associativity,
/// monotonicity, boundary; the first violation found is returned.
/// Comparisons use [`TOLERANCE`].
pub fn check_t_norm<F>(op: F, divisions: u32) -> Result<(), TNormViolation>
where
    F: Fn(f64, f64) -> f64,
{
    assert!(divisions > 0, "grid needs at least one division");
    let grid: Vec<f64> = (0..=divisions)
        .map(|i| f64::from(i) / f64::from(divisions))
        .collect();
    let differ = |a: f64, b: f64| (a - b).abs() > TOLERANCE;

    for &x in &grid {
        for &y in &grid {
            if differ(op(x, y), op(y, x)) {
                return Err(TNormViolation::Commutativity { x, y });
            }
        }
    }
    for &x in &grid {
        for &y in &grid {
            let xy = op(x, y);
            for &z in &grid {
                if differ(op(x, op(y, z)), op(xy, z)) {
                    return Err(TNormViolation::Associativity { x, y, z });
                }
            }
        }
    }
    for (i, &x1) in grid.iter().enumerate() {
        for &x2 in &grid[i..] {
            for &y in &grid {
                if op(x1, y) > op(x2, y) + TOLERANCE {
                    return Err(TNormViolation::Monotonicity { x1, x2, y });
                }
            }
        }
    }
    for &x in &grid {
        if differ(op(x, 0.0), 0.0) {
            return Err(TNormViolation::ZeroBoundary { x });
        }
        if differ(op(x, 1.0), x) {
            return Err(TNormViolation::UnitBoundary { x });
        }
    }
    Ok(())
}

/// The derived-operator identities of Łukasiewicz logic, each as
/// `(name, derived form, closed form)` over a pair of truth values.
type Identity = (&'static str, fn(TruthValue, TruthValue) -> (f64, f64));

const IDENTITIES: [Identity; 5] = [
    ("negation: p -> 0 = 1 - p", |p, _| {
        (impl_l(p, TruthValue::ZERO).get(), neg_l(p).get())
    }),
    ("conjunction: p & (p -> q) = min", |p, q| {
        (t_norm_l(p, impl_l(p, q)).get(), weak_and(p, q).get())
    }),
    (
        "disjunction: ((p -> q) -> q) and ((q -> p) -> p) = max",
        |p, q| {
            let left = impl_l(impl_l(p, q), q);
            let right = impl_l(impl_l(q, p), p);
            (weak_and(left, right).get(), weak_or(p, q).get())
        },
    ),
    ("strong disjunction: not(not p & not q) = S_L", |p, q| {
        (
            neg_l(t_norm_l(neg_l(p), neg_l(q))).get(),
            s_norm_l(p, q).get(),
        )
    }),
    ("residuation: (p -> q) = 1 iff p <= q", |p, q| {
        let top = (impl_l(p, q).get() - 1.0).abs() <= TOLERANCE;
        (f64::from(u8::from(top)), f64::from(u8::from(p <= q)))
    }),
];

/// A failed identity with the grid point that breaks it.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityFailure {
    pub identity: &'static str,
    pub p: f64,
    pub q: f64,
    pub derived: f64,
    pub expected: f64,
}

/// Evaluates every derived-operator identity on the `1/n` grid; one entry
/// per identity, `Err` carrying the first failing grid point.
pub fn check_operator_identities(
    divisions: u32,
) -> Vec<(&'static str, Result<(), IdentityFailure>)> {
    let grid: Vec<TruthValue> = (0..=divisions)
        .map(|i| TruthValue(f64::from(i) / f64::from(divisions)))
        .collect();
    IDENTITIES
        .iter()
        .map(|&(name, eval)| {
            let mut outcome = Ok(());
            'grid: for &p in &grid {
                for &q in &grid {
                    let (derived, expected) = eval(p, q);
                    if (derived - expected).abs() > TOLERANCE {
                        outcome = Err(IdentityFailure {
                            identity: name,
                            p: p.get(),
                            q: q.get(),
                            derived,
                            expected,
                        });
                        break 'grid;
                    }
                }
            }
            (name, outcome)
        })
        .collect()
}

/// Connectives on rough-mereological terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Connective {
    Sum,
    StrongSum,
    Product,
    StrongProduct,
    Implication,
    Negation,
}

impl Connective {
    pub const ALL: [Connective; 6] = [
        Connective::Sum,
        Connective::StrongSum,
        Connective::Product,
        Connective::StrongProduct,
        Connective::Implication,
        Connective::Negation,
    ];
}

/// Degree of `c ∘ (a, b)` given `c` is part of `a` to degree `r` and of `b`
/// to degree `s`. For negation `s` is ignored.
///
/// The implication takes `T_L(r, s)`, the same degree as the strong product.
pub fn propagate(r: TruthValue, s: TruthValue, connective: Connective) -> TruthValue {
    match connective {
        Connective::Sum => weak_or(r, s),
        Connective::StrongSum => s_norm_l(r, s),
        Connective::Product => weak_and(r, s),
        Connective::StrongProduct | Connective::Implication => t_norm_l(r, s),
        Connective::Negation => neg_l(r),
    }
}
