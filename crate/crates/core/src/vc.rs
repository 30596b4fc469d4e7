//! Touching sets, ε-component families and their VC-dimension.
//!
//! For a new object `ω` with descriptor set `A` and a known object `o`, the
//! touching set `T ⊆ A` holds the descriptors of `ω` that `o` agrees with.
//! The ε-components of `T` are the non-empty `C ⊆ A` with
//! `|C ∩ T| / |C| = ε` (or `≥ ε`). Whether a set is a component depends only
//! on how many of its elements fall inside and outside `T`, so shattering
//! and VC-dimension are decided by counting, without materializing the
//! family.
//!
//! The empty trace is always realized by the empty set, which plays the
//! role of a degenerate member of every family. With that convention the
//! extremes come out as `VC = |T|` for `ε = 1` and `VC = |A \ T|` for
//! `ε = 0`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::data_model::{DecisionSystem, Descriptor, NewObject, ObjectId};
use crate::error::{Error, Result};

/// Default limit on `|A|` for explicit enumeration of a family.
pub const ENUMERATION_CAP: usize = 20;

/// A rational threshold in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Epsilon(Ratio<u64>);

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Usage("ε has a zero denominator".into()));
        }
        if num > den {
            return Err(Error::Usage(format!("ε = {num}/{den} exceeds 1")));
        }
        Ok(Epsilon(Ratio::new(num, den)))
    }

    pub fn zero() -> Self {
        Epsilon(Ratio::new(0, 1))
    }

    pub fn one() -> Self {
        Epsilon(Ratio::new(1, 1))
    }

    pub fn numer(self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.numer() == 0
    }

    pub fn is_one(self) -> bool {
        self.numer() == self.denom()
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts `p/q` or the integers `0` and `1`; decimals are refused.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::Usage(format!(
                "ε must be a rational literal such as 1/2, got `{s}`"
            ))
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: u64 = n.parse().map_err(|_| bad())?;
        let d: u64 = d.parse().map_err(|_| bad())?;
        Epsilon::new(n, d)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Whether a component's degree must equal ε or only reach it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    AtLeast,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "at_least" | "at-least" => Ok(Mode::AtLeast),
            _ => Err(Error::Usage(format!("unknown mode `{s}` (exact|at_least)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::AtLeast => "at_least",
        })
    }
}

/// The descriptors of a new object, in the system's feature order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GroundSet {
    descriptors: Vec<Descriptor>,
}

impl GroundSet {
    pub fn new(system: &DecisionSystem, omega: &NewObject) -> Result<Self> {
        let aligned = system.align(omega)?;
        Ok(GroundSet {
            descriptors: aligned
                .into_iter()
                .map(|(i, v)| Descriptor::new(system.features()[i].clone(), v))
                .collect(),
        })
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }
}

/// `T_A(o, ω)`: indices into the ground set of the descriptors `o` shares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TouchingSet {
    pub object: ObjectId,
    pub members: Vec<usize>,
}

impl TouchingSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn touching_set(
    system: &DecisionSystem,
    o: ObjectId,
    omega: &NewObject,
) -> Result<TouchingSet> {
    let aligned = system.align(omega)?;
    let row = system.row_values(o)?;
    let members = aligned
        .iter()
        .enumerate()
        .filter(|(_, (col, v))| row[*col] == *v)
        .map(|(k, _)| k)
        .collect();
    Ok(TouchingSet { object: o, members })
}

/// The implicit family `C_ε(o)` over a ground set of `ground` elements
/// `0..ground`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentFamily {
    ground: usize,
    in_touching: Vec<bool>,
    touching_len: usize,
    epsilon: Epsilon,
    mode: Mode,
}

impl ComponentFamily {
    pub fn new(ground: usize, touching: &[usize], epsilon: Epsilon, mode: Mode) -> Result<Self> {
        let mut in_touching = vec![false; ground];
        for &t in touching {
            if t >= ground {
                return Err(Error::domain(format!(
                    "touching element {t} is outside a ground set of {ground}"
                )));
            }
            in_touching[t] = true;
        }
        let touching_len = in_touching.iter().filter(|&&b| b).count();
        Ok(ComponentFamily {
            ground,
            in_touching,
            touching_len,
            epsilon,
            mode,
        })
    }

    pub fn for_object(
        system: &DecisionSystem,
        o: ObjectId,
        omega: &NewObject,
        epsilon: Epsilon,
        mode: Mode,
    ) -> Result<Self> {
        let t = touching_set(system, o, omega)?;
        let ground = system.condition_features().count();
        ComponentFamily::new(ground, &t.members, epsilon, mode)
    }

    pub fn ground_len(&self) -> usize {
        self.ground
    }

    pub fn touching_len(&self) -> usize {
        self.touching_len
    }

    pub fn outside_len(&self) -> usize {
        self.ground - self.touching_len
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn in_touching(&self, element: usize) -> bool {
        self.in_touching[element]
    }

    /// Whether a non-empty set with `inside` elements in `T` and `outside`
    /// elements out of it is a member.
    pub fn admits(&self, inside: usize, outside: usize) -> bool {
        let size = (inside + outside) as u128;
        if size == 0 {
            return false;
        }
        let lhs = inside as u128 * u128::from(self.epsilon.denom());
        let rhs = u128::from(self.epsilon.numer()) * size;
        match self.mode {
            Mode::Exact => lhs == rhs,
            Mode::AtLeast => lhs >= rhs,
        }
    }

    fn counts(&self, set: &[usize]) -> Result<(usize, usize)> {
        let mut seen = vec![false; self.ground];
        let (mut inside, mut outside) = (0, 0);
        for &x in set {
            if x >= self.ground {
                return Err(Error::domain(format!(
                    "element {x} is outside the ground set"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::domain(format!("element {x} is repeated")));
            }
            if self.in_touching[x] {
                inside += 1;
            } else {
                outside += 1;
            }
        }
        Ok((inside, outside))
    }

    pub fn contains(&self, set: &[usize]) -> Result<bool> {
        let (i, o) = self.counts(set)?;
        Ok(self.admits(i, o))
    }

    /// Smallest `(x_in, x_out)` extension that turns a trace with `p_in`
    /// elements inside `T` and `p_out` outside into a member, drawing at most
    /// `free_in`/`free_out` further elements from outside the traced set.
    fn extension(
        &self,
        p_in: usize,
        p_out: usize,
        free_in: usize,
        free_out: usize,
    ) -> Option<(usize, usize)> {
        (0..=free_in)
            .flat_map(|x_in| (0..=free_out).map(move |x_out| (x_in, x_out)))
            .find(|&(x_in, x_out)| self.admits(p_in + x_in, p_out + x_out))
    }

    /// Shattering decided from counts alone: a set with `s_in` elements in
    /// `T` and `s_out` outside is shattered iff every non-empty trace shape
    /// extends to a member.
    fn shattered_by_counts(&self, s_in: usize, s_out: usize) -> bool {
        let free_in = self.touching_len - s_in;
        let free_out = self.outside_len() - s_out;
        (0..=s_in).all(|p_in| {
            (0..=s_out).all(|p_out| {
                (p_in == 0 && p_out == 0)
                    || self.extension(p_in, p_out, free_in, free_out).is_some()
            })
        })
    }

    /// `min{⌊|T|/ε⌋, ⌊|A∖T|/(1−ε)⌋}`, the largest possible exact component
    /// for `0 < ε < 1`.
    pub fn size_bound(&self) -> Option<usize> {
        if self.mode != Mode::Exact || self.epsilon.is_zero() || self.epsilon.is_one() {
            return None;
        }
        let (n, d) = (self.epsilon.numer() as u128, self.epsilon.denom() as u128);
        let by_inside = self.touching_len as u128 * d / n;
        let by_outside = self.outside_len() as u128 * d / (d - n);
        Some(by_inside.min(by_outside) as usize)
    }
}

/// Every non-empty member of the family, as sorted index lists.
pub fn epsilon_components(family: &ComponentFamily, cap: usize) -> Result<Vec<Vec<usize>>> {
    if family.ground > cap || family.ground >= 64 {
        return Err(Error::TooLarge {
            size: family.ground,
            cap,
        });
    }
    let mut out = Vec::new();
    for bits in 1u64..(1u64 << family.ground) {
        let set: Vec<usize> = (0..family.ground)
            .filter(|i| bits & (1 << i) != 0)
            .collect();
        let inside = set.iter().filter(|&&i| family.in_touching[i]).count();
        if family.admits(inside, set.len() - inside) {
            out.push(set);
        }
    }
    Ok(out)
}

/// Outcome of a shattering test, with one realizing set per trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shattering {
    pub shattered: bool,
    /// `(trace, member)` pairs with `member ∩ S = trace`; complete only when
    /// `shattered` holds.
    pub witnesses: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Whether the family shatters `s`.
pub fn shatters(family: &ComponentFamily, s: &[usize]) -> Result<Shattering> {
    if s.is_empty() {
        return Err(Error::domain("shattering is defined for non-empty sets"));
    }
    family.counts(s)?;
    if s.len() >= 64 {
        return Err(Error::TooLarge {
            size: s.len(),
            cap: 63,
        });
    }
    let mut in_s = vec![false; family.ground];
    for &x in s {
        in_s[x] = true;
    }
    let free_in: Vec<usize> = (0..family.ground)
        .filter(|&x| !in_s[x] && family.in_touching[x])
        .collect();
    let free_out: Vec<usize> = (0..family.ground)
        .filter(|&x| !in_s[x] && !family.in_touching[x])
        .collect();

    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    let mut witnesses = Vec::new();
    for bits in 0u64..(1u64 << sorted.len()) {
        let trace: Vec<usize> = sorted
            .iter()
            .enumerate()
            .filter(|(k, _)| bits & (1 << k) != 0)
            .map(|(_, &x)| x)
            .collect();
        let p_in = trace.iter().filter(|&&x| family.in_touching[x]).count();
        let p_out = trace.len() - p_in;
        match family.extension(p_in, p_out, free_in.len(), free_out.len()) {
            Some((x_in, x_out)) => {
                let mut member = trace.clone();
                member.extend(&free_in[..x_in]);
                member.extend(&free_out[..x_out]);
                member.sort_unstable();
                witnesses.push((trace, member));
            }
            // the empty set realizes the empty trace
            None if trace.is_empty() => witnesses.push((trace, Vec::new())),
            None => {
                return Ok(Shattering {
                    shattered: false,
                    witnesses,
                })
            }
        }
    }
    Ok(Shattering {
        shattered: true,
        witnesses,
    })
}

/// The largest size of a shattered subset of the ground set; 0 when no
/// non-empty set is shattered.
///
/// Sizes are tried in increasing order and the search stops at the first
/// size with no shattered set, which is sound because shattering passes to
/// subsets.
pub fn vc_dimension(family: &ComponentFamily) -> usize {
    let (t, u) = (family.touching_len, family.outside_len());
    for k in 1..=family.ground {
        let lo = k.saturating_sub(u);
        let hi = k.min(t);
        let any = (lo..=hi).any(|s_in| family.shattered_by_counts(s_in, k - s_in));
        if !any {
            return k - 1;
        }
    }
    family.ground
}

/// `VC(o)` for the ε-components of `o`'s touching set.
pub fn vc_of_object(
    system: &DecisionSystem,
    o: ObjectId,
    omega: &NewObject,
    epsilon: Epsilon,
    mode: Mode,
) -> Result<usize> {
    Ok(vc_dimension(&ComponentFamily::for_object(
        system, o, omega, epsilon, mode,
    )?))
}

/// `VC* = max_o VC(o)`.
pub fn vc_star(
    system: &DecisionSystem,
    omega: &NewObject,
    epsilon: Epsilon,
    mode: Mode,
) -> Result<usize> {
    if system.is_empty() {
        return Err(Error::domain("the system has no objects"));
    }
    system
        .objects()
        .iter()
        .map(|&o| vc_of_object(system, o, omega, epsilon, mode))
        .try_fold(0, |acc, v| v.map(|v| acc.max(v)))
}
