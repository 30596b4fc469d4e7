//! Categorical premisses, two-premiss moods, and their semantic validity.
//!
//! A model assigns every term a non-empty set of cells of a three-circle
//! Venn diagram (seven atomic cells). Any countermodel over arbitrary sets
//! collapses onto its Venn-cell pattern, so checking all `127^3`
//! assignments decides validity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Number of atomic cells in the model universe.
pub const CELLS: u32 = 7;
const CELL_MASK: u8 = (1 << CELLS) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantifier {
    /// All s are p.
    A,
    /// Some s is p.
    I,
    /// No s is p.
    E,
    /// Some s is not p.
    O,
}

impl Quantifier {
    pub const ALL: [Quantifier; 4] = [Quantifier::A, Quantifier::I, Quantifier::E, Quantifier::O];

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'A' => Some(Quantifier::A),
            'I' => Some(Quantifier::I),
            'E' => Some(Quantifier::E),
            'O' => Some(Quantifier::O),
            _ => None,
        }
    }

    fn letter(self) -> char {
        match self {
            Quantifier::A => 'A',
            Quantifier::I => 'I',
            Quantifier::E => 'E',
            Quantifier::O => 'O',
        }
    }

    /// Truth of `Q s p` for cell sets `s`, `p`.
    fn holds(self, s: u8, p: u8) -> bool {
        match self {
            Quantifier::A => s & !p == 0,
            Quantifier::I => s & p != 0,
            Quantifier::E => s & p == 0,
            Quantifier::O => s & !p != 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Premiss {
    pub quantifier: Quantifier,
    pub subject: char,
    pub predicate: char,
}

impl Premiss {
    pub fn new(quantifier: Quantifier, subject: char, predicate: char) -> Self {
        Premiss {
            quantifier,
            subject,
            predicate,
        }
    }

    fn mentions(&self, t: char) -> bool {
        self.subject == t || self.predicate == t
    }

    fn other(&self, t: char) -> char {
        if self.subject == t {
            self.predicate
        } else {
            self.subject
        }
    }

    fn relabel(self, map: impl Fn(char) -> char) -> Premiss {
        Premiss::new(self.quantifier, map(self.subject), map(self.predicate))
    }
}

impl fmt::Display for Premiss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.quantifier.letter(),
            self.subject,
            self.predicate
        )
    }
}

impl Serialize for Premiss {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn term_at(word: &str, position: usize) -> Result<char> {
    let mut chars = word.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Ok(c),
        _ => Err(syntax(
            position,
            format!("expected a single lowercase term letter, found `{word}`"),
        )),
    }
}

/// Parses `Xst` or the English forms `All s is p`, `Some s is p`,
/// `No s is p`, `Some s is not p` (`are` is accepted for `is`).
///
/// Positions in errors are byte offsets into `text`.
pub fn parse_premiss(text: &str) -> Result<Premiss> {
    let lead = text.len() - text.trim_start().len();
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(syntax(lead, "empty premiss"));
    }

    let words: Vec<(usize, &str)> = trimmed
        .split_whitespace()
        .map(|w| (lead + (w.as_ptr() as usize - trimmed.as_ptr() as usize), w))
        .collect();

    if words.len() == 1 {
        let w = words[0].1;
        let chars: Vec<char> = w.chars().collect();
        if chars.len() != 3 {
            return Err(syntax(lead, format!("`{w}` is not of the form Xst")));
        }
        let q = Quantifier::from_letter(chars[0])
            .ok_or_else(|| syntax(lead, format!("unknown quantifier `{}`", chars[0])))?;
        let s = term_at(&chars[1].to_string(), lead + chars[0].len_utf8())?;
        let p = term_at(
            &chars[2].to_string(),
            lead + chars[0].len_utf8() + chars[1].len_utf8(),
        )?;
        return Ok(Premiss::new(q, s, p));
    }

    let lower: Vec<String> = words.iter().map(|(_, w)| w.to_ascii_lowercase()).collect();
    let is_copula = |w: &str| w == "is" || w == "are";
    let (q, s_idx, p_idx) = match lower
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["all", _, c, _] if is_copula(c) => (Quantifier::A, 1, 3),
        ["no", _, c, _] if is_copula(c) => (Quantifier::E, 1, 3),
        ["some", _, c, _] if is_copula(c) => (Quantifier::I, 1, 3),
        ["some", _, c, "not", _] if is_copula(c) => (Quantifier::O, 1, 4),
        [first, ..] if !matches!(*first, "all" | "no" | "some") => {
            return Err(syntax(
                words[0].0,
                format!("unknown quantifier `{}`", words[0].1),
            ))
        }
        _ => {
            return Err(syntax(
                lead,
                format!("cannot read `{trimmed}` as a premiss"),
            ))
        }
    };
    let s = term_at(words[s_idx].1, words[s_idx].0)?;
    let p = term_at(words[p_idx].1, words[p_idx].0)?;
    Ok(Premiss::new(q, s, p))
}

impl FromStr for Premiss {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_premiss(s)
    }
}

/// Placement of the middle term `m` in the two premisses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Figure {
    /// `Xmb, Yam`
    First,
    /// `Xbm, Yam`
    Second,
    /// `Xmb, Yma`
    Third,
    /// `Xbm, Yma`
    Fourth,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::First, Figure::Second, Figure::Third, Figure::Fourth];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    fn orientation(self) -> ((char, char), (char, char)) {
        match self {
            Figure::First => (('m', 'b'), ('a', 'm')),
            Figure::Second => (('b', 'm'), ('a', 'm')),
            Figure::Third => (('m', 'b'), ('m', 'a')),
            Figure::Fourth => (('b', 'm'), ('m', 'a')),
        }
    }
}

/// `major ∧ minor ⊃ conclusion` over the terms `a`, `b`, `m`, with the
/// conclusion about `(a, b)`, `b` in the major and `a` in the minor premiss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mood {
    pub major: Premiss,
    pub minor: Premiss,
    pub conclusion: Premiss,
}

impl Mood {
    pub fn new(major: Premiss, minor: Premiss, conclusion: Premiss) -> Result<Self> {
        let mood = Mood {
            major,
            minor,
            conclusion,
        };
        mood.figure()?;
        if (conclusion.subject, conclusion.predicate) != ('a', 'b') {
            return Err(Error::domain(format!(
                "conclusion {conclusion} must be about (a, b)"
            )));
        }
        Ok(mood)
    }

    pub fn in_figure(figure: Figure, x: Quantifier, y: Quantifier, z: Quantifier) -> Self {
        let ((s1, p1), (s2, p2)) = figure.orientation();
        Mood {
            major: Premiss::new(x, s1, p1),
            minor: Premiss::new(y, s2, p2),
            conclusion: Premiss::new(z, 'a', 'b'),
        }
    }

    pub fn figure(&self) -> Result<Figure> {
        let key = (
            (self.major.subject, self.major.predicate),
            (self.minor.subject, self.minor.predicate),
        );
        Figure::ALL
            .into_iter()
            .find(|f| f.orientation() == key)
            .ok_or_else(|| {
                Error::domain(format!(
                    "premisses {} and {} do not place m as a middle term between b and a",
                    self.major, self.minor
                ))
            })
    }

    /// Parses a mood written with arbitrary term letters and relabels it to
    /// the `a`, `b`, `m` scheme. Accepted shapes include
    /// `Amb & Aam -> Aab`, `Amb ∧ Aam ⊃ Aab` and `Amb, Aam |- Aab`; premisses
    /// may come in either order and in English form.
    pub fn parse(expr: &str) -> Result<Mood> {
        const ARROWS: [&str; 5] = ["->", "=>", "⊃", "|-", "⊢"];
        let (cut, arrow) = ARROWS
            .iter()
            .filter_map(|a| expr.find(a).map(|i| (i, *a)))
            .min()
            .ok_or_else(|| syntax(0, "expected an implication arrow such as `->`"))?;
        let lhs = &expr[..cut];
        let rhs_start = cut + arrow.len();
        let conclusion = parse_premiss(&expr[rhs_start..]).map_err(|e| shift(e, rhs_start))?;

        let mut premisses = Vec::new();
        let mut start = 0;
        let bytes: Vec<(usize, char)> = lhs.char_indices().collect();
        let mut pieces = Vec::new();
        for &(i, ch) in &bytes {
            if matches!(ch, '&' | '∧' | ',') {
                pieces.push((start, &lhs[start..i]));
                start = i + ch.len_utf8();
            }
        }
        pieces.push((start, &lhs[start..]));
        for (offset, piece) in pieces {
            premisses.push(parse_premiss(piece).map_err(|e| shift(e, offset))?);
        }
        if premisses.len() != 2 {
            return Err(syntax(
                0,
                format!(
                    "a mood needs exactly two premisses, found {}",
                    premisses.len()
                ),
            ));
        }
        Mood::relabel(premisses[0], premisses[1], conclusion)
    }

    /// Arranges two premisses and a conclusion over any three distinct
    /// letters into the canonical `a`, `b`, `m` form.
    pub fn relabel(p: Premiss, q: Premiss, conclusion: Premiss) -> Result<Mood> {
        let (s, t) = (conclusion.subject, conclusion.predicate);
        let bad = || {
            Error::domain(format!(
                "`{p}`, `{q}` ⊢ `{conclusion}` is not a two-premiss mood over three distinct terms"
            ))
        };
        if s == t || p.subject == p.predicate || q.subject == q.predicate {
            return Err(bad());
        }
        let (major, minor) = match (p.mentions(t), q.mentions(t)) {
            (true, false) => (p, q),
            (false, true) => (q, p),
            _ => return Err(bad()),
        };
        if !minor.mentions(s) || major.mentions(s) {
            return Err(bad());
        }
        let middle = major.other(t);
        if middle == s || middle == t || minor.other(s) != middle {
            return Err(bad());
        }
        let map = |c: char| {
            if c == s {
                'a'
            } else if c == t {
                'b'
            } else {
                'm'
            }
        };
        Mood::new(
            major.relabel(map),
            minor.relabel(map),
            conclusion.relabel(map),
        )
    }
}

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} & {} -> {}", self.major, self.minor, self.conclusion)
    }
}

impl FromStr for Mood {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mood::parse(s)
    }
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { position, message } => Error::Syntax {
            position: position + by,
            message,
        },
        e => e,
    }
}

/// Assignment of non-empty Venn-cell sets to term letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerModel {
    assignment: BTreeMap<char, u8>,
}

impl EulerModel {
    pub fn new(assignment: impl IntoIterator<Item = (char, u8)>) -> Result<Self> {
        let assignment: BTreeMap<char, u8> = assignment.into_iter().collect();
        for (&t, &cells) in &assignment {
            if cells == 0 || cells & !CELL_MASK != 0 {
                return Err(Error::domain(format!(
                    "term `{t}` must denote a non-empty set of the {CELLS} cells"
                )));
            }
        }
        Ok(EulerModel { assignment })
    }

    pub fn cells(&self, term: char) -> Result<u8> {
        self.assignment
            .get(&term)
            .copied()
            .ok_or(Error::Unassigned(term))
    }
}

impl fmt::Display for EulerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(t, cells)| {
                let members: Vec<String> = (0..CELLS)
                    .filter(|i| cells & (1 << i) != 0)
                    .map(|i| (i + 1).to_string())
                    .collect();
                format!("{t}={{{}}}", members.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for EulerModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn evaluate_premiss(p: &Premiss, model: &EulerModel) -> Result<bool> {
    Ok(p.quantifier
        .holds(model.cells(p.subject)?, model.cells(p.predicate)?))
}

/// A premiss compiled against a fixed term order.
#[derive(Clone, Copy)]
struct Compiled {
    q: Quantifier,
    s: usize,
    p: usize,
}

fn compile(terms: &[char], p: &Premiss) -> Compiled {
    let at = |t| terms.iter().position(|&x| x == t).expect("term listed");
    Compiled {
        q: p.quantifier,
        s: at(p.subject),
        p: at(p.predicate),
    }
}

fn distinct_terms(premisses: &[Premiss]) -> Vec<char> {
    let mut terms: Vec<char> = premisses
        .iter()
        .flat_map(|p| [p.subject, p.predicate])
        .collect();
    terms.sort_unstable();
    terms.dedup();
    terms
}

/// Visits every assignment of non-empty cell sets to `n` terms until `f`
/// returns `true`; returns the assignment it stopped at.
fn search(n: usize, mut f: impl FnMut(&[u8]) -> bool) -> Option<Vec<u8>> {
    let mut sets = vec![1u8; n];
    loop {
        if f(&sets) {
            return Some(sets);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if sets[k] < CELL_MASK {
                sets[k] += 1;
                break;
            }
            sets[k] = 1;
        }
    }
}

/// A model making every premiss true, if one exists. At most three
/// distinct terms may occur.
pub fn satisfiable(premisses: &[Premiss]) -> Result<Option<EulerModel>> {
    let terms = distinct_terms(premisses);
    if terms.len() > 3 {
        return Err(Error::domain(
            "the seven-cell model space covers at most three terms",
        ));
    }
    let compiled: Vec<Compiled> = premisses.iter().map(|p| compile(&terms, p)).collect();
    let hit = search(terms.len(), |sets| {
        compiled.iter().all(|c| c.q.holds(sets[c.s], sets[c.p]))
    });
    Ok(hit.map(|sets| EulerModel {
        assignment: terms.iter().copied().zip(sets).collect(),
    }))
}

/// Validity of a mood with an optional countermodel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validity {
    pub valid: bool,
    pub countermodel: Option<EulerModel>,
}

/// Decides `major ∧ minor ⊃ conclusion` over all Euler-cell models.
pub fn is_valid_mood(mood: &Mood) -> Validity {
    let counter = [
        mood.major,
        mood.minor,
        Premiss {
            quantifier: contradictory(mood.conclusion.quantifier),
            ..mood.conclusion
        },
    ];
    let model = satisfiable(&counter).expect("moods have three terms");
    Validity {
        valid: model.is_none(),
        countermodel: model,
    }
}

fn contradictory(q: Quantifier) -> Quantifier {
    match q {
        Quantifier::A => Quantifier::O,
        Quantifier::O => Quantifier::A,
        Quantifier::I => Quantifier::E,
        Quantifier::E => Quantifier::I,
    }
}

/// One valid mood from the classical catalog.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Premisses and conclusion as `Xst` strings.
    pub major: &'static str,
    pub minor: &'static str,
    pub conclusion: &'static str,
    /// The mood's negation as a conjunction of three premisses.
    pub negation: [&'static str; 3],
}

impl CatalogEntry {
    pub fn mood(&self) -> Mood {
        Mood::new(
            self.major.parse().expect("catalog premiss"),
            self.minor.parse().expect("catalog premiss"),
            self.conclusion.parse().expect("catalog premiss"),
        )
        .expect("catalog mood")
    }

    pub fn negation(&self) -> [Premiss; 3] {
        self.negation.map(|p| p.parse().expect("catalog premiss"))
    }
}

macro_rules! entry {
    ($name:expr, $x:expr, $y:expr, $z:expr, [$n1:expr, $n2:expr, $n3:expr]) => {
        CatalogEntry {
            name: $name,
            major: $x,
            minor: $y,
            conclusion: $z,
            negation: [$n1, $n2, $n3],
        }
    };
}

/// The 24 valid moods, grouped by conclusion.
pub const CATALOG: [CatalogEntry; 24] = [
    entry!("Barbara", "Amb", "Aam", "Aab", ["Amb", "Aam", "Oab"]),
    entry!("Datisi", "Amb", "Ima", "Iab", ["Amb", "Ima", "Eab"]),
    entry!("Barbari", "Amb", "Aam", "Iab", ["Amb", "Aam", "Eab"]),
    entry!("Darii", "Amb", "Iam", "Iab", ["Amb", "Iam", "Eab"]),
    entry!("Darapti", "Amb", "Ama", "Iab", ["Amb", "Ama", "Eba"]),
    entry!("Disamis", "Imb", "Ama", "Iab", ["Imb", "Ama", "Eba"]),
    entry!("Bamalip", "Abm", "Ama", "Iab", ["Abm", "Ama", "Eba"]),
    entry!("Dimatis", "Ibm", "Ama", "Iab", ["Ibm", "Ama", "Eba"]),
    entry!("Celarent", "Emb", "Aam", "Eab", ["Emb", "Aam", "Iab"]),
    entry!("Cesare", "Ebm", "Aam", "Eab", ["Ebm", "Aam", "Iab"]),
    entry!("Camestres", "Abm", "Eam", "Eab", ["Abm", "Eam", "Iab"]),
    entry!("Calemes", "Abm", "Ema", "Eab", ["Abm", "Ema", "Iab"]),
    entry!("Celaront", "Emb", "Aam", "Oab", ["Emb", "Aam", "Aab"]),
    entry!("Ferio", "Emb", "Iam", "Oab", ["Emb", "Iam", "Aab"]),
    entry!("Cesaro", "Ebm", "Aam", "Oab", ["Ebm", "Aam", "Aab"]),
    entry!("Camestrop", "Abm", "Eam", "Oab", ["Abm", "Eam", "Aab"]),
    entry!("Festino", "Ebm", "Iam", "Oab", ["Ebm", "Iam", "Aab"]),
    entry!("Baroco", "Abm", "Oam", "Oab", ["Abm", "Oam", "Aab"]),
    entry!("Felapton", "Emb", "Ama", "Oab", ["Emb", "Ama", "Aab"]),
    entry!("Bocardo", "Omb", "Ama", "Oab", ["Omb", "Ama", "Aab"]),
    entry!("Ferison", "Emb", "Ima", "Oab", ["Emb", "Ima", "Aab"]),
    entry!("Camelop", "Abm", "Ema", "Oab", ["Abm", "Ema", "Aab"]),
    entry!("Fesapo", "Ebm", "Ama", "Oab", ["Ebm", "Ama", "Aab"]),
    entry!("Fresison", "Ebm", "Ima", "Oab", ["Ebm", "Ima", "Aab"]),
];

/// Two classical rejected forms, in their original lettering.
pub const REJECTED: [(&str, &str); 2] = [
    ("undistributed middle", "Acb & Aab -> Iac"),
    ("exclusive premisses", "Ecb & Eab -> Iac"),
];

/// Case-insensitive lookup of a catalog mood by name.
pub fn lookup_mood(name: &str) -> Result<Mood> {
    CATALOG
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name.trim()))
        .map(CatalogEntry::mood)
        .ok_or_else(|| Error::Lookup {
            what: "mood",
            name: name.to_string(),
        })
}

/// The catalog name of `mood`, if it has one.
pub fn catalog_name(mood: &Mood) -> Option<&'static str> {
    CATALOG.iter().find(|e| e.mood() == *mood).map(|e| e.name)
}

/// A row of the full mood table.
#[derive(Clone, Debug, Serialize)]
pub struct MoodRow {
    pub figure: Figure,
    pub mood: Mood,
    pub valid: bool,
    pub name: Option<&'static str>,
}

/// All 256 moods (four figures × four quantifiers per premiss and for the
/// conclusion), decided semantically and named where catalogued.
pub fn enumerate_moods() -> Vec<MoodRow> {
    let moods: Vec<(Figure, Mood)> = Figure::ALL
        .into_iter()
        .flat_map(|f| {
            Quantifier::ALL.into_iter().flat_map(move |x| {
                Quantifier::ALL.into_iter().flat_map(move |y| {
                    Quantifier::ALL
                        .into_iter()
                        .map(move |z| (f, Mood::in_figure(f, x, y, z)))
                })
            })
        })
        .collect();
    moods
        .into_par_iter()
        .map(|(figure, mood)| MoodRow {
            figure,
            valid: is_valid_mood(&mood).valid,
            name: catalog_name(&mood),
            mood,
        })
        .collect()
}

/// Renders the mood table as CSV with header
/// `figure,premisses,conclusion,valid,name`.
pub fn moods_csv(rows: &[MoodRow]) -> String {
    let mut out = String::from("figure,premisses,conclusion,valid,name\n");
    for r in rows {
        out.push_str(&format!(
            "{},{} & {},{},{},{}\n",
            r.figure.number(),
            r.mood.major,
            r.mood.minor,
            r.mood.conclusion,
            r.valid,
            r.name.unwrap_or("")
        ));
    }
    out
}
