//! Finite presentations and exact word-problem oracles.
//!
//! Three kinds of presentation are accepted:
//!
//! * free groups (no relators), decided by free reduction;
//! * metric small-cancellation presentations satisfying C'(1/6), decided by
//!   Dehn's algorithm;
//! * free abelian groups given by commutator relators, decided by exponent
//!   sums. These exist only as non-hyperbolic controls.
//!
//! Anything else is rejected at load time.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

/// Minimum relator length accepted for the Dehn oracle.
///
/// A relator of length at most six cannot share even a single letter with
/// another relator under the strict 1/6 bound, so such presentations only
/// describe degenerate quotients (finite cyclic factors and the like).
pub const MIN_DEHN_RELATOR_LEN: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    FreeGroup,
    DehnC16,
    FreeAbelianControl,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    kind: OracleKind,
}

/// A `sub:` line from a presentation file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupDecl {
    pub name: String,
    pub generators: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct PresentationFile {
    pub presentation: Presentation,
    pub subgroups: Vec<SubgroupDecl>,
}

impl PresentationFile {
    pub fn subgroup(&self, name: &str) -> Option<&SubgroupDecl> {
        self.subgroups.iter().find(|s| s.name == name)
    }
}

/// Outcome of the metric small-cancellation test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmallCancellation {
    Pass {
        max_ratio: Ratio<i64>,
        max_piece_len: usize,
    },
    Fail {
        piece: Word,
        ratio: Ratio<i64>,
    },
}

impl SmallCancellation {
    pub fn passed(&self) -> bool {
        matches!(self, SmallCancellation::Pass { .. })
    }
}

impl Presentation {
    /// Validates relators and selects the oracle kind.
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        let rank = alphabet.rank();
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            if r.max_generator().is_some_and(|g| g >= rank) {
                return Err(Error::InvalidArgument(format!(
                    "relator {} uses a generator outside the alphabet",
                    alphabet.format(&r)
                )));
            }
            let (core, _) = r.cyclically_reduce();
            if core.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "relator {} is freely trivial",
                    alphabet.format(&r)
                )));
            }
            if !rels.contains(&core) {
                rels.push(core);
            }
        }
        let kind = classify(rank, &rels).ok_or_else(|| {
            Error::UnsupportedPresentation(
                "relators are neither C'(1/6) (with relators of length >= 7) nor the commutators of a free abelian group"
                    .into(),
            )
        })?;
        Ok(Self {
            alphabet,
            relators: rels,
            kind,
        })
    }

    pub fn free(rank: usize) -> Self {
        Self {
            alphabet: Alphabet::standard(rank),
            relators: Vec::new(),
            kind: OracleKind::FreeGroup,
        }
    }

    /// Free abelian group of the given rank, presented by all commutators.
    pub fn free_abelian(rank: usize) -> Self {
        let mut rels = Vec::new();
        for i in 0..rank as u16 {
            for j in i + 1..rank as u16 {
                rels.push(Word::from_letters(vec![
                    Letter::pos(i),
                    Letter::pos(j),
                    Letter::neg(i),
                    Letter::neg(j),
                ]));
            }
        }
        let kind = if rels.is_empty() {
            OracleKind::FreeGroup
        } else {
            OracleKind::FreeAbelianControl
        };
        Self {
            alphabet: Alphabet::standard(rank),
            relators: rels,
            kind,
        }
    }

    /// Closed orientable surface group of genus `g >= 2`: `[a,b][c,d]...`.
    pub fn surface(genus: usize) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidArgument("surface genus must be at least 2".into()));
        }
        let mut rel = Vec::new();
        for k in 0..genus as u16 {
            let (x, y) = (2 * k, 2 * k + 1);
            rel.extend([Letter::pos(x), Letter::pos(y), Letter::neg(x), Letter::neg(y)]);
        }
        Self::new(Alphabet::standard(2 * genus), vec![Word::from_letters(rel)])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    /// Canonical text of the presentation (the file format without comments).
    pub fn canonical_text(&self) -> String {
        let mut s = String::from("gens:");
        for c in self.alphabet.names() {
            let _ = write!(s, " {c}");
        }
        s.push('\n');
        for r in &self.relators {
            let _ = writeln!(s, "rel: {}", self.alphabet.format(r));
        }
        s
    }

    /// SHA-256 of [`Presentation::canonical_text`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    pub fn format(&self, w: &Word) -> String {
        self.alphabet.format(w)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }
}

fn classify(rank: usize, rels: &[Word]) -> Option<OracleKind> {
    if rels.is_empty() {
        return Some(OracleKind::FreeGroup);
    }
    let c16 = check_metric_small_cancellation(rels, Ratio::new(1, 6));
    if c16.passed() && rels.iter().all(|r| r.len() >= MIN_DEHN_RELATOR_LEN) {
        return Some(OracleKind::DehnC16);
    }
    if is_commutator_presentation(rank, rels) {
        return Some(OracleKind::FreeAbelianControl);
    }
    None
}

/// True if the relators are exactly (up to rotation, inversion and the signs
/// of the letters) the commutators of every pair of generators.
fn is_commutator_presentation(rank: usize, rels: &[Word]) -> bool {
    let mut pairs = std::collections::BTreeSet::new();
    for r in rels {
        let l = r.letters();
        if l.len() != 4 || l[2] != l[0].inv() || l[3] != l[1].inv() || l[0].index() == l[1].index() {
            return false;
        }
        let (i, j) = (l[0].index().min(l[1].index()), l[0].index().max(l[1].index()));
        pairs.insert((i, j));
    }
    pairs.len() == rank * (rank - 1) / 2
}

/// Every rotation of every relator and of its inverse, tagged by position.
fn symmetrized_positions(rels: &[Word]) -> Vec<(usize, Word)> {
    let mut out = Vec::new();
    for (ri, r) in rels.iter().enumerate() {
        for w in [r.clone(), r.invert()] {
            for k in 0..w.len() {
                out.push((ri, w.rotate(k)));
            }
        }
    }
    out
}

/// Enumerates all pieces of the relators and compares the largest
/// `|piece| / |relator|` against `bound` (strictly).
///
/// Pieces are common prefixes of two rotations (of relators or their
/// inverses) taken at distinct positions. Rotations of a proper power at
/// different offsets coincide, so a proper power yields a piece as long as
/// the relator itself and always fails.
pub fn check_metric_small_cancellation(rels: &[Word], bound: Ratio<i64>) -> SmallCancellation {
    let positions = symmetrized_positions(rels);
    let mut best: Option<(Ratio<i64>, Word)> = None;
    for (i, (ri, u)) in positions.iter().enumerate() {
        for (rj, v) in &positions[i + 1..] {
            let cap = u.len().min(v.len());
            let k = u
                .letters()
                .iter()
                .zip(v.letters())
                .take(cap)
                .take_while(|(a, b)| a == b)
                .count();
            if k == 0 {
                continue;
            }
            let shortest = rels[*ri].len().min(rels[*rj].len());
            let ratio = Ratio::new(k as i64, shortest as i64);
            if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
                best = Some((ratio, u.subword(0, k)));
            }
        }
    }
    match best {
        None => SmallCancellation::Pass {
            max_ratio: Ratio::from_integer(0),
            max_piece_len: 0,
        },
        Some((ratio, piece)) if ratio < bound => SmallCancellation::Pass {
            max_ratio: ratio,
            max_piece_len: piece.len(),
        },
        Some((ratio, piece)) => SmallCancellation::Fail { piece, ratio },
    }
}

/// Parses the presentation file format:
///
/// ```text
/// gens: a b c d
/// rel: abABcdCD
/// sub: H = a, cd    # optional subgroup declarations
/// ```
pub fn parse_presentation(text: &str) -> Result<PresentationFile> {
    let mut alphabet: Option<Alphabet> = None;
    let mut rels = Vec::new();
    let mut subs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected `key: value`, found {line:?}")))?;
        let rest = rest.trim();
        match key.trim() {
            "gens" => {
                if alphabet.is_some() {
                    return Err(err("duplicate gens line".into()));
                }
                let mut names = Vec::new();
                for tok in rest.split_whitespace() {
                    let mut cs = tok.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => names.push(c),
                        _ => return Err(err(format!("generator {tok:?} must be a single letter"))),
                    }
                }
                if names.is_empty() {
                    return Err(err("no generators declared".into()));
                }
                alphabet = Some(Alphabet::from_names(names).map_err(|e| relabel(e, line_no))?);
            }
            "rel" => {
                let alpha = alphabet
                    .as_ref()
                    .ok_or_else(|| err("rel line before gens line".into()))?;
                let w = alpha.parse_word(rest).map_err(|e| relabel(e, line_no))?;
                if w.cyclically_reduce().0.is_empty() {
                    return Err(err("empty relator".into()));
                }
                rels.push(w);
            }
            "sub" => {
                let alpha = alphabet
                    .as_ref()
                    .ok_or_else(|| err("sub line before gens line".into()))?;
                let (name, gens) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `sub: NAME = w1, w2, ...`".into()))?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(err("subgroup name is empty".into()));
                }
                let generators = gens
                    .split(',')
                    .map(|g| alpha.parse_word(g).map_err(|e| relabel(e, line_no)))
                    .collect::<Result<Vec<_>>>()?;
                subs.push(SubgroupDecl {
                    name: name.to_string(),
                    generators,
                });
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    let alphabet = alphabet.ok_or(Error::Parse {
        line: 1,
        message: "missing gens line".into(),
    })?;
    let presentation = Presentation::new(alphabet, rels)?;
    Ok(PresentationFile {
        presentation,
        subgroups: subs,
    })
}

fn relabel(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse { line, message },
        other => other,
    }
}

/// Exact word problem for a validated [`Presentation`].
#[derive(Clone, Debug)]
pub struct WordOracle {
    presentation: Presentation,
    /// Rotations of relators and inverses (Dehn kind only), deduplicated.
    rstar: Vec<Word>,
    /// Generators on which every relator has exponent sum zero.
    invariant_coords: Vec<usize>,
    /// Every relator has even length, so word length parity is an invariant.
    even_relators: bool,
}

impl WordOracle {
    pub fn new(presentation: Presentation) -> Self {
        let mut rstar: Vec<Word> = Vec::new();
        if presentation.kind == OracleKind::DehnC16 {
            for (_, w) in symmetrized_positions(&presentation.relators) {
                if !rstar.contains(&w) {
                    rstar.push(w);
                }
            }
        }
        let rank = presentation.rank();
        let invariant_coords = (0..rank)
            .filter(|&i| presentation.relators.iter().all(|r| r.exponent_sums(rank)[i] == 0))
            .collect();
        let even_relators = presentation.relators.iter().all(|r| r.len() % 2 == 0);
        Self {
            presentation,
            rstar,
            invariant_coords,
            even_relators,
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn kind(&self) -> OracleKind {
        self.presentation.kind
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    pub fn format(&self, w: &Word) -> String {
        self.presentation.format(w)
    }

    /// Free reduction, Dehn's algorithm or the exponent normal form depending
    /// on the kind. The result is empty exactly when `w` is trivial.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        match self.kind() {
            OracleKind::FreeGroup => w.free_reduce(),
            OracleKind::FreeAbelianControl => abelian_word(&w.exponent_sums(self.rank())),
            OracleKind::DehnC16 => self.dehn(w),
        }
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.dehn_reduce(w).is_empty()
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.is_trivial(&u.concat(&v.invert()))
    }

    /// A canonical word for the element, when the kind has one.
    pub fn normal_form(&self, w: &Word) -> Option<Word> {
        match self.kind() {
            OracleKind::FreeGroup | OracleKind::FreeAbelianControl => Some(self.dehn_reduce(w)),
            OracleKind::DehnC16 => None,
        }
    }

    /// Indices of generators whose exponent sum is a homomorphism to Z.
    pub fn invariant_coords(&self) -> &[usize] {
        &self.invariant_coords
    }

    /// Image of `w` in `Z^k` under the exponent sums on [`Self::invariant_coords`].
    pub fn abelian_image(&self, w: &Word) -> Vec<i64> {
        let sums = w.exponent_sums(self.rank());
        self.invariant_coords.iter().map(|&i| sums[i]).collect()
    }

    /// A homomorphic invariant: equal elements have equal keys.
    pub fn invariant_key(&self, w: &Word) -> Vec<i64> {
        let mut key = self.abelian_image(w);
        if self.even_relators {
            key.push((w.len() % 2) as i64);
        }
        key
    }

    pub fn even_relators(&self) -> bool {
        self.even_relators
    }

    fn dehn(&self, w: &Word) -> Word {
        let mut cur = w.free_reduce().into_letters();
        'outer: loop {
            for i in 0..cur.len() {
                let mut best: Option<(usize, &Word)> = None;
                for r in &self.rstar {
                    let k = cur[i..].iter().zip(r.letters()).take_while(|(a, b)| a == b).count();
                    if 2 * k > r.len() && best.is_none_or(|(bk, _)| k > bk) {
                        best = Some((k, r));
                    }
                }
                if let Some((k, r)) = best {
                    let replacement = Word::from_letters(r.letters()[k..].to_vec()).invert();
                    let mut next = cur[..i].to_vec();
                    next.extend_from_slice(replacement.letters());
                    next.extend_from_slice(&cur[i + k..]);
                    cur = Word::from_letters(next).free_reduce().into_letters();
                    continue 'outer;
                }
            }
            return Word::from_letters(cur);
        }
    }
}

/// `a^x0 b^x1 ...` in generator order.
fn abelian_word(exps: &[i64]) -> Word {
    let mut v = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        let l = Letter::new(i as u16, e < 0);
        v.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
    }
    Word::from_letters(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn genus2() -> WordOracle {
        WordOracle::new(Presentation::surface(2).unwrap())
    }

    #[test]
    fn parses_free_group() {
        let f = parse_presentation("gens: a b\n").unwrap();
        assert_eq!(f.presentation.kind(), OracleKind::FreeGroup);
        assert_eq!(f.presentation.rank(), 2);
    }

    #[test]
    fn parses_surface_group_with_comments_and_subgroups() {
        let text = "# genus two\ngens: a b c d\nrel: abABcdCD  # the relator\nsub: H = a, cd\n";
        let f = parse_presentation(text).unwrap();
        assert_eq!(f.presentation.kind(), OracleKind::DehnC16);
        let h = f.subgroup("H").unwrap();
        assert_eq!(h.generators, vec![w("a"), w("cd")]);
    }

    #[test]
    fn rejects_trivial_group_presentation() {
        let e = parse_presentation("gens: a\nrel: a\n").unwrap_err();
        assert!(matches!(e, Error::UnsupportedPresentation(_)), "{e:?}");
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = parse_presentation("gens: a b\nrel: abx\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_presentation("gens: a b\nrel: aA\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_presentation("gens: a b\nfoo\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_presentation("rel: ab\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e:?}");
    }

    #[test]
    fn commutator_presentation_is_the_abelian_control() {
        let f = parse_presentation("gens: a b\nrel: abAB\n").unwrap();
        assert_eq!(f.presentation.kind(), OracleKind::FreeAbelianControl);
        let f = parse_presentation("gens: a b c\nrel: abAB\nrel: acAC\nrel: CbcB\n").unwrap();
        assert_eq!(f.presentation.kind(), OracleKind::FreeAbelianControl);
        // missing the [b, c] commutator
        assert!(parse_presentation("gens: a b c\nrel: abAB\nrel: acAC\n").is_err());
    }

    #[test]
    fn small_cancellation_genus_two() {
        let res = check_metric_small_cancellation(&[w("abABcdCD")], Ratio::new(1, 6));
        assert_eq!(
            res,
            SmallCancellation::Pass {
                max_ratio: Ratio::new(1, 8),
                max_piece_len: 1
            }
        );
    }

    #[test]
    fn small_cancellation_proper_power_fails() {
        match check_metric_small_cancellation(&[w("abab")], Ratio::new(1, 6)) {
            SmallCancellation::Fail { ratio, .. } => assert!(ratio >= Ratio::new(1, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_cancellation_free_group_vacuous() {
        assert_eq!(
            check_metric_small_cancellation(&[], Ratio::new(1, 6)),
            SmallCancellation::Pass {
                max_ratio: Ratio::from_integer(0),
                max_piece_len: 0
            }
        );
    }

    #[test]
    fn dehn_examples() {
        let g = genus2();
        assert_eq!(g.dehn_reduce(&w("abABcdCD")), w(""));
        assert_eq!(g.dehn_reduce(&w("abABc")), w("dcD"));
        let f = WordOracle::new(Presentation::free(2));
        assert_eq!(f.dehn_reduce(&w("abAB")), w("abAB"));
    }

    #[test]
    fn dehn_is_idempotent_and_shortening() {
        let g = genus2();
        for s in ["abABcdC", "dcDCbaB", "aabABcdCDA", "cdCDabAB", "abABcdCDabABcdCD"] {
            let r = g.dehn_reduce(&w(s));
            assert!(r.len() <= s.len());
            assert_eq!(g.dehn_reduce(&r), r);
        }
    }

    #[test]
    fn abelian_normal_form() {
        let z2 = WordOracle::new(Presentation::free_abelian(2));
        assert_eq!(z2.dehn_reduce(&w("babAB")), w("b"));
        assert!(z2.is_trivial(&w("abAB")));
        assert_eq!(z2.normal_form(&w("BaB")), Some(w("aBB")));
    }

    #[test]
    fn presentation_hash_is_stable() {
        let a = Presentation::surface(2).unwrap();
        let b = parse_presentation("gens: a b c d\nrel: abABcdCD\n")
            .unwrap()
            .presentation;
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), Presentation::free(4).hash());
    }
}
