//! Finite commutative semirings with identity.
//!
//! A semiring here is a set `{0, .., n-1}` with two operation tables:
//! `(S, +, 0)` and `(S, ·, 1)` are commutative monoids, `·` distributes
//! over `+`, and `0` is multiplicatively absorbing. Element `0` is always
//! the additive identity and element `1` the multiplicative identity;
//! loaders must permute input tables into this form.
//!
//! Everything downstream (ideals, quotients, topology, audits) works with
//! element indices and bitsets over them, so the order is capped at 64.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Largest supported semiring order (elements are tracked in `u64` bitsets).
pub const MAX_ORDER: usize = 64;

const UNDEF: u8 = u8::MAX;

/// Identity of the semiring a set or ideal belongs to.
///
/// A structural fingerprint of the operation tables; two values loaded from
/// the same tables compare equal, which is what owner checks need.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OwnerId(u64);

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Semiring axioms checked by [`validate`], in checking order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Axiom {
    AddCommutative,
    AddIdentity,
    AddAssociative,
    MulCommutative,
    MulIdentity,
    MulAssociative,
    Distributive,
    ZeroAbsorbing,
}

impl Axiom {
    /// Evaluate this axiom instance at a witness triple on raw tables.
    ///
    /// Unary and binary axioms read a prefix of the triple. Returns `false`
    /// when the instance is violated, i.e. the witness is genuine.
    pub fn holds_at(self, raw: &RawSemiring, w: [usize; 3]) -> bool {
        let n = raw.order;
        let [x, y, z] = w;
        if x >= n || y >= n || z >= n {
            return false;
        }
        let a = |p: usize, q: usize| raw.add[p][q];
        let m = |p: usize, q: usize| raw.mul[p][q];
        match self {
            Axiom::AddCommutative => a(x, y) == a(y, x),
            Axiom::AddIdentity => a(0, x) == x,
            Axiom::AddAssociative => a(a(x, y), z) == a(x, a(y, z)),
            Axiom::MulCommutative => m(x, y) == m(y, x),
            Axiom::MulIdentity => m(1, x) == x,
            Axiom::MulAssociative => m(m(x, y), z) == m(x, m(y, z)),
            Axiom::Distributive => m(x, a(y, z)) == a(m(x, y), m(x, z)),
            Axiom::ZeroAbsorbing => m(0, x) == 0,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::AddCommutative => "addition commutative",
            Axiom::AddIdentity => "0 is the additive identity",
            Axiom::AddAssociative => "addition associative",
            Axiom::MulCommutative => "multiplication commutative",
            Axiom::MulIdentity => "1 is the multiplicative identity",
            Axiom::MulAssociative => "multiplication associative",
            Axiom::Distributive => "multiplication distributes over addition",
            Axiom::ZeroAbsorbing => "0 is multiplicatively absorbing",
        };
        f.write_str(s)
    }
}

/// Errors from [`validate`] and table loading.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum SemiringError {
    #[error("order {0} has 0 = 1; semirings here require 0 != 1")]
    ZeroEqualsOne(usize),
    #[error("order {order} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge { order: usize },
    #[error("{table} table is not {order}x{order}")]
    BadShape { table: &'static str, order: usize },
    #[error("{table}[{row}][{col}] = {value} is out of range for order {order}")]
    EntryOutOfRange {
        table: &'static str,
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("axiom violated: {axiom} at witness {witness:?}")]
    AxiomViolation { axiom: Axiom, witness: [usize; 3] },
}

/// Raw operation tables as they appear in the JSON wire format.
///
/// `{"order": n, "add": [[...]], "mul": [[...]]}` with row-major integer
/// tables; element 0 is the zero and element 1 the one.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RawSemiring {
    pub order: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
}

/// A validated finite commutative semiring with identity.
///
/// Immutable after validation; cheap to clone and safe to share between
/// threads. Additive inverses are precomputed since the semisubtractive
/// machinery queries them constantly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteSemiring {
    order: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    inv: Vec<u8>, // additive inverse per element, UNDEF if none
    owner: OwnerId,
}

impl FiniteSemiring {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn owner(&self) -> OwnerId {
        self.owner
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.order + y] as usize
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y] as usize
    }

    /// All element indices, ascending.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        0..self.order
    }

    /// The unique additive inverse of `x`, if one exists.
    pub fn additive_inverse(&self, x: usize) -> Option<usize> {
        let y = self.inv[x];
        (y != UNDEF).then_some(y as usize)
    }

    /// V(S): the elements possessing additive inverses. Always contains 0.
    pub fn invertible_set(&self) -> ElementSet {
        let mut s = ElementSet::empty(self);
        for x in self.elements() {
            if self.inv[x] != UNDEF {
                s.insert(x);
            }
        }
        s
    }

    /// True iff every element has an additive inverse, i.e. V(S) = S.
    pub fn is_ring(&self) -> bool {
        self.inv.iter().all(|&y| y != UNDEF)
    }

    /// The whole element set as an [`ElementSet`].
    pub fn universe(&self) -> ElementSet {
        ElementSet {
            bits: full_mask(self.order),
            owner: self.owner,
        }
    }

    /// Table encoding used for canonical-form comparison and report keys.
    pub fn encoding(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(1 + 2 * self.order * self.order);
        v.push(self.order as u8);
        v.extend_from_slice(&self.add);
        v.extend_from_slice(&self.mul);
        v
    }

    pub fn to_raw(&self) -> RawSemiring {
        let n = self.order;
        let rows = |t: &[u8]| {
            (0..n)
                .map(|x| (0..n).map(|y| t[x * n + y] as usize).collect())
                .collect()
        };
        RawSemiring {
            order: n,
            add: rows(&self.add),
            mul: rows(&self.mul),
        }
    }

    /// Relabel elements by `perm` (old index -> new index). The permutation
    /// must fix 0 and 1 so the result stays in canonical element form.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteSemiring, SemiringError> {
        assert_eq!(perm.len(), self.order, "permutation length mismatch");
        assert!(perm[0] == 0 && perm[1] == 1, "relabel must fix 0 and 1");
        let n = self.order;
        let mut add = vec![vec![0usize; n]; n];
        let mut mul = vec![vec![0usize; n]; n];
        for x in 0..n {
            for y in 0..n {
                add[perm[x]][perm[y]] = perm[self.add(x, y)];
                mul[perm[x]][perm[y]] = perm[self.mul(x, y)];
            }
        }
        validate(&RawSemiring { order: n, add, mul })
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Validate raw tables as a commutative semiring with identity.
///
/// Checks are exhaustive over all triples, O(n^3); fine for the orders this
/// library targets. The first violated axiom is reported together with a
/// witness triple that re-evaluates to a violation via [`Axiom::holds_at`].
pub fn validate(raw: &RawSemiring) -> Result<FiniteSemiring, SemiringError> {
    let n = raw.order;
    if n < 2 {
        return Err(SemiringError::ZeroEqualsOne(n));
    }
    if n > MAX_ORDER {
        return Err(SemiringError::OrderTooLarge { order: n });
    }
    for (name, t) in [("add", &raw.add), ("mul", &raw.mul)] {
        if t.len() != n || t.iter().any(|row| row.len() != n) {
            return Err(SemiringError::BadShape { table: name, order: n });
        }
        for (i, row) in t.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(SemiringError::EntryOutOfRange {
                        table: name,
                        row: i,
                        col: j,
                        value: v,
                        order: n,
                    });
                }
            }
        }
    }

    let fail = |axiom: Axiom, witness: [usize; 3]| SemiringError::AxiomViolation { axiom, witness };

    for x in 0..n {
        for y in x..n {
            if raw.add[x][y] != raw.add[y][x] {
                return Err(fail(Axiom::AddCommutative, [x, y, 0]));
            }
        }
    }
    for x in 0..n {
        if raw.add[0][x] != x {
            return Err(fail(Axiom::AddIdentity, [x, 0, 0]));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if raw.add[raw.add[x][y]][z] != raw.add[x][raw.add[y][z]] {
                    return Err(fail(Axiom::AddAssociative, [x, y, z]));
                }
            }
        }
    }
    for x in 0..n {
        for y in x..n {
            if raw.mul[x][y] != raw.mul[y][x] {
                return Err(fail(Axiom::MulCommutative, [x, y, 0]));
            }
        }
    }
    for x in 0..n {
        if raw.mul[1][x] != x {
            return Err(fail(Axiom::MulIdentity, [x, 0, 0]));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if raw.mul[raw.mul[x][y]][z] != raw.mul[x][raw.mul[y][z]] {
                    return Err(fail(Axiom::MulAssociative, [x, y, z]));
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if raw.mul[x][raw.add[y][z]] != raw.add[raw.mul[x][y]][raw.mul[x][z]] {
                    return Err(fail(Axiom::Distributive, [x, y, z]));
                }
            }
        }
    }
    for x in 0..n {
        if raw.mul[0][x] != 0 {
            return Err(fail(Axiom::ZeroAbsorbing, [x, 0, 0]));
        }
    }

    let mut add = Vec::with_capacity(n * n);
    let mut mul = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            add.push(raw.add[x][y] as u8);
            mul.push(raw.mul[x][y] as u8);
        }
    }

    // In a commutative monoid an inverse is unique when it exists.
    let mut inv = vec![UNDEF; n];
    for x in 0..n {
        for y in 0..n {
            if add[x * n + y] == 0 {
                debug_assert!(inv[x] == UNDEF || inv[x] == y as u8);
                inv[x] = y as u8;
                break;
            }
        }
    }

    let owner = OwnerId(fnv1a(
        std::iter::once(n as u8)
            .chain(add.iter().copied())
            .chain(mul.iter().copied()),
    ));

    Ok(FiniteSemiring {
        order: n,
        add,
        mul,
        inv,
        owner,
    })
}

/// A subset of a semiring's elements, tagged with its owner.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ElementSet {
    bits: u64,
    owner: OwnerId,
}

impl ElementSet {
    pub fn empty(s: &FiniteSemiring) -> ElementSet {
        ElementSet {
            bits: 0,
            owner: s.owner,
        }
    }

    pub fn from_elements(s: &FiniteSemiring, elems: &[usize]) -> ElementSet {
        let mut set = Self::empty(s);
        for &x in elems {
            assert!(x < s.order, "element {x} out of range");
            set.insert(x);
        }
        set
    }

    pub(crate) fn from_bits(bits: u64, owner: OwnerId) -> ElementSet {
        ElementSet { bits, owner }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn owner(&self) -> OwnerId {
        self.owner
    }

    pub fn insert(&mut self, x: usize) {
        self.bits |= 1 << x;
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits >> x & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        debug_assert_eq!(self.owner, other.owner);
        ElementSet {
            bits: self.bits | other.bits,
            owner: self.owner,
        }
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        debug_assert_eq!(self.owner, other.owner);
        ElementSet {
            bits: self.bits & other.bits,
            owner: self.owner,
        }
    }

    /// Set elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }

    /// Sorted element indices; the serialization form used in reports.
    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Order two sets as their ascending element lists compare
    /// lexicographically. Coincides with the min of the symmetric
    /// difference except in the subset case, which is handled first.
    pub fn lex_cmp(&self, other: &ElementSet) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let d = self.bits ^ other.bits;
        if d == 0 {
            return Ordering::Equal;
        }
        if self.bits & d == 0 {
            return Ordering::Less; // self is a strict subset prefix-wise only if lowest diffs are other's
        }
        if other.bits & d == 0 {
            return Ordering::Greater;
        }
        let low = d & d.wrapping_neg();
        if self.bits & low != 0 {
            // self holds the smallest differing element; compare as lists
            // from there: self's list is smaller unless other ran out, which
            // the subset cases above already excluded.
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Display for ElementSet {
    fmt_set_body!();
}

macro_rules! fmt_set_body {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{{")?;
            for (i, x) in self.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")
        }
    };
}
use fmt_set_body;

/// Errors from [`validate_hom`].
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum HomError {
    #[error("map length {got} does not match source order {want}")]
    BadLength { got: usize, want: usize },
    #[error("map value {value} out of range for target order {order}")]
    ValueOutOfRange { value: usize, order: usize },
    #[error("map does not send {what} to {what}")]
    ConstantNotFixed { what: &'static str },
    #[error("map does not preserve {op} at ({x}, {y})")]
    NotAHom { op: &'static str, x: usize, y: usize },
}

/// A validated semiring homomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemiringHom {
    source: FiniteSemiring,
    target: FiniteSemiring,
    map: Vec<u8>,
}

impl SemiringHom {
    pub fn source(&self) -> &FiniteSemiring {
        &self.source
    }

    pub fn target(&self) -> &FiniteSemiring {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    pub fn map(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v as usize).collect()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &v in &self.map {
            hit[v as usize] = true;
        }
        hit.into_iter().all(|b| b)
    }

    pub fn identity(s: &FiniteSemiring) -> SemiringHom {
        SemiringHom {
            source: s.clone(),
            target: s.clone(),
            map: (0..s.order()).map(|x| x as u8).collect(),
        }
    }
}

/// Validate `map` as a homomorphism `source -> target`.
///
/// Must send 0 to 0, 1 to 1, and preserve both tables pointwise.
pub fn validate_hom(
    source: &FiniteSemiring,
    target: &FiniteSemiring,
    map: &[usize],
) -> Result<SemiringHom, HomError> {
    if map.len() != source.order() {
        return Err(HomError::BadLength {
            got: map.len(),
            want: source.order(),
        });
    }
    if let Some(&v) = map.iter().find(|&&v| v >= target.order()) {
        return Err(HomError::ValueOutOfRange {
            value: v,
            order: target.order(),
        });
    }
    if map[0] != 0 {
        return Err(HomError::ConstantNotFixed { what: "0" });
    }
    if map[1] != 1 {
        return Err(HomError::ConstantNotFixed { what: "1" });
    }
    for x in 0..source.order() {
        for y in x..source.order() {
            if map[source.add(x, y)] != target.add(map[x], map[y]) {
                return Err(HomError::NotAHom { op: "+", x, y });
            }
            if map[source.mul(x, y)] != target.mul(map[x], map[y]) {
                return Err(HomError::NotAHom { op: "*", x, y });
            }
        }
    }
    Ok(SemiringHom {
        source: source.clone(),
        target: target.clone(),
        map: map.iter().map(|&v| v as u8).collect(),
    })
}

/// Hom wire format: source and target semirings inline plus the index map.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RawHom {
    pub source: RawSemiring,
    pub target: RawSemiring,
    pub map: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn boolean_semiring_validates() {
        let raw = RawSemiring {
            order: 2,
            add: vec![vec![0, 1], vec![1, 1]],
            mul: vec![vec![0, 0], vec![0, 1]],
        };
        let s = validate(&raw).unwrap();
        assert_eq!(s.add(1, 1), 1);
        assert!(!s.is_ring());
    }

    #[test]
    fn zmod4_validates_and_is_ring() {
        let s = fixtures::zmod(4).unwrap();
        assert!(s.is_ring());
        assert_eq!(s.invertible_set().to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn order_one_is_rejected() {
        let raw = RawSemiring {
            order: 1,
            add: vec![vec![0]],
            mul: vec![vec![0]],
        };
        assert_eq!(validate(&raw), Err(SemiringError::ZeroEqualsOne(1)));
    }

    #[test]
    fn additive_inverses() {
        let z4 = fixtures::zmod(4).unwrap();
        assert_eq!(z4.additive_inverse(3), Some(1));
        let b = fixtures::bool2();
        assert_eq!(b.additive_inverse(1), None);
        let t2 = fixtures::trunc(2).unwrap();
        assert_eq!(t2.additive_inverse(2), None);
        assert_eq!(t2.invertible_set().to_vec(), vec![0]);
    }

    #[test]
    fn product_invertible_set_is_componentwise() {
        let p = fixtures::prod(&fixtures::zmod(2).unwrap(), &fixtures::bool2()).unwrap();
        // (0,0) and (1,0) are the invertible pairs; after moving the identity
        // (1,1) to index 1 they sit at indices 0 and 2.
        assert_eq!(p.invertible_set().to_vec(), vec![0, 2]);
    }

    #[test]
    fn hom_validation() {
        let z4 = fixtures::zmod(4).unwrap();
        let z2 = fixtures::zmod(2).unwrap();
        let h = validate_hom(&z4, &z2, &[0, 1, 0, 1]).unwrap();
        assert!(h.is_surjective());
        assert!(validate_hom(&z4, &z2, &[0, 1, 1, 0]).is_err());
        let id = SemiringHom::identity(&z4);
        assert_eq!(id.apply(3), 3);
    }

    #[test]
    fn axiom_witness_reevaluates() {
        let mut raw = fixtures::zmod(4).unwrap().to_raw();
        raw.add[2][3] = 0; // break commutativity/associativity somewhere
        match validate(&raw) {
            Err(SemiringError::AxiomViolation { axiom, witness }) => {
                assert!(!axiom.holds_at(&raw, witness));
            }
            other => panic!("expected axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn lex_cmp_orders_like_sorted_lists() {
        let s = fixtures::zmod(4).unwrap();
        let set = |e: &[usize]| ElementSet::from_elements(&s, e);
        use std::cmp::Ordering::*;
        assert_eq!(set(&[0, 3]).lex_cmp(&set(&[1, 2])), Less);
        assert_eq!(set(&[0]).lex_cmp(&set(&[0, 1])), Less);
        assert_eq!(set(&[0, 1]).lex_cmp(&set(&[0])), Greater);
        assert_eq!(set(&[2]).lex_cmp(&set(&[2])), Equal);
    }
}
