//! Truth tables, assignments and selectors.
//!
//! Inputs are indexed LSB-first: bit `i` of a table position is the value of
//! index `i`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest arity a truth table may have (2^28 bits = 32 MiB).
pub const ARITY_CAP: usize = 28;

/// Total boolean function stored as a packed truth table. Equality ignores
/// the name.
#[derive(Clone)]
pub struct BoolFn {
    arity: usize,
    table: Vec<u64>,
    name: Option<String>,
}

/// Assignment over `arity` indices; index `i` is bit `i` of `bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub arity: usize,
    pub bits: u64,
}

/// An assignment selector `(alpha0, alpha1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Selector {
    pub alpha0: Assignment,
    pub alpha1: Assignment,
}

/// Mask with the low `n` bits set.
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn words_for(arity: usize) -> usize {
    if arity <= 6 {
        1
    } else {
        1 << (arity - 6)
    }
}

impl Assignment {
    pub fn new(arity: usize, bits: u64) -> Result<Self> {
        if arity > 64 || bits & !low_mask(arity) != 0 {
            return Err(Error::InvalidParameter(format!(
                "assignment bits {bits:#x} do not fit in {arity} positions"
            )));
        }
        Ok(Assignment { arity, bits })
    }

    pub fn zeros(arity: usize) -> Self {
        Assignment { arity, bits: 0 }
    }

    pub fn ones(arity: usize) -> Self {
        Assignment {
            arity,
            bits: low_mask(arity),
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    /// Parse a string of `0`/`1` characters, index 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 64 {
            return Err(Error::Parse(format!("assignment longer than 64: {s}")));
        }
        let mut bits = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::Parse(format!("bad assignment character `{ch}`"))),
            }
        }
        Ok(Assignment {
            arity: s.len(),
            bits,
        })
    }

    /// Mask of indices set to 1.
    pub fn ones_mask(&self) -> u64 {
        self.bits
    }

    /// Mask of indices set to 0.
    pub fn zeros_mask(&self) -> u64 {
        !self.bits & low_mask(self.arity)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.arity {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `x` with the positions of `block` complemented.
pub fn flip(x: Assignment, block: u64) -> Assignment {
    debug_assert!(block & !low_mask(x.arity) == 0);
    Assignment {
        arity: x.arity,
        bits: x.bits ^ block,
    }
}

impl Selector {
    pub fn new(alpha0: Assignment, alpha1: Assignment) -> Result<Self> {
        if alpha0.arity != alpha1.arity {
            return Err(Error::ArityMismatch {
                expected: alpha0.arity,
                got: alpha1.arity,
            });
        }
        Ok(Selector { alpha0, alpha1 })
    }

    pub fn get(&self, c: bool) -> Assignment {
        if c {
            self.alpha1
        } else {
            self.alpha0
        }
    }

    pub fn arity(&self) -> usize {
        self.alpha0.arity
    }
}

impl BoolFn {
    /// Build from packed words. Bits past `2^arity` must be clear.
    pub fn from_words(arity: usize, table: Vec<u64>) -> Result<Self> {
        if arity > ARITY_CAP {
            return Err(Error::ArityTooLarge {
                arity,
                cap: ARITY_CAP,
            });
        }
        if table.len() != words_for(arity) {
            return Err(Error::InvalidParameter(format!(
                "table has {} words, arity {arity} needs {}",
                table.len(),
                words_for(arity)
            )));
        }
        if arity < 6 && table[0] & !low_mask(1 << arity) != 0 {
            return Err(Error::InvalidParameter(
                "table has bits beyond 2^arity".into(),
            ));
        }
        Ok(BoolFn {
            arity,
            table,
            name: None,
        })
    }

    /// Tabulate a predicate over all `2^arity` inputs.
    pub fn from_fn(arity: usize, pred: impl Fn(u64) -> bool) -> Result<Self> {
        if arity > ARITY_CAP {
            return Err(Error::ArityTooLarge {
                arity,
                cap: ARITY_CAP,
            });
        }
        let mut table = vec![0u64; words_for(arity)];
        for x in 0..1u64 << arity {
            if pred(x) {
                table[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(BoolFn {
            arity,
            table,
            name: None,
        })
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        Self::from_fn(arity, |_| value)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn words(&self) -> &[u64] {
        &self.table
    }

    pub fn input_count(&self) -> u64 {
        1u64 << self.arity
    }

    /// Table bit at raw position `x` (no arity check).
    #[inline]
    pub fn at(&self, x: u64) -> bool {
        self.table[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<bool> {
        if x.arity != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: x.arity,
            });
        }
        Ok(self.at(x.bits))
    }

    pub fn count_ones(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.input_count()
    }

    pub fn is_f_compatible(&self, sel: &Selector) -> bool {
        sel.arity() == self.arity && !self.at(sel.alpha0.bits) && self.at(sel.alpha1.bits)
    }

    /// `f` with index `i` and index `j` exchanged.
    pub fn swap_indices(&self, i: usize, j: usize) -> BoolFn {
        BoolFn::from_fn(self.arity, |x| self.at(swap_bits(x, i, j))).expect("same arity")
    }

    /// Whether `f` is unchanged by exchanging indices `i` and `j`.
    pub fn invariant_under_swap(&self, i: usize, j: usize) -> bool {
        (0..self.input_count()).all(|x| self.at(x) == self.at(swap_bits(x, i, j)))
    }

    /// Whether `f` is monotone nondecreasing.
    pub fn is_monotone(&self) -> bool {
        (0..self.input_count()).all(|x| !self.at(x) || (0..self.arity).all(|i| self.at(x | 1 << i)))
    }

    /// Serialize to the `.btt` text format.
    pub fn to_btt(&self) -> String {
        let digits = hex_digits(self.arity);
        let mut s = String::with_capacity(digits + 8);
        s.push_str(&format!("n={}\n", self.arity));
        for d in (0..digits).rev() {
            let bitpos = d * 4;
            let nib = (self.table[bitpos >> 6] >> (bitpos & 63)) & 0xf;
            s.push(std::char::from_digit(nib as u32, 16).expect("nibble"));
        }
        s.push('\n');
        s
    }

    /// Parse the `.btt` text format.
    pub fn parse_btt(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty .btt input".into()))?;
        let arity: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        if arity > ARITY_CAP {
            return Err(Error::ArityTooLarge {
                arity,
                cap: ARITY_CAP,
            });
        }
        let hex = lines
            .next()
            .ok_or_else(|| Error::Parse("missing table line".into()))?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after table".into()));
        }
        let digits = hex_digits(arity);
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "table has {} hex digits, arity {arity} needs {digits}",
                hex.len()
            )));
        }
        let mut table = vec![0u64; words_for(arity)];
        for (k, ch) in hex.chars().rev().enumerate() {
            let nib = ch
                .to_digit(16)
                .filter(|_| !ch.is_ascii_uppercase())
                .ok_or_else(|| Error::Parse(format!("bad hex digit `{ch}`")))?
                as u64;
            let bitpos = k * 4;
            table[bitpos >> 6] |= nib << (bitpos & 63);
        }
        if arity < 2 && table[0] & !low_mask(1 << arity) != 0 {
            return Err(Error::Parse("table has bits beyond 2^arity".into()));
        }
        BoolFn::from_words(arity, table)
    }
}

impl PartialEq for BoolFn {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.table == other.table
    }
}

impl Eq for BoolFn {}

impl std::hash::Hash for BoolFn {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.table.hash(state);
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoolFn")
            .field("arity", &self.arity)
            .field("name", &self.name)
            .field("btt", &self.to_btt().lines().nth(1).unwrap_or(""))
            .finish()
    }
}

fn hex_digits(arity: usize) -> usize {
    (1usize << arity).div_ceil(4)
}

/// Exchange bits `i` and `j` of `x`.
pub fn swap_bits(x: u64, i: usize, j: usize) -> u64 {
    let d = (x >> i ^ x >> j) & 1;
    x ^ (d << i | d << j)
}

/// The Bublitz-style function on six inputs: when `x1^x2^x3^x4 = 0` output
/// `x1^x2^x5`, otherwise `x1^x3^x6` (indices 0..5 hold x1..x6).
pub fn bublitz() -> BoolFn {
    BoolFn::from_fn(6, |x| {
        let b = |i: usize| (x >> i) & 1;
        let p = b(0) ^ b(1) ^ b(2) ^ b(3);
        let out = if p == 0 {
            b(0) ^ b(1) ^ b(4)
        } else {
            b(0) ^ b(2) ^ b(5)
        };
        out == 1
    })
    .expect("arity 6")
    .with_name("BUBLITZ")
}

/// Named constructions: OR, AND, PARITY (alias XOR), NAND, NOR, MAJ,
/// BUBLITZ, CONST0, CONST1.
pub fn named_fn(name: &str, n: Option<usize>) -> Result<BoolFn> {
    let upper = name.to_ascii_uppercase();
    if upper == "BUBLITZ" {
        return Ok(bublitz());
    }
    let n = n.ok_or_else(|| Error::InvalidParameter(format!("{upper} needs n")))?;
    if upper != "CONST0" && upper != "CONST1" && n == 0 {
        return Err(Error::InvalidParameter(format!("{upper} needs n >= 1")));
    }
    let mask = low_mask(n);
    let f = match upper.as_str() {
        "OR" => BoolFn::from_fn(n, |x| x != 0)?,
        "AND" => BoolFn::from_fn(n, |x| x == mask)?,
        "NAND" => BoolFn::from_fn(n, |x| x != mask)?,
        "NOR" => BoolFn::from_fn(n, |x| x == 0)?,
        "PARITY" | "XOR" => BoolFn::from_fn(n, |x| x.count_ones() % 2 == 1)?,
        "MAJ" => BoolFn::from_fn(n, |x| 2 * x.count_ones() as usize > n)?,
        "CONST0" => BoolFn::constant(n, false)?,
        "CONST1" => BoolFn::constant(n, true)?,
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(f.with_name(format!("{upper}_{n}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Assignment {
        Assignment::parse(s).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        assert!(!or2.evaluate(&a("00")).unwrap());
        assert!(!bublitz().evaluate(&a("000000")).unwrap());
        let nand = named_fn("NAND", Some(2)).unwrap();
        assert!(!nand.evaluate(&a("11")).unwrap());
        assert!(or2.evaluate(&a("000")).is_err());
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip(a("0000"), 0b101), a("1010"));
        assert_eq!(flip(a("0110"), 0), a("0110"));
        assert_eq!(flip(a("111111"), 0b111111), a("000000"));
    }

    #[test]
    fn compatibility() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        // bits: "01" means index 1 set
        let sel = Selector::new(a("00"), a("01")).unwrap();
        assert!(or2.is_f_compatible(&sel));
        let bad = Selector::new(a("01"), a("00")).unwrap();
        assert!(!or2.is_f_compatible(&bad));
        let c0 = BoolFn::constant(2, false).unwrap();
        assert!(!c0.is_f_compatible(&sel));
    }

    #[test]
    fn named_tables() {
        let or3 = named_fn("OR", Some(3)).unwrap();
        assert_eq!(or3.words()[0], 0xfe);
        assert_eq!(named_fn("PARITY", Some(2)).unwrap().words()[0], 0b0110);
        assert_eq!(bublitz().words()[0], 0xb18d27e4d81b4e72);
        assert!(matches!(
            named_fn("FOO", Some(2)),
            Err(Error::UnknownName(_))
        ));
        assert!(named_fn("OR", Some(0)).is_err());
    }

    #[test]
    fn btt_format() {
        assert_eq!(named_fn("PARITY", Some(2)).unwrap().to_btt(), "n=2\n6\n");
        assert_eq!(named_fn("OR", Some(3)).unwrap().to_btt(), "n=3\nfe\n");
        assert_eq!(BoolFn::constant(1, true).unwrap().to_btt(), "n=1\n3\n");
        assert!(BoolFn::parse_btt("n=2\n66\n").is_err());
        assert!(BoolFn::parse_btt("n=1\n7\n").is_err());
        assert!(BoolFn::parse_btt("n=3\nFE\n").is_err());
        let f = BoolFn::parse_btt("n=3\nfe\n").unwrap();
        assert_eq!(f, named_fn("OR", Some(3)).unwrap());
    }

    #[test]
    fn swap_invariance() {
        let maj = named_fn("MAJ", Some(3)).unwrap();
        assert!(maj.invariant_under_swap(0, 2));
        assert!(!bublitz().invariant_under_swap(0, 1));
        assert_eq!(swap_bits(0b01, 0, 1), 0b10);
    }

    proptest::proptest! {
        #[test]
        fn btt_round_trip(arity in 0usize..=9, seed in proptest::prelude::any::<u64>()) {
            let f = BoolFn::from_fn(arity, |x| (x.wrapping_mul(seed | 1) >> 7) & 1 == 1).unwrap();
            let g = BoolFn::parse_btt(&f.to_btt()).unwrap();
            proptest::prop_assert_eq!(&g, &f);
            proptest::prop_assert_eq!(g.count_ones(), (0..1u64 << arity).filter(|&x| f.at(x)).count() as u64);
        }

        #[test]
        fn swap_is_an_involution(seed in proptest::prelude::any::<u64>(), i in 0usize..5, j in 0usize..5) {
            let f = BoolFn::from_fn(5, |x| (x ^ seed).count_ones() % 3 == 0).unwrap();
            proptest::prop_assert_eq!(f.swap_indices(i, j).swap_indices(i, j), f);
        }
    }
}
