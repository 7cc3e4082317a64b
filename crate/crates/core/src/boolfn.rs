//! `{0,1}`-valued functions on `{0,1}^n` and `{-1,0,1}^n`: representations,
//! built-in families, monotonicity, symmetry groups and monotone enumeration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spaces::{Alphabet, Configuration};

/// Pure evaluation callback. Must return the same value for the same input.
pub type Oracle = Arc<dyn Fn(&[i8]) -> bool + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Table(Vec<bool>),
    Oracle(Oracle),
}

#[derive(Clone)]
pub struct BooleanFunction {
    alphabet: Alphabet,
    n: usize,
    name: String,
    repr: Repr,
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BooleanFunction")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("n", &self.n)
            .field("dense", &self.is_dense())
            .finish()
    }
}

impl PartialEq for BooleanFunction {
    /// Dense functions compare by truth table; oracles never compare equal.
    fn eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Table(a), Repr::Table(b)) => {
                self.alphabet == other.alphabet && self.n == other.n && a == b
            }
            _ => false,
        }
    }
}

impl BooleanFunction {
    pub fn from_table(alphabet: Alphabet, n: usize, table: Vec<bool>) -> Result<Self> {
        let size = alphabet.enumerable_size(n)?;
        if table.len() != size {
            return Err(Error::ArityMismatch {
                expected: size,
                actual: table.len(),
            });
        }
        Ok(Self {
            alphabet,
            n,
            name: "table".into(),
            repr: Repr::Table(table),
        })
    }

    /// Dense function tabulated from a predicate.
    pub fn from_predicate(
        alphabet: Alphabet,
        n: usize,
        name: impl Into<String>,
        pred: impl Fn(&[i8]) -> bool,
    ) -> Result<Self> {
        let size = alphabet.enumerable_size(n)?;
        let mut buf = vec![0i8; n];
        let table = (0..size)
            .map(|r| {
                alphabet.decode_into(r, &mut buf);
                pred(&buf)
            })
            .collect();
        Ok(Self {
            alphabet,
            n,
            name: name.into(),
            repr: Repr::Table(table),
        })
    }

    /// Oracle-backed function; never enumerated implicitly.
    pub fn oracle(
        alphabet: Alphabet,
        n: usize,
        name: impl Into<String>,
        pred: impl Fn(&[i8]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            alphabet,
            n,
            name: name.into(),
            repr: Repr::Oracle(Arc::new(pred)),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    pub fn table(&self) -> Option<&[bool]> {
        match &self.repr {
            Repr::Table(t) => Some(t),
            Repr::Oracle(_) => None,
        }
    }

    pub fn require_table(&self) -> Result<&[bool]> {
        self.table().ok_or(Error::OracleNotEnumerable)
    }

    /// Tabulates an oracle-backed function explicitly.
    pub fn densify(&self) -> Result<Self> {
        match &self.repr {
            Repr::Table(_) => Ok(self.clone()),
            Repr::Oracle(o) => {
                let o = o.clone();
                Ok(Self::from_predicate(self.alphabet, self.n, self.name.clone(), |x| o(x))?)
            }
        }
    }

    pub fn evaluate(&self, x: &Configuration) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        x.validate(self.alphabet, self.n)?;
        Ok(self.eval_values(x.values()))
    }

    /// Evaluates without validation; `x` must be a valid configuration.
    pub fn eval_values(&self, x: &[i8]) -> bool {
        match &self.repr {
            Repr::Table(t) => {
                let radix = self.alphabet.radix();
                let rank = x
                    .iter()
                    .rev()
                    .fold(0usize, |acc, v| acc * radix + self.alphabet.digit(*v).unwrap_or(0));
                t[rank]
            }
            Repr::Oracle(o) => o(x),
        }
    }

    /// `x -> 1 - f(flip(x))` where `flip` reverses every coordinate's order.
    pub fn dual(&self) -> Result<Self> {
        let table = self.require_table()?;
        let flip = |v: i8| match self.alphabet {
            Alphabet::Binary => 1 - v,
            Alphabet::Ternary => -v,
        };
        let mut out = vec![false; table.len()];
        let mut buf = vec![0i8; self.n];
        for (r, slot) in out.iter_mut().enumerate() {
            self.alphabet.decode_into(r, &mut buf);
            let flipped: Vec<i8> = buf.iter().map(|v| flip(*v)).collect();
            *slot = !self.eval_values(&flipped);
        }
        Ok(Self::from_table(self.alphabet, self.n, out)?.with_name(format!("dual({})", self.name)))
    }

    /// `Pr(f = 1)` counted over points, i.e. the number of ones in the table.
    pub fn ones(&self) -> Result<usize> {
        Ok(self.require_table()?.iter().filter(|b| **b).count())
    }

    /// Hex-packed truth table `"<radix>:<n>:<hex>"`. Bit `r` of the table is
    /// bit `r % 8` of byte `r / 8`; bytes are written in order as two hex
    /// digits each.
    pub fn to_hex(&self) -> Result<String> {
        let table = self.require_table()?;
        let mut bytes = vec![0u8; table.len().div_ceil(8)];
        for (r, bit) in table.iter().enumerate() {
            if *bit {
                bytes[r / 8] |= 1 << (r % 8);
            }
        }
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        Ok(format!("{}:{}:{}", self.alphabet.radix(), self.n, hex))
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let mut parts = text.trim().splitn(3, ':');
        let (Some(radix), Some(n), Some(hex)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("expected <radix>:<n>:<hex>, got {text:?}")));
        };
        let alphabet = match radix {
            "2" => Alphabet::Binary,
            "3" => Alphabet::Ternary,
            _ => return Err(Error::Parse(format!("unsupported radix {radix:?}"))),
        };
        let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad arity {n:?}")))?;
        let size = alphabet.enumerable_size(n)?;
        let hex = hex.trim();
        if hex.len() != 2 * size.div_ceil(8) || !hex.is_ascii() {
            return Err(Error::Parse(format!(
                "truth table for {size} points needs {} hex digits, got {}",
                2 * size.div_ceil(8),
                hex.len()
            )));
        }
        let bytes = (0..hex.len() / 2)
            .map(|i| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::Parse(format!("bad hex: {e}")))?;
        let table = (0..size).map(|r| bytes[r / 8] >> (r % 8) & 1 == 1).collect();
        Ok(Self::from_table(alphabet, n, table)?.with_name("table"))
    }
}

/// Built-in families. "Top" means 1 on `{0,1}` and `+1` on `{-1,0,1}`.
pub mod builtin {
    use super::*;

    pub fn constant(alphabet: Alphabet, n: usize, value: bool) -> Result<BooleanFunction> {
        BooleanFunction::from_predicate(alphabet, n, format!("const{}", u8::from(value)), |_| value)
    }

    /// `x_k` is top.
    pub fn dictator(alphabet: Alphabet, n: usize, k: usize) -> Result<BooleanFunction> {
        if k >= n {
            return Err(Error::OutOfRange(format!("dictator coordinate {k} >= n = {n}")));
        }
        BooleanFunction::from_predicate(alphabet, n, format!("dictator(n={n},k={})", k + 1), |x| {
            x[k] == 1
        })
    }

    /// Binary: more than half the bits set. Ternary: more `+1` than `-1`.
    pub fn majority(alphabet: Alphabet, n: usize) -> Result<BooleanFunction> {
        BooleanFunction::from_predicate(alphabet, n, format!("majority(n={n})"), |x| match alphabet {
            Alphabet::Binary => 2 * x.iter().filter(|v| **v == 1).count() > x.len(),
            Alphabet::Ternary => x.iter().map(|v| i32::from(*v)).sum::<i32>() > 0,
        })
    }

    pub fn parity(n: usize) -> Result<BooleanFunction> {
        BooleanFunction::from_predicate(Alphabet::Binary, n, format!("parity(n={n})"), |x| {
            x.iter().filter(|v| **v == 1).count() % 2 == 1
        })
    }

    /// OR of `w` disjoint ANDs of width `b` (consecutive coordinates).
    pub fn tribes(alphabet: Alphabet, b: usize, w: usize) -> Result<BooleanFunction> {
        if b == 0 {
            return Err(Error::OutOfRange("tribe width must be positive".into()));
        }
        BooleanFunction::from_predicate(alphabet, b * w, format!("tribes(b={b},w={w})"), |x| {
            x.chunks(b).any(|tribe| tribe.iter().all(|v| *v == 1))
        })
    }

    /// Some cyclic window of `len` consecutive coordinates is all top.
    pub fn cyclic_run(alphabet: Alphabet, n: usize, len: usize) -> Result<BooleanFunction> {
        if len == 0 || len > n {
            return Err(Error::OutOfRange(format!("run length {len} not in 1..={n}")));
        }
        BooleanFunction::from_predicate(alphabet, n, format!("cyclic_run(n={n},L={len})"), |x| {
            (0..n).any(|start| (0..len).all(|j| x[(start + j) % n] == 1))
        })
    }

    /// At least `k` coordinates are top.
    pub fn at_least(alphabet: Alphabet, n: usize, k: usize) -> Result<BooleanFunction> {
        BooleanFunction::from_predicate(alphabet, n, format!("at_least(n={n},k={k})"), |x| {
            x.iter().filter(|v| **v == 1).count() >= k
        })
    }

    pub fn and_all(alphabet: Alphabet, n: usize) -> Result<BooleanFunction> {
        Ok(at_least(alphabet, n, n)?.with_name(format!("and(n={n})")))
    }

    pub fn or_all(alphabet: Alphabet, n: usize) -> Result<BooleanFunction> {
        Ok(at_least(alphabet, n, 1)?.with_name(format!("or(n={n})")))
    }
}

/// A function named on the command line, e.g. `majority3`, `tribes(2,3)`,
/// `cyclic_run:l=2`, `at_least_k(+1,2)` or a hex table `hex:2:3:e8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    pub name: String,
    pub args: Vec<String>,
    pub kv: BTreeMap<String, String>,
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(hex) = s.strip_prefix("hex:") {
            return Ok(FunctionSpec {
                name: "hex".into(),
                args: vec![hex.to_string()],
                kv: BTreeMap::new(),
            });
        }
        let mut spec = FunctionSpec {
            name: String::new(),
            args: Vec::new(),
            kv: BTreeMap::new(),
        };
        if let Some((name, rest)) = s.split_once('(') {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
            spec.name = name.trim().to_string();
            spec.args = inner
                .split(',')
                .map(|a| a.trim().to_string())
                .filter(|a| !a.is_empty())
                .collect();
        } else {
            let (name, rest) = s.split_once(':').unwrap_or((s, ""));
            spec.name = name.trim().to_string();
            for item in rest.split(',').filter(|i| !i.trim().is_empty()) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
                spec.kv.insert(k.trim().to_lowercase(), v.trim().to_string());
            }
        }
        if spec.name.is_empty() {
            return Err(Error::Parse("empty function name".into()));
        }
        Ok(spec)
    }
}

impl FunctionSpec {
    fn uint(&self, key: &str, pos: Option<usize>) -> Result<Option<usize>> {
        let raw = self
            .kv
            .get(key)
            .or_else(|| pos.and_then(|i| self.args.get(i)));
        raw.map(|v| {
            v.trim_start_matches('+')
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("{key} must be a nonnegative integer, got {v:?}")))
        })
        .transpose()
    }

    fn need(&self, key: &str, pos: Option<usize>, fallback: Option<usize>) -> Result<usize> {
        self.uint(key, pos)?
            .or(fallback)
            .ok_or_else(|| Error::Parse(format!("function {} needs {key}", self.name)))
    }

    /// Builds the function over `alphabet`; `n_hint` supplies the arity for
    /// families whose size is not implied by their parameters.
    pub fn build(&self, alphabet: Alphabet, n_hint: Option<usize>) -> Result<BooleanFunction> {
        use builtin::*;
        let f = match self.name.as_str() {
            "hex" => {
                let f = BooleanFunction::from_hex(&self.args[0])?;
                if f.alphabet() != alphabet {
                    return Err(Error::AlphabetMismatch(format!(
                        "truth table is over {:?}, space is {alphabet:?}",
                        f.alphabet()
                    )));
                }
                f
            }
            "dictator" => {
                let n = self.need("n", None, n_hint.or(Some(1)))?;
                let k = self.uint("k", Some(0))?.unwrap_or(1);
                if k == 0 {
                    return Err(Error::Parse("dictator coordinate is 1-based".into()));
                }
                dictator(alphabet, n, k - 1)?
            }
            "majority" => majority(alphabet, self.need("n", Some(0), n_hint)?)?,
            "parity" => {
                if alphabet != Alphabet::Binary {
                    return Err(Error::AlphabetMismatch("parity is defined on {0,1}^n only".into()));
                }
                parity(self.need("n", Some(0), n_hint)?)?
            }
            "tribes" => tribes(alphabet, self.need("b", Some(0), None)?, self.need("w", Some(1), None)?)?,
            "cyclic_run" => {
                let len = self.need("l", Some(0), None)?;
                cyclic_run(alphabet, self.need("n", Some(1), n_hint)?, len)?
            }
            "at_least" | "at_least_k" => {
                // Positional form is at_least_k(+1, k).
                let k = if self.args.len() >= 2 {
                    self.uint("k", Some(1))?
                } else {
                    self.uint("k", Some(0))?
                }
                .ok_or_else(|| Error::Parse("at_least needs k".into()))?;
                let n = self.need("n", None, n_hint)?;
                at_least(alphabet, n, k)?
            }
            "and" => and_all(alphabet, self.need("n", Some(0), n_hint)?)?,
            "or" => or_all(alphabet, self.need("n", Some(0), n_hint)?)?,
            "const0" | "const1" => {
                constant(alphabet, self.need("n", Some(0), n_hint)?, self.name == "const1")?
            }
            other => {
                if let Some(n) = other.strip_prefix("majority").and_then(|d| d.parse().ok()) {
                    majority(alphabet, n)?
                } else if let Some(n) = other.strip_prefix("parity").and_then(|d| d.parse().ok()) {
                    parity(n)?
                } else {
                    return Err(Error::Parse(format!("unknown function {other:?}")));
                }
            }
        };
        if let Some(n) = n_hint {
            if f.arity() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    actual: f.arity(),
                });
            }
        }
        Ok(f)
    }
}

/// Result of an exhaustive monotonicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Monotonicity {
    pub increasing: bool,
    /// `(x, x')` with `x <= x'`, `f(x) = 1` and `f(x') = 0`.
    pub witness: Option<(Configuration, Configuration)>,
}

/// Checks every covering pair `x < x + e_k`; a violation along any chain
/// shows up on some cover, so this is exhaustive.
pub fn is_increasing(f: &BooleanFunction) -> Result<Monotonicity> {
    let table = f.require_table()?;
    let alphabet = f.alphabet();
    let radix = alphabet.radix();
    let mut buf = vec![0i8; f.arity()];
    for (r, &value) in table.iter().enumerate() {
        if !value {
            continue;
        }
        alphabet.decode_into(r, &mut buf);
        let mut stride = 1;
        for k in 0..f.arity() {
            if buf[k] != alphabet.top() && !table[r + stride] {
                let lower = Configuration::new(buf.clone());
                let mut upper = buf.clone();
                upper[k] += 1;
                return Ok(Monotonicity {
                    increasing: false,
                    witness: Some((lower, Configuration::new(upper))),
                });
            }
            stride *= radix;
        }
    }
    Ok(Monotonicity {
        increasing: true,
        witness: None,
    })
}

/// A permutation group on `[n]` given by generators, with its orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryGroup {
    n: usize,
    generators: Vec<Vec<usize>>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

impl SymmetryGroup {
    /// Each generator maps coordinate `i` to `generator[i]`.
    pub fn new(n: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        for (g, perm) in generators.iter().enumerate() {
            if perm.len() != n {
                return Err(Error::InvalidPermutation(format!(
                    "generator {g} has degree {} but n = {n}",
                    perm.len()
                )));
            }
            let mut seen = vec![false; n];
            for &image in perm {
                if image >= n || std::mem::replace(&mut seen[image], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "generator {g} is not a bijection of [n]"
                    )));
                }
            }
        }
        // Orbits of the generated group are the components of i ~ g(i).
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for perm in &generators {
            for (i, &j) in perm.iter().enumerate() {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut index_of_root = vec![usize::MAX; n];
        let mut orbit_of = vec![0; n];
        for i in 0..n {
            let r = root(&mut parent, i);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = orbits.len();
                orbits.push(Vec::new());
            }
            orbit_of[i] = index_of_root[r];
            orbits[index_of_root[r]].push(i);
        }
        Ok(Self {
            n,
            generators,
            orbits,
            orbit_of,
        })
    }

    pub fn trivial(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("no generators")
    }

    /// Generated by the shift `i -> i + k (mod n)`.
    pub fn cyclic_power(n: usize, k: usize) -> Self {
        let perm = (0..n).map(|i| (i + k) % n.max(1)).collect();
        Self::new(n, vec![perm]).expect("shift is a bijection")
    }

    pub fn cyclic(n: usize) -> Self {
        Self::cyclic_power(n, 1)
    }

    /// Translations of a `width x height x layers` box grid in its first two
    /// axes (torus wrap), with index `x + width * (y + height * layer)`.
    pub fn planar_translations(width: usize, height: usize, layers: usize) -> Self {
        let n = width * height * layers;
        let idx = |x: usize, y: usize, l: usize| x + width * (y + height * l);
        let mut shift_x = vec![0; n];
        let mut shift_y = vec![0; n];
        for l in 0..layers {
            for y in 0..height {
                for x in 0..width {
                    shift_x[idx(x, y, l)] = idx((x + 1) % width, y, l);
                    shift_y[idx(x, y, l)] = idx(x, (y + 1) % height, l);
                }
            }
        }
        Self::new(n, vec![shift_x, shift_y]).expect("translations are bijections")
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    pub fn min_orbit_size(&self) -> usize {
        self.orbits.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Action on configurations: `y[g(i)] = x[i]`.
    pub fn act(perm: &[usize], x: &[i8], out: &mut [i8]) {
        for (i, &j) in perm.iter().enumerate() {
            out[j] = x[i];
        }
    }
}

/// Verifies `f` is invariant under every generator and returns the symmetry
/// order (the smallest orbit size).
pub fn symmetry_order(f: &BooleanFunction, group: &SymmetryGroup) -> Result<usize> {
    if group.degree() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            actual: group.degree(),
        });
    }
    let table = f.require_table()?;
    let alphabet = f.alphabet();
    let mut x = vec![0i8; f.arity()];
    let mut y = vec![0i8; f.arity()];
    for (g, perm) in group.generators().iter().enumerate() {
        for (r, &value) in table.iter().enumerate() {
            alphabet.decode_into(r, &mut x);
            SymmetryGroup::act(perm, &x, &mut y);
            if f.eval_values(&y) != value {
                return Err(Error::NotPreserved {
                    generator: g,
                    configuration: x.clone(),
                });
            }
        }
    }
    Ok(group.min_orbit_size())
}

/// Lazy stream of every increasing function on `alphabet^n`.
///
/// Points are ordered by decreasing height; a point may join the up-set only
/// if all its upper covers already have. Up-sets are produced in
/// lexicographic order of their membership vectors, starting from the empty
/// set (the constant 0).
pub struct MonotoneStream {
    alphabet: Alphabet,
    n: usize,
    order: Vec<usize>,
    covers: Vec<Vec<usize>>,
    member: Vec<bool>,
    include_constants: bool,
    started: bool,
    done: bool,
}

pub const MAX_MONOTONE_BINARY: usize = 4;
pub const MAX_MONOTONE_TERNARY: usize = 3;

pub fn enumerate_monotone(
    alphabet: Alphabet,
    n: usize,
    include_constants: bool,
) -> Result<MonotoneStream> {
    let limit = match alphabet {
        Alphabet::Binary => MAX_MONOTONE_BINARY,
        Alphabet::Ternary => MAX_MONOTONE_TERNARY,
    };
    if n > limit {
        return Err(Error::SizeLimit(format!(
            "monotone enumeration supports n <= {limit} on {alphabet:?}, got {n}"
        )));
    }
    let size = alphabet.enumerable_size(n)?;
    let radix = alphabet.radix();
    let height = |r: usize| {
        let mut h = 0;
        let mut rest = r;
        for _ in 0..n {
            h += rest % radix;
            rest /= radix;
        }
        h
    };
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&r| (std::cmp::Reverse(height(r)), r));
    let mut position = vec![0; size];
    for (i, &r) in order.iter().enumerate() {
        position[r] = i;
    }
    let covers = order
        .iter()
        .map(|&r| {
            let mut ups = Vec::new();
            let mut stride = 1;
            let mut rest = r;
            for _ in 0..n {
                if rest % radix + 1 < radix {
                    ups.push(position[r + stride]);
                }
                rest /= radix;
                stride *= radix;
            }
            ups
        })
        .collect();
    Ok(MonotoneStream {
        alphabet,
        n,
        order,
        covers,
        member: vec![false; size],
        include_constants,
        started: false,
        done: false,
    })
}

impl MonotoneStream {
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        for j in (0..self.member.len()).rev() {
            if !self.member[j] && self.covers[j].iter().all(|&c| self.member[c]) {
                self.member[j] = true;
                for slot in &mut self.member[j + 1..] {
                    *slot = false;
                }
                return true;
            }
        }
        false
    }

    fn current(&self) -> BooleanFunction {
        let mut table = vec![false; self.member.len()];
        for (i, &m) in self.member.iter().enumerate() {
            table[self.order[i]] = m;
        }
        let hex = BooleanFunction::from_table(self.alphabet, self.n, table.clone())
            .and_then(|f| f.to_hex())
            .unwrap_or_default();
        BooleanFunction::from_table(self.alphabet, self.n, table)
            .expect("table has the right size")
            .with_name(format!("monotone[{hex}]"))
    }
}

impl Iterator for MonotoneStream {
    type Item = BooleanFunction;

    fn next(&mut self) -> Option<BooleanFunction> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            let ones = self.member.iter().filter(|m| **m).count();
            let constant = ones == 0 || ones == self.member.len();
            if self.include_constants || !constant {
                return Some(self.current());
            }
        }
        None
    }
}
