//! Character tables: data model, the line-oriented CTB format, and a linter
//! for the orthogonality relations and power-map consistency.
//!
//! ```text
//! group <name>
//! order <integer>
//! soluble <true|false>
//! classes <name> <name> ...
//! orders <int> <int> ...
//! centralizers <int> <int> ...
//! powermap <p>: <classname> <classname> ...
//! char <value> <value> ...
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::cyclotomic::{prime_factors, CycloError, CycloNum};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: row has {found} entries but there are {expected} classes")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate class name {name}")]
    DuplicateClass { line: usize, name: String },
    #[error("line {line}: bad character value: {source}")]
    Value { line: usize, source: CycloError },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub name: String,
    pub element_order: u64,
    pub centralizer_order: u64,
    /// Image class of `g ↦ g^p`, keyed by prime `p`.
    pub power_maps: BTreeMap<u64, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    pub group_name: String,
    pub group_order: u64,
    pub soluble: bool,
    pub classes: Vec<ClassInfo>,
    pub irreducibles: Vec<Vec<CycloNum>>,
}

impl CharacterTable {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_size(&self, class: usize) -> u64 {
        self.group_order / self.classes[class].centralizer_order
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn class_name(&self, class: usize) -> &str {
        &self.classes[class].name
    }

    pub fn degree(&self, chi: usize) -> &CycloNum {
        &self.irreducibles[chi][0]
    }

    pub fn primes_with_power_maps(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .classes
            .iter()
            .flat_map(|c| c.power_maps.keys().copied())
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Class of `g^k` for `g` in `class`. Uses the stored prime power maps,
    /// falling back to the Galois action on columns for primes coprime to the
    /// element order. `None` if a needed map is absent.
    pub fn power_class(&self, class: usize, k: i64) -> Option<usize> {
        let ord = self.classes[class].element_order as i64;
        match k.rem_euclid(ord) as u64 {
            0 => Some(0),
            k => self.power_by(class, k),
        }
    }

    fn power_by(&self, class: usize, mut k: u64) -> Option<usize> {
        let mut cur = class;
        for p in prime_factors(k) {
            while k.is_multiple_of(p) {
                let o = self.classes[cur].element_order;
                cur = if let Some(&img) = self.classes[cur].power_maps.get(&p) {
                    img
                } else if o.is_multiple_of(p) {
                    return None;
                } else if p % o == 1 {
                    cur
                } else {
                    self.galois_image_class(cur, p)?
                };
                k /= p;
            }
        }
        Some(cur)
    }

    /// For `k` coprime to the element order, `g^k` lies in the class whose
    /// column is the image of `g`'s column under `E(n) -> E(n)^k`.
    fn galois_image_class(&self, class: usize, k: u64) -> Option<usize> {
        let image: Vec<CycloNum> = self
            .irreducibles
            .iter()
            .map(|row| row[class].galois(k as i64))
            .collect();
        let o = self.classes[class].element_order;
        (0..self.num_classes()).find(|&j| {
            self.classes[j].element_order == o
                && self
                    .irreducibles
                    .iter()
                    .zip(&image)
                    .all(|(row, v)| &row[j] == v)
        })
    }

    /// The class containing the inverses of the elements of `class`.
    pub fn inverse_class(&self, class: usize) -> Option<usize> {
        self.power_class(class, -1)
    }

    pub fn parse(source: &str) -> Result<CharacterTable, TableError> {
        parse_table(source)
    }

    /// Serializes back to CTB text; `parse(serialize(t)) == t`.
    pub fn to_ctb(&self) -> String {
        let mut s = String::new();
        let names: Vec<&str> = self.classes.iter().map(|c| c.name.as_str()).collect();
        let _ = writeln!(s, "group {}", self.group_name);
        let _ = writeln!(s, "order {}", self.group_order);
        let _ = writeln!(s, "soluble {}", self.soluble);
        let _ = writeln!(s, "classes {}", names.join(" "));
        let join = |v: Vec<String>| v.join(" ");
        let _ = writeln!(
            s,
            "orders {}",
            join(
                self.classes
                    .iter()
                    .map(|c| c.element_order.to_string())
                    .collect()
            )
        );
        let _ = writeln!(
            s,
            "centralizers {}",
            join(
                self.classes
                    .iter()
                    .map(|c| c.centralizer_order.to_string())
                    .collect()
            )
        );
        for p in self.primes_with_power_maps() {
            let row: Vec<String> = self
                .classes
                .iter()
                .map(|c| {
                    c.power_maps
                        .get(&p)
                        .map(|&i| names[i].to_string())
                        .unwrap_or_else(|| "?".into())
                })
                .collect();
            let _ = writeln!(s, "powermap {p}: {}", row.join(" "));
        }
        for chi in &self.irreducibles {
            let row: Vec<String> = chi.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "char {}", row.join(" "));
        }
        s
    }
}

pub fn class_size(t: &CharacterTable, class: usize) -> u64 {
    t.class_size(class)
}

fn parse_u64(tok: &str, line: usize, what: &str) -> Result<u64, TableError> {
    tok.parse::<u64>().map_err(|_| TableError::Syntax {
        line,
        msg: format!("bad {what} `{tok}`"),
    })
}

/// Parses CTB text. Structural checks only; orthogonality is left to
/// [`lint_table`] so that deliberately broken fixtures still load.
pub fn parse_table(source: &str) -> Result<CharacterTable, TableError> {
    let mut name = None;
    let mut order = None;
    let mut soluble = None;
    let mut classes: Option<(usize, Vec<String>)> = None;
    let mut orders: Option<(usize, Vec<u64>)> = None;
    let mut cents: Option<(usize, Vec<u64>)> = None;
    let mut pmaps: Vec<(usize, u64, Vec<String>)> = Vec::new();
    let mut chars: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (key, rest) = match text.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (text, ""),
        };
        let toks = || {
            rest.split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>()
        };
        match key {
            "group" => {
                if rest.is_empty() {
                    return Err(TableError::Syntax {
                        line,
                        msg: "empty group name".into(),
                    });
                }
                name = Some(rest.to_string());
            }
            "order" => order = Some(parse_u64(rest, line, "group order")?),
            "soluble" => {
                soluble = Some(match rest {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(TableError::Syntax {
                            line,
                            msg: format!("soluble must be true or false, got `{other}`"),
                        })
                    }
                })
            }
            "classes" => {
                let names = toks();
                let mut seen = HashSet::new();
                for n in &names {
                    if !seen.insert(n.clone()) {
                        return Err(TableError::DuplicateClass {
                            line,
                            name: n.clone(),
                        });
                    }
                }
                classes = Some((line, names));
            }
            "orders" => {
                let v = toks()
                    .iter()
                    .map(|t| parse_u64(t, line, "element order"))
                    .collect::<Result<_, _>>()?;
                orders = Some((line, v));
            }
            "centralizers" => {
                let v = toks()
                    .iter()
                    .map(|t| parse_u64(t, line, "centralizer order"))
                    .collect::<Result<_, _>>()?;
                cents = Some((line, v));
            }
            "powermap" => {
                let Some((p, imgs)) = rest.split_once(':') else {
                    return Err(TableError::Syntax {
                        line,
                        msg: "expected `powermap <p>: ...`".into(),
                    });
                };
                let p = parse_u64(p.trim(), line, "prime")?;
                if p < 2 || prime_factors(p) != vec![p] {
                    return Err(TableError::Syntax {
                        line,
                        msg: format!("power map exponent {p} is not prime"),
                    });
                }
                pmaps.push((
                    line,
                    p,
                    imgs.split_whitespace().map(str::to_string).collect(),
                ));
            }
            "char" => chars.push((line, toks())),
            other => {
                return Err(TableError::Syntax {
                    line,
                    msg: format!("unknown keyword `{other}`"),
                })
            }
        }
    }

    let group_name = name.ok_or(TableError::Missing("group"))?;
    let group_order = order.ok_or(TableError::Missing("order"))?;
    let soluble = soluble.ok_or(TableError::Missing("soluble"))?;
    let (cline, names) = classes.ok_or(TableError::Missing("classes"))?;
    let (oline, orders) = orders.ok_or(TableError::Missing("orders"))?;
    let (zline, cents) = cents.ok_or(TableError::Missing("centralizers"))?;
    let k = names.len();
    if k == 0 {
        return Err(TableError::Syntax {
            line: cline,
            msg: "no classes".into(),
        });
    }
    for (line, len) in [(oline, orders.len()), (zline, cents.len())] {
        if len != k {
            return Err(TableError::DimensionMismatch {
                line,
                expected: k,
                found: len,
            });
        }
    }
    if group_order == 0 {
        return Err(TableError::Invalid("group order must be positive".into()));
    }
    if orders[0] != 1 || cents[0] != group_order {
        return Err(TableError::Invalid(
            "the identity class must come first".into(),
        ));
    }
    for i in 0..k {
        if orders[i] == 0 || group_order % orders[i] != 0 {
            return Err(TableError::Invalid(format!(
                "element order {} of class {} does not divide |G| = {group_order}",
                orders[i], names[i]
            )));
        }
        if cents[i] == 0 || group_order % cents[i] != 0 {
            return Err(TableError::Invalid(format!(
                "centralizer order {} of class {} does not divide |G| = {group_order}",
                cents[i], names[i]
            )));
        }
    }

    let mut infos: Vec<ClassInfo> = (0..k)
        .map(|i| ClassInfo {
            name: names[i].clone(),
            element_order: orders[i],
            centralizer_order: cents[i],
            power_maps: BTreeMap::new(),
        })
        .collect();
    for (line, p, imgs) in pmaps {
        if imgs.len() != k {
            return Err(TableError::DimensionMismatch {
                line,
                expected: k,
                found: imgs.len(),
            });
        }
        for (i, img) in imgs.iter().enumerate() {
            if img == "?" {
                continue;
            }
            let j = names
                .iter()
                .position(|n| n == img)
                .ok_or_else(|| TableError::Syntax {
                    line,
                    msg: format!("unknown class `{img}` in power map"),
                })?;
            infos[i].power_maps.insert(p, j);
        }
    }

    let mut irreducibles = Vec::with_capacity(chars.len());
    for (line, vals) in chars {
        if vals.len() != k {
            return Err(TableError::DimensionMismatch {
                line,
                expected: k,
                found: vals.len(),
            });
        }
        let row = vals
            .iter()
            .map(|v| CycloNum::parse_any(v).map_err(|source| TableError::Value { line, source }))
            .collect::<Result<Vec<_>, _>>()?;
        irreducibles.push(row);
    }

    Ok(CharacterTable {
        group_name,
        group_order,
        soluble,
        classes: infos,
        irreducibles,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    NotSquare,
    BadDegree,
    DegreeSum,
    ClassSizeSum,
    RowOrthogonality,
    ColumnOrthogonality,
    PowerMapOrder,
    PowerMapGalois,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

fn big(v: u64) -> CycloNum {
    CycloNum::rational(BigRational::from_integer(BigInt::from(v)))
}

/// Checks every table invariant. An empty result means the table is
/// consistent; the linter never fails, it only reports.
pub fn lint_table(t: &CharacterTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let k = t.num_classes();
    let mut push = |kind, message: String| out.push(Diagnostic { kind, message });

    if t.irreducibles.len() != k {
        push(
            DiagnosticKind::NotSquare,
            format!("{} irreducibles for {k} classes", t.irreducibles.len()),
        );
    }

    let size_sum: u64 = (0..k).map(|j| t.class_size(j)).sum();
    if size_sum != t.group_order {
        push(
            DiagnosticKind::ClassSizeSum,
            format!("class sizes sum to {size_sum}, expected {}", t.group_order),
        );
    }

    let mut deg_sq = BigInt::zero();
    for (i, chi) in t.irreducibles.iter().enumerate() {
        match chi[0].to_integer() {
            Some(d) if d.is_positive() => deg_sq += &d * &d,
            _ => push(
                DiagnosticKind::BadDegree,
                format!(
                    "character {} has degree {}, not a positive integer",
                    i + 1,
                    chi[0]
                ),
            ),
        }
    }
    if deg_sq != BigInt::from(t.group_order) {
        push(
            DiagnosticKind::DegreeSum,
            format!(
                "sum of squared degrees is {deg_sq}, expected {}",
                t.group_order
            ),
        );
    }

    let conj: Vec<Vec<CycloNum>> = t
        .irreducibles
        .iter()
        .map(|r| r.iter().map(CycloNum::conjugate).collect())
        .collect();
    let sizes: Vec<CycloNum> = (0..k).map(|j| big(t.class_size(j))).collect();

    for i in 0..t.irreducibles.len() {
        for l in i..t.irreducibles.len() {
            let mut acc = CycloNum::zero();
            for j in 0..k {
                let term = &(&sizes[j] * &t.irreducibles[i][j]) * &conj[l][j];
                acc = &acc + &term;
            }
            let want = if i == l {
                big(t.group_order)
            } else {
                CycloNum::zero()
            };
            if acc != want {
                push(
                    DiagnosticKind::RowOrthogonality,
                    format!(
                        "<chi_{}, chi_{}> * |G| = {acc}, expected {want}",
                        i + 1,
                        l + 1
                    ),
                );
            }
        }
    }

    for j in 0..k {
        for jj in j..k {
            let mut acc = CycloNum::zero();
            for (row, crow) in t.irreducibles.iter().zip(&conj) {
                acc = &acc + &(&row[j] * &crow[jj]);
            }
            let want = if j == jj {
                big(t.classes[j].centralizer_order)
            } else {
                CycloNum::zero()
            };
            if acc != want {
                let msg = if j == jj {
                    format!(
                        "class {}: sum of |chi(g)|^2 is {acc}, centralizer order is {want}",
                        t.classes[j].name
                    )
                } else {
                    format!(
                        "classes {} and {}: column inner product {acc}, expected 0",
                        t.classes[j].name, t.classes[jj].name
                    )
                };
                push(DiagnosticKind::ColumnOrthogonality, msg);
            }
        }
    }

    for (j, c) in t.classes.iter().enumerate() {
        for (&p, &img) in &c.power_maps {
            if img >= k {
                push(
                    DiagnosticKind::PowerMapOrder,
                    format!("{}^{p} points outside the table", c.name),
                );
                continue;
            }
            let o = c.element_order;
            let want = o / o.gcd(&p);
            if t.classes[img].element_order != want {
                push(
                    DiagnosticKind::PowerMapOrder,
                    format!(
                        "{}^{p} = {} has order {}, expected {want}",
                        c.name, t.classes[img].name, t.classes[img].element_order
                    ),
                );
                continue;
            }
            if o % p != 0 {
                // Powering by p coprime to o(g) acts on values as ζ ↦ ζ^p.
                for (i, row) in t.irreducibles.iter().enumerate() {
                    if row[img] != row[j].galois(p as i64) {
                        push(
                            DiagnosticKind::PowerMapGalois,
                            format!(
                                "chi_{}({}) is not the Galois image of chi_{}({}) under {p}",
                                i + 1,
                                t.classes[img].name,
                                i + 1,
                                c.name
                            ),
                        );
                    }
                }
            }
        }
    }
    out
}

/// True when `v` is a nonnegative integer; the usual guard for values that
/// must count something.
pub(crate) fn nonneg_integer(v: &CycloNum) -> Option<BigInt> {
    let q = v.to_rational().ok()?;
    (q.is_integer() && !q.is_negative()).then(|| q.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    const S3: &str = "\
# symmetric group on three letters
group S3
order 6
soluble true
classes 1A 2A 3A
orders 1 2 3
centralizers 6 2 3
powermap 2: 1A 1A 3A
powermap 3: 1A 2A 1A
char 1 1 1
char 1 -1 1
char 2 0 -1
";

    #[test]
    fn parses_and_lints_s3() {
        let t = parse_table(S3).unwrap();
        assert_eq!(t.num_classes(), 3);
        assert_eq!(t.class_size(1), 3);
        assert_eq!(t.class_size(0), 1);
        assert!(lint_table(&t).is_empty(), "{:?}", lint_table(&t));
        assert_eq!(t.inverse_class(2), Some(2));
        assert_eq!(t.power_class(2, 2), Some(2));
        assert_eq!(t.power_class(2, 3), Some(0));
    }

    #[test]
    fn trivial_group() {
        let t = parse_table(
            "group 1\norder 1\nsoluble true\nclasses 1A\norders 1\ncentralizers 1\nchar 1\n",
        )
        .unwrap();
        assert!(lint_table(&t).is_empty());
    }

    #[test]
    fn short_character_row_is_a_dimension_error() {
        let src = "group V4\norder 4\nsoluble true\nclasses 1A 2A 2B 2C\norders 1 2 2 2\n\
                   centralizers 4 4 4 4\nchar 1 1 1 1\nchar 1 1 -1\n";
        match parse_table(src) {
            Err(TableError::DimensionMismatch {
                line,
                expected,
                found,
            }) => assert_eq!((line, expected, found), (8, 4, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_class_and_syntax_errors() {
        let dup = S3.replace("classes 1A 2A 3A", "classes 1A 2A 2A");
        assert!(matches!(
            parse_table(&dup),
            Err(TableError::DuplicateClass { line: 5, .. })
        ));
        let bad = S3.replace("order 6", "order six");
        assert!(matches!(
            parse_table(&bad),
            Err(TableError::Syntax { line: 3, .. })
        ));
        let bad_val = S3.replace("char 2 0 -1", "char 2 0 -1+");
        assert!(matches!(
            parse_table(&bad_val),
            Err(TableError::Value { line: 12, .. })
        ));
        let missing = S3.replace("soluble true\n", "");
        assert!(matches!(
            parse_table(&missing),
            Err(TableError::Missing("soluble"))
        ));
    }

    #[test]
    fn perturbed_value_names_the_class() {
        let bad = S3.replace("char 2 0 -1", "char 2 1 -1");
        let t = parse_table(&bad).unwrap();
        let diags = lint_table(&t);
        assert!(diags
            .iter()
            .any(|d| d.kind == DiagnosticKind::ColumnOrthogonality && d.message.contains("2A")));
    }

    #[test]
    fn round_trip() {
        let t = parse_table(S3).unwrap();
        let again = parse_table(&t.to_ctb()).unwrap();
        assert_eq!(t, again);
        assert_eq!(again.to_ctb(), t.to_ctb());
    }

    #[test]
    fn bad_power_map_is_reported() {
        let bad = S3.replace("powermap 2: 1A 1A 3A", "powermap 2: 1A 1A 2A");
        let t = parse_table(&bad).unwrap();
        assert!(lint_table(&t)
            .iter()
            .any(|d| d.kind == DiagnosticKind::PowerMapOrder));
    }
}
