//! Line-oriented text format for keys, vectors and codes.
//!
//! ```text
//! grs-squarebreak v1
//! field p=2 m=4 poly=19
//! n=15 k=6
//! @Gpub 6 15
//! 1 0 0 ...
//! ```
//!
//! Each section is `@<name> <rows> <cols>` followed by `rows` lines of
//! `cols` integer-encoded field elements.

use std::fmt::Write as _;

use crate::attack::{AttackStats, RecoveredKey};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::grs::GrsParams;
use crate::linalg::Matrix;
use crate::scheme::{PublicKey, SecretKey};

pub const HEADER: &str = "grs-squarebreak v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyFile {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub sections: Vec<Section>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn key_value<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected {key}=<value>, found {tok:?}")))
}

fn number<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| parse_err(line, format!("bad integer {s:?}")))
}

impl KeyFile {
    pub fn new(field: &Field, n: usize, k: usize) -> KeyFile {
        KeyFile {
            field: field.clone(),
            n,
            k,
            sections: Vec::new(),
        }
    }

    pub fn push_matrix(&mut self, name: &str, m: &Matrix) {
        self.sections.push(Section {
            name: name.to_string(),
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|e| e.0).collect(),
        });
    }

    pub fn push_vec(&mut self, name: &str, v: &[Fe]) {
        self.push_ints(name, &v.iter().map(|e| e.0).collect::<Vec<_>>());
    }

    pub fn push_ints(&mut self, name: &str, v: &[u32]) {
        self.sections.push(Section {
            name: name.to_string(),
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        });
    }

    pub fn section(&self, name: &str) -> Result<&Section> {
        self.sections
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| parse_err(0, format!("missing section @{name}")))
    }

    pub fn has(&self, name: &str) -> bool {
        self.sections.iter().any(|s| s.name == name)
    }

    pub fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let s = self.section(name)?;
        if (s.rows, s.cols) != (rows, cols) {
            return Err(parse_err(
                0,
                format!("@{name} must be {rows}x{cols}, found {}x{}", s.rows, s.cols),
            ));
        }
        Matrix::new(
            &self.field,
            rows,
            cols,
            s.data.iter().map(|&v| Fe(v)).collect(),
        )
    }

    pub fn vector(&self, name: &str, len: usize) -> Result<Vec<Fe>> {
        Ok(self.matrix(name, 1, len)?.data().to_vec())
    }

    pub fn parse(text: &str) -> Result<KeyFile> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")))
        };

        let (ln, head) = next("header")?;
        if head != HEADER {
            return Err(parse_err(ln, format!("expected {HEADER:?}")));
        }
        let (ln, fl) = next("field line")?;
        let toks: Vec<&str> = fl.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "field" {
            return Err(parse_err(ln, "expected `field p=<p> m=<m> poly=<poly>`"));
        }
        let p = number(key_value(toks[1], "p", ln)?, ln)?;
        let m = number(key_value(toks[2], "m", ln)?, ln)?;
        let poly = number(key_value(toks[3], "poly", ln)?, ln)?;
        let field = Field::new(p, m, poly).map_err(|e| parse_err(ln, e.to_string()))?;
        let (ln, dims) = next("dimension line")?;
        let toks: Vec<&str> = dims.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "expected `n=<n> k=<k>`"));
        }
        let n = number(key_value(toks[0], "n", ln)?, ln)?;
        let k = number(key_value(toks[1], "k", ln)?, ln)?;

        let mut file = KeyFile::new(&field, n, k);
        while let Ok((ln, sh)) = next("section") {
            let toks: Vec<&str> = sh.split_whitespace().collect();
            let name = toks
                .first()
                .and_then(|t| t.strip_prefix('@'))
                .filter(|n| !n.is_empty() && toks.len() == 3)
                .ok_or_else(|| parse_err(ln, "expected `@<name> <rows> <cols>`"))?;
            if file.has(name) {
                return Err(parse_err(ln, format!("duplicate section @{name}")));
            }
            let rows: usize = number(toks[1], ln)?;
            let cols: usize = number(toks[2], ln)?;
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (ln, row) = next(&format!("row of @{name}"))?;
                let vals: Vec<u32> = row
                    .split_whitespace()
                    .map(|t| number(t, ln))
                    .collect::<Result<_>>()?;
                if vals.len() != cols {
                    return Err(parse_err(
                        ln,
                        format!("row of @{name} has {} entries, expected {cols}", vals.len()),
                    ));
                }
                if let Some(v) = vals.iter().find(|&&v| v >= field.q()) {
                    return Err(parse_err(
                        ln,
                        format!("{v} is not an element of GF({})", field.q()),
                    ));
                }
                data.extend(vals);
            }
            file.sections.push(Section {
                name: name.to_string(),
                rows,
                cols,
                data,
            });
        }
        Ok(file)
    }
}

impl std::fmt::Display for KeyFile {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let f = &self.field;
        writeln!(out, "{HEADER}")?;
        writeln!(out, "field p={} m={} poly={}", f.p(), f.m(), f.modulus())?;
        writeln!(out, "n={} k={}", self.n, self.k)?;
        for s in &self.sections {
            writeln!(out, "@{} {} {}", s.name, s.rows, s.cols)?;
            for r in 0..s.rows {
                let mut line = String::new();
                for (j, v) in s.data[r * s.cols..(r + 1) * s.cols].iter().enumerate() {
                    if j > 0 {
                        line.push(' ');
                    }
                    write!(line, "{v}")?;
                }
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }
}

pub fn write_public(pk: &PublicKey) -> String {
    let mut file = KeyFile::new(pk.field(), pk.n(), pk.k());
    file.push_matrix("Gpub", pk.g_pub());
    file.to_string()
}

pub fn read_public(text: &str) -> Result<PublicKey> {
    let file = KeyFile::parse(text)?;
    PublicKey::new(file.matrix("Gpub", file.k, file.n)?)
}

pub fn write_secret(sk: &SecretKey, pk: &PublicKey) -> String {
    let mut file = KeyFile::new(sk.field(), sk.n(), sk.k());
    file.push_matrix("Gpub", pk.g_pub());
    file.push_vec("x", sk.grs().x());
    file.push_vec("y", sk.grs().y());
    file.push_matrix("S", sk.s());
    file.push_ints(
        "perm",
        &sk.perm().iter().map(|&i| i as u32).collect::<Vec<_>>(),
    );
    file.push_vec("alpha", sk.alpha());
    file.push_vec("beta", sk.beta());
    file.to_string()
}

pub fn read_secret(text: &str) -> Result<(SecretKey, PublicKey)> {
    let file = KeyFile::parse(text)?;
    let (n, k) = (file.n, file.k);
    let pk = PublicKey::new(file.matrix("Gpub", k, n)?)?;
    let grs = GrsParams::new(&file.field, file.vector("x", n)?, file.vector("y", n)?, k)?;
    let perm_sec = file.section("perm")?;
    if (perm_sec.rows, perm_sec.cols) != (1, n) {
        return Err(parse_err(0, format!("@perm must be 1x{n}")));
    }
    let perm = perm_sec.data.iter().map(|&v| v as usize).collect();
    let sk = SecretKey::new(
        grs,
        file.matrix("S", k, k)?,
        perm,
        file.vector("alpha", n)?,
        file.vector("beta", n)?,
    )?;
    Ok((sk, pk))
}

/// A single vector; `n` is the ambient length and `k` the message length.
pub fn write_vec(field: &Field, n: usize, k: usize, v: &[Fe]) -> String {
    let mut file = KeyFile::new(field, n, k);
    file.push_vec("vec", v);
    file.to_string()
}

pub fn read_vec(text: &str, field: &Field, len: usize) -> Result<Vec<Fe>> {
    let file = KeyFile::parse(text)?;
    if file.field != *field {
        return Err(parse_err(2, "field does not match the key"));
    }
    file.vector("vec", len)
}

pub fn write_code(code: &LinearCode) -> String {
    let mut file = KeyFile::new(code.field(), code.n(), code.k());
    file.push_matrix("G", code.generator());
    file.to_string()
}

/// Reads `@G`, or `@Gpub` so that public keys double as code files.
pub fn read_code(text: &str) -> Result<LinearCode> {
    let file = KeyFile::parse(text)?;
    let name = if file.has("G") { "G" } else { "Gpub" };
    let s = file.section(name)?;
    if s.cols != file.n {
        return Err(parse_err(
            0,
            format!("@{name} must have {} columns", file.n),
        ));
    }
    LinearCode::from_generator(&file.matrix(name, s.rows, s.cols)?)
}

pub fn write_recovered(rk: &RecoveredKey) -> String {
    let g = &rk.grs;
    let mut file = KeyFile::new(g.field(), g.n(), g.k());
    file.push_vec("x", g.x());
    file.push_vec("y", g.y());
    file.push_vec("a0", &rk.a0);
    file.push_vec("lambda0", &rk.lambda0);
    file.to_string()
}

/// Reads a recovered key; `C_λ⊥` is rebuilt as `C ∩ ⟨λ0⟩⊥`, falling back to
/// a `k - 1` row subcode when `λ0 = 0`.
pub fn read_recovered(text: &str) -> Result<RecoveredKey> {
    let file = KeyFile::parse(text)?;
    let (n, k) = (file.n, file.k);
    let grs = GrsParams::new(&file.field, file.vector("x", n)?, file.vector("y", n)?, k)?;
    let a0 = file.vector("a0", n)?;
    let lambda0 = file.vector("lambda0", n)?;
    let c = grs.code();
    let c_lambda_perp = if lambda0.iter().all(|e| e.is_zero()) || k == 1 {
        let head: Vec<&[Fe]> = c.generator().row_vecs().take(k.max(2) - 1).collect();
        LinearCode::from_rows(&file.field, n, &head)?
    } else {
        let perp = LinearCode::from_rows(&file.field, n, &[&lambda0])?.dual()?;
        c.intersect(&perp)?.unwrap_or_else(|| c.clone())
    };
    Ok(RecoveredKey {
        grs,
        a0,
        lambda0,
        c_lambda_perp,
        stats: AttackStats::default(),
    })
}
