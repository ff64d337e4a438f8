//! Plain-text certificate files.
//!
//! ```text
//! kissbound-certificate v1
//! p 2.1
//! n 6
//! m 4
//! levels 4
//! guarantee 12
//! min_dist_p_pow 4.0000001
//! shell 1 level 4 points 12
//! 0 1 2 3 ++-+
//! ...
//! end
//! ```
//!
//! Support coordinates are 0-based; the sign string has one `+` or `-` per
//! support coordinate, in support order. Reals use Rust's shortest
//! round-trip formatting so a file reproduces its values exactly.

use std::fmt::Write as _;

use crate::constructor::{CodeCertificate, ShellPoint};
use crate::error::{KissError, Result};
use crate::pnorm::PNorm;
use crate::shellsys::{BigCount, ShellSystem};

pub const HEADER: &str = "kissbound-certificate v1";

pub fn to_text(cert: &CodeCertificate) -> String {
    let sys = &cert.sys;
    let mut out = String::new();
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "p {}", sys.p()).unwrap();
    writeln!(out, "n {}", sys.n()).unwrap();
    writeln!(out, "m {}", sys.m()).unwrap();
    writeln!(out, "levels {}", join(sys.levels())).unwrap();
    writeln!(out, "guarantee {}", cert.guarantee).unwrap();
    writeln!(out, "min_dist_p_pow {:?}", cert.min_dist_p_pow).unwrap();
    for (idx, (&level, &count)) in sys.levels().iter().zip(&cert.sizes_per_shell).enumerate() {
        let shell = idx + 1;
        writeln!(out, "shell {shell} level {level} points {count}").unwrap();
        for point in cert.points.iter().filter(|p| p.shell == shell) {
            let support: Vec<String> = point.support.iter().map(u32::to_string).collect();
            let signs: String = (0..point.support.len())
                .map(|k| if point.is_negative(k) { '-' } else { '+' })
                .collect();
            writeln!(out, "{} {signs}", support.join(" ")).unwrap();
        }
    }
    writeln!(out, "end").unwrap();
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end())
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, reason: impl Into<String>) -> KissError {
        KissError::Format {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key} <value>`")))
    }

    fn parse<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.trim()
            .parse()
            .map_err(|_| self.err(format!("invalid {what} `{s}`")))
    }
}

pub fn parse(text: &str) -> Result<CodeCertificate> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != HEADER {
        return Err(lines.err(format!("expected header `{HEADER}`")));
    }
    let p: f64 = {
        let s = lines.field("p")?;
        lines.parse(s, "p")?
    };
    let n: u64 = {
        let s = lines.field("n")?;
        lines.parse(s, "n")?
    };
    let m: u64 = {
        let s = lines.field("m")?;
        lines.parse(s, "m")?
    };
    let levels: Vec<u64> = {
        let s = lines.field("levels")?;
        s.split_whitespace()
            .map(|t| lines.parse(t, "level"))
            .collect::<Result<_>>()?
    };
    let pnorm = PNorm::new(p).map_err(|e| lines.err(e.to_string()))?;
    let sys = ShellSystem::build(pnorm, n, m).map_err(|e| lines.err(e.to_string()))?;
    if sys.levels() != levels.as_slice() {
        return Err(lines.err(format!(
            "levels {levels:?} do not match the recursion {:?}",
            sys.levels()
        )));
    }
    let guarantee: BigCount = {
        let s = lines.field("guarantee")?;
        lines.parse(s, "guarantee")?
    };
    let min_dist_p_pow: f64 = {
        let s = lines.field("min_dist_p_pow")?;
        lines.parse(s, "min_dist_p_pow")?
    };

    let mut points = Vec::new();
    let mut sizes_per_shell = Vec::new();
    for (idx, &level) in levels.iter().enumerate() {
        let line = lines.next()?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let expected_shell = (idx + 1).to_string();
        let expected_level = level.to_string();
        let ok = words.len() == 6
            && words[0] == "shell"
            && words[1] == expected_shell
            && words[2] == "level"
            && words[3] == expected_level
            && words[4] == "points";
        if !ok {
            return Err(lines.err(format!(
                "expected `shell {} level {level} points <count>`",
                idx + 1
            )));
        }
        let count: usize = lines.parse(words[5], "point count")?;
        for _ in 0..count {
            let line = lines.next()?;
            let mut words: Vec<&str> = line.split_whitespace().collect();
            let signs_word = words.pop().ok_or_else(|| lines.err("empty point record"))?;
            let support: Vec<u32> = words
                .iter()
                .map(|w| lines.parse(w, "coordinate"))
                .collect::<Result<_>>()?;
            if signs_word.len() != support.len() || support.len() > 64 {
                return Err(lines.err("sign string length must equal the support size"));
            }
            let mut signs = 0u64;
            for (k, c) in signs_word.chars().enumerate() {
                match c {
                    '+' => {}
                    '-' => signs |= 1 << k,
                    other => return Err(lines.err(format!("invalid sign `{other}`"))),
                }
            }
            points.push(ShellPoint {
                shell: idx + 1,
                support,
                signs,
            });
        }
        sizes_per_shell.push(count);
    }
    if lines.next()? != "end" {
        return Err(lines.err("expected `end`"));
    }
    Ok(CodeCertificate {
        sys,
        points,
        sizes_per_shell,
        min_dist_p_pow,
        guarantee,
    })
}
