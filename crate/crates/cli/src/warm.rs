//! Warm-start and solution files.
//!
//! ```text
//! m
//! nblocks
//! block sizes (negative = diagonal)
//! y_1 ... y_m
//! X
//! blk i j value
//! ...
//! Z
//! blk i j value
//! ...
//! ```
//!
//! The header echoes the problem shape. The `Z` section is optional; without it `z = c - A^* y`.

use std::fmt::Write as _;

use conerefine::jordan::{BlockVec, ConeShape};
use conerefine::operators::{ProblemData, SparseEntry};
use conerefine::refine::WarmStart;
use nalgebra::DVector;

use crate::error::{CliError, CliResult};
use crate::sdpa::{data_lines, element_entries, element_from_entries, parse_num, Lines};

type Entry = (usize, usize, usize, f64);

#[derive(Clone, Debug, PartialEq)]
pub struct WarmStartFile {
    pub m: usize,
    pub block_sizes: Vec<i64>,
    pub y: Vec<f64>,
    pub x: Vec<Entry>,
    pub z: Option<Vec<Entry>>,
}

#[derive(PartialEq)]
enum Section {
    None,
    X,
    Z,
}

impl WarmStartFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let lines = data_lines(text);
        let mut cur = Lines::new(&lines);
        let m: usize = cur.scalar("m")?;
        let nblocks: usize = cur.scalar("block count")?;
        let block_sizes: Vec<i64> = cur.numbers(nblocks, "block size")?;
        let y: Vec<f64> = cur.numbers(m, "y entry")?;
        let mut section = Section::None;
        let mut x = Vec::new();
        let mut z = None;
        while let Some((n, l)) = cur.peek() {
            cur.next("entry")?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks[0] {
                "X" | "x" if section == Section::None => section = Section::X,
                "Z" | "z" if section != Section::Z => {
                    section = Section::Z;
                    z = Some(Vec::new());
                }
                _ => {
                    if section == Section::None {
                        return Err(CliError::Parse { line: n, msg: "entry before the X section marker".into() });
                    }
                    if toks.len() < 4 {
                        return Err(CliError::Parse { line: n, msg: "entry needs blk i j value".into() });
                    }
                    let blk: usize = parse_num(toks[0], n, "block")?;
                    let i: usize = parse_num(toks[1], n, "row")?;
                    let j: usize = parse_num(toks[2], n, "column")?;
                    let v: f64 = parse_num(toks[3], n, "value")?;
                    let size = match block_sizes.get(blk.wrapping_sub(1)) {
                        Some(s) => s.unsigned_abs() as usize,
                        None => return Err(CliError::Parse { line: n, msg: format!("block {blk} outside 1..={nblocks}") }),
                    };
                    if i == 0 || j == 0 || i > size || j > size {
                        return Err(CliError::Parse { line: n, msg: format!("index ({i}, {j}) outside block of size {size}") });
                    }
                    let e = (blk, i.min(j), i.max(j), v);
                    match section {
                        Section::X => x.push(e),
                        _ => z.get_or_insert_with(Vec::new).push(e),
                    }
                }
            }
        }
        Ok(WarmStartFile { m, block_sizes, y, x, z })
    }

    pub fn from_solution(x: &BlockVec, y: &DVector<f64>, z: Option<&BlockVec>) -> Self {
        WarmStartFile {
            m: y.len(),
            block_sizes: x.shape().signed_sizes(),
            y: y.iter().copied().collect(),
            x: element_entries(x),
            z: z.map(element_entries),
        }
    }

    pub fn write(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.m);
        let _ = writeln!(s, "{}", self.block_sizes.len());
        let _ = writeln!(s, "{}", self.block_sizes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
        let _ = writeln!(s, "{}", self.y.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" "));
        let section = |s: &mut String, tag: &str, es: &[Entry]| {
            let _ = writeln!(s, "{tag}");
            for (b, i, j, v) in es {
                let _ = writeln!(s, "{b} {i} {j} {v:?}");
            }
        };
        section(&mut s, "X", &self.x);
        if let Some(z) = &self.z {
            section(&mut s, "Z", z);
        }
        s
    }

    /// Checks the shape echo and assembles `(x, y, z)`.
    pub fn to_warm(&self, p: &ProblemData) -> CliResult<WarmStart> {
        if self.m != p.m() || self.block_sizes != p.shape().signed_sizes() {
            return Err(CliError::DimensionMismatch(format!(
                "warm start header (m = {}, blocks {:?}) does not match the problem (m = {}, blocks {:?})",
                self.m,
                self.block_sizes,
                p.m(),
                p.shape().signed_sizes()
            )));
        }
        let shape = p.shape();
        let x = element(shape, &self.x)?;
        let y = DVector::from_vec(self.y.clone());
        let z = match &self.z {
            Some(z) => element(shape, z)?,
            None => p.slack(&y),
        };
        Ok(WarmStart { x, y, z })
    }
}

fn element(shape: &ConeShape, es: &[Entry]) -> CliResult<BlockVec> {
    let entries =
        es.iter().map(|&(b, i, j, v)| SparseEntry { block: b - 1, row: i - 1, col: j - 1, value: v }).collect();
    element_from_entries(shape, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdpa::parse_sdpa;

    const PROBLEM: &str = "1\n2\n2 -2\n1.0\n0 1 1 1 1.0\n0 2 1 1 2.0\n1 1 1 2 1.0\n1 2 2 2 1.0\n";

    #[test]
    fn parses_with_and_without_z() {
        let p = parse_sdpa(PROBLEM).unwrap();
        let w = WarmStartFile::parse("1\n2\n2 -2\n0.5\nX\n1 1 1 1.0\n1 2 1 0.25\n2 2 2 3.0\n").unwrap();
        assert_eq!(w.x[1], (1, 1, 2, 0.25));
        let ws = w.to_warm(&p).unwrap();
        assert_eq!(ws.z, p.slack(&ws.y));
        let w2 = WarmStartFile::parse("1\n2\n2 -2\n0.5\nX\n1 1 1 1.0\nZ\n2 1 1 4.0\n").unwrap();
        let ws2 = w2.to_warm(&p).unwrap();
        assert_eq!(ws2.z.trace(), 4.0);
    }

    #[test]
    fn round_trip() {
        let p = parse_sdpa(PROBLEM).unwrap();
        let w = WarmStartFile::parse("1\n2\n2 -2\n0.5\nX\n1 1 1 1.0\n1 1 2 0.25\n2 2 2 3.0\nZ\n2 1 1 4.0\n").unwrap();
        let again = WarmStartFile::parse(&w.write()).unwrap();
        assert_eq!(w, again);
        let ws = w.to_warm(&p).unwrap();
        let out = WarmStartFile::from_solution(&ws.x, &ws.y, Some(&ws.z));
        assert_eq!(out.to_warm(&p).unwrap(), ws);
    }

    #[test]
    fn shape_echo_must_match() {
        let p = parse_sdpa(PROBLEM).unwrap();
        let w = WarmStartFile::parse("1\n1\n2\n0.5\nX\n").unwrap();
        assert!(matches!(w.to_warm(&p), Err(CliError::DimensionMismatch(_))));
    }

    #[test]
    fn entries_need_a_section() {
        assert!(matches!(WarmStartFile::parse("1\n1\n2\n0.5\n1 1 1 1.0\n"), Err(CliError::Parse { line: 5, .. })));
    }
}
