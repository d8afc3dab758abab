//! SDPA sparse (`.dat-s`) problem files.
//!
//! Role mapping: `A_i = F_i`, `b` = the SDPA cost vector, `c = F_0`, and the problem read is
//! `min <c, x> s.t. <A_i, x> = b_i, x in K` with dual `max b^T y s.t. c - sum y_i A_i in K`.
//! Header lines may carry trailing comments and the punctuation `{ } ( ) ,`; lines starting
//! with `"` or `*` are skipped.

use std::fmt::Write as _;

use conerefine::jordan::{BlockData, BlockVec, ConeShape};
use conerefine::operators::{sparse_entries, LinearMap, ProblemData, SparseEntry};
use nalgebra::DVector;

use crate::error::{CliError, CliResult};

/// One data entry; `matno = 0` is the objective, indices are 1-based as in the file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpaEntry {
    pub matno: usize,
    pub blkno: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpaFile {
    pub m: usize,
    /// Negative sizes are diagonal blocks.
    pub block_sizes: Vec<i64>,
    pub c_vector: Vec<f64>,
    pub entries: Vec<SdpaEntry>,
}

/// Non-comment lines with their 1-based line numbers, punctuation blanked.
pub(crate) fn data_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(k, l)| {
            let t = l.trim();
            if t.is_empty() || t.starts_with('"') || t.starts_with('*') {
                return None;
            }
            let cleaned: String =
                t.chars().map(|ch| if matches!(ch, '{' | '}' | '(' | ')' | ',') { ' ' } else { ch }).collect();
            Some((k + 1, cleaned))
        })
        .collect()
}

pub(crate) fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> CliResult<T> {
    tok.parse().map_err(|_| CliError::Parse { line, msg: format!("expected {what}, found `{tok}`") })
}

/// Cursor over data lines for the header fields.
pub(crate) struct Lines<'a> {
    lines: &'a [(usize, String)],
    pos: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(lines: &'a [(usize, String)]) -> Self {
        Lines { lines, pos: 0 }
    }

    pub(crate) fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }

    pub(crate) fn next(&mut self, what: &str) -> CliResult<(usize, &'a str)> {
        let (n, l) = self
            .lines
            .get(self.pos)
            .ok_or_else(|| CliError::Parse { line: self.last_line(), msg: format!("missing {what}") })?;
        self.pos += 1;
        Ok((*n, l.as_str()))
    }

    pub(crate) fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).map(|(n, l)| (*n, l.as_str()))
    }

    /// First token of the next line.
    pub(crate) fn scalar<T: std::str::FromStr>(&mut self, what: &str) -> CliResult<T> {
        let (n, l) = self.next(what)?;
        let tok = l.split_whitespace().next().unwrap_or("");
        parse_num(tok, n, what)
    }

    /// `count` numbers, possibly spread over several lines; extra tokens on the last line are
    /// ignored.
    pub(crate) fn numbers<T: std::str::FromStr>(&mut self, count: usize, what: &str) -> CliResult<Vec<T>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let (n, l) = self.next(what)?;
            for tok in l.split_whitespace() {
                if out.len() == count {
                    break;
                }
                out.push(parse_num(tok, n, what)?);
            }
        }
        Ok(out)
    }
}

impl SdpaFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let lines = data_lines(text);
        let mut cur = Lines::new(&lines);
        let m: usize = cur.scalar("m")?;
        let nblocks: usize = cur.scalar("block count")?;
        let block_sizes: Vec<i64> = cur.numbers(nblocks, "block size")?;
        let c_vector: Vec<f64> = cur.numbers(m, "cost vector entry")?;
        let mut entries = Vec::new();
        while let Some((n, l)) = cur.peek() {
            cur.pos += 1;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 5 {
                return Err(CliError::Parse { line: n, msg: "entry needs matno blkno i j value".into() });
            }
            let matno: usize = parse_num(toks[0], n, "matno")?;
            let blkno: usize = parse_num(toks[1], n, "blkno")?;
            let mut i: usize = parse_num(toks[2], n, "row")?;
            let mut j: usize = parse_num(toks[3], n, "column")?;
            let value: f64 = parse_num(toks[4], n, "value")?;
            if matno > m {
                return Err(CliError::Parse { line: n, msg: format!("matno {matno} exceeds m = {m}") });
            }
            if blkno == 0 || blkno > nblocks {
                return Err(CliError::Parse { line: n, msg: format!("blkno {blkno} outside 1..={nblocks}") });
            }
            let size = block_sizes[blkno - 1].unsigned_abs() as usize;
            if i == 0 || j == 0 || i > size || j > size {
                return Err(CliError::Parse { line: n, msg: format!("index ({i}, {j}) outside block of size {size}") });
            }
            if block_sizes[blkno - 1] < 0 && i != j {
                return Err(CliError::Parse { line: n, msg: "off-diagonal entry in a diagonal block".into() });
            }
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
            entries.push(SdpaEntry { matno, blkno, i, j, value });
        }
        Ok(SdpaFile { m, block_sizes, c_vector, entries })
    }

    pub fn shape(&self) -> CliResult<ConeShape> {
        Ok(ConeShape::from_signed_sizes(&self.block_sizes)?)
    }

    pub fn to_problem(&self) -> CliResult<ProblemData> {
        let shape = self.shape()?;
        let mut rows = vec![Vec::new(); self.m + 1];
        for e in &self.entries {
            rows[e.matno].push(SparseEntry { block: e.blkno - 1, row: e.i - 1, col: e.j - 1, value: e.value });
        }
        let obj = rows.remove(0);
        let c = element_from_entries(&shape, obj)?;
        let a = LinearMap::from_entries(shape, rows)?;
        Ok(ProblemData::new(a, DVector::from_vec(self.c_vector.clone()), c)?)
    }

    pub fn from_problem(p: &ProblemData) -> Self {
        let conv = |matno: usize, e: &SparseEntry| SdpaEntry {
            matno,
            blkno: e.block + 1,
            i: e.row + 1,
            j: e.col + 1,
            value: e.value,
        };
        let mut entries: Vec<SdpaEntry> = sparse_entries(&p.c).iter().map(|e| conv(0, e)).collect();
        for (k, row) in p.a.entries().iter().enumerate() {
            entries.extend(row.iter().map(|e| conv(k + 1, e)));
        }
        SdpaFile { m: p.m(), block_sizes: p.shape().signed_sizes(), c_vector: p.b.iter().copied().collect(), entries }
    }

    /// Shortest round-trip float formatting, so `parse(write(f)) == f`.
    pub fn write(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.m);
        let _ = writeln!(s, "{}", self.block_sizes.len());
        let _ = writeln!(s, "{}", join(self.block_sizes.iter()));
        let _ = writeln!(s, "{}", join(self.c_vector.iter()));
        for e in &self.entries {
            let _ = writeln!(s, "{} {} {} {} {:?}", e.matno, e.blkno, e.i, e.j, e.value);
        }
        s
    }
}

fn join<T: std::fmt::Debug>(it: impl Iterator<Item = T>) -> String {
    it.map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

pub fn parse_sdpa(text: &str) -> CliResult<ProblemData> {
    SdpaFile::parse(text)?.to_problem()
}

pub fn write_sdpa(p: &ProblemData) -> String {
    SdpaFile::from_problem(p).write()
}

/// The symmetric element with the given upper-triangular entries (0-based); duplicates add.
/// Filled directly rather than through svec so values survive bit for bit.
pub(crate) fn element_from_entries(shape: &ConeShape, entries: Vec<SparseEntry>) -> CliResult<BlockVec> {
    // Validates indices exactly as the operator does.
    LinearMap::from_entries(shape.clone(), vec![entries.clone()])?;
    let mut blocks = BlockVec::zeros(shape).into_blocks();
    for e in entries {
        match &mut blocks[e.block] {
            BlockData::Psd(m) => {
                m[(e.row, e.col)] += e.value;
                if e.row != e.col {
                    m[(e.col, e.row)] += e.value;
                }
            }
            BlockData::Diag(d) => d[e.row] += e.value,
        }
    }
    Ok(BlockVec::from_blocks(blocks))
}

/// Sparse upper-triangular entries of an element in 1-based `(blk, i, j, value)` form.
pub fn element_entries(x: &BlockVec) -> Vec<(usize, usize, usize, f64)> {
    sparse_entries(x).iter().map(|e| (e.block + 1, e.row + 1, e.col + 1, e.value)).collect()
}
