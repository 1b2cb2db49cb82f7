//! SDPA sparse format (`.dat-s`).
//!
//! The file describes `max ⟨F_0, Y⟩ s.t. ⟨F_i, Y⟩ = c_i, Y ⪰ 0`: line 1 is
//! the number of constraints, line 2 the number of blocks, line 3 the block
//! sizes (negative for diagonal blocks), line 4 the vector `c`, then one
//! `matno blkno i j value` line per upper-triangle entry, 1-based.

use crate::error::SolverError;
use crate::program::{BlockKind, ConicProgram, Functional, Relation, Sense};

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Requires equality constraints and no free blocks; see
/// [`ConicProgram::normalized`]. Minimization problems are written with a
/// negated objective.
pub fn export(p: &ConicProgram) -> Result<String, SolverError> {
    p.validate()?;
    if let Some(b) = p.blocks.iter().find(|b| b.kind == BlockKind::Free) {
        return Err(SolverError::Unsupported(format!("free block {}", b.name)));
    }
    if p.constraints.iter().any(|c| c.relation != Relation::Eq) {
        return Err(SolverError::Unsupported("inequality constraints".into()));
    }
    let mut out = String::new();
    out.push_str(&format!("{}\n{}\n", p.constraints.len(), p.blocks.len()));
    let sizes: Vec<String> = p
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Diagonal => format!("-{}", b.size),
            _ => b.size.to_string(),
        })
        .collect();
    out.push_str(&sizes.join(" "));
    out.push('\n');
    let rhs: Vec<String> = p.constraints.iter().map(|c| number(c.rhs)).collect();
    out.push_str(&rhs.join(" "));
    out.push('\n');
    let objective = match p.sense {
        Sense::Maximize => p.objective.merged(),
        Sense::Minimize => p.objective.scaled(-1.0).merged(),
    };
    let functionals = std::iter::once(&objective)
        .chain(p.constraints.iter().map(|c| &c.functional))
        .enumerate();
    for (matno, f) in functionals {
        for e in &f.merged().entries {
            out.push_str(&format!("{} {} {} {} {}\n", matno, e.block + 1, e.row + 1, e.col + 1, number(e.value)));
        }
    }
    Ok(out)
}

fn parse_err(msg: impl Into<String>) -> SolverError {
    SolverError::Parse(msg.into())
}

pub fn parse(text: &str) -> Result<ConicProgram, SolverError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let mut header = |what: &str| -> Result<Vec<String>, SolverError> {
        let line = lines.next().ok_or_else(|| parse_err(format!("missing {what}")))?;
        Ok(line
            .replace([',', '{', '}', '(', ')'], " ")
            .split_whitespace()
            .map(str::to_string)
            .collect())
    };
    let first = |v: Vec<String>, what: &str| -> Result<usize, SolverError> {
        v.first()
            .ok_or_else(|| parse_err(format!("empty {what}")))?
            .parse()
            .map_err(|_| parse_err(format!("bad {what}")))
    };
    let m = first(header("constraint count")?, "constraint count")?;
    let nblocks = first(header("block count")?, "block count")?;
    let sizes: Vec<i64> = header("block sizes")?
        .iter()
        .take(nblocks)
        .map(|t| t.parse().map_err(|_| parse_err(format!("bad block size {t:?}"))))
        .collect::<Result<_, _>>()?;
    if sizes.len() != nblocks || sizes.contains(&0) {
        return Err(parse_err("block size line does not match the block count"));
    }
    let rhs: Vec<f64> = header("right-hand side")?
        .iter()
        .take(m)
        .map(|t| t.parse().map_err(|_| parse_err(format!("bad number {t:?}"))))
        .collect::<Result<_, _>>()?;
    if rhs.len() != m {
        return Err(parse_err("right-hand side does not match the constraint count"));
    }
    let mut p = ConicProgram::new(Sense::Maximize);
    for (i, &s) in sizes.iter().enumerate() {
        let kind = if s < 0 { BlockKind::Diagonal } else { BlockKind::Psd };
        p.add_block(format!("b{}", i + 1), s.unsigned_abs() as usize, kind);
    }
    let mut functionals = vec![Functional::new(); m + 1];
    for line in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 5 {
            return Err(parse_err(format!("short entry line {line:?}")));
        }
        let idx = |k: usize| -> Result<usize, SolverError> {
            t[k].parse::<usize>().map_err(|_| parse_err(format!("bad index in {line:?}")))
        };
        let (matno, blk, i, j) = (idx(0)?, idx(1)?, idx(2)?, idx(3)?);
        let v: f64 = t[4].parse().map_err(|_| parse_err(format!("bad value in {line:?}")))?;
        if matno > m || blk == 0 || blk > nblocks || i == 0 || j == 0 {
            return Err(parse_err(format!("entry out of range: {line:?}")));
        }
        functionals[matno].push(blk - 1, i - 1, j - 1, v);
    }
    let mut functionals = functionals.into_iter();
    p.objective = functionals.next().expect("objective slot");
    for (f, c) in functionals.zip(rhs) {
        p.add_constraint(f, Relation::Eq, c);
    }
    p.validate().map_err(|e| parse_err(e.to_string()))?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ConicProgram {
        let mut p = ConicProgram::new(Sense::Maximize);
        let x = p.add_block("x", 1, BlockKind::Psd);
        let s = p.add_block("s", 1, BlockKind::Diagonal);
        p.objective.push(x, 0, 0, 1.0);
        p.add_constraint(Functional::new().with(x, 0, 0, 1.0).with(s, 0, 0, 1.0), Relation::Eq, 1.0);
        p
    }

    #[test]
    fn toy_layout() {
        let text = export(&toy()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "1");
        assert_eq!(lines[1], "2");
        assert_eq!(lines[2], "1 -1");
        assert_eq!(lines.len(), 4 + 3);
        assert!(lines[4].starts_with("0 1 1 1 "));
    }

    #[test]
    fn round_trip() {
        let text = export(&toy()).unwrap();
        let parsed = parse(&text).unwrap();
        assert_eq!(export(&parsed).unwrap(), text);
        assert_eq!(parse(&export(&parsed).unwrap()).unwrap(), parsed);
    }

    #[test]
    fn rejects_free_blocks() {
        let mut p = toy();
        p.add_block("w", 2, BlockKind::Free);
        assert!(matches!(export(&p), Err(SolverError::Unsupported(_))));
        assert!(export(&p.normalized()).is_ok());
    }
}
