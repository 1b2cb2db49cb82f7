//! Programs over complex Hermitian blocks and their real forms.
//!
//! A Hermitian functional lists the upper triangle of a Hermitian `F` and
//! is evaluated as `Re Tr(F X)`. A block of side `s` embeds as the real
//! symmetric `[[Re, -Im], [Im, Re]]` of side `2s`, with every functional
//! halved so values are unchanged. When all data is real the program can
//! instead be restricted to real symmetric blocks of the same side.

use num_complex::Complex64;

use crate::error::SolverError;
use crate::program::{Block, BlockKind, ConicProgram, Functional, Relation, Sense};
use crate::solver::SolverResult;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HermitianFunctional {
    pub entries: Vec<HermitianEntry>,
}

impl HermitianFunctional {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `F_{row,col} = value` (and its conjugate mirror).
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: Complex64) {
        if value == Complex64::new(0.0, 0.0) {
            return;
        }
        let (row, col, value) = if row <= col { (row, col, value) } else { (col, row, value.conj()) };
        self.entries.push(HermitianEntry { block, row, col, value });
    }

    pub fn push_real(&mut self, block: usize, row: usize, col: usize, value: f64) {
        self.push(block, row, col, Complex64::new(value, 0.0));
    }

    fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.value.im == 0.0)
    }

    fn is_imaginary(&self) -> bool {
        self.entries.iter().all(|e| e.value.re == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianConstraint {
    pub functional: HermitianFunctional,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianProgram {
    pub blocks: Vec<Block>,
    pub objective: HermitianFunctional,
    pub constraints: Vec<HermitianConstraint>,
    pub sense: Sense,
}

/// A real program derived from a Hermitian one, with the maps needed to
/// read results back.
#[derive(Clone, Debug, PartialEq)]
pub struct RealForm {
    pub program: ConicProgram,
    pub embedded: bool,
    /// For each real constraint, the Hermitian constraint it came from.
    pub row_origin: Vec<usize>,
    sizes: Vec<usize>,
    kinds: Vec<BlockKind>,
    hermitian_rows: usize,
}

impl HermitianProgram {
    pub fn new(sense: Sense) -> Self {
        Self { blocks: Vec::new(), objective: HermitianFunctional::new(), constraints: Vec::new(), sense }
    }

    pub fn add_block(&mut self, name: impl Into<String>, size: usize, kind: BlockKind) -> usize {
        self.blocks.push(Block { name: name.into(), size, kind });
        self.blocks.len() - 1
    }

    pub fn add_constraint(&mut self, functional: HermitianFunctional, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(HermitianConstraint { functional, relation, rhs });
        self.constraints.len() - 1
    }

    fn check(&self) -> Result<(), SolverError> {
        let all = std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.functional));
        for f in all {
            for e in &f.entries {
                let b = self.blocks.get(e.block).ok_or_else(|| {
                    SolverError::InvalidProgram(format!("entry references missing block {}", e.block))
                })?;
                if e.row == e.col && e.value.im != 0.0 {
                    return Err(SolverError::NotHermitian(format!(
                        "diagonal entry ({}, {}) of block {} has imaginary part {}",
                        e.row, e.col, b.name, e.value.im
                    )));
                }
                if b.kind == BlockKind::Diagonal && (e.row != e.col) {
                    return Err(SolverError::InvalidProgram(format!("off-diagonal entry in diagonal block {}", b.name)));
                }
            }
        }
        Ok(())
    }

    /// Real symmetric embedding of every Hermitian block.
    pub fn real_embed(&self) -> Result<RealForm, SolverError> {
        self.check()?;
        let mut p = ConicProgram::new(self.sense);
        for b in &self.blocks {
            match b.kind {
                BlockKind::Diagonal => p.add_block(b.name.clone(), b.size, b.kind),
                kind => p.add_block(b.name.clone(), 2 * b.size, kind),
            };
        }
        let embed = |f: &HermitianFunctional| -> Functional {
            let mut g = Functional::new();
            for e in &f.entries {
                let s = self.blocks[e.block].size;
                if self.blocks[e.block].kind == BlockKind::Diagonal {
                    g.push(e.block, e.row, e.col, e.value.re);
                    continue;
                }
                let (a, b) = (0.5 * e.value.re, 0.5 * e.value.im);
                let (r, c) = (e.row, e.col);
                g.push(e.block, r, c, a);
                g.push(e.block, r + s, c + s, a);
                if r != c {
                    g.push(e.block, r, c + s, -b);
                    g.push(e.block, c, r + s, b);
                }
            }
            g
        };
        p.objective = embed(&self.objective);
        for c in &self.constraints {
            p.add_constraint(embed(&c.functional), c.relation, c.rhs);
        }
        Ok(RealForm {
            program: p,
            embedded: true,
            row_origin: (0..self.constraints.len()).collect(),
            sizes: self.blocks.iter().map(|b| b.size).collect(),
            kinds: self.blocks.iter().map(|b| b.kind).collect(),
            hermitian_rows: self.constraints.len(),
        })
    }

    /// Restriction to real symmetric blocks. Available when the objective
    /// and every constraint are real, except purely imaginary constraints
    /// that real matrices satisfy trivially (they are dropped).
    pub fn real_restriction(&self) -> Result<Option<RealForm>, SolverError> {
        self.check()?;
        if !self.objective.is_real() {
            return Ok(None);
        }
        let mut p = ConicProgram::new(self.sense);
        for b in &self.blocks {
            p.add_block(b.name.clone(), b.size, b.kind);
        }
        let real = |f: &HermitianFunctional| -> Functional {
            let mut g = Functional::new();
            for e in &f.entries {
                g.push(e.block, e.row, e.col, e.value.re);
            }
            g
        };
        p.objective = real(&self.objective);
        let mut row_origin = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.functional.is_real() {
                p.add_constraint(real(&c.functional), c.relation, c.rhs);
                row_origin.push(i);
            } else if c.functional.is_imaginary() {
                let holds = match c.relation {
                    Relation::Eq => c.rhs == 0.0,
                    Relation::Le => c.rhs >= 0.0,
                    Relation::Ge => c.rhs <= 0.0,
                };
                if !holds {
                    return Ok(None);
                }
            } else {
                return Ok(None);
            }
        }
        Ok(Some(RealForm {
            program: p,
            embedded: false,
            row_origin,
            sizes: self.blocks.iter().map(|b| b.size).collect(),
            kinds: self.blocks.iter().map(|b| b.kind).collect(),
            hermitian_rows: self.constraints.len(),
        }))
    }

    /// The restriction when available, else the embedding.
    pub fn to_real(&self) -> Result<RealForm, SolverError> {
        match self.real_restriction()? {
            Some(r) => Ok(r),
            None => self.real_embed(),
        }
    }
}

impl RealForm {
    /// Hermitian value of block `b` from a solver result, row-major.
    pub fn block_value(&self, result: &SolverResult, b: usize) -> Vec<Complex64> {
        let s = self.sizes[b];
        let x = &result.blocks[b];
        if !self.embedded || self.kinds[b] == BlockKind::Diagonal {
            return x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        }
        let n = 2 * s;
        let mut out = Vec::with_capacity(s * s);
        for r in 0..s {
            for c in 0..s {
                let re = 0.5 * (x[r * n + c] + x[(r + s) * n + c + s]);
                let im = 0.5 * (x[(r + s) * n + c] - x[r * n + c + s]);
                out.push(Complex64::new(re, im));
            }
        }
        out
    }

    /// Multipliers per Hermitian constraint; dropped rows get zero.
    pub fn constraint_duals(&self, result: &SolverResult) -> Vec<f64> {
        let mut out = vec![0.0; self.hermitian_rows];
        for (k, &i) in self.row_origin.iter().enumerate() {
            out[i] = result.duals[k];
        }
        out
    }
}
