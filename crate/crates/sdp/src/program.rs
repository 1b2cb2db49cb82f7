//! Real symmetric cone programs over block-diagonal variables.
//!
//! A linear functional is a symmetric block matrix `F` given by its upper
//! triangle, evaluated as `⟨F, X⟩ = Σ_ij F_ij X_ij` (SDPA convention: an
//! off-diagonal entry `v` at `(i, j)` contributes `2 v X_ij`).

use crate::error::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Psd,
    /// Nonnegative diagonal; only diagonal entries may be referenced.
    Diagonal,
    /// Unconstrained symmetric matrix.
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub name: String,
    pub size: usize,
    pub kind: BlockKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Functional {
    pub entries: Vec<Entry>,
}

impl Functional {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)`; the pair is stored in the upper triangle.
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            let (row, col) = if row <= col { (row, col) } else { (col, row) };
            self.entries.push(Entry { block, row, col, value });
        }
    }

    pub fn with(mut self, block: usize, row: usize, col: usize, value: f64) -> Self {
        self.push(block, row, col, value);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|e| Entry { value: e.value * c, ..*e }).collect(),
        }
    }

    /// Value at dense symmetric block values (row-major `size x size`).
    pub fn evaluate(&self, blocks: &[Vec<f64>], sizes: &[usize]) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let x = blocks[e.block][e.row * sizes[e.block] + e.col];
                if e.row == e.col {
                    e.value * x
                } else {
                    2.0 * e.value * x
                }
            })
            .sum()
    }

    /// Sums duplicate positions and sorts by `(block, row, col)`.
    pub fn merged(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.sort_by_key(|a| (a.block, a.row, a.col));
        let mut out: Vec<Entry> = Vec::with_capacity(entries.len());
        for e in entries {
            match out.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => last.value += e.value,
                _ => out.push(e),
            }
        }
        out.retain(|e| e.value != 0.0);
        Self { entries: out }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub functional: Functional,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicProgram {
    pub blocks: Vec<Block>,
    pub objective: Functional,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
}

/// How the blocks of a program map onto those of its normalized form.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum BlockOrigin {
    Same(usize),
    /// Free block split into two diagonal blocks over its upper triangle.
    Split { plus: usize, minus: usize },
}

pub(crate) fn triangle_index(size: usize, row: usize, col: usize) -> usize {
    // Row-major enumeration of the upper triangle.
    row * size - row * (row + 1) / 2 + col
}

impl ConicProgram {
    pub fn new(sense: Sense) -> Self {
        Self { blocks: Vec::new(), objective: Functional::new(), constraints: Vec::new(), sense }
    }

    pub fn add_block(&mut self, name: impl Into<String>, size: usize, kind: BlockKind) -> usize {
        self.blocks.push(Block { name: name.into(), size, kind });
        self.blocks.len() - 1
    }

    pub fn add_constraint(&mut self, functional: Functional, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { functional, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn psd_side(&self) -> usize {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Psd).map(|b| b.size).sum()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for (i, b) in self.blocks.iter().enumerate() {
            if b.size == 0 {
                return Err(SolverError::InvalidProgram(format!("block {i} ({}) has size 0", b.name)));
            }
        }
        let check = |f: &Functional, what: &str| -> Result<(), SolverError> {
            for e in &f.entries {
                let b = self.blocks.get(e.block).ok_or_else(|| {
                    SolverError::InvalidProgram(format!("{what} references missing block {}", e.block))
                })?;
                if e.col >= b.size || e.row > e.col {
                    return Err(SolverError::InvalidProgram(format!(
                        "{what} entry ({}, {}) outside block {} of size {}",
                        e.row, e.col, b.name, b.size
                    )));
                }
                if b.kind == BlockKind::Diagonal && e.row != e.col {
                    return Err(SolverError::InvalidProgram(format!(
                        "{what} has off-diagonal entry in diagonal block {}",
                        b.name
                    )));
                }
                if !e.value.is_finite() {
                    return Err(SolverError::InvalidProgram(format!("{what} has a non-finite coefficient")));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            check(&c.functional, &format!("constraint {i}"))?;
            if !c.rhs.is_finite() {
                return Err(SolverError::InvalidProgram(format!("constraint {i} has a non-finite right-hand side")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, blocks: &[Vec<f64>]) -> f64 {
        self.objective.evaluate(blocks, &self.sizes())
    }

    /// Largest violation of the constraints and of `Diagonal` nonnegativity
    /// at dense block values; PSD membership is not checked here.
    pub fn linear_residual(&self, blocks: &[Vec<f64>]) -> f64 {
        let sizes = self.sizes();
        let mut worst = 0.0f64;
        for c in &self.constraints {
            let v = c.functional.evaluate(blocks, &sizes) - c.rhs;
            let viol = match c.relation {
                Relation::Eq => v.abs(),
                Relation::Le => v.max(0.0),
                Relation::Ge => (-v).max(0.0),
            };
            worst = worst.max(viol);
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            if blk.kind == BlockKind::Diagonal {
                for i in 0..blk.size {
                    worst = worst.max(-blocks[b][i * blk.size + i]);
                }
            }
        }
        worst
    }

    /// Same program with the objective multiplied by `c`.
    pub fn scale_objective(&self, c: f64) -> Self {
        Self { objective: self.objective.scaled(c), ..self.clone() }
    }

    /// Equivalent program with equality constraints only and no free
    /// blocks: inequalities get a diagonal slack block and each free block
    /// becomes a difference of two diagonal blocks.
    pub fn normalized(&self) -> Self {
        self.normalize().0
    }

    pub(crate) fn normalize(&self) -> (Self, Vec<BlockOrigin>) {
        let mut out = ConicProgram::new(self.sense);
        let mut origin = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            match b.kind {
                BlockKind::Free => {
                    let n = b.size * (b.size + 1) / 2;
                    let plus = out.add_block(format!("{}+", b.name), n, BlockKind::Diagonal);
                    let minus = out.add_block(format!("{}-", b.name), n, BlockKind::Diagonal);
                    origin.push(BlockOrigin::Split { plus, minus });
                }
                kind => origin.push(BlockOrigin::Same(out.add_block(b.name.clone(), b.size, kind))),
            }
        }
        let map = |f: &Functional| -> Functional {
            let mut g = Functional::new();
            for e in &f.entries {
                match origin[e.block] {
                    BlockOrigin::Same(nb) => g.push(nb, e.row, e.col, e.value),
                    BlockOrigin::Split { plus, minus } => {
                        let k = triangle_index(self.blocks[e.block].size, e.row, e.col);
                        let v = if e.row == e.col { e.value } else { 2.0 * e.value };
                        g.push(plus, k, k, v);
                        g.push(minus, k, k, -v);
                    }
                }
            }
            g
        };
        out.objective = map(&self.objective);
        let inequalities: Vec<usize> = (0..self.constraints.len())
            .filter(|&i| self.constraints[i].relation != Relation::Eq)
            .collect();
        let slack = if inequalities.is_empty() {
            None
        } else {
            Some(out.add_block("slack", inequalities.len(), BlockKind::Diagonal))
        };
        let mut next_slack = 0;
        for c in &self.constraints {
            let mut f = map(&c.functional);
            if let Some(s) = slack {
                match c.relation {
                    Relation::Eq => {}
                    Relation::Le => {
                        f.push(s, next_slack, next_slack, 1.0);
                        next_slack += 1;
                    }
                    Relation::Ge => {
                        f.push(s, next_slack, next_slack, -1.0);
                        next_slack += 1;
                    }
                }
            }
            out.add_constraint(f, Relation::Eq, c.rhs);
        }
        (out, origin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functional_convention() {
        let f = Functional::new().with(0, 1, 0, 3.0).with(0, 1, 1, 2.0);
        assert_eq!(f.entries[0].row, 0);
        let x = vec![vec![1.0, 5.0, 5.0, 7.0]];
        assert_eq!(f.evaluate(&x, &[2]), 2.0 * 3.0 * 5.0 + 2.0 * 7.0);
    }

    #[test]
    fn triangle_enumeration() {
        let n = 4;
        let mut k = 0;
        for r in 0..n {
            for c in r..n {
                assert_eq!(triangle_index(n, r, c), k);
                k += 1;
            }
        }
    }

    #[test]
    fn normalization_shapes() {
        let mut p = ConicProgram::new(Sense::Maximize);
        let x = p.add_block("x", 2, BlockKind::Psd);
        let w = p.add_block("w", 2, BlockKind::Free);
        p.objective.push(x, 0, 0, 1.0);
        p.add_constraint(Functional::new().with(x, 0, 1, 1.0).with(w, 0, 1, 1.0), Relation::Le, 1.0);
        p.add_constraint(Functional::new().with(x, 1, 1, 1.0), Relation::Eq, 2.0);
        let n = p.normalized();
        assert_eq!(n.blocks.len(), 4);
        assert!(n.constraints.iter().all(|c| c.relation == Relation::Eq));
        assert_eq!(n.blocks[1].size, 3);
        assert_eq!(n.blocks[3].name, "slack");
        assert_eq!(n.constraints[0].functional.entries.len(), 4);
    }
}
