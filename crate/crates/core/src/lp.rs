//! Exact covering LP: minimize the total weight subject to every row
//! carrying weight at least one.
//!
//! The solver runs a dense rational simplex with Bland's rule on the dual
//! packing program (maximize `sum y` with column sums at most one), whose
//! origin is feasible, and reads the primal weights off the final reduced
//! costs of the slack columns. Both solutions are checked exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::forts::FortCensus;
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

pub type Rational = BigRational;

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |e: String| Error::Parse(format!("bad rational {s:?}: {e}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let q: BigInt = q.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if q.is_zero() {
                return Err(bad("zero denominator".into()));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            s.trim().parse().map_err(|e| bad(format!("{e}")))?,
        )),
    }
}

pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[derive(Debug, Clone)]
pub struct CoveringLp {
    n_vars: usize,
    rows: Vec<VertexSet>,
}

impl CoveringLp {
    pub fn new(n_vars: usize, rows: Vec<VertexSet>) -> Result<Self> {
        for r in &rows {
            if r.universe() != n_vars {
                return Err(Error::Parse(format!(
                    "row over {} variables in an LP with {n_vars}",
                    r.universe()
                )));
            }
            if r.is_empty() {
                return Err(Error::Parse("covering rows must be non-empty".into()));
            }
        }
        Ok(CoveringLp { n_vars, rows })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn rows(&self) -> &[VertexSet] {
        &self.rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    fn as_str(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rational,
    /// Primal weight per variable.
    pub weights: Vec<Rational>,
    /// Dual multiplier per row; certifies optimality of `weights`.
    pub dual: Vec<Rational>,
}

impl Serialize for LpSolution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        let mut st = serializer.serialize_struct("LpSolution", 4)?;
        st.serialize_field("status", self.status.as_str())?;
        st.serialize_field("value", &format_rational(&self.value))?;
        st.serialize_field("weights", &strings(&self.weights))?;
        st.serialize_field("dual", &strings(&self.dual))?;
        st.end()
    }
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    cells: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.cells[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.cells[row][col].recip();
        for x in self.cells[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.cells[row].clone();
        for (i, r) in self.cells.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (x, p) in r.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes with Bland's rule. Returns false if unbounded.
    fn maximize(&mut self) -> bool {
        let m = self.basis.len();
        loop {
            let obj = &self.cells[m];
            let Some(enter) = (0..self.cols).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                let a = &self.cells[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
    }
}

/// Exact optimum of a covering LP, with a checked dual certificate.
pub fn solve_covering_lp(p: &CoveringLp) -> Result<LpSolution> {
    let (n, r) = (p.n_vars, p.rows.len());
    if r == 0 {
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            value: Rational::zero(),
            weights: vec![Rational::zero(); n],
            dual: Vec::new(),
        });
    }
    // Packing program: one constraint per variable, columns y_0..y_r then slacks.
    let cols = r + n;
    let mut cells = vec![vec![Rational::zero(); cols + 1]; n + 1];
    for (k, row) in p.rows.iter().enumerate() {
        for j in row.iter() {
            cells[j][k] = Rational::one();
        }
        cells[n][k] = -Rational::one();
    }
    for j in 0..n {
        cells[j][r + j] = Rational::one();
        cells[j][cols] = Rational::one();
    }
    let mut t = Tableau {
        cells,
        basis: (r..r + n).collect(),
        cols,
    };
    if !t.maximize() {
        // an unbounded packing program means some covering row cannot be met
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: Rational::zero(),
            weights: Vec::new(),
            dual: Vec::new(),
        });
    }
    let value = t.rhs(n).clone();
    let weights: Vec<Rational> = (0..n).map(|j| t.cells[n][r + j].clone()).collect();
    let mut dual = vec![Rational::zero(); r];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < r {
            dual[b] = t.rhs(i).clone();
        }
    }
    let sol = LpSolution {
        status: LpStatus::Optimal,
        value,
        weights,
        dual,
    };
    certify(p, &sol)?;
    Ok(sol)
}

/// Exact primal and dual feasibility plus equal objectives.
pub fn certify(p: &CoveringLp, sol: &LpSolution) -> Result<()> {
    let fail = |msg: &str| Err(Error::InternalConsistency(format!("LP certificate: {msg}")));
    if sol.weights.len() != p.n_vars || sol.dual.len() != p.rows.len() {
        return fail("dimension mismatch");
    }
    if sol
        .weights
        .iter()
        .chain(sol.dual.iter())
        .any(Signed::is_negative)
    {
        return fail("negative entry");
    }
    for row in &p.rows {
        let s: Rational = row.iter().map(|j| &sol.weights[j]).sum();
        if s < Rational::one() {
            return fail("covering row below one");
        }
    }
    for j in 0..p.n_vars {
        let s: Rational = p
            .rows
            .iter()
            .zip(sol.dual.iter())
            .filter(|(row, _)| row.contains(j))
            .map(|(_, y)| y)
            .sum();
        if s > Rational::one() {
            return fail("packing column above one");
        }
    }
    let primal: Rational = sol.weights.iter().sum();
    let dual: Rational = sol.dual.iter().sum();
    if primal != sol.value || dual != sol.value {
        return fail("objective values disagree");
    }
    Ok(())
}

/// Fractional zero forcing number: the covering LP over the minimal forts.
pub fn fractional_zf_solution(g: &Graph, census: &FortCensus) -> Result<LpSolution> {
    census.require_complete()?;
    if census.n != g.n() {
        return Err(Error::InternalConsistency(
            "census belongs to a different graph".into(),
        ));
    }
    solve_covering_lp(&CoveringLp::new(g.n(), census.minimal_forts.clone())?)
}

pub fn fractional_zf(g: &Graph, census: &FortCensus) -> Result<Rational> {
    Ok(fractional_zf_solution(g, census)?.value)
}
