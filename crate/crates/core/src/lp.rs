//! Dense two-phase simplex for the small linear programs that appear in the
//! stage games.
//!
//! Problems are stated as `maximize cᵀv` subject to `gᵀv ≤ h` rows, `eᵀv = f`
//! rows, and a per-variable lower bound that is either zero or unbounded.
//! Free variables are split into a positive and a negative part internally.
//! Pivoting follows Bland's rule (lowest eligible column enters, lowest basic
//! index leaves on ratio ties), so the solver cannot cycle and identical
//! inputs always take the identical pivot path.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("pivot limit of {0} reached")]
    PivotLimit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBound {
    Zero,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Maximized.
    pub objective: Vec<f64>,
    /// `coeffs · v ≤ rhs`
    pub ineq: Vec<Constraint>,
    /// `coeffs · v = rhs`
    pub eq: Vec<Constraint>,
    pub lower_bounds: Vec<LowerBound>,
}

impl LinearProgram {
    /// A program over `num_vars` nonnegative variables with a zero objective
    /// and no constraints.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            ineq: Vec::new(),
            eq: Vec::new(),
            lower_bounds: vec![LowerBound::Zero; num_vars],
        }
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn leq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.ineq.push(Constraint { coeffs, rhs });
        self
    }

    pub fn equal(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.eq.push(Constraint { coeffs, rhs });
        self
    }

    pub fn free(mut self, var: usize) -> Self {
        self.lower_bounds[var] = LowerBound::Free;
        self
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        if self.objective.len() != n {
            return Err(LpError::Malformed(format!(
                "objective has {} entries, expected {n}",
                self.objective.len()
            )));
        }
        if self.lower_bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} lower bounds for {n} variables",
                self.lower_bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("non-finite objective".into()));
        }
        let rows = self.ineq.iter().map(|c| ("inequality", c));
        let rows = rows.chain(self.eq.iter().map(|c| ("equality", c)));
        for (idx, (kind, row)) in rows.enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "{kind} row {idx} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(LpError::Malformed(format!("non-finite {kind} row {idx}")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        dot(&self.objective, point)
    }

    /// Largest absolute violation of any constraint or lower bound at `point`.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.ineq {
            worst = worst.max(dot(&row.coeffs, point) - row.rhs);
        }
        for row in &self.eq {
            worst = worst.max((dot(&row.coeffs, point) - row.rhs).abs());
        }
        for (value, bound) in point.iter().zip(&self.lower_bounds) {
            if *bound == LowerBound::Zero {
                worst = worst.max(-value);
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpSolution {
    Optimal { point: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible => LpStatus::Infeasible,
            LpSolution::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(self) -> Option<(Vec<f64>, f64)> {
        match self {
            LpSolution::Optimal { point, value } => Some((point, value)),
            _ => None,
        }
    }
}

/// Absolute tolerances used by the simplex engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpConfig {
    /// Smallest magnitude accepted as a pivot element.
    pub pivot_tol: f64,
    /// Phase one declares infeasibility when the artificial mass exceeds this.
    pub feasibility_tol: f64,
    /// A reduced cost must improve the objective by more than this to enter.
    pub optimality_tol: f64,
    pub max_pivots: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-10,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-10,
            max_pivots: 50_000,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, &LpConfig::default())
}

pub fn solve_lp_with(lp: &LinearProgram, cfg: &LpConfig) -> Result<LpSolution, LpError> {
    lp.check()?;
    let mut tab = Tableau::build(lp);
    if !tab.phase_one(cfg)? {
        return Ok(LpSolution::Infeasible);
    }
    tab.load_objective(lp);
    match tab.run(cfg, false)? {
        PhaseEnd::Unbounded => Ok(LpSolution::Unbounded),
        PhaseEnd::Optimal => {
            let point = tab.point();
            let value = lp.objective_value(&point);
            Ok(LpSolution::Optimal { point, value })
        }
    }
}

/// Any point of the feasible region (the phase-one basic solution), or `None`
/// when the region is empty. Malformed programs yield `None` as well.
pub fn feasible_point(lp: &LinearProgram) -> Option<Vec<f64>> {
    feasible_point_with(lp, &LpConfig::default())
}

pub fn feasible_point_with(lp: &LinearProgram, cfg: &LpConfig) -> Option<Vec<f64>> {
    lp.check().ok()?;
    let mut tab = Tableau::build(lp);
    match tab.phase_one(cfg) {
        Ok(true) => Some(tab.point()),
        _ => None,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

#[derive(Clone, Copy)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

/// Row 0 holds reduced costs with the current objective value in the last
/// column; rows `1..=m` are the constraint rows.
struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// (positive part, negative part) column of each original variable.
    var_cols: Vec<(usize, Option<usize>)>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut kinds = Vec::new();
        let mut var_cols = Vec::with_capacity(lp.num_vars);
        for bound in &lp.lower_bounds {
            let plus = kinds.len();
            kinds.push(ColumnKind::Structural);
            let minus = match bound {
                LowerBound::Zero => None,
                LowerBound::Free => {
                    kinds.push(ColumnKind::Structural);
                    Some(kinds.len() - 1)
                }
            };
            var_cols.push((plus, minus));
        }
        let num_ineq = lp.ineq.len();
        let slack_start = kinds.len();
        kinds.extend(std::iter::repeat_n(ColumnKind::Slack, num_ineq));

        let rows = num_ineq + lp.eq.len();
        // Rows that cannot start on their slack need an artificial column.
        let needs_artificial: Vec<bool> = lp
            .ineq
            .iter()
            .map(|c| c.rhs < 0.0)
            .chain(lp.eq.iter().map(|_| true))
            .collect();
        let art_start = kinds.len();
        let num_art = needs_artificial.iter().filter(|&&b| b).count();
        kinds.extend(std::iter::repeat_n(ColumnKind::Artificial, num_art));

        let cols = kinds.len();
        let width = cols + 1;
        let mut data = vec![0.0; (rows + 1) * width];
        let mut basis = Vec::with_capacity(rows);
        let mut next_art = art_start;

        let all_rows = lp.ineq.iter().chain(&lp.eq).enumerate();
        for (r, constraint) in all_rows {
            let sign = if constraint.rhs < 0.0 { -1.0 } else { 1.0 };
            let row = &mut data[(r + 1) * width..(r + 2) * width];
            for (var, &coef) in constraint.coeffs.iter().enumerate() {
                let (plus, minus) = var_cols[var];
                row[plus] = sign * coef;
                if let Some(minus) = minus {
                    row[minus] = -sign * coef;
                }
            }
            if r < num_ineq {
                row[slack_start + r] = sign;
            }
            row[cols] = sign * constraint.rhs;
            if needs_artificial[r] {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(slack_start + r);
            }
        }

        Self {
            rows,
            cols,
            data,
            basis,
            kinds,
            var_cols,
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn is_artificial(&self, c: usize) -> bool {
        matches!(self.kinds[c], ColumnKind::Artificial)
    }

    /// Returns whether the constraints are feasible.
    fn phase_one(&mut self, cfg: &LpConfig) -> Result<bool, LpError> {
        if !(0..self.cols).any(|c| self.is_artificial(c)) {
            return Ok(true);
        }
        let width = self.width();
        // maximize -sum(artificials)
        for c in 0..width {
            self.data[c] = 0.0;
        }
        for c in 0..self.cols {
            if self.is_artificial(c) {
                self.data[c] = 1.0;
            }
        }
        for r in 0..self.rows {
            if self.is_artificial(self.basis[r]) {
                let (head, tail) = self.data.split_at_mut(width);
                let row = &tail[r * width..(r + 1) * width];
                for (h, v) in head.iter_mut().zip(row) {
                    *h -= v;
                }
            }
        }
        // Phase one is bounded above by zero, so it always ends optimal.
        self.run(cfg, true)?;
        if self.at(0, self.cols) < -cfg.feasibility_tol {
            return Ok(false);
        }
        // Pivot zero-level artificials out of the basis where possible; a row
        // with no usable structural entry is redundant and stays inert.
        for r in 0..self.rows {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let entering = (0..self.cols).find(|&c| !self.is_artificial(c) && self.at(r + 1, c).abs() > cfg.pivot_tol);
            if let Some(c) = entering {
                self.pivot(r, c);
            }
        }
        Ok(true)
    }

    fn load_objective(&mut self, lp: &LinearProgram) {
        let width = self.width();
        for c in 0..width {
            self.data[c] = 0.0;
        }
        for (var, &coef) in lp.objective.iter().enumerate() {
            let (plus, minus) = self.var_cols[var];
            self.data[plus] = -coef;
            if let Some(minus) = minus {
                self.data[minus] = coef;
            }
        }
        for r in 0..self.rows {
            let coef = self.data[self.basis[r]];
            if coef != 0.0 {
                let (head, tail) = self.data.split_at_mut(width);
                let row = &tail[r * width..(r + 1) * width];
                for (h, v) in head.iter_mut().zip(row) {
                    *h -= coef * v;
                }
            }
        }
    }

    fn run(&mut self, cfg: &LpConfig, allow_artificial: bool) -> Result<PhaseEnd, LpError> {
        for _ in 0..cfg.max_pivots {
            let entering = (0..self.cols)
                .find(|&c| (allow_artificial || !self.is_artificial(c)) && self.at(0, c) < -cfg.optimality_tol);
            let Some(col) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r + 1, col);
                if a <= cfg.pivot_tol {
                    continue;
                }
                let ratio = self.at(r + 1, self.cols).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best_r, best)) => {
                        if ratio < best || (ratio == best && self.basis[r] < self.basis[best_r]) {
                            Some((r, ratio))
                        } else {
                            Some((best_r, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::PivotLimit(cfg.max_pivots))
    }

    /// Pivot on constraint row `r` (0-based) and column `c`.
    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.width();
        let pr = (r + 1) * width;
        let p = self.data[pr + c];
        for k in 0..width {
            self.data[pr + k] /= p;
        }
        self.data[pr + c] = 1.0;
        let pivot_row: Vec<f64> = self.data[pr..pr + width].to_vec();
        for i in 0..=self.rows {
            if i == r + 1 {
                continue;
            }
            let base = i * width;
            let factor = self.data[base + c];
            if factor == 0.0 {
                continue;
            }
            for (k, pv) in pivot_row.iter().enumerate() {
                self.data[base + k] -= factor * pv;
            }
            self.data[base + c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn point(&self) -> Vec<f64> {
        let mut col_values = vec![0.0; self.cols];
        for (r, &b) in self.basis.iter().enumerate() {
            col_values[b] = self.at(r + 1, self.cols);
        }
        self.var_cols
            .iter()
            .map(|&(plus, minus)| {
                let pos = col_values[plus].max(0.0);
                let neg = minus.map_or(0.0, |m| col_values[m].max(0.0));
                pos - neg
            })
            .collect()
    }
}
