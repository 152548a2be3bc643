use crate::error::LpError;
use crate::model::{LpModel, Row};
use crate::FEAS_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic with no finite bound, held at zero.
    Free,
}

/// Status of every column followed by every row logical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub status: Vec<VarStatus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    /// Column values (meaningful only when `status == Optimal`).
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Cap on pivots per `solve` call; `None` picks a size-dependent default.
    pub max_iterations: Option<usize>,
    pub feas_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
    /// Pivots between fresh factorizations of the basis inverse.
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: None,
            feas_tol: FEAS_TOL,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
            refactor_interval: 200,
            bland_after: 60,
        }
    }
}

const NONE: usize = usize::MAX;
const DEGENERATE_STEP: f64 = 1e-12;

/// Persistent revised simplex state over an [`LpModel`].
///
/// Variables `0..n` are the model columns, `n..n+m` the row logicals with
/// `A x - s = 0`, so a logical carries the bounds of its row. The basis inverse is
/// kept dense and updated in product form; it is rebuilt from scratch every
/// `refactor_interval` pivots or whenever the final residual audit fails.
#[derive(Debug, Clone)]
pub struct Simplex {
    model: LpModel,
    opts: SimplexOptions,
    col_rows: Vec<Vec<(usize, f64)>>,
    n: usize,
    m: usize,
    binv: Vec<f64>,
    basic: Vec<usize>,
    pos: Vec<usize>,
    state: Vec<VarStatus>,
    x: Vec<f64>,
    since_refactor: usize,
}

enum Step {
    Optimal,
    Infeasible,
    Unbounded,
    Moved { degenerate: bool },
}

impl Simplex {
    pub fn new(model: LpModel) -> Self {
        Self::with_options(model, SimplexOptions::default())
    }

    pub fn with_options(model: LpModel, opts: SimplexOptions) -> Self {
        let n = model.num_cols();
        let m = model.num_rows();
        let mut col_rows = vec![Vec::new(); n];
        for (i, r) in model.rows.iter().enumerate() {
            for &(j, a) in &r.coeffs {
                if a != 0.0 {
                    col_rows[j].push((i, a));
                }
            }
        }
        let mut s = Simplex {
            model,
            opts,
            col_rows,
            n,
            m,
            binv: vec![0.0; m * m],
            basic: (n..n + m).collect(),
            pos: vec![NONE; n + m],
            state: vec![VarStatus::Basic; n + m],
            x: vec![0.0; n + m],
            since_refactor: 0,
        };
        for i in 0..m {
            s.binv[i * m + i] = -1.0;
            s.pos[n + i] = i;
        }
        for j in 0..n {
            s.make_nonbasic_at_bound(j);
        }
        s
    }

    /// Starts from a previously exported basis (same column and row counts).
    pub fn with_basis(model: LpModel, basis: &Basis) -> Result<Self, LpError> {
        let mut s = Self::new(model);
        let total = s.n + s.m;
        if basis.status.len() != total {
            return Err(LpError::BasisShape { expected: total, got: basis.status.len() });
        }
        let nbasic = basis.status.iter().filter(|&&v| v == VarStatus::Basic).count();
        if nbasic != s.m {
            return Err(LpError::BasisShape { expected: s.m, got: nbasic });
        }
        s.basic.clear();
        for (j, &st) in basis.status.iter().enumerate() {
            s.state[j] = st;
            s.pos[j] = NONE;
            match st {
                VarStatus::Basic => {
                    s.pos[j] = s.basic.len();
                    s.basic.push(j);
                }
                _ => s.make_nonbasic_at_bound_keeping(j, st),
            }
        }
        s.refactor();
        Ok(s)
    }

    /// Replaces the current basis. A status vector exported before rows were
    /// appended is extended with basic logicals for the new rows.
    pub fn set_basis(&mut self, basis: &Basis) -> Result<(), LpError> {
        let total = self.n + self.m;
        let given = basis.status.len();
        if given > total || given < self.n {
            return Err(LpError::BasisShape { expected: total, got: given });
        }
        let mut status = basis.status.clone();
        status.resize(total, VarStatus::Basic);
        let nbasic = status.iter().filter(|&&v| v == VarStatus::Basic).count();
        if nbasic != self.m {
            return Err(LpError::BasisShape { expected: self.m, got: nbasic });
        }
        self.basic.clear();
        for (j, &st) in status.iter().enumerate() {
            self.pos[j] = NONE;
            match st {
                VarStatus::Basic => {
                    self.state[j] = st;
                    self.pos[j] = self.basic.len();
                    self.basic.push(j);
                }
                _ => self.make_nonbasic_at_bound_keeping(j, st),
            }
        }
        self.refactor();
        Ok(())
    }

    pub fn model(&self) -> &LpModel {
        &self.model
    }

    pub fn into_model(self) -> LpModel {
        self.model
    }

    pub fn basis(&self) -> Basis {
        Basis { status: self.state.clone() }
    }

    fn lb(&self, j: usize) -> f64 {
        if j < self.n {
            self.model.cols[j].lower
        } else {
            self.model.rows[j - self.n].lower
        }
    }

    fn ub(&self, j: usize) -> f64 {
        if j < self.n {
            self.model.cols[j].upper
        } else {
            self.model.rows[j - self.n].upper
        }
    }

    fn cost(&self, j: usize) -> f64 {
        if j < self.n {
            self.model.cols[j].cost
        } else {
            0.0
        }
    }

    fn make_nonbasic_at_bound(&mut self, j: usize) {
        let (lo, hi) = (self.lb(j), self.ub(j));
        self.pos[j] = NONE;
        if lo.is_finite() {
            self.state[j] = VarStatus::AtLower;
            self.x[j] = lo;
        } else if hi.is_finite() {
            self.state[j] = VarStatus::AtUpper;
            self.x[j] = hi;
        } else {
            self.state[j] = VarStatus::Free;
            self.x[j] = 0.0;
        }
    }

    fn make_nonbasic_at_bound_keeping(&mut self, j: usize, st: VarStatus) {
        match st {
            VarStatus::AtUpper if self.ub(j).is_finite() => {
                self.state[j] = st;
                self.x[j] = self.ub(j);
            }
            VarStatus::AtLower if self.lb(j).is_finite() => {
                self.state[j] = st;
                self.x[j] = self.lb(j);
            }
            _ => self.make_nonbasic_at_bound(j),
        }
    }

    /// Changes a column's bounds; the current basis stays in place.
    pub fn set_col_bounds(&mut self, col: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        self.model.set_bounds(col, lower, upper)?;
        if self.state[col] != VarStatus::Basic {
            let st = self.state[col];
            self.make_nonbasic_at_bound_keeping(col, st);
        }
        Ok(())
    }

    /// Appends rows; their logicals enter the basis so the old basis remains valid.
    pub fn add_rows(&mut self, rows: Vec<Row>) -> Result<(), LpError> {
        if rows.is_empty() {
            return Ok(());
        }
        self.model.add_rows(rows.iter().cloned())?;
        let (n, m, k) = (self.n, self.m, rows.len());
        let m2 = m + k;
        let mut binv = vec![0.0; m2 * m2];
        for i in 0..m {
            binv[i * m2..i * m2 + m].copy_from_slice(&self.binv[i * m..i * m + m]);
        }
        for (t, row) in rows.iter().enumerate() {
            let r = m + t;
            let dst = r * m2;
            for &(j, a) in &row.coeffs {
                if a == 0.0 {
                    continue;
                }
                self.col_rows[j].push((r, a));
                let p = self.pos[j];
                if p != NONE {
                    let src = &self.binv[p * m..p * m + m];
                    for (d, s) in binv[dst..dst + m].iter_mut().zip(src) {
                        *d += a * s;
                    }
                }
            }
            binv[dst + r] = -1.0;
        }
        self.binv = binv;
        self.m = m2;
        for (t, row) in rows.iter().enumerate() {
            let v = n + m + t;
            self.pos.push(m + t);
            self.basic.push(v);
            self.state.push(VarStatus::Basic);
            self.x.push(row.activity(&self.x[..n]));
        }
        Ok(())
    }

    /// Rebuilds the dense basis inverse. Dependent basic columns are swapped
    /// for logicals of uncovered rows.
    fn refactor(&mut self) {
        self.since_refactor = 0;
        if self.m == 0 || self.refactor_blocked() {
            return;
        }
        self.refactor_dense();
    }

    /// Inverse through the structural block: with basic logicals on rows `L`
    /// and structural basics `S`, only `S` restricted to the other rows needs
    /// inverting. Returns false when that block is singular.
    fn refactor_blocked(&mut self) -> bool {
        let (n, m) = (self.n, self.m);
        let structural: Vec<usize> = (0..m).filter(|&p| self.basic[p] < n).collect();
        let k = structural.len();
        // rows not covered by a basic logical, in index order
        let mut srow = vec![NONE; m];
        let mut rows_s = Vec::with_capacity(k);
        for r in 0..m {
            if self.pos[n + r] == NONE {
                srow[r] = rows_s.len();
                rows_s.push(r);
            }
        }
        if rows_s.len() != k {
            return false;
        }
        // Gauss-Jordan on the k × k block, inverse accumulated alongside
        let mut a = vec![0.0; k * k];
        for (t, &p) in structural.iter().enumerate() {
            for &(r, c) in &self.col_rows[self.basic[p]] {
                if srow[r] != NONE {
                    a[srow[r] * k + t] += c;
                }
            }
        }
        let mut inv = vec![0.0; k * k];
        for i in 0..k {
            inv[i * k + i] = 1.0;
        }
        let mut row_used = vec![false; k];
        let mut piv_row = vec![NONE; k];
        for t in 0..k {
            let mut best = NONE;
            let mut best_abs = 1e-11;
            for r in 0..k {
                if !row_used[r] && a[r * k + t].abs() > best_abs {
                    best_abs = a[r * k + t].abs();
                    best = r;
                }
            }
            if best == NONE {
                return false;
            }
            row_used[best] = true;
            piv_row[t] = best;
            let p = 1.0 / a[best * k + t];
            for c in t..k {
                a[best * k + c] *= p;
            }
            for c in 0..k {
                inv[best * k + c] *= p;
            }
            let prow_a: Vec<f64> = a[best * k + t..best * k + k].to_vec();
            let prow_i: Vec<f64> = inv[best * k..best * k + k].to_vec();
            for r in 0..k {
                if r == best {
                    continue;
                }
                let f = a[r * k + t];
                if f == 0.0 {
                    continue;
                }
                for (d, s) in a[r * k + t..r * k + k].iter_mut().zip(&prow_a) {
                    *d -= f * s;
                }
                for (d, s) in inv[r * k..r * k + k].iter_mut().zip(&prow_i) {
                    *d -= f * s;
                }
            }
        }
        // rows of S_S⁻¹, one per structural basic
        let mut ss_inv = vec![0.0; k * k];
        for t in 0..k {
            let r = piv_row[t];
            ss_inv[t * k..t * k + k].copy_from_slice(&inv[r * k..r * k + k]);
        }
        self.binv.iter_mut().for_each(|v| *v = 0.0);
        for (t, &p) in structural.iter().enumerate() {
            for (i, &r) in rows_s.iter().enumerate() {
                self.binv[p * m + r] = ss_inv[t * k + i];
            }
        }
        // a basic logical of row r0 gets (row r0 of S) · S_S⁻¹ and −1 on r0
        let mut tpos = vec![NONE; n];
        for (t, &p) in structural.iter().enumerate() {
            tpos[self.basic[p]] = t;
        }
        let mut acc = vec![0.0; k];
        for p in 0..m {
            let v = self.basic[p];
            if v < n {
                continue;
            }
            let r0 = v - n;
            acc.iter_mut().for_each(|x| *x = 0.0);
            let mut any = false;
            for &(j, c) in &self.model.rows[r0].coeffs {
                if c != 0.0 && tpos[j] != NONE {
                    any = true;
                    let t = tpos[j];
                    for (x, s) in acc.iter_mut().zip(&ss_inv[t * k..t * k + k]) {
                        *x += c * s;
                    }
                }
            }
            if any {
                for (i, &r) in rows_s.iter().enumerate() {
                    self.binv[p * m + r] = acc[i];
                }
            }
            self.binv[p * m + r0] = -1.0;
        }
        true
    }

    fn refactor_dense(&mut self) {
        let (n, m) = (self.n, self.m);
        loop {
            let mut a = vec![0.0; m * m];
            for (k, &v) in self.basic.iter().enumerate() {
                if v < n {
                    for &(r, c) in &self.col_rows[v] {
                        a[r * m + k] += c;
                    }
                } else {
                    a[(v - n) * m + k] = -1.0;
                }
            }
            let mut inv = vec![0.0; m * m];
            for i in 0..m {
                inv[i * m + i] = 1.0;
            }
            let mut row_used = vec![false; m];
            let mut piv_row = vec![NONE; m];
            let mut dependent = Vec::new();
            for k in 0..m {
                let mut best = NONE;
                let mut best_abs = 1e-11;
                for r in 0..m {
                    if !row_used[r] && a[r * m + k].abs() > best_abs {
                        best_abs = a[r * m + k].abs();
                        best = r;
                    }
                }
                if best == NONE {
                    dependent.push(k);
                    continue;
                }
                row_used[best] = true;
                piv_row[k] = best;
                let p = 1.0 / a[best * m + k];
                for c in k..m {
                    a[best * m + c] *= p;
                }
                for c in 0..m {
                    inv[best * m + c] *= p;
                }
                let prow_a: Vec<f64> = a[best * m + k..best * m + m].to_vec();
                let prow_i: Vec<f64> = inv[best * m..best * m + m].to_vec();
                for r in 0..m {
                    if r == best {
                        continue;
                    }
                    let f = a[r * m + k];
                    if f == 0.0 {
                        continue;
                    }
                    for (d, s) in a[r * m + k..r * m + m].iter_mut().zip(&prow_a) {
                        *d -= f * s;
                    }
                    for (d, s) in inv[r * m..r * m + m].iter_mut().zip(&prow_i) {
                        *d -= f * s;
                    }
                }
            }
            if dependent.is_empty() {
                for k in 0..m {
                    let r = piv_row[k];
                    self.binv[k * m..k * m + m].copy_from_slice(&inv[r * m..r * m + m]);
                }
                return;
            }
            let free_rows: Vec<usize> =
                (0..m).filter(|&r| !row_used[r] && self.pos[n + r] == NONE).collect();
            for (k, r) in dependent.into_iter().zip(free_rows) {
                let old = self.basic[k];
                let logical = n + r;
                self.make_nonbasic_at_bound(old);
                self.basic[k] = logical;
                self.pos[logical] = k;
                self.state[logical] = VarStatus::Basic;
            }
        }
    }

    fn recompute_basics(&mut self) {
        let (n, m) = (self.n, self.m);
        let mut v = vec![0.0; m];
        for j in 0..n {
            if self.state[j] != VarStatus::Basic && self.x[j] != 0.0 {
                for &(r, a) in &self.col_rows[j] {
                    v[r] += a * self.x[j];
                }
            }
        }
        for i in 0..m {
            if self.state[n + i] != VarStatus::Basic {
                v[i] -= self.x[n + i];
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..p * m + m];
            let s: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            self.x[self.basic[p]] = -s;
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let xv = self.x[j];
        (self.lb(j) - xv).max(xv - self.ub(j)).max(0.0)
    }

    fn column(&self, q: usize, out: &mut [f64]) {
        let m = self.m;
        out.iter_mut().for_each(|v| *v = 0.0);
        if q < self.n {
            for &(r, a) in &self.col_rows[q] {
                for i in 0..m {
                    out[i] += self.binv[i * m + r] * a;
                }
            }
        } else {
            let r = q - self.n;
            for i in 0..m {
                out[i] = -self.binv[i * m + r];
            }
        }
    }

    /// One simplex iteration in phase 1 (when any basic is infeasible) or phase 2.
    fn iterate(&mut self, bland: bool, alpha: &mut [f64], pi: &mut [f64]) -> Step {
        let (n, m) = (self.n, self.m);
        let ftol = self.opts.feas_tol;
        let mut phase1 = false;
        let mut cb = vec![0.0; m];
        for p in 0..m {
            let b = self.basic[p];
            let xv = self.x[b];
            if xv < self.lb(b) - ftol {
                cb[p] = -1.0;
                phase1 = true;
            } else if xv > self.ub(b) + ftol {
                cb[p] = 1.0;
                phase1 = true;
            }
        }
        if !phase1 {
            for p in 0..m {
                cb[p] = self.cost(self.basic[p]);
            }
        }
        pi.iter_mut().for_each(|v| *v = 0.0);
        for p in 0..m {
            let c = cb[p];
            if c != 0.0 {
                for (d, s) in pi.iter_mut().zip(&self.binv[p * m..p * m + m]) {
                    *d += c * s;
                }
            }
        }

        // pricing
        let dtol = self.opts.dual_tol;
        let mut enter = NONE;
        let mut enter_dir = 0.0;
        let mut best: f64 = 0.0;
        for j in 0..n + m {
            let st = self.state[j];
            if st == VarStatus::Basic {
                continue;
            }
            if self.lb(j) == self.ub(j) {
                continue;
            }
            let d = if j < n {
                let c = if phase1 { 0.0 } else { self.cost(j) };
                c - self.col_rows[j].iter().map(|&(r, a)| pi[r] * a).sum::<f64>()
            } else {
                pi[j - n]
            };
            let dir = match st {
                VarStatus::AtLower if d < -dtol => 1.0,
                VarStatus::AtUpper if d > dtol => -1.0,
                VarStatus::Free if d.abs() > dtol => -d.signum(),
                _ => continue,
            };
            if bland {
                enter = j;
                enter_dir = dir;
                break;
            }
            if d.abs() > best {
                best = d.abs();
                enter = j;
                enter_dir = dir;
            }
        }
        if enter == NONE {
            return if phase1 { Step::Infeasible } else { Step::Optimal };
        }
        let q = enter;
        let dir = enter_dir;
        self.column(q, alpha);

        // Harris two-pass ratio test
        let ptol = self.opts.pivot_tol;
        let allowed = |s: &Self, b: usize| -> (f64, f64) {
            let (lo, hi) = (s.lb(b), s.ub(b));
            if !phase1 {
                return (lo, hi);
            }
            let xv = s.x[b];
            if xv < lo - ftol {
                (f64::NEG_INFINITY, lo)
            } else if xv > hi + ftol {
                (hi, f64::INFINITY)
            } else {
                (lo, hi)
            }
        };
        let flip = self.ub(q) - self.lb(q);
        let mut theta_max = f64::INFINITY;
        for p in 0..m {
            let g = -dir * alpha[p];
            if g.abs() <= ptol {
                continue;
            }
            let b = self.basic[p];
            let (lo, hi) = allowed(self, b);
            let t = if g > 0.0 {
                if !hi.is_finite() {
                    continue;
                }
                (hi + ftol - self.x[b]) / g
            } else {
                if !lo.is_finite() {
                    continue;
                }
                (lo - ftol - self.x[b]) / g
            };
            theta_max = theta_max.min(t);
        }
        let mut leave = NONE;
        let mut leave_t = f64::INFINITY;
        let mut leave_g: f64 = 0.0;
        let mut min_t = f64::INFINITY;
        for p in 0..m {
            let g = -dir * alpha[p];
            if g.abs() <= ptol {
                continue;
            }
            let b = self.basic[p];
            let (lo, hi) = allowed(self, b);
            let bound = if g > 0.0 { hi } else { lo };
            if !bound.is_finite() {
                continue;
            }
            let t = ((bound - self.x[b]) / g).max(0.0);
            if t > theta_max {
                continue;
            }
            min_t = min_t.min(t);
            let better = if bland {
                leave == NONE || t < leave_t - 1e-12 || (t <= leave_t + 1e-12 && b < self.basic[leave])
            } else {
                g.abs() > leave_g.abs()
            };
            if better {
                leave = p;
                leave_t = t;
                leave_g = g;
            }
        }
        if flip.is_finite() && flip <= theta_max.max(0.0) && flip <= min_t {
            // bound flip, basis unchanged
            self.x[q] += dir * flip;
            self.state[q] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
            self.x[q] = if dir > 0.0 { self.ub(q) } else { self.lb(q) };
            for p in 0..m {
                let g = -dir * alpha[p];
                if g != 0.0 {
                    self.x[self.basic[p]] += g * flip;
                }
            }
            return Step::Moved { degenerate: flip <= DEGENERATE_STEP };
        }
        if leave == NONE {
            return Step::Unbounded;
        }
        let theta = leave_t;
        let out = self.basic[leave];
        let (lo, hi) = allowed(self, out);
        let hit = if leave_g > 0.0 { hi } else { lo };
        self.x[q] += dir * theta;
        for p in 0..m {
            let g = -dir * alpha[p];
            if g != 0.0 {
                self.x[self.basic[p]] += g * theta;
            }
        }
        self.x[out] = hit;
        self.state[out] = if hit == self.lb(out) { VarStatus::AtLower } else { VarStatus::AtUpper };
        self.pos[out] = NONE;

        // product-form update of the inverse
        let pr = alpha[leave];
        let row: Vec<f64> = self.binv[leave * m..leave * m + m].iter().map(|v| v / pr).collect();
        for p in 0..m {
            let f = alpha[p];
            if p == leave || f == 0.0 {
                continue;
            }
            for (d, s) in self.binv[p * m..p * m + m].iter_mut().zip(&row) {
                *d -= f * s;
            }
        }
        self.binv[leave * m..leave * m + m].copy_from_slice(&row);
        self.basic[leave] = q;
        self.pos[q] = leave;
        self.state[q] = VarStatus::Basic;
        self.since_refactor += 1;
        Step::Moved { degenerate: theta <= DEGENERATE_STEP }
    }

    fn reduced_costs(&self, pi: &mut [f64], d: &mut [f64]) {
        let (n, m) = (self.n, self.m);
        pi.iter_mut().for_each(|v| *v = 0.0);
        for p in 0..m {
            let c = self.cost(self.basic[p]);
            if c != 0.0 {
                for (t, s) in pi.iter_mut().zip(&self.binv[p * m..p * m + m]) {
                    *t += c * s;
                }
            }
        }
        for j in 0..n + m {
            d[j] = if self.state[j] == VarStatus::Basic {
                0.0
            } else if j < n {
                self.cost(j) - self.col_rows[j].iter().map(|&(r, a)| pi[r] * a).sum::<f64>()
            } else {
                pi[j - n]
            };
        }
    }

    /// Moves boxed nonbasics to the bound matching the sign of their reduced
    /// cost. Returns false when some nonbasic cannot be made dual feasible.
    fn make_dual_feasible(&mut self, d: &[f64]) -> bool {
        let tol = self.opts.dual_tol;
        let mut ok = true;
        for j in 0..self.n + self.m {
            let st = self.state[j];
            if st == VarStatus::Basic || self.lb(j) == self.ub(j) {
                continue;
            }
            let (lo, hi) = (self.lb(j), self.ub(j));
            match st {
                VarStatus::AtLower if d[j] < -tol => {
                    if hi.is_finite() {
                        self.state[j] = VarStatus::AtUpper;
                        self.x[j] = hi;
                    } else {
                        ok = false;
                    }
                }
                VarStatus::AtUpper if d[j] > tol => {
                    if lo.is_finite() {
                        self.state[j] = VarStatus::AtLower;
                        self.x[j] = lo;
                    } else {
                        ok = false;
                    }
                }
                VarStatus::Free if d[j].abs() > tol => ok = false,
                _ => {}
            }
        }
        ok
    }

    /// Dual simplex pivots from a dual feasible basis until the basics are
    /// within bounds. Returns `Some(Infeasible)` when a row proves primal
    /// infeasibility, `None` otherwise (including when it gives up).
    fn dual_phase(&mut self, iterations: &mut usize, limit: usize) -> Option<Status> {
        let (n, m) = (self.n, self.m);
        if m == 0 {
            return None;
        }
        let ftol = self.opts.feas_tol;
        let dtol = self.opts.dual_tol;
        let ptol = self.opts.pivot_tol;
        let mut pi = vec![0.0; m];
        let mut d = vec![0.0; n + m];
        let mut alpha = vec![0.0; m];
        let mut row = vec![0.0; n + m];
        self.reduced_costs(&mut pi, &mut d);
        if !self.make_dual_feasible(&d) {
            return None;
        }
        self.recompute_basics();
        let mut verified = false;
        loop {
            if *iterations >= limit {
                return None;
            }
            if self.since_refactor >= self.opts.refactor_interval.max(m / 2) {
                self.refactor();
                self.recompute_basics();
            }
            // leaving row: dual steepest edge, infeasibility² / ‖row of B⁻¹‖²
            let mut leave = NONE;
            let mut worst = 0.0;
            for p in 0..m {
                let v = self.infeasibility(self.basic[p]);
                if v > ftol {
                    let w: f64 = self.binv[p * m..p * m + m].iter().map(|a| a * a).sum();
                    let score = v * v / w.max(1e-12);
                    if score > worst {
                        worst = score;
                        leave = p;
                    }
                }
            }
            if leave == NONE {
                return None;
            }
            let out = self.basic[leave];
            let below = self.x[out] < self.lb(out);
            let target = if below { self.lb(out) } else { self.ub(out) };
            self.reduced_costs(&mut pi, &mut d);
            let rho = &self.binv[leave * m..leave * m + m];
            for j in 0..n + m {
                row[j] = if self.state[j] == VarStatus::Basic {
                    0.0
                } else if j < n {
                    self.col_rows[j].iter().map(|&(r, a)| rho[r] * a).sum()
                } else {
                    -rho[j - n]
                };
            }
            // ratio test with a Harris-style tolerance pass
            let eligible = |j: usize, a: f64, s: &Self| -> bool {
                if a.abs() <= ptol || s.lb(j) == s.ub(j) {
                    return false;
                }
                match s.state[j] {
                    VarStatus::AtLower => (a < 0.0) == below,
                    VarStatus::AtUpper => (a > 0.0) == below,
                    VarStatus::Free => true,
                    VarStatus::Basic => false,
                }
            };
            let mut bound = f64::INFINITY;
            for j in 0..n + m {
                if eligible(j, row[j], self) {
                    bound = bound.min((d[j].abs() + dtol) / row[j].abs());
                }
            }
            if !bound.is_finite() {
                if !verified && self.since_refactor > 0 {
                    verified = true;
                    self.refactor();
                    self.recompute_basics();
                    continue;
                }
                return Some(Status::Infeasible);
            }
            let mut enter = NONE;
            let mut best = 0.0;
            for j in 0..n + m {
                if eligible(j, row[j], self) && d[j].abs() / row[j].abs() <= bound && row[j].abs() > best {
                    best = row[j].abs();
                    enter = j;
                }
            }
            let q = enter;
            self.column(q, &mut alpha);
            let pr = alpha[leave];
            if pr.abs() <= ptol || (pr - row[q]).abs() > 1e-7 * (1.0 + pr.abs()) {
                // inconsistent pivot: refresh the factorization and retry once
                if verified {
                    return None;
                }
                verified = true;
                self.refactor();
                self.recompute_basics();
                continue;
            }
            verified = false;
            let delta = (self.x[out] - target) / pr;
            self.x[q] += delta;
            for p in 0..m {
                if alpha[p] != 0.0 {
                    self.x[self.basic[p]] -= alpha[p] * delta;
                }
            }
            self.x[out] = target;
            self.state[out] = if below { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.pos[out] = NONE;
            let r: Vec<f64> = self.binv[leave * m..leave * m + m].iter().map(|v| v / pr).collect();
            for p in 0..m {
                let f = alpha[p];
                if p == leave || f == 0.0 {
                    continue;
                }
                for (t, s) in self.binv[p * m..p * m + m].iter_mut().zip(&r) {
                    *t -= f * s;
                }
            }
            self.binv[leave * m..leave * m + m].copy_from_slice(&r);
            self.basic[leave] = q;
            self.pos[q] = leave;
            self.state[q] = VarStatus::Basic;
            self.since_refactor += 1;
            *iterations += 1;
        }
    }

    fn residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for (i, r) in self.model.rows.iter().enumerate() {
            let act = r.activity(&self.x[..n]);
            worst = worst.max((act - self.x[n + i]).abs());
        }
        worst
    }

    /// Solves from the current basis.
    pub fn solve(&mut self) -> LpSolution {
        let (n, m) = (self.n, self.m);
        let limit = self.opts.max_iterations.unwrap_or(10_000 + 50 * (n + m));
        let mut alpha = vec![0.0; m];
        let mut pi = vec![0.0; m];
        let mut iterations = 0;
        let mut degenerate_run = 0;
        let mut audits = 0;
        if self.since_refactor > 0 && self.since_refactor >= self.opts.refactor_interval {
            self.refactor();
        }
        self.recompute_basics();
        let infeasible = self.basic.iter().any(|&b| self.infeasibility(b) > self.opts.feas_tol);
        if infeasible && self.dual_phase(&mut iterations, limit) == Some(Status::Infeasible) {
            let values = self.x[..n].to_vec();
            let objective = self.model.objective(&values);
            return LpSolution { status: Status::Infeasible, values, objective, iterations };
        }
        let status = loop {
            if iterations >= limit {
                break Status::IterationLimit;
            }
            if self.since_refactor >= self.opts.refactor_interval.max(m / 2) {
                self.refactor();
                self.recompute_basics();
            }
            let bland = degenerate_run >= self.opts.bland_after;
            match self.iterate(bland, &mut alpha, &mut pi) {
                Step::Moved { degenerate } => {
                    iterations += 1;
                    degenerate_run = if degenerate { degenerate_run + 1 } else { 0 };
                }
                terminal => {
                    // audit against a fresh factorization before trusting the verdict
                    let drift = self.residual();
                    let bad_bounds = self.basic.iter().any(|&b| self.infeasibility(b) > 10.0 * self.opts.feas_tol);
                    let suspicious = drift > self.opts.feas_tol
                        || (matches!(terminal, Step::Optimal) && bad_bounds)
                        || (!matches!(terminal, Step::Optimal) && self.since_refactor > 0);
                    if suspicious && audits < 3 {
                        audits += 1;
                        self.refactor();
                        self.recompute_basics();
                        continue;
                    }
                    break match terminal {
                        Step::Optimal => Status::Optimal,
                        Step::Infeasible => Status::Infeasible,
                        Step::Unbounded => Status::Unbounded,
                        Step::Moved { .. } => unreachable!(),
                    };
                }
            }
        };
        let values = self.x[..n].to_vec();
        let objective = self.model.objective(&values);
        LpSolution { status, values, objective, iterations }
    }
}

impl LpModel {
    /// Solves a copy of this model, optionally starting from `warm`.
    pub fn solve(&self, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
        let mut s = match warm {
            Some(b) => Simplex::with_basis(self.clone(), b)?,
            None => Simplex::new(self.clone()),
        };
        Ok(s.solve())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-7
    }

    #[test]
    fn lower_bound_row() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, 10.0, 1.0);
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Ge, 3.0)).unwrap();
        let s = m.solve(None).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!(approx(s.objective, 3.0));
    }

    #[test]
    fn infeasible_pair() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, 10.0, 1.0);
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Le, 1.0)).unwrap();
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Ge, 2.0)).unwrap();
        assert_eq!(m.solve(None).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn unbounded_column() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, f64::INFINITY, -1.0);
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Ge, 1.0)).unwrap();
        assert_eq!(m.solve(None).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn classic_two_variable() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2,6)
        let mut m = LpModel::new();
        let x = m.add_column(0.0, f64::INFINITY, -3.0);
        let y = m.add_column(0.0, f64::INFINITY, -5.0);
        m.add_row(Row::new(vec![(x, 1.0)], Sense::Le, 4.0)).unwrap();
        m.add_row(Row::new(vec![(y, 2.0)], Sense::Le, 12.0)).unwrap();
        m.add_row(Row::new(vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0)).unwrap();
        let s = m.solve(None).unwrap();
        assert!(approx(s.objective, -36.0));
        assert!(approx(s.values[x], 2.0) && approx(s.values[y], 6.0));
    }

    #[test]
    fn warm_start_after_row_addition() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, 1.0, -1.0);
        let y = m.add_column(0.0, 1.0, -1.0);
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.5)).unwrap();
        let mut s = Simplex::new(m);
        let first = s.solve();
        assert!(approx(first.objective, -1.5));
        s.add_rows(vec![Row::new(vec![(x, 1.0), (y, -1.0)], Sense::Eq, 0.0)]).unwrap();
        let second = s.solve();
        assert_eq!(second.status, Status::Optimal);
        assert!(approx(second.objective, -1.5));
        assert!(approx(second.values[x], 0.75));
        s.add_rows(vec![Row::new(vec![(x, 1.0)], Sense::Le, 0.5)]).unwrap();
        let third = s.solve();
        assert!(approx(third.objective, -1.0));
        assert!(third.objective >= second.objective - 1e-9);
    }

    #[test]
    fn exported_basis_restarts_without_pivots() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, f64::INFINITY, 2.0);
        let y = m.add_column(0.0, f64::INFINITY, 3.0);
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Sense::Ge, 4.0)).unwrap();
        m.add_row(Row::new(vec![(x, 1.0), (y, -1.0)], Sense::Le, 2.0)).unwrap();
        let mut s = Simplex::new(m.clone());
        let sol = s.solve();
        let again = m.solve(Some(&s.basis())).unwrap();
        assert_eq!(again.iterations, 0);
        assert!(approx(again.objective, sol.objective));
        assert!(approx(sol.objective, 9.0));
    }

    #[test]
    fn bound_changes_are_respected() {
        let mut m = LpModel::new();
        let x = m.add_column(0.0, 1.0, -2.0);
        let y = m.add_column(0.0, 1.0, -1.0);
        m.add_row(Row::new(vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0)).unwrap();
        let mut s = Simplex::new(m);
        assert!(approx(s.solve().objective, -2.0));
        s.set_col_bounds(x, 0.0, 0.0).unwrap();
        assert!(approx(s.solve().objective, -1.0));
        s.set_col_bounds(x, 0.0, 1.0).unwrap();
        s.set_col_bounds(y, 1.0, 1.0).unwrap();
        assert!(approx(s.solve().objective, -1.0));
    }

    #[test]
    fn bad_basis_shape() {
        let mut m = LpModel::new();
        m.add_column(0.0, 1.0, 1.0);
        let b = Basis { status: vec![VarStatus::Basic] };
        assert!(matches!(Simplex::with_basis(m, &b), Err(LpError::BasisShape { .. })));
    }

    #[test]
    fn blocked_inverse_matches_dense() {
        let mut m = LpModel::new();
        for j in 0..4 {
            m.add_column(0.0, 5.0, -(j as f64) - 1.0);
        }
        m.add_row(Row::new(vec![(0, 1.0), (1, 2.0), (2, 1.0)], Sense::Le, 6.0)).unwrap();
        m.add_row(Row::new(vec![(1, 1.0), (3, -1.0)], Sense::Ge, -2.0)).unwrap();
        m.add_row(Row::new(vec![(0, 3.0), (3, 1.0)], Sense::Le, 7.0)).unwrap();
        m.add_row(Row::new(vec![(2, 1.0), (3, 1.0)], Sense::Le, 4.0)).unwrap();
        let mut s = Simplex::new(m);
        assert_eq!(s.solve().status, Status::Optimal);
        assert!(s.basic.iter().any(|&b| b < s.n));
        assert!(s.refactor_blocked());
        let blocked = s.binv.clone();
        s.refactor_dense();
        for (a, b) in blocked.iter().zip(&s.binv) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
