//! Small dense linear programs in standard form, solved by a revised simplex
//! method with an explicit basis inverse.
//!
//! Two clients share this solver: the cutting-plane master problems of the
//! convex maximizer and the optimal-transport oracle.

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 64;
const BLAND_AFTER_DEGENERATE: usize = 50;

/// `min cost . x` subject to `A x = rhs`, `x >= 0`. `A` is stored by columns.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub rows: usize,
    pub columns: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Simplex multipliers `y` with `cost_j - y . A_j >= 0` at optimality.
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Basic column per row. Indices `>= columns.len()` denote artificial columns
    /// kept basic at level zero on redundant rows.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(rows: usize) -> Self {
        Self {
            rows,
            columns: Vec::new(),
            rhs: vec![0.0; rows],
            cost: Vec::new(),
        }
    }

    pub fn push_column(&mut self, column: Vec<f64>, cost: f64) -> usize {
        debug_assert_eq!(column.len(), self.rows);
        self.columns.push(column);
        self.cost.push(cost);
        self.columns.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Solves from scratch with a phase-one start on artificial columns.
    pub fn solve(&self) -> Result<LpSolution> {
        let m = self.rows;
        let n = self.columns.len();
        let signs: Vec<f64> = self.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let mut columns: Vec<Vec<f64>> = self
            .columns
            .iter()
            .map(|c| c.iter().zip(&signs).map(|(a, s)| a * s).collect())
            .collect();
        let rhs: Vec<f64> = self.rhs.iter().zip(&signs).map(|(b, s)| b * s).collect();
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            columns.push(e);
        }
        let mut phase1_cost = vec![0.0; n];
        phase1_cost.extend(std::iter::repeat_n(1.0, m));

        let basis: Vec<usize> = (n..n + m).collect();
        let mut s = Simplex::new(&columns, &rhs, basis)?;
        let all: Vec<bool> = vec![true; n + m];
        s.run(&phase1_cost, &all)?;
        let infeas: f64 = s.basis.iter().zip(&s.xb).filter(|(&j, _)| j >= n).map(|(_, x)| x).sum();
        let scale = 1.0 + rhs.iter().map(|b| b.abs()).sum::<f64>();
        if infeas > 1e-8 * scale {
            return Err(Error::Infeasible);
        }
        // Drive artificial columns out of the basis where possible.
        for r in 0..m {
            if s.basis[r] < n {
                continue;
            }
            let mut entering = None;
            for j in 0..n {
                if s.basis.contains(&j) {
                    continue;
                }
                let u = s.direction(j);
                if u[r].abs() > 1e-9 {
                    entering = Some((j, u));
                    break;
                }
            }
            if let Some((j, u)) = entering {
                s.pivot(r, j, &u);
            }
        }
        let mut allowed = vec![true; n + m];
        for a in allowed.iter_mut().skip(n) {
            *a = false;
        }
        let mut cost = self.cost.clone();
        cost.extend(std::iter::repeat_n(0.0, m));
        s.run(&cost, &allowed)?;
        let mut sol = s.solution(&cost, n);
        for (y, sgn) in sol.duals.iter_mut().zip(&signs) {
            *y *= sgn;
        }
        Ok(sol)
    }

    /// Solves starting from a primal-feasible basis of original columns.
    pub fn solve_from_basis(&self, basis: &[usize]) -> Result<LpSolution> {
        let n = self.columns.len();
        if basis.len() != self.rows || basis.iter().any(|&j| j >= n) {
            return self.solve();
        }
        let mut s = match Simplex::new(&self.columns, &self.rhs, basis.to_vec()) {
            Ok(s) => s,
            Err(_) => return self.solve(),
        };
        if s.xb.iter().any(|&x| x < -1e-9) {
            return self.solve();
        }
        for x in s.xb.iter_mut() {
            *x = x.max(0.0);
        }
        let allowed = vec![true; n];
        s.run(&self.cost, &allowed)?;
        Ok(s.solution(&self.cost, n))
    }
}

struct Simplex<'a> {
    m: usize,
    columns: &'a [Vec<f64>],
    rhs: &'a [f64],
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl<'a> Simplex<'a> {
    fn new(columns: &'a [Vec<f64>], rhs: &'a [f64], basis: Vec<usize>) -> Result<Self> {
        let m = rhs.len();
        let mut s = Self {
            m,
            columns,
            rhs,
            basis,
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            pivots: 0,
            since_refactor: 0,
        };
        s.refactor()?;
        Ok(s)
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        // Gauss–Jordan on [B | I].
        let mut a = vec![0.0; m * 2 * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                a[i * 2 * m + k] = self.columns[j][i];
            }
        }
        for i in 0..m {
            a[i * 2 * m + m + i] = 1.0;
        }
        let w = 2 * m;
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))
                .unwrap();
            let p = a[piv * w + col];
            if p.abs() < 1e-13 {
                return Err(Error::NoConvergence {
                    iterations: self.pivots,
                });
            }
            if piv != col {
                for k in 0..w {
                    a.swap(piv * w + k, col * w + k);
                }
            }
            for k in 0..w {
                a[col * w + k] /= p;
            }
            for row in 0..m {
                if row == col {
                    continue;
                }
                let f = a[row * w + col];
                if f != 0.0 {
                    for k in 0..w {
                        a[row * w + k] -= f * a[col * w + k];
                    }
                }
            }
        }
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = a[i * w + m + k];
            }
        }
        for i in 0..m {
            self.xb[i] = (0..m).map(|k| self.binv[i * m + k] * self.rhs[k]).sum();
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn direction(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let col = &self.columns[j];
        (0..m)
            .map(|i| (0..m).map(|k| self.binv[i * m + k] * col[k]).sum())
            .collect()
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                for i in 0..m {
                    y[i] += c * self.binv[k * m + i];
                }
            }
        }
        y
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[f64]) {
        let m = self.m;
        let theta = self.xb[r] / u[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * u[i];
            }
        }
        self.xb[r] = theta;
        let ur = u[r];
        for k in 0..m {
            self.binv[r * m + k] /= ur;
        }
        for i in 0..m {
            if i == r || u[i] == 0.0 {
                continue;
            }
            let f = u[i];
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[r * m + k];
            }
        }
        self.basis[r] = q;
        self.pivots += 1;
        self.since_refactor += 1;
    }

    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        let n = self.columns.len();
        let cap = 200 + 50 * (n + self.m);
        let mut degenerate = 0usize;
        let mut in_basis = vec![false; n];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        let cost_scale = cost.iter().fold(1.0_f64, |a, c| a.max(c.abs()));
        for _ in 0..cap {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                for x in self.xb.iter_mut() {
                    if *x < 0.0 && *x > -1e-9 {
                        *x = 0.0;
                    }
                }
            }
            let y = self.duals(cost);
            let bland = degenerate >= BLAND_AFTER_DEGENERATE;
            let mut entering = None;
            let mut best = -REDUCED_COST_TOL * cost_scale;
            for j in 0..n {
                if in_basis[j] || !allowed[j] {
                    continue;
                }
                let d = cost[j] - y.iter().zip(&self.columns[j]).map(|(a, b)| a * b).sum::<f64>();
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };
            let u = self.direction(q);
            let mut leave: Option<usize> = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                if u[i] > PIVOT_TOL {
                    let t = self.xb[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some(l) => t < ratio - 1e-12 || (t <= ratio + 1e-12 && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        ratio = t;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(Error::Unbounded);
            };
            // Counted cumulatively so that Bland's rule, once engaged, stays engaged.
            if ratio <= 1e-12 {
                degenerate += 1;
            }
            in_basis[self.basis[r]] = false;
            in_basis[q] = true;
            self.pivot(r, q, &u);
        }
        Err(Error::NoConvergence { iterations: cap })
    }

    fn solution(&self, cost: &[f64], n_original: usize) -> LpSolution {
        let mut x = vec![0.0; n_original];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < n_original {
                x[j] = self.xb[k].max(0.0);
            }
        }
        let objective = x.iter().zip(cost).map(|(a, c)| a * c).sum();
        LpSolution {
            x,
            duals: self.duals(cost),
            objective,
            basis: self.basis.clone(),
            pivots: self.pivots,
        }
    }
}
