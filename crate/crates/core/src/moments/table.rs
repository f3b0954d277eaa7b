use crate::error::{Error, Result};
use crate::field::PhaseField;

/// All moments `A_{m,n}` with `m + n ≤ N`, stored order by order:
/// `(A_{0,0}), (A_{1,0}, A_{0,1}), (A_{2,0}, A_{1,1}, A_{0,2}), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    order: usize,
    values: Vec<f64>,
}

#[inline]
fn slot(m: usize, n: usize) -> usize {
    let k = m + n;
    k * (k + 1) / 2 + n
}

impl MomentTable {
    pub fn zeros(order: usize) -> Self {
        MomentTable {
            order,
            values: vec![0.0; Self::len_for(order)],
        }
    }

    /// Number of entries in a table of the given order.
    pub fn len_for(order: usize) -> usize {
        (order + 1) * (order + 2) / 2
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(order);
        for k in 0..=order {
            for n in 0..=k {
                t.values[slot(k - n, n)] = f(k - n, n);
            }
        }
        t
    }

    /// Rebuilds a table from its flat storage (as produced by [`Self::as_slice`]).
    pub fn from_flat(order: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != Self::len_for(order) {
            return Err(Error::Format(format!(
                "moment table of order {order} needs {} values, got {}",
                Self::len_for(order),
                values.len()
            )));
        }
        Ok(MomentTable { order, values })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `A_{m,n}`; panics if `m + n` exceeds the order.
    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        assert!(
            m + n <= self.order,
            "A_{{{m},{n}}} beyond order {}",
            self.order
        );
        self.values[slot(m, n)]
    }

    pub fn try_get(&self, m: usize, n: usize) -> Result<f64> {
        if m + n > self.order {
            return Err(Error::IndexOutOfRange(format!(
                "A_{{{m},{n}}} beyond order {}",
                self.order
            )));
        }
        Ok(self.values[slot(m, n)])
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, value: f64) {
        assert!(
            m + n <= self.order,
            "A_{{{m},{n}}} beyond order {}",
            self.order
        );
        self.values[slot(m, n)] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.values[0]
    }

    /// Spatial moments `R_j = A_{j,0}`, `j = 0..=N`.
    pub fn density_moments(&self) -> Vec<f64> {
        (0..=self.order).map(|j| self.get(j, 0)).collect()
    }

    /// Entries of one order, `(A_{k,0}, A_{k-1,1}, …, A_{0,k})`.
    pub fn block(&self, k: usize) -> &[f64] {
        let start = slot(k, 0);
        &self.values[start..start + k + 1]
    }

    /// The same moments truncated to a lower order.
    pub fn truncated(&self, order: usize) -> Self {
        let order = order.min(self.order);
        MomentTable {
            order,
            values: self.values[..Self::len_for(order)].to_vec(),
        }
    }

    /// Column labels `A_m_n` in storage order, skipping orders below `from`.
    pub fn labels(order: usize, from: usize) -> Vec<String> {
        let mut out = Vec::new();
        for k in from..=order {
            for n in 0..=k {
                out.push(format!("A_{}_{}", k - n, n));
            }
        }
        out
    }
}

/// Trapezoid moments of `f` up to total order `order`.
pub fn compute_moments(f: &PhaseField, order: usize) -> MomentTable {
    let xg = f.x_grid();
    let vg = f.v_grid();
    let wx = xg.trapezoid_weights();
    let wv = vg.trapezoid_weights();
    let vs = vg.nodes();
    let xs = xg.nodes();
    let vals = f.values();

    // g[i][n] = Σ_j w_j v_j^n f_ij
    let mut g = vec![vec![0.0; order + 1]; xg.len()];
    for (i, gi) in g.iter_mut().enumerate() {
        let row = vals.row(i);
        for (j, &fij) in row.iter().enumerate() {
            if fij == 0.0 {
                continue;
            }
            let mut p = wv[j] * fij;
            for gn in gi.iter_mut() {
                *gn += p;
                p *= vs[j];
            }
        }
    }

    let mut table = MomentTable::zeros(order);
    for (i, gi) in g.iter().enumerate() {
        let mut xp = wx[i];
        for m in 0..=order {
            for n in 0..=order - m {
                table.values[slot(m, n)] += xp * gi[n];
            }
            xp *= xs[i];
        }
    }
    table
}
