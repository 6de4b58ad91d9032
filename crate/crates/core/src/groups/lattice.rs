//! Subgroups of free abelian groups via Hermite normal form.

/// Echelon basis of the image lattice with the unimodular transform back to the source.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub dim: usize,
    /// Echelon rows; pivot entries positive.
    pub rows: Vec<Vec<i64>>,
    pub pivots: Vec<usize>,
    /// `rows[j] = sum_i transform[j][i] * generator_i`.
    pub transform: Vec<Vec<i64>>,
    /// Source rank minus lattice rank.
    pub defect: usize,
}

fn axpy(dst: &mut [i64], q: i64, src: &[i64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

impl Lattice {
    pub fn new(dim: usize, gens: &[Vec<i64>]) -> Self {
        let k = gens.len();
        let mut a: Vec<Vec<i64>> = gens.to_vec();
        let mut u: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        let mut top = 0;
        let mut pivots = Vec::new();
        for col in 0..dim {
            if top == k {
                break;
            }
            loop {
                let best = (top..k).filter(|&i| a[i][col] != 0).min_by_key(|&i| a[i][col].abs());
                let Some(p) = best else { break };
                a.swap(top, p);
                u.swap(top, p);
                let mut done = true;
                for i in top + 1..k {
                    if a[i][col] != 0 {
                        let q = a[i][col].div_euclid(a[top][col]);
                        let (head, tail) = a.split_at_mut(i);
                        axpy(&mut tail[0], q, &head[top]);
                        let (uh, ut) = u.split_at_mut(i);
                        axpy(&mut ut[0], q, &uh[top]);
                        if a[i][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if a[top][col] == 0 {
                continue;
            }
            if a[top][col] < 0 {
                a[top].iter_mut().for_each(|x| *x = -*x);
                u[top].iter_mut().for_each(|x| *x = -*x);
            }
            let d = a[top][col];
            for i in 0..top {
                let q = a[i][col].div_euclid(d);
                let (head, tail) = a.split_at_mut(top);
                axpy(&mut head[i], q, &tail[0]);
                let (uh, ut) = u.split_at_mut(top);
                axpy(&mut uh[i], q, &ut[0]);
            }
            pivots.push(col);
            top += 1;
        }
        a.truncate(top);
        u.truncate(top);
        Lattice { dim, rows: a, pivots, transform: u, defect: k - top }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Writes `g = v + r` with `v` in the lattice; returns (source coordinates of v, r).
    pub fn factor(&self, g: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let mut r = g.to_vec();
        let k = self.transform.first().map_or(0, |t| t.len());
        let mut coords = vec![0i64; k];
        for (j, row) in self.rows.iter().enumerate() {
            let p = self.pivots[j];
            let q = r[p].div_euclid(row[p]);
            if q != 0 {
                axpy(&mut r, q, row);
                for (c, t) in coords.iter_mut().zip(&self.transform[j]) {
                    *c += q * t;
                }
            }
        }
        (coords, r)
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn is_everything(&self) -> bool {
        self.is_full() && self.rows.iter().zip(&self.pivots).all(|(r, p)| r[*p] == 1)
    }

    /// All representatives when the index is finite.
    pub fn finite_reps(&self) -> Option<Vec<Vec<i64>>> {
        if !self.is_full() {
            return None;
        }
        let mut reps = vec![vec![0i64; self.dim]];
        for (row, p) in self.rows.iter().zip(&self.pivots) {
            let d = row[*p];
            let mut next = Vec::new();
            for r in &reps {
                for c in 0..d {
                    let mut v = r.clone();
                    v[*p] = c;
                    next.push(v);
                }
            }
            reps = next;
        }
        Some(reps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_and_factor() {
        let l = Lattice::new(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(l.rank(), 2);
        let (c, r) = l.factor(&[5, -4]);
        assert_eq!(r, vec![1, 2]);
        assert_eq!(c, vec![2, -2]);
        assert_eq!(l.finite_reps().unwrap().len(), 6);
    }

    #[test]
    fn dependent_generators_have_defect() {
        let l = Lattice::new(2, &[vec![1, 1], vec![2, 2]]);
        assert_eq!(l.defect, 1);
        assert!(!l.is_full());
    }

    #[test]
    fn mixed_lattice() {
        let l = Lattice::new(2, &[vec![2, 1], vec![0, 2]]);
        let (c, r) = l.factor(&[3, 3]);
        // (3,3) - (2,1) = (1,2), then (1,2) - (0,2) = (1,0)
        assert_eq!(r, vec![1, 0]);
        let mut back = r.clone();
        for (i, g) in [[2i64, 1], [0, 2]].iter().enumerate() {
            back[0] += c[i] * g[0];
            back[1] += c[i] * g[1];
        }
        assert_eq!(back, vec![3, 3]);
    }
}
