//! Finitely generated abelian groups `⊕ Z/n_i` (with `n_i = 0` for `Z`) and
//! their subgroups, via Hermite and Smith normal forms of integer lattices.

use std::fmt;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Hermite normal form of the row span: echelon rows with positive pivots
/// and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(rows: &[Vec<i128>], ncols: usize) -> Vec<Vec<i128>> {
    let mut rows: Vec<Vec<i128>> = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    let mut r = 0;
    for col in 0..ncols {
        loop {
            let Some(p) = (r..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].abs())
            else {
                break;
            };
            rows.swap(r, p);
            let mut clean = true;
            for i in (r + 1)..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col] / rows[r][col];
                    for c in col..ncols {
                        rows[i][c] -= q * rows[r][c];
                    }
                    if rows[i][col] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if r < rows.len() && rows[r][col] != 0 {
            if rows[r][col] < 0 {
                for x in rows[r].iter_mut() {
                    *x = -*x;
                }
            }
            let pivot = rows[r][col];
            for i in 0..r {
                let q = rows[i][col].div_euclid(pivot);
                if q != 0 {
                    for c in col..ncols {
                        rows[i][c] -= q * rows[r][c];
                    }
                }
            }
            r += 1;
        }
        rows.retain(|row| row.iter().any(|&x| x != 0));
        if r >= rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

fn pivot_of(row: &[i128]) -> usize {
    row.iter().position(|&x| x != 0).expect("nonzero row")
}

/// Coordinates of `v` in an HNF basis, if `v` lies in its span.
pub fn coordinates(basis: &[Vec<i128>], v: &[i128]) -> Option<Vec<i128>> {
    let mut v = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let c = pivot_of(row);
        if v[c] % row[c] != 0 {
            return None;
        }
        let q = v[c] / row[c];
        for (x, y) in v.iter_mut().zip(row) {
            *x -= q * y;
        }
        coords.push(q);
    }
    v.iter().all(|&x| x == 0).then_some(coords)
}

/// Diagonal of a Smith normal form, with `d_i | d_{i+1}`; length `min(rows, cols)`.
pub fn smith_diagonal(matrix: &[Vec<i128>], ncols: usize) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = matrix.to_vec();
    let nrows = a.len();
    let n = nrows.min(ncols);
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let p = a[t][t];
            let mut done = true;
            for i in (t + 1)..nrows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..ncols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    done = false;
                }
            }
            for j in (t + 1)..ncols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        diag.push(a.get(t).map_or(0, |row| row[t].abs()));
    }
    for i in 0..diag.len() {
        for j in (i + 1)..diag.len() {
            let (x, y) = (diag[i], diag[j]);
            if x == 0 && y != 0 {
                diag.swap(i, j);
            } else if x != 0 && y % x != 0 {
                let g = gcd(x, y);
                diag[i] = g;
                diag[j] = x / g * y;
            }
        }
    }
    diag
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Cyclic decomposition; `0` entries are copies of `Z`, trivial factors are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupStructure {
    invariants: Vec<u64>,
}

impl GroupStructure {
    pub fn new(mut invariants: Vec<u64>) -> Self {
        invariants.retain(|&d| d != 1);
        invariants.sort_by_key(|&d| if d == 0 { u64::MAX } else { d });
        GroupStructure { invariants }
    }

    pub fn trivial() -> Self {
        GroupStructure::default()
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn order(&self) -> Order {
        if self.invariants.contains(&0) {
            Order::Infinite
        } else {
            Order::Finite(self.invariants.iter().product())
        }
    }

    pub fn direct_sum(&self, other: &GroupStructure) -> GroupStructure {
        let mut v = self.invariants.clone();
        v.extend_from_slice(&other.invariants);
        GroupStructure::new(v)
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return f.write_str("0");
        }
        for (k, &d) in self.invariants.iter().enumerate() {
            if k > 0 {
                f.write_str(" ⊕ ")?;
            }
            if d == 0 {
                f.write_str("Z")?;
            } else {
                write!(f, "Z/{d}")?;
            }
        }
        Ok(())
    }
}

/// `⊕ Z/n_i` on an ordered list of summands.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CyclicSum {
    orders: Vec<u64>,
}

impl CyclicSum {
    pub fn new(orders: Vec<u64>) -> Self {
        CyclicSum { orders }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.iter().all(|&n| n == 1)
    }

    pub fn structure(&self) -> GroupStructure {
        GroupStructure::new(self.orders.clone())
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<i64> {
        let mut v = self.zero();
        v[i] = 1;
        self.reduce(&mut v);
        v
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (x, &n) in v.iter_mut().zip(&self.orders) {
            if n > 0 {
                *x = x.rem_euclid(n as i64);
            }
        }
    }

    pub fn reduced(&self, mut v: Vec<i64>) -> Vec<i64> {
        self.reduce(&mut v);
        v
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn scale(&self, k: i64, a: &[i64]) -> Vec<i64> {
        self.reduced(a.iter().map(|x| x * k).collect())
    }

    pub fn is_zero(&self, v: &[i64]) -> bool {
        self.reduced(v.to_vec()).iter().all(|&x| x == 0)
    }

    pub fn element_order(&self, v: &[i64]) -> Order {
        let mut acc: u64 = 1;
        for (&x, &n) in v.iter().zip(&self.orders) {
            if n == 0 {
                if x != 0 {
                    return Order::Infinite;
                }
            } else {
                let x = (x.rem_euclid(n as i64)) as u64;
                let g = gcd(x as i128, n as i128) as u64;
                let o = n / g;
                acc = acc / gcd(acc as i128, o as i128) as u64 * o;
            }
        }
        Order::Finite(acc)
    }

    fn relation_rows(&self) -> Vec<Vec<i128>> {
        self.orders
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| {
                let mut row = vec![0i128; self.rank()];
                row[i] = n as i128;
                row
            })
            .collect()
    }

    pub fn subgroup(&self, generators: &[Vec<i64>]) -> Subgroup {
        let mut rows = self.relation_rows();
        rows.extend(
            generators
                .iter()
                .map(|g| g.iter().map(|&x| x as i128).collect()),
        );
        Subgroup {
            group: self.clone(),
            basis: hnf(&rows, self.rank()),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.subgroup(&[])
    }

    pub fn whole(&self) -> Subgroup {
        let gens: Vec<Vec<i64>> = (0..self.rank()).map(|i| self.basis_vector(i)).collect();
        self.subgroup(&gens)
    }

    /// All elements, for finite groups of at most `limit` elements.
    pub fn enumerate(&self, limit: u64) -> Option<Vec<Vec<i64>>> {
        match self.structure().order() {
            Order::Finite(n) if n <= limit => {}
            _ => return None,
        }
        let mut out = vec![self.zero()];
        for (i, &n) in self.orders.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for v in &out {
                for c in 0..n as i64 {
                    let mut w = v.clone();
                    w[i] = c;
                    next.push(w);
                }
            }
            out = next;
        }
        Some(out)
    }
}

/// A subgroup, stored as its preimage lattice in `Z^r` (which contains the relations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    group: CyclicSum,
    basis: Vec<Vec<i128>>,
}

impl Subgroup {
    pub fn group(&self) -> &CyclicSum {
        &self.group
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        coordinates(&self.basis, &v).is_some()
    }

    pub fn join(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(self.group, other.group, "subgroups of different groups");
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subgroup {
            group: self.group.clone(),
            basis: hnf(&rows, self.group.rank()),
        }
    }

    pub fn with(&self, v: &[i64]) -> Subgroup {
        self.join(&self.group.subgroup(&[v.to_vec()]))
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.generators().iter().all(|g| other.contains(g))
    }

    /// `k·H`.
    pub fn scaled(&self, k: i64) -> Subgroup {
        let gens: Vec<Vec<i64>> = self.generators().iter().map(|g| self.group.scale(k, g)).collect();
        self.group.subgroup(&gens)
    }

    /// Reduced nonzero rows of the Hermite basis; they generate the subgroup.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        self.basis
            .iter()
            .map(|row| self.group.reduced(row.iter().map(|&x| x as i64).collect()))
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().is_empty()
    }

    /// Isomorphism type of the subgroup.
    pub fn structure(&self) -> GroupStructure {
        let rel = self.group.relation_rows();
        let coeffs: Vec<Vec<i128>> = rel
            .iter()
            .map(|r| coordinates(&self.basis, r).expect("relations lie in the lattice"))
            .collect();
        let m = self.basis.len();
        let diag = smith_diagonal(&coeffs, m);
        let mut inv: Vec<u64> = diag.iter().map(|&d| d as u64).collect();
        inv.resize(m, 0);
        GroupStructure::new(inv)
    }

    /// Isomorphism type of `G / H`.
    pub fn quotient_structure(&self) -> GroupStructure {
        let r = self.group.rank();
        let diag = smith_diagonal(&self.basis, r);
        let mut inv: Vec<u64> = diag.iter().map(|&d| d as u64).collect();
        inv.resize(r, 0);
        GroupStructure::new(inv)
    }

    pub fn order(&self) -> Order {
        self.structure().order()
    }
}

/// Kernel of `f: A → B` given by the images of the summand generators of `A`.
pub fn hom_kernel(source: &CyclicSum, target: &CyclicSum, images: &[Vec<i64>]) -> Subgroup {
    let (r, s) = (source.rank(), target.rank());
    assert_eq!(images.len(), r);
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let mut row = vec![0i128; s + r];
        for (j, &x) in img.iter().enumerate() {
            row[j] = x as i128;
        }
        row[s + i] = 1;
        rows.push(row);
    }
    for t in target.relation_rows() {
        let mut row = t;
        row.resize(s + r, 0);
        rows.push(row);
    }
    let reduced = hnf(&rows, s + r);
    let kernel_rows: Vec<Vec<i64>> = reduced
        .iter()
        .filter(|row| row[..s].iter().all(|&x| x == 0))
        .map(|row| row[s..].iter().map(|&x| x as i64).collect())
        .collect();
    source.subgroup(&kernel_rows)
}

/// Image of `f: A → B`.
pub fn hom_image(target: &CyclicSum, images: &[Vec<i64>]) -> Subgroup {
    target.subgroup(images)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_of_z8_by_4() {
        let g = CyclicSum::new(vec![8]);
        let h = g.subgroup(&[vec![4]]);
        assert_eq!(h.structure(), GroupStructure::new(vec![2]));
        assert_eq!(h.quotient_structure(), GroupStructure::new(vec![4]));
        assert!(h.contains(&[4]));
        assert!(!h.contains(&[2]));
    }

    #[test]
    fn kernel_of_multiplication() {
        // x ↦ x·ν on Z/8 → Z/2
        let a = CyclicSum::new(vec![8]);
        let b = CyclicSum::new(vec![2]);
        let k = hom_kernel(&a, &b, &[vec![1]]);
        assert_eq!(k.structure(), GroupStructure::new(vec![4]));
        assert!(k.contains(&[2]));
        assert!(!k.contains(&[1]));
    }

    #[test]
    fn integers() {
        let z = CyclicSum::new(vec![0]);
        let h = z.subgroup(&[vec![6], vec![4]]);
        assert_eq!(h.generators(), vec![vec![2]]);
        assert_eq!(h.quotient_structure(), GroupStructure::new(vec![2]));
        assert_eq!(h.structure().order(), Order::Infinite);
        assert_eq!(z.trivial_subgroup().quotient_structure().to_string(), "Z");
    }

    #[test]
    fn smith_normalizes_divisibility() {
        let d = smith_diagonal(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(d, vec![1, 6]);
    }

    #[test]
    fn mixed_group_orders() {
        let g = CyclicSum::new(vec![2, 8]);
        assert_eq!(g.element_order(&[1, 2]), Order::Finite(4));
        assert_eq!(g.whole().structure(), GroupStructure::new(vec![2, 8]));
        assert_eq!(g.enumerate(100).unwrap().len(), 16);
    }
}
