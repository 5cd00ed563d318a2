//! Coordinates on `H₁(S, V; ℤ)` for a triangulated surface.
//!
//! A dual spanning tree is peeled leaf first: the tree edge of each
//! triangle equals minus the other two sides modulo boundaries, so every
//! edge is an integer combination of the `E − F + 1` non-tree edges, which
//! form a basis.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::geom::Vec2;
use crate::scalar::Scalar;
use crate::surface::{Chain, HalfEdge, Surface};

#[derive(Debug, Clone)]
pub struct Frame {
    gens: Vec<u32>,
    index: HashMap<u32, usize>,
    tree: HashMap<u32, Vec<i64>>,
}

impl Frame {
    pub fn new<K: Scalar>(s: &Surface<K>) -> Self {
        let n = s.num_triangles();
        let mut parent: Vec<Option<HalfEdge>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut tree_ids = std::collections::HashSet::new();
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(t) = queue.pop_front() {
            order.push(t);
            for e in 0..3 {
                let p = s.partner(HalfEdge::new(t, e));
                if !seen[p.t] {
                    seen[p.t] = true;
                    parent[p.t] = Some(p);
                    tree_ids.insert(s.edge_ref(p).id);
                    queue.push_back(p.t);
                }
            }
        }
        let mut gens: Vec<u32> = s
            .half_edges()
            .map(|h| s.edge_ref(h))
            .filter(|r| r.fwd && !tree_ids.contains(&r.id))
            .map(|r| r.id)
            .collect();
        gens.sort_unstable();
        let index: HashMap<u32, usize> = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let rank = gens.len();
        let mut tree: HashMap<u32, Vec<i64>> = HashMap::new();
        for &t in order.iter().rev() {
            let Some(ph) = parent[t] else { continue };
            // Sum of the three sides of t is zero: side(ph) = −(other two).
            let mut v = vec![0i64; rank];
            for k in 1..3 {
                let h = HalfEdge::new(t, (ph.e + k) % 3);
                let r = s.edge_ref(h);
                let sub = match index.get(&r.id) {
                    Some(&i) => {
                        let mut u = vec![0; rank];
                        u[i] = 1;
                        u
                    }
                    None => tree[&r.id].clone(),
                };
                for (a, b) in v.iter_mut().zip(&sub) {
                    *a -= r.sign() * b;
                }
            }
            let r = s.edge_ref(ph);
            if !r.fwd {
                v.iter_mut().for_each(|a| *a = -*a);
            }
            tree.insert(r.id, v);
        }
        Frame { gens, index, tree }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn coords(&self, c: &Chain) -> Vec<i64> {
        let mut v = vec![0i64; self.rank()];
        for (id, &k) in &c.0 {
            if let Some(&i) = self.index.get(id) {
                v[i] += k;
            } else if let Some(e) = self.tree.get(id) {
                for (a, b) in v.iter_mut().zip(e) {
                    *a += k * b;
                }
            } else {
                panic!("edge {id} is not in this triangulation");
            }
        }
        v
    }

    pub fn chain(&self, coords: &[i64]) -> Chain {
        let mut c = Chain::new();
        for (&g, &k) in self.gens.iter().zip(coords) {
            c.add_term(g, k);
        }
        c
    }

    pub fn homologous(&self, a: &Chain, b: &Chain) -> bool {
        self.coords(a) == self.coords(b)
    }

    /// The unique class with the given holonomy and boundary coefficient,
    /// when holonomy plus boundary coefficient is injective on `H₁(S, V)`.
    pub fn solve_class<K: Scalar>(&self, s: &Surface<K>, hol: &Vec2<K>, bc: i64) -> Option<Chain> {
        let idx = s.edge_index();
        let rank = self.rank();
        let d = hol.x.rational_coords().len();
        // Rows: x and y coordinates over ℚ, then bc.
        let mut rows = vec![vec![BigRational::zero(); rank + 1]; 2 * d + 1];
        let mut fill = |j: usize, v: &Vec2<K>, b: i64| {
            for (k, q) in v.x.rational_coords().into_iter().enumerate() {
                rows[k][j] = q;
            }
            for (k, q) in v.y.rational_coords().into_iter().enumerate() {
                rows[d + k][j] = q;
            }
            rows[2 * d][j] = BigRational::from_integer(b.into());
        };
        for (j, &g) in self.gens.iter().enumerate() {
            let h = idx[&g];
            fill(j, s.vec(h), s.he_bc(h));
        }
        fill(rank, hol, bc);
        let sol = solve_unique(rows, rank)?;
        let mut ints = Vec::with_capacity(rank);
        for q in sol {
            if !q.is_integer() {
                return None;
            }
            ints.push(q.to_integer().to_i64()?);
        }
        Some(self.chain(&ints))
    }
}

/// Unique solution of an augmented system, or `None` if inconsistent or
/// underdetermined.
pub(crate) fn solve_unique(mut m: Vec<Vec<BigRational>>, n: usize) -> Option<Vec<BigRational>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < n || m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Rank over ℚ of a rational matrix given by rows.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Rank of the ℤ-module spanned by integer rows (equal to the rank over ℚ).
pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    let q: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    rational_rank(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::Q;
    use std::collections::BTreeMap;

    fn torus() -> Surface<Q> {
        let v = |x: i64, y: i64| Vec2::new(Q::from_integer(x.into()), Q::from_integer(y.into()));
        let sq = vec![v(0, 0), v(2, 0), v(2, 1), v(0, 1)];
        Surface::from_polygons(&[sq], &[((0, 0), (0, 2)), ((0, 1), (0, 3))], &[], &BTreeMap::new()).unwrap()
    }

    #[test]
    fn torus_rank_is_two() {
        let s = torus();
        let f = Frame::new(&s);
        assert_eq!(f.rank(), 2);
    }

    #[test]
    fn triangle_boundary_is_null() {
        let s = torus();
        let f = Frame::new(&s);
        for t in 0..s.num_triangles() {
            let c = s.path_chain(&[HalfEdge::new(t, 0), HalfEdge::new(t, 1), HalfEdge::new(t, 2)]);
            assert!(f.coords(&c).iter().all(|&x| x == 0));
        }
    }
}
