//! Surfaces assembled from vertical cylinders.
//!
//! A diagram lists upward vertical saddle connections and, for each
//! cylinder, its width, the saddle connections on its left and right
//! boundaries (bottom to top, starting at a chosen base point) and its
//! twist: the height of the right base point above the left one. Each strip
//! is triangulated by a zigzag between its two sides.

use crate::geom::Vec2;
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, HalfEdge, Label, Surface, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleSpec<K> {
    pub length: K,
    pub start: Label,
    pub end: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSpec<K> {
    pub width: K,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub twist: K,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram<K> {
    pub saddles: Vec<SaddleSpec<K>>,
    pub cylinders: Vec<CylinderSpec<K>>,
}

/// A built diagram with stable references to its distinguished edges.
#[derive(Debug, Clone)]
pub struct Built<K> {
    pub surface: Surface<K>,
    /// Each saddle connection, oriented upward.
    pub saddle: Vec<EdgeRef>,
    /// Each cylinder's base crossing, from the left base point to the right.
    pub crossing: Vec<EdgeRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("cylinder {0}: left and right boundaries have different lengths")]
    Circumference(usize),
    #[error("cylinder {0} has non-positive width")]
    Width(usize),
    #[error("saddle connection {0} must appear once on a left and once on a right boundary")]
    Incidence(usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Copy)]
enum Slot {
    /// Saddle connection, upward or downward.
    Saddle(usize, bool),
    /// Crossing `m` of cylinder `c`, left-to-right or reversed.
    Cross(usize, usize, bool),
}

impl<K: Scalar> Diagram<K> {
    pub fn circumference(&self, c: usize) -> K {
        self.cylinders[c].left.iter().fold(K::zero(), |a, &i| a + &self.saddles[i].length)
    }

    pub fn build(&self) -> Result<Built<K>, DiagramError> {
        let n = self.saddles.len();
        let (mut on_left, mut on_right) = (vec![0; n], vec![0; n]);
        for cyl in &self.cylinders {
            cyl.left.iter().for_each(|&i| on_left[i] += 1);
            cyl.right.iter().for_each(|&i| on_right[i] += 1);
        }
        if let Some(i) = (0..n).find(|&i| on_left[i] != 1 || on_right[i] != 1) {
            return Err(DiagramError::Incidence(i));
        }
        let mut tri: Vec<[Vec2<K>; 3]> = Vec::new();
        let mut label: Vec<[Label; 3]> = Vec::new();
        let mut slots: Vec<[Slot; 3]> = Vec::new();
        let mut crossings = Vec::new();
        for (ci, cyl) in self.cylinders.iter().enumerate() {
            if cyl.width.sign() <= 0 {
                return Err(DiagramError::Width(ci));
            }
            let c = self.circumference(ci);
            let cr = cyl.right.iter().fold(K::zero(), |a, &i| a + &self.saddles[i].length);
            if c != cr {
                return Err(DiagramError::Circumference(ci));
            }
            let heights = |side: &[usize], base: K| {
                let mut ys = vec![base];
                for &i in side {
                    let y = ys.last().unwrap().clone() + &self.saddles[i].length;
                    ys.push(y);
                }
                ys
            };
            let ly = heights(&cyl.left, K::zero());
            let ry = heights(&cyl.right, cyl.twist.clone());
            let lab = |side: &[usize], k: usize| {
                if k < side.len() {
                    self.saddles[side[k]].start
                } else {
                    self.saddles[side[k - 1]].end
                }
            };
            let (p, q) = (cyl.left.len(), cyl.right.len());
            let total = p + q;
            let (mut k, mut l) = (0, 0);
            let w = cyl.width.clone();
            for m in 0..total {
                let cross = Vec2::new(w.clone(), ry[l].clone() - &ly[k]);
                let next = if m + 1 == total { 0 } else { m + 1 };
                let left = k < p && (l == q || ly[k + 1].cmp_exact(&ry[l + 1]).is_le());
                if left {
                    let back = Vec2::new(-w.clone(), ly[k + 1].clone() - &ry[l]);
                    let down = Vec2::new(K::zero(), ly[k].clone() - &ly[k + 1]);
                    tri.push([cross, back, down]);
                    label.push([lab(&cyl.left, k), lab(&cyl.right, l), lab(&cyl.left, k + 1)]);
                    slots.push([Slot::Cross(ci, m, true), Slot::Cross(ci, next, false), Slot::Saddle(cyl.left[k], false)]);
                    k += 1;
                } else {
                    let up = Vec2::new(K::zero(), ry[l + 1].clone() - &ry[l]);
                    let back = Vec2::new(-w.clone(), ly[k].clone() - &ry[l + 1]);
                    tri.push([cross, up, back]);
                    label.push([lab(&cyl.left, k), lab(&cyl.right, l), lab(&cyl.right, l + 1)]);
                    slots.push([Slot::Cross(ci, m, true), Slot::Saddle(cyl.right[l], true), Slot::Cross(ci, next, false)]);
                    l += 1;
                }
            }
            crossings.push(total);
        }
        // Pair half-edges by slot.
        let mut saddle_he = vec![[None, None]; n];
        let mut cross_he: Vec<Vec<[Option<HalfEdge>; 2]>> = crossings.iter().map(|&t| vec![[None, None]; t]).collect();
        for (t, sl) in slots.iter().enumerate() {
            for (e, s) in sl.iter().enumerate() {
                let h = Some(HalfEdge::new(t, e));
                match *s {
                    Slot::Saddle(i, up) => saddle_he[i][usize::from(!up)] = h,
                    Slot::Cross(c, m, fwd) => cross_he[c][m][usize::from(!fwd)] = h,
                }
            }
        }
        let mut glue = vec![[HalfEdge::new(0, 0); 3]; tri.len()];
        let mut link = |a: HalfEdge, b: HalfEdge| {
            glue[a.t][a.e] = b;
            glue[b.t][b.e] = a;
        };
        for pair in saddle_he.iter().chain(cross_he.iter().flatten()) {
            link(pair[0].expect("paired slot"), pair[1].expect("paired slot"));
        }
        let surface = Surface::from_parts(tri, glue, label)?;
        let saddle = saddle_he.iter().map(|p| surface.edge_ref(p[0].unwrap())).collect();
        let crossing = cross_he.iter().map(|c| surface.edge_ref(c[0][0].unwrap())).collect();
        Ok(Built { surface, saddle, crossing })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn one_cylinder_torus() {
        let d = Diagram {
            saddles: vec![SaddleSpec { length: q(1, 1), start: Label::Regular, end: Label::Regular }],
            cylinders: vec![CylinderSpec { width: q(2, 1), left: vec![0], right: vec![0], twist: q(1, 3) }],
        };
        let b = d.build().unwrap();
        assert_eq!(b.surface.area(), q(2, 1));
        assert_eq!(b.surface.stratum().genus, 1);
        let hol = b.surface.chain_holonomy(&crate::surface::Chain(std::iter::once((b.crossing[0].id, 1)).collect()));
        assert_eq!(hol.unwrap(), Vec2::new(q(2, 1), q(1, 3)));
    }
}
