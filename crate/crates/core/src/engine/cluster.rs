use crate::data::CentroidSet;
use crate::Scalar;

/// Running membership of one cluster: the sum vector and count of
/// everything it holds, plus the tree nodes and points it holds directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRecord<T> {
    pub sv: Vec<T>,
    pub num: usize,
    pub nodes: Vec<usize>,
    pub points: Vec<usize>,
}

impl<T: Scalar> ClusterRecord<T> {
    pub fn empty(d: usize) -> Self {
        Self {
            sv: vec![T::zero(); d],
            num: 0,
            nodes: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn add(&mut self, sv: &[T], num: usize) {
        for (a, &b) in self.sv.iter_mut().zip(sv) {
            *a += b;
        }
        self.num += num;
    }

    pub fn remove(&mut self, sv: &[T], num: usize) {
        debug_assert!(num <= self.num);
        for (a, &b) in self.sv.iter_mut().zip(sv) {
            *a -= b;
        }
        self.num -= num;
    }

    pub fn clear(&mut self) {
        self.sv.iter_mut().for_each(|v| *v = T::zero());
        self.num = 0;
        self.nodes.clear();
        self.points.clear();
    }
}

/// Moves an object with sum vector `sv` covering `num` points from cluster
/// `from` to cluster `to`. No-op when they coincide.
pub fn transfer<T: Scalar>(
    clusters: &mut [ClusterRecord<T>],
    from: usize,
    to: usize,
    sv: &[T],
    num: usize,
) {
    if from == to {
        return;
    }
    clusters[from].remove(sv, num);
    clusters[to].add(sv, num);
}

/// New centroids `sv / num`; an empty cluster keeps its previous centroid.
/// Reads no points.
pub fn incremental_refine<T: Scalar>(
    clusters: &[ClusterRecord<T>],
    previous: &CentroidSet<T>,
) -> CentroidSet<T> {
    let mut out = previous.clone();
    for (j, rec) in clusters.iter().enumerate() {
        if rec.num > 0 {
            let m = T::from_usize_lossy(rec.num);
            for (c, &s) in out.center_mut(j).iter_mut().zip(&rec.sv) {
                *c = s / m;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(d: usize) -> Vec<ClusterRecord<f64>> {
        vec![ClusterRecord::empty(d), ClusterRecord::empty(d)]
    }

    #[test]
    fn point_moves_between_clusters() {
        let mut cl = two(2);
        cl[0].add(&[4.0, 4.0], 2);
        transfer(&mut cl, 0, 1, &[1.0, 1.0], 1);
        assert_eq!((cl[0].sv.clone(), cl[0].num), (vec![3.0, 3.0], 1));
        assert_eq!((cl[1].sv.clone(), cl[1].num), (vec![1.0, 1.0], 1));
    }

    #[test]
    fn node_moves_whole_and_staying_is_a_no_op() {
        let mut cl = two(2);
        cl[0].add(&[10.0, 10.0], 5);
        let before = cl.clone();
        transfer(&mut cl, 0, 0, &[10.0, 10.0], 5);
        assert_eq!(cl, before);
        transfer(&mut cl, 0, 1, &[10.0, 10.0], 5);
        assert_eq!(cl[0].num, 0);
        assert_eq!((cl[1].sv.clone(), cl[1].num), (vec![10.0, 10.0], 5));
    }

    #[test]
    fn refine_divides_and_keeps_empty() {
        let prev = CentroidSet::from_rows(&[[0.0, 0.0], [7.0, 7.0]]).unwrap();
        let mut cl = two(2);
        cl[0].add(&[4.0, 4.0], 2);
        let c = incremental_refine(&cl, &prev);
        assert_eq!(c.center(0), &[2.0, 2.0]);
        assert_eq!(c.center(1), &[7.0, 7.0]);
        cl[0].remove(&[1.0, 1.0], 1);
        assert_eq!(incremental_refine(&cl, &prev).center(0), &[3.0, 3.0]);
    }
}
