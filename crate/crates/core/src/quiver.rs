//! Quivers of finite type and their positive roots.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Orientation families studied case by case. The tag drives orbit
/// invariants, closure lemmas and resolution displays; quivers without a
/// tag still support the generic operations (roots, orbits, hom, codim).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    A2,
    A3SinkCenter,
    A3SourceCenter,
    A3OneWay,
    AnOneWay,
    A2mSourceSink,
    A2mp1TypeI,
    A2mp1TypeII,
    D4SinkCenter,
    Other,
}

/// Dimension vector: one nonnegative entry per vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn get(&self, v: usize) -> u32 {
        self.0[v]
    }
}

impl std::fmt::Display for DimVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Finite directed graph without loops. Arrows are `(source, target)`
/// pairs of 0-based vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertex_count: usize,
    pub arrows: Vec<(usize, usize)>,
    pub case_tag: CaseTag,
}

/// Undirected Dynkin type of the underlying graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynkinType {
    A(usize),
    D(usize),
    E(usize),
}

impl Quiver {
    pub fn new(vertex_count: usize, arrows: Vec<(usize, usize)>, case_tag: CaseTag) -> Result<Self> {
        let q = Quiver {
            vertex_count,
            arrows,
            case_tag,
        };
        for &(s, t) in &q.arrows {
            if s >= q.vertex_count || t >= q.vertex_count {
                return Err(Error::UnsupportedType("arrow endpoint out of range".into()));
            }
            if s == t {
                return Err(Error::UnsupportedType("loops are not allowed".into()));
            }
        }
        q.dynkin_type()?;
        Ok(q)
    }

    pub fn a2() -> Self {
        Quiver::new(2, vec![(0, 1)], CaseTag::A2).unwrap()
    }

    /// A3 with both arrows into the middle vertex: 1 -> 2 <- 3.
    pub fn a3_sink_center() -> Self {
        Quiver::new(3, vec![(0, 1), (2, 1)], CaseTag::A3SinkCenter).unwrap()
    }

    /// A3 with both arrows out of the middle vertex: 1 <- 2 -> 3.
    pub fn a3_source_center() -> Self {
        Quiver::new(3, vec![(1, 0), (1, 2)], CaseTag::A3SourceCenter).unwrap()
    }

    /// A3 with all arrows in one direction: 1 -> 2 -> 3.
    pub fn a3_one_way() -> Self {
        Quiver::new(3, vec![(0, 1), (1, 2)], CaseTag::A3OneWay).unwrap()
    }

    /// One-way A_n: 1 -> 2 -> ... -> n.
    pub fn a_n_one_way(n: usize) -> Self {
        assert!(n >= 2);
        let arrows = (0..n - 1).map(|i| (i, i + 1)).collect();
        let tag = if n == 2 { CaseTag::A2 } else { CaseTag::AnOneWay };
        Quiver::new(n, arrows, tag).unwrap()
    }

    /// Source-sink A_n with odd vertices sources: 1 -> 2 <- 3 -> 4 ...
    /// For even n this is the A_{2m} family; for odd n it is type I.
    pub fn a_n_source_sink_odd_sources(n: usize) -> Self {
        assert!(n >= 2);
        let arrows = (0..n - 1)
            .map(|i| if i % 2 == 0 { (i, i + 1) } else { (i + 1, i) })
            .collect();
        let tag = if n % 2 == 0 {
            CaseTag::A2mSourceSink
        } else {
            CaseTag::A2mp1TypeI
        };
        Quiver::new(n, arrows, tag).unwrap()
    }

    /// Source-sink A_{2m+1} with even vertices sources: 1 <- 2 -> 3 <- 4 ...
    pub fn a_2mp1_type_ii(n: usize) -> Self {
        assert!(n >= 3 && n % 2 == 1);
        let arrows = (0..n - 1)
            .map(|i| if i % 2 == 0 { (i + 1, i) } else { (i, i + 1) })
            .collect();
        Quiver::new(n, arrows, CaseTag::A2mp1TypeII).unwrap()
    }

    /// D4 with all arrows into the central vertex. Vertex layout:
    /// 0, 2, 3 are the leaves, 1 is the center.
    pub fn d4_sink_center() -> Self {
        Quiver::new(4, vec![(0, 1), (2, 1), (3, 1)], CaseTag::D4SinkCenter).unwrap()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(s, t) in &self.arrows {
            adj[s].push(t);
            adj[t].push(s);
        }
        adj
    }

    /// Classify the underlying graph as a simply-laced Dynkin diagram.
    pub fn dynkin_type(&self) -> Result<DynkinType> {
        let n = self.vertex_count;
        if n == 0 {
            return Err(Error::UnsupportedType("empty quiver".into()));
        }
        if self.arrows.len() != n - 1 {
            return Err(Error::UnsupportedType(
                "underlying graph must be a tree with n-1 edges".into(),
            ));
        }
        let adj = self.neighbors();
        // connectivity
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::UnsupportedType("graph is not connected".into()));
        }
        let mut degrees: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        degrees.sort_unstable();
        let branch_vertices = adj.iter().filter(|a| a.len() >= 3).count();
        if degrees.last().copied().unwrap_or(0) > 3 || branch_vertices > 1 {
            return Err(Error::UnsupportedType(
                "graph is not of type A, D or E".into(),
            ));
        }
        if branch_vertices == 0 {
            return Ok(DynkinType::A(n));
        }
        // one trivalent vertex: arm lengths decide D vs E vs reject
        let center = adj.iter().position(|a| a.len() == 3).unwrap();
        let mut arms: Vec<usize> = adj[center]
            .iter()
            .map(|&start| {
                let mut len = 1;
                let mut prev = center;
                let mut cur = start;
                while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
                    prev = cur;
                    cur = next;
                    len += 1;
                }
                len
            })
            .collect();
        arms.sort_unstable();
        match arms.as_slice() {
            [1, 1, _] => Ok(DynkinType::D(n)),
            [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => Ok(DynkinType::E(n)),
            _ => Err(Error::UnsupportedType(
                "branch lengths not of type D or E".into(),
            )),
        }
    }

    /// Symmetric Cartan matrix of the underlying graph.
    fn cartan(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        let mut c = vec![vec![0i64; n]; n];
        for i in 0..n {
            c[i][i] = 2;
        }
        for &(s, t) in &self.arrows {
            c[s][t] = -1;
            c[t][s] = -1;
        }
        c
    }

    /// All positive roots in the simple-root basis, by reflection closure.
    ///
    /// Supported for types A_n and D_n; E types are rejected along with
    /// everything else, matching the scope of the orbit machinery.
    pub fn positive_roots(&self) -> Result<Vec<DimVector>> {
        match self.dynkin_type()? {
            DynkinType::A(_) | DynkinType::D(_) => {}
            DynkinType::E(_) => {
                return Err(Error::UnsupportedType(
                    "E-type quivers are outside the supported cases".into(),
                ))
            }
        }
        let n = self.vertex_count;
        let cartan = self.cartan();
        let mut roots: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
        let mut frontier: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0i64; n];
                e[i] = 1;
                e
            })
            .collect();
        for r in &frontier {
            roots.insert(r.clone());
        }
        while let Some(v) = frontier.pop() {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|j| cartan[i][j] * v[j]).sum();
                let mut w = v.clone();
                w[i] -= pairing;
                if w.iter().all(|&x| x >= 0) && !w.iter().all(|&x| x == 0) && roots.insert(w.clone())
                {
                    frontier.push(w);
                }
            }
        }
        Ok(roots
            .into_iter()
            .map(|r| DimVector(r.into_iter().map(|x| x as u32).collect()))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_roots() {
        let roots = Quiver::a2().positive_roots().unwrap();
        let expected: Vec<DimVector> = [[1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|v| DimVector(v.to_vec()))
            .collect();
        assert_eq!(roots.len(), 3);
        for e in expected {
            assert!(roots.contains(&e));
        }
    }

    #[test]
    fn an_root_counts() {
        for n in 2..=7 {
            let q = Quiver::a_n_one_way(n);
            let roots = q.positive_roots().unwrap();
            assert_eq!(roots.len(), n * (n + 1) / 2);
            // A_n roots are exactly the interval vectors
            for r in &roots {
                let support: Vec<usize> =
                    (0..n).filter(|&i| r.0[i] > 0).collect();
                assert!(r.0.iter().all(|&x| x <= 1));
                assert_eq!(
                    support.last().unwrap() - support.first().unwrap() + 1,
                    support.len()
                );
            }
        }
    }

    #[test]
    fn d4_roots() {
        let q = Quiver::d4_sink_center();
        let roots = q.positive_roots().unwrap();
        assert_eq!(roots.len(), 12);
        // highest root has coefficient 2 at the center (vertex 1)
        assert!(roots.contains(&DimVector(vec![1, 2, 1, 1])));
        assert!(roots.iter().all(|r| r.0[0] <= 1 && r.0[2] <= 1 && r.0[3] <= 1));
    }

    #[test]
    fn d5_root_count() {
        // D_n has n(n-1) positive roots
        let q = Quiver::new(
            5,
            vec![(0, 1), (1, 2), (3, 1), (2, 4)],
            CaseTag::Other,
        );
        // that graph: vertex 1 has degree 3 with arms (1,1,2): D5
        let q = q.unwrap();
        assert!(matches!(q.dynkin_type().unwrap(), DynkinType::D(5)));
        assert_eq!(q.positive_roots().unwrap().len(), 20);
    }

    #[test]
    fn rejects_non_dynkin() {
        // cycle
        assert!(Quiver::new(3, vec![(0, 1), (1, 2), (2, 0)], CaseTag::Other).is_err());
        // star with 4 branches
        assert!(Quiver::new(
            5,
            vec![(0, 4), (1, 4), (2, 4), (3, 4)],
            CaseTag::Other
        )
        .is_err());
        // loop
        assert!(Quiver::new(2, vec![(0, 0), (0, 1)], CaseTag::Other).is_err());
    }

    #[test]
    fn e6_detected_and_rejected_for_roots() {
        let q = Quiver::new(
            6,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (5, 2)],
            CaseTag::Other,
        )
        .unwrap();
        assert!(matches!(q.dynkin_type().unwrap(), DynkinType::E(6)));
        assert!(q.positive_roots().is_err());
    }
}
