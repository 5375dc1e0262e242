//! Graph states and their stabilizers.
//!
//! A graph state is built by preparing every vertex in `|+>` and applying a
//! controlled-Z along each edge. The two four-qubit resources used throughout
//! the crate are the path 1-2-3-4 (the linear cluster) and the star with
//! center 3 (leaves 1, 2, 4); vertex labels are 1-based so that qubit indices
//! match the resource diagrams everywhere else in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::gates::{self, Gate1};
use crate::sim::{QuantumState, StateVector};

/// Vertices plus an undirected edge set. Serializes as `{"n": 4, "edges": [[1,2],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(rename = "n")]
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    /// Validates and normalizes: no self-loops, 1-based vertices in range,
    /// edges stored with the smaller endpoint first, sorted, deduplicated.
    pub fn new(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u == 0 || v == 0 || u > num_vertices || v > num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) outside 1..={num_vertices}"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(GraphSpec {
            num_vertices,
            edges: normalized,
        })
    }

    /// Path 1-2-..-n.
    pub fn path(num_vertices: usize) -> Self {
        let edges: Vec<_> = (1..num_vertices).map(|v| (v, v + 1)).collect();
        GraphSpec::new(num_vertices, &edges).expect("path is a valid graph")
    }

    /// Star with the given center, every other vertex a leaf.
    pub fn star(num_vertices: usize, center: usize) -> Result<Self> {
        if center == 0 || center > num_vertices {
            return Err(Error::InvalidGraph(format!(
                "center {center} outside 1..={num_vertices}"
            )));
        }
        let edges: Vec<_> = (1..=num_vertices)
            .filter(|&v| v != center)
            .map(|v| (v, center))
            .collect();
        GraphSpec::new(num_vertices, &edges)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: GraphSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidGraph(format!("bad JSON: {e}")))?;
        GraphSpec::new(raw.num_vertices, &raw.edges)
    }
}

/// One stabilizer generator: a signed Pauli string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGenerator {
    pub paulis: Vec<Pauli>,
    pub sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn gate(self) -> Gate1 {
        match self {
            Pauli::I => gates::IDENT,
            Pauli::X => gates::PAULI_X,
            Pauli::Y => gates::PAULI_Y,
            Pauli::Z => gates::PAULI_Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl StabilizerGenerator {
    pub fn label(&self) -> String {
        let body: String = self.paulis.iter().map(|p| p.letter()).collect();
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// `|+>^n` with a controlled-Z per edge.
pub fn build_graph_state(spec: &GraphSpec) -> StateVector {
    let mut sv = StateVector::plus(spec.num_vertices);
    for &(u, v) in &spec.edges {
        sv.apply_cz(u, v).expect("edges validated on construction");
    }
    sv
}

/// The four-qubit linear cluster,
/// `(|0+0+> + |0-1-> + |1-0+> + |1+1->)/2` on qubits 1..4.
pub fn linear_cluster4() -> StateVector {
    build_graph_state(&GraphSpec::path(4))
}

/// The four-qubit star cluster with center 3,
/// `(|++0+> + |--1->)/sqrt(2)` on qubits 1..4; inputs of the entangling
/// gates are qubits 1, 2 and outputs qubits 1, 4.
pub fn star_cluster4() -> StateVector {
    build_graph_state(&GraphSpec::star(4, 3).expect("valid star"))
}

/// The two named four-qubit resources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    Linear,
    Star,
}

impl ResourceKind {
    pub fn graph(self) -> GraphSpec {
        match self {
            ResourceKind::Linear => GraphSpec::path(4),
            ResourceKind::Star => GraphSpec::star(4, 3).expect("valid star"),
        }
    }

    pub fn state(self) -> StateVector {
        build_graph_state(&self.graph())
    }

    pub fn label(self) -> &'static str {
        match self {
            ResourceKind::Linear => "linear",
            ResourceKind::Star => "star",
        }
    }
}

impl std::str::FromStr for ResourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(ResourceKind::Linear),
            "star" => Ok(ResourceKind::Star),
            other => Err(Error::InvalidGraph(format!("unknown resource {other:?}"))),
        }
    }
}

/// One generator per vertex: `X_v` times `Z` on each neighbor, sign +1.
pub fn stabilizers(spec: &GraphSpec) -> Vec<StabilizerGenerator> {
    (1..=spec.num_vertices)
        .map(|v| {
            let mut paulis = vec![Pauli::I; spec.num_vertices];
            paulis[v - 1] = Pauli::X;
            for u in spec.neighbors(v) {
                paulis[u - 1] = Pauli::Z;
            }
            StabilizerGenerator { paulis, sign: 1 }
        })
        .collect()
}

/// Real expectation value of each generator on `state`.
pub fn check_stabilizers(state: &QuantumState, spec: &GraphSpec) -> Result<Vec<f64>> {
    stabilizers(spec)
        .iter()
        .map(|g| expectation_of(state, g))
        .collect()
}

/// Real expectation value of one signed Pauli string.
pub fn expectation_of(state: &QuantumState, gen: &StabilizerGenerator) -> Result<f64> {
    let factors: Vec<(usize, Gate1)> = gen
        .paulis
        .iter()
        .enumerate()
        .filter(|(_, p)| !matches!(p, Pauli::I))
        .map(|(i, p)| (i + 1, p.gate()))
        .collect();
    let v = state.expectation(&factors)?;
    Ok(f64::from(gen.sign) * v.re)
}
