//! Named targets: coupling graphs, the clause-system cost Hamiltonian and the
//! embedded LiH matrix.

pub mod lih;
pub mod sat;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operators::CouplingGraph;

pub use lih::lih_hamiltonian;
pub use sat::{
    clause_objective, diag_initial_hamiltonian, objective_to_pauli, readout_assignment,
    sat_hamiltonian, system_objective, ClauseSystem, MultilinearPolynomial, VariableEncoding,
};

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 {
        return Err(Error::InvalidParameter("a graph needs at least one site".into()));
    }
    Ok(())
}

fn graph_from_edges(sites: usize, edges: impl IntoIterator<Item = (usize, usize)>, k: f64) -> Result<CouplingGraph> {
    let mut m = DMatrix::zeros(sites, sites);
    for (a, b) in edges {
        m[(a, b)] = k;
        m[(b, a)] = k;
    }
    CouplingGraph::new(vec![0.0; sites], m)
}

/// Site `hub` (1-based) coupled with strength `k` to every other site.
pub fn star_graph(sites: usize, hub: usize, k: f64) -> Result<CouplingGraph> {
    check_sites(sites)?;
    if hub == 0 || hub > sites {
        return Err(Error::InvalidParameter(format!(
            "hub {hub} outside the chain 1..={sites}"
        )));
    }
    let h = hub - 1;
    graph_from_edges(sites, (0..sites).filter(|&m| m != h).map(|m| (h, m)), k)
}

pub fn all_to_all(sites: usize, k: f64) -> Result<CouplingGraph> {
    check_sites(sites)?;
    graph_from_edges(
        sites,
        (0..sites).flat_map(|a| (a + 1..sites).map(move |b| (a, b))),
        k,
    )
}

/// Nearest-neighbour chain closed by the `(1, L)` bond.
pub fn ring(sites: usize, k: f64) -> Result<CouplingGraph> {
    check_sites(sites)?;
    let edges: Vec<_> = (0..sites - 1)
        .map(|a| (a, a + 1))
        .chain((sites > 2).then_some((0, sites - 1)))
        .collect();
    graph_from_edges(sites, edges, k)
}

/// Open nearest-neighbour chain.
pub fn chain_graph(sites: usize, k: f64) -> Result<CouplingGraph> {
    check_sites(sites)?;
    graph_from_edges(sites, (0..sites - 1).map(|a| (a, a + 1)), k)
}
