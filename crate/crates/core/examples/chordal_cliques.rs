//! Correlative sparsity of a chain-structured polynomial: CSP graph, chordal extension and
//! maximal cliques in running-intersection order.

use sublevel::poly::{Monomial, Polynomial, PopInstance, Sense};
use sublevel::sparsity::{build_csp_graph, chordal_extension, maximal_cliques, summarize};

fn main() -> sublevel::Result<()> {
    let n = 9;
    let mut f = Polynomial::zero(n);
    for i in 0..n {
        f.add_term(Monomial::from_pairs([(i, 1), ((i + 1) % n, 1)]), 1.0);
        f.add_term(Monomial::from_pairs([(i, 4)]), 1.0);
    }
    let pop = PopInstance::new("ring", n, Sense::Min, f);
    let g = build_csp_graph(&pop);
    let (chordal, order) = chordal_extension(&g);
    println!("edges {} -> {} after extension, elimination order {order:?}", g.edge_count(), chordal.edge_count());
    let cover = maximal_cliques(&chordal, &order)?;
    for (k, c) in cover.cliques().iter().enumerate() {
        println!("clique {k}: {c:?}");
    }
    println!("running intersection: {}", cover.satisfies_rip());
    println!("{:?}", summarize(&pop)?);
    Ok(())
}
