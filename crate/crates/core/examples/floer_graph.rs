//! Reduced Floer graphs: arrow-length, mean-index and crossing-energy constraints.

use std::collections::BTreeMap;

use reeb_lab::floer::{validate_graph, GraphCheckOptions, ReducedFloerGraph, Vertex};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut graph = ReducedFloerGraph {
        vertices: vec![
            Vertex::orbit(0, 1, 5.0, 3.0).with_support(3, 4),
            Vertex::orbit(1, 1, 4.8, 4.0).with_support(3, 4),
            Vertex::orbit(2, 1, 1.0, 9.0).with_support(2, 3),
            Vertex::domain(0.0, BTreeMap::from([(4, 1)])),
        ],
        arrows: vec![],
    };
    graph.connect(0, 1);
    graph.connect(1, 2);
    graph.connect(1, 3);
    let protected = BTreeMap::from([(0, 0.5)]);
    let violations = validate_graph(&graph, 2, &protected, GraphCheckOptions { check_degrees: true })?;
    for v in &violations {
        println!("arrow {}: {}", v.arrow, serde_json::to_string(&v.kind)?);
    }
    println!("{} violation(s) among {} arrows", violations.len(), graph.arrows.len());
    Ok(())
}
