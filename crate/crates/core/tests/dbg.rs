// quick debug via test
#[test]
fn dbg_case2() {
    use sparsefo::base::*;
    use sparsefo::graph::RootedForest;
    use sparsefo::logic::*;
    use sparsefo::qelim::*;
    let mut f = RootedForest::new();
    f.add_root(VertexId(1));
    f.add_child(VertexId(1), VertexId(2));
    f.add_child(VertexId(1), VertexId(3));
    let mut labels = Labeling::new();
    labels.add(VertexId(2), Label::sym("b"));
    labels.add(VertexId(3), Label::sym("b"));
    let zeta = parse_formula("lca[1](x,x) & lca[1](y,y) & lca[0](x,y) & lab[b](y)").unwrap();
    let vars = vec![Var::new("x"), Var::new("y")];
    let types = basic_normal_form_sparse(&zeta, &vars, 2, 10000).unwrap();
    eprintln!("types: {}", types.len());
    for t in &types { eprintln!("{:?}", t); }
    let mut alloc = StageAlloc::new();
    let red = reduce_existential_forest(&[Var::new("x")], &[Var::new("y")], &zeta, &f, &labels, 2, false, &mut alloc).unwrap();
    eprintln!("reduced: {}", format_formula(&red.formula));
    eprintln!("labels: {:?}", red.labels);
}
