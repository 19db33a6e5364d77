//! One-step structural decomposition of class-K structures into smaller
//! K structures, mirroring the case analysis behind the closure: a
//! non-singleton K structure is always a composition of two strictly
//! smaller ones under the closure's generation rules.

use crate::graph::{
    classify, classify_dotted, mask_all, Dotted, Graph, Operand, StructureClass,
};
use crate::graph::ComposeKind;

/// `None` for singleton K structures; otherwise a kind and two strictly
/// smaller K operands whose composition is isomorphic to the input.
pub fn decompose_step(op: &Operand) -> Option<(ComposeKind, Operand, Operand)> {
    match op {
        Operand::Plain(g) => decompose_plain(g),
        Operand::Dotted(d) => decompose_dotted(d),
    }
}

fn decompose_plain(g: &Graph) -> Option<(ComposeKind, Operand, Operand)> {
    let c = classify(g);
    if c.components.len() > 1 {
        // Sum of the first component and the rest; both sides stay in class.
        let (first, old) = &c.components[0];
        let mut rest_set = mask_all(g.vertex_count());
        for &v in old {
            rest_set &= !(1 << v);
        }
        let (rest, _) = g.induced(rest_set);
        return Some((
            ComposeKind::Sum,
            Operand::Plain(first.clone()),
            Operand::Plain(rest),
        ));
    }
    if g.vertex_count() == 1 {
        return None;
    }
    match c.class {
        StructureClass::Tree => {
            // Root off: X = Y -|- (Z, b) with Z the singleton root forest.
            let root = (0..g.vertex_count()).find(|&v| g.is_orphan(v)).unwrap();
            let (non_root, _) = g.induced(mask_all(g.vertex_count()) & !(1 << root));
            let (root_graph, _) = g.induced(1u64 << root);
            Some((
                ComposeKind::DotInto,
                Operand::Plain(non_root),
                Operand::Dotted(Dotted::new(root_graph, 0).unwrap()),
            ))
        }
        StructureClass::FunctionGraph => {
            let cycle = &c.cycles[0];
            if cycle.len() == 1 {
                // Unique cyclic vertex: forest of the rest dotted into the
                // singleton loop.
                let a0 = cycle[0];
                let (forest, _) = g.induced(mask_all(g.vertex_count()) & !(1 << a0));
                let (loop_graph, _) = g.induced(1u64 << a0);
                Some((
                    ComposeKind::DotInto,
                    Operand::Plain(forest),
                    Operand::Dotted(Dotted::new(loop_graph, 0).unwrap()),
                ))
            } else {
                // Split the cycle: Y the tree of a0 and its non-cyclic
                // descendants, Z the rest, circularly summed.
                let a0 = cycle[0];
                let a1 = cycle[1];
                let cyclic = g.cyclic_vertices();
                let tree_set = noncyclic_tree_set(g, a0, cyclic);
                let (tree, tree_old) = g.induced(tree_set);
                let (rest, rest_old) = g.induced(mask_all(g.vertex_count()) & !tree_set);
                let tree_dot = position_of(&tree_old, a0);
                let rest_dot = position_of(&rest_old, a1);
                Some((
                    ComposeKind::Circular,
                    Operand::Dotted(Dotted::new(tree, tree_dot).unwrap()),
                    Operand::Dotted(Dotted::new(rest, rest_dot).unwrap()),
                ))
            }
        }
        _ => None,
    }
}

fn decompose_dotted(d: &Dotted) -> Option<(ComposeKind, Operand, Operand)> {
    let g = &d.graph;
    match classify_dotted(d) {
        StructureClass::DottedSingletonFunctionGraph => None,
        StructureClass::DottedForest => {
            let c = classify(g);
            if c.components.len() > 1 {
                // Peel the undotted components off: X = R + (T, a).
                let dot_comp = c
                    .components
                    .iter()
                    .position(|(_, old)| old.contains(&d.dot))
                    .unwrap();
                let (tree, tree_old) = &c.components[dot_comp];
                let mut rest_set = mask_all(g.vertex_count());
                for &v in tree_old {
                    rest_set &= !(1 << v);
                }
                let (rest, _) = g.induced(rest_set);
                let dot = position_of(tree_old, d.dot);
                return Some((
                    ComposeKind::SumRightDot,
                    Operand::Plain(rest),
                    Operand::Dotted(Dotted::new(tree.clone(), dot).unwrap()),
                ));
            }
            if g.vertex_count() == 1 {
                return None;
            }
            // A dotted tree: split at the root.
            let root = (0..g.vertex_count()).find(|&v| g.is_orphan(v)).unwrap();
            let (non_root, non_root_old) = g.induced(mask_all(g.vertex_count()) & !(1 << root));
            let (root_graph, _) = g.induced(1u64 << root);
            if d.dot == root {
                // (X, a) = (Z, a) -|- Y.
                Some((
                    ComposeKind::DotPlusUndotted,
                    Operand::Dotted(Dotted::new(root_graph, 0).unwrap()),
                    Operand::Plain(non_root),
                ))
            } else {
                // (X, a) = (Y, a) -|- (Z, b).
                let dot = position_of(&non_root_old, d.dot);
                Some((
                    ComposeKind::DottedDot,
                    Operand::Dotted(Dotted::new(non_root, dot).unwrap()),
                    Operand::Dotted(Dotted::new(root_graph, 0).unwrap()),
                ))
            }
        }
        _ => None,
    }
}

/// `a0` together with its non-cyclic descendants.
fn noncyclic_tree_set(g: &Graph, a0: u32, cyclic: u64) -> u64 {
    let mut set = 1u64 << a0;
    loop {
        let mut grew = false;
        for v in 0..g.vertex_count() {
            if set >> v & 1 == 0 && cyclic >> v & 1 == 0 {
                if let Some(p) = g.parent(v) {
                    if set >> p & 1 == 1 {
                        set |= 1 << v;
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

fn position_of(old: &[u32], v: u32) -> u32 {
    old.iter().position(|&w| w == v).unwrap() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_key_operand;
    use crate::enumerate::{enumerate_class, enumerate_dotted, EnumClass};
    use crate::graph::{compose, Palette};

    /// Fully decomposes and recomposes, comparing up to isomorphism.
    fn check_recomposition(op: &Operand) {
        match decompose_step(op) {
            None => {
                assert_eq!(op.graph().vertex_count(), 1, "only singletons are atomic");
            }
            Some((kind, left, right)) => {
                assert!(left.graph().vertex_count() < op.graph().vertex_count());
                assert!(right.graph().vertex_count() < op.graph().vertex_count());
                let back = compose(kind, &left, &right).unwrap();
                assert_eq!(
                    canonical_key_operand(&back),
                    canonical_key_operand(op),
                    "recomposition of {op:?} via {kind:?}"
                );
                check_recomposition(&left);
                check_recomposition(&right);
            }
        }
    }

    #[test]
    fn every_small_k_structure_recomposes() {
        let pal = Palette::empty();
        for n in 1..=5 {
            for g in enumerate_class(EnumClass::FunctionGraph, n, &pal) {
                check_recomposition(&Operand::Plain(g));
            }
            for g in enumerate_class(EnumClass::Forest, n, &pal) {
                check_recomposition(&Operand::Plain(g));
            }
            for d in enumerate_dotted(EnumClass::Forest, n, &pal) {
                check_recomposition(&Operand::Dotted(d));
            }
        }
    }

    #[test]
    fn colored_spot_checks() {
        let pal = Palette::new(["red"]);
        for n in 1..=3 {
            for g in enumerate_class(EnumClass::FunctionGraph, n, &pal) {
                check_recomposition(&Operand::Plain(g));
            }
        }
    }
}
