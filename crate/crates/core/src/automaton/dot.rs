use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Dfa, Letter, StateId};

/// Graphviz rendering: accepting states are double circles and parallel
/// edges are merged into one edge labelled with all their letters.
pub fn to_dot(dfa: &Dfa) -> String {
    let mut out = String::from("digraph monitor {\n  rankdir=LR;\n  init [shape=point];\n");
    for s in 0..dfa.num_states() as StateId {
        let shape = if dfa.is_accepting(s) {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(out, "  q{s} [shape={shape}];").unwrap();
    }
    writeln!(out, "  init -> q{};", dfa.initial()).unwrap();
    for s in 0..dfa.num_states() as StateId {
        let mut edges: BTreeMap<StateId, Vec<String>> = BTreeMap::new();
        for l in 0..dfa.num_letters() as Letter {
            edges
                .entry(dfa.next(s, l))
                .or_default()
                .push(dfa.format_letter(l));
        }
        for (t, labels) in edges {
            writeln!(out, "  q{s} -> q{t} [label=\"{}\"];", labels.join(" ")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::AtomRef;

    #[test]
    fn renders_states_and_labels() {
        let dfa = Dfa::from_table(
            vec![AtomRef::new("a", "p")],
            0,
            vec![false, true],
            vec![0, 1, 1, 1],
        )
        .unwrap();
        let dot = to_dot(&dfa);
        assert!(dot.contains("q1 [shape=doublecircle];"));
        assert!(dot.contains("q0 -> q1 [label=\"{a@p}\"];"));
        assert!(dot.contains("q1 -> q1 [label=\"{} {a@p}\"];"));
    }
}
