use std::collections::VecDeque;

use super::{Dfa, Letter, StateId};

/// States reachable from the initial state, in breadth-first order with
/// letters tried in ascending order.
fn bfs_order(dfa: &Dfa) -> Vec<StateId> {
    let mut seen = vec![false; dfa.num_states()];
    let mut order = vec![dfa.initial()];
    seen[dfa.initial() as usize] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        for l in 0..dfa.num_letters() as Letter {
            let t = dfa.next(s, l);
            if !seen[t as usize] {
                seen[t as usize] = true;
                order.push(t);
            }
        }
    }
    order
}

/// Hopcroft partition refinement over the reachable part, then canonical
/// renumbering.
pub(crate) fn minimize(dfa: &Dfa) -> Dfa {
    let letters = dfa.num_letters();
    let reach = bfs_order(dfa);
    let n = reach.len();
    let mut local = vec![u32::MAX; dfa.num_states()];
    for (i, &s) in reach.iter().enumerate() {
        local[s as usize] = i as u32;
    }
    let delta = |s: usize, l: usize| local[dfa.next(reach[s], l as Letter) as usize] as usize;

    // Inverse transitions in CSR form, indexed by (target, letter).
    let mut counts = vec![0usize; n * letters + 1];
    for s in 0..n {
        for l in 0..letters {
            counts[delta(s, l) * letters + l + 1] += 1;
        }
    }
    for i in 1..counts.len() {
        counts[i] += counts[i - 1];
    }
    let mut fill = counts.clone();
    let mut inverse = vec![0u32; n * letters];
    for s in 0..n {
        for l in 0..letters {
            let key = delta(s, l) * letters + l;
            inverse[fill[key]] = s as u32;
            fill[key] += 1;
        }
    }

    // Partition as a permutation with block ranges.
    let mut elems: Vec<usize> = (0..n).collect();
    elems.sort_by_key(|&s| !dfa.is_accepting(reach[s]));
    let mut pos = vec![0usize; n];
    for (i, &s) in elems.iter().enumerate() {
        pos[s] = i;
    }
    let split_at = elems
        .iter()
        .position(|&s| !dfa.is_accepting(reach[s]))
        .unwrap_or(n);
    let mut block_of = vec![0usize; n];
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in [(0, split_at), (split_at, n)] {
        if lo < hi {
            for &s in &elems[lo..hi] {
                block_of[s] = ranges.len();
            }
            ranges.push((lo, hi));
        }
    }

    let mut in_queue = vec![true; ranges.len()];
    let mut queue: VecDeque<usize> = (0..ranges.len()).collect();
    let mut marked = vec![0usize; ranges.len()];
    let mut touched: Vec<usize> = Vec::new();
    let mut preds: Vec<usize> = Vec::new();

    while let Some(b) = queue.pop_front() {
        in_queue[b] = false;
        let (lo, hi) = ranges[b];
        let splitter: Vec<usize> = elems[lo..hi].to_vec();
        for l in 0..letters {
            preds.clear();
            for &t in &splitter {
                let key = t * letters + l;
                preds.extend(inverse[counts[key]..counts[key + 1]].iter().map(|&s| s as usize));
            }
            // Move each predecessor to the front of its block.
            for &s in &preds {
                let c = block_of[s];
                let (clo, _) = ranges[c];
                let m = marked[c];
                if pos[s] < clo + m {
                    continue;
                }
                if m == 0 {
                    touched.push(c);
                }
                let target = clo + m;
                let other = elems[target];
                elems.swap(pos[s], target);
                pos[other] = pos[s];
                pos[s] = target;
                marked[c] += 1;
            }
            for c in touched.drain(..) {
                let (clo, chi) = ranges[c];
                let m = marked[c];
                marked[c] = 0;
                if m == chi - clo {
                    continue;
                }
                let fresh = ranges.len();
                // The marked part [clo, clo + m) becomes its own block.
                ranges[c] = (clo + m, chi);
                ranges.push((clo, clo + m));
                marked.push(0);
                for &s in &elems[clo..clo + m] {
                    block_of[s] = fresh;
                }
                let smaller = if m <= chi - clo - m { fresh } else { c };
                if in_queue[c] {
                    in_queue.push(true);
                    queue.push_back(fresh);
                } else {
                    in_queue.push(smaller == fresh);
                    if smaller == fresh {
                        queue.push_back(fresh);
                    } else {
                        in_queue[c] = true;
                        queue.push_back(c);
                    }
                }
            }
        }
    }

    // Quotient automaton, renumbered by a BFS from the initial block.
    let blocks = ranges.len();
    let mut number = vec![u32::MAX; blocks];
    let mut order = vec![block_of[0]];
    number[block_of[0]] = 0;
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        i += 1;
        let rep = elems[ranges[b].0];
        for l in 0..letters {
            let t = block_of[delta(rep, l)];
            if number[t] == u32::MAX {
                number[t] = order.len() as u32;
                order.push(t);
            }
        }
    }
    let mut table = Vec::with_capacity(order.len() * letters);
    let mut accepting = Vec::with_capacity(order.len());
    for &b in &order {
        let rep = elems[ranges[b].0];
        accepting.push(dfa.is_accepting(reach[rep]));
        table.extend((0..letters).map(|l| number[block_of[delta(rep, l)]]));
    }
    Dfa::assemble(dfa.support().to_vec(), 0, accepting, table)
}
