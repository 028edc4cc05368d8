#![allow(dead_code)]

use proptest::prelude::*;

use hypermon_core::formula::Formula;
use hypermon_core::semantics::{Step, Trace, TraceAssignment};

pub const PROPS: [&str; 2] = ["a", "b"];
pub const VARS: [&str; 2] = ["p", "q"];

/// Bodies over `props`×`vars` using every operator, nested at most `depth`.
pub fn body_over(props: &'static [&'static str], vars: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        6 => (prop::sample::select(props), prop::sample::select(vars))
            .prop_map(|(p, v)| Formula::atom(p, v)),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::globally),
            inner.clone().prop_map(Formula::finally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::xor(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::weak_until(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::release(a, b)),
        ]
    })
    .boxed()
}

pub fn body(depth: u32) -> BoxedStrategy<Formula> {
    body_over(&PROPS, &VARS, depth)
}

pub fn step_over(props: &'static [&'static str]) -> impl Strategy<Value = Step> {
    prop::collection::vec(any::<bool>(), props.len()).prop_map(move |bits| {
        props
            .iter()
            .zip(bits)
            .filter(|(_, b)| *b)
            .map(|(p, _)| p.to_string())
            .collect()
    })
}

pub fn trace_over(props: &'static [&'static str], max_len: usize) -> impl Strategy<Value = Trace> {
    prop::collection::vec(step_over(props), 0..=max_len).prop_map(|steps| Trace::new("t", steps))
}

pub fn trace(max_len: usize) -> impl Strategy<Value = Trace> {
    trace_over(&PROPS, max_len)
}

pub fn pair(max_len: usize) -> impl Strategy<Value = (Trace, Trace)> {
    (trace(max_len), trace(max_len))
}

pub fn assign(p: &Trace, q: &Trace) -> TraceAssignment {
    TraceAssignment::new().with("p", p.clone()).with("q", q.clone())
}

/// Every trace over `props` of length at most `max_len`.
pub fn all_traces(props: &[&str], max_len: usize) -> Vec<Trace> {
    let mut out = vec![Trace::empty("t")];
    let mut frontier = vec![Vec::<Step>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for bits in 0..1u32 << props.len() {
                let step: Step = props
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, p)| p.to_string())
                    .collect();
                let mut w = prefix.clone();
                w.push(step);
                out.push(Trace::new("t", w.clone()));
                next.push(w);
            }
        }
        frontier = next;
    }
    out
}

/// Names traces `t0`, `t1`, … in order.
pub fn named(traces: Vec<Trace>) -> Vec<Trace> {
    traces
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.with_name(format!("t{i}")))
        .collect()
}
