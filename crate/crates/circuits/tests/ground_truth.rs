use hypermon_circuits::{
    default_flow, independence_property, random_traces, trace_name, CircuitKind, CircuitModel,
    CircuitTrace, InputBias, Manifest,
};
use hypermon_core::semantics::eval_quantified;

#[test]
fn xor_output_bits_depend_only_on_their_operands() {
    let m = CircuitModel::new(CircuitKind::Xor4);
    for inputs in 0u32..256 {
        let (out, _) = m.step_packed(inputs);
        for j in 0..4 {
            for flip in 0..8 {
                if flip == j || flip == j + 4 {
                    continue;
                }
                let (other, _) = m.step_packed(inputs ^ 1 << flip);
                assert_eq!(out >> j & 1, other >> j & 1, "inputs {inputs:08b} flip {flip}");
            }
        }
    }
}

#[test]
fn combinational_mux_out1_ignores_in2() {
    let m = CircuitModel::new(CircuitKind::MuxComb);
    for in1 in 0u32..16 {
        let selected = m.step_packed(in1 | 1 << 8).0 & 0b11;
        for in2 in 0u32..16 {
            assert_eq!(m.step_packed(in1 | in2 << 4 | 1 << 8).0 & 0b11, selected);
            // Deselected: out1 is zero.
            assert_eq!(m.step_packed(in1 | in2 << 4).0 & 0b11, 0);
        }
    }
}

#[test]
fn sequential_mux_leaks_in2_into_out1() {
    // Step 0 routes in2 into the register; step 1 selects the same in1.
    let a = CircuitTrace::simulate(CircuitKind::MuxSeq, vec![0, 1 << 8]);
    let b = CircuitTrace::simulate(CircuitKind::MuxSeq, vec![1 << 4, 1 << 8]);
    assert_eq!(a.inputs[1], b.inputs[1]);
    assert_ne!(a.outputs[1] & 0b11, b.outputs[1] & 0b11);
}

#[test]
fn overflow_needs_eight_increments_since_the_last_wrap() {
    let bias = InputBias::uniform().with("incr", 0.9).with("decr", 0.1);
    for t in random_traces(CircuitKind::Counter3, 300, 40, 3, &bias).unwrap() {
        let mut since = 0;
        for (s, (&i, &o)) in t.inputs.iter().zip(&t.outputs).enumerate() {
            let incr_only = i == 0b01;
            if incr_only {
                since += 1;
            }
            if o == 1 {
                assert!(s >= 7 && since >= 8, "overflow at {s} after {since} increments");
                since = 0;
            }
        }
    }
}

#[test]
fn simulation_is_reproducible() {
    let a = random_traces(CircuitKind::Xor4, 1000, 5, 7, &InputBias::uniform()).unwrap();
    let b = random_traces(CircuitKind::Xor4, 1000, 5, 7, &InputBias::uniform()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 1000);
    assert!(a.iter().all(|t| t.len() == 5));
    assert_eq!(a[0].valuation(0).len(), 12);
    let c = random_traces(CircuitKind::Xor4, 1000, 5, 8, &InputBias::uniform()).unwrap();
    assert_ne!(a, c);
    let counter = random_traces(CircuitKind::Counter3, 3, 20, 1, &InputBias::uniform()).unwrap();
    let props = counter[0].to_trace("c").propositions();
    assert!(props.iter().all(|p| ["incr", "decr", "overflow"].contains(&p.as_str())));
    assert_eq!(counter[0].to_trace("c").len(), 20);
}

#[test]
fn bias_is_validated() {
    let bad = InputBias::uniform().with("overflow", 0.5);
    assert!(random_traces(CircuitKind::Counter3, 1, 1, 0, &bad).is_err());
    let bad = InputBias::uniform().with("incr", 1.5);
    assert!(random_traces(CircuitKind::Counter3, 1, 1, 0, &bad).is_err());
    let always = InputBias::uniform().with("incr", 1.0).with("decr", 0.0);
    let t = &random_traces(CircuitKind::Counter3, 1, 9, 0, &always).unwrap()[0];
    assert_eq!(t.outputs, vec![0, 0, 0, 0, 0, 0, 0, 1, 0]);
}

#[test]
fn independence_holds_on_the_combinational_mux_sample() {
    let (s, t) = default_flow(CircuitKind::MuxComb);
    let qf = independence_property(CircuitKind::MuxComb, &s, &t).unwrap();
    let traces: Vec<_> = random_traces(CircuitKind::MuxComb, 40, 5, 11, &InputBias::uniform())
        .unwrap()
        .iter()
        .enumerate()
        .map(|(i, c)| c.to_trace(format!("m{i}")))
        .collect();
    assert!(eval_quantified(&traces, &qf));
}

#[test]
fn manifest_round_trips_and_names_sort() {
    let m = Manifest::new(
        CircuitKind::Counter3,
        2,
        20,
        9,
        InputBias::uniform().with("incr", 0.9),
        vec!["counter3_0000.trace".into(), "counter3_0001.trace".into()],
    );
    let json = serde_json::to_string(&m).unwrap();
    assert!(json.contains("\"kind\":\"counter3\""));
    assert_eq!(serde_json::from_str::<Manifest>(&json).unwrap(), m);
    assert_eq!(trace_name(CircuitKind::Xor4, 7, 18), "xor4_0007");
    assert_eq!(trace_name(CircuitKind::Xor4, 7, 20000), "xor4_00007");
}
