//! Random AST generators for property tests.

use crate::names::{Name, ProcVar};
use crate::syntax::{Accumulator, Endpoint, GatherPhase, Label, Process};
use proptest::prelude::*;

pub fn arb_name() -> impl Strategy<Value = Name> {
    (
        prop::sample::select(vec!["a", "b", "s", "t", "v", "w", "x", "y", "u", "k", "n"]),
        0u32..3,
    )
        .prop_map(|(b, i)| Name::indexed(b, i))
}

pub fn arb_pvar() -> impl Strategy<Value = ProcVar> {
    prop::sample::select(vec!["X", "Y", "Z"]).prop_map(ProcVar::user)
}

pub fn arb_label() -> impl Strategy<Value = Label> {
    prop::sample::select(vec!["l1", "l2", "ok", "err"]).prop_map(Label::new)
}

fn arb_phase() -> impl Strategy<Value = GatherPhase> {
    prop::sample::select(vec![GatherPhase::Zero, GatherPhase::One, GatherPhase::Done])
}

pub fn arb_process() -> impl Strategy<Value = Process> {
    let leaf = prop_oneof![
        4 => Just(Process::Inact),
        1 => arb_pvar().prop_map(Process::Var),
        1 => arb_name().prop_map(Process::Counter),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            (arb_name(), arb_name(), inner.clone()).prop_map(|(a, s, p)| Process::Request {
                channel: a,
                payload: Endpoint::neg(s),
                cont: Box::new(p),
            }),
            (arb_name(), arb_name(), inner.clone()).prop_map(|(a, x, p)| Process::Accept {
                channel: a,
                binder: x,
                cont: Box::new(p),
            }),
            (arb_name(), arb_name(), inner.clone()).prop_map(|(s, v, p)| Process::BcastSend {
                ep: Endpoint::pos(s),
                value: v,
                cont: Box::new(p),
            }),
            (arb_name(), arb_name(), inner.clone()).prop_map(|(s, v, p)| Process::UniSend {
                ep: Endpoint::neg(s),
                value: v,
                cont: Box::new(p),
            }),
            (
                arb_name(),
                arb_name(),
                arb_name(),
                prop::collection::vec(arb_name(), 0..3),
                arb_phase(),
                inner.clone()
            )
                .prop_map(|(s, x, base, items, phase, p)| Process::Gather {
                    ep: Endpoint::pos(s),
                    binder: x,
                    acc: Accumulator { base, items },
                    phase,
                    cont: Box::new(p),
                }),
            (arb_name(), arb_name(), inner.clone()).prop_map(|(s, x, p)| Process::UniRecv {
                ep: Endpoint::neg(s),
                binder: x,
                cont: Box::new(p),
            }),
            (arb_name(), arb_label(), inner.clone()).prop_map(|(s, l, p)| Process::Select {
                ep: Endpoint::pos(s),
                label: l,
                cont: Box::new(p),
            }),
            (arb_name(), inner.clone(), prop::option::of(inner.clone())).prop_map(
                |(s, p, q)| {
                    let mut arms = vec![(Label::new("l1"), p)];
                    if let Some(q) = q {
                        arms.push((Label::new("l2"), q));
                    }
                    Process::Branch { ep: Endpoint::neg(s), arms }
                }
            ),
            (inner.clone(), inner.clone()).prop_map(|(p, r)| Process::recover(p, r)),
            (arb_pvar(), inner.clone()).prop_map(|(x, p)| Process::rec(x, p)),
            (arb_pvar(), inner.clone(), inner.clone()).prop_map(|(x, b, a)| Process::Rec {
                var: x,
                body: Box::new(b),
                active: Box::new(a),
            }),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Process::par(p, q)),
            (arb_name(), inner.clone()).prop_map(|(n, p)| Process::New {
                binder: n,
                body: Box::new(p),
            }),
            (arb_name(), arb_name(), prop::bool::ANY, inner).prop_map(|(s, k, pos, p)| {
                let ep = if pos { Endpoint::pos(s) } else { Endpoint::neg(s) };
                Process::WithCounter { ep, counter: k, body: Box::new(p) }
            }),
        ]
    })
}
