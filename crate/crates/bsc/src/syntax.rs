//! Abstract syntax of the broadcast session calculus.
//!
//! Besides the user-facing constructors the AST carries three runtime-only
//! forms that show up while a system reduces:
//!
//! * [`Process::Counter`] — the asserted counter artifact `(|k|)` that
//!   records one fired prefix for the endpoint whose counter is `k`;
//! * [`Process::WithCounter`] — a scoped counter allocation: inside the
//!   body, uses of the given endpoint are enumerated by `counter`. It
//!   translates to a restriction of the counter name;
//! * the `active` field of [`Process::Rec`] — the running copy of a
//!   recursive body. A pristine `rec X.P` has `active = X`; the copy
//!   evolves independently of the replicated definition.

use crate::names::{Name, ProcVar};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn sign(self) -> char {
        match self {
            Polarity::Pos => '+',
            Polarity::Neg => '-',
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub session: Name,
    pub polarity: Polarity,
}

impl Endpoint {
    pub fn pos(session: Name) -> Endpoint {
        Endpoint { session, polarity: Polarity::Pos }
    }

    pub fn neg(session: Name) -> Endpoint {
        Endpoint { session, polarity: Polarity::Neg }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.session, self.polarity.sign())
    }
}

impl fmt::Debug for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub String);

impl Label {
    pub fn new(text: impl Into<String>) -> Label {
        Label(text.into())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Gather accumulator: the initial accumulator name plus the values
/// absorbed so far. Translates to the left-nested join
/// `((base . v1) . v2) ...`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Accumulator {
    pub base: Name,
    pub items: Vec<Name>,
}

impl Accumulator {
    pub fn fresh(base: Name) -> Accumulator {
        Accumulator { base, items: Vec::new() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GatherPhase {
    /// Trigger pending: the iteration head has not been dispatched.
    Zero,
    /// Iteration head active: may absorb one send or stop.
    One,
    /// Stopped: only the inert replicated receiver remains.
    Done,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Process {
    Inact,
    /// `a!(s-).P` — session initiation request, broadcasting the `s-` endpoint.
    Request {
        channel: Name,
        payload: Endpoint,
        cont: Box<Process>,
    },
    /// `a?(x).P` — session accept; `binder` is bound in `cont`.
    Accept {
        channel: Name,
        binder: Name,
        cont: Box<Process>,
    },
    /// `s+!<v>.P` — broadcast send.
    BcastSend {
        ep: Endpoint,
        value: Name,
        cont: Box<Process>,
    },
    /// `s-!<v>.P` — unicast send toward the gathering endpoint.
    UniSend {
        ep: Endpoint,
        value: Name,
        cont: Box<Process>,
    },
    /// `s+?(x; u).P` — gather; `binder` is bound in `cont`.
    Gather {
        ep: Endpoint,
        binder: Name,
        acc: Accumulator,
        phase: GatherPhase,
        cont: Box<Process>,
    },
    /// `s-?(x).P` — unicast receive; `binder` is bound in `cont`.
    UniRecv {
        ep: Endpoint,
        binder: Name,
        cont: Box<Process>,
    },
    /// `s+#l.P` — selection broadcast.
    Select {
        ep: Endpoint,
        label: Label,
        cont: Box<Process>,
    },
    /// `s-#{l1: P1, l2: P2}` — branching.
    Branch {
        ep: Endpoint,
        arms: Vec<(Label, Process)>,
    },
    /// `P >< R` — process with recovery handler.
    Recover {
        body: Box<Process>,
        handler: Box<Process>,
    },
    /// `rec X.P`, plus the running copy. `active == X` is the pristine
    /// (phase 0) state; any other `active` is a dispatched iteration.
    Rec {
        var: ProcVar,
        body: Box<Process>,
        active: Box<Process>,
    },
    Var(ProcVar),
    Par(Box<Process>, Box<Process>),
    /// `(new n) P`.
    New {
        binder: Name,
        body: Box<Process>,
    },
    /// `(|k|)` — counter artifact, one fired prefix on counter `k`.
    Counter(Name),
    /// `(ctr k = s+) P` — scoped counter allocation for an endpoint.
    WithCounter {
        ep: Endpoint,
        counter: Name,
        body: Box<Process>,
    },
}

impl Process {
    pub fn par(left: Process, right: Process) -> Process {
        Process::Par(Box::new(left), Box::new(right))
    }

    pub fn recover(body: Process, handler: Process) -> Process {
        Process::Recover { body: Box::new(body), handler: Box::new(handler) }
    }

    pub fn rec(var: ProcVar, body: Process) -> Process {
        Process::Rec {
            var: var.clone(),
            body: Box::new(body),
            active: Box::new(Process::Var(var)),
        }
    }

    pub fn is_inact(&self) -> bool {
        matches!(self, Process::Inact)
    }

    /// Free names: session names (through either endpoint), shared channel
    /// names, payload values, counter names and accumulator parts.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Inact => {}
            Process::Request { channel, payload, cont } => {
                out.insert(channel.clone());
                out.insert(payload.session.clone());
                cont.collect_free(out);
            }
            Process::Accept { channel, binder, cont } => {
                out.insert(channel.clone());
                let mut inner = BTreeSet::new();
                cont.collect_free(&mut inner);
                inner.remove(binder);
                out.extend(inner);
            }
            Process::BcastSend { ep, value, cont } | Process::UniSend { ep, value, cont } => {
                out.insert(ep.session.clone());
                out.insert(value.clone());
                cont.collect_free(out);
            }
            Process::Gather { ep, binder, acc, cont, .. } => {
                out.insert(ep.session.clone());
                out.insert(acc.base.clone());
                out.extend(acc.items.iter().cloned());
                let mut inner = BTreeSet::new();
                cont.collect_free(&mut inner);
                inner.remove(binder);
                out.extend(inner);
            }
            Process::UniRecv { ep, binder, cont } => {
                out.insert(ep.session.clone());
                let mut inner = BTreeSet::new();
                cont.collect_free(&mut inner);
                inner.remove(binder);
                out.extend(inner);
            }
            Process::Select { ep, cont, .. } => {
                out.insert(ep.session.clone());
                cont.collect_free(out);
            }
            Process::Branch { ep, arms } => {
                out.insert(ep.session.clone());
                for (_, p) in arms {
                    p.collect_free(out);
                }
            }
            Process::Recover { body, handler } => {
                body.collect_free(out);
                handler.collect_free(out);
            }
            Process::Rec { body, active, .. } => {
                body.collect_free(out);
                active.collect_free(out);
            }
            Process::Var(_) => {}
            Process::Par(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Process::New { binder, body } => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(binder);
                out.extend(inner);
            }
            Process::Counter(k) => {
                out.insert(k.clone());
            }
            Process::WithCounter { counter, body, .. } => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(counter);
                out.extend(inner);
            }
        }
    }

    /// Every name occurring anywhere in the term, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Inact | Process::Var(_) => {}
            Process::Request { channel, payload, cont } => {
                out.insert(channel.clone());
                out.insert(payload.session.clone());
                cont.collect_all(out);
            }
            Process::Accept { channel, binder, cont } => {
                out.insert(channel.clone());
                out.insert(binder.clone());
                cont.collect_all(out);
            }
            Process::BcastSend { ep, value, cont } | Process::UniSend { ep, value, cont } => {
                out.insert(ep.session.clone());
                out.insert(value.clone());
                cont.collect_all(out);
            }
            Process::Gather { ep, binder, acc, cont, .. } => {
                out.insert(ep.session.clone());
                out.insert(binder.clone());
                out.insert(acc.base.clone());
                out.extend(acc.items.iter().cloned());
                cont.collect_all(out);
            }
            Process::UniRecv { ep, binder, cont } => {
                out.insert(ep.session.clone());
                out.insert(binder.clone());
                cont.collect_all(out);
            }
            Process::Select { ep, cont, .. } => {
                out.insert(ep.session.clone());
                cont.collect_all(out);
            }
            Process::Branch { ep, arms } => {
                out.insert(ep.session.clone());
                for (_, p) in arms {
                    p.collect_all(out);
                }
            }
            Process::Recover { body, handler } => {
                body.collect_all(out);
                handler.collect_all(out);
            }
            Process::Rec { body, active, .. } => {
                body.collect_all(out);
                active.collect_all(out);
            }
            Process::Par(l, r) => {
                l.collect_all(out);
                r.collect_all(out);
            }
            Process::New { binder, body } => {
                out.insert(binder.clone());
                body.collect_all(out);
            }
            Process::Counter(k) => {
                out.insert(k.clone());
            }
            Process::WithCounter { counter, body, .. } => {
                out.insert(counter.clone());
                body.collect_all(out);
            }
        }
    }

    /// Free process variables.
    pub fn free_proc_vars(&self) -> BTreeSet<ProcVar> {
        let mut out = BTreeSet::new();
        self.collect_fpv(&mut out);
        out
    }

    fn collect_fpv(&self, out: &mut BTreeSet<ProcVar>) {
        match self {
            Process::Var(x) => {
                out.insert(x.clone());
            }
            Process::Rec { var, body, active } => {
                let mut inner = BTreeSet::new();
                body.collect_fpv(&mut inner);
                active.collect_fpv(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            Process::Request { cont, .. }
            | Process::Accept { cont, .. }
            | Process::BcastSend { cont, .. }
            | Process::UniSend { cont, .. }
            | Process::Gather { cont, .. }
            | Process::UniRecv { cont, .. }
            | Process::Select { cont, .. } => cont.collect_fpv(out),
            Process::Branch { arms, .. } => {
                for (_, p) in arms {
                    p.collect_fpv(out);
                }
            }
            Process::Recover { body, handler } => {
                body.collect_fpv(out);
                handler.collect_fpv(out);
            }
            Process::Par(l, r) => {
                l.collect_fpv(out);
                r.collect_fpv(out);
            }
            Process::New { body, .. } | Process::WithCounter { body, .. } => body.collect_fpv(out),
            Process::Inact | Process::Counter(_) => {}
        }
    }

    /// Endpoint uses (prefix subjects) not governed by an enclosing
    /// `WithCounter` for that endpoint, nor introduced by a `Request` or
    /// `Accept` prefix on their session.
    pub fn ungoverned_endpoints(&self) -> BTreeSet<Endpoint> {
        let mut out = BTreeSet::new();
        self.collect_ungoverned(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_ungoverned(&self, governed: &mut BTreeSet<Endpoint>, out: &mut BTreeSet<Endpoint>) {
        let use_ep = |ep: &Endpoint, governed: &BTreeSet<Endpoint>, out: &mut BTreeSet<Endpoint>| {
            if !governed.contains(ep) {
                out.insert(ep.clone());
            }
        };
        match self {
            Process::Inact | Process::Var(_) | Process::Counter(_) => {}
            Process::Request { payload, cont, .. } => {
                // The continuation's s+ endpoint gets its counter at the
                // initiation prefix itself.
                let ep = Endpoint::pos(payload.session.clone());
                let added = governed.insert(ep.clone());
                cont.collect_ungoverned(governed, out);
                if added {
                    governed.remove(&ep);
                }
            }
            Process::Accept { binder, cont, .. } => {
                let ep = Endpoint::neg(binder.clone());
                let added = governed.insert(ep.clone());
                cont.collect_ungoverned(governed, out);
                if added {
                    governed.remove(&ep);
                }
            }
            Process::BcastSend { ep, cont, .. }
            | Process::UniSend { ep, cont, .. }
            | Process::Gather { ep, cont, .. }
            | Process::UniRecv { ep, cont, .. }
            | Process::Select { ep, cont, .. } => {
                use_ep(ep, governed, out);
                cont.collect_ungoverned(governed, out);
            }
            Process::Branch { ep, arms } => {
                use_ep(ep, governed, out);
                for (_, p) in arms {
                    p.collect_ungoverned(governed, out);
                }
            }
            Process::Recover { body, handler } => {
                body.collect_ungoverned(governed, out);
                handler.collect_ungoverned(governed, out);
            }
            Process::Rec { body, active, .. } => {
                body.collect_ungoverned(governed, out);
                active.collect_ungoverned(governed, out);
            }
            Process::Par(l, r) => {
                l.collect_ungoverned(governed, out);
                r.collect_ungoverned(governed, out);
            }
            Process::New { body, .. } => body.collect_ungoverned(governed, out),
            Process::WithCounter { ep, body, .. } => {
                let added = governed.insert(ep.clone());
                body.collect_ungoverned(governed, out);
                if added {
                    governed.remove(ep);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::Name;
    use proptest::prelude::*;

    // Independent free-name oracle: plain traversal with an explicit list of
    // binders in scope.
    fn free_oracle(p: &Process, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let mut hit = |n: &Name, bound: &Vec<Name>, out: &mut BTreeSet<Name>| {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        };
        match p {
            Process::Inact | Process::Var(_) => {}
            Process::Request { channel, payload, cont } => {
                hit(channel, bound, out);
                hit(&payload.session, bound, out);
                free_oracle(cont, bound, out);
            }
            Process::Accept { channel, binder, cont } => {
                hit(channel, bound, out);
                bound.push(binder.clone());
                free_oracle(cont, bound, out);
                bound.pop();
            }
            Process::BcastSend { ep, value, cont } | Process::UniSend { ep, value, cont } => {
                hit(&ep.session, bound, out);
                hit(value, bound, out);
                free_oracle(cont, bound, out);
            }
            Process::Gather { ep, binder, acc, cont, .. } => {
                hit(&ep.session, bound, out);
                hit(&acc.base, bound, out);
                for i in &acc.items {
                    hit(i, bound, out);
                }
                bound.push(binder.clone());
                free_oracle(cont, bound, out);
                bound.pop();
            }
            Process::UniRecv { ep, binder, cont } => {
                hit(&ep.session, bound, out);
                bound.push(binder.clone());
                free_oracle(cont, bound, out);
                bound.pop();
            }
            Process::Select { ep, cont, .. } => {
                hit(&ep.session, bound, out);
                free_oracle(cont, bound, out);
            }
            Process::Branch { ep, arms } => {
                hit(&ep.session, bound, out);
                for (_, a) in arms {
                    free_oracle(a, bound, out);
                }
            }
            Process::Recover { body, handler } => {
                free_oracle(body, bound, out);
                free_oracle(handler, bound, out);
            }
            Process::Rec { body, active, .. } => {
                free_oracle(body, bound, out);
                free_oracle(active, bound, out);
            }
            Process::Par(l, r) => {
                free_oracle(l, bound, out);
                free_oracle(r, bound, out);
            }
            Process::New { binder, body } => {
                bound.push(binder.clone());
                free_oracle(body, bound, out);
                bound.pop();
            }
            Process::Counter(k) => hit(k, bound, out),
            Process::WithCounter { counter, body, .. } => {
                bound.push(counter.clone());
                free_oracle(body, bound, out);
                bound.pop();
            }
        }
    }

    fn fn_oracle(p: &Process) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        free_oracle(p, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn free_names_inact() {
        assert!(Process::Inact.free_names().is_empty());
    }

    #[test]
    fn free_names_request() {
        let p = Process::Request {
            channel: Name::user("a"),
            payload: Endpoint::neg(Name::user("s")),
            cont: Box::new(Process::Inact),
        };
        let expect: BTreeSet<Name> = [Name::user("a"), Name::user("s")].into_iter().collect();
        assert_eq!(p.free_names(), expect);
    }

    #[test]
    fn free_names_binder_occlusion() {
        // a?(x).x-!<v>.0 — x is bound, so only {a, v} are free
        let p = Process::Accept {
            channel: Name::user("a"),
            binder: Name::user("x"),
            cont: Box::new(Process::UniSend {
                ep: Endpoint::neg(Name::user("x")),
                value: Name::user("v"),
                cont: Box::new(Process::Inact),
            }),
        };
        let expect = fn_oracle(&p);
        assert_eq!(p.free_names(), expect);
        let want: BTreeSet<Name> = [Name::user("a"), Name::user("v")].into_iter().collect();
        assert_eq!(p.free_names(), want);
    }

    proptest! {
        #[test]
        fn free_names_matches_oracle(p in crate::testgen::arb_process()) {
            prop_assert_eq!(p.free_names(), fn_oracle(&p));
        }
    }
}
