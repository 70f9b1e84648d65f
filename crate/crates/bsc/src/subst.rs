//! Capture-avoiding substitution of names for names, and alpha-equivalence
//! via a canonical de Bruijn renaming of binders.

use crate::names::{fresh_against, Name, ProcVar};
use crate::syntax::{Endpoint, Process};
use std::collections::{BTreeSet, HashMap};

fn subst_name(n: &Name, x: &Name, v: &Name) -> Name {
    if n == x {
        v.clone()
    } else {
        n.clone()
    }
}

fn subst_ep(ep: &Endpoint, x: &Name, v: &Name) -> Endpoint {
    Endpoint { session: subst_name(&ep.session, x, v), polarity: ep.polarity }
}

/// `p[v/x]`: replace free occurrences of `x` by `v`, alpha-renaming binders
/// that would capture `v`.
pub fn substitute(p: &Process, x: &Name, v: &Name) -> Process {
    if x == v {
        return p.clone();
    }
    match p {
        Process::Inact => Process::Inact,
        Process::Request { channel, payload, cont } => Process::Request {
            channel: subst_name(channel, x, v),
            payload: subst_ep(payload, x, v),
            cont: Box::new(substitute(cont, x, v)),
        },
        Process::Accept { channel, binder, cont } => {
            let channel = subst_name(channel, x, v);
            let (binder, cont) = subst_under_binder(binder, cont, x, v);
            Process::Accept { channel, binder, cont: Box::new(cont) }
        }
        Process::BcastSend { ep, value, cont } => Process::BcastSend {
            ep: subst_ep(ep, x, v),
            value: subst_name(value, x, v),
            cont: Box::new(substitute(cont, x, v)),
        },
        Process::UniSend { ep, value, cont } => Process::UniSend {
            ep: subst_ep(ep, x, v),
            value: subst_name(value, x, v),
            cont: Box::new(substitute(cont, x, v)),
        },
        Process::Gather { ep, binder, acc, phase, cont } => {
            let ep = subst_ep(ep, x, v);
            let mut acc = acc.clone();
            acc.base = subst_name(&acc.base, x, v);
            for item in &mut acc.items {
                *item = subst_name(item, x, v);
            }
            let (binder, cont) = subst_under_binder(binder, cont, x, v);
            Process::Gather { ep, binder, acc, phase: *phase, cont: Box::new(cont) }
        }
        Process::UniRecv { ep, binder, cont } => {
            let ep = subst_ep(ep, x, v);
            let (binder, cont) = subst_under_binder(binder, cont, x, v);
            Process::UniRecv { ep, binder, cont: Box::new(cont) }
        }
        Process::Select { ep, label, cont } => Process::Select {
            ep: subst_ep(ep, x, v),
            label: label.clone(),
            cont: Box::new(substitute(cont, x, v)),
        },
        Process::Branch { ep, arms } => Process::Branch {
            ep: subst_ep(ep, x, v),
            arms: arms.iter().map(|(l, a)| (l.clone(), substitute(a, x, v))).collect(),
        },
        Process::Recover { body, handler } => Process::recover(
            substitute(body, x, v),
            substitute(handler, x, v),
        ),
        Process::Rec { var, body, active } => Process::Rec {
            var: var.clone(),
            body: Box::new(substitute(body, x, v)),
            active: Box::new(substitute(active, x, v)),
        },
        Process::Var(y) => Process::Var(y.clone()),
        Process::Par(l, r) => Process::par(substitute(l, x, v), substitute(r, x, v)),
        Process::New { binder, body } => {
            let (binder, body) = subst_under_binder(binder, body, x, v);
            Process::New { binder, body: Box::new(body) }
        }
        Process::Counter(k) => Process::Counter(subst_name(k, x, v)),
        Process::WithCounter { ep, counter, body } => {
            let ep = subst_ep(ep, x, v);
            let (counter, body) = subst_under_binder(counter, body, x, v);
            Process::WithCounter { ep, counter, body: Box::new(body) }
        }
    }
}

fn subst_under_binder(binder: &Name, body: &Process, x: &Name, v: &Name) -> (Name, Process) {
    if binder == x {
        // x is shadowed here
        return (binder.clone(), body.clone());
    }
    if binder == v && body.free_names().contains(x) {
        // would capture the incoming v: rename the binder first
        let mut avoid: BTreeSet<Name> = body.all_names();
        avoid.insert(x.clone());
        avoid.insert(v.clone());
        avoid.insert(binder.clone());
        let fresh = fresh_against(&binder.base, &avoid);
        let body = substitute(body, binder, &fresh);
        let body = substitute(&body, x, v);
        return (fresh, body);
    }
    (binder.clone(), substitute(body, x, v))
}

/// Canonical alpha-renaming: every name binder becomes `("", i)` and every
/// recursion binder becomes `("", i)` in binder-traversal order. The empty
/// base cannot be written in source, so canonical binders never collide
/// with free names. Two terms are alpha-equivalent iff their canonical
/// forms are equal.
pub fn alpha_canonical(p: &Process) -> Process {
    let mut st = Canon { names: HashMap::new(), pvars: HashMap::new(), next: 0 };
    st.go(p)
}

pub fn alpha_eq(a: &Process, b: &Process) -> bool {
    alpha_canonical(a) == alpha_canonical(b)
}

struct Canon {
    names: HashMap<Name, Vec<Name>>,
    pvars: HashMap<ProcVar, Vec<ProcVar>>,
    next: u32,
}

impl Canon {
    fn lookup(&self, n: &Name) -> Name {
        self.names.get(n).and_then(|v| v.last()).cloned().unwrap_or_else(|| n.clone())
    }

    fn lookup_pv(&self, x: &ProcVar) -> ProcVar {
        self.pvars.get(x).and_then(|v| v.last()).cloned().unwrap_or_else(|| x.clone())
    }

    fn ep(&self, ep: &Endpoint) -> Endpoint {
        Endpoint { session: self.lookup(&ep.session), polarity: ep.polarity }
    }

    fn with_binder<T>(&mut self, binder: &Name, f: impl FnOnce(&mut Self) -> T) -> (Name, T) {
        let fresh = Name::indexed("", self.next);
        self.next += 1;
        self.names.entry(binder.clone()).or_default().push(fresh.clone());
        let r = f(self);
        self.names.get_mut(binder).unwrap().pop();
        (fresh, r)
    }

    fn with_pv_binder<T>(&mut self, binder: &ProcVar, f: impl FnOnce(&mut Self) -> T) -> (ProcVar, T) {
        let fresh = ProcVar { base: String::new(), index: self.next };
        self.next += 1;
        self.pvars.entry(binder.clone()).or_default().push(fresh.clone());
        let r = f(self);
        self.pvars.get_mut(binder).unwrap().pop();
        (fresh, r)
    }

    fn go(&mut self, p: &Process) -> Process {
        match p {
            Process::Inact => Process::Inact,
            Process::Request { channel, payload, cont } => Process::Request {
                channel: self.lookup(channel),
                payload: self.ep(payload),
                cont: Box::new(self.go(cont)),
            },
            Process::Accept { channel, binder, cont } => {
                let channel = self.lookup(channel);
                let (binder, cont) = self.with_binder(binder, |s| s.go(cont));
                Process::Accept { channel, binder, cont: Box::new(cont) }
            }
            Process::BcastSend { ep, value, cont } => Process::BcastSend {
                ep: self.ep(ep),
                value: self.lookup(value),
                cont: Box::new(self.go(cont)),
            },
            Process::UniSend { ep, value, cont } => Process::UniSend {
                ep: self.ep(ep),
                value: self.lookup(value),
                cont: Box::new(self.go(cont)),
            },
            Process::Gather { ep, binder, acc, phase, cont } => {
                let ep = self.ep(ep);
                let acc = crate::syntax::Accumulator {
                    base: self.lookup(&acc.base),
                    items: acc.items.iter().map(|i| self.lookup(i)).collect(),
                };
                let (binder, cont) = self.with_binder(binder, |s| s.go(cont));
                Process::Gather { ep, binder, acc, phase: *phase, cont: Box::new(cont) }
            }
            Process::UniRecv { ep, binder, cont } => {
                let ep = self.ep(ep);
                let (binder, cont) = self.with_binder(binder, |s| s.go(cont));
                Process::UniRecv { ep, binder, cont: Box::new(cont) }
            }
            Process::Select { ep, label, cont } => Process::Select {
                ep: self.ep(ep),
                label: label.clone(),
                cont: Box::new(self.go(cont)),
            },
            Process::Branch { ep, arms } => Process::Branch {
                ep: self.ep(ep),
                arms: arms.iter().map(|(l, a)| (l.clone(), self.go(a))).collect(),
            },
            Process::Recover { body, handler } => {
                Process::recover(self.go(body), self.go(handler))
            }
            Process::Rec { var, body, active } => {
                let (var, (body, active)) =
                    self.with_pv_binder(var, |s| (s.go(body), s.go(active)));
                Process::Rec { var, body: Box::new(body), active: Box::new(active) }
            }
            Process::Var(x) => Process::Var(self.lookup_pv(x)),
            Process::Par(l, r) => Process::par(self.go(l), self.go(r)),
            Process::New { binder, body } => {
                let (binder, body) = self.with_binder(binder, |s| s.go(body));
                Process::New { binder, body: Box::new(body) }
            }
            Process::Counter(k) => Process::Counter(self.lookup(k)),
            Process::WithCounter { ep, counter, body } => {
                let ep = self.ep(ep);
                let (counter, body) = self.with_binder(counter, |s| s.go(body));
                Process::WithCounter { ep, counter, body: Box::new(body) }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Accumulator, GatherPhase};
    use proptest::prelude::*;

    fn n(s: &str) -> Name {
        Name::user(s)
    }

    // De Bruijn oracle: in the canonical form every binder is ("", i), so a
    // plain free-occurrence replacement cannot capture. Substitution is
    // correct iff it agrees with the naive replacement on canonical forms.
    fn naive_replace(p: &Process, x: &Name, v: &Name) -> Process {
        let r = |m: &Name| if m == x { v.clone() } else { m.clone() };
        let rep = |ep: &Endpoint| Endpoint { session: r(&ep.session), polarity: ep.polarity };
        match p {
            Process::Inact | Process::Var(_) => p.clone(),
            Process::Request { channel, payload, cont } => Process::Request {
                channel: r(channel),
                payload: rep(payload),
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::Accept { channel, binder, cont } => Process::Accept {
                channel: r(channel),
                binder: binder.clone(),
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::BcastSend { ep, value, cont } => Process::BcastSend {
                ep: rep(ep),
                value: r(value),
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::UniSend { ep, value, cont } => Process::UniSend {
                ep: rep(ep),
                value: r(value),
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::Gather { ep, binder, acc, phase, cont } => Process::Gather {
                ep: rep(ep),
                binder: binder.clone(),
                acc: Accumulator {
                    base: r(&acc.base),
                    items: acc.items.iter().map(&r).collect(),
                },
                phase: *phase,
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::UniRecv { ep, binder, cont } => Process::UniRecv {
                ep: rep(ep),
                binder: binder.clone(),
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::Select { ep, label, cont } => Process::Select {
                ep: rep(ep),
                label: label.clone(),
                cont: Box::new(naive_replace(cont, x, v)),
            },
            Process::Branch { ep, arms } => Process::Branch {
                ep: rep(ep),
                arms: arms.iter().map(|(l, a)| (l.clone(), naive_replace(a, x, v))).collect(),
            },
            Process::Recover { body, handler } => Process::recover(
                naive_replace(body, x, v),
                naive_replace(handler, x, v),
            ),
            Process::Rec { var, body, active } => Process::Rec {
                var: var.clone(),
                body: Box::new(naive_replace(body, x, v)),
                active: Box::new(naive_replace(active, x, v)),
            },
            Process::Par(l, r2) => {
                Process::par(naive_replace(l, x, v), naive_replace(r2, x, v))
            }
            Process::New { binder, body } => Process::New {
                binder: binder.clone(),
                body: Box::new(naive_replace(body, x, v)),
            },
            Process::Counter(k) => Process::Counter(r(k)),
            Process::WithCounter { ep, counter, body } => Process::WithCounter {
                ep: rep(ep),
                counter: counter.clone(),
                body: Box::new(naive_replace(body, x, v)),
            },
        }
    }

    #[test]
    fn subst_unirecv_endpoint() {
        // (x-?(y).0)[s/x] = s-?(y).0
        let p = Process::UniRecv {
            ep: Endpoint::neg(n("x")),
            binder: n("y"),
            cont: Box::new(Process::Inact),
        };
        let got = substitute(&p, &n("x"), &n("s"));
        let want = Process::UniRecv {
            ep: Endpoint::neg(n("s")),
            binder: n("y"),
            cont: Box::new(Process::Inact),
        };
        assert_eq!(got, want);
    }

    #[test]
    fn subst_inact() {
        assert_eq!(substitute(&Process::Inact, &n("x"), &n("v")), Process::Inact);
    }

    #[test]
    fn subst_avoids_capture() {
        // ((new v) s+!<v>.0)[v/s] must rename the binder
        let p = Process::New {
            binder: n("v"),
            body: Box::new(Process::BcastSend {
                ep: Endpoint::pos(n("s")),
                value: n("v"),
                cont: Box::new(Process::Inact),
            }),
        };
        let got = substitute(&p, &n("s"), &n("v"));
        // expected result computed by the de Bruijn oracle
        let want = naive_replace(&alpha_canonical(&p), &n("s"), &n("v"));
        assert_eq!(alpha_canonical(&got), want);
        // the sent value stays bound, the session endpoint is now free v
        match &got {
            Process::New { binder, body } => {
                assert_ne!(*binder, n("v"));
                match &**body {
                    Process::BcastSend { ep, value, .. } => {
                        assert_eq!(ep.session, n("v"));
                        assert_eq!(value, binder);
                    }
                    other => panic!("unexpected body {other:?}"),
                }
            }
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn gather_phase_is_preserved() {
        let p = Process::Gather {
            ep: Endpoint::pos(n("s")),
            binder: n("x"),
            acc: Accumulator { base: n("u"), items: vec![n("v")] },
            phase: GatherPhase::One,
            cont: Box::new(Process::Inact),
        };
        let q = substitute(&p, &n("v"), &n("w"));
        match q {
            Process::Gather { acc, phase, .. } => {
                assert_eq!(phase, GatherPhase::One);
                assert_eq!(acc.items, vec![n("w")]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn subst_matches_de_bruijn_oracle(
            p in crate::testgen::arb_process(),
            x in crate::testgen::arb_name(),
            v in crate::testgen::arb_name(),
        ) {
            let direct = alpha_canonical(&substitute(&p, &x, &v));
            let oracle = naive_replace(&alpha_canonical(&p), &x, &v);
            prop_assert_eq!(direct, oracle);
        }

        #[test]
        fn subst_identity(p in crate::testgen::arb_process(), x in crate::testgen::arb_name()) {
            prop_assert!(alpha_eq(&substitute(&p, &x, &x), &p));
        }
    }
}
