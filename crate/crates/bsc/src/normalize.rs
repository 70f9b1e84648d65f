//! Structural-congruence normal form.
//!
//! The canonical form flattens parallel composition into a sorted multiset
//! of components, removes inactive units, eliminates `(new n) 0` and unused
//! restrictions, hoists restrictions over parallel composition (renaming
//! binders when the side condition `n # P` calls for it), and assigns
//! canonical freshness indices to binders. Restrictions do not cross prefix
//! continuations: scope extrusion is a law of parallel composition only.

use crate::names::{fresh_against, Name, ProcVar};
use crate::subst::{alpha_canonical, substitute};
use crate::syntax::Process;
use std::collections::BTreeSet;

pub fn normalize(p: &Process) -> Process {
    let mut cur = p.clone();
    for _ in 0..6 {
        let structured = canon_nest(&cur);
        let indexed = canon_indices(&structured);
        if indexed == cur {
            return cur;
        }
        cur = indexed;
    }
    debug_assert!(false, "normalize did not converge");
    cur
}

/// Decompose a normalized process into its top-level restriction binders
/// and parallel components.
pub fn split_nest(p: &Process) -> (Vec<Name>, Vec<Process>) {
    let mut binders = Vec::new();
    let mut cur = p;
    while let Process::New { binder, body } = cur {
        binders.push(binder.clone());
        cur = body;
    }
    let mut refs = Vec::new();
    collect_par(cur, &mut refs);
    (binders, refs.into_iter().cloned().collect())
}

fn collect_par<'a>(p: &'a Process, out: &mut Vec<&'a Process>) {
    match p {
        Process::Par(l, r) => {
            collect_par(l, out);
            collect_par(r, out);
        }
        other => out.push(other),
    }
}

pub fn par_fold(comps: Vec<Process>) -> Process {
    let mut it = comps.into_iter();
    match it.next() {
        None => Process::Inact,
        Some(first) => it.fold(first, Process::par),
    }
}

// Structural pass: normalize one parallel nest (maximal Par/New region) and
// recurse into the guarded positions of each component.
fn canon_nest(p: &Process) -> Process {
    let free = p.free_names();
    let all = p.all_names();
    let mut binders: Vec<Name> = Vec::new();
    let mut comps: Vec<Process> = Vec::new();
    gather(p, &free, &all, &mut binders, &mut comps);

    for c in &mut comps {
        *c = canon_component(c);
    }
    comps.retain(|c| !c.is_inact());

    // unused restrictions vanish: (new n) P == P when n # P
    let used: BTreeSet<Name> = comps.iter().flat_map(|c| c.free_names()).collect();
    binders.retain(|b| used.contains(b));

    comps.sort_by(|a, b| {
        alpha_canonical(a)
            .cmp(&alpha_canonical(b))
            .then_with(|| a.cmp(b))
    });

    let mut out = par_fold(comps);
    for b in binders.into_iter().rev() {
        out = Process::New { binder: b, body: Box::new(out) };
    }
    out
}

fn gather(
    p: &Process,
    nest_free: &BTreeSet<Name>,
    nest_all: &BTreeSet<Name>,
    binders: &mut Vec<Name>,
    comps: &mut Vec<Process>,
) {
    match p {
        Process::Inact => {}
        Process::Par(l, r) => {
            gather(l, nest_free, nest_all, binders, comps);
            gather(r, nest_free, nest_all, binders, comps);
        }
        Process::New { binder, body } => {
            let clash = nest_free.contains(binder) || binders.contains(binder);
            if clash {
                let mut avoid: BTreeSet<Name> = nest_all.clone();
                avoid.extend(binders.iter().cloned());
                let fresh = fresh_against(&binder.base, &avoid);
                let renamed = substitute(body, binder, &fresh);
                binders.push(fresh);
                gather(&renamed, nest_free, nest_all, binders, comps);
            } else {
                binders.push(binder.clone());
                gather(body, nest_free, nest_all, binders, comps);
            }
        }
        other => comps.push(other.clone()),
    }
}

// Normalize inside one component: guarded positions are nest roots.
fn canon_component(p: &Process) -> Process {
    match p {
        Process::Inact | Process::Var(_) | Process::Counter(_) => p.clone(),
        Process::Request { channel, payload, cont } => Process::Request {
            channel: channel.clone(),
            payload: payload.clone(),
            cont: Box::new(canon_nest(cont)),
        },
        Process::Accept { channel, binder, cont } => Process::Accept {
            channel: channel.clone(),
            binder: binder.clone(),
            cont: Box::new(canon_nest(cont)),
        },
        Process::BcastSend { ep, value, cont } => Process::BcastSend {
            ep: ep.clone(),
            value: value.clone(),
            cont: Box::new(canon_nest(cont)),
        },
        Process::UniSend { ep, value, cont } => Process::UniSend {
            ep: ep.clone(),
            value: value.clone(),
            cont: Box::new(canon_nest(cont)),
        },
        Process::Gather { ep, binder, acc, phase, cont } => {
            let mut acc = acc.clone();
            if *phase == crate::syntax::GatherPhase::Done {
                // a stopped gather never reads its accumulator again
                acc.items.clear();
            }
            Process::Gather {
                ep: ep.clone(),
                binder: binder.clone(),
                acc,
                phase: *phase,
                cont: Box::new(canon_nest(cont)),
            }
        }
        Process::UniRecv { ep, binder, cont } => Process::UniRecv {
            ep: ep.clone(),
            binder: binder.clone(),
            cont: Box::new(canon_nest(cont)),
        },
        Process::Select { ep, label, cont } => Process::Select {
            ep: ep.clone(),
            label: label.clone(),
            cont: Box::new(canon_nest(cont)),
        },
        Process::Branch { ep, arms } => Process::Branch {
            ep: ep.clone(),
            arms: arms.iter().map(|(l, a)| (l.clone(), canon_nest(a))).collect(),
        },
        Process::Recover { body, handler } => {
            Process::recover(canon_component(body), canon_nest(handler))
        }
        Process::Rec { var, body, active } => Process::Rec {
            var: var.clone(),
            body: Box::new(canon_nest(body)),
            active: Box::new(canon_nest(active)),
        },
        Process::Par(..) | Process::New { .. } => canon_nest(p),
        Process::WithCounter { ep, counter, body } => {
            let body = canon_nest(body);
            let inert = !body.free_names().contains(counter)
                && !body.ungoverned_endpoints().contains(ep);
            if body.is_inact() || inert {
                body
            } else {
                Process::WithCounter {
                    ep: ep.clone(),
                    counter: counter.clone(),
                    body: Box::new(body),
                }
            }
        }
    }
}

// Canonical binder indices: every binder takes the smallest index of its
// base that avoids the term's free names and the binders in scope above it.
fn canon_indices(p: &Process) -> Process {
    let mut st = Indexer {
        forbidden: p.free_names(),
        forbidden_pv: p.free_proc_vars(),
    };
    st.go(p)
}

struct Indexer {
    forbidden: BTreeSet<Name>,
    forbidden_pv: BTreeSet<ProcVar>,
}

impl Indexer {
    fn with_binder<T>(
        &mut self,
        binder: &Name,
        body: &Process,
        f: impl FnOnce(&mut Self, &Process) -> T,
    ) -> (Name, T) {
        let target = fresh_against(&binder.base, &self.forbidden);
        let renamed;
        let body = if target == *binder {
            body
        } else {
            renamed = substitute(body, binder, &target);
            &renamed
        };
        self.forbidden.insert(target.clone());
        let r = f(self, body);
        self.forbidden.remove(&target);
        (target, r)
    }

    fn with_pv<T>(
        &mut self,
        var: &ProcVar,
        f: impl FnOnce(&mut Self, &ProcVar) -> T,
    ) -> (ProcVar, T) {
        let mut i = 0u32;
        let target = loop {
            let cand = ProcVar { base: var.base.clone(), index: i };
            if !self.forbidden_pv.contains(&cand) {
                break cand;
            }
            i += 1;
        };
        self.forbidden_pv.insert(target.clone());
        let r = f(self, &target);
        self.forbidden_pv.remove(&target);
        (target, r)
    }

    fn go(&mut self, p: &Process) -> Process {
        match p {
            Process::Inact | Process::Var(_) | Process::Counter(_) => p.clone(),
            Process::Request { channel, payload, cont } => Process::Request {
                channel: channel.clone(),
                payload: payload.clone(),
                cont: Box::new(self.go(cont)),
            },
            Process::Accept { channel, binder, cont } => {
                let (binder, cont) = self.with_binder(binder, cont, |s, b| s.go(b));
                Process::Accept { channel: channel.clone(), binder, cont: Box::new(cont) }
            }
            Process::BcastSend { ep, value, cont } => Process::BcastSend {
                ep: ep.clone(),
                value: value.clone(),
                cont: Box::new(self.go(cont)),
            },
            Process::UniSend { ep, value, cont } => Process::UniSend {
                ep: ep.clone(),
                value: value.clone(),
                cont: Box::new(self.go(cont)),
            },
            Process::Gather { ep, binder, acc, phase, cont } => {
                let (binder, cont) = self.with_binder(binder, cont, |s, b| s.go(b));
                Process::Gather {
                    ep: ep.clone(),
                    binder,
                    acc: acc.clone(),
                    phase: *phase,
                    cont: Box::new(cont),
                }
            }
            Process::UniRecv { ep, binder, cont } => {
                let (binder, cont) = self.with_binder(binder, cont, |s, b| s.go(b));
                Process::UniRecv { ep: ep.clone(), binder, cont: Box::new(cont) }
            }
            Process::Select { ep, label, cont } => Process::Select {
                ep: ep.clone(),
                label: label.clone(),
                cont: Box::new(self.go(cont)),
            },
            Process::Branch { ep, arms } => Process::Branch {
                ep: ep.clone(),
                arms: arms.iter().map(|(l, a)| (l.clone(), self.go(a))).collect(),
            },
            Process::Recover { body, handler } => {
                Process::recover(self.go(body), self.go(handler))
            }
            Process::Rec { var, body, active } => {
                let (var, (body, active)) = self.with_pv(var, |s, v| {
                    let body = rename_pv(body, var, v);
                    let active = rename_pv(active, var, v);
                    (s.go(&body), s.go(&active))
                });
                Process::Rec { var, body: Box::new(body), active: Box::new(active) }
            }
            Process::Par(l, r) => Process::par(self.go(l), self.go(r)),
            Process::New { binder, body } => {
                let (binder, body) = self.with_binder(binder, body, |s, b| s.go(b));
                Process::New { binder, body: Box::new(body) }
            }
            Process::WithCounter { ep, counter, body } => {
                let (counter, body) = self.with_binder(counter, body, |s, b| s.go(b));
                Process::WithCounter { ep: ep.clone(), counter, body: Box::new(body) }
            }
        }
    }
}

/// Rename a free process variable. Process variables are only ever replaced
/// by other variables here, so no capture is possible beyond shadowing.
pub fn rename_pv(p: &Process, from: &ProcVar, to: &ProcVar) -> Process {
    if from == to {
        return p.clone();
    }
    match p {
        Process::Var(x) if x == from => Process::Var(to.clone()),
        Process::Var(_) | Process::Inact | Process::Counter(_) => p.clone(),
        Process::Rec { var, body, active } => {
            if var == from {
                p.clone()
            } else if var == to {
                // avoid capturing the incoming variable
                let mut i = var.index + 1;
                let all: BTreeSet<ProcVar> = {
                    let mut s = body.free_proc_vars();
                    s.extend(active.free_proc_vars());
                    s.insert(from.clone());
                    s.insert(to.clone());
                    s
                };
                let fresh = loop {
                    let cand = ProcVar { base: var.base.clone(), index: i };
                    if !all.contains(&cand) {
                        break cand;
                    }
                    i += 1;
                };
                let body = rename_pv(body, var, &fresh);
                let active = rename_pv(active, var, &fresh);
                Process::Rec {
                    var: fresh.clone(),
                    body: Box::new(rename_pv(&body, from, to)),
                    active: Box::new(rename_pv(&active, from, to)),
                }
            } else {
                Process::Rec {
                    var: var.clone(),
                    body: Box::new(rename_pv(body, from, to)),
                    active: Box::new(rename_pv(active, from, to)),
                }
            }
        }
        Process::Request { channel, payload, cont } => Process::Request {
            channel: channel.clone(),
            payload: payload.clone(),
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::Accept { channel, binder, cont } => Process::Accept {
            channel: channel.clone(),
            binder: binder.clone(),
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::BcastSend { ep, value, cont } => Process::BcastSend {
            ep: ep.clone(),
            value: value.clone(),
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::UniSend { ep, value, cont } => Process::UniSend {
            ep: ep.clone(),
            value: value.clone(),
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::Gather { ep, binder, acc, phase, cont } => Process::Gather {
            ep: ep.clone(),
            binder: binder.clone(),
            acc: acc.clone(),
            phase: *phase,
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::UniRecv { ep, binder, cont } => Process::UniRecv {
            ep: ep.clone(),
            binder: binder.clone(),
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::Select { ep, label, cont } => Process::Select {
            ep: ep.clone(),
            label: label.clone(),
            cont: Box::new(rename_pv(cont, from, to)),
        },
        Process::Branch { ep, arms } => Process::Branch {
            ep: ep.clone(),
            arms: arms.iter().map(|(l, a)| (l.clone(), rename_pv(a, from, to))).collect(),
        },
        Process::Recover { body, handler } => Process::recover(
            rename_pv(body, from, to),
            rename_pv(handler, from, to),
        ),
        Process::Par(l, r) => Process::par(rename_pv(l, from, to), rename_pv(r, from, to)),
        Process::New { binder, body } => Process::New {
            binder: binder.clone(),
            body: Box::new(rename_pv(body, from, to)),
        },
        Process::WithCounter { ep, counter, body } => Process::WithCounter {
            ep: ep.clone(),
            counter: counter.clone(),
            body: Box::new(rename_pv(body, from, to)),
        },
    }
}
