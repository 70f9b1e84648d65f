//! Pretty-printer for processes. Output re-parses to the same term: bound
//! and free names print with their explicit index, gathers print their
//! accumulator, running recursions print their active copy.

use crate::syntax::{GatherPhase, Process};
use std::fmt::Write;

pub fn pretty(p: &Process) -> String {
    let mut out = String::new();
    pp_par(p, &mut out);
    out
}

impl std::fmt::Display for Process {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&pretty(self))
    }
}

fn pp_par(p: &Process, out: &mut String) {
    match p {
        Process::Par(l, r) => {
            pp_par(l, out);
            out.push_str(" | ");
            if matches!(**r, Process::Par(..)) {
                out.push('(');
                pp_par(r, out);
                out.push(')');
            } else {
                pp_recov(r, out);
            }
        }
        _ => pp_recov(p, out),
    }
}

fn pp_recov(p: &Process, out: &mut String) {
    match p {
        Process::Recover { body, handler } => {
            match **body {
                Process::Par(..) => {
                    out.push('(');
                    pp_par(body, out);
                    out.push(')');
                }
                Process::Recover { .. } => pp_recov(body, out),
                _ => pp_atom(body, out),
            }
            out.push_str(" >< ");
            match **handler {
                Process::Par(..) | Process::Recover { .. } => {
                    out.push('(');
                    pp_par(handler, out);
                    out.push(')');
                }
                _ => pp_atom(handler, out),
            }
        }
        _ => pp_atom(p, out),
    }
}

fn pp_cont(p: &Process, out: &mut String) {
    match p {
        Process::Par(..) | Process::Recover { .. } => {
            out.push('(');
            pp_par(p, out);
            out.push(')');
        }
        _ => pp_atom(p, out),
    }
}

fn pp_body(p: &Process, out: &mut String) {
    // bodies of `rec`, `(new _)`, `(ctr ..)`: the recov level
    match p {
        Process::Par(..) => {
            out.push('(');
            pp_par(p, out);
            out.push(')');
        }
        _ => pp_recov(p, out),
    }
}

fn pp_atom(p: &Process, out: &mut String) {
    match p {
        Process::Inact => out.push('0'),
        Process::Request { channel, payload, cont } => {
            let _ = write!(out, "{}!({}-).", channel, payload.session);
            pp_cont(cont, out);
        }
        Process::Accept { channel, binder, cont } => {
            let _ = write!(out, "{channel}?({binder}).");
            pp_cont(cont, out);
        }
        Process::BcastSend { ep, value, cont } => {
            let _ = write!(out, "{}+!<{}>.", ep.session, value);
            pp_cont(cont, out);
        }
        Process::UniSend { ep, value, cont } => {
            let _ = write!(out, "{}-!<{}>.", ep.session, value);
            pp_cont(cont, out);
        }
        Process::Gather { ep, binder, acc, phase, cont } => {
            let ph = match phase {
                GatherPhase::Zero => "",
                GatherPhase::One => "1",
                GatherPhase::Done => "2",
            };
            let _ = write!(out, "{}+?{}({}; {}", ep.session, ph, binder, acc.base);
            for v in &acc.items {
                let _ = write!(out, ", {v}");
            }
            out.push_str(").");
            pp_cont(cont, out);
        }
        Process::UniRecv { ep, binder, cont } => {
            let _ = write!(out, "{}-?({}).", ep.session, binder);
            pp_cont(cont, out);
        }
        Process::Select { ep, label, cont } => {
            let _ = write!(out, "{}+#{}.", ep.session, label);
            pp_cont(cont, out);
        }
        Process::Branch { ep, arms } => {
            let _ = write!(out, "{}-#{{", ep.session);
            for (i, (label, arm)) in arms.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{label}: ");
                pp_par(arm, out);
            }
            out.push('}');
        }
        Process::Rec { var, body, active } => {
            if **active == Process::Var(var.clone()) {
                let _ = write!(out, "rec {var}.");
            } else {
                let _ = write!(out, "rec {var} [");
                pp_par(active, out);
                out.push_str("].");
            }
            pp_body(body, out);
        }
        Process::Var(x) => {
            let _ = write!(out, "{x}");
        }
        Process::New { binder, body } => {
            let _ = write!(out, "(new {binder}) ");
            pp_body(body, out);
        }
        Process::Counter(k) => {
            let _ = write!(out, "(|{k}|)");
        }
        Process::WithCounter { ep, counter, body } => {
            let _ = write!(out, "(ctr {} = {}{}) ", counter, ep.session, ep.polarity.sign());
            pp_body(body, out);
        }
        Process::Par(..) | Process::Recover { .. } => {
            out.push('(');
            pp_par(p, out);
            out.push(')');
        }
    }
}
