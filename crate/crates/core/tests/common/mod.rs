//! Boundary-relation checks for the subprograms of the exponential encoding.
#![allow(dead_code)]

use std::collections::BTreeSet;

use spineless::acm::{accepted_in_box, Acm, Configuration};
use spineless::mk::{
    assemble, build_program, end_machine, program_reach, zero_machine, zero_state, Program,
    ProgramKind, Rule, SourceInstruction, ZeroGate, END_C, END_INPUT, FINAL,
};

pub const N: u64 = 9;

/// The program for `qin <= qout r` (times) or `qin r <= qout` (div) with the
/// zero-test program, as a machine.
pub fn harness(kind: ProgramKind, reg: usize, k: u64) -> (Acm, Program) {
    let rule = match kind {
        ProgramKind::Times => Rule::Inc {
            from: "qin".into(),
            to: "qout".into(),
            reg,
        },
        _ => Rule::Dec {
            from: "qin".into(),
            reg,
            to: "qout".into(),
        },
    };
    let p = build_program(kind, Some(&SourceInstruction { index: 1, rule }), k).unwrap();
    let zero = build_program(ProgramKind::Zero, None, k).unwrap();
    let m = assemble(&["qin".into(), "qout".into()], &[&p, &zero], &[]).unwrap();
    (m, p)
}

pub fn sources(m: &Acm, p: &Program) -> BTreeSet<usize> {
    p.states
        .iter()
        .chain(std::iter::once(&"qin".to_string()))
        .map(|s| m.state_index(s).unwrap())
        .collect()
}

/// Registers in (active, passive, auxiliary) order.
pub fn regs(active: usize, a: u64, b: u64, c: u64) -> Vec<u64> {
    if active == 0 {
        vec![a, b, c]
    } else {
        vec![b, a, c]
    }
}

pub fn split(active: usize, r: &[u64]) -> (u64, u64, u64) {
    if active == 0 {
        (r[0], r[1], r[2])
    } else {
        (r[1], r[0], r[2])
    }
}

/// Local state kind: loop state with its index, or transfer state with its index.
pub enum Local {
    Loop(u64),
    Transfer(u64),
}

pub fn local(name: &str) -> Local {
    let last = name.rsplit('.').next().unwrap();
    let (tag, idx) = last.split_at(1);
    let idx: u64 = idx.parse().unwrap();
    match tag {
        "a" | "s" => Local::Loop(idx),
        "t" => Local::Transfer(idx),
        _ => panic!("unexpected state {}", name),
    }
}

/// Input-side relation: `qin (N1, N2, 0) ⊑ q (n1, n2, n3)` for the active
/// register value `N1`.
pub fn input_side(kind: ProgramKind, k: u64, q: &Local, big: u64, n1: u64, n3: u64) -> bool {
    match (kind, q) {
        (ProgramKind::Times, Local::Transfer(d)) => k * big == n1 + n3 + d,
        (ProgramKind::Times, Local::Loop(d)) => k * big == k * n1 + n3 + (k - d),
        (_, Local::Transfer(d)) => big == k * (n1 + n3 + d),
        (_, Local::Loop(d)) => big == n1 + k * n3 + d,
    }
}

/// Output-side relation: `q (n1, n2, n3) ⊑ qout (M1, n2, 0)`.
pub fn output_side(kind: ProgramKind, k: u64, q: &Local, big: u64, n1: u64, n3: u64) -> bool {
    match (kind, q) {
        (ProgramKind::Times, Local::Transfer(d)) => big == n1 + n3 + d,
        (ProgramKind::Times, Local::Loop(d)) => big == k * n1 + n3 + (k - d),
        (_, Local::Transfer(d)) => big == n1 + n3 + d,
        (_, Local::Loop(d)) => k * big == n1 + k * n3 + d,
    }
}

/// Checks the input-side and output-side relations of the times or div
/// program for all boundary values up to `N`; returns the failures.
pub fn check_program(kind: ProgramKind, reg: usize, k: u64) -> Vec<String> {
    let mut fails = Vec::new();
    let (m, p) = harness(kind, reg, k);
    let max_reg = k * N + k + 2;
    let gate = ZeroGate::new(max_reg);
    let src = sources(&m, &p);
    let qin = m.state_index("qin").unwrap();
    let qout = m.state_index("qout").unwrap();
    let prog: Vec<usize> = p.states.iter().map(|s| m.state_index(s).unwrap()).collect();
    let value_cap = k * N + k;

    // input side, including the overall input/output relation
    for big1 in 0..=N {
        for big2 in 0..=3 {
            for big3 in 0..=2 {
                let start = Configuration::new(qin, regs(reg, big1, big2, big3));
                let reach = program_reach(&m, &src, &start, max_reg, &gate);
                for c in &reach {
                    if c.state == qin {
                        continue;
                    }
                    let (a, b, x) = split(reg, &c.regs);
                    if big3 != 0 || b != big2 {
                        fails.push(format!("{:?} reached {:?}", start, c));
                    }
                    if c.state == qout {
                        let ok = match kind {
                            ProgramKind::Times => a == k * big1,
                            _ => k * a == big1,
                        };
                        if !ok || x != 0 {
                            fails.push(format!("{:?} reached {:?}", start, c));
                        }
                    }
                }
                for &q in &prog {
                    let l = local(m.state_name(q));
                    for n1 in 0..=value_cap {
                        for n3 in 0..=value_cap {
                            let c = Configuration::new(q, regs(reg, n1, big2, n3));
                            let want = big3 == 0 && input_side(kind, k, &l, big1, n1, n3);
                            if reach.contains(&c) != want {
                                fails.push(format!("{:?} vs {:?}", start, c));
                            }
                        }
                    }
                }
                let out = match kind {
                    ProgramKind::Times => Some(k * big1),
                    _ if big1 % k == 0 => Some(big1 / k),
                    _ => None,
                };
                if let (0, Some(o)) = (big3, out) {
                    if !reach.contains(&Configuration::new(qout, regs(reg, o, big2, 0))) {
                        fails.push(format!("{:?} misses its output", start));
                    }
                }
            }
        }
    }

    // output side
    for &q in &prog {
        let l = local(m.state_name(q));
        for n1 in 0..=N {
            for n3 in 0..=N {
                let n2 = 1;
                let start = Configuration::new(q, regs(reg, n1, n2, n3));
                let reach = program_reach(&m, &src, &start, max_reg, &gate);
                for big1 in 0..=value_cap {
                    let c = Configuration::new(qout, regs(reg, big1, n2, 0));
                    if reach.contains(&c) != output_side(kind, k, &l, big1, n1, n3) {
                        fails.push(format!("{:?} vs {:?}", start, c));
                    }
                }
                for c in reach.iter().filter(|c| c.state == qout) {
                    let (_, b, x) = split(reg, &c.regs);
                    if b != n2 || x != 0 {
                        fails.push(format!("{:?} reached {:?}", start, c));
                    }
                }
            }
        }
    }
    fails
}

/// Zero-test program: `z_i` with registers up to `N` is accepted exactly
/// when register `i` is empty.
pub fn check_zero_test() -> Vec<String> {
    let mut fails = Vec::new();
    let o = zero_machine();
    let acc = accepted_in_box(&o, None, N);
    for i in 0..3 {
        let z = o.state_index(&zero_state(i)).unwrap();
        for a in 0..=N {
            for b in 0..=N {
                for c in 0..=N {
                    let r = vec![a, b, c];
                    let cf = Configuration::new(z, r.clone());
                    if acc.contains(&cf) != (r[i] == 0) {
                        fails.push(format!("{:?}", cf));
                    }
                }
            }
        }
    }
    fails
}

/// End program: only `qf r1 r2`, `cF r2` and `qF` are accepted.
pub fn check_end() -> Vec<String> {
    let mut fails = Vec::new();
    let e = end_machine();
    let acc = accepted_in_box(&e, None, N);
    for (name, want) in [(END_INPUT, (1, 1)), (END_C, (0, 1)), (FINAL, (0, 0))] {
        let q = e.state_index(name).unwrap();
        for a in 0..=N {
            for b in 0..=N {
                for c in 0..=N {
                    let cf = Configuration::new(q, vec![a, b, c]);
                    if acc.contains(&cf) != ((a, b) == want && c == 0) {
                        fails.push(format!("{:?}", cf));
                    }
                }
            }
        }
    }
    fails
}
