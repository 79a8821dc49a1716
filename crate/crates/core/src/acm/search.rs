//! Bounded acceptance search.
//!
//! The set of configurations reachable from the start (within the register
//! cap) is explored once. Since a join is accepted exactly when each joinand
//! is, and computation lengths add up, a shortest accepting computation of an
//! ID is assembled from shortest derivations of its configurations. The width
//! of an ID never decreases along a computation, so the width cap bounds the
//! number of branching steps and is tracked as a budget.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use super::{Acm, Configuration, Id, StepRules};

/// Search caps: computation length, register contents and ID width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub max_depth: usize,
    pub max_reg: u64,
    pub max_width: usize,
}

impl Fuel {
    pub fn new(max_depth: usize, max_reg: u64, max_width: usize) -> Self {
        Fuel {
            max_depth,
            max_reg,
            max_width,
        }
    }
}

/// An accepting computation: `start` followed by labelled steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Id,
    pub steps: Vec<(Id, String)>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &Id {
        self.steps.last().map(|(id, _)| id).unwrap_or(&self.start)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownInfo {
    /// The capped search space was fully explored without pruning and holds
    /// no accepting computation.
    pub exhausted: bool,
    /// Number of configurations explored.
    pub explored: usize,
    /// Some step was discarded because a register exceeded the cap.
    pub reg_pruned: bool,
    /// Length of the shortest accepting computation that respects the
    /// register cap alone, when one exists.
    pub unbounded_length: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcceptanceResult {
    Accepted(Trace),
    Unknown(UnknownInfo),
}

impl AcceptanceResult {
    pub fn is_accepted(&self) -> bool {
        matches!(self, AcceptanceResult::Accepted(_))
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(
            self,
            AcceptanceResult::Unknown(UnknownInfo {
                exhausted: true,
                ..
            })
        )
    }
}

const NODE_LIMIT: usize = 4_000_000;
const INF: u64 = u64::MAX / 4;

struct Step {
    label: String,
    targets: Vec<usize>,
}

struct Graph {
    configs: Vec<Configuration>,
    steps: Vec<Vec<Step>>,
    finals: Vec<bool>,
    reg_pruned: bool,
    truncated: bool,
}

fn explore(rules: &StepRules, roots: &[Configuration], max_reg: u64) -> (Graph, Vec<usize>) {
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut g = Graph {
        configs: Vec::new(),
        steps: Vec::new(),
        finals: Vec::new(),
        reg_pruned: false,
        truncated: false,
    };
    let mut queue = VecDeque::new();
    let mut intern = |c: &Configuration, g: &mut Graph, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = index.get(c) {
            return i;
        }
        let i = g.configs.len();
        index.insert(c.clone(), i);
        g.configs.push(c.clone());
        g.steps.push(Vec::new());
        g.finals.push(rules.machine.is_final_config(c));
        queue.push_back(i);
        i
    };
    let root_ids: Vec<usize> = roots
        .iter()
        .map(|c| intern(c, &mut g, &mut queue))
        .collect();
    while let Some(i) = queue.pop_front() {
        if g.configs.len() > NODE_LIMIT {
            g.truncated = true;
            break;
        }
        let c = g.configs[i].clone();
        let mut steps = Vec::new();
        for (label, targets) in rules.config_steps(&c) {
            if targets.iter().any(|t| t.regs.iter().any(|&r| r > max_reg)) {
                g.reg_pruned = true;
                continue;
            }
            let targets = targets
                .iter()
                .map(|t| intern(t, &mut g, &mut queue))
                .collect();
            steps.push(Step { label, targets });
        }
        g.steps[i] = steps;
    }
    (g, root_ids)
}

/// Shortest derivation lengths with unlimited branching, and the number of
/// extra configurations created by one such derivation.
fn unbounded_lengths(g: &Graph) -> (Vec<u64>, Vec<usize>) {
    let n = g.configs.len();
    let mut dist = vec![INF; n];
    let mut extras = vec![0usize; n];
    let mut done = vec![false; n];
    let mut pending: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (u, steps) in g.steps.iter().enumerate() {
        let mut p = Vec::with_capacity(steps.len());
        for (s, st) in steps.iter().enumerate() {
            p.push(st.targets.len());
            for &t in &st.targets {
                users[t].push((u, s));
            }
        }
        pending.push(p);
    }
    let mut heap = BinaryHeap::new();
    for i in 0..n {
        if g.finals[i] {
            dist[i] = 0;
            heap.push(Reverse((0u64, i)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        for &(u, s) in &users[v] {
            pending[u][s] -= 1;
            if pending[u][s] == 0 && !done[u] {
                let targets = &g.steps[u][s].targets;
                let cand = 1 + targets.iter().map(|&t| dist[t]).sum::<u64>();
                if cand < dist[u] {
                    dist[u] = cand;
                    extras[u] =
                        targets.len() - 1 + targets.iter().map(|&t| extras[t]).sum::<usize>();
                    heap.push(Reverse((cand, u)));
                }
            }
        }
    }
    (dist, extras)
}

/// `layers[w][v]`: shortest derivation from `v` using at most `w` extra
/// configurations.
fn budgeted_lengths(g: &Graph, budget: usize) -> Vec<Vec<u64>> {
    let n = g.configs.len();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, steps) in g.steps.iter().enumerate() {
        for st in steps {
            if st.targets.len() == 1 {
                rev[st.targets[0]].push(u);
            }
        }
    }
    let mut layers: Vec<Vec<u64>> = Vec::with_capacity(budget + 1);
    for w in 0..=budget {
        let mut dist = vec![INF; n];
        for v in 0..n {
            if g.finals[v] {
                dist[v] = 0;
            }
            for st in &g.steps[v] {
                let extra = st.targets.len() - 1;
                if st.targets.len() < 2 || extra > w {
                    continue;
                }
                let best = split_cost(&layers, &st.targets, w - extra).0;
                if best < INF {
                    dist[v] = dist[v].min(1 + best);
                }
            }
        }
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..n)
            .filter(|&v| dist[v] < INF)
            .map(|v| Reverse((dist[v], v)))
            .collect();
        let mut done = vec![false; n];
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] || d > dist[v] {
                continue;
            }
            done[v] = true;
            for &u in &rev[v] {
                if d + 1 < dist[u] {
                    dist[u] = d + 1;
                    heap.push(Reverse((d + 1, u)));
                }
            }
        }
        layers.push(dist);
    }
    layers
}

/// Cheapest way to split `budget` among `targets`, with the chosen split.
fn split_cost(layers: &[Vec<u64>], targets: &[usize], budget: usize) -> (u64, Vec<usize>) {
    // table[j][b]: cheapest cost for targets[j..] within budget b
    let m = targets.len();
    let mut table = vec![vec![INF; budget + 1]; m + 1];
    for b in 0..=budget {
        table[m][b] = 0;
    }
    for j in (0..m).rev() {
        for b in 0..=budget {
            let mut best = INF;
            for w in 0..=b {
                let head = layers[w][targets[j]];
                let tail = table[j + 1][b - w];
                if head < INF && tail < INF {
                    best = best.min(head + tail);
                }
            }
            table[j][b] = best;
        }
    }
    let total = table[0][budget];
    let mut split = Vec::with_capacity(m);
    if total < INF {
        let mut b = budget;
        for j in 0..m {
            let w = (0..=b)
                .find(|&w| {
                    let head = layers[w][targets[j]];
                    let tail = table[j + 1][b - w];
                    head < INF && tail < INF && head + tail == table[j][b]
                })
                .expect("optimal split exists");
            split.push(w);
            b -= w;
        }
    }
    (total, split)
}

/// Bounded acceptance under the machine's instructions.
pub fn accepts(m: &Acm, u: &Id, fuel: Fuel) -> AcceptanceResult {
    accepts_with(&StepRules::machine(m), u, fuel)
}

/// Bounded acceptance under arbitrary step rules. The returned trace is a
/// shortest one among computations respecting all caps.
pub fn accepts_with(rules: &StepRules, u: &Id, fuel: Fuel) -> AcceptanceResult {
    let roots = u.configs();
    let over_reg = roots
        .iter()
        .any(|c| c.regs.iter().any(|&r| r > fuel.max_reg));
    if over_reg || u.width() > fuel.max_width {
        return AcceptanceResult::Unknown(UnknownInfo {
            exhausted: false,
            explored: 0,
            reg_pruned: over_reg,
            unbounded_length: None,
        });
    }
    let (g, root_ids) = explore(rules, roots, fuel.max_reg);
    let (free, free_extras) = unbounded_lengths(&g);
    let unbounded: u64 = root_ids
        .iter()
        .map(|&r| free[r])
        .fold(0, |a, b| (a + b).min(INF));
    let unknown = |exhausted: bool| {
        AcceptanceResult::Unknown(UnknownInfo {
            exhausted,
            explored: g.configs.len(),
            reg_pruned: g.reg_pruned,
            unbounded_length: (unbounded < INF).then_some(unbounded),
        })
    };
    if unbounded >= INF {
        return unknown(!g.reg_pruned && !g.truncated);
    }
    if unbounded > fuel.max_depth as u64 {
        return unknown(false);
    }
    // an optimal derivation with unlimited branching bounds the useful budget
    let needed: usize = root_ids.iter().map(|&r| free_extras[r]).sum();
    let budget = (fuel.max_width - u.width()).min(needed);
    let layers = budgeted_lengths(&g, budget);
    let (best, split) = split_cost(&layers, &root_ids, budget);
    if best >= INF || best > fuel.max_depth as u64 {
        return unknown(false);
    }
    AcceptanceResult::Accepted(build_trace(&g, &layers, u, &root_ids, &split))
}

fn build_trace(g: &Graph, layers: &[Vec<u64>], u: &Id, roots: &[usize], split: &[usize]) -> Trace {
    let mut current = u.clone();
    let mut steps = Vec::new();
    let mut stack: Vec<(usize, usize)> = roots
        .iter()
        .copied()
        .zip(split.iter().copied())
        .rev()
        .collect();
    while let Some((v, w)) = stack.pop() {
        let target = layers[w][v];
        if target == 0 {
            continue;
        }
        let mut chosen = None;
        for st in &g.steps[v] {
            let extra = st.targets.len() - 1;
            if extra > w {
                continue;
            }
            if st.targets.len() == 1 {
                if layers[w][st.targets[0]] < INF && 1 + layers[w][st.targets[0]] == target {
                    chosen = Some((st, vec![w]));
                    break;
                }
            } else {
                let (cost, sp) = split_cost(layers, &st.targets, w - extra);
                if cost < INF && 1 + cost == target {
                    chosen = Some((st, sp));
                    break;
                }
            }
        }
        let (st, sp) = chosen.expect("an optimal step exists");
        let targets: Vec<Configuration> =
            st.targets.iter().map(|&t| g.configs[t].clone()).collect();
        current = current.replace(&g.configs[v], &targets);
        steps.push((current.clone(), st.label.clone()));
        for (&t, &b) in st.targets.iter().zip(sp.iter()).rev() {
            stack.push((t, b));
        }
    }
    Trace {
        start: u.clone(),
        steps,
    }
}
