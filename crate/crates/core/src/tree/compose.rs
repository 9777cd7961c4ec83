//! Composition of branch sweeps around split vertices.

use std::collections::{HashMap, VecDeque};

use super::*;
use crate::graph::connected_components;

/// Outcome of one case handler at a fixed level `a`.
enum Case {
    Yes(GridEmbedding),
    NotFound,
    OutOfBudget,
}

struct Ctx<'a> {
    tree: &'a Graph,
    k: usize,
    r: usize,
    a: usize,
    c: &'a TreeConstants,
    budget: &'a mut Budget,
}

/// Components of `T - removed`, each sorted, listed by smallest vertex.
fn components_without(tree: &Graph, removed: &[usize]) -> Vec<Vec<usize>> {
    let keep: Vec<usize> = (0..tree.n()).filter(|v| !removed.contains(v)).collect();
    let sub = tree.induced_subgraph(&keep);
    connected_components(&sub).into_iter().map(|c| c.into_iter().map(|i| keep[i]).collect()).collect()
}

/// Tree path from `from` to `to`.
fn tree_path(tree: &Graph, from: usize, to: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; tree.n()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &w in tree.neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().expect("nonempty") != from {
        path.push(parent[*path.last().expect("nonempty")]);
    }
    path.reverse();
    path
}

/// Sweep path of the branch `part` hanging from `u`: starts at `u`, enters the
/// branch, runs to the branch's `(P,t)`-path and then along it to its farther end.
/// Starting at `u` makes the direction of the edge leaving the split vertex count
/// against the wrong-direction budget.
fn branch_path(tree: &Graph, part: &[usize], u: usize, t: usize) -> Result<PtPath> {
    let w = *tree.neighbors(u).iter().find(|w| part.contains(w)).expect("branch touches its split vertex");
    let sub = tree.induced_subgraph(part);
    let local = |v: usize| part.iter().position(|&x| x == v).expect("member");
    let core: Vec<usize> = match find_pt_path(&sub, t)? {
        Some(p) => p.path,
        None => vec![local(w)],
    };
    let (pc, _) = closest_on_path(&sub, &core);
    let join = pc[local(w)];
    let at = core.iter().position(|&x| x == join).expect("closest vertex lies on the path");
    let rest: Vec<usize> = if at + 1 >= core.len() - at { core[..at].iter().rev().copied().collect() } else { core[at + 1..].to_vec() };
    let mut path = tree_path(&sub, local(w), join);
    path.extend(rest);
    let mut path: Vec<usize> = path.into_iter().map(|i| part[i]).collect();
    let (pc, _) = closest_on_path(&sub, &path.iter().map(|&v| local(v)).collect::<Vec<_>>());
    let mut pc_global = vec![usize::MAX; tree.n()];
    for (i, &c) in pc.iter().enumerate() {
        pc_global[part[i]] = part[c];
    }
    pc_global[u] = u;
    path.insert(0, u);
    let pc = pc_global;
    Ok(PtPath { path, radius: t, pc })
}

/// `part` together with the split vertex it hangs from.
fn with_split(part: &[usize], u: usize) -> Vec<usize> {
    let mut v = part.to_vec();
    v.push(u);
    v.sort_unstable();
    v
}

impl Ctx<'_> {
    fn sweep(&mut self, part: &[usize], path: &PtPath, dirs: Vec<Direction>, env: Option<&GridEmbedding>, k: usize, r: usize) -> Result<Option<Option<GridEmbedding>>> {
        let spec = SweepSpec {
            directions: dirs,
            wrong_budget: self.c.wrong_budget(self.a),
            environment: env.cloned(),
            k,
            r,
            retain: self.c.retain(self.a),
        };
        Ok(match directional_sweep_embed(self.tree, part, path, &spec, self.budget)? {
            SweepAnswer::Yes(f) => Some(Some(f)),
            SweepAnswer::No => Some(None),
            SweepAnswer::Unknown => None,
        })
    }

    /// Accepts a glued embedding only if it is a valid `k x r` embedding of the tree.
    fn accept(&self, f: GridEmbedding) -> Option<GridEmbedding> {
        let mut f = f.normalized();
        if f.k > self.k || f.r > self.r {
            return None;
        }
        f.k = self.k;
        f.r = self.r;
        validate(self.tree, &f).is_valid().then_some(f)
    }

    fn no_split(&mut self, t: usize) -> Result<Case> {
        let Some(pt) = find_pt_path(self.tree, t)? else { return Ok(Case::NotFound) };
        let all: Vec<usize> = (0..self.tree.n()).collect();
        for v in [Direction::Up, Direction::Down] {
            for h in [Direction::Right, Direction::Left] {
                match self.sweep(&all, &pt, vec![v, h], None, self.k, self.r)? {
                    None => return Ok(Case::OutOfBudget),
                    Some(Some(f)) => {
                        if let Some(f) = self.accept(f) {
                            return Ok(Case::Yes(f));
                        }
                    }
                    Some(None) => {}
                }
            }
        }
        Ok(Case::NotFound)
    }

    /// Environments around `u`: a subset `S` of the ball of radius `c_env a^2 + 1`
    /// plus the whole of `extra`, embedded inside the `s x s` window with `u` at its
    /// centre.
    fn environments(&mut self, u: usize, extra: &[usize]) -> Option<Vec<(Vec<usize>, GridEmbedding)>> {
        let n = self.tree.n();
        let radius = self.c.env_radius(self.a);
        let dist = distances_from(self.tree, u);
        let ball: Vec<usize> = (0..n).filter(|&v| v != u && !extra.contains(&v) && dist[v].is_some_and(|d| d <= radius)).collect();
        if ball.len() > 20 {
            return Some(Vec::new());
        }
        let s = self.c.window_side(self.a);
        let centre = (s / 2 + 1) as i64;
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << ball.len()) {
            if !self.budget.tick() {
                return None;
            }
            let mut set = vec![u];
            set.extend((0..ball.len()).filter(|&i| mask >> i & 1 == 1).map(|i| ball[i]));
            set.extend_from_slice(extra);
            set.sort_unstable();
            if set.len() > s * s || !self.tree.induced_subgraph(&set).is_connected() {
                continue;
            }
            // BFS order from u, each vertex next to its BFS parent.
            let mut order = vec![u];
            let mut parent = HashMap::new();
            let mut i = 0;
            while i < order.len() {
                let x = order[i];
                for &w in self.tree.neighbors(x) {
                    if set.contains(&w) && w != u && !parent.contains_key(&w) {
                        parent.insert(w, x);
                        order.push(w);
                    }
                }
                i += 1;
            }
            let mut f = GridEmbedding::new(s, s, n);
            f.set(u, (centre, centre));
            let mut found = Vec::new();
            if !enumerate_window(self.tree, &order, &parent, 1, &mut f, s as i64, &mut found, self.budget) {
                return None;
            }
            out.extend(found.into_iter().map(|g| (set.clone(), g)));
        }
        Some(out)
    }

    /// One-split and double-split vertex `u`.
    fn single_split(&mut self, u: usize, t: usize) -> Result<Case> {
        let comps = components_without(self.tree, &[u]);
        let (large, small): (Vec<Vec<usize>>, Vec<Vec<usize>>) = comps.into_iter().partition(|c| c.len() >= t);
        let extra: Vec<usize> = small.concat();
        let paths: Vec<PtPath> = large.iter().map(|c| branch_path(self.tree, c, u, t)).collect::<Result<_>>()?;
        let Some(envs) = self.environments(u, &extra) else { return Ok(Case::OutOfBudget) };
        for (set, env) in envs {
            let (len, wid) = (env.length(), env.width());
            let mut cache: HashMap<(usize, Direction, usize, usize), Option<GridEmbedding>> = HashMap::new();
            for dirs in assignments(large.len(), &[]) {
                let up = dirs.contains(&Direction::Up) && dirs.contains(&Direction::Down);
                let side = dirs.contains(&Direction::Left) && dirs.contains(&Direction::Right);
                let k_splits: Vec<usize> = if up { (len..=self.k).collect() } else { vec![self.k] };
                let r_splits: Vec<usize> = if side { (wid..=self.r).collect() } else { vec![self.r] };
                for &k_up in &k_splits {
                    for &r_right in &r_splits {
                        let mut pieces = Vec::with_capacity(large.len());
                        for (i, &d) in dirs.iter().enumerate() {
                            let (kb, rb) = match d {
                                Direction::Up => (k_up, self.r),
                                Direction::Down if up => (self.k + len - k_up, self.r),
                                Direction::Right => (self.k, r_right),
                                Direction::Left if side => (self.k, self.r + wid - r_right),
                                _ => (self.k, self.r),
                            };
                            let key = (i, d, kb, rb);
                            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
                                match self.sweep(&with_split(&large[i], u), &paths[i], vec![d], Some(&env), kb, rb)? {
                                    None => return Ok(Case::OutOfBudget),
                                    Some(res) => {
                                        e.insert(res);
                                    }
                                }
                            }
                            match &cache[&key] {
                                Some(f) => pieces.push(f.clone()),
                                None => break,
                            }
                        }
                        if pieces.len() < large.len() {
                            continue;
                        }
                        if let Some(f) = self.glue_checked(&pieces, &set) {
                            return Ok(Case::Yes(f));
                        }
                    }
                }
            }
        }
        Ok(Case::NotFound)
    }

    fn glue_checked(&self, pieces: &[GridEmbedding], shared: &[usize]) -> Option<GridEmbedding> {
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                agrees(&pieces[i], &pieces[j])?;
            }
        }
        let refs: Vec<&GridEmbedding> = pieces.iter().collect();
        self.accept(glue(&refs, shared).ok()?)
    }

    /// Two one-split vertices `u1` and `u2`.
    fn two_splits(&mut self, u1: usize, u2: usize, t: usize) -> Result<Case> {
        let n = self.tree.n();
        let at1 = components_without(self.tree, &[u1]);
        let at2 = components_without(self.tree, &[u2]);
        let toward2 = at1.iter().position(|c| c.contains(&u2)).expect("u2 lies in some branch");
        let toward1 = at2.iter().position(|c| c.contains(&u1)).expect("u1 lies in some branch");
        let mut a_side = Vec::new();
        let mut small1 = Vec::new();
        for (i, c) in at1.iter().enumerate() {
            if i != toward2 {
                if c.len() >= t { a_side.push(c.clone()) } else { small1.extend_from_slice(c) }
            }
        }
        let mut b_side = Vec::new();
        let mut small2 = Vec::new();
        for (i, c) in at2.iter().enumerate() {
            if i != toward1 {
                if c.len() >= t { b_side.push(c.clone()) } else { small2.extend_from_slice(c) }
            }
        }
        // Middle part: the vertices strictly between the split vertices, u2, and the
        // small branches at u2.
        let mut middle: Vec<usize> =
            (0..n).filter(|&v| v != u1 && v != u2 && at1[toward2].contains(&v) && at2[toward1].contains(&v)).collect();
        middle.push(u1);
        middle.push(u2);
        middle.extend_from_slice(&small2);
        middle.sort_unstable();
        let connection = tree_path(self.tree, u1, u2);
        let mid_path = {
            let path = connection.clone();
            let sub = self.tree.induced_subgraph(&middle);
            let local: Vec<usize> = path.iter().map(|v| middle.iter().position(|x| x == v).expect("member")).collect();
            let (pc, _) = closest_on_path(&sub, &local);
            let mut pc_global = vec![usize::MAX; n];
            for (i, &c) in pc.iter().enumerate() {
                pc_global[middle[i]] = middle[c];
            }
            PtPath { path, radius: t, pc: pc_global }
        };
        let a_paths: Vec<PtPath> = a_side.iter().map(|c| branch_path(self.tree, c, u1, t)).collect::<Result<_>>()?;
        let b_paths: Vec<PtPath> = b_side.iter().map(|c| branch_path(self.tree, c, u2, t)).collect::<Result<_>>()?;
        let Some(envs) = self.environments(u1, &small1) else { return Ok(Case::OutOfBudget) };
        let s = self.c.window_side(self.a) as i64;
        for (set1, env1) in envs {
            for dirs in assignments(a_side.len() + 1, &[]) {
                let mut first = Vec::new();
                for (i, &d) in dirs.iter().enumerate() {
                    let res = if i < a_side.len() {
                        self.sweep(&with_split(&a_side[i], u1), &a_paths[i], vec![d], Some(&env1), self.k, self.r)?
                    } else {
                        self.sweep(&middle, &mid_path, vec![d], Some(&env1), self.k, self.r)?
                    };
                    match res {
                        None => return Ok(Case::OutOfBudget),
                        Some(Some(f)) => first.push(f),
                        Some(None) => break,
                    }
                }
                if first.len() < dirs.len() || (0..first.len()).any(|i| (i + 1..first.len()).any(|j| agrees(&first[i], &first[j]).is_none())) {
                    continue;
                }
                let refs: Vec<&GridEmbedding> = first.iter().collect();
                let Ok(g1) = glue_raw(&refs, &set1) else { continue };
                // Second environment: everything of g1 inside the window around u2.
                let (cr, cc) = g1.get(u2).expect("middle part contains u2");
                let half = s / 2;
                let mut env2 = GridEmbedding::new(s as usize, s as usize, n);
                let mut set2 = Vec::new();
                for v in g1.vertices() {
                    let (row, col) = g1.get(v).expect("mapped");
                    if (row - cr).abs() <= half && (col - cc).abs() <= half {
                        env2.set(v, (row - cr + half + 1, col - cc + half + 1));
                        set2.push(v);
                    }
                }
                let back = dirs.last().expect("middle direction").opposite();
                for second in assignments(b_side.len(), &[back]) {
                    let mut pieces = vec![g1.clone()];
                    for (i, &d) in second.iter().enumerate() {
                        match self.sweep(&with_split(&b_side[i], u2), &b_paths[i], vec![d], Some(&env2), self.k, self.r)? {
                            None => return Ok(Case::OutOfBudget),
                            Some(Some(f)) => pieces.push(f),
                            Some(None) => break,
                        }
                    }
                    if pieces.len() == b_side.len() + 1 {
                        if let Some(f) = self.glue_checked(&pieces, &set2) {
                            return Ok(Case::Yes(f));
                        }
                    }
                }
            }
        }
        Ok(Case::NotFound)
    }
}

/// Depth-first enumeration of window embeddings of `order` (a BFS order with
/// parents); returns false once the budget runs out.
#[allow(clippy::too_many_arguments)]
fn enumerate_window(
    tree: &Graph,
    order: &[usize],
    parent: &HashMap<usize, usize>,
    i: usize,
    f: &mut GridEmbedding,
    s: i64,
    out: &mut Vec<GridEmbedding>,
    budget: &mut Budget,
) -> bool {
    if !budget.tick() {
        return false;
    }
    if i == order.len() {
        out.push(f.clone());
        return true;
    }
    let v = order[i];
    let (a, b) = f.get(parent[&v]).expect("parent placed first");
    for d in Direction::ALL {
        let c = (a + d.delta().0, b + d.delta().1);
        if c.0 < 1 || c.1 < 1 || c.0 > s || c.1 > s || order[..i].iter().any(|&x| f.get(x) == Some(c)) {
            continue;
        }
        let unit = tree.neighbors(v).iter().filter_map(|&w| f.get(w)).all(|(x, y)| (x - c.0).abs() + (y - c.1).abs() == 1);
        if !unit {
            continue;
        }
        f.set(v, c);
        let ok = enumerate_window(tree, order, parent, i + 1, f, s, out, budget);
        f.unset(v);
        if !ok {
            return false;
        }
    }
    true
}

/// Injective assignments of directions to `m` branches avoiding `banned`, in
/// lexicographic order of [`Direction::ALL`].
fn assignments(m: usize, banned: &[Direction]) -> Vec<Vec<Direction>> {
    fn rec(m: usize, banned: &[Direction], cur: &mut Vec<Direction>, out: &mut Vec<Vec<Direction>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for d in Direction::ALL {
            if !cur.contains(&d) && !banned.contains(&d) {
                cur.push(d);
                rec(m, banned, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(m, banned, &mut Vec::new(), &mut out);
    out
}

/// Decides whether a tree has a `k x r` embedding by trying `a = 0, 1, 2, ...`.
///
/// At each level the split classification at threshold `c_split a^2` selects the
/// case: a single sweep along a `(P,t)`-path over the four direction pairs, or
/// environments around the split vertices with one sweep per branch and a glue.
/// Every yes carries a validated witness. Once the threshold reaches the number of
/// vertices the whole tree is one path group and the sweep is exhaustive, so the
/// final no is definitive for any constants.
pub fn solve_tree(tree: &Graph, k: usize, r: usize, budget: u64, constants: &TreeConstants) -> Result<TreeSolve> {
    require_tree(tree)?;
    let start = Instant::now();
    let mut b = Budget::new(budget);
    let n = tree.n();
    let stats = |b: &Budget| SolveStats { nodes: b.used(), elapsed: start.elapsed() };
    if n > k * r || tree.max_degree() > 4 {
        return Ok(TreeSolve { result: SolveResult::no(stats(&b)), achieved_a: None, case: None });
    }
    let mut a = 0;
    loop {
        let t = constants.split_threshold(a);
        let cls = classify_splits(tree, t)?;
        let mut ctx = Ctx { tree, k, r, a, c: constants, budget: &mut b };
        let outcome = match &cls.verdict {
            SplitVerdict::NoSplit => ctx.no_split(t)?,
            SplitVerdict::OneSplit(u) | SplitVerdict::DoubleSplit(u) => ctx.single_split(*u, t)?,
            SplitVerdict::TwoOneSplits(u1, u2) => ctx.two_splits(*u1, *u2, t)?,
            SplitVerdict::Excess(_) => Case::NotFound,
        };
        match outcome {
            Case::Yes(f) => {
                return Ok(TreeSolve { result: SolveResult::yes(f, stats(&b)), achieved_a: Some(a), case: Some(cls.verdict) })
            }
            Case::OutOfBudget => return Ok(TreeSolve { result: SolveResult::unknown(stats(&b)), achieved_a: None, case: None }),
            Case::NotFound => {}
        }
        if t >= n || a > n {
            return Ok(TreeSolve { result: SolveResult::no(stats(&b)), achieved_a: None, case: None });
        }
        a += 1;
    }
}

#[cfg(test)]
pub(super) fn tree_path_for_tests(tree: &Graph, from: usize, to: usize) -> Vec<usize> {
    tree_path(tree, from, to)
}
