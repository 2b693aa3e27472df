//! Small directed-graph helpers on dense vertex indices.

/// Weakly connected components, each sorted, ordered by smallest vertex.
pub fn weak_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
    }
    group_by_label(n, |v| find(&mut parent, v))
}

fn group_by_label(n: usize, mut label: impl FnMut(usize) -> usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = Vec::new();
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for v in 0..n {
        let l = label(v);
        let g = groups.entry(l).or_default();
        if g.is_empty() {
            order.push(l);
        }
        g.push(v);
    }
    order.into_iter().map(|l| groups.remove(&l).unwrap()).collect()
}

/// Strongly connected components (iterative Tarjan), each sorted, ordered by
/// smallest vertex.
pub fn strong_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    group_by_label(n, |v| comp[v])
}

/// Every edge lies within a strong component.
pub fn is_weakly_reversible(n: usize, edges: &[(usize, usize)]) -> bool {
    let sccs = strong_components(n, edges);
    let mut comp = vec![0; n];
    for (i, c) in sccs.iter().enumerate() {
        for &v in c {
            comp[v] = i;
        }
    }
    edges.iter().all(|&(a, b)| comp[a] == comp[b])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components() {
        let e = [(0, 1), (1, 0), (2, 3), (4, 4)];
        assert_eq!(weak_components(5, &e), vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(strong_components(5, &e), vec![vec![0, 1], vec![2], vec![3], vec![4]]);
        assert!(!is_weakly_reversible(5, &e));
        assert!(is_weakly_reversible(2, &[(0, 1), (1, 0)]));
    }

    #[test]
    fn long_cycle() {
        let n = 2000;
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        assert_eq!(strong_components(n, &e).len(), 1);
    }
}
