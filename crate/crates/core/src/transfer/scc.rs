use super::TransferMatrix;

/// Strongly connected components of a digraph in CSR form, listed in a
/// topological order of the condensation (sources first).
///
/// Iterative Tarjan, so deep graphs do not overflow the stack.
pub fn tarjan_scc(offsets: &[u32], targets: &[u32]) -> Vec<Vec<u32>> {
    const UNVISITED: u32 = u32::MAX;
    let n = offsets.len() - 1;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, position in its successor list)
    let mut call: Vec<(u32, u32)> = Vec::new();
    let mut next_index = 0u32;
    let mut comps = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, offsets[root as usize]));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&(v, pos)) = call.last() {
            if pos < offsets[v as usize + 1] {
                call.last_mut().expect("nonempty").1 += 1;
                let w = targets[pos as usize];
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, offsets[w as usize]));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    // Tarjan emits sinks first.
    comps.reverse();
    comps
}

/// Component structure of a transfer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Component id of every pattern.
    pub component: Vec<u32>,
    /// Members of each component; ids follow a topological order.
    pub components: Vec<Vec<u32>>,
    /// Whether the component contains a cycle (so it can grow).
    pub cyclic: Vec<bool>,
}

impl SccDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Runs Tarjan on the pattern graph expanded through boundary states:
/// pattern `i` points at its right state, and each state points at the
/// patterns leaving it. Paths between patterns are preserved, so restricting
/// the components to pattern nodes gives the components of the matrix.
pub fn strongly_connected_components(matrix: &TransferMatrix) -> SccDecomposition {
    let p = matrix.dim();
    let s = matrix.num_states;
    let mut offsets = Vec::with_capacity(p + s + 1);
    let mut targets = Vec::new();
    offsets.push(0u32);
    for i in 0..p {
        if let Some(st) = matrix.output[i] {
            targets.push(p as u32 + st);
        }
        offsets.push(targets.len() as u32);
    }
    for st in 0..s as u32 {
        targets.extend_from_slice(matrix.leaving(st));
        offsets.push(targets.len() as u32);
    }
    let mut component = vec![u32::MAX; p];
    let mut components = Vec::new();
    let mut cyclic = Vec::new();
    for comp in tarjan_scc(&offsets, &targets) {
        let members: Vec<u32> = comp.iter().copied().filter(|&v| (v as usize) < p).collect();
        if members.is_empty() {
            continue;
        }
        // A lone pattern is its own expanded component; any cycle passes
        // through a state node.
        let has_cycle = comp.len() > 1;
        for &m in &members {
            component[m as usize] = components.len() as u32;
        }
        components.push(members);
        cyclic.push(has_cycle);
    }
    SccDecomposition {
        component,
        components,
        cyclic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csr(n: usize, edges: &[(u32, u32)]) -> (Vec<u32>, Vec<u32>) {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a as usize].push(b);
        }
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for a in adj {
            targets.extend(a);
            offsets.push(targets.len() as u32);
        }
        (offsets, targets)
    }

    #[test]
    fn self_loop_is_one_component() {
        let (o, t) = csr(1, &[(0, 0)]);
        assert_eq!(tarjan_scc(&o, &t), vec![vec![0]]);
    }

    #[test]
    fn acyclic_graph_is_all_singletons() {
        let (o, t) = csr(4, &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        let comps = tarjan_scc(&o, &t);
        assert_eq!(comps.len(), 4);
        let pos = |v: u32| comps.iter().position(|c| c.contains(&v)).unwrap();
        assert!(pos(0) < pos(1) && pos(1) < pos(2) && pos(3) < pos(2));
    }

    #[test]
    fn two_cycles_with_bridge() {
        let (o, t) = csr(5, &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 2)]);
        let comps = tarjan_scc(&o, &t);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3, 4]]);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000u32;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect();
        let (o, t) = csr(n as usize, &edges);
        assert_eq!(tarjan_scc(&o, &t).len(), 1);
    }
}
