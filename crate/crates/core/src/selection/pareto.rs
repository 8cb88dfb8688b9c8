use crate::error::{Error, Result};
use crate::objectives::ObjectiveVector;

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn pareto_dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    let mut strictly = false;
    for (x, y) in a.as_array().iter().zip(b.as_array()) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Fast nondominated sort. Front 0 holds the nondominated members; each
/// front lists indices in ascending order.
pub fn nondominated_sort(objectives: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if pareto_dominates(&objectives[i], &objectives[j]) {
                dominated_by[i].push(j);
                counts[j] += 1;
            } else if pareto_dominates(&objectives[j], &objectives[i]) {
                dominated_by[j].push(i);
                counts[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                counts[j] -= 1;
                if counts[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Rank (front number) of every member.
pub fn pareto_ranks(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut ranks = vec![usize::MAX; n];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            ranks[i] = r;
        }
    }
    ranks
}

/// Crowding distance of each member of `front`, aligned with `front`.
/// Boundary members get infinity; fronts of at most two members are all infinite.
pub fn crowding_distance(objectives: &[ObjectiveVector], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let mut dist = vec![0.0; m];
    let mut order: Vec<usize> = (0..m).collect();
    #[allow(clippy::needless_range_loop)]
    for k in 0..4 {
        let value = |pos: usize| objectives[front[pos]][k];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let lo = value(order[0]);
        let hi = value(order[m - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range > 0.0 {
            for w in order.windows(3) {
                dist[w[1]] += (value(w[2]) - value(w[0])) / range;
            }
        }
    }
    dist
}

/// Crowding distance of every member, computed within its own front.
pub fn crowding_by_member(objectives: &[ObjectiveVector], fronts: &[Vec<usize>]) -> Vec<f64> {
    let mut out = vec![0.0; objectives.len()];
    for front in fronts {
        for (&i, d) in front.iter().zip(crowding_distance(objectives, front)) {
            out[i] = d;
        }
    }
    out
}

/// NSGA-II survival: whole fronts in rank order, then the last partial front
/// by descending crowding distance (ties by index). Returns `target` indices.
pub fn nsga2_select(objectives: &[ObjectiveVector], target: usize) -> Result<Vec<usize>> {
    if target > objectives.len() {
        return Err(Error::Config(format!(
            "cannot select {target} survivors from a pool of {}",
            objectives.len()
        )));
    }
    let mut chosen = Vec::with_capacity(target);
    for front in nondominated_sort(objectives) {
        let room = target - chosen.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            chosen.extend(front);
            continue;
        }
        let dist = crowding_distance(objectives, &front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
        chosen.extend(order.into_iter().take(room).map(|p| front[p]));
        break;
    }
    Ok(chosen)
}
