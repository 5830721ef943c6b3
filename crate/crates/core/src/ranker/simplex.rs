/// Euclidean projection onto the probability simplex
/// `{ mu : mu_m >= 0, sum mu_m = 1 }`.
///
/// Sort-based, `O(M log M)`. The input is shifted by its maximum first; the
/// projection is invariant to adding a constant to every coordinate, and the
/// shift keeps the active coordinates near zero where rounding is smallest.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = v.iter().map(|x| x - top).collect();

    let mut u = shifted.clone();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    let mut mu: Vec<f64> = shifted.iter().map(|x| (x - theta).max(0.0)).collect();
    let s: f64 = mu.iter().sum();
    for m in &mut mu {
        *m /= s;
    }
    mu
}
