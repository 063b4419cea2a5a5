/// `H(S | W)` in nats for a joint pmf indexed `joint[s][w]`, with
/// `0 · ln 0 = 0`.
pub fn cond_entropy_discrete(joint: &[Vec<f64>]) -> f64 {
    let n_w = joint.first().map_or(0, Vec::len);
    let mut h = 0.0;
    for w in 0..n_w {
        let p_w: f64 = joint.iter().map(|row| row[w]).sum();
        if p_w <= 0.0 {
            continue;
        }
        for row in joint {
            let p = row[w];
            if p > 0.0 {
                h += p * (p_w / p).ln();
            }
        }
    }
    h.max(0.0)
}
