//! The order-statistic upper bound on a quantile and the p-value it induces.

use qltt::pvalue::{bound_params, quantile_p_value, quantile_upper_bound, DEFAULT_TOL};

fn main() -> qltt::Result<()> {
    let sample: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
    for eps in [0.5, 0.1, 0.05, 0.01, 1e-3] {
        let p = bound_params(1000, 0.1, eps)?;
        let b = quantile_upper_bound(&sample, 0.1, eps)?;
        println!(
            "eps {eps:<6} r_n {:.6} q* {:.6} index {:>4} bound {b}",
            p.r_n, p.q_star, p.index
        );
    }
    for n in [100, 200, 300, 500] {
        let p = bound_params(n, 0.1, 1.0)?;
        println!("n = {n}: vacuous even at eps = 1? {}", p.is_vacuous());
    }
    let p = quantile_p_value(&sample, 0.1, 0.96, DEFAULT_TOL)?;
    println!("p-value of 'the 0.9-quantile exceeds 0.96': {p:.4e}");
    Ok(())
}
