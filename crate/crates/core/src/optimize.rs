//! Nelder–Mead simplex minimization with dimension-adaptive coefficients.

/// Result of one simplex run.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` from `x0` with an initial axis-aligned simplex of edge `step`.
///
/// Stops after `max_iterations` or once the spread of function values over
/// the simplex drops to `tolerance`. Reflection, expansion, contraction and
/// shrink coefficients follow the dimension-adaptive choice
/// `(1, 1 + 2/n, 0.75 − 1/(2n), 1 − 1/n)`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iterations: usize,
    tolerance: f64,
) -> Minimum {
    let n = x0.len();
    assert!(n >= 1, "need at least one parameter");
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut iterations = 0;

    while iterations < max_iterations {
        // Stable sort keeps earlier vertices first among equal values.
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if values[worst] - values[best] <= tolerance {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, w)| c + t * (c - w)).collect()
        };

        let reflected = along(alpha, &simplex[worst]);
        let f_r = f(&reflected);
        if f_r < values[best] {
            let expanded = along(alpha * gamma, &simplex[worst]);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second] {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[worst] {
            let p = along(alpha * rho, &simplex[worst]);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(-rho, &simplex[worst]);
            let v = f(&p);
            (p, v)
        };
        if f_c < values[worst].min(f_r) {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                *x = a + sigma * (*x - a);
            }
            values[i] = f(&simplex[i]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("simplex is non-empty");
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
    }
}
