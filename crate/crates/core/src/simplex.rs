//! Deterministic Nelder-Mead simplex minimizer.
//!
//! No randomized restarts or perturbations: identical inputs walk an
//! identical sequence of simplices, which keeps every fit reproducible
//! bit-for-bit. Objective values of `+inf` mark infeasible points and are
//! handled by the ordinary ordering rules.

pub(crate) struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub(crate) fn minimize<F>(
    mut objective: F,
    init: &[f64],
    steps: &[f64],
    rel_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = init.len();
    debug_assert_eq!(steps.len(), dim);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(init.to_vec());
    for i in 0..dim {
        let mut p = init.to_vec();
        p[i] += steps[i];
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| objective(p)).collect();

    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;

        // Stable sort keeps tie ordering deterministic.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let second_worst = order[dim - 1];
        let worst = order[dim];

        let f_best = values[best];
        let f_worst = values[worst];
        // Function spread and simplex diameter must both collapse. The
        // diameter criterion is what pins the argument to full precision:
        // a pure function-value test leaves the optimum fuzzy at the scale
        // of rel_tol * |f|.
        if f_worst.is_finite() && (f_worst - f_best) <= rel_tol * (f_best.abs() + rel_tol) {
            let mut diameter = 0.0f64;
            for d in 0..dim {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for vertex in &simplex {
                    lo = lo.min(vertex[d]);
                    hi = hi.max(vertex[d]);
                }
                diameter = diameter.max(hi - lo);
            }
            if diameter <= x_tol {
                converged = true;
                break;
            }
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for &idx in order.iter().take(dim) {
            for d in 0..dim {
                centroid[d] += simplex[idx][d];
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |a: f64| -> Vec<f64> {
            (0..dim)
                .map(|d| centroid[d] + a * (centroid[d] - simplex[worst][d]))
                .collect()
        };

        let reflected = blend(REFLECT);
        let f_reflected = objective(&reflected);

        if f_reflected < values[best] {
            let expanded = blend(EXPAND);
            let f_expanded = objective(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        let contracted = blend(-CONTRACT);
        let f_contracted = objective(&contracted);
        if f_contracted < values[worst] {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }

        // Shrink toward the best vertex.
        let best_point = simplex[best].clone();
        for &idx in order.iter().skip(1) {
            for d in 0..dim {
                simplex[idx][d] = best_point[d] + SHRINK * (simplex[idx][d] - best_point[d]);
            }
            values[idx] = objective(&simplex[idx]);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("simplex is nonempty");
    SimplexOutcome {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_bowl() {
        let out = minimize(
            |p| (p[0] - 3.0).powi(2) + 2.0 * (p[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
            1e-12,
            1e-10,
            5000,
        );
        assert!(out.converged);
        assert!((out.point[0] - 3.0).abs() < 1e-5);
        assert!((out.point[1] + 1.0).abs() < 1e-5);
    }

    #[test]
    fn handles_infinite_regions() {
        // Infeasible half-plane x < 1 marked by +inf; interior minimum at (2, 2).
        let out = minimize(
            |p| {
                if p[0] < 1.0 {
                    f64::INFINITY
                } else {
                    (p[0] - 2.0).powi(2) + (p[1] - 2.0).powi(2)
                }
            },
            &[4.0, 0.0],
            &[0.5, 0.5],
            1e-12,
            1e-10,
            5000,
        );
        assert!(out.value.is_finite());
        assert!((out.point[0] - 2.0).abs() < 1e-4);
        assert!((out.point[1] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn deterministic_across_runs() {
        let run = || {
            minimize(
                |p| p[0].powi(4) + (p[1] - 0.5).powi(2) + (p[0] * p[1]).sin(),
                &[1.3, -0.7],
                &[0.1, 0.1],
                1e-10,
                1e-9,
                10_000,
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.point, b.point);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }
}
