//! Derivative-free Nelder-Mead simplex minimization.
//!
//! Deterministic by construction: fixed reflection/expansion/contraction
//! coefficients, a fixed initial-simplex layout, no randomness, and ties
//! broken by vertex order. Objectives may return `f64::INFINITY` to mark
//! out-of-bounds points; they must never return NaN.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone)]
pub(super) struct SimplexOutcome {
    pub point: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Set when the objective spread across the simplex fell below
    /// `tol * (1 + |f_best|)` before the evaluation budget ran out.
    pub converged: bool,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

/// Minimize `objective` starting from `start`, perturbing each coordinate
/// by `step` to form the initial simplex.
pub(super) fn minimize<F>(
    mut objective: F,
    start: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert!(dim > 0, "cannot minimize over zero dimensions");

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let f = objective(x);
        assert!(!f.is_nan(), "objective returned NaN at {x:?}");
        f
    };

    let mut simplex: Vec<Vertex> = Vec::with_capacity(dim + 1);
    simplex.push(Vertex {
        f: eval(start, &mut evals),
        x: start.to_vec(),
    });
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += step;
        simplex.push(Vertex {
            f: eval(&x, &mut evals),
            x,
        });
    }

    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).expect("objective is never NaN"));
        let best_f = simplex[0].f;
        let worst_f = simplex[dim].f;

        if worst_f - best_f <= tol * (1.0 + best_f.abs()) {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        // Centroid of all vertices but the worst.
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let worst = &simplex[dim];
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst.x)
            .map(|(c, w)| c + REFLECT * (c - w))
            .collect();
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < best_f {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + EXPAND * (r - c))
                .collect();
            let f_expanded = eval(&expanded, &mut evals);
            simplex[dim] = if f_expanded < f_reflected {
                Vertex {
                    x: expanded,
                    f: f_expanded,
                }
            } else {
                Vertex {
                    x: reflected,
                    f: f_reflected,
                }
            };
        } else if f_reflected < simplex[dim - 1].f {
            simplex[dim] = Vertex {
                x: reflected,
                f: f_reflected,
            };
        } else {
            // Contract toward the better of the reflected point and the
            // worst vertex; shrink the whole simplex if that fails too.
            let (toward, f_toward) = if f_reflected < worst_f {
                (&reflected, f_reflected)
            } else {
                (&simplex[dim].x, worst_f)
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(toward)
                .map(|(c, t)| c + CONTRACT * (t - c))
                .collect();
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < f_toward {
                simplex[dim] = Vertex {
                    x: contracted,
                    f: f_contracted,
                };
            } else {
                let best_x = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (xi, bi) in v.x.iter_mut().zip(&best_x) {
                        *xi = bi + SHRINK * (*xi - bi);
                    }
                    v.f = eval(&v.x, &mut evals);
                }
            }
        }
        iterations += 1;
    }

    simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).expect("objective is never NaN"));
    SimplexOutcome {
        point: simplex[0].x.clone(),
        objective: simplex[0].f,
        iterations,
        converged,
    }
}
