//! Derivative-free simplex minimization (Nelder-Mead).

/// Standard Nelder-Mead with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5. Stops when the evaluation budget is spent or the simplex
/// diameter falls below `diameter_tol`.
#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    pub max_evals: usize,
    pub diameter_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_evals: 2000,
            diameter_tol: 1e-7,
        }
    }
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

impl NelderMead {
    /// Minimize `f` from `x0`, stepping `step` along each axis to build the
    /// initial simplex. Returns the best point, its value, and the number of
    /// evaluations used.
    pub fn minimize(
        &self,
        f: &mut dyn FnMut(&[f64]) -> f64,
        x0: &[f64],
        step: f64,
    ) -> (Vec<f64>, f64, usize) {
        let dim = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
            *evals += 1;
            f(x)
        };

        let mut simplex: Vec<Vertex> = Vec::with_capacity(dim + 1);
        simplex.push(Vertex {
            x: x0.to_vec(),
            f: eval(x0, &mut evals),
        });
        for i in 0..dim {
            let mut x = x0.to_vec();
            x[i] += step;
            let fx = eval(&x, &mut evals);
            simplex.push(Vertex { x, f: fx });
        }

        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).unwrap());
            if self.diameter(&simplex) < self.diameter_tol {
                break;
            }

            // centroid of all but the worst
            let mut centroid = vec![0.0; dim];
            for v in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(&v.x) {
                    *c += xi / dim as f64;
                }
            }
            let worst = simplex[dim].f;
            let best = simplex[0].f;
            let second_worst = simplex[dim - 1].f;

            let blend = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[dim].x)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = blend(1.0);
            let fr = eval(&xr, &mut evals);
            if fr < best {
                let xe = blend(2.0);
                let fe = eval(&xe, &mut evals);
                simplex[dim] = if fe < fr {
                    Vertex { x: xe, f: fe }
                } else {
                    Vertex { x: xr, f: fr }
                };
            } else if fr < second_worst {
                simplex[dim] = Vertex { x: xr, f: fr };
            } else {
                let (xc, fc) = if fr < worst {
                    let x = blend(0.5);
                    let fx = eval(&x, &mut evals);
                    (x, fx)
                } else {
                    let x = blend(-0.5);
                    let fx = eval(&x, &mut evals);
                    (x, fx)
                };
                if fc < worst.min(fr) {
                    simplex[dim] = Vertex { x: xc, f: fc };
                } else {
                    // shrink toward the best vertex
                    let best_x = simplex[0].x.clone();
                    for v in simplex.iter_mut().skip(1) {
                        for (xi, bi) in v.x.iter_mut().zip(&best_x) {
                            *xi = bi + 0.5 * (*xi - bi);
                        }
                        v.f = eval(&v.x.clone(), &mut evals);
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.f.partial_cmp(&b.f).unwrap());
        let best = simplex.remove(0);
        (best.x, best.f, evals)
    }

    fn diameter(&self, simplex: &[Vertex]) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..simplex.len() {
            for j in i + 1..simplex.len() {
                let dist: f64 = simplex[i]
                    .x
                    .iter()
                    .zip(&simplex[j].x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d = d.max(dist);
            }
        }
        d
    }
}
