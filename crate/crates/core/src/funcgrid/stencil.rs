use super::GridError;

/// Highest derivative order the stencils support.
pub const MAX_STENCIL_ORDER: usize = 4;

/// Finite-difference weights at `z` for the nodes `x`, for every derivative
/// order `0..=m` (Fornberg's recursion). `w[k][i]` multiplies `f(x[i])`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Half-width of the central stencil for derivative order `m`.
fn half_width(m: usize) -> usize {
    if m <= 2 {
        2
    } else {
        3
    }
}

/// Window start and weights (in units of `h⁻ᵐ`) used at node `j`.
fn window(j: usize, n: usize, m: usize) -> (usize, Vec<f64>) {
    let hw = half_width(m);
    let (start, len) = if j >= hw && j + hw <= n {
        (j - hw, 2 * hw + 1)
    } else {
        let len = m + 4;
        let start = if j < hw { 0 } else { n + 1 - len };
        (start, len)
    };
    let offsets: Vec<f64> = (0..len).map(|i| i as f64).collect();
    let w = fornberg_weights((j - start) as f64, &offsets, m);
    (start, w[m].clone())
}

/// `m`-th derivative at every node, fourth order throughout. Constants give
/// exactly zero.
pub(crate) fn derivative(samples: &[f64], h: f64, m: usize) -> Result<Vec<f64>, GridError> {
    if m > MAX_STENCIL_ORDER {
        return Err(GridError::OrderUnsupported(m));
    }
    if m == 0 {
        return Ok(samples.to_vec());
    }
    let n = samples.len() - 1;
    let hw = half_width(m);
    let scale = h.powi(-(m as i32));
    let (_, interior) = window(hw, 2 * hw, m);
    let apply = |start: usize, w: &[f64], j: usize| -> f64 {
        let fc = samples[j];
        w.iter()
            .enumerate()
            .map(|(i, wi)| wi * (samples[start + i] - fc))
            .sum::<f64>()
            * scale
    };
    Ok((0..=n)
        .map(|j| {
            if j >= hw && j + hw <= n {
                apply(j - hw, &interior, j)
            } else {
                let (start, w) = window(j, n, m);
                apply(start, &w, j)
            }
        })
        .collect())
}
