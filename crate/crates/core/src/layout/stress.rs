use super::{check_pins, initial_positions, LayoutConfig, LayoutError, LayoutResult, Pins, Point};
use crate::distance::DistanceMatrix;

/// `sum_{i<j} (|x_i - x_j| - D_ij)^2`
pub fn raw_stress(positions: &[Point], matrix: &DistanceMatrix) -> f64 {
    let n = positions.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = euclid(positions[i], positions[j]);
            total += (d - matrix.values[i][j]).powi(2);
        }
    }
    total
}

fn euclid(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Metric MDS by stress majorization (SMACOF, unit weights).
///
/// Each iteration applies the Guttman transform, which never increases stress.
/// Pinned nodes are held at their coordinates and the free nodes take the exact
/// minimizer of the majorizing function under that constraint. Stops after
/// `cfg.iterations` or once the relative stress decrease drops below
/// `cfg.convergence_epsilon`. Without pins the result is centred on the area.
pub fn stress_mds_layout(
    matrix: &DistanceMatrix,
    cfg: &LayoutConfig,
    pins: &Pins,
) -> Result<LayoutResult, LayoutError> {
    cfg.validate()?;
    let n = matrix.len();
    if n == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    if let Some(problem) = matrix.invariant_violations().into_iter().next() {
        return Err(LayoutError::BadMatrix(problem));
    }
    check_pins(n, pins)?;

    let mut x = initial_positions(n, cfg.width, cfg.height, cfg.seed, pins);
    let mut stress = raw_stress(&x, matrix);
    let mut history = vec![stress];
    let mut iterations_run = 0;
    let free_count = n - pins.len();
    let pinned_sum = pins.values().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);

    while iterations_run < cfg.iterations && stress > 0.0 {
        let snapshot = &x;
        // (B(Z) Z)_i = sum_j b_ij (z_i - z_j), b_ij = D_ij / |z_i - z_j|
        let bz: Vec<Point> = cfg.exec.map_indices(n, |i| {
            let mut acc = [0.0, 0.0];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = euclid(snapshot[i], snapshot[j]);
                if d > 0.0 {
                    let b = matrix.values[i][j] / d;
                    acc[0] += b * (snapshot[i][0] - snapshot[j][0]);
                    acc[1] += b * (snapshot[i][1] - snapshot[j][1]);
                }
            }
            acc
        });

        let mut next = x.clone();
        let nf = n as f64;
        if pins.is_empty() {
            for (p, b) in next.iter_mut().zip(&bz) {
                *p = [b[0] / nf, b[1] / nf];
            }
        } else if free_count > 0 {
            // n x_i - S_free = (BZ)_i + S_pinned for free i
            let mut r_sum = [0.0, 0.0];
            let r: Vec<Point> = bz
                .iter()
                .map(|b| [b[0] + pinned_sum[0], b[1] + pinned_sum[1]])
                .collect();
            for (i, ri) in r.iter().enumerate() {
                if !pins.contains_key(&i) {
                    r_sum[0] += ri[0];
                    r_sum[1] += ri[1];
                }
            }
            let denom = (n - free_count) as f64;
            let s_free = [r_sum[0] / denom, r_sum[1] / denom];
            for (i, p) in next.iter_mut().enumerate() {
                if !pins.contains_key(&i) {
                    *p = [(r[i][0] + s_free[0]) / nf, (r[i][1] + s_free[1]) / nf];
                }
            }
        }

        let new_stress = raw_stress(&next, matrix);
        x = next;
        iterations_run += 1;
        history.push(new_stress);
        let relative = if stress > 0.0 { (stress - new_stress) / stress } else { 0.0 };
        stress = new_stress;
        if relative < cfg.convergence_epsilon {
            break;
        }
    }

    if pins.is_empty() {
        let c = x.iter().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);
        let shift = [cfg.width / 2.0 - c[0] / n as f64, cfg.height / 2.0 - c[1] / n as f64];
        for p in &mut x {
            p[0] += shift[0];
            p[1] += shift[1];
        }
    }

    Ok(LayoutResult {
        final_stress: Some(raw_stress(&x, matrix)),
        positions: x,
        pinned: pins.clone(),
        stress_history: history,
        iterations_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;

    fn uniform(n: usize, value: f64) -> DistanceMatrix {
        let values = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { value }).collect())
            .collect();
        DistanceMatrix::from_rows((0..n).collect(), values)
    }

    fn tight() -> LayoutConfig {
        LayoutConfig { iterations: 2000, convergence_epsilon: 1e-15, ..LayoutConfig::stress_mds() }
    }

    #[test]
    fn two_points_exact() {
        let m = DistanceMatrix::from_rows(vec![0, 1], vec![vec![0.0, 5.0], vec![5.0, 0.0]]);
        let r = stress_mds_layout(&m, &LayoutConfig::stress_mds(), &Pins::new()).unwrap();
        assert!((euclid(r.positions[0], r.positions[1]) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn equilateral_embeds() {
        let r = stress_mds_layout(&uniform(3, 3.0), &tight(), &Pins::new()).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((euclid(r.positions[i], r.positions[j]) - 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn simplex_leaves_residual_stress() {
        let r = stress_mds_layout(&uniform(4, 1.0), &tight(), &Pins::new()).unwrap();
        assert!(r.final_stress.unwrap() > 1e-3);
        assert!(r.stress_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn all_zero_collapses_to_a_point() {
        let r = stress_mds_layout(&uniform(5, 0.0), &LayoutConfig::stress_mds(), &Pins::new()).unwrap();
        assert!(r.positions.iter().all(|p| euclid(*p, r.positions[0]) < 1e-9));
        assert_eq!(r.final_stress, Some(0.0));
    }

    #[test]
    fn pins_hold_and_stress_still_falls() {
        let m = uniform(6, 100.0);
        let pins = Pins::from([(0, [0.0, 0.0]), (4, [100.0, 0.0])]);
        let r = stress_mds_layout(&m, &tight(), &pins).unwrap();
        assert_eq!(r.positions[0], [0.0, 0.0]);
        assert_eq!(r.positions[4], [100.0, 0.0]);
        assert!(r.stress_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(r.final_stress.unwrap() < r.stress_history[0]);
    }

    #[test]
    fn exec_independent() {
        let m = uniform(20, 7.0);
        let seq = LayoutConfig { exec: Exec::Sequential, ..LayoutConfig::stress_mds() };
        let par = LayoutConfig { exec: Exec::Parallel, ..seq };
        assert_eq!(
            stress_mds_layout(&m, &seq, &Pins::new()).unwrap(),
            stress_mds_layout(&m, &par, &Pins::new()).unwrap()
        );
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let m = DistanceMatrix::from_rows(vec![0, 1], vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(
            stress_mds_layout(&m, &LayoutConfig::stress_mds(), &Pins::new()),
            Err(LayoutError::BadMatrix(_))
        ));
    }
}
