use super::{check_pins, initial_positions, LayoutConfig, LayoutError, LayoutResult, Pins, Point};
use crate::distance::DistanceMatrix;

/// Fallback direction for coincident nodes so they separate deterministically.
fn nudge(i: usize, j: usize) -> Point {
    let angle = (i * 7919 + j * 104_729) as f64;
    [angle.cos() * 1e-6, angle.sin() * 1e-6]
}

/// Moves every unpinned node along its displacement, capped at `temperature`,
/// and keeps it inside `[0, width] x [0, height]` when `bounds` is set.
fn advance(
    positions: &mut [Point],
    displacement: &[Point],
    temperature: f64,
    pins: &Pins,
    bounds: Option<(f64, f64)>,
) {
    for (i, (pos, disp)) in positions.iter_mut().zip(displacement).enumerate() {
        if pins.contains_key(&i) {
            continue;
        }
        let len = (disp[0] * disp[0] + disp[1] * disp[1]).sqrt();
        if len > 0.0 {
            let step = len.min(temperature) / len;
            pos[0] += disp[0] * step;
            pos[1] += disp[1] * step;
        }
        if let Some((w, h)) = bounds {
            pos[0] = pos[0].clamp(0.0, w);
            pos[1] = pos[1].clamp(0.0, h);
        }
    }
}

/// Fruchterman-Reingold placement over an undirected edge list.
///
/// Every pair repels with `k^2 / d`, every edge attracts with `d^2 / k`, where
/// `k = sqrt(width * height / n)`. Displacements are capped by a temperature
/// that starts at `initial_step` and decays by `cooling` each iteration.
pub fn force_directed_layout(
    node_count: usize,
    edges: &[(usize, usize)],
    cfg: &LayoutConfig,
    pins: &Pins,
) -> Result<LayoutResult, LayoutError> {
    cfg.validate()?;
    if node_count == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= node_count || *b >= node_count) {
        return Err(LayoutError::DanglingEdge(a, b));
    }
    check_pins(node_count, pins)?;

    let (w, h) = (cfg.width, cfg.height);
    let mut positions = initial_positions(node_count, w, h, cfg.seed, pins);
    if node_count == 1 {
        if !pins.contains_key(&0) {
            positions[0] = [w / 2.0, h / 2.0];
        }
        return Ok(LayoutResult {
            positions,
            pinned: pins.clone(),
            final_stress: None,
            stress_history: Vec::new(),
            iterations_run: 0,
        });
    }

    let k = (w * h / node_count as f64).sqrt();
    let k2 = k * k;
    let mut temperature = cfg.initial_step.unwrap_or(w / 10.0);
    for _ in 0..cfg.iterations {
        let snapshot = &positions;
        let mut displacement: Vec<Point> = cfg.exec.map_indices(node_count, |i| {
            let [xi, yi] = snapshot[i];
            let mut acc = [0.0, 0.0];
            for (j, &[xj, yj]) in snapshot.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (mut dx, mut dy) = (xi - xj, yi - yj);
                let mut d2 = dx * dx + dy * dy;
                if d2 == 0.0 {
                    [dx, dy] = nudge(i.min(j), i.max(j));
                    if i > j {
                        dx = -dx;
                        dy = -dy;
                    }
                    d2 = dx * dx + dy * dy;
                }
                // (delta / d) * (k^2 / d)
                let f = k2 / d2;
                acc[0] += dx * f;
                acc[1] += dy * f;
            }
            acc
        });
        for &(a, b) in edges {
            if a == b {
                continue;
            }
            let dx = positions[a][0] - positions[b][0];
            let dy = positions[a][1] - positions[b][1];
            // (delta / d) * (d^2 / k)
            let f = (dx * dx + dy * dy).sqrt() / k;
            displacement[a][0] -= dx * f;
            displacement[a][1] -= dy * f;
            displacement[b][0] += dx * f;
            displacement[b][1] += dy * f;
        }
        advance(&mut positions, &displacement, temperature, pins, Some((w, h)));
        temperature *= cfg.cooling;
    }

    Ok(LayoutResult {
        positions,
        pinned: pins.clone(),
        final_stress: None,
        stress_history: Vec::new(),
        iterations_run: cfg.iterations,
    })
}

/// Force-directed placement of a complete graph whose edge lengths are the
/// matrix entries: each pair balances `d^2 / L` attraction against `L^2 / d`
/// repulsion, which is at rest exactly at `d = L`.
pub fn matrix_force_layout(
    matrix: &DistanceMatrix,
    cfg: &LayoutConfig,
    pins: &Pins,
) -> Result<LayoutResult, LayoutError> {
    cfg.validate()?;
    let n = matrix.len();
    if n == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    check_pins(n, pins)?;
    let scale = matrix.values.iter().flatten().copied().fold(0.0, f64::max);
    if scale == 0.0 || n == 1 {
        let mut positions = vec![[cfg.width / 2.0, cfg.height / 2.0]; n];
        for (&id, &p) in pins {
            positions[id] = p;
        }
        return Ok(LayoutResult {
            positions,
            pinned: pins.clone(),
            final_stress: None,
            stress_history: Vec::new(),
            iterations_run: 0,
        });
    }
    let floor = scale * 1e-3;
    let mut positions = initial_positions(n, scale, scale, cfg.seed, pins);
    let mut temperature = cfg.initial_step.unwrap_or(scale / 10.0);
    for _ in 0..cfg.iterations {
        let snapshot = &positions;
        let displacement: Vec<Point> = cfg.exec.map_indices(n, |i| {
            let mut acc = [0.0, 0.0];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (mut dx, mut dy) = (snapshot[i][0] - snapshot[j][0], snapshot[i][1] - snapshot[j][1]);
                let mut d = (dx * dx + dy * dy).sqrt();
                if d == 0.0 {
                    [dx, dy] = nudge(i.min(j), i.max(j));
                    if i > j {
                        dx = -dx;
                        dy = -dy;
                    }
                    d = (dx * dx + dy * dy).sqrt();
                }
                let target = matrix.values[i][j].max(floor);
                // positive pulls i towards j
                let f = d * d / target - target * target / d;
                acc[0] -= dx / d * f;
                acc[1] -= dy / d * f;
            }
            acc
        });
        advance(&mut positions, &displacement, temperature, pins, None);
        temperature *= cfg.cooling;
    }
    let stress = super::raw_stress(&positions, matrix);
    Ok(LayoutResult {
        positions,
        pinned: pins.clone(),
        final_stress: Some(stress),
        stress_history: Vec::new(),
        iterations_run: cfg.iterations,
    })
}
