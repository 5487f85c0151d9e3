//! Hand-rolled SVG scatter plots of objective fronts; byte-deterministic for
//! identical inputs.

const PANEL: f64 = 300.0;
const MARGIN: f64 = 48.0;

/// Scatter of a run's front, optionally over a reference front. Two
/// objectives render one panel; more objectives render the grid of pairwise
/// panels. An empty front with no reference yields axes only.
pub fn emit_front_plot(front: &[Vec<f64>], reference: Option<&[Vec<f64>]>) -> String {
    let m = front
        .first()
        .or_else(|| reference.and_then(|r| r.first()))
        .map_or(2, |p| p.len());
    let pairs: Vec<(usize, usize)> = if m == 2 {
        vec![(0, 1)]
    } else {
        (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .collect()
    };
    let columns = pairs.len().min(3);
    let rows = pairs.len().div_ceil(columns);
    let width = columns as f64 * (PANEL + MARGIN) + MARGIN;
    let height = rows as f64 * (PANEL + MARGIN) + MARGIN;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    for (panel_index, &(fx, fy)) in pairs.iter().enumerate() {
        let col = (panel_index % columns) as f64;
        let row = (panel_index / columns) as f64;
        let x0 = MARGIN + col * (PANEL + MARGIN);
        let y0 = MARGIN + row * (PANEL + MARGIN);
        draw_panel(&mut svg, front, reference, fx, fy, x0, y0);
    }
    svg.push_str("</svg>\n");
    svg
}

fn draw_panel(
    svg: &mut String,
    front: &[Vec<f64>],
    reference: Option<&[Vec<f64>]>,
    fx: usize,
    fy: usize,
    x0: f64,
    y0: f64,
) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let all = front
        .iter()
        .chain(reference.into_iter().flatten());
    for p in all {
        lo[0] = lo[0].min(p[fx]);
        hi[0] = hi[0].max(p[fx]);
        lo[1] = lo[1].min(p[fy]);
        hi[1] = hi[1].max(p[fy]);
    }
    for axis in 0..2 {
        if !lo[axis].is_finite() || lo[axis] == hi[axis] {
            let center = if lo[axis].is_finite() { lo[axis] } else { 0.0 };
            lo[axis] = center - 0.5;
            hi[axis] = center + 0.5;
        }
        let pad = 0.05 * (hi[axis] - lo[axis]);
        lo[axis] -= pad;
        hi[axis] += pad;
    }
    let map_x = |v: f64| x0 + (v - lo[0]) / (hi[0] - lo[0]) * PANEL;
    let map_y = |v: f64| y0 + PANEL - (v - lo[1]) / (hi[1] - lo[1]) * PANEL;

    svg.push_str(&format!(
        "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{PANEL}\" height=\"{PANEL}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">f{}</text>\n",
        x0 + PANEL / 2.0,
        y0 + PANEL + 30.0,
        fx + 1
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 {:.2} {:.2})\">f{}</text>\n",
        x0 - 30.0,
        y0 + PANEL / 2.0,
        x0 - 30.0,
        y0 + PANEL / 2.0,
        fy + 1
    ));

    if let Some(reference) = reference {
        for p in reference {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.2\" fill=\"#b0b0b0\"/>\n",
                map_x(p[fx]),
                map_y(p[fy])
            ));
        }
    }
    for p in front {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\" \
             fill-opacity=\"0.85\"/>\n",
            map_x(p[fx]),
            map_y(p[fy])
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_front_draws_axes_only() {
        let svg = emit_front_plot(&[], None);
        assert!(svg.contains("<rect"));
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn byte_identical_on_reemit() {
        let front = vec![vec![0.25, 0.75], vec![0.5, 0.5]];
        let reference = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let a = emit_front_plot(&front, Some(&reference));
        let b = emit_front_plot(&front, Some(&reference));
        assert_eq!(a, b);
    }

    #[test]
    fn one_circle_per_point() {
        let front = vec![vec![0.2, 0.8], vec![0.4, 0.6], vec![0.8, 0.1]];
        let svg = emit_front_plot(&front, None);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn three_objectives_render_three_panels() {
        let front = vec![vec![0.2, 0.3, 0.5]];
        let svg = emit_front_plot(&front, None);
        // one bounding rect per panel plus the background
        assert_eq!(svg.matches("<rect").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
