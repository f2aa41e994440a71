//! Static SVG rendering of a tanglegram layout.
//!
//! The left tree is drawn to the left of its leaf column, the right tree
//! mirrored on the other side, and matched leaves are connected by
//! straight `<line>` segments (exactly one per matching edge, top to
//! bottom in left leaf order). Coordinates are deterministic: leaves sit
//! at unit spacing in the order the orientation induces.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::tangle::{Orientation, Tanglegram};
use crate::tree::{BinaryTree, NodeId, TreeError};

const UNIT: f64 = 24.0;
const LEVEL_STEP: f64 = 28.0;
const GAP: f64 = 260.0;
const MARGIN: f64 = 20.0;
const LABEL_PAD: f64 = 4.0;

pub fn render_svg(t: &Tanglegram, o: &Orientation) -> Result<String, TreeError> {
    let left_order = t.left().leaf_order(&o.left_flips)?;
    let right_order = t.right().leaf_order(&o.right_flips)?;
    let n = left_order.len();

    // Distance from the leaf column, per node (0 for leaves).
    let left_rise = rise(t.left());
    let right_rise = rise(t.right());
    let left_extent = left_rise[t.left().root()] as f64 * LEVEL_STEP;
    let right_extent = right_rise[t.right().root()] as f64 * LEVEL_STEP;

    let x_left = MARGIN + left_extent;
    let x_right = x_left + GAP;
    let width = x_right + right_extent + MARGIN;
    let height = MARGIN * 2.0 + n as f64 * UNIT;

    let left_y = node_ys(t.left(), &left_order);
    let right_y = node_ys(t.right(), &right_order);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        svg,
        "  <g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">"
    );
    tree_paths(t.left(), &left_rise, &left_y, x_left, -1.0, &mut svg);
    tree_paths(t.right(), &right_rise, &right_y, x_right, 1.0, &mut svg);
    let _ = writeln!(svg, "  </g>");

    // Inter-tree edges, one line per matching pair, in left leaf order.
    let _ = writeln!(svg, "  <g stroke=\"#c0392b\" stroke-width=\"1\">");
    for &l in &left_order {
        let r = t.matching().right_of(l);
        let _ = writeln!(
            svg,
            "    <line class=\"tangle\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            x_left, left_y[l], x_right, right_y[r]
        );
    }
    let _ = writeln!(svg, "  </g>");

    let _ = writeln!(svg, "  <g font-family=\"monospace\" font-size=\"10\">");
    for &l in &left_order {
        let _ = writeln!(
            svg,
            "    <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            x_left - LABEL_PAD,
            left_y[l] - 2.0,
            t.left().label(l).expect("leaf has a label")
        );
    }
    for &r in &right_order {
        let _ = writeln!(
            svg,
            "    <text x=\"{}\" y=\"{}\">{}</text>",
            x_right + LABEL_PAD,
            right_y[r] - 2.0,
            t.right().label(r).expect("leaf has a label")
        );
    }
    let _ = writeln!(svg, "  </g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_svg_to_file(
    t: &Tanglegram,
    o: &Orientation,
    path: impl AsRef<Path>,
) -> Result<(), std::io::Error> {
    let svg = render_svg(t, o).map_err(std::io::Error::other)?;
    fs::write(path, svg)
}

/// Levels above the leaf line per node.
fn rise(tree: &BinaryTree) -> Vec<usize> {
    let mut rise = vec![0usize; tree.node_count()];
    let mut stack = vec![(tree.root(), false)];
    while let Some((v, exiting)) = stack.pop() {
        if let Some([a, b]) = tree.children(v) {
            if exiting {
                rise[v] = 1 + rise[a].max(rise[b]);
            } else {
                stack.push((v, true));
                stack.push((a, false));
                stack.push((b, false));
            }
        }
    }
    rise
}

/// Vertical centers: leaves by drawn position, inner nodes midway
/// between their children (flips move no midpoint).
fn node_ys(tree: &BinaryTree, order: &[NodeId]) -> Vec<f64> {
    let mut y = vec![0.0f64; tree.node_count()];
    for (i, &l) in order.iter().enumerate() {
        y[l] = MARGIN + (i as f64 + 0.5) * UNIT;
    }
    let mut stack = vec![(tree.root(), false)];
    while let Some((v, exiting)) = stack.pop() {
        if let Some([a, b]) = tree.children(v) {
            if exiting {
                y[v] = (y[a] + y[b]) / 2.0;
            } else {
                stack.push((v, true));
                stack.push((a, false));
                stack.push((b, false));
            }
        }
    }
    y
}

fn tree_paths(
    tree: &BinaryTree,
    rise: &[usize],
    y: &[f64],
    leaf_x: f64,
    direction: f64,
    out: &mut String,
) {
    for v in tree.internal_nodes() {
        let [a, b] = tree.children(v).expect("internal node");
        let vx = leaf_x + direction * rise[v] as f64 * LEVEL_STEP;
        for c in [a, b] {
            let cx = leaf_x + direction * rise[c] as f64 * LEVEL_STEP;
            let _ = writeln!(
                out,
                "    <path d=\"M {} {} L {} {} L {} {}\"/>",
                vx, y[v], vx, y[c], cx, y[c]
            );
        }
    }
}
