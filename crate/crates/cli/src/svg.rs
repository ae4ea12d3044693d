//! Static SVG figures of streamlines.
//!
//! Every streamline is one `<polyline class="streamline">`. Every singularity
//! is one element carrying `class="marker <kind>"`:
//!
//! | kind          | shape                 |
//! |---------------|-----------------------|
//! | `vortex`      | filled circle         |
//! | `anti_vortex` | open circle           |
//! | `source`      | filled square         |
//! | `sink`        | open diamond          |
//!
//! Coordinates are written in flow units; a single transform flips the y axis.

use std::fmt::Write as _;

use fockflow::analysis::GridSpec;
use fockflow::images::{Singularity, SingularityKind};

const WIDTH_PX: f64 = 800.0;

fn num(v: f64) -> String {
    // fixed precision keeps files small and byte-stable
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn render(bounds: &GridSpec, lines: &[Vec<[f64; 2]>], singularities: &[Singularity]) -> String {
    let w = (bounds.xmax - bounds.xmin).max(f64::MIN_POSITIVE);
    let h = (bounds.ymax - bounds.ymin).max(f64::MIN_POSITIVE);
    let height_px = (WIDTH_PX * h / w).clamp(50.0, 4000.0);
    let stroke = w.max(h) / 400.0;
    let r = w.max(h) / 80.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(WIDTH_PX),
        num(height_px),
        num(bounds.xmin),
        num(-bounds.ymax),
        num(w),
        num(h)
    );
    let _ = writeln!(
        out,
        "<style>.streamline{{fill:none;stroke:#1f4e79;stroke-width:{s}}} .marker{{stroke:#000;stroke-width:{s}}} \
         .vortex{{fill:#c0392b}} .anti_vortex{{fill:none}} .source{{fill:#27ae60}} .sink{{fill:none}}</style>",
        s = num(stroke)
    );
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    for line in lines {
        out.push_str("<polyline class=\"streamline\" points=\"");
        for (k, p) in line.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{},{}", num(p[0]), num(p[1]));
        }
        out.push_str("\"/>\n");
    }
    for s in singularities {
        let (x, y) = (s.position.re, s.position.im);
        let class = s.kind.as_str();
        let _ = match s.kind {
            SingularityKind::Vortex | SingularityKind::AntiVortex => writeln!(
                out,
                r#"<circle class="marker {class}" cx="{}" cy="{}" r="{}"/>"#,
                num(x),
                num(y),
                num(r)
            ),
            SingularityKind::Source => writeln!(
                out,
                r#"<rect class="marker {class}" x="{}" y="{}" width="{}" height="{}"/>"#,
                num(x - r),
                num(y - r),
                num(2.0 * r),
                num(2.0 * r)
            ),
            SingularityKind::Sink => writeln!(
                out,
                r#"<polygon class="marker {class}" points="{},{} {},{} {},{} {},{}"/>"#,
                num(x),
                num(y + r),
                num(x + r),
                num(y),
                num(x),
                num(y - r),
                num(x - r),
                num(y)
            ),
        };
    }
    out.push_str("</g>\n</svg>\n");
    out
}
