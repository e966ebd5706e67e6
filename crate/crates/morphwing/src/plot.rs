//! Static SVG rendering of logged channels. Plots are offline artifacts of
//! completed runs: stacked time-series panels and a top-view trajectory.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::log::CsvLog;

/// Figure families the plot command understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// Truth vs estimate per force axis.
    Forces,
    /// Body position components over time.
    Position,
    /// Joint angles, Euler angles, and linear velocities.
    States,
    /// Top view (x-y path).
    Trajectory,
}

impl Channel {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "forces" => Ok(Channel::Forces),
            "position" => Ok(Channel::Position),
            "states" => Ok(Channel::States),
            "trajectory" => Ok(Channel::Trajectory),
            other => Err(Error::UnknownChannel(other.to_string())),
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Channel::Forces => "forces.svg",
            Channel::Position => "position.svg",
            Channel::States => "states.svg",
            Channel::Trajectory => "trajectory.svg",
        }
    }
}

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    x: &'a [f64],
    y: &'a [f64],
}

struct Panel<'a> {
    title: &'a str,
    series: Vec<Series<'a>>,
}

const PANEL_W: f64 = 760.0;
const PANEL_H: f64 = 180.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 30.0;

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let pad = lo.abs().max(1e-9) * 0.1;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn render_panels(panels: &[Panel], title: &str) -> String {
    let total_h = MARGIN_T + panels.len() as f64 * (PANEL_H + MARGIN_B) + 10.0;
    let total_w = MARGIN_L + PANEL_W + MARGIN_R;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{total_h}\" viewBox=\"0 0 {total_w} {total_h}\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
        MARGIN_L
    ));
    for (p, panel) in panels.iter().enumerate() {
        let top = MARGIN_T + p as f64 * (PANEL_H + MARGIN_B);
        let (mut xlo, mut xhi) = (f64::MAX, f64::MIN);
        let (mut ylo, mut yhi) = (f64::MAX, f64::MIN);
        for s in &panel.series {
            for (&x, &y) in s.x.iter().zip(s.y) {
                xlo = xlo.min(x);
                xhi = xhi.max(x);
                ylo = ylo.min(y);
                yhi = yhi.max(y);
            }
        }
        if xlo > xhi {
            continue;
        }
        let (xlo, xhi) = nice_range(xlo, xhi);
        let (ylo, yhi) = nice_range(ylo, yhi);
        let to_px = |x: f64, y: f64| -> (f64, f64) {
            (
                MARGIN_L + (x - xlo) / (xhi - xlo) * PANEL_W,
                top + PANEL_H - (y - ylo) / (yhi - ylo) * PANEL_H,
            )
        };
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{PANEL_W}\" height=\"{PANEL_H}\" fill=\"none\" stroke=\"#999\"/>\n",
            MARGIN_L, top
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            MARGIN_L,
            top - 6.0,
            panel.title
        ));
        // Axis extent labels.
        svg.push_str(&format!(
            "<text x=\"8\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{yhi:.3}</text>\n",
            top + 10.0
        ));
        svg.push_str(&format!(
            "<text x=\"8\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{ylo:.3}</text>\n",
            top + PANEL_H
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{xlo:.2}</text>\n",
            MARGIN_L,
            top + PANEL_H + 14.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{xhi:.2}</text>\n",
            MARGIN_L + PANEL_W,
            top + PANEL_H + 14.0
        ));
        for (si, s) in panel.series.iter().enumerate() {
            let mut points = String::new();
            for (&x, &y) in s.x.iter().zip(s.y) {
                let (px, py) = to_px(x, y);
                points.push_str(&format!("{px:.2},{py:.2} "));
            }
            svg.push_str(&format!(
                "<polyline points=\"{points}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                s.color
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"{}\">{}</text>\n",
                MARGIN_L + PANEL_W - 110.0,
                top + 14.0 + 12.0 * si as f64,
                s.color,
                s.label
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn sum3(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Render one figure family from a parsed log; returns the written path.
pub fn render(log: &CsvLog, channel: Channel, out_dir: &Path) -> Result<PathBuf> {
    let t = log.column("t")?;
    let svg = match channel {
        Channel::Forces => {
            let truth = [
                sum3(&log.column("flx")?, &log.column("frx")?),
                sum3(&log.column("fly")?, &log.column("fry")?),
                sum3(&log.column("flz")?, &log.column("frz")?),
            ];
            let est = [log.column("estx")?, log.column("esty")?, log.column("estz")?];
            let titles = ["Fx (N)", "Fy (N)", "Fz (N)"];
            let panels: Vec<Panel> = (0..3)
                .map(|a| Panel {
                    title: titles[a],
                    series: vec![
                        Series { label: "actual", color: "#222222", x: &t, y: &truth[a] },
                        Series { label: "estimated", color: "#cc2222", x: &t, y: &est[a] },
                    ],
                })
                .collect();
            render_panels(&panels, "External force: truth vs estimate")
        }
        Channel::Position => {
            let px = log.column("px")?;
            let py = log.column("py")?;
            let pz = log.column("pz")?;
            let panels = vec![
                Panel { title: "X (m)", series: vec![Series { label: "x", color: "#2255cc", x: &t, y: &px }] },
                Panel { title: "Y (m)", series: vec![Series { label: "y", color: "#22aa55", x: &t, y: &py }] },
                Panel { title: "Z (m)", series: vec![Series { label: "z", color: "#cc2222", x: &t, y: &pz }] },
            ];
            render_panels(&panels, "Body position")
        }
        Channel::States => {
            let qs = log.column("qs")?;
            let qe = log.column("qe")?;
            let roll = log.column("roll")?;
            let pitch = log.column("pitch")?;
            let yaw = log.column("yaw")?;
            let vx = log.column("vx")?;
            let vy = log.column("vy")?;
            let vz = log.column("vz")?;
            let panels = vec![
                Panel {
                    title: "Joint angles (rad)",
                    series: vec![
                        Series { label: "shoulder", color: "#2255cc", x: &t, y: &qs },
                        Series { label: "elbow", color: "#cc2222", x: &t, y: &qe },
                    ],
                },
                Panel {
                    title: "Euler angles (rad)",
                    series: vec![
                        Series { label: "roll", color: "#2255cc", x: &t, y: &roll },
                        Series { label: "pitch", color: "#22aa55", x: &t, y: &pitch },
                        Series { label: "yaw", color: "#cc2222", x: &t, y: &yaw },
                    ],
                },
                Panel {
                    title: "Linear velocity (m/s)",
                    series: vec![
                        Series { label: "vx", color: "#2255cc", x: &t, y: &vx },
                        Series { label: "vy", color: "#22aa55", x: &t, y: &vy },
                        Series { label: "vz", color: "#cc2222", x: &t, y: &vz },
                    ],
                },
            ];
            render_panels(&panels, "Joint angles, attitude, velocity")
        }
        Channel::Trajectory => {
            let px = log.column("px")?;
            let py = log.column("py")?;
            let panels = vec![Panel {
                title: "Top view: y vs x (m)",
                series: vec![Series { label: "path", color: "#222222", x: &px, y: &py }],
            }];
            render_panels(&panels, "Top-view trajectory")
        }
    };
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(channel.file_name());
    std::fs::write(&path, svg)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_channel_is_rejected() {
        assert!(matches!(
            Channel::parse("spectrogram"),
            Err(Error::UnknownChannel(_))
        ));
    }

    #[test]
    fn known_channels_parse() {
        for (name, ch) in [
            ("forces", Channel::Forces),
            ("position", Channel::Position),
            ("states", Channel::States),
            ("trajectory", Channel::Trajectory),
        ] {
            assert_eq!(Channel::parse(name).unwrap(), ch);
        }
    }
}
