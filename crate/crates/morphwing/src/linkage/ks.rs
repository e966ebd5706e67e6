//! Crank-driven planar linkage ("kinetic sculpture") kinematics.
//!
//! The mechanism is described by nine oriented segments in the x-y plane.
//! Coordinate `q[i]` is the absolute orientation of segment `i`; each
//! segment is carried either by a fixed ground anchor or by a material
//! point of a lower-indexed segment. The topology table supplies the
//! constraint rows:
//!
//! - `coincide`: a pin joint forcing two segment points to the same planar
//!   point (two scalar rows),
//! - `couple`: a rigid weld fixing the angle between two segments of the
//!   same physical link (one row),
//! - `pin`: parks an unused coordinate at a constant (one row).
//!
//! With one driven (crank) coordinate the rows must total eight so the
//! closure system is square and the mechanism has exactly one degree of
//! freedom. Every residual row is a sum of single-angle sine/cosine terms
//! plus a linear part, so the constraint Jacobian and its velocity product
//! are analytic.
//!
//! Position closure is solved by damped Newton iteration with continuation
//! from the previous time step; velocities and accelerations follow from
//! the differentiated constraints, with the crank acceleration as the
//! single input.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkage::gait::GaitTargets;

pub const KS_COORDS: usize = 9;
const UNKNOWNS: usize = 8;

pub type KsVec = SVector<f64, KS_COORDS>;
type ResVec = SVector<f64, UNKNOWNS>;
type ResJac = SMatrix<f64, UNKNOWNS, KS_COORDS>;
type ResMat = SMatrix<f64, UNKNOWNS, UNKNOWNS>;

/// Carrier of a segment's base point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseRef {
    /// Fixed anchor in the linkage plane (m).
    Ground([f64; 2]),
    /// Material point at `dist` along a lower-indexed segment.
    OnSegment { seg: usize, dist: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SegmentDef {
    pub base: BaseRef,
    /// Nominal segment length (m); constraint rows may reference any
    /// distance along the segment direction.
    pub length: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintDef {
    /// Pin joint: point of `seg_a` at `dist_a` coincides with point of
    /// `seg_b` at `dist_b`.
    Coincide { seg_a: usize, dist_a: f64, seg_b: usize, dist_b: f64 },
    /// Rigid weld: `q[seg] = q[to] + offset`.
    Couple { seg: usize, to: usize, offset: f64 },
    /// Parked coordinate: `q[seg] = angle`.
    Pin { seg: usize, angle: f64 },
}

/// Affine read-out of linkage coordinates, e.g. a relative joint angle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputMap {
    /// `(coordinate index, coefficient)` pairs.
    pub terms: Vec<(usize, f64)>,
    pub offset: f64,
}

impl OutputMap {
    pub fn value(&self, q: &KsVec) -> f64 {
        self.offset + self.terms.iter().map(|(i, c)| c * q[*i]).sum::<f64>()
    }

    /// Linear part only; applies to rates and accelerations.
    pub fn rate(&self, qd: &KsVec) -> f64 {
        self.terms.iter().map(|(i, c)| c * qd[*i]).sum::<f64>()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KsConfig {
    pub segments: Vec<SegmentDef>,
    pub constraints: Vec<ConstraintDef>,
    /// Index of the crank coordinate.
    pub driven: usize,
    /// Shoulder read-out.
    pub shoulder: OutputMap,
    /// Elbow read-out.
    pub elbow: OutputMap,
    /// Crank angle at which `initial_guess` assembles.
    pub reference_crank: f64,
    /// Assembly-branch seed for the position solver.
    pub initial_guess: [f64; KS_COORDS],
    /// Steady crank rate (rad/s); the crank acceleration input defaults
    /// to zero around this rate.
    pub crank_rate: f64,
}

/// Linkage state: nine angles and their rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsState {
    pub q: KsVec,
    pub qd: KsVec,
}

/// Flattened chain representation of one segment point:
/// `point(dist) = anchor + sum_k coeff_k * u(q_k) + dist * u(q_own)`
/// with `u(a) = (cos a, sin a)`.
#[derive(Clone, Debug)]
struct Chain {
    anchor: [f64; 2],
    /// Per-coordinate accumulated coefficients of the carrier chain.
    coeffs: [f64; KS_COORDS],
}

/// One scalar residual row in trigonometric-plus-linear form:
/// `row(q) = constant + sum_k trig_k * f(q_k) + sum_k lin_k * q_k`
/// where `f` is cos for x-rows and sin for y-rows.
#[derive(Clone, Debug)]
struct Row {
    constant: f64,
    trig: [f64; KS_COORDS],
    lin: [f64; KS_COORDS],
    /// True for x-type rows (cos), false for y-type (sin). Linear rows
    /// ignore the flag.
    is_cos: bool,
}

impl Row {
    fn eval(&self, q: &KsVec) -> f64 {
        let mut v = self.constant;
        for k in 0..KS_COORDS {
            if self.trig[k] != 0.0 {
                v += self.trig[k] * if self.is_cos { q[k].cos() } else { q[k].sin() };
            }
            if self.lin[k] != 0.0 {
                v += self.lin[k] * q[k];
            }
        }
        v
    }

    fn grad(&self, q: &KsVec, out: &mut [f64; KS_COORDS]) {
        for k in 0..KS_COORDS {
            let mut g = self.lin[k];
            if self.trig[k] != 0.0 {
                g += self.trig[k] * if self.is_cos { -q[k].sin() } else { q[k].cos() };
            }
            out[k] = g;
        }
    }

    /// Per-coordinate second derivative (rows have no cross terms).
    fn hess_diag(&self, q: &KsVec, out: &mut [f64; KS_COORDS]) {
        for k in 0..KS_COORDS {
            out[k] = if self.trig[k] != 0.0 {
                self.trig[k] * if self.is_cos { -q[k].cos() } else { -q[k].sin() }
            } else {
                0.0
            };
        }
    }
}

/// Compiled closure system.
pub struct KsSystem {
    config: KsConfig,
    rows: Vec<Row>,
    chains: Vec<Chain>,
    /// Unknown coordinate indices (everything but the crank).
    free: [usize; UNKNOWNS],
}

pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const POSITION_TOL: f64 = 1e-12;
/// Closure residual bound the solved configurations must satisfy.
pub const CLOSURE_TOL: f64 = 1e-9;
const SINGULAR_DET_TOL: f64 = 1e-14;

impl KsSystem {
    pub fn new(config: KsConfig) -> Result<Self> {
        if config.segments.len() != KS_COORDS {
            return Err(Error::invalid_config(
                "ks.segments",
                format!("expected exactly {KS_COORDS} segments, got {}", config.segments.len()),
            ));
        }
        if config.driven >= KS_COORDS {
            return Err(Error::invalid_config("ks.driven", "index out of range"));
        }
        for (i, seg) in config.segments.iter().enumerate() {
            if let BaseRef::OnSegment { seg: parent, .. } = seg.base {
                if parent >= i {
                    return Err(Error::invalid_config(
                        format!("ks.segments[{i}].base"),
                        "carrier segment index must be lower than the segment's own index",
                    ));
                }
            }
            if !seg.length.is_finite() || seg.length < 0.0 {
                return Err(Error::invalid_config(
                    format!("ks.segments[{i}].length"),
                    "length must be finite and non-negative",
                ));
            }
        }

        // Flatten carrier chains (indices are topologically ordered).
        let mut chains: Vec<Chain> = Vec::with_capacity(KS_COORDS);
        for seg in &config.segments {
            let chain = match seg.base {
                BaseRef::Ground(p) => Chain { anchor: p, coeffs: [0.0; KS_COORDS] },
                BaseRef::OnSegment { seg: parent, dist } => {
                    let mut c = chains[parent].clone();
                    c.coeffs[parent] += dist;
                    c
                }
            };
            chains.push(chain);
        }

        let mut rows = Vec::new();
        let mut coincide_count = 0;
        for (ci, cons) in config.constraints.iter().enumerate() {
            match *cons {
                ConstraintDef::Coincide { seg_a, dist_a, seg_b, dist_b } => {
                    coincide_count += 1;
                    if seg_a >= KS_COORDS || seg_b >= KS_COORDS {
                        return Err(Error::invalid_config(
                            format!("ks.constraints[{ci}]"),
                            "segment index out of range",
                        ));
                    }
                    let mut trig = [0.0; KS_COORDS];
                    let a = &chains[seg_a];
                    let b = &chains[seg_b];
                    for k in 0..KS_COORDS {
                        trig[k] = a.coeffs[k] - b.coeffs[k];
                    }
                    trig[seg_a] += dist_a;
                    trig[seg_b] -= dist_b;
                    let constant = [a.anchor[0] - b.anchor[0], a.anchor[1] - b.anchor[1]];
                    for (axis, is_cos) in [(0, true), (1, false)] {
                        rows.push(Row {
                            constant: constant[axis],
                            trig,
                            lin: [0.0; KS_COORDS],
                            is_cos,
                        });
                    }
                }
                ConstraintDef::Couple { seg, to, offset } => {
                    if seg >= KS_COORDS || to >= KS_COORDS {
                        return Err(Error::invalid_config(
                            format!("ks.constraints[{ci}]"),
                            "segment index out of range",
                        ));
                    }
                    let mut lin = [0.0; KS_COORDS];
                    lin[seg] += 1.0;
                    lin[to] -= 1.0;
                    rows.push(Row { constant: -offset, trig: [0.0; KS_COORDS], lin, is_cos: true });
                }
                ConstraintDef::Pin { seg, angle } => {
                    if seg >= KS_COORDS {
                        return Err(Error::invalid_config(
                            format!("ks.constraints[{ci}]"),
                            "segment index out of range",
                        ));
                    }
                    let mut lin = [0.0; KS_COORDS];
                    lin[seg] = 1.0;
                    rows.push(Row { constant: -angle, trig: [0.0; KS_COORDS], lin, is_cos: true });
                }
            }
        }
        if rows.len() != UNKNOWNS {
            return Err(Error::invalid_config(
                "ks.constraints",
                format!(
                    "constraint rows must total {UNKNOWNS} (got {}); the closure system must be square",
                    rows.len()
                ),
            ));
        }
        if coincide_count == 0 || coincide_count > 3 {
            return Err(Error::invalid_config(
                "ks.constraints",
                format!("expected 1..=3 coincidence constraints, got {coincide_count}"),
            ));
        }
        for map in [&config.shoulder, &config.elbow] {
            for (idx, _) in &map.terms {
                if *idx >= KS_COORDS {
                    return Err(Error::invalid_config("ks.shoulder/elbow", "index out of range"));
                }
            }
        }

        let mut free = [0usize; UNKNOWNS];
        let mut j = 0;
        for i in 0..KS_COORDS {
            if i != config.driven {
                free[j] = i;
                j += 1;
            }
        }

        Ok(Self { config, rows, chains, free })
    }

    pub fn config(&self) -> &KsConfig {
        &self.config
    }

    /// Closure residual over all constraint rows.
    pub fn residual(&self, q: &KsVec) -> ResVec {
        ResVec::from_fn(|r, _| self.rows[r].eval(q))
    }

    /// Constraint Jacobian (rows x all nine coordinates).
    pub fn jacobian(&self, q: &KsVec) -> ResJac {
        let mut jac = ResJac::zeros();
        let mut grad = [0.0; KS_COORDS];
        for (r, row) in self.rows.iter().enumerate() {
            row.grad(q, &mut grad);
            for k in 0..KS_COORDS {
                jac[(r, k)] = grad[k];
            }
        }
        jac
    }

    /// `Phi_dot * qd`, the velocity product needed by the acceleration
    /// solve. Exact because rows have no cross second derivatives.
    fn jac_dot_qd(&self, q: &KsVec, qd: &KsVec) -> ResVec {
        let mut out = ResVec::zeros();
        let mut hd = [0.0; KS_COORDS];
        for (r, row) in self.rows.iter().enumerate() {
            row.hess_diag(q, &mut hd);
            let mut acc = 0.0;
            for k in 0..KS_COORDS {
                acc += hd[k] * qd[k] * qd[k];
            }
            out[r] = acc;
        }
        out
    }

    fn reduced(&self, jac: &ResJac) -> ResMat {
        ResMat::from_fn(|r, c| jac[(r, self.free[c])])
    }

    /// Solve position closure for the non-crank coordinates by damped
    /// Newton iteration starting from `guess`; the returned configuration
    /// lies on the same assembly branch as the guess.
    pub fn solve_position(&self, crank_angle: f64, guess: &KsVec) -> Result<KsVec> {
        let mut q = *guess;
        q[self.config.driven] = crank_angle;
        let mut res = self.residual(&q);
        let mut norm = res.norm();
        for _ in 0..MAX_NEWTON_ITERATIONS {
            if norm <= POSITION_TOL {
                return Ok(q);
            }
            let jac = self.jacobian(&q);
            let reduced = self.reduced(&jac);
            let det = reduced.determinant();
            if !det.is_finite() || det.abs() <= SINGULAR_DET_TOL {
                return Err(Error::SingularConfiguration { det: det.abs() });
            }
            let lu = reduced.lu();
            let delta = lu
                .solve(&(-res))
                .ok_or(Error::SingularConfiguration { det: det.abs() })?;

            // Step halving keeps the iterate on the guess's branch.
            let mut lambda = 1.0;
            loop {
                let mut q_try = q;
                for (c, &idx) in self.free.iter().enumerate() {
                    q_try[idx] += lambda * delta[c];
                }
                let res_try = self.residual(&q_try);
                let norm_try = res_try.norm();
                if norm_try < norm || lambda < 1.0 / 1024.0 {
                    q = q_try;
                    res = res_try;
                    norm = norm_try;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if norm <= CLOSURE_TOL {
            return Ok(q);
        }
        Err(Error::NoConvergence { iterations: MAX_NEWTON_ITERATIONS, residual: norm })
    }

    /// Rates consistent with the closure constraints at the given crank rate.
    pub fn consistent_rates(&self, q: &KsVec, crank_rate: f64) -> Result<KsVec> {
        let jac = self.jacobian(q);
        let reduced = self.reduced(&jac);
        let det = reduced.determinant();
        if !det.is_finite() || det.abs() <= SINGULAR_DET_TOL {
            return Err(Error::SingularConfiguration { det: det.abs() });
        }
        let rhs = -crank_rate * jac.column(self.config.driven);
        let sol = reduced
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularConfiguration { det: det.abs() })?;
        let mut qd = KsVec::zeros();
        qd[self.config.driven] = crank_rate;
        for (c, &idx) in self.free.iter().enumerate() {
            qd[idx] = sol[c];
        }
        Ok(qd)
    }

    /// Constraint-consistent accelerations for crank acceleration `u_k`,
    /// plus the shoulder/elbow output accelerations.
    pub fn velocity_accel(&self, state: &KsState, u_k: f64) -> Result<(KsVec, [f64; 2])> {
        let jac = self.jacobian(&state.q);
        let reduced = self.reduced(&jac);
        let det = reduced.determinant();
        if !det.is_finite() || det.abs() <= SINGULAR_DET_TOL {
            return Err(Error::SingularConfiguration { det: det.abs() });
        }
        let bias = self.jac_dot_qd(&state.q, &state.qd);
        let rhs = -bias - u_k * jac.column(self.config.driven);
        let sol = reduced
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularConfiguration { det: det.abs() })?;
        let mut qdd = KsVec::zeros();
        qdd[self.config.driven] = u_k;
        for (c, &idx) in self.free.iter().enumerate() {
            qdd[idx] = sol[c];
        }
        let y = [self.config.shoulder.rate(&qdd), self.config.elbow.rate(&qdd)];
        Ok((qdd, y))
    }

    /// Assemble the reference state: position solve at the reference crank
    /// from the configured guess, rates from the steady crank rate.
    pub fn assemble(&self) -> Result<KsState> {
        let guess = KsVec::from_column_slice(&self.config.initial_guess);
        let q = self.solve_position(self.config.reference_crank, &guess)?;
        let qd = self.consistent_rates(&q, self.config.crank_rate)?;
        Ok(KsState { q, qd })
    }

    /// Position norm of the closure violation.
    pub fn position_residual(&self, state: &KsState) -> f64 {
        self.residual(&state.q).norm()
    }

    /// Velocity-level closure violation `|Phi_q qd|`.
    pub fn velocity_residual(&self, state: &KsState) -> f64 {
        (self.jacobian(&state.q) * state.qd).norm()
    }

    /// Re-project a drifted state back onto the constraint manifold,
    /// keeping the crank angle and crank rate.
    pub fn reproject(&self, state: &KsState) -> Result<KsState> {
        let q = self.solve_position(state.q[self.config.driven], &state.q)?;
        let qd = self.consistent_rates(&q, state.qd[self.config.driven])?;
        Ok(KsState { q, qd })
    }

    /// Gait targets seen by the wing joints.
    pub fn targets(&self, state: &KsState, u_k: f64) -> Result<GaitTargets> {
        let (qdd, y) = self.velocity_accel(state, u_k)?;
        let _ = qdd;
        Ok(GaitTargets {
            q_s: self.config.shoulder.value(&state.q),
            qd_s: self.config.shoulder.rate(&state.qd),
            qdd_s: y[0],
            q_e: self.config.elbow.value(&state.q),
            qd_e: self.config.elbow.rate(&state.qd),
            qdd_e: y[1],
        })
    }

    /// Planar point of a segment at a distance along it (for rendering and
    /// diagnostics).
    pub fn segment_point(&self, q: &KsVec, seg: usize, dist: f64) -> [f64; 2] {
        let chain = &self.chains[seg];
        let mut x = chain.anchor[0];
        let mut y = chain.anchor[1];
        for k in 0..KS_COORDS {
            if chain.coeffs[k] != 0.0 {
                x += chain.coeffs[k] * q[k].cos();
                y += chain.coeffs[k] * q[k].sin();
            }
        }
        x += dist * q[seg].cos();
        y += dist * q[seg].sin();
        [x, y]
    }
}

/// Plausible default seven-link geometry: two crank-rocker stages off a
/// shared crank feed a shoulder bell-crank (links 1-3) and a lower
/// bell-crank (links 4-5) whose drag link (6) articulates the elbow arm (7)
/// riding on the shoulder arm. Ten pin joints in total. The dimensions of
/// the physical mechanism are not public; this geometry is tuned only to
/// produce flapping-like shoulder/elbow traces over a full crank revolution
/// and is flagged non-canonical in every report.
pub fn default_ks_config() -> KsConfig {
    use std::f64::consts::{FRAC_PI_2, PI};
    // Weld offsets and stage-C dimensions chosen so the elbow-loop
    // pivot-to-drive distance stays well inside the coupler's reach band
    // (margins ~0.02 m) for every crank angle.
    let delta_s = -FRAC_PI_2;
    let delta_b = -5.0 * PI / 8.0;
    let a6 = 0.05; // shoulder output arm
    let a8 = 0.04; // lower drive arm
    let d6 = 0.0396; // elbow arm
    let c9 = 0.1306; // coupler C
    KsConfig {
        segments: vec![
            // 0: crank, ground pivot at origin
            SegmentDef { base: BaseRef::Ground([0.0, 0.0]), length: 0.012 },
            // 1: coupler A, from crank tip
            SegmentDef { base: BaseRef::OnSegment { seg: 0, dist: 0.012 }, length: 0.05 },
            // 2: rocker arm of the shoulder bell-crank
            SegmentDef { base: BaseRef::Ground([0.05, 0.0]), length: 0.032 },
            // 3: coupler B, from crank tip
            SegmentDef { base: BaseRef::OnSegment { seg: 0, dist: 0.012 }, length: 0.055 },
            // 4: rocker arm of the lower bell-crank
            SegmentDef { base: BaseRef::Ground([0.01, -0.05]), length: 0.03 },
            // 5: shoulder output arm, welded to segment 2
            SegmentDef { base: BaseRef::Ground([0.05, 0.0]), length: a6 },
            // 6: elbow arm, pivoted on the shoulder arm tip
            SegmentDef { base: BaseRef::OnSegment { seg: 5, dist: a6 }, length: d6 },
            // 7: drive arm of the lower bell-crank, welded to segment 4
            SegmentDef { base: BaseRef::Ground([0.01, -0.05]), length: a8 },
            // 8: coupler C, from the drive arm tip to the elbow arm tip
            SegmentDef { base: BaseRef::OnSegment { seg: 7, dist: a8 }, length: c9 },
        ],
        constraints: vec![
            ConstraintDef::Coincide { seg_a: 1, dist_a: 0.05, seg_b: 2, dist_b: 0.032 },
            ConstraintDef::Coincide { seg_a: 3, dist_a: 0.055, seg_b: 4, dist_b: 0.03 },
            ConstraintDef::Coincide { seg_a: 8, dist_a: c9, seg_b: 6, dist_b: d6 },
            ConstraintDef::Couple { seg: 5, to: 2, offset: delta_s },
            ConstraintDef::Couple { seg: 7, to: 4, offset: delta_b },
        ],
        driven: 0,
        // Shoulder: raw arm angle spans [-0.100, 0.708]; center it on zero.
        shoulder: OutputMap { terms: vec![(5, 1.0)], offset: -0.304 },
        // Elbow: relative arm angle spans [-1.931, -0.692]; a 0.5 ratio and
        // offset put the wing-joint range at [-0.62, 0] (0 = extended).
        elbow: OutputMap { terms: vec![(6, 0.5), (5, -0.5)], offset: 0.346 },
        reference_crank: 0.0,
        initial_guess: [
            0.0, 0.6944, 1.5576, -1.0390, 0.0866, -0.0132, -1.1068, -1.8769, 0.4101,
        ],
        crank_rate: 8.0 * PI,
    }
}
