//! Exact discrete properties of the coupling operators and the convergence
//! study of the lumped force projection.
//!
//! Every check works on frozen fields, without the fluid solver, and is
//! seeded so reruns are identical.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coupling::{
    grid_moments, interpolate, project_velocity, spread_density, spread_load, Interaction, Kernel, Scheme,
    StencilPolicy,
};
use crate::error::Result;
use crate::grid::{MacGrid, StaggeredField};
use crate::linalg::{Mat2, Vec2};
use crate::mechanics::assembly::{body_load, stress_load};
use crate::mechanics::{MassOperator, Material, PointTable};
use crate::mesh::{ElementKind, StructuralMesh};
use crate::quadrature::{
    adaptive_rule, consistent_rule, higher_order_rule, nodal_rule, AdaptiveSettings, MeshQuadrature, NodalWeights,
    QuadratureFamily, Site,
};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Outcome of one check. `value` is the measured quantity and `tolerance`
/// the bound it is compared against; `passed` already accounts for the
/// direction of the comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value >= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.3e} (bound {:.1e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance,
            self.detail
        )
    }
}

const ELEMENTS: [ElementKind; 4] = [ElementKind::P1, ElementKind::Q1, ElementKind::P2, ElementKind::Q2];

/// Unit grid with `n` cells per side.
fn unit_grid(n: usize) -> MacGrid {
    MacGrid::new(n, n, 1.0 / n as f64, [0.0, 0.0])
}

/// A `nx × nx` mesh of `[0.3, 0.7]²` and a random smooth deformation that
/// keeps it well inside the unit square.
fn deformed_patch(kind: ElementKind, nx: usize, rng: &mut ChaCha8Rng) -> Result<(StructuralMesh, Vec<Vec2>)> {
    let mesh = StructuralMesh::block([0.3, 0.3], 0.4, 0.4, nx, nx, kind)?;
    let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-0.05..0.05));
    let shift = [rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02)];
    let chi = mesh
        .nodes()
        .iter()
        .map(|x| {
            let (s, c) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).cos());
            [
                x[0] + shift[0] + a[0] * s * c + a[1] * (x[1] - 0.5) + a[2] * x[0] * x[1],
                x[1] + shift[1] + a[3] * c + a[4] * (x[0] - 0.5) + a[5] * s * s,
            ]
        })
        .collect();
    Ok((mesh, chi))
}

/// Elastic load of a random neo-Hookean material plus a random body force,
/// so that `1ᵀL ≠ 0`.
fn random_load(mesh: &StructuralMesh, chi: &[Vec2], rng: &mut ChaCha8Rng) -> Result<Vec<Vec2>> {
    let table = PointTable::new(mesh, &consistent_rule(mesh)?)?;
    let material = Material::ModifiedNeoHookean {
        g: rng.gen_range(1.0..10.0),
        kappa_stab: rng.gen_range(1.0..50.0),
    };
    let mut load = stress_load(mesh, &table, chi, |e, _, f| material.pk1(f, e))?;
    let b: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
    let zero = vec![[0.0; 2]; chi.len()];
    let body = body_load(mesh, &table, chi, &zero, |x, _, _| [b[0] + b[1] * x[1], b[2] + b[3] * x[0]]);
    for (l, v) in load.iter_mut().zip(body) {
        l[0] += v[0];
        l[1] += v[1];
    }
    Ok(load)
}

/// Nodal rule with the given per-node weights.
fn weighted_nodes(mesh: &StructuralMesh, weights: &[f64]) -> MeshQuadrature {
    MeshQuadrature {
        family: QuadratureFamily::Nodal,
        points: weights
            .iter()
            .enumerate()
            .map(|(n, &w)| crate::quadrature::QuadPoint {
                site: Site::Node(n),
                position: mesh.nodes()[n],
                weight: w,
            })
            .collect(),
    }
}

fn rel_diff(a: &StaggeredField, b: &StaggeredField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.max_abs() / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

/// Nodal coupling produces the same Eulerian force for any two strictly
/// positive lumped diagonals `D`: spreading `D (D⁻¹ L)` is spreading `L`.
pub fn nodal_weight_invariance(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = unit_grid(16);
    let (mesh, chi) = deformed_patch(ElementKind::P2, 2, &mut rng)?;
    let load = random_load(&mesh, &chi, &mut rng)?;
    let mut worst: f64 = 0.0;
    for kernel in Kernel::ALL {
        let mut fields = Vec::new();
        for _ in 0..2 {
            let d: Vec<f64> = (0..mesh.node_count()).map(|_| rng.gen_range(1e-3..10.0)).collect();
            let mass = MassOperator::from_diagonal(d.clone())?;
            let (force, _) = mass.solve(&load)?;
            let pts = Interaction::from_rule(&mesh, weighted_nodes(&mesh, &d), &chi)?;
            fields.push(spread_density(&grid, kernel, StencilPolicy::Strict, &mesh, &pts, &force)?);
        }
        worst = worst.max(rel_diff(&fields[0], &fields[1]));
    }
    Ok(Check::at_most(
        "nodal weight invariance",
        worst,
        1e-13,
        "16x16 grid, 2x2 P2 mesh, two random diagonals, both kernels",
    ))
}

/// Spread force of a configuration under one coupling pairing.
fn coupled_force(
    grid: &MacGrid,
    scheme: Scheme,
    kernel: Kernel,
    mesh: &StructuralMesh,
    chi: &[Vec2],
    load: &[Vec2],
) -> Result<StaggeredField> {
    match scheme {
        Scheme::Nodal => spread_load(grid, kernel, StencilPolicy::Strict, chi, load),
        Scheme::Elemental => {
            let mass = MassOperator::consistent(mesh, &consistent_rule(mesh)?)?;
            let (force, _) = mass.solve(load)?;
            let pts = Interaction::from_rule(mesh, adaptive_rule(mesh, chi, grid.dx, &AdaptiveSettings::default())?, chi)?;
            spread_density(grid, kernel, StencilPolicy::Strict, mesh, &pts, &force)
        }
    }
}

/// Relative zeroth and first moment errors `|Σ Δx² f − 1ᵀL| / |1ᵀL|` and
/// `|Σ Δx² f·x − Σ χ_i·L_i| / |Σ χ_i·L_i|`.
fn moment_errors(grid: &MacGrid, f: &StaggeredField, load: &[Vec2], chi: &[Vec2]) -> (f64, f64) {
    let (total, first) = grid_moments(grid, f);
    let t: Vec2 = load.iter().fold([0.0; 2], |a, l| [a[0] + l[0], a[1] + l[1]]);
    let m: f64 = load.iter().zip(chi).map(|(l, x)| l[0] * x[0] + l[1] * x[1]).sum();
    ((total[0] - t[0]).hypot(total[1] - t[1]) / t[0].hypot(t[1]), (first - m).abs() / m.abs())
}

/// Total force and torque-like first moment are preserved by matched
/// pairings: nodal spreading of `L`, elemental spreading of `M⁻¹L`.
pub fn force_conservation(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = unit_grid(32);
    let mut out = Vec::new();
    for scheme in Scheme::ALL {
        for kernel in Kernel::ALL {
            for kind in ELEMENTS {
                let (mesh, chi) = deformed_patch(kind, 3, &mut rng)?;
                let load = random_load(&mesh, &chi, &mut rng)?;
                let f = coupled_force(&grid, scheme, kernel, &mesh, &chi, &load)?;
                let (e0, e1) = moment_errors(&grid, &f, &load, &chi);
                out.push(Check::at_most(
                    format!("conservation {scheme}/{kernel}/{kind}"),
                    e0.max(e1),
                    1e-10,
                    format!("zeroth {e0:.2e}, first {e1:.2e}"),
                ));
            }
        }
    }
    Ok(out)
}

/// Nodal spreading of a force projected with the consistent mass, rescaled
/// by the lumped weights. The pairing is mismatched, so the spread force
/// does not sum to `1ᵀL`; the check passes when the violation is at least
/// `1e-6`.
pub fn mismatched_pairing_violates(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = unit_grid(32);
    let (mesh, chi) = deformed_patch(ElementKind::P2, 3, &mut rng)?;
    let load = random_load(&mesh, &chi, &mut rng)?;
    let consistent = MassOperator::consistent(&mesh, &consistent_rule(&mesh)?)?;
    let (force, _) = consistent.solve(&load)?;
    let nodal = nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?;
    let scaled: Vec<Vec2> = force
        .iter()
        .zip(&nodal.points)
        .map(|(f, p)| [f[0] * p.weight, f[1] * p.weight])
        .collect();
    let f = spread_load(&grid, Kernel::BSpline3, StencilPolicy::Strict, &chi, &scaled)?;
    let (e0, _) = moment_errors(&grid, &f, &load, &chi);
    Ok(Check::at_least(
        "mismatched pairing violates conservation",
        e0,
        1e-6,
        "nodal spreading of D M⁻¹ L, P2 mesh",
    ))
}

/// `Σ_i φ(i − s) = 1` and `Σ_i (i − s) φ(i − s) = 0` at random shifts.
pub fn kernel_moments(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for kernel in Kernel::ALL {
        for _ in 0..64 {
            let s = rng.gen_range(-10.0..10.0);
            let (m0, m1) = kernel.moments(s, kernel.radius());
            worst = worst.max((m0 - 1.0).abs()).max(m1.abs());
        }
    }
    Check::at_most("kernel moments", worst, 1e-13, "64 random shifts, both kernels")
}

/// Truncating the three-point B-spline to radius one breaks the moment
/// conditions; passes when the violation is at least `1e-3`.
pub fn truncated_kernel_violates(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..64 {
        let s = rng.gen_range(-10.0..10.0);
        let (m0, m1) = Kernel::BSpline3.moments(s, 1.0);
        worst = worst.max((m0 - 1.0).abs()).max(m1.abs());
    }
    Check::at_least("truncated kernel violates moments", worst, 1e-3, "B-spline support cut to one cell")
}

fn random_field(grid: &MacGrid, rng: &mut ChaCha8Rng) -> StaggeredField {
    let mut u = StaggeredField::zeros(grid);
    u.u.iter_mut().chain(u.v.iter_mut()).for_each(|v| *v = rng.gen_range(-1.0..1.0));
    u
}

/// `⟨S F, u⟩_grid = ⟨F, J u⟩_Lagrangian` with the same points and weights on
/// both sides.
pub fn adjointness(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = unit_grid(24);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let kind = ELEMENTS[trial % 4];
        let kernel = Kernel::ALL[(trial / 4) % 2];
        let scheme = Scheme::ALL[(trial / 2) % 2];
        let (mesh, chi) = deformed_patch(kind, 2, &mut rng)?;
        let pts = match scheme {
            Scheme::Nodal => Interaction::nodal(&mesh, &nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?, &chi)?,
            Scheme::Elemental => Interaction::adaptive(&mesh, &chi, grid.dx, &AdaptiveSettings::default())?,
        };
        let force: Vec<Vec2> = (0..mesh.node_count())
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let u = random_field(&grid, &mut rng);
        let f = spread_density(&grid, kernel, StencilPolicy::Strict, &mesh, &pts, &force)?;
        let lhs = f.dot(&u) * grid.dx * grid.dx;
        let uib = interpolate(&grid, kernel, StencilPolicy::Strict, &u, &pts.positions)?;
        let rhs: f64 = pts
            .sample(&mesh, &force)
            .iter()
            .zip(&uib)
            .zip(&pts.rule.points)
            .map(|((a, b), p)| (a[0] * b[0] + a[1] * b[1]) * p.weight)
            .sum();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    Ok(Check::at_most("spread/interpolate adjointness", worst, 1e-12, "20 random trials"))
}

/// With nodal interaction points and the lumped mass, the velocity
/// projection returns the interpolated nodal velocities bit for bit.
pub fn nodal_projection_identity(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = unit_grid(24);
    let mut mismatches = 0usize;
    for kind in ELEMENTS {
        for kernel in Kernel::ALL {
            let (mesh, chi) = deformed_patch(kind, 3, &mut rng)?;
            let rule = nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?;
            let mass = MassOperator::lumped(&rule)?;
            let pts = Interaction::nodal(&mesh, &rule, &chi)?;
            let u = random_field(&grid, &mut rng);
            let uib = interpolate(&grid, kernel, StencilPolicy::Strict, &u, &pts.positions)?;
            let (vel, its) = project_velocity(&mesh, &pts, &uib, &mass)?;
            let direct = interpolate(&grid, kernel, StencilPolicy::Strict, &u, &chi)?;
            mismatches += vel.iter().zip(&direct).filter(|(a, b)| a != b).count() + its;
        }
    }
    Ok(Check::at_most(
        "nodal projection identity",
        mismatches as f64,
        0.0,
        "entries differing from nodal interpolation",
    ))
}

/// Manufactured first Piola–Kirchhoff stress `A sin(πX) sin(πY)`, which
/// vanishes on the boundary of the unit square.
const STRESS_AMPLITUDE: Mat2 = [[1.0, 0.5], [-0.3, 2.0]];

fn manufactured_divergence(x: Vec2) -> Vec2 {
    let a = STRESS_AMPLITUDE;
    let (sx, cx) = (PI * x[0]).sin_cos();
    let (sy, cy) = (PI * x[1]).sin_cos();
    [
        PI * (a[0][0] * cx * sy + a[0][1] * sx * cy),
        PI * (a[1][0] * cx * sy + a[1][1] * sx * cy),
    ]
}

/// One level of the force-projection study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionLevel {
    pub cells: usize,
    pub dx_structure: f64,
    pub dofs: usize,
    /// Largest `|F_i − ∇·P(X_i)|` over interior nodes.
    pub error: f64,
}

/// Lumped projection `F = D⁻¹ L` of the weak divergence of the manufactured
/// stress on P1 meshes of the unit square with `cells` cells per side.
pub fn force_projection_level(cells: usize) -> Result<ProjectionLevel> {
    let mesh = StructuralMesh::block([0.0, 0.0], 1.0, 1.0, cells, cells, ElementKind::P1)?;
    let table = PointTable::new(&mesh, &higher_order_rule(&mesh)?)?;
    let chi = mesh.nodes().to_vec();
    let load = stress_load(&mesh, &table, &chi, |_, x, _| {
        let s = (PI * x[0]).sin() * (PI * x[1]).sin();
        let a = STRESS_AMPLITUDE;
        Ok([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    })?;
    let mass = MassOperator::lumped(&nodal_rule(&mesh, NodalWeights::CompositeTrapezoid)?)?;
    let (force, _) = mass.solve(&load)?;
    let boundary = mesh.boundary_node_flags();
    let error = mesh
        .nodes()
        .iter()
        .zip(&force)
        .zip(boundary)
        .filter(|(_, &b)| !b)
        .map(|((x, f), _)| {
            let e = manufactured_divergence(*x);
            (f[0] - e[0]).hypot(f[1] - e[1])
        })
        .fold(0.0, f64::max);
    Ok(ProjectionLevel {
        cells,
        dx_structure: mesh.longest_edge(),
        dofs: mesh.dof_count(),
        error,
    })
}

/// Errors at each refinement and the observed orders between successive
/// levels.
pub fn force_projection_study(cells: &[usize]) -> Result<(Vec<ProjectionLevel>, Vec<f64>)> {
    let levels: Vec<ProjectionLevel> = cells.iter().map(|&c| force_projection_level(c)).collect::<Result<_>>()?;
    let orders = levels
        .windows(2)
        .map(|w| (w[0].error / w[1].error).ln() / (w[0].dx_structure / w[1].dx_structure).ln())
        .collect();
    Ok((levels, orders))
}

/// Observed order over three halvings of the mesh is at least `0.9`.
pub fn force_projection_convergence() -> Result<Check> {
    let (levels, orders) = force_projection_study(&[8, 16, 32])?;
    let worst = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let errs: Vec<String> = levels.iter().map(|l| format!("{:.3e}", l.error)).collect();
    Ok(Check::at_least(
        "lumped force projection order",
        worst,
        0.9,
        format!("errors [{}]", errs.join(", ")),
    ))
}

/// The full suite in a fixed order.
pub fn run_suite(seed: u64) -> Result<Vec<Check>> {
    let mut out = vec![nodal_weight_invariance(seed)?];
    out.extend(force_conservation(seed)?);
    out.push(mismatched_pairing_violates(seed)?);
    out.push(kernel_moments(seed));
    out.push(truncated_kernel_violates(seed));
    out.push(adjointness(seed)?);
    out.push(nodal_projection_identity(seed)?);
    out.push(force_projection_convergence()?);
    Ok(out)
}
