use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::{cplx, generator_ops, real_diag};
use super::{AlgebraSample, Bump, EquivariantModel, EquivariantTriple, GridInfo, MetricData};
use crate::error::{Error, Result};
use crate::factor_check::OrbitSpaceModel;
use crate::graded_core::{GradedMatrix, Parity};
use crate::sectors::{Character, SectorOperator, SectorSpace, TruncationWindow};
use crate::sparse::SparseMatrix;

/// Round S² with the lift V_k of the rotation action, φ kept exactly through
/// the sector decomposition and θ sampled on N − 1 interior nodes of
/// [margin, π − margin] with Dirichlet ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereConfig {
    pub k_lift: i64,
    pub n_grid: usize,
    pub window: i64,
    pub margin: f64,
    /// Keep the poles in the orbit space (the algebra C(S²) instead of C_c(S² ∖ {N,S})).
    pub poles: bool,
}

/// Sector m holds (f(θ)e^{i(k−m)φ}, g(θ)e^{i(k−m−1)φ}), stored in the
/// reduced coordinates (u, v) = √sinθ·(i f, g), where the Dirac operator is
/// T_m = −iδ_θ⊗ω − (k − m − ½) cscθ ⊗ c.
#[derive(Clone, Debug)]
pub struct SphereModel {
    config: SphereConfig,
    theta: Vec<f64>,
    spacing: f64,
    triple: EquivariantTriple,
}

fn csc(t: f64) -> f64 {
    1.0 / libm::sin(t)
}

impl SphereModel {
    pub fn config(&self) -> &SphereConfig {
        &self.config
    }

    /// Interior nodes θ_1..θ_{N−1}.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    fn points(&self) -> usize {
        self.theta.len()
    }

    /// Antisymmetric central difference with zero boundary values.
    pub fn difference(&self) -> SparseMatrix {
        let p = self.points();
        let c = 1.0 / (2.0 * self.spacing);
        SparseMatrix::from_triplets(
            p,
            p,
            (0..p).flat_map(|i| {
                let mut t = Vec::with_capacity(2);
                if i + 1 < p {
                    t.push((i, i + 1, cplx(c, 0.0)));
                }
                if i > 0 {
                    t.push((i, i - 1, cplx(-c, 0.0)));
                }
                t
            }),
        )
    }

    /// T_m, assembled directly from the reduced formula.
    pub fn reduced_block(&self, m: i64) -> Result<GradedMatrix> {
        reduced_block(&self.theta, &self.difference(), self.config.k_lift, m)
    }

    /// The polar Dirac operator on sector m acting on (f, g), unconjugated.
    pub fn polar_block(&self, m: i64) -> SparseMatrix {
        let p = self.points();
        let k = self.config.k_lift as f64;
        let m = m as f64;
        let delta = self.difference();
        let half_cot: Vec<f64> = self.theta.iter().map(|t| 0.5 / libm::tan(t / 2.0)).collect();
        let upper_diag: Vec<f64> = self
            .theta
            .iter()
            .zip(&half_cot)
            .map(|(t, h)| (k - m - 1.0) * csc(*t) + h)
            .collect();
        let lower_diag: Vec<f64> = self
            .theta
            .iter()
            .zip(&half_cot)
            .map(|(t, h)| -(k - m) * csc(*t) + h)
            .collect();
        let i = cplx(0.0, 1.0);
        let upper = delta.add(&real_diag(&upper_diag)).expect("same shape").scale(i);
        let lower = delta.add(&real_diag(&lower_diag)).expect("same shape").scale(i);
        SparseMatrix::block(&[p, p], &[p, p], &[(0, 1, &upper), (1, 0, &lower)])
    }

    /// F(f, g) = √sinθ·(i f, g), laid out as [u; v].
    pub fn to_reduced(&self, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let s: Vec<f64> = self.theta.iter().map(|t| libm::sqrt(libm::sin(*t))).collect();
        let mut out: Vec<Complex64> = f.iter().zip(&s).map(|(x, r)| x * cplx(0.0, *r)).collect();
        out.extend(g.iter().zip(&s).map(|(x, r)| x * r));
        out
    }

    pub fn from_reduced(&self, uv: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let p = self.points();
        let s: Vec<f64> = self.theta.iter().map(|t| libm::sqrt(libm::sin(*t))).collect();
        let f = uv[..p].iter().zip(&s).map(|(u, r)| u * cplx(0.0, -1.0 / r)).collect();
        let g = uv[p..].iter().zip(&s).map(|(v, r)| v / r).collect();
        (f, g)
    }

    /// Discrete L²(dθ) norm of F∘D_polar∘F⁻¹(u,v) − T_m(u,v).
    pub fn assembly_defect(&self, m: i64, uv: &[Complex64]) -> Result<f64> {
        let p = self.points();
        if uv.len() != 2 * p {
            return Err(Error::Dimension {
                context: "sphere test vector",
                expected: 2 * p,
                found: uv.len(),
            });
        }
        let (f, g) = self.from_reduced(uv);
        let mut fg = f;
        fg.extend(g);
        let polar = self.polar_block(m).mul_vec(&fg);
        let conj = self.to_reduced(&polar[..p], &polar[p..]);
        let direct = self.reduced_block(m)?.entries().mul_vec(uv);
        let sq: f64 = conj.iter().zip(&direct).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(libm::sqrt(sq * self.spacing))
    }

    /// ⟨Dξ, Mξ⟩ + ⟨Mξ, Dξ⟩ for ξ = (f e^{i(k−m)φ}, g e^{i(k−m−1)φ}) with
    /// M = 2π(m − ℓ)·i·η(c(dt)), integrated against sinθ dθ dφ using the
    /// polar assembly. Returns the form and ∫(|f|² + |g|²)dθ.
    pub fn polar_quadratic_form(&self, m: i64, ell: i64, f: &[Complex64], g: &[Complex64]) -> Result<(f64, f64)> {
        let p = self.points();
        if f.len() != p || g.len() != p {
            return Err(Error::Dimension {
                context: "sphere test pair",
                expected: p,
                found: f.len().min(g.len()),
            });
        }
        let mut fg = f.to_vec();
        fg.extend_from_slice(g);
        let d = self.polar_block(m).mul_vec(&fg);
        let n = 2.0 * PI * (m - ell) as f64;
        let i = cplx(0.0, 1.0);
        let mut form = 0.0;
        for j in 0..p {
            let w = libm::sin(self.theta[j]) * self.spacing;
            let mf = -i * g[j] * n;
            let mg = i * f[j] * n;
            form += 2.0 * w * (d[j].conj() * mf + d[p + j].conj() * mg).re;
        }
        let l2 = f.iter().chain(g).map(|x| x.norm_sqr()).sum::<f64>() * self.spacing;
        Ok((form, l2))
    }

    /// Multiplication by b(θ)e^{−ijφ}, a shift-j operator.
    pub fn bump_sample(&self, bump: Bump, j: i64) -> Result<AlgebraSample> {
        let values: Vec<f64> = self.theta.iter().map(|t| bump.value(*t)).collect();
        let p = self.points();
        let diag: Vec<f64> = values.iter().chain(values.iter()).copied().collect();
        let blk = GradedMatrix::square(p, p, real_diag(&diag), Parity::Even)?;
        let shift = Character::new(&[j]);
        Ok(AlgebraSample {
            label: format!("bump@{:.4}·chi[{j}]", bump.center),
            op: SectorOperator::shifted(&self.triple.space, &shift, Parity::Even, |_| Ok(Some(blk.clone())))?,
            shift,
            bump: Some(bump),
        })
    }
}

fn reduced_block(theta: &[f64], delta: &SparseMatrix, k: i64, m: i64) -> Result<GradedMatrix> {
    let p = theta.len();
    let alpha = (k - m) as f64 - 0.5;
    let c: Vec<f64> = theta.iter().map(|t| -alpha * csc(*t)).collect();
    let cd = real_diag(&c);
    let upper = cd.sub(delta)?;
    let lower = cd.add(delta)?;
    GradedMatrix::square(p, p, SparseMatrix::block(&[p, p], &[p, p], &[(0, 1, &upper), (1, 0, &lower)]), Parity::Odd)
}

impl EquivariantModel for SphereModel {
    fn triple(&self) -> &EquivariantTriple {
        &self.triple
    }

    fn refined(&self) -> Result<Self> {
        build_sphere(SphereConfig {
            n_grid: self.config.n_grid * 2,
            margin: self.config.margin / 2.0,
            ..self.config
        })
    }

    /// sup_θ |cscθ·(2j + 2ζ − 2k + 1)·b(θ)| on a fine grid over the bump support.
    fn analytic_condition2(&self, sample: &AlgebraSample, zeta: &Character, generator: usize) -> Option<f64> {
        let bump = sample.bump?;
        if generator != 0 {
            return None;
        }
        let coeff = (2 * (sample.shift.0[0] + zeta.0[0]) - 2 * self.config.k_lift + 1) as f64;
        let (lo, hi) = bump.support();
        let lo = lo.max(1e-12);
        let hi = hi.min(PI - 1e-12);
        let steps = 20_000;
        let sup = (0..=steps)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / steps as f64;
                (coeff * csc(t) * bump.value(t)).abs()
            })
            .fold(0.0, f64::max);
        Some(sup)
    }
}

pub fn build_sphere(config: SphereConfig) -> Result<SphereModel> {
    if config.n_grid < 64 {
        return Err(Error::Config(format!("grid size N = {} must be at least 64", config.n_grid)));
    }
    if config.window < 2 {
        return Err(Error::Config(format!("window K = {} must be at least 2", config.window)));
    }
    if !(config.margin > 0.0 && config.margin < PI / 8.0) {
        return Err(Error::Config(format!("margin {} must lie in (0, π/8)", config.margin)));
    }
    let spacing = (PI - 2.0 * config.margin) / config.n_grid as f64;
    if config.margin < spacing {
        return Err(Error::Config(format!(
            "margin {} is smaller than the grid spacing {spacing:.3e}",
            config.margin
        )));
    }
    let theta: Vec<f64> = (1..config.n_grid).map(|i| config.margin + i as f64 * spacing).collect();
    let p = theta.len();
    let window = TruncationWindow::new(1, config.window)?;
    let space = SectorSpace::uniform(window, (p, p));
    let k = config.k_lift;

    let c = 1.0 / (2.0 * spacing);
    let delta = SparseMatrix::from_triplets(
        p,
        p,
        (0..p).flat_map(|i| {
            let mut t = Vec::with_capacity(2);
            if i + 1 < p {
                t.push((i, i + 1, cplx(c, 0.0)));
            }
            if i > 0 {
                t.push((i, i - 1, cplx(-c, 0.0)));
            }
            t
        }),
    );
    let dirac = SectorOperator::diagonal(&space, Parity::Odd, |m| reduced_block(&theta, &delta, k, m.0[0]))?;

    let id = SparseMatrix::identity(p);
    let swap = SparseMatrix::block(&[p, p], &[p, p], &[(0, 1, &id), (1, 0, &id)]);
    let e = GradedMatrix::square(p, p, swap, Parity::Odd)?;
    let eta = alloc::vec![SectorOperator::diagonal(&space, Parity::Odd, |_| Ok(e.clone()))?];
    let generators = generator_ops(&space)?;

    let doubled = |values: &[f64]| -> Vec<f64> { values.iter().chain(values.iter()).copied().collect() };
    let diag_op = |values: Vec<f64>| -> Result<SectorOperator> {
        let b = GradedMatrix::square(p, p, real_diag(&doubled(&values)), Parity::Even)?;
        SectorOperator::diagonal(&space, Parity::Even, |_| Ok(b.clone()))
    };
    let w = diag_op(theta.iter().map(|t| csc(*t)).collect())?;
    let h_inv = diag_op(theta.iter().map(|t| csc(*t) * csc(*t)).collect())?;
    let sin_e = {
        let s: Vec<f64> = theta.iter().map(|t| libm::sin(*t)).collect();
        let b = GradedMatrix::square(p, p, real_diag(&doubled(&s)), Parity::Even)?
            .mul(&e)?
            .scale(cplx(0.0, 1.0));
        SectorOperator::diagonal(&space, Parity::Odd, |_| Ok(b.clone()))?
    };
    let connection = SectorOperator::diagonal(&space, Parity::Even, |m| {
        let up = 2.0 * PI * (k - m.0[0]) as f64;
        let down = 2.0 * PI * (k - m.0[0] - 1) as f64;
        let d: Vec<Complex64> = (0..2 * p).map(|i| cplx(0.0, if i < p { up } else { down })).collect();
        GradedMatrix::square(p, p, SparseMatrix::from_diagonal(&d), Parity::Even)
    })?;

    let mut orbit = if config.poles {
        OrbitSpaceModel::closed_interval("N", "(0,π)", "S")
    } else {
        OrbitSpaceModel::open_interval("(0,π)")
    };
    for chi in window.characters() {
        if config.poles && !chi.is_zero() {
            orbit.set_open_support(chi);
        } else {
            orbit.set_full_support(chi);
        }
    }

    let bumps: Vec<Bump> = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]
        .iter()
        .map(|&center| Bump {
            center,
            half_width: PI / 8.0,
            periodic: false,
        })
        .collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("k_lift".into(), format!("{k}"));
    metadata.insert("reduced".into(), "T_m = −iδ_θ⊗ω − (k − m − 1/2)cscθ⊗c on (u,v) = √sinθ(if, g)".into());
    metadata.insert("eta".into(), "E = i·η(c(dt)) = ((0,1),(1,0)) in reduced coordinates".into());
    metadata.insert("connection_term".into(), "orbit derivative in the U_N trivialisation; spin-connection endomorphism omitted".into());
    metadata.insert("orbit_space".into(), if config.poles { "[0,π]" } else { "(0,π)" }.into());

    let mut model = SphereModel {
        config,
        theta,
        spacing,
        triple: EquivariantTriple {
            label: format!("sphere(k={k})"),
            space: space.clone(),
            dirac,
            eta,
            generators,
            metric: Some(MetricData {
                w: alloc::vec![alloc::vec![w]],
                h_inverse: alloc::vec![alloc::vec![h_inv]],
                clifford_flat: alloc::vec![sin_e],
                connection: alloc::vec![connection],
            }),
            geometry: None,
            orbit,
            fixed_point_samples: Vec::new(),
            algebra_samples: Vec::new(),
            grid: Some(GridInfo {
                points: config.n_grid,
                spacing,
                margin: Some(config.margin),
            }),
            metadata,
        },
    };
    let mut fixed = Vec::new();
    let mut samples = Vec::new();
    for b in &bumps {
        fixed.push(model.bump_sample(*b, 0)?);
        for j in -2..=2 {
            samples.push(model.bump_sample(*b, j)?);
        }
    }
    model.triple.fixed_point_samples = fixed;
    model.triple.algebra_samples = samples;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(k: i64, n: usize) -> SphereModel {
        build_sphere(SphereConfig {
            k_lift: k,
            n_grid: n,
            window: 4,
            margin: 0.05,
            poles: false,
        })
        .unwrap()
    }

    #[test]
    fn reduced_block_is_self_adjoint() {
        let s = sphere(1, 64);
        assert!(s.triple().dirac.self_adjoint_defect().unwrap() < 1e-12);
    }

    #[test]
    fn anticommutator_with_eta_is_csc_multiple() {
        let s = sphere(2, 64);
        let e = s.triple().eta[0].restrict_to_sector(&Character::new(&[1])).unwrap();
        let t = s.reduced_block(1).unwrap();
        let z = crate::graded_core::graded_commutator(&t, &e).unwrap();
        // (2m − 2k + 1) csc θ with m = 1, k = 2
        for (i, th) in s.theta().iter().enumerate() {
            assert!((z.entries().get(i, i).re + csc(*th)).abs() < 1e-9);
        }
    }

    #[test]
    fn reduction_is_unitary() {
        let s = sphere(0, 64);
        let f: Vec<Complex64> = s.theta().iter().map(|t| cplx(libm::sin(3.0 * t), 0.2)).collect();
        let g: Vec<Complex64> = s.theta().iter().map(|t| cplx(0.0, libm::cos(*t))).collect();
        let (f2, g2) = s.from_reduced(&s.to_reduced(&f, &g));
        for (a, b) in f.iter().zip(&f2).chain(g.iter().zip(&g2)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        let base = SphereConfig {
            k_lift: 0,
            n_grid: 64,
            window: 3,
            margin: 0.05,
            poles: false,
        };
        assert!(build_sphere(SphereConfig { n_grid: 32, ..base }).is_err());
        assert!(build_sphere(SphereConfig { margin: 0.5, ..base }).is_err());
        assert!(build_sphere(SphereConfig { margin: 0.01, ..base }).is_err());
        assert!(build_sphere(SphereConfig { window: 1, ..base }).is_err());
    }
}
