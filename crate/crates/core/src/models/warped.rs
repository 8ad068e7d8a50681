use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::odd::double_odd;
use super::{cplx, generator_ops, real_diag, small_characters, Profile};
use super::{AlgebraSample, Bump, EquivariantModel, EquivariantTriple, GeometrySummary, GridInfo, MetricData};
use crate::error::{Error, Result};
use crate::factor_check::OrbitSpaceModel;
use crate::graded_core::{inverse_sqrt_spd, spinor_rep, GradedMatrix, Parity};
use crate::sectors::{Character, SectorOperator, SectorSpace, TruncationWindow};
use crate::sparse::SparseMatrix;

/// Tⁿ × S¹ with metric Σ_j f_j(s)² dt_j² + ds², Tⁿ acting on the t factor.
///
/// n = 1 is the warped 2-torus. Spinors are written in half-density
/// coordinates ψ = (Π_j f_j)^{1/2} u, which removes the divergence term
/// Σ_j f_j′/(2f_j) from D; the remaining spin connection along the orbits is
/// ∇_{X_j} = ∂_{t_j} + (f_j′/2) Γ_j Γ_{n+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedTorusConfig {
    /// One orbit-length profile per torus direction.
    pub profiles: Vec<Profile>,
    pub n_grid: usize,
    pub window: i64,
}

#[derive(Clone, Debug)]
pub struct WarpedTorusModel {
    config: WarpedTorusConfig,
    s: Vec<f64>,
    f: Vec<Vec<f64>>,
    f_prime: Vec<Vec<f64>>,
    w: Vec<DMatrix<Complex64>>,
    h: Vec<DMatrix<Complex64>>,
    triple: EquivariantTriple,
}

impl WarpedTorusModel {
    pub fn config(&self) -> &WarpedTorusConfig {
        &self.config
    }

    /// Grid points s_i = i/N.
    pub fn grid(&self) -> &[f64] {
        &self.s
    }

    /// f_j(s_i), indexed `[i][j]`.
    pub fn profile_values(&self) -> &[Vec<f64>] {
        &self.f
    }

    pub fn profile_derivatives(&self) -> &[Vec<f64>] {
        &self.f_prime
    }

    /// Gram matrix h(s_i) of the fundamental vector fields.
    pub fn gram(&self, i: usize) -> &DMatrix<Complex64> {
        &self.h[i]
    }

    /// W(s_i) = h(s_i)^{-1/2}.
    pub fn normalisation(&self, i: usize) -> &DMatrix<Complex64> {
        &self.w[i]
    }

    /// ∇_{X_j} + iA_j, which should not depend on the sector.
    pub fn infinitesimal_generator_defect(&self, j: usize) -> Result<SectorOperator> {
        let metric = self.triple.metric.as_ref().ok_or(Error::MissingMetric)?;
        metric.connection[j].add(&self.triple.generators[j].scale(cplx(0.0, 1.0)))
    }
}

impl EquivariantModel for WarpedTorusModel {
    fn triple(&self) -> &EquivariantTriple {
        &self.triple
    }

    fn refined(&self) -> Result<Self> {
        let mut config = self.config.clone();
        config.n_grid *= 2;
        build_warped_torus(config)
    }
}

/// Periodic antisymmetric central difference on N points of spacing 1/N.
fn periodic_difference(n: usize) -> SparseMatrix {
    let c = n as f64 / 2.0;
    SparseMatrix::from_triplets(
        n,
        n,
        (0..n).flat_map(|i| [(i, (i + 1) % n, cplx(c, 0.0)), (i, (i + n - 1) % n, cplx(-c, 0.0))]),
    )
}

pub fn build_warped_torus(config: WarpedTorusConfig) -> Result<WarpedTorusModel> {
    let n = config.profiles.len();
    if n == 0 {
        return Err(Error::Config("warped torus needs at least one profile".into()));
    }
    if config.n_grid < 16 {
        return Err(Error::Config(format!("grid size N = {} must be at least 16", config.n_grid)));
    }
    if config.window < 2 {
        return Err(Error::Config(format!("window K = {} must be at least 2", config.window)));
    }
    let big_n = config.n_grid;
    let s: Vec<f64> = (0..big_n).map(|i| i as f64 / big_n as f64).collect();
    let mut f = Vec::with_capacity(big_n);
    let mut f_prime = Vec::with_capacity(big_n);
    for (i, &si) in s.iter().enumerate() {
        let row: Vec<f64> = config.profiles.iter().map(|p| p.value(si)).collect();
        if let Some(&bad) = row.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::Metric { index: i, value: bad });
        }
        f.push(row);
        f_prime.push(config.profiles.iter().map(|p| p.derivative(si)).collect::<Vec<f64>>());
    }
    let h: Vec<DMatrix<Complex64>> = f
        .iter()
        .map(|row| DMatrix::from_fn(n, n, |a, b| if a == b { cplx(row[a] * row[a], 0.0) } else { cplx(0.0, 0.0) }))
        .collect();
    let w: Vec<DMatrix<Complex64>> = h.iter().map(inverse_sqrt_spd).collect::<Result<_>>()?;
    let h_inv: Vec<DMatrix<Complex64>> = h
        .iter()
        .map(|m| m.clone().try_inverse().ok_or(Error::Spectral { eigenvalue: 0.0 }))
        .collect::<Result<_>>()?;
    let w_inv: Vec<DMatrix<Complex64>> = h.iter().zip(&w).map(|(a, b)| a * b).collect();

    let rep = spinor_rep(n + 1);
    let gamma = rep.dense();
    let fd = rep.dim();
    let graded = rep.is_graded();
    let fiber_dims = if graded { (fd / 2, fd / 2) } else { (fd, 0) };
    let dims = (fiber_dims.0 * big_n, fiber_dims.1 * big_n);
    let clifford_parity = if graded { Parity::Odd } else { Parity::Even };
    let window = TruncationWindow::new(n, config.window)?;
    let space = SectorSpace::uniform(window, dims);
    let id_fiber = DMatrix::<Complex64>::identity(fd, fd);
    let id_grid = SparseMatrix::identity(big_n);
    let delta = periodic_difference(big_n);
    let block = |fiber: &DMatrix<Complex64>, grid: &SparseMatrix, parity: Parity| {
        GradedMatrix::square(dims.0, dims.1, SparseMatrix::from_dense(fiber).kron(grid), parity)
    };
    let column = |m: &Vec<DMatrix<Complex64>>, r: usize, j: usize| -> Vec<f64> { m.iter().map(|x| x[(r, j)].re).collect() };
    let i_unit = cplx(0.0, 1.0);
    let last = &gamma[n];

    let derivative_part = block(&(last * i_unit), &delta, clifford_parity)?;
    let dirac = SectorOperator::diagonal(&space, clifford_parity, |k| {
        let mut acc = derivative_part.clone();
        for (j, g) in gamma.iter().take(n).enumerate() {
            let coeff: Vec<f64> = (0..big_n)
                .map(|i| (0..n).map(|p| w[i][(p, j)].re * 2.0 * PI * k.0[p] as f64).sum())
                .collect();
            acc = acc.add(&block(g, &real_diag(&coeff), clifford_parity)?)?;
        }
        Ok(acc)
    })?;
    let eta = (0..n)
        .map(|j| {
            let b = block(&gamma[j], &id_grid, clifford_parity)?;
            SectorOperator::diagonal(&space, clifford_parity, |_| Ok(b.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let pointwise = |values: Vec<f64>| -> Result<SectorOperator> {
        let b = block(&id_fiber, &real_diag(&values), Parity::Even)?;
        SectorOperator::diagonal(&space, Parity::Even, |_| Ok(b.clone()))
    };
    let w_ops = (0..n)
        .map(|r| (0..n).map(|j| pointwise(column(&w, r, j))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let h_inv_ops = (0..n)
        .map(|r| (0..n).map(|j| pointwise(column(&h_inv, r, j))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let clifford_flat = (0..n)
        .map(|r| {
            let mut acc = GradedMatrix::zero(dims, dims, clifford_parity);
            for q in 0..n {
                acc = acc.add(&block(&(&gamma[q] * i_unit), &real_diag(&column(&w_inv, r, q)), clifford_parity)?)?;
            }
            SectorOperator::diagonal(&space, clifford_parity, |_| Ok(acc.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let connection = (0..n)
        .map(|j| {
            let half_fp: Vec<f64> = f_prime.iter().map(|row| row[j] / 2.0).collect();
            let endo = block(&(&gamma[j] * last), &real_diag(&half_fp), Parity::Even)?;
            SectorOperator::diagonal(&space, Parity::Even, |k| {
                let orbit = block(&id_fiber, &id_grid, Parity::Even)?.scale(cplx(0.0, -2.0 * PI * k.0[j] as f64));
                orbit.add(&endo)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let generators = generator_ops(&space)?;

    let mut orbit = OrbitSpaceModel::circle("(0,1)");
    for k in window.characters() {
        orbit.set_full_support(k);
    }
    let bumps: Vec<Bump> = [0.2, 0.5, 0.8]
        .iter()
        .map(|&c| Bump {
            center: c,
            half_width: 0.15,
            periodic: true,
        })
        .collect();
    let bump_block = |b: &Bump| block(&id_fiber, &real_diag(&s.iter().map(|&x| b.value(x)).collect::<Vec<_>>()), Parity::Even);
    let zero = Character::zero(n);
    let fixed_point_samples = bumps
        .iter()
        .map(|b| {
            let blk = bump_block(b)?;
            Ok(AlgebraSample {
                label: format!("bump@{}", b.center),
                shift: zero.clone(),
                bump: Some(*b),
                op: SectorOperator::diagonal(&space, Parity::Even, |_| Ok(blk.clone()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut algebra_samples = Vec::new();
    for b in &bumps {
        let blk = bump_block(b)?;
        for mu in small_characters(&space, 2) {
            algebra_samples.push(AlgebraSample {
                label: format!("bump@{}·chi[{}]", b.center, mu),
                op: SectorOperator::shifted(&space, &mu, Parity::Even, |_| Ok(Some(blk.clone())))?,
                shift: mu,
                bump: Some(*b),
            });
        }
    }

    let w_min_eigenvalue = w
        .iter()
        .map(|m| m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min);
    let w_sup_entry = w.iter().map(|m| m.iter().map(|x| x.norm()).fold(0.0, f64::max)).fold(0.0, f64::max);
    let endomorphism_sup = (0..n)
        .map(|j| {
            (0..big_n)
                .map(|i| (0..n).map(|p| w[i][(p, j)].norm() * f_prime[i][p].abs() / 2.0).sum::<f64>())
                .fold(0.0, f64::max)
        })
        .collect();
    let orbit_defect = f.iter().map(|row| row.iter().map(|v| 1.0 - 1.0 / v).collect()).collect();

    let mut metadata = BTreeMap::new();
    metadata.insert(
        "profiles".into(),
        config.profiles.iter().map(|p| p.label()).collect::<Vec<_>>().join("; "),
    );
    metadata.insert(
        "connection_term".into(),
        "∇_{X_j} = ∂_{t_j} + (f_j′/2)Γ_jΓ_{n+1}; divergence term Σ f_j′/(2f_j) absorbed by the half-density unitary".into(),
    );
    metadata.insert("dirac".into(), "D_k = Σ_j (Σ_p W^{pj} 2πk_p)Γ_j + iΓ_{n+1}δ_s".into());
    let triple = EquivariantTriple {
        label: format!("warped_torus(n={n})"),
        dirac,
        eta,
        generators,
        metric: Some(MetricData {
            w: w_ops,
            h_inverse: h_inv_ops,
            clifford_flat,
            connection,
        }),
        geometry: Some(GeometrySummary {
            w_min_eigenvalue,
            w_sup_entry,
            endomorphism_sup,
            orbit_defect,
        }),
        orbit,
        fixed_point_samples,
        algebra_samples,
        grid: Some(GridInfo {
            points: big_n,
            spacing: 1.0 / big_n as f64,
            margin: None,
        }),
        metadata,
        space,
    };
    let triple = if graded { triple } else { double_odd(&triple)? };
    Ok(WarpedTorusModel {
        config,
        s,
        f,
        f_prime,
        w,
        h,
        triple,
    })
}
