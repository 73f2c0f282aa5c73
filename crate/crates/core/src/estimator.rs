//! Residual error indicators
//! `eta(T)^2 = h_T^2 ||f - kappa^2 u + Lap u||_T^2 + h_T ||[du/dn]||^2_{dT minus physical boundary}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{ActiveMesh, ElemId, FaceKind};
use crate::problems::CoefficientField;
use crate::quadrature::{gauss_legendre, triangle_rule, MAX_TRIANGLE_DEGREE};
use crate::space::{physical_gradient, physical_laplacian, DofMap, LagrangeBasis};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EstimatorOptions {
    /// Quadrature degree for the volume residual; default `max(2p + 2, 8)`.
    pub volume_degree: Option<usize>,
    /// Degree `q` of the projection in the oscillation term; default `p`.
    pub oscillation_degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField {
    /// `h_T^2 ||f - kappa^2 u + Lap u||_T^2` per active element.
    pub volume: Vec<f64>,
    /// `h_T` times the sum of the squared face jumps over the non-physical faces.
    pub jump: Vec<f64>,
    /// `h_T^2 ||(1 - Pi_q)(f - kappa^2 u)||_T^2`.
    pub oscillation: Vec<f64>,
    /// `||[du/dn]||_F^2` for the face opposite each local vertex (zero on the physical boundary).
    pub face_jump_sq: Vec<[f64; 3]>,
}

impl IndicatorField {
    #[inline]
    pub fn eta_sq(&self, e: usize) -> f64 {
        self.volume[e] + self.jump[e]
    }

    pub fn eta_sq_all(&self) -> Vec<f64> {
        (0..self.volume.len()).map(|e| self.eta_sq(e)).collect()
    }

    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    /// `eta` over all elements.
    pub fn total(&self) -> f64 {
        (0..self.len()).map(|e| self.eta_sq(e)).sum::<f64>().sqrt()
    }

    pub fn total_oscillation(&self) -> f64 {
        self.oscillation.iter().sum::<f64>().sqrt()
    }

    /// `eta` over a subset of active elements given by forest id.
    pub fn total_over(&self, mesh: &ActiveMesh, subset: &[ElemId]) -> Result<f64> {
        let mut s = 0.0;
        for &id in subset {
            let e = mesh.local(id).ok_or(Error::InactiveElement(id))?;
            s += self.eta_sq(e);
        }
        Ok(s.sqrt())
    }
}

/// Indicators of the discrete function `u` on the active mesh.
pub fn estimate<C: CoefficientField + ?Sized>(
    mesh: &ActiveMesh,
    dofs: &DofMap,
    u: &[f64],
    coeffs: &C,
    opts: &EstimatorOptions,
) -> Result<IndicatorField> {
    if dofs.n_elements() != mesh.len() || u.len() != dofs.n_dofs() {
        return Err(Error::DofMapMismatch);
    }
    let basis = dofs.basis();
    let p = basis.degree();
    let n = basis.len();
    let face_jump_sq = face_jumps(mesh, dofs, u)?;

    let degree = opts.volume_degree.unwrap_or((2 * p + 2).max(8)).min(MAX_TRIANGLE_DEGREE);
    let rule = triangle_rule(degree)?;
    let tab = basis.tabulate(&rule.points);
    let hess: Vec<Vec<[[f64; 3]; 3]>> = rule
        .points
        .iter()
        .map(|&l| {
            let mut h = vec![[[0.0; 3]; 3]; n];
            basis.lambda_hessians(l, &mut h);
            h
        })
        .collect();
    let q = opts.oscillation_degree.unwrap_or(p);
    let projector = Projector::new(q, &rule.points, &rule.weights)?;

    let mut volume = vec![0.0; mesh.len()];
    let mut jump = vec![0.0; mesh.len()];
    let mut oscillation = vec![0.0; mesh.len()];
    let mut coef = vec![0.0; n];
    let mut reaction_residual = vec![0.0; rule.len()];
    for e in 0..mesh.len() {
        let g = &mesh.geometry[e];
        dofs.gather(e, u, &mut coef);
        let mut vol = 0.0;
        for (qp, (&l, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let x = g.map(l);
            let uh: f64 = coef.iter().zip(tab.values_at(qp)).map(|(c, v)| c * v).sum();
            let lap: f64 = if p == 1 {
                0.0
            } else {
                coef.iter().zip(&hess[qp]).map(|(c, h)| c * physical_laplacian(g, h)).sum()
            };
            let rr = coeffs.source(x) - coeffs.kappa_sq(x) * uh;
            reaction_residual[qp] = rr;
            let r = rr + lap;
            vol += w * r * r;
        }
        let h2 = g.area;
        volume[e] = h2 * vol * g.area;
        oscillation[e] = h2 * projector.residual_sq(&reaction_residual) * g.area;
        let faces: f64 = (0..3)
            .filter(|&k| mesh.faces[e][k].kind != FaceKind::Dirichlet)
            .map(|k| face_jump_sq[e][k])
            .sum();
        jump[e] = g.h() * faces;
    }
    Ok(IndicatorField {
        volume,
        jump,
        oscillation,
        face_jump_sq,
    })
}

/// `||[du/dn]||_F^2` for every face of every element: the jump on interior
/// faces, the one-sided normal derivative on the artificial boundary, and
/// zero on the physical boundary. Each interior face is integrated once.
pub fn face_jumps(mesh: &ActiveMesh, dofs: &DofMap, u: &[f64]) -> Result<Vec<[f64; 3]>> {
    let basis = dofs.basis();
    let rule = gauss_legendre(basis.degree() + 1)?;
    let mut out = vec![[0.0; 3]; mesh.len()];
    let mut ce = vec![0.0; basis.len()];
    let mut cn = vec![0.0; basis.len()];
    let mut dl = vec![[0.0; 3]; basis.len()];
    for e in 0..mesh.len() {
        dofs.gather(e, u, &mut ce);
        for k in 0..3 {
            let info = mesh.faces[e][k];
            let neighbor = match info.kind {
                FaceKind::Dirichlet => continue,
                FaceKind::Truncation => None,
                FaceKind::Interior => {
                    let (nb, nk) = info.neighbor.ok_or(Error::UnclassifiedFace(
                        mesh.edge_key(e, k).0,
                        mesh.edge_key(e, k).1,
                    ))?;
                    if nb < e {
                        continue;
                    }
                    Some((nb, nk))
                }
            };
            let g = &mesh.geometry[e];
            let normal = g.outward_normal(k);
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            if let Some((nb, _)) = neighbor {
                dofs.gather(nb, u, &mut cn);
            }
            let mut s = 0.0;
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let mut l = [0.0; 3];
                l[a] = 1.0 - t;
                l[b] = t;
                let mut jmp = normal_derivative(basis, g, l, normal, &ce, &mut dl);
                if let Some((nb, nk)) = neighbor {
                    let gn = &mesh.geometry[nb];
                    let (na, nbv) = ((nk + 1) % 3, (nk + 2) % 3);
                    let mut ln = [0.0; 3];
                    if mesh.vertices[nb][na] == mesh.vertices[e][a] {
                        ln[na] = 1.0 - t;
                        ln[nbv] = t;
                    } else {
                        ln[na] = t;
                        ln[nbv] = 1.0 - t;
                    }
                    jmp -= normal_derivative(basis, gn, ln, normal, &cn, &mut dl);
                }
                s += w * jmp * jmp;
            }
            let val = s * g.edge_length(k);
            out[e][k] = val;
            if let Some((nb, nk)) = neighbor {
                out[nb][nk] = val;
            }
        }
    }
    Ok(out)
}

fn normal_derivative(
    basis: &LagrangeBasis,
    g: &crate::mesh::ElementGeometry,
    l: [f64; 3],
    normal: [f64; 2],
    coef: &[f64],
    dl: &mut [[f64; 3]],
) -> f64 {
    basis.lambda_derivatives(l, dl);
    coef.iter()
        .zip(dl.iter())
        .map(|(c, d)| {
            let gr = physical_gradient(g, d);
            c * (gr[0] * normal[0] + gr[1] * normal[1])
        })
        .sum()
}

/// L2 projection onto `P_q` on the reference element, for a fixed rule.
struct Projector {
    /// Basis values at the rule points, one row per point.
    psi: Vec<Vec<f64>>,
    weights: Vec<f64>,
    mass: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Projector {
    fn new(q: usize, points: &[[f64; 3]], weights: &[f64]) -> Result<Self> {
        let psi: Vec<Vec<f64>> = if q == 0 {
            points.iter().map(|_| vec![1.0]).collect()
        } else {
            let b = LagrangeBasis::new(q)?;
            points
                .iter()
                .map(|&l| {
                    let mut v = vec![0.0; b.len()];
                    b.values(l, &mut v);
                    v
                })
                .collect()
        };
        let m = psi[0].len();
        let mut mass = DMatrix::<f64>::zeros(m, m);
        for (row, &w) in psi.iter().zip(weights) {
            for i in 0..m {
                for j in 0..m {
                    mass[(i, j)] += w * row[i] * row[j];
                }
            }
        }
        let mass = mass
            .cholesky()
            .ok_or_else(|| Error::InvalidConfig(format!("oscillation degree {q} needs a finer volume rule")))?;
        Ok(Self {
            psi,
            weights: weights.to_vec(),
            mass,
        })
    }

    /// `||g - Pi g||^2 / |T|` for point values `g` of the element rule.
    fn residual_sq(&self, g: &[f64]) -> f64 {
        let m = self.psi[0].len();
        let mut rhs = DVector::<f64>::zeros(m);
        let mut norm = 0.0;
        for ((row, &w), &v) in self.psi.iter().zip(&self.weights).zip(g) {
            norm += w * v * v;
            for i in 0..m {
                rhs[i] += w * v * row[i];
            }
        }
        let sol = self.mass.solve(&rhs);
        (norm - rhs.dot(&sol)).max(0.0)
    }
}
