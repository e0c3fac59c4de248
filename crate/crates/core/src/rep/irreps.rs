//! Hand-built unitary irreps for the catalog, and a numerical validator.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{CMatrix, RepError};
use crate::group::{parse_catalog_name, CatalogSpec, Elem, FiniteGroup};

/// A unitary representation given by one matrix per element.
#[derive(Clone, Debug, PartialEq)]
pub struct Irrep {
    pub dim: usize,
    pub images: Vec<CMatrix>,
}

impl Irrep {
    pub fn image(&self, g: Elem) -> &CMatrix {
        &self.images[g]
    }

    pub fn character(&self, g: Elem) -> Complex64 {
        self.images[g].trace()
    }

    /// True iff every element maps to the identity matrix.
    pub fn is_trivial(&self, tol: f64) -> bool {
        self.images.iter().all(|m| m.is_identity(tol))
    }

    pub fn kron(&self, other: &Irrep) -> Irrep {
        let mut images = Vec::with_capacity(self.images.len() * other.images.len());
        for a in &self.images {
            for b in &other.images {
                images.push(a.kron(b));
            }
        }
        Irrep { dim: self.dim * other.dim, images }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrrepSet {
    pub group_name: String,
    pub order: usize,
    pub irreps: Vec<Irrep>,
    /// Claimed complete; `validate_irrep_set` checks the claim.
    pub complete: bool,
}

impl IrrepSet {
    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }
}

fn root_of_unity(k: i64, m: usize) -> Complex64 {
    let k = k.rem_euclid(m as i64) as usize;
    // exact values at quarter turns keep products of images clean
    if (4 * k) % m == 0 {
        const QUARTERS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        let (x, y) = QUARTERS[4 * k / m];
        return Complex64::new(x, y);
    }
    Complex64::from_polar(1.0, TAU * k as f64 / m as f64)
}

fn one_dim(values: impl Iterator<Item = Complex64>) -> Irrep {
    Irrep { dim: 1, images: values.map(CMatrix::scalar).collect() }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn cyclic_irreps(m: usize) -> Vec<Irrep> {
    (0..m as i64).map(|k| one_dim((0..m as i64).map(|g| root_of_unity(k * g, m)))).collect()
}

fn quaternion_irreps() -> Vec<Irrep> {
    // element 2u + s, unit u in (1, i, j, k), sign (-1)^s
    let mut out = Vec::new();
    for (alpha, beta) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        let unit = [1.0, alpha, beta, alpha * beta];
        out.push(one_dim((0..8).map(|x| re(unit[x / 2]))));
    }
    let (o, l, i) = (re(0.0), re(1.0), Complex64::new(0.0, 1.0));
    let units = [
        CMatrix::identity(2),
        CMatrix::diag(&[i, -i]),
        CMatrix::from_rows(&[vec![o, l], vec![-l, o]]),
        CMatrix::from_rows(&[vec![o, i], vec![i, o]]),
    ];
    let images = (0..8).map(|x| units[x / 2].scale_re(if x % 2 == 1 { -1.0 } else { 1.0 })).collect();
    out.push(Irrep { dim: 2, images });
    out
}

fn swap2() -> CMatrix {
    let (o, l) = (re(0.0), re(1.0));
    CMatrix::from_rows(&[vec![o, l], vec![l, o]])
}

fn dihedral_irreps(n: usize) -> Vec<Irrep> {
    // element a + n e is r^a s^e
    let mut out = Vec::new();
    let r_signs: &[f64] = if n % 2 == 0 { &[1.0, -1.0] } else { &[1.0] };
    for &rs in r_signs {
        for ss in [1.0f64, -1.0] {
            out.push(one_dim((0..2 * n).map(|x| {
                let (a, e) = (x % n, x / n);
                re(rs.powi(a as i32) * ss.powi(e as i32))
            })));
        }
    }
    for k in 1..=(n - 1) / 2 {
        let images = (0..2 * n)
            .map(|x| {
                let (a, e) = ((x % n) as i64, x / n);
                let rot = CMatrix::diag(&[root_of_unity(k as i64 * a, n), root_of_unity(-(k as i64) * a, n)]);
                if e == 1 {
                    rot.mul(&swap2())
                } else {
                    rot
                }
            })
            .collect();
        out.push(Irrep { dim: 2, images });
    }
    out
}

fn z2_wr_z2_irreps() -> Vec<Irrep> {
    // element a + 2b + 4z
    let bits = |x: usize| (x & 1, (x >> 1) & 1, x >> 2);
    let sign = |e: usize| if e % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    for alpha in 0..2 {
        for beta in 0..2 {
            out.push(one_dim((0..8).map(|x| {
                let (a, b, z) = bits(x);
                re(sign(alpha * (a + b) + beta * z))
            })));
        }
    }
    let images = (0..8)
        .map(|x| {
            let (a, b, z) = bits(x);
            let d = CMatrix::diag(&[re(sign(a)), re(sign(b))]);
            if z == 1 {
                d.mul(&swap2())
            } else {
                d
            }
        })
        .collect();
    out.push(Irrep { dim: 2, images });
    out
}

fn unitriangular_irreps(p: usize) -> Vec<Irrep> {
    // element a + p b + p^2 c, product (a+a', b+b', c+c'+ab')
    let dec = |x: usize| (x % p, (x / p) % p, x / (p * p));
    let order = p * p * p;
    let mut out = Vec::new();
    for s in 0..p {
        for t in 0..p {
            out.push(one_dim((0..order).map(|x| {
                let (a, b, _) = dec(x);
                root_of_unity((s * a + t * b) as i64, p)
            })));
        }
    }
    // rho_h(a,b,c) e_x = w^{h(c + a x)} e_{x+b}
    for h in 1..p {
        let images = (0..order)
            .map(|g| {
                let (a, b, c) = dec(g);
                let mut m = CMatrix::zeros(p);
                for x in 0..p {
                    m.set((x + b) % p, x, root_of_unity((h * (c + a * x)) as i64, p));
                }
                m
            })
            .collect();
        out.push(Irrep { dim: p, images });
    }
    out
}

fn spec_irreps(spec: &CatalogSpec) -> Vec<Irrep> {
    match spec {
        CatalogSpec::Cyclic(m) => cyclic_irreps(*m),
        CatalogSpec::Quaternion => quaternion_irreps(),
        CatalogSpec::Dihedral(n) => dihedral_irreps(*n),
        CatalogSpec::Symmetric3 => dihedral_irreps(3),
        CatalogSpec::Z2WrZ2 => z2_wr_z2_irreps(),
        CatalogSpec::Unitriangular(p) => unitriangular_irreps(*p),
        CatalogSpec::Product(fs) => {
            let mut acc = spec_irreps(&fs[0]);
            for f in &fs[1..] {
                let next = spec_irreps(f);
                acc = acc.iter().flat_map(|a| next.iter().map(move |b| a.kron(b))).collect();
            }
            acc
        }
    }
}

/// Complete irreps of a catalog group (looked up by the group's name).
/// Products get tensor products of the factors' irreps.
pub fn irrep_catalog(g: &FiniteGroup) -> Result<IrrepSet, RepError> {
    let spec = parse_catalog_name(g.name()).map_err(|_| RepError::NoCatalogEntry(g.name().to_string()))?;
    if spec.order() != g.order() {
        return Err(RepError::NoCatalogEntry(g.name().to_string()));
    }
    Ok(IrrepSet { group_name: g.name().to_string(), order: g.order(), irreps: spec_irreps(&spec), complete: true })
}

/// Per-check maximum residuals. Every check passes iff `pass`.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub homomorphism: f64,
    pub unitarity: f64,
    pub sum_dim_sq: usize,
    pub order: usize,
    /// max |<chi_a, chi_b> - delta_ab| over pairs, inner product normalised by |G|.
    pub orthogonality: f64,
    /// max | sum_g |chi(g)|^2 - |G| | / |G|.
    pub irreducibility: f64,
    pub pass: bool,
}

pub const HOM_TOL: f64 = 1e-9;
pub const CHAR_TOL: f64 = 1e-6;

pub fn validate_irrep_set(g: &FiniteGroup, set: &IrrepSet) -> ValidationReport {
    let n = g.order();
    let mut hom: f64 = 0.0;
    let mut unit: f64 = 0.0;
    let mut irr: f64 = 0.0;
    let mut shape_ok = true;
    for rho in &set.irreps {
        if rho.images.len() != n || rho.images.iter().any(|m| m.dim() != rho.dim) {
            shape_ok = false;
            continue;
        }
        for a in g.elements() {
            unit = unit.max(rho.images[a].unitarity_residual());
            for b in g.elements() {
                let lhs = &rho.images[g.mul(a, b)];
                hom = hom.max(lhs.max_abs_diff(&rho.images[a].mul(&rho.images[b])));
            }
        }
        let norm: f64 = g.elements().map(|x| rho.character(x).norm_sqr()).sum();
        irr = irr.max((norm - n as f64).abs() / n as f64);
    }
    let mut orth: f64 = 0.0;
    for (i, a) in set.irreps.iter().enumerate() {
        for b in &set.irreps[i + 1..] {
            if a.images.len() != n || b.images.len() != n {
                continue;
            }
            let ip: Complex64 = g.elements().map(|x| a.character(x) * b.character(x).conj()).sum();
            orth = orth.max(ip.norm() / n as f64);
        }
    }
    let sum_dim_sq = set.irreps.iter().map(|r| r.dim * r.dim).sum();
    let pass = shape_ok
        && hom < HOM_TOL
        && unit < HOM_TOL
        && orth < CHAR_TOL
        && irr < CHAR_TOL
        && (!set.complete || sum_dim_sq == n);
    let homomorphism = if shape_ok { hom } else { f64::INFINITY };
    ValidationReport { homomorphism, unitarity: unit, sum_dim_sq, order: n, orthogonality: orth, irreducibility: irr, pass }
}
