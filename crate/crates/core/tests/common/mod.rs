//! Brute-force dense constructions used as oracles by the integration tests.
//!
//! Every Hamiltonian here is written from link electric fields and Kronecker
//! products, without going through the term lists.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rdb_core::plaquette::OperatorTable;

pub type M = DMatrix<C64>;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn eye(n: usize) -> M {
    M::identity(n, n)
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at `pos`.
pub fn embed(op: &M, pos: usize, dims: &[usize]) -> M {
    let mut out = eye(1);
    for (i, &d) in dims.iter().enumerate() {
        out = if i == pos { out.kronecker(op) } else { out.kronecker(&eye(d)) };
    }
    out
}

pub struct DenseResult {
    pub energy: f64,
    pub magnetic: f64,
    pub vector: Vec<C64>,
}

/// Lowest eigenpair of `h` restricted to `keep`, and `⟨H_B⟩` in it.
pub fn ground(h: &M, hb: &M, keep: &[usize]) -> DenseResult {
    let n = keep.len();
    let hs = M::from_fn(n, n, |i, j| h[(keep[i], keep[j])]);
    let bs = M::from_fn(n, n, |i, j| hb[(keep[i], keep[j])]);
    let eig = hs.symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k).into_owned();
    let magnetic = (v.adjoint() * &bs * &v)[(0, 0)].re;
    DenseResult {
        energy: eig.eigenvalues[k],
        magnetic,
        vector: v.iter().copied().collect(),
    }
}

/// `(Σ s_i R_i)²` where each `R_i²` is the projected `R²`, not the square of
/// the truncated `R`.
fn link_square(link: &[(Option<usize>, f64)], r: &[M], r2: &[M], n: usize) -> M {
    let mut out = M::zeros(n, n);
    for &(a, sa) in link {
        for &(b, sb) in link {
            match (a, b) {
                (Some(a), Some(b)) if a == b => out += &r2[a] * c(sa * sb),
                (Some(a), Some(b)) => out += &r[a] * &r[b] * c(sa * sb),
                _ => {}
            }
        }
    }
    out
}

fn magnetic_sum(ps: &[M], g: f64) -> M {
    let n = ps[0].nrows();
    let km = 1.0 / (2.0 * g * g);
    let mut hb = M::zeros(n, n);
    for p in ps {
        hb += (eye(n) * c(2.0) - p - p.adjoint()) * c(km);
    }
    hb
}

/// 2×2 torus. Plaquettes (0,0), (1,0), (1,1) are the slots; (0,1) carries
/// no rotator and its loop is the inverse product of the other three.
/// Returns `(H, H_B)` on the full tensor space.
pub fn torus(g: f64, tables: &[&OperatorTable]) -> (M, M) {
    let dims: Vec<usize> = tables.iter().map(|t| t.dim()).collect();
    let n: usize = dims.iter().product();
    let r: Vec<M> = (0..3).map(|s| embed(&tables[s].e, s, &dims)).collect();
    let r2: Vec<M> = (0..3).map(|s| embed(&tables[s].e2.map(c), s, &dims)).collect();
    let p: Vec<M> = (0..3).map(|s| embed(&tables[s].p, s, &dims)).collect();
    let pos = [(0usize, 0usize), (1, 0), (1, 1)];
    let slot = |x: usize, y: usize| pos.iter().position(|&q| q == (x % 2, y % 2));
    let mut he = M::zeros(n, n);
    for y in 0..2 {
        for x in 0..2 {
            for (dx, dy) in [(1, 0), (0, 1)] {
                let link = [(slot(x, y), 1.0), (slot(x + dx, y + dy), -1.0)];
                he += link_square(&link, &r, &r2, n) * c(0.5 * g * g);
            }
        }
    }
    let p_ref = (&p[0] * &p[1] * &p[2]).adjoint();
    let hb = magnetic_sum(&[p[0].clone(), p[1].clone(), p[2].clone(), p_ref], g);
    (he + &hb, hb)
}

/// Open lattice of `nx × ny` plaquettes, slot `y·nx + x`.
pub fn open(nx: usize, ny: usize, g: f64, tables: &[&OperatorTable]) -> (M, M) {
    let dims: Vec<usize> = tables.iter().map(|t| t.dim()).collect();
    let n: usize = dims.iter().product();
    let r: Vec<M> = (0..nx * ny).map(|s| embed(&tables[s].e, s, &dims)).collect();
    let r2: Vec<M> = (0..nx * ny).map(|s| embed(&tables[s].e2.map(c), s, &dims)).collect();
    let slot = |x: i64, y: i64| {
        (x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64).then(|| y as usize * nx + x as usize)
    };
    let mut he = M::zeros(n, n);
    // Horizontal links separate vertically adjacent plaquettes, vertical
    // links horizontally adjacent ones; outer links see one plaquette.
    for x in 0..nx as i64 {
        for y in 0..=ny as i64 {
            let link = [(slot(x, y - 1), 1.0), (slot(x, y), -1.0)];
            he += link_square(&link, &r, &r2, n) * c(0.5 * g * g);
        }
    }
    for y in 0..ny as i64 {
        for x in 0..=nx as i64 {
            let link = [(slot(x - 1, y), 1.0), (slot(x, y), -1.0)];
            he += link_square(&link, &r, &r2, n) * c(0.5 * g * g);
        }
    }
    let ps: Vec<M> = (0..nx * ny).map(|s| embed(&tables[s].p, s, &dims)).collect();
    let hb = magnetic_sum(&ps, g);
    (he + &hb, hb)
}

/// Annihilator on `site` of `n_sites` ordered fermions, site 0 leftmost.
pub fn annihilator(site: usize, n_sites: usize) -> M {
    let z = M::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
    let lower = M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let mut out = eye(1);
    for j in 0..n_sites {
        let f = match j.cmp(&site) {
            std::cmp::Ordering::Less => z.clone(),
            std::cmp::Ordering::Equal => lower.clone(),
            std::cmp::Ordering::Greater => eye(2),
        };
        out = out.kronecker(&f);
    }
    out
}

/// Single plaquette with staggered fermions on sites (0,0), (1,0), (0,1),
/// (1,1), gauge field in one link. Returns `(H, H_B)` on gauge ⊗ fermions.
pub fn qed(g: f64, m: f64, kappa: f64, table: &OperatorTable) -> (M, M) {
    let d = table.dim();
    let f16 = eye(16);
    let e = table.e.kronecker(&f16);
    let u = table.p.kronecker(&f16);
    let n = d * 16;
    let psi: Vec<M> = (0..4).map(|s| eye(d).kronecker(&annihilator(s, 4))).collect();
    let sites = [(0usize, 0usize), (1, 0), (0, 1), (1, 1)];
    let number = |s: usize| psi[s].adjoint() * &psi[s];
    let q = |s: usize| {
        let odd = ((sites[s].0 + sites[s].1) % 2) as f64;
        number(s) - eye(n) * c(odd)
    };
    let e2 = table.e2.map(c).kronecker(&f16);
    // Link fields E + Q with Q built from charges; E² is the projected R².
    let zero = M::zeros(n, n);
    let charges = [zero.clone(), -q(2), -q(3), q(0) + q(2)];
    let mut h = M::zeros(n, n);
    for qs in &charges {
        h += (&e2 + &e * qs * c(2.0) + qs * qs) * c(0.5 * g * g);
    }
    let km = 1.0 / (2.0 * g * g);
    h -= (&u + u.adjoint()) * c(km);
    for (s, &(x, y)) in sites.iter().enumerate() {
        let sign = if (x + y) % 2 == 0 { 1.0 } else { -1.0 };
        h += number(s) * c(sign * m);
    }
    let mut hop = psi[0].adjoint() * (&psi[2] + &psi[1]) + psi[1].adjoint() * &psi[3];
    hop += psi[3].adjoint() * &u * &psi[2];
    h += (&hop + hop.adjoint()) * c(kappa);
    let hb = (eye(n) * c(2.0) - &u - u.adjoint()) * c(km);
    (h, hb)
}

/// Full-space indices with `filled` fermions (fermion index fastest).
pub fn fixed_filling(gauge_dim: usize, filled: u32) -> Vec<usize> {
    (0..gauge_dim * 16).filter(|i| ((i % 16) as u32).count_ones() == filled).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
