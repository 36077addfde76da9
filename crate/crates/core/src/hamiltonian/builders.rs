use std::collections::BTreeMap;

use super::model::{Boundary, LatticeModel, Matter};
use super::terms::{FermionOp, HamiltonianTermList, LocalOp, Term, TermSum};
use crate::error::{Error, Result};

pub const CONVENTION_TORUS_CONSTANT: &str = "torus-constant-8";
pub const CONVENTION_MAGNETIC_SIGN: &str = "magnetic-energy-nonnegative";
pub const CONVENTION_FERMION_ORDER: &str = "fermion-order-(0,0),(1,0),(0,1),(1,1)";

/// Integer combination of rotators, slot → coefficient.
type Combination = BTreeMap<usize, i64>;

/// `Σ_links (Σ c_i R_i)²` collected as integer coefficients of `R_a R_b`, `a ≤ b`.
#[derive(Default)]
struct Quadratic {
    coeffs: BTreeMap<(usize, usize), i64>,
}

impl Quadratic {
    fn add_square(&mut self, link: &Combination) {
        for (&a, &ca) in link {
            for (&b, &cb) in link {
                if a < b {
                    *self.coeffs.entry((a, b)).or_default() += 2 * ca * cb;
                } else if a == b {
                    *self.coeffs.entry((a, a)).or_default() += ca * cb;
                }
            }
        }
    }

    /// Emits `scale · Σ c_ab R_a R_b` as terms.
    fn emit(&self, scale: f64, out: &mut TermSum) {
        for (&(a, b), &c) in &self.coeffs {
            if c == 0 {
                continue;
            }
            let coeff = c as f64 * scale;
            if a == b {
                out.push(Term::new(coeff, &[(a, LocalOp::E2)]));
            } else {
                out.push(Term::new(coeff, &[(a, LocalOp::E), (b, LocalOp::E)]));
            }
        }
    }
}

fn link(plus: Option<usize>, minus: Option<usize>) -> Combination {
    let mut c = Combination::new();
    if let Some(p) = plus {
        *c.entry(p).or_default() += 1;
    }
    if let Some(m) = minus {
        *c.entry(m).or_default() -= 1;
    }
    c.retain(|_, v| *v != 0);
    c
}

fn electric_scale(g: f64) -> f64 {
    0.5 * g * g
}

fn magnetic_scale(g: f64) -> f64 {
    1.0 / (2.0 * g * g)
}

fn single_plaquette_magnetic(slots: usize, km: f64, out: &mut TermSum) {
    for s in 0..slots {
        out.push(Term::new(-km, &[(s, LocalOp::P)]));
        out.push(Term::new(-km, &[(s, LocalOp::PDag)]));
    }
}

fn product_term(slots: usize, op: LocalOp, coeff: f64) -> Term {
    let ops: Vec<_> = (0..slots).map(|s| (s, op)).collect();
    Term::new(coeff, &ops)
}

fn combine(electric: &TermSum, magnetic: &TermSum) -> TermSum {
    let mut h = electric.clone();
    h.terms.extend(magnetic.terms.iter().cloned());
    h.constant_offset += magnetic.constant_offset;
    h
}

fn require(model: &LatticeModel, boundary: Boundary, matter: Matter, what: &str) -> Result<()> {
    model.validate()?;
    if model.boundary != boundary || model.matter != matter {
        return Err(Error::UnsupportedModel(format!(
            "{what} builder called with {:?} boundary and {:?} matter",
            model.boundary, model.matter
        )));
    }
    Ok(())
}

/// 2×2 periodic lattice with the two global loops set to zero.
pub fn build_minimal_torus(model: &LatticeModel) -> Result<HamiltonianTermList> {
    require(model, Boundary::Periodic, Matter::None, "minimal torus")?;
    if model.nx != 2 {
        return Err(Error::UnsupportedModel(format!(
            "minimal torus is 2×2, got {}×{}",
            model.nx, model.ny
        )));
    }
    let g = model.g;
    let ke = 2.0 * g * g;
    let km = magnetic_scale(g);
    use LocalOp::*;

    let mut electric = TermSum::default();
    for s in 0..3 {
        electric.push(Term::new(ke, &[(s, E2)]));
    }
    electric.push(Term::new(-ke, &[(0, E), (1, E)]));
    electric.push(Term::new(-ke, &[(1, E), (2, E)]));

    let mut magnetic = TermSum {
        terms: Vec::new(),
        constant_offset: 8.0 * km,
    };
    single_plaquette_magnetic(3, km, &mut magnetic);
    magnetic.push(Term::new(-km, &[(0, P), (1, P), (2, P)]));
    magnetic.push(Term::new(-km, &[(0, PDag), (1, PDag), (2, PDag)]));

    Ok(HamiltonianTermList {
        model: *model,
        slots: vec![(0, 0), (1, 0), (1, 1)],
        fermion_sites: Vec::new(),
        hamiltonian: combine(&electric, &magnetic),
        magnetic,
        n_plaq: model.n_plaq(),
        conventions: vec![CONVENTION_TORUS_CONSTANT.into()],
    })
}

/// Open pure-gauge lattice of `nx × ny` plaquettes.
pub fn build_obc_pure_gauge(model: &LatticeModel) -> Result<HamiltonianTermList> {
    require(model, Boundary::Open, Matter::None, "open pure-gauge")?;
    let (nx, ny) = (model.nx as i64, model.ny as i64);
    let slot = |x: i64, y: i64| -> Option<usize> {
        ((0..nx).contains(&x) && (0..ny).contains(&y)).then(|| (y * nx + x) as usize)
    };

    let mut quad = Quadratic::default();
    for y in 0..=ny {
        for x in 0..=nx {
            quad.add_square(&link(slot(x, y), slot(x, y - 1)));
            quad.add_square(&link(slot(x - 1, y), slot(x, y)));
        }
    }
    let mut electric = TermSum::default();
    quad.emit(electric_scale(model.g), &mut electric);

    let n_slots = (nx * ny) as usize;
    let km = magnetic_scale(model.g);
    let mut magnetic = TermSum {
        terms: Vec::new(),
        constant_offset: 2.0 * n_slots as f64 * km,
    };
    single_plaquette_magnetic(n_slots, km, &mut magnetic);

    let slots = (0..ny as usize)
        .flat_map(|y| (0..nx as usize).map(move |x| (x, y)))
        .collect();
    Ok(HamiltonianTermList {
        model: *model,
        slots,
        fermion_sites: Vec::new(),
        hamiltonian: combine(&electric, &magnetic),
        magnetic,
        n_plaq: model.n_plaq(),
        conventions: vec![CONVENTION_MAGNETIC_SIGN.into()],
    })
}

/// `N × N` periodic pure-gauge lattice; the plaquette at `(0, N − 1)` is
/// the product of all others and the global rotators vanish.
pub fn build_pbc_pure_gauge_nn(model: &LatticeModel) -> Result<HamiltonianTermList> {
    require(model, Boundary::Periodic, Matter::None, "periodic pure-gauge")?;
    let n = model.nx as i64;
    let reference = (0, n - 1);
    let mut coords = Vec::new();
    let mut index = BTreeMap::new();
    for y in 0..n {
        for x in 0..n {
            if (x, y) != reference {
                index.insert((x, y), coords.len());
                coords.push((x as usize, y as usize));
            }
        }
    }
    let slot = |x: i64, y: i64| index.get(&(x.rem_euclid(n), y.rem_euclid(n))).copied();

    let mut quad = Quadratic::default();
    for y in 0..n {
        for x in 0..n {
            quad.add_square(&link(slot(x, y), slot(x, y - 1)));
            quad.add_square(&link(slot(x - 1, y), slot(x, y)));
        }
    }
    let mut electric = TermSum::default();
    quad.emit(electric_scale(model.g), &mut electric);

    let n_slots = coords.len();
    let km = magnetic_scale(model.g);
    let mut magnetic = TermSum {
        terms: Vec::new(),
        constant_offset: 2.0 * (n * n) as f64 * km,
    };
    single_plaquette_magnetic(n_slots, km, &mut magnetic);
    magnetic.push(product_term(n_slots, LocalOp::P, -km));
    magnetic.push(product_term(n_slots, LocalOp::PDag, -km));

    Ok(HamiltonianTermList {
        model: *model,
        slots: coords,
        fermion_sites: Vec::new(),
        hamiltonian: combine(&electric, &magnetic),
        magnetic,
        n_plaq: model.n_plaq(),
        conventions: vec![CONVENTION_TORUS_CONSTANT.into()],
    })
}

/// Commutative polynomial in `E` and idempotent occupation numbers:
/// `(E power, site mask) → integer coefficient`.
#[derive(Clone, Default)]
struct ChargePoly(BTreeMap<(u8, u8), i64>);

impl ChargePoly {
    fn term(e_power: u8, mask: u8, c: i64) -> Self {
        let mut p = Self::default();
        p.add(e_power, mask, c);
        p
    }

    fn add(&mut self, e_power: u8, mask: u8, c: i64) {
        *self.0.entry((e_power, mask)).or_default() += c;
    }

    fn plus(mut self, other: &ChargePoly) -> Self {
        for (&(e, m), &c) in &other.0 {
            self.add(e, m, c);
        }
        self
    }

    fn square(&self) -> Self {
        let mut out = Self::default();
        for (&(e1, m1), &c1) in &self.0 {
            for (&(e2, m2), &c2) in &self.0 {
                out.add(e1 + e2, m1 | m2, c1 * c2);
            }
        }
        out
    }
}

/// Staggered offset of the charge `q_n = n_n − (1 − (−1)^{x+y})/2`.
fn background(site: (usize, usize)) -> i64 {
    ((site.0 + site.1) % 2) as i64
}

fn charge(sites: &[(usize, usize)], i: usize) -> ChargePoly {
    ChargePoly::term(0, 1 << i, 1).plus(&ChargePoly::term(0, 0, -background(sites[i])))
}

fn mask_sites(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Single plaquette with staggered fermions on the open 2×2 lattice.
pub fn build_obc_qed_2x2(model: &LatticeModel) -> Result<HamiltonianTermList> {
    require(model, Boundary::Open, Matter::Staggered, "staggered 2×2")?;
    let sites = vec![(0, 0), (1, 0), (0, 1), (1, 1)];
    let e = ChargePoly::term(1, 0, 1);
    let neg = |p: ChargePoly| ChargePoly(p.0.into_iter().map(|(k, c)| (k, -c)).collect());
    let links = [
        e.clone(),
        e.clone().plus(&neg(charge(&sites, 2))),
        e.clone().plus(&neg(charge(&sites, 3))),
        e.clone().plus(&charge(&sites, 0)).plus(&charge(&sites, 2)),
    ];
    let mut poly = ChargePoly::default();
    for l in &links {
        poly = poly.plus(&l.square());
    }

    let scale = electric_scale(model.g);
    let mut h = TermSum::default();
    for (&(e_power, mask), &c) in &poly.0 {
        if c == 0 {
            continue;
        }
        let coeff = c as f64 * scale;
        let gauge: &[(usize, LocalOp)] = match e_power {
            0 => &[],
            1 => &[(0, LocalOp::E)],
            _ => &[(0, LocalOp::E2)],
        };
        let fermion = if mask == 0 {
            FermionOp::Identity
        } else {
            FermionOp::Numbers(mask_sites(mask))
        };
        h.push(Term::new(coeff, gauge).with_fermion(fermion));
    }
    let km = magnetic_scale(model.g);
    h.push(Term::new(-km, &[(0, LocalOp::P)]));
    h.push(Term::new(-km, &[(0, LocalOp::PDag)]));

    for (i, &site) in sites.iter().enumerate() {
        let sign = if (site.0 + site.1) % 2 == 0 { 1.0 } else { -1.0 };
        h.push(Term::new(sign * model.m, &[]).with_fermion(FermionOp::Numbers(vec![i])));
    }
    let hop = |create, annihilate| FermionOp::Hop { create, annihilate };
    for (create, annihilate, gauge) in [
        (0, 2, None),
        (0, 1, None),
        (1, 3, None),
        (3, 2, Some(LocalOp::P)),
    ] {
        let ops: Vec<_> = gauge.map(|op| (0, op)).into_iter().collect();
        let forward = Term::new(model.kappa, &ops).with_fermion(hop(create, annihilate));
        h.push(forward.adjoint());
        h.push(forward);
    }
    let h = h.normal_ordered();

    let mut magnetic = TermSum {
        terms: Vec::new(),
        constant_offset: 2.0 * km,
    };
    single_plaquette_magnetic(1, km, &mut magnetic);

    Ok(HamiltonianTermList {
        model: *model,
        slots: vec![(0, 0)],
        fermion_sites: sites,
        hamiltonian: h,
        magnetic,
        n_plaq: model.n_plaq(),
        conventions: vec![
            CONVENTION_MAGNETIC_SIGN.into(),
            CONVENTION_FERMION_ORDER.into(),
        ],
    })
}

/// Dispatches to the builder matching the model's geometry.
pub fn build_hamiltonian(model: &LatticeModel) -> Result<HamiltonianTermList> {
    match (model.boundary, model.matter) {
        (Boundary::Periodic, Matter::None) if model.nx == 2 => build_minimal_torus(model),
        (Boundary::Periodic, Matter::None) => build_pbc_pure_gauge_nn(model),
        (Boundary::Open, Matter::None) => build_obc_pure_gauge(model),
        (Boundary::Open, Matter::Staggered) => build_obc_qed_2x2(model),
        (Boundary::Periodic, Matter::Staggered) => Err(Error::UnsupportedModel(
            "periodic lattices with matter are not supported".into(),
        )),
    }
}
