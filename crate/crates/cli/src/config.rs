//! Declarative run configuration (TOML, or JSON as an alternative).

use std::path::Path;

use liouville_sync::dynamics::MethodChoice;
use liouville_sync::linalg::{c, CMat, C64};
use liouville_sync::models::{self, HubbardParams, Spin1Params};
use liouville_sync::operator::{embed_product, fermion_operators, pauli_x, pauli_y, pauli_z, sigma_minus, sigma_plus, spin_matrices};
use liouville_sync::perturbation::ZenoAxis;
use liouville_sync::random::random_hermitian;
use liouville_sync::{HilbertSpace, LindbladModel, Operator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    /// Structural tolerance for symmetry and commutant searches.
    pub tol: Option<f64>,
    pub model: ModelSpec,
    pub evolve: Option<EvolveSpec>,
    pub sync: Option<SyncSpec>,
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PerSite {
    Uniform(f64),
    Sites(Vec<f64>),
}

impl PerSite {
    fn expand(&self, n: usize) -> Vec<f64> {
        match self {
            PerSite::Uniform(x) => vec![*x; n],
            PerSite::Sites(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Coeff {
    fn value(&self) -> C64 {
        match self {
            Coeff::Real(x) => c(*x, 0.0),
            Coeff::Complex([re, im]) => c(*re, *im),
        }
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::Real(1.0)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SiteOp {
    pub site: usize,
    pub op: String,
}

/// `coeff · Π op_site`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default)]
    pub coeff: Coeff,
    pub ops: Vec<SiteOp>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    XxzLoss {
        delta: f64,
        b: f64,
        gamma: f64,
    },
    Hubbard {
        n_sites: usize,
        u: PerSite,
        eps: PerSite,
        b: PerSite,
        gamma_minus: PerSite,
        gamma_plus: PerSite,
        gamma_z: PerSite,
    },
    Spin1Pair {
        omega_a: f64,
        omega_b: f64,
        eps: f64,
        gamma_u: [f64; 2],
        gamma_d: [f64; 2],
    },
    NegativeControl {
        n_qubits: usize,
        gamma: f64,
        /// Seed of the random Hamiltonian; the run seed when absent.
        h_seed: Option<u64>,
    },
    Custom {
        sites: Vec<usize>,
        #[serde(default)]
        hamiltonian: Vec<Term>,
        #[serde(default)]
        jumps: Vec<JumpSpec>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    RandomMixed,
    RandomPure,
    Basis { digits: Vec<usize> },
    Stationary,
    MaximallyMixed,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub op: String,
    pub sites: Vec<usize>,
    pub label: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSpec {
    pub initial: InitialState,
    pub t_end: f64,
    #[serde(default = "default_n_times")]
    pub n_times: usize,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub bloch_sites: Vec<usize>,
}

fn default_n_times() -> usize {
    401
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SyncSpec {
    pub op: String,
    /// All pairs of equal-dimension sites when absent.
    pub pairs: Option<Vec<[usize; 2]>>,
    pub tol: Option<f64>,
    pub tau: Option<f64>,
    pub window: Option<f64>,
    pub controlled_by: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VaryMode {
    #[default]
    Add,
    Set,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Identity,
    Sqrt,
}

/// One builder parameter driven by the sweep variable `x`:
/// `add` gives `base + coeff·f(x)`, `set` gives `coeff·f(x)`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Vary {
    pub param: String,
    pub index: Option<usize>,
    #[serde(default)]
    pub mode: VaryMode,
    #[serde(default = "one")]
    pub coeff: f64,
    #[serde(default)]
    pub transform: Transform,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    Track {
        lambda0: [f64; 2],
        s_min: f64,
        #[serde(default = "two")]
        decades: usize,
        #[serde(default = "twelve")]
        per_decade: usize,
        #[serde(default)]
        vary: Vec<Vary>,
        /// Hamiltonian perturbation `H + s·V`.
        #[serde(default)]
        perturbation: Vec<Term>,
    },
    Zeno {
        grid: Vec<f64>,
        #[serde(default = "gamma_axis")]
        axis: ZenoAxis,
        target_frequency: f64,
        vary: Vec<Vary>,
    },
}

fn two() -> usize {
    2
}

fn twelve() -> usize {
    12
}

fn gamma_axis() -> ZenoAxis {
    ZenoAxis::Gamma
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|x| x.eq_ignore_ascii_case("json"));
        Config::parse(&text, is_json)
    }

    pub fn parse(text: &str, json: bool) -> Result<Config, CliError> {
        let cfg: Config = if json {
            serde_json::from_str(text).map_err(|e| CliError::Schema(format!("invalid JSON config: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| CliError::Schema(format!("invalid TOML config: {e}")))?
        };
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {}, this build reads {SCHEMA_VERSION}",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }
}

fn schema(e: liouville_sync::Error) -> CliError {
    CliError::Schema(e.to_string())
}

/// Local matrix named `name` on a site of dimension `d`.
pub fn local_operator(name: &str, d: usize) -> Result<CMat, CliError> {
    if name == "id" {
        return Ok(CMat::identity(d, d));
    }
    if let Some(rest) = name.strip_prefix('|') {
        let parse = || -> Option<(usize, usize)> {
            let (ket, bra) = rest.split_once("><")?;
            Some((ket.parse().ok()?, bra.strip_suffix('|')?.parse().ok()?))
        };
        let (i, j) = parse().ok_or_else(|| CliError::Schema(format!("malformed ket-bra {name:?}, expected |i><j|")))?;
        if i >= d || j >= d {
            return Err(CliError::Schema(format!("{name} exceeds site dimension {d}")));
        }
        let mut m = CMat::zeros(d, d);
        m[(i, j)] = c(1.0, 0.0);
        return Ok(m);
    }
    let pauli = match name {
        "sx" => Some(pauli_x()),
        "sy" => Some(pauli_y()),
        "sz" => Some(pauli_z()),
        "sp" => Some(sigma_plus()),
        "sm" => Some(sigma_minus()),
        _ => None,
    };
    if let Some(m) = pauli {
        if d != 2 {
            return Err(CliError::Schema(format!("Pauli operator {name} needs a qubit site, site has dimension {d}")));
        }
        return Ok(m);
    }
    if let Some(rest) = name.strip_prefix("fermi_") {
        if d != 4 {
            return Err(CliError::Schema(format!("{name} needs a four-dimensional fermionic site, got {d}")));
        }
        let f = fermion_operators(2).map_err(schema)?;
        let sp = (&f.c_dag(0) * f.c(1)).into_matrix();
        let sm = sp.adjoint();
        let (nu, nd) = ((&f.c_dag(0) * f.c(0)).into_matrix(), (&f.c_dag(1) * f.c(1)).into_matrix());
        return match rest {
            "sp" => Ok(sp),
            "sm" => Ok(sm),
            "sx" => Ok((&sp + &sm) * c(0.5, 0.0)),
            "sy" => Ok((&sp - &sm) * c(0.0, -0.5)),
            "sz" => Ok((&nu - &nd) * c(0.5, 0.0)),
            "n" => Ok(&nu + &nd),
            _ => Err(CliError::Schema(format!("unknown fermionic operator {name}"))),
        };
    }
    let spin = || spin_matrices((d as f64 - 1.0) / 2.0).map_err(schema);
    match name {
        "Sx" => Ok(spin()?.x()),
        "Sy" => Ok(spin()?.y()),
        "Sz" => Ok(spin()?.z),
        "S+" => Ok(spin()?.plus),
        "S-" => Ok(spin()?.minus),
        _ => Err(CliError::Schema(format!("unknown operator {name:?}"))),
    }
}

fn term_sum(space: &HilbertSpace, terms: &[Term]) -> Result<Operator, CliError> {
    let dims = space.site_dims();
    let mut acc = Operator::zeros(space);
    for t in terms {
        let mut mats = Vec::with_capacity(t.ops.len());
        for so in &t.ops {
            let d = *dims
                .get(so.site)
                .ok_or_else(|| CliError::Schema(format!("site {} out of range for {} sites", so.site, dims.len())))?;
            mats.push((so.site, local_operator(&so.op, d)?));
        }
        let factors: Vec<(usize, &CMat)> = mats.iter().map(|(s, m)| (*s, m)).collect();
        let prod = embed_product(&factors, space).map_err(schema)?;
        acc = &acc + &prod.scale(t.coeff.value());
    }
    Ok(acc)
}

impl ModelSpec {
    pub fn build(&self, seed: u64) -> Result<LindbladModel, CliError> {
        match self {
            ModelSpec::XxzLoss { delta, b, gamma } => Ok(models::xxz_loss_model(*delta, *b, *gamma).map_err(schema)?.0),
            ModelSpec::Hubbard { n_sites, u, eps, b, gamma_minus, gamma_plus, gamma_z } => {
                let n = *n_sites;
                let p = HubbardParams {
                    n_sites: n,
                    u: u.expand(n),
                    eps: eps.expand(n),
                    b: b.expand(n),
                    gamma_minus: gamma_minus.expand(n),
                    gamma_plus: gamma_plus.expand(n),
                    gamma_z: gamma_z.expand(n),
                };
                Ok(models::hubbard_model(&p).map_err(schema)?.0)
            }
            ModelSpec::Spin1Pair { omega_a, omega_b, eps, gamma_u, gamma_d } => {
                let p = Spin1Params { omega_a: *omega_a, omega_b: *omega_b, eps: *eps, gamma_u: *gamma_u, gamma_d: *gamma_d };
                Ok(models::spin1_pair_model(&p).map_err(schema)?.0)
            }
            ModelSpec::NegativeControl { n_qubits, gamma, h_seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(h_seed.unwrap_or(seed));
                let d = 1usize.checked_shl(*n_qubits as u32).filter(|_| *n_qubits <= 4).unwrap_or(0);
                if d == 0 {
                    return Err(CliError::Schema(format!("negative control supports 1..=4 qubits, got {n_qubits}")));
                }
                let h = random_hermitian(d, &mut rng);
                models::negative_control_model(*n_qubits, &h, *gamma).map_err(schema)
            }
            ModelSpec::Custom { sites, hamiltonian, jumps } => {
                let space = HilbertSpace::new(sites.clone()).map_err(schema)?;
                let h = term_sum(&space, hamiltonian)?;
                let ls = jumps.iter().map(|j| term_sum(&space, &j.terms)).collect::<Result<Vec<_>, _>>()?;
                LindbladModel::new(h, ls, "custom").map_err(schema)
            }
        }
    }

    /// Copy with builder parameters driven by `x`.
    pub fn varied(&self, vary: &[Vary], x: f64) -> Result<ModelSpec, CliError> {
        let mut value = serde_json::to_value(self).map_err(|e| CliError::Schema(e.to_string()))?;
        let n_sites = value.get("n_sites").and_then(|v| v.as_u64()).map(|n| n as usize);
        for v in vary {
            let fx = match v.transform {
                Transform::Identity => x,
                Transform::Sqrt => x.sqrt(),
            };
            let slot = value
                .get_mut(&v.param)
                .ok_or_else(|| CliError::Schema(format!("builder has no parameter {:?}", v.param)))?;
            let target = match v.index {
                None => slot,
                Some(i) => {
                    if let Some(x) = slot.as_f64() {
                        let n = n_sites.unwrap_or(i + 1).max(i + 1);
                        *slot = serde_json::json!(vec![x; n]);
                    }
                    slot.get_mut(i)
                        .ok_or_else(|| CliError::Schema(format!("index {i} out of range for {:?}", v.param)))?
                }
            };
            let base = target
                .as_f64()
                .ok_or_else(|| CliError::Schema(format!("parameter {:?} is not numeric", v.param)))?;
            let new = match v.mode {
                VaryMode::Add => base + v.coeff * fx,
                VaryMode::Set => v.coeff * fx,
            };
            *target = serde_json::json!(new);
        }
        serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))
    }
}

/// Hamiltonian perturbation `H + s·V` on top of a built model.
pub fn perturbed(model: &LindbladModel, terms: &[Term], s: f64) -> Result<LindbladModel, CliError> {
    if terms.is_empty() {
        return Ok(model.clone());
    }
    let v = term_sum(&model.space, terms)?;
    let h = &model.hamiltonian + &v.scale(c(s, 0.0));
    Ok(LindbladModel::new(h, model.jumps.clone(), model.label.clone()).map_err(schema)?.with_exchange(model.exchange))
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouville_sync::linalg;

    #[test]
    fn local_operators_have_expected_algebra() {
        let sp = local_operator("fermi_sp", 4).unwrap();
        let sz = local_operator("fermi_sz", 4).unwrap();
        let comm = &sz * &sp - &sp * &sz;
        assert!(linalg::frob(&(comm - &sp)) < 1e-14);
        let sx = local_operator("Sx", 3).unwrap();
        assert!((sx.trace().norm()) < 1e-14 && (linalg::frob(&sx).powi(2) - 2.0).abs() < 1e-12);
        let kb = local_operator("|1><0|", 3).unwrap();
        assert_eq!(kb[(1, 0)], c(1.0, 0.0));
        assert!(local_operator("sx", 3).is_err());
        assert!(local_operator("|3><0|", 3).is_err());
        assert!(local_operator("|1><0", 3).is_err());
    }

    #[test]
    fn vary_patches_per_site_parameters() {
        let spec = ModelSpec::Hubbard {
            n_sites: 2,
            u: PerSite::Uniform(1.0),
            eps: PerSite::Uniform(0.3),
            b: PerSite::Uniform(0.7),
            gamma_minus: PerSite::Uniform(0.4),
            gamma_plus: PerSite::Uniform(0.4),
            gamma_z: PerSite::Uniform(0.3),
        };
        let vary = [
            Vary { param: "b".into(), index: Some(0), mode: VaryMode::Add, coeff: 1.0, transform: Transform::Identity },
            Vary { param: "b".into(), index: Some(1), mode: VaryMode::Add, coeff: -1.0, transform: Transform::Identity },
            Vary { param: "u".into(), index: None, mode: VaryMode::Set, coeff: 2.0, transform: Transform::Sqrt },
        ];
        match spec.varied(&vary, 0.25).unwrap() {
            ModelSpec::Hubbard { b: PerSite::Sites(b), u: PerSite::Uniform(u), .. } => {
                assert!((b[0] - 0.95).abs() < 1e-15 && (b[1] - 0.45).abs() < 1e-15);
                assert_eq!(u, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = Vary { param: "nope".into(), index: None, mode: VaryMode::Add, coeff: 1.0, transform: Transform::Identity };
        assert!(spec.varied(&[bad], 0.1).is_err());
    }
}
