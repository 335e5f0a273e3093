//! One function per subcommand. Each validates its inputs through the library
//! constructors, then fills a [`Table`].

use std::f64::consts::PI;

use rayon::prelude::*;
use rydcat::atomic::AtomModel;
use rydcat::constants::EV;
use rydcat::decoherence::{
    f_dc, f_de, f_lost, flip_probability, p_bbr_zero, BranchingModel, DecayParams,
};
use rydcat::dressing::DressingParams;
use rydcat::inhomogeneity::{
    build_interactions_with, f_ih_exact, f_ih_perturbative, Lattice, EXACT_MAX_ATOMS,
};
use rydcat::kerr::{
    best_z_rotation, evolve_cat_units, f_nl, revival_fidelity, w_for_target_fnl,
    yurke_stoler_target, Model,
};
use rydcat::metrology::{
    min_detectable_sigma, phonon_leakage, BaselineOneOverE, EnergyCatSpec, InverseN, MotionParams,
    NoiseModel, SigmaBound, WaitingTimePolicy,
};
use rydcat::scaling::{
    default_geometry, level_rates, max_cat_size, FidelityBudget, WStarTable, N_CEILING, N_FLOOR,
};
use rydcat::spinsim::{css_state, fidelity, husimi_grid, ideal_cat, CssParams, IdealCatParams};

use crate::config::{Params, Sizes};
use crate::output::{Cell, Table};
use crate::Failure;

const MHZ: f64 = 2e6 * PI;
const HZ: f64 = 2.0 * PI;

const DEFAULT_RABI_MHZ: f64 = 15.0;
const DEFAULT_DETUNING_MHZ: f64 = 270.0;
const DEFAULT_LEVEL: u64 = 80;

pub struct Context<'a> {
    pub params: &'a Params,
    pub atom: &'a AtomModel,
}

type Out = Result<Table, Failure>;

fn sizes(p: &Option<Sizes>, default: &str) -> Sizes {
    p.clone()
        .unwrap_or_else(|| default.parse().expect("default sizes"))
}

fn atoms(ctx: &Context, default: &str, points: Option<usize>) -> Result<Vec<usize>, Failure> {
    let v = sizes(&ctx.params.atoms, default)
        .expand(ctx.params.points.or(points), ctx.params.step.unwrap_or(1));
    if v.contains(&0) {
        return Err(Failure::validation("N", "atom numbers must be positive"));
    }
    Ok(v.into_iter().map(|n| n as usize).collect())
}

fn levels(ctx: &Context, default: &str, step: usize) -> Result<Vec<u32>, Failure> {
    let v = sizes(&ctx.params.level, default).expand(None, ctx.params.step.unwrap_or(step));
    v.into_iter()
        .map(|n| {
            u32::try_from(n).map_err(|_| Failure::validation("n", format!("{n} out of range")))
        })
        .collect()
}

fn single_level(ctx: &Context) -> Result<u32, Failure> {
    let v = levels(ctx, &DEFAULT_LEVEL.to_string(), 1)?;
    match v.as_slice() {
        [n] => Ok(*n),
        _ => Err(Failure::validation(
            "n",
            "this subcommand takes a single principal number",
        )),
    }
}

fn temperatures(ctx: &Context, default: &[f64]) -> Vec<f64> {
    ctx.params
        .temperature
        .clone()
        .unwrap_or_else(|| default.to_vec())
}

fn single_temperature(ctx: &Context, default: f64) -> Result<f64, Failure> {
    match temperatures(ctx, &[default]).as_slice() {
        [t] => Ok(*t),
        _ => Err(Failure::validation(
            "T",
            "this subcommand takes a single temperature",
        )),
    }
}

fn model(ctx: &Context) -> Result<Model, Failure> {
    Ok(ctx
        .params
        .model
        .as_deref()
        .unwrap_or("exact")
        .parse::<Model>()?)
}

/// Dressing parameters from the Rabi frequency and detuning at level n.
fn dressing(ctx: &Context, n: u32) -> Result<DressingParams, Failure> {
    let p = ctx.params;
    let c6 = ctx.atom.data().c6(n)?;
    Ok(DressingParams::new(
        MHZ * p.rabi_mhz.unwrap_or(DEFAULT_RABI_MHZ),
        MHZ * p.detuning_mhz.unwrap_or(DEFAULT_DETUNING_MHZ),
        n,
        c6,
    )?)
}

/// Dressing parameters at fixed w, keeping the configured detuning.
fn dressing_at_w(ctx: &Context, n: u32, w: f64) -> Result<DressingParams, Failure> {
    let c6 = ctx.atom.data().c6(n)?;
    Ok(DressingParams::from_w(
        w,
        MHZ * ctx.params.detuning_mhz.unwrap_or(DEFAULT_DETUNING_MHZ),
        n,
        c6,
    )?)
}

pub fn cat_evolve(ctx: &Context) -> Out {
    let n_atoms = atoms(ctx, "100", None)?;
    let w = ctx.params.w.unwrap_or(0.1);
    let model = model(ctx)?;
    let x_max = ctx.params.x_max.unwrap_or(2.0);
    let points = ctx.params.time_points.unwrap_or(41);
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Failure::validation("x-max", "must be positive"));
    }
    if points < 2 {
        return Err(Failure::validation("time-points", "need at least 2"));
    }
    let params = dressing_at_w(ctx, single_level(ctx)?, w)?;
    let start_params = CssParams::new(PI / 2.0, 0.0)?;
    let mut t = Table::new(&[
        "N",
        "x",
        "time",
        "fidelity_initial",
        "revival",
        "fidelity_cat",
        "mean_excitation",
    ]);
    for n in n_atoms {
        let start = css_state(n, &start_params)?;
        let cat = ideal_cat(
            n,
            &yurke_stoler_target(&start_params, &params.checked_for(n))?,
        )?;
        for i in 0..points {
            let x = x_max * i as f64 / (points - 1) as f64;
            let psi = evolve_cat_units(&start, w, x, model);
            t.push(vec![
                n.into(),
                x.into(),
                (x * params.tau_c()).into(),
                fidelity(&start, &psi)?.into(),
                best_z_rotation(&start, &psi)?.1.into(),
                fidelity(&cat, &psi)?.into(),
                psi.mean_excitation().into(),
            ]);
        }
    }
    Ok(t)
}

pub fn fnl_scan(ctx: &Context) -> Out {
    let n_atoms = atoms(ctx, "20..200", Some(8))?;
    let target = ctx.params.target.unwrap_or(0.8);
    if !(target > 0.5 && target < 1.0) {
        return Err(Failure::validation(
            "target",
            format!("must lie in (0.5, 1), got {target}"),
        ));
    }
    let rows = n_atoms
        .par_iter()
        .map(|&n| {
            let w = w_for_target_fnl(n, target)?;
            let r = f_nl(n, w)?;
            Ok(vec![
                n.into(),
                w.into(),
                r.fidelity.into(),
                r.time_factor.into(),
            ])
        })
        .collect::<Result<Vec<_>, rydcat::Error>>()?;
    let mut t = Table::new(&["N", "w", "f_nl", "time_factor"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn revival(ctx: &Context) -> Out {
    let n_atoms = atoms(ctx, "10,50,200", None)?;
    let w = ctx.params.w.unwrap_or(0.1);
    if !(w > 0.0 && w < 0.5) {
        return Err(Failure::validation(
            "w",
            format!("must lie in (0, 0.5), got {w}"),
        ));
    }
    let rows = n_atoms
        .par_iter()
        .map(|&n| {
            let start = css_state(n, &CssParams::new(PI / 2.0, 0.0)?)?;
            let kerr = best_z_rotation(&start, &evolve_cat_units(&start, w, 2.0, Model::Kerr))?.1;
            Ok(vec![
                n.into(),
                w.into(),
                kerr.into(),
                revival_fidelity(n, w)?.into(),
            ])
        })
        .collect::<Result<Vec<_>, rydcat::Error>>()?;
    let mut t = Table::new(&["N", "w", "kerr_revival", "exact_revival"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn inhomogeneity(ctx: &Context) -> Out {
    let side = ctx.params.side.unwrap_or(5);
    let spacing = ctx.params.spacing_nm.unwrap_or(200.0) * 1e-9;
    let ratios = ctx
        .params
        .ratio
        .clone()
        .unwrap_or_else(|| vec![0.1, 0.2, 0.3, 0.4]);
    let params = dressing(ctx, single_level(ctx)?)?;
    let lattice = Lattice::cubic(side, spacing)?;
    let diagonal = lattice
        .space_diagonal()
        .filter(|d| *d > 0.0)
        .ok_or_else(|| Failure::validation("side", "need at least 2 atoms per edge"))?;
    let chi0 = params.chi0();
    let tau_c = params.tau_c();
    let mut t = Table::new(&[
        "N",
        "D_over_Rb",
        "r_b",
        "f_ih_2",
        "f_ih_3",
        "f_ih_exact",
        "order_ratio",
    ]);
    for ratio in ratios {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Failure::validation(
                "ratio",
                format!("must be positive, got {ratio}"),
            ));
        }
        let r_b = diagonal / ratio;
        let m = build_interactions_with(&lattice, chi0, r_b)?;
        let second = f_ih_perturbative(&m, tau_c, 2)?;
        let third = f_ih_perturbative(&m, tau_c, 3)?;
        let exact = if lattice.len() <= EXACT_MAX_ATOMS {
            Some(f_ih_exact(&m, tau_c)?)
        } else {
            None
        };
        t.push(vec![
            lattice.len().into(),
            ratio.into(),
            r_b.into(),
            second.fidelity.into(),
            third.fidelity.into(),
            exact.into(),
            third.order_ratio.into(),
        ]);
    }
    Ok(t)
}

pub fn lifetimes(ctx: &Context) -> Out {
    let ns = levels(ctx, "40..100", 10)?;
    let rows = ns
        .par_iter()
        .map(|&n| {
            let level = ctx.atom.level(rydcat::scaling::TARGET_SERIES, n)?;
            let life = ctx.atom.lifetime(&level)?;
            let top = life
                .channels
                .iter()
                .max_by(|a, b| a.rate.total_cmp(&b.rate))
                .expect("at least one channel");
            Ok(vec![
                n.into(),
                level.n_star.into(),
                life.tau.into(),
                life.gamma.into(),
                top.label.clone().into(),
                top.fraction.into(),
            ])
        })
        .collect::<Result<Vec<_>, rydcat::Error>>()?;
    let mut t = Table::new(&[
        "n",
        "n_star",
        "tau",
        "gamma",
        "dominant_channel",
        "dominant_fraction",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn bbr(ctx: &Context) -> Out {
    let ns = levels(ctx, "80", 1)?;
    let temps = temperatures(ctx, &[300.0, 95.0, 3.0]);
    let jobs: Vec<(u32, f64)> = ns
        .iter()
        .flat_map(|&n| temps.iter().map(move |&t| (n, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, temp)| {
            let r = level_rates(ctx.atom, n, temp)?;
            Ok(vec![
                n.into(),
                temp.into(),
                r.gamma_s.into(),
                r.gamma_bbr.into(),
                (r.gamma_bbr / r.gamma_s).into(),
                (r.gamma_bbr / (r.gamma_s + r.gamma_bbr)).into(),
            ])
        })
        .collect::<Result<Vec<_>, rydcat::Error>>()?;
    let mut t = Table::new(&[
        "n",
        "T",
        "gamma_s",
        "gamma_bbr",
        "bbr_over_spontaneous",
        "bbr_fraction",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn decoherence(ctx: &Context) -> Out {
    let n_atoms = atoms(ctx, "10,40,160", None)?;
    let n = single_level(ctx)?;
    let temp = single_temperature(ctx, 3.0)?;
    let params = dressing(ctx, n)?;
    let rates = level_rates(ctx.atom, n, temp)?;
    let branching = BranchingModel::default();
    let rows = n_atoms
        .par_iter()
        .map(|&na| {
            let decay = DecayParams::new(
                rates.gamma_s + rates.gamma_bbr,
                params.w(),
                params.tau_c(),
                na,
            )?;
            Ok(vec![
                na.into(),
                f_de(na, &params)?.into(),
                f_lost(na, &params)?.into(),
                f_dc(&decay).into(),
                flip_probability(&decay, &branching).into(),
                p_bbr_zero(na, params.w(), rates.gamma_bbr, params.tau_c())?.into(),
            ])
        })
        .collect::<Result<Vec<_>, rydcat::Error>>()?;
    let mut t = Table::new(&[
        "N",
        "f_de",
        "f_lost",
        "f_dc",
        "flip_probability",
        "p_bbr_zero",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn catsize(ctx: &Context) -> Out {
    let p = ctx.params;
    let ns = levels(ctx, "46..122", 2)?;
    let temp = single_temperature(ctx, 3.0)?;
    let budget = FidelityBudget::new(
        p.budget_nl.unwrap_or(0.7),
        p.budget_ih.unwrap_or(0.99),
        p.fdc.unwrap_or(0.8),
        temp,
    )?;
    let s_character = p.s_character.unwrap_or(0.9);
    let geometry = default_geometry(budget.f_ih_target)?;
    let table = WStarTable::build(
        budget.f_nl_target,
        N_FLOOR,
        N_CEILING,
        p.table_points.unwrap_or(24),
    )?;
    let rows = ns
        .par_iter()
        .map(|&n| {
            let r = max_cat_size(ctx.atom, n, &budget, &table, &geometry, s_character)?;
            Ok(vec![
                r.n.into(),
                r.n_max.into(),
                r.n_root.into(),
                r.binding.label().into(),
                r.delta.into(),
                r.w.into(),
                r.tau_c.into(),
                r.r_b.into(),
                r.d.into(),
                r.gamma_s.into(),
                r.gamma_bbr.into(),
            ])
        })
        .collect::<Result<Vec<_>, rydcat::Error>>()?;
    let mut t = Table::new(&[
        "n",
        "N_max",
        "N_root",
        "binding",
        "delta",
        "w",
        "tau_c",
        "r_b",
        "D",
        "gamma_s",
        "gamma_bbr",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn sigma_bound(ctx: &Context) -> Out {
    let p = ctx.params;
    let n_atoms = atoms(ctx, "165", None)?;
    let delta_e = p.delta_e_ev.unwrap_or(1.8) * EV;
    let noise = NoiseModel::new(
        p.loss_rate.unwrap_or(0.01),
        HZ * p.linewidth_hz.unwrap_or(0.01),
        HZ * p.uncorrelated_hz.unwrap_or(0.0),
        0.0,
    )?;
    let specs = n_atoms
        .iter()
        .map(|&n| EnergyCatSpec::new(n, delta_e))
        .collect::<Result<Vec<_>, _>>()?;
    let policy: Box<dyn WaitingTimePolicy> = match p.policy.as_deref().unwrap_or("baseline") {
        "baseline" => Box::new(BaselineOneOverE),
        "inverse-n" => {
            let reference = specs[0];
            let t_ref = BaselineOneOverE
                .waiting_time(&reference, &noise)?
                .ok_or_else(|| {
                    Failure::validation("policy", "inverse-n needs a finite reference time")
                })?;
            Box::new(InverseN {
                n_ref: reference.n_atoms,
                t_ref,
            })
        }
        other => {
            return Err(Failure::validation(
                "policy",
                format!("expected baseline or inverse-n, got {other}"),
            ))
        }
    };
    let mut t = Table::new(&[
        "N",
        "total_energy_ev",
        "t_star",
        "sigma_min",
        "baseline_visibility",
    ]);
    for spec in specs {
        let row = match min_detectable_sigma(&spec, &noise, policy.as_ref())? {
            SigmaBound::Bounded {
                t_star,
                sigma_min,
                baseline_visibility,
                ..
            } => vec![t_star.into(), sigma_min.into(), baseline_visibility.into()],
            SigmaBound::Unbounded => vec![Cell::Missing, Cell::Missing, Cell::Num(1.0)],
        };
        let mut full = vec![spec.n_atoms.into(), (spec.total_energy() / EV).into()];
        full.extend(row);
        t.push(full);
    }
    Ok(t)
}

pub fn husimi(ctx: &Context) -> Out {
    let n = match atoms(ctx, "100", None)?.as_slice() {
        [n] => *n,
        _ => {
            return Err(Failure::validation(
                "N",
                "husimi takes a single atom number",
            ))
        }
    };
    let grid = ctx.params.grid.unwrap_or(48);
    let state = match ctx.params.state.as_deref().unwrap_or("cat") {
        "cat" => ideal_cat(n, &IdealCatParams::new(PI / 2.0, 0.0, PI / 2.0)?)?,
        "css" => css_state(n, &CssParams::new(PI / 2.0, 0.0)?)?,
        other => {
            return Err(Failure::validation(
                "state",
                format!("expected cat or css, got {other}"),
            ))
        }
    };
    let mut t = Table::new(&["theta", "phi", "weight", "q"]);
    for (theta, phi, weight, q) in husimi_grid(&state, grid, 2 * grid)? {
        t.push(vec![theta.into(), phi.into(), weight.into(), q.into()]);
    }
    Ok(t)
}

pub fn phonon(ctx: &Context) -> Out {
    let p = ctx.params;
    let m = MotionParams::new(
        HZ * p.clock_rabi_hz.unwrap_or(1e3),
        p.lamb_dicke.unwrap_or(0.1),
        HZ * p.trap_hz.unwrap_or(400e3),
    )?;
    let r = phonon_leakage(&m)?;
    let mut t = Table::new(&["lamb_dicke", "exact", "perturbative", "sudden_switch"]);
    t.push(vec![
        m.lamb_dicke.into(),
        r.exact.into(),
        r.perturbative.into(),
        r.sudden_switch.into(),
    ]);
    Ok(t)
}
