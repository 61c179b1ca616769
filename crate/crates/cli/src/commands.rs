//! Execution of each subcommand into a [`Table`].

use wealthstat::bitcoin::{self, BitcoinModel};
use wealthstat::convolve;
use wealthstat::dist::{self, AtomicKind, Cutoff, Pmf, SpeciesSpec};
use wealthstat::inequality as ineq;
use wealthstat::mc::{self, BigUint, Constraint};
use wealthstat::WealthSystem;

use crate::cli::*;
use crate::output::{Cell, Table};
use crate::CliError;

pub fn run(command: &Command, seed: u64) -> Result<Table, CliError> {
    match command {
        Command::Dist(a) => dist_cmd(a),
        Command::Gini(a) => gini_cmd(a),
        Command::Lorenz(a) => lorenz_cmd(a),
        Command::Entropy(a) => entropy_cmd(a),
        Command::Convolve(a) => convolve_cmd(a),
        Command::Banks(a) => banks_cmd(a),
        Command::Bitcoin(a) => bitcoin_cmd(a),
        Command::Simulate(a) => simulate_cmd(a, seed),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("missing required parameter `--{key}`"))
}

fn parse_cutoff(key: &str, s: &str) -> Result<Cutoff, CliError> {
    s.parse().map_err(|e| CliError::Config(format!("invalid `--{key}`: {e}")))
}

/// `lo:hi:n`, log-spaced and inclusive of both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("invalid `--grid` `{s}`: expected lo:hi:n with 0 < lo <= hi and n >= 1"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && n >= 1 && hi.is_finite()) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

fn means(m: Option<f64>, grid: Option<&str>) -> Result<Vec<f64>, CliError> {
    match (m, grid) {
        (_, Some(g)) => parse_grid(g),
        (Some(m), None) => Ok(vec![m]),
        (None, None) => Err(CliError::Config("missing required parameter `--m` (or `--grid`)".into())),
    }
}

fn atomic_kind(kind: DistKind) -> Option<AtomicKind> {
    match kind {
        DistKind::Poisson => Some(AtomicKind::Poisson),
        DistKind::Bosonic => Some(AtomicKind::Bosonic),
        DistKind::Fermionic => Some(AtomicKind::Fermionic),
        _ => None,
    }
}

fn pmf_table(pmf: &Pmf) -> Table {
    let mut t = Table::new(&["k", "p"]);
    for (k, &p) in pmf.probs().iter().enumerate() {
        t.push(vec![k.into(), p.into()]);
    }
    t.note("mean", pmf.mean());
    t.note("truncation_mass", pmf.truncation_mass());
    t
}

fn dist_cmd(a: &DistArgs) -> Result<Table, CliError> {
    let cutoff = parse_cutoff("cutoff", &a.cutoff)?;
    if a.tail_above_mean {
        let kind = atomic_kind(a.kind)
            .ok_or_else(|| CliError::Config("`--tail-above-mean` needs an atomic `--kind` (poisson, bosonic, fermionic)".into()))?;
        let mut t = Table::new(&["m", "tail_above_mean"]);
        for m in means(a.m, a.grid.as_deref())? {
            t.push(vec![m.into(), ineq::tail_mass_above_mean(kind, m)?.into()]);
        }
        return Ok(t);
    }
    let pmf = match a.kind {
        DistKind::TruncatedPoisson => dist::truncated_poisson(a.beta.ok_or_else(|| missing("beta"))?, cutoff, a.tail_tol)?,
        DistKind::TruncatedGeometric => dist::truncated_geometric(a.beta.ok_or_else(|| missing("beta"))?, cutoff, a.tail_tol)?,
        k => dist::atomic_pmf(atomic_kind(k).expect("atomic"), a.m.ok_or_else(|| missing("m"))?, a.tail_tol)?,
    };
    Ok(pmf_table(&pmf))
}

fn gini_cmd(a: &GiniArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["m", "gini"]);
    for m in means(a.m, a.grid.as_deref())? {
        let g = match a.kind {
            GiniKind::Poisson => ineq::gini_poisson(m)?,
            GiniKind::Bosonic => ineq::gini_bosonic(m)?,
            GiniKind::Fermionic => ineq::gini_fermionic(m)?,
            GiniKind::BosonicLorenz => ineq::gini_bosonic_lorenz(m)?,
        };
        t.push(vec![m.into(), g.into()]);
    }
    Ok(t)
}

fn lorenz_pmf(kind: LorenzKind, m: f64) -> Result<Pmf, CliError> {
    let kind = match kind {
        LorenzKind::Poisson => AtomicKind::Poisson,
        LorenzKind::Geometric => AtomicKind::Bosonic,
        LorenzKind::Fermionic => AtomicKind::Fermionic,
    };
    Ok(dist::atomic_pmf(kind, m, 1e-15)?)
}

fn lorenz_cmd(a: &LorenzArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["x", "y"]);
    if a.breakpoints {
        let curve = ineq::lorenz_from_pmf(&lorenz_pmf(a.kind, a.m)?)?;
        for &(x, y) in curve.points() {
            t.push(vec![x.into(), y.into()]);
        }
        t.note("gini", curve.gini());
        return Ok(t);
    }
    if a.points == 0 {
        return Err(CliError::Config("invalid `--points`: must be at least 1".into()));
    }
    let fermi = match a.kind {
        LorenzKind::Fermionic => Some(ineq::lorenz_from_pmf(&lorenz_pmf(a.kind, a.m)?)?),
        _ => None,
    };
    let mut area = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=a.points {
        let x = i as f64 / a.points as f64;
        let y = match a.kind {
            LorenzKind::Geometric => ineq::lorenz_geometric_analytic(a.m, x)?,
            LorenzKind::Poisson => ineq::lorenz_poisson_continuous(a.m, x)?,
            LorenzKind::Fermionic => fermi.as_ref().expect("built above").y_at(x),
        };
        if let Some((x0, y0)) = prev {
            area += 0.5 * (x - x0) * (y + y0);
        }
        prev = Some((x, y));
        t.push(vec![x.into(), y.into()]);
    }
    t.note("gini_sampled", 1.0 - 2.0 * area);
    Ok(t)
}

fn entropy_cmd(a: &EntropyArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["m", "entropy"]);
    for m in means(a.m, a.grid.as_deref())? {
        let h = match a.kind {
            EntropyKind::Poisson => ineq::shannon_entropy(&dist::poisson(m, 1e-16)?),
            EntropyKind::Bosonic => {
                if !(m.is_finite() && m >= 0.0) {
                    return Err(CliError::Config(format!("invalid `--m`: must be finite and >= 0, got {m}")));
                }
                ineq::entropy_bosonic(m)
            }
            EntropyKind::Fermionic => ineq::shannon_entropy(&dist::atomic_pmf(AtomicKind::Fermionic, m, 0.0)?),
            EntropyKind::PoissonAsymptotic => {
                if !(m.is_finite() && m > 0.0) {
                    return Err(CliError::Config(format!("invalid `--m`: must be finite and > 0, got {m}")));
                }
                ineq::entropy_poisson_asymptotic(m)
            }
        };
        t.push(vec![m.into(), h.into()]);
    }
    Ok(t)
}

/// `distinguishable:w=1:cutoff=inf:m=0.5` or `identical:w=2:cutoff=3`.
pub fn parse_species(s: &str) -> Result<SpeciesSpec, CliError> {
    let bad = |why: String| CliError::Config(format!("invalid `--species` `{s}`: {why}"));
    let mut fields = s.split(':');
    let class = fields.next().unwrap_or_default().trim().to_ascii_lowercase();
    let (mut weight, mut cutoff, mut mean) = (1u64, Cutoff::Infinite, None);
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| bad(format!("`{f}` is not key=value")))?;
        match k.trim() {
            "w" | "weight" => weight = v.trim().parse().map_err(|_| bad(format!("weight `{v}`")))?,
            "cutoff" | "lambda" => cutoff = v.parse().map_err(|e| bad(format!("{e}")))?,
            "m" | "mean" => mean = Some(v.trim().parse::<f64>().map_err(|_| bad(format!("mean `{v}`")))?),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    let spec = match class.as_str() {
        "distinguishable" | "d" => SpeciesSpec::distinguishable(weight, cutoff, mean.ok_or_else(|| bad("distinguishable species need m=".into()))?),
        "identical" | "i" => {
            if mean.is_some() {
                return Err(bad("identical species take their mean from --value-mean".into()));
            }
            SpeciesSpec::identical(weight, cutoff)
        }
        other => return Err(bad(format!("class `{other}` is not distinguishable or identical"))),
    };
    spec.map_err(|e| bad(e.to_string()))
}

fn convolve_cmd(a: &ConvolveArgs) -> Result<Table, CliError> {
    match a.law {
        ConvolveLaw::System => {
            if a.species.is_empty() {
                return Err(missing("species"));
            }
            let species = a.species.iter().map(|s| parse_species(s)).collect::<Result<Vec<_>, _>>()?;
            let sys = WealthSystem::new(species, a.value_mean)?.solve()?;
            let law = convolve::system_value_distribution(&sys, a.tail_tol, a.v_max)?;
            let mut t = if a.q.is_empty() {
                pmf_table(&law)
            } else {
                let mut t = Table::new(&["q", "series", "closed_form"]);
                for &q in &a.q {
                    t.push(vec![q.into(), law.generating_function(q).into(), convolve::generating_function(&sys, q)?.into()]);
                }
                t
            };
            if let Some(b) = sys.betabar() {
                t.note("betabar", b);
            }
            for i in 0..sys.species().len() {
                if sys.species()[i].target_mean.is_some() {
                    t.summary.push(("beta", sys.species_beta(i)?.into()));
                }
            }
            Ok(t)
        }
        ConvolveLaw::PoissonGeometric => Ok(pmf_table(&convolve::poisson_geometric_convolve(
            a.m.ok_or_else(|| missing("m"))?,
            a.mbar.ok_or_else(|| missing("mbar"))?,
            a.tail_tol,
        )?)),
        ConvolveLaw::FermionicBinomial => Ok(pmf_table(&convolve::fermionic_binomial(
            a.total.ok_or_else(|| missing("total"))?,
            a.owners.ok_or_else(|| missing("owners"))?,
            a.tail_tol,
        )?)),
    }
}

fn banks_cmd(a: &BanksArgs) -> Result<Table, CliError> {
    if let Some(debt) = a.debt {
        let law = convolve::net_balance(a.m, debt, a.banks, a.tail_tol)?;
        let mut t = Table::new(&["a", "p"]);
        for (x, p) in law.iter() {
            t.push(vec![x.into(), p.into()]);
        }
        t.note("mean", law.mean());
        t.note("truncation_mass", law.truncation_mass());
        return Ok(t);
    }
    if let Some(max) = a.sweep {
        let poisson = dist::poisson(a.m, a.tail_tol)?;
        let mut t = Table::new(&["banks", "tv_to_poisson", "gini", "mode", "mode_approx"]);
        let mut d = 1u64;
        while d <= max {
            let law = convolve::bank_convolution(a.m, d, a.tail_tol)?;
            t.push(vec![
                d.into(),
                law.tv_distance(&poisson).into(),
                ineq::gini_from_pmf(&law)?.into(),
                law.mode().into(),
                convolve::bank_mode_approx(a.m, d).into(),
            ]);
            d = match d.checked_mul(2) {
                Some(next) => next,
                None => break,
            };
        }
        return Ok(t);
    }
    let law = convolve::bank_convolution(a.m, a.banks, a.tail_tol)?;
    let mut t = pmf_table(&law);
    t.note("mode_approx", convolve::bank_mode_approx(a.m, a.banks));
    t.note("peak_approx", convolve::bank_peak_approx(a.m, a.banks));
    if law.truncation_mass() < ineq::MAX_TRUNCATION_FOR_GINI {
        t.note("gini", ineq::gini_from_pmf(&law)?);
    }
    Ok(t)
}

fn bitcoin_model(a: &BitcoinArgs) -> Result<BitcoinModel, CliError> {
    match (a.value_mean, a.betabar) {
        (Some(v), None) => Ok(BitcoinModel::from_value_mean(v, a.dbar)?),
        (None, Some(b)) => Ok(BitcoinModel::from_betabar(b, a.dbar)?),
        (None, None) => Err(CliError::Config("missing `--value-mean` or `--betabar`".into())),
        (Some(_), Some(_)) => Err(CliError::Config("give only one of `--value-mean` and `--betabar`".into())),
    }
}

fn bitcoin_cmd(a: &BitcoinArgs) -> Result<Table, CliError> {
    match a.table {
        BitcoinTable::Partitions => {
            if a.max_value > bitcoin::MAX_VALUE {
                return Err(CliError::Config(format!("invalid `--max-value`: at most {}", bitcoin::MAX_VALUE)));
            }
            let table = bitcoin::partition_numbers(a.max_value as usize);
            let mut t = Table::new(&["v", "partitions", "ln_partitions"]);
            for v in 0..=table.max_value() {
                let p = table.get(v).expect("in range");
                t.push(vec![v.into(), Cell::Text(p.to_string()), table.ln(v).expect("in range").into()]);
            }
            Ok(t)
        }
        BitcoinTable::Summary => {
            let model = bitcoin_model(a)?;
            let mut t = Table::new(&["quantity", "value"]);
            let mut row = |k: &str, v: f64| t.push(vec![k.into(), v.into()]);
            row("betabar", model.betabar);
            row("betabar_approx", bitcoin::betabar_approx(model.value_mean));
            row("value_mean", model.value_mean);
            row("dbar", model.dbar as f64);
            row("ln_zero_value_probability", model.ln_zero_value_probability());
            row("condensation_ratio", bitcoin::condensation_ratio(model.betabar, model.dbar)?);
            row("integral_approximation_error", bitcoin::integral_approximation_error(model.betabar, model.dbar));
            if let Ok(mode) = bitcoin::value_mode(model.betabar) {
                row("value_mode", mode);
                row("ln_value_mode_peak_ratio", bitcoin::ln_value_mode_peak_ratio(model.betabar));
            }
            Ok(t)
        }
        BitcoinTable::Value => {
            let model = bitcoin_model(a)?;
            let mut t = pmf_table(&bitcoin::value_distribution(&model, a.max_value)?);
            t.columns = vec!["v", "p"];
            t.note("betabar", model.betabar);
            Ok(t)
        }
        BitcoinTable::Popularity => {
            let model = bitcoin_model(a)?;
            let mut t = Table::new(&["denomination", "popularity"]);
            for d in 1..=a.denominations.min(model.dbar) {
                t.push(vec![d.into(), bitcoin::utxo_popularity(d, model.betabar).into()]);
            }
            t.note("betabar", model.betabar);
            Ok(t)
        }
    }
}

fn simulate_cmd(a: &SimulateArgs, seed: u64) -> Result<Table, CliError> {
    let kind = match a.kind {
        SimKind::Distinguishable => AtomicKind::Poisson,
        SimKind::Bosonic => AtomicKind::Bosonic,
        SimKind::Fermionic => AtomicKind::Fermionic,
    };
    if a.owners == 0 {
        return Err(CliError::Config("invalid `--owners`: must be at least 1".into()));
    }
    let empirical = mc::sample_occupancy(kind, a.units, a.owners, a.samples, seed, a.stream)?;
    let m = a.units as f64 / a.owners as f64;
    let analytic = dist::atomic_pmf(kind, m, 1e-15)?;
    let mut t = Table::new(&["k", "empirical", "analytic"]);
    for k in 0..empirical.len().max(analytic.len()) {
        t.push(vec![k.into(), empirical.get(k).into(), analytic.get(k).into()]);
    }
    t.note("tv_distance", empirical.tv_distance(&analytic));
    t.note("empirical_mean", empirical.mean());
    Ok(t)
}

fn occupancy_text(counts: &[u64]) -> String {
    counts.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn big_cell(x: &BigUint) -> Cell {
    match u64::try_from(x) {
        Ok(v) if v <= i64::MAX as u64 => Cell::Int(v as i64),
        _ => Cell::Text(x.to_string()),
    }
}

fn extremum_rows(t: &mut Table, label: &str, e: &mc::Extremum) {
    for (i, o) in e.occupancies.iter().enumerate() {
        t.push(vec![
            label.into(),
            occupancy_text(&o.counts).into(),
            big_cell(&o.omega),
            e.maximizers.contains(&i).into(),
        ]);
    }
}

fn verify_cmd(a: &VerifyArgs) -> Result<Table, CliError> {
    let mut t = Table::new(&["class", "occupancy", "omega", "maximizer"]);
    match a.case {
        VerifyCase::Intro => {
            let d = mc::enumerate_extremum(2, &SpeciesSpec::distinguishable(1, Cutoff::Infinite, 1.0)?, Constraint::Count(2))?;
            let i = mc::enumerate_extremum(2, &SpeciesSpec::identical(1, Cutoff::Infinite)?, Constraint::Count(2))?;
            extremum_rows(&mut t, "distinguishable", &d);
            extremum_rows(&mut t, "identical", &i);
            t.summary.push(("distinguishable_total", big_cell(&d.total)));
            t.summary.push(("identical_total", big_cell(&i.total)));
        }
        VerifyCase::Extremum => {
            let cutoff = parse_cutoff("cutoff", &a.cutoff)?;
            let (label, spec) = match a.class {
                ClassArg::Distinguishable => ("distinguishable", SpeciesSpec::distinguishable(1, cutoff, 0.5)?),
                ClassArg::Identical => ("identical", SpeciesSpec::identical(1, cutoff)?),
            };
            let e = mc::enumerate_extremum(a.owners, &spec, Constraint::Count(a.units))?;
            extremum_rows(&mut t, label, &e);
            t.summary.push(("total", big_cell(&e.total)));
        }
    }
    Ok(t)
}
