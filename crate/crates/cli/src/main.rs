mod io;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tropmod_core::arith::rat::{fmt_rat, fmt_vec, parse_rat};
use tropmod_core::families::{
    check_equivalence, check_marking, check_prefamily, fibre_morphism, forgetful_family, product_family, pullback_family, Family,
};
use tropmod_core::fibreprod::fibre_product;
use tropmod_core::intersection::{modification, parse_expr, point_fibre, power_divisor, RationalFunction};
use tropmod_core::matroid::{bergman_fan, parse_matroid};
use tropmod_core::moduli::quotient::quotient_fan;
use tropmod_core::moduli::{forgetful, forgetful_fibre, moduli_fan, parse_newick, MarkedTree, ModuliChart};
use tropmod_core::polyhedral::json::{map_to_json, to_json};
use tropmod_core::polyhedral::{PLMap, WeightedComplex};
use tropmod_core::Rat;

use io::{parse_chart, parse_point, read_complex, read_map, Output};

#[derive(Parser)]
#[command(name = "tropmod", version, about = "Exact computations with tropical fans, moduli of tropical curves and families")]
struct Cli {
    /// Machine-readable output, including errors.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bergman fan of a matroid (`uniform:r,m`, `graph:Kn`, `graph:n:1-2,...` or JSON flats).
    Bergman {
        #[arg(long)]
        matroid: String,
        /// Also list all faces and their incidences.
        #[arg(long)]
        faces: bool,
    },
    /// The moduli fan M_n.
    Moduli {
        #[arg(long)]
        n: usize,
        /// Use coordinates modulo the lineality space.
        #[arg(long)]
        quotient: bool,
        #[arg(long)]
        faces: bool,
    },
    /// Divisor of a rational function, e.g. `max(x1, x2 - 1, 0)`, on a complex.
    Divisor {
        complex: PathBuf,
        #[arg(long)]
        phi: String,
        /// Apply the function this many times.
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Modification of a complex along a rational function.
    Modify {
        complex: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Fibre of a map over a point of a smooth target.
    Fibre {
        map: PathBuf,
        target: PathBuf,
        /// Comma-separated rational coordinates.
        #[arg(long)]
        point: String,
        /// Smooth structure of the target: affine, bergman:R, bergman0:R or moduli:N.
        #[arg(long, default_value = "affine")]
        chart: String,
    },
    /// The forgetful map M_{n+1} -> M_n, or its fibre over a point.
    Forget {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        point: Option<String>,
    },
    /// Families of curves: `forgetful:N`, `product:N` or `pullback:MAP.json`.
    Family {
        #[command(subcommand)]
        action: FamilyCommand,
        /// Lengths of the marked leaves, one chart each.
        #[arg(long, global = true, value_delimiter = ',', default_value = "1")]
        alpha: Vec<String>,
        /// Smooth structure of the base of a pull-back family.
        #[arg(long, global = true)]
        chart: Option<String>,
    },
    /// Fibre product of two maps to a common target.
    Fibreproduct { f: PathBuf, f2: PathBuf, target: PathBuf },
    /// Run a named check on an instance; exits 0 iff every part holds.
    Verify {
        #[arg(value_enum)]
        check: verify::Check,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        matroid: Option<String>,
        /// Map for `roundtrip`: id, forget, swap, const or a map file.
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        chart: Option<String>,
        /// Element to delete, 1-based.
        #[arg(long)]
        element: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        alpha: Vec<String>,
    },
    /// Raw distance vector of a tree such as `((1:0,2:0):3/2,(3:0,4:0):0);`.
    Tree2point { tree: String },
    /// Tree of a raw distance vector over the pairs (1,2), (1,3), ..., (n-1,n).
    Point2tree {
        point: String,
        #[arg(long)]
        n: usize,
    },
    /// Check the balancing condition of a complex.
    Balance { complex: PathBuf },
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Check the family conditions and the marking.
    Check { family: String },
    /// Pull the forgetful family back along a map to M_n / L and print the projection.
    Pullback {
        #[arg(long)]
        f: PathBuf,
    },
    /// The induced map to M_n / L, one affine piece per cell of the base.
    Morphism { family: String },
    /// Compare two families over the same base.
    Equiv { family: String, family2: String },
}

fn parse_alphas(v: &[String]) -> Result<Vec<Rat>> {
    v.iter().map(|s| parse_rat(s).with_context(|| format!("bad --alpha {s:?}"))).collect()
}

/// The `n` with `dim M_n / L = d`.
fn moduli_n_of_dim(d: usize) -> Result<usize> {
    (3..64).find(|&n| n * (n - 3) / 2 == d).with_context(|| format!("{d} is not the dimension of a moduli space"))
}

fn pullback_of(path: &str, chart: Option<&str>, alphas: &[Rat]) -> Result<Family> {
    let f = read_map(path.as_ref())?;
    let n = moduli_n_of_dim(f.target_dim)?;
    let chart = parse_chart(chart.unwrap_or("affine"), f.source.ambient_dim())?;
    Ok(pullback_family(&f, &chart, n, alphas)?)
}

fn parse_family(spec: &str, chart: Option<&str>, alphas: &[Rat]) -> Result<Family> {
    let (kind, arg) = spec.split_once(':').with_context(|| format!("bad family {spec:?}"))?;
    let num = || arg.parse::<usize>().with_context(|| format!("bad family size in {spec:?}"));
    Ok(match kind {
        "forgetful" => forgetful_family(num()?, alphas)?,
        "product" => product_family(num()?)?,
        "pullback" => pullback_of(arg, chart, alphas)?,
        _ => bail!("unknown family {spec:?}; use forgetful:N, product:N or pullback:MAP.json"),
    })
}

fn complex_json(x: &WeightedComplex, faces: bool) -> Result<Value> {
    Ok(serde_json::to_value(to_json(x, faces))?)
}

fn map_json(f: &PLMap) -> Result<Value> {
    Ok(serde_json::to_value(map_to_json(f))?)
}

/// Emits a report: JSON when asked, otherwise the text.
fn report(out: &Output, value: Value, text: String) -> Result<()> {
    if out.json {
        out.emit_value(&value)
    } else {
        out.emit(&text)
    }
}

fn balance_report(out: &Output, x: &WeightedComplex) -> Result<bool> {
    let total = x.codim_one().faces.len();
    let defects = x.balancing_defects();
    let ok = total - defects.len();
    let word = if defects.is_empty() { "balanced" } else { "not balanced" };
    let bad: Vec<Value> = defects
        .iter()
        .map(|(i, d)| json!({"face": fmt_vec(&x.codim_one().faces[*i].relint_point()), "defect": fmt_vec(d)}))
        .collect();
    let mut text = format!("{word}: {ok}/{total} codim-1 cells OK");
    for b in &bad {
        text.push_str(&format!("\n  at {}: defect {}", b["face"].as_str().unwrap(), b["defect"].as_str().unwrap()));
    }
    report(out, json!({"balanced": defects.is_empty(), "ok": ok, "total": total, "failures": bad}), text)?;
    Ok(defects.is_empty())
}

fn family_command(out: &Output, action: FamilyCommand, alphas: &[Rat], chart: Option<&str>, seed: u64) -> Result<bool> {
    match action {
        FamilyCommand::Check { family } => {
            let fam = parse_family(&family, chart, alphas)?;
            let pre = check_prefamily(&fam.g, &fam.base, &fam.base_chart, fam.n())?;
            let mk = check_marking(&fam, seed)?;
            let parts = [
                ("the projection is locally surjective", pre.surjectivity.passed()),
                ("every fibre is a smooth rational curve", pre.fibre_condition_holds()),
                ("the lattice maps are onto", pre.lattice_condition_holds()),
                ("the markings are sections", mk.section_failures.is_empty()),
                ("each section meets its own leaf", mk.leaf_failures.is_empty()),
                ("sections agree on chart overlaps", mk.overlap_failures.is_empty()),
            ];
            let passed = parts.iter().all(|(_, ok)| *ok);
            let text =
                parts.iter().map(|(w, ok)| format!("{} {w}", if *ok { "ok  " } else { "FAIL" })).collect::<Vec<_>>().join("\n");
            let value = json!({
                "passed": passed,
                "fibres_checked": pre.fibres_checked,
                "sections_checked": mk.checked,
                "results": parts.iter().map(|(w, ok)| json!({"what": w, "passed": ok})).collect::<Vec<_>>(),
            });
            report(out, value, text)?;
            Ok(passed)
        }
        FamilyCommand::Pullback { f } => {
            let fam = pullback_of(f.to_str().context("non-UTF-8 path")?, chart, alphas)?;
            out.emit_value(&map_json(&fam.g)?)?;
            Ok(true)
        }
        FamilyCommand::Morphism { family } => {
            let fam = parse_family(&family, chart, alphas)?;
            out.emit_value(&map_json(&fibre_morphism(&fam, seed)?)?)?;
            Ok(true)
        }
        FamilyCommand::Equiv { family, family2 } => {
            let a = parse_family(&family, chart, alphas)?;
            let b = parse_family(&family2, chart, alphas)?;
            let r = check_equivalence(&a, &b, seed)?;
            let iso = r.is_isomorphism();
            let value = json!({
                "isomorphism": iso,
                "image_matches": r.image_matches,
                "inverse_ok": r.inverse_ok,
                "over_base": r.over_base,
                "pseudo_both_ways": r.pseudo_both_ways,
                "integral_both_ways": r.integral_both_ways,
                "map": map_json(&r.map)?,
            });
            let text = if iso { "isomorphic over the base".to_string() } else { format!("not isomorphic: {}", value) };
            report(out, value, text)?;
            Ok(iso)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let out = Output { json: cli.json, out: cli.out };
    match cli.command {
        Command::Bergman { matroid, faces } => {
            out.emit_value(&complex_json(&bergman_fan(&parse_matroid(&matroid)?), faces)?)?;
        }
        Command::Moduli { n, quotient, faces } => {
            let fan = if quotient { quotient_fan(&ModuliChart::standard(n)?) } else { moduli_fan(n)? };
            out.emit_value(&complex_json(&fan, faces)?)?;
        }
        Command::Divisor { complex, phi, power } => {
            let x = read_complex(&complex)?;
            let phi = RationalFunction::Global(parse_expr(&phi, x.ambient_dim())?);
            out.emit_value(&complex_json(&power_divisor(&x, &phi, power)?, false)?)?;
        }
        Command::Modify { complex, phi } => {
            let x = read_complex(&complex)?;
            let phi = RationalFunction::Global(parse_expr(&phi, x.ambient_dim())?);
            out.emit_value(&complex_json(&modification(&x, &phi)?, false)?)?;
        }
        Command::Fibre { map, target, point, chart } => {
            let f = read_map(&map)?;
            let y = read_complex(&target)?;
            let chart = parse_chart(&chart, y.ambient_dim())?;
            out.emit_value(&complex_json(&point_fibre(&f, &y, &chart, &parse_point(&point)?)?, false)?)?;
        }
        Command::Forget { n, point } => match point {
            Some(p) => out.emit_value(&complex_json(&forgetful_fibre(n, &parse_point(&p)?)?, false)?)?,
            None => out.emit_value(&map_json(&forgetful(n)?)?)?,
        },
        Command::Family { action, alpha, chart } => {
            return family_command(&out, action, &parse_alphas(&alpha)?, chart.as_deref(), cli.seed);
        }
        Command::Fibreproduct { f, f2, target } => {
            let fp = fibre_product(&read_map(&f)?, &read_map(&f2)?, &read_complex(&target)?)?;
            out.emit_value(&complex_json(&fp.complex, false)?)?;
        }
        Command::Verify { check, n, matroid, f, chart, element, alpha } => {
            let params = verify::Params { n, matroid, f, chart, element, alphas: parse_alphas(&alpha)?, seed: cli.seed };
            let r = verify::run(check, &params)?;
            report(&out, r.to_json(), r.to_text())?;
            return Ok(r.passed());
        }
        Command::Tree2point { tree } => {
            let t = parse_newick(&tree)?;
            let d = t.distances();
            let labels = t.chart().labels().to_vec();
            let pairs: Vec<[usize; 2]> = t.chart().raw_pairs().iter().map(|&(i, j)| [labels[i], labels[j]]).collect();
            let value = json!({"pairs": pairs, "distances": d.iter().map(fmt_rat).collect::<Vec<_>>()});
            report(&out, value, d.iter().map(fmt_rat).collect::<Vec<_>>().join(","))?;
        }
        Command::Point2tree { point, n } => {
            let chart = ModuliChart::standard(n)?;
            let raw = parse_point(&point)?;
            if raw.len() != chart.raw_dim() {
                bail!("expected {} distances for n = {n}, got {}", chart.raw_dim(), raw.len());
            }
            let t = MarkedTree::from_chart_point(&chart, &chart.raw_to_chart(&raw))?;
            report(&out, json!({"tree": t.to_newick(), "bounded_edges": t.num_bounded_edges()}), t.to_newick())?;
        }
        Command::Balance { complex } => return balance_report(&out, &read_complex(&complex)?),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let kind = e.downcast_ref::<tropmod_core::Error>().map_or("input", |c| c.kind());
            if json {
                eprintln!("{}", json!({"error": {"kind": kind, "message": format!("{e:#}")}}));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::FAILURE
        }
    }
}
