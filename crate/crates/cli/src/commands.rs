use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Value};

use luce::arrangements::{
    self, brown_diaconis_frequencies, coloring_face_weights, ehrenfest_face_weights, riffle_face_weights,
    stationary_exact, transition_matrix, tsetlin_face_weights, Arrangement, BlockOrderedSetPartition, Boolean,
    Braid, BrownDiaconisSampler, ChamberChain, FaceWeightTable, Graph, SignVector,
};
use luce::bottomk::{self, BottomOptions, Family, WeightSequence};
use luce::io::{family_tag, WeightSpec};
use luce::par::{self, CHUNK};
use luce::{topk, Permutation, RngStream, Sampler};

use crate::args::{
    ArrangementCommand, BottomTableArgs, Command, FamilyArgs, KindArg, ModelArg, SamplerArg, WalkArgs, WeightArgs,
};
use crate::output::Sink;
use crate::{CliError, Context};

type Res = Result<(), CliError>;

pub(crate) fn dispatch(cmd: &Command, ctx: &mut Context, sink: &mut Sink<'_>, stderr: &mut dyn Write) -> Res {
    match cmd {
        Command::Pmf(a) => {
            let w = weights(&a.weights)?;
            let sigma: Permutation = a.sigma.parse()?;
            let p = luce::luce_pmf(&w, &sigma)?;
            sink.object(json!({ "pmf": p }))?;
        }
        Command::Sample(a) => {
            let w = weights(&a.weights)?;
            let sampler = match a.sampler {
                SamplerArg::Urn => Sampler::Urn,
                SamplerArg::Exponential => Sampler::Exponential,
            };
            draws(ctx, a.n_samples, |rng| sampler.sample(&w, rng), |i, p| {
                sink.row(&["draw", "permutation"], vec![json!(i), json!(p.as_slice())])
            })?;
        }
        Command::Topk(a) => {
            let w = weights(&a.weights)?;
            ctx.tolerances.insert("normalization".into(), luce::weights::NORMALIZATION_TOL);
            let v = if a.report {
                serde_json::to_value(topk::distance_report(&w, a.k)?).expect("report serializes")
            } else {
                json!({
                    "n": w.len(),
                    "k": a.k,
                    "d_inf_exact": topk::d_inf_exact(&w, a.k)?,
                    "tv_exact": topk::tv_exact(&w, a.k)?,
                })
            };
            sink.object(v)?;
        }
        Command::BottomTable(a) => bottom_table(a, ctx, sink, stderr)?,
        Command::ConvergeTest(a) => {
            let seq = sequence(&a.family)?;
            let report = bottomk::convergence_test(&seq)?;
            sink.object(serde_json::to_value(report).expect("report serializes"))?;
        }
        Command::Arrangement(a) => arrangement(a, ctx, sink)?,
    }
    Ok(())
}

fn weights(a: &WeightArgs) -> Result<luce::WeightVector, CliError> {
    Ok(WeightSpec::parse(&a.weights)?.normalized(a.normalize).to_vector()?)
}

fn sequence(a: &FamilyArgs) -> Result<WeightSequence, CliError> {
    if a.beta.is_some() && a.family != "log" {
        return Err(CliError::Usage(format!("--beta applies to the log family only, not {}", a.family)));
    }
    Ok(WeightSequence::from_family(family_tag(&a.family, a.beta)?)?)
}

/// `n` draws from per-chunk streams `split(c)` of the seed, emitted in order.
/// The output does not depend on the execution mode or thread count.
fn draws<T: Send>(
    ctx: &Context,
    n: usize,
    draw: impl Fn(&mut RngStream) -> T + Sync + Send,
    mut emit: impl FnMut(usize, T) -> std::io::Result<()>,
) -> std::io::Result<()> {
    const CHUNKS_PER_BATCH: usize = 16;
    let root = RngStream::new(ctx.seed);
    let chunks: Vec<usize> = (0..n.div_ceil(CHUNK)).collect();
    let mut index = 0;
    for batch in chunks.chunks(CHUNKS_PER_BATCH) {
        let parts = par::map(ctx.exec, batch, |&c| {
            let mut rng = root.split(c as u64);
            (0..CHUNK.min(n - c * CHUNK)).map(|_| draw(&mut rng)).collect::<Vec<T>>()
        });
        for x in parts.into_iter().flatten() {
            index += 1;
            emit(index, x)?;
        }
    }
    Ok(())
}

fn bottom_table(a: &BottomTableArgs, ctx: &mut Context, sink: &mut Sink<'_>, stderr: &mut dyn Write) -> Res {
    if a.max_label == 0 {
        return Err(CliError::Usage("--max-label must be at least 1".into()));
    }
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    ctx.tolerances.insert("probability_abs".into(), a.tol);
    let seq = sequence(&a.family)?;
    let rows: Vec<(usize, f64)> = if seq.family() == Family::Linear {
        let rows = bottomk::sukhatme_last_card_table(a.max_label, a.tol, ctx.exec)?;
        if let Some(r) = rows.iter().find(|r| r.error.is_nan() || r.error > a.tol) {
            return Err(luce::Error::ToleranceNotMet(format!("label {}: error {:e} > {:e}", r.label, r.error, a.tol)).into());
        }
        rows.iter().map(|r| (r.label, r.probability)).collect()
    } else {
        let opts = BottomOptions::with_tol(a.tol);
        let pmfs = par::map_range(ctx.exec, a.max_label, |i| bottomk::limit_bottom_pmf(&seq, &[i + 1], opts));
        let mut rows = Vec::with_capacity(a.max_label);
        for (i, p) in pmfs.into_iter().enumerate() {
            let p = p?;
            if !p.tolerance_met {
                return Err(luce::Error::ToleranceNotMet(format!(
                    "label {}: bracket [{:e}, {:e}] wider than {:e}",
                    i + 1,
                    p.lower,
                    p.upper,
                    a.tol
                ))
                .into());
            }
            if i == 0 && p.defective {
                writeln!(stderr, "luce: warning: {} fails the convergence criterion; the limit law is defective", seq.family())?;
            }
            rows.push((i + 1, p.value));
        }
        rows
    };
    for (label, p) in rows {
        sink.row(&["label", "probability"], vec![json!(label), json!(p)])?;
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceFile {
    kind: String,
    n: Option<usize>,
    d: Option<usize>,
    faces: Vec<FaceEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceEntry {
    face: String,
    weight: f64,
}

enum Model {
    Braid(FaceWeightTable<Braid>),
    Boolean(FaceWeightTable<Boolean>),
}

fn need<T: Copy>(v: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("model {model} needs {flag}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn build_model(w: &WalkArgs) -> Result<Model, CliError> {
    let model = match w.model {
        ModelArg::Tsetlin => {
            let spec = w.weights.as_deref().ok_or_else(|| CliError::Usage("model tsetlin needs --weights".into()))?;
            let wv = WeightSpec::parse(spec)?.normalized(w.normalize).to_vector()?;
            Model::Braid(tsetlin_face_weights(&wv)?)
        }
        ModelArg::Riffle => Model::Braid(riffle_face_weights(need(w.n, "--n", "riffle")?)?),
        ModelArg::Ehrenfest => Model::Boolean(ehrenfest_face_weights(need(w.d, "--d", "ehrenfest")?)?),
        ModelArg::Coloring => {
            let path = w.graph.as_deref().ok_or_else(|| CliError::Usage("model coloring needs --graph".into()))?;
            let graph: Graph = read(path)?.parse()?;
            Model::Boolean(coloring_face_weights(&graph)?)
        }
        ModelArg::Table => {
            let path = w.faces.as_deref().ok_or_else(|| CliError::Usage("model table needs --faces".into()))?;
            let file: FaceFile = serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            match file.kind.as_str() {
                "braid" => {
                    let arr = Braid::new(need(file.n, "\"n\"", "table (braid)")?)?;
                    Model::Braid(FaceWeightTable::new(arr, faces::<BlockOrderedSetPartition>(&file.faces)?)?)
                }
                "boolean" => {
                    let arr = Boolean::new(need(file.d, "\"d\"", "table (boolean)")?)?;
                    Model::Boolean(FaceWeightTable::new(arr, faces::<SignVector>(&file.faces)?)?)
                }
                other => return Err(CliError::Usage(format!("{}: kind {other:?} is not braid or boolean", path.display()))),
            }
        }
    };
    let actual = match model {
        Model::Braid(_) => KindArg::Braid,
        Model::Boolean(_) => KindArg::Boolean,
    };
    if let Some(k) = w.kind {
        if k != actual {
            return Err(CliError::Usage(format!("--kind {k:?} does not match the {:?} model", w.model).to_lowercase()));
        }
    }
    Ok(model)
}

fn faces<F: FromStr<Err = luce::Error>>(entries: &[FaceEntry]) -> Result<Vec<(F, f64)>, CliError> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let f = e.face.parse().map_err(|err| CliError::Usage(format!("faces[{i}].face: {err}")))?;
            Ok((f, e.weight))
        })
        .collect()
}

fn arrangement(cmd: &ArrangementCommand, ctx: &mut Context, sink: &mut Sink<'_>) -> Res {
    let walk = match cmd {
        ArrangementCommand::Sim { walk, .. }
        | ArrangementCommand::Stationary { walk, .. }
        | ArrangementCommand::SampleBd { walk, .. } => walk,
    };
    ctx.tolerances.insert("face_table_sum".into(), arrangements::TABLE_SUM_TOL);
    match build_model(walk)? {
        Model::Braid(t) => run_walk(&t, cmd, walk, ctx, sink),
        Model::Boolean(t) => run_walk(&t, cmd, walk, ctx, sink),
    }
}

fn run_walk<A>(table: &FaceWeightTable<A>, cmd: &ArrangementCommand, walk: &WalkArgs, ctx: &mut Context, sink: &mut Sink<'_>) -> Res
where
    A: Arrangement,
    A::Chamber: FromStr<Err = luce::Error>,
{
    let start = match &walk.start {
        Some(s) => {
            let c: A::Chamber = s.parse()?;
            table.arrangement().check_chamber(&c)?;
            c
        }
        None => table.arrangement().reference_chamber(),
    };
    let chamber = |c: &A::Chamber| Value::String(c.to_string());
    match cmd {
        ArrangementCommand::Sim { steps, .. } => {
            let mut chain = ChamberChain::new(table, start)?;
            let mut rng = RngStream::new(ctx.seed);
            sink.row(&["step", "chamber"], vec![json!(0), chamber(chain.current())])?;
            for i in 1..=*steps {
                let c = chamber(chain.step(&mut rng));
                sink.row(&["step", "chamber"], vec![json!(i), c])?;
            }
        }
        ArrangementCommand::Stationary { exact: true, .. } => {
            ctx.tolerances.insert("stationary_pivot_ratio".into(), 1e-12);
            ctx.tolerances.insert("stationary_residual".into(), 1e-10);
            let k = transition_matrix(table, ctx.exec)?;
            let pi = stationary_exact(&k)?;
            for (c, p) in k.states().iter().zip(pi) {
                sink.row(&["chamber", "probability"], vec![chamber(c), json!(p)])?;
            }
        }
        ArrangementCommand::Stationary { exact: false, samples, .. } => {
            let sampler = BrownDiaconisSampler::with_start(table, start)?;
            let chambers = table.arrangement().chambers()?;
            let freq = brown_diaconis_frequencies(&sampler, &chambers, *samples, ctx.seed, ctx.exec);
            for (c, p) in chambers.iter().zip(freq) {
                sink.row(&["chamber", "probability"], vec![chamber(c), json!(p)])?;
            }
        }
        ArrangementCommand::SampleBd { samples, .. } => {
            let sampler = BrownDiaconisSampler::with_start(table, start)?;
            draws(ctx, *samples, |rng| sampler.sample(rng), |i, c| {
                sink.row(&["sample", "chamber"], vec![json!(i), chamber(&c)])
            })?;
        }
    }
    Ok(())
}
