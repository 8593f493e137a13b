//! End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use wristsonar::commands::study::{self, Study, StudyConfig, StudyReport};
use wristsonar::commands::syseval::{self, SysevalConfig, SysevalReport};
use wristsonar_core::fitts::{effective_id, fit_fitts, reference_model, REFERENCE_MODELS, WE_FACTOR};
use wristsonar_core::simulate::{
    linear_stage_protocol, synthesize_imu, EchoSynth, FingerPath, ImuSynthConfig, NoiseCondition, StageProtocol,
};
use wristsonar_core::tracking::{CursorState, Tracker, TrackerConfig};
use wristsonar_core::triggers::{
    reentries_per_selection, run_machine, DoubleCrossing, Dwell, EventKind, Input, PinchDetector, PinchDetectorConfig,
    SelectionMachine, Target, TargetSet, TriggerEvent, DWELL_S,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

// ---- shared runs

fn syseval_run() -> &'static (SysevalReport, Duration) {
    static RUN: OnceLock<(SysevalReport, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let t0 = Instant::now();
        let r = syseval::run(&SysevalConfig::default()).expect("syseval runs");
        (r, t0.elapsed())
    })
}

fn study_run(s: Study) -> StudyReport {
    let cfg = StudyConfig::default().resolve(s).unwrap();
    let run = study::run(s, &cfg, 0).unwrap();
    study::analyse(&run, &cfg).unwrap()
}

fn serial() -> &'static StudyReport {
    static R: OnceLock<StudyReport> = OnceLock::new();
    R.get_or_init(|| study_run(Study::Serial))
}

fn multi() -> &'static StudyReport {
    static R: OnceLock<StudyReport> = OnceLock::new();
    R.get_or_init(|| study_run(Study::Multi))
}

// ---- 1, 2: stage sweep

fn tracking_fidelity() -> Verdict {
    let (r, elapsed) = syseval_run();
    let c = &r.checks;
    let near = |n: NoiseCondition| {
        r.cells
            .iter()
            .filter(|c| c.range_far_mm <= 100.0 && c.noise == Some(n))
            .map(|c| c.mean_abs_error_mm)
            .fold(0.0, f64::max)
    };
    let (quiet, walker) = (near(NoiseCondition::Quiet), near(NoiseCondition::Walker));
    let pass = r.trials.len() == 240 && quiet <= 1.0 && walker <= 5.0 && elapsed.as_secs_f64() < 120.0;
    assert_eq!(quiet, c.near_quiet_max_mm);
    verdict(
        pass,
        format!(
            "{} trials; worst 0-10 cm cell {quiet:.3} mm quiet (<= 1), {walker:.3} mm walker (<= 5); {:.1} s (< 120)",
            r.trials.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn distance_shape() -> Verdict {
    let (r, _) = syseval_run();
    let near_max = r.cells.iter().filter(|c| c.range_far_mm <= 100.0).map(|c| c.mean_abs_error_mm).fold(0.0, f64::max);
    let far_min =
        r.cells.iter().filter(|c| c.range_near_mm >= 100.0).map(|c| c.mean_abs_error_mm).fold(f64::INFINITY, f64::min);
    let pooled = |lo: f64| {
        let v: Vec<f64> = r.trials.iter().filter(|t| t.range_near_mm == lo).map(|t| t.abs_error_mm).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (a, b) = (pooled(0.0), pooled(50.0));
    let rel = (a - b).abs() / a.min(b);
    verdict(
        far_min > near_max && rel < 0.5,
        format!("best 10-20 cm cell {far_min:.2} mm > worst 0-10 cm cell {near_max:.3} mm; 0-5 vs 5-10 cm {a:.3} vs {b:.3} mm, {:.1}% apart (< 50%)", 100.0 * rel),
    )
}

// ---- 3: real-time budget

fn frame_budget() -> Verdict {
    let trial = linear_stage_protocol(&StageProtocol::default())
        .unwrap()
        .into_iter()
        .find(|t| t.noise == NoiseCondition::Walker)
        .unwrap();
    let cfg = TrackerConfig::default();
    let mut synth = EchoSynth::new(&trial.scene, &cfg.sonar, cfg.carrier_phase).unwrap();
    let finger = trial.scene.finger.as_ref().unwrap();
    let frames: Vec<_> = (0..250).map(|_| synth.render_frame(Some(finger as &dyn FingerPath))).collect();
    let mut tracker = Tracker::new(cfg).unwrap();
    let mut worst = Duration::ZERO;
    let mut total = Duration::ZERO;
    for f in &frames {
        let t0 = Instant::now();
        tracker.track_frame(f).unwrap();
        let dt = t0.elapsed();
        worst = worst.max(dt);
        total += dt;
    }
    let mean = total / frames.len() as u32;
    verdict(
        worst < Duration::from_millis(15),
        format!(
            "{} frames, mean {:.3} ms, max {:.3} ms (< 15)",
            frames.len(),
            mean.as_secs_f64() * 1e3,
            worst.as_secs_f64() * 1e3
        ),
    )
}

// ---- 4: pinch detector

fn pinch_detector() -> Verdict {
    let cfg = ImuSynthConfig::default();
    let (mut bursts, mut hits, mut quiet_fp, mut stray) = (0usize, 0usize, 0usize, 0usize);
    let mut quiet_minutes = 0.0;
    for seed in 0..8u64 {
        let times: Vec<f64> = (0..100).map(|k| 1.0 + 1.5 * k as f64 + 0.0037 * (k % 7) as f64).collect();
        let s = synthesize_imu(&times, &cfg, 152.0, seed).unwrap();
        let det = PinchDetector::new(PinchDetectorConfig::default()).unwrap().detect_all(&s.samples).unwrap();
        let matches = |d: f64, t: f64| d >= t && d - t < 0.1;
        bursts += times.len();
        hits += times.iter().filter(|&&t| det.iter().any(|&d| matches(d, t))).count();
        stray += det.iter().filter(|&&d| !times.iter().any(|&t| matches(d, t))).count();
        let q = synthesize_imu(&[], &cfg, 240.0, seed + 100).unwrap();
        quiet_fp += PinchDetector::new(PinchDetectorConfig::default()).unwrap().detect_all(&q.samples).unwrap().len();
        quiet_minutes += 4.0;
    }
    let acc = 100.0 * hits as f64 / bursts as f64;
    let fp_rate = quiet_fp as f64 / quiet_minutes;
    verdict(
        bursts >= 800 && acc >= 95.0 && fp_rate <= 2.0,
        format!(
            "{bursts} bursts at {} m/s² RMS noise: accuracy {acc:.2}% (>= 95); {quiet_fp} detections in {quiet_minutes} quiet minutes = {fp_rate:.3}/min (<= 2); {stray} stray detections between bursts",
            cfg.noise_rms
        ),
    )
}

// ---- 5: trigger semantics, exhaustively

const GRID: [f64; 5] = [2.0, 10.0, 16.0, 22.0, 28.0];

fn targets() -> TargetSet {
    TargetSet::new(vec![Target::new(1, 10.0, 6.0), Target::new(2, 22.0, 6.0)]).unwrap()
}

fn traces(len: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..GRID.len().pow(len as u32)).map(move |mut code| {
        (0..len)
            .map(|_| {
                let x = GRID[code % GRID.len()];
                code /= GRID.len();
                x
            })
            .collect()
    })
}

fn feed<M: SelectionMachine>(m: &mut M, xs: &[f64], dt: f64, highlighted: Option<u32>) -> Vec<TriggerEvent> {
    let cs: Vec<CursorState> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| CursorState { position: x, time: i as f64 * dt, ..Default::default() })
        .collect();
    let inputs: Vec<Input> = cs.iter().map(Input::Cursor).collect();
    run_machine(m, &inputs, highlighted).unwrap()
}

/// Expected resolutions from the sequence of target edges each step crosses:
/// leaving through the entry edge selects, through the other edge cancels.
fn crossing_oracle(ts: &TargetSet, xs: &[f64]) -> Vec<(EventKind, u32)> {
    let mut out = Vec::new();
    let mut entry: Option<(u32, Option<bool>)> = ts.at(xs[0]).map(|t| (t.id, None));
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut edges: Vec<(f64, u32, bool)> = ts
            .targets()
            .iter()
            .flat_map(|t| [(t.left(), t.id, false), (t.right(), t.id, true)])
            .filter(|(e, _, _)| (a - e) * (b - e) < 0.0)
            .collect();
        edges.sort_by(|p, q| if b > a { p.0.total_cmp(&q.0) } else { q.0.total_cmp(&p.0) });
        for (_, id, right) in edges {
            match entry {
                Some((cur, via)) if cur == id => {
                    match via {
                        Some(e) if e == right => out.push((EventKind::Select, id)),
                        Some(_) => out.push((EventKind::Cancel, id)),
                        None => {}
                    }
                    entry = None;
                }
                _ => entry = Some((id, Some(right))),
            }
        }
    }
    out
}

fn trigger_semantics() -> Verdict {
    let ts = targets();
    let mut dc_traces = 0;
    let mut dc_mismatch = 0;
    for len in 2..=6 {
        for xs in traces(len) {
            let got: Vec<(EventKind, u32)> = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, None)
                .iter()
                .filter(|e| matches!(e.kind, EventKind::Select | EventKind::Cancel | EventKind::ErrorSelect))
                .map(|e| (e.kind, e.target_id.unwrap()))
                .collect();
            dc_mismatch += usize::from(got != crossing_oracle(&ts, &xs));
            dc_traces += 1;
        }
    }
    let (mut tre_runs, mut tre_nonzero, mut dwell_runs, mut dwell_errors) = (0, 0, 0, 0);
    for xs in traces(7) {
        for h in [None, Some(1), Some(2)] {
            let ev = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, h);
            tre_nonzero += reentries_per_selection(&ev).iter().filter(|&&r| r != 0).count();
            tre_runs += 1;
            let ev = feed(&mut Dwell::new(ts.clone(), DWELL_S).unwrap(), &xs, 0.125, h);
            dwell_errors += ev.iter().filter(|e| e.kind == EventKind::ErrorSelect).count();
            dwell_runs += 1;
        }
    }
    verdict(
        dc_mismatch == 0 && tre_nonzero == 0 && dwell_errors == 0,
        format!(
            "(a) dwell: {dwell_errors} error_select over {dwell_runs} traces; (b) double-crossing vs edge oracle: {dc_mismatch} mismatches over {dc_traces} traces; (c) double-crossing: {tre_nonzero} non-zero TRE over {tre_runs} traces"
        ),
    )
}

// ---- 6: metrics

fn metrics_engine() -> Verdict {
    let mut fails = Vec::new();
    let mut check = |name: &str, got: f64, want: f64, tol: f64| {
        if (got - want).abs().is_nan() || (got - want).abs() > tol {
            fails.push(format!("{name}: {got} vs {want}"));
        }
    };
    // deviations with mean 0.1 and squared residuals summing to 2.74
    let e = effective_id(&[11.0, 12.0, 13.0, 12.5], &[-1.0, 0.5, 1.2, -0.3]).unwrap();
    let w_e = 4.133 * (2.74f64 / 3.0).sqrt();
    check("W_e", e.w_e, w_e, 1e-9);
    check("A_e", e.a_e, 12.125, 1e-9);
    check("ID_e", e.id_e, (12.125 / w_e + 1.0).log2(), 1e-9);
    let d = 6.0 / WE_FACTOR / 2f64.sqrt();
    check("ID_e(12, 6)", effective_id(&[12.0, 12.0], &[-d, d]).unwrap().id_e, 3f64.log2(), 1e-9);
    let pts: Vec<(f64, f64)> = [1.0, 1.5, 2.2, 3.0, 3.7].iter().map(|&x| (x, 0.1 + 0.5 * x)).collect();
    let m = fit_fitts(&pts).unwrap();
    check("fit a", m.a, 0.1, 1e-9);
    check("fit b", m.b, 0.5, 1e-9);
    check("fit R²", m.r2, 1.0, 1e-9);
    // reference models: 0.065 + 0.475·ID, 0.47 + 0.461·ID, 0.021 + 1.234·ID
    let reference = [(0.065, 0.475), (0.47, 0.461), (0.021, 1.234)];
    let mut sampled = 0;
    for ((method, _), (a, b)) in REFERENCE_MODELS.iter().zip(reference) {
        for id in [1.0, 1.5, 2.0, 2.5, 3.0] {
            check(method.as_str(), reference_model(*method).predict(id), a + b * id, 1e-12);
            sampled += 1;
        }
    }
    check("double_crossing at 2 bits", reference_model(REFERENCE_MODELS[0].0).predict(2.0), 1.015, 1e-12);
    verdict(
        fails.is_empty(),
        if fails.is_empty() {
            format!("W_e, A_e, ID_e fixtures and exact-line fit within 1e-9; {sampled} model evaluations exact")
        } else {
            fails.join("; ")
        },
    )
}

// ---- 7, 8: closed-loop studies

fn ordering() -> Verdict {
    let (s1, s2) = (serial(), multi());
    let row = |r: &StudyReport, m: &str| {
        r.means
            .iter()
            .find(|c| c.method.as_str() == m && (c.haptic.is_none() || r.study == Study::Serial))
            .unwrap()
            .clone()
    };
    let (dc, dw, pi) = (row(s1, "double_crossing"), row(s1, "dwell"), row(s1, "pinch"));
    let (dc2, dw2) = (row(s2, "double_crossing"), row(s2, "dwell"));
    let pass = dc.participants >= 5
        && dc.tp > dw.tp
        && dw.tp > pi.tp
        && pi.er > dc.er
        && dc2.er > dw2.er
        && s1.checks.tp_dc_gt_dwell_gt_pinch == Some(true)
        && s1.checks.er_pinch_gt_dc == Some(true)
        && s2.checks.er_dc_gt_dwell == Some(true);
    let mut per_seed = String::new();
    for p in &s1.participants {
        let tp: Vec<String> = p.summaries.iter().map(|s| format!("{:.2}", s.tp)).collect();
        per_seed += &format!(" seed {}: TP {}", p.seed, tp.join("/"));
    }
    verdict(
        pass,
        format!(
            "{} seeds, sonar pipeline. Study 1 TP {:.2} > {:.2} > {:.2} bps, ER pinch {:.2}% > double-crossing {:.2}%; Study 2 ER double-crossing {:.2}% > dwell {:.2}% (per-haptic: {}).{per_seed}",
            dc.participants, dc.tp, dw.tp, pi.tp, pi.er, dc.er, dc2.er, dw2.er,
            s2.checks.er_dc_gt_dwell_each_haptic == Some(true)
        ),
    )
}

fn offset_sweep() -> Verdict {
    let Some(s) = &serial().offset_sweep else {
        return verdict(false, "no pinch cases");
    };
    let rows: Vec<String> = s
        .sweep
        .rows
        .iter()
        .map(|r| format!("{}ms {:.2}/{:.2}", r.offset_ms, r.corrected_pct, r.premature_pct))
        .collect();
    verdict(
        s.checks.corrected_increases && s.checks.premature_increases && s.checks.crossover_ms.is_some(),
        format!(
            "{} pinches; corrected/premature % of pinches: {}; crossover {:?} ms",
            s.sweep.cases,
            rows.join(", "),
            s.checks.crossover_ms
        ),
    )
}

// ---- 9: determinism of the binary

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

fn cli(args: &[&str], out: &Path, threads: &str) -> BTreeMap<String, Vec<u8>> {
    let status = Command::new(env!("CARGO_BIN_EXE_wristsonar"))
        .args(args)
        .args(["--out", out.to_str().unwrap(), "--seed", "7", "--plot", "--threads", threads])
        .output()
        .unwrap();
    assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
    snapshot(out)
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let small = tmp.path().join("small.json");
    std::fs::write(&small, r#"{"schema_version": 1, "participants": 2}"#).unwrap();
    let small = small.to_str().unwrap().to_string();
    let sim = tmp.path().join("simulate_a");
    let wav = sim.join("echo.wav");
    let wav = wav.to_str().unwrap().to_string();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("simulate", vec!["simulate"]),
        ("syseval", vec!["syseval"]),
        ("track", vec!["track", &wav]),
        ("fitts", vec!["fitts", "--config", &small]),
        ("multi", vec!["multi", "--config", &small]),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, args) in &commands {
        let a = cli(args, &tmp.path().join(format!("{name}_a")), "1");
        let b = cli(args, &tmp.path().join(format!("{name}_b")), "0");
        let same = a == b && !a.is_empty();
        pass &= same;
        lines.push(format!("{name} {} files {}", a.len(), if same { "identical" } else { "DIFFER" }));
    }
    verdict(pass, lines.join(", "))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("tracking fidelity", tracking_fidelity),
        ("distance effect shape", distance_shape),
        ("real-time budget", frame_budget),
        ("pinch detector", pinch_detector),
        ("trigger semantics", trigger_semantics),
        ("metrics engine", metrics_engine),
        ("end-to-end ordering", ordering),
        ("offset-correction sweep", offset_sweep),
        ("determinism", determinism),
    ];
    // panics become FAIL lines; their messages are reported there
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += usize::from(!v.pass);
        println!("criterion {} {name}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
