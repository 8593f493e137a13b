use proptest::prelude::*;
use wristsonar_core::simulate::{synthesize_imu, ImuSample, ImuSynthConfig};
use wristsonar_core::tracking::CursorState;
use wristsonar_core::triggers::{
    apply_haptics, merge_streams, reentries_per_selection, run_machine, DoubleCrossing, Dwell, EventKind, Input,
    Method, PinchDetector, PinchDetectorConfig, PinchTrigger, SelectionMachine, Target, TargetSet, TriggerEvent,
    DWELL_S,
};

fn cursor(t: f64, x: f64) -> CursorState {
    CursorState { position: x, time: t, ..CursorState::default() }
}

fn two_targets() -> TargetSet {
    TargetSet::new(vec![Target::new(1, 10.0, 6.0), Target::new(2, 22.0, 6.0)]).unwrap()
}

// grid points: left of 1, inside 1, between, inside 2, right of 2
const GRID: [f64; 5] = [2.0, 10.0, 16.0, 22.0, 28.0];

/// Every trace of `len` grid points.
fn all_traces(len: usize) -> impl Iterator<Item = Vec<f64>> {
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
    let cs: Vec<CursorState> = xs.iter().enumerate().map(|(i, &x)| cursor(i as f64 * dt, x)).collect();
    let inputs: Vec<Input> = cs.iter().map(Input::Cursor).collect();
    run_machine(m, &inputs, highlighted).unwrap()
}

fn kinds(ev: &[TriggerEvent]) -> Vec<EventKind> {
    ev.iter().map(|e| e.kind).collect()
}

/// Select/cancel/error_select only while inside a target entered through an
/// enter event, and only for that target.
fn assert_safe(ev: &[TriggerEvent]) {
    let mut inside: Option<Option<u32>> = None;
    for e in ev {
        match e.kind {
            EventKind::Enter => inside = Some(e.target_id),
            EventKind::Exit => inside = None,
            EventKind::Select | EventKind::Cancel | EventKind::ErrorSelect => {
                assert_eq!(inside, Some(e.target_id), "{ev:?}");
            }
            EventKind::HapticPulse => {}
        }
        assert!(e.coordinate.is_finite());
    }
}

// ---- double-crossing oracle: walk the edges crossed by each segment

#[derive(Clone, Copy, PartialEq, Debug)]
enum Side {
    Low,
    High,
}

fn dc_oracle(ts: &TargetSet, xs: &[f64]) -> Vec<(EventKind, u32)> {
    let mut out = Vec::new();
    let mut entry: Option<(u32, Option<Side>)> = ts.at(xs[0]).map(|t| (t.id, None));
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut edges: Vec<(f64, u32, Side)> = Vec::new();
        for t in ts.targets() {
            for (edge, side) in [(t.left(), Side::Low), (t.right(), Side::High)] {
                if (a - edge) * (b - edge) < 0.0 {
                    edges.push((edge, t.id, side));
                }
            }
        }
        edges.sort_by(|p, q| if b > a { p.0.total_cmp(&q.0) } else { q.0.total_cmp(&p.0) });
        for (_, id, side) in edges {
            match entry {
                Some((cur, via)) if cur == id => {
                    match via {
                        Some(s) if s == side => out.push((EventKind::Select, id)),
                        Some(_) => out.push((EventKind::Cancel, id)),
                        None => {}
                    }
                    entry = None;
                }
                _ => entry = Some((id, Some(side))),
            }
        }
    }
    out
}

#[test]
fn double_crossing_selects_iff_exit_edge_matches_entry_edge() {
    let ts = two_targets();
    let mut n = 0;
    for len in 2..=6 {
        for xs in all_traces(len) {
            let ev = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, None);
            let got: Vec<(EventKind, u32)> = ev
                .iter()
                .filter(|e| matches!(e.kind, EventKind::Select | EventKind::Cancel | EventKind::ErrorSelect))
                .map(|e| (e.kind, e.target_id.unwrap()))
                .collect();
            assert_eq!(got, dc_oracle(&ts, &xs), "trace {xs:?}");
            assert_safe(&ev);
            n += 1;
        }
    }
    assert_eq!(n, 25 + 125 + 625 + 3125 + 15625);
}

#[test]
fn double_crossing_never_counts_a_reentry() {
    let ts = two_targets();
    for xs in all_traces(7) {
        for h in [None, Some(1), Some(2)] {
            let ev = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, h);
            assert!(reentries_per_selection(&ev).iter().all(|&r| r == 0), "trace {xs:?}");
        }
    }
}

#[test]
fn double_crossing_flags_the_wrong_target() {
    let ts = two_targets();
    for xs in all_traces(5) {
        let plain = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, Some(1));
        for e in plain.iter().filter(|e| e.kind.is_selection()) {
            let want = if e.target_id == Some(1) { EventKind::Select } else { EventKind::ErrorSelect };
            assert_eq!(e.kind, want);
        }
    }
}

#[test]
fn dwell_never_reports_an_error_select() {
    let ts = two_targets();
    // 0.125 s frames so that six samples span more than the dwell time
    for xs in all_traces(7) {
        for h in [None, Some(1), Some(2)] {
            let ev = feed(&mut Dwell::new(ts.clone(), DWELL_S).unwrap(), &xs, 0.125, h);
            assert!(ev.iter().all(|e| e.kind != EventKind::ErrorSelect), "trace {xs:?}");
            assert_safe(&ev);
        }
    }
}

#[test]
fn dwell_selects_after_continuous_residence() {
    let ts = two_targets();
    for xs in all_traces(7) {
        let ev = feed(&mut Dwell::new(ts.clone(), DWELL_S).unwrap(), &xs, 0.125, None);
        // oracle: a select for every run of >= 5 samples (0.5 s) in one target
        let mut want = Vec::new();
        let mut run: Option<(u32, usize)> = None;
        for (i, x) in xs.iter().enumerate() {
            let here = ts.at(*x).map(|t| t.id);
            run = match (run, here) {
                (Some((id, start)), Some(h)) if id == h => Some((id, start)),
                (_, Some(h)) => Some((h, i)),
                _ => None,
            };
            if let Some((id, start)) = run {
                if i - start == 4 {
                    want.push((id, i));
                }
            }
        }
        let got: Vec<(u32, usize)> = ev
            .iter()
            .filter(|e| e.kind == EventKind::Select)
            .map(|e| (e.target_id.unwrap(), (e.time / 0.125).round() as usize))
            .collect();
        assert_eq!(got, want, "trace {xs:?}");
    }
}

#[test]
fn dwell_reentry_is_counted() {
    let ts = two_targets();
    let xs = [2.0, 10.0, 2.0, 10.0, 10.0, 10.0, 10.0, 10.0];
    let ev = feed(&mut Dwell::new(ts, DWELL_S).unwrap(), &xs, 0.125, Some(1));
    assert_eq!(kinds(&ev), vec![EventKind::Enter, EventKind::Exit, EventKind::Enter, EventKind::Select]);
    assert_eq!(reentries_per_selection(&ev), vec![1]);
}

// ---- pinch

fn quiet() -> ImuSynthConfig {
    ImuSynthConfig { noise_rms: 0.05, ..ImuSynthConfig::default() }
}

#[test]
fn zero_stream_has_no_detections() {
    let s = synthesize_imu(&[], &ImuSynthConfig { noise_rms: 0.0, ..Default::default() }, 5.0, 0).unwrap();
    let mut d = PinchDetector::new(PinchDetectorConfig::default()).unwrap();
    assert!(d.detect_all(&s.samples).unwrap().is_empty());
}

#[test]
fn twenty_bursts_at_low_noise() {
    let times: Vec<f64> = (0..20).map(|k| 0.5 + k as f64 * 0.6).collect();
    let s = synthesize_imu(&times, &quiet(), 13.0, 11).unwrap();
    let mut d = PinchDetector::new(PinchDetectorConfig::default()).unwrap();
    let det = d.detect_all(&s.samples).unwrap();
    let hits = times.iter().filter(|&&t| det.iter().any(|&x| x >= t && x - t < 0.1)).count();
    assert!(hits >= 19, "{hits}");
    assert!(det.len() <= 20);
}

#[test]
fn bursts_fifty_ms_apart_detect_once() {
    let cfg = ImuSynthConfig { noise_rms: 0.0, burst_peak_log_sd: 0.0, ..Default::default() };
    let a = synthesize_imu(&[1.0], &cfg, 2.0, 1).unwrap();
    let b = synthesize_imu(&[1.05], &cfg, 2.0, 2).unwrap();
    let sum: Vec<ImuSample> = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| ImuSample { time: p.time, accel: [0, 1, 2].map(|i| p.accel[i] + q.accel[i]) })
        .collect();
    let mut d = PinchDetector::new(PinchDetectorConfig::default()).unwrap();
    assert_eq!(d.detect_all(&sum).unwrap().len(), 1);
}

#[test]
fn offset_recovers_a_slip_off_the_target() {
    let ts = two_targets();
    let mk = |offset_s: f64| {
        let mut p = PinchTrigger::new(ts.clone(), PinchDetectorConfig::default(), offset_s).unwrap();
        // on target 1 until 0.96 s, then slides out past its right edge at 14 mm
        for (t, x) in [(0.88, 12.0), (0.92, 12.5), (0.96, 12.9), (1.0, 14.0)] {
            p.on_cursor(&cursor(t, x), Some(1)).unwrap();
        }
        // detection 20 ms after leaving (edge crossed at ~0.964 s)
        p.on_detection(0.985, Some(1)).unwrap()
    };
    assert_eq!(mk(0.0).kind, EventKind::ErrorSelect);
    let fixed = mk(0.04);
    assert_eq!(fixed.kind, EventKind::Select);
    assert_eq!(fixed.target_id, Some(1));
    assert!(PinchTrigger::new(ts, PinchDetectorConfig::default(), 0.8).is_err());
}

#[test]
fn pinch_needs_enough_cursor_history() {
    let mut p = PinchTrigger::new(two_targets(), PinchDetectorConfig::default(), 0.2).unwrap();
    p.on_cursor(&cursor(1.0, 10.0), None).unwrap();
    assert!(p.on_detection(1.1, None).is_err());
}

// ---- haptics and merging

fn event(kind: EventKind, t: f64) -> TriggerEvent {
    TriggerEvent::new(kind, Method::Dwell, Some(1), 0.0, t)
}

#[test]
fn haptic_pulse_table() {
    let seq = [EventKind::Enter, EventKind::Exit, EventKind::Enter, EventKind::Select];
    let ev: Vec<TriggerEvent> = seq.iter().enumerate().map(|(i, &k)| event(k, i as f64)).collect();
    let on = apply_haptics(&ev, true);
    let pulses: Vec<(f64, f64)> = on.iter().filter_map(|e| e.haptic.map(|h| (h.duration_ms, h.intensity))).collect();
    assert_eq!(pulses, vec![(10.0, 0.5), (10.0, 0.5), (20.0, 1.0)]);
    assert!(apply_haptics(&ev, false).iter().all(|e| e.haptic.is_none()));
}

fn kind_strategy() -> impl Strategy<Value = EventKind> {
    prop_oneof![
        Just(EventKind::Enter),
        Just(EventKind::Exit),
        Just(EventKind::Select),
        Just(EventKind::Cancel),
        Just(EventKind::ErrorSelect),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn haptics_pulse_once_per_enter_and_selection(ks in prop::collection::vec(kind_strategy(), 0..40)) {
        let ev: Vec<TriggerEvent> = ks.iter().enumerate().map(|(i, &k)| event(k, i as f64)).collect();
        let on = apply_haptics(&ev, true);
        let want = ks.iter().filter(|k| **k == EventKind::Enter || k.is_selection()).count();
        prop_assert_eq!(on.iter().filter(|e| e.kind == EventKind::HapticPulse).count(), want);
        prop_assert_eq!(apply_haptics(&on, true), on.clone());
        let off = apply_haptics(&on, false);
        prop_assert_eq!(off, ev);
    }

    #[test]
    fn merge_keeps_everything_in_order(
        nc in 0usize..30,
        ni in 0usize..120,
    ) {
        let cs: Vec<CursorState> = (0..nc).map(|k| cursor(k as f64 * 0.04, 0.0)).collect();
        let imu: Vec<ImuSample> = (0..ni).map(|k| ImuSample { time: k as f64 * 0.01, accel: [0.0; 3] }).collect();
        let m = merge_streams(&cs, &imu);
        prop_assert_eq!(m.len(), nc + ni);
        prop_assert!(m.windows(2).all(|w| w[0].time() <= w[1].time()));
        for w in m.windows(2) {
            if w[0].time() == w[1].time() {
                prop_assert!(!(matches!(w[0], Input::Cursor(_)) && matches!(w[1], Input::Imu(_))));
            }
        }
    }

    #[test]
    fn machines_are_safe_and_deterministic(
        steps in prop::collection::vec(-6.0f64..6.0, 1..80),
        start in 0.0f64..32.0,
        h in prop::option::of(1u32..3),
    ) {
        let mut xs = vec![start];
        for s in &steps {
            xs.push(xs.last().unwrap() + s);
        }
        let ts = two_targets();
        let dc1 = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, h);
        let dc2 = feed(&mut DoubleCrossing::new(ts.clone()), &xs, 0.04, h);
        prop_assert_eq!(&dc1, &dc2);
        assert_safe(&dc1);
        prop_assert!(reentries_per_selection(&dc1).iter().all(|&r| r == 0));
        let dw = feed(&mut Dwell::new(ts.clone(), DWELL_S).unwrap(), &xs, 0.04, h);
        assert_safe(&dw);
        prop_assert!(dw.iter().all(|e| e.kind != EventKind::ErrorSelect));
        let mut pinch = PinchTrigger::new(ts, PinchDetectorConfig::default(), 0.0).unwrap();
        let pe = feed(&mut pinch, &xs, 0.04, h);
        prop_assert!(pe.iter().all(|e| matches!(e.kind, EventKind::Enter | EventKind::Exit)));
    }
}
