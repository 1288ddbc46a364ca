use std::collections::HashSet;

use m2m_cogmac::macsim::cdtw::SlotKind;
use m2m_cogmac::macsim::{run_simulation, MacConfig, ReassignPolicy, SimMode, SimOptions, SimState};

fn config(lambda: f64) -> MacConfig {
    MacConfig {
        channels: 8,
        nodes_per_class: 12,
        lambda: [lambda; 3],
        weights: [3.0, 2.0, 1.0],
        caps: [3, 3, 3],
        ..Default::default()
    }
}

fn options(frames: u64) -> SimOptions {
    SimOptions {
        frames,
        warmup: 0,
        batches: 5,
        record_trace: true,
    }
}

#[test]
fn packets_are_conserved() {
    for mode in [SimMode::Proposed, SimMode::Ideal] {
        let mut state = SimState::new(config(0.8), 3).unwrap();
        let mut backlog = [0u64; 3];
        for _ in 0..150 {
            let m = state.run_frame(mode, false).unwrap();
            for c in 0..3 {
                backlog[c] = backlog[c] + m.classes[c].arrivals - m.classes[c].deliveries;
                assert_eq!(backlog[c], m.classes[c].queued, "{mode} class {c}");
            }
        }
        let held: u64 = state.nodes().iter().map(|n| n.queue.len() as u64).sum();
        assert_eq!(held, backlog.iter().sum::<u64>());
    }
}

#[test]
fn runs_are_deterministic() {
    let a = run_simulation(&config(0.5), SimMode::Proposed, options(60), 11).unwrap();
    let b = run_simulation(&config(0.5), SimMode::Proposed, options(60), 11).unwrap();
    assert_eq!(a, b);
    let c = run_simulation(&config(0.5), SimMode::Proposed, options(60), 12).unwrap();
    assert_ne!(a.frames, c.frames);
}

#[test]
fn modes_share_arrivals() {
    let p = run_simulation(&config(0.5), SimMode::Proposed, options(40), 5).unwrap();
    let i = run_simulation(&config(0.5), SimMode::Ideal, options(40), 5).unwrap();
    for (a, b) in p.frames.iter().zip(&i.frames) {
        for c in 0..3 {
            assert_eq!(a.classes[c].arrivals, b.classes[c].arrivals);
        }
        assert_eq!(a.free_channels, b.free_channels);
        assert_eq!(b.estimation_slots, 0);
    }
}

#[test]
fn no_slot_is_used_twice() {
    for policy in [ReassignPolicy::SameClass, ReassignPolicy::LongestBacklog, ReassignPolicy::Priority] {
        let cfg = MacConfig {
            reassign: policy,
            ..config(2.0)
        };
        let r = run_simulation(&cfg, SimMode::Proposed, options(80), 9).unwrap();
        for m in &r.frames {
            let mut seen = HashSet::new();
            let mut sending = HashSet::new();
            for e in &m.events {
                assert!(e.slot < cfg.slots_per_frame, "{e:?}");
                assert!(seen.insert((e.channel, e.slot)), "{policy:?} double booking {e:?}");
                if matches!(e.kind, SlotKind::Data | SlotKind::Reserved | SlotKind::Reassigned) {
                    let node = e.node.expect("data slots name their sender");
                    assert!(sending.insert((node, e.slot)), "{policy:?} node on two channels {e:?}");
                }
            }
        }
    }
}

#[test]
fn zero_load_delivers_nothing() {
    let r = run_simulation(&config(0.0), SimMode::Proposed, options(30), 1).unwrap();
    for m in &r.frames {
        for c in &m.classes {
            assert_eq!((c.arrivals, c.deliveries, c.queued, c.successes), (0, 0, 0, 0));
        }
    }
    assert!(r.summary.iter().all(|s| s.throughput.mean == 0.0));
}

#[test]
fn reassignment_off_leaves_released_slots_unused() {
    let cfg = MacConfig {
        reassign: ReassignPolicy::Off,
        ..config(2.0)
    };
    let r = run_simulation(&cfg, SimMode::Proposed, options(60), 4).unwrap();
    assert!(r.frames.iter().flat_map(|m| &m.events).all(|e| e.kind != SlotKind::Reassigned));
    let on = run_simulation(&config(2.0), SimMode::Proposed, options(60), 4).unwrap();
    assert!(on.frames.iter().flat_map(|m| &m.events).any(|e| e.kind == SlotKind::Reassigned));
}

#[test]
fn light_load_throughput_tracks_arrivals() {
    let cfg = MacConfig {
        lambda: [0.05; 3],
        ..Default::default()
    };
    let opts = SimOptions {
        frames: 1500,
        warmup: 150,
        batches: 15,
        record_trace: false,
    };
    let r = run_simulation(&cfg, SimMode::Proposed, opts, 2).unwrap();
    for s in &r.summary {
        let hw = s.throughput.half_width(0.99);
        assert!((s.throughput.mean - 0.05).abs() <= hw + 1e-3, "{:?} {} ± {hw}", s.class, s.throughput.mean);
    }
}

#[test]
fn ideal_is_proposed_with_exact_counts() {
    use m2m_cogmac::macsim::FrameEstimate;
    let mut a = SimState::new(config(1.0), 8).unwrap();
    let mut b = SimState::new(config(1.0), 8).unwrap();
    for _ in 0..40 {
        let x = a.run_frame(SimMode::Ideal, true).unwrap();
        let y = b
            .run_frame_with(
                |counts, _| {
                    Ok(FrameEstimate {
                        n_hat: counts.map(|c| c as f64),
                        slots: 0,
                    })
                },
                true,
            )
            .unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn doubling_frames_shrinks_the_interval() {
    // pooled over seeds, since one half-width ratio is itself noisy
    let pooled = |frames: u64| -> f64 {
        let opts = SimOptions {
            frames,
            warmup: 100,
            batches: 20,
            record_trace: false,
        };
        (0..16)
            .map(|seed| {
                let hw = run_simulation(&config(0.4), SimMode::Proposed, opts, seed).unwrap().summary[2]
                    .throughput
                    .half_width(0.95);
                hw * hw
            })
            .sum()
    };
    let ratio = (pooled(4100) / pooled(2100)).sqrt();
    assert!((0.59..0.83).contains(&ratio), "ratio {ratio}");
}
