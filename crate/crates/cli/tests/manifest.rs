//! Every figure panel is present with its published parameters.

use lzsm_cli::{Command, Manifest};
use lzsm_core::sweep::{AxisParam, Horizon, Observable};
use lzsm_core::{ModelParams, TunnelingClass};

struct Panel {
    id: &'static str,
    command: Command,
    class: TunnelingClass,
    k: f64,
    /// `c/Δ`, or `c/ω` for the weak-coupling panels.
    c: f64,
    eps0: f64,
}

const fn panel(id: &'static str, command: Command, class: TunnelingClass, k: f64, c: f64, eps0: f64) -> Panel {
    Panel { id, command, class, k, c, eps0 }
}

use Command::{Bloch, Region, Spectrum, Sweep, Weak};
use TunnelingClass::{AntiPhase as Anti, InPhase as In};

const PANELS: &[Panel] = &[
    panel("fig1a", Spectrum, In, 1.0, 3.0, 0.0),
    panel("fig1b", Spectrum, In, 1.0, 3.0, 5.0),
    panel("fig2a", Spectrum, Anti, 1.0, 3.0, 0.0),
    panel("fig2b", Spectrum, Anti, 1.0, 3.0, 5.0),
    panel("fig3a", Region, Anti, 1.0, 0.0, 0.0),
    panel("fig4a", Sweep, In, 2.0, 0.0, 0.0),
    panel("fig4b", Sweep, In, 2.0, 1.05, 0.0),
    panel("fig4c", Sweep, Anti, 2.0, 0.0, 0.0),
    panel("fig4d", Sweep, Anti, 2.0, 1.05, 0.0),
    panel("fig5a", Sweep, Anti, 2.0, 0.0, 0.0),
    panel("fig5b", Sweep, Anti, 2.0, 1.05, 0.0),
    panel("fig5c", Sweep, Anti, 0.5, 0.0, 0.0),
    panel("fig5d", Sweep, Anti, 0.5, 1.05, 0.0),
    panel("fig5e", Sweep, In, 2.0, 0.0, 0.0),
    panel("fig5f", Sweep, In, 0.5, 0.0, 0.0),
    panel("fig5g", Sweep, Anti, 2.0, 0.0, 0.0),
    panel("fig5h", Sweep, Anti, 0.5, 0.0, 0.0),
    panel("fig6a", Bloch, Anti, 2.0, 0.0, 0.0),
    panel("fig6b", Bloch, Anti, 0.5, 0.0, 0.0),
    panel("fig7a", Bloch, In, 2.0, 1.9, 3.0),
    panel("fig7b", Bloch, In, 2.0, 2.0, 3.0),
    panel("fig7c", Bloch, In, 2.0, 2.1, 3.0),
    panel("fig7d", Bloch, In, 0.5, 1.9, 3.0),
    panel("fig7e", Bloch, In, 0.5, 2.0, 3.0),
    panel("fig7f", Bloch, In, 0.5, 2.1, 3.0),
    panel("fig8a", Bloch, Anti, 2.0, 0.1, 3.0),
    panel("fig8b", Bloch, Anti, 2.0, 1.0, 3.0),
    panel("fig8c", Bloch, Anti, 0.5, 0.1, 3.0),
    panel("fig8d", Bloch, Anti, 0.5, 1.0, 3.0),
    panel("fig9a", Weak, In, 2.0, 0.0, 3.0),
    panel("fig9b", Weak, In, 2.0, 0.5, 3.0),
    panel("fig9c", Weak, In, 2.0, 1.0, 3.0),
    panel("fig9d", Weak, In, 0.5, 0.0, 3.0),
    panel("fig9e", Weak, In, 0.5, 0.5, 3.0),
    panel("fig9f", Weak, In, 0.5, 1.0, 3.0),
    panel("fig10a", Weak, Anti, 2.0, 0.0, 3.0),
    panel("fig10b", Weak, Anti, 2.0, 0.5, 3.0),
    panel("fig10c", Weak, Anti, 0.5, 0.0, 3.0),
    panel("fig10d", Weak, Anti, 0.5, 0.5, 3.0),
];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn figure_number(id: &str) -> u32 {
    id[3..id.len() - 1].parse().unwrap()
}

fn check_model(id: &str, p: &ModelParams, want: &Panel) {
    assert_eq!(p.class(), want.class, "{id}");
    assert!(close(p.nonreciprocity(), want.k), "{id}: k = {}", p.nonreciprocity());
    let unit = if want.command == Weak { p.omega } else { p.mean_amplitude() };
    assert!(close(p.c / unit, want.c), "{id}: c = {}", p.c);
    assert!(close(p.eps0, want.eps0), "{id}: eps0 = {}", p.eps0);
    match figure_number(id) {
        1 | 2 => assert!(close(p.amp, 10.0) && close(p.omega, 1.0) && close(p.mean_amplitude(), 1.0), "{id}"),
        6 => assert!(close(p.amp / p.mean_amplitude(), 2.5), "{id}"),
        7 | 8 => assert!(close(p.amp / p.omega, 0.05) && close(p.mean_amplitude(), p.omega), "{id}"),
        9 | 10 => {
            assert!(close(p.amp / p.omega, 10.5) && close(p.mean_amplitude() / p.omega, 0.05), "{id}")
        }
        _ => {}
    }
}

#[test]
fn every_panel_is_present_with_its_parameters() {
    let m = Manifest::builtin().unwrap();
    let ids: Vec<&str> = m.ids().collect();
    assert_eq!(ids.len(), PANELS.len(), "{ids:?}");
    for want in PANELS {
        let cfg = m.resolve(want.id).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.command, want.command, "{}", want.id);
        match cfg.command {
            Region => {
                let r = cfg.region.unwrap();
                assert!(r.x_min <= 0.0 && r.y_min < -1.0 && r.y_max > 1.0);
            }
            Sweep => {
                let s = cfg.sweep.unwrap();
                check_model(want.id, &s.fixed, want);
                if !matches!(want.id, "fig5e" | "fig5f" | "fig5g" | "fig5h") {
                    assert_eq!((s.axis_x.param, s.axis_y.param), (AxisParam::Eps0OverDelta, AxisParam::OmegaOverDelta));
                    assert_eq!((s.axis_x.min, s.axis_x.max, s.axis_y.min, s.axis_y.max), (-6.0, 6.0, 0.2, 3.0));
                    assert_eq!(s.horizon, Horizon::InverseDelta(50.0));
                    assert!(close(s.fixed.amp / s.fixed.mean_amplitude(), 2.5));
                    let obs = if figure_number(want.id) == 4 { Observable::RawPopA1 } else { Observable::ProjPopA };
                    assert_eq!(s.observable, obs, "{}", want.id);
                } else {
                    assert_eq!((s.axis_x.param, s.axis_y.param), (AxisParam::DeltaOverOmega, AxisParam::COverOmega));
                    assert_eq!(s.horizon, Horizon::DrivePeriods(1.0));
                    assert_eq!(s.lock_amp_over_omega, Some(0.05));
                    assert_eq!(s.observable, Observable::ProjPopA);
                }
            }
            _ => {
                let p = cfg.model.unwrap();
                check_model(want.id, &p, want);
                if cfg.command == Spectrum {
                    assert_eq!(cfg.c_values, vec![0.0, 3.0]);
                    assert!(close(cfg.time.unwrap().end(&p), 4.0 * std::f64::consts::PI));
                }
            }
        }
    }
}
