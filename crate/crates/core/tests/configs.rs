use std::path::Path;

use omit_lab::io::{load_config, RunConfig};
use omit_lab::{figure_preset, FigureId};

#[test]
fn bundled_configs_reproduce_presets() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for id in FigureId::ALL {
        let cfg = load_config(dir.join(format!("{id}.toml"))).unwrap();
        let want = RunConfig::from_preset(&figure_preset(id));
        assert_eq!(cfg.system, want.system, "{id}");
        assert_eq!(cfg.drive, want.drive, "{id}");
        assert_eq!(cfg.axis, want.axis, "{id}");
        assert_eq!(cfg.second_axis, want.second_axis, "{id}");
        assert_eq!(cfg.gauge, want.gauge, "{id}");
        assert_eq!(cfg.output.stem.as_deref(), Some(id.as_str()));
    }
}

#[test]
fn every_preset_has_a_config() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let mut ids: Vec<String> = FigureId::ALL.iter().map(|id| id.to_string()).collect();
    ids.sort();
    assert_eq!(names, ids);
}
