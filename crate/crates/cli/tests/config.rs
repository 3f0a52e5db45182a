//! Config-file parsing and value resolution.

use kdsqnm_cli::config::{ConfigFile, Settings, UsageError};
use kdsqnm_cli::values::{BoxSpec, Grid, List, ProfileSpec};

#[test]
fn parses_sections_and_comments() {
    let text = "# comment\n[params]\nM0 = 0.12 ; trailing\nLambda=2.5\n\n[qnm]\nbox = -3,3,0.1,0.9\n";
    let cfg = ConfigFile::parse(text, "t.ini").unwrap();
    assert_eq!(cfg.entries.len(), 3);
    let s = Settings::new(cfg);
    assert_eq!(s.get("params", "M0", None, 0.1).unwrap(), 0.12);
    assert_eq!(s.get("params", "Lambda", Some(3.0), 1.0).unwrap(), 3.0);
    assert_eq!(s.get("params", "a", None, 0.0).unwrap(), 0.0);
    assert_eq!(s.get("qnm", "box", None, BoxSpec([0.0, 1.0, 0.0, 1.0])).unwrap(), BoxSpec([-3.0, 3.0, 0.1, 0.9]));
    let echo = s.echo();
    assert!(echo.contains(&("params.M0".into(), "0.12".into())));
    assert!(echo.contains(&("params.Lambda".into(), "3.0".into())));
}

#[test]
fn rejects_unknown_keys_and_sections() {
    let err = ConfigFile::parse("[params]\nmass = 1\n", "t.ini").unwrap_err();
    assert!(matches!(err, UsageError::UnknownKey { ref key, line: 2, .. } if key == "mass"));
    assert!(ConfigFile::parse("[nope]\n", "t.ini").is_err());
    assert!(ConfigFile::parse("M0 = 1\n", "t.ini").is_err());
    assert!(ConfigFile::parse("[params]\nM0 = 1\nM0 = 2\n", "t.ini").is_err());
    assert!(ConfigFile::parse("[params\n", "t.ini").is_err());
}

#[test]
fn bad_values_name_the_key() {
    let s = Settings::new(ConfigFile::parse("[qnm]\nbox = 1,2\n", "t.ini").unwrap());
    let err = s.get("qnm", "box", None, BoxSpec([0.0, 1.0, 0.0, 1.0])).unwrap_err();
    assert!(err.to_string().contains("qnm.box"), "{err}");
}

#[test]
fn value_syntax() {
    assert_eq!("-2..2".parse::<List<i32>>().unwrap().0, vec![-2, -1, 0, 1, 2]);
    assert_eq!("0,3".parse::<List<usize>>().unwrap().0, vec![0, 3]);
    assert!("2..1".parse::<List<i32>>().is_err());
    assert_eq!("4x2".parse::<Grid>().unwrap(), Grid(4, 2));
    assert!("0x2".parse::<Grid>().is_err());
    assert!("1,0,0,1".parse::<BoxSpec>().is_err());
    let p: ProfileSpec = "gaussian:0,0.5,1".parse().unwrap();
    assert_eq!(p.to_string().parse::<ProfileSpec>().unwrap(), p);
    assert!("gaussian:0,-1,1".parse::<ProfileSpec>().is_err());
}
