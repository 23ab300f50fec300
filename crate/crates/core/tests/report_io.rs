use hasse_lab::config::{emit_config, parse_config};
use hasse_lab::counting::ArcClass;
use hasse_lab::report::{emit_report, parse_report_json, run_command, Command, Format};

const GAUSSIAN: &str = r#"
[field]
min_poly = [1, 0, 1]
class_number_one = true

[system]
d = 2

[[system.forms]]
diagonal = [1, 1, -1]

[run]
deterministic = true

[count]
p = [1, 2]

[expsum]
p = 2
alpha = [[["1/3", "0"]]]

[local]
q_bound = 5
j_max = 6
series_q = 2

[arch]
x = 0.5
samples = 20000
beta = [[[0.2, -0.1]]]
scaling_p = [2.0]

[arch.quadrature]
order = 6
panels_per_oscillation = 0.25
max_evals = 5000

[hasse]
p = [1, 2, 3]
q_bound = 5
"#;

#[test]
fn every_command_round_trips() {
    let v = parse_config(GAUSSIAN).unwrap();
    for cmd in [Command::FieldInfo, Command::Count, Command::Expsum, Command::Local, Command::Arch, Command::Hasse, Command::Bounds] {
        let rep = run_command(&v, cmd);
        assert!(rep.errors.is_empty(), "{cmd:?}: {:?}", rep.errors);
        let json = emit_report(&rep, Format::Json);
        assert_eq!(emit_report(&parse_report_json(&json).unwrap(), Format::Json), json, "{cmd:?}");
        assert_eq!(emit_report(&run_command(&v, cmd), Format::Json), json, "{cmd:?} is not deterministic");
    }
}

#[test]
fn blocks_carry_their_results() {
    let v = parse_config(GAUSSIAN).unwrap();
    let ex = run_command(&v, Command::Expsum).expsum.unwrap();
    let res = ex.result.unwrap();
    assert!(res.histogram.is_some() && res.phase_modulus.is_some());
    assert!(matches!(ex.arc, Some(ArcClass::Major { .. }) | Some(ArcClass::Minor)));
    let arch = run_command(&v, Command::Arch).arch.unwrap();
    let [re, im] = arch.place_product.unwrap();
    let v1 = arch.v1.unwrap();
    assert!((re - v1.re).abs() < 1e-6 && (im - v1.im).abs() < 1e-6);
    assert!(arch.scaling[0].deviation < 1e-6);
    let local = run_command(&v, Command::Local).local.unwrap();
    assert_eq!(local.series.unwrap().q_bound, 2);
    let csv = String::from_utf8(emit_report(&run_command(&v, Command::Local), Format::Csv)).unwrap();
    assert!(csv.starts_with("p,f,e,norm,j,gamma,a_j,status\n2,1,2,2,1,"), "{csv}");
}

#[test]
fn partial_failure_keeps_completed_blocks() {
    let text = GAUSSIAN.replace("class_number_one = true", "class_number_one = false");
    let v = parse_config(&text).unwrap();
    let rep = run_command(&v, Command::Local);
    // the Euler product survives, the singular series needs class number one
    assert!(rep.local.as_ref().unwrap().euler.is_some());
    assert!(rep.local.as_ref().unwrap().series.is_none());
    assert_eq!(rep.errors.len(), 1);
    assert!(!rep.errors[0].budget);
}

#[test]
fn config_echo_is_idempotent() {
    let a = parse_config(GAUSSIAN).unwrap().config;
    let text = emit_config(&a).unwrap();
    assert_eq!(parse_config(&text).unwrap().config, a);
    assert_eq!(emit_config(&parse_config(&text).unwrap().config).unwrap(), text);
}

#[test]
fn commands_without_a_system_fail_cleanly() {
    let v = parse_config("[bounds]\nd_max = 4\n").unwrap();
    assert!(run_command(&v, Command::Bounds).errors.is_empty());
    let rep = run_command(&v, Command::Count);
    assert!(rep.counts.is_none());
    assert!(rep.errors[0].message.contains("[system]"));
}
