use gatesim::engine::{simulate_parallel, SimConfig, Sizing};
use gatesim::gen::{GenSpec, Regime};
use gatesim::io::{
    emit_delays, emit_netlist, emit_stimulus, export_waveforms, parse_design, parse_stimulus, ExportFormat,
};
use gatesim::{Design, Logic4, NetId, Transition};
use proptest::prelude::*;

fn round_trip(d: &Design) -> Design {
    let n = emit_netlist(&d.netlist);
    let dl = emit_delays(&d.netlist, &d.delays);
    let s = emit_stimulus(&d.netlist, &d.stimuli);
    parse_design(&n, &dl, &s).unwrap_or_else(|e| panic!("{e}\n--- netlist\n{n}\n--- delays\n{dl}\n--- stimulus\n{s}"))
}

/// Checks the emitted VCD subset: header order, one scalar per net, strictly
/// increasing timestamps, legal values, known ids. Returns the value changes
/// per id, with the initial dump at time 0.
fn parse_vcd(text: &str) -> Vec<(String, Vec<(i64, char)>)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("$timescale 1ps $end"));
    assert_eq!(lines.next(), Some("$scope module top $end"));
    let mut vars: Vec<(String, String)> = Vec::new();
    loop {
        let l = lines.next().expect("unterminated header");
        if l == "$upscope $end" {
            break;
        }
        let t: Vec<&str> = l.split(' ').collect();
        assert_eq!((t.len(), t[0], t[1], t[2], t[5]), (6, "$var", "wire", "1", "$end"), "{l}");
        assert!(t[3].bytes().all(|b| (b'!'..=b'~').contains(&b)));
        vars.push((t[3].to_string(), t[4].to_string()));
    }
    assert_eq!(lines.next(), Some("$enddefinitions $end"));
    let mut changes: Vec<Vec<(i64, char)>> = vec![Vec::new(); vars.len()];
    let index = |id: &str| vars.iter().position(|(v, _)| v == id).unwrap_or_else(|| panic!("unknown id {id}"));
    let mut now: Option<i64> = None;
    let mut in_dump = false;
    for l in lines {
        if let Some(t) = l.strip_prefix('#') {
            let t: i64 = t.parse().unwrap();
            assert!(now.is_none_or(|n| t > n), "timestamps must increase");
            now = Some(t);
        } else if l == "$dumpvars" {
            assert_eq!(now, Some(0));
            in_dump = true;
        } else if l == "$end" {
            assert!(in_dump);
            in_dump = false;
        } else {
            let v = l.chars().next().unwrap();
            assert!("01xz".contains(v), "bad value in {l}");
            let t = now.expect("value before first timestamp");
            changes[index(&l[1..])].push((t, v));
        }
    }
    vars.into_iter().map(|(_, n)| n).zip(changes).collect()
}

fn to_char(v: Logic4) -> char {
    v.to_char().to_ascii_lowercase()
}

#[test]
fn vcd_mirrors_waveforms() {
    let d = GenSpec {
        cells: 80,
        seed: 9,
        ..GenSpec::default()
    }
    .generate()
    .unwrap();
    let r = simulate_parallel(&d, &SimConfig::parallel(3)).unwrap();
    let waves = r.waveforms().unwrap();
    let vcd = parse_vcd(&export_waveforms(&d.netlist, &waves, ExportFormat::Vcd));
    assert_eq!(vcd.len(), d.netlist.net_count());
    for (i, (name, changes)) in vcd.iter().enumerate() {
        assert_eq!(name, d.netlist.net_name(NetId(i as u32)));
        let w = &waves[i];
        let mut expected = Vec::new();
        match w.first() {
            Some(t) if t.time == 0 => expected.push((0, to_char(t.value))),
            _ => expected.push((0, 'x')),
        }
        expected.extend(w.iter().filter(|t| t.time > 0).map(|t| (t.time, to_char(t.value))));
        assert_eq!(changes, &expected, "net {name}");
    }
}

#[test]
fn constant_x_net_in_vcd() {
    let d = parse_design(
        "net a z\ntemplate B in a out z\n gate g buf a\n assign z g\nend\ncell u B in a out z\n",
        "",
        "duration 50\nwave a\n",
    )
    .unwrap();
    let r = simulate_parallel(&d, &SimConfig::parallel(1)).unwrap();
    let waves = r.waveforms().unwrap();
    assert!(waves.iter().all(|w| w.is_empty()));
    let vcd = parse_vcd(&export_waveforms(&d.netlist, &waves, ExportFormat::Vcd));
    for (_, changes) in vcd {
        assert_eq!(changes, vec![(0, 'x')]);
    }
}

#[test]
fn native_export_reparses_to_the_same_waveforms() {
    let d = GenSpec {
        cells: 150,
        regime: Regime::Skewed,
        transitions: 150,
        seed: 2,
        ..GenSpec::default()
    }
    .generate()
    .unwrap();
    let r = simulate_parallel(&d, &SimConfig::parallel(2).with_sizing(Sizing::WorstCase)).unwrap();
    let waves = r.waveforms().unwrap();
    let text = export_waveforms(&d.netlist, &waves, ExportFormat::Native);
    let back = parse_stimulus(&text).unwrap();
    assert_eq!(back.duration, d.netlist.duration());
    assert_eq!(back.waves.len(), d.netlist.net_count());
    for (i, w) in waves.iter().enumerate() {
        assert_eq!(back.get(d.netlist.net_name(NetId(i as u32))).unwrap(), w.as_slice());
    }
}

#[test]
fn compound_and_multi_output_templates_round_trip() {
    let text = "\
net a b c s co z
template HA in a b out s c
  gate x xor a b
  gate y and a b
  assign s x
  assign c y
end
template WIRE in a out z
  assign z a
end
cell h HA in a b out s co
cell w WIRE in c out z
";
    let d = parse_design(
        text,
        "delay h a s rise 1 3\ndelay h b c fall x inf\ndelay w a z rise 1 0\n",
        "duration 20\nwave a 0 1\nwave b 0 0 4 1\nwave c 2 z\n",
    )
    .unwrap();
    assert_eq!(round_trip(&d), d);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn emit_then_parse_is_identity(
        seed in any::<u64>(),
        cells in 1usize..120,
        fan_in in 1usize..=4,
        transitions in 0usize..60,
        p_inf in 0.0f64..0.5,
    ) {
        let d = GenSpec {
            cells,
            max_fan_in: fan_in,
            transitions,
            p_inf_delay: p_inf,
            seed,
            ..GenSpec::default()
        }
        .generate()
        .unwrap();
        prop_assert_eq!(round_trip(&d), d);
    }

    #[test]
    fn stimulus_round_trip(waves in prop::collection::vec(prop::collection::vec((1i64..50, 0u8..4), 0..30), 1..6)) {
        let mut text = String::from("duration 100000\n");
        let mut expected = Vec::new();
        for (i, w) in waves.iter().enumerate() {
            let mut t = 0;
            let mut prev = Logic4::X;
            let mut ts = Vec::new();
            for &(dt, code) in w {
                let v = Logic4::ALL[code as usize];
                if v == prev {
                    continue;
                }
                t += dt;
                prev = v;
                ts.push(Transition::new(t, v));
            }
            text.push_str(&format!("wave n{i}"));
            for tr in &ts {
                text.push_str(&format!(" {} {}", tr.time, tr.value));
            }
            text.push('\n');
            expected.push(ts);
        }
        let s = parse_stimulus(&text).unwrap();
        for (i, ts) in expected.iter().enumerate() {
            prop_assert_eq!(s.get(&format!("n{i}")).unwrap(), ts.as_slice());
        }
    }
}
