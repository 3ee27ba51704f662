//! Parsers reject malformed input with errors, never panics.

use proptest::prelude::*;

use rcs_bounds::circuits::text::parse_circuit;
use rcs_bounds::costmodel::HardwareProfile;
use rcs_bounds::fidmodel::{fit, read_dataset_csv, read_trend_csv};
use rcs_bounds::frontier::{parse_map_csv, write_contours_json};
use rcs_bounds::statevec::{decode_amplitudes, SimConfig};
use rcs_bounds::xeb::read_xeb_csv;

const CIRCUIT: &str = "2 2 5\n# grid 1 2\n0 0 sqrt_x\n0 1 sqrt_y\n0 0 1 cz\n1 0 sqrt_w\n1 1 sqrt_x\n";

fn mutate(base: &str, edits: &[(usize, char)]) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    for &(pos, c) in edits {
        let i = pos % (chars.len() + 1);
        if i == chars.len() || c == '\u{0}' {
            chars.insert(i.min(chars.len()), c);
        } else {
            chars[i] = c;
        }
    }
    chars.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn circuit_text(edits in prop::collection::vec((0usize..200, prop::char::range(' ', '~')), 0..6)) {
        let _ = parse_circuit(&mutate(CIRCUIT, &edits));
    }

    #[test]
    fn amplitude_bytes(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = decode_amplitudes(&bytes, &SimConfig { max_qubits: 8 });
    }

    #[test]
    fn amplitude_header(n in any::<u64>(), tail in prop::collection::vec(any::<u8>(), 0..80)) {
        let mut bytes = n.to_le_bytes().to_vec();
        bytes.extend(tail);
        let _ = decode_amplitudes(&bytes, &SimConfig { max_qubits: 8 });
    }

    #[test]
    fn fidelity_csv(edits in prop::collection::vec((0usize..80, prop::char::range(' ', '~')), 0..6)) {
        let text = mutate("n,m,f_xeb,weight\n12,14,0.5,1\n53,20,0.0023,2\n", &edits);
        if let Ok(ds) = read_dataset_csv(text.as_bytes()) {
            let _ = fit(&ds);
        }
    }

    #[test]
    fn trend_csv(edits in prop::collection::vec((0usize..80, prop::char::range(' ', '~')), 0..6)) {
        let _ = read_trend_csv(mutate("year,two_qubit_error\n2015,0.02\n2016,0.015\n", &edits).as_bytes());
    }

    #[test]
    fn xeb_csv(edits in prop::collection::vec((0usize..120, prop::char::range(' ', '~')), 0..6)) {
        let _ = read_xeb_csv(mutate("n,m,seed,f,n_samples,f_xeb,std_err\n4,4,1,1,20,0.9,0.2\n", &edits).as_bytes());
    }

    #[test]
    fn profile_json(edits in prop::collection::vec((0usize..300, prop::char::range(' ', '~')), 0..4)) {
        let base = HardwareProfile::default().to_json().unwrap();
        let _ = HardwareProfile::from_json(&mutate(&base, &edits));
    }

    #[test]
    fn map_csv(edits in prop::collection::vec((0usize..300, prop::char::range(' ', '~')), 0..4)) {
        let base = "n,m,label,log2_rq_seconds,log2_rc_seconds,best_classical,alpha_sa,alpha_sfa\n\
                    20,6,CLASSICAL_SFA,-6.5,-26.4,SFA,3.7,2.4\n20,7,QUANTUM_ADVANTAGE,-6.1,-4.3,SFA,,\n\
                    30,6,CLASSICAL_SA,-6.0,-20.1,SA,3.0,2.0\n30,7,QUANTUM_INFEASIBLE,40.0,50.0,SA,,\n";
        if let Ok(map) = parse_map_csv(mutate(base, &edits).as_bytes()) {
            write_contours_json(&map, 3.15e9, Vec::new()).unwrap();
        }
    }
}

#[test]
fn map_base_parses() {
    let base = "n,m,label,log2_rq_seconds,log2_rc_seconds,best_classical,alpha_sa,alpha_sfa\n\
                20,6,CLASSICAL_SFA,-6.5,-26.4,SFA,3.7,2.4\n20,7,QUANTUM_ADVANTAGE,-6.1,-4.3,SFA,,\n\
                30,6,CLASSICAL_SA,-6.0,-20.1,SA,3.0,2.0\n30,7,QUANTUM_INFEASIBLE,40.0,50.0,SA,,\n";
    let map = parse_map_csv(base.as_bytes()).unwrap();
    assert_eq!(map.cells.len(), 4);
}
