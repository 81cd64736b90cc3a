use bnf::bouquet::*;
use bnf::structures::TruncationParams;
use std::path::PathBuf;
use std::time::Instant;

fn family(k: usize) -> Vec<EnumTape> {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("data/tapes/family{k:02}.json"));
    let f: TapeFile = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    f.tapes
}

#[test]
fn ten_families_claims() {
    let params = TruncationParams::default();
    for k in 1..=10 {
        let t = Instant::now();
        let suite = build(&family(k), params.horizon, &params).unwrap();
        let rep = check_claims(&suite, &params).unwrap();
        assert!(rep.pass(), "family {k}: {rep:?}");
        eprintln!("family {k} ok in {:?}", t.elapsed());
    }
}
