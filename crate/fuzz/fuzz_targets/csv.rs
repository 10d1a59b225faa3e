#![no_main]

use adascale::dataio::{parse_csv, write_csv, LoadOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for opts in [LoadOptions::default(), LoadOptions::with_target("y".to_string())] {
        let Ok(d) = parse_csv(data, &opts) else { continue };
        // Whatever parses must survive a write/parse round trip unchanged.
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).expect("writing a parsed dataset");
        let again = parse_csv(buf.as_slice(), &opts).expect("re-parsing written csv");
        let mut buf2 = Vec::new();
        write_csv(&again, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }
});
