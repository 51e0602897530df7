use qpolar::channels::ChannelSpec;
use qpolar::construction::{
    build_partition, build_partition_by_count, reliability_profile, CodeSpec, FrozenPolicy,
    MethodRequest,
};
use qpolar::qsim::simulate;

#[test]
fn longer_blocks_do_better_at_matched_rate() {
    // Design the short code with the cutoff, then give the long code the
    // same good fractions in each basis.
    let ch: ChannelSpec = "depolarizing:q=0.05".parse().unwrap();
    let noise = ch.noise().unwrap();
    let (short_n, long_n) = (1usize << 8, 1usize << 12);
    let short = reliability_profile(&noise, short_n, MethodRequest::MonteCarlo, 10_000, 1).unwrap();
    let short_part = build_partition(&short.amp, &short.phase, 1e-3).unwrap();
    let scale = long_n / short_n;
    let good_a = (short_part.q.len() + short_part.p.len()) * scale;
    let good_p = (short_part.q.len() + short_part.a.len()) * scale;
    let long = reliability_profile(&noise, long_n, MethodRequest::MonteCarlo, 10_000, 1).unwrap();
    let long_part = build_partition_by_count(&long.amp, &long.phase, good_a, good_p).unwrap();

    let code = |part, prof: &qpolar::construction::ReliabilityProfile| {
        CodeSpec::new(part, 1e-3, ch.clone(), prof.method, prof.metric, FrozenPolicy::AllZero).unwrap()
    };
    let short_code = code(short_part, &short);
    let long_code = code(long_part, &long);
    assert_eq!(
        short_code.partition().q.len() * scale + short_code.partition().a.len() * scale,
        long_code.partition().q.len() + long_code.partition().a.len()
    );

    let trials = 1000;
    let s = simulate(&short_code, trials, 1).unwrap().block_err.rate;
    let l = simulate(&long_code, trials, 1).unwrap().block_err.rate;
    let sigma = ((s * (1.0 - s) + l * (1.0 - l)) / trials as f64).sqrt();
    assert!(l <= s + 3.0 * sigma, "n=2^12 block_err {l} vs n=2^8 {s}");
}
