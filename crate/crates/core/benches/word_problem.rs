use criterion::{criterion_group, criterion_main, Criterion};
use endcone::alphabet::Word;
use endcone::examples::antenna_system;
use endcone::group::{is_identity, is_identity_seq, Ensemble};

/// Identity words make the worst case: every (type, vertex, rotation) cell
/// of the search grid must be exhausted before a verdict.
fn words(ens: &Ensemble) -> (Word, Word, Word) {
    let al = ens.alphabet();
    let short = al.parse_word("c' a c c b c' c' a' c c b' c'").unwrap();
    let mut long = Word::new();
    for _ in 0..8 {
        long.extend_from_slice(&short);
    }
    let moved = al.parse_word("a c' b c a' c' b' c").unwrap();
    assert!(is_identity(ens, &short));
    assert!(is_identity(ens, &long));
    assert!(!is_identity(ens, &moved));
    (short, long, moved)
}

fn bench_word_problem(c: &mut Criterion) {
    let ens = Ensemble::single(antenna_system());
    let (short, long, moved) = words(&ens);

    let mut group = c.benchmark_group("identity_short");
    group.bench_function("parallel", |b| b.iter(|| is_identity(&ens, &short)));
    group.bench_function("sequential", |b| b.iter(|| is_identity_seq(&ens, &short)));
    group.finish();

    let mut group = c.benchmark_group("identity_long");
    group.sample_size(30);
    group.bench_function("parallel", |b| b.iter(|| is_identity(&ens, &long)));
    group.bench_function("sequential", |b| b.iter(|| is_identity_seq(&ens, &long)));
    group.finish();

    // Non-identities short-circuit at the first witness; the parallel and
    // sequential paths should be close here.
    let mut group = c.benchmark_group("witness_short");
    group.bench_function("parallel", |b| b.iter(|| is_identity(&ens, &moved)));
    group.bench_function("sequential", |b| b.iter(|| is_identity_seq(&ens, &moved)));
    group.finish();
}

criterion_group!(benches, bench_word_problem);
criterion_main!(benches);
