use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hcr_core::fit::{fit_alpha, parse_fit_pairs};
use hcr_core::indicators::h_index;
use hcr_core::ingest::group_by_field;
use hcr_core::rank::merge_rank;
use hcr_core::ratio::{aggregate_top_vectors, build_divisor_table, compute_h_ratios};
use hcr_core::{data, DivisorPreset, NsfField, PaperProfile};
use std::hint::black_box;

fn fit(c: &mut Criterion) {
    let pairs = parse_fit_pairs(data::PUBLISHED_PAIRS_CSV.as_bytes()).unwrap();
    c.bench_function("fit_alpha/8_pairs", |b| {
        b.iter(|| fit_alpha(black_box(&pairs)).unwrap())
    });
}

fn merge(c: &mut Criterion) {
    let lists = group_by_field(&data::appendix_rows());
    let divisors =
        build_divisor_table(DivisorPreset::Appendix, &data::default_mapping(), None, 3).unwrap();
    c.bench_function("merge_rank/200_rows", |b| {
        b.iter(|| merge_rank(black_box(lists.values()), &divisors, 100, "appendix").unwrap())
    });
}

fn h(c: &mut Criterion) {
    // Deterministic profiles of growing size.
    let profiles: Vec<PaperProfile> = [10usize, 100, 1000]
        .iter()
        .map(|&n| PaperProfile::new("P", (0..n as u64).map(|i| (i * 7919) % 1009).collect()))
        .collect();
    let mut group = c.benchmark_group("h_index");
    for p in &profiles {
        group.bench_function(format!("{}_papers", p.paper_citations.len()), |b| {
            b.iter(|| h_index(black_box(p)))
        });
    }
    group.finish();
}

fn aggregation(c: &mut Criterion) {
    let snapshots = data::hratio_snapshots();
    let mapping = data::default_mapping();
    c.bench_function("aggregate_and_h_ratios/528_lists", |b| {
        b.iter_batched(
            || snapshots.clone(),
            |s| {
                let agg = aggregate_top_vectors(&s, &mapping, None).unwrap();
                compute_h_ratios(&agg, &NsfField::mathematics()).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, fit, merge, h, aggregation);
criterion_main!(benches);
