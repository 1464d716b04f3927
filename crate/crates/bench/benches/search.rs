use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use posetfree::containers::container_pair;
use posetfree::embedding::{contains_poset, first_copy};
use posetfree::{blowup, fixtures, SetFamily};
use posetfree_bench::{band, p_free_inputs};

fn containment(c: &mut Criterion) {
    let mut group = c.benchmark_group("contains_poset");
    for name in ["chain3", "x", "butterfly"] {
        let p = fixtures::by_name(name).unwrap();
        let f = band(8, 3, 5);
        group.bench_with_input(BenchmarkId::new(name, "n8_band"), &f, |b, f| b.iter(|| contains_poset(f, &p)));
    }
    group.finish();
}

fn least_copy(c: &mut Criterion) {
    let mut group = c.benchmark_group("first_copy");
    for (name, root, t) in [("chain3", 0, 4), ("v", 1, 4), ("x", 2, 6)] {
        let p = fixtures::by_name(name).unwrap();
        let b = blowup(&p, root, t).unwrap();
        let s = SetFamily::full(7);
        group.bench_function(BenchmarkId::new(name, format!("x{root}_t{t}")), |bench| {
            bench.iter(|| first_copy(&s, &b).unwrap())
        });
    }
    group.finish();
}

fn containers(c: &mut Criterion) {
    let mut group = c.benchmark_group("container_pair");
    group.sample_size(10);
    for (name, root) in [("chain2", 0), ("chain3", 1), ("path4", 2)] {
        let p = fixtures::by_name(name).unwrap();
        let inputs = p_free_inputs(8, &p, 8);
        let s = SetFamily::full(8);
        for t in [2, 8] {
            group.bench_function(BenchmarkId::new(name, format!("n8_t{t}")), |b| {
                b.iter(|| {
                    for f in &inputs {
                        container_pair(&p, root, t, &s, f).unwrap();
                    }
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, containment, least_copy, containers);
criterion_main!(benches);
