//! Parallel against sequential runs of the heavier kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tropmod_core::arith::rat::rat;
use tropmod_core::families::{distance_morphism, forgetful_family};
use tropmod_core::fibreprod::fibre_product;
use tropmod_core::matroid::{bergman_fan, Matroid};
use tropmod_core::moduli::quotient::{quotient_fan, quotient_forgetful};
use tropmod_core::moduli::{moduli_fan, ModuliChart};
use tropmod_core::par::set_sequential;

fn modes(c: &mut Criterion, name: &str, run: &dyn Fn()) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    for (label, seq) in [("parallel", false), ("sequential", true)] {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            set_sequential(seq);
            b.iter(run);
        });
    }
    set_sequential(false);
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let k5 = Matroid::complete_graph(5).unwrap();
    modes(c, "bergman_k5_balance", &|| assert!(bergman_fan(&k5).is_balanced()));

    modes(c, "moduli_m6_balance", &|| assert!(moduli_fan(6).unwrap().is_balanced()));

    let m5 = ModuliChart::with_zero(4).unwrap();
    let m4 = ModuliChart::standard(4).unwrap();
    let ft = quotient_forgetful(&m5, &m4).unwrap();
    let base = quotient_fan(&m4);
    modes(c, "fibre_product_m5_m5", &|| {
        fibre_product(&ft, &ft, &base).unwrap();
    });

    let fam = forgetful_family(4, &[rat(2)]).unwrap();
    modes(c, "distance_morphism_m4", &|| {
        distance_morphism(&fam, 1).unwrap();
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
