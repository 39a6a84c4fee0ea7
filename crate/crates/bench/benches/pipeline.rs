use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use readcompat_core::compat::compat_matrix;
use readcompat_core::features::{feature_matrix, FeatureConfig, FeatureKind};
use readcompat_core::synth::{generate, SynthConfig};
use readcompat_core::{EasyWords, FeaturePipeline, Learner, ModelSpec, Resources, TextAnalyzer};

fn pipeline(c: &mut Criterion) {
    let corpora: Vec<_> = (0..3)
        .map(|i| generate(&SynthConfig::new(format!("c{i}"), 4, 40, i)).unwrap())
        .collect();
    let analyzer = TextAnalyzer::default();
    let easy = EasyWords::embedded();
    let text = &corpora[0].documents()[0].text;

    c.bench_function("analyze_document", |b| b.iter(|| analyzer.analyze(black_box(text))));
    c.bench_function("l_feature_matrix_160_docs", |b| {
        b.iter(|| feature_matrix(black_box(&corpora[0]), &analyzer, &easy, &FeatureConfig::default()).unwrap())
    });

    let resources = Arc::new(Resources::default());
    for learner in ["softmax", "gbdt"] {
        let learner: Learner = learner.parse().unwrap();
        let trainer = FeaturePipeline::new(ModelSpec::new(learner, FeatureKind::L, 42), resources.clone()).unwrap();
        let mut group = c.benchmark_group("crossrun_3x160");
        group.sample_size(10);
        group.bench_function(learner.to_string(), |b| {
            b.iter(|| compat_matrix(&corpora, &trainer, 10).unwrap())
        });
        group.finish();
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
