use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use domewave::acoustic_field::{beam_pattern, rayleigh_pressure, subdivided_pressure, ArcPlane};
use domewave::commlink::{apply_channel, compute_spectrogram, demodulate, modulate};
use domewave::dome_mech::peak_deflection;
use domewave::resonance::{resonance_model, solve_wavenumber};
use domewave::sweep::linspace;
use domewave::{FieldPoint, Medium, PiezoFilm};
use domewave_bench::{reference_array, reference_geometry, reference_link, test_bits};
use std::hint::black_box;

fn mechanics(c: &mut Criterion) {
    let geom = reference_geometry();
    let film = PiezoFilm::default();
    c.bench_function("peak_deflection", |b| b.iter(|| peak_deflection(black_box(&geom), &film, 10.0)));
    let model = resonance_model(&geom, &film).unwrap();
    c.bench_function("solve_wavenumber", |b| b.iter(|| solve_wavenumber(black_box(&model))));
}

fn field(c: &mut Criterion) {
    let layout = reference_array();
    let film = PiezoFilm::default();
    let medium = Medium::water();
    let point = FieldPoint::on_axis(1.0).unwrap();
    c.bench_function("rayleigh_pressure_225", |b| {
        b.iter(|| rayleigh_pressure(black_box(&layout), &film, &medium, &point, 20e3))
    });
    let mut group = c.benchmark_group("subdivided_pressure");
    group.sample_size(10);
    for rings in [8, 64] {
        group.bench_with_input(BenchmarkId::from_parameter(rings), &rings, |b, &rings| {
            b.iter(|| subdivided_pressure(&layout, &film, &medium, &point, 20e3, rings))
        });
    }
    group.finish();
    let angles = linspace(-1.4, 1.4, 171);
    c.bench_function("beam_pattern_171", |b| {
        b.iter(|| beam_pattern(&layout, &film, &medium, 20e3, 1.0, black_box(&angles), ArcPlane::Xz))
    });
}

fn link(c: &mut Criterion) {
    let link = reference_link();
    let bits = test_bits(32);
    let tx = modulate(&bits, &link.plan, link.sample_rate, link.tx_amplitude());
    let rx = apply_channel(&tx, &link).unwrap();
    let mut group = c.benchmark_group("link_32x32");
    group.sample_size(10);
    group.bench_function("modulate", |b| {
        b.iter(|| modulate(black_box(&bits), &link.plan, link.sample_rate, link.tx_amplitude()))
    });
    group.bench_function("apply_channel", |b| b.iter(|| apply_channel(black_box(&tx), &link)));
    group.bench_function("demodulate", |b| b.iter(|| demodulate(black_box(&rx), &link.plan, link.sample_rate)));
    group
        .bench_function("spectrogram", |b| b.iter(|| compute_spectrogram(black_box(&rx), 1024, 256, link.sample_rate)));
    group.finish();
}

criterion_group!(benches, mechanics, field, link);
criterion_main!(benches);
