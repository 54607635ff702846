#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "cns/snapshot_io.hpp"
#include "test_helpers.hpp"

using namespace cns;
using namespace cns_test;
namespace sp = cns::spectral;

namespace {
const Grid3 kGrid(16, 2.0 * M_PI);
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid3(7, 1.0), ValidationError);
    CHECK_THROWS_AS(Grid3(24, 1.0), ValidationError);
    CHECK_THROWS_AS(Grid3(16, 0.0), ValidationError);
    CHECK(Grid3(16, 2.0).nyquist() == doctest::Approx(4.0));
}

TEST_CASE("forward transform of a constant field keeps only the DC mode") {
    RealField f(kGrid, 1);
    for (auto& v : f.values) v = 3.25;
    const SpectralField fh = sp::forward_transform(f);
    CHECK(std::abs(fh.at(0, 0, 0, 0) - Complex(3.25, 0.0)) < 1e-14);
    double off_dc = 0.0;
    for (size_t i = 1; i < fh.coeffs.size(); ++i) off_dc = std::max(off_dc, std::abs(fh.coeffs[i]));
    CHECK(off_dc < 1e-13);
}

TEST_CASE("cos(2 pi x / L) produces two conjugate modes of amplitude 1/2") {
    const RealField f = sample_scalar(kGrid, [&](const Vec3& x) { return std::cos(2.0 * M_PI * x[0] / kGrid.L); });
    const SpectralField fh = sp::forward_transform(f);
    CHECK(std::abs(fh.at(0, 1, 0, 0) - Complex(0.5, 0.0)) < 1e-13);
    CHECK(std::abs(fh.at(0, kGrid.n - 1, 0, 0) - Complex(0.5, 0.0)) < 1e-13);
    double rest = 0.0;
    for (int i0 = 0; i0 < kGrid.n; ++i0)
        for (int i1 = 0; i1 < kGrid.n; ++i1)
            for (int i2 = 0; i2 < kGrid.n; ++i2) {
                if (i1 == 0 && i2 == 0 && (i0 == 1 || i0 == kGrid.n - 1)) continue;
                rest = std::max(rest, std::abs(fh.at(0, i0, i1, i2)));
            }
    CHECK(rest < 1e-13);
}

TEST_CASE("roundtrip on random fields is 1e-12 accurate and Hermitian") {
    const SpectralField fh = solver::random_scalar_band(kGrid, 42, 1, 6, 1.0);
    const RealField f = sp::inverse_transform(fh);
    const SpectralField back = sp::forward_transform(f);
    CHECK(field_rel_diff(fh, back) < 1e-12);
    CHECK(sp::hermitian_asymmetry(back) < 1e-12 * sp::max_abs_coeff(back));
    // physical-side roundtrip too
    const RealField f2 = sp::inverse_transform(back);
    CHECK(field_rel_diff(f, f2) < 1e-12);
}

TEST_CASE("transform rejections") {
    RealField f(kGrid, 1);
    f.values[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sp::forward_transform(f), ValidationError);

    SpectralField fh(kGrid, 1);
    fh.at(0, 1, 2, 3) = Complex(1.0, 0.5);  // no conjugate partner
    CHECK_THROWS_AS(sp::inverse_transform(fh), ValidationError);
}

TEST_CASE("zero spectrum and DC-only spectrum invert exactly") {
    SpectralField zero(kGrid, 1);
    const RealField z = sp::inverse_transform(zero);
    for (double v : z.values) CHECK(v == 0.0);

    SpectralField dc(kGrid, 1);
    dc.at(0, 0, 0, 0) = 2.5;
    const RealField c = sp::inverse_transform(dc);
    for (double v : c.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("Leray projection annihilates gradients and fixes divergence-free fields") {
    const SpectralField phi = solver::random_scalar_band(kGrid, 7, 1, 5, 1.0);
    const SpectralField grad = sp::gradient_of_scalar(phi);
    const SpectralField killed = sp::leray_project(grad);
    CHECK(sp::max_abs_coeff(killed) < 1e-12 * sp::max_abs_coeff(grad));

    const SpectralField shear = solver::shear_flow(kGrid, 1.0);
    CHECK(field_rel_diff(sp::leray_project(shear), shear) < 1e-12);

    const SpectralField u = solver::random_divfree_band(kGrid, 9, 1, 5, 1.0);
    const SpectralField once = sp::leray_project(u);
    const SpectralField twice = sp::leray_project(once);
    CHECK(field_rel_diff(once, twice) < 1e-12);
    CHECK(sp::relative_divergence(once) < 1e-12);

    SpectralField scalar(kGrid, 1);
    CHECK_THROWS_AS(sp::leray_project(scalar), ValidationError);
}

TEST_CASE("Leray projection passes the zero mode through") {
    SpectralField u(kGrid, 3);
    u.at(0, 0, 0, 0) = 1.5;
    u.at(1, 0, 0, 0) = -0.5;
    const SpectralField p = sp::leray_project(u);
    CHECK(std::abs(p.at(0, 0, 0, 0) - Complex(1.5, 0.0)) < 1e-15);
    CHECK(std::abs(p.at(1, 0, 0, 0) - Complex(-0.5, 0.0)) < 1e-15);
}

TEST_CASE("heat semigroup: identity at t=0, single-mode factor, composition law") {
    const SpectralField f = solver::random_scalar_band(kGrid, 3, 1, 6, 1.0);
    CHECK(field_rel_diff(sp::heat_propagate(f, 0.0), f) < 1e-15);
    CHECK_THROWS_AS(sp::heat_propagate(f, -0.1), ValidationError);

    SpectralField mode(kGrid, 1);
    mode.at(0, 2, 0, 0) = Complex(0.5, 0.0);
    mode.at(0, kGrid.n - 2, 0, 0) = Complex(0.5, 0.0);
    const double t = 0.37;
    const double xi = 2.0 / kGrid.L;
    const SpectralField heated = sp::heat_propagate(mode, t);
    const double expected = 0.5 * std::exp(-4.0 * M_PI * M_PI * xi * xi * t);
    CHECK(std::abs(heated.at(0, 2, 0, 0).real() - expected) < 1e-15);

    const SpectralField ab = sp::heat_propagate(sp::heat_propagate(f, 0.2), 0.3);
    const SpectralField c = sp::heat_propagate(f, 0.5);
    CHECK(field_rel_diff(ab, c) < 1e-12);

    // every Fourier amplitude decays monotonically
    const SpectralField h = sp::heat_propagate(f, 0.05);
    for (size_t i = 0; i < f.coeffs.size(); ++i) CHECK(std::abs(h.coeffs[i]) <= std::abs(f.coeffs[i]) + 1e-300);
}

TEST_CASE("heat semigroup obeys the maximum principle (dense-grid oracle)") {
    // oracle: evaluate sup on a 2x refined grid via exact zero padding
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        const SpectralField f = solver::random_scalar_band(kGrid, seed, 1, 7, 1.0);
        const double sup_f =
            sp::lp_norm(sp::inverse_transform_unchecked(sp::zero_pad(f, 2)), kInf);
        const SpectralField heated = sp::heat_propagate(f, 0.05);
        const double sup_heated =
            sp::lp_norm(sp::inverse_transform_unchecked(sp::zero_pad(heated, 2)), kInf);
        CHECK(sup_heated <= sup_f * (1.0 + 1e-12));
    }
}

TEST_CASE("curl: gradient fields are killed, shear flow matches the symbolic oracle") {
    const SpectralField phi = solver::random_scalar_band(kGrid, 21, 1, 5, 1.0);
    const SpectralField grad = sp::gradient_of_scalar(phi);
    CHECK(sp::max_abs_coeff(sp::curl(grad)) < 1e-12 * sp::max_abs_coeff(grad));

    // u = (sin(2 pi x2 / L), 0, 0) -> curl = (0, 0, -(2 pi/L) cos(2 pi x2/L))
    const double k = 2.0 * M_PI / kGrid.L;
    const SpectralField shear = solver::shear_flow(kGrid, 1.0);
    const RealField w = sp::inverse_transform(sp::curl(shear));
    const RealField w_oracle = sample_vector(kGrid, [&](const Vec3& x) {
        return Vec3{0.0, 0.0, -k * std::cos(k * x[1])};
    });
    CHECK(field_rel_diff(w, w_oracle) < 1e-12);

    // divergence of curl vanishes
    const SpectralField u = solver::random_divfree_band(kGrid, 31, 1, 5, 1.0);
    const SpectralField w2 = sp::curl(u);
    CHECK(sp::max_abs_coeff(sp::divergence(w2)) < 1e-11 * sp::max_abs_coeff(w2));
}

TEST_CASE("Plancherel: |grad u|_2 = |curl u|_2 for divergence-free fields") {
    const SpectralField u = solver::random_divfree_band(kGrid, 77, 1, 6, 2.0);
    double grad_sq = sp::dissipation_norm_sq(u);
    const double curl_sq = sp::l2_norm(sp::curl(u)) * sp::l2_norm(sp::curl(u));
    CHECK(rel_err(grad_sq, curl_sq) < 1e-12);
}

TEST_CASE("lp_norm: homogeneity, constants, Parseval agreement") {
    CHECK_THROWS_AS(sp::lp_norm(RealField(kGrid, 1), 0.5), ValidationError);

    RealField zero(kGrid, 1);
    CHECK(sp::lp_norm(zero, 2.0) == 0.0);

    RealField c(kGrid, 1);
    for (auto& v : c.values) v = -2.0;
    const double volume = kGrid.volume();
    CHECK(rel_err(sp::lp_norm(c, 3.0), 2.0 * std::pow(volume, 1.0 / 3.0)) < 1e-13);
    CHECK(sp::lp_norm(c, kInf) == doctest::Approx(2.0));

    const SpectralField fh = solver::random_scalar_band(kGrid, 5, 1, 6, 1.3);
    const RealField f = sp::inverse_transform(fh);
    CHECK(rel_err(sp::lp_norm(f, 2.0), sp::l2_norm(fh)) < 1e-12);

    RealField scaled = f;
    for (auto& v : scaled.values) v *= -3.0;
    CHECK(rel_err(sp::lp_norm(scaled, 4.0), 3.0 * sp::lp_norm(f, 4.0)) < 1e-13);
}

TEST_CASE("eval_at reproduces grid samples and interpolates band-limited data exactly") {
    const SpectralField fh = solver::random_scalar_band(kGrid, 8, 1, 4, 1.0);
    const RealField f = sp::inverse_transform(fh);
    const Vec3 p = kGrid.point(3, 7, 12);
    CHECK(rel_err(sp::eval_at(fh, p)[0], f.at(0, 3, 7, 12)) < 1e-12);

    // off-grid: compare against the 2x refined grid value
    const SpectralField padded = sp::zero_pad(fh, 2);
    const Grid3 fine(2 * kGrid.n, kGrid.L);
    const RealField f_fine = sp::inverse_transform_unchecked(padded);
    const Vec3 q = fine.point(5, 9, 3);  // half-step point of the coarse grid
    CHECK(rel_err(sp::eval_at(fh, q)[0], f_fine.at(0, 5, 9, 3)) < 1e-12);
}

TEST_CASE("snapshot file roundtrip is bit-exact") {
    namespace fs = std::filesystem;
    const SpectralField u = solver::random_divfree_band(kGrid, 99, 1, 5, 1.0);
    const std::string path = (fs::temp_directory_path() / "cns_test_snapshot.cns").string();
    write_snapshot(path, u, 0.625);
    const Snapshot snap = read_snapshot(path);
    CHECK(snap.time == 0.625);
    CHECK(snap.field.grid == kGrid);
    CHECK(snap.field.components == 3);
    REQUIRE(snap.field.coeffs.size() == u.coeffs.size());
    for (size_t i = 0; i < u.coeffs.size(); ++i) CHECK(snap.field.coeffs[i] == u.coeffs[i]);
    fs::remove(path);
}

TEST_CASE("dealias mask and zero padding") {
    SpectralField f = solver::random_scalar_band(kGrid, 55, 1, 8, 1.0);
    sp::apply_dealias_mask(f, 2.0 / 3.0);
    const double cut = (2.0 / 3.0) * kGrid.n / 2.0;
    for (int i0 = 0; i0 < kGrid.n; ++i0)
        for (int i1 = 0; i1 < kGrid.n; ++i1)
            for (int i2 = 0; i2 < kGrid.n; ++i2) {
                const double k0 = kGrid.signed_index(i0), k1 = kGrid.signed_index(i1), k2 = kGrid.signed_index(i2);
                if (k0 * k0 + k1 * k1 + k2 * k2 > cut * cut * (1 + 1e-12))
                    CHECK(std::abs(f.at(0, i0, i1, i2)) == 0.0);
            }
    // padding preserves the represented polynomial: values at shared points agree
    const SpectralField padded = sp::zero_pad(f, 2);
    const RealField coarse = sp::inverse_transform_unchecked(f);
    const RealField fine = sp::inverse_transform_unchecked(padded);
    const Grid3 big(2 * kGrid.n, kGrid.L);
    double worst = 0.0;
    for (int i0 = 0; i0 < kGrid.n; ++i0)
        for (int i1 = 0; i1 < kGrid.n; ++i1)
            for (int i2 = 0; i2 < kGrid.n; ++i2)
                worst = std::max(worst, std::abs(coarse.at(0, i0, i1, i2) - fine.at(0, 2 * i0, 2 * i1, 2 * i2)));
    CHECK(worst < 1e-12);
}

TEST_CASE("parseval on every stored field form") {
    const SpectralField u = solver::random_divfree_band(kGrid, 123, 2, 6, 0.7);
    const RealField up = sp::inverse_transform(u);
    CHECK(rel_err(sp::lp_norm(up, 2.0), sp::l2_norm(u)) < 1e-12);
}
