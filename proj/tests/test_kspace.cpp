#include "doctest.h"
#include "pal/fft.hpp"
#include "pal/kspace.hpp"
#include "reference.hpp"

using namespace pal;

namespace {

constexpr double kRho0 = 1.204;

GridSpec3D small_grid() { return {{-0.1, 0.01, 11}, {-0.08, 0.01, 9}, {0.0, 0.005, 13}}; }

// Smooth, compact test source.
ComplexField3D blob(const GridSpec3D& g, double cx, double cy, double cz, double width) {
  ComplexField3D q(g);
  for (std::size_t k = 0; k < g.z.count; ++k)
    for (std::size_t j = 0; j < g.y.count; ++j)
      for (std::size_t i = 0; i < g.x.count; ++i) {
        const double dx = g.x.node(i) - cx, dy = g.y.node(j) - cy, dz = g.z.node(k) - cz;
        const double r2 = (dx * dx + dy * dy + dz * dz) / (width * width);
        q.at(i, j, k) = std::polar(std::exp(-r2), 3.0 * dx / width);
      }
  return q;
}

ComplexField3D solve(const ComplexField3D& q, double fa, GreenMode mode = GreenMode::sampled) {
  const auto dims = padded_dims(q.grid, {2.0, 2.0, 2.0});
  const Wavenumber ka{2.0 * ref::pi * fa / 343.2, 0.0};
  return solve_audio({q, fa}, green_spectrum(ka, q.grid, dims, mode), kRho0);
}

double max_abs(const ComplexField3D& f) {
  double m = 0.0;
  for (const auto& x : f.data) m = std::max(m, std::abs(x));
  return m;
}

// Average of exp(ikr)/(4 pi r) over the cell centred on (x, y, z): the 1/r part through the
// divergence-theorem box integral, the smooth remainder with a 12-point tensor Gauss rule per octant.
Complex cell_average(double k, double x, double y, double z, double hx, double hy, double hz) {
  const double x0 = x - hx / 2, y0 = y - hy / 2, z0 = z - hz / 2;
  const double v = hx * hy * hz;
  const double singular = ref::box_inverse_distance(x0, x0 + hx, y0, y0 + hy, z0, z0 + hz) / (4.0 * ref::pi * v);
  std::vector<double> gx, gw;
  ref::gauss_legendre(12, gx, gw);
  Complex smooth = 0.0;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0})
      for (double sz : {-1.0, 1.0})
        for (int a = 0; a < 12; ++a)
          for (int b = 0; b < 12; ++b)
            for (int c = 0; c < 12; ++c) {
              const double px = x + 0.25 * hx * (sx + gx[a]), py = y + 0.25 * hy * (sy + gx[b]),
                           pz = z + 0.25 * hz * (sz + gx[c]);
              const double r = std::sqrt(px * px + py * py + pz * pz);
              const Complex f =
                  r > 0.0 ? (std::exp(kI * k * r) - 1.0) / (4.0 * ref::pi * r) : kI * k / (4.0 * ref::pi);
              smooth += gw[a] * gw[b] * gw[c] * f / 64.0;
            }
  return singular + smooth;
}

}  // namespace

TEST_CASE("virtual source density") {
  auto m = make_medium();
  m.c0 = 343.2;
  const GridSpec3D g{{0.0, 0.01, 3}, {0.0, 0.01, 3}, {0.0, 0.01, 2}};
  ComplexField3D p(g);
  std::fill(p.data.begin(), p.data.end(), Complex{100.0, 0.0});
  const auto q = virtual_source_density(p, p, m, 1000.0);
  const double expect = 1.2 * 2.0 * ref::pi * 1000.0 * 1e4 / (1.204 * 1.204 * std::pow(343.2, 4));
  for (const auto& x : q.q.data) CHECK(std::abs(x) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(q.q.data[0]) == doctest::Approx(3.75e-3).epsilon(1e-2));
  CHECK(q.q.data[0].imag() < 0.0);

  ComplexField3D zero(g);
  for (const auto& x : virtual_source_density(zero, p, m, 1000.0).q.data) CHECK(x == Complex{});

  ComplexField3D p1(g), p2(g);
  for (std::size_t n = 0; n < p1.data.size(); ++n) {
    p1.data[n] = {1.0 + n, 0.5 * n};
    p2.data[n] = {-0.3 * n, 2.0};
  }
  const auto base = virtual_source_density(p1, p2, m, 1000.0);
  for (auto& x : p1.data) x *= 2.0;
  for (auto& x : p2.data) x *= 2.0;
  const auto twice = virtual_source_density(p1, p2, m, 1000.0);
  for (std::size_t n = 0; n < p1.data.size(); ++n) CHECK(std::abs(twice.q.data[n] - 4.0 * base.q.data[n]) < 1e-12 * std::abs(twice.q.data[n]) + 1e-300);

  const GridSpec3D other{{0.0, 0.01, 3}, {0.0, 0.01, 3}, {0.0, 0.01, 3}};
  CHECK_THROWS_AS(virtual_source_density(p, ComplexField3D(other), m, 1000.0), ShapeError);
}

TEST_CASE("sound pressure level") {
  CHECK(spl(20e-6) == doctest::Approx(0.0));
  CHECK(spl(2.0) == doctest::Approx(100.0));
  CHECK(spl(Complex{0.0, 1.0}) == doctest::Approx(93.9794).epsilon(1e-6));
  CHECK(std::isinf(spl(0.0)));
  CHECK(spl(0.0) < 0.0);
}

TEST_CASE("inverse-distance box integral") {
  struct B {
    double x0, x1, y0, y1, z0, z1;
  };
  for (const auto& b : {B{-0.5, 0.5, -0.5, 0.5, -0.5, 0.5}, B{0.0, 1.0, 0.0, 1.0, 0.0, 1.0}, B{0.2, 0.7, -0.1, 0.4, 1.0, 1.3},
                        B{-0.005, 0.005, -0.005, 0.005, -0.0025, 0.0025}, B{-2.0, 1.0, 0.0, 0.5, -0.25, 3.0}}) {
    const double expect = ref::box_inverse_distance(b.x0, b.x1, b.y0, b.y1, b.z0, b.z1);
    CHECK(inverse_distance_box_integral(b.x0, b.x1, b.y0, b.y1, b.z0, b.z1) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("sampled Green's kernel") {
  const std::array<double, 3> h{0.01, 0.01, 0.005};
  const Wavenumber ka{2.0 * ref::pi * 1000.0 / 343.2, 0.0};
  // Outside the near zone: point value.
  for (auto [x, y, z] : {std::tuple{0.05, 0.0, 0.0}, std::tuple{0.03, -0.04, 0.1}, std::tuple{0.0, 0.0, 0.025}}) {
    const double r = std::sqrt(x * x + y * y + z * z);
    const Complex expect = std::exp(kI * ka.real_part * r) / (4.0 * ref::pi * r);
    CHECK(std::abs(sampled_green(ka, x, y, z, h) - expect) < 1e-13 * std::abs(expect));
  }
  // Inside: the cell average.
  for (auto [x, y, z] : {std::tuple{0.0, 0.0, 0.0}, std::tuple{0.01, 0.0, 0.0}, std::tuple{0.0, 0.0, 0.005},
                         std::tuple{0.02, -0.01, 0.015}, std::tuple{-0.01, 0.02, -0.02}}) {
    const Complex expect = cell_average(ka.real_part, x, y, z, h[0], h[1], h[2]);
    CHECK(std::abs(sampled_green(ka, x, y, z, h) - expect) < 1e-7 * std::abs(expect));
  }
  // Symmetric in every offset sign, finite at the origin.
  const Complex a = sampled_green(ka, 0.02, -0.01, 0.005, h);
  CHECK(std::abs(a - sampled_green(ka, -0.02, 0.01, -0.005, h)) < 1e-13 * std::abs(a));
  CHECK(std::isfinite(std::abs(sampled_green(ka, 0.0, 0.0, 0.0, h))));
}

TEST_CASE("analytic Green's spectrum") {
  const auto g = small_grid();
  const auto dims = padded_dims(g, {2.0, 2.0, 2.0});
  const Wavenumber ka{18.3, 0.0};
  const auto spec = green_spectrum(ka, g, dims, GreenMode::analytic);
  const Complex kt{18.3, 1e-4 * 18.3};
  CHECK(std::abs(spec.transfer(0, 0, 0) * g.cell_volume() + 1.0 / (kt * kt)) < 1e-12 / (18.3 * 18.3));
  // Node (3, n-2, 5) sits at K = 2 pi (3/Lx, -2/Ly, 5/Lz) with L the padded lengths.
  const double kx = 2.0 * ref::pi * 3.0 / (dims.nx * 0.01), ky = 2.0 * ref::pi * 2.0 / (dims.ny * 0.01),
               kz = 2.0 * ref::pi * 5.0 / (dims.nz * 0.005);
  const Complex expect = 1.0 / ((kx * kx + ky * ky + kz * kz - kt * kt) * g.cell_volume());
  CHECK(std::abs(spec.transfer(3, dims.ny - 2, 5) - expect) < 1e-12 * std::abs(expect));
  for (std::size_t l = 0; l < dims.nz; ++l)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t i = 0; i < dims.nx; ++i) CHECK(std::isfinite(std::abs(spec.transfer(i, j, l))));
}

TEST_CASE("sampled spectrum inverts to the sampled kernel") {
  const auto g = small_grid();
  const auto dims = padded_dims(g, {2.0, 2.0, 2.0});
  const Wavenumber ka{18.3, 0.0};
  const auto spec = green_spectrum(ka, g, dims, GreenMode::sampled);
  AlignedBuffer buf(dims.size());
  for (std::size_t l = 0; l < dims.nz; ++l)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t i = 0; i < dims.nx; ++i) buf[i + dims.nx * (j + dims.ny * l)] = spec.transfer(i, j, l);
  FftPlan::volume(dims.nx, dims.ny, dims.nz, FftDirection::inverse).execute(buf.data(), buf.data());
  auto signed_offset = [](std::size_t i, std::size_t n) { return i <= n / 2 ? double(i) : double(i) - double(n); };
  const std::array<double, 3> h{g.x.spacing, g.y.spacing, g.z.spacing};
  double worst = 0.0;
  for (std::size_t l = 0; l < dims.nz; ++l)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t i = 0; i < dims.nx; ++i) {
        const Complex expect = sampled_green(ka, h[0] * signed_offset(i, dims.nx), h[1] * signed_offset(j, dims.ny),
                                             h[2] * signed_offset(l, dims.nz), h);
        const Complex got = buf[i + dims.nx * (j + dims.ny * l)] / static_cast<double>(dims.size());
        worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
      }
  CHECK(worst < 1e-10);
}

TEST_CASE("audio solve equals the direct discrete sum") {
  const auto g = small_grid();
  const auto q = blob(g, 0.0, 0.0, 0.02, 0.03);
  const double fa = 2000.0;
  const Wavenumber ka{2.0 * ref::pi * fa / 343.2, 0.0};
  const auto p = solve(q, fa);
  const std::array<double, 3> h{g.x.spacing, g.y.spacing, g.z.spacing};
  auto weight = [&](std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; };
  for (auto [a, b, c] : {std::tuple{5, 4, 0}, std::tuple{0, 0, 12}, std::tuple{10, 8, 6}, std::tuple{3, 7, 2}}) {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < g.z.count; ++k)
      for (std::size_t j = 0; j < g.y.count; ++j)
        for (std::size_t i = 0; i < g.x.count; ++i) {
          const double w = weight(i, g.x.count) * weight(j, g.y.count) * weight(k, g.z.count);
          sum += q.at(i, j, k) * w * g.cell_volume() *
                 sampled_green(ka, g.x.node(a) - g.x.node(i), g.y.node(b) - g.y.node(j), g.z.node(c) - g.z.node(k), h);
        }
    const Complex expect = -kI * kRho0 * 2.0 * ref::pi * fa * sum;
    CHECK(std::abs(p.at(a, b, c) - expect) < 1e-10 * std::abs(expect));
  }
}

TEST_CASE("point-source reduction and reciprocity") {
  const GridSpec3D g{{-0.1, 0.01, 21}, {-0.1, 0.01, 21}, {0.0, 0.01, 21}};
  const double fa = 1000.0, k = 2.0 * ref::pi * fa / 343.2;
  ComplexField3D q(g);
  const Complex q0{2e-3, -1e-3};
  q.at(10, 10, 10) = q0;
  const auto p = solve(q, fa);
  for (auto [i, j, l] : {std::tuple{10, 10, 20}, std::tuple{0, 3, 0}, std::tuple{15, 10, 10}, std::tuple{20, 20, 20}}) {
    const double r = std::sqrt(std::pow(g.x.node(i), 2) + std::pow(g.y.node(j), 2) + std::pow(g.z.node(l) - 0.1, 2));
    const Complex expect = -kI * kRho0 * 2.0 * ref::pi * fa * q0 * g.cell_volume() * std::exp(kI * k * r) / (4.0 * ref::pi * r);
    CHECK(std::abs(p.at(i, j, l) - expect) < 1e-6 * std::abs(expect));
  }
  // Reciprocity: swapping source and receiver nodes leaves the response unchanged.
  ComplexField3D qa(g), qb(g);
  qa.at(3, 4, 5) = 1.0;
  qb.at(17, 12, 16) = 1.0;
  const auto pa = solve(qa, fa), pb = solve(qb, fa);
  CHECK(std::abs(pa.at(17, 12, 16) - pb.at(3, 4, 5)) < 1e-12 * std::abs(pa.at(17, 12, 16)));
  ComplexField3D qc(g), qd(g);
  qc.at(9, 10, 10) = 1.0;
  qd.at(10, 10, 11) = 1.0;
  const auto pc = solve(qc, fa), pd = solve(qd, fa);
  CHECK(std::abs(pc.at(10, 10, 11) - pd.at(9, 10, 10)) < 1e-12 * std::abs(pc.at(10, 10, 11)));
}

TEST_CASE("audio solve is linear") {
  const auto g = small_grid();
  const auto q1 = blob(g, 0.02, 0.0, 0.03, 0.02);
  const auto q2 = blob(g, -0.03, 0.02, 0.02, 0.03);
  const Complex a{0.7, -1.1}, b{-2.0, 0.4};
  ComplexField3D mix(g);
  for (std::size_t n = 0; n < mix.data.size(); ++n) mix.data[n] = a * q1.data[n] + b * q2.data[n];
  for (auto mode : {GreenMode::sampled, GreenMode::analytic}) {
    const auto p1 = solve(q1, 1500.0, mode), p2 = solve(q2, 1500.0, mode), pm = solve(mix, 1500.0, mode);
    double err = 0.0;
    for (std::size_t n = 0; n < pm.data.size(); ++n) err = std::max(err, std::abs(pm.data[n] - a * p1.data[n] - b * p2.data[n]));
    CHECK(err < 1e-10 * max_abs(pm));
  }
  ComplexField3D zero(g);
  for (const auto& x : solve(zero, 1500.0).data) CHECK(x == Complex{});
}

TEST_CASE("audio solve is shift equivariant") {
  const GridSpec3D g{{-0.1, 0.01, 21}, {-0.1, 0.01, 21}, {0.0, 0.01, 21}};
  const auto q0 = blob(g, -0.02, 0.0, 0.08, 0.012);
  const auto q1 = blob(g, 0.01, 0.02, 0.1, 0.012);  // shifted by (3, 2, 2) cells
  const auto p0 = solve(q0, 2000.0), p1 = solve(q1, 2000.0);
  double err = 0.0;
  for (std::size_t k = 0; k + 2 < 21; ++k)
    for (std::size_t j = 0; j + 2 < 21; ++j)
      for (std::size_t i = 0; i + 3 < 21; ++i) err = std::max(err, std::abs(p1.at(i + 3, j + 2, k + 2) - p0.at(i, j, k)));
  CHECK(err < 1e-10 * max_abs(p0));
}

// Known deviation: the regularized 1/(K^2 - k^2) spectrum is the Green's function of the periodic
// padded box, and wavenumber nodes near the k shell resonate. The two modes differ by tens of dB here
// and by about 10 dB on the desk piston grid, so the agreement claim is recorded as failing.
TEST_CASE("analytic and sampled spectra agree on a smooth source" * doctest::should_fail()) {
  const GridSpec3D g{{-0.2, 0.01, 41}, {-0.2, 0.01, 41}, {0.0, 0.01, 41}};
  auto q = blob(g, 0.0, 0.0, 0.2, 0.04);
  for (auto& v : q.data) v = std::abs(v);
  const auto ps = solve(q, 1000.0, GreenMode::sampled), pa = solve(q, 1000.0, GreenMode::analytic);
  CHECK(std::abs(spl(ps.at(20, 20, 40)) - spl(pa.at(20, 20, 40))) < 0.5);
}

TEST_CASE("padding is enforced") {
  const auto g = small_grid();
  const auto q = blob(g, 0.0, 0.0, 0.03, 0.2);
  const FftDims tight{g.x.count, g.y.count, g.z.count};
  const auto spec = green_spectrum({18.3, 0.0}, g, tight, GreenMode::sampled);
  CHECK_THROWS_AS(solve_audio({q, 1000.0}, spec, kRho0), PaddingError);
  CHECK_THROWS_AS(green_spectrum({18.3, 0.0}, g, {g.x.count - 1, g.y.count, g.z.count}, GreenMode::sampled), PaddingError);
  const auto dims = padded_dims(g, {2.0, 2.0, 2.0});
  CHECK(dims.nx >= 2 * g.x.count);
  CHECK(is_linear_convolution(g, dims));
  CHECK_FALSE(is_linear_convolution(g, tight));
}

TEST_CASE("box weights") {
  const auto g = small_grid();
  CHECK(box_cell_fraction(g, 0, 0, 0) == 0.125);
  CHECK(box_cell_fraction(g, 5, 4, 0) == 0.5);
  CHECK(box_cell_fraction(g, 5, 4, 6) == 1.0);
  CHECK(box_cell_fraction(g, 10, 4, 12) == 0.25);
}

TEST_CASE("fast transform sizes") {
  CHECK(next_fast_size(1) == 1);
  CHECK(next_fast_size(11) == 12);
  CHECK(next_fast_size(601) == 625);
  CHECK(next_fast_size(3200) == 3200);
  for (std::size_t n = 1; n < 2000; n += 37) {
    std::size_t m = next_fast_size(n);
    CHECK(m >= n);
    for (std::size_t p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    CHECK(m == 1);
  }
}
