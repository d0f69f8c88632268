// SPDX-License-Identifier: Apache-2.0
//
// Polar dictionary grid, atom construction, pilot stacking and binary cache
// tests. Reference ring radii were computed independently and frozen.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "elaasim/geometry.hpp"
#include "elaasim/polar_dictionary.hpp"

using namespace elaasim;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/elaasim_test_") + name;
}

}  // namespace

TEST_CASE("angular grid is uniform in sine with endpoints") {
  const std::vector<double> a = angular_grid(5, {-kPi / 3, kPi / 3});
  REQUIRE(a.size() == 5);
  CHECK(a.front() == doctest::Approx(-kPi / 3).epsilon(1e-12));
  CHECK(a.back() == doctest::Approx(kPi / 3).epsilon(1e-12));
  const double step = std::sin(a[1]) - std::sin(a[0]);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    CHECK(a[i] < a[i + 1]);
    CHECK(std::sin(a[i + 1]) - std::sin(a[i]) == doctest::Approx(step).epsilon(1e-10));
  }
  const std::vector<double> one = angular_grid(1, {-0.5, 0.7});
  REQUIRE(one.size() == 1);
  CHECK(std::sin(one[0]) ==
        doctest::Approx(0.5 * (std::sin(-0.5) + std::sin(0.7))).epsilon(1e-12));
  CHECK_THROWS_AS(angular_grid(0, {-0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(angular_grid(4, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(angular_grid(4, {-2.0, 0.5}), std::invalid_argument);
}

TEST_CASE("distance rings start at the far-field sentinel and decrease") {
  const ArrayGeometry g(256, 0.005);
  const std::vector<double> r = distance_rings(0.0, g, 0.01, 1.2, 4);
  REQUIRE(r.size() == 4);
  CHECK(std::isinf(r[0]));
  CHECK(r[1] == doctest::Approx(56.88888888888889).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(56.88888888888889 / 2.0).epsilon(1e-12));
  CHECK(r[3] == doctest::Approx(56.88888888888889 / 3.0).epsilon(1e-12));
  for (std::size_t s = 1; s + 1 < r.size(); ++s) CHECK(r[s] > r[s + 1]);

  // Oblique angles shrink the radii by 1 - sin^2(theta).
  const std::vector<double> ro = distance_rings(kPi / 6, g, 0.01, 1.2, 2);
  CHECK(ro[1] == doctest::Approx(56.88888888888889 * 0.75).epsilon(1e-12));

  CHECK_THROWS_AS(distance_rings(0.0, g, 0.01, 1.2, 0), std::invalid_argument);
}

TEST_CASE("dictionary build is ring-major with unit-norm atoms") {
  const ArrayGeometry g(16, 0.005);
  const double k_c = 2.0 * kPi / 0.01;
  const PolarDictionary dict = build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 3);
  REQUIRE(dict.size() == 48);
  REQUIRE(dict.atom_params.size() == 48);

  const std::vector<double> angles = angular_grid(16, {-kPi / 3, kPi / 3});
  for (int ring = 0; ring < 3; ++ring) {
    for (int a = 0; a < 16; ++a) {
      const AtomParam& p = dict.atom_params[static_cast<std::size_t>(ring * 16 + a)];
      CHECK(p.angle == doctest::Approx(angles[static_cast<std::size_t>(a)]).epsilon(1e-14));
      if (ring == 0) {
        CHECK(std::isinf(p.distance));
      } else {
        const std::vector<double> radii = distance_rings(p.angle, g, 0.01, 1.2, 3);
        CHECK(p.distance ==
              doctest::Approx(radii[static_cast<std::size_t>(ring)]).epsilon(1e-12));
      }
    }
  }

  for (arma::uword s = 0; s < dict.size(); ++s) {
    CHECK(std::abs(arma::norm(dict.atoms.col(s)) - 1.0) < 1e-12);
  }

  // Column content matches the steering models.
  const arma::cx_vec ff = far_field_steering_vector(dict.atom_params[3].angle, g, k_c);
  CHECK(arma::abs(dict.atoms.col(3) - ff).max() < 1e-14);
  const AtomParam& near = dict.atom_params[20];
  const arma::cx_vec b = steering_vector(near.angle, near.distance, g, k_c);
  CHECK(arma::abs(dict.atoms.col(20) - b).max() < 1e-14);
}

TEST_CASE("atom override truncates the trailing rings") {
  const ArrayGeometry g(16, 0.005);
  const double k_c = 2.0 * kPi / 0.01;
  const PolarDictionary full = build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 3);
  const PolarDictionary cut = build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 3, 40);
  REQUIRE(cut.size() == 40);
  for (arma::uword s = 0; s < 40; ++s) {
    CHECK(arma::abs(cut.atoms.col(s) - full.atoms.col(s)).max() == 0.0);
    CHECK(cut.atom_params[s].angle == full.atom_params[s].angle);
  }
  CHECK_THROWS_AS(build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 3, 49),
                  std::invalid_argument);
}

TEST_CASE("default grid spec yields the reference dictionary size") {
  const ArrayGeometry g(256, 0.005);
  const double k_c = 2.0 * kPi * 30e9 / kSpeedOfLight;
  DictGridSpec spec;
  spec.atom_override = 2555;
  const PolarDictionary dict = build_dictionary(g, k_c, spec);
  CHECK(dict.size() == 2555);
  CHECK(dict.atoms.n_rows == 256);
  // Without the override the full grid has N * rings atoms.
  DictGridSpec full = spec;
  full.atom_override = 0;
  CHECK(build_dictionary(g, k_c, full).size() == 2560);
}

TEST_CASE("pilot stacking repeats the atom block") {
  const ArrayGeometry g(8, 0.005);
  const double k_c = 2.0 * kPi / 0.01;
  const PolarDictionary dict = build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 2);
  const arma::cx_mat w = stack_for_pilots(dict, 3);
  REQUIRE(w.n_rows == 24);
  REQUIRE(w.n_cols == dict.size());
  for (int t = 0; t < 3; ++t) {
    CHECK(arma::abs(w.rows(static_cast<arma::uword>(t) * 8,
                           static_cast<arma::uword>(t) * 8 + 7) -
                    dict.atoms)
              .max() == 0.0);
  }
  CHECK(std::abs(arma::norm(w.col(0)) - std::sqrt(3.0)) < 1e-12);
  CHECK_THROWS_AS(stack_for_pilots(dict, 0), std::invalid_argument);
}

TEST_CASE("dictionary cache round-trips within float precision") {
  const ArrayGeometry g(16, 0.005);
  const double carrier_hz = 30e9;
  const double k_c = 2.0 * kPi * carrier_hz / kSpeedOfLight;
  const PolarDictionary dict = build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 3, 40);
  DictionaryCacheKey key;
  key.n_antennas = 16;
  key.spacing = 0.005;
  key.carrier_hz = carrier_hz;
  key.beta = 1.2;
  key.rings = 3;
  key.theta_min = -kPi / 3;
  key.theta_max = kPi / 3;
  key.atom_override = 40;

  const std::string path = temp_path("cache_roundtrip.bin");
  write_dictionary_cache(path, key, dict);

  std::string reason;
  const auto loaded = load_dictionary_cache(path, &reason);
  REQUIRE(loaded.has_value());
  CHECK(loaded->key == key);
  REQUIRE(loaded->dict.size() == dict.size());
  REQUIRE(loaded->dict.atoms.n_rows == dict.atoms.n_rows);
  CHECK(arma::abs(loaded->dict.atoms - dict.atoms).max() < 1e-6);
  REQUIRE(loaded->dict.atom_params.size() == dict.atom_params.size());
  for (std::size_t s = 0; s < dict.atom_params.size(); ++s) {
    CHECK(loaded->dict.atom_params[s].angle ==
          doctest::Approx(dict.atom_params[s].angle).epsilon(1e-14));
    if (std::isinf(dict.atom_params[s].distance)) {
      CHECK(std::isinf(loaded->dict.atom_params[s].distance));
    } else {
      CHECK(loaded->dict.atom_params[s].distance ==
            doctest::Approx(dict.atom_params[s].distance).epsilon(1e-12));
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("dictionary cache rejects missing and corrupted files") {
  std::string reason;

  SUBCASE("missing file") {
    const auto loaded = load_dictionary_cache(temp_path("no_such_cache.bin"), &reason);
    CHECK(!loaded.has_value());
    CHECK(!reason.empty());
  }

  SUBCASE("bad magic") {
    const std::string path = temp_path("cache_badmagic.bin");
    std::ofstream out(path, std::ios::binary);
    out << "NOTADICTxxxxxxxxxxxxxxxxxxxxxxxxxxxx";
    out.close();
    const auto loaded = load_dictionary_cache(path, &reason);
    CHECK(!loaded.has_value());
    CHECK(!reason.empty());
    std::remove(path.c_str());
  }

  SUBCASE("truncated payload") {
    const ArrayGeometry g(8, 0.005);
    const double k_c = 2.0 * kPi * 30e9 / kSpeedOfLight;
    const PolarDictionary dict = build_dictionary(g, k_c, {-kPi / 3, kPi / 3}, 1.2, 2);
    DictionaryCacheKey key;
    key.n_antennas = 8;
    key.spacing = 0.005;
    key.carrier_hz = 30e9;
    key.beta = 1.2;
    key.rings = 2;
    key.theta_min = -kPi / 3;
    key.theta_max = kPi / 3;
    const std::string path = temp_path("cache_truncated.bin");
    write_dictionary_cache(path, key, dict);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();

    const auto loaded = load_dictionary_cache(path, &reason);
    CHECK(!loaded.has_value());
    CHECK(!reason.empty());
    std::remove(path.c_str());
  }
}
