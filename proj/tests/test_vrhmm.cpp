// SPDX-License-Identifier: Apache-2.0
//
// Hidden-Markov visibility decode tests. The Viterbi decoder is checked
// against an exhaustive 2^N enumeration oracle.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "elaasim/rng.hpp"
#include "elaasim/vr_hmm.hpp"

using namespace elaasim;

namespace {

// Log-likelihood of one binary state path (1 = in) under the chain.
double path_log_likelihood(const arma::uvec& states, const arma::vec& log_p_in,
                           const arma::vec& log_p_out, const HmmParams& hp) {
  auto emit = [&](arma::uword n, arma::uword s) {
    return s == 1 ? log_p_in(n) : log_p_out(n);
  };
  auto init = [&](arma::uword s) {
    return std::log(s == 1 ? hp.p_init_in : hp.p_init_out);
  };
  auto trans = [&](arma::uword a, arma::uword b) {
    return std::log(a == b ? hp.p_stay : hp.p_switch);
  };
  double ll = init(states(0)) + emit(0, states(0));
  for (arma::uword n = 1; n < states.n_elem; ++n) {
    ll += trans(states(n - 1), states(n)) + emit(n, states(n));
  }
  return ll;
}

// Exhaustive maximum over all 2^N binary paths.
double brute_force_best(const arma::vec& log_p_in, const arma::vec& log_p_out,
                        const HmmParams& hp) {
  const arma::uword n = log_p_in.n_elem;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
    arma::uvec states(n);
    for (arma::uword i = 0; i < n; ++i) states(i) = (bits >> i) & 1ULL;
    best = std::max(best, path_log_likelihood(states, log_p_in, log_p_out, hp));
  }
  return best;
}

}  // namespace

TEST_CASE("hmm parameter defaults and validation") {
  const HmmParams hp = HmmParams::defaults(256);
  CHECK(hp.p_switch == doctest::Approx(1.0 / 256).epsilon(1e-15));
  CHECK(hp.p_stay == doctest::Approx(255.0 / 256).epsilon(1e-15));
  CHECK(hp.p_init_in == doctest::Approx(0.55));
  CHECK(hp.p_init_out == doctest::Approx(0.45));
  CHECK(hp.temperature == doctest::Approx(20.0));
  CHECK_NOTHROW(hp.validate());

  HmmParams bad = hp;
  bad.p_stay = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.p_init_in = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.temperature = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(HmmParams::defaults(1), std::invalid_argument);
}

TEST_CASE("antenna-major reshape") {
  SUBCASE("single pilot is the identity") {
    arma::cx_mat in(6, 4, arma::fill::randu);
    const arma::cx_mat out = reshape_antenna_major(in, 6);
    CHECK(arma::abs(out - in).max() == 0.0);
  }

  SUBCASE("single antenna flattens pilot blocks into one row") {
    arma::cx_mat in(3, 2);
    in(0, 0) = {1, 0}; in(0, 1) = {2, 0};
    in(1, 0) = {3, 0}; in(1, 1) = {4, 0};
    in(2, 0) = {5, 0}; in(2, 1) = {6, 0};
    const arma::cx_mat out = reshape_antenna_major(in, 1);
    REQUIRE(out.n_rows == 1);
    REQUIRE(out.n_cols == 6);
    CHECK(out(0, 0).real() == 1.0);
    CHECK(out(0, 1).real() == 2.0);
    CHECK(out(0, 2).real() == 3.0);
    CHECK(out(0, 5).real() == 6.0);
  }

  SUBCASE("index law out(n, t*M + m) == in(t*N + n, m)") {
    const int n_ant = 3, n_pil = 2, n_sub = 4;
    arma::cx_mat in(n_ant * n_pil, n_sub, arma::fill::randu);
    const arma::cx_mat out = reshape_antenna_major(in, n_ant);
    REQUIRE(out.n_rows == 3);
    REQUIRE(out.n_cols == 8);
    for (int t = 0; t < n_pil; ++t) {
      for (int n = 0; n < n_ant; ++n) {
        for (int m = 0; m < n_sub; ++m) {
          CHECK(out(static_cast<arma::uword>(n), static_cast<arma::uword>(t * n_sub + m)) ==
                in(static_cast<arma::uword>(t * n_ant + n), static_cast<arma::uword>(m)));
        }
      }
    }
  }

  SUBCASE("row count must be divisible by N") {
    arma::cx_mat in(7, 2, arma::fill::randu);
    CHECK_THROWS_AS(reshape_antenna_major(in, 3), std::invalid_argument);
  }
}

TEST_CASE("observation statistic") {
  SUBCASE("identical inputs give zero") {
    arma::cx_mat r(6, 4, arma::fill::randu);
    const VrObservation o = compute_observation(r, r, 3, 2, 4);
    REQUIRE(o.values.n_elem == 3);
    CHECK(arma::abs(o.values).max() == 0.0);
    CHECK(o.n_pilots == 2);
    CHECK(o.n_subcarriers == 4);
  }

  SUBCASE("uniform magnitude drop gives that drop") {
    arma::cx_mat r(6, 4), rpi(6, 4);
    for (arma::uword i = 0; i < r.n_rows; ++i) {
      for (arma::uword j = 0; j < r.n_cols; ++j) {
        const double phase = 0.3 * static_cast<double>(i + 7 * j);
        r(i, j) = std::polar(2.0, phase);
        rpi(i, j) = std::polar(1.0, -phase);
      }
    }
    const VrObservation o = compute_observation(r, rpi, 3, 2, 4);
    for (arma::uword n = 0; n < 3; ++n) {
      CHECK(o.values(n) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("matches the definition on random data") {
    const int n_ant = 3, n_pil = 2, n_sub = 2;
    arma::cx_mat r(n_ant * n_pil, n_sub, arma::fill::randn);
    arma::cx_mat rpi(n_ant * n_pil, n_sub, arma::fill::randn);
    const VrObservation o = compute_observation(r, rpi, n_ant, n_pil, n_sub);
    for (int n = 0; n < n_ant; ++n) {
      double acc = 0.0;
      for (int t = 0; t < n_pil; ++t) {
        for (int m = 0; m < n_sub; ++m) {
          const arma::uword row = static_cast<arma::uword>(t * n_ant + n);
          acc += std::abs(r(row, static_cast<arma::uword>(m))) -
                 std::abs(rpi(row, static_cast<arma::uword>(m)));
        }
      }
      CHECK(o.values(static_cast<arma::uword>(n)) ==
            doctest::Approx(acc / (n_pil * n_sub)).epsilon(1e-12));
    }
  }

  SUBCASE("shape mismatch rejected") {
    arma::cx_mat r(6, 4, arma::fill::randu);
    arma::cx_mat rpi(6, 3, arma::fill::randu);
    CHECK_THROWS_AS(compute_observation(r, rpi, 3, 2, 4), std::invalid_argument);
  }
}

TEST_CASE("emission probabilities") {
  VrObservation o;
  o.values = {0.0, 1.0, -1.0, 0.05};
  arma::vec p_in, p_out;
  emission_probs(o, 20.0, p_in, p_out);
  REQUIRE(p_in.n_elem == 4);

  CHECK(p_in(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p_out(0) == doctest::Approx(0.5).epsilon(1e-15));
  // sigma(-20), frozen from an independent evaluation.
  CHECK(p_out(1) == doctest::Approx(2.0611536181902037e-9).epsilon(1e-6));
  CHECK(p_in(2) == doctest::Approx(2.0611536181902037e-9).epsilon(1e-6));
  // Symmetry and exact pairwise normalization.
  for (arma::uword i = 0; i < 4; ++i) {
    CHECK(p_in(i) + p_out(i) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p_in(i) > 0.0);
    CHECK(p_out(i) > 0.0);
  }
  CHECK(p_in(3) > 0.5);

  arma::vec lp_in, lp_out;
  emission_log_probs(o, 20.0, lp_in, lp_out);
  // log(1 - p) suffers cancellation near saturation, so the tolerance covers
  // that; the log-domain path itself is the more accurate of the two.
  for (arma::uword i = 0; i < 4; ++i) {
    CHECK(std::abs(lp_in(i) - std::log(p_in(i))) < 1e-7);
    CHECK(std::abs(lp_out(i) - std::log(p_out(i))) < 1e-7);
  }
  CHECK(lp_out(1) == doctest::Approx(-20.000000002061153).epsilon(1e-12));
  CHECK(lp_in(2) == doctest::Approx(-20.000000002061153).epsilon(1e-12));

  // Stability far outside double sigmoid range.
  VrObservation extreme;
  extreme.values = {100.0, -100.0};
  emission_log_probs(extreme, 20.0, lp_in, lp_out);
  CHECK(std::isfinite(lp_in(0)));
  CHECK(std::isfinite(lp_out(0)));
  CHECK(lp_out(0) == doctest::Approx(-2000.0).epsilon(1e-9));
  CHECK(lp_in(1) == doctest::Approx(-2000.0).epsilon(1e-9));
  CHECK(std::abs(lp_in(0)) < 1e-12);
}

TEST_CASE("viterbi fixed decodes") {
  SUBCASE("uninformative emissions decode to all in-VR") {
    const arma::vec half(8, arma::fill::value(0.5));
    const arma::uvec mask = viterbi(half, half, HmmParams::defaults(8));
    REQUIRE(mask.n_elem == 8);
    CHECK(arma::all(mask == 1));
  }

  SUBCASE("strong in-VR evidence decodes to all ones") {
    arma::vec p_in(6, arma::fill::value(0.99));
    arma::vec p_out(6, arma::fill::value(0.01));
    CHECK(arma::all(viterbi(p_in, p_out, HmmParams::defaults(6)) == 1));
  }

  SUBCASE("split evidence decodes to the evident interval") {
    arma::vec p_in(10), p_out(10);
    for (arma::uword i = 0; i < 10; ++i) {
      p_in(i) = i < 5 ? 0.99 : 0.01;
      p_out(i) = 1.0 - p_in(i);
    }
    const arma::uvec mask = viterbi(p_in, p_out, HmmParams::defaults(10));
    for (arma::uword i = 0; i < 10; ++i) CHECK(mask(i) == (i < 5 ? 1u : 0u));
  }

  SUBCASE("invalid emissions rejected") {
    arma::vec p_in(4, arma::fill::value(0.5));
    arma::vec p_out(4, arma::fill::value(0.5));
    p_out(2) = 0.0;
    CHECK_THROWS_AS(viterbi(p_in, p_out, HmmParams::defaults(4)), std::invalid_argument);
    p_out(2) = -0.1;
    CHECK_THROWS_AS(viterbi(p_in, p_out, HmmParams::defaults(4)), std::invalid_argument);
  }
}

TEST_CASE("viterbi agrees with exhaustive enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 9);  // N in [2, 10]
    HmmParams hp;
    hp.p_switch = rng.uniform(0.05, 0.95);
    hp.p_stay = 1.0 - hp.p_switch;
    hp.p_init_in = rng.uniform(0.05, 0.95);
    hp.p_init_out = 1.0 - hp.p_init_in;

    arma::vec p_in(static_cast<arma::uword>(n)), p_out(static_cast<arma::uword>(n));
    for (int i = 0; i < n; ++i) {
      const double v = rng.uniform(0.01, 0.99);
      p_in(static_cast<arma::uword>(i)) = v;
      p_out(static_cast<arma::uword>(i)) = 1.0 - v;
    }

    const arma::uvec decoded = viterbi(p_in, p_out, hp);
    const arma::vec lp_in = arma::log(p_in);
    const arma::vec lp_out = arma::log(p_out);
    const double decoded_ll = path_log_likelihood(decoded, lp_in, lp_out, hp);
    const double best_ll = brute_force_best(lp_in, lp_out, hp);
    CHECK(decoded_ll == doctest::Approx(best_ll).epsilon(1e-9));
  }
}

TEST_CASE("viterbi is invariant to emission scaling") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const arma::uword n = 12;
    arma::vec p_in(n), p_out(n);
    for (arma::uword i = 0; i < n; ++i) {
      p_in(i) = rng.uniform(0.01, 0.99);
      p_out(i) = 1.0 - p_in(i);
    }
    const HmmParams hp = HmmParams::defaults(static_cast<int>(n));
    const arma::uvec base = viterbi(p_in, p_out, hp);
    const double c = rng.uniform(0.1, 10.0);
    const arma::uvec scaled = viterbi(c * p_in, c * p_out, hp);
    CHECK(arma::all(base == scaled));
  }
}

TEST_CASE("log and linear viterbi agree") {
  Rng rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    const arma::uword n = 16;
    VrObservation o;
    o.values.set_size(n);
    for (arma::uword i = 0; i < n; ++i) o.values(i) = rng.uniform(-0.5, 0.5);
    arma::vec p_in, p_out, lp_in, lp_out;
    emission_probs(o, 20.0, p_in, p_out);
    emission_log_probs(o, 20.0, lp_in, lp_out);
    const HmmParams hp = HmmParams::defaults(static_cast<int>(n));
    CHECK(arma::all(viterbi(p_in, p_out, hp) == viterbi_log(lp_in, lp_out, hp)));
  }
}

TEST_CASE("stronger in-VR evidence never removes in-VR antennas") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const arma::uword n = 14;
    VrObservation o;
    o.values.set_size(n);
    for (arma::uword i = 0; i < n; ++i) o.values(i) = rng.uniform(-0.3, 0.3);
    arma::vec p_in, p_out;
    emission_probs(o, 20.0, p_in, p_out);
    const HmmParams hp = HmmParams::defaults(static_cast<int>(n));
    const arma::uvec base = viterbi(p_in, p_out, hp);

    // Push one antenna's observation up; its decoded state must not flip
    // from in-VR to out.
    const arma::uword k = rng.next_u64() % n;
    VrObservation o2 = o;
    o2.values(k) = 1.0;
    arma::vec q_in, q_out;
    emission_probs(o2, 20.0, q_in, q_out);
    const arma::uvec bumped = viterbi(q_in, q_out, hp);
    if (base(k) == 1) CHECK(bumped(k) == 1);
  }
}
