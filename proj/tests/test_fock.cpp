#include <doctest.h>

#include <cmath>
#include <random>

#include "twomode/fock.hpp"
#include "twomode/gaussian.hpp"

using namespace twomode;

TEST_CASE("flat_index is row-major and bijective") {
  const Cutoff c(3);
  CHECK(flat_index(0, 0, c) == 0);
  CHECK(flat_index(0, 1, c) == 1);
  CHECK(flat_index(3, 3, c) == 15);
  CHECK(c.dim() == 16);
  for (int na = 0; na <= 3; ++na) {
    for (int nb = 0; nb <= 3; ++nb) {
      const auto [a, b] = decode_index(flat_index(na, nb, c), c);
      CHECK(a == na);
      CHECK(b == nb);
    }
  }
  CHECK_THROWS_AS(flat_index(4, 0, c), std::out_of_range);
  CHECK_THROWS_AS(flat_index(0, -1, c), std::out_of_range);
  CHECK_THROWS_AS(decode_index(16, c), std::out_of_range);
  CHECK_THROWS_AS(Cutoff(-1), std::invalid_argument);
}

TEST_CASE("ladder matrices") {
  const Cutoff c(4);
  const auto ad = ladder_matrix({Ladder::Create, Mode::A}, c);
  const auto a = ladder_matrix({Ladder::Annihilate, Mode::A}, c);
  const auto bd = ladder_matrix({Ladder::Create, Mode::B}, c);

  CHECK(ad.element(1, 0, 0, 0).real() == doctest::Approx(1.0));
  CHECK(ad.element(2, 0, 1, 0).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(bd.element(3, 2, 3, 1).real() == doctest::Approx(std::sqrt(2.0)));
  for (int k = 0; k <= 4; ++k) {
    CHECK(a.apply(TwoModeState::basis(0, k, c)).norm_squared() == 0.0);
  }
  SUBCASE("creation out of the top level gives zero") {
    CHECK(ad.apply(TwoModeState::basis(4, 2, c)).norm_squared() == 0.0);
  }
  SUBCASE("[a, a^dag] is the identity below the top level") {
    const ComplexMatrix comm = a.matrix() * ad.matrix() - ad.matrix() * a.matrix();
    for (int na = 0; na < 4; ++na) {
      for (int nb = 0; nb <= 4; ++nb) {
        const auto q = static_cast<Eigen::Index>(flat_index(na, nb, c));
        CHECK(std::abs(comm(q, q) - 1.0) < 1e-14);
        CHECK(std::abs(comm.col(q).cwiseAbs().sum() - 1.0) < 1e-14);
      }
    }
  }
}

TEST_CASE("inner products") {
  const Cutoff c(3);
  CHECK(inner_product(TwoModeState::basis(0, 0, c), TwoModeState::basis(0, 0, c)) == Complex(1.0));
  CHECK(inner_product(TwoModeState::basis(0, 1, c), TwoModeState::basis(1, 0, c)) == Complex(0.0));
  CHECK_THROWS_AS(inner_product(TwoModeState(c), TwoModeState(Cutoff(2))), std::invalid_argument);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    TwoModeState x(c), y(c);
    for (Eigen::Index q = 0; q < 16; ++q) {
      x.amplitudes()[q] = Complex(nd(rng), nd(rng));
      y.amplitudes()[q] = Complex(nd(rng), nd(rng));
    }
    CHECK(std::abs(inner_product(x, y) - std::conj(inner_product(y, x))) < 1e-13);
    const Complex xx = inner_product(x, x);
    CHECK(xx.imag() == 0.0);
    CHECK(xx.real() >= 0.0);
    // conjugate-linear in the first slot
    TwoModeState ix(c, Complex(0.0, 1.0) * x.amplitudes());
    CHECK(std::abs(inner_product(ix, y) - Complex(0.0, -1.0) * inner_product(x, y)) < 1e-12);
  }
}

TEST_CASE("norm of the gain-2 output state truncated at 40 pairs") {
  // amplitudes (n - 1) / 2^(n/2 + 1) on |n,n>; the mass past n = 40 is
  // sum_{n>40} (n-1)^2 / 2^(n+2)
  const Cutoff c(40);
  TwoModeState psi(c);
  for (int n = 0; n <= 40; ++n) psi(n, n) = (n - 1.0) / std::pow(2.0, 0.5 * n + 1.0);
  long double missing = 0.0L;
  for (int n = 41; n < 400; ++n) missing += std::pow(static_cast<long double>(n - 1), 2) / std::pow(2.0L, n + 2);
  CHECK(std::abs(inner_product(psi, psi).real() - (1.0 - static_cast<double>(missing))) < 1e-14);
  CHECK(static_cast<double>(missing) == doctest::Approx(3.8266989577095956e-10).epsilon(1e-12));
}

TEST_CASE("tail_mass") {
  CHECK(tail_mass(TwoModeState::basis(0, 0, Cutoff(5))) == 0.0);
  CHECK(tail_mass(TwoModeState::basis(5, 5, Cutoff(5))) == 1.0);
  CHECK(tail_mass(TwoModeState::basis(5, 0, Cutoff(5))) == 1.0);

  SUBCASE("two-mode squeezed vacuum at gain 2") {
    // |<n,n|psi>|^2 = 2^-(n+1): boundary mass 2^-(N+1), mass past the cutoff 2^-(N+1)
    for (const int n_max : {10, 20, 30}) {
      TwoModeState vac = TwoModeState::basis(0, 0, Cutoff(n_max));
      const auto out = apply(Amplifier{2.0}, vac, 1.0);
      CHECK(tail_mass(out.state) == doctest::Approx(std::ldexp(1.0, -(n_max + 1))).epsilon(1e-10));
      CHECK(out.tail == doctest::Approx(std::ldexp(1.0, -n_max)).epsilon(1e-8));
    }
  }
}

TEST_CASE("log-gamma combinatorics stay finite for large counts") {
  CHECK(std::exp(log_factorial(10)) == doctest::Approx(3628800.0));
  CHECK(sqrt_binomial(6, 3) == doctest::Approx(std::sqrt(20.0)));
  CHECK(std::isfinite(log_binomial(600, 300)));
  CHECK(log_binomial(600, 300) == doctest::Approx(412.46363548924062).epsilon(1e-13));
  CHECK_THROWS_AS(log_binomial(3, 4), std::invalid_argument);
}
