#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracle.hpp"
#include "twomode/expm.hpp"
#include "twomode/gaussian.hpp"

using namespace twomode;

namespace {

double binomial(int n, int k) { return std::exp(log_binomial(n, k)); }

}  // namespace

TEST_CASE("parameter conversions") {
  CHECK(eta_from_theta(theta_from_eta(0.3)) == doctest::Approx(0.3));
  CHECK(gain_from_squeezing(squeezing_from_gain(2.5)) == doctest::Approx(2.5));
  CHECK(squeezing_from_db(db_from_squeezing(0.7)) == doctest::Approx(0.7));
  CHECK(theta_from_eta(1.0 + 5e-13) == 0.0);
  CHECK(squeezing_from_gain(1.0 - 5e-13) == 0.0);
  CHECK_THROWS_AS(theta_from_eta(1.1), std::invalid_argument);
  CHECK_THROWS_AS(theta_from_eta(-1e-9), std::invalid_argument);
  CHECK_THROWS_AS(squeezing_from_gain(0.9), std::invalid_argument);
  CHECK_THROWS_AS(Amplifier::from_gain(0.5), std::invalid_argument);
  CHECK(Amplifier::from_db(db_from_squeezing(squeezing_from_gain(2.0))).gain == doctest::Approx(2.0));
  CHECK(BeamSplitter::from_angle(std::numbers::pi / 4).eta == doctest::Approx(0.5));

  SUBCASE("time-reversal partner is an involution") {
    for (const double eta : {0.1, 0.25, 0.5, 0.9, 1.0}) {
      CHECK(time_reversal_partner(time_reversal_partner(BeamSplitter{eta})).eta == doctest::Approx(eta));
    }
    CHECK(time_reversal_partner(Amplifier{4.0}).eta == doctest::Approx(0.25));
    CHECK_THROWS_AS(time_reversal_partner(BeamSplitter{0.0}), std::invalid_argument);
  }
}

TEST_CASE("beam-splitter elements") {
  CHECK(std::abs(bs_element(1, 1, 1, 1, 0.5)) < 1e-15);
  for (const double eta : {0.0, 0.2, 0.5, 0.7, 1.0}) {
    CHECK(bs_element(0, 1, 1, 0, eta) == doctest::Approx(-std::sqrt(1.0 - eta)));
    CHECK(bs_element(1, 0, 0, 1, eta) == doctest::Approx(std::sqrt(1.0 - eta)));
    CHECK(bs_element(1, 0, 1, 0, eta) == doctest::Approx(std::sqrt(eta)));
    CHECK(bs_element(0, 0, 0, 0, eta) == 1.0);
  }
  SUBCASE("one input port occupied") {
    for (const double eta : {0.15, 0.5, 0.8}) {
      const double c = std::sqrt(eta);
      const double s = std::sqrt(1.0 - eta);
      for (int n = 0; n <= 12; ++n) {
        for (int k = 0; k <= n; ++k) {
          const double expected = std::sqrt(binomial(n, k)) * std::pow(s, k) * std::pow(c, n - k);
          CHECK(bs_element(k, n - k, 0, n, eta) == doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("transparent coupler is the identity") {
    for (int i = 0; i <= 5; ++i) {
      for (int j = 0; j <= 5; ++j) {
        for (int n = 0; n <= i + j; ++n) {
          CHECK(std::abs(bs_element(n, i + j - n, i, j, 1.0) - (n == i ? 1.0 : 0.0)) < 1e-15);
        }
      }
    }
  }
  SUBCASE("coincidence probability is (2 eta - 1)^2") {
    for (int k = 0; k <= 50; ++k) {
      const double eta = k / 50.0;
      const double amp = bs_element(1, 1, 1, 1, eta);
      CHECK(amp * amp == doctest::Approx((2 * eta - 1) * (2 * eta - 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("amplifier elements") {
  for (const double g : {1.0, 1.5, 2.0, 3.0, 7.5}) {
    const double r = squeezing_from_gain(g);
    CHECK(pdc_element(0, 0, 0, 0, g) == doctest::Approx(1.0 / std::sqrt(g)));
    CHECK(pdc_element(0, 0, 1, 1, g) == doctest::Approx(-std::sqrt(g - 1.0) / g));
    CHECK(pdc_element(1, 1, 0, 0, g) == doctest::Approx(std::sqrt(g - 1.0) / g));
    CHECK(pdc_element(1, 0, 1, 0, g) == doctest::Approx(1.0 / g));
    CHECK(pdc_element(0, 1, 0, 1, g) == doctest::Approx(1.0 / g));
    for (int n = 0; n <= 15; ++n) {
      CHECK(pdc_element(n, n, 0, 0, g) ==
            doctest::Approx(std::pow(std::tanh(r), n) / std::cosh(r)).epsilon(1e-12));
    }
  }
  // stimulated emission on |1,0>: <2,1|U|1,0> = sqrt(2) tanh r / cosh^2 r = 1/2 at g = 2
  CHECK(pdc_element(2, 1, 1, 0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(static_cast<double>(oracle::pdc(2, 1, 1, 0, 2.0)) == doctest::Approx(0.5).epsilon(1e-14));

  SUBCASE("two paths to |1,1>") {
    for (const double g : {1.2, 2.0, 3.3}) {
      const auto terms = pdc_path_terms(1, 1, 1, 1, g);
      REQUIRE(terms.size() == 2);
      CHECK(terms[0].annihilated == 0);
      CHECK(terms[0].amplitude == doctest::Approx(std::pow(g, -1.5)));
      CHECK(terms[1].annihilated == 1);
      CHECK(terms[1].created == 1);
      CHECK(terms[1].amplitude == doctest::Approx(-(g - 1.0) / std::pow(g, 1.5)));
    }
    CHECK(std::abs(pdc_element(1, 1, 1, 1, 2.0)) < 1e-15);
  }
}

TEST_CASE("closed forms agree with an independent Taylor-series propagation") {
  for (const double eta : {0.1, 0.25, 0.5, 1.0 / 3.0, 0.9}) {
    for (int i = 0; i <= 6; ++i) {
      for (int j = 0; j <= 6; ++j) {
        const auto column = oracle::bs_column(i, j, eta);
        for (int n = 0; n <= i + j; ++n) {
          CHECK(std::abs(bs_element(n, i + j - n, i, j, eta) - static_cast<double>(column[n])) < 1e-12);
        }
      }
    }
  }
  for (const double g : {1.5, 2.0, 3.0}) {
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; j <= 3; ++j) {
        const auto column = oracle::pdc_column(i, j, g, 120);
        const int first = std::max(0, i - j);
        for (int n = first; n <= 10; ++n) {
          const double ref = static_cast<double>(column[static_cast<std::size_t>(n - first)]);
          CHECK(std::abs(pdc_element(n, n - i + j, i, j, g) - ref) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("conservation laws give exact zeros") {
  for (int n = 0; n <= 5; ++n) {
    for (int m = 0; m <= 5; ++m) {
      for (int i = 0; i <= 5; ++i) {
        for (int j = 0; j <= 5; ++j) {
          if (i + j != n + m) CHECK(bs_element(n, m, i, j, 0.37) == 0.0);
          if (i - j != n - m) CHECK(pdc_element(n, m, i, j, 2.3) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("closed forms are unitary columns") {
  for (const double eta : {0.05, 0.5, 0.77}) {
    for (int i = 0; i <= 8; ++i) {
      for (int j = 0; j <= 8; ++j) {
        double sum = 0.0;
        for (int n = 0; n <= i + j; ++n) sum += std::pow(bs_element(n, i + j - n, i, j, eta), 2);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }
  for (const double g : {1.5, 2.0, 4.0}) {
    for (int i = 0; i <= 4; ++i) {
      for (int j = 0; j <= 4; ++j) {
        double sum = 0.0;
        for (int n = std::max(0, i - j); n <= 400; ++n) sum += std::pow(pdc_element(n, n - i + j, i, j, g), 2);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("apply") {
  SUBCASE("balanced beam splitter on |1,1>") {
    const Cutoff c(4);
    const auto out = apply(BeamSplitter{0.5}, TwoModeState::basis(1, 1, c));
    CHECK(out.state(2, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(out.state(0, 2).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(std::abs(out.state(1, 1)) < 1e-15);
    CHECK(out.state.norm_squared() == doctest::Approx(1.0));
    CHECK(out.tail == doctest::Approx(0.0));
  }
  SUBCASE("gain-2 amplifier on |1,1>") {
    const Cutoff c(80);
    const auto out = apply(Amplifier{2.0}, TwoModeState::basis(1, 1, c));
    for (int n = 0; n <= 12; ++n) {
      CHECK(std::abs(out.state(n, n).real() - 0.5 * (n - 1) / std::pow(2.0, 0.5 * n)) < 1e-10);
    }
    CHECK(out.state(0, 0).real() == doctest::Approx(-0.5));
    CHECK(std::abs(out.state(1, 1)) < 1e-15);
    CHECK(out.state(2, 2).real() == doctest::Approx(std::sqrt(0.25) / 2.0));
    CHECK(out.state.amplitudes().imag().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("two-mode squeezed vacuum") {
    const double g = 1.7;
    const double r = squeezing_from_gain(g);
    const auto out = apply(Amplifier{g}, TwoModeState::basis(0, 0, Cutoff(120)));
    for (int n = 0; n <= 20; ++n) {
      CHECK(out.state(n, n).real() == doctest::Approx(std::pow(std::tanh(r), n) / std::cosh(r)).epsilon(1e-12));
    }
    CHECK(out.state.norm_squared() <= 1.0 + 1e-12);
  }
  SUBCASE("too small a cutoff is reported") {
    CHECK_THROWS_AS(apply(Amplifier{2.0}, TwoModeState::basis(1, 1, Cutoff(10))), TruncationError);
    try {
      apply(Amplifier{2.0}, TwoModeState::basis(0, 0, Cutoff(10)));
      FAIL("expected a TruncationError");
    } catch (const TruncationError& e) {
      CHECK(e.tail() == doctest::Approx(std::ldexp(1.0, -10)));
    }
  }
}

TEST_CASE("matrix exponential") {
  Eigen::MatrixXd rot(2, 2);
  rot << 0.0, -7.0, 7.0, 0.0;
  const Eigen::MatrixXd e = expm(rot);
  CHECK(e(0, 0) == doctest::Approx(std::cos(7.0)).epsilon(1e-13));
  CHECK(e(1, 0) == doctest::Approx(std::sin(7.0)).epsilon(1e-13));
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(3, 3);
  diag.diagonal() << Complex(0.0, 1.0), Complex(-2.0, 0.0), Complex(3.0, 0.5);
  const Eigen::MatrixXcd ed = expm(diag);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(ed(k, k) - std::exp(diag(k, k))) < 1e-13 * std::abs(ed(k, k)));
  CHECK(std::abs(ed(0, 1)) == 0.0);
  CHECK_THROWS_AS(expm(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("dense oracle") {
  SUBCASE("generators are real and antisymmetric") {
    for (const CouplerSpec coupler : {CouplerSpec{BeamSplitter{0.3}}, CouplerSpec{Amplifier{2.0}}}) {
      const ComplexMatrix gen(generator(coupler, Cutoff(6)));
      CHECK((gen + gen.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(gen.imag().cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("single-photon transmission") {
    for (const double eta : {0.2, 0.6}) {
      const auto u = dense_oracle(BeamSplitter{eta}, Cutoff(6));
      CHECK(std::abs(u.element(1, 0, 1, 0) - std::sqrt(eta)) < 1e-10);
      CHECK(std::abs(u.element(0, 1, 1, 0) + std::sqrt(1.0 - eta)) < 1e-10);
    }
  }
  SUBCASE("gain-2 coincidence element vanishes") {
    CHECK(std::abs(dense_oracle(Amplifier{2.0}, Cutoff(30)).element(1, 1, 1, 1)) < 1e-9);
  }
  SUBCASE("transparent beam splitter") {
    const auto u = dense_oracle(BeamSplitter{1.0}, Cutoff(5));
    CHECK((u.matrix() - ComplexMatrix::Identity(36, 36)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("sector blocks and dense form agree") {
    const SectorOracle sectors(Amplifier{1.8}, Cutoff(7));
    const auto dense = sectors.dense();
    CHECK(dense.element(3, 1, 2, 0).real() == sectors.element(3, 1, 2, 0));
    CHECK(sectors.element(3, 1, 2, 2) == 0.0);
    const SectorOracle partial(Amplifier{1.8}, Cutoff(7), -1, 1);
    CHECK(partial.element(2, 1, 1, 0) == sectors.element(2, 1, 1, 0));
    CHECK_THROWS_AS(partial.element(3, 0, 3, 0), std::out_of_range);
  }
  SUBCASE("imaginary parts vanish") {
    const auto u = dense_oracle(Amplifier{2.5}, Cutoff(10));
    CHECK(u.matrix().imag().cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("closed forms match the truncated exponential") {
  const std::vector<double> etas{0.1, 0.25, 0.5, 1.0 / 3.0, 0.9};
  for (const double eta : etas) {
    const SectorOracle u(BeamSplitter{eta}, Cutoff(24));
    double worst = 0.0;
    for (int n = 0; n <= 8; ++n) {
      for (int m = 0; m <= 8; ++m) {
        for (int i = 0; i <= 8; ++i) {
          for (int j = 0; j <= 8; ++j) worst = std::max(worst, std::abs(bs_element(n, m, i, j, eta) - u.element(n, m, i, j)));
        }
      }
    }
    CAPTURE(eta);
    CHECK(worst <= 1e-9);
  }
  // A fixed cutoff of 40 resolves indices <= 8 to 1e-9 only up to about g = 2;
  // larger gains use the block whose internal cutoff grows until it converges.
  for (const double g : {1.5, 2.0, 3.0, 4.2}) {
    const Cutoff box(8);
    const ComplexMatrix u = g <= 2.0 ? ComplexMatrix(dense_oracle(Amplifier{g}, Cutoff(40)).matrix())
                                     : ComplexMatrix(converged_pdc_block(g, box).op.matrix());
    const Cutoff frame(g <= 2.0 ? 40 : 8);
    double worst = 0.0;
    for (int n = 0; n <= 8; ++n) {
      for (int m = 0; m <= 8; ++m) {
        for (int i = 0; i <= 8; ++i) {
          for (int j = 0; j <= 8; ++j) {
            const auto row = static_cast<Eigen::Index>(flat_index(n, m, frame));
            const auto col = static_cast<Eigen::Index>(flat_index(i, j, frame));
            worst = std::max(worst, std::abs(pdc_element(n, m, i, j, g) - u(row, col)));
          }
        }
      }
    }
    CAPTURE(g);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("converged amplifier block") {
  const auto block = converged_pdc_block(3.0, Cutoff(6));
  CHECK(block.last_change <= 1e-14);
  CHECK(block.internal_cutoff > 6);
  CHECK(std::abs(block.op.element(2, 2, 1, 1).real() - pdc_element(2, 2, 1, 1, 3.0)) < 1e-13);
  CHECK_THROWS_AS(converged_pdc_block(3.0, Cutoff(6), 1e-14, 30), TruncationError);
}

TEST_CASE("Heisenberg residual") {
  CHECK(heisenberg_residual(BeamSplitter{0.3}, Cutoff(12)) < 1e-10);
  CHECK(heisenberg_residual(BeamSplitter{1.0}, Cutoff(9)) < 1e-13);
  CHECK(heisenberg_residual(Amplifier{2.0}, Cutoff(30), 8) < 1e-8);
  CHECK(heisenberg_residual(Amplifier{2.0}, Cutoff(40), 10) < 1e-8);
  CHECK(heisenberg_residual(Amplifier{1.0}, Cutoff(8)) < 1e-13);
}
