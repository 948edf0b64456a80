#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "bsv/linalg.hpp"
#include "bsv/rng.hpp"
#include "bsv/stats.hpp"
#include "helpers.hpp"

using Catch::Approx;
using namespace bsv;

TEST_CASE("total variation basics", "[stats]") {
  const std::vector<double> p = {0.2, 0.3, 0.5};
  const std::vector<double> q = {1.0, 0.0, 0.0};
  const std::vector<double> r = {0.0, 0.4, 0.6};
  REQUIRE(total_variation(std::span<const double>(p),
                          std::span<const double>(p)) == Approx(0.0));
  // disjoint point masses
  const std::vector<double> a = {1.0, 0.0};
  const std::vector<double> b = {0.0, 1.0};
  REQUIRE(total_variation(std::span<const double>(a),
                          std::span<const double>(b)) == Approx(1.0));
  REQUIRE(total_variation(std::span<const double>(q),
                          std::span<const double>(r)) == Approx(1.0));
  REQUIRE_THROWS_AS(total_variation(std::span<const double>(a),
                                    std::span<const double>(p)),
                    std::invalid_argument);
}

TEST_CASE("total variation is a metric on random triples", "[stats]") {
  RngStream rng(51);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(4), q(4), r(4);
    for (int i = 0; i < 4; ++i) {
      p[i] = rng.uniform_positive();
      q[i] = rng.uniform_positive();
      r[i] = rng.uniform_positive();
    }
    const double pq = total_variation(std::span<const double>(p),
                                      std::span<const double>(q));
    const double qp = total_variation(std::span<const double>(q),
                                      std::span<const double>(p));
    const double pr = total_variation(std::span<const double>(p),
                                      std::span<const double>(r));
    const double rq = total_variation(std::span<const double>(r),
                                      std::span<const double>(q));
    REQUIRE(pq == Approx(qp).margin(1e-12));
    REQUIRE(pq <= pr + rq + 1e-12);
  }
}

TEST_CASE("k-fold product distributions separate monotonically", "[stats]") {
  const std::vector<double> d1 = {0.5, 0.3, 0.2};
  const std::vector<double> d2 = {0.2, 0.5, 0.3};
  double prev = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const std::size_t size = static_cast<std::size_t>(std::pow(3.0, k));
    std::vector<double> p1(size, 1.0), p2(size, 1.0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t rem = idx;
      for (int pos = 0; pos < k; ++pos) {
        p1[idx] *= d1[rem % 3];
        p2[idx] *= d2[rem % 3];
        rem /= 3;
      }
    }
    const double tv = total_variation(std::span<const double>(p1),
                                      std::span<const double>(p2));
    REQUIRE(tv >= prev - 1e-12);
    prev = tv;
  }
}

TEST_CASE("ks distance against reference laws", "[stats]") {
  RngStream rng(53);
  std::vector<double> xs(10'000);
  for (double& x : xs) x = rng.exponential();
  std::sort(xs.begin(), xs.end());
  REQUIRE(ks_distance(xs, ReferenceLaw::exponential(1.0)) <= 0.02);

  std::vector<double> cs(10'000);
  for (double& x : cs) x = rng.chisq_complex(3);
  std::sort(cs.begin(), cs.end());
  REQUIRE(ks_distance(cs, ReferenceLaw::complex_chisq(3)) <= 0.02);

  const std::vector<double> constant(200, 0.0);
  REQUIRE(ks_distance(constant, ReferenceLaw::standard_normal()) >= 0.5);

  std::vector<double> unsorted = {3.0, 1.0, 2.0};
  unsorted.resize(200, 4.0);
  REQUIRE_THROWS_AS(ks_distance(unsorted, ReferenceLaw::standard_normal()),
                    std::invalid_argument);
  std::vector<double> tiny = {1.0, 2.0};
  REQUIRE_THROWS_AS(ks_distance(tiny, ReferenceLaw::standard_normal()),
                    std::invalid_argument);
}

TEST_CASE("two-sample ks distance", "[stats]") {
  RngStream rng(57);
  std::vector<double> a(5000), b(5000), c(5000);
  for (double& x : a) x = rng.exponential();
  for (double& x : b) x = rng.exponential();
  for (double& x : c) x = rng.exponential() + 0.5;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::sort(c.begin(), c.end());
  REQUIRE(ks_two_sample(a, b) <= 0.04);
  REQUIRE(ks_two_sample(a, c) >= 0.15);
}

TEST_CASE("log chi-squared closed-form cumulants", "[stats]") {
  const LogChisqMoments m1 = log_chisq_moments(1);
  REQUIRE(m1.mean == Approx(-0.5772156649).margin(1e-9));
  REQUIRE(m1.variance == Approx(std::numbers::pi * std::numbers::pi / 6.0)
                             .margin(1e-12));
  const LogChisqMoments m2 = log_chisq_moments(2);
  REQUIRE(m2.mean == Approx(1.0 - 0.5772156649).margin(1e-9));
  REQUIRE_THROWS_AS(log_chisq_moments(0), std::invalid_argument);
}

TEST_CASE("log chi-squared moments match monte carlo at n = 50", "[stats]") {
  const std::size_t n = 50, draws = 200'000;
  RngStream rng(59);
  std::vector<double> ell(draws);
  for (double& x : ell) x = std::log(rng.chisq_complex(n));
  const DistributionSummary s = summarize(ell);
  const LogChisqMoments closed = log_chisq_moments(n);
  REQUIRE(s.mean == Approx(closed.mean).margin(3.0 * s.se_mean));
  REQUIRE(s.variance == Approx(closed.variance).margin(3.0 * s.se_variance));
}

TEST_CASE("third absolute moment bound via quadrature", "[stats]") {
  // rho_n = integral of |ln r - mu|^3 e^{-r} r^{n-1}/(n-1)! dr, computed
  // numerically with the substitution u = ln r: the density in u is
  // exp(-e^u + n u - ln (n-1)!). The convexity bound says
  // rho_n <= fourth^{3/4}.
  for (std::size_t n : {1, 2, 5, 10, 100, 1000}) {
    const LogChisqMoments mom = log_chisq_moments(n);
    double lgamma_n = 0.0;
    for (std::size_t k = 2; k + 1 <= n; ++k)
      lgamma_n += std::log(static_cast<double>(k));
    auto density_u = [&](double u) {
      return std::exp(-std::exp(u) + static_cast<double>(n) * u - lgamma_n);
    };
    const double u_lo = -40.0 / static_cast<double>(n) + mom.mean - 10.0;
    const double u_hi =
        std::log(static_cast<double>(n) + 30.0 * std::sqrt(1.0 * n) + 60.0);
    auto integrand_mean = [&](double u) { return u * density_u(u); };
    const double mu = testutil::simpson(integrand_mean, u_lo, u_hi, 100'000);
    REQUIRE(mu == Approx(mom.mean).margin(1e-5));
    auto integrand_rho = [&](double u) {
      const double d = std::abs(u - mom.mean);
      return d * d * d * density_u(u);
    };
    const double rho = testutil::simpson(integrand_rho, u_lo, u_hi, 100'000);
    REQUIRE(rho <= std::pow(mom.fourth_central, 0.75) + 1e-9);
  }
}

TEST_CASE("berry-esseen ratio decreases with n", "[stats]") {
  double prev = HUGE_VAL;
  for (std::size_t n : {10, 100, 1000, 10'000}) {
    const double ratio = berry_esseen_ratio(n);
    REQUIRE(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("lognormal reference for the squared determinant", "[stats]") {
  const ReferenceLaw law = lognormal_det_reference(10);
  REQUIRE(law.mu == Approx(13.52585092994046).margin(1e-10));
  REQUIRE(law.sigma2 == Approx(3.8798007578955787).margin(1e-10));
  REQUIRE_THROWS_AS(lognormal_det_reference(1), std::invalid_argument);
}

TEST_CASE("chi-squared product sampler moments", "[stats]") {
  RngStream rng(61);
  const std::size_t draws = 100'000;
  double acc1 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) acc1 += chisq_product_sample(1, rng);
  REQUIRE(acc1 / draws == Approx(1.0).margin(0.01));

  // E = 3! = 6; Var = prod t(t+1) - 36 = 144 - 36 = 108
  double acc3 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) acc3 += chisq_product_sample(3, rng);
  REQUIRE(acc3 / draws ==
          Approx(6.0).margin(3.0 * std::sqrt(108.0 / draws)));
}

TEST_CASE("chi-squared product law matches gaussian determinants", "[stats]") {
  const std::size_t n = 5, draws = 10'000;
  RngStream rng(63);
  std::vector<double> via_product(draws), via_det(draws);
  for (double& x : via_product) x = chisq_product_sample(n, rng);
  RngStream rng2(64);
  for (double& x : via_det)
    x = std::norm(determinant(sample_gaussian_matrix(n, n, rng2)));
  std::sort(via_product.begin(), via_product.end());
  std::sort(via_det.begin(), via_det.end());
  REQUIRE(ks_two_sample(via_product, via_det) <= 0.03);
}

TEST_CASE("moment checks flag the exponential case correctly", "[stats]") {
  // P at n = 1 is Exp(1): E[P] = 1, E[P^2] = 2 in law.
  RngStream rng(67);
  std::vector<double> p(50'000);
  for (double& x : p) x = rng.exponential();
  const MomentCheck mc = moment_checks(p, 1);
  REQUIRE(mc.mean_ok);
  REQUIRE(mc.second_ok);
  REQUIRE(mc.second_target == Approx(2.0));

  std::vector<double> few(100, 1.0);
  REQUIRE_THROWS_AS(moment_checks(few, 1), std::invalid_argument);
}

TEST_CASE("pairwise sum agrees with sequential accumulation", "[stats]") {
  RngStream rng(71);
  std::vector<double> xs(10'001);
  for (double& x : xs) x = rng.uniform01() - 0.3;
  const double seq = std::accumulate(xs.begin(), xs.end(), 0.0);
  REQUIRE(pairwise_sum(xs) == Approx(seq).epsilon(1e-12));
}

TEST_CASE("summary of a known sample", "[stats]") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const DistributionSummary s = summarize(xs);
  REQUIRE(s.mean == Approx(2.5));
  REQUIRE(s.variance == Approx(1.25));
  REQUIRE(s.fourth_central == Approx((2.25 * 2.25 * 2 + 0.25 * 0.25 * 2) / 4));
  REQUIRE(s.count == 4);

  const auto j = summary_to_json(s);
  REQUIRE(j["mean"] == Approx(2.5));
  REQUIRE(j["count"] == 4);
  REQUIRE(j.contains("se_mean"));
  REQUIRE(j.contains("fourth_central_moment"));
}

TEST_CASE("wilson interval brackets the point estimate", "[stats]") {
  const FractionEstimate f = wilson_interval(30, 100);
  REQUIRE(f.fraction == Approx(0.3));
  REQUIRE(f.ci_lo < 0.3);
  REQUIRE(f.ci_hi > 0.3);
  REQUIRE(f.ci_lo >= 0.0);
  REQUIRE(f.ci_hi <= 1.0);
  REQUIRE_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
}

TEST_CASE("regularized gamma and reference cdfs", "[stats]") {
  REQUIRE(regularized_gamma_p(1, 2.0) == Approx(1.0 - std::exp(-2.0)));
  REQUIRE(regularized_gamma_p(3, 0.0) == 0.0);
  REQUIRE(regularized_gamma_p(3, 200.0) == Approx(1.0).margin(1e-12));
  REQUIRE(ReferenceLaw::complex_chisq(3).cdf(2.9) ==
          Approx(regularized_gamma_p(3, 2.9)));
  REQUIRE(ReferenceLaw::standard_normal().cdf(0.0) == Approx(0.5));
  REQUIRE(ReferenceLaw::lognormal(0.0, 1.0).cdf(1.0) == Approx(0.5));
  REQUIRE(ReferenceLaw::lognormal(0.0, 1.0).cdf(-1.0) == 0.0);
  REQUIRE_THROWS_AS(ReferenceLaw::exponential(0.0), std::invalid_argument);
}

TEST_CASE("histograms and monotonicity helper", "[stats]") {
  const std::vector<double> xs = {0.1, 0.1, 0.2, 0.9, 2.5, 7.0};
  const Histogram h = linear_histogram(xs, 0.0, 5.0, 5);
  REQUIRE(h.counts == std::vector<std::uint64_t>{4, 0, 1, 0, 0});
  REQUIRE(h.total == 6);
  REQUIRE(h.density(0) == Approx(4.0 / (6.0 * 1.0)));

  const Histogram g = geometric_histogram(xs, 0.01, 10.0, 4);
  REQUIRE(g.edges.front() == Approx(0.01));
  REQUIRE(g.edges.back() == Approx(10.0));

  std::ostringstream os;
  write_histogram_csv(os, h);
  REQUIRE(os.str().substr(0, 26) == "bin_left,bin_right,density");

  // a strongly increasing histogram must register a violation
  std::vector<double> rising;
  for (int i = 0; i < 1000; ++i) rising.push_back(4.5);
  for (int i = 0; i < 10; ++i) rising.push_back(0.5);
  const Histogram r = linear_histogram(rising, 0.0, 5.0, 5);
  REQUIRE(max_monotone_violation_sigma(r) > 3.0);
}
