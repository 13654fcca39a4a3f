#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diagnostics.hpp"
#include "mcmc.hpp"
#include "support/stats_util.hpp"

using namespace rosenbench;

namespace {

Model standard_hybrid(int n1, int n2) {
  return Model::hybrid(HybridParams::uniform(n1, n2, 1.0, 0.05, 5.0));
}

const Model kTwoD = Model::twod({1.0, 0.05, 5.0});

// Dense multivariate normal log-density, deliberately computed through plain
// linear solves instead of the Metric internals it cross-checks.
double dense_gaussian_logpdf(const Eigen::VectorXd& dev,
                             const Eigen::MatrixXd& cov) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  REQUIRE(llt.info() == Eigen::Success);
  const Eigen::VectorXd half = llt.matrixL().solve(dev);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (static_cast<double>(cov.rows()) *
                     std::log(2.0 * std::numbers::pi) +
                 log_det + half.squaredNorm());
}

}  // namespace

TEST_CASE("metric at the 2-d origin inverts the diagonal hessian") {
  // H = diag(-0.1, -10) there, so Sigma = diag(10, 0.1) once alpha >= 10.
  const Metric metric =
      regularized_metric(kTwoD, Eigen::Vector2d(0.0, 0.0), 1e6);
  const Eigen::MatrixXd sigma = metric.sigma();
  CHECK(sigma(0, 0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(sigma(1, 1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(sigma(0, 1)) <= 1e-14);
}

TEST_CASE("a zero eigenvalue is floored at 1/alpha") {
  // At (0, a/(2b)) the hessian is [[0,0],[0,-2b]].
  const double a = 0.05, b = 5.0;
  const Metric metric = regularized_metric(
      kTwoD, Eigen::Vector2d(0.0, a / (2.0 * b)), 1e6);
  const Eigen::VectorXd lam = metric.precision_eigenvalues();
  CHECK(lam.minCoeff() == doctest::Approx(1e-6));
  CHECK(lam.maxCoeff() == doctest::Approx(2.0 * b));
  CHECK(metric.sigma().eigenvalues().real().maxCoeff() ==
        doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("negative-definite hessian with large eigenvalues gives (-H)^{-1}") {
  const Eigen::Vector2d x(1.0, 1.0);
  const Eigen::MatrixXd h = kTwoD.hessian_log_kernel(x);
  const Metric metric = regularized_metric(kTwoD, x, 1e6);
  const Eigen::MatrixXd want = (-h).inverse();
  CHECK((metric.sigma() - want).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("every regularized precision eigenvalue respects the floor") {
  const Model m = standard_hybrid(3, 2);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x[i] = u(gen);
    const double alpha = 1e4;
    const Metric metric = regularized_metric(m, x, alpha);
    CHECK(metric.precision_eigenvalues().minCoeff() >= 1.0 / alpha - 1e-18);
  }
}

TEST_CASE("scale-mode regularization also yields an SPD metric") {
  const double a = 0.05, b = 5.0;
  const Metric metric =
      regularized_metric(kTwoD, Eigen::Vector2d(0.0, a / (2.0 * b)), 1e4,
                         MetricRegularization::AbsEigenScale);
  CHECK(metric.precision_eigenvalues().minCoeff() > 0.0);
  // the exact zero still needs the floor
  CHECK(metric.precision_eigenvalues().minCoeff() == doctest::Approx(1e-4));
}

TEST_CASE("proposal is the documented deterministic map of the noise") {
  const Eigen::Vector2d x(0.4, -0.3);
  const double h = 0.17;
  const Eigen::VectorXd grad = kTwoD.grad_log_kernel(x);
  const Metric id = Metric::identity(2);

  RngStream rng(77, 5);
  const Proposal p = propose(x, grad, h, id, Algorithm::MALA, rng);

  RngStream replay(77, 5);
  Eigen::VectorXd z(2);
  for (int i = 0; i < 2; ++i) z[i] = replay.normal();
  Eigen::VectorXd mean = x;
  mean += 0.5 * h * id.sigma_mul(grad);
  const Eigen::VectorXd want = mean + std::sqrt(h) * z;
  CHECK(p.x == want);
  CHECK(!p.divergent);

  // RWM from the same stream drops the drift and keeps the same noise.
  RngStream rng2(77, 5);
  const Proposal rw = propose(x, grad, h, id, Algorithm::RWM, rng2);
  CHECK(rw.x == (x + std::sqrt(h) * z).eval());
}

TEST_CASE("proposal moments match the drift and covariance") {
  const Eigen::Vector2d x(0.5, 0.35);
  const double h = 0.6;
  const Eigen::VectorXd grad = kTwoD.grad_log_kernel(x);
  const Metric metric = regularized_metric(kTwoD, x, 1e6);

  const int n = 100000;
  RngStream rng(123, 9);
  Eigen::MatrixXd draws(n, 2);
  for (int k = 0; k < n; ++k) {
    const Proposal p = propose(x, grad, h, metric, Algorithm::SMMALA, rng);
    draws.row(k) = p.x;
  }
  const Eigen::VectorXd want_mean =
      x + 0.5 * h * metric.sigma_mul(grad);
  const Eigen::MatrixXd want_cov = h * metric.sigma();

  const Eigen::VectorXd got_mean = draws.colwise().mean();
  Eigen::MatrixXd centered = draws.rowwise() - got_mean.transpose();
  const Eigen::MatrixXd got_cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(want_cov(i, i) / n);
    CHECK(std::abs(got_mean[i] - want_mean[i]) <= 4.0 * se);
  }
  CHECK((got_cov - want_cov).norm() / want_cov.norm() <= 0.02);
}

TEST_CASE("nonnegative log ratio always accepts") {
  RngStream rng(5);
  for (int k = 0; k < 1000; ++k)
    CHECK(mh_accept(0.0, std::log(rng.uniform())));
  CHECK(mh_accept(3.7, -0.01));
  CHECK(!mh_accept(-40.0, -0.5));
}

TEST_CASE("MH rule reproduces the stationary law of a two-state toy") {
  // pi = (0.3, 0.7), symmetric flip proposal. Acceptance from 1 to 0 is 3/7;
  // from 0 to 1 it is certain.
  const double log_pi[2] = {std::log(0.3), std::log(0.7)};
  RngStream rng(2024);
  int state = 0;
  long occupancy0 = 0;
  long at1 = 0, accepted_from1 = 0;
  const long steps = 1000000;
  for (long t = 0; t < steps; ++t) {
    const int prop = 1 - state;
    const double ratio = mh_log_ratio(log_pi[state], log_pi[prop], 0.0, 0.0);
    const bool acc = mh_accept(ratio, std::log(rng.uniform()));
    if (state == 1) {
      ++at1;
      accepted_from1 += acc;
    }
    if (acc) state = prop;
    occupancy0 += state == 0;
  }
  const double occ0 = static_cast<double>(occupancy0) / static_cast<double>(steps);
  // tau of this flip chain is 0.4, so 4 standard errors is ~1.2e-3
  CHECK(std::abs(occ0 - 0.3) <= 1.2e-3);
  const double acc_from1 =
      static_cast<double>(accepted_from1) / static_cast<double>(at1);
  const double se = std::sqrt((3.0 / 7.0) * (4.0 / 7.0) / static_cast<double>(at1));
  CHECK(std::abs(acc_from1 - 3.0 / 7.0) <= 3.0 * se);
}

TEST_CASE("identical seeds reproduce the chain exactly") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::SMMALA;
  cfg.n_steps = 2000;
  cfg.warmup = 500;
  cfg.thin = 2;
  const Model m = standard_hybrid(3, 2);
  const Chain a = run_chain(m, cfg, RngStream(9, 1));
  const Chain b = run_chain(m, cfg, RngStream(9, 1));
  CHECK(a.states == b.states);
  CHECK(a.accepted == b.accepted);
  CHECK(a.tuned_h == b.tuned_h);
  const Chain c = run_chain(m, cfg, RngStream(9, 2));
  CHECK(a.states != c.states);
}

TEST_CASE("chain bookkeeping") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::RWM;
  cfg.n_steps = 1001;
  cfg.warmup = 0;
  cfg.thin = 10;
  const Chain chain = run_chain(kTwoD, cfg, RngStream(33));
  CHECK(chain.states.rows() == 100);  // floor(n_steps / thin)
  CHECK(chain.accepted.size() == 1001);
  CHECK(chain.config.init == Eigen::VectorXd::Ones(2));
  CHECK(chain.acceptance_rate() >= 0.0);
  CHECK(chain.acceptance_rate() <= 1.0);

  SamplerConfig bad = cfg;
  bad.init = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(run_chain(kTwoD, bad, RngStream(33)), Error);
  bad = cfg;
  bad.h = 0.0;
  CHECK_THROWS_AS(run_chain(kTwoD, bad, RngStream(33)), Error);
  bad = cfg;
  bad.thin = 0;
  CHECK_THROWS_AS(run_chain(kTwoD, bad, RngStream(33)), Error);
}

TEST_CASE("vanishing step size drives RWM acceptance to one") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::RWM;
  cfg.h = 1e-10;
  cfg.n_steps = 2000;
  cfg.warmup = 0;
  const Chain chain = run_chain(kTwoD, cfg, RngStream(41));
  CHECK(chain.acceptance_rate() >= 0.999);
}

TEST_CASE("symmetric RWM cancels the proposal terms") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::RWM;
  cfg.h = 0.8;
  cfg.n_steps = 3000;
  cfg.warmup = 0;
  cfg.record_trace = true;
  const Chain chain = run_chain(kTwoD, cfg, RngStream(43));
  REQUIRE(chain.trace.size() == 3000);
  for (const auto& t : chain.trace) {
    if (t.divergent) continue;
    CHECK(t.log_q_fwd == doctest::Approx(t.log_q_rev).epsilon(1e-12));
    // acceptance decision reduces to the kernel ratio
    const bool want = t.log_u < t.log_pi_prop - t.log_pi_x;
    CHECK(t.accepted == want);
  }
}

TEST_CASE("offline replay reproduces every sMMALA acceptance ratio") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::SMMALA;
  cfg.h = 0.3;
  cfg.alpha = 1e6;
  cfg.n_steps = 10000;
  cfg.warmup = 0;
  cfg.record_trace = true;
  const Model m = standard_hybrid(3, 2);
  const Chain chain = run_chain(m, cfg, RngStream(47));

  long checked = 0;
  for (const auto& t : chain.trace) {
    if (t.divergent) continue;
    const Metric at_x = regularized_metric(m, t.x, cfg.alpha);
    const Metric at_prop = regularized_metric(m, t.x_prop, cfg.alpha);
    const Eigen::VectorXd fwd_mean =
        t.x + 0.5 * cfg.h * at_x.sigma_mul(m.grad_log_kernel(t.x));
    const Eigen::VectorXd rev_mean =
        t.x_prop + 0.5 * cfg.h * at_prop.sigma_mul(m.grad_log_kernel(t.x_prop));
    const double log_q_fwd =
        dense_gaussian_logpdf(t.x_prop - fwd_mean, cfg.h * at_x.sigma());
    const double log_q_rev =
        dense_gaussian_logpdf(t.x - rev_mean, cfg.h * at_prop.sigma());
    const double replay = mh_log_ratio(m.log_kernel(t.x), m.log_kernel(t.x_prop),
                                       log_q_fwd, log_q_rev);
    const double recorded =
        mh_log_ratio(t.log_pi_x, t.log_pi_prop, t.log_q_fwd, t.log_q_rev);
    CHECK(std::abs(replay - recorded) <=
          1e-10 * std::max(1.0, std::abs(recorded)));
    CHECK(t.accepted == mh_accept(recorded, t.log_u));
    ++checked;
  }
  CHECK(checked >= 9900);
}

TEST_CASE("MALA recovers the moments of a near-Gaussian target") {
  // a = b = 0.5: x1 ~ N(1, 1) exactly under the decomposition.
  const Model m = Model::twod({1.0, 0.5, 0.5});
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::MALA;
  cfg.n_steps = 1000000;  // tau is a few hundred here, so go long
  cfg.warmup = 10000;
  const Chain chain = run_chain(m, cfg, RngStream(51));

  std::vector<double> x1(static_cast<std::size_t>(chain.states.rows()));
  for (long t = 0; t < chain.states.rows(); ++t)
    x1[static_cast<std::size_t>(t)] = chain.states(t, 0);
  const auto mom = oracle::moments(x1);
  const double tau = integrated_autocorrelation(x1).tau;
  const double se_mean = std::sqrt(tau / static_cast<double>(x1.size()));
  CHECK(std::abs(mom.mean - 1.0) <= 3.0 * se_mean);

  // The variance estimator's error is driven by the autocorrelation of the
  // squared series, not of the series itself.
  std::vector<double> sq(x1.size());
  for (std::size_t t = 0; t < x1.size(); ++t) {
    const double d = x1[t] - mom.mean;
    sq[t] = d * d;
  }
  const double tau_sq = integrated_autocorrelation(sq).tau;
  const auto mom_sq = oracle::moments(sq);
  const double se_var =
      std::sqrt(mom_sq.variance * tau_sq / static_cast<double>(sq.size()));
  CHECK(std::abs(mom.variance - 1.0) <= 3.0 * se_var);
}

TEST_CASE("warmup settles sMMALA near the 50% target on the (3,2) hybrid") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::SMMALA;
  cfg.alpha = 1e6;
  cfg.h = 1.0;
  cfg.warmup = 20000;
  cfg.n_steps = 20000;
  const Chain chain = run_chain(standard_hybrid(3, 2), cfg, RngStream(53));
  CHECK(chain.acceptance_rate() >= 0.45);
  CHECK(chain.acceptance_rate() <= 0.55);
}

TEST_CASE("step-size updates move in the right direction") {
  const double lh = std::log(0.4);
  CHECK(tuned_log_step(lh, 1.0, 0.5, 1) > lh);
  CHECK(tuned_log_step(lh, 0.0, 0.5, 1) < lh);
  CHECK(tuned_log_step(lh, 0.5, 0.5, 1) == doctest::Approx(lh));
  // later windows move less
  const double early = tuned_log_step(lh, 1.0, 0.5, 1) - lh;
  const double late = tuned_log_step(lh, 1.0, 0.5, 100) - lh;
  CHECK(late < early);
}

TEST_CASE("tuned step lands within 20% of a grid-search bracket") {
  const Model m = standard_hybrid(3, 2);
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::SMMALA;
  cfg.alpha = 1e6;
  cfg.h = 1.0;
  cfg.warmup = 30000;
  cfg.n_steps = 10000;
  const Chain tuned = run_chain(m, cfg, RngStream(59));

  // offline oracle: acceptance is monotone decreasing in h; bracket 50%
  auto acceptance_at = [&](double h) {
    SamplerConfig fixed;
    fixed.algorithm = Algorithm::SMMALA;
    fixed.alpha = 1e6;
    fixed.h = h;
    fixed.warmup = 0;
    fixed.n_steps = 8000;
    return run_chain(m, fixed, RngStream(61)).acceptance_rate();
  };
  double h_lo = 0.02, h_hi = 4.0;
  double a_lo = acceptance_at(h_lo), a_hi = acceptance_at(h_hi);
  REQUIRE(a_lo > 0.5);
  REQUIRE(a_hi < 0.5);
  for (int it = 0; it < 12; ++it) {
    const double mid = std::sqrt(h_lo * h_hi);
    const double a_mid = acceptance_at(mid);
    if (a_mid > 0.5) {
      h_lo = mid;
      a_lo = a_mid;
    } else {
      h_hi = mid;
      a_hi = a_mid;
    }
  }
  const double h_star = std::sqrt(h_lo * h_hi);
  CHECK(std::abs(tuned.tuned_h - h_star) / h_star <= 0.2);
}

TEST_CASE("overflowing proposals are recorded as divergences, not crashes") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::RWM;
  cfg.h = 1e300;
  cfg.n_steps = 500;
  cfg.warmup = 0;
  const Chain chain = run_chain(kTwoD, cfg, RngStream(67));
  CHECK(chain.divergences > 0);
  CHECK(chain.states.allFinite());
  CHECK(chain.acceptance_rate() == 0.0);
}

TEST_CASE("chain metadata sidecar carries the run summary") {
  SamplerConfig cfg;
  cfg.algorithm = Algorithm::MALA;
  cfg.n_steps = 500;
  cfg.warmup = 100;
  cfg.thin = 5;
  const Chain chain = run_chain(kTwoD, cfg, RngStream(71, 8));
  const std::string meta = chain_meta_json(chain);
  CHECK(meta.find("\"tuned_h\"") != std::string::npos);
  CHECK(meta.find("\"acceptance_rate\"") != std::string::npos);
  CHECK(meta.find("\"divergences\"") != std::string::npos);
  CHECK(meta.find("\"mala\"") != std::string::npos);
  CHECK(meta.find("\"seed\": 71") != std::string::npos);
  CHECK(meta.find("\"stream_id\": 8") != std::string::npos);
  CHECK(meta.find("marsaglia-polar") != std::string::npos);
}
