#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gsure;
using namespace gsure::testing;

namespace {

struct SmallFrame {
  LaplacianOperator op;
  ExactSgwt transform;
  Eigen::MatrixXd w;
};

SmallFrame small_frame(SparseGraph g, LaplacianVariant v = LaplacianVariant::unnormalized) {
  auto op = make_laplacian(std::move(g), v);
  ExactSgwt t(exact_eigendecomposition(op), PartitionOfUnity::for_operator(op, PlateauKind::piecewise_linear, 2.0));
  Eigen::MatrixXd w = t.frame_matrix();
  return {std::move(op), std::move(t), std::move(w)};
}

// Var(gamma^_ij) as the literal double sum over p, q, from pairing the four
// probe indices of E[(W eps)_i^2 (W eps)_j^2].
double gamma_variance_literal(const Eigen::MatrixXd& w, double v2, double e2, std::size_t N, Eigen::Index i,
                              Eigen::Index j) {
  double first = 0.0, second = 0.0;
  for (Eigen::Index p = 0; p < w.cols(); ++p) {
    first += w(i, p) * w(i, p) * w(j, p) * w(j, p);
    for (Eigen::Index q = 0; q < w.cols(); ++q)
      if (p != q) second += w(i, p) * w(i, p) * w(j, q) * w(j, q) + w(i, p) * w(i, q) * w(j, p) * w(j, q);
  }
  return (v2 * first + e2 * second) / static_cast<double>(N);
}

// Exact variance of a quadratic form g(eps) under a single Rademacher probe,
// by enumerating all 2^n sign vectors.
template <class F>
double rademacher_variance_by_enumeration(std::size_t n, F g) {
  double mean = 0.0, sq = 0.0;
  const std::size_t count = std::size_t{1} << n;
  Vector eps(n);
  for (std::size_t mask = 0; mask < count; ++mask) {
    for (std::size_t p = 0; p < n; ++p) eps[p] = (mask >> p) & 1 ? 1.0 : -1.0;
    const double v = g(eps);
    mean += v;
    sq += v * v;
  }
  mean /= static_cast<double>(count);
  return sq / static_cast<double>(count) - mean * mean;
}

// Conditional variance of the plug-in SURE, literal quadruple sum over
// (i, j, k, l) with A(i, j) = dh_i / dF_j.
double sure_variance_literal(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a, double sigma, double v2, double e2,
                             std::size_t N) {
  const Eigen::Index s = w.rows(), n = w.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j) {
      if (a(i, j) == 0.0) continue;
      for (Eigen::Index k = 0; k < s; ++k)
        for (Eigen::Index l = 0; l < s; ++l) {
          if (a(l, k) == 0.0) continue;
          double t1 = 0.0, t2 = 0.0, t3 = 0.0;
          for (Eigen::Index p = 0; p < n; ++p) {
            t1 += w(i, p) * w(j, p) * w(k, p) * w(l, p);
            for (Eigen::Index q = 0; q < n; ++q) {
              if (p == q) continue;
              t2 += w(i, p) * w(j, q) * w(k, p) * w(l, q);
              t3 += w(i, p) * w(j, q) * w(k, q) * w(l, p);
            }
          }
          total += a(i, j) * a(l, k) * (v2 * t1 + e2 * t2 + e2 * t3);
        }
    }
  return 4.0 * std::pow(sigma, 4) / static_cast<double>(N) * total;
}

}  // namespace

TEST(Probe, RademacherValuesAndDeterminism) {
  const Vector a = draw_probe(100000, ProbeDistribution::rademacher, 42, 3);
  const Vector b = draw_probe(100000, ProbeDistribution::rademacher, 42, 3);
  EXPECT_EQ(a, b);
  double mean = 0.0;
  for (double x : a) {
    ASSERT_TRUE(x == 1.0 || x == -1.0);
    mean += x;
  }
  mean /= static_cast<double>(a.size());
  EXPECT_LE(std::abs(mean), 0.02);
  EXPECT_NE(a, draw_probe(100000, ProbeDistribution::rademacher, 42, 4));
}

TEST(Probe, GaussianMoments) {
  const Vector g = draw_probe(100000, ProbeDistribution::gaussian, 7, 0);
  double mean = 0.0, sq = 0.0;
  for (double x : g) {
    mean += x;
    sq += x * x;
  }
  mean /= static_cast<double>(g.size());
  sq /= static_cast<double>(g.size());
  EXPECT_LE(std::abs(mean), 0.02);
  EXPECT_NEAR(sq, 1.0, 0.02);
}

TEST(Probe, MomentsTable) {
  EXPECT_EQ(probe_moments(ProbeDistribution::rademacher).var_of_square, 0.0);
  EXPECT_EQ(probe_moments(ProbeDistribution::gaussian).var_of_square, 2.0);
  EXPECT_EQ(probe_moments(ProbeDistribution::gaussian).mean_square_squared, 1.0);
}

TEST(Weights, ExactWeightsTraceAndPsd) {
  const auto sf = small_frame(random_connected_graph(30, 40, 3));
  const Eigen::MatrixXd gamma = exact_weights(sf.w);
  EXPECT_NEAR(gamma.trace(), 30.0, 1e-8);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gamma).eigenvalues().minCoeff(), -1e-10);
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) EXPECT_GE(gamma(i, i), 0.0);
}

TEST(Weights, DiagonalEstimateIsIncrementalAndNonnegative) {
  const auto sf = small_frame(random_connected_graph(20, 25, 1));
  const auto w10 = estimate_diagonal_weights(sf.transform, 10, ProbeDistribution::gaussian, 9);
  for (double x : w10.diag) EXPECT_GE(x, 0.0);
  // Probes 0..4 then 5..9 accumulate to the same sums as a single N = 10 run.
  Vector sums(w10.diag.size(), 0.0);
  accumulate_diagonal_weights(sf.transform, ProbeDistribution::gaussian, 9, 5, 10, sums);
  accumulate_diagonal_weights(sf.transform, ProbeDistribution::gaussian, 9, 0, 5, sums);
  for (std::size_t i = 0; i < sums.size(); ++i) EXPECT_NEAR(sums[i] / 10.0, w10.diag[i], 1e-12);
  EXPECT_EQ(w10.fingerprint, sf.transform.fingerprint());
}

TEST(Weights, FullEstimateConsistency) {
  const auto sf = small_frame(random_connected_graph(12, 12, 5));
  const DenseAnalysis dense(sf.w);
  const Eigen::MatrixXd full = estimate_full_weights(dense, 7, ProbeDistribution::rademacher, 3);
  EXPECT_EQ((full - full.transpose()).cwiseAbs().maxCoeff(), 0.0);
  const auto diag = estimate_diagonal_weights(dense, 7, ProbeDistribution::rademacher, 3);
  for (std::size_t i = 0; i < diag.diag.size(); ++i) EXPECT_NEAR(full(i, i), diag.diag[i], 1e-12);

  const Eigen::MatrixXd one = estimate_full_weights(dense, 1, ProbeDistribution::rademacher, 3);
  const FrameCoefficients c = dense.forward(draw_probe(12, ProbeDistribution::rademacher, 3, 0));
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(one(i, i), c[i] * c[i], 1e-12);

  EXPECT_THROW(estimate_full_weights(dense, 2, ProbeDistribution::rademacher, 0, 10), InvalidArgument);
}

TEST(Weights, SingleSupportRowIsExactUnderRademacher) {
  // One-band frame whose rows each have a single nonzero entry.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w.diagonal() << 0.5, -1.0, 0.25, 0.75;
  const DenseAnalysis dense(w);
  const auto est = estimate_diagonal_weights(dense, 1, ProbeDistribution::rademacher, 11);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(est.diag[i], w(i, i) * w(i, i));
    EXPECT_EQ(gamma_variance_exact(w, ProbeDistribution::rademacher, 1, i, i), 0.0);
  }
}

TEST(Prop1, MatchesLiteralSum) {
  const auto sf = small_frame(random_connected_graph(10, 8, 2));
  for (auto d : {ProbeDistribution::rademacher, ProbeDistribution::gaussian}) {
    const auto m = probe_moments(d);
    for (Eigen::Index i = 0; i < sf.w.rows(); i += 3)
      for (Eigen::Index j = 0; j < sf.w.rows(); j += 5) {
        const double lit = gamma_variance_literal(sf.w, m.var_of_square, m.mean_square_squared, 5, i, j);
        EXPECT_NEAR(gamma_variance_exact(sf.w, d, 5, i, j), lit, 1e-12 * (1.0 + std::abs(lit)));
      }
  }
}

TEST(Prop1, GaussianMinusRademacher) {
  const auto sf = small_frame(random_connected_graph(10, 8, 4));
  const std::size_t N = 5;
  for (Eigen::Index i = 0; i < sf.w.rows(); i += 2)
    for (Eigen::Index j = 0; j < sf.w.rows(); j += 3) {
      double expected = 0.0;
      for (Eigen::Index p = 0; p < sf.w.cols(); ++p) expected += std::pow(sf.w(i, p) * sf.w(j, p), 2);
      expected *= 2.0 / N;
      const double diff = gamma_variance_exact(sf.w, ProbeDistribution::gaussian, N, i, j) -
                          gamma_variance_exact(sf.w, ProbeDistribution::rademacher, N, i, j);
      EXPECT_NEAR(diff, expected, 1e-14);
      EXPECT_GE(diff, 0.0);
    }
}

TEST(Prop1, RademacherMatchesEnumeration) {
  const auto sf = small_frame(path_graph(6));
  const DenseAnalysis dense(sf.w);
  for (Eigen::Index i = 0; i < sf.w.rows(); i += 4)
    for (Eigen::Index j = 0; j < sf.w.rows(); j += 3) {
      const double exact = rademacher_variance_by_enumeration(6, [&](const Vector& eps) {
        const FrameCoefficients c = dense.forward(eps);
        return c[i] * c[j];
      });
      EXPECT_NEAR(gamma_variance_exact(sf.w, ProbeDistribution::rademacher, 1, i, j), exact, 1e-12)
          << "i=" << i << " j=" << j;
    }
}

TEST(Prop1, DiagonalEqualsTwoCrossTermForm) {
  // For i = j the cross bracket is 2 sum_{p != q} W_ip^2 W_iq^2.
  const auto sf = small_frame(random_connected_graph(12, 10, 9));
  for (auto d : {ProbeDistribution::rademacher, ProbeDistribution::gaussian}) {
    const auto m = probe_moments(d);
    for (Eigen::Index i = 0; i < sf.w.rows(); ++i) {
      double quartic = 0.0, cross = 0.0;
      for (Eigen::Index p = 0; p < sf.w.cols(); ++p) {
        quartic += std::pow(sf.w(i, p), 4);
        for (Eigen::Index q = 0; q < sf.w.cols(); ++q)
          if (p != q) cross += std::pow(sf.w(i, p) * sf.w(i, q), 2);
      }
      const double printed = (m.var_of_square * quartic + 2.0 * m.mean_square_squared * cross) / 7.0;
      EXPECT_NEAR(gamma_variance_exact(sf.w, d, 7, i, i), printed, 1e-14);
    }
  }
}

TEST(Prop1, EmpiricalVarianceScalesAsOneOverN) {
  const auto sf = small_frame(random_connected_graph(20, 30, 8));
  const DenseAnalysis dense(sf.w);
  const std::size_t R = 1500;
  auto empirical = [&](std::size_t N) {
    Vector mean(sf.w.rows(), 0.0), sq(sf.w.rows(), 0.0);
    for (std::size_t r = 0; r < R; ++r) {
      const auto est = estimate_diagonal_weights(dense, N, ProbeDistribution::gaussian, 1000 + r);
      for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] += est.diag[i];
        sq[i] += est.diag[i] * est.diag[i];
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) total += sq[i] / R - std::pow(mean[i] / R, 2);
    return total;
  };
  const double ratio = empirical(40) / empirical(10);
  EXPECT_NEAR(ratio, 0.25, 0.25 * 0.25);
}

TEST(Prop1, RademacherVarianceNoLargerPerIndex) {
  const auto sf = small_frame(random_connected_graph(20, 30, 13));
  const DenseAnalysis dense(sf.w);
  const std::size_t R = 2000, N = 10, S = sf.w.rows();
  Vector var[2];
  int slot = 0;
  for (auto d : {ProbeDistribution::rademacher, ProbeDistribution::gaussian}) {
    Vector mean(S, 0.0), sq(S, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
      const auto est = estimate_diagonal_weights(dense, N, d, 77 + r);
      for (std::size_t i = 0; i < S; ++i) {
        mean[i] += est.diag[i];
        sq[i] += est.diag[i] * est.diag[i];
      }
    }
    var[slot].resize(S);
    for (std::size_t i = 0; i < S; ++i) var[slot][i] = sq[i] / R - std::pow(mean[i] / R, 2);
    ++slot;
  }
  std::size_t ok = 0, counted = 0;
  for (std::size_t i = 0; i < S; ++i) {
    if (var[1][i] == 0.0) continue;  // zero rows: both estimators are exact
    ++counted;
    if (var[0][i] <= var[1][i]) ++ok;
  }
  EXPECT_GE(static_cast<double>(ok), 0.95 * counted);
}

TEST(Prop2, MatchesLiteralQuadrupleSum) {
  const auto sf = small_frame(path_graph(5));
  const Eigen::Index s = sf.w.rows();
  ASSERT_LE(s, 150);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd dense_a(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j) dense_a(i, j) = u(rng);
  Eigen::MatrixXd diag_a = Eigen::MatrixXd::Zero(s, s);
  for (Eigen::Index i = 0; i < s; ++i) diag_a(i, i) = std::abs(u(rng));
  for (const Eigen::MatrixXd* a : {&dense_a, &diag_a}) {
    for (auto d : {ProbeDistribution::rademacher, ProbeDistribution::gaussian}) {
      const auto m = probe_moments(d);
      const double lit = sure_variance_literal(sf.w, *a, 0.7, m.var_of_square, m.mean_square_squared, 3);
      EXPECT_NEAR(sure_variance_exact(sf.w, *a, 0.7, d, 3), lit, 1e-10 * std::abs(lit));
    }
  }
}

TEST(Prop2, RademacherMatchesEnumeration) {
  const auto sf = small_frame(path_graph(6));
  const DenseAnalysis dense(sf.w);
  const Eigen::Index s = sf.w.rows();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j) a(i, j) = u(rng);
  const double sigma = 0.9;
  // With one probe the random part of SURE is 2 sigma^2 sum_ij A_ij c_i c_j.
  const double exact = rademacher_variance_by_enumeration(6, [&](const Vector& eps) {
    const FrameCoefficients c = dense.forward(eps);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = 0; j < s; ++j) acc += a(i, j) * c[i] * c[j];
    return 2.0 * sigma * sigma * acc;
  });
  EXPECT_NEAR(sure_variance_exact(sf.w, a, sigma, ProbeDistribution::rademacher, 1), exact, 1e-10 * exact);
}

TEST(Prop2, ZeroJacobianAndOrdering) {
  const auto sf = small_frame(random_connected_graph(10, 10, 6));
  const Eigen::Index s = sf.w.rows();
  EXPECT_EQ(sure_variance_exact(sf.w, Eigen::MatrixXd::Zero(s, s), 1.0, ProbeDistribution::gaussian, 3), 0.0);
  // Identity thresholding: A = I gives 8 sigma^4 n / N (Gaussian) and 0 (Rademacher)
  // because W^T W = I.
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s, s);
  EXPECT_NEAR(sure_variance_exact(sf.w, id, 1.0, ProbeDistribution::gaussian, 4), 8.0 * 10 / 4, 1e-8);
  EXPECT_NEAR(sure_variance_exact(sf.w, id, 1.0, ProbeDistribution::rademacher, 4), 0.0, 1e-8);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s, s);
    for (Eigen::Index i = 0; i < s; ++i) a(i, i) = u(rng);
    EXPECT_LE(sure_variance_exact(sf.w, a, 1.3, ProbeDistribution::rademacher, 3),
              sure_variance_exact(sf.w, a, 1.3, ProbeDistribution::gaussian, 3));
  }
  EXPECT_THROW(sure_variance_exact(sf.w, id, 1.0, ProbeDistribution::gaussian, 3, 10), InvalidArgument);
}

TEST(SureValue, IdentityAndInfiniteThreshold) {
  const auto sf = small_frame(random_connected_graph(20, 30, 2));
  const Eigen::VectorXd gamma_diag = exact_weights(sf.w).diagonal();
  const Vector weights(gamma_diag.data(), gamma_diag.data() + gamma_diag.size());
  const double sigma = 0.8;
  const FrameCoefficients noisy = sf.transform.forward(gaussian_vector(20, 4));
  const Vector ones(noisy.size(), 1.0), zeros(noisy.size(), 0.0);
  EXPECT_NEAR(sure_value(noisy, noisy, ones, sigma, weights), 20 * sigma * sigma, 1e-10);

  const FrameCoefficients killed(noisy.num_nodes(), noisy.num_scales());
  double energy = 0.0;
  for (double x : noisy.values()) energy += x * x;
  EXPECT_NEAR(sure_value(noisy, killed, zeros, sigma, weights), -20 * sigma * sigma + energy, 1e-10);
  EXPECT_THROW(sure_value(noisy, killed, Vector(3), sigma, weights), InvalidArgument);
}
