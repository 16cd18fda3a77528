#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bfinito/model.hpp"

namespace bfinito {

struct TraceRecord {
  std::int64_t iter = 0;
  double epochs = 0.0;  // cumulative |I|/N
  double cost = 0.0;
  std::optional<double> lyapunov;
  std::optional<double> residual;
  double wall_seconds = 0.0;
};

using Trace = std::vector<TraceRecord>;
using TraceSink = std::function<void(const TraceRecord&)>;

// phi(z) = (1/N) sum_i f_i(z) + g(z); +inf outside dom g or dom f_i.
double cost(const Problem& problem, const Vec& z);

// L(z, s) evaluated in anchor form: phi(z) + sum_i D_{h_hat_i}(z, x_i) where
// row i of anchors is the point at which s_i was last refreshed. Avoids any
// conjugate inversion.
double lyapunov(const Problem& problem, const Vec& z, const Mat& anchors);

// Op(z) = |z - T(sum_i grad h_hat_i(z))|: algorithm-independent stationarity
// surrogate; performs a fresh T call.
double op_residual(const Problem& problem, const Vec& z);

// c_U = min_i p_i / (1 + (1/mu_phi) sum_i (l_{h_i}/gamma_i - sigma_{f_i}/N));
// the predicted Q-factor of the strongly-convex linear rate is 1 - c_U.
double strconvex_rate_bound(double mu_phi, const Vec& gammas, const Vec& kernel_lipschitz,
                            const Vec& weak_convexity, const Vec& probabilities);

// True iff lyapunov values are nonincreasing along the trace up to
// slack * max(1, |L_k|) at each consecutive pair.
bool descent_check(const Trace& trace, double slack);

}  // namespace bfinito
