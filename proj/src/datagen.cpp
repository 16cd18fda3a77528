#include "bfinito/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bfinito/rng.hpp"

namespace bfinito {

Mat hadamard(int n) {
  if (n < 1 || (n & (n - 1)) != 0)
    throw std::invalid_argument("hadamard: n must be a power of two");
  Mat H(1, 1);
  H(0, 0) = 1.0;
  for (int m = 1; m < n; m *= 2) {
    Mat next(2 * m, 2 * m);
    next.topLeftCorner(m, m) = H;
    next.topRightCorner(m, m) = H;
    next.bottomLeftCorner(m, m) = H;
    next.bottomRightCorner(m, m) = -H;
    H = std::move(next);
  }
  return H / std::sqrt(static_cast<double>(n));
}

PhaseRetrievalInstance make_squared_instance(int n, int d, const Vec& x_true,
                                             double p_corrupt, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("make_squared_instance: d must be positive");
  if (x_true.size() != n) throw std::invalid_argument("make_squared_instance: x_true size mismatch");
  if (p_corrupt < 0.0 || p_corrupt > 1.0)
    throw std::invalid_argument("make_squared_instance: p_corrupt must be a probability");
  Mat M = hadamard(n);
  Rng rng(seed);
  int N = n * d;
  PhaseRetrievalInstance inst;
  inst.family = PhaseRetrievalInstance::Family::squared;
  inst.A.resize(N, n);
  for (int blk = 0; blk < d; ++blk) {
    // Block M S_blk with i.i.d. +-1 diagonal signs: column j of M scaled by s_j.
    for (int j = 0; j < n; ++j) {
      double sign = rng.uniform01() < 0.5 ? 1.0 : -1.0;
      inst.A.block(blk * n, j, n, 1) = sign * M.col(j);
    }
  }
  inst.b.resize(N);
  inst.x_true = x_true;
  inst.corruption_mask.assign(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i) {
    double r = inst.A.row(i).dot(x_true);
    inst.b[i] = r * r;
    if (p_corrupt > 0.0 && rng.uniform01() < p_corrupt) {
      inst.b[i] = 0.0;
      inst.corruption_mask[static_cast<std::size_t>(i)] = 1;
    }
  }
  return inst;
}

PhaseRetrievalInstance make_poisson_instance(int n, int N, std::uint64_t seed) {
  if (n < 1 || N < 1) throw std::invalid_argument("make_poisson_instance: sizes must be positive");
  Rng rng(seed);
  PhaseRetrievalInstance inst;
  inst.family = PhaseRetrievalInstance::Family::poisson;
  inst.A.resize(N, n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < n; ++j) inst.A(i, j) = std::abs(rng.normal());
  inst.x_true.resize(n);
  for (int j = 0; j < n; ++j) inst.x_true[j] = std::abs(rng.normal());
  double x_sq = inst.x_true.squaredNorm();
  inst.b.resize(N);
  inst.corruption_mask.assign(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i) {
    double mean = std::pow(inst.A.row(i).dot(inst.x_true), 2);
    inst.b[i] = static_cast<double>(rng.poisson(mean));
    if (rng.uniform01() < 0.1) {
      inst.b[i] = std::round(std::abs(x_sq * rng.normal()));
      inst.corruption_mask[static_cast<std::size_t>(i)] = 1;
    }
  }
  return inst;
}

Vec spectral_init(const PhaseRetrievalInstance& instance, int power_iterations,
                  std::uint64_t seed) {
  if (instance.count() < 1) throw std::invalid_argument("spectral_init: empty instance");
  if (power_iterations < 0) throw std::invalid_argument("spectral_init: negative iteration count");
  int n = instance.n();
  int N = instance.count();
  Rng rng(seed);
  Vec v(n);
  for (int j = 0; j < n; ++j) v[j] = rng.normal();
  v.normalize();
  bool poisson = instance.family == PhaseRetrievalInstance::Family::poisson;
  auto finalize = [&](Vec x) {
    if (poisson) x = x.cwiseAbs().cwiseMax(kEpsDom);
    return x;
  };
  double b_mean = instance.b.sum() / N;
  if (b_mean <= 0.0) return finalize(v);  // zero measurements: random unit fallback
  for (int it = 0; it < power_iterations; ++it) {
    // W v with W = (1/N) sum_i b_i a_i a_i^T, never forming W.
    Vec w = instance.A.transpose() * instance.b.cwiseProduct(instance.A * v) / N;
    double norm = w.norm();
    if (norm <= 0.0) return finalize(v);
    v = w / norm;
  }
  double response = (instance.A * v).squaredNorm() / N;  // (1/N) sum <a_i, v>^2
  if (response <= 0.0) return finalize(v);
  return finalize(std::sqrt(b_mean / response) * v);
}

namespace {

std::string family_name(PhaseRetrievalInstance::Family f) {
  return f == PhaseRetrievalInstance::Family::squared ? "squared" : "poisson";
}

void write_value(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void save_instance(const PhaseRetrievalInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open '" + path + "'");
  out << instance.n() << ' ' << instance.count() << ' ' << family_name(instance.family) << '\n';
  for (int i = 0; i < instance.count(); ++i) {
    for (int j = 0; j < instance.n(); ++j) {
      if (j) out << ' ';
      write_value(out, instance.A(i, j));
    }
    out << '\n';
  }
  for (int i = 0; i < instance.count(); ++i) {
    if (i) out << ' ';
    write_value(out, instance.b[i]);
  }
  out << '\n';
  for (int j = 0; j < instance.n(); ++j) {
    if (j) out << ' ';
    write_value(out, instance.x_true[j]);
  }
  out << '\n';
  if (!out) throw std::runtime_error("save_instance: write failed for '" + path + "'");
}

PhaseRetrievalInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open '" + path + "'");
  int n = 0;
  int N = 0;
  std::string family;
  if (!(in >> n >> N >> family) || n < 1 || N < 1)
    throw std::runtime_error("load_instance: bad header in '" + path + "'");
  PhaseRetrievalInstance inst;
  if (family == "squared")
    inst.family = PhaseRetrievalInstance::Family::squared;
  else if (family == "poisson")
    inst.family = PhaseRetrievalInstance::Family::poisson;
  else
    throw std::runtime_error("load_instance: unknown family '" + family + "' in '" + path + "'");
  inst.A.resize(N, n);
  inst.b.resize(N);
  inst.x_true.resize(n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < n; ++j)
      if (!(in >> inst.A(i, j))) throw std::runtime_error("load_instance: truncated matrix in '" + path + "'");
  for (int i = 0; i < N; ++i)
    if (!(in >> inst.b[i])) throw std::runtime_error("load_instance: truncated measurements in '" + path + "'");
  for (int j = 0; j < n; ++j)
    if (!(in >> inst.x_true[j])) throw std::runtime_error("load_instance: truncated ground truth in '" + path + "'");
  inst.corruption_mask.assign(static_cast<std::size_t>(N), 0);
  return inst;
}

}  // namespace bfinito
