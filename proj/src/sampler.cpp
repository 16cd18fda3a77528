#include "bfinito/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bfinito {

SamplerSpec SamplerSpec::uniform_single() {
  SamplerSpec s;
  s.tag = Tag::uniform_single;
  return s;
}

SamplerSpec SamplerSpec::weighted_single(const Vec& probabilities) {
  SamplerSpec s;
  s.tag = Tag::weighted_single;
  s.probabilities = probabilities;
  return s;
}

SamplerSpec SamplerSpec::minibatch(int batch) {
  SamplerSpec s;
  s.tag = Tag::minibatch;
  s.batch = batch;
  return s;
}

SamplerSpec SamplerSpec::cyclic() {
  SamplerSpec s;
  s.tag = Tag::cyclic;
  return s;
}

SamplerSpec SamplerSpec::shuffled_cyclic() {
  SamplerSpec s;
  s.tag = Tag::shuffled_cyclic;
  return s;
}

SamplerSpec SamplerSpec::custom_schedule(std::vector<std::vector<int>> schedule) {
  SamplerSpec s;
  s.tag = Tag::custom_schedule;
  s.schedule = std::move(schedule);
  return s;
}

SamplerSpec parse_sampler_spec(const std::string& text) {
  if (text == "uniform") return SamplerSpec::uniform_single();
  if (text == "cyclic") return SamplerSpec::cyclic();
  if (text == "shuffled") return SamplerSpec::shuffled_cyclic();
  if (text.rfind("minibatch:", 0) == 0) {
    std::size_t pos = 0;
    int b = std::stoi(text.substr(10), &pos);
    if (pos != text.size() - 10 || b < 1)
      throw std::invalid_argument("parse_sampler_spec: bad batch size in '" + text + "'");
    return SamplerSpec::minibatch(b);
  }
  if (text.rfind("weighted:", 0) == 0) {
    std::vector<double> probs;
    std::string rest = text.substr(9);
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t comma = rest.find(',', start);
      std::string tok = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (tok.empty()) throw std::invalid_argument("parse_sampler_spec: empty probability in '" + text + "'");
      probs.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    Vec p(static_cast<int>(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) p[static_cast<int>(i)] = probs[i];
    return SamplerSpec::weighted_single(p);
  }
  throw std::invalid_argument("parse_sampler_spec: unknown sampler '" + text + "'");
}

Sampler::Sampler(SamplerSpec spec, int n_components)
    : spec_(std::move(spec)), n_(n_components), rng_(spec_.seed) {
  if (n_ < 1) throw std::invalid_argument("Sampler: n_components must be positive");
  switch (spec_.tag) {
    case SamplerSpec::Tag::weighted_single: {
      if (spec_.probabilities.size() != n_)
        throw std::invalid_argument("Sampler: probability count mismatch");
      if ((spec_.probabilities.array() <= 0.0).any())
        throw std::invalid_argument("Sampler: probabilities must be strictly positive");
      if (std::abs(spec_.probabilities.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("Sampler: probabilities must sum to 1");
      break;
    }
    case SamplerSpec::Tag::minibatch:
      if (spec_.batch < 1 || spec_.batch > n_)
        throw std::invalid_argument("Sampler: batch size out of range");
      break;
    case SamplerSpec::Tag::custom_schedule: {
      if (spec_.schedule.empty()) throw std::invalid_argument("Sampler: empty schedule");
      for (const auto& set : spec_.schedule) {
        if (set.empty()) throw std::invalid_argument("Sampler: empty index set in schedule");
        for (int i : set)
          if (i < 0 || i >= n_) throw std::invalid_argument("Sampler: schedule index out of range");
      }
      break;
    }
    default:
      break;
  }
}

std::vector<int> Sampler::next_index_set() {
  std::vector<int> out;
  switch (spec_.tag) {
    case SamplerSpec::Tag::uniform_single:
      out = {rng_.bounded(n_)};
      break;
    case SamplerSpec::Tag::weighted_single: {
      double u = rng_.uniform01();
      double acc = 0.0;
      int pick = n_ - 1;
      for (int i = 0; i < n_; ++i) {
        acc += spec_.probabilities[i];
        if (u <= acc) {
          pick = i;
          break;
        }
      }
      out = {pick};
      break;
    }
    case SamplerSpec::Tag::minibatch: {
      // Partial Fisher-Yates: uniform over b-subsets, P[i in I] = b/N.
      std::vector<int> pool(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) pool[static_cast<std::size_t>(i)] = i;
      for (int r = 0; r < spec_.batch; ++r) {
        int j = r + rng_.bounded(n_ - r);
        std::swap(pool[static_cast<std::size_t>(r)], pool[static_cast<std::size_t>(j)]);
      }
      out.assign(pool.begin(), pool.begin() + spec_.batch);
      std::sort(out.begin(), out.end());
      break;
    }
    case SamplerSpec::Tag::cyclic:
      out = {static_cast<int>(k_ % n_)};
      break;
    case SamplerSpec::Tag::shuffled_cyclic: {
      int pos = static_cast<int>(k_ % n_);
      if (pos == 0) perm_ = rng_.permutation(n_);
      out = {perm_[static_cast<std::size_t>(pos)]};
      break;
    }
    case SamplerSpec::Tag::custom_schedule:
      out = spec_.schedule[static_cast<std::size_t>(k_ % static_cast<std::int64_t>(spec_.schedule.size()))];
      break;
  }
  ++k_;
  return out;
}

std::vector<int> next_index_set(Sampler& sampler, int n_components) {
  if (n_components != sampler.n_components())
    throw std::invalid_argument("next_index_set: component count mismatch");
  return sampler.next_index_set();
}

bool validate_essentially_cyclic(const std::vector<std::vector<int>>& schedule,
                                 int n_components, int window_len) {
  if (schedule.empty()) throw std::invalid_argument("validate_essentially_cyclic: empty schedule");
  if (window_len < 1) throw std::invalid_argument("validate_essentially_cyclic: window must be positive");
  std::size_t len = schedule.size();
  for (std::size_t start = 0; start < len; ++start) {
    std::vector<bool> seen(static_cast<std::size_t>(n_components), false);
    int covered = 0;
    for (int t = 0; t < window_len; ++t) {
      for (int i : schedule[(start + static_cast<std::size_t>(t)) % len]) {
        if (i < 0 || i >= n_components) return false;
        if (!seen[static_cast<std::size_t>(i)]) {
          seen[static_cast<std::size_t>(i)] = true;
          ++covered;
        }
      }
    }
    if (covered != n_components) return false;
  }
  return true;
}

}  // namespace bfinito
