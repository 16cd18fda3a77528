#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bfinito/kernel.hpp"
#include "bfinito/rng.hpp"

namespace bfinito {

// Index-set selection rule: randomized rules draw with declared marginal
// inclusion probabilities; cyclic rules cover every index in each window.
struct SamplerSpec {
  enum class Tag { uniform_single, weighted_single, minibatch, cyclic, shuffled_cyclic, custom_schedule };

  Tag tag = Tag::uniform_single;
  Vec probabilities;                       // weighted_single
  int batch = 1;                           // minibatch
  std::vector<std::vector<int>> schedule;  // custom_schedule, cycled
  std::uint64_t seed = 0;

  static SamplerSpec uniform_single();
  static SamplerSpec weighted_single(const Vec& probabilities);
  static SamplerSpec minibatch(int batch);
  static SamplerSpec cyclic();
  static SamplerSpec shuffled_cyclic();
  static SamplerSpec custom_schedule(std::vector<std::vector<int>> schedule);
};

// Parses "uniform" | "cyclic" | "shuffled" | "minibatch:b" | "weighted:p1,...,pN".
SamplerSpec parse_sampler_spec(const std::string& text);

class Sampler {
 public:
  Sampler(SamplerSpec spec, int n_components);

  // Nonempty subset of {0,...,N-1}; deterministic given (spec, seed).
  std::vector<int> next_index_set();

  const SamplerSpec& spec() const { return spec_; }
  int n_components() const { return n_; }
  std::int64_t k() const { return k_; }

 private:
  SamplerSpec spec_;
  int n_;
  std::int64_t k_ = 0;
  Rng rng_;
  std::vector<int> perm_;  // current shuffled-cyclic block
};

// Free-function form; n_components must match the sampler's.
std::vector<int> next_index_set(Sampler& sampler, int n_components);

// True iff, treating the schedule as one period of an infinite repetition,
// every window of length window_len covers {0,...,N-1}.
bool validate_essentially_cyclic(const std::vector<std::vector<int>>& schedule,
                                 int n_components, int window_len);

}  // namespace bfinito
