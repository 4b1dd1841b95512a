#pragma once

#include <cstdint>

#include "olts/mdp.hpp"
#include "olts/rng.hpp"

namespace olts {

// The sole source of real samples. Owns one random stream and counts every
// sampled episode; the counter and stream form one unit, so concurrent
// callers must serialize sample_episode (independent consumers should each
// get their own handle with a derived seed instead).
//
// The model is borrowed, not owned; it must outlive the handle. Equal seeds
// on the same model produce bitwise-identical episode sequences.
class EnvironmentHandle {
 public:
  EnvironmentHandle(const TabularMDP& model, std::uint64_t seed)
      : model_(&model), rng_(seed) {}

  // Samples one episode under `policy`. Per step the reward is drawn first,
  // then the successor state; the last step also draws a successor (the
  // trajectory's terminal state). Throws ModelViolation if the cumulative
  // reward exceeds 1 beyond tolerance.
  Trajectory sample_episode(const NonStationaryPolicy& policy);

  std::uint64_t episodes_sampled() const { return episodes_; }
  const TabularMDP& model() const { return *model_; }

 private:
  const TabularMDP* model_;
  SplitRng rng_;
  std::uint64_t episodes_ = 0;
};

}  // namespace olts
