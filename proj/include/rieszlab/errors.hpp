#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riesz {

struct HardSphereViolation : std::runtime_error {
  std::size_t i, j;
  double distance;
  HardSphereViolation(std::size_t i_, std::size_t j_, double dist_)
      : std::runtime_error("hard-sphere violation: points " + std::to_string(i_) + " and " +
                           std::to_string(j_) + " at distance " + std::to_string(dist_)),
        i(i_), j(j_), distance(dist_) {}
};

struct BudgetTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LevelOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonIntegrableSigma : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SigmaOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResolutionTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoPlateau : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RegimeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleInit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SupportTouchesBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySubject : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace riesz
