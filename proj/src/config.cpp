#include "rieszlab/config.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "rieszlab/grid.hpp"

namespace riesz {

namespace {

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto v : c) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

void check_dim_epsilon(int d, double epsilon) {
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be positive and finite");
}

}  // namespace

Params::Params(int d_, double sigma_, double epsilon_, std::optional<double> r_eps_)
    : d(d_), sigma(sigma_), epsilon(epsilon_), r_eps(r_eps_) {
  check_dim_epsilon(d, epsilon);
  if (!(epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  if (!(sigma > -d) || !(sigma < 1.0))
    throw std::invalid_argument("sigma must lie in (-d, 1)");
  if (sigma < 0.0) {
    if (r_eps) throw std::invalid_argument("integrable regime takes no mesoscale radius");
  } else {
    if (!r_eps) throw std::invalid_argument("regularized regime needs a mesoscale radius");
    if (!(*r_eps > 2.0 * epsilon) || !(*r_eps < 1.0))
      throw std::invalid_argument("mesoscale radius must lie in (2*epsilon, 1)");
  }
}

Configuration validate_configuration(std::vector<Vec> points, int d, double epsilon) {
  check_dim_epsilon(d, epsilon);
  for (auto& p : points)
    for (int k = d; k < 3; ++k) p[k] = 0.0;

  const double contact = 2.0 * epsilon;
  const double allowed = contact * (1.0 - kContactSlack);
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> buckets;
  buckets.reserve(points.size() * 2);

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Cell home = cell_of(points[i], contact);
    std::size_t worst = std::numeric_limits<std::size_t>::max();
    double worst_dist = 0.0;
    Cell c;
    for (std::int64_t dz = (d > 2 ? -1 : 0); dz <= (d > 2 ? 1 : 0); ++dz)
      for (std::int64_t dy = (d > 1 ? -1 : 0); dy <= (d > 1 ? 1 : 0); ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          c = {home[0] + dx, home[1] + dy, home[2] + dz};
          auto it = buckets.find(c);
          if (it == buckets.end()) continue;
          for (std::size_t j : it->second) {
            const double r = dist(points[i], points[j]);
            if (r < allowed && j < worst) {
              worst = j;
              worst_dist = r;
            }
          }
        }
    if (worst != std::numeric_limits<std::size_t>::max())
      throw HardSphereViolation(worst, i, worst_dist);
    buckets[home].push_back(i);
  }
  return Configuration{d, epsilon, std::move(points)};
}

double total_mass(const Configuration& config) {
  return static_cast<double>(config.size()) * sphere_mass_weight(config.d, config.epsilon);
}

}  // namespace riesz
