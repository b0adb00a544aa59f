#pragma once

#include "riskmono/core.hpp"
#include "riskmono/random.hpp"

#include <cstdint>

namespace testutil {

inline riskmono::Matrix gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  riskmono::CounterRng rng(seed);
  riskmono::Matrix x(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();
  return x;
}

inline riskmono::Vector gaussian_vec(Eigen::Index n, std::uint64_t seed) {
  return gaussian(n, 1, seed).col(0);
}

inline riskmono::Dataset gaussian_data(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  return riskmono::Dataset(gaussian(n, p, riskmono::derive_seed(seed, "tx")),
                           gaussian_vec(n, riskmono::derive_seed(seed, "ty")));
}

}  // namespace testutil
