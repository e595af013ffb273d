#pragma once

// Reproducible random workloads for timing the forest operations. The
// operation sequence is fully determined by (profile, n, seed); only the
// wall-clock measurements vary between runs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dft/forest.hpp"
#include "dft/ops.hpp"

namespace dft::bench {

struct WorkloadConfig {
  using Reductions = std::tuple<ReductionSpec<int64_t, Plus<int64_t>, Plus<int64_t>>,
                                ReductionSpec<int64_t, Plus<int64_t>, Max<int64_t>>>;
  using Paths = std::tuple<PathSpec<int64_t>>;
  using Lazies = std::tuple<LazySpec<int64_t>>;
};
using WorkloadForest = Forest<WorkloadConfig>;

enum class Profile { query_heavy, evert_heavy, mixed };

Profile profile_from_name(std::string_view name);  // throws on unknown names
std::string_view profile_name(Profile p);

struct Measurement {
  size_t n = 0;
  size_t ops = 0;
  double ns_per_op = 0;
};

// One timed run at forest size n.
Measurement run_once(Profile p, size_t n, uint64_t seed);

// Runs sizes 2^min_exp .. 2^max_exp, keeping the median timing of `repeats`
// runs per size.
std::vector<Measurement> run_profile(Profile p, uint64_t seed, unsigned min_exp, unsigned max_exp,
                                     unsigned repeats = 3);

// Geometric mean of ns_per_op(2n) / ns_per_op(n) over consecutive sizes.
double mean_doubling_ratio(const std::vector<Measurement>& ms);

std::string render_report(Profile p, const std::vector<Measurement>& ms);

}  // namespace dft::bench
