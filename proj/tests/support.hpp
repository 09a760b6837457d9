#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "solitonforge/flow.hpp"
#include "solitonforge/geometry.hpp"
#include "solitonforge/model.hpp"
#include "solitonforge/reconstruct.hpp"

namespace testsupport {

using namespace solitonforge;

struct Pipeline {
  model::ProblemSpec spec;
  flow::Trajectory traj;
  reconstruct::MetricProfile profile;
  geometry::CurvatureReport curv;
};

inline Pipeline run_pipeline(const model::ProblemSpec& spec) {
  Pipeline p;
  p.spec = model::validate_spec(spec);
  p.traj = flow::integrate(p.spec, flow::seed(p.spec));
  p.profile = reconstruct::reconstruct(p.traj, p.spec);
  p.curv = geometry::sectional_curvatures(p.profile, geometry::default_sectional_bounds(p.spec));
  return p;
}

/// Default-seeded soliton pipeline for the given dims, computed once per process.
inline const Pipeline& soliton(const std::vector<int>& dims) {
  static std::map<std::vector<int>, Pipeline> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto it = cache.find(dims);
  if (it == cache.end()) it = cache.emplace(dims, run_pipeline(model::make_spec(dims))).first;
  return it->second;
}

inline model::ProblemSpec ricci_flat_spec(const std::vector<int>& dims) {
  auto spec = model::make_spec(dims);
  spec.mode = model::Mode::RicciFlat;
  spec.seed_coeffs[0] = 0.0;
  return spec;
}

}  // namespace testsupport
