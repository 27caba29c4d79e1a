#include <algorithm>
#include <cmath>

#include "hypolib/approximation.hpp"
#include "hypolib/error.hpp"
#include "hypolib/hypo_metric.hpp"
#include "hypolib/parallel.hpp"

namespace hypolib {

GridFn moreau_envelope(const GridFn& f, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
  const GridDomain& d = f.domain();
  std::vector<std::size_t> finite;
  for (std::size_t y = 0; y < f.size(); ++y) {
    if (f[y].is_finite()) finite.push_back(y);
  }
  std::vector<ExtReal> out(f.size());
  const double inv = 1.0 / (2.0 * lambda);
  parallel_for(f.size(), [&](std::size_t x) {
    double best = -kInf;
    for (std::size_t y : finite) best = std::max(best, f[y].value() - d.squared_l2_distance(x, y) * inv);
    out[x] = best;
  });
  return GridFn(f.domain_ptr(), std::move(out));
}

GridFn truncate_and_restrict(const GridFn& f, double cap, double rho) {
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  if (std::isnan(cap)) throw DomainError("cap must be a number");
  const GridDomain& d = f.domain();
  std::vector<ExtReal> out(f.size(), kNegInf);
  bool any = false;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (d.norm_inf(x) > rho + kGeomTol || !f[x].is_finite()) continue;
    out[x] = std::min(f[x].value(), cap);
    any = true;
  }
  if (!any) throw EmptyHypographError("no finite value left inside the rho-ball");
  return GridFn(f.domain_ptr(), std::move(out));
}

void PipelineSchedule::validate() const {
  if (stages.empty()) throw PreconditionError("pipeline schedule is empty");
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const auto& s = stages[k];
    if (!(s.lambda > 0.0)) throw PreconditionError("stage " + std::to_string(k + 1) + ": lambda must be positive");
    if (!(s.rho >= 0.0)) throw PreconditionError("stage " + std::to_string(k + 1) + ": rho must be nonnegative");
    if (s.q == 0) throw PreconditionError("stage " + std::to_string(k + 1) + ": q must be positive");
    if (k == 0) continue;
    const auto& p = stages[k - 1];
    if (s.cap < p.cap || s.rho < p.rho || s.q < p.q || !(s.lambda < p.lambda)) {
      throw PreconditionError("stage " + std::to_string(k + 1) +
                              ": caps, radii and piece budgets must be nondecreasing and lambda decreasing");
    }
  }
}

std::vector<PipelineStageResult> hypo_approx_sequence(const GridFn& f, const PipelineSchedule& schedule, double tol,
                                                      const PaFitOptions& fit) {
  schedule.validate();
  std::vector<PipelineStageResult> out;
  for (const auto& s : schedule.stages) {
    const GridFn phi = truncate_and_restrict(f, s.cap, s.rho);
    GridFn env = moreau_envelope(phi, s.lambda);
    PaFitResult r = pa_fit(env, s.q, s.rho, fit);
    const GridFn approx = pa_to_gridfn(r.fit, f.domain_ptr());
    const DistReport d = dl(approx, f, tol);
    out.push_back(PipelineStageResult{std::move(r.fit), d.value, d.error_bound, r.residual, std::move(env)});
  }
  return out;
}

}  // namespace hypolib
