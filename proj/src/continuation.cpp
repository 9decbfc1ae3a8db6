#include <cmath>
#include <string>

#include "tori/errors.hpp"
#include "tori/newton.hpp"

namespace tori {

TorusSolution continue_parameter(TorusSolution sol, const ModelFactory& factory,
                                 const std::vector<Real>& schedule,
                                 const ContinuationOptions& opts,
                                 std::vector<ContinuationNode>* nodes) {
  if (schedule.empty()) return sol;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const Real a = schedule[i] - schedule[i - 1];
    const Real b = schedule[1] - schedule[0];
    if (a == 0 || (a > 0) != (b > 0)) throw InvalidData("continuation schedule is not strictly monotone");
  }

  auto solve_at = [&](const TorusSolution& guess, Real value) {
    ContinuationNode node;
    node.value = value;
    const auto model = factory(value);
    TorusSolution s = iterate(guess, *model, opts.iterate, &node.log);
    node.steps = static_cast<int>(node.log.size()) - 1;
    node.residual = node.log.empty() ? Real(0) : node.log.back().residual();
    node.lambda = s.lambda;
    if (nodes) nodes->push_back(std::move(node));
    return s;
  };

  sol = solve_at(sol, schedule.front());
  Real current = schedule.front();
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const Real target = schedule[i];
    Real h = target - current;
    while (current != target) {
      const Real next = std::abs(target - current) <= std::abs(h) ? target : current + h;
      try {
        sol = solve_at(sol, next);
        current = next;
      } catch (const Error&) {
        h /= 2;
        if (std::abs(h) < opts.min_step) {
          throw NonConvergence("continuation stalled at " +
                               std::to_string(static_cast<double>(current)) + " heading to " +
                               std::to_string(static_cast<double>(target)));
        }
      }
    }
  }
  return sol;
}

}  // namespace tori
