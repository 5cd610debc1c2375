#pragma once

#include <string>

namespace designgap {

inline constexpr double kCheckSlack = 1e-8;

/// Outcome of one inequality check, oriented so that it passes when
/// lhs >= rhs - slack.
struct BoundCheck {
  std::string name;
  std::string relation;  // human-readable form of lhs >= rhs
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = kCheckSlack;
  bool passed = false;
  double margin = 0.0;  // lhs - rhs
};

inline BoundCheck make_check(std::string name, std::string relation, double lhs, double rhs,
                             double slack = kCheckSlack) {
  BoundCheck c{std::move(name), std::move(relation), lhs, rhs, slack, false, lhs - rhs};
  c.passed = lhs >= rhs - slack;
  return c;
}

}  // namespace designgap
