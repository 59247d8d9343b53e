#pragma once

#include <map>
#include <vector>

#include "seaice/floe.hpp"

namespace seaice {

/// How a superfloe's thickness is derived from its mass and radius.
enum class ThicknessRule {
  area_consistent,  ///< h = m / (rho pi r^2), keeps m = rho pi r^2 h
  literal_pi_squared,  ///< h = m / (rho pi^2 r^2)
};

struct ReductionConfig {
  int large_count = 30;      ///< L0, largest floes kept untouched
  int superfloe_count = 30;  ///< Ls
  double isolation_factor = 1.4142135623730951;
  ThicknessRule thickness_rule = ThicknessRule::area_consistent;
};

struct FieldStats {
  int count = 0;
  double concentration = 0.0;
  FieldExtent extent;
  double total_mass = 0.0;
  double total_area = 0.0;  ///< sum of pi r^2
  Vec2 momentum;
  double spin_momentum = 0.0;  ///< sum of I omega
};

FieldStats field_stats(const FloeField& field, const MaterialParams& mat);

struct ReductionReport {
  FieldStats before;
  FieldStats after;
  std::vector<int> deleted_ids;
  /// Superfloe id -> ids of the original floes it absorbed.
  std::map<int, std::vector<int>> merge_tree;
  // ledger of quantities removed by deletions (exactly zero without deletions)
  double deleted_mass = 0.0;
  double deleted_area = 0.0;
  Vec2 deleted_momentum;
  double deleted_spin_momentum = 0.0;
  // before - after - deleted; rounding level when conservation holds
  double mass_residual = 0.0;
  double area_residual = 0.0;
  Vec2 momentum_residual;
  double spin_residual = 0.0;
};

/// Merge two floes conserving mass, disc area, linear momentum and spin
/// angular momentum. Symmetric in (a, b). The result keeps the lower id and
/// gets a zero angle.
Floe merge_pair(const Floe& a, const Floe& b, const Domain& domain, const MaterialParams& mat,
                ThicknessRule rule = ThicknessRule::area_consistent);

struct Reduction {
  FloeField field;
  ReductionReport report;
};

/// Keep the L0 largest floes and coarse-grain the rest into at most Ls
/// superfloes by repeatedly merging the smallest floe with its nearest
/// neighbour, deleting it instead when it is isolated.
Reduction reduce(const FloeField& field, const ReductionConfig& cfg, const MaterialParams& mat);

/// Statistics of both fields; the deletion ledger is left empty.
ReductionReport reduction_report(const FloeField& full, const FloeField& reduced, const MaterialParams& mat);

/// The first `large_count` floes only (bare truncation).
FloeField truncate(const FloeField& field, int large_count);

}  // namespace seaice
