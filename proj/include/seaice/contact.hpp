#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "seaice/floe.hpp"

namespace seaice {

/// Geometry of one touching pair (l, j). The normal points from l to j and
/// the tangent is the normal rotated 90 degrees counter-clockwise.
struct ContactPair {
  int l = 0;  ///< index of the first floe in the field
  int j = 0;
  double distance = 0.0;  ///< m
  double overlap = 0.0;   ///< d - (r_l + r_j), negative in contact
  Vec2 normal;
  Vec2 tangent;
  double chord = 0.0;     ///< m
};

/// Per-floe accumulated contact force (N) and torque about z (N m).
struct BodyLoads {
  std::vector<Vec2> force;
  std::vector<double> torque;

  explicit BodyLoads(std::size_t n = 0) : force(n), torque(n, 0.0) {}
  void reset(std::size_t n);
};

/// Forces of one contact, all expressed as acting ON floe l FROM floe j.
/// The floe j receives -normal_force - tangential_force and torque_j.
struct PairForce {
  int l = 0;
  int j = 0;
  double overlap = 0.0;
  Vec2 normal_force;
  Vec2 tangential_force;
  double torque_l = 0.0;
  double torque_j = 0.0;
  double stiffness = 0.0;  ///< chord * E (scaled), N/m
};

/// x_j - x_l with each component wrapped into (-side/2, side/2].
Vec2 minimum_image_displacement(const Vec2& x_l, const Vec2& x_j, const Domain& domain);

/// Chord of the lens formed by two overlapping discs, clamped to [0, 2 min(r)].
double intersection_chord(double distance, double r_a, double r_b);

/// Contact geometry for floes l and j, or nullopt when they do not overlap
/// (touching is not contact). Throws DegenerateContactError on coincident
/// centres.
std::optional<ContactPair> detect_contact(const Floe& a, const Floe& b, const Domain& domain, int l = 0, int j = 1);

/// Normal stiffness chord * E, optionally scaled by min thickness.
double contact_stiffness(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat);

/// Hooke force on l: chord * E * overlap * n.
Vec2 normal_force(const ContactPair& pair, const MaterialParams& mat);
Vec2 normal_force(const ContactPair& pair, double stiffness);

/// Relative tangential speed at the contact point, positive when j slides
/// along +t relative to l.
double tangential_speed(const ContactPair& pair, const Floe& a, const Floe& b);

/// Shear force c G v_t t, magnitude capped at mu |f_n|.
Vec2 tangential_force(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat);
Vec2 tangential_force(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat,
                      const Vec2& f_normal);

/// (r n x f_t) . z for the floe of radius `radius` whose outward normal is n.
double contact_torque(const ContactPair& pair, double radius, const Vec2& f_t);

/// Full force record for one contact.
PairForce pair_force(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat);

enum class NeighborSearch { grid, all_pairs };

struct ContactResult {
  BodyLoads loads;
  std::vector<PairForce> pairs;  ///< sorted by (l, j), l < j
};

/// Accumulate contact loads on every floe. Both search paths enumerate the
/// same pairs and apply them in the same (l, j) order.
ContactResult accumulate_loads(const FloeField& field, const MaterialParams& mat,
                               NeighborSearch search = NeighborSearch::grid);
void accumulate_loads(const FloeField& field, const MaterialParams& mat, NeighborSearch search, ContactResult& out);
/// Same, testing only the given sorted candidate pairs.
void accumulate_loads(const FloeField& field, const MaterialParams& mat,
                      const std::vector<std::pair<int, int>>& candidates, ContactResult& out);

/// Index pairs (l < j) whose gap is below `margin`, sorted.
std::vector<std::pair<int, int>> find_pairs_within(const FloeField& field, double margin, NeighborSearch search);

/// Index pairs (l < j) whose discs overlap, sorted.
std::vector<std::pair<int, int>> find_contacts(const FloeField& field, NeighborSearch search);

}  // namespace seaice
