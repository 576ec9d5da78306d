#pragma once

// Exact angles. Cone angles and cylinder angles are represented as a count
// of half-turns plus a residual wedge between two exact directions, so that
// comparisons against multiples of pi are sign computations.

#include "dilatk/rational.hpp"

namespace dilatk {

// Angle swept ccw from `from` to `to`, equal to half_turns*pi + r with
// r in [0, pi) the ccw angle from (from * (-1)^half_turns) to `to`.
struct ExactAngle {
    Vec2 from{Rat(1), Rat(0)};
    Vec2 to{Rat(1), Rat(0)};
    int half_turns = 0;

    static ExactAngle zero(const Vec2& d) { return {d, d, 0}; }

    bool is_zero() const { return half_turns == 0 && same_direction(from, to); }

    // Exact comparisons against k*pi.
    bool at_least_pi() const { return half_turns >= 1; }
    bool at_least_two_pi() const { return half_turns >= 2; }
    bool equals_half_pi() const {
        return half_turns == 0 && dot(from, to) == 0 && sign(cross(from, to)) > 0;
    }
    bool equals_pi() const { return half_turns == 1 && residual_zero(); }
    bool equals_two_pi() const { return half_turns == 2 && residual_zero(); }
    bool equals_half_turns(int k) const { return half_turns == k && residual_zero(); }

    bool residual_zero() const {
        Vec2 base = (half_turns % 2 == 0) ? from : -from;
        return same_direction(base, to);
    }
};

// ccw angle from a to d as (half_turns, residual) with the convention above.
inline ExactAngle angle_between(const Vec2& a, const Vec2& d) {
    ExactAngle ang;
    ang.from = a;
    ang.to = d;
    if (same_direction(a, d)) {
        ang.half_turns = 0;
    } else if (antiparallel(a, d)) {
        ang.half_turns = 1;
    } else if (sign(cross(a, d)) > 0) {
        ang.half_turns = 0;  // in (0, pi)
    } else {
        ang.half_turns = 1;  // in (pi, 2 pi)
    }
    return ang;
}

// Is the ccw sweep from arc.from by the arc's angle passing strictly through
// direction d? Arcs of angle >= 2 pi contain every direction.
inline bool arc_contains_strict(const ExactAngle& arc, const Vec2& d) {
    if (arc.at_least_two_pi()) return true;
    if (same_direction(d, arc.from)) return false;
    ExactAngle to_d = angle_between(arc.from, d);
    // Compare to_d < arc as angles in [0, 2 pi).
    if (to_d.half_turns != arc.half_turns) return to_d.half_turns < arc.half_turns;
    // Same half-turn: compare residuals r(to_d) < r(arc); both measured from
    // the same base ray b = from * (-1)^half_turns.
    Vec2 base = (arc.half_turns % 2 == 0) ? arc.from : -arc.from;
    if (same_direction(d, arc.to)) return false;
    if (same_direction(base, d)) return !same_direction(base, arc.to);
    if (same_direction(base, arc.to)) return false;
    // Both residuals in (0, pi): d earlier iff d in the open wedge (base, to).
    return strictly_inside_wedge(base, arc.to, d);
}

// Trapping test for cylinders: leaves are unoriented, so d is trapped iff d
// or -d lies strictly inside the arc of closed-geodesic directions.
inline bool arc_traps_direction(const ExactAngle& arc, const Vec2& d) {
    return arc_contains_strict(arc, d) || arc_contains_strict(arc, -d);
}

// Membership in the closed symmetric arc (boundary directions included).
inline bool arc_contains_closed_symmetric(const ExactAngle& arc, const Vec2& d) {
    if (arc_traps_direction(arc, d)) return true;
    return same_direction(d, arc.from) || same_direction(d, arc.to) ||
           antiparallel(d, arc.from) || antiparallel(d, arc.to);
}

}  // namespace dilatk
