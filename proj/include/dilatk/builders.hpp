#pragma once

// Catalog surface builders. Cylinder-based builders triangulate internally by
// splitting each cylinder into angular sectors < pi/2 with auxiliary vertices
// on the internal seams; the intended decomposition is recorded as metadata
// so tests can use it as an oracle.

#include "dilatk/surface.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace dilatk {

struct UnknownFamily : Error {
    explicit UnknownFamily(const std::string& name) : Error("unknown family: " + name) {}
};

class ComplexBuilder {
public:
    std::vector<Triangle> tris;
    std::vector<std::pair<EdgeRef, EdgeRef>> gluings;
    std::map<Corner, VertexKind> kinds;

    // Adds a simple ccw polygon, triangulated by a fan from the vertex
    // centroid (which tolerates collinear subdivision points on the sides).
    // Returns one EdgeRef per polygon side, in order.
    std::vector<EdgeRef> add_polygon(const std::vector<Vec2>& pts) {
        size_t n = pts.size();
        if (n < 3) throw BadParams("polygon needs at least 3 points");
        Vec2 c;
        for (const auto& p : pts) c = c + p;
        c = c / Rat(static_cast<long>(n));
        int base = static_cast<int>(tris.size());
        std::vector<EdgeRef> sides;
        for (size_t j = 0; j < n; ++j) {
            const Vec2& p = pts[j];
            const Vec2& q = pts[(j + 1) % n];
            if (orient(c, p, q) <= 0)
                throw BadParams("polygon not ccw or centroid fan degenerate");
            tris.push_back(Triangle{c, p, q});
            sides.push_back(EdgeRef{base + static_cast<int>(j), 1});
        }
        for (size_t j = 0; j < n; ++j) {
            int t = base + static_cast<int>(j);
            int u = base + static_cast<int>((j + 1) % n);
            glue(EdgeRef{t, 2}, EdgeRef{u, 0});
        }
        return sides;
    }

    void glue(EdgeRef a, EdgeRef b) { gluings.emplace_back(a, b); }

    void promote_singular(Corner c) { kinds[c] = VertexKind::Singular; }

    DilationSurface finish(SurfaceMetadata meta = {}) const {
        DilationSurface s;
        s.triangles = tris;
        s.gluings = gluings;
        s.vertex_kinds = kinds;
        s.metadata = std::move(meta);
        return s;
    }
};

// A boundary chain of a cylinder piece: edges along the ray `ray`, ordered by
// ascending distance from the apex. edges[i] covers positions
// [positions[i], positions[i+1]] * ray.
struct BoundaryChain {
    Vec2 ray;
    std::vector<Rat> positions;
    std::vector<EdgeRef> edges;
    bool ascending = true;  // edge traversal sense relative to the positions

    // Corner of the triangle lying at the given position along the ray.
    Corner corner_at(const Rat& pos) const {
        for (size_t i = 0; i < edges.size(); ++i) {
            const Rat& tail_pos = ascending ? positions[i] : positions[i + 1];
            const Rat& head_pos = ascending ? positions[i + 1] : positions[i];
            if (tail_pos == pos) return tail_corner(i);
            if (head_pos == pos) return head_corner(i);
        }
        throw BadParams("no chain vertex at position " + rat_to_string(pos));
    }
    Corner tail_corner(size_t i) const {
        return Corner{edges[i].tri, edges[i].edge};
    }
    Corner head_corner(size_t i) const {
        return Corner{edges[i].tri, (edges[i].edge + 1) % 3};
    }

    // Sub-chain covering [lo, hi]; endpoints must be existing subdivisions.
    BoundaryChain sub(const Rat& lo, const Rat& hi) const {
        BoundaryChain out;
        out.ray = ray;
        bool in = false;
        for (size_t i = 0; i < edges.size(); ++i) {
            if (positions[i] == lo) in = true;
            if (in) {
                out.positions.push_back(positions[i]);
                out.edges.push_back(edges[i]);
            }
            if (positions[i + 1] == hi && in) {
                out.positions.push_back(positions[i + 1]);
                return out;
            }
        }
        throw BadParams("sub-chain bounds not on subdivision");
    }
};

// Glues two chains edge-by-edge in matching ascending order. One side must be
// ascending-traversal and the other descending (validation checks the
// antiparallel invariant on every pair).
inline void glue_chains(ComplexBuilder& b, const BoundaryChain& A, const BoundaryChain& B) {
    if (A.edges.size() != B.edges.size())
        throw BadParams("chain gluing: subdivision mismatch");
    for (size_t i = 0; i < A.edges.size(); ++i) b.glue(A.edges[i], B.edges[i]);
}

// Pairs A's edges with B's reversed; used when both chains are traversed in
// the same ascending/descending sense along opposite rays.
inline void glue_chains_reversed(ComplexBuilder& b, const BoundaryChain& A,
                                 const BoundaryChain& B) {
    if (A.edges.size() != B.edges.size())
        throw BadParams("chain gluing: subdivision mismatch");
    size_t n = A.edges.size();
    for (size_t i = 0; i < n; ++i) b.glue(A.edges[i], B.edges[n - 1 - i]);
}

struct CylinderPieceSpec {
    std::vector<Vec2> rays;   // d_0 .. d_m, consecutive ccw angles in (0, pi/2]
    std::vector<Rat> radii;   // chord chain through radii[i] * rays[i]
    Rat lambda;               // deck factor > 1
    std::vector<Rat> start_marks;  // ascending, strictly inside (r0, lambda r0)
    std::vector<Rat> end_marks;
};

struct CylinderPiece {
    BoundaryChain start, end;
    std::vector<int> triangles;
};

// Builds the fundamental domain of the sector between rays[0] and rays.back()
// modulo z -> lambda z, as a fan of sector quadrilaterals between the chord
// chain and its deck image. Start boundary edges ascend along rays[0], end
// boundary edges descend along rays.back(); chains are reported ascending.
inline CylinderPiece add_cylinder_piece(ComplexBuilder& b, const CylinderPieceSpec& spec) {
    size_t m = spec.rays.size();
    if (m < 2) throw BadParams("cylinder piece needs at least two rays");
    if (spec.radii.size() != m) throw BadParams("radii/rays size mismatch");
    if (!(spec.lambda > 1)) throw BadParams("cylinder deck factor must exceed 1");
    for (size_t i = 0; i + 1 < m; ++i) {
        const Vec2 &u = spec.rays[i], &v = spec.rays[i + 1];
        if (!(sign(cross(u, v)) > 0 && sign(dot(u, v)) >= 0))
            throw BadParams("sector angle must lie in (0, pi/2]");
    }

    CylinderPiece piece;
    int first_tri = static_cast<int>(b.tris.size());

    std::vector<EdgeRef> prev_down;  // descending ray-seam edge of previous sector
    for (size_t i = 0; i + 1 < m; ++i) {
        Vec2 p = spec.radii[i] * spec.rays[i];
        Vec2 q = spec.radii[i + 1] * spec.rays[i + 1];
        Vec2 lp = spec.lambda * p, lq = spec.lambda * q;

        std::vector<Vec2> pts;
        std::vector<int> role;  // 0 ray-i asc, 1 outer chord, 2 ray-(i+1) desc, 3 inner chord
        pts.push_back(p);
        role.push_back(0);
        if (i == 0)
            for (const auto& mk : spec.start_marks) {
                if (!(mk > spec.radii[0] && mk < spec.lambda * spec.radii[0]))
                    throw BadParams("start mark outside boundary interval");
                pts.push_back(mk * spec.rays[0]);
                role.push_back(0);
            }
        pts.push_back(lp);
        role.push_back(1);
        pts.push_back(lq);
        role.push_back(2);
        if (i + 2 == m) {
            for (auto it = spec.end_marks.rbegin(); it != spec.end_marks.rend(); ++it) {
                if (!(*it > spec.radii[m - 1] && *it < spec.lambda * spec.radii[m - 1]))
                    throw BadParams("end mark outside boundary interval");
                pts.push_back(*it * spec.rays[m - 1]);
                role.push_back(2);
            }
        }
        pts.push_back(q);
        role.push_back(3);

        auto sides = b.add_polygon(pts);

        // Collect sides by role. side j runs pts[j] -> pts[j+1], so its role
        // is role[j] of the starting point.
        std::vector<EdgeRef> asc, desc;
        EdgeRef outer{}, inner{};
        for (size_t j = 0; j < sides.size(); ++j) {
            switch (role[j]) {
                case 0: asc.push_back(sides[j]); break;
                case 1: outer = sides[j]; break;
                case 2: desc.push_back(sides[j]); break;
                case 3: inner = sides[j]; break;
            }
        }
        // Deck gluing: inner chord of this sector onto its lambda image.
        b.glue(inner, outer);

        if (i == 0) {
            piece.start.ray = spec.rays[0];
            piece.start.positions.push_back(spec.radii[0]);
            for (const auto& mk : spec.start_marks) piece.start.positions.push_back(mk);
            piece.start.positions.push_back(spec.lambda * spec.radii[0]);
            piece.start.edges = asc;
        } else {
            // ray-i seam: previous sector's descending edge onto this
            // sector's ascending edge.
            if (asc.size() != 1 || prev_down.size() != 1)
                throw BadParams("internal seam must be a single edge");
            b.glue(prev_down[0], asc[0]);
        }
        if (i + 2 == m) {
            piece.end.ray = spec.rays[m - 1];
            piece.end.positions.push_back(spec.radii[m - 1]);
            for (const auto& mk : spec.end_marks) piece.end.positions.push_back(mk);
            piece.end.positions.push_back(spec.lambda * spec.radii[m - 1]);
            // desc lists edges from high position to low; store ascending.
            std::reverse(desc.begin(), desc.end());
            piece.end.edges = desc;
            piece.end.ascending = false;
        } else {
            prev_down = desc;
        }
    }
    for (int t = first_tri; t < static_cast<int>(b.tris.size()); ++t)
        piece.triangles.push_back(t);
    return piece;
}

inline std::vector<Vec2> quarter_turn_rays(const Vec2& start, int eighth_turns) {
    // Successive ccw rotations by pi/4 starting at `start`.
    std::vector<Vec2> rays;
    Vec2 d = start;
    rays.push_back(d);
    for (int i = 0; i < eighth_turns; ++i) {
        d = Vec2{d.x - d.y, d.x + d.y};  // rotate by pi/4 and scale by sqrt 2
        // Normalize the doubling of lengths every two steps to keep numbers small.
        if (d.x != 0 && d.y != 0 && d.x.get_den() == 1 && d.y.get_den() == 1) {
            Int g = gcd(abs(d.x.get_num()), abs(d.y.get_num()));
            if (g > 1) d = Vec2{d.x / Rat(g), d.y / Rat(g)};
        } else if (d.y == 0 || d.x == 0) {
            d = normalize_direction(d);
        }
        rays.push_back(d);
    }
    return rays;
}

// ---------------------------------------------------------------------------
// Catalog builders

inline DilationSurface build_square_torus(bool mark_singular) {
    DilationSurface s;
    s.triangles.push_back(Triangle{Vec2{Rat(0), Rat(0)}, Vec2{Rat(1), Rat(0)}, Vec2{Rat(1), Rat(1)}});
    s.triangles.push_back(Triangle{Vec2{Rat(0), Rat(0)}, Vec2{Rat(1), Rat(1)}, Vec2{Rat(0), Rat(1)}});
    s.gluings = {{EdgeRef{0, 2}, EdgeRef{1, 0}},
                 {EdgeRef{0, 0}, EdgeRef{1, 1}},
                 {EdgeRef{0, 1}, EdgeRef{1, 2}}};
    if (mark_singular) s.vertex_kinds[Corner{0, 0}] = VertexKind::Singular;
    s.metadata.builder = "square_torus";
    s.metadata.params["marked"] = mark_singular ? "1" : "0";
    IntendedCylinder h;
    h.label = "horizontal";
    h.flat = true;
    h.lambda = 1;
    h.halfturns = 0;
    h.arc_from = h.arc_to = Vec2{Rat(1), Rat(0)};
    h.modulus = 1;
    h.triangles = {0, 1};
    IntendedCylinder v = h;
    v.label = "vertical";
    v.arc_from = v.arc_to = Vec2{Rat(0), Rat(1)};
    s.metadata.cylinders = {h, v};
    return s;
}

inline DilationSurface build_hopf_torus(const Rat& lambda, int halfturns) {
    if (!(lambda > 1)) throw BadParams("hopf torus needs lambda > 1");
    if (halfturns < 2 || halfturns % 2 != 0)
        throw BadParams("hopf torus needs an even number of half-turns >= 2 "
                        "(odd cylinders cannot glue to themselves)");
    ComplexBuilder b;
    CylinderPieceSpec spec;
    spec.rays = quarter_turn_rays(Vec2{Rat(1), Rat(0)}, 4 * halfturns);
    spec.radii.assign(spec.rays.size(), Rat(1));
    spec.lambda = lambda;
    CylinderPiece piece = add_cylinder_piece(b, spec);
    glue_chains(b, piece.start, piece.end);
    b.promote_singular(piece.start.corner_at(Rat(1)));

    SurfaceMetadata meta;
    meta.builder = "hopf_torus";
    meta.params["lambda"] = rat_to_string(lambda);
    meta.params["halfturns"] = std::to_string(halfturns);
    IntendedCylinder c;
    c.label = "hopf";
    c.flat = false;
    c.lambda = lambda;
    c.halfturns = halfturns;
    c.arc_from = c.arc_to = Vec2{Rat(1), Rat(0)};
    c.modulus = 0;
    c.triangles = piece.triangles;
    meta.cylinders = {c};
    return b.finish(std::move(meta));
}

// Genus-1 dilation torus from two half-plane cylinders of angle pi; the two
// direction arcs cover the whole circle (Prop 3.4 (i) situation).
inline DilationSurface build_dilation_torus_covering(const Rat& lambda) {
    if (!(lambda > 1)) throw BadParams("needs lambda > 1");
    ComplexBuilder b;
    CylinderPieceSpec up;
    up.rays = quarter_turn_rays(Vec2{Rat(1), Rat(0)}, 4);  // (1,0) .. (-1,0)
    up.radii.assign(up.rays.size(), Rat(1));
    up.lambda = lambda;
    CylinderPiece U = add_cylinder_piece(b, up);

    CylinderPieceSpec low;
    low.rays = quarter_turn_rays(Vec2{Rat(-1), Rat(0)}, 4);  // (-1,0) .. (1,0)
    low.radii.assign(low.rays.size(), Rat(1));
    low.lambda = lambda;
    CylinderPiece L = add_cylinder_piece(b, low);

    glue_chains(b, U.start, L.end);
    glue_chains(b, U.end, L.start);
    b.promote_singular(U.start.corner_at(Rat(1)));
    b.promote_singular(U.end.corner_at(Rat(1)));

    SurfaceMetadata meta;
    meta.builder = "dilation_torus_covering";
    meta.params["lambda"] = rat_to_string(lambda);
    IntendedCylinder cu;
    cu.label = "upper";
    cu.lambda = lambda;
    cu.halfturns = 1;
    cu.arc_from = Vec2{Rat(1), Rat(0)};
    cu.arc_to = Vec2{Rat(-1), Rat(0)};
    cu.modulus = 0;
    cu.triangles = U.triangles;
    IntendedCylinder cl = cu;
    cl.label = "lower";
    cl.arc_from = Vec2{Rat(-1), Rat(0)};
    cl.arc_to = Vec2{Rat(1), Rat(0)};
    cl.triangles = L.triangles;
    meta.cylinders = {cu, cl};
    return b.finish(std::move(meta));
}

// Genus-1 dilation torus from two opposite quadrant cylinders; the union of
// the arcs misses half the circle (Prop 3.4 (ii) situation).
inline DilationSurface build_dilation_torus_quadrant(const Rat& lambda) {
    if (!(lambda > 1)) throw BadParams("needs lambda > 1");
    ComplexBuilder b;
    CylinderPieceSpec qa;
    qa.rays = quarter_turn_rays(Vec2{Rat(1), Rat(0)}, 2);  // (1,0),(1,1),(0,1)
    qa.radii.assign(qa.rays.size(), Rat(1));
    qa.lambda = lambda;
    CylinderPiece A = add_cylinder_piece(b, qa);

    CylinderPieceSpec qb;
    qb.rays = quarter_turn_rays(Vec2{Rat(-1), Rat(0)}, 2);  // (-1,0),(-1,-1),(0,-1)
    qb.radii.assign(qb.rays.size(), Rat(1));
    qb.lambda = lambda;
    CylinderPiece B = add_cylinder_piece(b, qb);

    glue_chains_reversed(b, A.start, B.start);
    glue_chains_reversed(b, A.end, B.end);
    b.promote_singular(A.start.corner_at(Rat(1)));
    b.promote_singular(A.end.corner_at(Rat(1)));

    SurfaceMetadata meta;
    meta.builder = "dilation_torus_quadrant";
    meta.params["lambda"] = rat_to_string(lambda);
    IntendedCylinder ca;
    ca.label = "first_quadrant";
    ca.lambda = lambda;
    ca.halfturns = 0;
    ca.arc_from = Vec2{Rat(1), Rat(0)};
    ca.arc_to = Vec2{Rat(0), Rat(1)};
    ca.modulus = 0;
    ca.triangles = A.triangles;
    IntendedCylinder cb = ca;
    cb.label = "third_quadrant";
    cb.arc_from = Vec2{Rat(-1), Rat(0)};
    cb.arc_to = Vec2{Rat(0), Rat(-1)};
    cb.triangles = B.triangles;
    meta.cylinders = {ca, cb};
    return b.finish(std::move(meta));
}

// Two pentagon chambers glued along their remaining side (§3.2 picture):
// genus 2, one singularity of angle 6 pi, the shared side is a closed
// separating saddle connection.
inline DilationSurface build_two_chambers() {
    ComplexBuilder b;
    auto chamber = [&b](int sgn) {
        Rat s(sgn);
        std::vector<Vec2> pts = {Vec2{Rat(0), Rat(0)}, Vec2{s * 1, Rat(0)},
                                 Vec2{s * 1, s * 1}, Vec2{s * -1, s * 1},
                                 Vec2{s * -1, Rat(0)}};
        auto sides = b.add_polygon(pts);
        b.glue(sides[0], sides[2]);  // bottom-right onto top, factor 2
        b.glue(sides[1], sides[3]);  // right wall onto left wall, factor 1
        return sides[4];
    };
    EdgeRef c1 = chamber(+1);
    EdgeRef c2 = chamber(-1);
    b.glue(c1, c2);

    SurfaceMetadata meta;
    meta.builder = "two_chambers";
    IntendedCylinder f1;
    f1.label = "chamber1_flat";
    f1.flat = true;
    f1.lambda = 1;
    f1.halfturns = 0;
    f1.arc_from = f1.arc_to = Vec2{Rat(1), Rat(0)};
    f1.modulus = Rat(1, 2);
    for (int t = 0; t < 5; ++t) f1.triangles.push_back(t);
    IntendedCylinder f2 = f1;
    f2.label = "chamber2_flat";
    f2.arc_from = f2.arc_to = Vec2{Rat(-1), Rat(0)};
    f2.triangles.clear();
    for (int t = 5; t < 10; ++t) f2.triangles.push_back(t);
    meta.cylinders = {f1, f2};
    // The separating SC is the glued fifth side; record it by its start
    // corner and developed vector.
    meta.named_sc["separating"] = {Corner{4, 1}, Vec2{Rat(1), Rat(0)}};
    return b.finish(std::move(meta));
}

// Quasi-Hopf surface modelled on Figure 2: six affine cylinders of angle
// pi/2 whose boundary saddle connections lie in the horizontal and vertical
// directions, four conical singularities of angle 4 pi, eight seam SCs.
inline DilationSurface build_quasi_hopf_fig2(const Rat& l1, const Rat& l2) {
    if (!(l1 > 1) || !(l2 > 1)) throw BadParams("needs lambda > 1");
    Rat L = l1 * l2;
    Rat z0 = l1 * (1 + l2) / 2;  // chord radius of the big cylinders, in (l1, L)

    ComplexBuilder b;
    auto quadrant = [&](const Vec2& from, const Rat& deck, const Rat& radius,
                        std::vector<Rat> smarks, std::vector<Rat> emarks) {
        CylinderPieceSpec spec;
        spec.rays = quarter_turn_rays(from, 2);
        spec.radii.assign(3, radius);
        spec.lambda = deck;
        spec.start_marks = std::move(smarks);
        spec.end_marks = std::move(emarks);
        return add_cylinder_piece(b, spec);
    };

    // Marks on the big cylinders' boundaries: the two singular points at
    // position classes 1 and l1 (representatives L and l1*L inside
    // (z0, L*z0)), plus the deck image of the chord point at z0*l1 so the
    // vertex set is invariant under the diagonal twist.
    std::vector<Rat> big_marks = {L, z0 * l1, l1 * L};
    std::sort(big_marks.begin(), big_marks.end());
    // Small cylinders A (deck l1) carry the preimage of the big chord when it
    // lands inside their glued arc.
    // Arc [L, l1*L] on the big chain hosts the full circle of an l1-cylinder;
    // arc [l1*L, L*L ~ L] hosts an l2-cylinder and wraps past the chord.

    // D: fourth quadrant, deck L. start = V boundary (ray (0,-1)),
    // end = H boundary (ray (1,0)).
    CylinderPiece D = quadrant(Vec2{Rat(0), Rat(-1)}, L, z0, big_marks, big_marks);
    // B: second quadrant, deck L. start = V ((0,1)), end = H ((-1,0)).
    CylinderPiece B = quadrant(Vec2{Rat(0), Rat(1)}, L, z0, big_marks, big_marks);
    // A: first quadrant, deck l1. start = H ((1,0)), end = V ((0,1)).
    Rat aux_a = z0 * l1 / L;  // big-chain position z0*l1 pulled back by c = L
    std::vector<Rat> a_marks;
    if (aux_a > 1 && aux_a < l1) a_marks.push_back(aux_a);
    CylinderPiece A = quadrant(Vec2{Rat(1), Rat(0)}, l1, Rat(1), a_marks, a_marks);
    // C: first quadrant, deck l2; its circle glues to the wrapped arc
    // [l1*L, L*L], so it sees the big chord at position z0*L / (l1*L) = z0/l1.
    Rat aux_c = z0 / l1;
    std::vector<Rat> c_marks;
    if (aux_c > 1 && aux_c < l2) c_marks.push_back(aux_c);
    CylinderPiece C = quadrant(Vec2{Rat(1), Rat(0)}, l2, Rat(1), c_marks, c_marks);
    // E: third quadrant, deck l1. start = H ((-1,0)), end = V ((0,-1)).
    CylinderPiece E = quadrant(Vec2{Rat(-1), Rat(0)}, l1, Rat(1), a_marks, a_marks);
    // F: third quadrant, deck l2.
    CylinderPiece F = quadrant(Vec2{Rat(-1), Rat(0)}, l2, Rat(1), c_marks, c_marks);

    // Gluing helper: glue a small cylinder's full circle chain onto the arc
    // of a big chain starting at big-position `at` (wraps across the deck).
    auto glue_circle_to_arc = [&](const BoundaryChain& small, const Rat& small_lambda,
                                  const BoundaryChain& big, const Rat& big_deck,
                                  const Rat& at) {
        // Positions of the small chain map by p -> at * p; reduce mod the big
        // deck into [big_radius, big_deck*big_radius).
        Rat big_radius = big.positions.front();
        size_t bi = 0;
        // find the big edge whose lower position equals `at`'s reduced rep
        auto reduce = [&](Rat p) {
            while (p >= big_deck * big_radius) p /= big_deck;
            while (p < big_radius) p *= big_deck;
            return p;
        };
        (void)small_lambda;
        for (size_t i = 0; i < small.edges.size(); ++i) {
            Rat lo = reduce(at * small.positions[i]);
            bool found = false;
            for (bi = 0; bi + 1 < big.positions.size(); ++bi) {
                if (big.positions[bi] == lo) {
                    Rat hi_expected = reduce(at * small.positions[i + 1]);
                    Rat hi_actual = big.positions[bi + 1];
                    if (hi_actual != hi_expected &&
                        reduce(hi_actual) != hi_expected)
                        throw BadParams("arc gluing: subdivision mismatch");
                    b.glue(small.edges[i], big.edges[bi]);
                    found = true;
                    break;
                }
            }
            if (!found) throw BadParams("arc gluing: no edge at position");
        }
    };

    // H side. D.end is the (1,0) chain of the fourth-quadrant big cylinder;
    // A's circle covers its arc [L, l1 L], C's the wrapped arc [l1 L, L^2].
    glue_circle_to_arc(A.start, l1, D.end, L, L);
    glue_circle_to_arc(C.start, l2, D.end, L, l1 * L);
    // B.end is the (-1,0) chain; E and F glue there.
    glue_circle_to_arc(E.start, l1, B.end, L, L);
    glue_circle_to_arc(F.start, l2, B.end, L, l1 * L);
    // V side. B.start is the (0,1) chain; A and C's V circles glue there.
    glue_circle_to_arc(A.end, l1, B.start, L, L);
    glue_circle_to_arc(C.end, l2, B.start, L, l1 * L);
    // D.start is the (0,-1) chain; E and F's V circles glue there.
    glue_circle_to_arc(E.end, l1, D.start, L, L);
    glue_circle_to_arc(F.end, l2, D.start, L, l1 * L);

    b.promote_singular(A.start.corner_at(Rat(1)));   // u1 on D's H chain
    b.promote_singular(E.start.corner_at(Rat(1)));   // u2 on B's H chain
    b.promote_singular(E.end.corner_at(Rat(1)));     // w1 on D's V chain
    b.promote_singular(A.end.corner_at(Rat(1)));     // w2 on B's V chain

    SurfaceMetadata meta;
    meta.builder = "quasi_hopf_fig2";
    meta.params["lambda1"] = rat_to_string(l1);
    meta.params["lambda2"] = rat_to_string(l2);
    auto cyl = [](std::string label, Rat lam, Vec2 from, Vec2 to,
                  const std::vector<int>& tris) {
        IntendedCylinder c;
        c.label = std::move(label);
        c.lambda = std::move(lam);
        c.halfturns = 0;
        c.arc_from = from;
        c.arc_to = to;
        c.modulus = 0;
        c.triangles = tris;
        return c;
    };
    meta.cylinders = {
        cyl("D", L, Vec2{Rat(0), Rat(-1)}, Vec2{Rat(1), Rat(0)}, D.triangles),
        cyl("B", L, Vec2{Rat(0), Rat(1)}, Vec2{Rat(-1), Rat(0)}, B.triangles),
        cyl("A", l1, Vec2{Rat(1), Rat(0)}, Vec2{Rat(0), Rat(1)}, A.triangles),
        cyl("C", l2, Vec2{Rat(1), Rat(0)}, Vec2{Rat(0), Rat(1)}, C.triangles),
        cyl("E", l1, Vec2{Rat(-1), Rat(0)}, Vec2{Rat(0), Rat(-1)}, E.triangles),
        cyl("F", l2, Vec2{Rat(-1), Rat(0)}, Vec2{Rat(0), Rat(-1)}, F.triangles)};
    return b.finish(std::move(meta));
}

// Surface modelled on Figure 3: two angle-2pi trapping cylinders glued to a
// two-quad middle band. The eight boundary SCs h..o are 1-horizon; the
// diagonal f of the first quad is crossed exactly twice by the recorded
// witness trajectory.
inline DilationSurface build_figure3() {
    ComplexBuilder b;

    // Quad 1: A(0,0) B(1,0) C(2,1) D(0,1); midpoints on the left side l1 and
    // the slant side s1.
    std::vector<Vec2> q1 = {Vec2{Rat(0), Rat(0)}, Vec2{Rat(1), Rat(0)},
                            Vec2{Rat(3, 2), Rat(1, 2)}, Vec2{Rat(2), Rat(1)},
                            Vec2{Rat(0), Rat(1)}, Vec2{Rat(0), Rat(1, 2)}};
    auto s1 = b.add_polygon(q1);
    EdgeRef q1_bottom = s1[0];
    std::vector<EdgeRef> q1_slant = {s1[1], s1[2]};  // B->Ms, Ms->C
    EdgeRef q1_top = s1[3];
    std::vector<EdgeRef> q1_left = {s1[4], s1[5]};  // D->Ml, Ml->A

    // Quad 2: A2(0,0) B2(-1,0) C2(-3,-2) D2(0,-2); midpoints on s2 and l2.
    std::vector<Vec2> q2 = {Vec2{Rat(0), Rat(0)},  Vec2{Rat(-1), Rat(0)},
                            Vec2{Rat(-2), Rat(-1)}, Vec2{Rat(-3), Rat(-2)},
                            Vec2{Rat(0), Rat(-2)},  Vec2{Rat(0), Rat(-1)}};
    auto s2 = b.add_polygon(q2);
    EdgeRef q2_bottom = s2[0];
    std::vector<EdgeRef> q2_slant = {s2[1], s2[2]};
    EdgeRef q2_top = s2[3];
    std::vector<EdgeRef> q2_left = {s2[4], s2[5]};

    b.glue(q1_bottom, q2_bottom);
    b.glue(q1_top, q2_top);

    // Trapping cylinder along the vertical boundary chains.
    CylinderPieceSpec tl;
    tl.rays = quarter_turn_rays(Vec2{Rat(0), Rat(1)}, 8);
    tl.radii.assign(tl.rays.size(), Rat(1));
    tl.lambda = 2;
    tl.start_marks = {Rat(3, 2)};
    tl.end_marks = {Rat(3, 2)};
    CylinderPiece TL = add_cylinder_piece(b, tl);
    // q1_left runs D(pos 2) -> Ml(3/2) -> A(pos 1): descending; TL.start is
    // ascending along (0,1).
    {
        BoundaryChain l1chain;
        l1chain.ray = Vec2{Rat(0), Rat(1)};
        l1chain.positions = {Rat(1), Rat(3, 2), Rat(2)};
        l1chain.edges = {q1_left[1], q1_left[0]};  // ascending: Ml->A reversed order
        l1chain.ascending = false;
        glue_chains(b, l1chain, TL.start);
    }
    {
        BoundaryChain l2chain;
        l2chain.ray = Vec2{Rat(0), Rat(1)};
        l2chain.positions = {Rat(1), Rat(3, 2), Rat(2)};
        l2chain.edges = {q2_left[0], q2_left[1]};  // D2->Ml2 covers [-2,-1]
        glue_chains(b, l2chain, TL.end);
    }

    // Trapping cylinder along the slant chains, ray direction (1,1).
    CylinderPieceSpec tr;
    tr.rays = quarter_turn_rays(Vec2{Rat(1), Rat(1)}, 8);
    tr.radii.assign(tr.rays.size(), Rat(1));
    tr.lambda = 2;
    tr.start_marks = {Rat(3, 2)};
    tr.end_marks = {Rat(3, 2)};
    CylinderPiece TR = add_cylinder_piece(b, tr);
    {
        BoundaryChain s1chain;
        s1chain.ray = Vec2{Rat(1), Rat(1)};
        s1chain.positions = {Rat(1), Rat(3, 2), Rat(2)};
        s1chain.edges = {q1_slant[0], q1_slant[1]};
        glue_chains(b, s1chain, TR.end);
    }
    {
        BoundaryChain s2chain;
        s2chain.ray = Vec2{Rat(1), Rat(1)};
        s2chain.positions = {Rat(1), Rat(3, 2), Rat(2)};
        s2chain.edges = {q2_slant[1], q2_slant[0]};  // ascending towards B2
        s2chain.ascending = false;
        glue_chains(b, s2chain, TR.start);
    }

    // Mark the four seam midpoints singular so the eight boundary segments
    // are saddle connections.
    b.promote_singular(Corner{q1_left[1].tri, q1_left[1].edge});       // Ml
    b.promote_singular(Corner{q1_slant[1].tri, q1_slant[1].edge});     // Ms
    b.promote_singular(Corner{q2_left[1].tri, q2_left[1].edge});       // Ml2
    b.promote_singular(Corner{q2_slant[1].tri, q2_slant[1].edge});     // Ms2

    SurfaceMetadata meta;
    meta.builder = "figure3";
    IntendedCylinder cl;
    cl.label = "left_trap";
    cl.lambda = 2;
    cl.halfturns = 4;
    cl.arc_from = cl.arc_to = Vec2{Rat(0), Rat(1)};
    cl.modulus = 0;
    cl.triangles = TL.triangles;
    IntendedCylinder cr = cl;
    cr.label = "right_trap";
    cr.arc_from = cr.arc_to = Vec2{Rat(1), Rat(1)};
    cr.triangles = TR.triangles;
    meta.cylinders = {cl, cr};
    // f: diagonal of quad 1 from A to C, developed vector (2,1).
    meta.named_sc["f"] = {Corner{q1_bottom.tri, 1}, Vec2{Rat(2), Rat(1)}};
    // Witness trajectory crossing f twice before entering the right trap:
    // starts at (1/2, 1) on q1_top heading straight down.
    SurfaceMetadata::Witness w;
    w.tri = q1_top.tri;
    w.point = Vec2{Rat(1, 2), Rat(1)};
    w.dir = Vec2{Rat(0), Rat(-1)};
    w.crosses = "f";
    meta.witness = w;
    return b.finish(std::move(meta));
}

inline DilationSurface build_catalog(const std::string& name,
                                     const std::map<std::string, std::string>& params) {
    auto get = [&params](const std::string& key, const std::string& dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    if (name == "square_torus")
        return build_square_torus(get("marked", "0") != "0");
    if (name == "hopf_torus")
        return build_hopf_torus(rat_from_string(get("lambda", "2")),
                                std::stoi(get("halfturns", "2")));
    if (name == "quasi_hopf_fig2")
        return build_quasi_hopf_fig2(rat_from_string(get("lambda1", "2")),
                                     rat_from_string(get("lambda2", "2")));
    if (name == "two_chambers") return build_two_chambers();
    if (name == "dilation_torus_covering")
        return build_dilation_torus_covering(rat_from_string(get("lambda", "2")));
    if (name == "dilation_torus_quadrant")
        return build_dilation_torus_quadrant(rat_from_string(get("lambda", "2")));
    if (name == "figure3") return build_figure3();
    throw UnknownFamily(name);
}

inline std::vector<std::string> catalog_names() {
    return {"square_torus",         "hopf_torus",
            "quasi_hopf_fig2",      "two_chambers",
            "dilation_torus_covering", "dilation_torus_quadrant",
            "figure3"};
}

}  // namespace dilatk
