#pragma once

// Triangle complexes with dilation gluings: representation, validation,
// linear holonomy, Gauss-Bonnet, the SL(2,R) action and stratum data.
//
// Conventions:
//   * each triangle lives in its own chart, vertices in ccw order;
//   * edge i of a triangle joins vertex i to vertex i+1 (mod 3);
//   * a gluing pairs edge e=(t,i) with e'=(t',i') so that the head of e is
//     identified with the tail of e'. The transition from chart t to chart
//     t' is z -> a z + b with a > 0; paired edge vectors satisfy v' = -a v.

#include "dilatk/rational.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dilatk {

struct EdgeRef {
    int tri = -1;
    int edge = -1;  // 0, 1, 2

    bool operator==(const EdgeRef& o) const { return tri == o.tri && edge == o.edge; }
    bool operator!=(const EdgeRef& o) const { return !(*this == o); }
    bool operator<(const EdgeRef& o) const {
        return tri != o.tri ? tri < o.tri : edge < o.edge;
    }
};

struct Corner {
    int tri = -1;
    int vertex = -1;  // 0, 1, 2

    bool operator==(const Corner& o) const { return tri == o.tri && vertex == o.vertex; }
    bool operator<(const Corner& o) const {
        return tri != o.tri ? tri < o.tri : vertex < o.vertex;
    }
};

using Triangle = std::array<Vec2, 3>;

enum class VertexKind { Singular, Auxiliary };

inline const char* to_string(VertexKind k) {
    return k == VertexKind::Singular ? "singular" : "auxiliary";
}

// Extra, non-geometric information attached by catalog builders so tests and
// the horizon module can use intended decompositions as oracles.
struct IntendedCylinder {
    std::string label;
    bool flat = false;
    Rat lambda;          // deck factor (1 for flat)
    int halfturns = 0;   // angle = halfturns * pi + residual
    Vec2 arc_from, arc_to;
    Rat modulus;         // flat cylinders only
    std::vector<int> triangles;  // triangles inside the cylinder body
};

struct SurfaceMetadata {
    std::string builder;
    std::map<std::string, std::string> params;
    std::vector<IntendedCylinder> cylinders;
    // Named saddle connections: label -> (corner of start vertex, developed vector).
    std::map<std::string, std::pair<Corner, Vec2>> named_sc;
    // Optional witness trajectory: start triangle, point, direction.
    struct Witness {
        int tri = -1;
        Vec2 point;
        Vec2 dir;
        std::string crosses;  // label of the SC it is expected to cross twice
    };
    std::optional<Witness> witness;
    bool empty() const {
        return builder.empty() && params.empty() && cylinders.empty() &&
               named_sc.empty() && !witness;
    }
};

struct DilationSurface {
    std::vector<Triangle> triangles;
    std::vector<std::pair<EdgeRef, EdgeRef>> gluings;
    // Kind overrides keyed by any corner of the class.
    std::map<Corner, VertexKind> vertex_kinds;
    SurfaceMetadata metadata;

    int edge_id(const EdgeRef& e) const { return 3 * e.tri + e.edge; }

    Vec2 edge_vector(const EdgeRef& e) const {
        const Triangle& t = triangles[e.tri];
        return t[(e.edge + 1) % 3] - t[e.edge];
    }
    Vec2 edge_tail(const EdgeRef& e) const { return triangles[e.tri][e.edge]; }
    Vec2 edge_head(const EdgeRef& e) const { return triangles[e.tri][(e.edge + 1) % 3]; }
};

struct VertexClass {
    std::vector<Corner> corners;  // in ccw fan order
    VertexKind kind = VertexKind::Auxiliary;
    int cone_k = 0;  // angle is 2*pi*cone_k
    Rat lambda;      // linear holonomy of the ccw loop around the vertex
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

struct SurfaceAnalysis {
    ValidationReport report;
    bool structural_ok = false;

    std::vector<std::optional<EdgeRef>> partner;  // by edge id
    std::vector<Rat> factor;                      // transition factor across edge id
    std::vector<VertexClass> classes;
    std::vector<int> corner_class;  // by corner id (3*tri+vertex)
    int genus = -1;
    int singular_count = 0;

    int corner_id(const Corner& c) const { return 3 * c.tri + c.vertex; }
    const VertexClass& class_of(const Corner& c) const {
        return classes[corner_class[corner_id(c)]];
    }
};

namespace detail {

inline void check_edge_ref(const DilationSurface& s, const EdgeRef& e) {
    if (e.tri < 0 || e.tri >= static_cast<int>(s.triangles.size()) || e.edge < 0 ||
        e.edge > 2)
        throw IndexError("edge reference out of range");
}

}  // namespace detail

// Transition across a glued edge, mapping the chart of tri(e) into the chart
// of tri(partner(e)).
inline Aff transition_across(const DilationSurface& s, const EdgeRef& e,
                             const EdgeRef& p, const Rat& factor) {
    // tail of e maps to head of p.
    Vec2 b = s.edge_head(p) - factor * s.edge_tail(e);
    return Aff{factor, b};
}

inline SurfaceAnalysis analyze(const DilationSurface& s) {
    SurfaceAnalysis a;
    auto& bad = a.report.violations;

    const int ntri = static_cast<int>(s.triangles.size());
    if (ntri == 0) {
        bad.push_back("empty complex");
        return a;
    }

    // Structural checks: index ranges and a fixed-point-free involution
    // covering every edge exactly once. Malformed references throw.
    a.partner.assign(3 * ntri, std::nullopt);
    a.factor.assign(3 * ntri, Rat(1));
    for (const auto& [e, p] : s.gluings) {
        detail::check_edge_ref(s, e);
        detail::check_edge_ref(s, p);
        if (e == p) {
            bad.push_back("edge glued to itself");
            continue;
        }
        int ie = s.edge_id(e), ip = s.edge_id(p);
        if (a.partner[ie] || a.partner[ip]) {
            bad.push_back("edge glued more than once");
            continue;
        }
        a.partner[ie] = p;
        a.partner[ip] = e;
    }
    for (int i = 0; i < 3 * ntri; ++i)
        if (!a.partner[i]) {
            bad.push_back("unglued edge " + std::to_string(i / 3) + "." +
                          std::to_string(i % 3));
        }
    a.structural_ok = bad.empty();
    if (!a.structural_ok) return a;

    // Triangle orientation.
    for (int t = 0; t < ntri; ++t) {
        const Triangle& tr = s.triangles[t];
        if (sign(cross(tr[1] - tr[0], tr[2] - tr[0])) <= 0)
            bad.push_back("triangle " + std::to_string(t) +
                          " degenerate or not ccw");
    }
    if (!bad.empty()) return a;

    // Gluing compatibility: antiparallel edge vectors, derived factors.
    for (int i = 0; i < 3 * ntri; ++i) {
        EdgeRef e{i / 3, i % 3};
        EdgeRef p = *a.partner[i];
        Vec2 v = s.edge_vector(e), w = s.edge_vector(p);
        if (!antiparallel(v, w)) {
            bad.push_back("gluing not antiparallel at " + std::to_string(e.tri) + "." +
                          std::to_string(e.edge));
            continue;
        }
        // w = -factor * v with factor > 0.
        Rat f = (v.x != 0) ? Rat(-w.x / v.x) : Rat(-w.y / v.y);
        a.factor[i] = f;
    }
    if (!bad.empty()) return a;

    // Vertex classes: walk ccw fans. From corner (t,v) cross the edge whose
    // head is v, namely (t, v+2 mod 3), and arrive at corner (t', e').
    a.corner_class.assign(3 * ntri, -1);
    for (int cid = 0; cid < 3 * ntri; ++cid) {
        if (a.corner_class[cid] != -1) continue;
        VertexClass vc;
        Corner start{cid / 3, cid % 3};
        Corner cur = start;
        Rat lambda(1);
        // Winding: count ccw passes of the developed rays over the initial
        // entering ray. Track developed ray directions via the accumulated
        // chart scale; scales are positive so directions never rotate, the
        // corner shapes carry the turning.
        Vec2 initial_ray;  // in developing plane
        Vec2 prev_ray;
        int winding = 0;
        bool first = true;
        Rat dev_scale(1);
        do {
            a.corner_class[3 * cur.tri + cur.vertex] =
                static_cast<int>(a.classes.size());
            vc.corners.push_back(cur);
            const Triangle& tr = s.triangles[cur.tri];
            Vec2 enter = tr[(cur.vertex + 1) % 3] - tr[cur.vertex];
            Vec2 exit = tr[(cur.vertex + 2) % 3] - tr[cur.vertex];
            Vec2 dev_enter = dev_scale * enter;
            Vec2 dev_exit = dev_scale * exit;
            if (first) {
                initial_ray = dev_enter;
                first = false;
            }
            // Corner wedge turns ccw from dev_enter to dev_exit by the
            // (positive, < pi) interior angle; count if it passes the
            // initial direction.
            if (in_wedge_half_open(dev_enter, dev_exit, initial_ray)) ++winding;
            // Cross edge (t, v+2): its head is the vertex.
            EdgeRef out{cur.tri, (cur.vertex + 2) % 3};
            EdgeRef in = *a.partner[s.edge_id(out)];
            lambda *= a.factor[s.edge_id(out)];
            dev_scale /= a.factor[s.edge_id(out)];
            cur = Corner{in.tri, in.edge};
        } while (!(cur == start));
        vc.cone_k = winding;
        vc.lambda = lambda;
        a.classes.push_back(std::move(vc));
    }

    // Kind assignment: default Auxiliary iff (k, lambda) == (1, 1); overrides
    // may promote regular classes to Singular, never the reverse.
    for (auto& vc : a.classes) {
        bool regular = (vc.cone_k == 1 && vc.lambda == 1);
        vc.kind = regular ? VertexKind::Auxiliary : VertexKind::Singular;
    }
    for (const auto& [corner, kind] : s.vertex_kinds) {
        if (corner.tri < 0 || corner.tri >= ntri || corner.vertex < 0 ||
            corner.vertex > 2)
            throw IndexError("vertex kind override out of range");
        VertexClass& vc = a.classes[a.corner_class[3 * corner.tri + corner.vertex]];
        bool regular = (vc.cone_k == 1 && vc.lambda == 1);
        if (kind == VertexKind::Auxiliary && !regular) {
            bad.push_back("auxiliary override on a class with k=" +
                          std::to_string(vc.cone_k) + ", lambda=" +
                          rat_to_string(vc.lambda));
            continue;
        }
        vc.kind = kind;
    }

    for (const auto& vc : a.classes)
        if (vc.kind == VertexKind::Singular) ++a.singular_count;

    // Euler characteristic. E = 3F/2 (every edge glued), V = #classes.
    int F = ntri;
    if ((3 * F) % 2 != 0) {
        bad.push_back("odd edge count");
        return a;
    }
    int E = 3 * F / 2;
    int V = static_cast<int>(a.classes.size());
    int chi = V - E + F;
    if (chi % 2 != 0 || chi > 0) {
        bad.push_back("Euler characteristic " + std::to_string(chi) +
                      " is not 2-2g with g >= 1");
        a.genus = -1;
    } else {
        a.genus = (2 - chi) / 2;
    }

    // Gauss-Bonnet, as invariants of the complex.
    if (a.genus >= 1) {
        long angle_sum = 0;
        Rat prod(1);
        for (const auto& vc : a.classes) {
            if (vc.kind != VertexKind::Singular) continue;
            angle_sum += vc.cone_k - 1;
            prod *= vc.lambda;
        }
        if (angle_sum != 2 * a.genus - 2)
            bad.push_back("angle sum " + std::to_string(angle_sum) + " != 2g-2");
        if (prod != 1)
            bad.push_back("holonomy product " + rat_to_string(prod) + " != 1");
    }

    return a;
}

inline ValidationReport validate(const DilationSurface& s) { return analyze(s).report; }

// A validated surface bundled with its derived data; most operations consume
// this. Analysis is computed once, the surface is immutable afterwards.
struct Analyzed {
    DilationSurface surface;
    SurfaceAnalysis analysis;

    explicit Analyzed(DilationSurface s) : surface(std::move(s)), analysis(analyze(surface)) {}

    bool valid() const { return analysis.report.ok(); }
    void require_valid() const {
        if (!valid())
            throw Error("surface invalid: " + analysis.report.violations.front());
    }
    const Rat& factor(const EdgeRef& e) const {
        return analysis.factor[surface.edge_id(e)];
    }
    const EdgeRef& partner(const EdgeRef& e) const {
        return *analysis.partner[surface.edge_id(e)];
    }
    Aff cross_map(const EdgeRef& e) const {
        return transition_across(surface, e, partner(e), factor(e));
    }
    int class_index(const Corner& c) const {
        return analysis.corner_class[3 * c.tri + c.vertex];
    }
};

// ---------------------------------------------------------------------------
// Linear holonomy of loops

struct HomologyStep {
    EdgeRef edge;
    int sign = +1;  // +1: cross from tri(edge) into its partner; -1: reverse
};

struct HomologyLoop {
    std::vector<HomologyStep> walk;
};

struct NotClosed : Error {
    NotClosed() : Error("homology walk is not closed") {}
};

inline Rat holonomy_of_loop(const Analyzed& X, const HomologyLoop& loop) {
    if (loop.walk.empty()) return Rat(1);
    const auto& s = X.surface;
    int cur = -1;
    Rat h(1);
    for (const auto& st : loop.walk) {
        detail::check_edge_ref(s, st.edge);
        const EdgeRef& p = X.partner(st.edge);
        int from = st.sign > 0 ? st.edge.tri : p.tri;
        int to = st.sign > 0 ? p.tri : st.edge.tri;
        if (cur == -1) cur = from;
        if (cur != from) throw NotClosed();
        const Rat& f = X.factor(st.edge);
        h *= (st.sign > 0) ? f : Rat(1) / f;
        cur = to;
    }
    int start = loop.walk.front().sign > 0 ? loop.walk.front().edge.tri
                                           : X.partner(loop.walk.front().edge).tri;
    if (cur != start) throw NotClosed();
    return h;
}

// ---------------------------------------------------------------------------
// Gauss-Bonnet

struct GaussBonnet {
    bool angle_sum_ok = false;
    bool holonomy_product_ok = false;
};

inline GaussBonnet gauss_bonnet_check(const std::vector<VertexClass>& classes, int genus) {
    GaussBonnet gb;
    long angle_sum = 0;
    Rat prod(1);
    for (const auto& vc : classes) {
        if (vc.kind != VertexKind::Singular) continue;
        angle_sum += vc.cone_k - 1;
        prod *= vc.lambda;
    }
    gb.angle_sum_ok = (angle_sum == 2 * genus - 2);
    gb.holonomy_product_ok = (prod == 1);
    return gb;
}

inline GaussBonnet gauss_bonnet_check(const Analyzed& X) {
    return gauss_bonnet_check(X.analysis.classes, X.analysis.genus);
}

// ---------------------------------------------------------------------------
// SL(2,R) action

struct DetNotOne : Error {
    DetNotOne() : Error("matrix determinant is not 1") {}
};

inline DilationSurface apply_matrix(const DilationSurface& s, const Mat2& M) {
    if (M.det() != 1) throw DetNotOne();
    DilationSurface out = s;
    for (auto& tr : out.triangles)
        for (auto& v : tr) v = M.apply(v);
    for (auto& ic : out.metadata.cylinders) {
        if (!ic.arc_from.is_zero()) ic.arc_from = M.apply(ic.arc_from);
        if (!ic.arc_to.is_zero()) ic.arc_to = M.apply(ic.arc_to);
    }
    for (auto& [label, sc] : out.metadata.named_sc) sc.second = M.apply(sc.second);
    if (out.metadata.witness) {
        out.metadata.witness->point = M.apply(out.metadata.witness->point);
        out.metadata.witness->dir = M.apply(out.metadata.witness->dir);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stratum data

struct StratumInfo {
    int moduli_dim = 0;
    int stratum_dim = 0;
    std::vector<int> a;       // k_i - 1 over singular classes
    std::vector<Rat> lambda;  // dilation ratios over singular classes
};

inline StratumInfo stratum_info(const Analyzed& X) {
    X.require_valid();
    StratumInfo si;
    int g = X.analysis.genus;
    int n = X.analysis.singular_count;
    si.moduli_dim = 6 * (g - 1) + 3 * n;
    si.stratum_dim = 6 * (g - 1) + 2 * n + 1;
    for (const auto& vc : X.analysis.classes) {
        if (vc.kind != VertexKind::Singular) continue;
        si.a.push_back(vc.cone_k - 1);
        si.lambda.push_back(vc.lambda);
    }
    return si;
}

}  // namespace dilatk
