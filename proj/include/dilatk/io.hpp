#pragma once

// Surface file format. Structured text (JSON): rationals encoded as strings
// "p/q" so that parse(serialize(X)) == X bit-exactly.

#include "dilatk/surface.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace dilatk {

namespace io_detail {

inline nlohmann::json vec_json(const Vec2& v) {
    return nlohmann::json::array({rat_to_string(v.x), rat_to_string(v.y)});
}

inline Vec2 vec_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw BadParams("expected coordinate pair");
    return Vec2{rat_from_string(j[0].get<std::string>()),
                rat_from_string(j[1].get<std::string>())};
}

}  // namespace io_detail

inline nlohmann::json to_json(const DilationSurface& s) {
    nlohmann::json j;
    j["format"] = "dilatk-surface/1";
    j["triangles"] = nlohmann::json::array();
    for (const auto& t : s.triangles)
        j["triangles"].push_back(nlohmann::json::array(
            {io_detail::vec_json(t[0]), io_detail::vec_json(t[1]), io_detail::vec_json(t[2])}));
    j["gluings"] = nlohmann::json::array();
    for (const auto& [e, p] : s.gluings)
        j["gluings"].push_back(nlohmann::json::array(
            {nlohmann::json::array({e.tri, e.edge}), nlohmann::json::array({p.tri, p.edge})}));
    if (!s.vertex_kinds.empty()) {
        j["vertex_kinds"] = nlohmann::json::array();
        for (const auto& [c, k] : s.vertex_kinds)
            j["vertex_kinds"].push_back(
                nlohmann::json::array({c.tri, c.vertex, to_string(k)}));
    }
    if (!s.metadata.empty()) {
        nlohmann::json m;
        if (!s.metadata.builder.empty()) m["builder"] = s.metadata.builder;
        if (!s.metadata.params.empty()) m["params"] = s.metadata.params;
        if (!s.metadata.cylinders.empty()) {
            m["cylinders"] = nlohmann::json::array();
            for (const auto& c : s.metadata.cylinders) {
                nlohmann::json cj;
                cj["label"] = c.label;
                cj["flat"] = c.flat;
                cj["lambda"] = rat_to_string(c.lambda);
                cj["halfturns"] = c.halfturns;
                cj["arc_from"] = io_detail::vec_json(c.arc_from);
                cj["arc_to"] = io_detail::vec_json(c.arc_to);
                cj["modulus"] = rat_to_string(c.modulus);
                cj["triangles"] = c.triangles;
                m["cylinders"].push_back(cj);
            }
        }
        if (!s.metadata.named_sc.empty()) {
            m["named_sc"] = nlohmann::json::object();
            for (const auto& [label, sc] : s.metadata.named_sc)
                m["named_sc"][label] = nlohmann::json::array(
                    {sc.first.tri, sc.first.vertex, io_detail::vec_json(sc.second)});
        }
        if (s.metadata.witness) {
            const auto& w = *s.metadata.witness;
            m["witness"] = {{"tri", w.tri},
                            {"point", io_detail::vec_json(w.point)},
                            {"dir", io_detail::vec_json(w.dir)},
                            {"crosses", w.crosses}};
        }
        j["metadata"] = m;
    }
    return j;
}

inline DilationSurface surface_from_json(const nlohmann::json& j) {
    DilationSurface s;
    if (!j.contains("triangles") || !j.contains("gluings"))
        throw BadParams("surface file needs 'triangles' and 'gluings'");
    for (const auto& tj : j["triangles"]) {
        if (!tj.is_array() || tj.size() != 3) throw BadParams("triangle needs 3 points");
        s.triangles.push_back(Triangle{io_detail::vec_from_json(tj[0]),
                                       io_detail::vec_from_json(tj[1]),
                                       io_detail::vec_from_json(tj[2])});
    }
    for (const auto& gj : j["gluings"]) {
        EdgeRef e{gj[0][0].get<int>(), gj[0][1].get<int>()};
        EdgeRef p{gj[1][0].get<int>(), gj[1][1].get<int>()};
        s.gluings.emplace_back(e, p);
    }
    if (j.contains("vertex_kinds"))
        for (const auto& vk : j["vertex_kinds"]) {
            Corner c{vk[0].get<int>(), vk[1].get<int>()};
            std::string k = vk[2].get<std::string>();
            s.vertex_kinds[c] =
                (k == "singular") ? VertexKind::Singular : VertexKind::Auxiliary;
        }
    if (j.contains("metadata")) {
        const auto& m = j["metadata"];
        if (m.contains("builder")) s.metadata.builder = m["builder"].get<std::string>();
        if (m.contains("params"))
            for (auto it = m["params"].begin(); it != m["params"].end(); ++it)
                s.metadata.params[it.key()] = it.value().get<std::string>();
        if (m.contains("cylinders"))
            for (const auto& cj : m["cylinders"]) {
                IntendedCylinder c;
                c.label = cj["label"].get<std::string>();
                c.flat = cj["flat"].get<bool>();
                c.lambda = rat_from_string(cj["lambda"].get<std::string>());
                c.halfturns = cj["halfturns"].get<int>();
                c.arc_from = io_detail::vec_from_json(cj["arc_from"]);
                c.arc_to = io_detail::vec_from_json(cj["arc_to"]);
                c.modulus = rat_from_string(cj["modulus"].get<std::string>());
                c.triangles = cj["triangles"].get<std::vector<int>>();
                s.metadata.cylinders.push_back(std::move(c));
            }
        if (m.contains("named_sc"))
            for (auto it = m["named_sc"].begin(); it != m["named_sc"].end(); ++it) {
                const auto& v = it.value();
                s.metadata.named_sc[it.key()] = {
                    Corner{v[0].get<int>(), v[1].get<int>()},
                    io_detail::vec_from_json(v[2])};
            }
        if (m.contains("witness")) {
            SurfaceMetadata::Witness w;
            w.tri = m["witness"]["tri"].get<int>();
            w.point = io_detail::vec_from_json(m["witness"]["point"]);
            w.dir = io_detail::vec_from_json(m["witness"]["dir"]);
            w.crosses = m["witness"]["crosses"].get<std::string>();
            s.metadata.witness = w;
        }
    }
    return s;
}

inline std::string serialize(const DilationSurface& s) { return to_json(s).dump(1); }

inline DilationSurface parse_surface(const std::string& text) {
    return surface_from_json(nlohmann::json::parse(text));
}

inline void save_surface(const DilationSurface& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << serialize(s) << "\n";
}

inline DilationSurface load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_surface(ss.str());
}

}  // namespace dilatk
