#include "fminlab/errors.hpp"
#include "fminlab/hypersurface.hpp"
#include "fminlab/rotsym.hpp"

#include <fstream>
#include <sstream>

namespace fminlab {

namespace {

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

GraphFile read_graph_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot read graph file " + path);
    GraphFile g;
    std::string line, expr;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (starts_with(line, "@model")) {
            g.model = trim(line.substr(6));
        } else if (starts_with(line, "@domain")) {
            std::istringstream ds(line.substr(7));
            double v;
            while (ds >> v) g.domain.push_back(v);
            if (!ds.eof()) throw ArgumentError(path + ": bad @domain line");
        } else if (line[0] == '@') {
            throw ArgumentError(path + ": unknown directive '" + line + "'");
        } else {
            expr += " " + line;
        }
    }
    if (trim(expr).empty()) throw ArgumentError(path + ": no expression");
    g.phi = Expression::parse(expr);
    return g;
}

std::vector<std::string> builtin_chart_names() {
    return {"slice", "equator-cylinder", "shrinker-sphere", "shrinker-cylinder"};
}

AmbientModel default_model_for(std::string_view name, int n) {
    if (starts_with(name, "shrinker-")) return AmbientModel::gaussian(n);
    if (starts_with(name, "graph:")) {
        GraphFile g = read_graph_file(std::string(name.substr(6)));
        if (!g.model.empty()) return AmbientModel::parse(g.model);
    }
    if (starts_with(name, "profile:")) return load_profile(std::string(name.substr(8))).model;
    return AmbientModel::cylinder(n);
}

ImmersionChart make_chart(std::string_view name, const AmbientModel& model) {
    auto need = [&](bool cylinder) {
        if (model.is_cylinder() != cylinder)
            throw ArgumentError("surface '" + std::string(name) + "' needs a " +
                                (cylinder ? "cylinder" : "gaussian") + " model, got " + model.name());
    };
    if (name == "slice") {
        need(true);
        return slice_chart(model);
    }
    if (name == "equator-cylinder") {
        need(true);
        return equator_cylinder_chart(model);
    }
    if (name == "shrinker-sphere") {
        need(false);
        return shrinker_sphere_chart(model);
    }
    if (name == "shrinker-cylinder") {
        need(false);
        return shrinker_cylinder_chart(model);
    }
    if (starts_with(name, "graph:")) {
        GraphFile g = read_graph_file(std::string(name.substr(6)));
        ImmersionChart c = graph_chart(model, g.phi);
        if (!g.domain.empty()) {
            if (static_cast<int>(g.domain.size()) != 2 * c.dim)
                throw ArgumentError("@domain needs " + std::to_string(2 * c.dim) + " numbers");
            for (int i = 0; i < c.dim; ++i) {
                c.lo(i) = g.domain[2 * i];
                c.hi(i) = g.domain[2 * i + 1];
                if (!(c.lo(i) < c.hi(i))) throw ArgumentError("@domain bounds must increase");
            }
        }
        return c;
    }
    if (starts_with(name, "profile:")) {
        ProfileCurve p = load_profile(std::string(name.substr(8)));
        if (p.model.n != model.n || std::abs(p.model.a - model.a) > 1e-12 * p.model.a)
            throw ArgumentError("profile file was made for " + p.model.name() + ", not " + model.name());
        return profile_chart(p);
    }
    throw ArgumentError("unknown surface '" + std::string(name) + "'");
}

} // namespace fminlab
