#include "cubesig/io.hpp"

#include <charconv>
#include <fstream>

#include "cubesig/errors.hpp"

namespace cubesig {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json injection_to_json(const OrderedInjection& p) { return json(p.image); }

OrderedInjection injection_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("injection must be an array");
    return OrderedInjection(j.get<std::vector<int>>());
}

json permutation_to_json(const Permutation& p) { return json(p.images); }

Permutation permutation_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("permutation must be an array");
    return Permutation(j.get<std::vector<int>>());
}

json level_index_to_json(const LevelIndex& idx) {
    json p = json::array();
    for (const auto& inj : idx.forms) p.push_back(injection_to_json(inj));
    json pi = json::array();
    for (const auto& comp : idx.perms.components) pi.push_back(permutation_to_json(comp));
    return json{{"P", std::move(p)}, {"pi", std::move(pi)}};
}

LevelIndex level_index_from_json(const json& j) {
    std::vector<OrderedInjection> forms;
    for (const auto& e : j.at("P")) forms.push_back(injection_from_json(e));
    std::vector<Permutation> comps;
    for (const auto& e : j.at("pi")) comps.push_back(permutation_from_json(e));
    return LevelIndex(std::move(forms), PermutationTuple(std::move(comps)));
}

namespace {

json samples_to_nested(const GridMap& x, std::vector<int>& prefix, int axis) {
    const auto counts = x.vertex_counts();
    json arr = json::array();
    if (axis == x.d()) {
        for (int c = 0; c < x.n(); ++c) arr.push_back(x.at(prefix, c));
        return arr;
    }
    for (int k = 0; k < counts[static_cast<std::size_t>(axis)]; ++k) {
        prefix[static_cast<std::size_t>(axis)] = k;
        arr.push_back(samples_to_nested(x, prefix, axis + 1));
    }
    return arr;
}

void nested_to_samples(const json& node, const std::vector<int>& counts, int n, int axis,
                       std::string& where, std::vector<double>& out) {
    if (!node.is_array())
        throw InvalidInput("samples: expected array at " + (where.empty() ? "root" : where));
    if (axis == static_cast<int>(counts.size())) {
        if (static_cast<int>(node.size()) != n)
            throw InvalidInput("samples: expected " + std::to_string(n) + " components at " +
                               where);
        for (const auto& v : node) {
            if (!v.is_number()) throw InvalidInput("samples: non-numeric value at " + where);
            out.push_back(v.get<double>());
        }
        return;
    }
    if (static_cast<int>(node.size()) != counts[static_cast<std::size_t>(axis)])
        throw InvalidInput("samples: axis " + std::to_string(axis) + " expects " +
                           std::to_string(counts[static_cast<std::size_t>(axis)]) +
                           " entries, got " + std::to_string(node.size()) +
                           (where.empty() ? "" : " at " + where));
    for (std::size_t k = 0; k < node.size(); ++k) {
        std::string inner = where + "[" + std::to_string(k) + "]";
        std::swap(where, inner);
        nested_to_samples(node[k], counts, n, axis + 1, where, out);
        std::swap(where, inner);
    }
}

}  // namespace

json grid_map_to_json(const GridMap& x) {
    std::vector<int> prefix(static_cast<std::size_t>(x.d()), 0);
    return json{{"d", x.d()},
                {"n", x.n()},
                {"breakpoints", x.breakpoints()},
                {"samples", samples_to_nested(x, prefix, 0)}};
}

GridMap grid_map_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("grid map: expected a JSON object");
    const int d = j.at("d").get<int>();
    const int n = j.at("n").get<int>();
    const auto bps = j.at("breakpoints").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(bps.size()) != d)
        throw InvalidInput("grid map: breakpoints count must equal d");
    std::vector<int> counts;
    counts.reserve(bps.size());
    for (const auto& bp : bps) counts.push_back(static_cast<int>(bp.size()));
    std::vector<double> samples;
    std::string where;
    nested_to_samples(j.at("samples"), counts, n, 0, where, samples);
    return GridMap(d, n, bps, std::move(samples));
}

GridMap load_grid_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
    return grid_map_from_json(j);
}

json tensor_to_json(const GradedTensor& t) {
    json terms = json::array();
    for (const auto& [idx, v] : t.coeffs) {
        json entry = level_index_to_json(idx);
        entry["m"] = idx.level();
        entry["value"] = v;
        terms.push_back(std::move(entry));
    }
    return json{{"level0", t.level0}, {"terms", std::move(terms)}};
}

GradedTensor tensor_from_json(const json& j, int d, int n) {
    GradedTensor t(d, n, j.at("level0").get<double>());
    for (const auto& e : j.at("terms")) {
        const LevelIndex idx = level_index_from_json(e);
        if (static_cast<int>(e.at("m").get<int>()) != idx.level())
            throw InvalidInput("tensor term level disagrees with its index");
        t.add(idx, e.at("value").get<double>());
    }
    return t;
}

std::string tensor_to_csv(const GradedTensor& t) {
    std::string out = "m,P,pi,value\n";
    out += "0,,," + format_double(t.level0) + "\n";
    for (const auto& [idx, v] : t.coeffs) {
        out += std::to_string(idx.level());
        out += ',';
        bool first = true;
        for (const auto& inj : idx.forms)
            for (int e : inj.image) {
                if (!first) out += ';';
                out += std::to_string(e);
                first = false;
            }
        out += ',';
        first = true;
        for (const auto& comp : idx.perms.components)
            for (int e : comp.images) {
                if (!first) out += ';';
                out += std::to_string(e);
                first = false;
            }
        out += ',';
        out += format_double(v);
        out += '\n';
    }
    return out;
}

}  // namespace cubesig
