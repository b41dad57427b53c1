#include "icestring/colouring_io.hpp"

#include <fstream>
#include <sstream>

#include "icestring/errors.hpp"
#include "json.hpp"

namespace icestr {

using nlohmann::json;

namespace {

void read_matrix(const json& rows, int m, int n, EdgeColouring& c, bool horizontal) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != m)
        throw DimensionError(std::string(horizontal ? "h" : "v") + " must have m rows");
    for (int i = 0; i < m; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw DimensionError(std::string(horizontal ? "h" : "v") + " rows must have n entries");
        for (int j = 0; j < n; ++j) {
            const int v = row[j].get<int>();
            if (v != 0 && v != 1) throw DimensionError("edge values must be 0 or 1");
            if (horizontal)
                c.set_sigma(i, j, v);
            else
                c.set_eta(i, j, v);
        }
    }
}

}  // namespace

std::pair<LatticeSpec, EdgeColouring> parse_colouring(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw DimensionError(std::string("colouring is not valid JSON: ") + ex.what());
    }
    try {
        LatticeSpec spec;
        spec.m = j.at("m").get<int>();
        spec.n = j.at("n").get<int>();
        const std::string topo = j.value("topology", std::string("torus"));
        if (topo == "torus")
            spec.topology = Topology::Torus;
        else if (topo == "strip")
            spec.topology = Topology::OpenStrip;
        else
            throw DimensionError("topology must be \"torus\" or \"strip\"");
        if (j.contains("e")) spec.e = j.at("e").get<double>();
        spec.validate();
        EdgeColouring c(spec.m, spec.n);
        read_matrix(j.at("h"), spec.m, spec.n, c, true);
        read_matrix(j.at("v"), spec.m, spec.n, c, false);
        return {spec, c};
    } catch (const json::exception& ex) {
        throw DimensionError(std::string("malformed colouring: ") + ex.what());
    }
}

std::string dump_colouring(const LatticeSpec& spec, const EdgeColouring& c) {
    json j;
    j["m"] = spec.m;
    j["n"] = spec.n;
    j["topology"] = spec.topology == Topology::Torus ? "torus" : "strip";
    json h = json::array(), v = json::array();
    for (int i = 0; i < c.m; ++i) {
        json hr = json::array(), vr = json::array();
        for (int k = 0; k < c.n; ++k) {
            hr.push_back(c.sigma(i, k));
            vr.push_back(c.eta(i, k));
        }
        h.push_back(hr);
        v.push_back(vr);
    }
    j["h"] = h;
    j["v"] = v;
    return j.dump();
}

std::pair<LatticeSpec, EdgeColouring> read_colouring_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DimensionError("cannot open colouring file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_colouring(ss.str());
}

}  // namespace icestr
