#include "icestring/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "icestring/bethe.hpp"
#include "icestring/colouring_io.hpp"
#include "icestring/errors.hpp"
#include "icestring/hamiltonian.hpp"
#include "icestring/lattice.hpp"
#include "icestring/secular.hpp"
#include "icestring/verify.hpp"

namespace icestr {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::string family;
    std::optional<int> N, M, m, n, a, b;
    std::string method = "brute";
    std::string format = "json";
    bool list = false;
    bool timing = false;
    bool inject_fault = false;
    std::string export_path;
    std::string colouring_file;
    std::size_t cap = kDefaultBasisCap;
    std::size_t dense_cap = kDefaultDenseCap;
    double degeneracy_tol = 1e-9;
};

struct UsageError : Error {
    using Error::Error;
};

struct Sector {
    std::optional<int> a, b;
    std::vector<double> eigenvalues;
    json residuals = json::object();
};

Family parse_family(const std::string& f) {
    if (f == "fixed") return Family::FixedEnds;
    if (f == "t11") return Family::Torus11;
    if (f == "t12") return Family::Torus12;
    throw UsageError("unknown family '" + f + "'");
}

// required parameters present, foreign ones absent
FamilyParams family_params(const RunConfig& c, bool allow_sector) {
    const Family f = parse_family(c.family);
    FamilyParams p;
    if (f == Family::FixedEnds) {
        if (!c.N || !c.M) throw UsageError("family fixed needs --N and --M");
        if (c.m || c.n) throw UsageError("family fixed takes --N and --M only");
        if (c.a || c.b) throw UsageError("family fixed has no sector labels");
        p.N = *c.N;
        p.M = *c.M;
    } else {
        if (!c.m || !c.n) throw UsageError("family " + c.family + " needs --m and --n");
        if (c.N || c.M) throw UsageError("family " + c.family + " takes --m and --n only");
        if ((c.a || c.b) && !allow_sector) throw UsageError("sector labels are not accepted here");
        if (c.b && !c.a) throw UsageError("--b needs --a");
        p.m = *c.m;
        p.n = *c.n;
    }
    return p;
}

json params_json(Family f, const FamilyParams& p) {
    json j = json::object();
    if (f == Family::FixedEnds) {
        j["N"] = p.N;
        j["M"] = p.M;
    } else {
        j["m"] = p.m;
        j["n"] = p.n;
    }
    return j;
}

json opt_int(const std::optional<int>& x) { return x ? json(*x) : json(nullptr); }

double clean(double x) { return x == 0.0 ? 0.0 : x; }  // no "-0.0" in the output

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", clean(x));
    return buf;
}

json state_json(const StringState& s) {
    json j = json::object();
    if (auto* f = std::get_if<FixedEndsState>(&s)) {
        j["lambda"] = f->lambda;
    } else if (auto* t = std::get_if<Torus11State>(&s)) {
        j["alpha"] = t->alpha;
        j["lambda"] = t->lambda;
    } else {
        const auto& u = std::get<Torus12State>(s);
        j["alpha"] = u.base.alpha;
        j["lambda"] = u.base.lambda;
    }
    return j;
}

int cmd_enumerate(const RunConfig& c, std::ostream& out) {
    const Family f = parse_family(c.family);
    const FamilyParams p = family_params(c, false);
    std::vector<StringState> states;
    if (f == Family::FixedEnds) {
        for (auto& s : enumerate_fixed_ends(p.N, p.M, c.cap)) states.emplace_back(std::move(s));
    } else if (f == Family::Torus11) {
        for (auto& s : enumerate_torus11(p.m, p.n, c.cap)) states.emplace_back(std::move(s));
    } else {
        for (auto& s : enumerate_torus12(p.m, p.n, c.cap)) states.emplace_back(std::move(s));
    }
    json j;
    j["family"] = c.family;
    j["params"] = params_json(f, p);
    j["size"] = states.size();
    if (c.list) {
        j["states"] = json::array();
        for (const auto& s : states) j["states"].push_back(state_json(s));
    }
    out << j.dump(2) << "\n";
    return 0;
}

std::string export_name(const std::string& base, const Sector& s, bool single) {
    if (single) return base;
    std::string name = base;
    if (s.a) name += ".a" + std::to_string(*s.a);
    if (s.b) name += ".b" + std::to_string(*s.b);
    return name;
}

std::vector<Sector> spectrum_brute(Family f, const FamilyParams& p, const RunConfig& c) {
    std::vector<SectorLabel> labels;
    if (f == Family::FixedEnds) {
        labels.push_back({});
    } else if (c.a) {
        std::optional<int> b;
        if (c.b) b = f == Family::Torus12 ? secular_momentum_label(p.m, p.n, *c.a, *c.b) : *c.b;
        labels.push_back({*c.a, b});
    } else {
        labels = sector_labels(f, p, false);
    }
    std::vector<Sector> out;
    for (const auto& l : labels) {
        const SparseOperator op = build_sector_matrix(f, p, l, c.cap);
        const SpectrumResult sp = dense_spectrum(op, c.dense_cap, c.degeneracy_tol);
        Sector s;
        s.a = l.a;
        s.b = f == Family::Torus12 ? c.b : l.b;
        s.eigenvalues = sp.expanded();
        s.residuals["max_eigen_residual"] = sp.max_residual;
        s.residuals["hermiticity_defect"] = op.hermiticity_defect();
        s.residuals["dimension"] = op.dim();
        if (!c.export_path.empty()) {
            const std::string name = export_name(c.export_path, s, labels.size() == 1);
            std::ofstream os(name);
            if (!os) throw UsageError("cannot write " + name);
            os << export_coo(op);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sector> spectrum_bethe(Family f, const FamilyParams& p, const RunConfig& c) {
    std::vector<Sector> out;
    if (f == Family::FixedEnds) {
        Sector s;
        double q = 0.0;
        for (const auto& md : fixed_ends_spectrum(p.N, p.M)) {
            s.eigenvalues.push_back(md.energy);
            q = std::max(q, fixed_ends_quantization_residual(md.ks));
        }
        std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
        s.residuals["max_quantization_residual"] = q;
        out.push_back(std::move(s));
        return out;
    }
    if (f != Family::Torus11) throw UsageError("method bethe covers the fixed and t11 families");
    if (c.b && (*c.b < 0 || *c.b >= p.n)) throw DimensionError("momentum b must lie in [0, n)");
    std::vector<int> as;
    if (c.a) {
        if (*c.a < 0 || *c.a >= p.m) throw DimensionError("sector a must lie in [0, m)");
        as.push_back(*c.a);
    } else {
        for (int a = 0; a < p.m; ++a) as.push_back(a);
    }
    for (int a : as) {
        Sector s;
        s.a = a;
        s.b = c.b;
        double r = 0.0;
        for (const auto& sol : torus11_solutions(p.m, p.n, a)) {
            if (c.b && torus11_momentum_label(sol, p.m, p.n) != *c.b) continue;
            s.eigenvalues.push_back(sol.energy);
            r = std::max(r, bethe_residual(sol, p.m, p.n));
        }
        std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
        s.residuals["max_bethe_residual"] = r;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sector> spectrum_secular(Family f, const FamilyParams& p, const RunConfig& c) {
    if (f != Family::Torus12) throw UsageError("method secular covers the t12 family only");
    const auto [blo, bhi] = secular_b_range(p.m, p.n);
    std::vector<std::pair<int, int>> labels;
    for (int a = 0; a < p.m; ++a) {
        if (c.a && *c.a != a) continue;
        for (int b = blo; b <= bhi; ++b)
            if (!c.b || *c.b == b) labels.push_back({a, b});
    }
    if (labels.empty()) throw DimensionError("no secular sector matches the requested labels");
    std::vector<Sector> out;
    for (auto [a, b] : labels) {
        const SecularProblem P(p.m, p.n, a, b);
        const RootScan scan = find_roots(P);
        Sector s;
        s.a = a;
        s.b = b;
        double det = 0.0, nul = 0.0;
        for (const auto& sol : scan.solutions) {
            s.eigenvalues.push_back(sol.E);
            det = std::max(det, sol.residual);
            nul = std::max(nul, sol.null_residual);
        }
        s.residuals["max_det"] = det;
        s.residuals["max_null_residual"] = nul;
        s.residuals["momentum_label"] = secular_momentum_label(p.m, p.n, a, b);
        s.residuals["warnings"] = scan.warnings;
        out.push_back(std::move(s));
    }
    return out;
}

int cmd_spectrum(const RunConfig& c, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const Family f = parse_family(c.family);
    const FamilyParams p = family_params(c, true);
    if (!c.export_path.empty() && c.method != "brute") throw UsageError("--export-matrix needs --method brute");
    std::vector<Sector> sectors;
    if (c.method == "brute")
        sectors = spectrum_brute(f, p, c);
    else if (c.method == "bethe")
        sectors = spectrum_bethe(f, p, c);
    else if (c.method == "secular")
        sectors = spectrum_secular(f, p, c);
    else
        throw UsageError("unknown method '" + c.method + "'");
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (c.format == "csv") {
        out << "a,b,index,eigenvalue\n";
        for (const auto& s : sectors)
            for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
                out << (s.a ? std::to_string(*s.a) : "") << "," << (s.b ? std::to_string(*s.b) : "") << "," << i
                    << "," << fmt17(s.eigenvalues[i]) << "\n";
        return 0;
    }
    json j;
    j["family"] = c.family;
    j["params"] = params_json(f, p);
    j["method"] = c.method;
    j["sectors"] = json::array();
    for (const auto& s : sectors) {
        json e;
        e["a"] = opt_int(s.a);
        e["b"] = opt_int(s.b);
        json ev = json::array();
        for (double x : s.eigenvalues) ev.push_back(clean(x));
        e["eigenvalues"] = ev;
        e["residuals"] = s.residuals;
        j["sectors"].push_back(e);
    }
    j["timing_ms"] = c.timing ? json(ms) : json(nullptr);
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyOptions vo;
    vo.inject_fault = c.inject_fault;
    vo.cap = c.cap;
    std::vector<CheckResult> checks;
    json params = json::object();
    if (c.family.empty()) {
        if (c.N || c.M || c.m || c.n) throw UsageError("size parameters need --family");
        checks = verify_default(vo);
    } else {
        const Family f = parse_family(c.family);
        const FamilyParams p = family_params(c, false);
        params = params_json(f, p);
        if (f == Family::FixedEnds)
            checks = verify_fixed(p.N, p.M, vo);
        else if (f == Family::Torus11)
            checks = verify_t11(p.m, p.n, vo);
        else
            checks = verify_t12(p.m, p.n, vo);
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = all_passed(checks);
    json j;
    j["family"] = c.family.empty() ? json("all") : json(c.family);
    j["params"] = params;
    j["inject_fault"] = c.inject_fault;
    j["checks"] = json::array();
    for (const auto& ch : checks)
        j["checks"].push_back(
            {{"name", ch.name}, {"passed", ch.passed}, {"measured", ch.measured}, {"threshold", ch.threshold},
             {"informational", ch.informational}});
    j["passed"] = ok;
    j["timing_ms"] = c.timing ? json(ms) : json(nullptr);
    out << j.dump(2) << "\n";
    return ok ? 0 : 1;
}

int cmd_colouring(const RunConfig& c, std::ostream& out) {
    const auto [spec, col] = read_colouring_file(c.colouring_file);
    json j;
    j["m"] = spec.m;
    j["n"] = spec.n;
    j["topology"] = spec.topology == Topology::Torus ? "torus" : "strip";
    j["coloured_edges"] = col.coloured_count();
    const bool ice = check_ice_condition(col, spec);
    j["ice"] = ice;
    if (ice) {
        const int strings = count_strings(col, spec);
        j["strings"] = strings;
        if (spec.topology == Topology::Torus && strings == 1) {
            const WindingClass w = winding_class(col, spec);
            j["winding"] = {{"mbar", w.mbar}, {"nbar", w.nbar}};
        } else {
            j["winding"] = nullptr;
        }
        j["moves"] = apply_colouring(col, spec).size();
    }
    out << j.dump(2) << "\n";
    return 0;
}

std::size_t env_cap() {
    const char* v = std::getenv("STRINGS_MAX_BASIS");
    if (!v || !*v) return kDefaultBasisCap;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v, &end, 10);
    if (*end != '\0' || x == 0) throw UsageError("STRINGS_MAX_BASIS must be a positive integer");
    return static_cast<std::size_t>(x);
}

void add_family_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--family", c.family, "fixed, t11 or t12")->check(CLI::IsMember({"fixed", "t11", "t12"}));
    sub->add_option("--N", c.N, "fixed ends: columns");
    sub->add_option("--M", c.M, "fixed ends: rows");
    sub->add_option("--m", c.m, "torus rows");
    sub->add_option("--n", c.n, "torus columns");
    sub->add_option("--cap", c.cap, "basis size cap (default STRINGS_MAX_BASIS or 1000000)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"String states of the ice-rule lattice Hamiltonian"};
    app.require_subcommand(1);

    auto* en = app.add_subcommand("enumerate", "basis size and states");
    add_family_options(en, c);
    en->add_flag("--list", c.list, "print every state");

    auto* sp = app.add_subcommand("spectrum", "eigenvalues per sector");
    add_family_options(sp, c);
    sp->add_option("--method", c.method, "brute, bethe or secular")->check(CLI::IsMember({"brute", "bethe", "secular"}));
    sp->add_option("--a", c.a, "vertical sector a");
    sp->add_option("--b", c.b, "momentum label (t11: [0,n); t12: secular b)");
    sp->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sp->add_option("--export-matrix", c.export_path, "write the block(s) as 'i j re im' lines");
    sp->add_option("--dense-cap", c.dense_cap, "largest block handed to the dense solver");
    sp->add_option("--degeneracy-tol", c.degeneracy_tol, "relative tolerance for grouping eigenvalues");
    sp->add_flag("--timing", c.timing, "report wall time");

    auto* ve = app.add_subcommand("verify", "run the invariant suites");
    add_family_options(ve, c);
    ve->add_flag("--inject-fault", c.inject_fault, "flip the lambda_1 = 1 relabelling phase");
    ve->add_flag("--timing", c.timing, "report wall time");

    auto* co = app.add_subcommand("colouring", "inspect an edge colouring file");
    co->add_option("--file", c.colouring_file, "colouring JSON")->required();

    try {
        c.cap = env_cap();
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (en->parsed()) return cmd_enumerate(c, out);
        if (sp->parsed()) return cmd_spectrum(c, out);
        if (ve->parsed()) return cmd_verify(c, out);
        if (co->parsed()) return cmd_colouring(c, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        err << "capacity: " << e.what() << "\n";
        return 3;
    } catch (const PoleGuardError& e) {
        err << "numerical guard: " << e.what() << "\n";
        return 4;
    } catch (const InvalidOperatorError& e) {
        err << "numerical guard: " << e.what() << "\n";
        return 4;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidStateError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace icestr
