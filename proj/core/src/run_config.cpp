#include "clk/run_config.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "clk/errors.hpp"
#include "clk/rng.hpp"

namespace clk {

using nlohmann::json;

namespace {

DomainSpec domain_from_json(const json& j, int n) {
    DomainSpec spec;
    spec.n = n;
    std::string kind = j.value("kind", "ball");
    if (kind == "ball") {
        spec.kind = DomainSpec::Kind::Ball;
        spec.radius = j.value("radius", 1.0);
    } else if (kind == "ellipsoid") {
        spec.kind = DomainSpec::Kind::Ellipsoid;
        spec.semi_axes = j.at("semi_axes").get<std::vector<double>>();
    } else if (kind == "power") {
        spec.kind = DomainSpec::Kind::Power;
        spec.exponents = j.at("exponents").get<std::vector<double>>();
        spec.level = j.value("level", 1.0);
    } else if (kind == "limacon") {
        spec.kind = DomainSpec::Kind::Limacon;
        spec.limacon_b = j.value("b", 0.5);
    } else {
        throw ConfigError("unknown domain kind '" + kind + "'");
    }
    return spec;
}

json domain_to_json(const DomainSpec& spec) {
    json j;
    switch (spec.kind) {
        case DomainSpec::Kind::Ball:
            j["kind"] = "ball";
            j["radius"] = spec.radius;
            break;
        case DomainSpec::Kind::Ellipsoid:
            j["kind"] = "ellipsoid";
            j["semi_axes"] = spec.semi_axes;
            break;
        case DomainSpec::Kind::Power:
            j["kind"] = "power";
            j["exponents"] = spec.exponents;
            j["level"] = spec.level;
            break;
        case DomainSpec::Kind::Limacon:
            j["kind"] = "limacon";
            j["b"] = spec.limacon_b;
            break;
        case DomainSpec::Kind::StarShaped:
            j["kind"] = "star";
            break;
    }
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig c;
        c.dimension = j.at("dimension").get<int>();
        if (c.dimension < 1) throw ConfigError("dimension must be >= 1");
        c.domain = domain_from_json(j.value("domain", json::object()), c.dimension);
        if (j.contains("data")) {
            c.data.q = j["data"].value("q", 0);
            if (j["data"].contains("coefficients"))
                c.data.coefficients = j["data"]["coefficients"].get<std::map<std::string, std::string>>();
            if (j["data"].contains("dbar_coefficients"))
                c.data.dbar_coefficients =
                    j["data"]["dbar_coefficients"].get<std::map<std::string, std::string>>();
        }
        if (j.contains("operator")) {
            c.op.tag = j["operator"].value("tag", "T");
            c.op.q = j["operator"].value("q", 1);
        }
        if (j.contains("resolutions")) {
            const auto& r = j["resolutions"];
            c.resolutions.boundary_n = r.value("boundary_n", c.resolutions.boundary_n);
            c.resolutions.volume_n = r.value("volume_n", c.resolutions.volume_n);
            c.resolutions.exclusion_radius = r.value("exclusion_radius", c.resolutions.exclusion_radius);
            c.resolutions.fd_step = r.value("fd_step", c.resolutions.fd_step);
            if (r.contains("ladder")) c.resolutions.ladder = r["ladder"].get<std::vector<int>>();
        }
        if (j.contains("probes")) {
            c.probes.count = j["probes"].value("count", c.probes.count);
            c.probes.seed = j["probes"].value("seed", c.probes.seed);
        }
        if (j.contains("condition_sampler")) {
            const auto& s = j["condition_sampler"];
            c.condition_sampler.boundary_samples = s.value("boundary", c.condition_sampler.boundary_samples);
            c.condition_sampler.interior_samples = s.value("interior", c.condition_sampler.interior_samples);
            c.condition_sampler.collar_samples = s.value("collar", c.condition_sampler.collar_samples);
            c.condition_sampler.diagonal_depth = s.value("diag_depth", c.condition_sampler.diagonal_depth);
            c.condition_sampler.seed = s.value("seed", c.condition_sampler.seed);
        }
        if (j.contains("holder")) {
            const auto& h = j["holder"];
            if (h.contains("exponents")) c.holder.exponents = h["exponents"].get<std::vector<double>>();
            c.holder.pair_count = h.value("pair_count", c.holder.pair_count);
        }
        c.output_dir = j.value("output_dir", c.output_dir);

        if (c.resolutions.boundary_n <= 0 || c.resolutions.volume_n <= 0 ||
            c.resolutions.exclusion_radius <= 0.0 || c.resolutions.fd_step <= 0.0)
            throw ConfigError("all resolutions must be positive");
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::echo_json() const {
    json j;
    j["dimension"] = dimension;
    j["domain"] = domain_to_json(domain);
    j["data"] = {{"q", data.q}, {"coefficients", data.coefficients}};
    if (!data.dbar_coefficients.empty()) j["data"]["dbar_coefficients"] = data.dbar_coefficients;
    j["operator"] = {{"tag", op.tag}, {"q", op.q}};
    j["resolutions"] = {{"boundary_n", resolutions.boundary_n},
                        {"volume_n", resolutions.volume_n},
                        {"exclusion_radius", resolutions.exclusion_radius},
                        {"fd_step", resolutions.fd_step},
                        {"ladder", resolutions.ladder}};
    j["probes"] = {{"count", probes.count}, {"seed", probes.seed}};
    j["condition_sampler"] = {{"boundary", condition_sampler.boundary_samples},
                              {"interior", condition_sampler.interior_samples},
                              {"collar", condition_sampler.collar_samples},
                              {"diag_depth", condition_sampler.diagonal_depth},
                              {"seed", condition_sampler.seed}};
    j["holder"] = {{"exponents", holder.exponents}, {"pair_count", holder.pair_count}};
    j["output_dir"] = output_dir;
    return j.dump(2);
}

bool RunReport::all_passed() const {
    for (const auto& c : checks)
        if (c.status == "fail") return false;
    return true;
}

void RunReport::add(const std::string& name, bool pass, double value, double threshold,
                    const std::string& details) {
    checks.push_back({name, pass ? "pass" : "fail", value, threshold, details});
}

void RunReport::skip(const std::string& name, const std::string& why) {
    checks.push_back({name, "skip", 0.0, 0.0, why});
}

std::string RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["fingerprint"] = fingerprint;
    try {
        j["config"] = json::parse(config_echo);
    } catch (const json::exception&) {
        j["config"] = config_echo;
    }
    j["checks"] = json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"status", c.status},
                               {"value", c.value},
                               {"threshold", c.threshold},
                               {"details", c.details}});
    j["all_passed"] = all_passed();
    return j.dump(2);
}

void RunReport::print_summary(std::ostream& os) const {
    for (const auto& c : checks) {
        std::string tag = c.status == "pass" ? "[PASS]" : c.status == "skip" ? "[SKIP]" : "[FAIL]";
        os << tag << " " << c.name;
        if (c.status != "skip") os << ": value=" << c.value << " threshold=" << c.threshold;
        if (!c.details.empty()) os << " (" << c.details << ")";
        os << "\n";
    }
}

std::string version_fingerprint() {
    std::ostringstream ss;
    ss << "clk 0.1.0; " <<
#if defined(__clang__)
        "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
        "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
        "unknown compiler";
#endif
    ss << "; cxx " << __cplusplus;
    return ss.str();
}

std::vector<CPoint> sample_probes(const Domain& dom, int count, std::uint64_t seed, double radial_lo,
                                  double radial_hi) {
    auto rng = make_rng(seed, "probes");
    std::uniform_real_distribution<double> U(radial_lo, radial_hi);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<CPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    int d = 2 * dom.dim();
    while (static_cast<int>(out.size()) < count) {
        RealDir w(static_cast<std::size_t>(d));
        double s = 0.0;
        for (auto& wi : w) {
            wi = N(rng);
            s += wi * wi;
        }
        if (s < 1e-12) continue;
        s = std::sqrt(s);
        for (auto& wi : w) wi /= s;
        out.push_back(Domain::point_on_ray(w, U(rng) * dom.rho(w)));
    }
    return out;
}

}  // namespace clk
