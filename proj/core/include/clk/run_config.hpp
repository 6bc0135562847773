#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clk/conditions.hpp"
#include "clk/domain.hpp"

namespace clk {

struct ResolutionConfig {
    int boundary_n = 24;
    int volume_n = 16;
    double exclusion_radius = 0.15;
    double fd_step = 1e-3;
    std::vector<int> ladder;  // boundary resolutions for verify; empty = {16, 32}
};

struct DataConfig {
    int q = 0;
    std::map<std::string, std::string> coefficients;
    std::map<std::string, std::string> dbar_coefficients;  // optional exact dbar phi
};

struct OperatorConfig {
    std::string tag = "T";  // "T" | "H" | "H0"
    int q = 1;
};

struct ProbeConfig {
    int count = 10;
    std::uint64_t seed = 1;
};

struct HolderConfig {
    std::vector<double> exponents = {0.3, 0.5, 0.7};
    std::size_t pair_count = 20000;
};

struct ExperimentConfig {
    int dimension = 1;
    DomainSpec domain;
    DataConfig data;
    OperatorConfig op;
    ResolutionConfig resolutions;
    ProbeConfig probes;
    SamplerConfig condition_sampler;
    HolderConfig holder;
    std::string output_dir = "out";

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string echo_json() const;  // canonical echo embedded in reports
};

struct CheckResult {
    std::string name;
    std::string status;  // "pass" | "fail" | "skip"
    double value = 0.0;
    double threshold = 0.0;
    std::string details;
};

struct RunReport {
    std::string command;
    std::string config_echo;
    std::string fingerprint;
    std::vector<CheckResult> checks;

    bool all_passed() const;
    void add(const std::string& name, bool pass, double value, double threshold,
             const std::string& details = "");
    void skip(const std::string& name, const std::string& why);
    std::string to_json() const;
    void print_summary(std::ostream& os) const;
};

std::string version_fingerprint();

/// Deterministic interior probe set (strictly inside, margin-aware).
std::vector<CPoint> sample_probes(const Domain& dom, int count, std::uint64_t seed, double radial_lo = 0.2,
                                  double radial_hi = 0.75);

}  // namespace clk
