#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "clk/types.hpp"

namespace clk {

/// Point set for seminorm estimation: pairs stratified by separation over
/// geometric scales 2^-1 .. 2^-14 of the region diameter (Holder quotients
/// bind at small scales; uniform sampling misses them).
struct PairSampler {
    int dim = 1;                       // real dimension of the sample space
    std::vector<double> lower, upper;  // bounding box
    std::function<bool(const std::vector<double>&)> inside;  // optional membership
    std::size_t count = 20000;
    std::uint64_t seed = 1;
    int min_scale_log2 = 0;  // include full-diameter pairs: calibration suprema sit there
    int max_scale_log2 = 14;
};

std::vector<std::pair<std::vector<double>, std::vector<double>>> sample_pairs(const PairSampler& sampler);

/// A complex- (or vector-) valued function of a real point; the seminorm uses
/// the Euclidean norm of value differences.
using SampledFunction = std::function<CVector(const std::vector<double>&)>;

struct HolderEstimate {
    double exponent = 0.0;
    double seminorm = 0.0;  // max over sampled pairs; a lower bound of the truth
    std::size_t pair_count = 0;
    std::vector<double> arg_x, arg_y;  // attaining pair
};

/// Sampled Holder seminorm: k = floor(a) in {0, 1}; for k = 1 the first central
/// differences (step fd_step) replace the derivatives. a must avoid integers.
HolderEstimate holder_seminorm(const SampledFunction& f, double a, const PairSampler& sampler,
                               double fd_step = 1e-4);

/// Sup-norm estimate over the sampler's points (the a = 0 endpoint of gain reports).
double sup_norm_estimate(const SampledFunction& f, const PairSampler& sampler);

struct GainReport {
    double a = 0.0;                 // data regularity (0 means C^0)
    double data_norm = 0.0;         // |phi|_{Lambda^a} (or sup norm when a = 0)
    double solution_seminorm = 0.0; // |u|_{Lambda^{a+1/2}}
    double ratio = 0.0;             // solution_seminorm / data_norm; 0 for zero data
    std::size_t pair_count = 0;
    std::vector<double> arg_x, arg_y;
};

/// Ratio |u|_{a+1/2} / |phi|_a over sampled pairs. Requires a + 1/2 < 2 and
/// a + 1/2 not an integer (the Zygmund case is out of the estimator's range).
GainReport gain_report(const SampledFunction& phi, const SampledFunction& u, double a,
                       const PairSampler& sampler, double fd_step = 1e-4);

}  // namespace clk
