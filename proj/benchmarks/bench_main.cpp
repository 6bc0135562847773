#include <benchmark/benchmark.h>

#include <random>

#include "clk/conditions.hpp"
#include "clk/domain.hpp"
#include "clk/kernels.hpp"
#include "clk/operators.hpp"
#include "clk/quadrature.hpp"

using namespace clk;

namespace {

DomainPtr ball2() {
    DomainSpec s;
    s.kind = DomainSpec::Kind::Ball;
    s.n = 2;
    s.radius = 1.0;
    return make_domain(s);
}

void BM_KernelOmega0(benchmark::State& state) {
    auto dom = ball2();
    KernelEvaluator ev(2, dom->r());
    CPoint z{{0.3, 0.1}, {-0.2, 0.25}};
    CPoint zeta{{0.9, 0.2}, {0.4, -0.1}};
    CVector out;
    for (auto _ : state) {
        ev.eval(KernelKind::Omega0, 0, z, zeta, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_KernelOmega0);

void BM_KernelOmega01(benchmark::State& state) {
    auto dom = ball2();
    KernelEvaluator ev(2, dom->r());
    CPoint z{{0.3, 0.1}, {-0.2, 0.25}};
    CPoint zeta{{1.02, 0.2}, {0.4, -0.1}};
    CVector out;
    for (auto _ : state) {
        ev.eval(KernelKind::Omega01, 0, z, zeta, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_KernelOmega01);

void BM_BoundaryLerayIntegral(benchmark::State& state) {
    auto dom = ball2();
    int N = static_cast<int>(state.range(0));
    BoundaryRule rule = build_boundary_rule(*dom, N);
    KernelEvaluator ev(2, dom->r());
    FormField phi = scalar_field(2, [](const CPoint& p) { return p[0] * p[1]; });
    auto values = evaluate_at_nodes(phi, rule);
    CPoint z{{0.3, 0.1}, {-0.2, 0.25}};
    for (auto _ : state) {
        auto res = integrate_kernel_boundary_cached(rule, ev, KernelKind::Omega1, 0, values, 0, z);
        benchmark::DoNotOptimize(res.value[0]);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rule.nodes.size()));
}
BENCHMARK(BM_BoundaryLerayIntegral)->Arg(16)->Arg(32);

void BM_ConditionQuotients(benchmark::State& state) {
    auto dom = ball2();
    SamplerConfig cfg;
    cfg.boundary_samples = 60;
    cfg.interior_samples = 60;
    cfg.collar_samples = 60;
    cfg.diagonal_depth = 3;
    cfg.seed = 9;
    for (auto _ : state) {
        ConditionReport rep = estimate_condition(*dom, ConditionTag::C0, cfg);
        benchmark::DoNotOptimize(rep.infimum);
    }
}
BENCHMARK(BM_ConditionQuotients);

void BM_ApplyT1(benchmark::State& state) {
    auto dom = ball2();
    static OperatorRules rules = make_operator_rules(*dom, 16, 12, 0.3, 1e-3);
    static HomotopyContext ctx(dom, rules);
    FormField phi;
    phi.n = 2;
    phi.q = 1;
    phi.eval = [](const CPoint& p) {
        FormValue v(2, 1);
        v[0] = p[1];
        return v;
    };
    auto cache = ctx.cache(phi, zero_field(2, 2));
    CPoint z{{0.2, 0.1}, {-0.15, 0.1}};
    for (auto _ : state) {
        FormValue v = ctx.apply_T_point(1, cache, z, nullptr);
        benchmark::DoNotOptimize(v[0]);
    }
}
BENCHMARK(BM_ApplyT1);

}  // namespace

BENCHMARK_MAIN();
