#include <benchmark/benchmark.h>

#include <random>

#include "glmminimax/bound.hpp"
#include "glmminimax/estimate.hpp"
#include "glmminimax/risk.hpp"
#include "glmminimax/verify.hpp"

namespace {

using namespace glmminimax;

Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index d, double scale, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = scale * n01(gen);
        }
    }
    return m;
}

void BM_DesignSvd(benchmark::State& state) {
    const Eigen::Index d = state.range(0);
    const Eigen::MatrixXd m = gaussian_matrix(2 * d, d, 1.0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(DesignSpec(m).trace_inv_gram());
    }
}
BENCHMARK(BM_DesignSvd)->RangeMultiplier(4)->Range(4, 256);

void BM_MinimaxBound(benchmark::State& state) {
    const DesignSpec design(gaussian_matrix(64, 16, 0.2, 2));
    const GlmFamily family = GlmFamily::poisson(design.radius());
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimax_lower_bound(design, family).bound_value);
    }
}
BENCHMARK(BM_MinimaxBound);

void BM_IntervalAllocation(benchmark::State& state) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    Eigen::VectorXd a(state.range(0));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a(i) = u(gen);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(allocate_interval_lengths(a).payoff);
    }
}
BENCHMARK(BM_IntervalAllocation)->Arg(10)->Arg(1000);

void BM_IrlsFit(benchmark::State& state) {
    const DesignSpec design(gaussian_matrix(state.range(0), 5, 0.3, 4));
    const GlmModel model(design, GlmFamily::bernoulli());
    const Eigen::VectorXd x = sample(model, Eigen::VectorXd::Constant(5, 0.3), 9);
    const EstimatorConfig config = default_estimator(model.family());
    for (auto _ : state) {
        benchmark::DoNotOptimize(irls_mle(model, x, config));
    }
}
BENCHMARK(BM_IrlsFit)->Arg(50)->Arg(500);

void BM_GaussianRisk(benchmark::State& state) {
    const GlmModel model(DesignSpec(Eigen::MatrixXd::Identity(10, 10)), GlmFamily::gaussian(1.0, 0.01));
    MonteCarloOptions options;
    options.trials = 10000;
    options.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(risk_at(model, Eigen::VectorXd::Zero(10), EstimatorConfig{}, options).mean_sq_error);
    }
}
BENCHMARK(BM_GaussianRisk)->Unit(benchmark::kMillisecond);

void BM_ScalarMutualInformation(benchmark::State& state) {
    const GlmFamily family = GlmFamily::gaussian(1.0, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mutual_information_1d(family, 2.0, 1.5));
    }
}
BENCHMARK(BM_ScalarMutualInformation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
