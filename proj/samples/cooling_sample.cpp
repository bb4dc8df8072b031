// Minimal library usage: synthesize the fastest protocol for a few compression
// ratios and print the switching structure.

#include <cstdio>

#include "qpo/qpo.hpp"

int main()
{
    for (double gamma : {2.0, 10.0, 100.0}) {
        const auto prob = qpo::NormalizedProblem::from_gamma(gamma);
        const auto syn = qpo::synthesize_optimal(prob);
        std::printf("gamma %-6g n=%d branch %s s=%.10f time %.10f endpoint error %.2e\n", gamma, syn.optimal.n,
                    qpo::to_string(syn.optimal.branch), syn.optimal.s, syn.optimal.total_time, syn.endpoint_error);
        for (const auto& seg : syn.protocol.segments) std::printf("    u=%-12.6g for %.10f\n", seg.u, seg.duration);
    }
    std::printf("tau0 = %.6f\n", qpo::tau0());

    const auto prob = qpo::NormalizedProblem::from_gamma(5.0);
    const auto brute = qpo::brute_force_min_time(prob, 1, 1e-6);
    std::printf("brute force gamma 5, n=1: %.10f\n", brute.total_time);
}
