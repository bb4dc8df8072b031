#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qpo/dynamics.hpp"

namespace qpo_test {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Fixed seed: failures must reproduce.
inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(0x5eed2025u);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

// Physical parameters whose initial energy is exactly 1 at omega_h = 1:
// coth(1/(2T)) = 2  =>  T = 1 / (2 atanh(1/2)).
inline qpo::PhysicalParams unit_energy_params(double omega_c = 0.25)
{
    return {omega_c, 1.0, 1.0 / (2.0 * std::atanh(0.5))};
}

}  // namespace qpo_test
