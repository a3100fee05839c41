#pragma once

#include "flrd/curves.hpp"
#include "flrd/spline_basis.hpp"

#include <cstdint>
#include <random>

namespace flrd {

/// Fixed pseudo-random stream: std::mt19937_64 (whose integer sequence is
/// pinned by the standard) with an explicit, frozen mapping to doubles, so
/// the same seed reproduces the same dataset wherever IEEE arithmetic
/// behaves identically. Standard-library distributions are deliberately
/// not used; their output is implementation-defined.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : gen_(seed) {}

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0, 1)

    /// Uniform on [-sqrt(3), sqrt(3)), unit variance and bounded.
    double bounded_score();

    /// Box-Muller; consumes exactly two draws.
    double gaussian();

private:
    std::mt19937_64 gen_;
};

/// Karhunen-Loeve design for the synthetic model: spectrum of Gamma along
/// the orthonormalized basis directions, fixed truth, bounded scores.
struct SyntheticSpec {
    Eigen::Index n = 0;
    Eigen::VectorXd eigenvalues;  // strictly positive, non-increasing
    Curve true_phi;               // on the W basis
    Curve true_psi;               // on the derivative basis
    double sigma_eps = 0.0;
    std::uint64_t seed = 0;
};

struct SimulatedData {
    FunctionalDataset dataset;
    Eigen::VectorXd oracle;  // y* = y - eps, the best possible prediction
};

SimulatedData generate(const SyntheticSpec& spec, const GramPair& grams);

}  // namespace flrd
