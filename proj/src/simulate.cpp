#include "simulate.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace steinlab {

namespace {

double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

ProbVec simulate_occupation(const Generator& gen, std::uint64_t steps, std::uint64_t seed) {
    if (steps < 10) fail(ErrorCode::invalid_argument, "need at least 10 jumps");
    if (!gen.irreducible)
        fail(ErrorCode::reducible, "occupation times of a reducible chain depend on the start state");
    const std::size_t n = gen.size();
    if (n == 1) return ProbVec{gen.space, Eigen::VectorXd::Ones(1)};

    // Flatten outgoing rates per state; q is column-major so walk the
    // transpose's columns, i.e. collect entries by row.
    std::vector<std::vector<std::pair<std::size_t, double>>> out(n);
    for (int col = 0; col < gen.q.outerSize(); ++col)
        for (SpMat::InnerIterator it(gen.q, col); it; ++it)
            if (it.row() != it.col())
                out[static_cast<std::size_t>(it.row())].emplace_back(
                    static_cast<std::size_t>(col), it.value());
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, r] : out[i]) total[i] += r;

    std::mt19937_64 rng(seed);
    Eigen::VectorXd occ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const std::uint64_t burn = steps / 10;
    std::size_t x = 0;
    for (std::uint64_t step = 0; step < steps; ++step) {
        const double rate = total[x];
        const double dt = -std::log1p(-to_unit(rng())) / rate;
        if (step >= burn) occ[static_cast<Eigen::Index>(x)] += dt;
        double pick = to_unit(rng()) * rate;
        std::size_t next = out[x].back().first;
        for (const auto& [j, r] : out[x]) {
            pick -= r;
            if (pick < 0.0) {
                next = j;
                break;
            }
        }
        x = next;
    }
    occ /= occ.sum();
    return ProbVec{gen.space, std::move(occ)};
}

}  // namespace steinlab
