#include "oracles.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace bdbridge::testing {

std::vector<double> transition_row(const BirthDeathModel& model, int i, double t, int max_state) {
    const int n = max_state + 1;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int y = 0; y < n; ++y) {
        if (!model.in_state_space(y)) {
            continue;
        }
        const Rates r = model.rates(y);
        if (y + 1 < n && model.in_state_space(y + 1)) {
            q(y, y + 1) = r.birth;
            q(y, y) -= r.birth;
        }
        if (y > 0) {
            q(y, y - 1) = r.death;
            q(y, y) -= r.death;
        }
    }
    const Eigen::MatrixXd p = (q * t).exp();
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int y = 0; y < n; ++y) {
        row[static_cast<std::size_t>(y)] = p(i, y);
    }
    return row;
}

double transition_with_ups(const BirthDeathModel& model, int i, int j, double t, int ups) {
    // States (y, b) with b = 0..ups upward jumps so far; a jump beyond `ups`
    // leaves the tracked set. y <= i + b always.
    const int max_y = i + ups;
    const int width = max_y + 1;
    const int n = width * (ups + 1);
    auto index = [width](int y, int b) { return b * width + y; };
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b <= ups; ++b) {
        for (int y = 0; y <= max_y; ++y) {
            if (!model.in_state_space(y)) {
                continue;
            }
            const Rates r = model.rates(y, b);
            const int from = index(y, b);
            q(from, from) -= r.total();
            if (b < ups && model.in_state_space(y + 1) && y + 1 <= max_y) {
                q(from, index(y + 1, b + 1)) += r.birth;
            }
            if (y > 0) {
                q(from, index(y - 1, b)) += r.death;
            }
        }
    }
    const Eigen::MatrixXd p = (q * t).exp();
    if (j < 0 || j > max_y) {
        return 0.0;
    }
    return p(index(i, 0), index(j, ups));
}

}  // namespace bdbridge::testing
