#include "xferbo/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace xferbo {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& options) {
    const Eigen::Index n = start.size();
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), start);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    vals[0] = eval(start);
    if (n == 0) return {start, vals[0], evals};
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& p = pts[static_cast<std::size_t>(i + 1)];
        p(i) += options.initial_step;
        vals[static_cast<std::size_t>(i + 1)] = eval(p);
    }

    std::vector<std::size_t> order(pts.size());
    constexpr double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;
    while (evals < options.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // stable: ties keep the earlier vertex first
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        double diameter = 0.0;
        for (std::size_t i = 1; i < order.size(); ++i)
            diameter = std::max(diameter, (pts[order[i]] - pts[best]).lpNorm<Eigen::Infinity>());
        const double spread = vals[worst] - vals[best];
        if (std::isfinite(spread) && spread <= options.f_tolerance && diameter <= options.x_tolerance) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + reflect * (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            if (evals >= options.max_evaluations) {
                pts[worst] = xr;
                vals[worst] = fr;
                break;
            }
            const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        if (evals >= options.max_evaluations) {
            if (outside) {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            break;
        }
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                                           : Eigen::VectorXd(centroid + contract * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        if (evals + n > options.max_evaluations) break;
        for (std::size_t i = 1; i < order.size(); ++i) {
            auto& p = pts[order[i]];
            p = pts[best] + shrink * (p - pts[best]);
            vals[order[i]] = eval(p);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] < vals[best]) best = i;
    return {pts[best], vals[best], evals};
}

} // namespace xferbo
