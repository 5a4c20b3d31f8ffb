#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace xferbo {

struct Prediction {
    double mean = 0.0;
    double sd = 0.0;
};

/// Anything that predicts a mean and standard deviation at a raw (un-normalized) input.
class Surrogate {
public:
    virtual ~Surrogate() = default;
    virtual Prediction predict(const Eigen::VectorXd& x) const = 0;
    virtual std::size_t dim() const = 0;
};

} // namespace xferbo
