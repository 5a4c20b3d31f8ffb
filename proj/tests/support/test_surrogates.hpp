#pragma once

#include <functional>

#include "xferbo/surrogate.hpp"

/// Deterministic surrogate from closed-form mean and sd functions.
class FunctionSurrogate final : public xferbo::Surrogate {
public:
    using Fn = std::function<double(const Eigen::VectorXd&)>;

    FunctionSurrogate(std::size_t dim, Fn mean, Fn sd = [](const Eigen::VectorXd&) { return 0.1; })
        : dim_(dim), mean_(std::move(mean)), sd_(std::move(sd)) {}

    xferbo::Prediction predict(const Eigen::VectorXd& x) const override { return {mean_(x), sd_(x)}; }
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    Fn mean_, sd_;
};
