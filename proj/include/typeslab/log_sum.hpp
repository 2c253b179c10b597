#pragma once

#include <cmath>
#include <limits>

namespace typeslab {

// Streaming log-sum-exp. Keeps a running maximum and rescales the
// compensated partial sum when a larger term arrives, so the result is
// stable for terms spanning hundreds of orders of magnitude.
class LogSumAccumulator {
public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term <= max_) {
            kahan_add(std::exp(log_term - max_));
            return;
        }
        if (max_ != -std::numeric_limits<double>::infinity()) {
            double scale = std::exp(max_ - log_term);
            sum_ *= scale;
            comp_ *= scale;
        }
        max_ = log_term;
        kahan_add(1.0);
    }

    bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }

    // log of the accumulated sum; -inf when nothing positive was added.
    double log_total() const {
        if (empty()) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    void kahan_add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0;
    double comp_ = 0;
};

}  // namespace typeslab
