#pragma once

#include <string>
#include <vector>

#include "typeslab/rational.hpp"

namespace typeslab {

// Probability mass function over m letters. Carries either exact rational
// weights (with a cached double view) or plain doubles. Exactness is sticky:
// operations that cannot preserve it must go through the double view.
class Pmf {
public:
    Pmf() = default;

    // Exact weights; must be >= 0 and sum to 1 exactly.
    static Pmf exact(std::vector<Rational> w);

    // Float weights; must be >= 0 and sum to 1 within 1e-12.
    static Pmf from_doubles(std::vector<double> w);

    // Uniform exact pmf on m letters.
    static Pmf uniform(int m);

    bool is_exact() const { return !exact_.empty(); }
    int size() const { return static_cast<int>(values_.size()); }

    double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return values_; }

    const Rational& exact_value(int i) const;
    const std::vector<Rational>& exact_values() const;

    bool strictly_positive() const;
    int support_size() const;

    // Snaps each coordinate to the best rational within tol (denominator cap),
    // fixing the last free coordinate so the result sums to 1 exactly.
    // Returns an exact pmf, or an empty optional-like failure via the bool.
    bool rationalize(double tol, Pmf* out) const;

    std::string to_string() const;

private:
    std::vector<double> values_;
    std::vector<Rational> exact_;
};

}  // namespace typeslab
