#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "typeslab/rational.hpp"

namespace typeslab {

// Finite alphabet: distinct labels, optionally with a numeric value per
// letter (needed for mean/moment constraints).
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<std::string> labels,
                      std::vector<Rational> values = {})
        : labels_(std::move(labels)), values_(std::move(values)) {
        if (labels_.empty()) throw std::invalid_argument("alphabet: needs at least one label");
        if (!values_.empty() && values_.size() != labels_.size())
            throw std::invalid_argument("alphabet: values/labels size mismatch");
        for (std::size_t i = 0; i < labels_.size(); ++i)
            for (std::size_t j = i + 1; j < labels_.size(); ++j)
                if (labels_[i] == labels_[j])
                    throw std::invalid_argument("alphabet: duplicate label '" + labels_[i] + "'");
    }

    int size() const { return static_cast<int>(labels_.size()); }
    bool has_values() const { return !values_.empty(); }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }

    const std::vector<Rational>& values() const {
        if (values_.empty()) throw std::logic_error("alphabet: no numeric values attached");
        return values_;
    }
    const Rational& value(int i) const { return values().at(static_cast<std::size_t>(i)); }

    std::optional<int> index_of(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return static_cast<int>(i);
        return std::nullopt;
    }

private:
    std::vector<std::string> labels_;
    std::vector<Rational> values_;
};

}  // namespace typeslab
