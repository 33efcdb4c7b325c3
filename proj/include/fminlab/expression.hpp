#pragma once

#include "fminlab/jet.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fminlab {

// Arithmetic expression over named variables: numbers, + - * / ^, parentheses
// and sin cos exp log sqrt. Evaluated in jet arithmetic.
class Expression {
public:
    static Expression parse(std::string_view source);

    // lookup(name) returns the jet bound to a variable; unknown names should throw.
    Jet eval(const JetLayout& layout, const std::function<Jet(const std::string&)>& lookup) const;
    double eval(const std::function<double(const std::string&)>& lookup) const;

    const std::string& source() const { return source_; }
    std::vector<std::string> variables() const;

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

} // namespace fminlab
