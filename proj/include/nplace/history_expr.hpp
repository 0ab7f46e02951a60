#pragma once

// A closed grammar for initial functions on [-tau, 0]:
//
//     expr    := term (('+' | '-') term)*
//     term    := unary (('*' | '/') unary)*
//     unary   := ('-' | '+') unary | primary
//     primary := number | 't' | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//
// Expressions are evaluated with forward-mode dual numbers, so the history
// derivative is exact rather than a finite difference.

#include <memory>
#include <string>

namespace nplace {

class HistoryExpr {
public:
    /// Throws InvalidArgument with the offending column on a grammar violation.
    static HistoryExpr parse(const std::string& text);

    [[nodiscard]] double value(double t) const;
    [[nodiscard]] double derivative(double t) const;
    [[nodiscard]] const std::string& source() const { return source_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

}  // namespace nplace
