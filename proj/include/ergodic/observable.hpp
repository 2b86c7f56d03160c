#pragma once

#include <memory>
#include <string>

#include "ergodic/map1d.hpp"

namespace ergodic {

// Declarative observables for Birkhoff averaging.  Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := number | 'x' | 'y' | 'logderiv' | 'ind(a,b)' | '(' expr ')'
// 'logderiv' is log|f'(x)| of the map being averaged (1D only);
// 'ind(a,b)' is the indicator of [a,b).
class Observable {
  public:
    static Observable parse(const std::string& text);
    double eval(double x, double y, const Map1D* map) const;
    const std::string& text() const { return text_; }

    struct Node;

  private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

} // namespace ergodic
