#pragma once

#include <vector>

#include "egret/field.hpp"

namespace egret {

/// Wick-type contraction of factors between different groups of a product
/// of graph terms. Each contracted pair (factor d^a phi at x in an earlier
/// group, d^b phi at y in a later one) becomes the edge (-1)^{|b|} d^{a+b}K(x-y).
struct ContractionRule {
  Kernel kernel = Kernel::H;
  bool hbar_per_edge = true;
  int min_edges = 0;
  int max_edges = 1 << 20;
};

/// Sum over all contraction patterns of the disjoint union of the groups,
/// with coefficient prod(coef) * (number of factor matchings) * hbar^edges.
Field contract(const Backend& b, const std::vector<const GraphTerm*>& groups, const ContractionRule& rule);

/// F star G with the backend's two-point function H.
Field star(const Field& f, const Field& g);
/// Product of several fields, left to right.
Field star(const std::vector<Field>& fs);
Field star_commutator(const Field& f, const Field& g);
/// {F, G} = int dF/dphi(x) Delta(x - y) dG/dphi(y).
Field poisson_bracket(const Field& f, const Field& g);

}  // namespace egret
