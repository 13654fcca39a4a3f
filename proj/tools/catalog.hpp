#pragma once

// The six named hybrid structures used throughout the sensitivity study,
// indexed by (n2, n1): 1:(1,2) 2:(2,2) 3:(1,3) 4:(4,2) 5:(1,5) 6:(2,3).
// Dimensions follow n = (n1-1)*n2 + 1, giving 2, 3, 3, 5, 5, 5.

#include <array>
#include <stdexcept>

#include <json.hpp>

namespace cli {

struct CatalogEntry {
  int id;
  int n2;
  int n1;
  int dim;
};

inline constexpr std::array<CatalogEntry, 6> kCatalog{{
    {1, 1, 2, 2},
    {2, 2, 2, 3},
    {3, 1, 3, 3},
    {4, 4, 2, 5},
    {5, 1, 5, 5},
    {6, 2, 3, 5},
}};

static_assert([] {
  for (const auto& e : kCatalog)
    if ((e.n1 - 1) * e.n2 + 1 != e.dim) return false;
  return true;
}());

inline const CatalogEntry& catalog_entry(int id) {
  if (id < 1 || id > 6) throw std::out_of_range("catalog id must be 1..6");
  return kCatalog[static_cast<std::size_t>(id - 1)];
}

inline nlohmann::json catalog_model(int id, double mu, double a, double b) {
  const CatalogEntry& e = catalog_entry(id);
  nlohmann::json j;
  j["family"] = "hybrid";
  j["mu"] = mu;
  j["a"] = a;
  j["b"] = b;  // scalar broadcast over all blocks
  j["n1"] = e.n1;
  j["n2"] = e.n2;
  return j;
}

}  // namespace cli
