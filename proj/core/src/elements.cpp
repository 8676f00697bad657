//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/elements.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace hierflow {
namespace {
  // Covalent radii: Cordero et al. (2008); van der Waals radii: Bondi (1964).
  const std::vector<Element> &default_elements() {
    static const std::vector<Element> elements = {
      { "H", 1, 0.31, 1.20 },  { "C", 4, 0.76, 1.70 },
      { "N", 3, 0.71, 1.55 },  { "O", 2, 0.66, 1.52 },
      { "F", 1, 0.57, 1.47 },  { "P", 5, 1.07, 1.80 },
      { "S", 6, 1.05, 1.80 },  { "Cl", 1, 1.02, 1.75 },
      { "Br", 1, 1.20, 1.85 }, { "I", 1, 1.39, 1.98 },
    };
    return elements;
  }

  void check_element(const Element &e) {
    if (e.symbol.empty())
      throw std::invalid_argument("element with empty symbol");
    if (e.max_valence < 1)
      throw std::invalid_argument("element " + e.symbol
                                  + ": max_valence must be >= 1");
    if (!(e.covalent_radius > 0) || !(e.vdw_radius > 0))
      throw std::invalid_argument("element " + e.symbol
                                  + ": radii must be positive");
  }
}  // namespace

ElementTable::ElementTable(std::vector<Element> elements)
    : elements_(std::move(elements)) {
  for (size_t i = 0; i < elements_.size(); ++i) {
    check_element(elements_[i]);
    for (size_t j = 0; j < i; ++j) {
      if (elements_[j].symbol == elements_[i].symbol)
        throw std::invalid_argument("duplicate element symbol "
                                    + elements_[i].symbol);
    }
  }
}

ElementTable ElementTable::defaults() {
  return ElementTable(default_elements());
}

ElementTable ElementTable::from_json(const nlohmann::ordered_json &j,
                                     bool merge_with_defaults) {
  if (!j.is_object())
    throw std::invalid_argument("element table JSON must be an object");

  std::vector<Element> elements;
  if (merge_with_defaults)
    elements = default_elements();

  for (const auto &[symbol, entry]: j.items()) {
    Element e { symbol, entry.at("max_valence").get<int>(),
                entry.at("r_cov").get<double>(),
                entry.at("r_vdw").get<double>() };
    auto it = std::find_if(elements.begin(), elements.end(),
                           [&](const Element &x) { return x.symbol == symbol; });
    if (it != elements.end()) {
      *it = std::move(e);
    } else {
      elements.push_back(std::move(e));
    }
  }
  return ElementTable(std::move(elements));
}

ElementTable ElementTable::load(const std::filesystem::path &path,
                                bool merge_with_defaults) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open element table " + path.string());
  return from_json(nlohmann::ordered_json::parse(in), merge_with_defaults);
}

nlohmann::ordered_json ElementTable::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const Element &e: elements_) {
    j[e.symbol] = { { "max_valence", e.max_valence },
                    { "r_cov", e.covalent_radius },
                    { "r_vdw", e.vdw_radius } };
  }
  return j;
}

std::optional<int> ElementTable::find(std::string_view symbol) const {
  for (int i = 0; i < size(); ++i) {
    if (elements_[i].symbol == symbol)
      return i;
  }
  return std::nullopt;
}

int ElementTable::index_of(std::string_view symbol) const {
  auto idx = find(symbol);
  if (!idx)
    throw std::invalid_argument("unknown element symbol '"
                                + std::string(symbol) + "'");
  return *idx;
}

Eigen::VectorXd ElementTable::column(ElementColumn col) const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) {
    switch (col) {
    case ElementColumn::kMaxValence:
      v[i] = elements_[i].max_valence;
      break;
    case ElementColumn::kCovalentRadius:
      v[i] = elements_[i].covalent_radius;
      break;
    case ElementColumn::kVdwRadius:
      v[i] = elements_[i].vdw_radius;
      break;
    }
  }
  return v;
}

BondOrders::BondOrders(std::vector<double> orders, int aromatic_index)
    : orders_(std::move(orders)), aromatic_index_(aromatic_index) {
  if (orders_.size() < 2)
    throw std::invalid_argument("need at least two bond categories");
  if (orders_[0] != 0.0)
    throw std::invalid_argument("bond order of category 0 must be 0");
  if (aromatic_index_ >= size() || aromatic_index_ == 0)
    throw std::invalid_argument("invalid aromatic bond category");

  double prev = 0.0;
  for (int k = 0; k < size(); ++k) {
    if (orders_[k] < 0)
      throw std::invalid_argument("bond orders must be non-negative");
    if (k == aromatic_index_)
      continue;
    if (orders_[k] < prev)
      throw std::invalid_argument("bond orders must be non-decreasing");
    prev = orders_[k];
  }
}

BondOrders BondOrders::with_aromatic() {
  return BondOrders({ 0.0, 1.0, 2.0, 3.0, 1.5 }, 4);
}

BondOrders BondOrders::without_aromatic() {
  return BondOrders({ 0.0, 1.0, 2.0, 3.0 });
}

BondOrders BondOrders::for_categories(int k) {
  if (k == 5)
    return with_aromatic();
  if (k == 4)
    return without_aromatic();
  throw std::invalid_argument("unsupported bond vocabulary size "
                              + std::to_string(k) + " (expected 4 or 5)");
}

Eigen::VectorXd BondOrders::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(orders_.data(), size());
}

}  // namespace hierflow
