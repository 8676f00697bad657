//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_ELEMENTS_H_
#define HIERFLOW_ELEMENTS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace hierflow {

struct Element {
  std::string symbol;
  int max_valence;
  double covalent_radius;  // Å
  double vdw_radius;       // Å

  bool operator==(const Element &) const = default;
};

enum class ElementColumn {
  kMaxValence,
  kCovalentRadius,
  kVdwRadius,
};

/**
 * @brief Atom-type vocabulary with the per-element constants used by the
 *        validity energies.
 *
 * The index of an element in the table is its atom-type category. The
 * default table covers H, C, N, O, F, P, S, Cl, Br, I; entries loaded from
 * JSON override defaults with the same symbol and append new symbols in
 * file order.
 */
class ElementTable {
public:
  ElementTable() = default;
  explicit ElementTable(std::vector<Element> elements);

  static ElementTable defaults();

  // {"symbol": {"max_valence": int, "r_cov": float, "r_vdw": float}, ...}
  static ElementTable from_json(const nlohmann::ordered_json &j,
                                bool merge_with_defaults = true);
  static ElementTable load(const std::filesystem::path &path,
                           bool merge_with_defaults = true);
  nlohmann::ordered_json to_json() const;

  int size() const { return static_cast<int>(elements_.size()); }
  const Element &operator[](int idx) const { return elements_[idx]; }
  const Element &at(int idx) const { return elements_.at(idx); }

  std::optional<int> find(std::string_view symbol) const;
  // Throws std::invalid_argument for unknown symbols.
  int index_of(std::string_view symbol) const;

  Eigen::VectorXd column(ElementColumn col) const;

  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  bool operator==(const ElementTable &) const = default;

private:
  std::vector<Element> elements_;
};

/**
 * @brief Scalar bond order per bond-type category.
 *
 * Category 0 is always "no bond" with order 0. The five-category default is
 * none/single/double/triple/aromatic with the aromatic order set to 1.5.
 */
class BondOrders {
public:
  BondOrders(std::vector<double> orders, int aromatic_index = -1);

  static BondOrders with_aromatic();
  static BondOrders without_aromatic();
  // K = 5 -> with_aromatic(), K = 4 -> without_aromatic().
  static BondOrders for_categories(int k);

  int size() const { return static_cast<int>(orders_.size()); }
  double operator[](int k) const { return orders_[k]; }
  const std::vector<double> &orders() const { return orders_; }
  Eigen::VectorXd vector() const;

  bool has_aromatic() const { return aromatic_index_ >= 0; }
  int aromatic_index() const { return aromatic_index_; }

  bool operator==(const BondOrders &) const = default;

private:
  std::vector<double> orders_;
  int aromatic_index_;
};

}  // namespace hierflow

#endif  // HIERFLOW_ELEMENTS_H_
