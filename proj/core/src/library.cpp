//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/library.h"

#include <array>
#include <cmath>
#include <numbers>

namespace hierflow {
namespace {
  class Builder {
   public:
    Builder(const ElementTable &table, std::string name)
        : table_(table), name_(std::move(name)) {}

    int atom(const char *sym, double x, double y) {
      elems_.push_back(table_.index_of(sym));
      xyz_.emplace_back(x, y);
      return static_cast<int>(elems_.size()) - 1;
    }

    // Regular ring of bond length d centred at (cx, cy), first atom at angle
    // phase.
    std::vector<int> ring(const std::vector<const char *> &syms, double d,
                          double cx = 0.0, double cy = 0.0,
                          double phase = 0.0) {
      const int n = static_cast<int>(syms.size());
      const double r = d / (2.0 * std::sin(std::numbers::pi / n));
      std::vector<int> ids;
      for (int k = 0; k < n; ++k) {
        const double a = phase + 2.0 * std::numbers::pi * k / n;
        ids.push_back(atom(syms[k], cx + r * std::cos(a), cy + r * std::sin(a)));
      }
      return ids;
    }

    // Substituent placed radially outward from ring atom `at` of a ring
    // centred at (cx, cy).
    int radial(const char *sym, int at, double d, double cx = 0.0,
               double cy = 0.0) {
      const double dx = xyz_[at].first - cx, dy = xyz_[at].second - cy;
      const double len = std::hypot(dx, dy);
      return atom(sym, xyz_[at].first + d * dx / len,
                  xyz_[at].second + d * dy / len);
    }

    void bond(int i, int j, int type) { bonds_.push_back({ i, j, type }); }

    NamedMolecule build() const {
      const int n = static_cast<int>(elems_.size());
      Molecule m(n);
      m.elements = elems_;
      for (int i = 0; i < n; ++i)
        m.coords.row(i) << xyz_[i].first, xyz_[i].second, 0.0;
      for (const auto &b: bonds_)
        m.add_bond(b[0], b[1], b[2]);
      return { name_, m };
    }

   private:
    const ElementTable &table_;
    std::string name_;
    std::vector<int> elems_;
    std::vector<std::pair<double, double>> xyz_;
    std::vector<std::array<int, 3>> bonds_;
  };

  void aromatic_ring(Builder &b, const std::vector<int> &ids,
                     const BondOrders &orders) {
    const int n = static_cast<int>(ids.size());
    for (int k = 0; k < n; ++k) {
      const int type = orders.has_aromatic() ? orders.aromatic_index()
                                             : (k % 2 == 0 ? 2 : 1);
      b.bond(ids[k], ids[(k + 1) % n], type);
    }
  }
}  // namespace

std::vector<NamedMolecule> builtin_molecules(const ElementTable &table,
                                             const BondOrders &orders) {
  std::vector<NamedMolecule> out;
  {
    Builder b(table, "ethanol");
    const int c0 = b.atom("C", 0.0, 0.0);
    const int c1 = b.atom("C", 1.52, 0.0);
    const int o = b.atom("O", 2.03, 1.35);
    b.bond(c0, c1, 1);
    b.bond(c1, o, 1);
    out.push_back(b.build());
  }
  {
    Builder b(table, "acetic_acid");
    const int c0 = b.atom("C", 0.0, 0.0);
    const int c1 = b.atom("C", 1.50, 0.0);
    const int o1 = b.atom("O", 2.15, 1.05);
    const int o2 = b.atom("O", 2.15, -1.15);
    b.bond(c0, c1, 1);
    b.bond(c1, o1, 2);
    b.bond(c1, o2, 1);
    out.push_back(b.build());
  }
  {
    Builder b(table, "acetonitrile");
    const int c0 = b.atom("C", 0.0, 0.0);
    const int c1 = b.atom("C", 1.46, 0.0);
    const int n = b.atom("N", 2.62, 0.0);
    b.bond(c0, c1, 1);
    b.bond(c1, n, 3);
    out.push_back(b.build());
  }
  {
    Builder b(table, "benzene");
    aromatic_ring(b, b.ring({ "C", "C", "C", "C", "C", "C" }, 1.39), orders);
    out.push_back(b.build());
  }
  {
    Builder b(table, "pyridine");
    aromatic_ring(b, b.ring({ "N", "C", "C", "C", "C", "C" }, 1.38), orders);
    out.push_back(b.build());
  }
  {
    Builder b(table, "phenol");
    const auto r = b.ring({ "C", "C", "C", "C", "C", "C" }, 1.39);
    aromatic_ring(b, r, orders);
    b.bond(r[0], b.radial("O", r[0], 1.36), 1);
    out.push_back(b.build());
  }
  {
    Builder b(table, "toluene");
    const auto r = b.ring({ "C", "C", "C", "C", "C", "C" }, 1.39);
    aromatic_ring(b, r, orders);
    b.bond(r[0], b.radial("C", r[0], 1.51), 1);
    out.push_back(b.build());
  }
  {
    Builder b(table, "cyclohexanol");
    const auto r = b.ring({ "C", "C", "C", "C", "C", "C" }, 1.53);
    for (int k = 0; k < 6; ++k)
      b.bond(r[k], r[(k + 1) % 6], 1);
    b.bond(r[0], b.radial("O", r[0], 1.43), 1);
    out.push_back(b.build());
  }
  {
    Builder b(table, "pyrrole");
    const auto r = b.ring({ "N", "C", "C", "C", "C" }, 1.38);
    aromatic_ring(b, r, orders);
    out.push_back(b.build());
  }
  {
    Builder b(table, "benzamide");
    const auto r = b.ring({ "C", "C", "C", "C", "C", "C" }, 1.39);
    aromatic_ring(b, r, orders);
    const int c = b.radial("C", r[0], 1.50);
    b.bond(r[0], c, 1);
    const double x = 1.39 + 1.50;
    const int o = b.atom("O", x + 0.62, 1.10);
    const int n = b.atom("N", x + 0.70, -1.15);
    b.bond(c, o, 2);
    b.bond(c, n, 1);
    out.push_back(b.build());
  }
  return out;
}

}  // namespace hierflow
