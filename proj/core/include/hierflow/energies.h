//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_ENERGIES_H_
#define HIERFLOW_ENERGIES_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hierflow/elements.h"
#include "hierflow/relaxed_state.h"
#include "hierflow/rings.h"

namespace hierflow {

enum class EnergyTerm {
  kValence,
  kCount,
  kConnLogdet,
  kConnLambda2,
  kConsistency,
  kBondLength,
  kSteric,
  kHierConn,
  kRingClosure,
  kRingExclusivity,
};

inline constexpr EnergyTerm kAllEnergyTerms[] = {
  EnergyTerm::kValence,     EnergyTerm::kCount,        EnergyTerm::kConnLogdet,
  EnergyTerm::kConnLambda2, EnergyTerm::kConsistency,  EnergyTerm::kBondLength,
  EnergyTerm::kSteric,      EnergyTerm::kHierConn,     EnergyTerm::kRingClosure,
  EnergyTerm::kRingExclusivity,
};

std::string_view energy_term_name(EnergyTerm term);
EnergyTerm energy_term_from_name(std::string_view name);

enum class ConnectivityMode { kLogdet, kLambda2 };

struct EnergyConfig {
  double lambda_val = 1.0;
  double lambda_cnt = 0.1;
  double lambda_conn = 0.05;
  double lambda_bondlen = 1.0;
  double lambda_steric = 0.2;

  double eta_chem = 1.0;
  double eta_cons = 0.5;
  double eta_geom = 0.2;
  double eta_geom_z = 0.02;
  double gamma = 2.0;

  double eps_laplacian = 1e-3;
  double steric_sharpness = 10.0;
  double lambda_bond_min = 0.05;
  double lambda_bond_max = 0.2;
  double lambda2_threshold = 1e-2;
  ConnectivityMode connectivity = ConnectivityMode::kLogdet;

  // Ideal-length factor per bond category (entry 0 unused).
  std::vector<double> length_factors { 0.0, 1.00, 0.93, 0.90, 0.965 };

  // Optional terms added to the consistency group.
  bool hier_conn = false;
  bool ring_closure = false;
  bool ring_exclusivity = false;
  double lambda_hier_conn = 1.0;
  double lambda_ring_closure = 1.0;
  double lambda_ring_exclusivity = 1.0;
  double ring_beta = 0.5;

  // Target edge count by atom count.
  std::map<int, double> m_target;

  // Target edge count for n atoms; falls back to n - 1 and sets *fallback.
  double target_edges(int n, bool *fallback = nullptr) const;

  double lambda_bond(double t) const {
    return lambda_bond_min + (lambda_bond_max - lambda_bond_min) * t;
  }

  void validate() const;

  nlohmann::json to_json() const;
  static EnergyConfig from_json(const nlohmann::json &j);
};

double anneal(double eta0, double gamma, double t);

double soft_element_constant(const Eigen::Ref<const Eigen::VectorXd> &alpha,
                             ElementColumn column, const ElementTable &table);

/**
 * @brief Gradient blocks matching the layout of a RelaxedState.
 *
 * Used both for gradients in probability space (before the softmax chain
 * rule) and in logit space.
 */
struct StateGradient {
  Eigen::MatrixXd atom;
  Eigen::MatrixXd bond;
  Eigen::MatrixXd type;
  Eigen::MatrixXd parent;
  Eigen::MatrixX3d coords;

  static StateGradient zeros(const RelaxedState &state);

  StateGradient &operator+=(const StateGradient &other);
  StateGradient &add_scaled(const StateGradient &other, double scale);
  bool all_finite() const;
  double max_abs() const;
};

// Softmax chain rule applied per categorical row; masked rows get zero.
StateGradient to_logit_space(const RelaxedState &state,
                             const StateGradient &prob_grad);

// Data used by terms beyond the state itself.
struct EnergyInputs {
  Eigen::MatrixXd similarity;  // N x N hierarchy similarities (upper used)
  std::vector<std::vector<int>> motifs;
  std::vector<Ring> rings;
};

struct EnergyReport {
  std::map<EnergyTerm, double> values;
  double chem = 0.0;
  double cons = 0.0;
  double geom = 0.0;
  StateGradient chem_grad;  // logit space, coordinate block included
  StateGradient cons_grad;
  StateGradient geom_grad;
};

class EnergyModel {
public:
  EnergyModel(ElementTable table, BondOrders orders, EnergyConfig config);

  const ElementTable &table() const { return table_; }
  const BondOrders &orders() const { return orders_; }
  const EnergyConfig &config() const { return config_; }

  // Unweighted value of one term; when grad is given it receives the
  // logit-space gradient (coordinates included).
  double term(EnergyTerm which, const RelaxedState &state,
              const EnergyInputs &inputs = {},
              StateGradient *grad = nullptr) const;

  // Adds weight * d(term)/d(probabilities, coords) to prob_grad and returns
  // the unweighted value.
  double accumulate(EnergyTerm which, const RelaxedState &state,
                    const EnergyInputs &inputs, double weight,
                    StateGradient &prob_grad) const;

  // Terms of each group with their weights, as configured.
  std::vector<std::pair<EnergyTerm, double>> chem_terms() const;
  std::vector<std::pair<EnergyTerm, double>>
  cons_terms(const EnergyInputs &inputs) const;
  std::vector<std::pair<EnergyTerm, double>> geom_terms() const;

  EnergyReport evaluate(const RelaxedState &state,
                        const EnergyInputs &inputs = {}) const;

private:
  double valence(const RelaxedState &s, double w, StateGradient &g) const;
  double count(const RelaxedState &s, double w, StateGradient &g) const;
  double conn_logdet(const RelaxedState &s, const std::vector<int> &atoms,
                     double w, StateGradient &g) const;
  double conn_lambda2(const RelaxedState &s, double w, StateGradient &g) const;
  double consistency(const RelaxedState &s, const EnergyInputs &in, double w,
                     StateGradient &g) const;
  double bond_length(const RelaxedState &s, double w, StateGradient &g) const;
  double steric(const RelaxedState &s, double w, StateGradient &g) const;
  double hier_conn(const RelaxedState &s, const EnergyInputs &in, double w,
                   StateGradient &g) const;
  double ring_closure(const RelaxedState &s, const EnergyInputs &in, double w,
                      StateGradient &g) const;
  double ring_exclusivity(const RelaxedState &s, const EnergyInputs &in,
                          double w, StateGradient &g) const;

  ElementTable table_;
  BondOrders orders_;
  EnergyConfig config_;
  Eigen::VectorXd max_valence_;
  Eigen::VectorXd cov_radius_;
  Eigen::VectorXd vdw_radius_;
  Eigen::VectorXd bond_order_;
};

}  // namespace hierflow

#endif  // HIERFLOW_ENERGIES_H_
